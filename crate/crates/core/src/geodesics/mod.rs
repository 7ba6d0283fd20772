//! Geodesic paths in the space of Kähler potentials.
//!
//! Three constructions: vector-field-induced paths (pullback potentials with
//! the energy-zero gauge), toric paths on ℂP¹ (linear interpolation of
//! symplectic potentials, bridged by Legendre transforms) and
//! multidimensional paths from commuting tuples on products.
//!
//! All second time derivatives use the real-time convention; the factor
//! table to complex time lives in [`crate::conventions`].

pub mod energy;
pub mod multi;
pub mod toric;

use num_complex::Complex64;

use crate::conventions::TAU_LAPLACE_FACTOR;
use crate::error::{Error, Result};
use crate::flows::{self, Exactness, HoloField};
use crate::grid::cp1::{self, Cp1Manifold, SymplecticPotential};
use crate::grid::profile::Profile;
use crate::grid::{Form11, Manifold, MetricDensity, ScalarField};

pub use toric::{extension_interval, max_extension_time, toric_geodesic, ExtensionTime};

/// Uniform time grid `t_i = start + i·step`, `i = 0..=steps`.
#[derive(Clone, Copy, Debug)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        assert!(steps >= 1 && stop > start);
        TimeGrid {
            start,
            step: (stop - start) / steps as f64,
            steps,
        }
    }

    pub fn nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn t(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.nodes()).map(|i| self.t(i)).collect()
    }

    /// Index of the grid node closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        (((t - self.start) / self.step).round() as isize).clamp(0, self.steps as isize) as usize
    }
}

/// Normalization record of a path: the canonical choice is energy zero;
/// manual re-gauges carry the explicit affine function `a + b t` added on
/// top of it.
#[derive(Clone, Copy, Debug)]
pub struct GaugeRecord {
    pub energy_zero: bool,
    pub affine: (f64, f64),
}

impl GaugeRecord {
    pub fn canonical() -> Self {
        GaugeRecord {
            energy_zero: true,
            affine: (0.0, 0.0),
        }
    }
}

/// How the recorded velocities were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityMethod {
    ClosedForm,
    CentralDifference,
}

/// Provenance of a path; generators with closed forms support pointwise
/// evaluation at arbitrary `(t, m)`, which drives leaf tracing and the
/// large-time operations.
#[derive(Clone, Debug)]
pub enum PathGenerator {
    /// Pullback path of a holomorphic field; `gauge_rate` is the constant
    /// `d/dt` of the energy gauge.
    Induced {
        field: HoloField,
        gauge_rate: f64,
    },
    /// Linear interpolation `w_t = w₀ + t·(w₁−w₀)` of symplectic potentials.
    Toric {
        w0: SymplecticPotential,
        dd: Profile,
        gauge_rate: f64,
    },
    /// A toric path plus `amp(t)·bump(m)`; a negative control that is not a
    /// geodesic.
    ToricPerturbed {
        w0: SymplecticPotential,
        dd: Profile,
        gauge_rate: f64,
        time_amp: Profile,
        bump: Profile,
    },
    /// Sampled data only; no pointwise evaluation.
    Manual,
}

/// Closed-form point data on a ℂP¹ backend.
#[derive(Clone, Copy, Debug)]
pub struct Cp1Point {
    pub udot: f64,
    pub udot_m: f64,
    pub rho: f64,
}

/// A discretized path of Kähler potentials over a real time grid.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub manifold: Manifold,
    pub times: TimeGrid,
    pub potentials: Vec<ScalarField>,
    pub velocities: Vec<ScalarField>,
    pub metrics: Vec<MetricDensity>,
    pub velocity_method: VelocityMethod,
    pub gauge: GaugeRecord,
    pub generator: PathGenerator,
}

impl GeodesicPath {
    pub fn potential(&self, i: usize) -> &ScalarField {
        &self.potentials[i]
    }

    pub fn velocity(&self, i: usize) -> &ScalarField {
        &self.velocities[i]
    }

    pub fn metric(&self, i: usize) -> &MetricDensity {
        &self.metrics[i]
    }

    /// Adds the affine gauge `a + b·t` to the path, recording it.
    pub fn regauge(&self, a: f64, b: f64) -> GeodesicPath {
        let mut out = self.clone();
        for i in 0..out.times.nodes() {
            let t = out.times.t(i);
            out.potentials[i] = out.potentials[i].shift(a + b * t);
            out.velocities[i] = out.velocities[i].shift(b);
        }
        out.gauge = GaugeRecord {
            energy_zero: false,
            affine: (self.gauge.affine.0 + a, self.gauge.affine.1 + b),
        };
        out
    }

    /// Closed-form evaluation at arbitrary `(t, m)` on a ℂP¹ backend.
    pub fn cp1_point(&self, t: f64, m: f64) -> Result<Cp1Point> {
        let c = self.manifold.as_cp1()?;
        cp1_point_eval(c, &self.generator, t, m)
    }

    /// Closed-form velocity field at arbitrary time on generator-backed
    /// paths.
    pub fn velocity_field_at(&self, t: f64) -> Result<ScalarField> {
        match &self.manifold {
            Manifold::Cp1(c) => {
                let data = (0..c.nodes())
                    .map(|i| Ok(cp1_point_eval(c, &self.generator, t, c.m(i))?.udot))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(ScalarField::new(c.shape(), data))
            }
            Manifold::Torus(_) => torus_velocity_field(self, t),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// Closed-form metric density at arbitrary time on generator-backed
    /// paths.
    pub fn metric_at(&self, t: f64) -> Result<MetricDensity> {
        match &self.manifold {
            Manifold::Cp1(c) => {
                let data = (0..c.nodes())
                    .map(|i| Ok(cp1_point_eval(c, &self.generator, t, c.m(i))?.rho))
                    .collect::<Result<Vec<f64>>>()?;
                MetricDensity::try_new(ScalarField::new(c.shape(), data))
            }
            Manifold::Torus(_) => match &self.generator {
                PathGenerator::Induced { field, .. } => {
                    let map = flows::flow(&self.manifold, field, Complex64::new(t, 0.0))?;
                    flows::pullback_reference(&self.manifold, &map)
                }
                _ => Err(Error::UnsupportedField),
            },
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }
}

fn real_coefficient(field: &HoloField) -> Result<f64> {
    match field {
        HoloField::Cp1Linear { a } => {
            if a.im != 0.0 {
                Err(Error::precondition(
                    "ℂP¹ induced paths need a real coefficient (Im V Hamiltonian)",
                ))
            } else {
                Ok(a.re)
            }
        }
        _ => Err(Error::UnsupportedField),
    }
}

fn cp1_point_eval(
    c: &Cp1Manifold,
    generator: &PathGenerator,
    t: f64,
    m: f64,
) -> Result<Cp1Point> {
    match generator {
        PathGenerator::Induced { field, gauge_rate } => {
            let a = real_coefficient(field)?;
            let w0 = c.potential();
            let scale = 2.0 * a * t;
            let (psi, dpsi) = moment_flow(m, scale);
            let rho0 = w0.reduced_density(psi);
            Ok(Cp1Point {
                udot: 2.0 * a * w0.moment_reparam(psi) + gauge_rate,
                udot_m: 2.0 * a * rho0 * dpsi,
                rho: rho0 * dpsi,
            })
        }
        PathGenerator::Toric { w0, dd, gauge_rate } => {
            let (mt, rho) = toric::moment_state(w0, dd, t, m);
            Ok(Cp1Point {
                udot: -dd.eval(mt) + gauge_rate,
                udot_m: -dd.d1(mt) * rho,
                rho,
            })
        }
        PathGenerator::ToricPerturbed {
            w0,
            dd,
            gauge_rate,
            time_amp,
            bump,
        } => {
            let (mt, rho) = toric::moment_state(w0, dd, t, m);
            let mu = cp1::mu(m);
            let mu_d = 1.0 - 2.0 * m;
            let q_bump = mu_d * bump.d1(m) + mu * bump.d2(m);
            Ok(Cp1Point {
                udot: -dd.eval(mt) + gauge_rate + time_amp.d1(t) * bump.eval(m),
                udot_m: -dd.d1(mt) * rho + time_amp.d1(t) * bump.d1(m),
                rho: rho + time_amp.eval(t) * q_bump,
            })
        }
        PathGenerator::Manual => Err(Error::precondition(
            "manual paths carry no closed-form generator",
        )),
    }
}

/// Moment image of the flow with `log|z|²`-shift `c`, and its derivative:
/// `ψ(m) = σ(s(m)+c)`, `ψ' = e^c/((1−m)+e^c m)²`.
pub fn moment_flow(m: f64, c: f64) -> (f64, f64) {
    let e = c.exp();
    let d = (1.0 - m) + e * m;
    let dpsi = e / (d * d);
    let psi = if m <= 0.0 {
        0.0
    } else if m >= 1.0 {
        1.0
    } else {
        cp1::sigma(cp1::s_of_m(m) + c)
    };
    (psi, dpsi)
}

/// Constructs the canonical (energy-zero) path induced by a holomorphic
/// vector field: for each `t`, `u_t` solves `i∂∂̄u = ω_t − ω` and the
/// Aubin–Yau energy fixes the constant. Errors when the exactness condition
/// fails unless `allow_obstruction` is set (the counterexample study).
pub fn induced_geodesic(
    manifold: &Manifold,
    field: &HoloField,
    times: TimeGrid,
    allow_obstruction: bool,
) -> Result<GeodesicPath> {
    let reference = manifold.reference_metric();
    match flows::exactness_check(manifold, field, &reference) {
        Ok(Exactness::Exact { .. }) => {}
        Ok(Exactness::Obstructed { obstruction }) => {
            if !allow_obstruction {
                return Err(Error::NotExact { obstruction });
            }
        }
        Err(Error::UnsupportedField) => return Err(Error::UnsupportedField),
        Err(e) => return Err(e),
    }

    let gauge_rate = induced_gauge_rate(manifold, field)?;
    let generator = PathGenerator::Induced {
        field: field.clone(),
        gauge_rate,
    };

    let mut potentials = Vec::with_capacity(times.nodes());
    let mut velocities = Vec::with_capacity(times.nodes());
    let mut metrics = Vec::with_capacity(times.nodes());
    for i in 0..times.nodes() {
        let t = times.t(i);
        let map = flows::flow(manifold, field, Complex64::new(t, 0.0))?;
        let metric = flows::pullback_reference(manifold, &map)?;
        let q = Form11 {
            density: metric.density.sub(&reference.density),
        };
        // quadrature defect of the pullback is projected out; see the module
        // docs of `grid::cp1` for the tolerance discussion
        let u_pre = manifold.poisson_solve_tol(&q, 0.5)?;
        let c = energy::energy_gauge_constant(manifold, &u_pre, &q)?;
        let u = u_pre.shift(-c);
        let udot = velocity_for(manifold, &generator, t, &metric)?;
        potentials.push(u);
        velocities.push(udot);
        metrics.push(metric);
    }

    Ok(GeodesicPath {
        manifold: manifold.clone(),
        times,
        potentials,
        velocities,
        metrics,
        velocity_method: VelocityMethod::ClosedForm,
        gauge: GaugeRecord::canonical(),
        generator,
    })
}

/// `d/dt` of the canonical gauge: `−(2/V)∫ h ω` written through the flow,
/// which is constant in `t`.
fn induced_gauge_rate(manifold: &Manifold, field: &HoloField) -> Result<f64> {
    match (manifold, field) {
        (Manifold::Cp1(c), HoloField::Cp1Linear { a }) => {
            let a = if a.im == 0.0 {
                a.re
            } else {
                return Err(Error::precondition(
                    "ℂP¹ induced paths need a real coefficient",
                ));
            };
            let mtilde: Vec<f64> = (0..c.nodes())
                .map(|i| c.potential().moment_reparam(c.m(i)))
                .collect();
            let field = ScalarField::new(c.shape(), mtilde);
            Ok(-2.0 * a * cp1::weighted_mean(c, &field))
        }
        (Manifold::Torus(_), HoloField::TorusConstant { .. }) => Ok(0.0),
        _ => Err(Error::UnsupportedField),
    }
}

fn velocity_for(
    manifold: &Manifold,
    generator: &PathGenerator,
    t: f64,
    metric_t: &MetricDensity,
) -> Result<ScalarField> {
    match manifold {
        Manifold::Cp1(c) => {
            let data = (0..c.nodes())
                .map(|i| Ok(cp1_point_eval(c, generator, t, c.m(i))?.udot))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ScalarField::new(c.shape(), data))
        }
        Manifold::Torus(_) => torus_velocity(manifold, generator, t, metric_t),
        Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
    }
}

/// Torus velocity `u̇ = P(ρ̇_t) − mean_{ω_t}`, with `ρ̇_t` the exact
/// (band-limited) time derivative of the translated density.
fn torus_velocity(
    manifold: &Manifold,
    generator: &PathGenerator,
    t: f64,
    metric_t: &MetricDensity,
) -> Result<ScalarField> {
    let PathGenerator::Induced { field, .. } = generator else {
        return Err(Error::UnsupportedField);
    };
    let HoloField::TorusConstant { c } = field else {
        return Err(Error::UnsupportedField);
    };
    let torus = manifold.as_torus()?;
    let reference = torus.reference();
    let (gx, gy) = crate::grid::torus::gradient(torus, &reference.density);
    let shifted_gx =
        crate::grid::spectral::shifted_samples(&gx.data, torus.n(), c.re * t, c.im * t);
    let shifted_gy =
        crate::grid::spectral::shifted_samples(&gy.data, torus.n(), c.re * t, c.im * t);
    let rho_dot: Vec<f64> = shifted_gx
        .iter()
        .zip(&shifted_gy)
        .map(|(&a, &b)| c.re * a + c.im * b)
        .collect();
    let q = Form11 {
        density: ScalarField::new(torus.shape(), rho_dot),
    };
    let u_pre = manifold.poisson_solve_tol(&q, 0.5)?;
    let mean = manifold.mean_against(&u_pre, metric_t);
    Ok(u_pre.shift(-mean))
}

fn torus_velocity_field(path: &GeodesicPath, t: f64) -> Result<ScalarField> {
    let metric = path.metric_at(t)?;
    torus_velocity(&path.manifold, &path.generator, t, &metric)
}

/// The geodesic residual field `c(u_t) = ¼(ü_tt − |∂̄u̇_t|²_t)` at an
/// interior node, and its sup deviation from its `ω_t`-mean. The homogeneous
/// Monge–Ampère equation holds exactly when the deviation vanishes.
#[derive(Clone, Debug)]
pub struct Residual {
    pub field: ScalarField,
    pub deviation: f64,
    pub mean: f64,
}

pub fn geodesic_residual(path: &GeodesicPath, i: usize) -> Result<Residual> {
    if i == 0 || i + 1 >= path.times.nodes() {
        return Err(Error::BoundaryTimeNode { index: i });
    }
    let h = path.times.step;
    let udd = second_time_derivative(&path.potentials, i, h);
    let grad_sq = path
        .manifold
        .dbar_norm_sq(&path.velocities[i], &path.metrics[i])?;
    let c_field = udd
        .zip_map(&grad_sq, |a, b| a - b)
        .scale(TAU_LAPLACE_FACTOR);
    let mean = path.manifold.mean_against(&c_field, &path.metrics[i]);
    let deviation = c_field
        .data
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max((v - mean).abs()));
    Ok(Residual {
        field: c_field,
        deviation,
        mean,
    })
}

/// Sup norm of the (n+1)-fold wedge density
/// `Ω^{n+1}/(n+1)! = c(u)·i dτ∧dτ̄ ∧ ω_tⁿ/n!` after removing the time
/// gauge: `sup |(c − mean c) · ρ_t|` in the backend frame.
pub fn hcmae_residual(path: &GeodesicPath, i: usize) -> Result<f64> {
    let residual = geodesic_residual(path, i)?;
    let rho = &path.metrics[i].density;
    Ok(residual
        .field
        .data
        .iter()
        .zip(&rho.data)
        .fold(0.0_f64, |acc, (&c, &r)| {
            acc.max(((c - residual.mean) * r).abs())
        }))
}

/// Centered second difference in time, Richardson-extrapolated once when the
/// 5-point stencil fits.
pub fn second_time_derivative(fields: &[ScalarField], i: usize, h: f64) -> ScalarField {
    let n = fields.len();
    assert!(i > 0 && i + 1 < n);
    let d_h = |k: usize, step: usize| -> Vec<f64> {
        let scale = 1.0 / ((step as f64 * h) * (step as f64 * h));
        (0..fields[k].data.len())
            .map(|j| {
                (fields[k + step].data[j] - 2.0 * fields[k].data[j] + fields[k - step].data[j])
                    * scale
            })
            .collect()
    };
    if i >= 2 && i + 2 < n {
        let fine = d_h(i, 1);
        let coarse = d_h(i, 2);
        let data = fine
            .iter()
            .zip(&coarse)
            .map(|(&f, &c)| (4.0 * f - c) / 3.0)
            .collect();
        ScalarField::new(fields[i].shape, data)
    } else {
        ScalarField::new(fields[i].shape, d_h(i, 1))
    }
}

/// Large-time behaviour of a generator-backed path: velocity and `u_T/T`
/// fields, the sup-norm record across a time sample, and the reference
/// measure of the set where the velocity deviates from its essential max.
#[derive(Clone, Debug)]
pub struct SlopeReport {
    pub t_big: f64,
    pub velocity: ScalarField,
    pub slope: ScalarField,
    pub sup_norms: Vec<(f64, f64)>,
    pub ess_max: f64,
    pub deviation_eps: f64,
    pub deviation_measure: f64,
}

/// Computes the asymptotic-slope report at `t_big`. The potential `u_T` is
/// the time quadrature of the closed-form velocities from the canonical
/// `u_0 = 0` (Simpson, step ≤ 0.05), so no Poisson solve at unresolved
/// times is involved.
pub fn asymptotic_slope(
    path: &GeodesicPath,
    t_big: f64,
    eps: f64,
    sup_samples: &[f64],
) -> Result<SlopeReport> {
    let velocity = path.velocity_field_at(t_big)?;
    let u_big = integrate_velocity(path, t_big)?;
    let slope = u_big.scale(1.0 / t_big);
    let mut sup_norms = Vec::with_capacity(sup_samples.len());
    for &t in sup_samples {
        sup_norms.push((t, path.velocity_field_at(t)?.sup_norm()));
    }
    let ess_max = velocity.max();
    let weights = path
        .manifold
        .node_measure(&path.manifold.reference_metric());
    let deviation_measure = velocity
        .data
        .iter()
        .zip(&weights)
        .filter(|(&v, _)| (v - ess_max).abs() > eps)
        .map(|(_, &w)| w)
        .sum();
    Ok(SlopeReport {
        t_big,
        velocity,
        slope,
        sup_norms,
        ess_max,
        deviation_eps: eps,
        deviation_measure,
    })
}

/// `u_T = ∫₀ᵀ u̇_t dt` by composite Simpson over closed-form velocities.
pub fn integrate_velocity(path: &GeodesicPath, t_big: f64) -> Result<ScalarField> {
    let steps = ((t_big.abs() / 0.05).ceil() as usize).max(8);
    let steps = steps + steps % 2;
    let h = t_big / steps as f64;
    let mut acc = ScalarField::zeros(path.manifold.shape());
    for k in 0..=steps {
        let weight = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = path.velocity_field_at(k as f64 * h)?;
        acc = acc.zip_map(&v, |a, b| a + weight * b);
    }
    Ok(acc.scale(h / 3.0))
}
