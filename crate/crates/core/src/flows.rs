//! Holomorphic vector fields with closed-form flows, pullbacks of Kähler
//! forms, contractions and the ∂̄-exactness condition.
//!
//! Only field kinds with closed-form flows are supported; no flow is ever
//! integrated numerically here, so every downstream tolerance is anchored to
//! an exact map.

use num_complex::Complex64;

use crate::conventions::DEFAULT_REL_TOL;
use crate::error::{Error, Result};
use crate::grid::cp1::{self, Cp1Manifold};
use crate::grid::{ComplexField, Form01, Manifold, MetricDensity, ScalarField};

/// Supported holomorphic vector fields.
#[derive(Clone, Debug)]
pub enum HoloField {
    /// `c ∂/∂z` on the torus; flow `z ↦ z + cτ`.
    TorusConstant { c: Complex64 },
    /// `a z ∂/∂z` on ℂP¹; flow `z ↦ e^{aτ} z`.
    Cp1Linear { a: Complex64 },
    /// Componentwise pair on a product (the factors automatically commute).
    Product(Box<HoloField>, Box<HoloField>),
}

impl HoloField {
    pub fn torus_constant(re: f64, im: f64) -> Self {
        HoloField::TorusConstant {
            c: Complex64::new(re, im),
        }
    }

    pub fn cp1_linear(re: f64, im: f64) -> Self {
        HoloField::Cp1Linear {
            a: Complex64::new(re, im),
        }
    }

    pub fn product(a: HoloField, b: HoloField) -> Self {
        HoloField::Product(Box::new(a), Box::new(b))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            HoloField::TorusConstant { c } => c.norm() == 0.0,
            HoloField::Cp1Linear { a } => a.norm() == 0.0,
            HoloField::Product(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    fn supported_on(&self, manifold: &Manifold) -> bool {
        matches!(
            (self, manifold),
            (HoloField::TorusConstant { .. }, Manifold::Torus(_))
                | (HoloField::Cp1Linear { .. }, Manifold::Cp1(_))
                | (HoloField::Product(..), Manifold::ProductCp1(..))
        )
    }
}

/// The time-τ flow of a holomorphic field, stored as the exact map.
#[derive(Clone, Debug)]
pub struct FlowMap {
    pub field: HoloField,
    pub tau: Complex64,
}

/// Builds the flow `F_τ` of a supported field.
pub fn flow(manifold: &Manifold, field: &HoloField, tau: Complex64) -> Result<FlowMap> {
    if !field.supported_on(manifold) {
        return Err(Error::UnsupportedField);
    }
    Ok(FlowMap {
        field: field.clone(),
        tau,
    })
}

impl FlowMap {
    /// Torus translation vector `(Re cτ, Im cτ)`.
    pub fn torus_shift(&self) -> Result<(f64, f64)> {
        match &self.field {
            HoloField::TorusConstant { c } => {
                let d = c * self.tau;
                Ok((d.re, d.im))
            }
            _ => Err(Error::UnsupportedField),
        }
    }

    /// Exponent `c = 2 Re(aτ)` of the induced map on `log|z|²`.
    pub fn log_scale(&self) -> Result<f64> {
        match &self.field {
            HoloField::Cp1Linear { a } => Ok(2.0 * (a * self.tau).re),
            _ => Err(Error::UnsupportedField),
        }
    }

    /// Image of a moment coordinate under the flow:
    /// `m ↦ e^c ρ/(1 + e^c ρ)` with `ρ = m/(1−m)`, `c = 2 Re(aτ)`.
    pub fn moment_image(&self, m: f64) -> Result<f64> {
        let c = self.log_scale()?;
        if m <= 0.0 {
            return Ok(0.0);
        }
        if m >= 1.0 {
            return Ok(1.0);
        }
        Ok(cp1::sigma(cp1::s_of_m(m) + c))
    }

    /// Derivative of the moment map image, `e^c/((1−m) + e^c m)²`.
    pub fn moment_jacobian(&self, m: f64) -> Result<f64> {
        let c = self.log_scale()?;
        let e = c.exp();
        let d = (1.0 - m) + e * m;
        Ok(e / (d * d))
    }

    /// Composition `F_τ ∘ F_σ` of flows of the same field.
    pub fn compose(&self, other: &FlowMap) -> FlowMap {
        FlowMap {
            field: self.field.clone(),
            tau: self.tau + other.tau,
        }
    }
}

/// Pullback `F*(ω)` of a metric density.
///
/// Torus densities transform by band-limited translation (the Jacobian is
/// 1); invariant ℂP¹ densities by `ρ(ψ(m))·ψ'(m)` where `ψ` is the moment
/// map image. Total volume is preserved.
pub fn pullback(
    manifold: &Manifold,
    map: &FlowMap,
    metric: &MetricDensity,
) -> Result<MetricDensity> {
    manifold.shape().check_matches(metric.shape())?;
    match manifold {
        Manifold::Torus(t) => {
            let (d1, d2) = map.torus_shift()?;
            let data = crate::grid::spectral::shifted_samples(&metric.density.data, t.n(), d1, d2);
            MetricDensity::try_new(ScalarField::new(metric.shape(), data))
        }
        Manifold::Cp1(c) => {
            let mut data = Vec::with_capacity(c.nodes());
            for i in 0..c.nodes() {
                let m = c.m(i);
                let image = map.moment_image(m)?;
                let jac = map.moment_jacobian(m)?;
                data.push(interp_cubic(&metric.density.data, c.step(), image) * jac);
            }
            MetricDensity::try_new(ScalarField::new(metric.shape(), data))
        }
        Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
    }
}

/// Pullback of the manifold's reference form, using the closed-form reduced
/// density of the reference potential instead of grid interpolation.
pub fn pullback_reference(manifold: &Manifold, map: &FlowMap) -> Result<MetricDensity> {
    match manifold {
        Manifold::Torus(t) => pullback(manifold, map, t.reference()),
        Manifold::Cp1(c) => {
            let w = c.potential();
            let mut data = Vec::with_capacity(c.nodes());
            for i in 0..c.nodes() {
                let m = c.m(i);
                let image = map.moment_image(m)?;
                let jac = map.moment_jacobian(m)?;
                data.push(w.reduced_density(image) * jac);
            }
            MetricDensity::try_new(ScalarField::new(c.shape(), data))
        }
        Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
    }
}

/// Cubic Lagrange interpolation on a uniform grid.
pub fn interp_cubic(values: &[f64], h: f64, x: f64) -> f64 {
    let n = values.len();
    assert!(n >= 4);
    let pos = (x / h).clamp(0.0, (n - 1) as f64);
    let mut i0 = pos.floor() as usize;
    // choose the 4-point window [i0-1, i0+2] clamped to the grid
    i0 = i0.clamp(1, n - 3);
    let base = i0 - 1;
    let t = pos - base as f64;
    let f = &values[base..base + 4];
    let c0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let c1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let c2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let c3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    c0 * f[0] + c1 * f[1] + c2 * f[2] + c3 * f[3]
}

/// Contraction `V⌟ω` as a (0,1)-form in the backend frame.
///
/// Torus (`V = c∂/∂z`, `ω = g·i dz∧dz̄`): coefficient `i c g` against `dz̄`.
/// ℂP¹ (`V = a z∂/∂z`): profile `i a μ ρ` against `∂̄s`.
pub fn contract(manifold: &Manifold, field: &HoloField, metric: &MetricDensity) -> Result<Form01> {
    manifold.shape().check_matches(metric.shape())?;
    match (manifold, field) {
        (Manifold::Torus(_), HoloField::TorusConstant { c }) => {
            let ic = Complex64::new(0.0, 1.0) * c;
            let data = metric.density.data.iter().map(|&g| ic * g).collect();
            Ok(Form01 {
                coeff: ComplexField::new(metric.shape(), data),
            })
        }
        (Manifold::Cp1(cp), HoloField::Cp1Linear { a }) => {
            let ia = Complex64::new(0.0, 1.0) * a;
            let data = metric
                .density
                .data
                .iter()
                .enumerate()
                .map(|(i, &rho)| ia * cp1::mu(cp.m(i)) * rho)
                .collect();
            Ok(Form01 {
                coeff: ComplexField::new(metric.shape(), data),
            })
        }
        _ => Err(Error::UnsupportedField),
    }
}

/// Outcome of the ∂̄-exactness test for `V⌟ω`.
#[derive(Clone, Debug)]
pub enum Exactness {
    /// `V⌟ω = i∂̄h`; the potential is mean-zero against `ωⁿ/n!` and may be
    /// complex (it is real exactly when Im V is Hamiltonian).
    Exact { potential: ComplexField },
    /// Norm of the harmonic obstruction.
    Obstructed { obstruction: f64 },
}

/// Tests whether `V⌟ω` is ∂̄-exact and returns the potential or the
/// obstruction norm. The contraction is always ∂̄-closed (V is holomorphic);
/// on the torus the obstruction is its constant Fourier component, on
/// invariant ℂP¹ there is none.
pub fn exactness_check(
    manifold: &Manifold,
    field: &HoloField,
    metric: &MetricDensity,
) -> Result<Exactness> {
    let beta = contract(manifold, field, metric)?;
    match manifold {
        Manifold::Torus(t) => {
            let harm = crate::grid::torus::harmonic_part(&beta);
            let scale = beta.coeff.sup_norm().max(1e-300);
            if harm.norm() > DEFAULT_REL_TOL * scale {
                return Ok(Exactness::Obstructed {
                    obstruction: harm.norm(),
                });
            }
            let mut potential = crate::grid::torus::dbar_potential(t, &beta);
            subtract_weighted_mean(manifold, &mut potential, metric);
            Ok(Exactness::Exact { potential })
        }
        Manifold::Cp1(c) => {
            let mut potential = cp1_dbar_potential(c, &beta);
            subtract_weighted_mean(manifold, &mut potential, metric);
            Ok(Exactness::Exact { potential })
        }
        Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
    }
}

/// Solves `i∂̄h = β` on the moment grid: `h_s = −i p`, `h_m = −i p/μ`, with
/// l'Hôpital limits at the fixed points.
fn cp1_dbar_potential(c: &Cp1Manifold, beta: &Form01) -> ComplexField {
    let n = c.nodes();
    let h = c.step();
    let p: Vec<Complex64> = beta.coeff.data.clone();
    let mut hm = vec![Complex64::default(); n];
    // one-sided derivatives of p at the fixed points, μ'(0)=1, μ'(1)=−1
    let dp0 = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
    let dp1 = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h);
    let mi = Complex64::new(0.0, -1.0);
    hm[0] = mi * dp0;
    hm[n - 1] = mi * dp1 / -1.0;
    for i in 1..n - 1 {
        hm[i] = mi * p[i] / cp1::mu(c.m(i));
    }
    let re: Vec<f64> = hm.iter().map(|v| v.re).collect();
    let im: Vec<f64> = hm.iter().map(|v| v.im).collect();
    let cre = cp1::cumulative_integral(&re, h);
    let cim = cp1::cumulative_integral(&im, h);
    let data = cre
        .into_iter()
        .zip(cim)
        .map(|(a, b)| Complex64::new(a, b))
        .collect();
    ComplexField::new(c.shape(), data)
}

fn subtract_weighted_mean(manifold: &Manifold, field: &mut ComplexField, metric: &MetricDensity) {
    let weights = manifold.node_measure(metric);
    let mass: f64 = weights.iter().sum();
    let mean: Complex64 = field
        .data
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| v * w)
        .sum::<Complex64>()
        / mass;
    for v in field.data.iter_mut() {
        *v -= mean;
    }
}

/// Hamiltonian `H` of Im V for the symplectic form `ω`: the real mean-zero
/// solution of `(V−V̄)⌟ω = i dH`, equivalently `V⌟ω = i∂̄H` with real `H`
/// (the (1,0) component is the conjugate equation).
pub fn hamiltonian(
    manifold: &Manifold,
    field: &HoloField,
    metric: &MetricDensity,
) -> Result<ScalarField> {
    match exactness_check(manifold, field, metric)? {
        Exactness::Obstructed { obstruction } => Err(Error::NonHamiltonian { obstruction }),
        Exactness::Exact { potential } => {
            let imag_norm = potential.data.iter().fold(0.0_f64, |acc, v| acc.max(v.im.abs()));
            let scale = potential.sup_norm().max(1e-300);
            if imag_norm > 1e-7 * scale.max(1.0) {
                return Err(Error::NonHamiltonian {
                    obstruction: imag_norm,
                });
            }
            let data = potential.data.iter().map(|v| v.re).collect();
            Ok(ScalarField::new(potential.shape, data))
        }
    }
}

/// Closed-form Hamiltonian of `a z∂/∂z` (a real) on a ℂP¹ backend:
/// `h = a·m̃(m)` before the mean-zero gauge, where `m̃` is the reference
/// metric's own moment coordinate.
pub fn cp1_hamiltonian_closed(c: &Cp1Manifold, a: f64) -> ScalarField {
    let data: Vec<f64> = (0..c.nodes())
        .map(|i| a * c.potential().moment_reparam(c.m(i)))
        .collect();
    let field = ScalarField::new(c.shape(), data);
    let mean = cp1::weighted_mean(c, &field);
    field.shift(-mean)
}
