//! S¹-invariant ℂP¹ backend reduced to the Fubini–Study moment coordinate.
//!
//! All invariant data live on a closed uniform grid in `m ∈ [0,1]`; see
//! [`crate::conventions`] for the reduced coefficient frames. Symplectic
//! potentials are stored as `w = w_FS + δ` with δ smooth up to the boundary,
//! so the `m log m` singularities are handled once, analytically.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::field::{Form11, MetricDensity, ScalarField, Shape};
use crate::grid::profile::Profile;

/// `μ(m) = m(1−m)`; `d/ds = μ d/dm` for `s = log|z|²`.
pub fn mu(m: f64) -> f64 {
    m * (1.0 - m)
}

/// `s(m) = w_FS'(m) = log(m/(1−m))`; only evaluated in the open interval.
pub fn s_of_m(m: f64) -> f64 {
    (m / (1.0 - m)).ln()
}

/// Logistic inverse of `s_of_m`, evaluated stably for large `|s|`.
pub fn sigma(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `w_FS(m) = m log m + (1−m) log(1−m)` with the `0 log 0 = 0` limits.
pub fn w_fs(m: f64) -> f64 {
    let a = if m > 0.0 { m * m.ln() } else { 0.0 };
    let b = if m < 1.0 { (1.0 - m) * (1.0 - m).ln() } else { 0.0 };
    a + b
}

/// Convex profile of an S¹-invariant metric in the Fubini–Study class.
#[derive(Clone, Debug)]
pub struct SymplecticPotential {
    /// Smooth correction `δ` with `w = w_FS + δ`.
    pub delta: Profile,
}

impl SymplecticPotential {
    pub fn fubini_study() -> Self {
        SymplecticPotential {
            delta: Profile::Zero,
        }
    }

    pub fn new(delta: Profile) -> Self {
        SymplecticPotential { delta }
    }

    pub fn w(&self, m: f64) -> f64 {
        w_fs(m) + self.delta.eval(m)
    }

    /// `w'(m)`; diverges at the endpoints.
    pub fn w1(&self, m: f64) -> f64 {
        s_of_m(m) + self.delta.d1(m)
    }

    /// `w''(m) = 1/μ(m) + δ''(m)`.
    pub fn w2(&self, m: f64) -> f64 {
        1.0 / mu(m) + self.delta.d2(m)
    }

    /// `μ(m)·w''(m) = 1 + μ δ''`; finite up to the boundary.
    pub fn mu_w2(&self, m: f64) -> f64 {
        1.0 + mu(m) * self.delta.d2(m)
    }

    /// Strict convexity on the interior of the grid.
    pub fn check_convex(&self, intervals: usize) -> Result<()> {
        for i in 1..intervals {
            let m = i as f64 / intervals as f64;
            let v = self.mu_w2(m);
            if !(v > 0.0) {
                return Err(Error::ConvexityFailure {
                    m,
                    value: v / mu(m),
                });
            }
        }
        Ok(())
    }

    /// Solves `w'(x) = w_FS'(m_ref)`, i.e. the moment coordinate of this
    /// metric at the point whose Fubini–Study moment coordinate is `m_ref`.
    /// Monotone Newton iteration with a bisection safeguard.
    pub fn moment_reparam(&self, m_ref: f64) -> f64 {
        if m_ref <= 0.0 {
            return 0.0;
        }
        if m_ref >= 1.0 {
            return 1.0;
        }
        let target = s_of_m(m_ref);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut x = m_ref;
        for _ in 0..80 {
            let g = s_of_m(x) + self.delta.d1(x) - target;
            if g == 0.0 {
                return x;
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let dg = self.w2(x);
            let mut next = x - g / dg;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }

    /// Reduced density (against `dm∧dα`, on the Fubini–Study grid) of the
    /// Kähler form with this symplectic potential:
    /// `ρ(m) = dm̃/dm = w_FS''(m)/w''(m̃(m))`.
    pub fn reduced_density(&self, m: f64) -> f64 {
        if m <= 0.0 {
            return (-self.delta.d1(0.0)).exp();
        }
        if m >= 1.0 {
            return self.delta.d1(1.0).exp();
        }
        let mt = self.moment_reparam(m);
        1.0 / (mu(m) * self.w2(mt))
    }
}

#[derive(Clone, Debug)]
pub struct Cp1Manifold {
    intervals: usize,
    potential: SymplecticPotential,
    reference: MetricDensity,
    volume: f64,
}

impl Cp1Manifold {
    /// Builds the backend from a strictly convex symplectic potential on a
    /// grid with `intervals` subintervals (even, at least 16).
    pub fn new(intervals: usize, potential: SymplecticPotential) -> Result<Self> {
        if intervals < 16 {
            return Err(Error::ResolutionTooSmall {
                given: intervals,
                minimum: 16,
            });
        }
        if intervals % 2 != 0 {
            return Err(Error::precondition(format!(
                "moment grid needs an even interval count, got {intervals}"
            )));
        }
        potential.check_convex(intervals)?;
        let nodes = intervals + 1;
        let shape = Shape::Moment { nodes };
        let data: Vec<f64> = (0..nodes)
            .map(|i| potential.reduced_density(i as f64 / intervals as f64))
            .collect();
        let density = ScalarField::new(shape, data);
        density.validate_finite()?;
        let reference = MetricDensity::try_new(density)?;
        let volume = TAU * simpson(&reference.density.data, 1.0 / intervals as f64);
        Ok(Cp1Manifold {
            intervals,
            potential,
            reference,
            volume,
        })
    }

    pub fn fubini_study(intervals: usize) -> Result<Self> {
        Cp1Manifold::new(intervals, SymplecticPotential::fubini_study())
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn shape(&self) -> Shape {
        Shape::Moment {
            nodes: self.nodes(),
        }
    }

    pub fn m(&self, i: usize) -> f64 {
        i as f64 / self.intervals as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.nodes()).map(|i| self.m(i)).collect()
    }

    pub fn potential(&self) -> &SymplecticPotential {
        &self.potential
    }

    pub fn reference(&self) -> &MetricDensity {
        &self.reference
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..n - 1].iter().sum();
    h * (0.5 * (values[0] + values[n - 1]) + interior)
}

/// Composite Simpson rule; requires an even interval count.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an even interval count");
    let mut acc = values[0] + values[n - 1];
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Fourth-order cumulative integral `F_i = ∫₀^{x_i} f` on a uniform grid:
/// each cell is integrated with the cubic through its four nearest samples.
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cumulative integral needs at least 4 samples");
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let cell = if i == 0 {
            h / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3])
        } else if i == n - 2 {
            h / 24.0
                * (9.0 * values[n - 1] + 19.0 * values[n - 2] - 5.0 * values[n - 3]
                    + values[n - 4])
        } else {
            h / 24.0
                * (-values[i - 1] + 13.0 * values[i] + 13.0 * values[i + 1] - values[i + 2])
        };
        acc += cell;
        out.push(acc);
    }
    out
}

/// Second-order derivative on a uniform grid (central, one-sided at ends).
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out
}

/// Reduced density of `i∂∂̄u`, `(μ u_m)_m`, in conservative flux form.
///
/// The staggered fluxes `G_{i+½} = μ(m_{i+½})(u_{i+1}−u_i)/h` vanish at the
/// boundary analytically, and the trapezoid integral of the result
/// telescopes to zero exactly — the discrete Stokes identity.
pub fn flux_laplacian(cp1: &Cp1Manifold, u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let h = cp1.step();
    let mut flux = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let m_half = (i as f64 + 0.5) * h;
        flux.push(mu(m_half) * (u[i + 1] - u[i]) / h);
    }
    let mut out = vec![0.0; n];
    out[0] = flux[0] / (0.5 * h);
    out[n - 1] = -flux[n - 2] / (0.5 * h);
    for i in 1..n - 1 {
        out[i] = (flux[i] - flux[i - 1]) / h;
    }
    out
}

/// `∂̄u` profile `p = u_s = μ u_m`; exactly zero at the fixed points.
pub fn dbar_profile(cp1: &Cp1Manifold, u: &[f64]) -> Vec<f64> {
    let du = derivative(u, cp1.step());
    (0..u.len()).map(|i| mu(cp1.m(i)) * du[i]).collect()
}

/// Pointwise `|∂̄v|²_ω = μ v_m² / ρ`.
pub fn dbar_norm_sq(cp1: &Cp1Manifold, v: &[f64], rho: &[f64]) -> Vec<f64> {
    let dv = derivative(v, cp1.step());
    (0..v.len())
        .map(|i| mu(cp1.m(i)) * dv[i] * dv[i] / rho[i])
        .collect()
}

/// Solves `(μ u_m)_m = q` with `∫q dm = 0`, mean-zero gauge against the
/// reference measure. The quadrature defect of `q` is projected out
/// uniformly; it must not exceed `tol_rel · V`.
pub fn poisson_reduced(cp1: &Cp1Manifold, q: &[f64], tol_rel: f64) -> Result<ScalarField> {
    let h = cp1.step();
    let n = q.len();
    // compatibility is measured with the trapezoid rule — the module's own
    // `integrate` — which telescopes exactly against the flux Laplacian
    let trap = trapezoid(q, h);
    let tolerance = tol_rel * cp1.volume();
    if TAU * trap.abs() > tolerance {
        return Err(Error::CompatibilityViolation {
            integral: TAU * trap,
            tolerance,
        });
    }
    // the projection removes the cumulative integrator's own defect so the
    // flux potential ends at zero
    let raw = cumulative_integral(q, h);
    let defect = raw[n - 1];
    let adjusted: Vec<f64> = q.iter().map(|&v| v - defect).collect();
    let mut cum = cumulative_integral(&adjusted, h);
    cum[n - 1] = 0.0;
    // u_m = Q/μ with the l'Hôpital limits at the fixed points
    let mut um = vec![0.0; n];
    um[0] = adjusted[0];
    um[n - 1] = -adjusted[n - 1];
    for i in 1..n - 1 {
        um[i] = cum[i] / mu(cp1.m(i));
    }
    let u = cumulative_integral(&um, h);
    let field = ScalarField::new(cp1.shape(), u);
    let mean = weighted_mean(cp1, &field);
    Ok(field.shift(-mean))
}

/// Mean against the reference measure `ωⁿ/n!` (trapezoid numerator over
/// trapezoid mass, so constants have exact mean).
pub fn weighted_mean(cp1: &Cp1Manifold, u: &ScalarField) -> f64 {
    let prod: Vec<f64> = u
        .data
        .iter()
        .zip(&cp1.reference().density.data)
        .map(|(&a, &b)| a * b)
        .collect();
    trapezoid(&prod, cp1.step()) / trapezoid(&cp1.reference().density.data, cp1.step())
}

/// Per-node measure weights of the reduced metric `ρ dm∧dα`.
pub fn node_measure(cp1: &Cp1Manifold, metric: &MetricDensity) -> Vec<f64> {
    let h = cp1.step();
    let n = metric.density.data.len();
    metric
        .density
        .data
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            TAU * rho * w * h
        })
        .collect()
}

/// Scalar curvature of the reduced metric: `S = [2 − (μ (log ρ)_m)_m]/ρ`.
///
/// Derived from `S = −(d²/ds²) log(μρ) / (μρ)` with the Fubini–Study part
/// `(d²/ds²) log μ = −2μ` evaluated analytically, so only the smooth factor
/// `log ρ` is differenced.
pub fn scalar_curvature(cp1: &Cp1Manifold, metric: &MetricDensity) -> ScalarField {
    let log_rho: Vec<f64> = metric.density.data.iter().map(|&r| r.ln()).collect();
    let lap = flux_laplacian(cp1, &log_rho);
    let data = metric
        .density
        .data
        .iter()
        .zip(&lap)
        .map(|(&rho, &l)| (2.0 - l) / rho)
        .collect();
    ScalarField::new(cp1.shape(), data)
}

/// Reduced-density form of the Fubini–Study comparison: Form11 wrapper.
pub fn form11(cp1: &Cp1Manifold, data: Vec<f64>) -> Form11 {
    Form11 {
        density: ScalarField::new(cp1.shape(), data),
    }
}
