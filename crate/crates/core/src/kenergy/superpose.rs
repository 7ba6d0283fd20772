//! Superposition identity for the foliation: the integral of a test
//! (1,1)-form against `Ωⁿ/n!` over strip × manifold equals the integral of
//! its leaf restrictions against `ωⁿ/n!`.

use crate::conventions::TAU_LAPLACE_FACTOR;
use crate::error::Result;
use crate::geodesics::GeodesicPath;
use crate::grid::cp1;
use crate::grid::profile::Profile;
use crate::kenergy::{quantile_starts, trace_leaf};

/// Invariant test functions `ψ(t, m)` on strip × ℂP¹ with exact partial
/// derivatives.
#[derive(Clone, Debug)]
pub enum TestSurface {
    TimeOnly(Profile),
    Product { time: Profile, space: Profile },
    Sum(Box<TestSurface>, Box<TestSurface>),
}

impl TestSurface {
    pub fn product(time: Profile, space: Profile) -> Self {
        TestSurface::Product { time, space }
    }

    pub fn sum(self, other: TestSurface) -> Self {
        TestSurface::Sum(Box::new(self), Box::new(other))
    }

    pub fn eval(&self, t: f64, m: f64) -> f64 {
        match self {
            TestSurface::TimeOnly(f) => f.eval(t),
            TestSurface::Product { time, space } => time.eval(t) * space.eval(m),
            TestSurface::Sum(a, b) => a.eval(t, m) + b.eval(t, m),
        }
    }

    fn dtt(&self, t: f64, m: f64) -> f64 {
        match self {
            TestSurface::TimeOnly(f) => f.d2(t),
            TestSurface::Product { time, space } => time.d2(t) * space.eval(m),
            TestSurface::Sum(a, b) => a.dtt(t, m) + b.dtt(t, m),
        }
    }

    fn dm(&self, t: f64, m: f64) -> f64 {
        match self {
            TestSurface::TimeOnly(_) => 0.0,
            TestSurface::Product { time, space } => time.eval(t) * space.d1(m),
            TestSurface::Sum(a, b) => a.dm(t, m) + b.dm(t, m),
        }
    }

    fn dmm(&self, t: f64, m: f64) -> f64 {
        match self {
            TestSurface::TimeOnly(_) => 0.0,
            TestSurface::Product { time, space } => time.eval(t) * space.d2(m),
            TestSurface::Sum(a, b) => a.dmm(t, m) + b.dmm(t, m),
        }
    }

    fn dtm(&self, t: f64, m: f64) -> f64 {
        match self {
            TestSurface::TimeOnly(_) => 0.0,
            TestSurface::Product { time, space } => time.d1(t) * space.d1(m),
            TestSurface::Sum(a, b) => a.dtm(t, m) + b.dtm(t, m),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuperpositionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Evaluates both sides of the superposition identity for
/// `Θ_test = i∂∂̄ψ` over the interior time window of the path, per unit
/// height in `Im τ`.
///
/// Left side: `∫ Θ_test ∧ Ωⁿ/n!` via the pointwise contraction
/// `Θ(𝒱,𝒱̄) = ¼ψ_tt − μ u̇_m ψ_tm/(2ρ) + u̇_m² μ(μψ_m)_m/(4ρ²)`.
/// Right side: `∫_X (∫_{Y_x} Θ_test) ωⁿ/n!` over traced leaves.
pub fn superposition_check(
    path: &GeodesicPath,
    psi: &TestSurface,
    leaf_count: usize,
) -> Result<SuperpositionCheck> {
    let c = path.manifold.as_cp1()?;
    let steps = path.times.steps;
    let h_t = path.times.step;
    let window = (path.times.t(0), path.times.t(steps));
    let inner = (window.0 + h_t, window.1 - h_t);

    // left side: trapezoid over interior path nodes of 2·∫_X q ω_t
    let mut slice = Vec::with_capacity(steps - 1);
    for i in 1..steps {
        let t = path.times.t(i);
        let mut integrand = Vec::with_capacity(c.nodes());
        for k in 0..c.nodes() {
            let m = c.m(k);
            let p = path.cp1_point(t, m)?;
            let mu = cp1::mu(m);
            let mu_d = 1.0 - 2.0 * m;
            let lap_m = mu * (mu_d * psi.dm(t, m) + mu * psi.dmm(t, m));
            let q = 0.25 * psi.dtt(t, m) - mu * p.udot_m * psi.dtm(t, m) / (2.0 * p.rho)
                + p.udot_m * p.udot_m * lap_m / (4.0 * p.rho * p.rho);
            integrand.push(q * p.rho);
        }
        slice.push(2.0 * std::f64::consts::TAU * cp1::trapezoid(&integrand, c.step()));
    }
    let lhs = cp1::trapezoid(&slice, h_t);

    // right side: leaf integrals against the reference quantile strata
    let starts = quantile_starts(&path.manifold, leaf_count)?;
    let volume = path.manifold.volume();
    let mut rhs = 0.0;
    for &m0 in &starts {
        let leaf = trace_leaf(path, m0, window)?;
        let samples: Vec<f64> = leaf
            .positions
            .iter()
            .enumerate()
            .map(|(j, &m)| psi.eval(leaf.t0 + j as f64 * leaf.step, m))
            .collect();
        let n = samples.len();
        let mut density = Vec::new();
        for j in 2..n - 2 {
            let t = leaf.t0 + j as f64 * leaf.step;
            if t < inner.0 - 1e-12 || t > inner.1 + 1e-12 {
                continue;
            }
            let dtt = (-samples[j - 2] + 16.0 * samples[j - 1] - 30.0 * samples[j]
                + 16.0 * samples[j + 1]
                - samples[j + 2])
                / (12.0 * leaf.step * leaf.step);
            density.push(2.0 * TAU_LAPLACE_FACTOR * dtt);
        }
        rhs += cp1::trapezoid(&density, leaf.step) * volume / leaf_count as f64;
    }

    Ok(SuperpositionCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
