//! Averaging negatively curved conformal metrics on planar domains.
//!
//! For a density `g` of a metric `g·i dτ∧dτ̄`, "curvature ≤ −a" means
//! `Δ log g ≥ a·g` with `Δ = ∂²/∂τ∂τ̄ = ¼(∂ₓ² + ∂ᵧ²)` (see
//! [`crate::conventions`]). The superposition proposition: if every member
//! of a family has curvature ≤ −a and the weights have total mass `C`,
//! the weighted sum has curvature ≤ −a/C.

use crate::conventions::TAU_LAPLACE_FACTOR;
use crate::error::{Error, Result};

/// Planar grids: the unit disk sampled on `[−1,1]²`, or a horizontal strip
/// `(0,L)×(0,1)`. Minima exclude a 4-node boundary margin, where conformal
/// factors of hyperbolic type degrade finite differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanarDomain {
    Disk { n: usize },
    Strip { length: f64, nx: usize, ny: usize },
}

impl PlanarDomain {
    pub fn node_count(&self) -> usize {
        match *self {
            PlanarDomain::Disk { n } => n * n,
            PlanarDomain::Strip { nx, ny, .. } => nx * ny,
        }
    }

    pub fn steps(&self) -> (f64, f64) {
        match *self {
            PlanarDomain::Disk { n } => (2.0 / (n - 1) as f64, 2.0 / (n - 1) as f64),
            PlanarDomain::Strip { length, nx, ny } => {
                (length / (nx - 1) as f64, 1.0 / (ny - 1) as f64)
            }
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match *self {
            PlanarDomain::Disk { n } => (n, n),
            PlanarDomain::Strip { nx, ny, .. } => (nx, ny),
        }
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        match *self {
            PlanarDomain::Disk { n } => {
                let h = 2.0 / (n - 1) as f64;
                (-1.0 + i as f64 * h, -1.0 + j as f64 * h)
            }
            PlanarDomain::Strip { length, nx, ny } => (
                i as f64 * length / (nx - 1) as f64,
                j as f64 / (ny - 1) as f64,
            ),
        }
    }

    /// Nodes where margins are evaluated: the 5-point stencil fits and the
    /// 4-node boundary margin is excluded.
    pub fn admissible(&self, i: usize, j: usize) -> bool {
        let (ni, nj) = self.dims();
        if i < 4 || j < 4 || i + 4 >= ni || j + 4 >= nj {
            return false;
        }
        match *self {
            PlanarDomain::Disk { n } => {
                let h = 2.0 / (n - 1) as f64;
                let (x, y) = self.point(i, j);
                (x * x + y * y).sqrt() <= 1.0 - 4.0 * h
            }
            PlanarDomain::Strip { .. } => true,
        }
    }
}

/// Positive conformal density sampled on a planar grid.
#[derive(Clone, Debug)]
pub struct ConformalMetric {
    pub domain: PlanarDomain,
    pub g: Vec<f64>,
}

impl ConformalMetric {
    pub fn from_fn(domain: PlanarDomain, f: impl Fn(f64, f64) -> f64) -> Self {
        let (ni, nj) = domain.dims();
        let mut g = Vec::with_capacity(ni * nj);
        for i in 0..ni {
            for j in 0..nj {
                let (x, y) = domain.point(i, j);
                g.push(f(x, y));
            }
        }
        ConformalMetric { domain, g }
    }

    /// Poincaré-type density `c·4R²/(R²−|τ|²)²` of the disk of radius `R`,
    /// restricted to the grid; curvature is exactly −1/(2c) for every `R`.
    pub fn scaled_poincare(domain: PlanarDomain, c: f64, radius: f64) -> Self {
        ConformalMetric::from_fn(domain, |x, y| {
            let r2 = radius * radius;
            let d = r2 - (x * x + y * y);
            c * 4.0 * r2 / (d * d)
        })
    }

    /// Classical hyperbolic density of the strip `(0,L)` (curvature −½ in
    /// the paper convention): `(π/L)²/sin²(πx/L)`.
    pub fn strip_hyperbolic(length: f64, nx: usize, ny: usize) -> Self {
        let domain = PlanarDomain::Strip { length, nx, ny };
        ConformalMetric::from_fn(domain, |x, _| {
            let s = (std::f64::consts::PI * x / length).sin();
            (std::f64::consts::PI / length).powi(2) / (s * s).max(1e-300)
        })
    }
}

fn second_x(values: &[f64], i: usize, j: usize, nj: usize, h: f64) -> f64 {
    let idx = |a: usize, b: usize| a * nj + b;
    (-values[idx(i - 2, j)] + 16.0 * values[idx(i - 1, j)] - 30.0 * values[idx(i, j)]
        + 16.0 * values[idx(i + 1, j)]
        - values[idx(i + 2, j)])
        / (12.0 * h * h)
}

fn second_y(values: &[f64], i: usize, j: usize, nj: usize, h: f64) -> f64 {
    let idx = |a: usize, b: usize| a * nj + b;
    (-values[idx(i, j - 2)] + 16.0 * values[idx(i, j - 1)] - 30.0 * values[idx(i, j)]
        + 16.0 * values[idx(i, j + 1)]
        - values[idx(i, j + 2)])
        / (12.0 * h * h)
}

fn first_x(values: &[f64], i: usize, j: usize, nj: usize, h: f64) -> f64 {
    let idx = |a: usize, b: usize| a * nj + b;
    (values[idx(i - 2, j)] - 8.0 * values[idx(i - 1, j)] + 8.0 * values[idx(i + 1, j)]
        - values[idx(i + 2, j)])
        / (12.0 * h)
}

fn first_y(values: &[f64], i: usize, j: usize, nj: usize, h: f64) -> f64 {
    let idx = |a: usize, b: usize| a * nj + b;
    (values[idx(i, j - 2)] - 8.0 * values[idx(i, j - 1)] + 8.0 * values[idx(i, j + 1)]
        - values[idx(i, j + 2)])
        / (12.0 * h)
}

/// Nodewise margin field `Δ log g − a·g` over admissible nodes, and its min.
#[derive(Clone, Debug)]
pub struct MarginField {
    pub values: Vec<(usize, usize, f64)>,
    pub min: f64,
}

pub fn curvature_margin(metric: &ConformalMetric, a: f64) -> MarginField {
    let (ni, nj) = metric.domain.dims();
    let (hx, hy) = metric.domain.steps();
    let log_g: Vec<f64> = metric.g.iter().map(|&v| v.ln()).collect();
    let mut values = Vec::new();
    let mut min = f64::INFINITY;
    for i in 0..ni {
        for j in 0..nj {
            if !metric.domain.admissible(i, j) {
                continue;
            }
            let lap = TAU_LAPLACE_FACTOR
                * (second_x(&log_g, i, j, nj, hx) + second_y(&log_g, i, j, nj, hy));
            let margin = lap - a * metric.g[i * nj + j];
            min = min.min(margin);
            values.push((i, j, margin));
        }
    }
    MarginField { values, min }
}

/// Memberwise intermediate inequality `Δg ≥ a g² + |∂g|²/g` with
/// `|∂g|² = ¼(g_x² + g_y²)`; equivalent to the curvature bound, used as a
/// cross-check of the proof's pointwise step.
pub fn gradient_form_margin(metric: &ConformalMetric, a: f64) -> f64 {
    let (ni, nj) = metric.domain.dims();
    let (hx, hy) = metric.domain.steps();
    let mut min = f64::INFINITY;
    for i in 0..ni {
        for j in 0..nj {
            if !metric.domain.admissible(i, j) {
                continue;
            }
            let g = metric.g[i * nj + j];
            let lap = TAU_LAPLACE_FACTOR
                * (second_x(&metric.g, i, j, nj, hx) + second_y(&metric.g, i, j, nj, hy));
            let grad = 0.25
                * (first_x(&metric.g, i, j, nj, hx).powi(2)
                    + first_y(&metric.g, i, j, nj, hy).powi(2));
            min = min.min(lap - a * g * g - grad / g);
        }
    }
    min
}

/// Pointwise weighted sum `Σ ν_α g_α`.
pub fn superpose(family: &[ConformalMetric], weights: &[f64]) -> Result<ConformalMetric> {
    if family.is_empty() || family.len() != weights.len() {
        return Err(Error::precondition(
            "superpose needs matching nonempty family and weights",
        ));
    }
    let domain = family[0].domain;
    for m in family.iter().skip(1) {
        if m.domain != domain {
            return Err(Error::MismatchedGrids);
        }
    }
    let mut g = vec![0.0; domain.node_count()];
    for (metric, &w) in family.iter().zip(weights) {
        if w < 0.0 {
            return Err(Error::precondition("superposition weights must be ≥ 0"));
        }
        for (acc, &v) in g.iter_mut().zip(&metric.g) {
            *acc += w * v;
        }
    }
    Ok(ConformalMetric { domain, g })
}

#[derive(Clone, Debug)]
pub struct PropReport {
    pub member_margins: Vec<f64>,
    pub member_gradient_margins: Vec<f64>,
    pub total_mass: f64,
    /// Min margin of `Δ log g − (a/C)·g` for the superposed metric.
    pub margin: f64,
}

/// Verifies the superposition proposition: every member must satisfy the
/// memberwise bound within `member_tol`; the superposed metric is then
/// checked against curvature ≤ −a/C.
pub fn prop_check(
    family: &[ConformalMetric],
    weights: &[f64],
    a: f64,
    member_tol: f64,
) -> Result<PropReport> {
    let mut member_margins = Vec::with_capacity(family.len());
    let mut member_gradient_margins = Vec::with_capacity(family.len());
    for (idx, metric) in family.iter().enumerate() {
        let margin = curvature_margin(metric, a).min;
        if margin < -member_tol {
            return Err(Error::MemberBoundFailed { index: idx, margin });
        }
        member_margins.push(margin);
        member_gradient_margins.push(gradient_form_margin(metric, a));
    }
    let total_mass: f64 = weights.iter().sum();
    let combined = superpose(family, weights)?;
    let margin = curvature_margin(&combined, a / total_mass).min;
    Ok(PropReport {
        member_margins,
        member_gradient_margins,
        total_mass,
        margin,
    })
}
