//! Monge–Ampère foliation leaves, the K-energy density Θ and the curvature
//! bounds along geodesics.
//!
//! The foliation instruments live on the invariant ℂP¹ backend, where paths
//! carry closed-form generators; leaves are traced in the moment coordinate.
//! All Laplacians in time use the `¼ d²/dt²` convention of
//! [`crate::conventions`].

pub mod superpose;

use crate::conventions::TAU_LAPLACE_FACTOR;
use crate::error::{Error, Result};
use crate::geodesics::GeodesicPath;
use crate::grid::cp1;
use crate::grid::{ComplexField, Manifold};

/// A traced foliation leaf: positions and chart log-density samples along a
/// real-time window, at half the path step.
#[derive(Clone, Debug)]
pub struct LeafTrajectory {
    pub start_m: f64,
    pub t0: f64,
    pub step: f64,
    pub positions: Vec<f64>,
    pub log_density: Vec<f64>,
}

impl LeafTrajectory {
    pub fn times(&self) -> Vec<f64> {
        (0..self.positions.len())
            .map(|j| self.t0 + j as f64 * self.step)
            .collect()
    }
}

/// The time-dependent leaf field `V_t` with `V_t⌟ω_t = (i/2)∂̄u̇_t`
/// (the complex-time identity in the real-time convention), returned as the
/// coefficient against `z∂/∂z` (ℂP¹) or `∂/∂z` (torus).
///
/// For an induced path this coincides with the generating field.
pub fn leaf_field(path: &GeodesicPath, i: usize) -> Result<ComplexField> {
    match &path.manifold {
        Manifold::Cp1(c) => {
            let t = path.times.t(i);
            let data = (0..c.nodes())
                .map(|k| {
                    let p = path.cp1_point(t, c.m(k))?;
                    Ok(num_complex::Complex64::new(p.udot_m / (2.0 * p.rho), 0.0))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ComplexField::new(c.shape(), data))
        }
        Manifold::Torus(t) => {
            let beta = crate::grid::torus::dbar(t, &path.velocities[i]);
            let data = beta
                .coeff
                .data
                .iter()
                .zip(&path.metrics[i].density.data)
                .map(|(&b, &g)| b / (2.0 * g))
                .collect();
            Ok(ComplexField::new(path.manifold.shape(), data))
        }
        Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
    }
}

/// Right-hand side of the leaf equation in the moment coordinate:
/// `dm/dt = −μ(m)·u̇_m/ρ_t` (the flow line of `−V_t`).
fn leaf_rhs(path: &GeodesicPath, t: f64, m: f64) -> Result<f64> {
    let p = path.cp1_point(t, m)?;
    Ok(-cp1::mu(m) * p.udot_m / p.rho)
}

/// Chart log-density of `ω_t` at moment coordinate `m`:
/// `ℓ = log(μ(m)ρ_t(m)) − s(m)` (the affine-chart volume normalization).
fn chart_log_density(path: &GeodesicPath, t: f64, m: f64) -> Result<f64> {
    let p = path.cp1_point(t, m)?;
    Ok((cp1::mu(m) * p.rho).ln() - cp1::s_of_m(m))
}

/// Traces the leaf through `m0` over the window with RK4 at half the path
/// step. The anchor `f(t) = m0` sits at `t = 0` when the window contains it
/// (the leaf passes through its start point at time zero), otherwise at the
/// nearest window edge.
pub fn trace_leaf(path: &GeodesicPath, m0: f64, window: (f64, f64)) -> Result<LeafTrajectory> {
    path.manifold.as_cp1()?;
    let h = path.times.step / 2.0;
    let (t0, t1) = window;
    if t1 <= t0 {
        return Err(Error::precondition("empty leaf window"));
    }
    let anchor = 0.0_f64.clamp(t0, t1);
    let steps_back = ((anchor - t0) / h).round() as usize;
    let steps_fwd = ((t1 - anchor) / h).round() as usize;

    let guard = |m: f64, t: f64| -> Result<f64> {
        if m <= 1e-12 || m >= 1.0 - 1e-12 {
            Err(Error::LeafOutOfDomain { t, position: m })
        } else {
            Ok(m)
        }
    };

    let mut backward = Vec::with_capacity(steps_back);
    let mut m = m0;
    let mut t = anchor;
    for _ in 0..steps_back {
        m = guard(rk4_step(path, t, m, -h)?, t - h)?;
        t -= h;
        backward.push(m);
    }
    let mut positions: Vec<f64> = backward.into_iter().rev().collect();
    positions.push(m0);
    m = m0;
    t = anchor;
    for _ in 0..steps_fwd {
        m = guard(rk4_step(path, t, m, h)?, t + h)?;
        t += h;
        positions.push(m);
    }

    let start_t = anchor - steps_back as f64 * h;
    let log_density = positions
        .iter()
        .enumerate()
        .map(|(j, &mm)| chart_log_density(path, start_t + j as f64 * h, mm))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LeafTrajectory {
        start_m: m0,
        t0: start_t,
        step: h,
        positions,
        log_density,
    })
}

fn rk4_step(path: &GeodesicPath, t: f64, m: f64, h: f64) -> Result<f64> {
    let k1 = leaf_rhs(path, t, m)?;
    let k2 = leaf_rhs(path, t + 0.5 * h, m + 0.5 * h * k1)?;
    let k3 = leaf_rhs(path, t + 0.5 * h, m + 0.5 * h * k2)?;
    let k4 = leaf_rhs(path, t + h, m + h * k3)?;
    Ok(m + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Fourth-order five-point second derivative at index `j` with stride `s`.
fn second_diff_5pt(values: &[f64], j: usize, s: usize, h: f64) -> f64 {
    let hh = s as f64 * h;
    (-values[j - 2 * s] + 16.0 * values[j - s] - 30.0 * values[j] + 16.0 * values[j + s]
        - values[j + 2 * s])
        / (12.0 * hh * hh)
}

/// Per-leaf Θ data: `κ_x(t) = ¼ ℓ''(t)` and, where `κ_x` clears the gate,
/// the Gaussian-curvature estimate of the leaf metric `κ_x·i dτ∧dτ̄` with
/// its margin against the −2/n bound.
#[derive(Clone, Debug)]
pub struct ThetaLeaf {
    pub times: Vec<f64>,
    pub kappa: Vec<f64>,
    pub burns: Vec<BurnsSample>,
}

#[derive(Clone, Copy, Debug)]
pub struct BurnsSample {
    pub t: f64,
    pub kappa: f64,
    /// `−¼(log κ)''/κ`, to be compared with −2/n.
    pub curvature_raw: f64,
    pub curvature_richardson: Option<f64>,
    /// `¼(log κ)'' − (2/n)κ`; nonnegative means the bound holds.
    pub margin: f64,
}

pub fn theta_on_leaf(leaf: &LeafTrajectory, gate: f64) -> Result<ThetaLeaf> {
    let n = leaf.log_density.len();
    if n < 5 {
        return Err(Error::TooFewNodes { given: n, minimum: 5 });
    }
    let h = leaf.step;
    let mut times = Vec::new();
    let mut kappa = Vec::new();
    for j in 2..n - 2 {
        times.push(leaf.t0 + j as f64 * h);
        kappa.push(TAU_LAPLACE_FACTOR * second_diff_5pt(&leaf.log_density, j, 1, h));
    }
    let log_kappa: Vec<f64> = kappa.iter().map(|&k| if k > 0.0 { k.ln() } else { f64::NAN }).collect();
    let mut burns = Vec::new();
    let nk = kappa.len();
    for j in 2..nk.saturating_sub(2) {
        let window_ok = (j - 2..=j + 2).all(|l| kappa[l] > gate);
        if !window_ok {
            continue;
        }
        let lap = TAU_LAPLACE_FACTOR * second_diff_5pt(&log_kappa, j, 1, h);
        let raw = -lap / kappa[j];
        let richardson = if j >= 8
            && j + 8 < nk
            && (j - 8..=j + 8).step_by(4).all(|l| kappa[l] > gate)
        {
            let coarse = TAU_LAPLACE_FACTOR * second_diff_5pt(&log_kappa, j, 4, h);
            let lap_r = (16.0 * lap - coarse) / 15.0;
            Some(-lap_r / kappa[j])
        } else {
            None
        };
        burns.push(BurnsSample {
            t: times[j],
            kappa: kappa[j],
            curvature_raw: raw,
            curvature_richardson: richardson,
            margin: lap - 2.0 * kappa[j],
        });
    }
    Ok(ThetaLeaf { times, kappa, burns })
}

/// Quantile start points of the reference measure: `K` strata of equal mass,
/// one start point at each stratum midpoint.
pub fn quantile_starts(manifold: &Manifold, count: usize) -> Result<Vec<f64>> {
    let c = manifold.as_cp1()?;
    let rho = &c.reference().density.data;
    let h = c.step();
    let n = rho.len();
    let mut cdf = Vec::with_capacity(n);
    let mut acc = 0.0;
    cdf.push(0.0);
    for i in 1..n {
        acc += 0.5 * (rho[i - 1] + rho[i]) * h;
        cdf.push(acc);
    }
    let total = cdf[n - 1];
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let target = total * (k as f64 + 0.5) / count as f64;
        let j = cdf.partition_point(|&v| v < target).min(n - 1).max(1);
        let frac = (target - cdf[j - 1]) / (cdf[j] - cdf[j - 1]).max(1e-300);
        out.push((j as f64 - 1.0 + frac) * h);
    }
    Ok(out)
}

/// The K-energy density `κ(t) = ∂²K/∂τ∂τ̄ = ¼ d²K/dt²` along a path,
/// computed two independent ways: as the fiber integral of the per-leaf
/// densities against `ωⁿ/n!`, and by differencing the Mabuchi first
/// derivative `dK/dt = −∫ u̇ (S_t − S̄) ω_tⁿ/n!`.
#[derive(Clone, Debug)]
pub struct ThetaDensity {
    pub times: Vec<f64>,
    pub kappa_fiber: Vec<f64>,
    pub kappa_direct: Vec<f64>,
    pub discrepancy: f64,
}

pub fn kenergy_theta(path: &GeodesicPath, leaf_count: usize) -> Result<ThetaDensity> {
    if leaf_count < 4 {
        return Err(Error::TooFewNodes {
            given: leaf_count,
            minimum: 4,
        });
    }
    let steps = path.times.steps;
    if steps < 4 {
        return Err(Error::TooFewNodes {
            given: steps,
            minimum: 4,
        });
    }
    let volume = path.manifold.volume();
    let window = (path.times.t(0), path.times.t(steps));
    let starts = quantile_starts(&path.manifold, leaf_count)?;

    // fiber route: κ at interior path nodes; node i sits at substep 2i
    let interior: Vec<usize> = (1..steps).collect();
    let mut kappa_fiber = vec![0.0; interior.len()];
    for &m0 in &starts {
        let leaf = trace_leaf(path, m0, window)?;
        let h = leaf.step;
        for (pos, &i) in interior.iter().enumerate() {
            let j = 2 * i;
            kappa_fiber[pos] +=
                TAU_LAPLACE_FACTOR * second_diff_5pt(&leaf.log_density, j, 1, h);
        }
    }
    let stratum = volume / leaf_count as f64;
    for v in kappa_fiber.iter_mut() {
        *v *= stratum;
    }

    // direct route: difference the Mabuchi derivative
    let kprime: Vec<f64> = (0..=steps).map(|i| mabuchi_derivative(path, i)).collect::<Result<_>>()?;
    let h = path.times.step;
    let mut kappa_direct = Vec::with_capacity(interior.len());
    for &i in &interior {
        let d = if i >= 2 && i + 2 <= steps {
            (8.0 * (kprime[i + 1] - kprime[i - 1]) - (kprime[i + 2] - kprime[i - 2])) / (12.0 * h)
        } else {
            (kprime[i + 1] - kprime[i - 1]) / (2.0 * h)
        };
        kappa_direct.push(TAU_LAPLACE_FACTOR * d);
    }

    let discrepancy = kappa_fiber
        .iter()
        .zip(&kappa_direct)
        .fold(0.0_f64, |acc, (&a, &b)| acc.max((a - b).abs()));
    Ok(ThetaDensity {
        times: interior.iter().map(|&i| path.times.t(i)).collect(),
        kappa_fiber,
        kappa_direct,
        discrepancy,
    })
}

/// `dK/dt = −∫ u̇ (S_t − S̄) ω_tⁿ/n!` at a path node.
pub fn mabuchi_derivative(path: &GeodesicPath, i: usize) -> Result<f64> {
    let metric = &path.metrics[i];
    let s = path.manifold.scalar_curvature(metric)?;
    let s_bar = path.manifold.mean_against(&s, metric);
    let integrand = path.velocities[i].zip_map(&s, |u, sv| -u * (sv - s_bar));
    Ok(path.manifold.integrate_against(&integrand, metric))
}

/// Hyperbolic density of an interval in the classical (Gaussian curvature
/// −1) normalization: `(π/L)²/sin²(π(t−a)/L)` for a finite strip,
/// `1/(t−a)²` for a half line, `0` for the whole line.
pub fn strip_hyperbolic_density(strip: (f64, f64), t: f64) -> f64 {
    let (a, b) = strip;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            let l = b - a;
            let x = std::f64::consts::PI * (t - a) / l;
            let s = x.sin();
            (std::f64::consts::PI / l).powi(2) / (s * s)
        }
        (true, false) => 1.0 / ((t - a) * (t - a)),
        (false, true) => 1.0 / ((b - t) * (b - t)),
        (false, false) => 0.0,
    }
}

/// Margin report for the curvature bounds of the K-energy metric.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    /// The dichotomy branch: Θ vanishes identically (below the gate).
    pub identically_zero: bool,
    pub max_kappa: f64,
    pub window_times: Vec<f64>,
    /// Min over the window of `¼(log κ)'' − (2/(nV))·κ`.
    pub differential_margin: Option<f64>,
    /// Min of `(n/(2V))·λ_strip − κ` (the stated strip comparison).
    pub strip_margin_stated: Option<f64>,
    /// Min of `(nV/4)·λ_strip − κ` (the comparison consistent with the
    /// differential bound via the Ahlfors–Schwarz argument).
    pub strip_margin_consistent: Option<f64>,
}

/// Checks the curvature bounds for a sampled `κ(t) ≥ 0`:
/// (i) the differential form `¼(log κ)'' ≥ (2/(nV))κ` on the largest
/// contiguous window above the gate, and (ii) the strip comparison against
/// the hyperbolic density of the maximal interval of definition.
pub fn curvature_bound_check(
    times: &[f64],
    kappa: &[f64],
    dim_n: usize,
    volume: f64,
    strip: (f64, f64),
    gate: f64,
) -> Result<CurvatureReport> {
    assert_eq!(times.len(), kappa.len());
    let max_kappa = kappa.iter().cloned().fold(0.0_f64, f64::max);
    if max_kappa <= gate {
        return Ok(CurvatureReport {
            identically_zero: true,
            max_kappa,
            window_times: Vec::new(),
            differential_margin: None,
            strip_margin_stated: None,
            strip_margin_consistent: None,
        });
    }
    // largest contiguous run above the gate
    let mut best: (usize, usize) = (0, 0);
    let mut cur_start = None;
    for (i, &k) in kappa.iter().enumerate() {
        if k > gate {
            cur_start.get_or_insert(i);
            let s = cur_start.unwrap();
            if i + 1 - s > best.1 - best.0 {
                best = (s, i + 1);
            }
        } else {
            cur_start = None;
        }
    }
    let (w0, w1) = best;
    if w1 - w0 < 5 {
        return Err(Error::TooFewNodes {
            given: w1 - w0,
            minimum: 5,
        });
    }
    let h = times[1] - times[0];
    let log_k: Vec<f64> = kappa[w0..w1].iter().map(|&k| k.ln()).collect();
    let n = dim_n as f64;
    let mut diff_margin = f64::INFINITY;
    for j in 2..log_k.len() - 2 {
        let lap = TAU_LAPLACE_FACTOR * second_diff_5pt(&log_k, j, 1, h);
        diff_margin = diff_margin.min(lap - (2.0 / (n * volume)) * kappa[w0 + j]);
    }
    let mut stated = f64::INFINITY;
    let mut consistent = f64::INFINITY;
    for j in w0..w1 {
        let lambda = strip_hyperbolic_density(strip, times[j]);
        stated = stated.min((n / (2.0 * volume)) * lambda - kappa[j]);
        consistent = consistent.min((n * volume / 4.0) * lambda - kappa[j]);
    }
    Ok(CurvatureReport {
        identically_zero: false,
        max_kappa,
        window_times: times[w0..w1].to_vec(),
        differential_margin: Some(diff_margin),
        strip_margin_stated: Some(stated),
        strip_margin_consistent: Some(consistent),
    })
}

/// Leaf pullback check `f_τ*(ω_τ) = ω`: traces neighbour leaves to estimate
/// the Jacobian of `f_τ` and compares the pulled-back density with the
/// reference at the start point. Returns the max error over the window per
/// start point.
pub fn leaf_pullback_check(
    path: &GeodesicPath,
    starts: &[f64],
    window: (f64, f64),
) -> Result<Vec<f64>> {
    let c = path.manifold.as_cp1()?;
    let delta = c.step();
    let mut out = Vec::with_capacity(starts.len());
    for &m0 in starts {
        let plus = trace_leaf(path, m0 + delta, window)?;
        let minus = trace_leaf(path, m0 - delta, window)?;
        let center = trace_leaf(path, m0, window)?;
        let rho0 = c.potential().reduced_density(m0);
        let mut worst: f64 = 0.0;
        for j in 0..center.positions.len() {
            let t = center.t0 + j as f64 * center.step;
            let jac = (plus.positions[j] - minus.positions[j]) / (2.0 * delta);
            let rho_t = path.cp1_point(t, center.positions[j])?.rho;
            worst = worst.max((rho_t * jac - rho0).abs());
        }
        out.push(worst);
    }
    Ok(out)
}
