//! Toric geodesics on ℂP¹: linear interpolation of symplectic potentials,
//! with Kähler potentials recovered by Legendre transform onto the
//! Fubini–Study moment grid.
//!
//! The construction is justified post hoc: passing the geodesic residual
//! test at second order is its acceptance criterion, not an assumption.

use crate::error::Result;
use crate::geodesics::{
    energy, GaugeRecord, GeodesicPath, PathGenerator, TimeGrid, VelocityMethod,
};
use crate::grid::cp1::{self, SymplecticPotential};
use crate::grid::profile::Profile;
use crate::grid::{Form11, Manifold, MetricDensity, ScalarField};

/// Moment coordinate `m̃_t` of `w_t = w₀ + t·dd` at the point with
/// Fubini–Study coordinate `m`, together with the reduced density
/// `ρ_t = dm̃_t/dm`. Newton on `w_t'(x) = w_FS'(m)` with a bisection
/// safeguard; endpoints are exact.
pub fn moment_state(w0: &SymplecticPotential, dd: &Profile, t: f64, m: f64) -> (f64, f64) {
    let d1 = |x: f64| w0.delta.d1(x) + t * dd.d1(x);
    let d2 = |x: f64| w0.delta.d2(x) + t * dd.d2(x);
    if m <= 0.0 {
        return (0.0, (-d1(0.0)).exp());
    }
    if m >= 1.0 {
        return (1.0, d1(1.0).exp());
    }
    let target = cp1::s_of_m(m);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = m;
    for _ in 0..80 {
        let g = cp1::s_of_m(x) + d1(x) - target;
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dg = 1.0 / cp1::mu(x) + d2(x);
        let mut next = x - g / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    let mu_w2 = 1.0 + cp1::mu(x) * d2(x);
    let rho = cp1::mu(x) / (cp1::mu(m) * mu_w2);
    (x, rho)
}

/// Legendre potential difference `u_t = φ_{w_t} − φ_{w₀}` on the grid,
/// before any gauge. Endpoints use the analytic limits
/// `u_t(0) = −t·dd(0)`, `u_t(1) = −t·dd(1)`.
fn legendre_potential(
    cp: &cp1::Cp1Manifold,
    w0: &SymplecticPotential,
    dd: &Profile,
    t: f64,
) -> ScalarField {
    let n = cp.nodes();
    let mut data = Vec::with_capacity(n);
    for i in 0..n {
        let m = cp.m(i);
        if i == 0 || i == n - 1 {
            data.push(-t * dd.eval(m));
            continue;
        }
        let s = cp1::s_of_m(m);
        let (mt, _) = moment_state(w0, dd, t, m);
        let m0 = w0.moment_reparam(m);
        let w_t = |x: f64| cp1::w_fs(x) + w0.delta.eval(x) + t * dd.eval(x);
        data.push(s * (mt - m0) - w_t(mt) + w0.w(m0));
    }
    ScalarField::new(cp.shape(), data)
}

/// Builds the toric path `w_t = (1−t)w₀ + t w₁` over the time grid, with the
/// reference `w₀` taken from the manifold. Strict convexity is checked at
/// the extreme grid times (`w_t''` is affine in `t`).
pub fn toric_geodesic(
    manifold: &Manifold,
    w1: &SymplecticPotential,
    times: TimeGrid,
) -> Result<GeodesicPath> {
    let cp = manifold.as_cp1()?;
    let w0 = cp.potential().clone();
    let dd = w1.delta.clone().sum(w0.delta.scale(-1.0));

    for &t in &[times.t(0), times.t(times.steps)] {
        let wt = SymplecticPotential::new(w0.delta.clone().sum(dd.scale(t)));
        wt.check_convex(cp.intervals())?;
    }

    let gauge_rate = mean_delta(&dd);
    let generator = PathGenerator::Toric {
        w0: w0.clone(),
        dd: dd.clone(),
        gauge_rate,
    };

    let reference = manifold.reference_metric();
    let mut potentials = Vec::with_capacity(times.nodes());
    let mut velocities = Vec::with_capacity(times.nodes());
    let mut metrics = Vec::with_capacity(times.nodes());
    for i in 0..times.nodes() {
        let t = times.t(i);
        let rho: Vec<f64> = (0..cp.nodes())
            .map(|k| moment_state(&w0, &dd, t, cp.m(k)).1)
            .collect();
        let metric = MetricDensity::try_new(ScalarField::new(cp.shape(), rho))?;
        let q = Form11 {
            density: metric.density.sub(&reference.density),
        };
        let u_pre = legendre_potential(cp, &w0, &dd, t);
        let c = energy::energy_gauge_constant(manifold, &u_pre, &q)?;
        let u = u_pre.shift(-c);
        let udot: Vec<f64> = (0..cp.nodes())
            .map(|k| {
                let (mt, _) = moment_state(&w0, &dd, t, cp.m(k));
                -dd.eval(mt) + gauge_rate
            })
            .collect();
        potentials.push(u);
        velocities.push(ScalarField::new(cp.shape(), udot));
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

/// Wraps a toric path with the non-geodesic perturbation
/// `amp(t)·bump(m)`; a negative control for the foliation lemmas.
pub fn perturbed_toric(
    manifold: &Manifold,
    w1: &SymplecticPotential,
    times: TimeGrid,
    time_amp: Profile,
    bump: Profile,
) -> Result<GeodesicPath> {
    let base = toric_geodesic(manifold, w1, times)?;
    let cp = manifold.as_cp1()?;
    let (w0, dd, gauge_rate) = match &base.generator {
        PathGenerator::Toric { w0, dd, gauge_rate } => (w0.clone(), dd.clone(), *gauge_rate),
        _ => unreachable!(),
    };
    let mut out = base;
    for i in 0..out.times.nodes() {
        let t = out.times.t(i);
        let amp = time_amp.eval(t);
        let damp = time_amp.d1(t);
        let mut u = out.potentials[i].clone();
        let mut v = out.velocities[i].clone();
        let mut rho = out.metrics[i].density.clone();
        for k in 0..cp.nodes() {
            let m = cp.m(k);
            let mu = cp1::mu(m);
            let mu_d = 1.0 - 2.0 * m;
            u.data[k] += amp * bump.eval(m);
            v.data[k] += damp * bump.eval(m);
            rho.data[k] += amp * (mu_d * bump.d1(m) + mu * bump.d2(m));
        }
        out.potentials[i] = u;
        out.velocities[i] = v;
        out.metrics[i] = MetricDensity::try_new(rho)?;
    }
    out.generator = PathGenerator::ToricPerturbed {
        w0,
        dd,
        gauge_rate,
        time_amp,
        bump,
    };
    Ok(out)
}

fn mean_delta(dd: &Profile) -> f64 {
    let n = 2048;
    let h = 1.0 / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| dd.eval(i as f64 * h)).collect();
    cp1::simpson(&vals, h)
}

/// Supremum of convexity-preserving deformation times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtensionTime {
    Finite(f64),
    Infinite,
}

impl ExtensionTime {
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtensionTime::Finite(t) => *t,
            ExtensionTime::Infinite => f64::INFINITY,
        }
    }
}

/// `sup{T : w₀ + t·dw strictly convex for all |t| < T}`; infinite exactly
/// when `dw` is affine (decided structurally, not numerically).
pub fn max_extension_time(w0: &SymplecticPotential, dw: &Profile) -> ExtensionTime {
    let (neg, pos) = extension_interval(w0, dw);
    match (neg, pos) {
        (ExtensionTime::Infinite, ExtensionTime::Infinite) => ExtensionTime::Infinite,
        (a, b) => ExtensionTime::Finite(a.as_f64().min(b.as_f64())),
    }
}

/// One-sided extension times `(T₋, T₊)`: `w₀ + t·dw` stays strictly convex
/// for `−T₋ < t < T₊`. Computed from the sign pattern of
/// `A(m) = μ w₀''` versus `B(m) = μ dw''` by a fine scan with parabolic
/// refinement.
pub fn extension_interval(w0: &SymplecticPotential, dw: &Profile) -> (ExtensionTime, ExtensionTime) {
    if dw.is_affine() {
        return (ExtensionTime::Infinite, ExtensionTime::Infinite);
    }
    let n = 200_000;
    let h = 1.0 / n as f64;
    let ratio = |m: f64, sign: f64| -> f64 {
        let a = w0.mu_w2(m);
        let b = cp1::mu(m) * dw.d2(m) * sign;
        if b < 0.0 {
            a / (-b)
        } else {
            f64::INFINITY
        }
    };
    let one_side = |sign: f64| -> ExtensionTime {
        let mut best = f64::INFINITY;
        let mut best_m = 0.5;
        for i in 1..n {
            let m = i as f64 * h;
            let r = ratio(m, sign);
            if r < best {
                best = r;
                best_m = m;
            }
        }
        if !best.is_finite() {
            return ExtensionTime::Infinite;
        }
        // one parabolic refinement around the scan minimum
        let (f0, f1, f2) = (
            ratio(best_m - h, sign),
            ratio(best_m, sign),
            ratio(best_m + h, sign),
        );
        if f0.is_finite() && f2.is_finite() {
            let denom = f0 - 2.0 * f1 + f2;
            if denom.abs() > 0.0 {
                let dm = 0.5 * h * (f0 - f2) / denom;
                let m_ref = (best_m + dm).clamp(h, 1.0 - h);
                best = best.min(ratio(m_ref, sign));
            }
        }
        ExtensionTime::Finite(best)
    };
    (one_side(-1.0), one_side(1.0))
}
