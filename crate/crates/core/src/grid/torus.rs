//! Flat-torus backend: periodic `[0,1)²` grid with spectral complex calculus.
//!
//! The chart is `z = x₁ + i x₂`; the reference form is `ω = ξ(x)·i dz∧dz̄`
//! with `ξ > 0`. Densities follow the `i dz∧dz̄ = 2 dx∧dy` convention.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conventions::IDZBAR_TO_AREA;
use crate::error::{Error, Result};
use crate::grid::field::{ComplexField, Form01, Form10, Form11, MetricDensity, ScalarField, Shape};
use crate::grid::spectral;

#[derive(Clone, Debug)]
pub struct TorusManifold {
    n: usize,
    reference: MetricDensity,
    volume: f64,
}

impl TorusManifold {
    /// Builds the torus backend from a strictly positive periodic density.
    ///
    /// Requires `n ≥ 16` and a power of two so the spectral transforms are
    /// exact and cheap.
    pub fn new(n: usize, profile: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if n < 16 {
            return Err(Error::ResolutionTooSmall {
                given: n,
                minimum: 16,
            });
        }
        if !n.is_power_of_two() {
            return Err(Error::ResolutionNotPowerOfTwo { given: n });
        }
        let shape = Shape::Torus { n };
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = i as f64 / n as f64;
            for j in 0..n {
                let x2 = j as f64 / n as f64;
                data.push(profile(x1, x2));
            }
        }
        let density = ScalarField::new(shape, data);
        density.validate_finite()?;
        let reference = MetricDensity::try_new(density)?;
        let volume = integrate_density(n, &reference.density);
        Ok(TorusManifold {
            n,
            reference,
            volume,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> Shape {
        Shape::Torus { n: self.n }
    }

    pub fn reference(&self) -> &MetricDensity {
        &self.reference
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Node coordinates `(x1, x2)` of linear index `idx`.
    pub fn node(&self, idx: usize) -> (f64, f64) {
        let i = idx / self.n;
        let j = idx % self.n;
        (i as f64 / self.n as f64, j as f64 / self.n as f64)
    }
}

/// `∫ q · i dz∧dz̄ = (2/n²) Σ q`; exact for band-limited integrands.
pub fn integrate_density(n: usize, density: &ScalarField) -> f64 {
    IDZBAR_TO_AREA * density.data.iter().sum::<f64>() / (n * n) as f64
}

/// Per-node measure weights of `ω = g·i dz∧dz̄` (n = 1, so `ωⁿ/n! = ω`).
pub fn node_measure(n: usize, metric: &MetricDensity) -> Vec<f64> {
    let w = IDZBAR_TO_AREA / (n * n) as f64;
    metric.density.data.iter().map(|&g| g * w).collect()
}

/// Spectral gradient `(u_x, u_y)`.
pub fn gradient(torus: &TorusManifold, u: &ScalarField) -> (ScalarField, ScalarField) {
    let n = torus.n;
    let spec = spectral::forward_real(&u.data, n);
    let mut sx = spec.clone();
    spectral::zero_nyquist(&mut sx, n);
    let mut sy = sx.clone();
    spectral::apply_multiplier(&mut sx, n, |k1, _| Complex64::new(0.0, 2.0 * PI * k1));
    spectral::apply_multiplier(&mut sy, n, |_, k2| Complex64::new(0.0, 2.0 * PI * k2));
    let ux = ScalarField::new(u.shape, spectral::inverse_to_real(sx, n));
    let uy = ScalarField::new(u.shape, spectral::inverse_to_real(sy, n));
    (ux, uy)
}

/// `∂̄u = u_z̄ dz̄` with `u_z̄ = ½(u_x + i u_y)`.
pub fn dbar(torus: &TorusManifold, u: &ScalarField) -> Form01 {
    let (ux, uy) = gradient(torus, u);
    let data = ux
        .data
        .iter()
        .zip(&uy.data)
        .map(|(&a, &b)| Complex64::new(0.5 * a, 0.5 * b))
        .collect();
    Form01 {
        coeff: ComplexField::new(u.shape, data),
    }
}

/// `∂u = u_z dz` with `u_z = ½(u_x − i u_y)`.
pub fn del(torus: &TorusManifold, u: &ScalarField) -> Form10 {
    let (ux, uy) = gradient(torus, u);
    let data = ux
        .data
        .iter()
        .zip(&uy.data)
        .map(|(&a, &b)| Complex64::new(0.5 * a, -0.5 * b))
        .collect();
    Form10 {
        coeff: ComplexField::new(u.shape, data),
    }
}

/// Density of `i∂∂̄u` against `i dz∧dz̄`, i.e. `u_{zz̄} = ¼Δu`, spectrally.
pub fn i_del_dbar(torus: &TorusManifold, u: &ScalarField) -> Form11 {
    let n = torus.n;
    let mut spec = spectral::forward_real(&u.data, n);
    spectral::apply_multiplier(&mut spec, n, |k1, k2| {
        Complex64::new(-PI * PI * (k1 * k1 + k2 * k2), 0.0)
    });
    Form11 {
        density: ScalarField::new(u.shape, spectral::inverse_to_real(spec, n)),
    }
}

/// Solves `i∂∂̄u = ρ` by division by the symbol; the zero mode is the
/// compatibility direction and must vanish within tolerance.
pub fn poisson(torus: &TorusManifold, rho: &Form11, tol_rel: f64) -> Result<ScalarField> {
    let n = torus.n;
    let integral = integrate_density(n, &rho.density);
    let tolerance = tol_rel * torus.volume;
    if integral.abs() > tolerance {
        return Err(Error::CompatibilityViolation {
            integral,
            tolerance,
        });
    }
    let mut spec = spectral::forward_real(&rho.density.data, n);
    spec[0] = Complex64::default(); // project out the quadrature defect
    spectral::apply_multiplier(&mut spec, n, |k1, k2| {
        let sym = k1 * k1 + k2 * k2;
        if sym == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(-1.0 / (PI * PI * sym), 0.0)
        }
    });
    let u = ScalarField::new(rho.density.shape, spectral::inverse_to_real(spec, n));
    // gauge: mean zero against the reference measure
    let weights = node_measure(n, &torus.reference);
    let mean = weighted_mean(&u, &weights, torus.volume);
    Ok(u.shift(-mean))
}

pub fn weighted_mean(u: &ScalarField, weights: &[f64], volume: f64) -> f64 {
    u.data
        .iter()
        .zip(weights)
        .map(|(&v, &w)| v * w)
        .sum::<f64>()
        / volume
}

/// Harmonic part of a (0,1)-form: the zero-frequency coefficient.
pub fn harmonic_part(beta: &Form01) -> Complex64 {
    beta.coeff.mean()
}

/// Solves `i ∂̄h = β` after the harmonic part has been removed.
pub fn dbar_potential(torus: &TorusManifold, beta: &Form01) -> ComplexField {
    let n = torus.n;
    let mut spec: Vec<Complex64> = beta.coeff.data.clone();
    spectral::fft2(&mut spec, n, false);
    spec[0] = Complex64::default();
    spectral::zero_nyquist(&mut spec, n);
    // i h_z̄ = b with h_z̄ ↔ πi(k1 + i k2) ĥ, so ĥ = −b̂ / (π(k1 + i k2)).
    spectral::apply_multiplier(&mut spec, n, |k1, k2| {
        let denom = Complex64::new(k1, k2) * PI;
        if denom.norm_sqr() == 0.0 {
            Complex64::default()
        } else {
            -1.0 / denom
        }
    });
    ComplexField::new(beta.coeff.shape, spectral::inverse_complex(spec, n))
}

/// Pointwise `|∂̄v|²_ω = (v_x² + v_y²)/(4g)`.
pub fn dbar_norm_sq(torus: &TorusManifold, v: &ScalarField, metric: &MetricDensity) -> ScalarField {
    let (vx, vy) = gradient(torus, v);
    let data = vx
        .data
        .iter()
        .zip(&vy.data)
        .zip(&metric.density.data)
        .map(|((&a, &b), &g)| (a * a + b * b) / (4.0 * g))
        .collect();
    ScalarField::new(v.shape, data)
}

/// Scalar curvature `S(ω) = −(log g)_{zz̄} / g` of `ω = g·i dz∧dz̄`.
pub fn scalar_curvature(torus: &TorusManifold, metric: &MetricDensity) -> ScalarField {
    let log_g = metric.density.map(f64::ln);
    let num = i_del_dbar(torus, &log_g);
    ScalarField::new(
        metric.density.shape,
        num.density
            .data
            .iter()
            .zip(&metric.density.data)
            .map(|(&q, &g)| -q / g)
            .collect(),
    )
}
