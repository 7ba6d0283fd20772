//! Manifold backends and discrete complex calculus.
//!
//! Three backends: the flat torus (full 2D periodic grid, spectral
//! calculus), S¹-invariant ℂP¹ (reduced to the moment coordinate) and the
//! product of two invariant ℂP¹ factors (torus-invariant data only).
//!
//! On the product backend a [`MetricDensity`] holds the reduced density of
//! the top form `ω²/2!` against `dm₁∧dα₁∧dm₂∧dα₂`; the chartwise complex
//! calculus is only exposed on the two scalar backends.

pub mod cp1;
pub mod field;
pub mod profile;
pub mod spectral;
pub mod torus;

use num_complex::Complex64;

pub use cp1::{Cp1Manifold, SymplecticPotential};
pub use field::{ComplexField, Form01, Form10, Form11, MetricDensity, ScalarField, Shape};
pub use profile::Profile;
pub use torus::TorusManifold;

use crate::conventions::DEFAULT_REL_TOL;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum Manifold {
    Torus(TorusManifold),
    Cp1(Cp1Manifold),
    /// Product of two invariant ℂP¹ factors (complex dimension 2).
    ProductCp1(Box<Cp1Manifold>, Box<Cp1Manifold>),
}

impl Manifold {
    /// Flat-torus backend from a strictly positive periodic density `ξ`,
    /// `ω = ξ·i dz∧dz̄`.
    pub fn torus(n: usize, profile: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Ok(Manifold::Torus(TorusManifold::new(n, profile)?))
    }

    /// Invariant ℂP¹ backend from a strictly convex symplectic potential.
    pub fn cp1(intervals: usize, potential: SymplecticPotential) -> Result<Self> {
        Ok(Manifold::Cp1(Cp1Manifold::new(intervals, potential)?))
    }

    pub fn cp1_fubini_study(intervals: usize) -> Result<Self> {
        Ok(Manifold::Cp1(Cp1Manifold::fubini_study(intervals)?))
    }

    pub fn product_cp1(a: Cp1Manifold, b: Cp1Manifold) -> Self {
        Manifold::ProductCp1(Box::new(a), Box::new(b))
    }

    pub fn shape(&self) -> Shape {
        match self {
            Manifold::Torus(t) => t.shape(),
            Manifold::Cp1(c) => c.shape(),
            Manifold::ProductCp1(a, b) => Shape::BiMoment {
                nodes1: a.nodes(),
                nodes2: b.nodes(),
            },
        }
    }

    /// Complex dimension of the backend.
    pub fn complex_dim(&self) -> usize {
        match self {
            Manifold::ProductCp1(..) => 2,
            _ => 1,
        }
    }

    /// Total volume `∫ ωⁿ/n!` of the reference form, as computed by the
    /// backend quadrature.
    pub fn volume(&self) -> f64 {
        match self {
            Manifold::Torus(t) => t.volume(),
            Manifold::Cp1(c) => c.volume(),
            Manifold::ProductCp1(a, b) => a.volume() * b.volume(),
        }
    }

    /// Reference volume density `ωⁿ/n!` in the backend's reduced frame.
    pub fn reference_metric(&self) -> MetricDensity {
        match self {
            Manifold::Torus(t) => t.reference().clone(),
            Manifold::Cp1(c) => c.reference().clone(),
            Manifold::ProductCp1(a, b) => {
                product_volume_density(a.reference(), b.reference())
            }
        }
    }

    /// Per-node weights of `ωⁿ/n!` for a metric in the backend frame.
    pub fn node_measure(&self, metric: &MetricDensity) -> Vec<f64> {
        match self {
            Manifold::Torus(t) => torus::node_measure(t.n(), metric),
            Manifold::Cp1(c) => cp1::node_measure(c, metric),
            Manifold::ProductCp1(a, b) => {
                let n1 = a.nodes();
                let n2 = b.nodes();
                let (h1, h2) = (a.step(), b.step());
                let tau = std::f64::consts::TAU;
                let mut out = Vec::with_capacity(n1 * n2);
                for i in 0..n1 {
                    let w1 = if i == 0 || i == n1 - 1 { 0.5 } else { 1.0 };
                    for j in 0..n2 {
                        let w2 = if j == 0 || j == n2 - 1 { 0.5 } else { 1.0 };
                        let rho = metric.density.data[i * n2 + j];
                        out.push(tau * tau * rho * w1 * w2 * h1 * h2);
                    }
                }
                out
            }
        }
    }

    /// `∫ f ωⁿ/n!` for a scalar against a metric.
    pub fn integrate_against(&self, f: &ScalarField, metric: &MetricDensity) -> f64 {
        self.shape().check_matches(f.shape).expect("shape match");
        self.node_measure(metric)
            .iter()
            .zip(&f.data)
            .map(|(&w, &v)| w * v)
            .sum()
    }

    /// Mean of `f` against a metric's measure.
    pub fn mean_against(&self, f: &ScalarField, metric: &MetricDensity) -> f64 {
        let mass: f64 = self.node_measure(metric).iter().sum();
        self.integrate_against(f, metric) / mass
    }

    /// Mean of `f` against the reference measure.
    pub fn reference_mean(&self, f: &ScalarField) -> f64 {
        self.mean_against(f, &self.reference_metric())
    }

    /// `∫` of a top-degree density in the backend frame.
    ///
    /// Trapezoid on the moment backends (it pairs with the flux Laplacian to
    /// make the Stokes identity exact); plain spectral sum on the torus.
    pub fn integrate(&self, form: &Form11) -> Result<f64> {
        self.shape().check_matches(form.density.shape)?;
        Ok(match self {
            Manifold::Torus(t) => torus::integrate_density(t.n(), &form.density),
            Manifold::Cp1(c) => {
                std::f64::consts::TAU * cp1::trapezoid(&form.density.data, c.step())
            }
            Manifold::ProductCp1(a, b) => {
                let tau = std::f64::consts::TAU;
                let n2 = b.nodes();
                let rows: Vec<f64> = form
                    .density
                    .data
                    .chunks_exact(n2)
                    .map(|row| cp1::trapezoid(row, b.step()))
                    .collect();
                tau * tau * cp1::trapezoid(&rows, a.step())
            }
        })
    }

    /// `∂̄` of a scalar field; unsupported on the product backend.
    pub fn dbar(&self, u: &ScalarField) -> Result<Form01> {
        self.shape().check_matches(u.shape)?;
        match self {
            Manifold::Torus(t) => Ok(torus::dbar(t, u)),
            Manifold::Cp1(c) => {
                let p = cp1::dbar_profile(c, &u.data);
                let data = p.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
                Ok(Form01 {
                    coeff: ComplexField::new(u.shape, data),
                })
            }
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// `∂` of a scalar field.
    pub fn del(&self, u: &ScalarField) -> Result<Form10> {
        self.shape().check_matches(u.shape)?;
        match self {
            Manifold::Torus(t) => Ok(torus::del(t, u)),
            Manifold::Cp1(c) => {
                let p = cp1::dbar_profile(c, &u.data);
                let data = p.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
                Ok(Form10 {
                    coeff: ComplexField::new(u.shape, data),
                })
            }
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// Density of `i∂∂̄u` in the backend frame.
    pub fn i_del_dbar(&self, u: &ScalarField) -> Result<Form11> {
        self.shape().check_matches(u.shape)?;
        match self {
            Manifold::Torus(t) => Ok(torus::i_del_dbar(t, u)),
            Manifold::Cp1(c) => Ok(Form11 {
                density: ScalarField::new(u.shape, cp1::flux_laplacian(c, &u.data)),
            }),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// Solves `i∂∂̄u = ρ` for a mean-zero `u` with the default tolerance.
    pub fn poisson_solve(&self, rho: &Form11) -> Result<ScalarField> {
        self.poisson_solve_tol(rho, DEFAULT_REL_TOL)
    }

    /// Solves `i∂∂̄u = ρ` with an explicit relative compatibility tolerance.
    /// The quadrature defect of `∫ρ` is projected out before solving.
    pub fn poisson_solve_tol(&self, rho: &Form11, tol_rel: f64) -> Result<ScalarField> {
        self.shape().check_matches(rho.density.shape)?;
        match self {
            Manifold::Torus(t) => torus::poisson(t, rho, tol_rel),
            Manifold::Cp1(c) => cp1::poisson_reduced(c, &rho.density.data, tol_rel),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// Harmonic part of a (0,1)-form. On the torus this is the constant
    /// (zero-frequency) component; invariant ℂP¹ carries no (0,1)
    /// obstruction, so the result is zero there.
    pub fn harmonic_part(&self, beta: &Form01) -> Result<Form01> {
        self.shape().check_matches(beta.coeff.shape)?;
        match self {
            Manifold::Torus(_) => {
                let mean = torus::harmonic_part(beta);
                let data = vec![mean; beta.coeff.shape.len()];
                Ok(Form01 {
                    coeff: ComplexField::new(beta.coeff.shape, data),
                })
            }
            Manifold::Cp1(_) => Ok(Form01 {
                coeff: ComplexField::zeros(beta.coeff.shape),
            }),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// `ω`-Laplacian of a scalar: the ratio of the `i∂∂̄u` density to the
    /// metric density (n = 1).
    pub fn omega_laplacian(
        &self,
        u: &ScalarField,
        metric: &MetricDensity,
    ) -> Result<ScalarField> {
        let q = self.i_del_dbar(u)?;
        Ok(q.density.zip_map(&metric.density, |a, b| a / b))
    }

    /// Pointwise `|∂̄v|²_ω`.
    pub fn dbar_norm_sq(&self, v: &ScalarField, metric: &MetricDensity) -> Result<ScalarField> {
        self.shape().check_matches(v.shape)?;
        match self {
            Manifold::Torus(t) => Ok(torus::dbar_norm_sq(t, v, metric)),
            Manifold::Cp1(c) => Ok(ScalarField::new(
                v.shape,
                cp1::dbar_norm_sq(c, &v.data, &metric.density.data),
            )),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    /// Scalar curvature of a metric in the backend frame (n = 1 only).
    pub fn scalar_curvature(&self, metric: &MetricDensity) -> Result<ScalarField> {
        match self {
            Manifold::Torus(t) => Ok(torus::scalar_curvature(t, metric)),
            Manifold::Cp1(c) => Ok(cp1::scalar_curvature(c, metric)),
            Manifold::ProductCp1(..) => Err(Error::UnsupportedField),
        }
    }

    pub fn as_torus(&self) -> Result<&TorusManifold> {
        match self {
            Manifold::Torus(t) => Ok(t),
            _ => Err(Error::UnsupportedField),
        }
    }

    pub fn as_cp1(&self) -> Result<&Cp1Manifold> {
        match self {
            Manifold::Cp1(c) => Ok(c),
            _ => Err(Error::UnsupportedField),
        }
    }

    pub fn as_product(&self) -> Result<(&Cp1Manifold, &Cp1Manifold)> {
        match self {
            Manifold::ProductCp1(a, b) => Ok((a, b)),
            _ => Err(Error::UnsupportedField),
        }
    }
}

/// Reduced top-form density `ρ₁(m₁)ρ₂(m₂)` of a sum metric `ω₁ ⊕ ω₂`.
pub fn product_volume_density(rho1: &MetricDensity, rho2: &MetricDensity) -> MetricDensity {
    let n1 = rho1.density.data.len();
    let n2 = rho2.density.data.len();
    let mut data = Vec::with_capacity(n1 * n2);
    for &a in &rho1.density.data {
        for &b in &rho2.density.data {
            data.push(a * b);
        }
    }
    MetricDensity {
        density: ScalarField::new(
            Shape::BiMoment {
                nodes1: n1,
                nodes2: n2,
            },
            data,
        ),
    }
}

/// Outer sum `f₁(m₁) + f₂(m₂)` as a product-grid field.
pub fn outer_sum(f1: &ScalarField, f2: &ScalarField) -> ScalarField {
    let n1 = f1.data.len();
    let n2 = f2.data.len();
    let mut data = Vec::with_capacity(n1 * n2);
    for &a in &f1.data {
        for &b in &f2.data {
            data.push(a + b);
        }
    }
    ScalarField::new(
        Shape::BiMoment {
            nodes1: n1,
            nodes2: n2,
        },
        data,
    )
}
