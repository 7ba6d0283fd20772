//! Multidimensional geodesics from commuting tuples on ℂP¹ × ℂP¹.
//!
//! The flows of a componentwise tuple commute by construction; the potential
//! of the product path splits into factor potentials up to the product
//! energy gauge, which is computed genuinely (2D quadrature) and stored per
//! node. The diagonal restriction and the mixed second-derivative system
//! are verification surfaces, not assumptions.

use crate::conventions::TAU_LAPLACE_FACTOR;
use crate::error::{Error, Result};
use crate::flows::HoloField;
use crate::geodesics::{induced_geodesic, GeodesicPath, Residual, TimeGrid};
use crate::grid::cp1;
use crate::grid::{outer_sum, product_volume_density, Manifold, MetricDensity, ScalarField};

#[derive(Clone, Copy, Debug)]
pub struct TimeGrid2 {
    pub axis1: TimeGrid,
    pub axis2: TimeGrid,
}

/// Geodesic with two-dimensional time on a product backend.
#[derive(Clone, Debug)]
pub struct MultiGeodesicPath {
    pub manifold: Manifold,
    pub grid: TimeGrid2,
    pub factor1: GeodesicPath,
    pub factor2: GeodesicPath,
    /// Product energy gauge constants `c_{ij}`; `u_{ij} = u¹_i ⊕ u²_j + c_{ij}`.
    pub gauge_constants: Vec<f64>,
}

/// Builds the product path of a commuting componentwise tuple, solving each
/// factor as an induced geodesic and fixing the constants by the product
/// Aubin–Yau energy.
pub fn multi_geodesic(
    manifold: &Manifold,
    tuple: &HoloField,
    grid: TimeGrid2,
) -> Result<MultiGeodesicPath> {
    let (f1, f2) = manifold.as_product()?;
    let HoloField::Product(v1, v2) = tuple else {
        return Err(Error::NonCommutingTuple);
    };
    let m1 = Manifold::Cp1(f1.clone());
    let m2 = Manifold::Cp1(f2.clone());
    let path1 = induced_geodesic(&m1, v1, grid.axis1, false)?;
    let path2 = induced_geodesic(&m2, v2, grid.axis2, false)?;

    let volume = manifold.volume();
    let n1 = grid.axis1.nodes();
    let n2 = grid.axis2.nodes();
    let mut gauge_constants = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let e = product_energy(
                f1,
                f2,
                &path1.potentials[i],
                &path2.potentials[j],
                &path1.metrics[i],
                &path2.metrics[j],
            );
            gauge_constants.push(-e / volume);
        }
    }

    Ok(MultiGeodesicPath {
        manifold: manifold.clone(),
        grid,
        factor1: path1,
        factor2: path2,
        gauge_constants,
    })
}

/// Product Aubin–Yau energy of a separable potential `u₁ ⊕ u₂` against the
/// factor references: Simpson in the segment parameter (the integrand is
/// quadratic in `s` for n = 2), separable 1D quadratures in space.
fn product_energy(
    f1: &cp1::Cp1Manifold,
    f2: &cp1::Cp1Manifold,
    u1: &ScalarField,
    u2: &ScalarField,
    metric1: &MetricDensity,
    metric2: &MetricDensity,
) -> f64 {
    let tau = std::f64::consts::TAU;
    let q1: Vec<f64> = metric1
        .density
        .data
        .iter()
        .zip(&f1.reference().density.data)
        .map(|(&a, &b)| a - b)
        .collect();
    let q2: Vec<f64> = metric2
        .density
        .data
        .iter()
        .zip(&f2.reference().density.data)
        .map(|(&a, &b)| a - b)
        .collect();
    let slice = |s: f64| -> f64 {
        let p1: Vec<f64> = f1
            .reference()
            .density
            .data
            .iter()
            .zip(&q1)
            .map(|(&r, &q)| r + s * q)
            .collect();
        let p2: Vec<f64> = f2
            .reference()
            .density
            .data
            .iter()
            .zip(&q2)
            .map(|(&r, &q)| r + s * q)
            .collect();
        let u1p1: Vec<f64> = u1.data.iter().zip(&p1).map(|(&a, &b)| a * b).collect();
        let u2p2: Vec<f64> = u2.data.iter().zip(&p2).map(|(&a, &b)| a * b).collect();
        let h1 = f1.step();
        let h2 = f2.step();
        tau * tau
            * (cp1::simpson(&u1p1, h1) * cp1::simpson(&p2, h2)
                + cp1::simpson(&p1, h1) * cp1::simpson(&u2p2, h2))
    };
    // Simpson over s ∈ [0,1]; exact for the quadratic integrand
    (slice(0.0) + 4.0 * slice(0.5) + slice(1.0)) / 6.0
}

impl MultiGeodesicPath {
    pub fn gauge(&self, i: usize, j: usize) -> f64 {
        self.gauge_constants[i * self.grid.axis2.nodes() + j]
    }

    /// Materialized potential `u_{ij}` on the product grid.
    pub fn potential_field(&self, i: usize, j: usize) -> ScalarField {
        outer_sum(&self.factor1.potentials[i], &self.factor2.potentials[j])
            .shift(self.gauge(i, j))
    }

    /// Time gradient `(∂u/∂t₁, ∂u/∂t₂)` at a node, as factor fields plus the
    /// gauge-constant drift.
    pub fn velocity_pair(&self, i: usize, j: usize) -> (ScalarField, ScalarField) {
        let dc1 = self.gauge_derivative_axis1(i, j);
        let dc2 = self.gauge_derivative_axis2(i, j);
        (
            self.factor1.velocities[i].shift(dc1),
            self.factor2.velocities[j].shift(dc2),
        )
    }

    fn gauge_derivative_axis1(&self, i: usize, j: usize) -> f64 {
        let h = self.grid.axis1.step;
        let n = self.grid.axis1.nodes();
        if i == 0 {
            (self.gauge(1, j) - self.gauge(0, j)) / h
        } else if i + 1 == n {
            (self.gauge(i, j) - self.gauge(i - 1, j)) / h
        } else {
            (self.gauge(i + 1, j) - self.gauge(i - 1, j)) / (2.0 * h)
        }
    }

    fn gauge_derivative_axis2(&self, i: usize, j: usize) -> f64 {
        let h = self.grid.axis2.step;
        let n = self.grid.axis2.nodes();
        if j == 0 {
            (self.gauge(i, 1) - self.gauge(i, 0)) / h
        } else if j + 1 == n {
            (self.gauge(i, j) - self.gauge(i, j - 1)) / h
        } else {
            (self.gauge(i, j + 1) - self.gauge(i, j - 1)) / (2.0 * h)
        }
    }

    /// Reduced top-form density `ω_t²/2!` at a node.
    pub fn volume_density(&self, i: usize, j: usize) -> MetricDensity {
        product_volume_density(&self.factor1.metrics[i], &self.factor2.metrics[j])
    }

    /// Mixed geodesic-system residual
    /// `|ü_{12} − ⟨∂̄u̇₁, ∂̄u̇₂⟩_t|`: the inner product vanishes for a
    /// block metric and factor velocities, so this is the mixed second
    /// difference of the gauge constants.
    pub fn mixed_residual(&self, i: usize, j: usize) -> Result<f64> {
        let n1 = self.grid.axis1.nodes();
        let n2 = self.grid.axis2.nodes();
        if i == 0 || j == 0 || i + 1 >= n1 || j + 1 >= n2 {
            return Err(Error::BoundaryTimeNode { index: i });
        }
        let h1 = self.grid.axis1.step;
        let h2 = self.grid.axis2.step;
        let mixed = (self.gauge(i + 1, j + 1) - self.gauge(i + 1, j - 1)
            - self.gauge(i - 1, j + 1)
            + self.gauge(i - 1, j - 1))
            / (4.0 * h1 * h2);
        Ok(mixed.abs())
    }

    /// Geodesic residual along the diagonal line `t ↦ (t, t)`; requires
    /// identical axes. `|∂̄u̇|²` splits into factor norms for a block
    /// metric.
    pub fn diagonal_residual(&self, k: usize) -> Result<Residual> {
        let n = self.grid.axis1.nodes();
        assert_eq!(
            self.grid.axis1.nodes(),
            self.grid.axis2.nodes(),
            "diagonal restriction needs identical axes"
        );
        if k == 0 || k + 1 >= n {
            return Err(Error::BoundaryTimeNode { index: k });
        }
        let h = self.grid.axis1.step;
        let potentials: Vec<ScalarField> = (0..n).map(|i| self.potential_field(i, i)).collect();
        let udd = crate::geodesics::second_time_derivative(&potentials, k, h);

        let m1 = Manifold::Cp1(self.manifold.as_product()?.0.clone());
        let m2 = Manifold::Cp1(self.manifold.as_product()?.1.clone());
        let (v1, v2) = self.velocity_pair(k, k);
        let g1 = m1.dbar_norm_sq(&v1, &self.factor1.metrics[k])?;
        let g2 = m2.dbar_norm_sq(&v2, &self.factor2.metrics[k])?;
        let grad_sq = outer_sum(&g1, &g2);

        let c_field = udd
            .zip_map(&grad_sq, |a, b| a - b)
            .scale(TAU_LAPLACE_FACTOR);
        let vol = self.volume_density(k, k);
        let mean = self.manifold.mean_against(&c_field, &vol);
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
}
