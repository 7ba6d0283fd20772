//! Sampled fields and form coefficients on the model grids.
//!
//! Coefficient conventions (see [`crate::conventions`]):
//! * torus — (0,1)-forms are stored against `dz̄`, (1,0) against `dz`,
//!   (1,1) densities against `i dz∧dz̄`;
//! * ℂP¹ — invariant (0,1)-forms against `∂̄s = dz̄/z̄`, (1,0) against
//!   `∂s = dz/z`, (1,1) densities reduced against `dm∧dα`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Grid shape of a sampled field.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    /// Periodic `n × n` grid on `[0,1)²`, row-major `(i1, i2) → i1*n + i2`.
    Torus { n: usize },
    /// Closed moment interval `[0,1]` with `nodes` equispaced samples.
    Moment { nodes: usize },
    /// Product moment grid, row-major `(i1, i2) → i1*nodes2 + i2`.
    BiMoment { nodes1: usize, nodes2: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Torus { n } => n * n,
            Shape::Moment { nodes } => nodes,
            Shape::BiMoment { nodes1, nodes2 } => nodes1 * nodes2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn describe(&self) -> String {
        match *self {
            Shape::Torus { n } => format!("torus {n}x{n}"),
            Shape::Moment { nodes } => format!("moment interval with {nodes} nodes"),
            Shape::BiMoment { nodes1, nodes2 } => format!("moment product {nodes1}x{nodes2}"),
        }
    }

    pub fn check_matches(&self, other: Shape) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.describe(),
                found: other.describe(),
            })
        }
    }
}

/// Real-valued function sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub shape: Shape,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn new(shape: Shape, data: Vec<f64>) -> Self {
        assert_eq!(shape.len(), data.len(), "field length must match shape");
        ScalarField { shape, data }
    }

    pub fn zeros(shape: Shape) -> Self {
        ScalarField {
            shape,
            data: vec![0.0; shape.len()],
        }
    }

    pub fn constant(shape: Shape, value: f64) -> Self {
        ScalarField {
            shape,
            data: vec![value; shape.len()],
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            shape: self.shape,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField {
            shape: self.shape,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn shift(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
    }

    pub fn grid_mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |acc, &v| acc.min(v))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v))
    }

    pub fn validate_finite(&self) -> Result<()> {
        for (i, &v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::precondition(format!(
                    "non-finite field value {v} at node {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Complex-valued function sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub shape: Shape,
    pub data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(shape: Shape, data: Vec<Complex64>) -> Self {
        assert_eq!(shape.len(), data.len(), "field length must match shape");
        ComplexField { shape, data }
    }

    pub fn zeros(shape: Shape) -> Self {
        ComplexField {
            shape,
            data: vec![Complex64::new(0.0, 0.0); shape.len()],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    pub fn mean(&self) -> Complex64 {
        let sum: Complex64 = self.data.iter().sum();
        sum / self.data.len() as f64
    }

    pub fn conj(&self) -> Self {
        ComplexField {
            shape: self.shape,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexField {
            shape: self.shape,
            data,
        }
    }
}

/// (0,1)-form coefficients; see the module docs for the per-backend frame.
#[derive(Clone, Debug)]
pub struct Form01 {
    pub coeff: ComplexField,
}

/// (1,0)-form coefficients.
#[derive(Clone, Debug)]
pub struct Form10 {
    pub coeff: ComplexField,
}

/// Real density of a (1,1)-form. Kähler-candidate coefficients are real by
/// construction; the imaginary part never appears.
#[derive(Clone, Debug)]
pub struct Form11 {
    pub density: ScalarField,
}

/// Strictly positive density of a Kähler form.
#[derive(Clone, Debug)]
pub struct MetricDensity {
    pub density: ScalarField,
}

impl MetricDensity {
    /// Validates strict positivity at every node.
    pub fn try_new(density: ScalarField) -> Result<Self> {
        for (i, &v) in density.data.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveDensity { index: i, value: v });
            }
        }
        Ok(MetricDensity { density })
    }

    pub fn shape(&self) -> Shape {
        self.density.shape
    }

    /// Adds a (1,1)-density, revalidating positivity.
    pub fn perturbed(&self, delta: &Form11) -> Result<Self> {
        MetricDensity::try_new(self.density.add(&delta.density))
    }
}
