//! Smooth one-variable profiles with exact derivatives.
//!
//! Used for symplectic-potential corrections, torus density sections and
//! test functions; keeping the derivative closed-form gives every consumer
//! an exact oracle.

/// A smooth function on `[0,1]` (or any interval) with two exact derivatives.
#[derive(Clone, Debug)]
pub enum Profile {
    Zero,
    Const(f64),
    /// `a + b·x`
    Affine { a: f64, b: f64 },
    /// Ascending coefficients `c₀ + c₁x + …`
    Poly(Vec<f64>),
    /// `amp · exp(−((x−center)/sigma)²)`
    GaussBump { amp: f64, center: f64, sigma: f64 },
    Sum(Box<Profile>, Box<Profile>),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Const(c) => *c,
            Profile::Affine { a, b } => a + b * x,
            Profile::Poly(c) => horner(c, x),
            Profile::GaussBump { amp, center, sigma } => {
                let u = (x - center) / sigma;
                amp * (-u * u).exp()
            }
            Profile::Sum(f, g) => f.eval(x) + g.eval(x),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self {
            Profile::Zero | Profile::Const(_) => 0.0,
            Profile::Affine { b, .. } => *b,
            Profile::Poly(c) => horner(&poly_derivative(c), x),
            Profile::GaussBump { amp, center, sigma } => {
                let u = (x - center) / sigma;
                -2.0 * amp * u * (-u * u).exp() / sigma
            }
            Profile::Sum(f, g) => f.d1(x) + g.d1(x),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match self {
            Profile::Zero | Profile::Const(_) | Profile::Affine { .. } => 0.0,
            Profile::Poly(c) => horner(&poly_derivative(&poly_derivative(c)), x),
            Profile::GaussBump { amp, center, sigma } => {
                let u = (x - center) / sigma;
                amp * (4.0 * u * u - 2.0) * (-u * u).exp() / (sigma * sigma)
            }
            Profile::Sum(f, g) => f.d2(x) + g.d2(x),
        }
    }

    /// True when the second derivative vanishes identically (checked on the
    /// representation, not numerically).
    pub fn is_affine(&self) -> bool {
        match self {
            Profile::Zero | Profile::Const(_) | Profile::Affine { .. } => true,
            Profile::Poly(c) => c.iter().skip(2).all(|&v| v == 0.0),
            Profile::GaussBump { amp, .. } => *amp == 0.0,
            Profile::Sum(f, g) => f.is_affine() && g.is_affine(),
        }
    }

    pub fn sum(self, other: Profile) -> Profile {
        Profile::Sum(Box::new(self), Box::new(other))
    }

    /// Structural scaling by a constant.
    pub fn scale(&self, k: f64) -> Profile {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Const(c) => Profile::Const(k * c),
            Profile::Affine { a, b } => Profile::Affine {
                a: k * a,
                b: k * b,
            },
            Profile::Poly(c) => Profile::Poly(c.iter().map(|&v| k * v).collect()),
            Profile::GaussBump { amp, center, sigma } => Profile::GaussBump {
                amp: k * amp,
                center: *center,
                sigma: *sigma,
            },
            Profile::Sum(f, g) => Profile::Sum(Box::new(f.scale(k)), Box::new(g.scale(k))),
        }
    }

    /// The bump profile `m²(1−m)²` as a polynomial.
    pub fn squared_bump(scale: f64) -> Profile {
        Profile::Poly(vec![0.0, 0.0, scale, -2.0 * scale, scale])
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}
