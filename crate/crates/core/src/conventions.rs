//! Chart and factor conventions used throughout the crate.
//!
//! Every operation cites this module instead of restating factors inline.
//!
//! # Volume convention
//!
//! With `z = x + iy` we fix once and for all
//!
//! ```text
//! i dz ∧ dz̄ = 2 dx ∧ dy.
//! ```
//!
//! A (1,1)-form written as `q · i dz∧dz̄` therefore contributes `2q dx dy`
//! to integrals. On the torus `[0,1)²` the flat form `ω = i dz∧dz̄` has
//! total volume 2; the Fubini–Study form `ω = i∂∂̄ log(1+|z|²)` on ℂP¹ has
//! total volume 2π.
//!
//! # Wirtinger derivatives
//!
//! `∂/∂z = ½(∂ₓ − i∂ᵧ)`, `∂/∂z̄ = ½(∂ₓ + i∂ᵧ)`, so for a scalar `u`
//! the density of `i∂∂̄u` against `i dz∧dz̄` is `u_{zz̄} = ¼Δu`.
//!
//! # Real time versus complex time
//!
//! Paths `u_τ` that do not depend on `Im τ` are stored on a real time grid
//! `t = Re τ`. The factor table between the two parameterizations is
//!
//! ```text
//! ∂u/∂τ        = ½ du/dt
//! ∂²u/∂τ∂τ̄    = ¼ d²u/dt²
//! ```
//!
//! Consequently the geodesic residual in complex time,
//! `c(u_τ) = ü_{ττ̄} − |∂̄ u̇_τ|²_τ`, becomes `¼(ü_tt − |∂̄ u̇_t|²_t)`
//! on a real grid, and any Laplacian `Δ = ∂²/∂τ∂τ̄` of a function of `t`
//! alone is `¼ d²/dt²`.
//!
//! # ℂP¹ moment coordinate
//!
//! The S¹-invariant backend works in the Fubini–Study moment coordinate
//! `m = |z|²/(1+|z|²) ∈ [0,1]` with angle `α ∈ [0,2π)`. In these
//! coordinates `ω_FS = dm ∧ dα`, and any invariant Kähler form in the class
//! is `ρ(m) dm ∧ dα` with reduced density `ρ > 0`. Writing `s = log|z|²`
//! (so `s = w_FS'(m)`, `ds/dm = 1/μ(m)` with `μ(m) = m(1−m)`):
//!
//! * `d/ds = μ(m) d/dm`;
//! * the reduced density of `i∂∂̄u` is `(μ u_m)_m`;
//! * an invariant (0,1)-form is stored as `p(m) · ∂̄s` with `∂̄s = dz̄/z̄`,
//!   so `∂̄u ↔ p = u_s = μ u_m`;
//! * `|∂̄v|²_ω = μ v_m² / ρ`;
//! * the Fubini–Study symplectic potential is
//!   `w_FS(m) = m log m + (1−m) log(1−m)`.
//!
//! # Curvature of conformal metrics
//!
//! For a metric with Kähler form `g · i dτ∧dτ̄` on a planar domain,
//! "curvature ≤ −a" means `Δ log g ≥ a·g` with `Δ = ∂²/∂τ∂τ̄`. Under
//! this convention the Poincaré density `4/(1−|τ|²)²` of the unit disk has
//! curvature −½, and the density `(π/L)²/sin²(πx/L)` of a strip of width
//! `L` likewise has curvature −½ (they are the classical Gaussian
//! curvature −1 metrics).

/// `∂/∂τ` of an Im-independent path equals this factor times `d/dt`.
pub const TAU_FIRST_DERIVATIVE: f64 = 0.5;

/// `∂²/∂τ∂τ̄` of an Im-independent function equals this factor times `d²/dt²`.
pub const TAU_LAPLACE_FACTOR: f64 = 0.25;

/// Density factor of `i dz∧dz̄` against `dx∧dy`.
pub const IDZBAR_TO_AREA: f64 = 2.0;

/// Default relative tolerance for compatibility and positivity checks.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
