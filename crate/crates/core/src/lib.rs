//! Desk-scale numerical laboratory for geodesics in the space of Kähler metrics.
//!
//! The crate provides two model backends — a flat torus with spectral calculus
//! and an S¹-invariant ℂP¹ reduced to its moment coordinate — together with
//! the machinery built on top of them:
//!
//! * [`grid`] — manifolds, fields, discrete complex calculus, ∂∂̄-Poisson solves;
//! * [`flows`] — holomorphic vector fields, closed-form flows, contractions,
//!   the ∂̄-exactness condition and Hamiltonians;
//! * [`geodesics`] — vector-field-induced, toric (Legendre) and
//!   multidimensional geodesic paths, energies and residuals;
//! * [`measures`] — pushforward (Duistermaat–Heckman) measures, velocity
//!   range sets, convex hulls and moment images;
//! * [`kenergy`] — Monge–Ampère foliation leaves, the K-energy density Θ and
//!   its curvature bounds;
//! * [`superposition`] — averaging negatively curved conformal metrics on
//!   planar domains.
//!
//! All chart and factor conventions are collected in [`conventions`].

pub mod conventions;
pub mod error;
pub mod flows;
pub mod geodesics;
pub mod grid;
pub mod kenergy;
pub mod measures;
pub mod superposition;

pub use error::{Error, Result};
pub use grid::{Manifold, ScalarField};
