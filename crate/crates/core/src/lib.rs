//! Twisted convolution *-algebras of finite graded groupoids, and the
//! Weyl-groupoid reconstruction of the twist from the algebra.
//!
//! The crate models a twist over a finite discrete groupoid as a pair
//! `(G, sigma)` of a [`groupoid::FiniteGroupoid`] and a normalized
//! 2-cocycle, graded by a finite group. On top of that sit the twisted
//! convolution algebra with its regular representations and reduced norm,
//! the graded Cartan verification, and the germ reconstruction that
//! certifies the isomorphism between the rebuilt twist and the input.
//!
//! All coefficient arithmetic is generic over the real scalar type through
//! [`scalar::Scalar`]; the `f64`-backed aliases below are the ones used by
//! the CLI and the verification suite.

pub mod algebra;
pub mod cartan;
pub mod cocycle;
pub mod generators;
pub mod group;
pub mod groupoid;
pub mod linalg;
pub mod rep;
pub mod scalar;
pub mod twist;
pub mod weyl;

pub use algebra::AlgebraElement;
pub use cocycle::TwoCocycle;
pub use group::{Character, FiniteGroup, GroupElem};
pub use groupoid::{ArrowId, Bisection, FiniteGroupoid, UnitId};
pub use scalar::{Scalar, Tolerances};
pub use twist::{GradedTwist, Grading};
pub use weyl::{ReconstructedTwist, RoundtripCertificate, WeylFunctional};

/// Complex coefficient type over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Complex coefficient type over `f32`.
pub type C32 = num_complex::Complex<f32>;

/// `f64`-backed graded twist.
pub type Twist64 = GradedTwist<f64>;
/// `f64`-backed algebra element.
pub type Element64 = AlgebraElement<f64>;
/// `f64`-backed cocycle.
pub type Cocycle64 = TwoCocycle<f64>;
/// `f64`-backed tolerances.
pub type Tolerances64 = Tolerances<f64>;

/// `f32`-backed graded twist.
pub type Twist32 = GradedTwist<f32>;
/// `f32`-backed algebra element.
pub type Element32 = AlgebraElement<f32>;
