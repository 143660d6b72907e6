//! Exact symbolic engine for family Seiberg–Witten wall-crossing
//! computations: truncated graded rings, K-theory of virtual bundles,
//! Hirzebruch surface cohomology, switching formulas and admissible graph
//! orders.

pub mod adgraph;
pub mod afsw;
pub mod dsl;
pub mod error;
pub mod exactring;
pub mod hirzebruch;
pub mod kcalc;
pub mod sweep;
pub mod switch;

pub use error::{Error, Result};
pub use exactring::{fmt_rational, rat, GradedClass, Rational, Ring};
pub use kcalc::{BundleSymbol, ChernModel, KClass, Twist};
