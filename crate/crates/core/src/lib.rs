//! Kuo and Thom quantities of polynomial map germs `(R^n, 0) -> (R^p, 0)`.
//!
//! Exact rational polynomials and arc orders live in [`poly`] and [`arcs`];
//! the floating-point side (sphere scans, relative shells) in [`lojasiewicz`]
//! and [`relative`]. The `examples/` directory has one program per capability.

pub mod arcs;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod lojasiewicz;
pub mod poly;
pub mod quantities;
pub mod relative;
pub mod report;
pub mod rng;

pub use arcs::{equivalence_probe, Arc, ArcOracle, OrderLedger};
pub use error::{Error, Result};
pub use poly::{parse_poly, Order, Polynomial, Rational, UniPoly, Vars};
pub use quantities::{KuoThom, MapGerm};
pub use relative::{RelativeCondition, SigmaSet};
