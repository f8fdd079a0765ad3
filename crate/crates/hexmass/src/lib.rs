//! Consistent mass matrices of eight-node hexahedral finite elements.
//!
//! The crate assembles element mass matrices three ways:
//!
//! * **exactly**, by expanding the Jacobian metric symbolically and
//!   integrating in rational arithmetic ([`analysis::mass_exact`]);
//! * **conventionally**, with cubature rules on the reference cube
//!   ([`quadrature`]);
//! * **semi-analytically**, with precomputed weight tensors derived from
//!   cardinal interpolants of the metric-density product ([`semianalytic`]).
//!
//! Supporting modules provide exact polynomial algebra over natural
//! coordinates ([`poly`]), the trilinear brick geometry ([`hex8`]), mesh
//! ingestion and generation ([`mesh`]), and the accuracy/benchmark harness
//! ([`analysis`]).

pub mod analysis;
pub mod error;
pub mod hex8;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod rules;
pub mod semianalytic;

pub use analysis::{bench, error_stats, mass_exact, study, BenchRecord, ErrorReport, StudyOptions};
pub use error::{Error, Result};
pub use hex8::Hex8;
pub use mesh::{generate, mesh_validity, parse_inp, GridSpec, Mesh, MeshSpec};
pub use poly::{integrate_cube, monomial_integral, poly_mul, NaturalPoint, Polynomial3};
pub use quadrature::{apply_rule, mass_conventional, MassMatrix, QuadratureRule};
pub use rational::Rational;
pub use rules::{Rule, RuleSet, BUILTIN_RULES};
pub use semianalytic::{lump, mass_semianalytic, SemiAnalyticRule};
