//! Finite restriction categories at desk scale.
//!
//! Everything here is exhaustive and exact: categories are explicit
//! composition tables, semilattices are explicit meet tables, and every
//! axiom (R1-R4, J1-J3, RR1-RR4) is checked over all applicable tuples
//! with counterexample witnesses. The main entry points:
//!
//! - [`cat`]: finite categories, functors, monos, pullbacks.
//! - [`restriction`]: the restriction operator and its axioms, the
//!   restriction order, total maps, compatibility, inverse categories.
//! - [`semilattice`]: meet-semilattices, stable maps, open maps with
//!   local left adjoints and Frobenius reciprocity, frames,
//!   Beck-Chevalley squares.
//! - [`fundamental`]: the fundamental functor into a materialised
//!   fragment of `Stab^op`, hyperconnected/localic predicates, the
//!   (localic, hyperconnected) factorisation and its fillers.
//! - [`fibration`]: hom-poset order data, discrete fibration checks,
//!   and lifting restriction structure along local discrete fibrations.
//! - [`join`]: finite joins of compatible families, the cover topology
//!   on hom-posets, (locally) etale maps, and join lifting.
//! - [`range`]: range operators, their uniqueness, derivation from open
//!   fundamental images, and the Beck-Chevalley characterisation.
//! - [`builders`]: the standard example categories (partial functions,
//!   partial injections, spans, stable-map fragments) and a seeded
//!   generator of random closed fragments.
//! - [`doc`]: canonical text serialization for every domain object.
//! - [`suite`]: the named instance/functor suite and the selftest
//!   property battery used by the CLI.

pub mod builders;
pub mod cat;
pub mod config;
pub mod doc;
pub mod fibration;
pub mod fundamental;
pub mod join;
pub mod range;
pub mod report;
pub mod restriction;
pub mod semilattice;
pub mod suite;

pub use cat::{FinCat, FinFunctor, MorId, ObjId, Span};
pub use config::CheckConfig;
pub use report::{AxiomReport, Failure, ValidationReport};
pub use restriction::RestrictionCat;

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed data: dangling ids, wrong table sizes, mismatched endpoints.
    #[error("structural error: {0}")]
    Structural(String),
    /// An operation's precondition does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Desk-scale bounds exceeded; the message carries a size estimate.
    #[error("bounds exceeded: {0}")]
    Bounds(String),
    /// Parse error with position information.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
