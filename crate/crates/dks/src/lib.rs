//! Reasoning over normal default structures on finite information systems.
//!
//! The pieces, bottom up:
//!
//! - [`token`]: universes of named tokens and bitset token sets with a
//!   canonical listing order.
//! - [`system`]: consistency predicates (minimal forbidden sets), entailment
//!   generated from sequents, closure, states, and the structural laws a
//!   valid information system must satisfy.
//! - [`defaults`]: default rules, context-guarded expansion, extension
//!   enumeration (a guided search cross-checked by an exhaustive oracle) and
//!   the extension laws.
//! - [`nonmono`]: skeptical consequence relations in pointwise normal form,
//!   the abstract-system axioms with minimal failure witnesses, closure
//!   generation from assumption bases, and cumulativity checks.
//! - [`represent`]: the reverse direction, rebuilding a default structure
//!   from an abstract relation by adjoining label tokens, in a plain and a
//!   cumulative flavour, with verifiers for the promised invariants.
//! - [`format`]: the line-oriented text format and canonical serialization.
//! - [`sampling`]: seeded random instances for the law batteries.
//!
//! Everything enumerates honestly and is meant for desk-scale inputs; the
//! entry points that materialize a powerset take a token cap and refuse
//! larger universes rather than run forever.

pub mod defaults;
pub mod error;
pub mod format;
pub mod nonmono;
pub mod report;
pub mod represent;
pub mod sampling;
pub mod system;
pub mod token;

pub use defaults::{
    DefaultRule, DefaultStructure, Expansion, ExtensionInfo, ExtensionReport, KripkeGraph,
};
pub use error::Error;
pub use format::{load_str, serialize_abstract, serialize_representation, serialize_structure};
pub use format::{LoadResult, Loaded, ParseError};
pub use nonmono::{
    check_cautious_cut, AxiomCheck, AxiomReport, CutGap, NmRelation, Provenance, MATERIALIZE_CAP,
};
pub use report::CheckReport;
pub use represent::{
    build_cumulative, build_plain, check_conflict_compilation, label_name, verify_conservativity,
    verify_extension_shape, verify_unique_extension, Mode, RepStats, Representation, ShapeReport,
    UniqueReport, REPRESENT_CAP,
};
pub use system::{
    ConsistencyPredicate, EntailmentRelation, InformationSystem, PropertyViolation, Sequent,
    ValidationReport,
};
pub use token::{TokenId, TokenSet, TokenUniverse};
