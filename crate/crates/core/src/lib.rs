//! Learning pretopological propagation models.
//!
//! A propagation model is a positive DNF over neighborhood predicates
//! `q_i(A, x) = V_i(x) ∩ A ≠ ∅` (or a weighted threshold over the same
//! predicates). Given the elementary closures a model should produce, the
//! learners in [`learners`] search for such a model.

pub mod bags;
pub mod closure;
pub mod dnf;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod learners;
pub mod measures;
pub mod percolation;
pub mod set;
pub mod structuring;
pub mod weights;

pub use closure::{
    closure, closure_iterated, elementary_closures, elementary_closures_over, predicate_eval, pseudo_closure,
    pseudo_closure_dnf, pseudo_closure_weighted, Model, Propagation,
};
pub use dnf::{simplify_dnf, Clause, Dnf};
pub use error::{Error, Result};
pub use family::{NeighborhoodFamily, PredicateMask, Universe, MAX_NEIGHBORHOODS};
pub use set::ElementSet;
pub use structuring::Structuring;
pub use weights::{weights_to_dnf, WeightVector, DEFAULT_ENUMERATION_CAP};
