//! The four-element example space `{a, b, c, d}` used throughout the docs
//! and tests, with its two reference structurings.

use crate::family::{NeighborhoodFamily, Universe};
use crate::set::ElementSet;
use crate::structuring::Structuring;

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

/// Set over the four-element universe.
pub fn set(members: &[usize]) -> ElementSet {
    ElementSet::from_members(4, members.iter().copied())
}

/// Four neighborhoods over `{a, b, c, d}`.
pub fn abcd_family() -> NeighborhoodFamily {
    let universe = Universe::labelled(["a", "b", "c", "d"].map(String::from).to_vec()).expect("valid labels");
    let lists = vec![
        vec![vec![A, B], vec![A, B], vec![C], vec![B, D]],
        vec![vec![A], vec![A, B, C], vec![C], vec![C, D]],
        vec![vec![A], vec![B], vec![B, C], vec![C, D]],
        vec![vec![A, B], vec![B, C], vec![B, C], vec![D]],
    ];
    NeighborhoodFamily::new(universe, lists).expect("valid family")
}

/// Closures produced by `(q1 & q2) | q3` on [`abcd_family`].
pub fn abcd_target_linear() -> Structuring {
    Structuring::full(vec![set(&[A, B, C, D]), set(&[B, C, D]), set(&[C, D]), set(&[D])]).expect("valid")
}

/// Closures produced by `(q1 & q2) | (q3 & q4)` on [`abcd_family`]; no
/// weight vector reproduces them.
pub fn abcd_target_nonlinear() -> Structuring {
    Structuring::full(vec![set(&[A, B, C, D]), set(&[B, C, D]), set(&[C]), set(&[D])]).expect("valid")
}
