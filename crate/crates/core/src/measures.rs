//! Extrinsic quality: precision, recall and F-measure between a learned
//! structuring and the target one.

use crate::error::{Error, Result};
use crate::structuring::Structuring;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrinsic {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Sums `|F*(x) ∩ F_Q(x)|`, `|F_Q(x)|` and `|F*(x)|` over the elements
/// where the target is defined.
pub fn overlap_counts(target: &Structuring, learned: &Structuring) -> Result<(usize, usize, usize)> {
    check_compatible(target, learned)?;
    let (mut inter, mut learned_total, mut target_total) = (0, 0, 0);
    for (x, fs) in target.entries() {
        let fq = learned
            .get(x)
            .ok_or_else(|| Error::InvalidArgument(format!("learned structuring lacks element {x}")))?;
        inter += fs.intersection_len(fq);
        learned_total += fq.len();
        target_total += fs.len();
    }
    Ok((inter, learned_total, target_total))
}

pub fn extrinsic_measure(target: &Structuring, learned: &Structuring) -> Result<Extrinsic> {
    let (inter, learned_total, target_total) = overlap_counts(target, learned)?;
    if target_total == 0 {
        return Err(Error::EmptyInput("target structuring has no defined element".into()));
    }
    let precision = inter as f64 / learned_total as f64;
    let recall = inter as f64 / target_total as f64;
    // 2PR/(P+R) rewritten over the integer counts so equal counts give
    // bit-identical scores.
    let f_measure = 2.0 * inter as f64 / (learned_total + target_total) as f64;
    Ok(Extrinsic {
        precision,
        recall,
        f_measure,
    })
}

pub(crate) fn check_compatible(target: &Structuring, learned: &Structuring) -> Result<()> {
    if target.universe() != learned.universe() {
        return Err(Error::InvalidArgument(format!(
            "structurings over universes of size {} and {}",
            target.universe(),
            learned.universe()
        )));
    }
    Ok(())
}
