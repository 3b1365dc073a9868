//! Leveled partition refinement over all injective tuples.
//!
//! Level 0 groups tuples by their atom-code matrix. A tuple's level-(α+1)
//! class is its level-α class together with the set of level-α classes of
//! its one-point extensions. Extending by a point already in the tuple gives
//! a repeat-bearing tuple whose class is fixed by the repeat position and the
//! tuple's own level-α class, so only fresh points contribute.

use std::collections::HashMap;

use rayon::prelude::*;

use super::tuples;
use crate::space::StructureView;

/// `[length][tuple rank] -> class id`
pub type Level = Vec<Vec<u32>>;

pub(crate) fn level_zero(view: &StructureView, all: &[Vec<Vec<u8>>]) -> Level {
    all.iter()
        .map(|ts| {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            ts.iter()
                .map(|t| {
                    let key: Vec<u32> = t
                        .iter()
                        .flat_map(|&a| t.iter().map(move |&b| view.code(a as usize, b as usize)))
                        .collect();
                    let next = ids.len() as u32;
                    *ids.entry(key).or_insert(next)
                })
                .collect()
        })
        .collect()
}

/// One back-and-forth step. Class ids are assigned in order of first
/// appearance, i.e. by each class's lexicographically least tuple.
pub fn step(n: usize, prev: &Level) -> Level {
    assert_eq!(prev.len(), n + 1, "refinement needs every tuple length up to the carrier size");
    let max_len = n;
    (0..=max_len)
        .map(|k| {
            let sigs: Vec<(u32, Vec<u32>)> = (0..prev[k].len())
                .into_par_iter()
                .map(|r| {
                    let own = prev[k][r];
                    if k == max_len {
                        return (own, Vec::new());
                    }
                    let fresh = n - k;
                    let mut ext: Vec<u32> = prev[k + 1][r * fresh..(r + 1) * fresh].to_vec();
                    ext.sort_unstable();
                    ext.dedup();
                    (own, ext)
                })
                .collect();
            let mut ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            sigs.into_iter()
                .map(|s| {
                    let next = ids.len() as u32;
                    *ids.entry(s).or_insert(next)
                })
                .collect()
        })
        .collect()
}

pub(crate) fn class_counts(level: &Level) -> Vec<usize> {
    level
        .iter()
        .map(|cls| cls.iter().map(|&c| c as usize + 1).max().unwrap_or(0))
        .collect()
}

/// Runs refinement over every injective tuple until no class splits.
/// Returns all levels up to and including the stable one.
pub fn refine_all(view: &StructureView) -> Vec<Level> {
    let n = view.len();
    let all: Vec<Vec<Vec<u8>>> = (0..=n).map(|k| tuples::enumerate(n, k)).collect();
    let total = tuples::count_up_to(n, n);
    let mut levels = vec![level_zero(view, &all)];
    loop {
        let last = levels.last().unwrap();
        let next = step(n, last);
        if class_counts(&next) == class_counts(last) {
            break;
        }
        // Each unstable step adds at least one class; classes never exceed tuples.
        assert!((levels.len() as u128) <= total, "refinement failed to stabilize");
        levels.push(next);
    }
    levels
}
