//! Leveled partitions realizing `≡_α` on tuples, Scott rank, and
//! ultrahomogeneity.
//!
//! Two engines produce the same partitions. Refinement enumerates every
//! injective tuple and is used while that stays under the tuple ceiling.
//! Past it, the game solver works up to automorphism and only the requested
//! tuple lengths are materialized.

pub mod game;
pub mod homogeneity;
pub mod naive;
pub mod refine;
pub mod tuples;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{dedupe_reduce, StructureView};
pub use game::{scott_rank_by_game, Candidate};
pub use homogeneity::{is_ultrahomogeneous, Homogeneity, PartialIsometry};
pub use naive::{naive_equivalence, NaiveBounds, NaiveOracle};
pub use refine::Level;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineLimits {
    /// Largest number of tuples held in memory at once.
    pub max_tuples: u128,
    /// Largest number of point sets visited by the symmetry search.
    pub max_sets: usize,
}

impl Default for EngineLimits {
    fn default() -> Self {
        Self {
            max_tuples: 1_000_000,
            max_sets: 200_000,
        }
    }
}

impl EngineLimits {
    /// Whether every injective tuple of an `n`-point carrier fits in memory,
    /// which is when the refinement engine is used.
    pub fn fits_refinement(&self, n: usize) -> bool {
        tuples::count_up_to(n, n) <= self.max_tuples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Refinement,
    Game,
}

/// Partitions of the injective tuples of each length `0..=max_length`, one
/// per level `0..=stabilization`. Tuples of a length are ordered
/// lexicographically and class ids follow the least member.
#[derive(Debug, Clone)]
pub struct EquivalenceFamily {
    n: usize,
    max_length: usize,
    levels: Vec<Level>,
    method: Method,
}

impl EquivalenceFamily {
    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// The Scott rank: first level at which `≡_α` implies `≡_{α+1}`.
    pub fn stabilization(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Class ids of the length-`len` tuples at `level` (clamped to the
    /// stabilization).
    pub fn partition(&self, level: usize, len: usize) -> &[u32] {
        &self.levels[level.min(self.stabilization())][len]
    }

    /// `[level][length] -> number of classes`.
    pub fn class_counts(&self) -> Vec<Vec<usize>> {
        self.levels.iter().map(refine::class_counts).collect()
    }

    /// Injective tuples of length `len`, in the order partitions use.
    pub fn tuples(&self, len: usize) -> Vec<Vec<usize>> {
        tuples::enumerate(self.n, len)
            .into_iter()
            .map(|t| t.into_iter().map(usize::from).collect())
            .collect()
    }

    /// Class of an injective tuple at `level`.
    pub fn class_of(&self, t: &[usize], level: usize) -> Result<u32> {
        if t.len() > self.max_length {
            return Err(Error::InvalidArgument(format!(
                "tuple length {} exceeds the family's maximum {}",
                t.len(),
                self.max_length
            )));
        }
        for (i, &a) in t.iter().enumerate() {
            if a >= self.n {
                return Err(Error::IndexOutOfRange { index: a, size: self.n });
            }
            if t[..i].contains(&a) {
                return Err(Error::InvalidArgument("tuple has repeated entries".into()));
            }
        }
        Ok(self.partition(level, t.len())[tuples::rank(self.n, t)])
    }

    /// Tuples with repeats are compared through their distinct supports and
    /// repeat patterns.
    pub fn are_equivalent(&self, a: &[usize], b: &[usize], alpha: usize) -> Result<bool> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        let (sa, pa) = dedupe_reduce(a);
        let (sb, pb) = dedupe_reduce(b);
        for &x in a.iter().chain(b) {
            if x >= self.n {
                return Err(Error::IndexOutOfRange { index: x, size: self.n });
            }
        }
        if pa != pb {
            return Ok(false);
        }
        Ok(self.class_of(&sa, alpha)? == self.class_of(&sb, alpha)?)
    }

    /// One more back-and-forth step applied to the last level. Only
    /// available when every tuple length is present.
    pub fn next_level(&self) -> Option<Level> {
        (self.max_length == self.n).then(|| refine::step(self.n, self.levels.last().unwrap()))
    }
}

fn refinement_fits(n: usize, limits: &EngineLimits) -> bool {
    limits.fits_refinement(n)
}

/// Partitions for tuple lengths up to `max_length` (clamped to the carrier
/// size) at every level through stabilization.
pub fn compute_family(view: &StructureView, max_length: usize, limits: EngineLimits) -> Result<EquivalenceFamily> {
    let method = if refinement_fits(view.len(), &limits) {
        Method::Refinement
    } else {
        Method::Game
    };
    compute_family_using(view, max_length, method, limits)
}

/// [`compute_family`] with the engine chosen by the caller.
pub fn compute_family_using(
    view: &StructureView,
    max_length: usize,
    method: Method,
    limits: EngineLimits,
) -> Result<EquivalenceFamily> {
    let n = view.len();
    if max_length == 0 && n > 0 {
        return Err(Error::InvalidArgument("maximum tuple length must be at least 1".into()));
    }
    let max_length = max_length.min(n);
    if method == Method::Refinement {
        if !refinement_fits(n, &limits) {
            return Err(Error::Resource {
                what: "tuples",
                needed: tuples::count_up_to(n, n),
                limit: limits.max_tuples,
            });
        }
        let mut levels = refine::refine_all(view);
        for level in &mut levels {
            level.truncate(max_length + 1);
        }
        return Ok(EquivalenceFamily {
            n,
            max_length,
            levels,
            method: Method::Refinement,
        });
    }
    let (rank, _) = scott_rank_by_game(view, limits.max_sets)?;
    let levels = game::game_levels(view, max_length, rank, limits.max_tuples)?;
    Ok(EquivalenceFamily {
        n,
        max_length,
        levels,
        method: Method::Game,
    })
}

pub fn scott_rank(view: &StructureView, limits: EngineLimits) -> Result<usize> {
    if refinement_fits(view.len(), &limits) {
        return Ok(refine::refine_all(view).len() - 1);
    }
    Ok(scott_rank_by_game(view, limits.max_sets)?.0)
}

pub fn are_equivalent(
    view: &StructureView,
    a: &[usize],
    b: &[usize],
    alpha: usize,
    limits: EngineLimits,
) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    view.check_tuple(a)?;
    view.check_tuple(b)?;
    let support = dedupe_reduce(a).0.len().max(1);
    compute_family(view, support, limits)?.are_equivalent(a, b, alpha)
}
