//! Direct recursive evaluation of `≡_α`, used as an independent oracle.
//!
//! No canonicalization and no repeat reduction: tuples are compared exactly
//! as written. Results are memoized per `(a, b, α)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::space::StructureView;

/// Inputs beyond these bounds are refused.
#[derive(Debug, Clone, Copy)]
pub struct NaiveBounds {
    pub max_carrier: usize,
    pub max_alpha: usize,
    pub max_length: usize,
}

impl Default for NaiveBounds {
    fn default() -> Self {
        Self {
            max_carrier: 6,
            max_alpha: 6,
            max_length: 6,
        }
    }
}

pub struct NaiveOracle<'a> {
    view: &'a StructureView,
    bounds: NaiveBounds,
    memo: HashMap<(u64, u64, u8), bool>,
}

impl<'a> NaiveOracle<'a> {
    pub fn new(view: &'a StructureView, bounds: NaiveBounds) -> Result<Self> {
        if view.len() > bounds.max_carrier {
            return Err(Error::Resource {
                what: "naive oracle carrier size",
                needed: view.len() as u128,
                limit: bounds.max_carrier as u128,
            });
        }
        if bounds.max_carrier > 16 || bounds.max_length + bounds.max_alpha > 15 {
            return Err(Error::InvalidArgument(
                "oracle bounds exceed the packed tuple encoding".into(),
            ));
        }
        Ok(Self {
            view,
            bounds,
            memo: HashMap::new(),
        })
    }

    pub fn equivalent(&mut self, a: &[usize], b: &[usize], alpha: usize) -> Result<bool> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        self.view.check_tuple(a)?;
        self.view.check_tuple(b)?;
        if alpha > self.bounds.max_alpha {
            return Err(Error::Resource {
                what: "naive oracle level",
                needed: alpha as u128,
                limit: self.bounds.max_alpha as u128,
            });
        }
        if a.len() > self.bounds.max_length {
            return Err(Error::Resource {
                what: "naive oracle tuple length",
                needed: a.len() as u128,
                limit: self.bounds.max_length as u128,
            });
        }
        let a: Vec<u8> = a.iter().map(|&x| x as u8).collect();
        let b: Vec<u8> = b.iter().map(|&x| x as u8).collect();
        Ok(self.eval(&a, &b, alpha))
    }

    fn same_qf_type(&self, a: &[u8], b: &[u8]) -> bool {
        let v = self.view;
        (0..a.len()).all(|i| {
            (0..a.len()).all(|j| {
                v.code(a[i] as usize, a[j] as usize) == v.code(b[i] as usize, b[j] as usize)
            })
        })
    }

    fn eval(&mut self, a: &[u8], b: &[u8], alpha: usize) -> bool {
        // `≡_α` implies `≡_0`, and extensions never repair a type mismatch.
        if !self.same_qf_type(a, b) {
            return false;
        }
        if alpha == 0 {
            return true;
        }
        let key = (pack(a), pack(b), alpha as u8);
        if alpha > 1 {
            if let Some(&hit) = self.memo.get(&key) {
                return hit;
            }
        }
        let n = self.view.len() as u8;
        let mut ax = a.to_vec();
        let mut by = b.to_vec();
        ax.push(0);
        by.push(0);
        let last = a.len();
        let mut result = true;
        // For all x there is some y with a·x ≡_{α-1} b·y.
        'forth: for x in 0..n {
            ax[last] = x;
            for y in 0..n {
                by[last] = y;
                if self.eval(&ax, &by, alpha - 1) {
                    continue 'forth;
                }
            }
            result = false;
            break;
        }
        // For all y there is some x with a·x ≡_{α-1} b·y.
        if result {
            'back: for y in 0..n {
                by[last] = y;
                for x in 0..n {
                    ax[last] = x;
                    if self.eval(&ax, &by, alpha - 1) {
                        continue 'back;
                    }
                }
                result = false;
                break;
            }
        }
        if alpha > 1 {
            self.memo.insert(key, result);
        }
        result
    }

    /// Least `α` such that `≡_α` implies `≡_{α+1}` on every pair of tuples
    /// (repeats allowed) of length at most `max_length`.
    pub fn scott_rank(&mut self, max_length: usize) -> Result<usize> {
        let n = self.view.len();
        let mut by_len: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
        for _ in 0..max_length {
            let longer: Vec<Vec<usize>> = by_len
                .last()
                .unwrap()
                .iter()
                .flat_map(|t| {
                    (0..n).map(move |x| {
                        let mut u = t.clone();
                        u.push(x);
                        u
                    })
                })
                .collect();
            by_len.push(longer);
        }
        for alpha in 0..self.bounds.max_alpha {
            let mut stable = true;
            'outer: for ts in &by_len {
                for a in ts {
                    for b in ts {
                        if self.equivalent(a, b, alpha)? && !self.equivalent(a, b, alpha + 1)? {
                            stable = false;
                            break 'outer;
                        }
                    }
                }
            }
            if stable {
                return Ok(alpha);
            }
        }
        Err(Error::Resource {
            what: "naive oracle level",
            needed: self.bounds.max_alpha as u128 + 1,
            limit: self.bounds.max_alpha as u128,
        })
    }
}

/// Tuple entries in 4-bit digits behind a leading 1, so lengths stay
/// distinct. Carriers and lengths are bounded well inside this.
fn pack(t: &[u8]) -> u64 {
    t.iter().fold(1u64, |acc, &x| (acc << 4) | u64::from(x))
}

/// One-shot form of [`NaiveOracle::equivalent`] with default bounds.
pub fn naive_equivalence(view: &StructureView, a: &[usize], b: &[usize], alpha: usize) -> Result<bool> {
    NaiveOracle::new(view, NaiveBounds::default())?.equivalent(a, b, alpha)
}
