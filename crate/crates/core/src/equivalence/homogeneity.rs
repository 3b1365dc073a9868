//! Ultrahomogeneity: every isometry between finite subsets extends to an
//! auto-isometry.

use serde::Serialize;

use super::game::{search_sets, Goal};
use crate::error::Result;
use crate::space::{FiniteMetricSpace, StructureView};

/// A distance-preserving injection `domain[i] ↦ image[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialIsometry {
    pub domain: Vec<usize>,
    pub image: Vec<usize>,
}

impl PartialIsometry {
    pub fn is_valid(&self, space: &FiniteMetricSpace) -> bool {
        let (d, i) = (&self.domain, &self.image);
        d.len() == i.len()
            && (0..d.len()).all(|a| {
                (0..d.len()).all(|b| space.dist(d[a], d[b]) == space.dist(i[a], i[b]))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homogeneity {
    pub homogeneous: bool,
    /// An unextendable partial isometry when `homogeneous` is false.
    pub witness: Option<PartialIsometry>,
}

/// Spaces up to this size are checked by listing every partial isometry and
/// every auto-isometry outright.
pub const EXHAUSTIVE_LIMIT: usize = 6;

pub fn is_ultrahomogeneous(space: &FiniteMetricSpace, max_sets: usize) -> Result<Homogeneity> {
    if space.len() <= EXHAUSTIVE_LIMIT {
        return Ok(exhaustive(space));
    }
    // A smallest unextendable partial isometry restricts to one that extends,
    // so it is the identity on some set plus one more pair, up to
    // auto-isometries. The set search visits all of those.
    let view = StructureView::metric(space);
    let out = search_sets(&view, Goal::FirstWitness, max_sets)?;
    Ok(match out.best {
        None => Homogeneity {
            homogeneous: true,
            witness: None,
        },
        Some(c) => {
            let mut domain = c.fixed.clone();
            let mut image = c.fixed;
            domain.push(c.x);
            image.push(c.y);
            Homogeneity {
                homogeneous: false,
                witness: Some(PartialIsometry { domain, image }),
            }
        }
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Lists partial isometries by domain size, then domain, then image, and
/// reports the first one no auto-isometry agrees with.
fn exhaustive(space: &FiniteMetricSpace) -> Homogeneity {
    let n = space.len();
    let autos: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .filter(|g| (0..n).all(|i| (0..n).all(|j| space.dist(i, j) == space.dist(g[i], g[j]))))
        .collect();
    for size in 1..=n {
        let mut domains: Vec<Vec<usize>> = (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == size)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        domains.sort();
        for domain in domains {
            for image in injections(n, size) {
                let p = PartialIsometry {
                    domain: domain.clone(),
                    image,
                };
                if !p.is_valid(space) {
                    continue;
                }
                let extends = autos
                    .iter()
                    .any(|g| p.domain.iter().zip(&p.image).all(|(&a, &b)| g[a] == b));
                if !extends {
                    return Homogeneity {
                        homogeneous: false,
                        witness: Some(p),
                    };
                }
            }
        }
    }
    Homogeneity {
        homogeneous: true,
        witness: None,
    }
}

fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    super::tuples::enumerate(n, k)
        .into_iter()
        .map(|t| t.into_iter().map(usize::from).collect())
        .collect()
}
