//! Symmetry-reduced evaluation of the back-and-forth game, for carriers too
//! large to enumerate every tuple.
//!
//! A pair of tuples is a partial map `p`. Its game value is the largest `α`
//! with `dom p ≡_α img p`, or infinite when `p` extends to an automorphism.
//! Finite values form an initial segment `0..=V`, so the Scott rank is
//! `V + 1` (or 0 when every partial isomorphism extends). `V` is attained
//! by a partial isomorphism all of whose restrictions extend; up to
//! automorphisms such a map is the identity on a set `D` plus one pair
//! `x ↦ y`, and `x`, `y` are in one orbit of the pointwise stabilizer of
//! `D \ {z}` for every `z ∈ D`. The search below walks the sets `D` up to
//! automorphism and evaluates exactly those candidates.

use std::collections::HashMap;
use std::rc::Rc;

use super::tuples;
use crate::error::{Error, Result};
use crate::space::StructureView;
use crate::symmetry;

/// Sorted by domain point.
pub type PartialMap = Vec<(u8, u8)>;

pub struct GameSolver<'a> {
    view: &'a StructureView,
    n: usize,
    extendable: HashMap<PartialMap, bool>,
    /// Known `(holds up to, fails from)` bounds per map.
    bounds: HashMap<PartialMap, (u32, u32)>,
    orbits: HashMap<Vec<u8>, Rc<Vec<usize>>>,
}

impl<'a> GameSolver<'a> {
    pub fn new(view: &'a StructureView) -> Self {
        assert!(view.len() <= u8::MAX as usize, "carrier too large for the game solver");
        Self {
            view,
            n: view.len(),
            extendable: HashMap::new(),
            bounds: HashMap::new(),
            orbits: HashMap::new(),
        }
    }

    pub fn view(&self) -> &StructureView {
        self.view
    }

    /// Whether adding `x ↦ y` to `p` keeps it a partial isomorphism.
    pub fn compatible(&self, p: &PartialMap, x: usize, y: usize) -> bool {
        let v = self.view;
        if v.code(x, x) != v.code(y, y) {
            return false;
        }
        p.iter().all(|&(a, b)| {
            let (a, b) = (a as usize, b as usize);
            a != x && b != y && v.code(x, a) == v.code(y, b) && v.code(a, x) == v.code(b, y)
        })
    }

    pub fn is_extendable(&mut self, p: &PartialMap) -> bool {
        if let Some(&hit) = self.extendable.get(p) {
            return hit;
        }
        let dom: Vec<usize> = p.iter().map(|&(a, _)| a as usize).collect();
        let img: Vec<usize> = p.iter().map(|&(_, b)| b as usize).collect();
        let hit = symmetry::extend_to_automorphism(self.view, &dom, &img).is_some();
        self.extendable.insert(p.clone(), hit);
        hit
    }

    /// Orbit ids (least member) of the pointwise stabilizer of a point set.
    pub fn orbits_of(&mut self, set: &[u8]) -> Rc<Vec<usize>> {
        let mut key = set.to_vec();
        key.sort_unstable();
        if let Some(hit) = self.orbits.get(&key) {
            return hit.clone();
        }
        let fixed: Vec<usize> = key.iter().map(|&a| a as usize).collect();
        let orbits = Rc::new(symmetry::stabilizer_orbits(self.view, &fixed));
        self.orbits.insert(key, orbits.clone());
        orbits
    }

    /// `dom p ≡_t img p`; `p` must be a partial isomorphism.
    pub fn holds(&mut self, p: &PartialMap, t: u32) -> bool {
        if t == 0 {
            return true;
        }
        let (lo, hi) = self.bounds.get(p).copied().unwrap_or((0, u32::MAX));
        if t <= lo {
            return true;
        }
        if t >= hi {
            return false;
        }
        if self.is_extendable(p) {
            self.bounds.insert(p.clone(), (u32::MAX, u32::MAX));
            return true;
        }
        let result = self.holds(p, t - 1) && self.forth(p, t) && self.back(p, t);
        let entry = self.bounds.entry(p.clone()).or_insert((0, u32::MAX));
        if result {
            entry.0 = entry.0.max(t);
        } else {
            entry.1 = entry.1.min(t);
        }
        result
    }

    fn sides(&mut self, p: &PartialMap) -> (Rc<Vec<usize>>, Rc<Vec<usize>>) {
        let dom: Vec<u8> = p.iter().map(|&(a, _)| a).collect();
        let img: Vec<u8> = p.iter().map(|&(_, b)| b).collect();
        (self.orbits_of(&dom), self.orbits_of(&img))
    }

    fn forth(&mut self, p: &PartialMap, t: u32) -> bool {
        let (dom_orbits, img_orbits) = self.sides(p);
        let in_dom = |x: usize| p.iter().any(|&(a, _)| a as usize == x);
        let in_img = |y: usize| p.iter().any(|&(_, b)| b as usize == y);
        for x in (0..self.n).filter(|&x| !in_dom(x) && dom_orbits[x] == x) {
            let answered = (0..self.n)
                .filter(|&y| !in_img(y) && img_orbits[y] == y)
                .any(|y| self.compatible(p, x, y) && self.holds(&with_pair(p, x, y), t - 1));
            if !answered {
                return false;
            }
        }
        true
    }

    fn back(&mut self, p: &PartialMap, t: u32) -> bool {
        let (dom_orbits, img_orbits) = self.sides(p);
        let in_dom = |x: usize| p.iter().any(|&(a, _)| a as usize == x);
        let in_img = |y: usize| p.iter().any(|&(_, b)| b as usize == y);
        for y in (0..self.n).filter(|&y| !in_img(y) && img_orbits[y] == y) {
            let answered = (0..self.n)
                .filter(|&x| !in_dom(x) && dom_orbits[x] == x)
                .any(|x| self.compatible(p, x, y) && self.holds(&with_pair(p, x, y), t - 1));
            if !answered {
                return false;
            }
        }
        true
    }

    /// Game value of a partial isomorphism; `None` when it extends to an
    /// automorphism.
    pub fn value(&mut self, p: &PartialMap) -> Option<u32> {
        if self.is_extendable(p) {
            return None;
        }
        let mut t = 0;
        while self.holds(p, t + 1) {
            t += 1;
            assert!(t as usize <= self.n, "non-extendable map survived {t} rounds");
        }
        Some(t)
    }

    /// Game value of two tuples (repeats allowed). `Err(())` when the tuples
    /// already differ in their atoms.
    pub fn tuple_value(&mut self, a: &[usize], b: &[usize]) -> std::result::Result<Option<u32>, ()> {
        let p = partial_map(self.view, a, b).ok_or(())?;
        Ok(self.value(&p))
    }
}

/// The partial map `a_i ↦ b_i`, if it is a well-defined partial isomorphism.
pub fn partial_map(view: &StructureView, a: &[usize], b: &[usize]) -> Option<PartialMap> {
    if a.len() != b.len() || !view.same_atoms(a, b) {
        return None;
    }
    let mut p: PartialMap = a.iter().zip(b).map(|(&x, &y)| (x as u8, y as u8)).collect();
    p.sort_unstable();
    p.dedup();
    Some(p)
}

pub fn with_pair(p: &PartialMap, x: usize, y: usize) -> PartialMap {
    let mut q = p.clone();
    let pos = q.partition_point(|&(a, _)| (a as usize) < x);
    q.insert(pos, (x as u8, y as u8));
    q
}

fn identity_with(set: &[usize], x: usize, y: usize) -> PartialMap {
    let mut p: PartialMap = set.iter().map(|&a| (a as u8, a as u8)).collect();
    p.push((x as u8, y as u8));
    p.sort_unstable();
    p
}

/// A partial isomorphism `id_D ∪ {x ↦ y}` with its game value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub fixed: Vec<usize>,
    pub x: usize,
    pub y: usize,
    pub value: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    /// Stop at the first non-extendable partial isomorphism.
    FirstWitness,
    /// Evaluate every minimal candidate.
    MaxValue,
}

#[derive(Debug, Clone)]
pub(crate) struct SearchOutcome {
    pub best: Option<Candidate>,
}

/// Walks point sets `D` up to automorphism, growing one point at a time while
/// the pointwise stabilizer of `D` still moves some point outside `D`.
pub(crate) fn search_sets(view: &StructureView, goal: Goal, max_sets: usize) -> Result<SearchOutcome> {
    let n = view.len();
    let mut solver = GameSolver::new(view);
    let mut best: Option<Candidate> = None;
    let mut visited = 0usize;
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    let mut seen: HashMap<Vec<u32>, Vec<Vec<usize>>> = HashMap::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for set in frontier {
            visited += 1;
            let set_u8: Vec<u8> = set.iter().map(|&a| a as u8).collect();
            let orbits = solver.orbits_of(&set_u8);
            let outside: Vec<usize> = (0..n).filter(|v| !set.contains(v)).collect();
            let base: PartialMap = set.iter().map(|&a| (a as u8, a as u8)).collect();
            for (i, &x) in outside.iter().enumerate() {
                for &y in &outside[i + 1..] {
                    if orbits[x] == orbits[y] || !solver.compatible(&base, x, y) {
                        continue;
                    }
                    let p = identity_with(&set, x, y);
                    if goal == Goal::FirstWitness {
                        return Ok(SearchOutcome {
                            best: Some(Candidate {
                                fixed: set,
                                x,
                                y,
                                value: solver.value(&p).expect("not extendable"),
                            }),
                        });
                    }
                    let minimal = (0..set.len()).all(|skip| {
                        let mut smaller = set_u8.clone();
                        smaller.remove(skip);
                        let o = solver.orbits_of(&smaller);
                        o[x] == o[y]
                    });
                    if !minimal {
                        continue;
                    }
                    let value = solver.value(&p).expect("not extendable");
                    if best.as_ref().is_none_or(|b| value > b.value) {
                        best = Some(Candidate {
                            fixed: set.clone(),
                            x,
                            y,
                            value,
                        });
                    }
                }
            }
            // A point fixed by the stabilizer of `set` leaves the stabilizer
            // unchanged, so no candidate set contains it on top of `set`.
            let mut moved = vec![false; n];
            for &v in &outside {
                if orbits[v] != v {
                    moved[v] = true;
                    moved[orbits[v]] = true;
                }
            }
            for &z in outside.iter().filter(|&&z| moved[z] && orbits[z] == z) {
                let mut child = set.clone();
                child.push(z);
                child.sort_unstable();
                let key = symmetry::set_invariant(view, &child);
                let bucket = seen.entry(key).or_default();
                if bucket.iter().any(|other| symmetry::map_set(view, &child, other).is_some()) {
                    continue;
                }
                bucket.push(child.clone());
                next.push(child);
                if visited + next.len() > max_sets {
                    return Err(Error::Resource {
                        what: "point sets in the symmetry search",
                        needed: (visited + next.len()) as u128,
                        limit: max_sets as u128,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(SearchOutcome { best })
}

/// Exact Scott rank through the symmetry search.
pub fn scott_rank_by_game(view: &StructureView, max_sets: usize) -> Result<(usize, Option<Candidate>)> {
    let out = search_sets(view, Goal::MaxValue, max_sets)?;
    let rank = out.best.as_ref().map_or(0, |c| c.value as usize + 1);
    Ok((rank, out.best))
}

/// Partitions of injective tuples of length `0..=max_length` at levels
/// `0..=rank`, computed from game values between automorphism-orbit
/// representatives.
pub(crate) fn game_levels(
    view: &StructureView,
    max_length: usize,
    rank: usize,
    max_tuples: u128,
) -> Result<Vec<super::refine::Level>> {
    let n = view.len();
    let needed = tuples::count_up_to(n, max_length);
    if needed > max_tuples {
        return Err(Error::Resource {
            what: "tuples",
            needed,
            limit: max_tuples,
        });
    }
    let group = symmetry::automorphism_group(view);
    let mut solver = GameSolver::new(view);
    let all: Vec<Vec<Vec<u8>>> = (0..=max_length).map(|k| tuples::enumerate(n, k)).collect();
    let zero = super::refine::level_zero(view, &all);
    let mut levels: Vec<super::refine::Level> = vec![Vec::new(); rank + 1];
    for (k, ts) in all.iter().enumerate() {
        // Orbit representative of each tuple: the least rank in its orbit.
        let mut parent: Vec<usize> = (0..ts.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (r, t) in ts.iter().enumerate() {
            for g in &group.generators {
                let image: Vec<usize> = t.iter().map(|&a| g[a as usize]).collect();
                let s = tuples::rank(n, &image);
                let (a, b) = (find(&mut parent, r), find(&mut parent, s));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let rep: Vec<usize> = (0..ts.len()).map(|r| find(&mut parent, r)).collect();
        let mut current: Vec<u32> = zero[k].clone();
        levels[0].push(current.clone());
        let mut values: HashMap<(usize, usize), Option<u32>> = HashMap::new();
        for (alpha, level) in levels.iter_mut().enumerate().skip(1) {
            // Within each previous class, cluster orbit reps by value ≥ alpha.
            let mut clusters: HashMap<u32, Vec<usize>> = HashMap::new();
            let mut cluster_of_rep: HashMap<usize, usize> = HashMap::new();
            let mut next_id = 0usize;
            let mut raw = vec![0usize; ts.len()];
            for r in 0..ts.len() {
                let o = rep[r];
                if let Some(&c) = cluster_of_rep.get(&o) {
                    raw[r] = c;
                    continue;
                }
                let heads = clusters.entry(current[o]).or_default();
                let mut found = None;
                for &h in heads.iter() {
                    let key = (h, o);
                    let v = *values.entry(key).or_insert_with(|| {
                        let a: Vec<usize> = ts[h].iter().map(|&x| x as usize).collect();
                        let b: Vec<usize> = ts[o].iter().map(|&x| x as usize).collect();
                        solver.tuple_value(&a, &b).expect("same level-0 class")
                    });
                    if v.is_none_or(|v| v as usize >= alpha) {
                        found = Some(cluster_of_rep[&h]);
                        break;
                    }
                }
                let c = found.unwrap_or_else(|| {
                    heads.push(o);
                    next_id += 1;
                    next_id - 1
                });
                cluster_of_rep.insert(o, c);
                raw[r] = c;
            }
            let mut renumber: HashMap<usize, u32> = HashMap::new();
            current = raw
                .iter()
                .map(|c| {
                    let next = renumber.len() as u32;
                    *renumber.entry(*c).or_insert(next)
                })
                .collect();
            level.push(current.clone());
        }
    }
    Ok(levels)
}
