//! Automorphism search by individualization and color refinement.
//!
//! Everything here works on a single [`StructureView`]: the search looks for
//! a permutation of the carrier that preserves every atom code and maps one
//! vertex coloring onto another.

use std::collections::HashMap;

use crate::space::StructureView;

const INDIVIDUAL: u32 = 1 << 24;

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Refines the joint coloring of two copies of the structure (side A is
/// `colors[..n]`, side B is `colors[n..]`) to a stable one.
/// Returns `false` as soon as some color has different sizes on the sides.
///
/// Neighborhoods are summarized by a sum of hashes. A collision can only
/// leave the coloring coarser; every step is still a function of
/// isomorphism-invariant data, which is all the callers rely on.
fn refine(view: &StructureView, colors: &mut [u32]) -> bool {
    let n = view.len();
    let mut classes = count_classes(colors);
    let mut sigs: Vec<(u32, u64)> = vec![(0, 0); 2 * n];
    loop {
        for (v, sig) in sigs.iter_mut().enumerate() {
            let (side, i) = (v / n, v % n);
            let h = (0..n).fold(0u64, |acc, z| {
                let key = mix(mix(u64::from(view.code(i, z))) ^ u64::from(view.code(z, i)));
                acc.wrapping_add(mix(key ^ u64::from(colors[side * n + z])))
            });
            *sig = (colors[v], h);
        }
        let mut sorted = sigs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for (v, s) in sigs.iter().enumerate() {
            colors[v] = sorted.binary_search(s).unwrap() as u32;
        }
        if !balanced(colors, n) {
            return false;
        }
        let now = sorted.len();
        if now == classes {
            return true;
        }
        classes = now;
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn balanced(colors: &[u32], n: usize) -> bool {
    let mut a = colors[..n].to_vec();
    let mut b = colors[n..].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn search(view: &StructureView, mut colors: Vec<u32>) -> Option<Vec<usize>> {
    let n = view.len();
    if !refine(view, &mut colors) {
        return None;
    }
    let mut members: HashMap<u32, Vec<usize>> = HashMap::new();
    for (v, &c) in colors[..n].iter().enumerate() {
        members.entry(c).or_default().push(v);
    }
    let target = members
        .iter()
        .filter(|(_, vs)| vs.len() > 1)
        .min_by_key(|(c, vs)| (vs.len(), **c))
        .map(|(c, vs)| (*c, vs[0]));
    match target {
        None => {
            let mut g = vec![usize::MAX; n];
            for (i, gi) in g.iter_mut().enumerate() {
                *gi = (0..n).find(|&j| colors[n + j] == colors[i])?;
            }
            is_automorphism(view, &g).then_some(g)
        }
        Some((color, x)) => {
            let fresh = colors.iter().copied().max().unwrap_or(0) + 1;
            for y in (0..n).filter(|&y| colors[n + y] == color) {
                let mut next = colors.clone();
                next[x] = fresh;
                next[n + y] = fresh;
                if let Some(g) = search(view, next) {
                    return Some(g);
                }
            }
            None
        }
    }
}

pub fn is_automorphism(view: &StructureView, g: &[usize]) -> bool {
    let n = view.len();
    g.len() == n
        && {
            let mut seen = vec![false; n];
            g.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
        }
        && (0..n).all(|i| (0..n).all(|j| view.code(i, j) == view.code(g[i], g[j])))
}

fn base_colors(view: &StructureView) -> Vec<u32> {
    let n = view.len();
    (0..2 * n).map(|v| view.code(v % n, v % n)).collect()
}

/// An automorphism `g` with `g(dom[i]) = img[i]` for all `i`, if one exists.
pub fn extend_to_automorphism(
    view: &StructureView,
    dom: &[usize],
    img: &[usize],
) -> Option<Vec<usize>> {
    assert_eq!(dom.len(), img.len());
    if !view.same_atoms(dom, img) {
        return None;
    }
    let n = view.len();
    let mut colors = base_colors(view);
    for (k, (&a, &b)) in dom.iter().zip(img).enumerate() {
        colors[a] = INDIVIDUAL + k as u32;
        colors[n + b] = INDIVIDUAL + k as u32;
    }
    search(view, colors)
}

/// An automorphism mapping the point set `from` onto the point set `to`.
pub fn map_set(view: &StructureView, from: &[usize], to: &[usize]) -> Option<Vec<usize>> {
    if from.len() != to.len() {
        return None;
    }
    let n = view.len();
    let mut colors = base_colors(view);
    for &a in from {
        colors[a] += INDIVIDUAL;
    }
    for &b in to {
        colors[n + b] += INDIVIDUAL;
    }
    search(view, colors)
}

/// A hashable invariant of a point set under automorphisms: equal sets up to
/// automorphism always share it.
pub fn set_invariant(view: &StructureView, set: &[usize]) -> Vec<u32> {
    let n = view.len();
    let mut colors = base_colors(view);
    for &a in set {
        colors[a] += INDIVIDUAL;
        colors[n + a] += INDIVIDUAL;
    }
    let ok = refine(view, &mut colors);
    debug_assert!(ok);
    let mut inv: Vec<u32> = set.iter().map(|&a| colors[a]).collect();
    inv.sort_unstable();
    let mut all = colors[..n].to_vec();
    all.sort_unstable();
    inv.push(u32::MAX);
    inv.extend(all);
    inv
}

/// Orbits of the pointwise stabilizer of `fixed`, as an orbit id per point
/// (ids are the least member of each orbit).
pub fn stabilizer_orbits(view: &StructureView, fixed: &[usize]) -> Vec<usize> {
    let n = view.len();
    let mut colors = base_colors(view);
    for (k, &a) in fixed.iter().enumerate() {
        colors[a] = INDIVIDUAL + k as u32;
        colors[n + a] = INDIVIDUAL + k as u32;
    }
    let ok = refine(view, &mut colors);
    debug_assert!(ok);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut reps: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut dom = fixed.to_vec();
    let mut img = fixed.to_vec();
    for v in 0..n {
        let bucket = reps.entry(colors[v]).or_default();
        let root = find(&mut parent, v);
        let mut merged = bucket.iter().any(|&r| find(&mut parent, r) == root);
        for &r in bucket.iter().take_while(|_| !merged) {
            dom.push(r);
            img.push(v);
            let g = extend_to_automorphism(view, &dom, &img);
            dom.pop();
            img.pop();
            if let Some(g) = g {
                // `g` fixes `fixed` pointwise, so all its cycles lie in orbits.
                for (a, &b) in g.iter().enumerate() {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                merged = true;
                break;
            }
        }
        if !merged {
            bucket.push(v);
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// A strong generating set of the automorphism group with its order.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    pub generators: Vec<Vec<usize>>,
    /// Product of the basic orbit lengths.
    pub order: u128,
}

pub fn automorphism_group(view: &StructureView) -> AutomorphismGroup {
    let n = view.len();
    let mut generators = Vec::new();
    let mut order: u128 = 1;
    let mut base: Vec<usize> = Vec::new();
    for b in 0..n {
        let orbit = stabilizer_orbits(view, &base);
        let mut len = 0u128;
        for c in (0..n).filter(|&c| orbit[c] == orbit[b]) {
            len += 1;
            if c == b {
                continue;
            }
            let mut dom = base.clone();
            let mut img = base.clone();
            dom.push(b);
            img.push(c);
            let g = extend_to_automorphism(view, &dom, &img).expect("same orbit");
            generators.push(g);
        }
        order = order.saturating_mul(len);
        base.push(b);
        if orbit.iter().enumerate().all(|(v, &o)| o == v) {
            break;
        }
    }
    AutomorphismGroup { generators, order }
}
