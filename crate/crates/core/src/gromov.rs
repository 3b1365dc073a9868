//! Distance-matrix invariants of finite metric spaces: the sets `D_n(X)`,
//! max-norm formulas, existential-positive comparison, isometric embeddings
//! and ε-nets. Everything is exact over the rationals.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::FiniteMetricSpace;

/// A square rational matrix, stored row-major. Matrices read off a tuple are
/// symmetric with zero diagonal; formula targets need not be.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DistanceMatrix {
    order: usize,
    entries: Vec<Rational>,
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let order = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != order) {
            return Err(crate::error::ValidationError::NotSquare {
                row: i,
                len: r.len(),
                expected: order,
            }
            .into());
        }
        Ok(Self {
            order,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| Rational::integer(v)).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.order + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.order.max(1)).map(|r| r.to_vec()).collect()
    }
}

impl fmt::Display for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The matrix `d(t_i, t_j)`; repeats allowed.
pub fn distance_matrix(space: &FiniteMetricSpace, t: &[usize]) -> Result<DistanceMatrix> {
    space.check_tuple(t)?;
    Ok(matrix_unchecked(space, t))
}

fn matrix_unchecked(space: &FiniteMetricSpace, t: &[usize]) -> DistanceMatrix {
    DistanceMatrix {
        order: t.len(),
        entries: t
            .iter()
            .flat_map(|&a| t.iter().map(move |&b| space.dist(a, b).clone()))
            .collect(),
    }
}

pub fn max_norm_distance(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<Rational> {
    if a.order != b.order {
        return Err(Error::LengthMismatch(a.order, b.order));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rational::zero))
}

/// A deduplicated, sorted set of matrices of one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixSet {
    order: usize,
    matrices: Vec<DistanceMatrix>,
}

impl MatrixSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DistanceMatrix] {
        &self.matrices
    }

    pub fn contains(&self, m: &DistanceMatrix) -> bool {
        self.matrices.binary_search(m).is_ok()
    }

    /// One block per matrix, blocks separated by a blank line.
    pub fn to_text_blocks(&self) -> String {
        let blocks: Vec<String> = self.matrices.iter().map(|m| m.to_string()).collect();
        blocks.join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GromovLimits {
    /// Largest number of tuples enumerated by one call.
    pub max_tuples: u128,
}

impl Default for GromovLimits {
    fn default() -> Self {
        Self { max_tuples: 2_000_000 }
    }
}

fn guard(counts: &[(usize, usize)], limits: &GromovLimits) -> Result<()> {
    let needed = counts.iter().fold(0u128, |acc, &(m, n)| {
        acc.saturating_add((m as u128).checked_pow(n as u32).unwrap_or(u128::MAX))
    });
    if needed > limits.max_tuples {
        return Err(Error::Resource {
            what: "tuples of the carrier power",
            needed,
            limit: limits.max_tuples,
        });
    }
    Ok(())
}

/// Calls `f` on every tuple in `{0..m}^n`, in lexicographic order.
fn for_each_tuple(m: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if m == 0 && n > 0 {
        return;
    }
    let mut t = vec![0usize; n];
    loop {
        f(&t);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < m {
                break;
            }
            t[i] = 0;
        }
    }
}

/// `D_n(X)`: distance matrices of all tuples in `X^n`.
pub fn dn_set(space: &FiniteMetricSpace, n: usize, limits: GromovLimits) -> Result<MatrixSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    guard(&[(space.len(), n)], &limits)?;
    let mut set = BTreeSet::new();
    for_each_tuple(space.len(), n, |t| {
        set.insert(matrix_unchecked(space, t));
    });
    Ok(MatrixSet {
        order: n,
        matrices: set.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

/// The first order at which the matrix sets differ, with a matrix found on
/// one side only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DnDifference {
    pub n: usize,
    pub only_in: Side,
    pub matrix: DistanceMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DnComparison {
    pub equal: bool,
    pub first_difference: Option<DnDifference>,
}

pub fn compare_dn(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    max_n: usize,
    limits: GromovLimits,
) -> Result<DnComparison> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("maximum order must be at least 1".into()));
    }
    for n in 1..=max_n {
        let (a, b) = (dn_set(x, n, limits)?, dn_set(y, n, limits)?);
        if a == b {
            continue;
        }
        let (only_in, matrix) = match a.matrices.iter().find(|m| !b.contains(m)) {
            Some(m) => (Side::X, m.clone()),
            None => (Side::Y, b.matrices.iter().find(|m| !a.contains(m)).unwrap().clone()),
        };
        return Ok(DnComparison {
            equal: false,
            first_difference: Some(DnDifference { n, only_in, matrix }),
        });
    }
    Ok(DnComparison {
        equal: true,
        first_difference: None,
    })
}

/// The positive formula "`‖D(x̄) − A‖ < p`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaSpec {
    a: DistanceMatrix,
    p: Rational,
}

impl FormulaSpec {
    pub fn new(a: DistanceMatrix, p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {p}")));
        }
        Ok(Self { a, p })
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.a
    }

    pub fn tolerance(&self) -> &Rational {
        &self.p
    }
}

pub fn eval_phi(space: &FiniteMetricSpace, spec: &FormulaSpec, t: &[usize]) -> Result<bool> {
    if t.len() != spec.a.order {
        return Err(Error::LengthMismatch(t.len(), spec.a.order));
    }
    Ok(max_norm_distance(&distance_matrix(space, t)?, &spec.a)? < spec.p)
}

fn within(a: &DistanceMatrix, b: &DistanceMatrix, eps: &Rational) -> bool {
    if eps.is_zero() {
        a == b
    } else {
        a.entries.iter().zip(&b.entries).all(|(x, y)| (x - y).abs() < *eps)
    }
}

/// Matrices `D(anchor ⌢ t)` for all `t` in `X^n`.
fn anchored_matrices(space: &FiniteMetricSpace, anchor: &[usize], n: usize) -> Vec<DistanceMatrix> {
    let mut out = Vec::new();
    let mut full = anchor.to_vec();
    for_each_tuple(space.len(), n, |t| {
        full.truncate(anchor.len());
        full.extend_from_slice(t);
        out.push(matrix_unchecked(space, &full));
    });
    out.sort();
    out.dedup();
    out
}

/// Whether every anchored `n`-tuple of each space is matched within `eps`
/// (exactly, when `eps` is 0) by one of the other space, in both directions.
pub fn ep_equivalent(
    x: &FiniteMetricSpace,
    anchor_a: &[usize],
    y: &FiniteMetricSpace,
    anchor_b: &[usize],
    n: usize,
    eps: &Rational,
    limits: GromovLimits,
) -> Result<bool> {
    if anchor_a.len() != anchor_b.len() {
        return Err(Error::LengthMismatch(anchor_a.len(), anchor_b.len()));
    }
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {eps}")));
    }
    x.check_tuple(anchor_a)?;
    y.check_tuple(anchor_b)?;
    guard(&[(x.len(), n), (y.len(), n)], &limits)?;
    let from_x = anchored_matrices(x, anchor_a, n);
    let from_y = anchored_matrices(y, anchor_b, n);
    let covers = |src: &[DistanceMatrix], dst: &[DistanceMatrix]| {
        src.iter().all(|m| {
            if eps.is_zero() {
                dst.binary_search(m).is_ok()
            } else {
                dst.iter().any(|o| within(m, o, eps))
            }
        })
    };
    Ok(covers(&from_x, &from_y) && covers(&from_y, &from_x))
}

/// A distance-preserving injection, `map[i]` being the image of point `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn is_isometric_into(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
        let m = &self.map;
        m.len() == x.len()
            && m.iter().all(|&b| b < y.len())
            && (0..m.len()).all(|i| (0..m.len()).all(|j| x.dist(i, j) == y.dist(m[i], m[j])))
    }
}

fn sorted_rows(space: &FiniteMetricSpace) -> Vec<Vec<Rational>> {
    space
        .matrix()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.sort();
            r
        })
        .collect()
}

/// Whether the sorted list `small` is a sub-multiset of the sorted list `big`.
fn sub_multiset(small: &[Rational], big: &[Rational]) -> bool {
    let mut j = 0;
    for v in small {
        while j < big.len() && big[j] < *v {
            j += 1;
        }
        if j == big.len() || big[j] != *v {
            return false;
        }
        j += 1;
    }
    true
}

/// Exhaustive backtracking for an isometric embedding of `x` into `y` that
/// sends `anchor_a[i]` to `anchor_b[i]`. `None` means no such embedding exists.
pub fn find_isometric_embedding(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    anchor_a: &[usize],
    anchor_b: &[usize],
) -> Result<Option<Embedding>> {
    if anchor_a.len() != anchor_b.len() {
        return Err(Error::LengthMismatch(anchor_a.len(), anchor_b.len()));
    }
    x.check_tuple(anchor_a)?;
    y.check_tuple(anchor_b)?;
    if x.len() > y.len() {
        return Ok(None);
    }
    let mut map = vec![usize::MAX; x.len()];
    let mut used = vec![false; y.len()];
    for (&a, &b) in anchor_a.iter().zip(anchor_b) {
        if map[a] == usize::MAX {
            if used[b] {
                return Ok(None);
            }
            map[a] = b;
            used[b] = true;
        } else if map[a] != b {
            return Ok(None);
        }
    }
    let fixed: Vec<usize> = (0..x.len()).filter(|&i| map[i] != usize::MAX).collect();
    if fixed
        .iter()
        .any(|&i| fixed.iter().any(|&j| x.dist(i, j) != y.dist(map[i], map[j])))
    {
        return Ok(None);
    }
    let rows_x = sorted_rows(x);
    let rows_y = sorted_rows(y);
    let order: Vec<usize> = (0..x.len()).filter(|&i| map[i] == usize::MAX).collect();

    struct Search<'s> {
        x: &'s FiniteMetricSpace,
        y: &'s FiniteMetricSpace,
        rows_x: Vec<Vec<Rational>>,
        rows_y: Vec<Vec<Rational>>,
        order: Vec<usize>,
        map: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn go(&mut self, k: usize) -> bool {
            let Some(&i) = self.order.get(k) else {
                return true;
            };
            for c in 0..self.y.len() {
                if self.used[c] || !sub_multiset(&self.rows_x[i], &self.rows_y[c]) {
                    continue;
                }
                let fits = (0..self.x.len())
                    .filter(|&j| self.map[j] != usize::MAX)
                    .all(|j| self.x.dist(i, j) == self.y.dist(c, self.map[j]));
                if !fits {
                    continue;
                }
                self.map[i] = c;
                self.used[c] = true;
                if self.go(k + 1) {
                    return true;
                }
                self.map[i] = usize::MAX;
                self.used[c] = false;
            }
            false
        }
    }

    let mut s = Search {
        x,
        y,
        rows_x,
        rows_y,
        order,
        map,
        used,
    };
    Ok(s.go(0).then(|| Embedding { map: s.map }))
}

/// Equal sizes plus an embedding; for finite spaces the embedding is onto.
pub fn is_isometric(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    x.len() == y.len()
        && find_isometric_embedding(x, y, &[], &[])
            .expect("empty anchors")
            .is_some()
}

/// Greedy net, scanning points by index: a point joins when no chosen point
/// lies strictly within `eps` of it.
pub fn epsilon_net(space: &FiniteMetricSpace, eps: &Rational) -> Result<Vec<usize>> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {eps}")));
    }
    let mut net: Vec<usize> = Vec::new();
    for i in 0..space.len() {
        if !net.iter().any(|&c| space.dist(c, i) < eps) {
            net.push(i);
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap()
    }

    fn eq3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integers(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap()
    }

    fn two(d: Rational) -> FiniteMetricSpace {
        FiniteMetricSpace::new(vec![vec![Rational::zero(), d.clone()], vec![d, Rational::zero()]], None).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn one() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integers(&[&[0]]).unwrap()
    }

    #[test]
    fn matrices_read_off() {
        assert_eq!(distance_matrix(&p3(), &[1]).unwrap(), DistanceMatrix::from_integers(&[&[0]]).unwrap());
        let m = distance_matrix(&two(r("3/2")), &[0, 1]).unwrap();
        assert_eq!(m.to_string(), "0 3/2\n3/2 0\n");
        assert_eq!(
            distance_matrix(&p3(), &[0, 2, 1]).unwrap(),
            DistanceMatrix::from_integers(&[&[0, 2, 1], &[2, 0, 1], &[1, 1, 0]]).unwrap()
        );
    }

    #[test]
    fn norm_examples() {
        let a = DistanceMatrix::from_integers(&[&[0, 1], &[1, 0]]).unwrap();
        let b = distance_matrix(&two(r("3/2")), &[0, 1]).unwrap();
        assert_eq!(max_norm_distance(&a, &a).unwrap(), Rational::zero());
        assert_eq!(max_norm_distance(&a, &b).unwrap(), r("1/2"));
        let z = DistanceMatrix::from_integers(&[&[0]]).unwrap();
        assert_eq!(max_norm_distance(&z, &z).unwrap(), Rational::zero());
        assert!(matches!(max_norm_distance(&a, &z), Err(Error::LengthMismatch(2, 1))));
    }

    #[test]
    fn dn_examples() {
        let lim = GromovLimits::default();
        let s = dn_set(&two(Rational::one()), 2, lim).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_text_blocks(), "0 0\n0 0\n\n0 1\n1 0\n");
        assert_eq!(dn_set(&p3(), 1, lim).unwrap().len(), 1);
        let s = dn_set(&p3(), 2, lim).unwrap();
        let expected: Vec<DistanceMatrix> = [0, 1, 2]
            .iter()
            .map(|&d| DistanceMatrix::from_integers(&[&[0, d], &[d, 0]]).unwrap())
            .collect();
        assert_eq!(s.matrices(), expected.as_slice());
        assert!(matches!(
            dn_set(&p3(), 20, lim),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn compare_examples() {
        let lim = GromovLimits::default();
        let relabeled = p3().permuted(&[2, 0, 1]);
        assert!(compare_dn(&p3(), &relabeled, 3, lim).unwrap().equal);
        let c = compare_dn(&p3(), &eq3(), 2, lim).unwrap();
        let d = c.first_difference.unwrap();
        assert_eq!((d.n, d.only_in), (2, Side::X));
        assert_eq!(d.matrix, DistanceMatrix::from_integers(&[&[0, 2], &[2, 0]]).unwrap());
        assert!(compare_dn(&one(), &one(), 1, lim).unwrap().equal);
    }

    #[test]
    fn phi_examples() {
        let a = DistanceMatrix::from_integers(&[&[0, 1], &[1, 0]]).unwrap();
        let s = two(r("5/4"));
        assert!(eval_phi(&s, &FormulaSpec::new(a.clone(), r("1/2")).unwrap(), &[0, 1]).unwrap());
        assert!(!eval_phi(&s, &FormulaSpec::new(a, r("1/4")).unwrap(), &[0, 1]).unwrap());
        let z = DistanceMatrix::from_integers(&[&[0]]).unwrap();
        assert!(eval_phi(&p3(), &FormulaSpec::new(z.clone(), Rational::one()).unwrap(), &[2]).unwrap());
        assert!(FormulaSpec::new(z, Rational::zero()).is_err());
    }

    #[test]
    fn ep_examples() {
        let lim = GromovLimits::default();
        let zero = Rational::zero();
        assert!(ep_equivalent(&p3(), &[0], &p3(), &[2], 2, &zero, lim).unwrap());
        assert!(!ep_equivalent(&p3(), &[0], &p3(), &[1], 1, &zero, lim).unwrap());
        for n in 0..4 {
            assert!(ep_equivalent(&p3(), &[], &p3(), &[], n, &zero, lim).unwrap());
        }
        // A tolerance of 2 hides the missing distance-2 pair.
        assert!(ep_equivalent(&p3(), &[], &eq3(), &[], 2, &r("2"), lim).unwrap());
        assert!(!ep_equivalent(&p3(), &[], &eq3(), &[], 2, &r("1"), lim).unwrap());
    }

    #[test]
    fn embedding_examples() {
        let e = find_isometric_embedding(&two(Rational::one()), &eq3(), &[], &[]).unwrap().unwrap();
        assert!(e.is_isometric_into(&two(Rational::one()), &eq3()));
        assert!(find_isometric_embedding(&p3(), &eq3(), &[], &[]).unwrap().is_none());
        let e = find_isometric_embedding(&p3(), &p3(), &[0], &[2]).unwrap().unwrap();
        assert_eq!(e.map, vec![2, 1, 0]);
        assert!(find_isometric_embedding(&p3(), &p3(), &[0], &[1]).unwrap().is_none());
        assert!(find_isometric_embedding(&p3(), &p3(), &[0, 0], &[0, 2]).unwrap().is_none());
    }

    #[test]
    fn isometry_examples() {
        assert!(is_isometric(&p3(), &p3().permuted(&[1, 2, 0])));
        assert!(!is_isometric(&p3(), &eq3()));
        assert!(!is_isometric(&two(Rational::one()), &two(r("2"))));
    }

    #[test]
    fn net_examples() {
        assert_eq!(epsilon_net(&eq3(), &r("2")).unwrap(), vec![0]);
        assert_eq!(epsilon_net(&eq3(), &r("1/2")).unwrap(), vec![0, 1, 2]);
        assert_eq!(epsilon_net(&p3(), &r("3/2")).unwrap(), vec![0, 2]);
        assert!(epsilon_net(&p3(), &Rational::zero()).is_err());
    }

    fn matrix(order: usize) -> impl Strategy<Value = DistanceMatrix> {
        proptest::collection::vec((-20i64..20, 1i64..6), order * order).prop_map(move |v| DistanceMatrix {
            order,
            entries: v.into_iter().map(|(p, q)| Rational::new(p, q)).collect(),
        })
    }

    proptest! {
        #[test]
        fn max_norm_is_a_metric(a in matrix(3), b in matrix(3), c in matrix(3)) {
            let ab = max_norm_distance(&a, &b).unwrap();
            prop_assert_eq!(&ab, &max_norm_distance(&b, &a).unwrap());
            prop_assert_eq!(ab.is_zero(), a == b);
            let ac = max_norm_distance(&a, &c).unwrap();
            let cb = max_norm_distance(&c, &b).unwrap();
            prop_assert!(ab <= &ac + &cb);
        }

        #[test]
        fn phi_monotone_in_tolerance(a in matrix(2), p in 1i64..40, extra in 1i64..40, x in 0usize..3, y in 0usize..3) {
            let lo = Rational::new(p, 4);
            let hi = &lo + &Rational::new(extra, 4);
            let holds_lo = eval_phi(&p3(), &FormulaSpec::new(a.clone(), lo).unwrap(), &[x, y]).unwrap();
            let holds_hi = eval_phi(&p3(), &FormulaSpec::new(a, hi).unwrap(), &[x, y]).unwrap();
            prop_assert!(!holds_lo || holds_hi);
        }
    }
}
