//! Finite metric spaces, the two structure views, tuples and their
//! quantifier-free types, and the text format for spaces.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result, ValidationError};
use crate::rational::Rational;

/// A validated finite metric space with exact rational distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    ultrametric: bool,
}

impl FiniteMetricSpace {
    /// Checks the metric axioms and records whether the space is an
    /// ultrametric. Missing labels default to `p0..p{m-1}`.
    pub fn new(matrix: Vec<Vec<Rational>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = matrix.len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != m {
                return Err(ValidationError::NotSquare {
                    row,
                    len: r.len(),
                    expected: m,
                }
                .into());
            }
        }
        let labels = match labels {
            Some(l) if l.len() != m => {
                return Err(ValidationError::LabelCount {
                    expected: m,
                    got: l.len(),
                }
                .into())
            }
            Some(l) => l,
            None => (0..m).map(|i| format!("p{i}")).collect(),
        };
        for i in 0..m {
            if !matrix[i][i].is_zero() {
                return Err(ValidationError::NonzeroDiagonal(i).into());
            }
        }
        for i in 0..m {
            for j in 0..m {
                if matrix[i][j] != matrix[j][i] {
                    return Err(ValidationError::Asymmetric(i.min(j), i.max(j)).into());
                }
                if matrix[i][j].is_negative() {
                    return Err(ValidationError::Negative(i, j).into());
                }
                if i != j && matrix[i][j].is_zero() {
                    return Err(ValidationError::ZeroOffDiagonal(i, j).into());
                }
            }
        }
        let mut ultrametric = true;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let (ij, jk, ik) = (&matrix[i][j], &matrix[j][k], &matrix[i][k]);
                    if *ik > ij + jk {
                        return Err(ValidationError::Triangle(i, j, k).into());
                    }
                    if ik > ij.max(jk) {
                        ultrametric = false;
                    }
                }
            }
        }
        Ok(Self {
            labels,
            dist: matrix,
            ultrametric,
        })
    }

    /// Convenience constructor from integer numerator/denominator pairs
    /// given as `(n, d)`; mostly for tests.
    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        let matrix = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::integer(v)).collect())
            .collect();
        Self::new(matrix, None)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// `R_q x y`: the distance from `x` to `y` is strictly below `q`.
    pub fn satisfies_r(&self, q: &Rational, x: usize, y: usize) -> bool {
        self.dist[x][y] < *q
    }

    /// Same distances, new labels.
    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self> {
        Self::new(self.dist.clone(), Some(labels))
    }

    /// The space obtained by moving point `i` to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let m = self.len();
        assert_eq!(perm.len(), m);
        let mut dist = vec![vec![Rational::zero(); m]; m];
        let mut labels = vec![String::new(); m];
        for i in 0..m {
            labels[perm[i]] = self.labels[i].clone();
            for j in 0..m {
                dist[perm[i]][perm[j]] = self.dist[i][j].clone();
            }
        }
        Self {
            labels,
            dist,
            ultrametric: self.ultrametric,
        }
    }

    /// Renders the space in the text file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        if !self.is_empty() {
            let _ = writeln!(out, "# labels: {}", self.labels.join(" "));
        }
        let _ = writeln!(out, "{}", self.len());
        for row in &self.dist {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }

    pub fn check_tuple(&self, t: &[usize]) -> Result<()> {
        check_indices(t, self.len())
    }
}

fn check_indices(t: &[usize], size: usize) -> Result<()> {
    match t.iter().find(|&&i| i >= size) {
        Some(&index) => Err(Error::IndexOutOfRange { index, size }),
        None => Ok(()),
    }
}

/// Parses the space file format: `#` comment lines (one of which may be
/// `# labels: a b c`), then the point count, then one row of rationals per
/// line.
pub fn parse_space_file(text: &str) -> Result<FiniteMetricSpace> {
    let mut labels: Option<Vec<String>> = None;
    let mut count: Option<usize> = None;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(rest) = comment.trim().strip_prefix("labels:") {
                labels = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match count {
            None => {
                if tokens.len() != 1 {
                    return Err(syntax("expected the point count alone on its line".into()));
                }
                let m = tokens[0]
                    .parse::<usize>()
                    .map_err(|_| syntax(format!("invalid point count `{}`", tokens[0])))?;
                count = Some(m);
            }
            Some(m) => {
                if rows.len() == m {
                    return Err(syntax(format!("unexpected data after {m} rows")));
                }
                if tokens.len() != m {
                    return Err(syntax(format!(
                        "row has {} entries, expected {m}",
                        tokens.len()
                    )));
                }
                let row = tokens
                    .iter()
                    .map(|t| {
                        t.parse::<Rational>()
                            .map_err(|_| syntax(format!("invalid rational `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
    }
    let Some(m) = count else {
        return Err(Error::Syntax {
            line: last_line.max(1),
            message: "missing point count".into(),
        });
    };
    if rows.len() != m {
        return Err(Error::Syntax {
            line: last_line.max(1),
            message: format!("expected {m} rows, found {}", rows.len()),
        });
    }
    FiniteMetricSpace::new(rows, labels)
}

/// Which signature a structure is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewKind {
    /// Distance relations `R_q`.
    Metric,
    /// A unary predecessor function, read as the relation `f(x) = y`.
    Function,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum AtomicData {
    Metric { distances: Vec<Rational> },
    Function { parent: Vec<usize> },
}

/// A finite structure in one of the two signatures.
///
/// Every ordered pair of points carries an atom code. Two tuples satisfy the
/// same atomic formulas exactly when their code matrices agree, and the
/// code of a pair says whether its points are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureView {
    kind: ViewKind,
    labels: Vec<String>,
    n: usize,
    codes: Vec<u32>,
    data: AtomicData,
}

impl StructureView {
    /// Metric view: code `c` stands for the `c`-th smallest distance, code 0
    /// being distance zero.
    pub fn metric(space: &FiniteMetricSpace) -> Self {
        let n = space.len();
        let mut distinct: Vec<Rational> = space.matrix().iter().flatten().cloned().collect();
        distinct.push(Rational::zero());
        distinct.sort();
        distinct.dedup();
        let index: BTreeMap<&Rational, u32> = distinct
            .iter()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        let mut codes = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                codes[i * n + j] = index[space.dist(i, j)];
            }
        }
        Self {
            kind: ViewKind::Metric,
            labels: space.labels().to_vec(),
            n,
            codes,
            data: AtomicData::Metric {
                distances: distinct,
            },
        }
    }

    /// Function view from a total predecessor map. Bit 0 of a code is
    /// equality, bit 1 is `f(x) = y`.
    pub fn function(parent: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let n = parent.len();
        if labels.len() != n {
            return Err(ValidationError::LabelCount {
                expected: n,
                got: labels.len(),
            }
            .into());
        }
        check_indices(&parent, n)?;
        let mut codes = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                codes[i * n + j] = u32::from(i == j) | (u32::from(parent[i] == j) << 1);
            }
        }
        Ok(Self {
            kind: ViewKind::Function,
            labels,
            n,
            codes,
            data: AtomicData::Function { parent },
        })
    }

    pub fn kind(&self) -> ViewKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn code(&self, a: usize, b: usize) -> u32 {
        self.codes[a * self.n + b]
    }

    /// The predecessor map, for function views.
    pub fn parent(&self) -> Option<&[usize]> {
        match &self.data {
            AtomicData::Function { parent } => Some(parent),
            AtomicData::Metric { .. } => None,
        }
    }

    pub fn check_tuple(&self, t: &[usize]) -> Result<()> {
        check_indices(t, self.n)
    }

    /// Whether `a ↦ b` (position-wise) preserves every atom.
    pub fn same_atoms(&self, a: &[usize], b: &[usize]) -> bool {
        a.len() == b.len()
            && (0..a.len()).all(|i| (0..a.len()).all(|j| self.code(a[i], a[j]) == self.code(b[i], b[j])))
    }

    /// The quantifier-free type of a tuple.
    pub fn qf_type(&self, t: &[usize]) -> Result<QfType> {
        self.check_tuple(t)?;
        let (_, pattern) = dedupe_reduce(t);
        let atoms = match &self.data {
            AtomicData::Metric { distances } => QfAtoms::Distances(
                t.iter()
                    .map(|&a| {
                        t.iter()
                            .map(|&b| distances[self.code(a, b) as usize].clone())
                            .collect()
                    })
                    .collect(),
            ),
            AtomicData::Function { parent } => QfAtoms::Predecessor(
                t.iter()
                    .map(|&a| t.iter().map(|&b| parent[a] == b).collect())
                    .collect(),
            ),
        };
        Ok(QfType {
            equality: pattern,
            atoms,
        })
    }
}

/// Atomic part of a quantifier-free type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum QfAtoms {
    /// The exact distance matrix of the tuple.
    Distances(Vec<Vec<Rational>>),
    /// `[i][j]` is true when `f(t_i) = t_j`.
    Predecessor(Vec<Vec<bool>>),
}

/// Quantifier-free type: which positions coincide, plus the atomic data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QfType {
    pub equality: Vec<usize>,
    pub atoms: QfAtoms,
}

/// Splits a tuple into its first occurrences and the position map back onto
/// them: `(a,b,a)` gives `((a,b), [0,1,0])`.
pub fn dedupe_reduce<T: Copy + PartialEq>(t: &[T]) -> (Vec<T>, Vec<usize>) {
    let mut support: Vec<T> = Vec::with_capacity(t.len());
    let pattern = t
        .iter()
        .map(|x| match support.iter().position(|s| s == x) {
            Some(p) => p,
            None => {
                support.push(*x);
                support.len() - 1
            }
        })
        .collect();
    (support, pattern)
}

/// Inverse of [`dedupe_reduce`].
pub fn reconstruct<T: Copy>(support: &[T], pattern: &[usize]) -> Vec<T> {
    pattern.iter().map(|&p| support[p]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    pub(crate) fn p3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let two = FiniteMetricSpace::from_integers(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.is_ultrametric());
        let p3 = p3();
        assert!(!p3.is_ultrametric());
        let err = FiniteMetricSpace::from_integers(&[&[0, 3], &[1, 0]]).unwrap_err();
        assert_eq!(err, Error::Validation(ValidationError::Asymmetric(0, 1)));
    }

    #[test]
    fn validation_errors_carry_witnesses() {
        let cases: &[(&[&[i64]], ValidationError)] = &[
            (&[&[1, 1], &[1, 0]], ValidationError::NonzeroDiagonal(0)),
            (&[&[0, 0], &[0, 0]], ValidationError::ZeroOffDiagonal(0, 1)),
            (&[&[0, -1], &[-1, 0]], ValidationError::Negative(0, 1)),
            (
                &[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]],
                ValidationError::Triangle(0, 1, 2),
            ),
        ];
        for (m, expected) in cases {
            let err = FiniteMetricSpace::from_integers(m).unwrap_err();
            assert_eq!(err, Error::Validation(expected.clone()));
        }
        let err = FiniteMetricSpace::new(vec![vec![Rational::zero()], vec![]], None).unwrap_err();
        assert!(matches!(err, Error::Validation(ValidationError::NotSquare { .. })));
    }

    #[test]
    fn satisfies_r_examples() {
        let p3 = p3();
        assert!(p3.satisfies_r(&r("3/2"), 0, 1));
        assert!(!p3.satisfies_r(&r("2"), 0, 2));
        assert!(p3.satisfies_r(&r("1"), 1, 1));
    }

    #[test]
    fn qf_type_examples() {
        let v = StructureView::metric(&p3());
        let xx = v.qf_type(&[1, 1]).unwrap();
        assert_eq!(xx.equality, vec![0, 0]);
        assert_eq!(xx.atoms, QfAtoms::Distances(vec![vec![r("0"); 2]; 2]));
        assert_eq!(v.qf_type(&[0, 1]).unwrap(), v.qf_type(&[1, 2]).unwrap());
        assert_ne!(v.qf_type(&[0, 2]).unwrap(), v.qf_type(&[0, 1]).unwrap());
        assert!(v.qf_type(&[3]).is_err());
    }

    #[test]
    fn dedupe_examples() {
        assert_eq!(dedupe_reduce(&['a', 'b', 'a']), (vec!['a', 'b'], vec![0, 1, 0]));
        assert_eq!(dedupe_reduce(&['a']), (vec!['a'], vec![0]));
        assert_eq!(dedupe_reduce::<char>(&[]), (vec![], vec![]));
    }

    #[test]
    fn parse_examples() {
        let two = parse_space_file("2\n0 1\n1 0\n").unwrap();
        assert_eq!(two.matrix(), &[vec![r("0"), r("1")], vec![r("1"), r("0")]]);
        assert_eq!(parse_space_file("3\n0 1 2\n1 0 1\n2 1 0\n").unwrap(), p3());
        let third = parse_space_file("2\n0 1/3\n1/3 0\n").unwrap();
        assert_eq!(third.dist(0, 1), &r("1/3"));
        assert_eq!(third.labels(), &["p0", "p1"]);
    }

    #[test]
    fn parse_comments_labels_and_errors() {
        let text = "# a comment\n# labels: a b\n\n  2\n0   1\n# inline\n1 0\n";
        let s = parse_space_file(text).unwrap();
        assert_eq!(s.labels(), &["a", "b"]);
        let err = parse_space_file("2\n0 1\n1 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
        let err = parse_space_file("2\n0 1 4\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let err = parse_space_file("2\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
        let err = parse_space_file("2\n0 2\n1 0\n").unwrap_err();
        assert_eq!(err, Error::Validation(ValidationError::Asymmetric(0, 1)));
        assert!(parse_space_file("# only comments\n").is_err());
    }

    #[test]
    fn file_round_trip() {
        let s = parse_space_file("# labels: x y z\n3\n0 1/2 1\n1/2 0 1\n1 1 0\n").unwrap();
        assert_eq!(parse_space_file(&s.to_file_string()).unwrap(), s);
    }

    #[test]
    fn function_view_codes() {
        let v = StructureView::function(vec![0, 0, 1], vec!["[]".into(), "[0]".into(), "[0,0]".into()])
            .unwrap();
        assert_eq!(v.code(0, 0), 3);
        assert_eq!(v.code(1, 0), 2);
        assert_eq!(v.code(0, 1), 0);
        assert_eq!(v.code(2, 2), 1);
        let t = v.qf_type(&[2, 1]).unwrap();
        assert_eq!(
            t.atoms,
            QfAtoms::Predecessor(vec![vec![false, true], vec![false, false]])
        );
    }

    /// Direct triple-loop checker, written independently of `new`.
    fn is_metric(m: &[Vec<i64>]) -> bool {
        let n = m.len();
        (0..n).all(|i| m[i][i] == 0)
            && (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i] && (i == j || m[i][j] > 0)))
            && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| m[i][k] <= m[i][j] + m[j][k])))
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(-1i64..=4, n), n)
        })
    }

    proptest! {
        #[test]
        fn validation_accepts_exactly_metrics(m in arb_matrix()) {
            let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
            let ok = FiniteMetricSpace::from_integers(&rows).is_ok();
            prop_assert_eq!(ok, is_metric(&m));
        }

        #[test]
        fn dedupe_reconstructs(t in proptest::collection::vec(0usize..5, 0..7)) {
            let (support, pattern) = dedupe_reduce(&t);
            prop_assert_eq!(reconstruct(&support, &pattern), t);
            let mut sorted = support.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), support.len());
        }

        /// The exact distance matrix carries the same information as the
        /// truth values of every `R_q` at the occurring distances and the
        /// midpoints between consecutive ones.
        #[test]
        fn qf_type_matches_threshold_atoms(
            m in arb_matrix(),
            a in proptest::collection::vec(0usize..4, 0..4),
            b in proptest::collection::vec(0usize..4, 0..4),
        ) {
            let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
            let Ok(space) = FiniteMetricSpace::from_integers(&rows) else { return Ok(()) };
            let n = space.len();
            let a: Vec<usize> = a.into_iter().map(|x| x % n).collect();
            let mut b: Vec<usize> = b.into_iter().map(|x| x % n).collect();
            b.resize(a.len(), 0);
            let mut ds: Vec<Rational> = space.matrix().iter().flatten().cloned().collect();
            ds.sort();
            ds.dedup();
            let mut thresholds = ds.clone();
            thresholds.extend(ds.windows(2).map(|w| w[0].midpoint(&w[1])));
            thresholds.push(&ds[ds.len() - 1] + &Rational::one());
            thresholds.retain(Rational::is_positive);
            let atoms_agree = thresholds.iter().all(|q| {
                (0..a.len()).all(|i| (0..a.len()).all(|j| {
                    space.satisfies_r(q, a[i], a[j]) == space.satisfies_r(q, b[i], b[j])
                }))
            });
            let v = StructureView::metric(&space);
            prop_assert_eq!(v.qf_type(&a).unwrap() == v.qf_type(&b).unwrap(), atoms_agree);
        }

        #[test]
        fn qf_type_invariant_under_isometric_relabeling(
            perm_seed in 0usize..6,
            t in proptest::collection::vec(0usize..3, 0..4),
        ) {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let perm = perms[perm_seed];
            let space = p3();
            let moved = space.permuted(&perm);
            let image: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
            prop_assert_eq!(
                StructureView::metric(&space).qf_type(&t).unwrap(),
                StructureView::metric(&moved).qf_type(&image).unwrap()
            );
        }
    }
}
