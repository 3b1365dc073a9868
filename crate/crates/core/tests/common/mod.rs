#![allow(dead_code)]

use scottrank::tree::{build_tree, BuildLimits, FiniteTree, Subscript, TreeSpec};
use scottrank::{FiniteMetricSpace, OrdinalCnf, Rational};

/// Every labeled metric space on 1..=4 points with distances in {1, 2, 3}.
pub fn small_corpus() -> Vec<FiniteMetricSpace> {
    let mut out = Vec::new();
    for m in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let total = 3usize.pow(pairs.len() as u32);
        for code in 0..total {
            let mut mat = vec![vec![Rational::zero(); m]; m];
            let mut c = code;
            for &(i, j) in &pairs {
                let d = Rational::integer((c % 3) as i64 + 1);
                c /= 3;
                mat[i][j] = d.clone();
                mat[j][i] = d;
            }
            if let Ok(s) = FiniteMetricSpace::new(mat, None) {
                out.push(s);
            }
        }
    }
    out
}

pub struct GridTree {
    pub n: u64,
    pub alpha: &'static str,
    pub cap: u64,
    pub tree: FiniteTree,
}

pub const GRID_ALPHAS: [&str; 4] = ["0", "1", "2", "w"];

pub fn spec(n: u64, alpha: &str, cap: u64) -> TreeSpec {
    TreeSpec::new(Subscript::Finite(n), alpha.parse::<OrdinalCnf>().unwrap(), cap)
}

/// Trees for `n ≤ 3`, the grid ordinals and `cap ≤ 4`.
pub fn tree_grid() -> Vec<GridTree> {
    let mut out = Vec::new();
    for n in 0..=3 {
        for alpha in GRID_ALPHAS {
            for cap in 1..=4 {
                let tree = build_tree(&spec(n, alpha, cap), BuildLimits::default()).unwrap();
                out.push(GridTree { n, alpha, cap, tree });
            }
        }
    }
    out
}

pub fn grid_trees_up_to(max_nodes: usize) -> Vec<GridTree> {
    tree_grid().into_iter().filter(|g| g.tree.len() <= max_nodes).collect()
}

/// All permutations of `0..n` that preserve distances.
pub fn auto_isometries(space: &FiniteMetricSpace) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(space: &FiniteMetricSpace, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = space.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let i = cur.len();
        for v in 0..n {
            if cur.contains(&v) || (0..i).any(|j| space.dist(i, j) != space.dist(v, cur[j])) {
                continue;
            }
            cur.push(v);
            go(space, cur, out);
            cur.pop();
        }
    }
    go(space, &mut cur, &mut out);
    out
}

/// All tuples in `{0..m}^k`, lexicographically.
pub fn all_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// Direct triple-loop check of the metric axioms.
pub fn is_metric(d: &[Vec<Rational>]) -> bool {
    let n = d.len();
    (0..n).all(|i| {
        d[i].len() == n
            && d[i][i].is_zero()
            && (0..n).all(|j| {
                d[i][j] == d[j][i]
                    && (i == j || d[i][j].is_positive())
                    && (0..n).all(|k| d[i][k] <= &d[i][j] + &d[j][k])
            })
    })
}

pub fn is_ultrametric(d: &[Vec<Rational>]) -> bool {
    let n = d.len();
    (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| d[i][k] <= d[i][j].clone().max(d[j][k].clone()))))
}
