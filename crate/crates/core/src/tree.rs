//! Truncated instances of the tree family `T_n^α ⊂ ω^{<ω}` and their two
//! structure views.
//!
//! Every unbounded range `a < ω` in the construction is cut at `cap`, and an
//! `ω` subscript is realized as `cap`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::OrdinalCnf;
use crate::rational::Rational;
use crate::space::{FiniteMetricSpace, StructureView};

pub type Node = Vec<u64>;

/// The subscript `n ≤ ω` of `T_n^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Subscript {
    Finite(u64),
    Omega,
}

impl fmt::Display for Subscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subscript::Finite(n) => write!(f, "{n}"),
            Subscript::Omega => f.write_str("w"),
        }
    }
}

impl FromStr for Subscript {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "w" | "omega" => Ok(Subscript::Omega),
            t => t
                .parse()
                .map(Subscript::Finite)
                .map_err(|_| Error::InvalidArgument(format!("tree subscript `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSpec {
    pub n: Subscript,
    pub alpha: OrdinalCnf,
    pub cap: u64,
    pub depth_cap: Option<usize>,
}

impl TreeSpec {
    pub fn new(n: Subscript, alpha: OrdinalCnf, cap: u64) -> Self {
        Self {
            n,
            alpha,
            cap,
            depth_cap: None,
        }
    }
}

/// A finite prefix-closed set of sequences of naturals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteTree {
    nodes: BTreeSet<Node>,
}

impl FiniteTree {
    pub fn from_nodes<I: IntoIterator<Item = Node>>(nodes: I) -> Result<Self> {
        let nodes: BTreeSet<Node> = nodes.into_iter().collect();
        let tree = Self { nodes };
        if !tree.is_prefix_closed() {
            return Err(Error::InvalidArgument("node set is not prefix-closed".into()));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in lexicographic order; this order is the carrier order of both
    /// views.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn contains(&self, node: &[u64]) -> bool {
        self.nodes.contains(node)
    }

    pub fn is_subset(&self, other: &FiniteTree) -> bool {
        self.nodes.is_subset(&other.nodes)
    }

    pub fn is_prefix_closed(&self) -> bool {
        self.nodes.contains(&Vec::new())
            && self
                .nodes
                .iter()
                .all(|s| s.is_empty() || self.nodes.contains(&s[..s.len() - 1]))
    }

    pub fn labels(&self) -> Vec<String> {
        self.nodes.iter().map(|s| node_label(s)).collect()
    }

    /// One bracketed node per line, e.g. `[]`, `[2,0]`.
    pub fn to_nodes_string(&self) -> String {
        self.nodes.iter().map(|s| node_label(s) + "\n").collect()
    }
}

/// Parses a bracketed node such as `[]` or `[2,0]`.
pub fn parse_node_label(text: &str) -> Result<Node> {
    let bad = || Error::InvalidArgument(format!("invalid node `{text}`"));
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(bad)?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
        .collect()
}

/// Reads the node emission format: one bracketed node per line, `#`
/// comments and blank lines ignored.
pub fn parse_nodes_file(text: &str) -> Result<FiniteTree> {
    let mut nodes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let node = parse_node_label(line).map_err(|_| Error::Syntax {
            line: idx + 1,
            message: format!("invalid node `{line}`"),
        })?;
        nodes.push(node);
    }
    FiniteTree::from_nodes(nodes)
}

pub fn node_label(node: &[u64]) -> String {
    let inner: Vec<String> = node.iter().map(u64::to_string).collect();
    format!("[{}]", inner.join(","))
}

/// Construction ceilings.
#[derive(Debug, Clone, Copy)]
pub struct BuildLimits {
    pub max_nodes: usize,
}

impl Default for BuildLimits {
    fn default() -> Self {
        Self { max_nodes: 200_000 }
    }
}

/// Cantor pairing of the position of `c` in the enumeration of ordinals
/// below `alpha` with `d`.
pub fn limit_enumeration(alpha: &OrdinalCnf, c: &OrdinalCnf, d: u64) -> Result<u64> {
    if !alpha.is_limit() {
        return Err(Error::InvalidArgument(format!("{alpha} is not a limit ordinal")));
    }
    let i = alpha
        .index_below(c)
        .ok_or_else(|| Error::InvalidArgument(format!("{c} is not below {alpha}")))?;
    Ok(cantor_pair(i, d))
}

fn cantor_pair(i: u64, d: u64) -> u64 {
    (i + d) * (i + d + 1) / 2 + d
}

struct Builder {
    cap: u64,
    limits: BuildLimits,
    memo: HashMap<(Subscript, OrdinalCnf, usize), BTreeSet<Node>>,
}

impl Builder {
    fn width(&self, n: Subscript) -> u64 {
        match n {
            Subscript::Finite(k) => k,
            Subscript::Omega => self.cap,
        }
    }

    fn graft(
        &self,
        out: &mut BTreeSet<Node>,
        head: u64,
        sub: &BTreeSet<Node>,
    ) -> Result<()> {
        for s in sub {
            let mut node = Vec::with_capacity(s.len() + 1);
            node.push(head);
            node.extend_from_slice(s);
            out.insert(node);
        }
        if out.len() > self.limits.max_nodes {
            return Err(Error::Resource {
                what: "tree nodes",
                needed: out.len() as u128,
                limit: self.limits.max_nodes as u128,
            });
        }
        Ok(())
    }

    fn build(&mut self, n: Subscript, alpha: &OrdinalCnf, depth: usize) -> Result<BTreeSet<Node>> {
        let width = self.width(n);
        let key = (n, alpha.clone(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut out = BTreeSet::from([Vec::new()]);
        if depth > 0 {
            if alpha.is_zero() {
                out.extend((0..width).map(|a| vec![a]));
            } else if let Some(beta) = alpha.predecessor() {
                for a in 0..self.cap {
                    let sub = self.build(Subscript::Finite(a), &beta, depth - 1)?;
                    self.graft(&mut out, 2 * a, &sub)?;
                }
                let wide = self.build(Subscript::Omega, &beta, depth - 1)?;
                for a in 0..width {
                    self.graft(&mut out, 2 * a + 1, &wide)?;
                }
            } else {
                let copies = match n {
                    Subscript::Finite(k) => k + 1,
                    Subscript::Omega => self.cap,
                };
                for i in 0..self.cap {
                    let c = alpha.nth_below(i).expect("limit ordinals have infinitely many predecessors");
                    let sub = self.build(Subscript::Omega, &c, depth - 1)?;
                    for d in 0..copies {
                        self.graft(&mut out, cantor_pair(i, d), &sub)?;
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

pub fn build_tree(spec: &TreeSpec, limits: BuildLimits) -> Result<FiniteTree> {
    if spec.cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let mut b = Builder {
        cap: spec.cap,
        limits,
        memo: HashMap::new(),
    };
    let nodes = b.build(spec.n, &spec.alpha, spec.depth_cap.unwrap_or(usize::MAX))?;
    Ok(FiniteTree { nodes })
}

fn common_prefix(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// `d(s,t) = base^(-L)` for `s ≠ t`, `L` the length of the longest common
/// prefix. `base` must exceed 1.
pub fn tree_metric_space_with_base(tree: &FiniteTree, base: &Rational) -> Result<FiniteMetricSpace> {
    if *base <= Rational::one() {
        return Err(Error::InvalidArgument(format!("metric base {base} must exceed 1")));
    }
    let nodes: Vec<&Node> = tree.nodes().collect();
    let matrix = nodes
        .iter()
        .map(|s| {
            nodes
                .iter()
                .map(|t| {
                    if s == t {
                        Rational::zero()
                    } else {
                        base.inverse_pow(common_prefix(s, t) as u32)
                    }
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(matrix, Some(tree.labels()))
}

pub fn tree_metric_space(tree: &FiniteTree) -> FiniteMetricSpace {
    tree_metric_space_with_base(tree, &Rational::integer(2)).expect("base 2 is valid")
}

/// The predecessor function; the root is its own predecessor.
pub fn tree_function_structure(tree: &FiniteTree) -> StructureView {
    let nodes: Vec<&Node> = tree.nodes().collect();
    let index: HashMap<&[u64], usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let parent = nodes
        .iter()
        .map(|s| match s.split_last() {
            None => index[&s[..]],
            Some((_, init)) => index[init],
        })
        .collect();
    StructureView::function(parent, tree.labels()).expect("labels match nodes")
}
