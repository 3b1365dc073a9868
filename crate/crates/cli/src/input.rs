use std::collections::HashMap;
use std::path::{Path, PathBuf};

use scottrank::tree::{parse_node_label, parse_nodes_file, tree_function_structure, tree_metric_space};
use scottrank::{parse_space_file, Error, FiniteMetricSpace, FiniteTree, StructureView};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ViewArg;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// A loaded input file: either a space file or a node list.
pub struct Input {
    pub digest: InputDigest,
    pub content: Content,
}

pub enum Content {
    Space(FiniteMetricSpace),
    Tree(FiniteTree),
}

#[derive(Debug)]
pub enum LoadError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, InputDigest, Error),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            LoadError::Parse(p, _, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

pub fn load(path: &Path) -> Result<Input, LoadError> {
    let bytes = std::fs::read(path).map_err(|e| LoadError::Io(path.to_path_buf(), e))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    let text = String::from_utf8_lossy(&bytes);
    let is_tree = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with('['));
    let parsed = if is_tree {
        parse_nodes_file(&text).map(Content::Tree)
    } else {
        parse_space_file(&text).map(Content::Space)
    };
    let content = parsed.map_err(|e| LoadError::Parse(path.to_path_buf(), digest.clone(), e))?;
    Ok(Input { digest, content })
}

impl Input {
    pub fn space(&self) -> FiniteMetricSpace {
        match &self.content {
            Content::Space(s) => s.clone(),
            Content::Tree(t) => tree_metric_space(t),
        }
    }

    /// The structure in the requested signature. The function view needs a
    /// tree: a node list, or a space file whose labels are nodes.
    pub fn view(&self, view: ViewArg) -> Result<StructureView, Error> {
        match (view, &self.content) {
            (ViewArg::Metric, _) => Ok(StructureView::metric(&self.space())),
            (ViewArg::Function, Content::Tree(t)) => Ok(tree_function_structure(t)),
            (ViewArg::Function, Content::Space(s)) => function_view_from_labels(s.labels()),
        }
    }
}

/// Predecessor structure on nodes named by `labels`, kept in label order.
fn function_view_from_labels(labels: &[String]) -> Result<StructureView, Error> {
    let not_tree = || Error::InvalidArgument("the function view needs a tree; point labels are not its nodes".into());
    let nodes: Vec<Vec<u64>> = labels
        .iter()
        .map(|l| parse_node_label(l))
        .collect::<Result<_, _>>()
        .map_err(|_| not_tree())?;
    let index: HashMap<&[u64], usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_slice(), i)).collect();
    if index.len() != nodes.len() {
        return Err(not_tree());
    }
    let parent = nodes
        .iter()
        .map(|n| match n.split_last() {
            None => index.get(n.as_slice()).copied(),
            Some((_, init)) => index.get(init).copied(),
        })
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(not_tree)?;
    if !index.contains_key(&[][..]) {
        return Err(not_tree());
    }
    StructureView::function(parent, labels.to_vec())
}

/// Splits `a,b,c` on commas outside brackets and resolves each item as a
/// label first, then as a point index.
pub fn parse_tuple(text: &str, labels: &[String]) -> Result<Vec<usize>, Error> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() || !items.is_empty() {
        items.push(cur);
    }
    items
        .iter()
        .map(|item| {
            let item = item.trim();
            if let Some(i) = labels.iter().position(|l| l == item) {
                return Ok(i);
            }
            let i: usize = item
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("unknown point `{item}`")))?;
            if i >= labels.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: labels.len(),
                });
            }
            Ok(i)
        })
        .collect()
}
