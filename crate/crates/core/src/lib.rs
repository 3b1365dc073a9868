//! Back-and-forth equivalence, Scott rank, ultrahomogeneity and
//! distance-matrix invariants for finite metric spaces and finite trees.

pub mod equivalence;
pub mod error;
pub mod gromov;
pub mod ordinal;
pub mod rational;
pub mod space;
pub mod symmetry;
pub mod tree;

pub use error::{Error, Result, ValidationError};
pub use ordinal::OrdinalCnf;
pub use rational::Rational;
pub use space::{dedupe_reduce, parse_space_file, FiniteMetricSpace, QfType, StructureView, ViewKind};
pub use equivalence::{
    are_equivalent, compute_family, is_ultrahomogeneous, naive_equivalence, scott_rank, EngineLimits,
    EquivalenceFamily, Homogeneity, PartialIsometry,
};
pub use gromov::{DistanceMatrix, Embedding, FormulaSpec, MatrixSet};
pub use tree::{build_tree, tree_function_structure, tree_metric_space, FiniteTree, Subscript, TreeSpec};
