//! Python bindings: spaces, trees, equivalence, homogeneity and the
//! distance-matrix invariants. Exact distances cross the boundary as strings
//! (`"1/2"`) so nothing is rounded.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use scottrank::equivalence::{compute_family, is_ultrahomogeneous, EngineLimits};
use scottrank::gromov::{self, GromovLimits};
use scottrank::tree::{build_tree, parse_nodes_file, tree_function_structure, tree_metric_space, BuildLimits};
use scottrank::{
    parse_space_file, DistanceMatrix, Error, FiniteMetricSpace, FiniteTree, OrdinalCnf, Rational, StructureView,
    Subscript, TreeSpec,
};

create_exception!(scottrank, ResourceError, PyException, "A configured resource ceiling was exceeded.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Resource { .. } => ResourceError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rational(text: &str) -> PyResult<Rational> {
    text.parse().map_err(to_py)
}

fn matrix_rows(m: &DistanceMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(Rational::to_string).collect()).collect()
}

/// A finite metric space with exact rational distances.
#[pyclass(name = "MetricSpace", frozen, from_py_object, module = "scottrank")]
#[derive(Clone)]
pub struct PySpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PySpace {
    /// `matrix` entries are ints or strings such as `"3/2"`.
    #[new]
    #[pyo3(signature = (matrix, labels=None))]
    fn new(matrix: Vec<Vec<Bound<'_, PyAny>>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let rows = matrix
            .iter()
            .map(|r| r.iter().map(|v| rational(&v.str()?.to_cow()?)).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        let inner = FiniteMetricSpace::new(rows, labels).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Parses the text of a space file.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_space_file(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace(points={})", self.inner.len())
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn dist(&self, i: usize, j: usize) -> PyResult<String> {
        self.inner.check_tuple(&[i, j]).map_err(to_py)?;
        Ok(self.inner.dist(i, j).to_string())
    }

    fn matrix(&self) -> Vec<Vec<String>> {
        self.inner.matrix().iter().map(|r| r.iter().map(Rational::to_string).collect()).collect()
    }

    fn is_ultrametric(&self) -> bool {
        self.inner.is_ultrametric()
    }

    fn to_file_string(&self) -> String {
        self.inner.to_file_string()
    }
}

/// A finite prefix-closed tree of sequences of naturals.
#[pyclass(name = "Tree", frozen, from_py_object, module = "scottrank")]
#[derive(Clone)]
pub struct PyTree {
    inner: FiniteTree,
}

#[pymethods]
impl PyTree {
    /// Truncated `T_n^alpha`. `n` is a natural number or `"w"`.
    #[staticmethod]
    #[pyo3(signature = (n, alpha, cap, depth_cap=None, max_nodes=200_000))]
    fn build(n: &Bound<'_, PyAny>, alpha: &str, cap: u64, depth_cap: Option<usize>, max_nodes: usize) -> PyResult<Self> {
        let n: Subscript = n.str()?.to_cow()?.parse().map_err(to_py)?;
        let spec = TreeSpec {
            n,
            alpha: text_ordinal(alpha)?,
            cap,
            depth_cap,
        };
        build_tree(&spec, BuildLimits { max_nodes })
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Parses one bracketed node per line.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_nodes_file(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Tree(nodes={})", self.inner.len())
    }

    fn nodes(&self) -> Vec<Vec<u64>> {
        self.inner.nodes().cloned().collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels()
    }

    /// The prefix ultrametric `2^-L`.
    fn metric_space(&self) -> PySpace {
        PySpace {
            inner: tree_metric_space(&self.inner),
        }
    }

    fn to_nodes_string(&self) -> String {
        self.inner.to_nodes_string()
    }
}

/// Anything that can be read as a structure.
#[derive(FromPyObject)]
enum Structure {
    Space(PySpace),
    Tree(PyTree),
}

impl Structure {
    fn view(&self, view: &str) -> PyResult<StructureView> {
        match (view, self) {
            ("metric", Structure::Space(s)) => Ok(StructureView::metric(&s.inner)),
            ("metric", Structure::Tree(t)) => Ok(StructureView::metric(&tree_metric_space(&t.inner))),
            ("function", Structure::Tree(t)) => Ok(tree_function_structure(&t.inner)),
            ("function", Structure::Space(_)) => Err(PyValueError::new_err("the function view needs a Tree")),
            (other, _) => Err(PyValueError::new_err(format!("unknown view `{other}`"))),
        }
    }
}

fn limits(max_tuples: u128, max_sets: usize) -> EngineLimits {
    EngineLimits { max_tuples, max_sets }
}

/// Scott rank in the chosen view (`"metric"` or `"function"`).
#[pyfunction]
#[pyo3(signature = (structure, view="metric", max_tuples=1_000_000, max_sets=200_000))]
fn scott_rank(structure: Structure, view: &str, max_tuples: u128, max_sets: usize) -> PyResult<usize> {
    let v = structure.view(view)?;
    scottrank::scott_rank(&v, limits(max_tuples, max_sets)).map_err(to_py)
}

/// Class counts of injective tuples, indexed `[level][length]`, for lengths
/// up to `max_length`.
#[pyfunction]
#[pyo3(signature = (structure, max_length, view="metric", max_tuples=1_000_000, max_sets=200_000))]
fn class_counts(
    structure: Structure,
    max_length: usize,
    view: &str,
    max_tuples: u128,
    max_sets: usize,
) -> PyResult<Vec<Vec<usize>>> {
    let v = structure.view(view)?;
    let fam = compute_family(&v, max_length, limits(max_tuples, max_sets)).map_err(to_py)?;
    Ok(fam.class_counts())
}

/// Whether tuples `a` and `b` (point indices) are `alpha`-equivalent. An
/// `alpha` of `None` means every level.
#[pyfunction]
#[pyo3(signature = (structure, a, b, alpha=None, view="metric", max_tuples=1_000_000, max_sets=200_000))]
fn are_equivalent(
    structure: Structure,
    a: Vec<usize>,
    b: Vec<usize>,
    alpha: Option<usize>,
    view: &str,
    max_tuples: u128,
    max_sets: usize,
) -> PyResult<bool> {
    let v = structure.view(view)?;
    scottrank::are_equivalent(&v, &a, &b, alpha.unwrap_or(usize::MAX), limits(max_tuples, max_sets)).map_err(to_py)
}

/// `(homogeneous, witness)`; the witness is a list of `(x, y)` index pairs
/// of a partial isometry with no extension.
#[pyfunction]
#[pyo3(name = "is_ultrahomogeneous", signature = (space, max_sets=200_000))]
fn ultrahomogeneous(space: &PySpace, max_sets: usize) -> PyResult<(bool, Option<Vec<(usize, usize)>>)> {
    let h = is_ultrahomogeneous(&space.inner, max_sets).map_err(to_py)?;
    let witness = h.witness.map(|w| w.domain.into_iter().zip(w.image).collect());
    Ok((h.homogeneous, witness))
}

/// An isometry `x -> y` as a list of images, or `None`.
#[pyfunction]
fn isometry(x: &PySpace, y: &PySpace) -> PyResult<Option<Vec<usize>>> {
    if x.inner.len() != y.inner.len() {
        return Ok(None);
    }
    let e = gromov::find_isometric_embedding(&x.inner, &y.inner, &[], &[]).map_err(to_py)?;
    Ok(e.map(|e| e.map))
}

/// An isometric embedding of `x` into `y` sending `anchor_x[i]` to
/// `anchor_y[i]`, or `None`.
#[pyfunction]
#[pyo3(signature = (x, y, anchor_x=vec![], anchor_y=vec![]))]
fn isometric_embedding(x: &PySpace, y: &PySpace, anchor_x: Vec<usize>, anchor_y: Vec<usize>) -> PyResult<Option<Vec<usize>>> {
    let e = gromov::find_isometric_embedding(&x.inner, &y.inner, &anchor_x, &anchor_y).map_err(to_py)?;
    Ok(e.map(|e| e.map))
}

/// Sorted distinct distance matrices of all `n`-tuples.
#[pyfunction]
fn dn_set(space: &PySpace, n: usize) -> PyResult<Vec<Vec<Vec<String>>>> {
    let set = gromov::dn_set(&space.inner, n, GromovLimits::default()).map_err(to_py)?;
    Ok(set.matrices().iter().map(matrix_rows).collect())
}

/// `None` when the sets agree for every order up to `max_n`, else
/// `(n, side, matrix)` for the first order where they differ.
#[pyfunction]
fn compare_dn(x: &PySpace, y: &PySpace, max_n: usize) -> PyResult<Option<(usize, String, Vec<Vec<String>>)>> {
    let c = gromov::compare_dn(&x.inner, &y.inner, max_n, GromovLimits::default()).map_err(to_py)?;
    Ok(c.first_difference.map(|d| {
        let side = format!("{:?}", d.only_in).to_lowercase();
        (d.n, side, matrix_rows(&d.matrix))
    }))
}

#[pyfunction]
fn ep_equivalent(
    x: &PySpace,
    anchor_x: Vec<usize>,
    y: &PySpace,
    anchor_y: Vec<usize>,
    n: usize,
    eps: &str,
) -> PyResult<bool> {
    gromov::ep_equivalent(&x.inner, &anchor_x, &y.inner, &anchor_y, n, &rational(eps)?, GromovLimits::default())
        .map_err(to_py)
}

#[pyfunction]
fn epsilon_net(space: &PySpace, eps: &str) -> PyResult<Vec<usize>> {
    gromov::epsilon_net(&space.inner, &rational(eps)?).map_err(to_py)
}

/// Normal form of an ordinal expression such as `"w^2*3+1"`.
#[pyfunction]
fn ordinal(text: &str) -> PyResult<String> {
    text_ordinal(text).map(|o| o.to_string())
}

/// `alpha * w` in normal form.
#[pyfunction]
fn times_omega(alpha: &str) -> PyResult<String> {
    text_ordinal(alpha).map(|o| o.times_omega().to_string())
}

fn text_ordinal(text: &str) -> PyResult<OrdinalCnf> {
    text.parse().map_err(to_py)
}

#[pymodule]
#[pyo3(name = "scottrank")]
fn scottrank_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyTree>()?;
    m.add("ResourceError", m.py().get_type::<ResourceError>())?;
    m.add_function(wrap_pyfunction!(scott_rank, m)?)?;
    m.add_function(wrap_pyfunction!(class_counts, m)?)?;
    m.add_function(wrap_pyfunction!(are_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(ultrahomogeneous, m)?)?;
    m.add_function(wrap_pyfunction!(isometry, m)?)?;
    m.add_function(wrap_pyfunction!(isometric_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(dn_set, m)?)?;
    m.add_function(wrap_pyfunction!(compare_dn, m)?)?;
    m.add_function(wrap_pyfunction!(ep_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_net, m)?)?;
    m.add_function(wrap_pyfunction!(ordinal, m)?)?;
    m.add_function(wrap_pyfunction!(times_omega, m)?)?;
    Ok(())
}
