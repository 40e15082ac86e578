//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers; real inputs are accepted wherever a complex is expected.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use equidecomp::spectral::spectra_agree;
use equidecomp::{MatrixC, MatrixKind, WeightedDigraph};

type Rows = Vec<Vec<Complex64>>;

fn err(e: equidecomp::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Rows) -> PyResult<MatrixC> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(
            "matrix must be a nonempty square list of rows",
        ));
    }
    Ok(MatrixC::from_rows(&rows))
}

/// Permutation of `1..=n`.
#[pyclass(
    name = "Permutation",
    module = "pyequidecomp",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
pub struct PyPermutation {
    inner: equidecomp::Permutation,
}

#[pymethods]
impl PyPermutation {
    /// Parses cycle notation such as `"(1 2 3)(4 5)"` over `1..=n`.
    #[new]
    fn new(cycles: &str, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: equidecomp::Permutation::parse_cycles(cycles, n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_images(images: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: equidecomp::Permutation::from_images(images).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn images(&self) -> Vec<usize> {
        self.inner.images().to_vec()
    }

    fn apply(&self, i: usize) -> PyResult<usize> {
        if i == 0 || i > self.inner.n() {
            return Err(PyValueError::new_err(format!(
                "point {i} outside 1..={}",
                self.inner.n()
            )));
        }
        Ok(self.inner.apply(i))
    }

    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn pow(&self, e: i64) -> Self {
        Self {
            inner: self.inner.pow(e),
        }
    }

    fn inverse(&self) -> Self {
        Self {
            inner: self.inner.inverse(),
        }
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        self.inner.orbits().orbits
    }

    fn is_automorphism(&self, matrix: Rows) -> PyResult<bool> {
        self.inner.is_automorphism(&to_matrix(matrix)?).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Permutation('{}', {})", self.inner, self.inner.n())
    }
}

#[pyfunction]
fn parse_cycles(text: &str, n: usize) -> PyResult<PyPermutation> {
    PyPermutation::new(text, n)
}

/// Builds a graph matrix from `(i, j)` or `(i, j, w)` edges over `1..=n`.
#[pyfunction]
#[pyo3(signature = (n, edges, kind = "adjacency", directed = false))]
fn build_matrix(n: usize, edges: Vec<Vec<f64>>, kind: &str, directed: bool) -> PyResult<Rows> {
    let kind: MatrixKind = kind.parse().map_err(err)?;
    let mut g = WeightedDigraph::new(n, directed).map_err(err)?;
    for e in edges {
        let (i, j, w) = match e.as_slice() {
            [i, j] => (*i, *j, 1.0),
            [i, j, w] => (*i, *j, *w),
            _ => return Err(PyValueError::new_err("edges must be (i, j) or (i, j, w)")),
        };
        if i.fract() != 0.0 || j.fract() != 0.0 || i < 1.0 || j < 1.0 {
            return Err(PyValueError::new_err(
                "edge endpoints must be positive integers",
            ));
        }
        g.add_edge(i as usize, j as usize, w).map_err(err)?;
    }
    Ok(equidecomp::build_matrix(&g, kind).map_err(err)?.to_rows())
}

#[pyfunction]
fn divisor_matrix(matrix: Rows, perm: &PyPermutation) -> PyResult<Rows> {
    let m = to_matrix(matrix)?;
    Ok(equidecomp::divisor_matrix(&m, &perm.inner)
        .map_err(err)?
        .to_rows())
}

/// Decomposes `matrix` over `perm`. Returns a dict with `divisor`,
/// `divisor_labels`, `blocks` (each with `stage`, `round`, `j`, `labels`,
/// `matrix`), `residual` and, when requested, `transform`.
#[pyfunction]
#[pyo3(signature = (matrix, perm, seeds = None, emit_transform = false))]
fn decompose<'py>(
    py: Python<'py>,
    matrix: Rows,
    perm: &PyPermutation,
    seeds: Option<Vec<Vec<Vec<usize>>>>,
    emit_transform: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let m = to_matrix(matrix)?;
    let opts = equidecomp::DecomposeOptions {
        seeds: seeds.unwrap_or_default(),
        emit_transform,
    };
    let res = equidecomp::general_decompose(&m, &perm.inner, &opts).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("divisor", res.divisor.to_rows())?;
    out.set_item("divisor_labels", res.divisor_labels.clone())?;
    let blocks = res
        .blocks
        .iter()
        .map(|b| {
            let d = PyDict::new(py);
            d.set_item("stage", b.tag.stage)?;
            d.set_item("round", b.tag.round)?;
            d.set_item("j", b.tag.j)?;
            d.set_item("labels", b.labels.clone())?;
            d.set_item("matrix", b.matrix.to_rows())?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("blocks", blocks)?;
    out.set_item("residual", res.residual)?;
    if let Some(tt) = &res.total_transform {
        let d = PyDict::new(py);
        d.set_item("t", tt.t.to_rows())?;
        d.set_item("t_inv", tt.t_inv.to_rows())?;
        d.set_item("order", tt.order.clone())?;
        d.set_item("residual", tt.residual)?;
        out.set_item("transform", d)?;
    }
    Ok(out)
}

/// Eigenvalues sorted by real then imaginary part.
#[pyfunction]
fn spectrum(matrix: Rows) -> PyResult<Vec<Complex64>> {
    Ok(equidecomp::spectrum(&to_matrix(matrix)?)
        .map_err(err)?
        .values)
}

#[pyfunction]
fn spectral_radius(matrix: Rows) -> PyResult<f64> {
    equidecomp::spectral_radius(&to_matrix(matrix)?).map_err(err)
}

/// Decomposes and checks that the pieces' spectra recombine into the
/// spectrum of `matrix` within `tol`.
#[pyfunction]
#[pyo3(signature = (matrix, perm, tol = 1e-8))]
fn verify(matrix: Rows, perm: &PyPermutation, tol: f64) -> PyResult<bool> {
    let m = to_matrix(matrix)?;
    let res = equidecomp::general_decompose(&m, &perm.inner, &Default::default()).map_err(err)?;
    let parts = std::iter::once(&res.divisor).chain(res.block_matrices());
    Ok(spectra_agree(&m, parts, tol).map_err(err)?.equal)
}

#[pymodule]
fn pyequidecomp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_function(wrap_pyfunction!(parse_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(build_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
