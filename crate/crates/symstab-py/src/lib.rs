//! Python bindings: square classes, quadratic and Hermitian forms, pair
//! classification, sweeps, finite-group cohomology and the oracles.
//!
//! Verdicts and sweep rows cross the boundary as JSON strings in the same
//! schema the command-line tool prints.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use symstab::cohom::{Group, InvolutiveGroup};
use symstab::stability::{self, Family, PairField, PairSpec, SweepBounds};
use symstab::{LocalField, QuadInvariants};

fn to_py(e: symstab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = symstab::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn json(v: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A square class of a local field, e.g. `SquareClass("Qp:3", "up")`.
#[pyclass(module = "symstab", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct SquareClass(symstab::SquareClass);

#[pymethods]
impl SquareClass {
    #[new]
    fn new(field: &str, token: &str) -> PyResult<Self> {
        let field: LocalField = parse(field)?;
        symstab::SquareClass::parse_token(field, token).map(SquareClass).map_err(to_py)
    }

    /// The field, as `R` or `Qp:<p>`.
    #[getter]
    fn field(&self) -> String {
        self.0.field().to_string()
    }

    /// A small integer in the class.
    fn representative(&self) -> i64 {
        self.0.representative()
    }

    fn __mul__(&self, other: &SquareClass) -> PyResult<SquareClass> {
        self.0.checked_mul(&other.0).map(SquareClass).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SquareClass('{}', '{}')", self.0.field(), self.0.token())
    }
}

/// All square classes of a field.
#[pyfunction]
fn square_classes(field: &str) -> PyResult<Vec<SquareClass>> {
    let field: LocalField = parse(field)?;
    Ok(symstab::sqclass::enumerate_classes(field).into_iter().map(SquareClass).collect())
}

/// Hilbert symbol `{a, b}` as `1` or `-1`.
#[pyfunction]
fn hilbert(a: &SquareClass, b: &SquareClass) -> PyResult<i32> {
    symstab::sqclass::hilbert(&a.0, &b.0).map(|s| s.value()).map_err(to_py)
}

/// Whether `x` is a norm from `F(sqrt d)`.
#[pyfunction]
fn is_norm(x: &SquareClass, d: &SquareClass) -> PyResult<bool> {
    symstab::sqclass::is_norm(&x.0, &d.0).map_err(to_py)
}

/// Hilbert symbol of two integers by brute-force conic search.
#[pyfunction]
fn hilbert_oracle(field: &str, a: i64, b: i64) -> PyResult<i32> {
    let field: LocalField = parse(field)?;
    symstab::oracle::hilbert_oracle(field, a, b).map(|s| s.value()).map_err(to_py)
}

/// A diagonal quadratic form, e.g. `QuadForm("qf(Qp:3)[1,u,p]")`.
#[pyclass(module = "symstab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct QuadForm(symstab::QuadForm);

#[pymethods]
impl QuadForm {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        parse(literal).map(QuadForm)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    /// `{rank, det, hasse}` over `Q_p`, `{rank, pos, neg}` over the reals.
    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match self.0.invariants() {
            QuadInvariants::Padic { rank, det, hasse } => {
                d.set_item("rank", rank)?;
                d.set_item("det", det.token())?;
                d.set_item("hasse", hasse.value())?;
            }
            QuadInvariants::Real { rank, pos, neg } => {
                d.set_item("rank", rank)?;
                d.set_item("pos", pos)?;
                d.set_item("neg", neg)?;
            }
        }
        Ok(d)
    }

    fn equivalent(&self, other: &QuadForm) -> PyResult<bool> {
        self.0.equivalent(&other.0).map_err(to_py)
    }

    fn direct_sum(&self, other: &QuadForm) -> PyResult<QuadForm> {
        self.0.direct_sum(&other.0).map(QuadForm).map_err(to_py)
    }

    fn is_isotropic(&self) -> PyResult<bool> {
        self.0.is_isotropic().map_err(to_py)
    }

    /// Witt index.
    fn mu(&self) -> usize {
        self.0.mu()
    }

    /// `(hyperbolic planes, anisotropic kernel)`.
    fn witt_decompose(&self) -> PyResult<(usize, QuadForm)> {
        let (k, core) = self.0.witt_decompose();
        Ok((k, QuadForm(symstab::QuadForm::from_invariants(&core).map_err(to_py)?)))
    }

    fn represents(&self, x: &SquareClass) -> PyResult<bool> {
        self.0.represents(&x.0).map_err(to_py)
    }

    /// Whether `self` is a subform of `b`.
    fn is_subform(&self, b: &QuadForm) -> PyResult<bool> {
        self.0.is_subform(&b.0).map_err(to_py)
    }

    /// Isotropy by exhaustive search.
    fn isotropy_oracle(&self) -> PyResult<bool> {
        symstab::oracle::isotropy_oracle(&self.0).map_err(to_py)
    }

    fn __eq__(&self, other: &QuadForm) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QuadForm('{}')", self.0)
    }
}

/// A Hermitian form over a quadratic extension, e.g.
/// `HermForm("hf(Qp:3,d=p)[rank=2,det=norm]")` or `HermForm("hf(C/R)[2,1]")`.
#[pyclass(module = "symstab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct HermForm(symstab::HermForm);

#[pymethods]
impl HermForm {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        parse(literal).map(HermForm)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn mu(&self) -> usize {
        self.0.herm_mu()
    }

    fn equivalent(&self, other: &HermForm) -> PyResult<bool> {
        self.0.herm_equivalent(&other.0).map_err(to_py)
    }

    fn direct_sum(&self, other: &HermForm) -> PyResult<HermForm> {
        self.0.herm_direct_sum(&other.0).map(HermForm).map_err(to_py)
    }

    fn is_subform(&self, b: &HermForm) -> PyResult<bool> {
        self.0.herm_is_subform(&b.0).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("HermForm('{}')", self.0)
    }
}

/// Classifies a pair given as JSON `{"family": ..., "params": {...}}` and
/// returns the row as JSON.
#[pyfunction]
fn classify(spec_json: &str) -> PyResult<String> {
    let spec: PairSpec =
        serde_json::from_str(spec_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let verdict = stability::classify(&spec).map_err(to_py)?;
    json(&stability::Row { spec, verdict })
}

/// Sweeps a family (or `"all"`) and returns the rows as a JSON array.
#[pyfunction]
#[pyo3(signature = (family, field, max_dim = 4, max_sig = 3))]
fn sweep(family: &str, field: &str, max_dim: usize, max_sig: usize) -> PyResult<String> {
    let field: PairField = parse(field)?;
    let bounds = SweepBounds { max_dim, max_sig };
    let rows = if family.eq_ignore_ascii_case("all") {
        stability::sweep_all(field, bounds)
    } else {
        let family: Family = parse(family)?;
        stability::sweep(family, field, bounds)
    }
    .map_err(to_py)?;
    json(&rows)
}

/// The per-family summary of a full sweep, as JSON.
#[pyfunction]
#[pyo3(signature = (field, max_dim = 4, max_sig = 3))]
fn summary(field: &str, max_dim: usize, max_sig: usize) -> PyResult<String> {
    let field: PairField = parse(field)?;
    let rows = stability::sweep_all(field, SweepBounds { max_dim, max_sig }).map_err(to_py)?;
    json(&stability::summary_table(&rows))
}

/// Order of the norm-quotient kernel for `Q_p(sqrt p)`.
#[pyfunction]
fn quaternion_obstruction(p: u64) -> PyResult<usize> {
    stability::quaternion_obstruction(p).map_err(to_py)
}

/// A builtin finite group with a named involution.
#[pyclass(module = "symstab", frozen)]
struct Cohomology(InvolutiveGroup);

#[pymethods]
impl Cohomology {
    #[new]
    #[pyo3(signature = (group, involution = "id"))]
    fn new(group: &str, involution: &str) -> PyResult<Self> {
        let group = Arc::new(Group::builtin(group).map_err(to_py)?);
        let theta = group.involution_by_name(involution).map_err(to_py)?;
        InvolutiveGroup::new(group, theta).map(Cohomology).map_err(to_py)
    }

    /// Names of the involutions of a builtin group.
    #[staticmethod]
    fn involutions(group: &str) -> PyResult<Vec<String>> {
        let group = Group::builtin(group).map_err(to_py)?;
        Ok(group.involution_menu().into_iter().map(|(name, _)| name).collect())
    }

    /// Names of the elements of the symmetric part.
    fn symmetric_part(&self) -> Vec<String> {
        let g = self.0.group();
        self.0.symmetric_part().into_iter().map(|x| g.name(x).to_string()).collect()
    }

    /// Representatives of the classes of the first cohomology set.
    fn h1(&self) -> Vec<String> {
        let g = self.0.group();
        self.0.h1().into_iter().map(|c| g.name(c.representative).to_string()).collect()
    }

    /// Whether the double coset of the named element is preserved.
    fn is_stable(&self, element: &str) -> PyResult<bool> {
        let g = self.0.group().index_of(element).map_err(to_py)?;
        Ok(self.0.double_coset_stable(g))
    }

    /// The centralizer criterion for the named element.
    fn centralizer_criterion(&self, element: &str) -> PyResult<bool> {
        let g = self.0.group().index_of(element).map_err(to_py)?;
        Ok(self.0.centralizer_criterion(g))
    }
}

#[pymodule]
#[pyo3(name = "symstab")]
fn symstab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SquareClass>()?;
    m.add_class::<QuadForm>()?;
    m.add_class::<HermForm>()?;
    m.add_class::<Cohomology>()?;
    m.add_function(wrap_pyfunction!(square_classes, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(is_norm, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(summary, m)?)?;
    m.add_function(wrap_pyfunction!(quaternion_obstruction, m)?)?;
    Ok(())
}
