//! Python bindings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use matlogic::decide::{has_theorems, theorem_inclusion, weak_equivalence};
use matlogic::eqlogic::{decide_ground_equational, Equality};
use matlogic::intprover::{g3_decide, glivenko_check, rn_classify, rn_power, ProveOutcome, RnClass, RnIndex, Sequent};
use matlogic::lang::{parse_formula, Signature};
use matlogic::matrix::{consequence_with_caps, make_preset, Verdict};
use matlogic::{Caps, Error};

fn err(e: Error) -> PyErr {
    if e.is_cap() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A formula over `~ & | -> top bot`.
#[pyclass(name = "Formula", module = "matlogic_py", frozen)]
struct PyFormula {
    inner: matlogic::lang::Formula,
}

#[pymethods]
impl PyFormula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = parse_formula(text, &Signature::boolean_with_constants()).map_err(err)?;
        Ok(PyFormula { inner })
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn variables(&self) -> Vec<u32> {
        self.inner.variables().into_iter().collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }
}

/// A logical matrix: a finite algebra with a designated set.
#[pyclass(name = "Matrix", module = "matlogic_py", frozen)]
struct PyMatrix {
    inner: matlogic::matrix::Matrix,
}

#[pymethods]
impl PyMatrix {
    /// One of B2, L3, L3modal, G<n>, LC<m>.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: make_preset(name).map_err(err)?,
        })
    }

    /// A matrix from a workspace JSON file.
    #[staticmethod]
    fn from_workspace(path: &str, name: &str) -> PyResult<Self> {
        let ws = matlogic::cli::load_spec(std::path::Path::new(path)).map_err(err)?;
        let inner = ws
            .matrices
            .get(name)
            .cloned()
            .ok_or_else(|| PyValueError::new_err(format!("no matrix named `{name}`")))?;
        Ok(PyMatrix { inner })
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.algebra().elements().to_vec()
    }

    #[getter]
    fn designated(&self) -> Vec<String> {
        let alg = self.inner.algebra();
        self.inner
            .designated()
            .into_iter()
            .map(|i| alg.element_name(i).to_string())
            .collect()
    }

    /// Value of a formula under `{"p1": element, ...}`.
    fn evaluate(&self, formula: &str, assignment: std::collections::HashMap<String, String>) -> PyResult<String> {
        let alg = self.inner.algebra();
        let f = parse_formula(formula, alg.signature()).map_err(err)?;
        let mut a = matlogic::algebra::Assignment::new();
        for (var, val) in assignment {
            let v = parse_formula(&var, alg.signature())
                .map_err(err)?
                .as_var()
                .ok_or_else(|| PyValueError::new_err(format!("`{var}` is not a variable")))?;
            let x = alg
                .element_index(&val)
                .ok_or_else(|| PyValueError::new_err(format!("`{val}` is not an element")))?;
            a.insert(v, x);
        }
        Ok(alg.element_name(alg.evaluate(&f, &a).map_err(err)?).to_string())
    }

    /// `None` if `premises ⊨ formula`, otherwise the first refuting assignment.
    #[pyo3(signature = (formula, premises = Vec::new()))]
    fn refute(
        &self,
        formula: &str,
        premises: Vec<String>,
    ) -> PyResult<Option<std::collections::BTreeMap<String, String>>> {
        let alg = self.inner.algebra();
        let sig = alg.signature();
        let f = parse_formula(formula, sig).map_err(err)?;
        let prem = premises
            .iter()
            .map(|p| parse_formula(p, sig))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(
            match consequence_with_caps(&self.inner, &prem, &f, &Caps::default()).map_err(err)? {
                Verdict::Holds => None,
                Verdict::Fails { assignment, .. } => Some(
                    assignment
                        .into_iter()
                        .map(|(v, x)| (format!("p{v}"), alg.element_name(x).to_string()))
                        .collect(),
                ),
            },
        )
    }

    fn is_valid(&self, formula: &str) -> PyResult<bool> {
        Ok(self.refute(formula, Vec::new())?.is_none())
    }

    /// Report `{answer, witness, stats}` of the theorem-existence check.
    fn has_theorems<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = has_theorems(&self.inner, &Caps::default()).map_err(err)?;
        json_to_py(py, &r.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Matrix(elements={:?}, designated={:?})",
            self.elements(),
            self.designated()
        )
    }
}

/// Report of `Thm[m1] ⊆ Thm[m2]`.
#[pyfunction]
#[pyo3(signature = (m1, m2, var_bound = None))]
fn theorem_inclusion_report<'py>(
    py: Python<'py>,
    m1: &PyMatrix,
    m2: &PyMatrix,
    var_bound: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let r = theorem_inclusion(&m1.inner, &m2.inner, &Caps::default(), var_bound).map_err(err)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
fn weak_equivalence_report<'py>(py: Python<'py>, m1: &PyMatrix, m2: &PyMatrix) -> PyResult<Bound<'py, PyAny>> {
    let r = weak_equivalence(&m1.inner, &m2.inner, &Caps::default()).map_err(err)?;
    json_to_py(py, &r.to_json())
}

/// Decide a formula or a sequent `A, B => C` in intuitionistic logic.
#[pyfunction]
fn int_provable(text: &str) -> PyResult<bool> {
    let s = if text.contains("=>") {
        Sequent::parse(text).map_err(err)?
    } else {
        Sequent::theorem(parse_formula(text, &Signature::boolean()).map_err(err)?)
    };
    Ok(matches!(
        g3_decide(&s, &Caps::default()).map_err(err)?,
        ProveOutcome::Proved(_)
    ))
}

/// The proof tree as nested dicts, or `None`.
#[pyfunction]
fn int_proof<'py>(py: Python<'py>, text: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
    let s = Sequent::parse(text)
        .or_else(|_| parse_formula(text, &Signature::boolean()).map(Sequent::theorem))
        .map_err(err)?;
    match g3_decide(&s, &Caps::default()).map_err(err)? {
        ProveOutcome::Proved(t) => Ok(Some(json_to_py(py, &t.to_json())?)),
        ProveOutcome::Unprovable => Ok(None),
    }
}

#[pyfunction]
fn rn_power_text(index: &str) -> PyResult<String> {
    let idx: RnIndex = index.parse().map_err(err)?;
    Ok(rn_power(idx, matlogic::intprover::RN_BOUND).map_err(err)?.to_string())
}

/// `"omega"`, a number as text, or `None` when no power up to `bound` matches.
#[pyfunction]
#[pyo3(signature = (formula, bound = 16))]
fn rn_class(formula: &str, bound: usize) -> PyResult<Option<String>> {
    let f = parse_formula(formula, &Signature::boolean()).map_err(err)?;
    Ok(match rn_classify(&f, bound, &Caps::default()).map_err(err)? {
        RnClass::Index(i) => Some(i.to_string()),
        RnClass::ExceedsBound => None,
    })
}

/// `(classical tautology, ~~f provable in Int)`.
#[pyfunction]
fn glivenko(formula: &str) -> PyResult<(bool, bool)> {
    let f = parse_formula(formula, &Signature::boolean()).map_err(err)?;
    glivenko_check(&f, &Caps::default()).map_err(err)
}

/// Ground equational consequence; `signature` as `"f/1,g/2"`.
#[pyfunction]
#[pyo3(signature = (premises, goal, signature = "f/1,g/2"))]
fn ground_equational(premises: Vec<String>, goal: &str, signature: &str) -> PyResult<bool> {
    let mut sig = Signature::new();
    for item in signature.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arity) = item
            .rsplit_once('/')
            .ok_or_else(|| PyValueError::new_err(format!("`{item}` is not name/arity")))?;
        let arity = arity
            .parse()
            .map_err(|_| PyValueError::new_err(format!("`{arity}` is not an arity")))?;
        sig.add(name, arity).map_err(err)?;
    }
    let prem = premises
        .iter()
        .map(|p| Equality::parse(p, &sig))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let e = Equality::parse(goal, &sig).map_err(err)?;
    Ok(decide_ground_equational(&prem, &e).map_err(err)?.derivable)
}

/// Run a command line (without the program name); returns `(exit code, report)`.
#[pyfunction]
fn run_command(argv: Vec<String>) -> (i32, String) {
    matlogic::cli::run_command(argv)
}

#[pymodule]
fn matlogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(theorem_inclusion_report, m)?)?;
    m.add_function(wrap_pyfunction!(weak_equivalence_report, m)?)?;
    m.add_function(wrap_pyfunction!(int_provable, m)?)?;
    m.add_function(wrap_pyfunction!(int_proof, m)?)?;
    m.add_function(wrap_pyfunction!(rn_power_text, m)?)?;
    m.add_function(wrap_pyfunction!(rn_class, m)?)?;
    m.add_function(wrap_pyfunction!(glivenko, m)?)?;
    m.add_function(wrap_pyfunction!(ground_equational, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
