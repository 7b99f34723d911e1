//! Python bindings for `gkcat`. Terms cross the boundary as text in the term
//! syntax, traces as JSON and matrices as lists of rows.

use std::sync::Arc;

use gkcat::model::{soundness_check_trace, validate_model, MatrixModel};
use gkcat::normalform::{is_normal_sum, normalize_sum_traced};
use gkcat::presentation::Presentation;
use gkcat::rewrite::{check_trace, decide_equiv, trace_from_json, trace_to_json, Budget, Verdict};
use gkcat::terms::{add, canonical_sum_form, negate, parse_sum, product, FormalSum};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(
    gkcat,
    GkError,
    PyException,
    "Malformed input or ill-typed term."
);

fn err(e: impl std::fmt::Display) -> PyErr {
    GkError::new_err(e.to_string())
}

/// A parsed presentation. Immutable.
#[pyclass(frozen, module = "gkcat", name = "Presentation")]
pub struct Pres {
    inner: Arc<Presentation>,
}

impl Pres {
    fn sum(&self, text: &str) -> PyResult<FormalSum> {
        parse_sum(&self.inner, text).map_err(err)
    }

    fn text(&self, s: &FormalSum) -> String {
        s.to_text(&self.inner)
    }
}

#[pymethods]
impl Pres {
    #[new]
    pub fn new(text: &str) -> PyResult<Self> {
        let inner = Presentation::parse(text).map_err(err)?;
        Ok(Pres {
            inner: Arc::new(inner),
        })
    }

    #[staticmethod]
    pub fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| err(format!("{path}: {e}")))?;
        Self::new(&text).map_err(|e| err(format!("{path}:{e}")))
    }

    /// Violations, one line each; empty when valid.
    pub fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.inner.validate().is_valid()
    }

    pub fn objects(&self) -> Vec<String> {
        self.inner
            .object_ids()
            .map(|o| self.inner.obj_name(o).to_string())
            .collect()
    }

    pub fn homs(&self) -> Vec<String> {
        self.inner
            .hom_ids()
            .map(|h| self.inner.hom_decl(h).name.clone())
            .collect()
    }

    pub fn to_dsl(&self) -> String {
        self.inner.to_dsl()
    }

    /// Canonical form of a term.
    pub fn canonical(&self, term: &str) -> PyResult<String> {
        Ok(self.text(&canonical_sum_form(&self.sum(term)?)))
    }

    /// `a;b`: first `a`, then `b`.
    pub fn product(&self, a: &str, b: &str) -> PyResult<String> {
        let s = product(&self.inner, &self.sum(a)?, &self.sum(b)?).map_err(err)?;
        Ok(self.text(&canonical_sum_form(&s)))
    }

    pub fn add(&self, a: &str, b: &str) -> PyResult<String> {
        let s = add(&self.inner, &self.sum(a)?, &self.sum(b)?).map_err(err)?;
        Ok(self.text(&canonical_sum_form(&s)))
    }

    pub fn negate(&self, a: &str) -> PyResult<String> {
        Ok(self.text(&canonical_sum_form(&negate(&self.sum(a)?))))
    }

    pub fn normalize(&self, term: &str) -> PyResult<String> {
        let (n, _) = normalize_sum_traced(&self.inner, &self.sum(term)?).map_err(err)?;
        Ok(self.text(&n))
    }

    /// Normal form together with the derivation as JSON.
    pub fn normalize_traced(&self, term: &str) -> PyResult<(String, String)> {
        let (n, t) = normalize_sum_traced(&self.inner, &self.sum(term)?).map_err(err)?;
        Ok((self.text(&n), trace_to_json(&self.inner, &t)))
    }

    pub fn is_normal(&self, term: &str) -> PyResult<bool> {
        Ok(is_normal_sum(&self.inner, &self.sum(term)?))
    }

    /// The proof as JSON when one is found within the budget, else `None`.
    #[pyo3(signature = (left, right, depth = 4, max_states = 200_000, expansion_context = 0))]
    pub fn equiv(
        &self,
        py: Python<'_>,
        left: &str,
        right: &str,
        depth: usize,
        max_states: usize,
        expansion_context: usize,
    ) -> PyResult<Option<String>> {
        let (l, r) = (self.sum(left)?, self.sum(right)?);
        let budget = Budget {
            depth,
            max_states,
            expansion_context,
        };
        let p = Arc::clone(&self.inner);
        let verdict = py
            .detach(move || decide_equiv(&p, &l, &r, &budget))
            .map_err(err)?;
        Ok(match verdict {
            Verdict::Equivalent(t) => Some(trace_to_json(&self.inner, &t)),
            Verdict::Unknown(_) => None,
        })
    }

    /// Replays a JSON trace; raises with the failing step when it does not
    /// check.
    pub fn check_trace(&self, trace_json: &str) -> PyResult<usize> {
        let t = trace_from_json(&self.inner, trace_json).map_err(err)?;
        check_trace(&self.inner, &t).map_err(err)?;
        Ok(t.len())
    }

    pub fn __repr__(&self) -> String {
        format!(
            "<Presentation: {} objects, {} homs>",
            self.inner.object_ids().count(),
            self.inner.hom_ids().count()
        )
    }
}

/// An integer-matrix model of a presentation.
#[pyclass(frozen, module = "gkcat")]
pub struct Model {
    pres: Arc<Presentation>,
    inner: MatrixModel,
}

#[pymethods]
impl Model {
    #[new]
    pub fn new(pres: &Pres, json: &str) -> PyResult<Self> {
        let inner = MatrixModel::from_json(&pres.inner, json).map_err(err)?;
        Ok(Model {
            pres: Arc::clone(&pres.inner),
            inner,
        })
    }

    #[staticmethod]
    pub fn from_file(pres: &Pres, path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| err(format!("{path}: {e}")))?;
        Self::new(pres, &text)
    }

    /// Violated conditions as `(label, description)` pairs; empty when valid.
    pub fn validate(&self) -> PyResult<Vec<(char, String)>> {
        let report = validate_model(&self.pres, &self.inner).map_err(err)?;
        Ok(report
            .violations
            .iter()
            .map(|v| (v.condition, v.to_string()))
            .collect())
    }

    pub fn eval(&self, term: &str) -> PyResult<Vec<Vec<i64>>> {
        let s = parse_sum(&self.pres, term).map_err(err)?;
        let m = gkcat::model::eval(&self.pres, &self.inner, &s).map_err(err)?;
        Ok(m.to_rows())
    }

    /// True when every state of the trace has the same value.
    pub fn check_trace(&self, trace_json: &str) -> PyResult<bool> {
        let t = trace_from_json(&self.pres, trace_json).map_err(err)?;
        soundness_check_trace(&self.pres, &self.inner, &t).map_err(err)
    }

    pub fn to_json(&self) -> String {
        self.inner.to_json(&self.pres)
    }
}

/// Runs the command line; returns the exit code and the output text.
#[pyfunction]
pub fn run_cli(args: Vec<String>) -> (i32, String) {
    let argv = std::iter::once("gk".to_string()).chain(args);
    let out = gkcat::cli::run_cli(argv);
    (out.code, out.text)
}

#[pymodule]
#[pyo3(name = "gkcat")]
fn gkcat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pres>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("GkError", m.py().get_type::<GkError>())?;
    Ok(())
}
