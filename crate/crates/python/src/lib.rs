use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use nilamalgam_core::abelian::{abelianize_amalgam, abelianize_pc};
use nilamalgam_core::amalgam::Amalgam as CoreAmalgam;
use nilamalgam_core::certificate::{self, Certificate as CoreCertificate, CHECKS};
use nilamalgam_core::error::Error;
use nilamalgam_core::pc::PcGroup as CorePcGroup;
use nilamalgam_core::word::parse_presentation;
use nilamalgam_core::workspace::{Workspace as CoreWorkspace, BUILTINS};
use nilamalgam_core::zmatrix::{hermite_normal_form, smith_diagonal, smith_normal_form, IntMatrix};
use nilamalgam_core::CONVENTION;

create_exception!(nilamalgam, NilamalgamError, PyException);

fn py_err(e: Error) -> PyErr {
    NilamalgamError::new_err(e.to_string())
}

/// A nilpotent group given by a consistent polycyclic presentation.
#[pyclass(frozen, module = "nilamalgam")]
struct PcGroup(Arc<CorePcGroup>);

#[pymethods]
impl PcGroup {
    /// Parse `group NAME { gens: ...; rels: ... }`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let p = parse_presentation(text).map_err(py_err)?;
        Ok(PcGroup(Arc::new(CorePcGroup::from_presentation(&p).map_err(py_err)?)))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn gens(&self) -> Vec<String> {
        self.0.gens().to_vec()
    }

    #[getter]
    fn hirsch_length(&self) -> usize {
        self.0.hirsch_length()
    }

    #[getter]
    fn nilpotency_class(&self) -> usize {
        self.0.class()
    }

    fn is_abelian(&self) -> bool {
        self.0.is_abelian()
    }

    fn normal_form(&self, word: &str) -> PyResult<String> {
        Ok(self.0.fmt_elem(&self.0.parse(word).map_err(py_err)?))
    }

    fn exponents(&self, word: &str) -> PyResult<Vec<BigInt>> {
        Ok(self.0.parse(word).map_err(py_err)?.into_exponents())
    }

    fn equal(&self, u: &str, v: &str) -> PyResult<bool> {
        Ok(self.0.parse(u).map_err(py_err)? == self.0.parse(v).map_err(py_err)?)
    }

    /// The abelianization, e.g. `Z^2` or `Z/2 x Z`.
    fn abelianization(&self) -> String {
        abelianize_pc(&self.0).group.to_string()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// A generalized free product of pc groups amalgamating a common subgroup.
#[pyclass(frozen, module = "nilamalgam")]
struct Amalgam(Arc<CoreAmalgam>);

#[pymethods]
impl Amalgam {
    /// Two factors with `identify` a list of (word in A, word in B) pairs.
    #[staticmethod]
    fn from_identification(name: &str, a: &PcGroup, b: &PcGroup, identify: Vec<(String, String)>) -> PyResult<Self> {
        let pairs: Vec<(&str, &str)> = identify.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
        let g = CoreAmalgam::from_identification_words(name, a.0.clone(), b.0.clone(), &pairs).map_err(py_err)?;
        Ok(Amalgam(Arc::new(g)))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn factors(&self) -> Vec<PcGroup> {
        self.0.factors().iter().map(|f| PcGroup(f.clone())).collect()
    }

    #[getter]
    fn letters(&self) -> Vec<String> {
        self.0.letters().to_vec()
    }

    fn normal_form(&self, word: &str) -> PyResult<String> {
        Ok(self.0.fmt_elem(&self.0.parse(word).map_err(py_err)?))
    }

    fn syllable_length(&self, word: &str) -> PyResult<usize> {
        Ok(self.0.parse(word).map_err(py_err)?.syllable_length())
    }

    fn is_trivial(&self, word: &str) -> PyResult<bool> {
        Ok(self.0.is_trivial(&self.0.parse_word(word).map_err(py_err)?))
    }

    fn equal(&self, u: &str, v: &str) -> PyResult<bool> {
        let p = |t: &str| self.0.parse_word(t).map_err(py_err);
        Ok(self.0.equal(&p(u)?, &p(v)?))
    }

    fn abelianization(&self) -> String {
        abelianize_amalgam(&self.0).group.to_string()
    }

    fn __repr__(&self) -> String {
        self.0.describe()
    }
}

/// A witness, trap or report produced by a check.
#[pyclass(frozen, module = "nilamalgam")]
struct Certificate(CoreCertificate);

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Certificate(CoreCertificate::from_json(text).map_err(py_err)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn kind(&self) -> String {
        format!("{:?}", self.0.kind).to_lowercase()
    }

    #[getter]
    fn check(&self) -> String {
        self.0.check.clone()
    }

    #[getter]
    fn target(&self) -> String {
        self.0.target.clone()
    }

    #[getter]
    fn verified(&self) -> bool {
        self.0.verified
    }

    #[getter]
    fn strategy(&self) -> Option<String> {
        self.0.strategy.map(|s| s.to_string())
    }

    #[getter]
    fn image(&self) -> Option<String> {
        self.0.image.clone()
    }

    #[getter]
    fn conclusion(&self) -> String {
        self.0.conclusion.clone()
    }

    #[getter]
    fn chain_length(&self) -> usize {
        self.0.chain.len()
    }

    /// Re-run the recorded checks; raises if the certificate does not hold.
    fn recheck(&self, workspace: &Workspace) -> PyResult<()> {
        certificate::recheck(&self.0, &workspace.0).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("<Certificate {} {} verified={}>", self.0.check, self.0.target, self.0.verified)
    }
}

/// Named groups, subgroups and amalgams loaded from JSON or a builtin.
#[pyclass(frozen, module = "nilamalgam")]
struct Workspace(CoreWorkspace);

#[pymethods]
impl Workspace {
    /// A path to a workspace file, or `builtin:NAME`.
    #[staticmethod]
    fn load(source: &str) -> PyResult<Self> {
        Ok(Workspace(CoreWorkspace::load(source).map_err(py_err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Workspace(CoreWorkspace::from_json(text).map_err(py_err)?))
    }

    #[getter]
    fn groups(&self) -> Vec<String> {
        self.0.groups.keys().cloned().collect()
    }

    #[getter]
    fn amalgams(&self) -> Vec<String> {
        self.0.amalgams.keys().cloned().collect()
    }

    fn group(&self, name: &str) -> PyResult<PcGroup> {
        self.0
            .groups
            .get(name)
            .map(|g| PcGroup(g.clone()))
            .ok_or_else(|| py_err(Error::Unresolved(name.to_string())))
    }

    fn amalgam(&self, name: &str) -> PyResult<Amalgam> {
        Ok(Amalgam(self.0.amalgam(name).map_err(py_err)?))
    }

    #[pyo3(signature = (check, target = None))]
    fn verify(&self, py: Python<'_>, check: &str, target: Option<&str>) -> PyResult<Certificate> {
        let cert = py.detach(|| certificate::verify(&self.0, check, target)).map_err(py_err)?;
        Ok(Certificate(cert))
    }

    #[pyo3(signature = (target, word, max_derived_length = 4, deterministic = true))]
    fn separate(
        &self,
        py: Python<'_>,
        target: &str,
        word: &str,
        max_derived_length: usize,
        deterministic: bool,
    ) -> PyResult<Certificate> {
        let cert = py
            .detach(|| certificate::separate_certificate(&self.0, target, word, max_derived_length, deterministic))
            .map_err(py_err)?;
        Ok(Certificate(cert))
    }
}

fn matrix(rows: &[Vec<BigInt>]) -> PyResult<IntMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(NilamalgamError::new_err("rows have different lengths"));
    }
    Ok(IntMatrix::from_rows(cols, rows))
}

/// Invariant factors (with zeros) of an integer matrix.
#[pyfunction]
fn smith_form(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    let (s, _, _) = smith_normal_form(&matrix(&rows)?);
    Ok(smith_diagonal(&s))
}

/// Row Hermite normal form.
#[pyfunction]
fn hermite_form(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
    let (h, _) = hermite_normal_form(&matrix(&rows)?);
    Ok(h.row_vecs())
}

#[pyfunction]
fn builtins() -> Vec<String> {
    BUILTINS.iter().map(|b| format!("builtin:{b}")).collect()
}

#[pyfunction]
fn checks() -> Vec<&'static str> {
    CHECKS.to_vec()
}

#[pymodule]
fn nilamalgam(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NilamalgamError", m.py().get_type::<NilamalgamError>())?;
    m.add("CONVENTION", CONVENTION)?;
    m.add_class::<PcGroup>()?;
    m.add_class::<Amalgam>()?;
    m.add_class::<Workspace>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(smith_form, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_form, m)?)?;
    m.add_function(wrap_pyfunction!(builtins, m)?)?;
    m.add_function(wrap_pyfunction!(checks, m)?)?;
    Ok(())
}
