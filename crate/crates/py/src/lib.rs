//! Python bindings for the aritoric toolkit: fan construction, cohomology,
//! exceptional-collection verification, Galois descent, and Sha computations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use aritoric::arith::{sha_norm_one_biquadratic, BiquadraticField, ShaMethod};
use aritoric::descent::{
    descend_collection, no_point_certificate, rationality_check, LiftObstruction,
    RationalityReport,
};
use aritoric::divclass::{cohomology, TDivisor};
use aritoric::excol::{
    ext_table, numerical_fullness, verify_exceptional_collection, ExtEngine,
};
use aritoric::fan::{fan_aut, is_complete, is_smooth};
use aritoric::formats::{read_action, read_collection, read_fan, resolve_action, write_fan};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A complete simplicial fan: rays plus maximal cones.
#[pyclass(name = "Fan")]
#[derive(Clone)]
struct PyFan {
    inner: aritoric::fan::Fan,
}

#[pymethods]
impl PyFan {
    /// Parse a fan document (the same JSON the CLI reads and writes).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFan { inner: read_fan(text).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        write_fan(&self.inner)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn rays(&self) -> Vec<Vec<i64>> {
        self.inner
            .rays
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x.clone()).unwrap()).collect())
            .collect()
    }

    #[getter]
    fn max_cones(&self) -> Vec<Vec<usize>> {
        self.inner.max_cones.clone()
    }

    fn is_smooth(&self) -> PyResult<bool> {
        is_smooth(&self.inner).map_err(value_err)
    }

    fn is_complete(&self) -> PyResult<bool> {
        is_complete(&self.inner).map_err(value_err)
    }

    /// Order of the automorphism group of the fan.
    fn aut_order(&self) -> PyResult<usize> {
        Ok(fan_aut(&self.inner).map_err(value_err)?.order())
    }

    /// Cohomology dimensions h^0..h^rank of the divisor with these ray
    /// coefficients.
    fn cohomology(&self, coeffs: Vec<i64>) -> PyResult<Vec<usize>> {
        if coeffs.len() != self.inner.rays.len() {
            return Err(value_err(format!(
                "expected {} coefficients, got {}",
                self.inner.rays.len(),
                coeffs.len()
            )));
        }
        let d = TDivisor::from_i64(&self.inner, &coeffs);
        Ok(cohomology(&self.inner, &d).map_err(value_err)?.dims)
    }

    fn __repr__(&self) -> String {
        format!(
            "Fan(rank={}, rays={}, max_cones={})",
            self.inner.rank,
            self.inner.rays.len(),
            self.inner.max_cones.len()
        )
    }
}

/// An ordered collection of twisted complete-intersection objects on a fan.
#[pyclass(name = "Collection")]
#[derive(Clone)]
struct PyCollection {
    fan: aritoric::fan::Fan,
    inner: aritoric::excol::Collection,
}

#[pymethods]
impl PyCollection {
    /// Parse a collection document against its fan document.
    #[staticmethod]
    fn from_json(text: &str, fan: &PyFan) -> PyResult<Self> {
        let fan_text = write_fan(&fan.inner);
        let inner = read_collection(text, &fan.inner, &fan_text).map_err(value_err)?;
        Ok(PyCollection { fan: fan.inner.clone(), inner })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Ext dimensions between two objects, by label.
    fn ext_dims(&self, from_label: &str, to_label: &str) -> PyResult<Vec<usize>> {
        let idx = |label: &str| {
            self.inner
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| value_err(format!("no object labeled '{label}'")))
        };
        let (i, j) = (idx(from_label)?, idx(to_label)?);
        let engine = ExtEngine::new(&self.fan);
        Ok(engine
            .ext_dims(&self.inner.objects[i], &self.inner.objects[j])
            .map_err(value_err)?
            .dims)
    }

    /// Check exceptionality and numerical fullness; returns a dict with
    /// `passed`, `strong`, `failures`, `blocks`, and `numerically_full`.
    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let engine = ExtEngine::new(&self.fan);
        let report = verify_exceptional_collection(&engine, &self.inner).map_err(value_err)?;
        let fullness = numerical_fullness(&self.fan, &report.table);
        let out = PyDict::new_bound(py);
        out.set_item("passed", report.passed)?;
        out.set_item("strong", report.strong)?;
        out.set_item("failures", report.failures.clone())?;
        out.set_item("blocks", report.blocks.clone())?;
        out.set_item("numerically_full", fullness.passed)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Collection(objects={})", self.inner.len())
    }
}

/// A finite group acting on a fan by automorphisms, with an optional
/// splitting-field label.
#[pyclass(name = "GaloisAction")]
struct PyGaloisAction {
    inner: aritoric::descent::GaloisAction,
}

#[pymethods]
impl PyGaloisAction {
    /// Parse an action document (the same JSON the CLI reads) for a fan.
    #[staticmethod]
    fn from_json(text: &str, fan: &PyFan) -> PyResult<Self> {
        let file = read_action(text).map_err(value_err)?;
        let inner = resolve_action(&file, &fan.inner).map_err(value_err)?;
        Ok(PyGaloisAction { inner })
    }

    #[getter]
    fn group_order(&self) -> usize {
        self.inner.group.order()
    }

    /// Group the collection into Galois orbits and compute lift
    /// obstructions; returns a dict with `orbits` and `all_vanished`.
    fn descend<'py>(
        &self,
        py: Python<'py>,
        fan: &PyFan,
        collection: &PyCollection,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report =
            descend_collection(&self.inner, &fan.inner, &collection.inner).map_err(value_err)?;
        let orbits = PyList::empty_bound(py);
        for orbit in &report.orbits {
            let entry = PyDict::new_bound(py);
            entry.set_item("members", orbit.members.clone())?;
            entry.set_item("labels", orbit.labels.clone())?;
            entry.set_item("etale_degree", orbit.etale_degree)?;
            entry.set_item("stabilizer_order", orbit.stabilizer.len())?;
            entry.set_item(
                "obstruction_vanished",
                matches!(orbit.obstruction, LiftObstruction::Vanished { .. }),
            )?;
            orbits.append(entry)?;
        }
        let out = PyDict::new_bound(py);
        out.set_item("orbits", orbits)?;
        out.set_item("all_vanished", report.all_vanished)?;
        Ok(out)
    }

    /// Quotient-of-quasi-split rationality criterion; returns a dict with
    /// `rational` plus either `ray_orbit_degrees` or `nontrivial_elements`.
    fn rationality<'py>(&self, py: Python<'py>, fan: &PyFan) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new_bound(py);
        match rationality_check(&fan.inner, &self.inner) {
            RationalityReport::Rational { ray_orbit_degrees } => {
                out.set_item("rational", true)?;
                out.set_item("ray_orbit_degrees", ray_orbit_degrees)?;
            }
            RationalityReport::Inconclusive { nontrivial_elements } => {
                out.set_item("rational", false)?;
                out.set_item("nontrivial_elements", nontrivial_elements)?;
            }
        }
        Ok(out)
    }

    /// Run the full no-rational-point certificate pipeline; returns a dict
    /// with `certified`, `statements`, `reason`, and `zhe_trivial`.
    fn certificate<'py>(
        &self,
        py: Python<'py>,
        fan: &PyFan,
        collection: &PyCollection,
    ) -> PyResult<Bound<'py, PyDict>> {
        use aritoric::descent::FieldLabel;
        use aritoric::zlattice::AbelianGroupInvariants;
        let sha = match self.inner.field_label {
            Some(FieldLabel::Biquadratic(a, b)) => {
                let field = BiquadraticField::new(a, b).map_err(value_err)?;
                sha_norm_one_biquadratic(&field).map_err(value_err)?.group
            }
            _ => AbelianGroupInvariants::trivial(),
        };
        let report = no_point_certificate(&fan.inner, &self.inner, &collection.inner, &sha);
        let out = PyDict::new_bound(py);
        out.set_item("certified", report.certified)?;
        out.set_item("statements", report.statements.clone())?;
        out.set_item("reason", report.reason.clone())?;
        out.set_item("zhe_trivial", sha.is_trivial())?;
        Ok(out)
    }
}

/// Build the Weyl-chamber fan of type A_n (n = 1, 2, or 3).
#[pyfunction]
fn build_an_fan(n: usize) -> PyResult<PyFan> {
    Ok(PyFan { inner: aritoric::fan::build_an_fan(n).map_err(value_err)? })
}

/// Build the bundled exceptional collection on the type A_n fan; returns
/// `(fan, collection)`.
#[pyfunction]
fn build_ct_collection(n: usize) -> PyResult<(PyFan, PyCollection)> {
    let (fan, inner) = aritoric::excol::build_ct_collection(n).map_err(value_err)?;
    Ok((PyFan { inner: fan.clone() }, PyCollection { fan, inner }))
}

/// Sha^1 of the norm-one torus of Q(sqrt(a), sqrt(b)); returns a dict with
/// `trivial`, `torsion`, and `method`.
#[pyfunction]
fn sha_biquadratic(py: Python<'_>, a: i64, b: i64) -> PyResult<Bound<'_, PyDict>> {
    let field = BiquadraticField::new(a, b).map_err(value_err)?;
    let result = sha_norm_one_biquadratic(&field).map_err(value_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("trivial", result.group.is_trivial())?;
    out.set_item(
        "torsion",
        result.group.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "method",
        match result.method {
            ShaMethod::AllCyclicDecomposition => "all_cyclic_decomposition",
            ShaMethod::NoncyclicDecompositionFound => "noncyclic_decomposition_found",
        },
    )?;
    Ok(out)
}

/// Full Ext table of a collection as nested lists of dimension vectors.
#[pyfunction]
fn collection_ext_table(
    fan: &PyFan,
    collection: &PyCollection,
) -> PyResult<Vec<Vec<Vec<usize>>>> {
    let engine = ExtEngine::new(&fan.inner);
    let table = ext_table(&engine, &collection.inner).map_err(value_err)?;
    Ok(table
        .into_iter()
        .map(|row| row.into_iter().map(|d| d.dims).collect())
        .collect())
}

#[pymodule]
fn aritoric_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFan>()?;
    m.add_class::<PyCollection>()?;
    m.add_class::<PyGaloisAction>()?;
    m.add_function(wrap_pyfunction!(build_an_fan, m)?)?;
    m.add_function(wrap_pyfunction!(build_ct_collection, m)?)?;
    m.add_function(wrap_pyfunction!(sha_biquadratic, m)?)?;
    m.add_function(wrap_pyfunction!(collection_ext_table, m)?)?;
    Ok(())
}
