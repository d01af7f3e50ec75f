//! Python bindings for the `susyqm` toolkit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use susyqm_core as core;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Grid", module = "susyqm", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid(core::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(x_min: f64, x_max: f64, n_points: usize) -> PyResult<Self> {
        core::make_grid(x_min, x_max, n_points).map(PyGrid).map_err(value_error)
    }

    #[getter]
    fn x_min(&self) -> f64 {
        self.0.x_min()
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.0.x_max()
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.0.n_points()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, {})", self.0.x_min(), self.0.x_max(), self.0.n_points())
    }
}

#[pyclass(name = "Superpotential", module = "susyqm", frozen, from_py_object)]
#[derive(Clone)]
struct PySuperpotential(core::Superpotential);

#[pymethods]
impl PySuperpotential {
    #[new]
    #[pyo3(signature = (name, params = Vec::new()))]
    fn new(name: &str, params: Vec<f64>) -> PyResult<Self> {
        core::Superpotential::from_name(name, &params)
            .map(PySuperpotential)
            .map_err(value_error)
    }

    /// Names accepted by the constructor.
    #[staticmethod]
    fn registry() -> Vec<&'static str> {
        core::Superpotential::registry().to_vec()
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn params(&self) -> Vec<f64> {
        self.0.params().to_vec()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.evaluate(x)
    }

    fn __repr__(&self) -> String {
        format!("Superpotential({:?}, {:?})", self.0.name(), self.0.params())
    }
}

#[pyclass(name = "EntanglementReport", module = "susyqm", frozen, get_all)]
struct PyEntanglementReport {
    sigma_mean: [f64; 3],
    schmidt: (f64, f64),
    concurrence_spin: f64,
    concurrence_overlap: Option<f64>,
    concurrence_svd: f64,
    overlap: Option<Complex64>,
}

impl From<core::EntanglementReport> for PyEntanglementReport {
    fn from(r: core::EntanglementReport) -> Self {
        Self {
            sigma_mean: r.sigma_mean,
            schmidt: r.schmidt,
            concurrence_spin: r.concurrence_spin,
            concurrence_overlap: r.concurrence_overlap,
            concurrence_svd: r.concurrence_svd,
            overlap: r.overlap,
        }
    }
}

/// Partner spectra of one factorized system, paired level by level.
#[pyclass(name = "PartnerSpectrum", module = "susyqm", frozen)]
struct PyPartnerSpectrum {
    sys: core::SusySystem,
    inner: core::PartnerSpectrum,
}

impl PyPartnerSpectrum {
    fn pair(&self, level: usize) -> PyResult<(&core::EigenPair, &core::EigenPair)> {
        self.inner
            .level(level)
            .ok_or_else(|| PyValueError::new_err(format!("level {level} outside 1..={}", self.inner.levels())))
    }

    /// `psi+` and its intertwined image `B^+ psi+ / sqrt(E)` at one level.
    fn mapped(&self, level: usize) -> PyResult<(core::Wavefunction, core::Wavefunction)> {
        let (plus, _) = self.pair(level)?;
        let minus = core::intertwine_down(&self.sys, plus)
            .and_then(|w| w.rescaled_to_unit())
            .map_err(value_error)?;
        Ok((plus.state.clone(), minus))
    }
}

#[pymethods]
impl PyPartnerSpectrum {
    #[getter]
    fn levels(&self) -> usize {
        self.inner.levels()
    }

    #[getter]
    fn e_plus(&self) -> Vec<f64> {
        self.inner.report.pairs.iter().map(|p| p.e_plus).collect()
    }

    #[getter]
    fn e_minus(&self) -> Vec<f64> {
        self.inner.report.pairs.iter().map(|p| p.e_minus).collect()
    }

    #[getter]
    fn gaps(&self) -> Vec<f64> {
        self.inner.report.pairs.iter().map(|p| p.gap).collect()
    }

    #[getter]
    fn minus_zero_levels(&self) -> Vec<f64> {
        self.inner.report.minus_zero_levels.clone()
    }

    #[getter]
    fn plus_zero_levels(&self) -> Vec<f64> {
        self.inner.report.plus_zero_levels.clone()
    }

    #[getter]
    fn zero_mode_energy(&self) -> Option<f64> {
        self.inner.report.zero_mode_energy()
    }

    /// Amplitudes of the `plus` or `minus` eigenstate at a 1-based level.
    fn state(&self, level: usize, partner: &str) -> PyResult<Vec<Complex64>> {
        let (plus, minus) = self.pair(level)?;
        match partner {
            "plus" => Ok(plus.state.amplitudes().to_vec()),
            "minus" => Ok(minus.state.amplitudes().to_vec()),
            other => Err(PyValueError::new_err(format!("partner must be 'plus' or 'minus', got {other:?}"))),
        }
    }

    /// `<psi+|psi->` between a level's eigenstate and its intertwined partner.
    fn overlap(&self, level: usize) -> PyResult<Complex64> {
        let (plus, minus) = self.mapped(level)?;
        core::inner_product(&plus, &minus).map_err(value_error)
    }

    /// All concurrence measures for `c1 psi+ |up> + c2 psi- |down>`.
    fn entangle(&self, level: usize, c1_abs: f64, phase: f64) -> PyResult<PyEntanglementReport> {
        let (plus, minus) = self.mapped(level)?;
        let (c1, c2) = core::coefficients(c1_abs, phase).map_err(value_error)?;
        let overlap = core::inner_product(&plus, &minus).map_err(value_error)?;
        let state = core::build_energy_eigenstate(c1, c2, &plus, &minus).map_err(value_error)?;
        core::entanglement_report(&state, Some((c1, c2, overlap)))
            .map(Into::into)
            .map_err(value_error)
    }

    /// Concurrences of the four supercharge eigenstates
    /// `(Q1 +, Q1 -, Q2 +, Q2 -)` at a level.
    fn supercharge_concurrences(&self, level: usize) -> PyResult<[f64; 4]> {
        let (plus, minus) = self.mapped(level)?;
        let e = self.pair(level)?.0.energy;
        let st = core::supercharge_eigenstates(&self.sys, e, &plus, &minus).map_err(value_error)?;
        let mut out = [0.0; 4];
        for (o, s) in out.iter_mut().zip([&st.q1_plus, &st.q1_minus, &st.q2_plus, &st.q2_minus]) {
            *o = core::concurrence_from_spin(s).map_err(value_error)?;
        }
        Ok(out)
    }
}

#[pyclass(name = "SusySystem", module = "susyqm", frozen)]
struct PySusySystem(core::SusySystem);

#[pymethods]
impl PySusySystem {
    #[new]
    fn new(superpotential: PySuperpotential, grid: PyGrid) -> PyResult<Self> {
        core::SusySystem::new(superpotential.0, grid.0)
            .map(PySusySystem)
            .map_err(value_error)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    #[getter]
    fn superpotential(&self) -> PySuperpotential {
        PySuperpotential(self.0.superpotential().clone())
    }

    /// Lowest `k` eigenvalues of `H+` (`partner = "plus"`) or `H-`.
    fn eigenvalues(&self, partner: &str, k: usize) -> PyResult<Vec<f64>> {
        let which = match partner {
            "plus" => core::Partner::Plus,
            "minus" => core::Partner::Minus,
            other => return Err(PyValueError::new_err(format!("partner must be 'plus' or 'minus', got {other:?}"))),
        };
        core::solve_partner(&self.0, which, k)
            .map(|v| v.into_iter().map(|p| p.energy).collect())
            .map_err(value_error)
    }

    /// Solves and pairs both partners; raises when a level has no partner
    /// within `tol`.
    #[pyo3(signature = (levels, tol = core::PAIRING_TOLERANCE))]
    fn spectrum(&self, py: Python<'_>, levels: usize, tol: f64) -> PyResult<PyPartnerSpectrum> {
        let inner = py
            .detach(|| core::solve_partners(&self.0, levels, tol))
            .map_err(value_error)?;
        Ok(PyPartnerSpectrum {
            sys: self.0.clone(),
            inner,
        })
    }

    /// Real amplitudes of the normalized zero mode of `H-`.
    fn zero_mode(&self) -> PyResult<Vec<f64>> {
        core::zero_mode(&self.0)
            .map(|w| w.amplitudes().iter().map(|a| a.re).collect())
            .map_err(value_error)
    }

    /// `||H- psi0||` of the zero mode.
    fn zero_mode_residual(&self) -> PyResult<f64> {
        core::zero_mode(&self.0)
            .and_then(|w| core::residual_norm(self.0.h_minus(), 0.0, &w))
            .map_err(value_error)
    }

    /// Largest elementwise deviation of the supercharge identities
    /// `Q1^2 = Q2^2 = H`, `{Q1, Q2} = 0`, `{T, Q1} = 0`.
    fn algebra_deviation(&self) -> f64 {
        let (q1, q2) = self.0.supercharges();
        let h = self.0.hamiltonian();
        let t = self.0.witten_parity();
        [
            q1.matmul(&q1).max_abs_diff(&h),
            q2.matmul(&q2).max_abs_diff(&h),
            core::OperatorMatrix::anticommutator(&q1, &q2).max_abs(),
            core::OperatorMatrix::anticommutator(&t, &q1).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[pyclass(name = "JaynesCummings", module = "susyqm", frozen)]
struct PyJaynesCummings(core::JcSystem);

#[pymethods]
impl PyJaynesCummings {
    #[new]
    #[pyo3(signature = (omega = 1.0, gamma = 0.1, n_max = 64))]
    fn new(omega: f64, gamma: f64, n_max: usize) -> PyResult<Self> {
        core::build_jc(omega, gamma, n_max)
            .map(PyJaynesCummings)
            .map_err(value_error)
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[getter]
    fn ground_energy(&self) -> f64 {
        self.0.ground_energy()
    }

    /// `(E+, E-)` of the doublet with `n` excitations.
    fn analytic_spectrum(&self, n: usize) -> PyResult<(f64, f64)> {
        self.0.analytic_spectrum(n).map_err(value_error)
    }

    /// One row per analytic level inside the guard band.
    fn compare(&self, py: Python<'_>) -> PyResult<Vec<BTreeMap<&'static str, Py<PyAny>>>> {
        let cmp = py.detach(|| core::compare_spectrum(&self.0)).map_err(value_error)?;
        let mut rows = Vec::with_capacity(cmp.levels.len());
        for l in cmp.levels {
            let mut row = BTreeMap::new();
            row.insert("n", l.n.into_pyobject(py)?.into_any().unbind());
            row.insert("branch", l.branch.as_str().into_pyobject(py)?.into_any().unbind());
            for (k, v) in [
                ("e_analytic", l.e_analytic),
                ("e_numeric", l.e_numeric),
                ("gap", l.gap),
                ("fidelity", l.fidelity),
                ("concurrence", l.concurrence),
            ] {
                row.insert(k, v.into_pyobject(py)?.into_any().unbind());
            }
            row.insert("matched", pyo3::types::PyBool::new(py, l.matched).to_owned().into_any().unbind());
            rows.push(row);
        }
        Ok(rows)
    }

    /// Deviations of the algebra identities on the certified subspace.
    fn algebra(&self) -> BTreeMap<&'static str, f64> {
        let r = core::verify_susy_algebra(&self.0);
        BTreeMap::from([
            ("q1_sq_minus_q2_sq", r.q1_sq_minus_q2_sq),
            ("anticommutator_q1_q2", r.anticommutator_q1_q2),
            ("commutator_q_h0", r.commutator_q_h0),
            ("anticommutator_sigma_z_q", r.anticommutator_sigma_z_q),
            ("commutator_q_h", r.commutator_q_h),
            ("h0_minus_omega_q_sq", r.h0_minus_omega_q_sq),
            ("h_minus_closed_form", r.h_minus_closed_form),
            ("h_minus_parts", r.h_minus_parts),
            ("commutator_nexc_h", r.commutator_nexc_h),
        ])
    }
}

/// `2 |c1| |c2| sqrt(1 - |<psi+|psi->|^2)`.
#[pyfunction]
fn concurrence_overlap(c1: Complex64, c2: Complex64, overlap: Complex64) -> PyResult<f64> {
    core::concurrence_overlap(c1, c2, overlap).map_err(value_error)
}

/// Largest concurrence reachable for a given partner overlap.
#[pyfunction]
fn c_max(overlap: Complex64) -> PyResult<f64> {
    core::c_max(overlap).map_err(value_error)
}

/// `(c1, c2)` from `|c1|` and the relative phase.
#[pyfunction]
fn coefficients(c1_abs: f64, phase: f64) -> PyResult<(Complex64, Complex64)> {
    core::coefficients(c1_abs, phase).map_err(value_error)
}

#[pymodule]
fn susyqm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PySuperpotential>()?;
    m.add_class::<PySusySystem>()?;
    m.add_class::<PyPartnerSpectrum>()?;
    m.add_class::<PyEntanglementReport>()?;
    m.add_class::<PyJaynesCummings>()?;
    m.add_function(wrap_pyfunction!(concurrence_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(c_max, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add("ZERO_MODE_THRESHOLD", core::ZERO_MODE_THRESHOLD)?;
    m.add("PAIRING_TOLERANCE", core::PAIRING_TOLERANCE)?;
    Ok(())
}
