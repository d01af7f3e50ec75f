//! Spin-mode entanglement of two-component states: spin expectation, Schmidt
//! coefficients and concurrence by three independent routes.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{inner_product, Support, Wavefunction};
use crate::operator::OperatorMatrix;
use crate::spectral::ZERO_MODE_THRESHOLD;
use crate::susy::SusySystem;

const NORM_TOL: f64 = 1e-12;
const RANGE_TOL: f64 = 1e-9;

/// `phi_up |up> + phi_down |down>` with a shared support.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    up: Wavefunction,
    down: Wavefunction,
}

impl SpinorState {
    pub fn new(up: Wavefunction, down: Wavefunction) -> Result<Self> {
        if up.support() != down.support() {
            return Err(Error::SupportMismatch);
        }
        let norm_sqr = up.norm_sqr() + down.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { up, down })
    }

    /// Splits a stacked `(up, down)` vector of length `2 * support.len()`.
    pub fn from_vector(support: Support, v: &[Complex64]) -> Result<Self> {
        let n = support.len();
        if v.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: v.len(),
            });
        }
        Self::new(
            Wavefunction::new(support, v[..n].to_vec())?,
            Wavefunction::new(support, v[n..].to_vec())?,
        )
    }

    pub fn up(&self) -> &Wavefunction {
        &self.up
    }

    pub fn down(&self) -> &Wavefunction {
        &self.down
    }

    pub fn support(&self) -> Support {
        *self.up.support()
    }

    pub fn to_vector(&self) -> Vec<Complex64> {
        let mut v = self.up.amplitudes().to_vec();
        v.extend_from_slice(self.down.amplitudes());
        v
    }

    /// `op` applied to the stacked vector, split back into components. The
    /// result is not renormalized.
    pub fn apply(&self, op: &OperatorMatrix) -> Result<(Wavefunction, Wavefunction)> {
        let n = self.up.len();
        if op.dim() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: op.dim(),
            });
        }
        let out = op.apply(&self.to_vector());
        Ok((
            Wavefunction::new(self.support(), out[..n].to_vec())?,
            Wavefunction::new(self.support(), out[n..].to_vec())?,
        ))
    }

    /// `||op psi - lambda psi||`.
    pub fn eigen_residual(&self, op: &OperatorMatrix, lambda: Complex64) -> Result<f64> {
        let (up, down) = self.apply(op)?;
        let ru = up.add_scaled(-lambda, &self.up)?;
        let rd = down.add_scaled(-lambda, &self.down)?;
        Ok((ru.norm_sqr() + rd.norm_sqr()).sqrt())
    }

    /// `<self|other>` over both components.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        Ok(inner_product(&self.up, &other.up)? + inner_product(&self.down, &other.down)?)
    }
}

/// `c1 psi+ |up> + c2 psi- |down>`.
pub fn build_energy_eigenstate(
    c1: Complex64,
    c2: Complex64,
    psi_plus: &Wavefunction,
    psi_minus: &Wavefunction,
) -> Result<SpinorState> {
    let coeff = c1.norm_sqr() + c2.norm_sqr();
    if (coeff - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(coeff));
    }
    for psi in [psi_plus, psi_minus] {
        if (psi.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(psi.norm_sqr()));
        }
    }
    SpinorState::new(psi_plus.scaled(c1), psi_minus.scaled(c2))
}

/// `(|c1|, relative phase)` to `(c1, c2)` with `c1` real.
pub fn coefficients(c1_abs: f64, phase: f64) -> Result<(Complex64, Complex64)> {
    if !(0.0..=1.0).contains(&c1_abs) || !phase.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "|c1| = {c1_abs} must lie in [0, 1] with a finite phase"
        )));
    }
    let c2_abs = (1.0 - c1_abs * c1_abs).max(0.0).sqrt();
    Ok((
        Complex64::new(c1_abs, 0.0),
        Complex64::from_polar(c2_abs, phase),
    ))
}

/// `(<sigma_x>, <sigma_y>, <sigma_z>)` with `sigma+ = [[0, 1], [0, 0]]`.
pub fn spin_expectation(state: &SpinorState) -> Result<[f64; 3]> {
    let (a, d, o) = gram(state)?;
    Ok([2.0 * o.re, 2.0 * o.im, a - d])
}

fn gram(state: &SpinorState) -> Result<(f64, f64, Complex64)> {
    let a = state.up.norm_sqr();
    let d = state.down.norm_sqr();
    if (a + d - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(a + d));
    }
    Ok((a, d, inner_product(&state.up, &state.down)?))
}

fn length(v: &[f64; 3]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `lambda_{1,2} = sqrt((1 +- |<sigma>|) / 2)`, descending.
pub fn schmidt_coefficients(sigma_mean: &[f64; 3]) -> Result<(f64, f64)> {
    let s = length(sigma_mean);
    if !(s <= 1.0 + RANGE_TOL) {
        return Err(Error::SpinOutOfRange(s));
    }
    let s = s.min(1.0);
    Ok((((1.0 + s) / 2.0).sqrt(), ((1.0 - s) / 2.0).sqrt()))
}

/// `sqrt(1 - |<sigma>|^2)`, evaluated as `2 sqrt(ad - |o|^2)` from the
/// component Gram matrix so product states give an exact zero.
pub fn concurrence_from_spin(state: &SpinorState) -> Result<f64> {
    let (a, d, o) = gram(state)?;
    Ok((2.0 * (a * d - o.norm_sqr()).max(0.0).sqrt()).min(1.0))
}

/// `2 |c1| |c2| sqrt(1 - |<psi+|psi->|^2)`.
pub fn concurrence_overlap(c1: Complex64, c2: Complex64, overlap: Complex64) -> Result<f64> {
    let s = overlap.norm();
    if !(s <= 1.0 + RANGE_TOL) {
        return Err(Error::OverlapOutOfRange(s));
    }
    Ok((2.0 * c1.norm() * c2.norm() * (1.0 - s * s).max(0.0).sqrt()).min(1.0))
}

/// Maximal concurrence over `|c1|` for a given partner overlap.
pub fn c_max(overlap: Complex64) -> Result<f64> {
    concurrence_overlap(
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        overlap,
    )
}

/// Singular values of the `2 x N` coefficient matrix, descending.
pub fn schmidt_svd_oracle(state: &SpinorState) -> (f64, f64) {
    let w = state.support().weight().sqrt();
    let n = state.up.len();
    let m = DMatrix::from_fn(2, n, |r, c| {
        let comp = if r == 0 { &state.up } else { &state.down };
        comp.amplitudes()[c] * w
    });
    let sv = m.singular_values();
    let (a, b) = (sv[0], sv[1]);
    (a.max(b), a.min(b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub sigma_mean: [f64; 3],
    pub schmidt: (f64, f64),
    pub concurrence_spin: f64,
    pub concurrence_overlap: Option<f64>,
    pub concurrence_svd: f64,
    pub overlap: Option<Complex64>,
}

impl EntanglementReport {
    /// `beta` in `<psi+|psi-> = |<psi+|psi->| e^{i beta}`.
    pub fn overlap_phase(&self) -> Option<f64> {
        self.overlap.map(|o| o.arg())
    }
}

/// All three measures for one state. `decomposition` is `(c1, c2, <psi+|psi->)`
/// when the state was built from partner eigenstates.
pub fn entanglement_report(
    state: &SpinorState,
    decomposition: Option<(Complex64, Complex64, Complex64)>,
) -> Result<EntanglementReport> {
    let sigma_mean = spin_expectation(state)?;
    schmidt_coefficients(&sigma_mean)?;
    let concurrence_spin = concurrence_from_spin(state)?;
    // lambda_2^2 = (1 - |s|) / 2 = C^2 / (2 (1 + |s|)) avoids the cancellation
    // near product states
    let l2 = concurrence_spin / (2.0 * (1.0 + length(&sigma_mean).min(1.0))).sqrt();
    let schmidt = ((1.0 - l2 * l2).sqrt(), l2);
    let concurrence_overlap = decomposition
        .map(|(c1, c2, s)| concurrence_overlap(c1, c2, s))
        .transpose()?;
    let (l1, l2) = schmidt_svd_oracle(state);
    Ok(EntanglementReport {
        sigma_mean,
        schmidt,
        concurrence_spin,
        concurrence_overlap,
        concurrence_svd: (2.0 * l1 * l2).min(1.0),
        overlap: decomposition.map(|d| d.2),
    })
}

/// Eigenstates of both supercharges at one nonzero level.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperchargeEigenstates {
    pub energy: f64,
    /// `Q1 psi = +sqrt(E) psi`: `(psi+ |up> + psi- |down>) / sqrt(2)`.
    pub q1_plus: SpinorState,
    /// `Q1 psi = -sqrt(E) psi`.
    pub q1_minus: SpinorState,
    /// `Q2 psi = +sqrt(E) psi`: `(psi+ |up> + i psi- |down>) / sqrt(2)`.
    pub q2_plus: SpinorState,
    /// `Q2 psi = -sqrt(E) psi`.
    pub q2_minus: SpinorState,
}

/// Requires `psi- = B^+ psi+ / sqrt(E)` in phase, which is what
/// [`crate::spectral::intertwine_down`] produces.
pub fn supercharge_eigenstates(
    sys: &SusySystem,
    energy: f64,
    psi_plus: &Wavefunction,
    psi_minus: &Wavefunction,
) -> Result<SuperchargeEigenstates> {
    if energy <= ZERO_MODE_THRESHOLD {
        return Err(Error::ZeroEnergy(energy));
    }
    if *psi_plus.support() != sys.support() {
        return Err(Error::SupportMismatch);
    }
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let make = |c2: Complex64| build_energy_eigenstate(h, h * c2, psi_plus, psi_minus);
    Ok(SuperchargeEigenstates {
        energy,
        q1_plus: make(Complex64::new(1.0, 0.0))?,
        q1_minus: make(Complex64::new(-1.0, 0.0))?,
        q2_plus: make(i)?,
        q2_minus: make(-i)?,
    })
}
