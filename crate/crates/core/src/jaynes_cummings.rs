//! Resonant Jaynes-Cummings model on a truncated Fock space and its N=2
//! supersymmetry.
//!
//! Basis ordering: spin index outer (spin up block first), photon number
//! inner, so index `n` is `|n, up>` and `dim + n` is `|n, down>`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::entanglement::{concurrence_from_spin, SpinorState};
use crate::error::{Error, Result};
use crate::grid::{Support, Wavefunction};
use crate::operator::OperatorMatrix;

const ENERGY_TOL: f64 = 1e-10;
const FIDELITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Photon levels `0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub const MIN_CUTOFF: usize = 4;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < Self::MIN_CUTOFF {
            return Err(Error::InvalidJcParams(format!(
                "n_max = {n_max} is below the minimum {}",
                Self::MIN_CUTOFF
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        self.n_max + 1
    }

    /// Highest level with certified results; the top two rows feel the cutoff.
    pub fn certified_max(&self) -> usize {
        self.n_max - 2
    }

    pub fn support(&self) -> Support {
        Support::Fock {
            dimension: self.dimension(),
        }
    }

    /// `b |n> = sqrt(n) |n - 1>`.
    pub fn annihilator(&self) -> OperatorMatrix {
        OperatorMatrix::from_triplets(
            self.dimension(),
            (1..=self.n_max).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))),
        )
    }

    pub fn number(&self) -> OperatorMatrix {
        let diag: Vec<f64> = (0..=self.n_max).map(|n| n as f64).collect();
        OperatorMatrix::from_real_diagonal(&diag)
    }
}

#[derive(Debug, Clone)]
pub struct JcSystem {
    fock: FockSpace,
    omega: f64,
    gamma: f64,
    q: OperatorMatrix,
    h0: OperatorMatrix,
    hint: OperatorMatrix,
    h: OperatorMatrix,
}

/// `H = H0 + Hint` with `H0 = omega (b^+ b + sigma_z / 2)` and
/// `Hint = gamma (b sigma+ + b^+ sigma-) = gamma Q`.
pub fn build_jc(omega: f64, gamma: f64, n_max: usize) -> Result<JcSystem> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidJcParams(format!("omega = {omega} must be positive")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidJcParams(format!("gamma = {gamma} must be non-negative")));
    }
    let fock = FockSpace::new(n_max)?;
    let b = fock.annihilator();
    let q = OperatorMatrix::block2x2(None, Some(&b), Some(&b.adjoint()), None);
    let up: Vec<f64> = (0..=n_max).map(|n| omega * (n as f64 + 0.5)).collect();
    let down: Vec<f64> = (0..=n_max).map(|n| omega * (n as f64 - 0.5)).collect();
    let h0 = OperatorMatrix::from_real_diagonal(&[up, down].concat());
    let hint = q.scale_real(gamma);
    let h = &h0 + &hint;
    Ok(JcSystem {
        fock,
        omega,
        gamma,
        q,
        h0,
        hint,
        h,
    })
}

impl JcSystem {
    pub fn fock(&self) -> FockSpace {
        self.fock
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dimension(&self) -> usize {
        2 * self.fock.dimension()
    }

    /// `Q = Q1 = [[0, b], [b^+, 0]]`.
    pub fn q(&self) -> &OperatorMatrix {
        &self.q
    }

    /// `Q2 = i sigma_z Q`.
    pub fn q2(&self) -> OperatorMatrix {
        self.sigma_z().matmul(&self.q).scale(Complex64::new(0.0, 1.0))
    }

    pub fn h0(&self) -> &OperatorMatrix {
        &self.h0
    }

    pub fn hint(&self) -> &OperatorMatrix {
        &self.hint
    }

    pub fn h(&self) -> &OperatorMatrix {
        &self.h
    }

    /// Witten operator `sigma_z (x) I`.
    pub fn sigma_z(&self) -> OperatorMatrix {
        let id = OperatorMatrix::identity(self.fock.dimension());
        OperatorMatrix::block2x2(Some(&id), None, None, Some(&id.scale_real(-1.0)))
    }

    /// `b^+ b + (sigma_z + 1) / 2`.
    pub fn excitation_number(&self) -> OperatorMatrix {
        let n = self.fock.number();
        let up = &n + &OperatorMatrix::identity(self.fock.dimension());
        OperatorMatrix::block2x2(Some(&up), None, None, Some(&n))
    }

    /// Basis states with photon number at most `max_n`.
    pub fn mask_up_to(&self, max_n: usize) -> Vec<bool> {
        let d = self.fock.dimension();
        (0..2 * d).map(|i| i % d <= max_n).collect()
    }

    /// Basis states inside the certified band `n <= n_max - 2`.
    pub fn guard_mask(&self) -> Vec<bool> {
        self.mask_up_to(self.fock.certified_max())
    }

    fn check_level(&self, n: usize) -> Result<()> {
        let max = self.fock.certified_max();
        if n == 0 || n > max {
            return Err(Error::OutsideGuardBand { n, max });
        }
        Ok(())
    }

    /// `(E_{n,+}, E_{n,-})` with `E_{n,+-} = omega n +- gamma sqrt(n) - omega / 2`.
    pub fn analytic_spectrum(&self, n: usize) -> Result<(f64, f64)> {
        self.check_level(n)?;
        let base = self.omega * n as f64 - self.omega / 2.0;
        let split = self.gamma * (n as f64).sqrt();
        Ok((base + split, base - split))
    }

    pub fn ground_energy(&self) -> f64 {
        -self.omega / 2.0
    }

    /// `(|n-1>|up> +- |n>|down>) / sqrt(2)`; `n = 0` gives `|0>|down>`.
    pub fn analytic_eigenstate(&self, n: usize, branch: Branch) -> Result<SpinorState> {
        let d = self.fock.dimension();
        if n == 0 {
            return SpinorState::new(
                Wavefunction::zeros(self.fock.support()),
                Wavefunction::fock_state(d, 0)?,
            );
        }
        self.check_level(n)?;
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        SpinorState::new(
            Wavefunction::fock_state(d, n - 1)?.scaled(h),
            Wavefunction::fock_state(d, n)?.scaled(h * branch.sign()),
        )
    }

    /// The analytic level list: ground state first, then `(n, +)`, `(n, -)`
    /// for `n = 1..=n_max - 2`.
    pub fn analytic_levels(&self) -> Vec<(usize, Branch, f64)> {
        let mut levels = vec![(0, Branch::Minus, self.ground_energy())];
        for n in 1..=self.fock.certified_max() {
            let (ep, em) = self.analytic_spectrum(n).expect("n inside the band");
            levels.push((n, Branch::Plus, ep));
            levels.push((n, Branch::Minus, em));
        }
        levels
    }
}

/// Maximal elementwise deviations of the algebra identities on the certified
/// subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraReport {
    /// `Q1^2 - Q2^2`.
    pub q1_sq_minus_q2_sq: f64,
    /// `{Q1, Q2}`.
    pub anticommutator_q1_q2: f64,
    /// `[Q1, H0]`.
    pub commutator_q_h0: f64,
    /// `{sigma_z, Q}`.
    pub anticommutator_sigma_z_q: f64,
    /// `[Q, H]`.
    pub commutator_q_h: f64,
    /// `H0 - omega (Q^2 - 1/2)`, on `n <= n_max - 1`.
    pub h0_minus_omega_q_sq: f64,
    /// `H - (omega Q^2 + gamma Q - omega/2)`, on `n <= n_max - 1`.
    pub h_minus_closed_form: f64,
    /// `H - H0 - Hint`, everywhere.
    pub h_minus_parts: f64,
    /// `[N_exc, H]`.
    pub commutator_nexc_h: f64,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.q1_sq_minus_q2_sq,
            self.anticommutator_q1_q2,
            self.commutator_q_h0,
            self.anticommutator_sigma_z_q,
            self.commutator_q_h,
            self.h0_minus_omega_q_sq,
            self.h_minus_closed_form,
            self.h_minus_parts,
            self.commutator_nexc_h,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_susy_algebra(sys: &JcSystem) -> AlgebraReport {
    let guard = sys.guard_mask();
    let interior = sys.mask_up_to(sys.fock.n_max() - 1);
    let q = sys.q();
    let q2 = sys.q2();
    let sz = sys.sigma_z();
    let q_sq = q.matmul(q);
    let id = OperatorMatrix::identity(sys.dimension());
    let half = id.scale_real(0.5);
    let omega_q_sq = (&q_sq - &half).scale_real(sys.omega);
    let closed = &(&q_sq.scale_real(sys.omega) + &q.scale_real(sys.gamma)) - &half.scale_real(sys.omega);
    AlgebraReport {
        q1_sq_minus_q2_sq: (&q_sq - &q2.matmul(&q2)).max_abs_on(&guard),
        anticommutator_q1_q2: OperatorMatrix::anticommutator(q, &q2).max_abs_on(&guard),
        commutator_q_h0: OperatorMatrix::commutator(q, sys.h0()).max_abs_on(&guard),
        anticommutator_sigma_z_q: OperatorMatrix::anticommutator(&sz, q).max_abs(),
        commutator_q_h: OperatorMatrix::commutator(q, sys.h()).max_abs_on(&guard),
        h0_minus_omega_q_sq: (sys.h0() - &omega_q_sq).max_abs_on(&interior),
        h_minus_closed_form: (sys.h() - &closed).max_abs_on(&interior),
        h_minus_parts: (sys.h() - &(sys.h0() + sys.hint())).max_abs(),
        commutator_nexc_h: OperatorMatrix::commutator(&sys.excitation_number(), sys.h()).max_abs(),
    }
}

/// One analytic level against the numeric spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcLevel {
    pub n: usize,
    pub branch: Branch,
    pub e_analytic: f64,
    /// Closest numeric eigenvalue (`NaN` when none lies within tolerance).
    pub e_numeric: f64,
    pub gap: f64,
    /// Weight of the analytic state inside the numeric eigenspace at this
    /// energy; equals the eigenvector fidelity for a simple level.
    pub fidelity: f64,
    /// Concurrence of the analytic state projected onto the numeric
    /// eigenspace, which is the numeric eigenvector itself for a simple level.
    pub concurrence: f64,
    /// More than one numeric eigenvalue within tolerance.
    pub degenerate: bool,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JcComparison {
    pub levels: Vec<JcLevel>,
    pub numeric: Vec<f64>,
}

impl JcComparison {
    pub fn mismatches(&self) -> Vec<(usize, Branch)> {
        self.levels
            .iter()
            .filter(|l| !l.matched)
            .map(|l| (l.n, l.branch))
            .collect()
    }

    pub fn all_matched(&self) -> bool {
        self.levels.iter().all(|l| l.matched)
    }
}

/// Dense diagonalization of `H` matched level by level against the analytic
/// spectrum and eigenstates.
pub fn compare_spectrum(sys: &JcSystem) -> Result<JcComparison> {
    let eig = nalgebra::SymmetricEigen::new(sys.h().to_dense());
    let dim = sys.dimension();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let numeric: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    let support = sys.fock.support();

    let mut levels = Vec::new();
    for (n, branch, e) in sys.analytic_levels() {
        let analytic = sys.analytic_eigenstate(n, branch)?.to_vector();
        let cluster: Vec<usize> = (0..dim)
            .filter(|&k| (numeric[k] - e).abs() <= ENERGY_TOL)
            .collect();
        let closest = (0..dim)
            .min_by(|&a, &b| (numeric[a] - e).abs().total_cmp(&(numeric[b] - e).abs()))
            .expect("non-empty spectrum");
        let mut projected = vec![Complex64::new(0.0, 0.0); dim];
        let mut weight = 0.0;
        for &k in &cluster {
            let amp: Complex64 = vectors[k].iter().zip(&analytic).map(|(v, a)| v.conj() * a).sum();
            weight += amp.norm_sqr();
            for (p, v) in projected.iter_mut().zip(&vectors[k]) {
                *p += amp * v;
            }
        }
        let concurrence = if weight > 0.0 {
            let scale = 1.0 / weight.sqrt();
            let unit: Vec<Complex64> = projected.iter().map(|p| p * scale).collect();
            let state = SpinorState::new(
                Wavefunction::new(support, unit[..dim / 2].to_vec())?,
                Wavefunction::new(support, unit[dim / 2..].to_vec())?,
            );
            match state {
                Ok(s) => concurrence_from_spin(&s)?,
                Err(_) => f64::NAN,
            }
        } else {
            f64::NAN
        };
        let matched = !cluster.is_empty() && weight >= 1.0 - FIDELITY_TOL;
        levels.push(JcLevel {
            n,
            branch,
            e_analytic: e,
            e_numeric: if cluster.is_empty() { f64::NAN } else { numeric[closest] },
            gap: (numeric[closest] - e).abs(),
            fidelity: weight,
            concurrence,
            degenerate: cluster.len() > 1,
            matched,
        });
    }
    Ok(JcComparison { levels, numeric })
}

/// [`compare_spectrum`] that fails with the unmatched `(n, branch)` list.
pub fn numeric_vs_analytic(sys: &JcSystem) -> Result<JcComparison> {
    let cmp = compare_spectrum(sys)?;
    let bad = cmp.mismatches();
    if bad.is_empty() {
        Ok(cmp)
    } else {
        Err(Error::SpectrumMismatch(bad))
    }
}
