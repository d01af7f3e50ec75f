//! Partner spectra, level pairing, the zero mode and the intertwining maps.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{inner_product, normalize, Support, Wavefunction};
use crate::operator::OperatorMatrix;
use crate::susy::{check_sign_condition, Partner, SusySystem};
use crate::tridiagonal::SymmetricTridiagonal;

/// Eigenvalues at or below this are treated as zero energy.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-10;

/// Default tolerance for matching `H+` and `H-` levels.
pub const PAIRING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    /// Unit norm, largest amplitude real positive.
    pub state: Wavefunction,
    pub partner: Option<Partner>,
}

/// The `k` lowest eigenpairs of a Hermitian operator, energies ascending.
///
/// Real tridiagonal operators go through bisection and inverse iteration;
/// anything else is diagonalized densely.
pub fn solve_spectrum(h: &OperatorMatrix, support: Support, k: usize) -> Result<Vec<EigenPair>> {
    let dim = h.dim();
    if support.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: support.len(),
        });
    }
    if k == 0 || k > dim {
        return Err(Error::LevelCountOutOfRange { k, dim });
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-14 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }

    let raw: Vec<(f64, Vec<Complex64>)> = match h.as_real_tridiagonal() {
        Some((diag, off)) => SymmetricTridiagonal::new(diag, off)?
            .lowest_eigenpairs(k)?
            .into_iter()
            .map(|(e, v)| (e, v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()))
            .collect(),
        None => dense_lowest(h, k),
    };

    raw.into_iter()
        .map(|(energy, v)| {
            Ok(EigenPair {
                energy,
                state: normalize(&Wavefunction::new(support, v)?)?,
                partner: None,
            })
        })
        .collect()
}

fn dense_lowest(h: &OperatorMatrix, k: usize) -> Vec<(f64, Vec<Complex64>)> {
    let eig = nalgebra::SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(k)
        .map(|idx| {
            (
                eig.eigenvalues[idx],
                eig.eigenvectors.column(idx).iter().copied().collect(),
            )
        })
        .collect()
}

/// One matched pair of partner levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelPair {
    /// 1-based level number; level 0 is the zero mode.
    pub level: usize,
    pub e_plus: f64,
    pub e_minus: f64,
    pub gap: f64,
    /// Positions in the input lists.
    pub plus_index: usize,
    pub minus_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub pairs: Vec<LevelPair>,
    /// Sub-threshold eigenvalues of `H-` (the zero mode when there is one).
    pub minus_zero_levels: Vec<f64>,
    /// Sub-threshold eigenvalues of `H+`. With a square factor `B` these mirror
    /// the zero mode and belong to the boundary-localized image of the
    /// non-normalizable `exp(+int W)`.
    pub plus_zero_levels: Vec<f64>,
}

impl DegeneracyReport {
    /// The zero-mode energy, when `H-` has exactly one sub-threshold level.
    pub fn zero_mode_energy(&self) -> Option<f64> {
        match self.minus_zero_levels.as_slice() {
            [e] => Some(*e),
            _ => None,
        }
    }

    pub fn max_gap(&self) -> f64 {
        self.pairs.iter().map(|p| p.gap).fold(0.0, f64::max)
    }
}

/// Matches `H+` and `H-` levels above [`ZERO_MODE_THRESHOLD`].
///
/// Greedy in ascending `H+` energy, each taking the unmatched `H-` level with
/// the smallest gap. Any level left without a partner within `tol` is a
/// degeneracy violation, `H+` levels checked first.
pub fn pair_partner_levels(plus: &[f64], minus: &[f64], tol: f64) -> Result<DegeneracyReport> {
    let split = |v: &[f64]| -> (Vec<(usize, f64)>, Vec<f64>) {
        let (zero, nonzero): (Vec<(usize, f64)>, Vec<(usize, f64)>) = v
            .iter()
            .copied()
            .enumerate()
            .partition(|&(_, e)| e <= ZERO_MODE_THRESHOLD);
        (nonzero, zero.into_iter().map(|(_, e)| e).collect())
    };
    let (plus_nz, plus_zero) = split(plus);
    let (minus_nz, minus_zero) = split(minus);

    let mut used = vec![false; minus_nz.len()];
    let mut pairs = Vec::new();
    for &(pi, ep) in &plus_nz {
        let best = minus_nz
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &(mi, em))| (j, mi, em, (ep - em).abs()))
            .min_by(|a, b| a.3.total_cmp(&b.3));
        match best {
            Some((j, mi, em, gap)) if gap <= tol => {
                used[j] = true;
                pairs.push(LevelPair {
                    level: 0,
                    e_plus: ep,
                    e_minus: em,
                    gap,
                    plus_index: pi,
                    minus_index: mi,
                });
            }
            _ => return Err(Error::DegeneracyViolation { level: ep, tol }),
        }
    }
    if let Some((_, &(_, em))) = minus_nz.iter().enumerate().find(|(j, _)| !used[*j]) {
        return Err(Error::DegeneracyViolation { level: em, tol });
    }
    pairs.sort_by(|a, b| a.e_minus.total_cmp(&b.e_minus));
    for (i, p) in pairs.iter_mut().enumerate() {
        p.level = i + 1;
    }
    Ok(DegeneracyReport {
        pairs,
        minus_zero_levels: minus_zero,
        plus_zero_levels: plus_zero,
    })
}

/// Eigenpairs of one partner, tagged.
pub fn solve_partner(sys: &SusySystem, which: Partner, k: usize) -> Result<Vec<EigenPair>> {
    let mut pairs = solve_spectrum(sys.partner(which), sys.support(), k)?;
    for p in &mut pairs {
        p.partner = Some(which);
    }
    Ok(pairs)
}

/// Both partner spectra and their pairing.
#[derive(Debug, Clone)]
pub struct PartnerSpectrum {
    pub plus: Vec<EigenPair>,
    pub minus: Vec<EigenPair>,
    pub report: DegeneracyReport,
}

impl PartnerSpectrum {
    /// `(psi+, psi-)` eigenpairs of paired level `level` (1-based).
    pub fn level(&self, level: usize) -> Option<(&EigenPair, &EigenPair)> {
        let p = self.report.pairs.get(level.checked_sub(1)?)?;
        Some((&self.plus[p.plus_index], &self.minus[p.minus_index]))
    }

    pub fn levels(&self) -> usize {
        self.report.pairs.len()
    }
}

/// Solves `levels + 1` states of each partner, enough for `levels` nonzero
/// pairs next to the zero-energy entries, and pairs them.
pub fn solve_partners(sys: &SusySystem, levels: usize, tol: f64) -> Result<PartnerSpectrum> {
    let k = levels + 1;
    let (plus, minus) = std::thread::scope(|s| {
        let plus = s.spawn(|| solve_partner(sys, Partner::Plus, k));
        let minus = solve_partner(sys, Partner::Minus, k);
        (plus.join().expect("eigensolver thread panicked"), minus)
    });
    let (plus, minus) = (plus?, minus?);
    let ep: Vec<f64> = plus.iter().map(|p| p.energy).collect();
    let em: Vec<f64> = minus.iter().map(|p| p.energy).collect();
    let report = pair_partner_levels(&ep, &em, tol)?;
    Ok(PartnerSpectrum {
        plus,
        minus,
        report,
    })
}

/// The zero mode of `H-`: the kernel vector of `B` by forward recursion
/// `psi_{i+1} = (1 - dx W_i) psi_i` from `psi(x_min) = 1`.
///
/// The recursion runs in log-magnitude. Where `dx W > 2` the forward step
/// amplifies instead of decaying; the vector is cut at its smallest magnitude
/// past the peak, which leaves a residual confined to one node of size
/// `|psi_cut|`.
pub fn zero_mode(sys: &SusySystem) -> Result<Wavefunction> {
    let w = sys.superpotential();
    let grid = sys.grid();
    if !check_sign_condition(w, grid)? {
        return Err(Error::NoZeroMode(w.name().to_string()));
    }
    let values = w.sample(grid)?;
    let n = grid.n_points();
    let dx = grid.dx();
    let mut log_mag = vec![f64::NEG_INFINITY; n];
    let mut sign = vec![1.0f64; n];
    log_mag[0] = 0.0;
    let mut end = n;
    for i in 0..n - 1 {
        let factor = 1.0 - dx * values[i];
        if factor == 0.0 {
            end = i + 1;
            break;
        }
        log_mag[i + 1] = log_mag[i] + factor.abs().ln();
        sign[i + 1] = sign[i] * factor.signum();
    }
    // The exact mode peaks where W turns positive; past that point a stiff
    // recursion can regrow, so the global maximum is not reliable.
    let peak = (0..end - 1)
        .find(|&i| log_mag[i + 1] < log_mag[i])
        .unwrap_or(end - 1);
    let cut = (peak..end)
        .min_by(|&a, &b| log_mag[a].total_cmp(&log_mag[b]).then(a.cmp(&b)))
        .expect("non-empty range");
    let top = log_mag[peak];
    let amplitudes: Vec<f64> = (0..n)
        .map(|i| {
            if i <= cut {
                sign[i] * (log_mag[i] - top).exp()
            } else {
                0.0
            }
        })
        .collect();
    normalize(&Wavefunction::from_real(*grid, &amplitudes)?)
}

/// Sampled `exp(-int_0^x W)` with a cumulative trapezoid integral, normalized.
/// Independent of the discrete operator; used to cross-check [`zero_mode`].
pub fn analytic_zero_mode(sys: &SusySystem) -> Result<Wavefunction> {
    let w = sys.superpotential();
    let grid = sys.grid();
    if !check_sign_condition(w, grid)? {
        return Err(Error::NoZeroMode(w.name().to_string()));
    }
    let values = w.sample(grid)?;
    let dx = grid.dx();
    let mut integral = vec![0.0; values.len()];
    for i in 1..values.len() {
        integral[i] = integral[i - 1] + 0.5 * dx * (values[i - 1] + values[i]);
    }
    let min = integral.iter().copied().fold(f64::INFINITY, f64::min);
    let amplitudes: Vec<f64> = integral.iter().map(|s| (min - s).exp()).collect();
    normalize(&Wavefunction::from_real(*grid, &amplitudes)?)
}

fn check_pair(sys: &SusySystem, pair: &EigenPair, expected: Partner) -> Result<()> {
    if pair.partner.is_some_and(|p| p != expected) {
        return Err(Error::InvalidParameter(format!(
            "expected an eigenpair of {expected:?}, got {:?}",
            pair.partner
        )));
    }
    if pair.energy <= ZERO_MODE_THRESHOLD {
        return Err(Error::ZeroEnergy(pair.energy));
    }
    if *pair.state.support() != sys.support() {
        return Err(Error::SupportMismatch);
    }
    Ok(())
}

/// `B^+ psi+ / sqrt(E)`, the `H-` partner of an `H+` eigenstate.
pub fn intertwine_down(sys: &SusySystem, pair_plus: &EigenPair) -> Result<Wavefunction> {
    check_pair(sys, pair_plus, Partner::Plus)?;
    let mapped = sys.creator().apply_to(&pair_plus.state)?;
    Ok(mapped.scaled(Complex64::new(1.0 / pair_plus.energy.sqrt(), 0.0)))
}

/// `B psi- / sqrt(E)`, the `H+` partner of an `H-` eigenstate.
pub fn intertwine_up(sys: &SusySystem, pair_minus: &EigenPair) -> Result<Wavefunction> {
    check_pair(sys, pair_minus, Partner::Minus)?;
    let mapped = sys.annihilator().apply_to(&pair_minus.state)?;
    Ok(mapped.scaled(Complex64::new(1.0 / pair_minus.energy.sqrt(), 0.0)))
}

/// Rotates `mapped` so that `<mapped|reference>` is real and non-negative.
pub fn align_phase(mapped: &Wavefunction, reference: &Wavefunction) -> Result<Wavefunction> {
    let overlap = inner_product(mapped, reference)?;
    if overlap.norm() == 0.0 {
        return Ok(mapped.clone());
    }
    Ok(mapped.scaled(overlap / overlap.norm()))
}

/// `||H psi - E psi||` in the support's weighted norm.
pub fn residual_norm(h: &OperatorMatrix, energy: f64, psi: &Wavefunction) -> Result<f64> {
    let h_psi = h.apply_to(psi)?;
    Ok(h_psi.add_scaled(Complex64::new(-energy, 0.0), psi)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{fidelity, make_grid, Grid};
    use crate::superpotential::Superpotential;

    fn grid() -> Grid {
        make_grid(-10.0, 10.0, 2001).unwrap()
    }

    #[test]
    fn diagonal_operator_spectrum() {
        let h = OperatorMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let pairs = solve_spectrum(&h, Support::Fock { dimension: 3 }, 3).unwrap();
        let e: Vec<f64> = pairs.iter().map(|p| p.energy).collect();
        assert_eq!(e, vec![1.0, 2.0, 3.0]);
        assert_eq!(pairs[0].state, Wavefunction::fock_state(3, 1).unwrap());
    }

    #[test]
    fn solve_spectrum_errors() {
        let h = OperatorMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = Support::Fock { dimension: 2 };
        assert!(matches!(solve_spectrum(&h, s, 0), Err(Error::LevelCountOutOfRange { .. })));
        assert!(matches!(solve_spectrum(&h, s, 3), Err(Error::LevelCountOutOfRange { .. })));
        let asym = OperatorMatrix::from_triplets(2, [(0, 1, Complex64::new(1.0, 0.0))]);
        assert!(matches!(solve_spectrum(&asym, s, 1), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn dense_path_for_complex_hermitian() {
        // [[0, -i], [i, 0]] = sigma_y: eigenvalues -1, +1
        let i = Complex64::new(0.0, 1.0);
        let h = OperatorMatrix::from_triplets(2, [(0, 1, -i), (1, 0, i)]);
        let pairs = solve_spectrum(&h, Support::Fock { dimension: 2 }, 2).unwrap();
        assert!((pairs[0].energy + 1.0).abs() < 1e-14);
        assert!((pairs[1].energy - 1.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_spectra_track_oscillator_levels() {
        // Continuum oracle: H- = (p^2 + x^2 - 1)/2 has E_n = n, H+ has E_n = n + 1.
        // The forward-difference factorization lowers level n by ~(n dx)^2/4.
        let sys = SusySystem::new(Superpotential::harmonic(), grid()).unwrap();
        let minus = solve_partner(&sys, Partner::Minus, 6).unwrap();
        for (n, p) in minus.iter().enumerate() {
            let shift = (n as f64 * 0.01).powi(2) / 4.0;
            assert!((p.energy - (n as f64 - shift)).abs() < 2e-7, "n={n}: {}", p.energy);
        }
        let spectrum = solve_partners(&sys, 5, PAIRING_TOLERANCE).unwrap();
        for level in 1..=5 {
            let (plus, _) = spectrum.level(level).unwrap();
            assert!((plus.energy - level as f64).abs() < 7e-4);
        }
    }

    #[test]
    fn spectrum_is_deterministic_and_orthonormal() {
        let sys = SusySystem::new(Superpotential::cubic_shifted(0.5), grid()).unwrap();
        let a = solve_partner(&sys, Partner::Minus, 6).unwrap();
        let b = solve_partner(&sys, Partner::Minus, 6).unwrap();
        assert_eq!(a, b);
        for w in a.windows(2) {
            assert!(w[0].energy <= w[1].energy);
        }
        for (i, p) in a.iter().enumerate() {
            assert!((p.state.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(p.energy >= -1e-10);
            let r = residual_norm(sys.h_minus(), p.energy, &p.state).unwrap();
            assert!(r <= 1e-9 * sys.h_minus().norm_inf(), "residual {r}");
            for q in a.iter().skip(i + 1) {
                assert!(inner_product(&p.state, &q.state).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn pairing_exact_lists() {
        let r = pair_partner_levels(&[1.0, 2.0], &[0.0, 1.0, 2.0], 1e-10).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert_eq!((r.pairs[0].e_plus, r.pairs[0].e_minus), (1.0, 1.0));
        assert_eq!((r.pairs[1].e_plus, r.pairs[1].e_minus), (2.0, 2.0));
        assert_eq!(r.pairs[1].level, 2);
        assert_eq!(r.zero_mode_energy(), Some(0.0));
    }

    #[test]
    fn pairing_forced_mismatch() {
        assert_eq!(
            pair_partner_levels(&[1.5], &[0.0, 1.0], 1e-6),
            Err(Error::DegeneracyViolation { level: 1.5, tol: 1e-6 })
        );
    }

    #[test]
    fn pairing_rejects_leftover_minus_level() {
        assert!(matches!(
            pair_partner_levels(&[1.0], &[0.0, 1.0, 2.0], 1e-9),
            Err(Error::DegeneracyViolation { level, .. }) if level == 2.0
        ));
    }

    #[test]
    fn harmonic_partner_levels_pair_to_round_off() {
        let sys = SusySystem::new(Superpotential::harmonic(), grid()).unwrap();
        let s = solve_partners(&sys, 6, PAIRING_TOLERANCE).unwrap();
        assert_eq!(s.levels(), 6);
        assert!(s.report.max_gap() <= 1e-10);
        assert_eq!(s.report.minus_zero_levels.len(), 1);
        // the square factor gives H+ one boundary-localized mirror of the zero mode
        assert_eq!(s.report.plus_zero_levels.len(), 1);
        let edge = &s.plus[0].state;
        let tail: f64 = edge.amplitudes()[1800..].iter().map(|a| a.norm_sqr()).sum::<f64>()
            * grid().dx();
        assert!(tail > 1.0 - 1e-6);
    }

    #[test]
    fn zero_mode_is_the_kernel_of_b() {
        let sys = SusySystem::new(Superpotential::harmonic(), grid()).unwrap();
        let psi0 = zero_mode(&sys).unwrap();
        let b_psi = sys.annihilator().apply_to(&psi0).unwrap();
        assert!(b_psi.norm() <= 1e-12);
        let r = residual_norm(sys.h_minus(), 0.0, &psi0).unwrap();
        assert!(r <= 1e-12 * sys.h_minus().norm_inf());
        // agrees with the lowest eigenvector of H-
        let ground = &solve_partner(&sys, Partner::Minus, 1).unwrap()[0];
        assert!(fidelity(&psi0, &ground.state).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn zero_mode_matches_gaussian_to_discretization_order() {
        // Oracle: exp(-x^2/2). The forward recursion differs from it at first
        // order in dx (a dx/2 shift plus a dx x^3/6 skew); the fidelity defect
        // is ~2.6e-6 at dx = 0.01 and falls by 4x when dx halves.
        let defect = |n: usize| {
            let g = make_grid(-10.0, 10.0, n).unwrap();
            let sys = SusySystem::new(Superpotential::harmonic(), g).unwrap();
            let gauss = normalize(&Wavefunction::sample_real(&g, |x| (-x * x / 2.0).exp())).unwrap();
            1.0 - inner_product(&zero_mode(&sys).unwrap(), &gauss).unwrap().norm()
        };
        let coarse = defect(2001);
        let fine = defect(4001);
        assert!(coarse > 0.0 && coarse < 5e-6, "{coarse}");
        assert!((coarse / fine - 4.0).abs() < 0.1, "ratio {}", coarse / fine);
    }

    #[test]
    fn zero_mode_matches_trapezoid_oracle() {
        for w in [Superpotential::harmonic(), Superpotential::tanh(), Superpotential::cubic()] {
            let sys = SusySystem::new(w.clone(), grid()).unwrap();
            let a = zero_mode(&sys).unwrap();
            let b = analytic_zero_mode(&sys).unwrap();
            let ov = inner_product(&a, &b).unwrap().norm();
            assert!(ov > 1.0 - 1e-4, "{}: {ov}", w.name());
        }
    }

    #[test]
    fn tanh_zero_mode_is_sech() {
        // Oracle: int_0^x tanh = ln cosh x, so psi0 ~ 1/cosh(x).
        let sys = SusySystem::new(Superpotential::tanh(), grid()).unwrap();
        let sech = normalize(&Wavefunction::sample_real(&grid(), |x| 1.0 / x.cosh())).unwrap();
        let ov = inner_product(&zero_mode(&sys).unwrap(), &sech).unwrap().norm();
        assert!(ov > 1.0 - 1e-5, "{ov}");
    }

    #[test]
    fn stiff_zero_mode_is_cut_where_recursion_turns_unstable() {
        let sys = SusySystem::new(Superpotential::cubic(), grid()).unwrap();
        let psi0 = zero_mode(&sys).unwrap();
        assert!(psi0.amplitudes().iter().all(|a| a.re.is_finite()));
        let r = residual_norm(sys.h_minus(), 0.0, &psi0).unwrap();
        assert!(r <= 1e-12 * sys.h_minus().norm_inf(), "{r}");
    }

    #[test]
    fn zero_mode_requires_sign_condition() {
        let sys = SusySystem::new(Superpotential::linear(-1.0, 0.0), grid()).unwrap();
        assert_eq!(zero_mode(&sys), Err(Error::NoZeroMode("linear".into())));
        let free = SusySystem::new(Superpotential::zero(), grid()).unwrap();
        assert!(matches!(zero_mode(&free), Err(Error::IndeterminateSign { .. })));
    }

    #[test]
    fn intertwining_maps_partner_eigenstates() {
        let sys = SusySystem::new(Superpotential::harmonic(), grid()).unwrap();
        let s = solve_partners(&sys, 4, PAIRING_TOLERANCE).unwrap();
        for level in 1..=4 {
            let (plus, minus) = s.level(level).unwrap();
            let down = intertwine_down(&sys, plus).unwrap();
            assert!((down.norm() - 1.0).abs() < 1e-8);
            let aligned = align_phase(&down, &minus.state).unwrap();
            let diff = aligned.add_scaled(Complex64::new(-1.0, 0.0), &minus.state).unwrap();
            assert!(diff.norm() < 1e-8);
            assert!(residual_norm(sys.h_minus(), plus.energy, &down).unwrap() < 1e-8);
            // ||B psi-||^2 = E
            let b_minus = sys.annihilator().apply_to(&minus.state).unwrap();
            assert!((b_minus.norm_sqr() - minus.energy).abs() < 1e-8);
        }
    }

    #[test]
    fn intertwining_round_trip() {
        let sys = SusySystem::new(Superpotential::cubic_shifted(0.5), grid()).unwrap();
        let s = solve_partners(&sys, 3, PAIRING_TOLERANCE).unwrap();
        let (plus, minus) = s.level(2).unwrap();
        let down = EigenPair {
            energy: plus.energy,
            state: intertwine_down(&sys, plus).unwrap(),
            partner: Some(Partner::Minus),
        };
        let back = intertwine_up(&sys, &down).unwrap();
        assert!(fidelity(&back, &plus.state).unwrap() > 1.0 - 1e-10);
        assert!((inner_product(&back, &plus.state).unwrap() - 1.0).norm() < 1e-10);
        assert!(minus.energy > 0.0);
    }

    #[test]
    fn ladder_action_on_oscillator_states() {
        // Oracle: B^+ h0 ~ h1 and B h1 ~ h0 for Hermite functions h0, h1.
        let g = grid();
        let sys = SusySystem::new(Superpotential::harmonic(), g).unwrap();
        let s = solve_partners(&sys, 2, PAIRING_TOLERANCE).unwrap();
        let (plus, minus) = s.level(1).unwrap();
        let h0 = normalize(&Wavefunction::sample_real(&g, |x| (-x * x / 2.0).exp())).unwrap();
        let h1 = normalize(&Wavefunction::sample_real(&g, |x| x * (-x * x / 2.0).exp())).unwrap();
        assert!(fidelity(&intertwine_down(&sys, plus).unwrap(), &h1).unwrap() > 1.0 - 1e-4);
        assert!(fidelity(&intertwine_up(&sys, minus).unwrap(), &h0).unwrap() > 1.0 - 1e-4);
    }

    #[test]
    fn intertwining_rejects_zero_mode() {
        let sys = SusySystem::new(Superpotential::harmonic(), grid()).unwrap();
        let ground = solve_partner(&sys, Partner::Minus, 1).unwrap().remove(0);
        assert!(matches!(intertwine_up(&sys, &ground), Err(Error::ZeroEnergy(_))));
        let b_psi0 = sys.annihilator().apply_to(&zero_mode(&sys).unwrap()).unwrap();
        assert!(b_psi0.norm() <= 1e-12);
        let plus0 = solve_partner(&sys, Partner::Plus, 1).unwrap().remove(0);
        assert!(matches!(intertwine_down(&sys, &plus0), Err(Error::ZeroEnergy(_))));
    }
}
