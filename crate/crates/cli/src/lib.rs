//! Command-line driver: config in, plot-ready CSV or JSON reports out.
//!
//! Exit codes: 0 success, 1 a physics invariant failed, 2 bad configuration
//! or unwritable output.

pub mod config;
mod report;

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use susyqm::{
    align_phase, build_energy_eigenstate, c_max, coefficients, compare_spectrum,
    entanglement_report, inner_product, intertwine_down, residual_norm, solve_partners,
    supercharge_eigenstates, verify_susy_algebra, zero_mode, Branch, EigenPair, Error,
    OperatorMatrix, Parity, PartnerSpectrum, SusySystem, Wavefunction, PAIRING_TOLERANCE,
};

pub use config::{Command, Format, RunConfig};
pub use report::{Cell, Table};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("physics check failed: {0}")]
    Physics(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Physics(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

fn physics(e: Error) -> CliError {
    CliError::Physics(e.to_string())
}

/// What a run produced. Non-empty `violations` means exit status 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> u8 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Tables plus the invariant violations found while computing them.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub violations: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(msg());
        }
    }
}

/// Runs `cfg` and writes its reports into `out_dir` (or the configured
/// directory) in `format` (or the configured format).
pub fn execute(cfg: &RunConfig, out_dir: Option<&Path>, format: Option<Format>) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.dir.clone());
    let format = format.unwrap_or(cfg.output.format);
    let outcome = compute(cfg)?;
    let files = report::write_all(&dir, cfg.command.as_str(), &outcome, format)?;
    Ok(RunSummary {
        files,
        violations: outcome.violations,
    })
}

/// The report tables for `cfg` without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Spectrum => run_spectrum(cfg),
        Command::Entangle => run_entangle(cfg),
        Command::Supercharge => run_supercharge(cfg),
        Command::Jc => run_jc(cfg),
        Command::Verify => run_verify(cfg),
    }
}

fn solve(sys: &SusySystem, levels: usize) -> Result<PartnerSpectrum, CliError> {
    solve_partners(sys, levels, PAIRING_TOLERANCE).map_err(physics)
}

/// `psi+` of a paired level and its intertwined partner `B^+ psi+ / sqrt(E)`
/// rescaled to unit norm, which fixes the relative phase.
fn partner_states(sys: &SusySystem, spectrum: &PartnerSpectrum, level: usize) -> Result<(EigenPair, Wavefunction), CliError> {
    let (plus, _) = spectrum
        .level(level)
        .ok_or_else(|| CliError::Physics(format!("level {level} was not resolved")))?;
    let minus = intertwine_down(sys, plus)
        .and_then(|m| m.rescaled_to_unit())
        .map_err(physics)?;
    Ok((plus.clone(), minus))
}

fn zero_mode_table(psi: &Wavefunction) -> Table {
    let mut t = Table::rows("zero_mode", &["x", "re", "im"]);
    for (i, a) in psi.amplitudes().iter().enumerate() {
        t.push(vec![Cell::F(psi.support().coordinate(i)), Cell::F(a.re), Cell::F(a.im)]);
    }
    t
}

fn run_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sys = cfg.susy_system()?;
    let levels = cfg.levels();
    let mut out = Outcome::default();
    let spectrum = solve(&sys, levels)?;

    let mut t = Table::rows("spectrum", &["index", "E_plus", "E_minus", "gap"]);
    for p in &spectrum.report.pairs {
        t.push(vec![Cell::U(p.level), Cell::F(p.e_plus), Cell::F(p.e_minus), Cell::F(p.gap)]);
    }
    out.tables.push(t);
    out.check(spectrum.levels() >= levels, || {
        format!("only {} nonzero levels resolved", spectrum.levels())
    });

    let zero_levels = &spectrum.report.minus_zero_levels;
    out.check(zero_levels.len() == 1, || {
        format!("H- has {} eigenvalues below the zero-mode threshold, expected 1", zero_levels.len())
    });

    let h_norm = sys.h_minus().norm_inf();
    let mut summary = Table::key_value("spectrum_summary");
    summary.entry("max_gap", Cell::F(spectrum.report.max_gap()));
    summary.entry("h_minus_sub_threshold", Cell::U(zero_levels.len()));
    summary.entry("h_plus_sub_threshold", Cell::U(spectrum.report.plus_zero_levels.len()));
    summary.entry("h_minus_norm_inf", Cell::F(h_norm));
    match zero_mode(&sys) {
        Ok(psi0) => {
            let r = residual_norm(sys.h_minus(), 0.0, &psi0).map_err(physics)?;
            summary.entry("zero_mode_residual", Cell::F(r));
            out.check(r <= 1e-12 * h_norm, || {
                format!("zero-mode residual {r:e} exceeds 1e-12 * ||H-|| = {:e}", 1e-12 * h_norm)
            });
            out.tables.push(zero_mode_table(&psi0));
        }
        Err(e) => {
            summary.entry("zero_mode_residual", Cell::F(f64::NAN));
            out.violations.push(format!("zero mode: {e}"));
        }
    }
    out.tables.push(summary);
    Ok(out)
}

fn run_entangle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sys = cfg.susy_system()?;
    let sweep = cfg.coefficients();
    let spectrum = solve(&sys, cfg.levels())?;
    let mut out = Outcome::default();
    let mut levels = Table::rows("entangle_levels", &["level", "energy", "overlap_abs", "overlap_phase", "C_max"]);
    let (mut dev_overlap, mut dev_svd) = (0.0f64, 0.0f64);
    for level in 1..=spectrum.levels() {
        let (plus, minus) = partner_states(&sys, &spectrum, level)?;
        let overlap = inner_product(&plus.state, &minus).map_err(physics)?;
        levels.push(vec![
            Cell::U(level),
            Cell::F(plus.energy),
            Cell::F(overlap.norm()),
            Cell::F(overlap.arg()),
            Cell::F(c_max(overlap).map_err(physics)?),
        ]);
        let mut t = Table::rows(
            &format!("entangle_level{level}"),
            &[
                "c1_abs", "phase_diff", "overlap_abs", "sigma_x", "sigma_y", "sigma_z", "lambda1",
                "lambda2", "C_spin", "C_overlap", "C_svd",
            ],
        );
        for &a in &sweep.c1_abs {
            for &phase in &sweep.phase {
                let (c1, c2) = coefficients(a, phase).map_err(physics)?;
                let state = build_energy_eigenstate(c1, c2, &plus.state, &minus).map_err(physics)?;
                let r = entanglement_report(&state, Some((c1, c2, overlap))).map_err(physics)?;
                let c_ov = r.concurrence_overlap.unwrap_or(f64::NAN);
                dev_overlap = dev_overlap.max((r.concurrence_spin - c_ov).abs());
                dev_svd = dev_svd.max((r.concurrence_spin - r.concurrence_svd).abs());
                t.push(vec![
                    Cell::F(a),
                    Cell::F(phase),
                    Cell::F(overlap.norm()),
                    Cell::F(r.sigma_mean[0]),
                    Cell::F(r.sigma_mean[1]),
                    Cell::F(r.sigma_mean[2]),
                    Cell::F(r.schmidt.0),
                    Cell::F(r.schmidt.1),
                    Cell::F(r.concurrence_spin),
                    Cell::F(c_ov),
                    Cell::F(r.concurrence_svd),
                ]);
            }
        }
        out.tables.push(t);
    }
    out.tables.push(levels);
    out.check(dev_overlap <= 1e-12, || format!("max |C_spin - C_overlap| = {dev_overlap:e}"));
    out.check(dev_svd <= 1e-12, || format!("max |C_spin - C_svd| = {dev_svd:e}"));
    let mut summary = Table::key_value("entangle_summary");
    summary.entry("max_abs_C_spin_minus_C_overlap", Cell::F(dev_overlap));
    summary.entry("max_abs_C_spin_minus_C_svd", Cell::F(dev_svd));
    out.tables.push(summary);
    Ok(out)
}

/// Elementwise deviations of the supercharge identities.
pub fn supercharge_algebra(sys: &SusySystem) -> Vec<(&'static str, f64)> {
    let (q1, q2) = sys.supercharges();
    let h = sys.hamiltonian();
    let t = sys.witten_parity();
    let (qp, qm) = (sys.q_plus(), sys.q_minus());
    vec![
        ("q1_squared_minus_h", q1.matmul(&q1).max_abs_diff(&h)),
        ("q2_squared_minus_h", q2.matmul(&q2).max_abs_diff(&h)),
        ("anticommutator_q1_q2", OperatorMatrix::anticommutator(&q1, &q2).max_abs()),
        ("anticommutator_parity_q1", OperatorMatrix::anticommutator(&t, &q1).max_abs()),
        ("anticommutator_parity_q2", OperatorMatrix::anticommutator(&t, &q2).max_abs()),
        ("q_plus_squared", qp.matmul(&qp).max_abs()),
        ("q_minus_squared", qm.matmul(&qm).max_abs()),
        ("anticommutator_q_plus_q_minus_minus_h", OperatorMatrix::anticommutator(&qp, &qm).max_abs_diff(&h)),
        ("q1_hermiticity", q1.hermiticity_defect()),
        ("q2_hermiticity", q2.hermiticity_defect()),
    ]
}

fn run_supercharge(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sys = cfg.susy_system()?;
    let spectrum = solve(&sys, cfg.levels())?;
    let (q1, q2) = sys.supercharges();
    let mut out = Outcome::default();
    let mut t = Table::rows(
        "supercharge",
        &[
            "level", "energy", "sqrt_energy", "residual_q1_plus", "residual_q1_minus",
            "residual_q2_plus", "residual_q2_minus", "C_q1_plus", "C_q1_minus", "C_q2_plus",
            "C_q2_minus", "C_max", "overlap_q1", "overlap_q2",
        ],
    );
    for level in 1..=spectrum.levels() {
        let (plus, minus) = partner_states(&sys, &spectrum, level)?;
        let st = supercharge_eigenstates(&sys, plus.energy, &plus.state, &minus).map_err(physics)?;
        let root = Complex64::new(plus.energy.sqrt(), 0.0);
        let res = [
            st.q1_plus.eigen_residual(&q1, root),
            st.q1_minus.eigen_residual(&q1, -root),
            st.q2_plus.eigen_residual(&q2, root),
            st.q2_minus.eigen_residual(&q2, -root),
        ]
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()
        .map_err(physics)?;
        let conc = [&st.q1_plus, &st.q1_minus, &st.q2_plus, &st.q2_minus]
            .into_iter()
            .map(susyqm::concurrence_from_spin)
            .collect::<Result<Vec<f64>, _>>()
            .map_err(physics)?;
        let cm = c_max(inner_product(&plus.state, &minus).map_err(physics)?).map_err(physics)?;
        let o1 = st.q1_plus.inner(&st.q1_minus).map_err(physics)?.norm();
        let o2 = st.q2_plus.inner(&st.q2_minus).map_err(physics)?.norm();
        for (name, r) in ["q1+", "q1-", "q2+", "q2-"].iter().zip(&res) {
            out.check(*r <= 1e-8, || format!("level {level}: {name} eigen-residual {r:e}"));
        }
        for c in &conc {
            out.check((c - cm).abs() <= 1e-10, || {
                format!("level {level}: concurrence {c} differs from C_max {cm}")
            });
        }
        out.check(o1.max(o2) <= 1e-10, || format!("level {level}: +/- eigenstates overlap {:e}", o1.max(o2)));
        let mut row = vec![Cell::U(level), Cell::F(plus.energy), Cell::F(plus.energy.sqrt())];
        row.extend(res.iter().map(|&r| Cell::F(r)));
        row.extend(conc.iter().map(|&c| Cell::F(c)));
        row.extend([Cell::F(cm), Cell::F(o1), Cell::F(o2)]);
        t.push(row);
    }
    out.tables.push(t);
    let mut alg = Table::key_value("supercharge_algebra");
    for (name, v) in supercharge_algebra(&sys) {
        out.check(v <= 1e-13, || format!("{name} = {v:e}"));
        alg.entry(name, Cell::F(v));
    }
    out.tables.push(alg);
    Ok(out)
}

fn jc_tables(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let sys = cfg.jc_system()?;
    let cmp = compare_spectrum(&sys).map_err(physics)?;
    let alg = verify_susy_algebra(&sys);
    let mut t = Table::rows(
        "jc_levels",
        &["n", "branch", "E_analytic", "E_numeric", "gap", "concurrence", "fidelity", "degenerate"],
    );
    for l in &cmp.levels {
        t.push(vec![
            Cell::U(l.n),
            Cell::S(l.branch.as_str().into()),
            Cell::F(l.e_analytic),
            Cell::F(l.e_numeric),
            Cell::F(l.gap),
            Cell::F(l.concurrence),
            Cell::F(l.fidelity),
            Cell::B(l.degenerate),
        ]);
        out.check(l.matched, || {
            format!("JC level n={} {} unmatched (gap {:e}, fidelity {})", l.n, l.branch.as_str(), l.gap, l.fidelity)
        });
        if sys.gamma() > 0.0 {
            let target = if l.n == 0 { 0.0 } else { 1.0 };
            out.check((l.concurrence - target).abs() <= 1e-10, || {
                format!("JC level n={} {} concurrence {}", l.n, l.branch.as_str(), l.concurrence)
            });
        }
    }
    out.tables.push(t);
    let mut a = Table::key_value("jc_algebra").json_only();
    let value = serde_json::to_value(alg).expect("report serializes");
    for (k, v) in value.as_object().expect("struct serializes to an object") {
        let v = v.as_f64().unwrap_or(f64::NAN);
        a.entry(k, Cell::F(v));
        out.check(v <= 1e-12, || format!("JC identity {k} deviates by {v:e}"));
    }
    a.entry("omega", Cell::F(sys.omega()));
    a.entry("gamma", Cell::F(sys.gamma()));
    a.entry("n_max", Cell::U(sys.fock().n_max()));
    a.entry("all_matched", Cell::B(cmp.all_matched()));
    out.tables.push(a);
    Ok(())
}

fn run_jc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    jc_tables(cfg, &mut out)?;
    Ok(out)
}

fn run_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sys = cfg.susy_system()?;
    let mut out = Outcome::default();
    let mut t = Table::rows("verify", &["check", "value", "tolerance", "pass"]);
    let mut add = |out: &mut Outcome, name: &str, value: f64, tol: f64| {
        let pass = value <= tol;
        t.push(vec![Cell::S(name.into()), Cell::F(value), Cell::F(tol), Cell::B(pass)]);
        out.check(pass, || format!("{name}: {value:e} > {tol:e}"));
    };

    let hp = sys.h_plus();
    let hm = sys.h_minus();
    add(&mut out, "h_plus_hermiticity", hp.hermiticity_defect(), 1e-14 * hp.max_abs());
    add(&mut out, "h_minus_hermiticity", hm.hermiticity_defect(), 1e-14 * hm.max_abs());
    for (name, v) in supercharge_algebra(&sys) {
        add(&mut out, name, v, 1e-13);
    }

    match solve_partners(&sys, cfg.levels(), PAIRING_TOLERANCE) {
        Ok(spectrum) => {
            add(&mut out, "partner_max_gap", spectrum.report.max_gap(), PAIRING_TOLERANCE);
            let lowest = spectrum.minus[0].energy.min(spectrum.plus[0].energy);
            add(&mut out, "negative_eigenvalue", -lowest, 1e-10);
            let zero_count = spectrum.report.minus_zero_levels.len() as f64;
            add(&mut out, "h_minus_zero_mode_count_minus_one", (zero_count - 1.0).abs(), 0.0);
            let (mut map_dev, mut norm_dev, mut max_overlap) = (0.0f64, 0.0f64, 0.0f64);
            for level in 1..=spectrum.levels() {
                let (plus, minus) = spectrum.level(level).expect("level in range");
                let down = intertwine_down(&sys, plus).map_err(physics)?;
                let aligned = align_phase(&down, &minus.state).map_err(physics)?;
                let diff = aligned.add_scaled(Complex64::new(-1.0, 0.0), &minus.state).map_err(physics)?;
                map_dev = map_dev.max(diff.norm());
                let b_minus = sys.annihilator().apply_to(&minus.state).map_err(physics)?;
                norm_dev = norm_dev.max((b_minus.norm_sqr() - minus.energy).abs());
                let unit = down.rescaled_to_unit().map_err(physics)?;
                max_overlap = max_overlap.max(inner_product(&plus.state, &unit).map_err(physics)?.norm());
            }
            add(&mut out, "intertwining_state_deviation", map_dev, 1e-8);
            add(&mut out, "intertwining_norm_deviation", norm_dev, 1e-8);
            if sys.superpotential().parity() == Parity::Odd {
                add(&mut out, "odd_w_partner_overlap", max_overlap, 1e-10);
            }
        }
        Err(e) => {
            add(&mut out, "partner_pairing", f64::NAN, PAIRING_TOLERANCE);
            out.violations.push(format!("partner pairing: {e}"));
        }
    }
    match zero_mode(&sys) {
        Ok(psi0) => {
            let r = residual_norm(hm, 0.0, &psi0).map_err(physics)?;
            add(&mut out, "zero_mode_relative_residual", r / hm.norm_inf(), 1e-12);
        }
        Err(e) => {
            add(&mut out, "zero_mode_relative_residual", f64::NAN, 1e-12);
            out.violations.push(format!("zero mode: {e}"));
        }
    }
    if cfg.jc_params.is_some() {
        let jc = cfg.jc_system()?;
        let cmp = compare_spectrum(&jc).map_err(physics)?;
        let unmatched = cmp.mismatches().len() as f64;
        add(&mut out, "jc_unmatched_levels", unmatched, 0.0);
        add(&mut out, "jc_algebra_max_deviation", verify_susy_algebra(&jc).max_deviation(), 1e-12);
        let ground_ok = cmp.levels.iter().any(|l| l.n == 0 && l.branch == Branch::Minus && l.matched);
        add(&mut out, "jc_ground_state_unmatched", if ground_ok { 0.0 } else { 1.0 }, 0.0);
    }
    drop(add);
    out.tables.push(t);
    Ok(out)
}
