//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use susyqm::{
    align_phase, build_energy_eigenstate, build_jc, c_max, coefficients, concurrence_from_spin,
    entanglement_report, inner_product, intertwine_down, make_grid, numeric_vs_analytic,
    residual_norm, solve_partner, solve_partners, supercharge_eigenstates, verify_susy_algebra,
    zero_mode, OperatorMatrix, Partner, PartnerSpectrum, Superpotential, SusySystem, Wavefunction,
    PAIRING_TOLERANCE,
};

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn bundled() -> Vec<Superpotential> {
    vec![
        Superpotential::harmonic(),
        Superpotential::cubic(),
        Superpotential::cubic_shifted(0.5),
        Superpotential::tanh(),
    ]
}

fn system(w: Superpotential, n: usize) -> SusySystem {
    SusySystem::new(w, make_grid(-10.0, 10.0, n).unwrap()).unwrap()
}

fn mapped_partner(sys: &SusySystem, s: &PartnerSpectrum, level: usize) -> (f64, Wavefunction, Wavefunction) {
    let (plus, _) = s.level(level).unwrap();
    let minus = intertwine_down(sys, plus).unwrap().rescaled_to_unit().unwrap();
    (plus.energy, plus.state.clone(), minus)
}

fn ac1() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in bundled() {
        let t = Instant::now();
        let sys = system(w.clone(), 2001);
        let (gap, pairs, zero_count, plus_zero, residual) = match solve_partners(&sys, 6, PAIRING_TOLERANCE) {
            Ok(s) => {
                let r = zero_mode(&sys)
                    .and_then(|psi| residual_norm(sys.h_minus(), 0.0, &psi))
                    .unwrap_or(f64::INFINITY);
                (s.report.max_gap(), s.levels(), s.report.minus_zero_levels.len(), s.report.plus_zero_levels.len(), r)
            }
            Err(_) => (f64::INFINITY, 0, 0, 0, f64::INFINITY),
        };
        let secs = t.elapsed().as_secs_f64();
        let rel = residual / sys.h_minus().norm_inf();
        let ok = gap <= 1e-10 && pairs >= 6 && zero_count == 1 && rel <= 1e-12 && secs <= 10.0;
        pass &= ok;
        parts.push(format!(
            "{}: gap {gap:.1e}, H- zero modes {zero_count} (H+ edge copies {plus_zero}), residual/||H-|| {rel:.1e}, {secs:.2}s{}",
            w.name(),
            if ok { "" } else { " <-" }
        ));
    }
    Line { id: "AC1", title: "discrete degeneracy and unique zero mode", pass, detail: parts.join("; ") }
}

fn ac2() -> Line {
    let err = |n: usize| {
        let sys = system(Superpotential::harmonic(), n);
        solve_partner(&sys, Partner::Minus, 6)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(k, p)| (p.energy - k as f64).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(2001), err(4001));
    let order = (coarse / fine).log2();
    Line {
        id: "AC2",
        title: "continuum recovery for W = x",
        pass: coarse <= 2e-4 && fine <= 5e-5,
        detail: format!(
            "max |E_n - n| = {coarse:.3e} at 2001 points (limit 2e-4), {fine:.3e} at 4001 (limit 5e-5), observed order {order:.2}"
        ),
    }
}

fn ac3() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in bundled() {
        let sys = system(w.clone(), 2001);
        let s = solve_partners(&sys, 6, PAIRING_TOLERANCE).unwrap();
        let (mut map_dev, mut norm_dev) = (0.0f64, 0.0f64);
        let mut worst = 0;
        for level in 1..=s.levels() {
            let (plus, minus) = s.level(level).unwrap();
            let down = intertwine_down(&sys, plus).unwrap();
            let aligned = align_phase(&down, &minus.state).unwrap();
            let d = aligned.add_scaled(Complex64::new(-1.0, 0.0), &minus.state).unwrap().norm();
            let b = sys.annihilator().apply_to(&minus.state).unwrap();
            let nd = (b.norm_sqr() - minus.energy).abs();
            if d.max(nd) > map_dev.max(norm_dev) {
                worst = level;
            }
            map_dev = map_dev.max(d);
            norm_dev = norm_dev.max(nd);
        }
        let ok = map_dev <= 1e-8 && norm_dev <= 1e-8;
        pass &= ok;
        parts.push(format!(
            "{}: state {map_dev:.1e}, norm {norm_dev:.1e}{}",
            w.name(),
            if ok { String::new() } else { format!(" <- level {worst} (E = {:.2e})", s.level(worst).unwrap().0.energy) }
        ));
    }
    Line { id: "AC3", title: "intertwining relations", pass, detail: parts.join("; ") }
}

fn ac4() -> Line {
    let (mut d_ov, mut d_svd) = (0.0f64, 0.0f64);
    let mut rows = 0;
    for w in bundled() {
        let sys = system(w, 2001);
        let s = solve_partners(&sys, 3, PAIRING_TOLERANCE).unwrap();
        for level in 1..=3 {
            let (_, plus, minus) = mapped_partner(&sys, &s, level);
            let overlap = inner_product(&plus, &minus).unwrap();
            for i in 0..=20 {
                for k in 0..8 {
                    let (c1, c2) = coefficients(i as f64 / 20.0, k as f64 * TAU / 8.0).unwrap();
                    let st = build_energy_eigenstate(c1, c2, &plus, &minus).unwrap();
                    let r = entanglement_report(&st, Some((c1, c2, overlap))).unwrap();
                    d_ov = d_ov.max((r.concurrence_spin - r.concurrence_overlap.unwrap()).abs());
                    d_svd = d_svd.max((r.concurrence_spin - r.concurrence_svd).abs());
                    rows += 1;
                }
            }
        }
    }
    Line {
        id: "AC4",
        title: "concurrence three-way agreement",
        pass: d_ov <= 1e-12 && d_svd <= 1e-12,
        detail: format!("{rows} states, max |C_spin - C_overlap| = {d_ov:.1e}, max |C_spin - 2 l1 l2| = {d_svd:.1e}"),
    }
}

fn ac5() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in [Superpotential::harmonic(), Superpotential::cubic()] {
        let sys = system(w.clone(), 2001);
        let s = solve_partners(&sys, 3, PAIRING_TOLERANCE).unwrap();
        let (mut max_ov, mut max_dc) = (0.0f64, 0.0f64);
        for level in 1..=3 {
            let (e, plus, minus) = mapped_partner(&sys, &s, level);
            max_ov = max_ov.max(inner_product(&plus, &minus).unwrap().norm());
            let st = supercharge_eigenstates(&sys, e, &plus, &minus).unwrap();
            for state in [&st.q1_plus, &st.q1_minus, &st.q2_plus, &st.q2_minus] {
                max_dc = max_dc.max((concurrence_from_spin(state).unwrap() - 1.0).abs());
            }
        }
        let ok = max_ov <= 1e-10 && max_dc <= 1e-10;
        pass &= ok;
        parts.push(format!("{}: max overlap {max_ov:.1e}, max |C - 1| {max_dc:.1e}{}", w.name(), if ok { "" } else { " <-" }));
    }
    let sys = system(Superpotential::cubic_shifted(0.5), 2001);
    let s = solve_partners(&sys, 3, PAIRING_TOLERANCE).unwrap();
    let witness = (1..=3)
        .map(|l| {
            let (_, plus, minus) = mapped_partner(&sys, &s, l);
            inner_product(&plus, &minus).unwrap()
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let cm = c_max(witness).unwrap();
    let ok = witness.norm() >= 1e-3 && cm < 1.0 - 1e-6;
    pass &= ok;
    parts.push(format!("cubic_shifted: overlap {:.3e}, C_max = 1 - {:.1e}", witness.norm(), 1.0 - cm));
    Line { id: "AC5", title: "odd-superpotential maximality", pass, detail: parts.join("; ") }
}

fn ac6() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in bundled() {
        let sys = system(w.clone(), 2001);
        let (q1, q2) = sys.supercharges();
        let h = sys.hamiltonian();
        let sq = q1.matmul(&q1).max_abs_diff(&h).max(q2.matmul(&q2).max_abs_diff(&h));
        let s = solve_partners(&sys, 3, PAIRING_TOLERANCE).unwrap();
        let mut res = 0.0f64;
        for level in 1..=3 {
            let (e, plus, minus) = mapped_partner(&sys, &s, level);
            let st = supercharge_eigenstates(&sys, e, &plus, &minus).unwrap();
            let r = Complex64::new(e.sqrt(), 0.0);
            res = res
                .max(st.q1_plus.eigen_residual(&q1, r).unwrap())
                .max(st.q1_minus.eigen_residual(&q1, -r).unwrap())
                .max(st.q2_plus.eigen_residual(&q2, r).unwrap())
                .max(st.q2_minus.eigen_residual(&q2, -r).unwrap());
        }
        let ok = res <= 1e-8 && sq <= 1e-13;
        pass &= ok;
        parts.push(format!("{}: residual {res:.1e}, Q^2 - H {sq:.1e}{}", w.name(), if ok { "" } else { " <-" }));
    }
    Line { id: "AC6", title: "supercharge eigenstates", pass, detail: parts.join("; ") }
}

fn ac7() -> Line {
    let t = Instant::now();
    let sys = build_jc(1.0, 0.1, 64).unwrap();
    let result = numeric_vs_analytic(&sys);
    let secs = t.elapsed().as_secs_f64();
    match result {
        Ok(cmp) => {
            let gap = cmp.levels.iter().map(|l| l.gap).fold(0.0, f64::max);
            let fid = cmp.levels.iter().map(|l| 1.0 - l.fidelity).fold(0.0, f64::max);
            let dc = cmp.levels.iter().filter(|l| l.n > 0).map(|l| (l.concurrence - 1.0).abs()).fold(0.0, f64::max);
            let ground = cmp.levels.iter().find(|l| l.n == 0).unwrap().concurrence;
            Line {
                id: "AC7",
                title: "Jaynes-Cummings spectrum",
                pass: gap <= 1e-10 && fid <= 1e-10 && dc <= 1e-10 && ground.abs() <= 1e-12 && secs <= 5.0,
                detail: format!(
                    "{} levels, max gap {gap:.1e}, max 1 - fidelity {fid:.1e}, max |C - 1| {dc:.1e}, ground C {ground:.1e}, {secs:.2}s",
                    cmp.levels.len()
                ),
            }
        }
        Err(e) => Line { id: "AC7", title: "Jaynes-Cummings spectrum", pass: false, detail: e.to_string() },
    }
}

fn ac8() -> Line {
    let sys = build_jc(1.0, 0.1, 64).unwrap();
    let r = verify_susy_algebra(&sys);
    let mut grid_max = 0.0f64;
    for w in bundled() {
        let s = system(w, 2001);
        let (q1, q2) = s.supercharges();
        let t = s.witten_parity();
        grid_max = grid_max
            .max(OperatorMatrix::anticommutator(&q1, &q2).max_abs())
            .max(OperatorMatrix::anticommutator(&t, &q1).max_abs());
    }
    let worst = r.anticommutator_q1_q2.max(r.anticommutator_sigma_z_q).max(r.commutator_q_h);
    Line {
        id: "AC8",
        title: "algebra identities",
        pass: worst <= 1e-12 && grid_max <= 1e-12,
        detail: format!(
            "JC {{Q1,Q2}} {:.1e}, {{sigma_z,Q}} {:.1e}, [Q,H] {:.1e}; grid {{Q1,Q2}} and {{T,Q1}} {grid_max:.1e}",
            r.anticommutator_q1_q2, r.anticommutator_sigma_z_q, r.commutator_q_h
        ),
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
    }
    files
}

fn ac9() -> Line {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&configs)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let tmp = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut bad_exit = Vec::new();
    for cfg in &paths {
        let stem = cfg.file_stem().unwrap().to_string_lossy().to_string();
        let mut runs = Vec::new();
        for pass in 0..2 {
            let out = tmp.path().join(format!("{stem}_{pass}"));
            let status = Command::new(env!("CARGO_BIN_EXE_susyqm"))
                .arg("--config")
                .arg(cfg)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap()
                .status;
            if !matches!(status.code(), Some(0 | 1)) {
                bad_exit.push(format!("{stem} ({status})"));
            }
            runs.push(snapshot(&out));
        }
        if runs[0] != runs[1] || runs[0].is_empty() {
            differing.push(stem);
        }
    }
    Line {
        id: "AC9",
        title: "deterministic CLI output",
        pass: differing.is_empty() && bad_exit.is_empty() && !paths.is_empty(),
        detail: format!(
            "{} bundled configs run twice, differing: {:?}, unexpected exit codes: {:?}",
            paths.len(),
            differing,
            bad_exit
        ),
    }
}

fn main() {
    let lines = [ac1(), ac2(), ac3(), ac4(), ac5(), ac6(), ac7(), ac8(), ac9()];
    for l in &lines {
        println!("{} {} {}: {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.title, l.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: {} of {} criteria fail ({})", failed.len(), lines.len(), failed.join(", "));
        std::process::exit(1);
    }
}
