//! Acceptance criteria 1 to 8. Each prints one PASS or FAIL line; the
//! process exits nonzero when any criterion fails.

mod common;

use common::*;
use qsym3::bell322::{verify_all, verify_symmetric_form, SUPPORTED_CLASSES};
use qsym3::conditional::{
    closed_form_d32, closed_form_d33, conditional_chsh, optimize_conditional, q_from_value, CharlieSetting,
    ConditionalGrid, Outcome, OUTCOME_EPS,
};
use qsym3::correlations::{
    chsh_optimize_direct, chsh_optimum, d32_t_eigenvalues, d33_t12_half_pi_alpha_pi, d33_t12_third_pi_alpha_zero,
    hilbert_schmidt_decompose, reduce_to_pair, DirectGrid,
};
use qsym3::invariants::{
    concurrence_closed_d32, concurrence_closed_d33, tangle_closed_d33, three_tangle, wootters_concurrence,
};
use qsym3::linalg::sym_eigenvalues;
use qsym3::qsym::{
    canonical_d32, canonical_d33, majorana_roots, symmetrize, Party, PureState3, SloccClass,
    DEFAULT_TOL,
};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::Instant;

const LOCALITY_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-10;
const DIRECT_TOL: f64 = 1e-3;
const D32_CLOSED_TOL: f64 = 1e-10;
const D33_CLOSED_TOL: f64 = 1e-8;
const HEADLINE_TOL: f64 = 1e-6;
const D32_COMBINED_MAX: f64 = 2.552;
const D32_COMBINED_TOL: f64 = 5e-3;
const Q_W: f64 = 0.6667;
const Q_W_TOL: f64 = 5e-3;
const VALUE_TOL_EXACT: f64 = 1e-9;
const VALUE_TOL_NUMERIC: f64 = 1e-3;
const FIDELITY_TOL_EXACT: f64 = 1e-9;
const FIDELITY_TOL_NUMERIC: f64 = 1e-4;
const ROUND_TRIP_TOL: f64 = 1e-8;
const SPINOR_TOL: f64 = 1e-3;
const INVARIANT_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn pair_t(state: &PureState3<f64>) -> [[f64; 3]; 3] {
    hilbert_schmidt_decompose(&reduce_to_pair(state, Party::C)).t
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn max_sorted_diff(a: Vec<f64>, b: Vec<f64>) -> f64 {
    sorted(a).iter().zip(sorted(b).iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn betas(n: usize) -> Vec<f64> {
    (1..=n).map(|k| PI * k as f64 / n as f64).collect()
}

fn criterion_1() -> Verdict {
    let d32 = betas(2000)
        .par_iter()
        .map(|&b| chsh_optimum(&pair_t(&canonical_d32(b).unwrap())))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let mut r = rng(1);
    let draws: Vec<(f64, f64, f64)> = (0..10_000)
        .map(|_| (1.0 - r.gen::<f64>(), r.gen_range(0.0..TAU), PI * (1.0 - r.gen::<f64>())))
        .collect();
    let d33 = draws
        .par_iter()
        .map(|&(y, a, b)| chsh_optimum(&pair_t(&canonical_d33(y, a, b).unwrap())))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    verdict(
        d32 <= 2.0 + LOCALITY_TOL && d33 <= 2.0 + LOCALITY_TOL,
        format!("max chsh_opt d32 = {d32:.12}, d33 = {d33:.12} (limit 2 + {LOCALITY_TOL:e})"),
    )
}

fn criterion_2() -> Verdict {
    let d32 = betas(2000)
        .iter()
        .map(|&b| {
            let (t1, t2, t3) = d32_t_eigenvalues(b).unwrap();
            let num = sym_eigenvalues(&pair_t(&canonical_d32(b).unwrap()));
            max_sorted_diff(vec![t1, t2, t3], num.to_vec())
        })
        .fold(0.0, f64::max);
    let top_two = |state: PureState3<f64>| -> Vec<f64> {
        let mut ev = sym_eigenvalues(&pair_t(&state)).to_vec();
        ev.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        ev.truncate(2);
        ev
    };
    let mut cases = 0.0f64;
    for k in 1..=100 {
        let y = k as f64 / 100.0;
        let (a1, a2) = d33_t12_half_pi_alpha_pi(y).unwrap();
        let e = max_sorted_diff(vec![a1, a2], top_two(canonical_d33(y, PI, FRAC_PI_2).unwrap()));
        let (b1, b2) = d33_t12_third_pi_alpha_zero(y).unwrap();
        let f = max_sorted_diff(vec![b1, b2], top_two(canonical_d33(y, 0.0, FRAC_PI_3).unwrap()));
        cases = cases.max(e).max(f);
    }
    verdict(
        d32 <= EIGEN_TOL && cases <= EIGEN_TOL,
        format!("d32 triple max err = {d32:.3e}, d33 cases (i)/(ii) max err = {cases:.3e} (tol {EIGEN_TOL:e})"),
    )
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let states: Vec<PureState3<f64>> = (0..100).map(|_| random_state3(&mut r)).collect();
    let worst = states
        .par_iter()
        .map(|s| {
            let rho = reduce_to_pair(s, Party::C);
            let h = chsh_optimum(&hilbert_schmidt_decompose(&rho).t);
            (h - chsh_optimize_direct(&rho, DirectGrid::default())).abs()
        })
        .reduce(|| 0.0, f64::max);
    verdict(worst <= DIRECT_TOL, format!("max |horodecki - direct| = {worst:.3e} over 100 reductions (tol {DIRECT_TOL:e})"))
}

struct ClosedErrors {
    worst: f64,
    compared: usize,
    skipped: usize,
    published_nu_dev: f64,
}

fn setting_grid(beta_n: usize, theta_n: usize, phi_n: usize) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &b in &betas(beta_n) {
        for t in linspace(0.0, PI, theta_n) {
            for p in linspace(0.0, TAU, phi_n) {
                out.push((b, t, p));
            }
        }
    }
    out
}

fn criterion_4() -> Verdict {
    let grid = setting_grid(50, 25, 25);
    let mut d32 = ClosedErrors { worst: 0.0, compared: 0, skipped: 0, published_nu_dev: 0.0 };
    for &(b, t, p) in &grid {
        let state = canonical_d32(b).unwrap();
        let report = conditional_chsh(&state, &CharlieSetting::new(t, p).unwrap());
        for c in Outcome::BOTH {
            let prob = report.probability(c);
            if prob <= OUTCOME_EPS {
                d32.skipped += 1;
                continue;
            }
            let Ok(cf) = closed_form_d32(b, t, p, c) else {
                d32.skipped += 1;
                continue;
            };
            let tm = if c == Outcome::Plus { report.T_plus } else { report.T_minus };
            let mut err = (cf.p - prob).abs();
            err = err.max((cf.mu - 6.0 * (2.0 + b.cos()) * prob).abs());
            for (row, num) in cf.matrix.iter().zip(tm.iter()) {
                for (a, b) in row.iter().zip(num.iter()) {
                    err = err.max((a - b).abs());
                }
            }
            err = err.max(max_sorted_diff(cf.t.to_vec(), sym_eigenvalues(&tm).to_vec()));
            d32.worst = d32.worst.max(err);
            d32.compared += 1;
        }
    }
    let mut d33 = ClosedErrors { worst: 0.0, compared: 0, skipped: 0, published_nu_dev: 0.0 };
    for &(b, t, p) in &grid {
        let state = canonical_d33(1.0, 0.0, b).unwrap();
        let report = conditional_chsh(&state, &CharlieSetting::new(t, p).unwrap());
        for c in Outcome::BOTH {
            let prob = report.probability(c);
            if prob <= OUTCOME_EPS {
                d33.skipped += 1;
                continue;
            }
            let Ok(cf) = closed_form_d33(b, t, p, c) else {
                d33.skipped += 1;
                continue;
            };
            let tm = if c == Outcome::Plus { report.T_plus } else { report.T_minus };
            let err = (cf.p - prob).abs().max(max_sorted_diff(cf.t.to_vec(), sym_eigenvalues(&tm).to_vec()));
            d33.worst = d33.worst.max(err);
            d33.published_nu_dev = d33.published_nu_dev.max((cf.nu - cf.nu_published).abs());
            d33.compared += 1;
        }
    }
    verdict(
        d32.worst <= D32_CLOSED_TOL && d33.worst <= D33_CLOSED_TOL,
        format!(
            "d32 max err = {:.3e} ({} branches, {} skipped, tol {D32_CLOSED_TOL:e}); d33 max err = {:.3e} ({} branches, {} skipped, tol {D33_CLOSED_TOL:e}); printed nu arrangement deviates by up to {:.3e}",
            d32.worst, d32.compared, d32.skipped, d33.worst, d33.compared, d33.skipped, d33.published_nu_dev
        ),
    )
}

fn criterion_5() -> Verdict {
    let w = PureState3::<f64>::w();
    let w_branch = [0.0, PI]
        .iter()
        .map(|&t| {
            let r = conditional_chsh(&w, &CharlieSetting::new(t, 0.0).unwrap());
            r.chsh_c_opt[0].max(r.chsh_c_opt[1])
        })
        .fold(0.0, f64::max);
    let grid = ConditionalGrid::default();
    let d32_max = betas(60)
        .par_iter()
        .map(|&b| optimize_conditional(&canonical_d32(b).unwrap(), grid).report.chsh_con_opt)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let ghz = optimize_conditional(&PureState3::<f64>::ghz(), grid).report.chsh_con_opt;
    let q_ghz = q_from_value(ghz);
    let q_w = q_from_value(optimize_conditional(&w, grid).report.chsh_con_opt);

    let scan = ConditionalGrid::coarse(37, 37);
    let q_d32 = betas(40)
        .par_iter()
        .map(|&b| q_from_value(optimize_conditional(&canonical_d32(b).unwrap(), scan).report.chsh_con_opt))
        .reduce(|| f64::INFINITY, f64::min);
    let d33_points: Vec<(f64, f64, f64)> = [(1.0, 0.0), (0.5, 0.0), (1.0, PI), (0.5, FRAC_PI_2)]
        .iter()
        .flat_map(|&(y, a)| betas(20).into_iter().map(move |b| (y, a, b)))
        .collect();
    let q_d33 = d33_points
        .par_iter()
        .map(|&(y, a, b)| q_from_value(optimize_conditional(&canonical_d33(y, a, b).unwrap(), scan).report.chsh_con_opt))
        .reduce(|| f64::INFINITY, f64::min);

    let target = 2.0 * SQRT_2;
    let ok = (w_branch - target).abs() <= HEADLINE_TOL
        && (d32_max - D32_COMBINED_MAX).abs() <= D32_COMBINED_TOL
        && (ghz - target).abs() <= HEADLINE_TOL
        && (q_ghz - 1.0).abs() <= HEADLINE_TOL
        && (q_w - Q_W).abs() <= Q_W_TOL
        && q_d32 > 0.0
        && q_d33 > 0.0;
    verdict(
        ok,
        format!(
            "W branch max = {w_branch:.9}, d32 combined max = {d32_max:.6}, GHZ combined = {ghz:.9}, Q(GHZ) = {q_ghz:.9}, Q(W) = {q_w:.6}, min Q d32 scan = {q_d32:.3e}, min Q d33 scan = {q_d33:.3e}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let expected_bounds = [2.0, 3.0, 4.0, 5.0, 6.0, 6.0];
    let expected_values = [
        4.0,
        8.0 * 5f64.sqrt() - 13.0,
        6.19794,
        1.0 + 4.0 * 3f64.sqrt(),
        9.78988,
        9.32530,
    ];
    let rows = verify_all();
    let mut ok = rows.len() == 6;
    let mut parts = Vec::new();
    for ((row, bound), value) in rows.iter().zip(expected_bounds).zip(expected_values) {
        let tol = if [2, 5, 26].contains(&row.class) { VALUE_TOL_EXACT } else { VALUE_TOL_NUMERIC };
        let good = row.classical_bound == bound
            && (row.quantum_value - value).abs() <= tol
            && row.quantum_value > row.classical_bound;
        ok &= good;
        parts.push(format!("{}: bound {} value {:.6}", row.class, row.classical_bound, row.quantum_value));
        for alt in &row.alternate_readings {
            parts.push(format!("{} alternate '{}' = {:.6}", row.class, alt.label, alt.quantum_value));
        }
    }
    verdict(ok, parts.join("; "))
}

fn criterion_7() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in SUPPORTED_CLASSES {
        let report = match verify_symmetric_form(k) {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                parts.push(format!("{k}: error {e}"));
                continue;
            }
        };
        let ftol = if [2, 5, 26].contains(&k) { FIDELITY_TOL_EXACT } else { FIDELITY_TOL_NUMERIC };
        let fid_ok = report.fidelity >= 1.0 - ftol;
        let slocc_ok = report.slocc == Some(SloccClass::ThreeDistinct);
        let spin = report.spinors.as_ref().map(|s| s.max_difference).unwrap_or(f64::INFINITY);
        let spin_ok = spin <= SPINOR_TOL;
        ok &= fid_ok && slocc_ok && spin_ok;
        let mut line = format!("{k}: 1-F = {:.2e}, spinor diff = {spin:.2e}", 1.0 - report.fidelity);
        if !slocc_ok {
            line.push_str(&format!(", slocc {:?}", report.slocc));
        }
        if !spin_ok {
            line.push_str(" [spinor mismatch]");
        }
        for d in &report.discrepancies {
            line.push_str(&format!(" [reported: {d}]"));
        }
        parts.push(line);
    }
    let mut r = rng(7);
    let mut worst = 1.0f64;
    for _ in 0..1000 {
        let s = random_symmetric(&mut r);
        let back = symmetrize(&majorana_roots(&s, DEFAULT_TOL).unwrap()).unwrap();
        worst = worst.min(back.fidelity(&s));
    }
    ok &= worst >= 1.0 - ROUND_TRIP_TOL;
    parts.push(format!("round trip min fidelity = 1 - {:.2e}", 1.0 - worst));
    verdict(ok, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let ghz = PureState3::<f64>::ghz();
    let w = PureState3::<f64>::w();
    let tau_ghz = three_tangle(&ghz);
    let tau_w = three_tangle(&w);
    let c_w = wootters_concurrence(&reduce_to_pair(&w, Party::C));
    let anchors = (tau_ghz - 1.0).abs() <= INVARIANT_TOL
        && tau_w.abs() <= INVARIANT_TOL
        && (c_w - 2.0 / 3.0).abs() <= INVARIANT_TOL;

    let mut r = rng(8);
    let mut d32_err = 0.0f64;
    for _ in 0..1000 {
        let b = PI * (1.0 - r.gen::<f64>());
        let s = canonical_d32(b).unwrap();
        let c = wootters_concurrence(&reduce_to_pair(&s, Party::C));
        d32_err = d32_err.max((c - concurrence_closed_d32(b).unwrap()).abs()).max(three_tangle(&s).abs());
    }
    let mut d33_err = 0.0f64;
    for _ in 0..1000 {
        let (y, a, b) = (1.0 - r.gen::<f64>(), r.gen_range(0.0..TAU), PI * (1.0 - r.gen::<f64>()));
        let s = canonical_d33(y, a, b).unwrap();
        let c = wootters_concurrence(&reduce_to_pair(&s, Party::C));
        d33_err = d33_err
            .max((c - concurrence_closed_d33(y, a, b).unwrap()).abs())
            .max((three_tangle(&s) - tangle_closed_d33(y, a, b).unwrap()).abs());
    }
    verdict(
        anchors && d32_err <= ORACLE_TOL && d33_err <= ORACLE_TOL,
        format!(
            "tau(GHZ) = {tau_ghz:.12}, tau(W) = {tau_w:.3e}, C(W) = {c_w:.12}; closed vs oracle max err d32 = {d32_err:.3e}, d33 = {d33_err:.3e} (tol {ORACLE_TOL:e})"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("reduced-pair locality", criterion_1),
        ("closed-form correlation eigenvalues", criterion_2),
        ("horodecki vs direct optimization", criterion_3),
        ("conditional closed forms", criterion_4),
        ("headline conditional values", criterion_5),
        ("(3,2,2) table verification", criterion_6),
        ("symmetric forms and majorana spinors", criterion_7),
        ("entanglement invariants", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name} | {} [{:.1}s]", n + 1, out.detail, start.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
