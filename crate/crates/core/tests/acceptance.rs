//! Acceptance criteria 1-10, run in sequence so each runtime is measured
//! without contention. One PASS/FAIL line per criterion goes straight to
//! stderr; the test fails afterwards if any criterion failed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use causal_chain::correspondence::{
    classify_eigenstates, eigenstate, k_avg, table1_catalog, verify_eq10, ObservablePair, StateSelector,
};
use causal_chain::game::{build_w_opt, build_w_three, classical_bound, two_party_game, validate_process};
use causal_chain::kernel::{eigensolve, to_dense};
use causal_chain::lattice::TfimSpec;
use causal_chain::phase::{mz_thermo, ostr_finite, ostr_thermo};
use causal_chain::sweep::{run_sweep, Backend, OutputFormat, SweepConfig, SweepRecord};
use causal_chain::verify::oracle_deviation;

type Outcome = Result<String, String>;

const K_MAX: f64 = 0.853_553_390_593_273_8;

/// `n` evenly spaced points on `[lo, hi]`, both ends included.
fn closed_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep(n: usize, steps: usize) -> Result<Vec<SweepRecord>, String> {
    run_sweep(&SweepConfig {
        n_sites: n,
        theta_min: 0.0,
        theta_max: FRAC_PI_2,
        steps,
        backend: Backend::Fermion,
        output: None,
        format: OutputFormat::Csv,
    })
    .map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let gs = eigenstate(FRAC_PI_4, StateSelector::Ground).map_err(|e| e.to_string())?;
    let k = k_avg(&gs, &ObservablePair::standard()).map_err(|e| e.to_string())?;
    let p = two_party_game(FRAC_PI_4).map_err(|e| e.to_string())?.p_total;
    ensure((k - K_MAX).abs() <= 1e-10 && (p - K_MAX).abs() <= 1e-10, || {
        format!("K_avg = {k}, P_total = {p}")
    })?;
    Ok(format!("K_avg = {k:.12}, P_total = {p:.12}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for t in closed_grid(64, 0.0, FRAC_PI_2) {
        let r = verify_eq10(t).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_deviation);
    }
    Ok(format!("64 angles, max deviation {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let grid = closed_grid(65, 0.0, FRAC_PI_2);
    for (i, &t) in grid.iter().enumerate() {
        let p = two_party_game(t).map_err(|e| e.to_string())?.p_total;
        if i == 0 || i + 1 == grid.len() {
            ensure((p - 0.75).abs() <= 1e-12, || format!("endpoint {t}: P_total = {p}"))?;
        } else {
            ensure(p > 0.75, || format!("theta = {t}: P_total = {p} not above 3/4"))?;
        }
    }
    for n in [2usize, 3, 10] {
        let b = classical_bound(n).map_err(|e| e.to_string())?;
        let nf = n as f64;
        let want = (1.0 - 1.0 / (2.0 * nf), 0.5 + 1.0 / (2.0 * nf));
        ensure(
            (b.p_left - want.0).abs() <= f64::EPSILON
                && (b.p_right - want.1).abs() <= f64::EPSILON
                && b.p_total == 0.75,
            || format!("bound for {n} parties: {b:?}"),
        )?;
    }
    let b3 = classical_bound(3).map_err(|e| e.to_string())?;
    ensure(
        (b3.p_left - 5.0 / 6.0).abs() <= f64::EPSILON && (b3.p_right - 2.0 / 3.0).abs() <= f64::EPSILON,
        || format!("three-party bound {b3:?}"),
    )?;
    Ok("interior above 3/4, endpoints at 3/4, bounds for 2, 3, 10 parties".into())
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for t in closed_grid(16, 0.0, FRAC_PI_2) {
        for row in table1_catalog(t).map_err(|e| e.to_string())? {
            worst = worst.max(row.max_deviation());
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("3 rows x 16 angles, max deviation {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let grid: Vec<f64> = (1..=65).map(|k| k as f64 * FRAC_PI_2 / 66.0).collect();
    let report = classify_eigenstates(&grid).map_err(|e| e.to_string())?;
    let flagged = report.flagged_ranks();
    let last = report.entries.len() - 1;
    let extremes_ok = [0, last]
        .iter()
        .all(|&r| (report.entries[r].max_k_avg - K_MAX).abs() <= 1e-6 && report.entries[r].flagged);
    let others_max = report
        .entries
        .iter()
        .filter(|e| e.rank != 0 && e.rank != last)
        .map(|e| e.max_k_avg)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(extremes_ok && flagged == vec![0, last] && others_max <= 0.75 + 1e-9, || {
        format!(
            "{} of {} states exceed 3/4 (ranks {:?}); largest non-extremal max K_avg = {others_max:.6}",
            flagged.len(),
            report.entries.len(),
            flagged
        )
    })?;
    Ok("exactly the ground and most-excited states exceed 3/4".into())
}

fn criterion_6() -> Outcome {
    let dev = oracle_deviation(2..=10, &closed_grid(16, 0.0, FRAC_PI_2), false).map_err(|e| e.to_string())?;
    ensure(dev <= 1e-8, || format!("max deviation {dev:.3e}"))?;
    Ok(format!("M = 2..10 x 16 angles, max deviation {dev:.2e}"))
}

fn criterion_7() -> Outcome {
    let sizes = [20usize, 40, 80, 100];
    let curves: Vec<Vec<SweepRecord>> = sizes.iter().map(|&n| sweep(n, 65)).collect::<Result<_, _>>()?;
    let nearest = curves[0]
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.theta - FRAC_PI_4).abs().total_cmp(&(b.1.theta - FRAC_PI_4).abs()))
        .map(|x| x.0)
        .unwrap();
    let mut failures = Vec::new();
    for (c, n) in curves.iter().zip(sizes) {
        let argmax = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.p_total.total_cmp(&b.1.p_total))
            .map(|x| x.0)
            .unwrap();
        if argmax != nearest {
            failures.push(format!("N={n} peaks at index {argmax}, not {nearest}"));
        }
    }
    let mut worst = (0.0f64, 0, 0, 0.0);
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            for (a, b) in curves[i].iter().zip(&curves[j]) {
                let d = (a.p_total - b.p_total).abs();
                if d > worst.0 {
                    worst = (d, sizes[i], sizes[j], a.theta);
                }
            }
        }
    }
    if worst.0 > 1e-3 {
        failures.push(format!(
            "N={} vs N={} differ by {:.3e} at theta = {:.4}",
            worst.1, worst.2, worst.0, worst.3
        ));
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("max pairwise deviation {:.2e}, all peak at index {nearest}", worst.0))
}

fn criterion_8() -> Outcome {
    for t in closed_grid(65, 0.0, FRAC_PI_2) {
        let (mz, os) = (mz_thermo(t).map_err(|e| e.to_string())?, ostr_thermo(t).map_err(|e| e.to_string())?);
        ensure(mz * os == 0.0, || format!("both nonzero at {t}"))?;
        if t == FRAC_PI_4 {
            ensure(mz == 0.0 && os == 0.0, || "not both zero at pi/4".into())?;
        }
    }
    ensure(mz_thermo(0.0) == Ok(1.0) && ostr_thermo(FRAC_PI_2) == Ok(1.0), || "endpoint values".into())?;
    let t = 3.0 * PI / 8.0;
    let finite = ostr_finite(&TfimSpec::new(200, t).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let thermo = ostr_thermo(t).map_err(|e| e.to_string())?;
    ensure((finite - thermo).abs() <= 5e-2, || format!("M=200: {finite} vs {thermo}"))?;
    Ok(format!("disjoint supports; M=200 string {finite:.6} vs {thermo:.6}"))
}

fn criterion_9() -> Outcome {
    let recs = sweep(100, 65)?;
    for r in &recs {
        if r.theta < FRAC_PI_4 {
            ensure(r.p_left > r.p_right, || format!("theta = {}: left {} right {}", r.theta, r.p_left, r.p_right))?;
        } else if r.theta > FRAC_PI_4 {
            ensure(r.p_left < r.p_right, || format!("theta = {}: left {} right {}", r.theta, r.p_left, r.p_right))?;
        } else {
            ensure((r.p_left - r.p_right).abs() <= 1e-9, || "unequal at pi/4".into())?;
        }
    }
    Ok("left favoured below pi/4, right above".into())
}

fn criterion_10() -> Outcome {
    let mut three_min = f64::INFINITY;
    for t in (0..32).map(|k| k as f64 * 2.0 * PI / 32.0) {
        let w = build_w_opt(t);
        let ev = eigensolve(&to_dense(w.body()).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let vals = ev.eigenvalues();
        ensure(vals[0] >= -1e-10, || format!("theta = {t}: min eigenvalue {}", vals[0]))?;
        let zeros = vals.iter().filter(|v| v.abs() <= 1e-10).count();
        let halves = vals.iter().filter(|v| (*v - 0.5).abs() <= 1e-10).count();
        ensure(zeros == 8 && halves == 8, || format!("theta = {t}: spectrum {vals:?}"))?;
        let w3 = build_w_three(t.cos(), t.sin()).map_err(|e| e.to_string())?;
        three_min = three_min.min(validate_process(&w3).map_err(|e| e.to_string())?.min_eigenvalue);
    }
    let note = if three_min >= -1e-10 { "non-negative" } else { "NEGATIVE (report only)" };
    Ok(format!(
        "W_opt spectrum {{0, 1/2}} x 8 at 32 angles; three-party min eigenvalue {three_min:.3e} {note}"
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u8, fn() -> Outcome, Duration); 10] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(5)),
        (3, criterion_3, Duration::from_secs(60)),
        (4, criterion_4, Duration::from_secs(10)),
        (5, criterion_5, Duration::from_secs(30)),
        (6, criterion_6, Duration::from_secs(60)),
        (7, criterion_7, Duration::from_secs(60)),
        (8, criterion_8, Duration::from_secs(60)),
        (9, criterion_9, Duration::from_secs(60)),
        (10, criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (id, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed > limit {
                Err(format!("{d}; runtime {elapsed:.2?} over the {limit:?} limit"))
            } else {
                Ok(d)
            }
        });
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(err, "acceptance criterion {id:>2}: {tag} ({elapsed:.2?}) {detail}").unwrap();
        if outcome.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
