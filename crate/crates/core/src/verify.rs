//! Self-check suites run by the `verify` command.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{table1_catalog, verify_eq10, verify_eq10_with, verify_rho134, ObservablePair};
use crate::error::Result;
use crate::fermion::{observables, solve_ground_state, string_expectation_len};
use crate::game::{build_w_opt, classical_bound, validate_process};
use crate::kernel::{eigensolve, expectation, to_dense, Axis, OperatorExpr};
use crate::lattice::{build_tfim, TfimSpec};
use crate::phase::{mz_thermo, ostr_thermo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub level: VerifyLevel,
    /// Flip the sign of the correlation matrix before reading observables.
    pub inject_sign_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

fn run(name: &str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CheckResult {
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fail(msg: String) -> Result<String> {
    Err(crate::Error::Numerical(msg))
}

/// Largest deviation between the free-fermion and dense TFIM ground states
/// over `m_range` and `thetas`, across energy, `m_x`, `C_zz` and string.
pub fn oracle_deviation(m_range: std::ops::RangeInclusive<usize>, thetas: &[f64], inject_sign_fault: bool) -> Result<f64> {
    let cases: Vec<(usize, f64)> = m_range.flat_map(|m| thetas.iter().map(move |&t| (m, t))).collect();
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|&(m, theta)| -> Result<f64> {
            use Axis::*;
            let spec = TfimSpec::new(m, theta)?;
            let ed = eigensolve(&to_dense(&build_tfim(&spec))?)?;
            let gs = ed.ground_state();
            let l = m / 2;
            let string: Vec<_> = (0..l).map(|j| (j, X)).collect();
            let want = [
                ed.ground_energy(),
                expectation(&gs, &OperatorExpr::zero(m)?.with(1.0, &[(0, X)])?)?,
                expectation(&gs, &OperatorExpr::zero(m)?.with(1.0, &[(0, Z), (1, Z)])?)?,
                expectation(&gs, &OperatorExpr::zero(m)?.with(1.0, &string)?)?,
            ];
            let sol = solve_ground_state(&spec)?;
            let g = if inject_sign_fault {
                sol.correlation.negated()
            } else {
                sol.correlation
            };
            let obs = observables(&g);
            let got = [sol.energy, obs.m_x, obs.c_zz, string_expectation_len(&g, l)?];
            Ok(want.iter().zip(got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Runs every check of the requested level. The caller decides the exit code.
pub fn run_verification(opts: VerifyOptions) -> Vec<CheckResult> {
    let full = opts.level == VerifyLevel::Full;
    let mut out = Vec::new();

    out.push(run("expectation/probability identity, 64 angles", || {
        let mut worst = 0.0f64;
        for t in grid(64, 0.0, 2.0 * PI) {
            worst = worst.max(verify_eq10(t)?.max_deviation);
        }
        Ok(format!("max deviation {worst:.2e}"))
    }));

    out.push(run("translated observable pairs", || {
        for pair in ObservablePair::variants() {
            for t in grid(8, 0.0, FRAC_PI_2) {
                verify_eq10_with(t, &pair)?;
            }
        }
        Ok(format!("{} variants agree", ObservablePair::variants().len()))
    }));

    out.push(run("three-site reduced density matrix", || {
        let mut worst = 0.0f64;
        for t in grid(16, 0.0, 2.0 * PI) {
            worst = worst.max(verify_rho134(t)?.max_deviation);
        }
        Ok(format!("max deviation {worst:.2e}"))
    }));

    let n_table = if full { 16 } else { 4 };
    out.push(run(&format!("strategy catalog, {n_table} angles"), || {
        let mut worst = 0.0f64;
        for t in grid(n_table, 0.0, FRAC_PI_2) {
            for row in table1_catalog(t)? {
                worst = worst.max(row.max_deviation());
            }
        }
        Ok(format!("3 rows, max deviation {worst:.2e}"))
    }));

    out.push(run("process matrix validity", || {
        let mut worst = f64::INFINITY;
        for t in grid(16, 0.0, 2.0 * PI) {
            let r = validate_process(&build_w_opt(t))?;
            if !r.is_valid(1e-10) {
                return fail(format!("invalid at theta = {t}: {r:?}"));
            }
            worst = worst.min(r.min_eigenvalue);
        }
        Ok(format!("min eigenvalue {worst:.2e}"))
    }));

    out.push(run("classical bounds", || {
        let b = classical_bound(3)?;
        if (b.p_left - 5.0 / 6.0).abs() > 1e-15 || (b.p_right - 2.0 / 3.0).abs() > 1e-15 {
            return fail(format!("three-party bound {b:?}"));
        }
        Ok("3 parties: 5/6, 2/3".into())
    }));

    out.push(run("order parameter complementarity", || {
        for t in (0..=64).map(|k| k as f64 * FRAC_PI_2 / 64.0) {
            let (mz, os) = (mz_thermo(t)?, ostr_thermo(t)?);
            if mz * os != 0.0 || (t != FRAC_PI_4 && mz + os == 0.0) {
                return fail(format!("theta = {t}: m_z = {mz}, O_str = {os}"));
            }
        }
        Ok("disjoint supports, common zero at pi/4".into())
    }));

    let (m_max, n_theta) = if full { (10, 16) } else { (6, 8) };
    out.push(run(&format!("free fermion vs dense, M <= {m_max}"), || {
        let dev = oracle_deviation(2..=m_max, &grid(n_theta, 0.0, FRAC_PI_2), opts.inject_sign_fault)?;
        if dev > 1e-8 {
            return fail(format!("max deviation {dev:.3e} exceeds 1e-8"));
        }
        Ok(format!("max deviation {dev:.2e}"))
    }));

    out
}
