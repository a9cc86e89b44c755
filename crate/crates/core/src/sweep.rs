//! Parameter sweeps producing figure data.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{eigenstate, k_avg, ObservablePair, StateSelector};
use crate::error::{validation, Error, Result};
use crate::game::{multi_party_game, two_party_game};
use crate::kernel::{dense_cap, expectation, sparse_ground_state, Axis, OperatorExpr, StateVector};
use crate::lattice::{chain_hamiltonian, ChainSpec};
use crate::phase::OrderParameters;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact diagonalization of the full chain (Lanczos for `N ≥ 6`).
    Dense,
    /// Free-fermion solution of one TFIM factor.
    Fermion,
    /// Dense up to the dense cap, fermion beyond.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_sites: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub steps: usize,
    pub backend: Backend,
    /// Standard output when absent.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        ChainSpec::new(self.n_sites, self.theta_min)?;
        if !(self.theta_min.is_finite() && self.theta_max.is_finite()) || self.theta_min >= self.theta_max {
            return validation(format!(
                "need finite theta_min < theta_max, got [{}, {}]",
                self.theta_min, self.theta_max
            ));
        }
        if self.steps < 2 {
            return validation(format!("steps must be at least 2, got {}", self.steps));
        }
        let cap = dense_cap();
        if self.backend == Backend::Dense && self.n_sites > cap {
            return Err(Error::Capacity {
                qubits: self.n_sites,
                cap,
            });
        }
        Ok(())
    }

    /// `Auto` resolved against the dense cap.
    pub fn resolved_backend(&self) -> Backend {
        match self.backend {
            Backend::Auto if self.n_sites <= dense_cap() => Backend::Dense,
            Backend::Auto => Backend::Fermion,
            b => b,
        }
    }

    /// Evenly spaced angles including both ends.
    pub fn thetas(&self) -> Vec<f64> {
        let span = self.theta_max - self.theta_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.theta_max
                } else {
                    self.theta_min + span * i as f64 / last
                }
            })
            .collect()
    }
}

/// One grid point. Field order is the output column order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub n_sites: usize,
    pub m_x: f64,
    pub c_zz: f64,
    /// `(1 + C_zz)/2`.
    pub p_left: f64,
    /// `(1 + m_x)/2`.
    pub p_right: f64,
    pub p_total: f64,
    pub k_avg: f64,
    pub m_z_thermo: Option<f64>,
    pub o_str_thermo: Option<f64>,
    pub o_str_finite: f64,
    pub classical_bound: f64,
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "theta",
    "n_sites",
    "m_x",
    "c_zz",
    "p_left",
    "p_right",
    "p_total",
    "k_avg",
    "m_z_thermo",
    "o_str_thermo",
    "o_str_finite",
    "classical_bound",
];

pub const CLASSICAL_BOUND: f64 = 0.75;

fn chain_ground_state(spec: &ChainSpec) -> Result<StateVector> {
    if spec.n_sites() == 4 {
        return eigenstate(spec.theta(), StateSelector::Ground);
    }
    Ok(sparse_ground_state(&chain_hamiltonian(spec)?)?.1)
}

/// Evaluates one grid point with an already resolved backend.
///
/// The dense backend takes `m_x = ⟨Z0 X1 Z2⟩` and `C_zz = ⟨Z0 Z2⟩` from the
/// chain ground state and the probabilities from process-matrix traces on
/// `N/2` parties. The fermion backend uses the TFIM factor throughout.
/// The string order always comes from the fermion solver.
pub fn evaluate_point(n_sites: usize, theta: f64, backend: Backend) -> Result<SweepRecord> {
    use Axis::*;
    let spec = ChainSpec::new(n_sites, theta)?;
    let order = OrderParameters::compute(n_sites, theta)?;
    let (m_x, c_zz, p_left, p_right, k) = match backend {
        Backend::Dense => {
            let gs = chain_ground_state(&spec)?;
            let mx_op = OperatorExpr::zero(n_sites)?.with(1.0, &[(0, Z), (1, X), (2, Z)])?;
            let zz_op = OperatorExpr::zero(n_sites)?.with(1.0, &[(0, Z), (2, Z)])?;
            let m_x = expectation(&gs, &mx_op)?;
            let c_zz = expectation(&gs, &zz_op)?;
            if n_sites == 4 {
                let game = two_party_game(theta)?;
                let k = k_avg(&gs, &ObservablePair::standard())?;
                (m_x, c_zz, game.p_right, game.p_left, k)
            } else {
                let game = multi_party_game(n_sites / 2, c_zz, m_x)?;
                (m_x, c_zz, game.p_left, game.p_right, 0.25 * (2.0 + m_x + c_zz))
            }
        }
        Backend::Fermion => {
            let (m_x, c_zz) = (order.m_x, order.c_zz);
            (m_x, c_zz, 0.5 * (1.0 + c_zz), 0.5 * (1.0 + m_x), 0.25 * (2.0 + m_x + c_zz))
        }
        Backend::Auto => return validation("resolve the backend before evaluating"),
    };
    Ok(SweepRecord {
        theta,
        n_sites,
        m_x,
        c_zz,
        p_left,
        p_right,
        p_total: 0.5 * (p_left + p_right),
        k_avg: k,
        m_z_thermo: order.m_z_thermo,
        o_str_thermo: order.o_str_thermo,
        o_str_finite: order.o_str_finite,
        classical_bound: CLASSICAL_BOUND,
    })
}

/// All grid points in `θ` order, evaluated in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let backend = config.resolved_backend();
    config
        .thetas()
        .into_par_iter()
        .map(|t| evaluate_point(config.n_sites, t, backend))
        .collect()
}

/// Fixed 15-significant-digit rendering, independent of locale.
pub fn format_sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding can carry into a new leading digit, which only adds a
        // trailing digit of precision
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Numerical(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(io)?;
    let opt = |x: Option<f64>| x.map(format_sig15).unwrap_or_default();
    for r in records {
        w.write_record([
            format_sig15(r.theta),
            r.n_sites.to_string(),
            format_sig15(r.m_x),
            format_sig15(r.c_zz),
            format_sig15(r.p_left),
            format_sig15(r.p_right),
            format_sig15(r.p_total),
            format_sig15(r.k_avg),
            opt(r.m_z_thermo),
            opt(r.o_str_thermo),
            format_sig15(r.o_str_finite),
            format_sig15(r.classical_bound),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Numerical(format!("csv output failed: {e}")))
}

pub fn write_json<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)
        .map_err(|e| Error::Numerical(format!("json output failed: {e}")))?;
    writeln!(out).map_err(|e| Error::Numerical(format!("json output failed: {e}")))
}

pub fn write_records<W: Write>(records: &[SweepRecord], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Json => write_json(records, out),
    }
}
