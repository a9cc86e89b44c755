//! Order parameters of the Ising and cluster phases and location of the
//! transition between them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::fermion::{ground_state_observables, solve_ground_state, string_expectation};
use crate::lattice::TfimSpec;
use crate::sweep::SweepRecord;

/// Angles this close to `π/4` are treated as the critical point itself.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Fewest grid points accepted by [`locate_qpt`].
pub const MIN_QPT_POINTS: usize = 33;

fn check_domain(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return validation(format!("theta = {theta} lies outside [0, pi/2]"));
    }
    Ok(())
}

/// Whether both thermodynamic closed forms are defined at `theta`.
pub fn in_thermo_domain(theta: f64) -> bool {
    (0.0..=FRAC_PI_2).contains(&theta)
}

/// Longitudinal magnetization in the thermodynamic limit,
/// `(1 - tan²θ)^{1/8}` below `π/4` and zero above.
pub fn mz_thermo(theta: f64) -> Result<f64> {
    check_domain(theta)?;
    if theta >= FRAC_PI_4 - CRITICAL_TOL {
        return Ok(0.0);
    }
    let t = theta.tan();
    Ok((1.0 - t * t).max(0.0).powf(0.125))
}

/// String order in the thermodynamic limit, `(1 - cot²θ)^{1/4}` above `π/4`
/// and zero below. It is the square of the dual magnetization.
pub fn ostr_thermo(theta: f64) -> Result<f64> {
    check_domain(theta)?;
    if theta <= FRAC_PI_4 + CRITICAL_TOL {
        return Ok(0.0);
    }
    let c = theta.cos() / theta.sin();
    Ok((1.0 - c * c).max(0.0).powf(0.25))
}

/// Finite-size string order of one TFIM factor: the half-ring string, which
/// estimates the squared dual magnetization.
pub fn ostr_finite(spec: &TfimSpec) -> Result<f64> {
    string_expectation(&solve_ground_state(spec)?.correlation)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderParameters {
    pub theta: f64,
    pub n_sites: usize,
    pub m_x: f64,
    pub c_zz: f64,
    /// `None` outside `[0, π/2]`.
    pub m_z_thermo: Option<f64>,
    pub o_str_thermo: Option<f64>,
    pub o_str_finite: f64,
}

impl OrderParameters {
    /// Evaluates the `N`-site chain through its `N/2`-site TFIM factor.
    pub fn compute(n_sites: usize, theta: f64) -> Result<Self> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return validation(format!("N must be even and at least 4, got {n_sites}"));
        }
        let spec = TfimSpec::new(n_sites / 2, theta)?;
        let (obs, string) = ground_state_observables(&spec)?;
        let thermo = in_thermo_domain(theta);
        Ok(Self {
            theta,
            n_sites,
            m_x: obs.m_x,
            c_zz: obs.c_zz,
            m_z_thermo: thermo.then(|| mz_thermo(theta)).transpose()?,
            o_str_thermo: thermo.then(|| ostr_thermo(theta)).transpose()?,
            o_str_finite: string,
        })
    }
}

/// Peak of a sampled curve: the best grid point and the vertex of the
/// parabola through it and its two neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate {
    pub argmax_theta: f64,
    pub max_value: f64,
    /// Equal to `argmax_theta` when the peak sits on the grid boundary.
    pub refined_theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QptEstimate {
    pub peak: PeakEstimate,
    /// Grid point minimizing `|m_z - O_str|` (thermodynamic forms).
    pub crossing_theta: f64,
}

fn check_grid(thetas: &[f64], values: &[f64]) -> Result<()> {
    if thetas.len() != values.len() {
        return validation("theta and value lengths differ");
    }
    if thetas.len() < 3 {
        return validation(format!("need at least 3 points, got {}", thetas.len()));
    }
    if thetas.iter().chain(values).any(|x| !x.is_finite()) {
        return validation("grid contains non-finite values");
    }
    if let Some(w) = thetas.windows(2).find(|w| w[1] <= w[0]) {
        return validation(format!("grid is not strictly increasing at {} -> {}", w[0], w[1]));
    }
    Ok(())
}

/// Maximum of `values` over `thetas` with three-point parabolic refinement.
pub fn locate_peak(thetas: &[f64], values: &[f64]) -> Result<PeakEstimate> {
    check_grid(thetas, values)?;
    let (i, &max_value) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |acc, x| if x.1 > acc.1 { x } else { acc });
    let argmax_theta = thetas[i];
    if i == 0 || i + 1 == values.len() {
        return Ok(PeakEstimate {
            argmax_theta,
            max_value,
            refined_theta: argmax_theta,
        });
    }
    let (x0, x1, x2) = (thetas[i - 1], thetas[i], thetas[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Err(Error::Numerical(format!("flat peak near theta = {argmax_theta}")));
    }
    Ok(PeakEstimate {
        argmax_theta,
        max_value,
        refined_theta: x1 - 0.5 * num / den,
    })
}

/// Transition estimate from a sweep over `(0, π/2)`.
pub fn locate_qpt(records: &[SweepRecord]) -> Result<QptEstimate> {
    if records.len() < MIN_QPT_POINTS {
        return validation(format!(
            "need at least {MIN_QPT_POINTS} sweep points, got {}",
            records.len()
        ));
    }
    let thetas: Vec<f64> = records.iter().map(|r| r.theta).collect();
    let totals: Vec<f64> = records.iter().map(|r| r.p_total).collect();
    let peak = locate_peak(&thetas, &totals)?;
    let crossing_theta = records
        .iter()
        .filter_map(|r| Some((r.theta, (r.m_z_thermo? - r.o_str_thermo?).abs())))
        .fold(None::<(f64, f64)>, |acc, x| match acc {
            Some(a) if a.1 <= x.1 => Some(a),
            _ => Some(x),
        })
        .map(|x| x.0)
        .ok_or_else(|| Error::Validation("no sweep point lies in [0, pi/2]".into()))?;
    Ok(QptEstimate { peak, crossing_theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_endpoints() {
        assert_eq!(mz_thermo(0.0).unwrap(), 1.0);
        assert_eq!(ostr_thermo(FRAC_PI_2).unwrap(), 1.0);
        assert_eq!(mz_thermo(FRAC_PI_4).unwrap(), 0.0);
        assert_eq!(ostr_thermo(FRAC_PI_4).unwrap(), 0.0);
        assert!(mz_thermo(-0.1).is_err() && ostr_thermo(1.6).is_err());
    }

    #[test]
    fn eighth_of_pi_by_hand() {
        // tan(π/8) = √2 - 1, so 1 - tan² = 2√2 - 2; 40-digit decimal reference
        let want = 0.976_746_331_567_827_7;
        assert!((mz_thermo(FRAC_PI_4 / 2.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn duality_between_closed_forms() {
        for k in 1..16 {
            let theta = FRAC_PI_4 + k as f64 * FRAC_PI_4 / 16.0;
            let dual = mz_thermo(FRAC_PI_2 - theta).unwrap();
            assert!((ostr_thermo(theta).unwrap() - dual * dual).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_string_limits() {
        assert!((ostr_finite(&TfimSpec::new(8, FRAC_PI_2).unwrap()).unwrap() - 1.0).abs() < 1e-10);
        assert!(ostr_finite(&TfimSpec::new(8, 0.0).unwrap()).unwrap().abs() < 1e-8);
    }

    #[test]
    fn parabola_finds_analytic_peak() {
        let thetas: Vec<f64> = (0..=32).map(|k| 0.013 + k as f64 * 1.5 / 32.0).collect();
        let values: Vec<f64> = thetas.iter().map(|t| (2.0 + t.cos() + t.sin()) / 4.0).collect();
        let p = locate_peak(&thetas, &values).unwrap();
        assert!((p.refined_theta - FRAC_PI_4).abs() < 1e-3);
        // a finer grid converges cubically
        let thetas: Vec<f64> = (0..=64).map(|k| 0.7 + k as f64 * 0.17 / 64.0).collect();
        let values: Vec<f64> = thetas.iter().map(|t| (2.0 + t.cos() + t.sin()) / 4.0).collect();
        let p = locate_peak(&thetas, &values).unwrap();
        assert!((p.refined_theta - FRAC_PI_4).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(locate_peak(&[0.0, 0.1, 0.1], &[1.0, 2.0, 1.0]).is_err());
        assert!(locate_peak(&[0.0, 0.1], &[1.0, 2.0]).is_err());
        assert!(locate_peak(&[0.0, 0.1, 0.2], &[1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn order_parameters_at_the_ends() {
        let p = OrderParameters::compute(8, 0.0).unwrap();
        assert!((p.c_zz - 1.0).abs() < 1e-12 && p.m_x.abs() < 1e-12);
        assert_eq!(p.m_z_thermo, Some(1.0));
        let p = OrderParameters::compute(8, 2.0).unwrap();
        assert!(p.m_z_thermo.is_none() && p.o_str_thermo.is_none());
        assert!(OrderParameters::compute(7, 0.3).is_err());
    }
}
