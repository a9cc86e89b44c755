use faer::{c64, Mat, Side};

use super::dense::PauliMasks;
use super::pauli::OperatorExpr;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Largest register handled by [`sparse_ground_state`].
pub const SPARSE_CAP: usize = 16;

const KRYLOV_DIM: usize = 60;
const MAX_RESTARTS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-11;

fn apply(terms: &[(PauliMasks, f64)], x: &[c64], out: &mut [c64]) {
    out.iter_mut().for_each(|o| *o = c64::new(0.0, 0.0));
    for (m, c) in terms {
        for (col, &a) in x.iter().enumerate() {
            let (row, amp) = m.apply(col);
            out[row] += amp * a * *c;
        }
    }
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenpair of a Pauli sum by restarted Lanczos with full
/// reorthogonalization, for registers too large to diagonalize densely.
/// Within a degenerate ground level the returned vector is an arbitrary member.
pub fn sparse_ground_state(h: &OperatorExpr) -> Result<(f64, StateVector)> {
    let n = h.register_size();
    if n > SPARSE_CAP {
        return Err(Error::Capacity {
            qubits: n,
            cap: SPARSE_CAP,
        });
    }
    let dim = 1usize << n;
    let terms: Vec<(PauliMasks, f64)> = h.terms().map(|(s, c)| (PauliMasks::new(s, n), c)).collect();
    let scale = 1.0 + h.terms().map(|(_, c)| c.abs()).sum::<f64>();
    // deterministic start with support on every basis state
    let mut start: Vec<c64> = (0..dim)
        .map(|i| c64::new(1.0 + 0.5 * (0.7 * i as f64 + 0.3).sin(), 0.0))
        .collect();
    let mut w = vec![c64::new(0.0, 0.0); dim];
    for _ in 0..MAX_RESTARTS {
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);
        let mut basis: Vec<Vec<c64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let kmax = KRYLOV_DIM.min(dim);
        loop {
            let j = basis.len() - 1;
            apply(&terms, &basis[j], &mut w);
            alpha.push(dot(&basis[j], &w).re);
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if b <= 1e-13 * scale || basis.len() == kmax {
                // invariant subspace, or the Krylov budget is spent
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let t = Mat::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("tridiagonal solve failed: {e:?}")))?;
        let energy = evd.S().column_vector()[0];
        let y = evd.U().col(0);
        let residual = (beta[k - 1] * y[k - 1]).abs();
        let mut ritz = vec![c64::new(0.0, 0.0); dim];
        for (i, v) in basis.iter().enumerate() {
            ritz.iter_mut().zip(v).for_each(|(x, b)| *x += b * y[i]);
        }
        if residual <= RESIDUAL_TOL * scale {
            return Ok((energy, StateVector::normalized(n, ritz)?));
        }
        start = ritz;
    }
    Err(Error::Numerical("Lanczos did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{eigensolve, expectation, to_dense, Axis};

    #[test]
    fn matches_dense_ground_state() {
        use Axis::*;
        for theta in [0.0, 0.3, 0.9, 1.4] {
            let (s, c) = f64::sin_cos(theta);
            let n = 8;
            let mut h = OperatorExpr::zero(n).unwrap();
            for i in 0..n {
                h.add(-c, &[(i, Z), ((i + 2) % n, Z)]).unwrap();
                h.add(-s, &[(i, Z), ((i + 1) % n, X), ((i + 2) % n, Z)]).unwrap();
                h.add(-0.2, &[(i, Y), ((i + 1) % n, Y)]).unwrap();
            }
            let dense = eigensolve(&to_dense(&h).unwrap()).unwrap();
            let (e, psi) = sparse_ground_state(&h).unwrap();
            assert!((e - dense.ground_energy()).abs() < 1e-10, "theta={theta}");
            assert!((expectation(&psi, &h).unwrap() - e).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_operator_breaks_down_cleanly() {
        let h = OperatorExpr::zero(6)
            .unwrap()
            .with(-1.0, &[(0, Axis::Z), (2, Axis::Z)])
            .unwrap();
        let (e, _) = sparse_ground_state(&h).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity() {
        let h = OperatorExpr::zero(SPARSE_CAP + 1).unwrap();
        assert!(matches!(sparse_ground_state(&h), Err(Error::Capacity { .. })));
    }
}
