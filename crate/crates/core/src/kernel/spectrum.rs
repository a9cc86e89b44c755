use faer::{c64, Mat, MatRef, Side};

use super::dense::DenseOperator;
use super::state::StateVector;
use crate::error::{validation, Error, Result};

/// Relative tolerance on `|H - H†|` accepted by [`eigensolve`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<c64>,
}

impl Spectrum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// The `k`-th eigenvector.
    pub fn state(&self, k: usize) -> StateVector {
        let v = (0..self.eigenvectors.nrows())
            .map(|i| self.eigenvectors[(i, k)])
            .collect();
        StateVector::normalized(self.n_qubits, v).expect("eigenvectors are nonzero")
    }

    pub fn ground_state(&self) -> StateVector {
        self.state(0)
    }

    /// Indices of the eigenvalues within `tol` of eigenvalue `k`.
    pub fn degenerate_block(&self, k: usize, tol: f64) -> std::ops::Range<usize> {
        let e = self.eigenvalues[k];
        let lo = (0..=k).rev().take_while(|&i| (self.eigenvalues[i] - e).abs() <= tol).last().unwrap_or(k);
        let hi = (k..self.len()).take_while(|&i| (self.eigenvalues[i] - e).abs() <= tol).last().unwrap_or(k);
        lo..hi + 1
    }

    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref()
    }

    /// Largest eigenvalue of `op` compressed onto the eigenvectors in
    /// `block`, i.e. the supremum of `⟨ψ|op|ψ⟩` over that subspace.
    pub fn block_supremum(&self, block: std::ops::Range<usize>, op: &DenseOperator) -> Result<f64> {
        if op.n_qubits() != self.n_qubits || block.end > self.len() || block.is_empty() {
            return validation("block or operator does not match the spectrum");
        }
        let v = self.eigenvectors.as_ref().subcols(block.start, block.len());
        let compressed = v.adjoint() * op.matrix() * v;
        let vals = compressed
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
        Ok(vals.last().copied().expect("nonempty block"))
    }

    /// Gap between the lowest level and the next distinct level.
    pub fn gap(&self, tol: f64) -> Option<f64> {
        let block = self.degenerate_block(0, tol);
        self.eigenvalues.get(block.end).map(|e| e - self.eigenvalues[0])
    }
}

/// Full eigendecomposition. Real matrices take the real symmetric path.
pub fn eigensolve(op: &DenseOperator) -> Result<Spectrum> {
    if !op.is_hermitian(HERMITICITY_TOL) {
        return validation(format!(
            "operator is not Hermitian (residual {:.3e})",
            op.hermiticity_residual()
        ));
    }
    let dim = op.dim();
    let (eigenvalues, eigenvectors) = if op.is_real() {
        let m = op.real_part();
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let vals: Vec<f64> = (0..dim).map(|i| s[i]).collect();
        let u = evd.U();
        (vals, Mat::from_fn(dim, dim, |i, j| c64::new(u[(i, j)], 0.0)))
    } else {
        let evd = op
            .matrix()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let vals: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
        (vals, evd.U().to_owned())
    };
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    Ok(Spectrum {
        n_qubits: op.n_qubits(),
        eigenvalues,
        eigenvectors,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pauli::{Axis::*, OperatorExpr};
    use crate::kernel::state::expectation;
    use crate::kernel::to_dense;

    #[test]
    fn pauli_y_spectrum_via_complex_path() {
        let y = to_dense(&OperatorExpr::zero(1).unwrap().with(1.0, &[(0, Y)]).unwrap()).unwrap();
        assert!(!y.is_real());
        let s = eigensolve(&y).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenpairs_satisfy_eigen_equation() {
        let h = OperatorExpr::zero(3)
            .unwrap()
            .with(-1.0, &[(0, Z), (1, Z)])
            .unwrap()
            .with(-1.0, &[(1, Z), (2, Z)])
            .unwrap()
            .with(-0.7, &[(0, X)])
            .unwrap()
            .with(-0.7, &[(1, X)])
            .unwrap()
            .with(-0.7, &[(2, X)])
            .unwrap();
        let s = eigensolve(&to_dense(&h).unwrap()).unwrap();
        for k in 0..s.len() {
            let e = expectation(&s.state(k), &h).unwrap();
            assert!((e - s.eigenvalues()[k]).abs() < 1e-12);
        }
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 1)] = c64::new(1.0, 0.0);
        let op = DenseOperator::from_matrix(1, m).unwrap();
        assert!(eigensolve(&op).is_err());
    }

    #[test]
    fn degenerate_blocks() {
        let z = to_dense(&OperatorExpr::zero(2).unwrap().with(1.0, &[(0, Z)]).unwrap()).unwrap();
        let s = eigensolve(&z).unwrap();
        assert_eq!(s.degenerate_block(0, 1e-10), 0..2);
        assert_eq!(s.degenerate_block(3, 1e-10), 2..4);
        assert!((s.gap(1e-10).unwrap() - 2.0).abs() < 1e-14);
    }
}
