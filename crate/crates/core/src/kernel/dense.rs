//! Dense matrices on small registers.
//!
//! Qubit 0 is the most significant bit of the computational-basis index, so
//! `A ⊗ B` places `A` on qubit 0.

use faer::{c64, Mat, MatRef};

use super::pauli::{Axis, OperatorExpr, PauliString};
use crate::error::{validation, Error, Result};

/// Default limit on the number of qubits that may be densified.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// The dense cap, overridable through the `DENSE_CAP` environment variable.
pub fn dense_cap() -> usize {
    std::env::var("DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

pub(crate) fn cabs(z: c64) -> f64 {
    z.re.hypot(z.im)
}

/// A `2^n × 2^n` complex matrix tagged with its register size.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: Mat<c64>,
}

impl DenseOperator {
    pub fn from_matrix(n_qubits: usize, matrix: Mat<c64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return validation(format!(
                "matrix of shape {}x{} does not act on {n_qubits} qubits",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: Mat::zeros(dim, dim),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: Mat::identity(dim, dim),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(n_qubits: usize, entries: &[f64]) -> Result<Self> {
        let dim = 1 << n_qubits;
        if entries.len() != dim {
            return validation(format!("expected {dim} diagonal entries, got {}", entries.len()));
        }
        let mut op = Self::zeros(n_qubits);
        for (i, &e) in entries.iter().enumerate() {
            op.matrix[(i, i)] = c64::new(e, 0.0);
        }
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint().to_owned(),
        }
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn plus(&self, other: &DenseOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn minus(&self, other: &DenseOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = c64::new(factor, 0.0);
        Self {
            n_qubits: self.n_qubits,
            matrix: Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] * s),
        }
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).fold(c64::new(0.0, 0.0), |acc, i| acc + self.matrix[(i, i)])
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m = m.max(cabs(self.matrix[(i, j)]));
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        Ok(self.minus(other)?.max_abs())
    }

    /// `max |M - M†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                r = r.max(cabs(self.matrix[(i, j)] - self.matrix[(j, i)].conj()));
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * self.max_abs().max(1.0)
    }

    /// Whether every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| self.matrix[(i, j)].im == 0.0))
    }

    pub(crate) fn real_part(&self) -> Mat<f64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)].re)
    }

    /// `D M D†` for a real diagonal `D`.
    pub fn conjugate_by_diagonal(&self, diag: &[f64]) -> Result<Self> {
        if diag.len() != self.dim() {
            return validation("diagonal length does not match operator dimension");
        }
        let m = Mat::from_fn(self.dim(), self.dim(), |i, j| {
            self.matrix[(i, j)] * c64::new(diag[i] * diag[j], 0.0)
        });
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn kron(&self, other: &DenseOperator) -> Self {
        let (da, db) = (self.dim(), other.dim());
        let m = Mat::from_fn(da * db, da * db, |i, j| {
            self.matrix[(i / db, j / db)] * other.matrix[(i % db, j % db)]
        });
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: m,
        }
    }

    fn check_same(&self, other: &DenseOperator) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return validation(format!(
                "operators act on {} and {} qubits",
                self.n_qubits, other.n_qubits
            ));
        }
        Ok(())
    }
}

/// Bit masks describing how a Pauli string acts on basis states.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliMasks {
    /// Bits flipped by X or Y.
    pub flip: usize,
    /// Bits contributing a sign, from Z or Y.
    pub sign: usize,
    pub n_y: u32,
}

impl PauliMasks {
    pub fn new(string: &PauliString, n_qubits: usize) -> Self {
        let mut m = PauliMasks { flip: 0, sign: 0, n_y: 0 };
        for &(site, axis) in string.factors() {
            let bit = 1usize << (n_qubits - 1 - site);
            match axis {
                Axis::X => m.flip |= bit,
                Axis::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.n_y += 1;
                }
                Axis::Z => m.sign |= bit,
            }
        }
        m
    }

    /// `P|col⟩ = amp * |row⟩`.
    #[inline]
    pub fn apply(&self, col: usize) -> (usize, c64) {
        let row = col ^ self.flip;
        let neg = (col & self.sign).count_ones() % 2 == 1;
        let s = if neg { -1.0 } else { 1.0 };
        let amp = match self.n_y % 4 {
            0 => c64::new(s, 0.0),
            1 => c64::new(0.0, s),
            2 => c64::new(-s, 0.0),
            _ => c64::new(0.0, -s),
        };
        (row, amp)
    }
}

/// Densifies an expression, honoring [`dense_cap`].
pub fn to_dense(expr: &OperatorExpr) -> Result<DenseOperator> {
    to_dense_with_cap(expr, dense_cap())
}

pub fn to_dense_with_cap(expr: &OperatorExpr, cap: usize) -> Result<DenseOperator> {
    let n = expr.register_size();
    if n > cap {
        return Err(Error::Capacity { qubits: n, cap });
    }
    let mut op = DenseOperator::zeros(n);
    let dim = op.dim();
    for (string, c) in expr.terms() {
        let masks = PauliMasks::new(string, n);
        let c = c64::new(c, 0.0);
        for col in 0..dim {
            let (row, amp) = masks.apply(col);
            op.matrix[(row, col)] += c * amp;
        }
    }
    Ok(op)
}

/// Largest entrywise modulus of the commutator `[A, B]`.
pub fn commutator_norm(a: &OperatorExpr, b: &OperatorExpr) -> Result<f64> {
    a.check_same_register(b)?;
    let (da, db) = (to_dense(a)?, to_dense(b)?);
    let ab = da.matmul(&db)?;
    let ba = db.matmul(&da)?;
    ab.max_abs_diff(&ba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pauli::Axis::*;

    #[test]
    fn single_qubit_paulis() {
        let y = OperatorExpr::zero(1).unwrap().with(1.0, &[(0, Y)]).unwrap();
        let d = to_dense(&y).unwrap();
        assert_eq!(d.get(0, 1), c64::new(0.0, -1.0));
        assert_eq!(d.get(1, 0), c64::new(0.0, 1.0));
        let z = OperatorExpr::zero(2).unwrap().with(1.0, &[(0, Z)]).unwrap();
        let d = to_dense(&z).unwrap();
        // qubit 0 is the most significant bit
        assert_eq!(d.get(1, 1).re, 1.0);
        assert_eq!(d.get(2, 2).re, -1.0);
    }

    #[test]
    fn kron_matches_expression() {
        let x = to_dense(&OperatorExpr::zero(1).unwrap().with(1.0, &[(0, X)]).unwrap()).unwrap();
        let z = to_dense(&OperatorExpr::zero(1).unwrap().with(1.0, &[(0, Z)]).unwrap()).unwrap();
        let xz = to_dense(
            &OperatorExpr::zero(2).unwrap().with(1.0, &[(0, X), (1, Z)]).unwrap(),
        )
        .unwrap();
        assert_eq!(x.kron(&z).max_abs_diff(&xz).unwrap(), 0.0);
    }

    #[test]
    fn capacity_error() {
        let op = OperatorExpr::identity(5).unwrap();
        assert_eq!(
            to_dense_with_cap(&op, 4).unwrap_err(),
            Error::Capacity { qubits: 5, cap: 4 }
        );
    }

    #[test]
    fn commutators() {
        let a = OperatorExpr::zero(2).unwrap().with(1.0, &[(0, X), (1, X)]).unwrap();
        let b = OperatorExpr::zero(2).unwrap().with(1.0, &[(0, Z), (1, Z)]).unwrap();
        let c = OperatorExpr::zero(2).unwrap().with(1.0, &[(0, Z)]).unwrap();
        assert_eq!(commutator_norm(&a, &b).unwrap(), 0.0);
        assert_eq!(commutator_norm(&a, &c).unwrap(), 2.0);
    }
}
