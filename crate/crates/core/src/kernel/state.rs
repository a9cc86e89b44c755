//! Pure states, expectation values and partial traces.

use faer::{c64, Mat};

use super::dense::{cabs, DenseOperator, PauliMasks};
use super::pauli::OperatorExpr;
use crate::error::{validation, Error, Result};

const NORM_TOL: f64 = 1e-10;

/// A normalized state vector on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<c64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(n_qubits: usize, amplitudes: Vec<c64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return validation(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amplitudes.len()
            ));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return validation(format!("state has norm {norm}, expected 1"));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<c64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return validation("cannot normalize a zero or non-finite vector");
        }
        let inv = c64::new(1.0 / n, 0.0);
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Self::new(n_qubits, amplitudes)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return validation(format!("basis index {index} out of range"));
        }
        let mut a = vec![c64::new(0.0, 0.0); dim];
        a[index] = c64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes: a })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<c64> {
        if self.n_qubits != other.n_qubits {
            return validation("states live on different registers");
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(c64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(cabs(self.inner(other)?))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DenseOperator {
        let d = self.amplitudes.len();
        let m = Mat::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DenseOperator::from_matrix(self.n_qubits, m).expect("dimension matches")
    }
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>().sqrt()
}

/// Something with a (possibly complex) matrix element `⟨ψ|O|ψ⟩`.
pub trait Observable {
    fn n_qubits(&self) -> usize;
    fn matrix_element(&self, state: &StateVector) -> c64;
    /// Scale used to judge whether an imaginary part is round-off.
    fn scale(&self) -> f64;
}

impl Observable for OperatorExpr {
    fn n_qubits(&self) -> usize {
        self.register_size()
    }

    fn matrix_element(&self, state: &StateVector) -> c64 {
        let amps = state.amplitudes();
        let n = self.register_size();
        let mut total = c64::new(0.0, 0.0);
        for (string, c) in self.terms() {
            let masks = PauliMasks::new(string, n);
            let mut acc = c64::new(0.0, 0.0);
            for (col, a) in amps.iter().enumerate() {
                let (row, amp) = masks.apply(col);
                acc += amps[row].conj() * amp * a;
            }
            total += acc * c64::new(c, 0.0);
        }
        total
    }

    fn scale(&self) -> f64 {
        self.terms().map(|(_, c)| c.abs()).sum()
    }
}

impl Observable for DenseOperator {
    fn n_qubits(&self) -> usize {
        DenseOperator::n_qubits(self)
    }

    fn matrix_element(&self, state: &StateVector) -> c64 {
        let a = state.amplitudes();
        let m = self.matrix();
        let mut total = c64::new(0.0, 0.0);
        for j in 0..a.len() {
            let mut col = c64::new(0.0, 0.0);
            for i in 0..a.len() {
                col += a[i].conj() * m[(i, j)];
            }
            total += col * a[j];
        }
        total
    }

    fn scale(&self) -> f64 {
        self.max_abs() * self.dim() as f64
    }
}

/// Real expectation value of a Hermitian observable.
pub fn expectation<O: Observable + ?Sized>(state: &StateVector, op: &O) -> Result<f64> {
    if op.n_qubits() != state.n_qubits() {
        return validation(format!(
            "observable on {} qubits applied to a {}-qubit state",
            op.n_qubits(),
            state.n_qubits()
        ));
    }
    let v = op.matrix_element(state);
    if v.im.abs() > 1e-9 * op.scale().max(1.0) {
        return Err(Error::Numerical(format!(
            "expectation has imaginary part {}; observable is not Hermitian",
            v.im
        )));
    }
    Ok(v.re)
}

/// Reduced density matrix on `keep`, traced over the remaining qubits.
/// The kept qubits appear in the order given, the first as the most
/// significant bit.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DenseOperator> {
    let n = state.n_qubits();
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n || seen[q] {
            return validation(format!("invalid or repeated qubit {q} in {keep:?}"));
        }
        seen[q] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&q| !seen[q]).collect();
    let (dk, dr) = (1usize << keep.len(), 1usize << rest.len());
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let mut psi = Mat::<c64>::zeros(dk, dr);
    for (i, &a) in state.amplitudes().iter().enumerate() {
        let k = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
        let r = rest.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
        psi[(k, r)] = a;
    }
    let rho = &psi * psi.adjoint();
    DenseOperator::from_matrix(keep.len(), rho)
}
