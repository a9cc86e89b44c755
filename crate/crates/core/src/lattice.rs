//! Chain Hamiltonians, the controlled-phase circuit and the map onto two
//! decoupled transverse-field Ising rings.
//!
//! Sites are 0-based and periodic. The chain Hamiltonian is
//! `-cosθ Σ Z_i Z_{i+2} - sinθ Σ Z_i X_{i+1} Z_{i+2}`; conjugating it with
//! `U = Π CZ_{i,i+1}` turns every cluster term into a single `X_{i+1}` and
//! leaves the Ising terms alone, so the two sublattices decouple.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::kernel::{Axis, DenseOperator, OperatorExpr, PauliString, PauliTerm};

/// Length and coupling of the periodic Ising-cluster chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    n_sites: usize,
    theta: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, theta: f64) -> Result<Self> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return validation(format!("chain length must be even and at least 4, got {n_sites}"));
        }
        if !theta.is_finite() {
            return validation("theta must be finite");
        }
        Ok(Self { n_sites, theta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// A periodic transverse-field Ising ring of `m_sites` spins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimSpec {
    m_sites: usize,
    theta: f64,
}

impl TfimSpec {
    pub fn new(m_sites: usize, theta: f64) -> Result<Self> {
        if m_sites < 2 {
            return validation(format!("TFIM ring needs at least 2 sites, got {m_sites}"));
        }
        if !theta.is_finite() {
            return validation("theta must be finite");
        }
        Ok(Self { m_sites, theta })
    }

    pub fn m_sites(&self) -> usize {
        self.m_sites
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

fn push(op: &mut OperatorExpr, c: f64, factors: &[(usize, Axis)]) {
    op.add(c, factors).expect("sites are in range by construction");
}

/// Four-site Hamiltonian with doubled Ising weight:
/// `-2cosθ (Z0Z2 + Z1Z3) - sinθ Σ_i Z_i X_{i+1} Z_{i+2}`.
pub fn build_game_hamiltonian(theta: f64) -> OperatorExpr {
    use Axis::*;
    let (s, c) = theta.sin_cos();
    let mut h = OperatorExpr::zero(4).expect("nonzero register");
    push(&mut h, -2.0 * c, &[(0, Z), (2, Z)]);
    push(&mut h, -2.0 * c, &[(1, Z), (3, Z)]);
    for i in 0..4 {
        push(&mut h, -s, &[(i, Z), ((i + 1) % 4, X), ((i + 2) % 4, Z)]);
    }
    h
}

/// Chain Hamiltonian for `N ≥ 6`, one Ising and one cluster term per site.
pub fn build_chain_hamiltonian(spec: &ChainSpec) -> Result<OperatorExpr> {
    use Axis::*;
    let n = spec.n_sites;
    if n < 6 {
        return validation(format!(
            "the uniform chain builder needs N >= 6, got {n}; use build_game_hamiltonian for N = 4"
        ));
    }
    let (s, c) = spec.theta.sin_cos();
    let mut h = OperatorExpr::zero(n)?;
    for i in 0..n {
        push(&mut h, -c, &[(i, Z), ((i + 2) % n, Z)]);
        push(&mut h, -s, &[(i, Z), ((i + 1) % n, X), ((i + 2) % n, Z)]);
    }
    Ok(h)
}

/// Four-site builder for `N = 4`, uniform builder otherwise.
pub fn chain_hamiltonian(spec: &ChainSpec) -> Result<OperatorExpr> {
    if spec.n_sites == 4 {
        Ok(build_game_hamiltonian(spec.theta))
    } else {
        build_chain_hamiltonian(spec)
    }
}

/// Diagonal of `U = Π_i CZ_{i,i+1}` (periodic) in the computational basis.
pub fn cz_phases(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites)
        .map(|b| {
            let bit = |q: usize| (b >> (n_sites - 1 - q)) & 1;
            let pairs = (0..n_sites)
                .filter(|&i| bit(i) & bit((i + 1) % n_sites) == 1)
                .count();
            if pairs % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Dense `U = Π_i CZ_{i,i+1}` with periodic wrap.
pub fn build_cz_circuit(n_sites: usize) -> Result<DenseOperator> {
    let cap = crate::kernel::dense_cap();
    if n_sites > cap {
        return Err(Error::Capacity { qubits: n_sites, cap });
    }
    if n_sites < 2 {
        return validation("CZ ring needs at least 2 sites");
    }
    DenseOperator::diagonal(n_sites, &cz_phases(n_sites))
}

/// `U P U†` for a single Pauli string, `U` the periodic CZ ring.
fn cz_image(string: &PauliString, n: usize) -> (f64, PauliString) {
    let mut phase = 0u8;
    let mut acc = PauliString::identity();
    for &(site, axis) in string.factors() {
        let local = PauliString::new(&[(site, axis)]).expect("single factor");
        let image = match axis {
            Axis::Z => local,
            Axis::X | Axis::Y => {
                let left = PauliString::new(&[((site + n - 1) % n, Axis::Z)]).expect("single");
                let right = PauliString::new(&[((site + 1) % n, Axis::Z)]).expect("single");
                let (k1, t) = left.mul(&local);
                let (k2, t) = t.mul(&right);
                phase = (phase + k1 + k2) % 4;
                t
            }
        };
        let (k, next) = acc.mul(&image);
        phase = (phase + k) % 4;
        acc = next;
    }
    // Conjugating a Hermitian string gives a Hermitian string, so the phase is ±1.
    debug_assert!(phase % 2 == 0);
    (if phase == 0 { 1.0 } else { -1.0 }, acc)
}

/// Symbolic conjugation `U H U†` by the periodic CZ ring on `H`'s register.
pub fn cz_conjugate(expr: &OperatorExpr) -> Result<OperatorExpr> {
    let n = expr.register_size();
    if n < 2 {
        return validation("CZ ring needs at least 2 sites");
    }
    let mut out = OperatorExpr::zero(n)?;
    for (string, c) in expr.terms() {
        let (sign, image) = cz_image(string, n);
        out.add_term(PauliTerm::new(sign * c, image.factors())?)?;
    }
    Ok(out)
}

/// `-cosθ Σ Z_i Z_{i+1} - sinθ Σ X_i` on a ring of `M` sites.
pub fn build_tfim(spec: &TfimSpec) -> OperatorExpr {
    let m = spec.m_sites;
    build_tfim_on_sites(spec, m, &(0..m).collect::<Vec<_>>()).expect("identity embedding")
}

/// The ring Hamiltonian placed on `sites` of a larger register; ring site `j`
/// sits on `sites[j]`.
pub fn build_tfim_on_sites(spec: &TfimSpec, register_size: usize, sites: &[usize]) -> Result<OperatorExpr> {
    use Axis::*;
    let m = spec.m_sites;
    if sites.len() != m {
        return validation(format!("expected {m} sites, got {}", sites.len()));
    }
    let (s, c) = spec.theta.sin_cos();
    let mut h = OperatorExpr::zero(register_size)?;
    for j in 0..m {
        h.add(-c, &[(sites[j], Z), (sites[(j + 1) % m], Z)])?;
        h.add(-s, &[(sites[j], X)])?;
    }
    Ok(h)
}

/// The two sublattice rings of the transformed chain, on sites `0,2,..` and
/// `1,3,..` in that order.
pub fn sublattice_tfims(spec: &ChainSpec) -> Result<(OperatorExpr, OperatorExpr)> {
    let n = spec.n_sites;
    let tfim = TfimSpec::new(n / 2, spec.theta)?;
    let even: Vec<usize> = (0..n / 2).map(|j| 2 * j).collect();
    let odd: Vec<usize> = (0..n / 2).map(|j| 2 * j + 1).collect();
    Ok((build_tfim_on_sites(&tfim, n, &even)?, build_tfim_on_sites(&tfim, n, &odd)?))
}

/// Splits the chain into its two identical TFIM factors, after checking that
/// `U H U†` equals the sum of the sublattice rings term by term.
pub fn split_to_tfim(spec: &ChainSpec) -> Result<(TfimSpec, TfimSpec)> {
    let h = chain_hamiltonian(spec)?;
    let transformed = cz_conjugate(&h)?;
    let (even, odd) = sublattice_tfims(spec)?;
    let diff = transformed.max_coefficient_diff(&even.plus(&odd)?)?;
    if diff > 1e-12 {
        return Err(Error::Numerical(format!(
            "CZ-transformed chain differs from the TFIM pair by {diff:.3e}"
        )));
    }
    let t = TfimSpec::new(spec.n_sites / 2, spec.theta)?;
    Ok((t, t))
}
