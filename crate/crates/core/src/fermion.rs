//! Jordan-Wigner solution of the periodic transverse-field Ising ring.
//!
//! The ring `-cosθ Σ Z_i Z_{i+1} - sinθ Σ X_i` becomes the quadratic form
//! `Σ c†_i A_ij c_j + ½ Σ (c†_i B_ij c†_j + h.c.)`. The wrap bond picks up a
//! sign that depends on the fermion-parity sector, so both sectors are solved
//! and the lower-energy physical state is kept.
//!
//! With `A - B = U S Vᵀ` the mode energies are `Λ = S`, `ψ_k = v_k` and
//! `φ_k = u_k`. The correlation matrix is `G_ij = ⟨B_i A_j⟩ = -Σ_k ψ_ki φ_kj`
//! in terms of the Majorana operators `A_i = c†_i + c_i`,
//! `B_i = c†_i - c_i`, so that `⟨X_i⟩ = G_ii` and `⟨Z_i Z_{i+1}⟩ = G_{i,i+1}`.

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::lattice::TfimSpec;

/// Fermion-parity sector label. The wrap bond carries sign `-P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    /// The sector whose physical states have `Π_i X_i = +1`.
    pub fn symmetric(m_sites: usize) -> Self {
        if m_sites % 2 == 0 {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }
}

/// The `A` (symmetric) and `B` (antisymmetric) matrices of the ring.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    m_sites: usize,
    a: Mat<f64>,
    b: Mat<f64>,
}

impl QuadraticForm {
    /// Bulk stencil with the wrap bond flipped: `A_{1M} = A_{M1} = +cosθ`,
    /// `B_{1M} = -B_{M1} = -cosθ` (1-based). This is the `P = +1` sector.
    pub fn new(spec: &TfimSpec) -> Self {
        Self::with_parity(spec, Parity::Plus)
    }

    pub fn with_parity(spec: &TfimSpec, parity: Parity) -> Self {
        let m = spec.m_sites();
        let (s, c) = spec.theta().sin_cos();
        let mut a = Mat::<f64>::zeros(m, m);
        let mut b = Mat::<f64>::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = -2.0 * s;
        }
        // Accumulate bond by bond: for M = 2 the wrap bond lands on the same
        // entries as the bulk bond.
        for i in 0..m {
            let j = (i + 1) % m;
            let sign = if j == 0 { -parity.sign() } else { 1.0 };
            let t = -c * sign;
            a[(i, j)] += t;
            a[(j, i)] += t;
            b[(i, j)] += t;
            b[(j, i)] -= t;
        }
        Self { m_sites: m, a, b }
    }

    pub fn m_sites(&self) -> usize {
        self.m_sites
    }

    pub fn a(&self) -> &Mat<f64> {
        &self.a
    }

    pub fn b(&self) -> &Mat<f64> {
        &self.b
    }
}

/// The Appendix quadratic form with the fixed boundary convention.
pub fn build_quadratic_form(spec: &TfimSpec) -> QuadraticForm {
    QuadraticForm::new(spec)
}

/// Single-particle energies `Λ_k` (ascending) and mode vectors, stored as
/// rows `ψ_k`, `φ_k`.
#[derive(Clone, Debug)]
pub struct ModeDecomposition {
    lambdas: Vec<f64>,
    psi: Mat<f64>,
    phi: Mat<f64>,
}

impl ModeDecomposition {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn psi(&self) -> &Mat<f64> {
        &self.psi
    }

    pub fn phi(&self) -> &Mat<f64> {
        &self.phi
    }

    pub fn m_sites(&self) -> usize {
        self.lambdas.len()
    }

    /// Energy of the quasiparticle vacuum, `-½ Σ Λ_k`.
    pub fn vacuum_energy(&self) -> f64 {
        -0.5 * self.lambdas.iter().sum::<f64>()
    }
}

/// Mode problem of `(A+B)(A-B)` solved through the SVD of `A - B`.
pub fn solve_modes(q: &QuadraticForm) -> Result<ModeDecomposition> {
    let m = q.m_sites;
    let amb = &q.a - &q.b;
    let svd = amb
        .svd()
        .map_err(|e| Error::Numerical(format!("SVD of A - B failed: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    // faer orders singular values descending
    let order: Vec<usize> = (0..m).rev().collect();
    let lambdas: Vec<f64> = order.iter().map(|&k| s[k]).collect();
    let psi = Mat::from_fn(m, m, |k, i| v[(i, order[k])]);
    let phi = Mat::from_fn(m, m, |k, i| u[(i, order[k])]);
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numerical("non-finite mode energy".into()));
    }
    Ok(ModeDecomposition { lambdas, psi, phi })
}

/// `G_ij = ⟨B_i A_j⟩`.
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    g: Mat<f64>,
}

impl CorrelationMatrix {
    pub fn from_matrix(g: Mat<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() || g.nrows() == 0 {
            return validation("correlation matrix must be square and nonempty");
        }
        Ok(Self { g })
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[(i, j)]
    }

    pub fn m_sites(&self) -> usize {
        self.g.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        let m = self.m_sites();
        let mut r: f64 = 0.0;
        for j in 0..m {
            for i in 0..m {
                r = r.max(self.g[(i, j)].abs());
            }
        }
        r
    }

    pub fn negated(&self) -> Self {
        Self { g: -&self.g }
    }
}

/// Correlation matrix of the quasiparticle vacuum.
pub fn correlation_matrix(modes: &ModeDecomposition) -> CorrelationMatrix {
    let m = modes.m_sites();
    let g = Mat::from_fn(m, m, |i, j| {
        -(0..m).map(|k| modes.psi[(k, i)] * modes.phi[(k, j)]).sum::<f64>()
    });
    CorrelationMatrix { g }
}

/// Ground state of one parity sector, or the physical state that sector
/// supports at lowest energy.
#[derive(Clone, Debug)]
pub struct SectorSolution {
    pub parity: Parity,
    pub energy: f64,
    pub modes: ModeDecomposition,
    pub correlation: CorrelationMatrix,
    /// Mode excited to reach the right parity, if any.
    pub excited_mode: Option<usize>,
}

/// Lowest state of the ring restricted to one parity sector.
pub fn solve_sector(spec: &TfimSpec, parity: Parity) -> Result<SectorSolution> {
    let m = spec.m_sites();
    let q = QuadraticForm::with_parity(spec, parity);
    let modes = solve_modes(&q)?;
    let mut corr = correlation_matrix(&modes);
    let mut energy = modes.vacuum_energy();
    // Π X_i = det G must equal (-1)^M P in this sector.
    let required = if m % 2 == 0 { parity.sign() } else { -parity.sign() };
    let det = determinant(corr.g.as_ref());
    let mut excited_mode = None;
    if det * required < 0.0 {
        let k = 0;
        for i in 0..m {
            for j in 0..m {
                corr.g[(i, j)] += 2.0 * modes.psi[(k, i)] * modes.phi[(k, j)];
            }
        }
        energy += modes.lambdas[k];
        excited_mode = Some(k);
    }
    Ok(SectorSolution {
        parity,
        energy,
        modes,
        correlation: corr,
        excited_mode,
    })
}

/// Ground state of the ring: both sectors are solved and the lower energy
/// wins; on a tie the `Π X_i = +1` sector is kept.
pub fn solve_ground_state(spec: &TfimSpec) -> Result<SectorSolution> {
    let sym = Parity::symmetric(spec.m_sites());
    let other = match sym {
        Parity::Plus => Parity::Minus,
        Parity::Minus => Parity::Plus,
    };
    let a = solve_sector(spec, sym)?;
    let b = solve_sector(spec, other)?;
    let tol = 1e-12 * (spec.m_sites() as f64) * 2.0;
    Ok(if b.energy < a.energy - tol { b } else { a })
}

/// Ground-state energy of the ring.
pub fn ground_energy(spec: &TfimSpec) -> Result<f64> {
    Ok(solve_ground_state(spec)?.energy)
}

/// Transverse magnetization and nearest-neighbour Ising correlator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimObservables {
    pub m_x: f64,
    pub c_zz: f64,
}

/// `m_x = ⟨X_0⟩ = G_00`, `C_zz = ⟨Z_0 Z_1⟩ = G_01`.
pub fn observables(g: &CorrelationMatrix) -> TfimObservables {
    TfimObservables {
        m_x: g.get(0, 0),
        c_zz: g.get(0, 1 % g.m_sites()),
    }
}

/// `⟨X_0 X_1 … X_{l-1}⟩ = det G[0..l, 0..l]`.
pub fn string_expectation_len(g: &CorrelationMatrix, len: usize) -> Result<f64> {
    if len == 0 || len > g.m_sites() {
        return validation(format!("string length {len} outside 1..={}", g.m_sites()));
    }
    Ok(determinant(g.g.as_ref().submatrix(0, 0, len, len)))
}

/// Half-ring X string, `l = ⌊M/2⌋`. The full-ring string is the symmetry of
/// the finite ring and carries no order; the half-ring string is the
/// two-point function of the dual disorder operator.
pub fn string_expectation(g: &CorrelationMatrix) -> Result<f64> {
    string_expectation_len(g, (g.m_sites() / 2).max(1))
}

/// Determinant by LU with partial pivoting; exactly singular input gives 0.
fn determinant(m: MatRef<'_, f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.to_owned();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("nonempty range");
        let p = a[(pivot, col)];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
            }
            det = -det;
        }
        det *= p;
        for i in col + 1..n {
            let f = a[(i, col)] / p;
            if f != 0.0 {
                for j in col..n {
                    let t = a[(col, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
    }
    det
}

/// Ground-state observables of the ring in one call.
pub fn ground_state_observables(spec: &TfimSpec) -> Result<(TfimObservables, f64)> {
    let sol = solve_ground_state(spec)?;
    let obs = observables(&sol.correlation);
    let string = string_expectation(&sol.correlation)?;
    Ok((obs, string))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn spec(m: usize, theta: f64) -> TfimSpec {
        TfimSpec::new(m, theta).unwrap()
    }

    #[test]
    fn pure_field_form() {
        let q = build_quadratic_form(&spec(3, FRAC_PI_2));
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { -2.0 } else { 0.0 };
                assert!((q.a()[(i, j)] - expect).abs() < 1e-15);
                assert!(q.b()[(i, j)].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn literal_boundary_entries() {
        let t = 0.4;
        let q = build_quadratic_form(&spec(5, t));
        let c = t.cos();
        assert!((q.a()[(0, 4)] - c).abs() < 1e-15);
        assert!((q.a()[(4, 0)] - c).abs() < 1e-15);
        assert!((q.b()[(0, 4)] + c).abs() < 1e-15);
        assert!((q.b()[(4, 0)] - c).abs() < 1e-15);
        assert!((q.a()[(1, 2)] + c).abs() < 1e-15);
        assert!((q.b()[(1, 2)] + c).abs() < 1e-15);
        assert!((q.b()[(2, 1)] - c).abs() < 1e-15);
    }

    #[test]
    fn two_site_ring_accumulates() {
        let t: f64 = 0.3;
        let q = build_quadratic_form(&spec(2, t));
        assert!(q.a()[(0, 1)].abs() < 1e-15);
        assert!((q.b()[(0, 1)] + 2.0 * t.cos()).abs() < 1e-15);
    }

    #[test]
    fn field_limit() {
        let sol = solve_ground_state(&spec(6, FRAC_PI_2)).unwrap();
        assert!(sol.modes.lambdas().iter().all(|l| (l - 2.0).abs() < 1e-12));
        let o = observables(&sol.correlation);
        assert!((o.m_x - 1.0).abs() < 1e-12);
        assert!(o.c_zz.abs() < 1e-12);
    }

    #[test]
    fn ising_limit() {
        let sol = solve_ground_state(&spec(6, 0.0)).unwrap();
        let o = observables(&sol.correlation);
        assert!(o.m_x.abs() < 1e-12);
        assert!((o.c_zz - 1.0).abs() < 1e-12);
        assert!(string_expectation(&sol.correlation).unwrap().abs() < 1e-10);
    }

    #[test]
    fn lambdas_ascending_and_nonnegative() {
        let modes = solve_modes(&build_quadratic_form(&spec(7, 0.9))).unwrap();
        assert!(modes.lambdas().windows(2).all(|w| w[0] <= w[1]));
        assert!(modes.lambdas().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn self_dual_point() {
        let sol = solve_ground_state(&spec(50, FRAC_PI_4)).unwrap();
        let o = observables(&sol.correlation);
        assert!((o.m_x - o.c_zz).abs() < 1e-9);
    }

    #[test]
    fn determinant_handles_singular_blocks() {
        let nil = Mat::from_fn(3, 3, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
        assert_eq!(determinant(nil.as_ref()), 0.0);
        let m = Mat::from_fn(3, 3, |i, j| [[0.0, 2.0, 1.0], [1.0, 0.0, 0.0], [3.0, 1.0, 4.0]][i][j]);
        // cofactor expansion: 0 - 2*(4 - 0) + 1*(1 - 0) = -7
        assert!((determinant(m.as_ref()) + 7.0).abs() < 1e-14);
    }

    #[test]
    fn string_length_bounds() {
        let sol = solve_ground_state(&spec(4, 1.0)).unwrap();
        assert!(string_expectation_len(&sol.correlation, 0).is_err());
        assert!(string_expectation_len(&sol.correlation, 5).is_err());
        // the full ring string is the Z2 symmetry
        let full = string_expectation_len(&sol.correlation, 4).unwrap();
        assert!((full - 1.0).abs() < 1e-10);
    }
}
