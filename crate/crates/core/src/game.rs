//! Process matrices and the guessing game played on them.
//!
//! Party `i` owns input qubit `2i` and output qubit `2i + 1`. A strategy is a
//! product of local operators, one per party, and its probability is
//! `Tr[(⊗ P_party) W]`. Every local operator is a product of single-qubit
//! Hermitian operators, so the trace factorizes over the Pauli terms of `W`:
//! `Σ_t c_t Π_q tr(p_q σ_{t,q})`. A dense route is kept for cross-checks.

use std::ops::BitXor;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::kernel::{dense_cap, eigensolve, to_dense, Axis, DenseOperator, OperatorExpr, PauliString};

/// A classical bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);
    pub const BOTH: [Bit; 2] = [Bit::ZERO, Bit::ONE];

    /// `(-1)^bit`.
    pub fn sign(self) -> f64 {
        if self.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn value(self) -> u8 {
        self.0 as u8
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            _ => validation(format!("bit must be 0 or 1, got {v}")),
        }
    }
}

impl BitXor for Bit {
    type Output = Bit;

    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

/// One party's input and output qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub name: String,
    pub input: usize,
    pub output: usize,
}

/// Ordered parties covering the qubits `0..2𝒩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRegister {
    parties: Vec<Party>,
}

impl PartyRegister {
    pub fn new(parties: Vec<Party>) -> Result<Self> {
        let n = 2 * parties.len();
        if parties.is_empty() {
            return validation("a register needs at least one party");
        }
        let mut seen = vec![false; n];
        for p in &parties {
            for q in [p.input, p.output] {
                if q >= n || seen[q] {
                    return validation(format!("qubit {q} of party {} is repeated or out of range", p.name));
                }
                seen[q] = true;
            }
        }
        Ok(Self { parties })
    }

    /// Parties `A, B, C, ...` with input `2i` and output `2i + 1`.
    pub fn standard(n_parties: usize) -> Result<Self> {
        let parties = (0..n_parties)
            .map(|i| Party {
                name: party_name(i),
                input: 2 * i,
                output: 2 * i + 1,
            })
            .collect();
        Self::new(parties)
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.parties.len()
    }
}

fn party_name(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("S{}", i + 1)
    }
}

/// A process matrix on a party register.
#[derive(Clone, Debug)]
pub struct ProcessMatrix {
    body: OperatorExpr,
    register: PartyRegister,
}

impl ProcessMatrix {
    pub fn new(body: OperatorExpr, register: PartyRegister) -> Result<Self> {
        if body.register_size() != register.n_qubits() {
            return validation(format!(
                "process body acts on {} qubits, register has {}",
                body.register_size(),
                register.n_qubits()
            ));
        }
        Ok(Self { body, register })
    }

    pub fn body(&self) -> &OperatorExpr {
        &self.body
    }

    pub fn register(&self) -> &PartyRegister {
        &self.register
    }

    pub fn n_parties(&self) -> usize {
        self.register.n_parties()
    }
}

/// `W = ¼[I + cosθ Z^{A2}Z^{B1} + sinθ Z^{A1}X^{B1}Z^{B2}]`.
pub fn build_w_opt(theta: f64) -> ProcessMatrix {
    use Axis::*;
    let (s, c) = theta.sin_cos();
    let body = OperatorExpr::zero(4)
        .and_then(|w| w.with(0.25, &[]))
        .and_then(|w| w.with(0.25 * c, &[(1, Z), (2, Z)]))
        .and_then(|w| w.with(0.25 * s, &[(0, Z), (2, X), (3, Z)]))
        .expect("fixed four-qubit layout");
    ProcessMatrix::new(body, PartyRegister::standard(2).expect("two parties")).expect("sizes match")
}

/// Pauli axes of the cyclic terms: two-body `σ_α(S_i^O) σ_β(S_{i+1}^I)` and
/// three-body `σ_γ(S_i^I) σ_δ(S_{i+1}^I) σ_η(S_{i+1}^O)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermAxes {
    pub alpha: Axis,
    pub beta: Axis,
    pub gamma: Axis,
    pub delta: Axis,
    pub eta: Axis,
}

impl TermAxes {
    /// `α = β = η = Z`, `γ = δ = X`.
    pub const CYCLIC: TermAxes = TermAxes {
        alpha: Axis::Z,
        beta: Axis::Z,
        gamma: Axis::X,
        delta: Axis::X,
        eta: Axis::Z,
    };

    /// The axes of the two-party matrix `W_opt`.
    pub const TWO_PARTY: TermAxes = TermAxes {
        alpha: Axis::Z,
        beta: Axis::Z,
        gamma: Axis::Z,
        delta: Axis::X,
        eta: Axis::Z,
    };
}

/// `W = 2^{-𝒩}[I + (f0/𝒩₀) Σ_{i<𝒩₀} two-body_i + (f1/𝒩₁) Σ_{i<𝒩₁} three-body_i]`.
///
/// The first `𝒩₀` (`𝒩₁`) cyclic terms are kept, so `𝒩₀ = 𝒩₁ = 1` on two
/// parties with [`TermAxes::TWO_PARTY`] gives `W_opt`.
pub fn build_w_general(
    n_parties: usize,
    f0: f64,
    f1: f64,
    axes: TermAxes,
    n0: usize,
    n1: usize,
) -> Result<ProcessMatrix> {
    if n_parties < 2 {
        return validation(format!("need at least 2 parties, got {n_parties}"));
    }
    if !(f0.is_finite() && f1.is_finite()) {
        return validation("f0 and f1 must be finite");
    }
    if n0 == 0 || n0 > n_parties || n1 == 0 || n1 > n_parties {
        return validation(format!("term counts ({n0}, {n1}) must lie in 1..={n_parties}"));
    }
    let register = PartyRegister::standard(n_parties)?;
    let cap = dense_cap();
    if register.n_qubits() > cap {
        return Err(Error::Capacity {
            qubits: register.n_qubits(),
            cap,
        });
    }
    let norm = 0.5f64.powi(n_parties as i32);
    let p = register.parties();
    let mut body = OperatorExpr::zero(register.n_qubits())?;
    body.add(norm, &[])?;
    for i in 0..n0 {
        let next = &p[(i + 1) % n_parties];
        body.add(norm * f0 / n0 as f64, &[(p[i].output, axes.alpha), (next.input, axes.beta)])?;
    }
    for i in 0..n1 {
        let next = &p[(i + 1) % n_parties];
        body.add(
            norm * f1 / n1 as f64,
            &[(p[i].input, axes.gamma), (next.input, axes.delta), (next.output, axes.eta)],
        )?;
    }
    ProcessMatrix::new(body, register)
}

/// Three-party matrix with `f0, f1 ∈ [-1, 1]`.
pub fn build_w_three(f0: f64, f1: f64) -> Result<ProcessMatrix> {
    for f in [f0, f1] {
        if !(-1.0..=1.0).contains(&f) {
            return validation(format!("f0 and f1 must lie in [-1, 1], got {f}"));
        }
    }
    build_w_general(3, f0, f1, TermAxes::CYCLIC, 3, 3)
}

/// A single-qubit state `½(I + r·σ)` with `|r| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const MIXED: BlochVector = BlochVector([0.0; 3]);

    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > 1.0 + 1e-12 {
            return validation(format!("Bloch vector {r:?} has length {norm} > 1"));
        }
        Ok(Self(r))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

/// What a party does with its output qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OutputAction {
    /// Prepare the eigenstate `½(I + (-1)^bit σ_axis)`.
    Encode { axis: Axis, bit: Bit },
    /// Prepare an arbitrary state; the encoding is irrelevant to the score.
    Free(BlochVector),
}

/// `½(I + (-1)^α σ_ζ)` on the input qubit times the output action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMeasurement {
    pub input_axis: Axis,
    pub input_bit: Bit,
    pub output: OutputAction,
}

/// Traces `[tr p, tr pX, tr pY, tr pZ]` of a single-qubit operator.
type Weights = [f64; 4];

fn axis_index(a: Axis) -> usize {
    match a {
        Axis::X => 1,
        Axis::Y => 2,
        Axis::Z => 3,
    }
}

fn projector_weights(axis: Axis, bit: Bit) -> Weights {
    let mut w = [1.0, 0.0, 0.0, 0.0];
    w[axis_index(axis)] = bit.sign();
    w
}

fn weights_to_dense(w: Weights) -> DenseOperator {
    // p = ½(w0 I + w1 X + w2 Y + w3 Z)
    let m = Mat::from_fn(2, 2, |i, j| {
        let v = match (i, j) {
            (0, 0) => c64::new(w[0] + w[3], 0.0),
            (1, 1) => c64::new(w[0] - w[3], 0.0),
            (0, 1) => c64::new(w[1], -w[2]),
            _ => c64::new(w[1], w[2]),
        };
        v * c64::new(0.5, 0.0)
    });
    DenseOperator::from_matrix(1, m).expect("2x2")
}

impl LocalMeasurement {
    /// Measure `ζ` with outcome `α`, then encode `β` in the Z basis.
    pub fn new(alpha: Bit, beta: Bit, zeta: Axis) -> Self {
        Self {
            input_axis: zeta,
            input_bit: alpha,
            output: OutputAction::Encode { axis: Axis::Z, bit: beta },
        }
    }

    /// Measure `ζ` with outcome `α`, then encode `β` along `output_axis`.
    pub fn encoded(alpha: Bit, zeta: Axis, beta: Bit, output_axis: Axis) -> Self {
        Self {
            input_axis: zeta,
            input_bit: alpha,
            output: OutputAction::Encode { axis: output_axis, bit: beta },
        }
    }

    pub fn free(alpha: Bit, zeta: Axis, rho: BlochVector) -> Self {
        Self {
            input_axis: zeta,
            input_bit: alpha,
            output: OutputAction::Free(rho),
        }
    }

    fn weights(&self) -> (Weights, Weights) {
        let input = projector_weights(self.input_axis, self.input_bit);
        let output = match self.output {
            OutputAction::Encode { axis, bit } => projector_weights(axis, bit),
            OutputAction::Free(r) => {
                let [x, y, z] = r.components();
                [1.0, x, y, z]
            }
        };
        (input, output)
    }

    /// Two-qubit operator, input qubit first.
    pub fn to_dense(&self) -> DenseOperator {
        let (i, o) = self.weights();
        weights_to_dense(i).kron(&weights_to_dense(o))
    }
}

/// Dense two-qubit operator of `𝒫(α, β; ζ)`.
pub fn local_measurement(alpha: Bit, beta: Bit, zeta: Axis) -> DenseOperator {
    LocalMeasurement::new(alpha, beta, zeta).to_dense()
}

fn check_strategy(w: &ProcessMatrix, strategy: &[LocalMeasurement]) -> Result<()> {
    if strategy.len() != w.n_parties() {
        return validation(format!(
            "strategy has {} local operators for {} parties",
            strategy.len(),
            w.n_parties()
        ));
    }
    Ok(())
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(-1e-10..=1.0 + 1e-10).contains(&p) {
        return Err(Error::Numerical(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Raw `Tr[(⊗ P) W]` through the factorized Pauli expansion.
pub fn strategy_trace(w: &ProcessMatrix, strategy: &[LocalMeasurement]) -> Result<f64> {
    check_strategy(w, strategy)?;
    let mut per_qubit = vec![[1.0, 0.0, 0.0, 0.0]; w.register.n_qubits()];
    for (party, m) in w.register.parties().iter().zip(strategy) {
        let (i, o) = m.weights();
        per_qubit[party.input] = i;
        per_qubit[party.output] = o;
    }
    let mut total = 0.0;
    for (string, c) in w.body.terms() {
        total += c * string_weight(string, &per_qubit);
    }
    Ok(total)
}

fn string_weight(string: &PauliString, per_qubit: &[Weights]) -> f64 {
    per_qubit
        .iter()
        .enumerate()
        .map(|(q, w)| w[string.axis_at(q).map_or(0, axis_index)])
        .product()
}

/// `Tr[(⊗ P) W]`, asserted to lie in `[0, 1]` up to round-off and clamped.
pub fn outcome_probability(w: &ProcessMatrix, strategy: &[LocalMeasurement]) -> Result<f64> {
    clamp_probability(strategy_trace(w, strategy)?)
}

/// Same trace evaluated with dense matrices.
pub fn outcome_probability_dense(w: &ProcessMatrix, strategy: &[LocalMeasurement]) -> Result<f64> {
    check_strategy(w, strategy)?;
    let n = w.register.n_qubits();
    let mut locals = vec![DenseOperator::identity(1); n];
    for (party, m) in w.register.parties().iter().zip(strategy) {
        let (i, o) = m.weights();
        locals[party.input] = weights_to_dense(i);
        locals[party.output] = weights_to_dense(o);
    }
    let p = locals[1..].iter().fold(locals[0].clone(), |acc, q| acc.kron(q));
    let wd = to_dense(&w.body)?;
    let pw = p.matmul(&wd)?;
    let tr = pw.trace();
    if tr.im.abs() > 1e-10 {
        return Err(Error::Numerical(format!("trace has imaginary part {}", tr.im)));
    }
    clamp_probability(tr.re)
}

/// Left, right and total success probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub p_left: f64,
    pub p_right: f64,
    pub p_total: f64,
}

impl GameOutcome {
    pub fn new(p_left: f64, p_right: f64) -> Self {
        Self {
            p_left,
            p_right,
            p_total: 0.5 * (p_left + p_right),
        }
    }

    pub fn violates(&self, bound: f64) -> bool {
        self.p_total > bound
    }
}

/// `P(x = b)` for Alice's guess: Alice's operator depends on `(x, a)`, Bob's
/// on `(y, b)`. Averaged over `a, b` and summed over Bob's outcome `y`.
pub fn alice_guess_probability(
    w: &ProcessMatrix,
    alice: impl Fn(Bit, Bit) -> LocalMeasurement,
    bob: impl Fn(Bit, Bit) -> LocalMeasurement,
) -> Result<f64> {
    check_two_party(w)?;
    let mut p = 0.0;
    for a in Bit::BOTH {
        for b in Bit::BOTH {
            for y in Bit::BOTH {
                p += 0.25 * strategy_trace(w, &[alice(b, a), bob(y, b)])?;
            }
        }
    }
    clamp_probability(p)
}

/// `P(y = a)` for Bob's guess: Alice's operator depends on `(x, a)`, Bob's on
/// his outcome `y`. Averaged over `a` and summed over Alice's outcome `x`.
pub fn bob_guess_probability(
    w: &ProcessMatrix,
    alice: impl Fn(Bit, Bit) -> LocalMeasurement,
    bob: impl Fn(Bit) -> LocalMeasurement,
) -> Result<f64> {
    check_two_party(w)?;
    let mut p = 0.0;
    for a in Bit::BOTH {
        for x in Bit::BOTH {
            p += 0.5 * strategy_trace(w, &[alice(x, a), bob(a)])?;
        }
    }
    clamp_probability(p)
}

/// `P_Bob(y = a, b' = 1)`: Alice measures Z and encodes `a` in Z, Bob
/// measures Z and prepares `ρ`.
pub fn p_bob(w: &ProcessMatrix, rho: BlochVector) -> Result<f64> {
    bob_guess_probability(
        w,
        |x, a| LocalMeasurement::new(x, a, Axis::Z),
        |y| LocalMeasurement::free(y, Axis::Z, rho),
    )
}

/// `P_Alice(x = b, b' = 0)`: Bob measures X with outcome `y` and encodes
/// `y ⊕ b` in Z.
pub fn p_alice(w: &ProcessMatrix) -> Result<f64> {
    alice_guess_probability(
        w,
        |x, a| LocalMeasurement::new(x, a, Axis::Z),
        |y, b| LocalMeasurement::new(y, y ^ b, Axis::X),
    )
}

fn check_two_party(w: &ProcessMatrix) -> Result<()> {
    if w.n_parties() != 2 {
        return validation(format!("two-party strategy applied to {} parties", w.n_parties()));
    }
    Ok(())
}

/// Two-party game on `W_opt(θ)`: `p_left = P_Alice`, `p_right = P_Bob`.
pub fn two_party_game(theta: f64) -> Result<GameOutcome> {
    two_party_outcome(&build_w_opt(theta), BlochVector::MIXED)
}

pub fn two_party_outcome(w: &ProcessMatrix, rho: BlochVector) -> Result<GameOutcome> {
    Ok(GameOutcome::new(p_alice(w)?, p_bob(w, rho)?))
}

/// Per-party rows of the cyclic game: `left[i]` is party `i` guessing its
/// left neighbour, `right[i]` its right neighbour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicRows {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl CyclicRows {
    pub fn outcome(&self) -> GameOutcome {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        GameOutcome::new(mean(&self.left), mean(&self.right))
    }
}

/// Row probability: `2^{𝒩-1}` times the guess-equals-target trace averaged
/// over the target bit, with every other party's outcome fixed to 0.
fn row_probability(w: &ProcessMatrix, strategy: impl Fn(Bit) -> Vec<LocalMeasurement>) -> Result<f64> {
    let scale = 2f64.powi(w.n_parties() as i32 - 1);
    let mut p = 0.0;
    for bit in Bit::BOTH {
        p += 0.5 * strategy_trace(w, &strategy(bit))?;
    }
    clamp_probability(scale * p)
}

/// Evaluates every row of the cyclic strategy table on `w`.
///
/// Left rows (`b' = 0`): all inputs measured in Z. The guesser's outcome is
/// its guess, its left neighbour encodes its bit in the output.
/// Right rows (`b' = 1`): all inputs measured in X. The guesser's outcome and
/// output both carry the guess, its right neighbour encodes its bit.
pub fn cyclic_rows(w: &ProcessMatrix) -> Result<CyclicRows> {
    let n = w.n_parties();
    let zero = Bit::ZERO;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let l = (i + n - 1) % n;
        left.push(row_probability(w, |bit| {
            (0..n)
                .map(|k| match k {
                    _ if k == i => LocalMeasurement::new(bit, zero, Axis::Z),
                    _ if k == l => LocalMeasurement::new(zero, bit, Axis::Z),
                    _ => LocalMeasurement::new(zero, zero, Axis::Z),
                })
                .collect()
        })?);
        let r = (i + 1) % n;
        right.push(row_probability(w, |bit| {
            (0..n)
                .map(|k| match k {
                    _ if k == i => LocalMeasurement::new(bit, bit, Axis::X),
                    _ if k == r => LocalMeasurement::new(zero, bit, Axis::X),
                    _ => LocalMeasurement::new(zero, zero, Axis::X),
                })
                .collect()
        })?);
    }
    Ok(CyclicRows { left, right })
}

/// `𝒩`-party game on the cyclic process matrix with `𝒩₀ = 𝒩₁ = 𝒩`.
pub fn multi_party_game(n_parties: usize, f0: f64, f1: f64) -> Result<GameOutcome> {
    let w = build_w_general(n_parties, f0, f1, TermAxes::CYCLIC, n_parties, n_parties)?;
    Ok(cyclic_rows(&w)?.outcome())
}

/// Best score under a definite causal order.
pub fn classical_bound(n_parties: usize) -> Result<GameOutcome> {
    if n_parties < 2 {
        return validation(format!("need at least 2 parties, got {n_parties}"));
    }
    let n = n_parties as f64;
    Ok(GameOutcome {
        p_left: 1.0 - 1.0 / (2.0 * n),
        p_right: 0.5 + 1.0 / (2.0 * n),
        p_total: 0.75,
    })
}

/// Validity diagnostics of a process matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessReport {
    pub hermiticity_residual: f64,
    /// `Tr W - 2^𝒩`.
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl ProcessReport {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_residual <= tol && self.trace_deviation.abs() <= tol && self.min_eigenvalue >= -tol
    }
}

pub fn validate_process(w: &ProcessMatrix) -> Result<ProcessReport> {
    let d = to_dense(&w.body)?;
    let spectrum = eigensolve(&d)?;
    let expected = 2f64.powi(w.n_parties() as i32);
    Ok(ProcessReport {
        hermiticity_residual: d.hermiticity_residual(),
        trace_deviation: d.trace().re - expected,
        min_eigenvalue: spectrum.ground_energy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn w_opt_trace_and_spectrum() {
        for theta in [0.0, 0.3, FRAC_PI_4, 1.2] {
            let w = build_w_opt(theta);
            assert!((w.body().trace() - 4.0).abs() < 1e-14);
            let s = eigensolve(&to_dense(w.body()).unwrap()).unwrap();
            let zeros = s.eigenvalues().iter().filter(|e| e.abs() < 1e-12).count();
            let halves = s.eigenvalues().iter().filter(|e| (*e - 0.5).abs() < 1e-12).count();
            assert_eq!((zeros, halves), (8, 8));
        }
    }

    #[test]
    fn local_measurement_examples() {
        let m = local_measurement(Bit::ZERO, Bit::ZERO, Axis::Z);
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
        let mut sum = DenseOperator::zeros(2);
        for a in Bit::BOTH {
            for b in Bit::BOTH {
                sum = sum.plus(&local_measurement(a, b, Axis::X)).unwrap();
            }
        }
        assert!(sum.max_abs_diff(&DenseOperator::identity(2)).unwrap() < 1e-15);
        // |-⟩⟨-| on the input
        let minus = LocalMeasurement::new(Bit::ONE, Bit::ZERO, Axis::X).to_dense();
        assert!((minus.get(0, 2).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_party_endpoints() {
        let g = two_party_game(0.0).unwrap();
        assert!((g.p_left - 0.5).abs() < 1e-12);
        assert!((g.p_right - 1.0).abs() < 1e-12);
        assert!((g.p_total - 0.75).abs() < 1e-12);
        let g = two_party_game(FRAC_PI_4).unwrap();
        assert!((g.p_total - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_angle_closes_the_channel() {
        let w = build_w_opt(PI);
        assert!((p_bob(&w, BlochVector::MIXED).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn w_general_reduces_to_known_matrices() {
        let w = build_w_general(2, 0.6f64.cos(), 0.6f64.sin(), TermAxes::TWO_PARTY, 1, 1).unwrap();
        assert!(w.body().max_coefficient_diff(build_w_opt(0.6).body()).unwrap() < 1e-15);
        let a = build_w_general(3, 0.2, -0.4, TermAxes::CYCLIC, 3, 3).unwrap();
        let b = build_w_three(0.2, -0.4).unwrap();
        assert_eq!(a.body(), b.body());
        assert!(build_w_three(1.5, 0.0).is_err());
        assert!(build_w_general(1, 0.0, 0.0, TermAxes::CYCLIC, 1, 1).is_err());
    }

    #[test]
    fn three_party_rows() {
        let w = build_w_three(0.3, 0.8).unwrap();
        let rows = cyclic_rows(&w).unwrap();
        for p in &rows.left {
            assert!((p - 0.65).abs() < 1e-12);
        }
        for p in &rows.right {
            assert!((p - 0.9).abs() < 1e-12);
        }
        let g = multi_party_game(3, 1.0, 0.0).unwrap();
        assert!((g.p_left - 1.0).abs() < 1e-12);
        assert!((g.p_right - 0.5).abs() < 1e-12);
        assert!((g.p_total - 0.75).abs() < 1e-12);
    }

    #[test]
    fn classical_bounds() {
        let b = classical_bound(3).unwrap();
        assert_eq!((b.p_left, b.p_right, b.p_total), (5.0 / 6.0, 2.0 / 3.0, 0.75));
        let b = classical_bound(10).unwrap();
        assert!((b.p_left - 0.95).abs() < 1e-15 && (b.p_right - 0.55).abs() < 1e-15);
        assert!(classical_bound(1).is_err());
    }

    #[test]
    fn corrupted_matrix_is_flagged() {
        use Axis::*;
        let body = OperatorExpr::zero(4)
            .unwrap()
            .with(0.25, &[])
            .unwrap()
            .with(0.5, &[(1, Z), (2, Z)])
            .unwrap();
        let w = ProcessMatrix::new(body, PartyRegister::standard(2).unwrap()).unwrap();
        let r = validate_process(&w).unwrap();
        assert!(r.min_eigenvalue < -0.1);
        assert!(!r.is_valid(1e-10));
        let mixed = build_w_general(2, 0.0, 0.0, TermAxes::CYCLIC, 2, 2).unwrap();
        let r = validate_process(&mixed).unwrap();
        assert!((r.min_eigenvalue - 0.25).abs() < 1e-14);
        assert!(r.is_valid(1e-10));
    }

    #[test]
    fn factorized_and_dense_traces_agree() {
        let w = build_w_three(0.7, -0.2).unwrap();
        let rho = BlochVector::new([0.3, -0.4, 0.5]).unwrap();
        let s = [
            LocalMeasurement::new(Bit::ONE, Bit::ZERO, Axis::X),
            LocalMeasurement::free(Bit::ZERO, Axis::Y, rho),
            LocalMeasurement::new(Bit::ONE, Bit::ONE, Axis::Z),
        ];
        let a = strategy_trace(&w, &s).unwrap();
        let b = outcome_probability_dense(&w, &s).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn register_validation() {
        let bad = vec![
            Party { name: "A".into(), input: 0, output: 1 },
            Party { name: "B".into(), input: 1, output: 2 },
        ];
        assert!(PartyRegister::new(bad).is_err());
        assert_eq!(PartyRegister::standard(3).unwrap().parties()[2].name, "C");
    }
}
