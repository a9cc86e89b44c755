//! Sparse Pauli-string operators with real coefficients.
//!
//! An [`OperatorExpr`] is a real-weighted sum of Pauli strings on an
//! `n`-qubit register. Strings are stored as sorted `(site, axis)` lists and
//! identical strings are merged on insertion, so two expressions describing
//! the same operator compare equal up to coefficient round-off.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Relative threshold below which a merged coefficient is treated as an
/// exact cancellation and the term is dropped.
const CANCELLATION_TOL: f64 = 1e-14;

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Product `self * other` of two Pauli matrices on the same qubit as
    /// `(i^k, result)`; `None` stands for the identity.
    fn mul(self, other: Axis) -> (u8, Option<Axis>) {
        use Axis::*;
        match (self, other) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A tensor product of single-site Paulis, identity on unlisted sites.
/// Factors are kept sorted by site.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<(usize, Axis)>);

impl PauliString {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Builds a string from arbitrary-order factors; sites must be distinct.
    pub fn new(factors: &[(usize, Axis)]) -> Result<Self> {
        let mut v = factors.to_vec();
        v.sort_by_key(|&(s, _)| s);
        if v.windows(2).any(|w| w[0].0 == w[1].0) {
            return validation(format!("repeated site in Pauli string {factors:?}"));
        }
        Ok(Self(v))
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn axis_at(&self, site: usize) -> Option<Axis> {
        self.0
            .binary_search_by_key(&site, |&(s, _)| s)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn max_site(&self) -> Option<usize> {
        self.0.last().map(|&(s, _)| s)
    }

    /// `self * other = i^k * result`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        let mut phase = 0u8;
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let (k, r) = a[i].1.mul(b[j].1);
                phase = (phase + k) % 4;
                if let Some(axis) = r {
                    out.push((a[i].0, axis));
                }
                i += 1;
                j += 1;
            }
        }
        (phase, PauliString(out))
    }

    /// Whether the two strings commute (even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .0
            .iter()
            .filter(|&&(s, a)| other.axis_at(s).is_some_and(|b| b != a))
            .count();
        clashes % 2 == 0
    }

    fn map_sites(&self, f: impl Fn(usize) -> usize) -> Result<PauliString> {
        let factors: Vec<_> = self.0.iter().map(|&(s, a)| (f(s), a)).collect();
        PauliString::new(&factors)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (k, (s, a)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}{s}")?;
        }
        Ok(())
    }
}

/// A single weighted Pauli string. The coefficient is finite and nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: &[(usize, Axis)]) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return validation(format!(
                "Pauli coefficient must be finite and nonzero, got {coefficient}"
            ));
        }
        Ok(Self {
            coefficient,
            string: PauliString::new(factors)?,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }
}

/// Real-weighted sum of Pauli strings on a register of `register_size` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr {
    register_size: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl OperatorExpr {
    /// The zero operator on `register_size` qubits.
    pub fn zero(register_size: usize) -> Result<Self> {
        if register_size == 0 {
            return validation("register size must be at least 1");
        }
        Ok(Self {
            register_size,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(register_size: usize) -> Result<Self> {
        let mut op = Self::zero(register_size)?;
        op.add(1.0, &[])?;
        Ok(op)
    }

    pub fn from_terms(register_size: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut op = Self::zero(register_size)?;
        for t in terms {
            op.add_term(t)?;
        }
        Ok(op)
    }

    /// Adds `coefficient * factors`; a zero coefficient is a no-op.
    pub fn add(&mut self, coefficient: f64, factors: &[(usize, Axis)]) -> Result<&mut Self> {
        if coefficient == 0.0 {
            return Ok(self);
        }
        let term = PauliTerm::new(coefficient, factors)?;
        self.add_term(term)?;
        Ok(self)
    }

    /// Builder form of [`OperatorExpr::add`].
    pub fn with(mut self, coefficient: f64, factors: &[(usize, Axis)]) -> Result<Self> {
        self.add(coefficient, factors)?;
        Ok(self)
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        if let Some(s) = term.string.max_site() {
            if s >= self.register_size {
                return validation(format!(
                    "site {s} out of range for a {}-qubit register",
                    self.register_size
                ));
            }
        }
        self.accumulate(term.string, term.coefficient);
        Ok(())
    }

    fn accumulate(&mut self, string: PauliString, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(string) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let old = *e.get();
                let sum = old + c;
                if sum == 0.0 || sum.abs() <= CANCELLATION_TOL * old.abs().max(c.abs()) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn register_size(&self) -> usize {
        self.register_size
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms.get(string).copied().unwrap_or(0.0)
    }

    /// Coefficient of the identity string.
    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliString::identity())
    }

    /// Trace of the operator; only the identity string contributes.
    pub fn trace(&self) -> f64 {
        self.identity_coefficient() * 2f64.powi(self.register_size as i32)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self {
            register_size: self.register_size,
            terms: BTreeMap::new(),
        };
        if factor != 0.0 {
            for (s, c) in self.terms() {
                out.terms.insert(s.clone(), c * factor);
            }
        }
        out
    }

    pub fn plus(&self, other: &OperatorExpr) -> Result<Self> {
        self.check_same_register(other)?;
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.accumulate(s.clone(), c);
        }
        Ok(out)
    }

    pub fn minus(&self, other: &OperatorExpr) -> Result<Self> {
        self.plus(&other.scaled(-1.0))
    }

    /// Operator product. Fails if the product is not a real combination of
    /// Pauli strings (e.g. the product of two anticommuting strings).
    pub fn product(&self, other: &OperatorExpr) -> Result<Self> {
        self.check_same_register(other)?;
        let mut real: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut imag: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let (k, s) = a.mul(b);
                let c = ca * cb;
                match k {
                    0 => *real.entry(s).or_default() += c,
                    1 => *imag.entry(s).or_default() += c,
                    2 => *real.entry(s).or_default() -= c,
                    _ => *imag.entry(s).or_default() -= c,
                }
            }
        }
        let scale = self.max_abs_coefficient() * other.max_abs_coefficient();
        if let Some((s, c)) = imag.iter().find(|(_, c)| c.abs() > 1e-12 * scale.max(1.0)) {
            return Err(Error::Validation(format!(
                "operator product has imaginary coefficient {c} on {s}"
            )));
        }
        let mut out = Self::zero(self.register_size)?;
        for (s, c) in real {
            if c.abs() > CANCELLATION_TOL * scale {
                out.terms.insert(s, c);
            }
        }
        Ok(out)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest coefficient difference over the union of strings.
    pub fn max_coefficient_diff(&self, other: &OperatorExpr) -> Result<f64> {
        self.check_same_register(other)?;
        let mut d: f64 = 0.0;
        for (s, c) in self.terms() {
            d = d.max((c - other.coefficient(s)).abs());
        }
        for (s, c) in other.terms() {
            if !self.terms.contains_key(s) {
                d = d.max(c.abs());
            }
        }
        Ok(d)
    }

    /// Relabels sites through `map` onto a register of `register_size` qubits.
    pub fn relabeled(&self, register_size: usize, map: impl Fn(usize) -> usize) -> Result<Self> {
        let mut out = Self::zero(register_size)?;
        for (s, c) in self.terms() {
            let mapped = s.map_sites(&map)?;
            if let Some(m) = mapped.max_site() {
                if m >= register_size {
                    return validation(format!("relabeled site {m} outside register"));
                }
            }
            out.accumulate(mapped, c);
        }
        Ok(out)
    }

    pub fn check_same_register(&self, other: &OperatorExpr) -> Result<()> {
        if self.register_size != other.register_size {
            return validation(format!(
                "register size mismatch: {} vs {}",
                self.register_size, other.register_size
            ));
        }
        Ok(())
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*({s})")?;
        }
        Ok(())
    }
}
