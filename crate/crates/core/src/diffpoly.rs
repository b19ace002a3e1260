//! Difference polynomials in w(z), w(z+c_1), ..., w(z+c_n) and their
//! degree and weight functionals.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rat_int, ExactComplex, RatFun};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffPolyError {
    #[error("shift constants must be non-zero")]
    ZeroShift,
    #[error("shift {0} listed twice")]
    DuplicateShift(String),
    #[error("multi-index has {found} exponents, expected {expected}")]
    IndexLength { expected: usize, found: usize },
    #[error("symbolic coefficients collide on multi-index {0:?}")]
    SymbolicDuplicate(Vec<u64>),
    #[error("polynomial has no terms")]
    EmptyPolynomial,
    #[error("shift index {0} out of range")]
    BadIndex(usize),
    #[error("coefficient `{0}` is symbolic and cannot be evaluated")]
    SymbolicCoefficient(String),
    #[error("pole hit while evaluating at {0}")]
    PoleHit(String),
}

/// A shift constant together with its 1-based position in the owning
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub value: ExactComplex,
    pub index: usize,
}

/// Exponents (λ_0, λ_1, ..., λ_n); λ_0 belongs to the unshifted w.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u64>);

impl MultiIndex {
    pub fn new(exponents: Vec<u64>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn unshifted(&self) -> u64 {
        self.0[0]
    }

    /// Σ_{j≥1} λ_j.
    pub fn shifted_total(&self) -> u64 {
        self.0[1..].iter().sum()
    }
}

/// A named small function of the solution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub nonzero: bool,
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficient {
    Symbolic(Symbol),
    #[serde(with = "ratfun_text")]
    Rational(RatFun),
}

mod ratfun_text {
    use crate::exact::RatFun;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &RatFun, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_text())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatFun, D::Error> {
        let s = String::deserialize(d)?;
        crate::eqparse::parse_ratfun(&s).map_err(serde::de::Error::custom)
    }
}

impl Coefficient {
    pub fn one() -> Self {
        Coefficient::Rational(RatFun::one())
    }

    pub fn int(n: i64) -> Self {
        Coefficient::Rational(RatFun::from_rational(rat_int(n)))
    }

    pub fn symbol(name: &str) -> Self {
        Coefficient::Symbolic(Symbol {
            name: name.to_string(),
            nonzero: false,
            negated: false,
        })
    }

    pub fn symbol_nonzero(name: &str) -> Self {
        Coefficient::Symbolic(Symbol {
            name: name.to_string(),
            nonzero: true,
            negated: false,
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Rational(r) if r.is_zero())
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Coefficient::Symbolic(_))
    }

    /// ±1 as a numeric coefficient.
    pub fn is_unit(&self) -> bool {
        matches!(self, Coefficient::Rational(r) if r.is_one() || r.is_minus_one())
    }

    pub fn neg(&self) -> Self {
        match self {
            Coefficient::Symbolic(s) => Coefficient::Symbolic(Symbol {
                negated: !s.negated,
                ..s.clone()
            }),
            Coefficient::Rational(r) => Coefficient::Rational(r.neg()),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Symbolic(s) => {
                if s.negated {
                    write!(f, "-")?;
                }
                write!(f, "{}", s.name)?;
                if s.nonzero {
                    write!(f, "!=0")?;
                }
                Ok(())
            }
            Coefficient::Rational(r) => write!(f, "{{{}}}", r.to_text()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Coefficient,
    pub index: MultiIndex,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffPolynomial {
    shifts: Vec<Shift>,
    terms: Vec<Term>,
}

type CanonicalKey = Vec<(Vec<(ExactComplex, u64)>, u64, String)>;

impl PartialEq for DiffPolynomial {
    /// Structural equality up to relabelling of the shift list.
    fn eq(&self, other: &Self) -> bool {
        self.canonical_key() == other.canonical_key()
    }
}

impl Eq for DiffPolynomial {}

impl DiffPolynomial {
    /// Checks the shape (non-zero, distinct shifts; index lengths). The
    /// terms are kept as given; see [`DiffPolynomial::normalize`].
    pub fn new(shifts: Vec<ExactComplex>, terms: Vec<Term>) -> Result<Self, DiffPolyError> {
        for (k, s) in shifts.iter().enumerate() {
            if s.is_zero() {
                return Err(DiffPolyError::ZeroShift);
            }
            if shifts[..k].contains(s) {
                return Err(DiffPolyError::DuplicateShift(s.to_string()));
            }
        }
        for t in &terms {
            if t.index.0.len() != shifts.len() + 1 {
                return Err(DiffPolyError::IndexLength {
                    expected: shifts.len() + 1,
                    found: t.index.0.len(),
                });
            }
        }
        let shifts = shifts
            .into_iter()
            .enumerate()
            .map(|(k, value)| Shift { value, index: k + 1 })
            .collect();
        Ok(DiffPolynomial { shifts, terms })
    }

    /// A polynomial in the unshifted w only: `(coefficient, power)` pairs.
    pub fn w_only(terms: Vec<(Coefficient, u64)>) -> Result<Self, DiffPolyError> {
        let terms = terms
            .into_iter()
            .map(|(coeff, k)| Term {
                coeff,
                index: MultiIndex(vec![k]),
            })
            .collect();
        Self::new(Vec::new(), terms)?.normalize()
    }

    /// w(z+1)w(z-1) + w(z+1)w(z) + w(z)w(z-1).
    pub fn benchmark() -> Self {
        let t = |e: [u64; 3]| Term {
            coeff: Coefficient::one(),
            index: MultiIndex(e.to_vec()),
        };
        Self::new(
            vec![ExactComplex::from_ints(1, 0), ExactComplex::from_ints(-1, 0)],
            vec![t([0, 1, 1]), t([1, 1, 0]), t([1, 0, 1])],
        )
        .and_then(|p| p.normalize())
        .expect("benchmark polynomial is well formed")
    }

    pub fn shifts(&self) -> &[Shift] {
        &self.shifts
    }

    pub fn shift_values(&self) -> Vec<ExactComplex> {
        self.shifts.iter().map(|s| s.value.clone()).collect()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn n_shifts(&self) -> usize {
        self.shifts.len()
    }

    fn live_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| !t.coeff.is_zero())
    }

    /// Merges duplicate multi-indices, drops zero terms, sorts terms in
    /// descending lexicographic order of exponents.
    pub fn normalize(&self) -> Result<Self, DiffPolyError> {
        let mut merged: BTreeMap<MultiIndex, Coefficient> = BTreeMap::new();
        for t in &self.terms {
            match merged.get_mut(&t.index) {
                None => {
                    merged.insert(t.index.clone(), t.coeff.clone());
                }
                Some(acc) => match (&*acc, &t.coeff) {
                    (Coefficient::Rational(a), Coefficient::Rational(b)) => {
                        *acc = Coefficient::Rational(a.add(b));
                    }
                    _ => return Err(DiffPolyError::SymbolicDuplicate(t.index.0.clone())),
                },
            }
        }
        let terms = merged
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(index, coeff)| Term { coeff, index })
            .collect();
        Ok(DiffPolynomial {
            shifts: self.shifts.clone(),
            terms,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.live_terms().next().is_none()
    }

    fn max_over<G: Fn(&MultiIndex) -> u64>(&self, g: G) -> Result<u64, DiffPolyError> {
        self.live_terms()
            .map(|t| g(&t.index))
            .max()
            .ok_or(DiffPolyError::EmptyPolynomial)
    }

    /// max |λ| over terms.
    pub fn total_degree(&self) -> Result<u64, DiffPolyError> {
        self.max_over(|m| m.total())
    }

    /// λ̂_{c_j}: max exponent of w(z+c_j), j in 1..=n.
    pub fn shift_degree(&self, j: usize) -> Result<u64, DiffPolyError> {
        if j == 0 || j > self.shifts.len() {
            return Err(DiffPolyError::BadIndex(j));
        }
        Ok(self.live_terms().map(|t| t.index.0[j]).max().unwrap_or(0))
    }

    /// λ̂_0: max exponent of the unshifted w.
    pub fn deg0(&self) -> Result<u64, DiffPolyError> {
        self.max_over(|m| m.unshifted())
    }

    /// κ̂ = Σ_j λ̂_{c_j}.
    pub fn weight(&self) -> Result<u64, DiffPolyError> {
        if self.is_empty() {
            return Err(DiffPolyError::EmptyPolynomial);
        }
        (1..=self.shifts.len()).map(|j| self.shift_degree(j)).sum()
    }

    /// κ = max over terms of Σ_{j≥1} λ_j.
    pub fn kappa(&self) -> Result<u64, DiffPolyError> {
        self.max_over(|m| m.shifted_total())
    }

    /// Vanishing order in the unshifted w at w = 0.
    pub fn ord0(&self) -> Result<u64, DiffPolyError> {
        self.live_terms()
            .map(|t| t.index.unshifted())
            .min()
            .ok_or(DiffPolyError::EmptyPolynomial)
    }

    pub fn is_homogeneous(&self) -> Result<bool, DiffPolyError> {
        let mut degs = self.live_terms().map(|t| t.index.total());
        let first = degs.next().ok_or(DiffPolyError::EmptyPolynomial)?;
        Ok(degs.all(|d| d == first))
    }

    /// True if no term involves a shifted variable.
    pub fn is_w_only(&self) -> bool {
        self.live_terms().all(|t| t.index.shifted_total() == 0)
    }

    pub fn has_symbolic(&self) -> bool {
        self.live_terms().any(|t| t.coeff.is_symbolic())
    }

    /// Coefficient of w^k for a w-only polynomial.
    pub fn w_coefficient(&self, k: u64) -> Option<&Coefficient> {
        self.live_terms()
            .find(|t| t.index.unshifted() == k && t.index.shifted_total() == 0)
            .map(|t| &t.coeff)
    }

    /// Σ_λ a_λ(z) Π_j w(z+c_j)^{λ_j}.
    pub fn evaluate<W: Fn(Complex64) -> Complex64>(
        &self,
        w: W,
        z: Complex64,
    ) -> Result<Complex64, DiffPolyError> {
        let mut values = vec![w(z)];
        values.extend(self.shifts.iter().map(|s| w(z + s.value.to_c64())));
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DiffPolyError::PoleHit(format!("{z}")));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let a = match &t.coeff {
                Coefficient::Symbolic(s) => {
                    return Err(DiffPolyError::SymbolicCoefficient(s.name.clone()))
                }
                Coefficient::Rational(r) => r
                    .eval(z)
                    .ok_or_else(|| DiffPolyError::PoleHit(format!("{z}")))?,
            };
            let mut p = a;
            for (v, &e) in values.iter().zip(&t.index.0) {
                p *= cpow(*v, e);
            }
            acc += p;
        }
        if !acc.is_finite() {
            return Err(DiffPolyError::PoleHit(format!("{z}")));
        }
        Ok(acc)
    }

    fn canonical_key(&self) -> CanonicalKey {
        let mut key: CanonicalKey = self
            .live_terms()
            .map(|t| {
                let mut shifted: Vec<(ExactComplex, u64)> = self
                    .shifts
                    .iter()
                    .zip(&t.index.0[1..])
                    .filter(|(_, &e)| e > 0)
                    .map(|(s, &e)| (s.value.clone(), e))
                    .collect();
                shifted.sort();
                (shifted, t.index.unshifted(), format!("{:?}", t.coeff))
            })
            .collect();
        key.sort();
        key
    }
}

pub(crate) fn cpow(mut base: Complex64, mut e: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    acc
}
