//! Exact scalars and univariate polynomials.
//!
//! `Rational` is an arbitrary precision rational. `Poly<F>` is a dense
//! univariate polynomial over any type implementing [`Field`]; it is used
//! both for polynomials in `z` over the rationals and for polynomials in
//! `w` over rational functions of `z`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: scale both down
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Bits needed to store a rational (numerator plus denominator).
pub fn rat_bits(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Minimal field interface for polynomial Euclid.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division; `o` must be nonzero.
    fn div(&self, o: &Self) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: F, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Poly { coeffs: v }
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|k| match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => F::zero(),
            })
            .collect();
        Self::from_coeffs(v)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(v)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(F::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() < dd + 1 {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].div(&lead);
            if !c.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(b));
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => {
                let inv = F::one().div(l);
                self.scale(&inv)
            }
        }
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval_with<T, G>(&self, x: T, lift: G) -> T
    where
        T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + Default,
        G: Fn(&F) -> T,
    {
        let mut acc = T::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + lift(c);
        }
        acc
    }
}

impl Poly<Rational> {
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.eval_with(z, |c| Complex64::new(rat_to_f64(c), 0.0))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_with(x, rat_to_f64)
    }

    pub fn eval_rat(&self, x: &Rational) -> Rational {
        let mut acc = <Rational as Zero>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn bits(&self) -> u64 {
        self.coeffs.iter().map(rat_bits).sum()
    }

    /// Squarefree decomposition (Yun): returns (factor, multiplicity)
    /// with monic, pairwise coprime, squarefree factors.
    pub fn squarefree(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1u32;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Canonical text in `z`, e.g. `3/2*z^2 - z + 1`.
    pub fn to_z_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if mono.is_empty() {
                s.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{}", fmt_rational(&a), mono));
            }
        }
        s
    }
}

pub type ZPoly = Poly<Rational>;

/// Rational function in `z` with rational coefficients, kept reduced:
/// numerator and denominator coprime, denominator monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun {
    num: ZPoly,
    den: ZPoly,
}

impl RatFun {
    /// Returns `None` if the denominator is zero.
    pub fn new(num: ZPoly, den: ZPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::from_rational(<Rational as Zero>::zero()));
        }
        let g = num.gcd(&den);
        let n = num.div_rem(&g).0;
        let d = den.div_rem(&g).0;
        let l = d.lead().unwrap().clone();
        Some(RatFun {
            num: n.scale(&(<Rational as One>::one() / &l)),
            den: d.monic(),
        })
    }

    pub fn from_rational(c: Rational) -> Self {
        RatFun {
            num: Poly::constant(c),
            den: Poly::constant(<Rational as One>::one()),
        }
    }

    pub fn from_poly(p: ZPoly) -> Self {
        RatFun {
            num: p,
            den: Poly::constant(<Rational as One>::one()),
        }
    }

    pub fn num(&self) -> &ZPoly {
        &self.num
    }

    pub fn den(&self) -> &ZPoly {
        &self.den
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_minus_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c == -<Rational as One>::one())
    }

    /// Sign of the leading numerator coefficient.
    pub fn is_negative(&self) -> bool {
        self.num.lead().is_some_and(|c| c.is_negative())
    }

    pub fn bits(&self) -> u64 {
        self.num.bits() + self.den.bits()
    }

    pub fn z_degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Evaluates at a complex point; `None` at a pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let d = self.den.eval_c(z);
        if d == Complex64::new(0.0, 0.0) {
            return None;
        }
        let v = self.num.eval_c(z) / d;
        v.is_finite().then_some(v)
    }

    pub fn pow(&self, e: u64) -> Self {
        RatFun {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Canonical brace-free text, e.g. `(z^2 + 1)/(z - 2)`.
    pub fn to_text(&self) -> String {
        let n = self.num.to_z_string();
        if self.den.is_constant() {
            return n;
        }
        format!("({})/({})", n, self.den.to_z_string())
    }
}

impl RatFun {
    pub fn zero() -> Self {
        Self::from_rational(<Rational as Zero>::zero())
    }
    pub fn one() -> Self {
        Self::from_rational(<Rational as One>::one())
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .unwrap()
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }
    pub fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    pub fn div(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num)).expect("division by zero")
    }
}

impl Field for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn one() -> Self {
        RatFun::one()
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFun::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFun::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFun::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatFun::neg(self)
    }
    fn div(&self, o: &Self) -> Self {
        RatFun::div(self, o)
    }
}

/// Complex number with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
}

impl ExactComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ExactComplex {
            re,
            im: <Rational as Zero>::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        ExactComplex::new(rat_int(re), rat_int(im))
    }

    pub fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }

    pub fn neg(&self) -> Self {
        ExactComplex::new(-&self.re, -&self.im)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Shift-literal text with explicit leading sign, e.g. `+1`, `-1/2`,
    /// `+2+i`, `-3/2*i`.
    pub fn to_signed_text(&self) -> String {
        let imag = |v: &Rational| {
            if v.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rational(v))
            }
        };
        let sign = |neg: bool| if neg { '-' } else { '+' };
        let mut s = String::new();
        if !Zero::is_zero(&self.re) {
            s.push(sign(self.re.is_negative()));
            s.push_str(&fmt_rational(&self.re.abs()));
            if !Zero::is_zero(&self.im) {
                s.push(sign(self.im.is_negative()));
                s.push_str(&imag(&self.im.abs()));
            }
        } else {
            s.push(sign(self.im.is_negative()));
            s.push_str(&imag(&self.im.abs()));
        }
        s
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let s = self.to_signed_text();
        write!(f, "{}", s.strip_prefix('+').unwrap_or(&s))
    }
}

impl Serialize for ExactComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_exact_complex(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses `2`, `-1/2`, `0.5`, `2+i`, `1-3/2*i`, `i`, `-2*i`.
pub fn parse_exact_complex(s: &str) -> Result<ExactComplex, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    // split at a sign that is not the first character
    let bytes = t.as_bytes();
    let mut split = None;
    for (k, b) in bytes.iter().enumerate().skip(1) {
        if *b == b'+' || *b == b'-' {
            split = Some(k);
        }
    }
    let part = |p: &str| -> Result<(Rational, bool), String> {
        let (neg, body) = match p.as_bytes().first() {
            Some(b'-') => (true, &p[1..]),
            Some(b'+') => (false, &p[1..]),
            _ => (false, p),
        };
        let (num, is_im) = if body == "i" {
            ("1", true)
        } else if let Some(n) = body.strip_suffix("*i") {
            (n, true)
        } else {
            (body, false)
        };
        let v = parse_rational_literal(num)?;
        Ok((if neg { -v } else { v }, is_im))
    };
    let parts: Vec<&str> = match split {
        Some(k) => vec![&t[..k], &t[k..]],
        None => vec![&t[..]],
    };
    let mut re = <Rational as Zero>::zero();
    let mut im = <Rational as Zero>::zero();
    let mut seen = (false, false);
    for p in parts {
        let (v, is_im) = part(p)?;
        if is_im {
            if seen.1 {
                return Err(format!("bad complex literal `{s}`"));
            }
            seen.1 = true;
            im = v;
        } else {
            if seen.0 || seen.1 {
                return Err(format!("bad complex literal `{s}`"));
            }
            seen.0 = true;
            re = v;
        }
    }
    Ok(ExactComplex::new(re, im))
}

/// Parses an unsigned `12`, `3/4` or `0.25` literal exactly.
pub fn parse_rational_literal(s: &str) -> Result<Rational, String> {
    let bad = || format!("bad number `{s}`");
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n).ok_or_else(bad)?;
        let d = parse_decimal(d).ok_or_else(bad)?;
        if Zero::is_zero(&d) {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(bad)
}

pub fn parse_decimal(s: &str) -> Option<Rational> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
        return None;
    }
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> ZPoly {
        Poly::from_coeffs(c.iter().map(|&x| rat_int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = zp(&[-1, 0, 1]);
        let b = zp(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, zp(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&zp(&[-1, 1])), zp(&[-1, 1]));
        assert_eq!(zp(&[1, 0, 1]).gcd(&zp(&[1, 1])), zp(&[1]));
    }

    #[test]
    fn squarefree_parts() {
        // (z-1)^2 (z+2)
        let p = zp(&[-1, 1]).pow(2).mul(&zp(&[2, 1]));
        let sf = p.squarefree();
        assert_eq!(sf, vec![(zp(&[2, 1]), 1), (zp(&[-1, 1]), 2)]);
    }

    #[test]
    fn ratfun_reduces() {
        let f = RatFun::new(zp(&[-2, 0, 2]), zp(&[2, 2])).unwrap();
        assert_eq!(f.num(), &zp(&[-1, 1]));
        assert!(f.den().is_constant());
        let g = RatFun::new(zp(&[1]), zp(&[2, 2])).unwrap();
        assert_eq!(g.num(), &Poly::constant(rat(1, 2)));
        assert_eq!(g.to_text(), "(1/2)/(z + 1)");
        assert!(RatFun::new(zp(&[1]), Poly::zero()).is_none());
    }

    #[test]
    fn complex_literals() {
        for s in ["1", "-1/2", "2+i", "2-3/2*i", "i", "-i", "0.5"] {
            let c = parse_exact_complex(s).unwrap();
            assert_eq!(parse_exact_complex(&c.to_string()).unwrap(), c);
        }
        assert_eq!(parse_exact_complex("0.5").unwrap(), ExactComplex::real(rat(1, 2)));
        assert_eq!(ExactComplex::from_ints(2, -1).to_signed_text(), "+2-i");
        assert!(parse_exact_complex("i+i").is_err());
    }

    #[test]
    fn z_text() {
        assert_eq!(zp(&[1, -1, 3]).to_z_string(), "3*z^2 - z + 1");
        assert_eq!(zp(&[0, 0, -1]).to_z_string(), "-z^2");
    }
}
