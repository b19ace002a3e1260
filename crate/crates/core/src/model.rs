//! Concrete meromorphic models with exact divisors.
//!
//! Each model evaluates log|f(z)| stably and exposes its zeros and poles
//! as point lists or as rings {R·ω^j + s}, so counting functions have
//! closed forms.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eqparse::parse_ratfun;
use crate::exact::{parse_exact_complex, rat_to_f64, Poly, RatFun, Rational, ZPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("root isolation failed for a degree-{degree} factor")]
    RootIsolationFailure { degree: usize },
    #[error("example product overflows at level {level}: n_k exceeds {cap}")]
    Overflow { level: usize, cap: u64 },
    #[error("invalid product levels: {0}")]
    BadLevels(String),
    #[error("divisor too large to enumerate ({0} points)")]
    TooManyPoints(u64),
    #[error("cannot parse model spec `{spec}`: {msg}")]
    Spec { spec: String, msg: String },
}

/// Zeros (positive multiplicity) and poles (negative).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub points: Vec<(Complex64, i64)>,
}

/// Part of a divisor: explicit points, or the n points R·e^{2πij/n} + offset.
#[derive(Debug, Clone, PartialEq)]
pub enum DivisorPart {
    Points(Vec<(Complex64, i64)>),
    Ring {
        radius: f64,
        n: u64,
        offset: Complex64,
        mult: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Counting {
    Poles,
    Zeros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalModel {
    pub value: RatFun,
    log_lead: f64,
    zeros: Vec<(Complex64, i64)>,
    poles: Vec<(Complex64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductLevel {
    pub radius: f64,
    pub n: u64,
}

/// Π_k (1 − (z/r_k)^{n_k}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductModel {
    pub levels: Vec<ProductLevel>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeromorphicModel {
    Rational(RationalModel),
    CanonicalProduct(ProductModel),
    /// e^{p(z)}, coefficients ascending.
    ExpPoly(Vec<Complex64>),
    /// e^{e^z}
    ExpExp,
    Shifted { base: Box<MeromorphicModel>, c: Complex64 },
    Power { base: Box<MeromorphicModel>, k: i32 },
    Quotient { num: Box<MeromorphicModel>, den: Box<MeromorphicModel> },
}

// ------------------------------------------------------------ roots

fn to_c(p: &ZPoly) -> Vec<Complex64> {
    p.coeffs().iter().map(|c| Complex64::new(rat_to_f64(c), 0.0)).collect()
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        d = d * z + p;
        p = p * z + a;
    }
    (p, d)
}

/// Simultaneous Aberth iteration on a squarefree polynomial.
fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = c[n].norm();
    let bound = 1.0 + c[..n].iter().map(|a| a.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, d) = horner(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                return None;
            }
            z[k] -= w;
            worst = worst.max(w.norm() / (1.0 + z[k].norm()));
        }
        if worst < 1e-15 {
            return Some(z);
        }
    }
    // accept if every residual is at rounding level
    let ok = z.iter().all(|&x| {
        let (p, _) = horner(c, x);
        let scale: f64 = c.iter().enumerate().map(|(i, a)| a.norm() * x.norm().powi(i as i32)).sum();
        p.norm() <= 1e-10 * scale
    });
    ok.then_some(z)
}

/// Roots of a polynomial with multiplicities, via squarefree factorization.
pub fn poly_roots(p: &ZPoly) -> Result<Vec<(Complex64, i64)>, ModelError> {
    let mut out = Vec::new();
    for (f, m) in p.squarefree() {
        let deg = f.degree().unwrap_or(0);
        let roots = aberth(&to_c(&f)).ok_or(ModelError::RootIsolationFailure { degree: deg })?;
        out.extend(roots.into_iter().map(|z| (z, m as i64)));
    }
    Ok(out)
}

impl RationalModel {
    pub fn new(value: RatFun) -> Result<Self, ModelError> {
        let lead = |p: &ZPoly| p.lead().map(rat_to_f64).unwrap_or(0.0);
        let log_lead = (lead(value.num()) / lead(value.den())).abs().ln();
        Ok(RationalModel {
            zeros: poly_roots(value.num())?,
            poles: poly_roots(value.den())?,
            log_lead,
            value,
        })
    }

    pub fn from_polys(num: ZPoly, den: ZPoly) -> Result<Self, ModelError> {
        let v = RatFun::new(num, den).ok_or_else(|| ModelError::Spec {
            spec: "rational".into(),
            msg: "zero denominator".into(),
        })?;
        Self::new(v)
    }

    /// max(deg num, deg den).
    pub fn degree(&self) -> usize {
        self.value.num().degree().unwrap_or(0).max(self.value.den().degree().unwrap_or(0))
    }

    /// R(f) for a rational R with constant coefficients, given by the
    /// coefficient lists of its numerator and denominator in w.
    pub fn compose(outer_num: &[Rational], outer_den: &[Rational], inner: &RatFun) -> Result<Self, ModelError> {
        let d = outer_num.len().max(outer_den.len()).saturating_sub(1) as u64;
        let (p, q) = (inner.num(), inner.den());
        let homog = |cs: &[Rational]| {
            let mut acc = ZPoly::zero();
            for (i, a) in cs.iter().enumerate() {
                let t = p.pow(i as u64).mul(&q.pow(d - i as u64)).scale(a);
                acc = acc.add(&t);
            }
            acc
        };
        Self::from_polys(homog(outer_num), homog(outer_den))
    }

    fn log_abs(&self, z: Complex64) -> f64 {
        let sum = |pts: &[(Complex64, i64)]| -> f64 { pts.iter().map(|(p, m)| *m as f64 * (z - p).norm().ln()).sum() };
        self.log_lead + sum(&self.zeros) - sum(&self.poles)
    }
}

impl ProductModel {
    /// Levels must satisfy r_1 > 6 and r_{k+1} ≥ 2 r_k.
    pub fn new(levels: Vec<ProductLevel>) -> Result<Self, ModelError> {
        if levels.is_empty() {
            return Err(ModelError::BadLevels("no levels".into()));
        }
        if levels[0].radius <= 6.0 {
            return Err(ModelError::BadLevels("r_1 must exceed 6".into()));
        }
        if levels.windows(2).any(|w| w[1].radius < 2.0 * w[0].radius) {
            return Err(ModelError::BadLevels("need r_{k+1} ≥ 2 r_k".into()));
        }
        if levels.iter().any(|l| l.n == 0) {
            return Err(ModelError::BadLevels("n_k must be positive".into()));
        }
        Ok(ProductModel { levels })
    }

    /// log|1 − (z/R)^n| with the large-|z| branch n·log|z/R| + log|1 − (R/z)^n|.
    fn level_log_abs(z: Complex64, radius: f64, n: u64) -> f64 {
        let nf = n as f64;
        let lr = z.norm().ln() - radius.ln();
        let arg = z.arg();
        if lr <= 0.0 {
            let u = Complex64::from_polar((nf * lr).exp(), (nf * arg).rem_euclid(2.0 * PI));
            (1.0 - u).norm().ln()
        } else {
            let v = Complex64::from_polar((-nf * lr).exp(), (-nf * arg).rem_euclid(2.0 * PI));
            nf * lr + (1.0 - v).norm().ln()
        }
    }

    fn log_abs(&self, z: Complex64) -> f64 {
        self.levels.iter().map(|l| Self::level_log_abs(z, l.radius, l.n)).sum()
    }

    /// Σ (r / r_k)^{n_k} over levels with r_k > r: bound for dropping them.
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.levels
            .iter()
            .filter(|l| l.radius > r)
            .map(|l| (r / l.radius).powf(l.n as f64))
            .sum()
    }

    /// Keeps levels with r_k ≤ 4·horizon; returns the model and the tail bound.
    pub fn truncate(&self, horizon: f64) -> (ProductModel, f64) {
        let keep: Vec<ProductLevel> = self.levels.iter().filter(|l| l.radius <= 4.0 * horizon).cloned().collect();
        let dropped = ProductModel {
            levels: self.levels.iter().filter(|l| l.radius > 4.0 * horizon).cloned().collect(),
        };
        (ProductModel { levels: keep }, dropped.tail_bound(horizon))
    }
}

// ----------------------------------------------------------- models

impl MeromorphicModel {
    pub fn rational_text(text: &str) -> Result<Self, ModelError> {
        let v = parse_ratfun(text).map_err(|e| ModelError::Spec {
            spec: text.into(),
            msg: e.to_string(),
        })?;
        Ok(MeromorphicModel::Rational(RationalModel::new(v)?))
    }

    pub fn exp_z() -> Self {
        MeromorphicModel::ExpPoly(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn shifted(self, c: Complex64) -> Self {
        MeromorphicModel::Shifted { base: Box::new(self), c }
    }

    /// log|f(z)|; −∞ at zeros, +∞ at poles.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            MeromorphicModel::Rational(m) => m.log_abs(z),
            MeromorphicModel::CanonicalProduct(p) => p.log_abs(z),
            MeromorphicModel::ExpPoly(c) => horner(c, z).0.re,
            MeromorphicModel::ExpExp => z.re.exp() * z.im.cos(),
            MeromorphicModel::Shifted { base, c } => base.log_abs(z + c),
            MeromorphicModel::Power { base, k } => *k as f64 * base.log_abs(z),
            MeromorphicModel::Quotient { num, den } => num.log_abs(z) - den.log_abs(z),
        }
    }

    /// Divisor as points and rings.
    pub fn divisor_parts(&self) -> Vec<DivisorPart> {
        match self {
            MeromorphicModel::Rational(m) => {
                let mut pts = m.zeros.clone();
                pts.extend(m.poles.iter().map(|(p, k)| (*p, -k)));
                vec![DivisorPart::Points(pts)]
            }
            MeromorphicModel::CanonicalProduct(p) => p
                .levels
                .iter()
                .map(|l| DivisorPart::Ring {
                    radius: l.radius,
                    n: l.n,
                    offset: Complex64::new(0.0, 0.0),
                    mult: 1,
                })
                .collect(),
            MeromorphicModel::ExpPoly(_) | MeromorphicModel::ExpExp => Vec::new(),
            MeromorphicModel::Shifted { base, c } => base
                .divisor_parts()
                .into_iter()
                .map(|part| match part {
                    DivisorPart::Points(v) => DivisorPart::Points(v.into_iter().map(|(p, m)| (p - c, m)).collect()),
                    DivisorPart::Ring { radius, n, offset, mult } => DivisorPart::Ring {
                        radius,
                        n,
                        offset: offset - c,
                        mult,
                    },
                })
                .collect(),
            MeromorphicModel::Power { base, k } => scale_parts(base.divisor_parts(), *k as i64),
            MeromorphicModel::Quotient { num, den } => {
                let mut v = num.divisor_parts();
                v.extend(scale_parts(den.divisor_parts(), -1));
                v
            }
        }
    }

    /// All divisor points with |z| ≤ radius.
    pub fn zeros_poles(&self, radius: f64) -> Result<Divisor, ModelError> {
        let mut pts: Vec<(Complex64, i64)> = Vec::new();
        for part in self.divisor_parts() {
            match part {
                DivisorPart::Points(v) => pts.extend(v.into_iter().filter(|(p, _)| p.norm() <= radius)),
                DivisorPart::Ring { radius: big_r, n, offset, mult } => {
                    if big_r - offset.norm() > radius {
                        continue;
                    }
                    if n > 10_000_000 {
                        return Err(ModelError::TooManyPoints(n));
                    }
                    pts.extend(
                        ring_points(big_r, n, offset)
                            .filter(|p| p.norm() <= radius)
                            .map(|p| (p, mult)),
                    );
                }
            }
        }
        Ok(Divisor { points: merge_points(pts) })
    }

    /// N(r) from the divisor in closed form:
    /// Σ_{0<|a|≤r} m log(r/|a|) + n(0) log r.
    pub fn counting(&self, r: f64, kind: Counting) -> f64 {
        let want = |m: i64| match kind {
            Counting::Zeros => m.max(0) as f64,
            Counting::Poles => (-m).max(0) as f64,
        };
        let lr = r.ln();
        let point = |p: Complex64, m: f64| -> f64 {
            let a = p.norm();
            if a > r {
                0.0
            } else if a < 1e-300 {
                m * lr
            } else {
                m * (lr - a.ln())
            }
        };
        let mut total = 0.0;
        for part in self.divisor_parts() {
            match part {
                DivisorPart::Points(v) => {
                    total += v.iter().map(|(p, m)| point(*p, want(*m))).sum::<f64>();
                }
                DivisorPart::Ring { radius, n, offset, mult } => {
                    let m = want(mult);
                    if m == 0.0 {
                        continue;
                    }
                    let s = offset.norm();
                    if radius - s > r {
                        continue;
                    }
                    if radius + s <= r && s < radius {
                        // |Π_j (R ω^j + s)| = R^n |1 − (−s/R)^n|
                        let nf = n as f64;
                        let q = -offset / radius;
                        let u = Complex64::from_polar((nf * q.norm().ln()).exp(), (nf * q.arg()).rem_euclid(2.0 * PI));
                        total += m * (nf * lr - nf * radius.ln() - (1.0 - u).norm().ln());
                    } else {
                        total += ring_points(radius, n, offset).map(|p| point(p, m)).sum::<f64>();
                    }
                }
            }
        }
        total
    }

    /// Divisor points within `band` of the circle |z| = r, as arguments.
    pub fn near_circle_args(&self, r: f64, band: f64, cap: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for part in self.divisor_parts() {
            match part {
                DivisorPart::Points(v) => {
                    out.extend(v.iter().filter(|(p, _)| (p.norm() - r).abs() <= band).map(|(p, _)| p.arg()));
                }
                DivisorPart::Ring { radius, n, offset, .. } => {
                    // the factor is smooth unless |z + offset| is within ~30R/n of R
                    let width = band.min(30.0 * radius / n as f64);
                    let s = offset.norm();
                    if radius + s < r - width || radius - s > r + width {
                        continue;
                    }
                    out.extend(
                        ring_points(radius, n, offset)
                            .filter(|p| (p.norm() - r).abs() <= width)
                            .map(|p| p.arg()),
                    );
                }
            }
            if out.len() > cap {
                out.truncate(cap);
                break;
            }
        }
        out.into_iter().map(|a| a.rem_euclid(2.0 * PI)).collect()
    }

    /// Poles within `tol` of the circle |z| = r.
    pub fn pole_on_circle(&self, r: f64, tol: f64) -> bool {
        self.divisor_parts().into_iter().any(|part| match part {
            DivisorPart::Points(v) => v.iter().any(|(p, m)| *m < 0 && (p.norm() - r).abs() <= tol),
            DivisorPart::Ring { radius, n, offset, mult } => {
                mult < 0 && {
                    let s = offset.norm();
                    radius - s <= r + tol
                        && radius + s >= r - tol
                        && ring_points(radius, n.min(10_000_000), offset).any(|p| (p.norm() - r).abs() <= tol)
                }
            }
        })
    }

    /// True when f has no poles.
    pub fn is_entire(&self) -> bool {
        self.divisor_parts().iter().all(|p| match p {
            DivisorPart::Points(v) => v.iter().all(|(_, m)| *m > 0),
            DivisorPart::Ring { mult, .. } => *mult > 0,
        })
    }
}

fn scale_parts(parts: Vec<DivisorPart>, k: i64) -> Vec<DivisorPart> {
    parts
        .into_iter()
        .map(|part| match part {
            DivisorPart::Points(v) => DivisorPart::Points(v.into_iter().map(|(p, m)| (p, m * k)).collect()),
            DivisorPart::Ring { radius, n, offset, mult } => DivisorPart::Ring {
                radius,
                n,
                offset,
                mult: mult * k,
            },
        })
        .filter(|part| !matches!(part, DivisorPart::Ring { mult: 0, .. }))
        .collect()
}

fn ring_points(radius: f64, n: u64, offset: Complex64) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64) + offset)
}

fn merge_points(mut pts: Vec<(Complex64, i64)>) -> Vec<(Complex64, i64)> {
    pts.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut out: Vec<(Complex64, i64)> = Vec::new();
    for (p, m) in pts {
        match out.last_mut() {
            Some(last) if (last.0 - p).norm() <= 1e-12 * (1.0 + p.norm()) => last.1 += m,
            _ => out.push((p, m)),
        }
    }
    out.retain(|(_, m)| *m != 0);
    out
}

// --------------------------------------------------- example product

/// Levels r_1 = 8, r_{k+1} = 2 r_k with n_k the least integer exceeding
/// 4 r_k (log r_k)^2 Σ_{j<k} n_j, plus the inequality each level meets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCertificate {
    pub levels: Vec<ProductLevel>,
    /// (k, threshold 4 r_k (log r_k)^2 Σ_{j<k} n_j, n_k)
    pub inequalities: Vec<(usize, f64, u64)>,
}

pub const DEFAULT_N_CAP: u64 = 1 << 40;

pub fn build_example_product(s_max: usize, n1: u64, cap: u64) -> Result<(MeromorphicModel, ProductCertificate), ModelError> {
    if s_max == 0 || n1 == 0 {
        return Err(ModelError::BadLevels("need s_max ≥ 1 and n_1 ≥ 1".into()));
    }
    let mut levels = vec![ProductLevel { radius: 8.0, n: n1 }];
    let mut inequalities = Vec::new();
    let mut sum = n1 as f64;
    for k in 2..=s_max {
        let r = 8.0 * 2f64.powi(k as i32 - 1);
        let threshold = 4.0 * r * r.ln().powi(2) * sum;
        let n = threshold.floor() + 1.0;
        if n > cap as f64 {
            return Err(ModelError::Overflow { level: k, cap });
        }
        let n = n as u64;
        inequalities.push((k, threshold, n));
        levels.push(ProductLevel { radius: r, n });
        sum += n as f64;
    }
    let model = ProductModel::new(levels.clone())?;
    Ok((MeromorphicModel::CanonicalProduct(model), ProductCertificate { levels, inequalities }))
}

// ------------------------------------------------------- mini-language

/// `rational:{num}/{den}`, `product:s=K,n1=N`, `exp:poly`, `expexp`,
/// `shift:C:MODEL`.
pub fn parse_model(spec: &str) -> Result<MeromorphicModel, ModelError> {
    let err = |msg: &str| ModelError::Spec {
        spec: spec.into(),
        msg: msg.into(),
    };
    let s = spec.trim();
    if s == "expexp" {
        return Ok(MeromorphicModel::ExpExp);
    }
    let (head, rest) = s.split_once(':').ok_or_else(|| err("expected kind:arguments"))?;
    match head {
        "rational" => {
            let text = if let Some((n, d)) = split_braced(rest) {
                format!("({n})/({d})")
            } else {
                rest.to_string()
            };
            MeromorphicModel::rational_text(&text)
        }
        "exp" => {
            let v = parse_ratfun(rest.trim_matches(|c| c == '{' || c == '}')).map_err(|e| err(&e.to_string()))?;
            if !v.den().is_constant() {
                return Err(err("exponent must be a polynomial"));
            }
            let scale = rat_to_f64(&v.den().coeff(0));
            Ok(MeromorphicModel::ExpPoly(
                v.num().coeffs().iter().map(|c| Complex64::new(rat_to_f64(c) / scale, 0.0)).collect(),
            ))
        }
        "product" => {
            let mut s_max = None;
            let mut n1 = 1u64;
            for kv in rest.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(|| err("expected key=value"))?;
                let v: u64 = v.trim().parse().map_err(|_| err("expected an integer"))?;
                match k.trim() {
                    "s" => s_max = Some(v as usize),
                    "n1" => n1 = v,
                    _ => return Err(err("unknown product key")),
                }
            }
            let s_max = s_max.ok_or_else(|| err("missing s"))?;
            Ok(build_example_product(s_max, n1, DEFAULT_N_CAP)?.0)
        }
        "shift" => {
            let (c, inner) = rest.split_once(':').ok_or_else(|| err("expected shift:C:MODEL"))?;
            let c = parse_exact_complex(c).map_err(|e| err(&e))?;
            Ok(parse_model(inner)?.shifted(c.to_c64()))
        }
        _ => Err(err("unknown model kind")),
    }
}

fn split_braced(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    let a = s.strip_prefix('{')?;
    let (num, rest) = a.split_once('}')?;
    let rest = rest.trim().strip_prefix('/')?.trim();
    let den = rest.strip_prefix('{')?.strip_suffix('}')?;
    Some((num, den))
}

impl fmt::Display for MeromorphicModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeromorphicModel::Rational(m) => write!(f, "rational:{}", m.value.to_text()),
            MeromorphicModel::CanonicalProduct(p) => {
                let lv: Vec<String> = p.levels.iter().map(|l| format!("({}, {})", l.radius, l.n)).collect();
                write!(f, "product[{}]", lv.join(", "))
            }
            MeromorphicModel::ExpPoly(c) => write!(f, "exp:{c:?}"),
            MeromorphicModel::ExpExp => write!(f, "expexp"),
            MeromorphicModel::Shifted { base, c } => write!(f, "shift:{c}:{base}"),
            MeromorphicModel::Power { base, k } => write!(f, "({base})^{k}"),
            MeromorphicModel::Quotient { num, den } => write!(f, "({num})/({den})"),
        }
    }
}

/// Poly<Rational> from integer coefficients, ascending.
pub fn zpoly(coeffs: &[i64]) -> ZPoly {
    Poly::from_coeffs(coeffs.iter().map(|c| crate::exact::rat_int(*c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rational_divisor() {
        let m = MeromorphicModel::rational_text("1/(z-1)").unwrap();
        let d = m.zeros_poles(2.0).unwrap();
        assert_eq!(d.points.len(), 1);
        assert!((d.points[0].0 - c(1.0, 0.0)).norm() < 1e-14 && d.points[0].1 == -1);
        for r in [1.0, 2.0, 100.0] {
            assert!((m.counting(r, Counting::Poles) - f64::ln(r)).abs() < 1e-14);
        }
        let z2 = MeromorphicModel::rational_text("z^2").unwrap();
        assert!((z2.counting(5.0, Counting::Zeros) - 2.0 * 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn roots_with_multiplicity() {
        // (z-1)^2 (z^2+4)
        let p = zpoly(&[-1, 2, -1]).mul(&zpoly(&[4, 0, 1])).neg();
        let mut r = poly_roots(&p).unwrap();
        r.sort_by(|a, b| a.0.im.total_cmp(&b.0.im));
        assert_eq!(r.iter().map(|x| x.1).sum::<i64>(), 4);
        assert!((r[0].0 - c(0.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn product_divisor_and_counting() {
        let p = MeromorphicModel::CanonicalProduct(ProductModel::new(vec![ProductLevel { radius: 8.0, n: 4 }]).unwrap());
        let d = p.zeros_poles(10.0).unwrap();
        assert_eq!(d.points.len(), 4);
        for z in [c(8.0, 0.0), c(0.0, 8.0), c(-8.0, 0.0), c(0.0, -8.0)] {
            assert!(d.points.iter().any(|(p, m)| (p - z).norm() < 1e-12 && *m == 1));
        }
        assert!((p.counting(16.0, Counting::Zeros) - 4.0 * 2f64.ln()).abs() < 1e-13);
        // shifted ring: closed form vs enumeration
        let q = MeromorphicModel::CanonicalProduct(ProductModel::new(vec![ProductLevel { radius: 8.0, n: 7 }]).unwrap())
            .shifted(c(2.0, 1.0));
        let direct: f64 = q.zeros_poles(40.0).unwrap().points.iter().map(|(p, _)| (40.0 / p.norm()).ln()).sum();
        assert!((q.counting(40.0, Counting::Zeros) - direct).abs() < 1e-12);
    }

    #[test]
    fn product_log_abs_branches() {
        let p = ProductModel::new(vec![ProductLevel { radius: 8.0, n: 5 }]).unwrap();
        for z in [c(3.0, 1.0), c(20.0, -7.0), c(7.9, 0.3)] {
            let direct = (1.0 - (z / 8.0).powu(5)).norm().ln();
            assert!((p.log_abs(z) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn example_product_levels() {
        let (_, cert) = build_example_product(3, 1, DEFAULT_N_CAP).unwrap();
        let ns: Vec<u64> = cert.levels.iter().map(|l| l.n).collect();
        assert_eq!(ns, vec![1, 492, 757963]);
        assert!(ns.windows(2).all(|w| w[1] > w[0]));
        let (_, one) = build_example_product(1, 3, DEFAULT_N_CAP).unwrap();
        assert_eq!(one.levels, vec![ProductLevel { radius: 8.0, n: 3 }]);
        assert!(matches!(build_example_product(5, 1, 1000), Err(ModelError::Overflow { level: 3, .. })));
    }

    #[test]
    fn mini_language() {
        assert!(matches!(parse_model("expexp"), Ok(MeromorphicModel::ExpExp)));
        assert!(matches!(parse_model("rational:{1}/{z-1}"), Ok(MeromorphicModel::Rational(_))));
        assert!(matches!(parse_model("exp:z"), Ok(MeromorphicModel::ExpPoly(_))));
        assert!(matches!(parse_model("product:s=2,n1=1"), Ok(MeromorphicModel::CanonicalProduct(_))));
        assert!(matches!(parse_model("shift:2+i:expexp"), Ok(MeromorphicModel::Shifted { .. })));
        assert!(parse_model("bogus:1").is_err());
        assert!(parse_model("exp:1/z").is_err());
    }

    #[test]
    fn compose_degree() {
        let f = parse_ratfun("(z^2+1)/(z-3)").unwrap();
        let one = crate::exact::rat_int(1);
        let zero = crate::exact::rat_int(0);
        // w^3 / (w + 1)
        let m = RationalModel::compose(&[zero.clone(), zero.clone(), zero, one.clone()], &[one.clone(), one], &f).unwrap();
        assert_eq!(m.degree(), 6);
    }
}
