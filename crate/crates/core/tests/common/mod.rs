//! Generators shared by the integration suites.
#![allow(dead_code)]

use diffnev::exact::{rat_int, ExactComplex};
use diffnev::model::{MeromorphicModel, RationalModel};
use diffnev::{ClunieEquation, Coefficient, DiffPolynomial, MultiIndex, Term};
use rand::seq::SliceRandom;
use rand::Rng;

const SHIFTS: [&str; 6] = ["z+1", "z-1", "z+2", "z+i", "z-1/2", "z+1-2*i"];

/// Sign and magnitude of a random nonzero coefficient.
fn coeff_text<R: Rng>(rng: &mut R) -> (bool, String) {
    let n: i64 = *[-3, -2, -1, 1, 1, 1, 2, 5].choose(rng).unwrap();
    let mag = if rng.gen_bool(0.15) {
        format!("{}/{}", n.abs(), rng.gen_range(2..5))
    } else {
        n.abs().to_string()
    };
    (n < 0, mag)
}

fn monomial(c: &str, factors: &[(String, u64)]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, e) in factors {
        if *e == 1 {
            parts.push(v.clone());
        } else if *e > 1 {
            parts.push(format!("{v}^{e}"));
        }
    }
    if c != "1" || parts.is_empty() {
        parts.insert(0, format!("{{{c}}}"));
    }
    parts.join("*")
}

fn join_signed(terms: Vec<(bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, t)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push_str(&format!("-{t}")),
            (0, false) => out.push_str(&t),
            (_, true) => out.push_str(&format!(" - {t}")),
            (_, false) => out.push_str(&format!(" + {t}")),
        }
    }
    out
}

fn w_only_text<R: Rng>(rng: &mut R, max_deg: u64) -> String {
    let deg = rng.gen_range(0..=max_deg);
    let mut terms = Vec::new();
    for k in (0..=deg).rev() {
        if k == deg || rng.gen_bool(0.5) {
            let (neg, c) = coeff_text(rng);
            terms.push((neg, monomial(&c, &[("w".to_string(), k)])));
        }
    }
    join_signed(terms)
}

/// Random equation text in the `P = (Q)/(U)` or `P = Q` form.
pub fn random_equation_text<R: Rng>(rng: &mut R) -> String {
    let k = rng.gen_range(1..=3);
    let shifts: Vec<&str> = SHIFTS.choose_multiple(rng, k).copied().collect();
    let vars: Vec<String> = std::iter::once("w".to_string())
        .chain(shifts.iter().map(|s| format!("w({s})")))
        .collect();
    let n_terms = rng.gen_range(1..=4);
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::new();
    while terms.len() < n_terms {
        let exps: Vec<u64> = (0..vars.len()).map(|_| rng.gen_range(0..=2)).collect();
        if exps.iter().sum::<u64>() == 0 || !seen.insert(exps.clone()) {
            continue;
        }
        let factors: Vec<(String, u64)> = vars.iter().cloned().zip(exps).collect();
        let (neg, c) = coeff_text(rng);
        terms.push((neg, monomial(&c, &factors)));
    }
    let p = join_signed(terms);
    let q = w_only_text(rng, 3);
    if rng.gen_bool(0.3) {
        format!("{p} = {q}")
    } else {
        format!("{p} = ({q})/({})", w_only_text(rng, 3))
    }
}

/// Random homogeneous P over shifts 1, −1, 2 with ord0 = 0 and λ̂_0 < deg.
pub fn random_homogeneous_p<R: Rng>(rng: &mut R) -> DiffPolynomial {
    let shifts = vec![ExactComplex::from_ints(1, 0), ExactComplex::from_ints(-1, 0), ExactComplex::from_ints(2, 0)];
    loop {
        let d: u64 = rng.gen_range(2..=4);
        let n_terms = rng.gen_range(1..=4);
        let mut terms = Vec::new();
        for t in 0..n_terms {
            let l0 = if t == 0 { 0 } else { rng.gen_range(0..d) };
            let mut rest = vec![0u64; 3];
            for _ in 0..(d - l0) {
                rest[rng.gen_range(0..3)] += 1;
            }
            let mut e = vec![l0];
            e.extend(rest);
            terms.push(Term {
                coeff: Coefficient::int(rng.gen_range(1..6)),
                index: MultiIndex(e),
            });
        }
        if let Ok(p) = DiffPolynomial::new(shifts.clone(), terms).and_then(|p| p.normalize()) {
            if !p.is_empty() {
                return p;
            }
        }
    }
}

/// Σ_{k=lo}^{hi} w^k.
pub fn w_range(lo: u64, hi: u64) -> DiffPolynomial {
    DiffPolynomial::w_only((lo..=hi).map(|k| (Coefficient::int(1), k)).collect()).unwrap()
}

pub fn equation(u: DiffPolynomial, p: DiffPolynomial, q: DiffPolynomial) -> ClunieEquation {
    ClunieEquation::new(u, p, q).unwrap()
}

/// Random rational with numerator degree `deg` and denominator degree
/// `deg − 1`, small integer coefficients.
pub fn random_rational<R: Rng>(rng: &mut R, deg: usize) -> MeromorphicModel {
    loop {
        let mut poly = |d: usize| {
            let mut c: Vec<_> = (0..d).map(|_| rat_int(rng.gen_range(-3..=3))).collect();
            c.push(rat_int(*[-2, -1, 1, 2].choose(rng).unwrap()));
            diffnev::exact::Poly::from_coeffs(c)
        };
        let (n, d) = (poly(deg), poly(deg - 1));
        if let Ok(m) = RationalModel::from_polys(n, d) {
            if m.degree() == deg {
                return MeromorphicModel::Rational(m);
            }
        }
    }
}

/// 1 when k = 0, else 1 + w^k.
pub fn one_plus_w_pow(k: u64) -> DiffPolynomial {
    let mut terms = vec![(Coefficient::int(1), 0)];
    if k > 0 {
        terms.push((Coefficient::int(1), k));
    }
    DiffPolynomial::w_only(terms).unwrap()
}
