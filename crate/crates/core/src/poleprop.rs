//! Pole-order propagation along z0 + n for the benchmark equation with a
//! cubic polynomial right side, and the exponential growth it forces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clunie::DegreeProfile;
use crate::exact::{fmt_rational, rat, rat_to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoleError {
    #[error("ceiling sequence overflows u64 at step {0}")]
    Overflow(usize),
    #[error("k0 must be at least 1")]
    BadStart,
    #[error("the exclusion flag is only defined for the benchmark polynomial")]
    WrongBenchmark,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleChain {
    pub k0: u64,
    /// Offset of each point along the progression z0 + n.
    pub positions: Vec<u64>,
    #[serde(with = "rational_strings")]
    pub bounds: Vec<Rational>,
    pub ceilings: Vec<u64>,
    pub experimental: bool,
}

mod rational_strings {
    use crate::exact::{fmt_rational, parse_rational_literal, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational_literal(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

fn ceil_rat(r: &Rational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

fn run(k0: u64, steps: usize, ratio: &Rational, start: u64) -> Result<PoleChain, PoleError> {
    if k0 == 0 {
        return Err(PoleError::BadStart);
    }
    let mut bounds = vec![Rational::from_integer(BigInt::from(k0))];
    let mut ceilings = vec![k0];
    for n in 1..=steps {
        bounds.push(&bounds[n - 1] * ratio);
        let next = ceil_rat(&(ratio * Rational::from_integer(BigInt::from(ceilings[n - 1]))));
        ceilings.push(next.to_u64().ok_or(PoleError::Overflow(n))?);
    }
    Ok(PoleChain {
        k0,
        positions: (start..=start + steps as u64).collect(),
        bounds,
        ceilings,
        experimental: false,
    })
}

/// Bounds (3/2)^n·k0 and ceilings c_{n+1} = ⌈3c_n/2⌉.
pub fn chain(k0: u64, steps: usize) -> Result<PoleChain, PoleError> {
    run(k0, steps, &rat(3, 2), 0)
}

/// Step ratio q/2 for a right side of degree q. Only q = 3 is backed by
/// a proof; other values are exploratory.
pub fn chain_with_degree(k0: u64, steps: usize, q: u64) -> Result<PoleChain, PoleError> {
    let mut c = run(k0, steps, &rat(q as i64, 2), 0)?;
    c.experimental = q != 3;
    Ok(c)
}

/// Chains over 0..=steps skipping blacklisted offsets; each maximal run
/// of allowed offsets is a separate chain re-anchored at k0.
pub fn chain_avoiding(k0: u64, steps: usize, blacklist: &[u64]) -> Result<Vec<PoleChain>, PoleError> {
    let mut out = Vec::new();
    let mut start: Option<u64> = None;
    for n in 0..=steps as u64 + 1 {
        let allowed = n <= steps as u64 && !blacklist.contains(&n);
        match (allowed, start) {
            (true, None) => start = Some(n),
            (false, Some(s)) => {
                out.push(run(k0, (n - 1 - s) as usize, &rat(3, 2), s)?);
                start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    /// Base of the exponential.
    pub base: f64,
    /// Multiplier: N(r) ≥ factor·base^r on the progression.
    pub factor: f64,
}

/// Poles of order ≥ bounds[j] at points of modulus ≤ r0 + j give
/// N(r) ≥ Σ_j bounds[j]·log(r/(r0+j)); the factor is the minimum of that
/// sum over base^r at r = r0 + m + 1.
pub fn cumulative_lower_bounds(chain: &PoleChain, r0: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for m in 0..chain.bounds.len() {
        let r = r0 + chain.positions[m] as f64 + 1.0;
        let n: f64 = (0..=m)
            .map(|j| rat_to_f64(&chain.bounds[j]) * (r / (r0 + chain.positions[j] as f64)).ln())
            .sum();
        out.push((r, n));
    }
    out
}

pub fn growth_lower_bound(chain: &PoleChain) -> GrowthBound {
    let base: f64 = 1.5;
    let factor = cumulative_lower_bounds(chain, 1.0)
        .into_iter()
        .map(|(r, n)| n / base.powf(r))
        .fold(f64::INFINITY, f64::min);
    GrowthBound { base, factor }
}

/// True iff the profile is the benchmark with a cubic polynomial right
/// side (deg_U = 0, deg_Q = 3).
pub fn exclusion_flag(p: &DegreeProfile) -> Result<bool, PoleError> {
    if !p.is_benchmark {
        return Err(PoleError::WrongBenchmark);
    }
    Ok(p.deg_u == 0 && p.deg_q == 3)
}

/// CSV rows: n, bound, ceiling, cumulative N lower bound.
pub fn render_chain_csv(chain: &PoleChain) -> String {
    let mut s = String::from("n,bound,ceiling,n_lower\n");
    for (k, (_, n)) in cumulative_lower_bounds(chain, 1.0).into_iter().enumerate() {
        s.push_str(&format!(
            "{},{},{},{:.12e}\n",
            chain.positions[k],
            fmt_rational(&chain.bounds[k]),
            chain.ceilings[k],
            n
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clunie::{DegreeProfile, PStats};
    use crate::diffpoly::DiffPolynomial;

    #[test]
    fn bounds_and_ceilings() {
        let c = chain(1, 7).unwrap();
        assert_eq!(c.ceilings, vec![1, 2, 3, 5, 8, 12, 18, 27]);
        assert_eq!(c.bounds[3], rat(27, 8));
        let c2 = chain(2, 7).unwrap();
        for (a, b) in c.bounds.iter().zip(&c2.bounds) {
            assert_eq!(a * rat(2, 1), *b);
        }
        assert!(matches!(chain(1, 200), Err(PoleError::Overflow(_))));
        assert_eq!(chain(0, 3), Err(PoleError::BadStart));
    }

    #[test]
    fn growth_factor_scales() {
        let g1 = growth_lower_bound(&chain(1, 20).unwrap());
        let g2 = growth_lower_bound(&chain(2, 20).unwrap());
        assert!(g1.factor > 0.0);
        assert!((g2.factor / g1.factor - 2.0).abs() < 1e-12);
        let g0 = growth_lower_bound(&chain(1, 0).unwrap());
        assert!((g0.factor - 2f64.ln() / 1.5f64.powi(2)).abs() < 1e-15);
        let c = chain(1, 20).unwrap();
        for (r, n) in cumulative_lower_bounds(&c, 1.0) {
            assert!(n >= g1.factor * 1.5f64.powf(r) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn blacklist_segments() {
        let segs = chain_avoiding(1, 10, &[3, 4, 8]).unwrap();
        let pos: Vec<Vec<u64>> = segs.iter().map(|c| c.positions.clone()).collect();
        assert_eq!(pos, vec![vec![0, 1, 2], vec![5, 6, 7], vec![9, 10]]);
        assert!(segs.iter().all(|c| c.ceilings[0] == 1));
    }

    #[test]
    fn flag() {
        let stats = PStats::of(&DiffPolynomial::benchmark()).unwrap();
        let p = |u, q, o| DegreeProfile::from_degrees(&stats, u, q, o);
        assert_eq!(exclusion_flag(&p(0, 3, 0)), Ok(true));
        assert_eq!(exclusion_flag(&p(0, 2, 0)), Ok(false));
        assert_eq!(exclusion_flag(&p(1, 3, 0)), Ok(false));
        let mut other = p(0, 3, 0);
        other.is_benchmark = false;
        assert_eq!(exclusion_flag(&other), Err(PoleError::WrongBenchmark));
    }

    #[test]
    fn experimental_ratio() {
        let c = chain_with_degree(1, 3, 4).unwrap();
        assert!(c.experimental);
        assert_eq!(c.ceilings, vec![1, 2, 4, 8]);
        assert!(!chain_with_degree(1, 3, 3).unwrap().experimental);
    }
}
