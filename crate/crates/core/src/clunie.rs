//! Degree profiles, admissibility and value-distribution verdicts for
//! Clunie-type equations, plus the family enumeration for a fixed P.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffpoly::{Coefficient, DiffPolynomial};
use crate::eqparse::ClunieEquation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClunieError {
    #[error("hypotheses violated: {0:?}")]
    HypothesesViolated(Vec<Violation>),
    #[error("equation is not admissible")]
    NotAdmissible,
    #[error("exclusion rules only apply to w(z+1)w(z-1) + w(z+1)w + w w(z-1)")]
    WrongBenchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NotHomogeneous,
    Ord0PNonzero,
    Lambda0NotLess,
    ShiftInU,
    ShiftInQ,
    EmptyPart,
}

/// Degree data of P alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PStats {
    pub deg_p: u64,
    pub kappa_hat: u64,
    pub kappa: u64,
    pub lambda0_hat: u64,
    pub ord0_p: u64,
    pub homogeneous: bool,
    pub is_benchmark: bool,
}

impl PStats {
    pub fn of(p: &DiffPolynomial) -> Option<Self> {
        Some(PStats {
            deg_p: p.total_degree().ok()?,
            kappa_hat: p.weight().ok()?,
            kappa: p.kappa().ok()?,
            lambda0_hat: p.deg0().ok()?,
            ord0_p: p.ord0().ok()?,
            homogeneous: p.is_homogeneous().ok()?,
            is_benchmark: is_benchmark(p),
        })
    }
}

/// True for exactly w(z+1)w(z-1) + w(z+1)w + w w(z-1) with unit coefficients.
pub fn is_benchmark(p: &DiffPolynomial) -> bool {
    *p == DiffPolynomial::benchmark()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub deg_p: u64,
    pub kappa_hat: u64,
    pub kappa: u64,
    pub lambda0_hat: u64,
    pub ord0_p: u64,
    pub deg_u: u64,
    pub deg_q: u64,
    pub ord0_q: u64,
    pub d_w: i64,
    #[serde(rename = "D_w")]
    pub big_d_w: i64,
    pub tau_w: i64,
    /// P is the benchmark polynomial (gates the exclusion rules).
    pub is_benchmark: bool,
}

impl DegreeProfile {
    pub fn from_degrees(p: &PStats, deg_u: u64, deg_q: u64, ord0_q: u64) -> Self {
        let d_w = (deg_q.max(p.deg_p + deg_u) - p.deg_p.min(ord0_q)) as i64;
        let big_d_w = d_w - p.deg_p as i64;
        DegreeProfile {
            deg_p: p.deg_p,
            kappa_hat: p.kappa_hat,
            kappa: p.kappa,
            lambda0_hat: p.lambda0_hat,
            ord0_p: p.ord0_p,
            deg_u,
            deg_q,
            ord0_q,
            d_w,
            big_d_w,
            tau_w: d_w - p.kappa_hat as i64,
            is_benchmark: p.is_benchmark,
        }
    }

    /// The derived fields agree with their definitions.
    pub fn is_consistent(&self) -> bool {
        let d = self.deg_q.max(self.deg_p + self.deg_u) as i64 - self.deg_p.min(self.ord0_q) as i64;
        d == self.d_w
            && self.big_d_w == d - self.deg_p as i64
            && self.tau_w == d - self.kappa_hat as i64
    }
}

pub fn degree_profile(eq: &ClunieEquation) -> DegreeProfile {
    let p = PStats::of(&eq.p).expect("validated equation has non-empty P");
    DegreeProfile::from_degrees(
        &p,
        eq.u.total_degree().unwrap_or(0),
        eq.q.total_degree().unwrap_or(0),
        eq.q.ord0().unwrap_or(0),
    )
}

pub fn check_p(p: &PStats) -> Vec<Violation> {
    let mut v = Vec::new();
    if !p.homogeneous {
        v.push(Violation::NotHomogeneous);
    }
    if p.ord0_p != 0 {
        v.push(Violation::Ord0PNonzero);
    }
    if p.lambda0_hat >= p.deg_p {
        v.push(Violation::Lambda0NotLess);
    }
    v
}

pub fn check_hypotheses(eq: &ClunieEquation) -> Vec<Violation> {
    let mut v = match PStats::of(&eq.p) {
        Some(p) => check_p(&p),
        None => vec![Violation::EmptyPart],
    };
    if !eq.u.is_w_only() {
        v.push(Violation::ShiftInU);
    }
    if !eq.q.is_w_only() {
        v.push(Violation::ShiftInQ);
    }
    if eq.u.is_empty() || eq.q.is_empty() {
        v.push(Violation::EmptyPart);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub kappa_hat: u64,
    /// deg_Q − λ̂_0.
    pub q_excess: i64,
    /// deg_U − min{λ̂_0, ord0_Q}.
    pub u_excess: i64,
    /// max(deg_Q, deg_U) against κ̂ + λ̂_0.
    pub degree_of_rhs: u64,
    pub degree_bound: u64,
    pub degree_bound_holds: bool,
}

pub fn admissibility(p: &DegreeProfile) -> Admissibility {
    let q_excess = p.deg_q as i64 - p.lambda0_hat as i64;
    let u_excess = p.deg_u as i64 - p.lambda0_hat.min(p.ord0_q) as i64;
    let degree_of_rhs = p.deg_q.max(p.deg_u);
    let degree_bound = p.kappa_hat + p.lambda0_hat;
    Admissibility {
        admissible: p.kappa_hat as i64 >= q_excess.max(u_excess),
        kappa_hat: p.kappa_hat,
        q_excess,
        u_excess,
        degree_of_rhs,
        degree_bound,
        degree_bound_holds: degree_of_rhs <= degree_bound,
    }
}

pub fn admissible(eq: &ClunieEquation) -> Result<Admissibility, ClunieError> {
    let v = check_hypotheses(eq);
    if !v.is_empty() {
        return Err(ClunieError::HypothesesViolated(v));
    }
    Ok(admissibility(&degree_profile(eq)))
}

/// Exact reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl Fraction {
    pub fn new(num: i64, den: i64) -> Self {
        let g = num_integer::gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Fraction {
            num: s * num / g,
            den: s * den / g,
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    /// (D_w/κ̂) T(r,w) ≤ N(r,w) + S(r,w).
    PoleDensity(Fraction),
    /// (τ_w/deg P) T(r,w) ≤ N(r,1/w) + S(r,w).
    ZeroDensity(Fraction),
    /// N(r,w) = T(r,w) + S(r,w).
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuledOut {
    DegreeBound,
    PolynomialDeg3Growth,
    RewriteDegU3,
    ZhangDeg3,
}

/// Growth hypothesis carried as a token: hyper-order at most one and
/// minimal hyper-type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalHyperType;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub admissible: bool,
    pub conclusions: Vec<Conclusion>,
    pub ruled_out: Option<RuledOut>,
}

fn conclusions(p: &DegreeProfile) -> Vec<Conclusion> {
    let mut c = Vec::new();
    if p.big_d_w > 0 {
        c.push(Conclusion::PoleDensity(Fraction::new(p.big_d_w, p.kappa_hat as i64)));
    }
    if p.tau_w > 0 {
        c.push(Conclusion::ZeroDensity(Fraction::new(p.tau_w, p.deg_p as i64)));
    }
    if p.kappa_hat as i64 == p.big_d_w {
        c.push(Conclusion::Identity);
    }
    c
}

/// The closed form of the identity condition: ord0_Q ≤ λ̂_0 and
/// κ̂ = deg_U − ord0_Q ≥ deg_Q − λ̂_0.
pub fn identity_condition(p: &DegreeProfile) -> bool {
    let lhs = p.deg_u as i64 - p.ord0_q as i64;
    p.ord0_q <= p.lambda0_hat
        && p.kappa_hat as i64 == lhs
        && lhs >= p.deg_q as i64 - p.lambda0_hat as i64
}

/// Which exclusion rule, if any, removes this benchmark profile.
pub fn exclusion_rule(p: &DegreeProfile) -> Option<RuledOut> {
    if !p.is_benchmark {
        return None;
    }
    if p.deg_u == 3 {
        Some(RuledOut::RewriteDegU3)
    } else if crate::poleprop::exclusion_flag(p) == Ok(true) {
        Some(RuledOut::PolynomialDeg3Growth)
    } else if p.deg_q == 3 && p.big_d_w > 0 {
        Some(RuledOut::ZhangDeg3)
    } else {
        None
    }
}

pub fn verdict_of_profile(p: &DegreeProfile, assumption: Option<MinimalHyperType>) -> Verdict {
    if !admissibility(p).admissible {
        return Verdict {
            admissible: false,
            conclusions: Vec::new(),
            ruled_out: Some(RuledOut::DegreeBound),
        };
    }
    Verdict {
        admissible: true,
        conclusions: conclusions(p),
        ruled_out: assumption.and_then(|_| exclusion_rule(p)),
    }
}

pub fn verdict(eq: &ClunieEquation) -> Result<Verdict, ClunieError> {
    if !admissible(eq)?.admissible {
        return Err(ClunieError::NotAdmissible);
    }
    Ok(verdict_of_profile(&degree_profile(eq), None))
}

/// Symbolic coefficients whose vanishing would change deg_U, deg_Q or
/// ord0_Q, and which are not flagged `!=0`.
pub fn generic_assumptions(eq: &ClunieEquation) -> Vec<String> {
    let mut out = Vec::new();
    let mut note = |c: Option<&Coefficient>, what: String| {
        if let Some(Coefficient::Symbolic(s)) = c {
            if !s.nonzero {
                out.push(format!("{} assumed nonzero ({what})", s.name));
            }
        }
    };
    if let Ok(d) = eq.u.total_degree() {
        note(eq.u.w_coefficient(d), format!("deg_w U = {d}"));
    }
    if let Ok(d) = eq.q.total_degree() {
        note(eq.q.w_coefficient(d), format!("deg_w Q = {d}"));
    }
    if let Ok(o) = eq.q.ord0() {
        if Some(o) != eq.q.total_degree().ok() {
            note(eq.q.w_coefficient(o), format!("ord_0 Q = {o}"));
        }
    }
    out
}

/// Full classification without erroring on inadmissible input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub profile: DegreeProfile,
    pub verdict: Verdict,
    pub admissibility: Admissibility,
    pub violations: Vec<Violation>,
    pub generic_assumptions: Vec<String>,
}

pub fn classify(eq: &ClunieEquation) -> Classification {
    let profile = degree_profile(eq);
    let violations = check_hypotheses(eq);
    Classification {
        profile,
        verdict: verdict_of_profile(&profile, None),
        admissibility: admissibility(&profile),
        violations,
        generic_assumptions: generic_assumptions(eq),
    }
}

// --------------------------------------------------------- families

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Roman numeral of the ord0_Q case.
    pub case: String,
    pub ord0_min: u64,
    pub ord0_max: u64,
    pub deg_u: u64,
    pub deg_q_min: u64,
    pub deg_q_max: u64,
    #[serde(rename = "D_w")]
    pub big_d_w: i64,
    pub side_conditions: Vec<String>,
    pub equation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySet {
    pub p: DiffPolynomial,
    pub families: Vec<FamilySpec>,
}

impl FamilySet {
    pub fn case_counts(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for f in &self.families {
            match out.last_mut() {
                Some((c, n)) if *c == f.case => *n += 1,
                _ => out.push((f.case.clone(), 1)),
            }
        }
        out
    }
}

pub fn roman(n: usize) -> String {
    const T: [(usize, &str); 9] = [
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut n = n;
    let mut s = String::new();
    for (v, r) in T {
        while n >= v {
            s.push_str(r);
            n -= v;
        }
    }
    s
}

fn side_conditions(o_min: u64, o_max: u64, q_min: u64, q_max: u64, deg_u: u64) -> Vec<String> {
    let mut c = Vec::new();
    if o_min == o_max {
        c.push(format!("{}!=0", q_coeff_name(o_min, q_max, 0)));
    }
    if q_min == q_max && q_max > o_min {
        c.push(format!("{}!=0", q_coeff_name(o_min, q_max, q_max - o_min)));
    }
    if deg_u >= 1 && o_min >= 1 {
        c.push("b0!=0".into());
    }
    c
}

/// Name of the coefficient of w^{o_min+i} in Q = w^{o_min}·Σ a_i w^i; a
/// single-term Q is named by its total power.
fn q_coeff_name(o_min: u64, q_max: u64, i: u64) -> String {
    if q_max == o_min {
        format!("a{q_max}")
    } else {
        format!("a{i}")
    }
}

/// Instantiates the family schema with generic symbolic coefficients.
pub fn instantiate(
    p: &DiffPolynomial,
    o_min: u64,
    q_max: u64,
    deg_u: u64,
    side: &[String],
) -> ClunieEquation {
    let flagged = |name: &str| side.iter().any(|s| s == &format!("{name}!=0"));
    let coeff = |name: String| {
        if flagged(&name) {
            Coefficient::symbol_nonzero(&name)
        } else {
            Coefficient::symbol(&name)
        }
    };
    let q_terms = (0..=q_max - o_min)
        .rev()
        .map(|i| (coeff(q_coeff_name(o_min, q_max, i)), o_min + i))
        .collect();
    let mut u_terms = vec![(Coefficient::one(), deg_u)];
    u_terms.extend((0..deg_u).rev().map(|k| (coeff(format!("b{k}")), k)));
    let q = DiffPolynomial::w_only(q_terms).expect("schema Q");
    let u = DiffPolynomial::w_only(u_terms).expect("schema U");
    ClunieEquation::new(u, p.clone(), q).expect("schema instantiates")
}

fn case_key(ord0: u64, deg_p: u64) -> u64 {
    ord0.min(deg_p)
}

/// Scans all admissible (ord0_Q, deg_U, deg_Q) and merges them into
/// maximal families with a common case, deg_U and D_w.
pub fn enumerate_families(p: &DiffPolynomial) -> Result<FamilySet, ClunieError> {
    let stats = PStats::of(p).ok_or(ClunieError::HypothesesViolated(vec![Violation::EmptyPart]))?;
    let v = check_p(&stats);
    if !v.is_empty() {
        return Err(ClunieError::HypothesesViolated(v));
    }
    let cap = stats.kappa_hat + stats.lambda0_hat;
    // (case, deg_u, D_w) -> list of (deg_q, ord0)
    let mut groups: BTreeMap<(u64, u64, i64), Vec<(u64, u64)>> = BTreeMap::new();
    for deg_q in 0..=cap {
        for ord0 in 0..=deg_q {
            for deg_u in 0..=cap {
                let prof = DegreeProfile::from_degrees(&stats, deg_u, deg_q, ord0);
                if admissibility(&prof).admissible {
                    groups
                        .entry((case_key(ord0, stats.deg_p), deg_u, prof.big_d_w))
                        .or_default()
                        .push((deg_q, ord0));
                }
            }
        }
    }
    let mut cases: Vec<u64> = groups.keys().map(|k| k.0).collect();
    cases.dedup();
    let mut fams: Vec<(u64, i64, u64, FamilySpec)> = Vec::new();
    for ((case, deg_u, big_d), members) in groups {
        let mut qs: Vec<u64> = members.iter().map(|m| m.0).collect();
        qs.sort();
        qs.dedup();
        // contiguous runs of deg_Q
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for q in qs {
            match runs.last_mut() {
                Some((_, hi)) if *hi + 1 == q => *hi = q,
                _ => runs.push((q, q)),
            }
        }
        for (q_min, q_max) in runs {
            let in_run = members.iter().filter(|m| m.0 >= q_min && m.0 <= q_max);
            let o_min = in_run.clone().map(|m| m.1).min().unwrap();
            let o_max = in_run.map(|m| m.1).max().unwrap();
            let side = side_conditions(o_min, o_max, q_min, q_max, deg_u);
            let eq = instantiate(p, o_min, q_max, deg_u, &side);
            let case_idx = cases.iter().position(|&c| c == case).unwrap() + 1;
            fams.push((
                case,
                big_d,
                deg_u,
                FamilySpec {
                    case: roman(case_idx),
                    ord0_min: o_min,
                    ord0_max: o_max,
                    deg_u,
                    deg_q_min: q_min,
                    deg_q_max: q_max,
                    big_d_w: big_d,
                    side_conditions: side,
                    equation: eq.to_canonical_text(),
                },
            ));
        }
    }
    fams.sort_by_key(|f| (f.0, f.1, f.2, f.3.deg_q_min));
    Ok(FamilySet {
        p: p.clone(),
        families: fams.into_iter().map(|f| f.3).collect(),
    })
}

/// Applies the three exclusion rules for the benchmark P.
pub fn reduce_families(set: &FamilySet, _assumption: MinimalHyperType) -> Result<FamilySet, ClunieError> {
    if !is_benchmark(&set.p) {
        return Err(ClunieError::WrongBenchmark);
    }
    let mut out = Vec::new();
    for f in &set.families {
        if f.deg_u == 3 {
            continue;
        }
        if f.deg_u == 0 && f.deg_q_min == 3 && f.deg_q_max == 3 {
            continue;
        }
        let mut f = f.clone();
        if f.big_d_w > 0 && f.deg_q_max == 3 {
            if f.deg_q_min > 2 {
                continue;
            }
            f.deg_q_max = 2;
            f.ord0_max = f.ord0_max.min(2);
            f.side_conditions =
                side_conditions(f.ord0_min, f.ord0_max, f.deg_q_min, f.deg_q_max, f.deg_u);
            f.equation = instantiate(&set.p, f.ord0_min, f.deg_q_max, f.deg_u, &f.side_conditions)
                .to_canonical_text();
        }
        out.push(f);
    }
    Ok(FamilySet {
        p: set.p.clone(),
        families: out,
    })
}

/// One line per family; the golden-file format.
pub fn render_families_text(set: &FamilySet) -> String {
    let mut s = String::new();
    for f in &set.families {
        let ord0 = if f.ord0_min == f.ord0_max {
            f.ord0_min.to_string()
        } else {
            format!("{}..{}", f.ord0_min, f.ord0_max)
        };
        let deg_q = if f.deg_q_min == f.deg_q_max {
            f.deg_q_min.to_string()
        } else {
            format!("{}..{}", f.deg_q_min, f.deg_q_max)
        };
        let side = if f.side_conditions.is_empty() {
            "-".to_string()
        } else {
            f.side_conditions.join(",")
        };
        s.push_str(&format!(
            "{:<4}ord0_Q={:<5}deg_U={} deg_Q={:<5}D_w={:<3}{:<16}{}\n",
            f.case, ord0, f.deg_u, deg_q, f.big_d_w, side, f.equation
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqparse::parse_equation;

    const P: &str = "w(z+1)*w(z-1) + w(z+1)*w + w*w(z-1)";

    fn eq(rhs: &str) -> ClunieEquation {
        parse_equation(&format!("{P} = {rhs}")).unwrap()
    }

    #[test]
    fn profiles() {
        let p = degree_profile(&eq("(a2*w^2+a1*w+a0!=0)/(w^2+b1*w+b0)"));
        assert_eq!((p.d_w, p.big_d_w, p.tau_w), (4, 2, 2));
        let p = degree_profile(&eq("a2!=0*w^2"));
        assert_eq!((p.d_w, p.big_d_w), (0, -2));
        let p = degree_profile(&eq("a0!=0"));
        assert_eq!((p.d_w, p.big_d_w, p.tau_w), (2, 0, 0));
        assert!(p.is_consistent());
    }

    #[test]
    fn hypotheses() {
        assert!(check_hypotheses(&eq("w")).is_empty());
        let v = check_hypotheses(&parse_equation("w(z+1) + w = w").unwrap());
        assert!(v.contains(&Violation::Lambda0NotLess));
        let v = check_hypotheses(&parse_equation("w(z+1)*w + w = w").unwrap());
        assert!(v.contains(&Violation::NotHomogeneous));
    }

    #[test]
    fn admissibility_examples() {
        let a = admissible(&eq("a4*w^4 + a0")).unwrap();
        assert!(!a.admissible);
        let a = admissible(&eq("(w*(a2*w^2+a1*w+a0))/(w^3 + b2*w^2 + b1*w + b0)")).unwrap();
        assert!(a.admissible);
        assert!(a.degree_bound_holds);
    }

    #[test]
    fn verdicts() {
        let v = verdict(&eq("(a2*w^2+a1*w+a0!=0)/(w^2+b1*w+b0)")).unwrap();
        assert_eq!(
            v.conclusions,
            vec![
                Conclusion::PoleDensity(Fraction::new(1, 1)),
                Conclusion::ZeroDensity(Fraction::new(1, 1)),
                Conclusion::Identity
            ]
        );
        let v = verdict(&eq("(a3*w^3 + a2*w^2+a1*w+a0!=0)/(w+b0)")).unwrap();
        assert_eq!(
            v.conclusions,
            vec![
                Conclusion::PoleDensity(Fraction::new(1, 2)),
                Conclusion::ZeroDensity(Fraction::new(1, 2))
            ]
        );
        let v = verdict(&eq("w*(a1*w+a0!=0)")).unwrap();
        assert!(v.conclusions.is_empty());
        assert_eq!(verdict(&eq("a4*w^4")), Err(ClunieError::NotAdmissible));
    }

    #[test]
    fn fourteen_then_nine() {
        let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
        assert_eq!(set.families.len(), 14);
        let counts: Vec<usize> = set.case_counts().into_iter().map(|c| c.1).collect();
        assert_eq!(counts, vec![4, 5, 5]);
        assert!(set.families.iter().any(|f| f.case == "I"
            && f.deg_u == 0
            && f.deg_q_max == 2
            && f.big_d_w == 0));
        let red = reduce_families(&set, MinimalHyperType).unwrap();
        assert_eq!(red.families.len(), 9);
        assert!(red.families.iter().all(|f| f.deg_u <= 2));
    }

    #[test]
    fn family_equations_reparse() {
        let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
        for f in &set.families {
            let e = parse_equation(&f.equation).unwrap();
            let p = degree_profile(&e);
            assert_eq!(
                (p.deg_u, p.deg_q, p.ord0_q, p.big_d_w),
                (f.deg_u, f.deg_q_max, f.ord0_min, f.big_d_w),
                "{}",
                f.equation
            );
        }
    }

    #[test]
    fn reduction_refuses_other_p() {
        let p = parse_equation("w(z+1)*w(z-1) + w(z+1)*w = w").unwrap().p;
        let set = enumerate_families(&p).unwrap();
        assert_eq!(reduce_families(&set, MinimalHyperType), Err(ClunieError::WrongBenchmark));
    }

    #[test]
    fn exclusion_tags() {
        let stats = PStats::of(&DiffPolynomial::benchmark()).unwrap();
        let tag = |u, q, o| {
            verdict_of_profile(&DegreeProfile::from_degrees(&stats, u, q, o), Some(MinimalHyperType))
                .ruled_out
        };
        assert_eq!(tag(3, 2, 1), Some(RuledOut::RewriteDegU3));
        assert_eq!(tag(0, 3, 0), Some(RuledOut::PolynomialDeg3Growth));
        assert_eq!(tag(1, 3, 0), Some(RuledOut::ZhangDeg3));
        assert_eq!(tag(1, 2, 0), None);
        assert_eq!(tag(0, 4, 0), Some(RuledOut::DegreeBound));
    }

    #[test]
    fn generic_assumption_notes() {
        let e = eq("(a2*w^2+a1*w+a0!=0)/(w^2+b1*w+b0)");
        let notes = generic_assumptions(&e);
        assert_eq!(notes, vec!["a2 assumed nonzero (deg_w Q = 2)".to_string()]);
    }
}
