//! Subcommand drivers. Each returns a report plus an optional rejection;
//! operational failures come back as `Err`.

use diffnev::charfn::{self, render_example_csv};
use diffnev::clunie::{self, enumerate_families, reduce_families, render_families_text, FamilySet, MinimalHyperType};
use diffnev::exact::{parse_exact_complex, rat, rat_int, Poly, Rational};
use diffnev::growth::{self, doubling_stable, GrowthFunction, ScanReport};
use diffnev::model::{build_example_product, parse_model, MeromorphicModel, RationalModel, DEFAULT_N_CAP};
use diffnev::poleprop::{self, PoleChain};
use diffnev::{parse_equation, validate_no_common_factors, DiffPolynomial, ParseError};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::render::Report;

pub struct Outcome {
    pub report: Report,
    pub rejection: Option<String>,
}

impl Outcome {
    fn new(report: Report, rejection: Option<String>) -> Self {
        Outcome { report, rejection }
    }
}

const BENCHMARK: &str = "w*w(z+1) + w*w(z-1) + w(z+1)*w(z-1)";

pub fn defaults(command: &str) -> &'static [(&'static str, &'static str)] {
    match command {
        "classify" => &[("equation", ""), ("file", "")],
        "enumerate" | "reduce" => &[("poly", BENCHMARK)],
        "shift-check" => &[("model", "rational:1/(z-1)"), ("c", "1"), ("r_min", "3"), ("r_max", "200"), ("ratio", "1.1")],
        "logdiff-check" => &[
            ("model", "exp:z"),
            ("c", "1"),
            ("delta", "0.25"),
            ("eps", "1"),
            ("threshold", "0.05"),
            ("r_min", "2"),
            ("r_max", "1000"),
            ("ratio", "1.05"),
        ],
        "growth-scan" => &[
            ("growth", "power:2"),
            ("lemma", "2.1"),
            ("delta", "0.25"),
            ("eps", "1"),
            ("h", "1"),
            ("k", "1"),
            ("threshold", "0.05"),
            ("tol", "0.05"),
            ("r_max", "10000"),
            ("ratio", "1.01"),
        ],
        "product-example" => &[("levels", "2"), ("n1", "1"), ("c", "3")],
        "polechain" => &[("k0", "1"), ("steps", "7"), ("degree", "3"), ("blacklist", "")],
        _ => &[],
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, String> {
    match cfg.command.as_str() {
        "classify" => classify(cfg),
        "enumerate" => families(cfg, false),
        "reduce" => families(cfg, true),
        "shift-check" => shift_check(cfg),
        "logdiff-check" => logdiff_check(cfg),
        "growth-scan" => growth_scan(cfg),
        "product-example" => product_example(cfg),
        "polechain" => polechain(cfg),
        other => Err(format!("unknown command `{other}`")),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn parse_error(text: &str, e: &ParseError) -> String {
    format!("cannot parse `{text}`: {e}")
}

// ------------------------------------------------------------ classify

fn classify_one(text: &str) -> Result<(Value, Option<String>), String> {
    let eq = parse_equation(text).map_err(|e| parse_error(text, &e))?;
    let eq = match validate_no_common_factors(&eq) {
        Ok(v) => v,
        Err(e @ ParseError::CommonFactor { .. }) => {
            let body = json!({ "equation": eq.to_canonical_text(), "rejected": e.to_string() });
            return Ok((body, Some(e.to_string())));
        }
        Err(e) => return Err(parse_error(text, &e)),
    };
    let c = clunie::classify(&eq);
    let rejection = if !c.violations.is_empty() {
        Some(format!("hypotheses violated: {:?}", c.violations))
    } else if !c.admissibility.admissible {
        Some("equation is not admissible".to_string())
    } else {
        None
    };
    let body = json!({
        "equation": eq.to_canonical_text(),
        "coprimality": to_value(&eq.coprimality),
        "profile": to_value(&c.profile),
        "admissibility": to_value(&c.admissibility),
        "verdict": to_value(&c.verdict),
        "violations": to_value(&c.violations),
        "generic_assumptions": to_value(&c.generic_assumptions),
    });
    Ok((body, rejection))
}

fn classify(cfg: &RunConfig) -> Result<Outcome, String> {
    let lines: Vec<String> = match (cfg.opt("equation"), cfg.opt("file")) {
        (Some(_), Some(_)) => return Err("give an equation or --file, not both".into()),
        (Some(e), None) => vec![e.to_string()],
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| format!("{path}: {e}"))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
        (None, None) => return Err("no equation given".into()),
    };
    if lines.is_empty() {
        return Err("input contains no equation".into());
    }
    let mut bodies = Vec::new();
    let mut rejections = Vec::new();
    for line in &lines {
        let (body, rej) = classify_one(line)?;
        bodies.push(body);
        rejections.extend(rej);
    }
    let body = if bodies.len() == 1 {
        bodies.pop().unwrap()
    } else {
        json!({ "equations": bodies })
    };
    let rejection = (!rejections.is_empty()).then(|| rejections.join("; "));
    Ok(Outcome::new(Report::new(body), rejection))
}

// ------------------------------------------------------------ families

fn parse_poly(text: &str) -> Result<DiffPolynomial, String> {
    let eq_text = format!("{text} = {{1}}");
    parse_equation(&eq_text).map(|eq| eq.p).map_err(|e| parse_error(text, &e))
}

fn families_csv(set: &FamilySet) -> String {
    let mut s = String::from("case,ord0_min,ord0_max,deg_U,deg_Q_min,deg_Q_max,D_w,side_conditions,equation\n");
    for f in &set.families {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},\"{}\"\n",
            f.case,
            f.ord0_min,
            f.ord0_max,
            f.deg_u,
            f.deg_q_min,
            f.deg_q_max,
            f.big_d_w,
            f.side_conditions.join(";"),
            f.equation
        ));
    }
    s
}

fn family_report(set: &FamilySet, note: Option<&str>) -> Report {
    let counts: Vec<Value> = set.case_counts().into_iter().map(|(c, n)| json!({ "case": c, "families": n })).collect();
    let mut body = json!({ "count": set.families.len(), "case_counts": counts, "families": to_value(&set.families) });
    let mut text = render_families_text(set);
    if let Some(n) = note {
        body["refused"] = Value::String(n.to_string());
        text.push_str(&format!("# {n}\n"));
    }
    Report::new(body).with_csv(families_csv(set)).with_text(text)
}

fn families(cfg: &RunConfig, reduce: bool) -> Result<Outcome, String> {
    let p = parse_poly(cfg.str("poly"))?;
    let set = match enumerate_families(&p) {
        Ok(s) => s,
        Err(e) => {
            let body = json!({ "poly": cfg.str("poly"), "rejected": e.to_string() });
            return Ok(Outcome::new(Report::new(body), Some(e.to_string())));
        }
    };
    if !reduce {
        return Ok(Outcome::new(family_report(&set, None), None));
    }
    match reduce_families(&set, MinimalHyperType) {
        Ok(r) => Ok(Outcome::new(family_report(&r, None), None)),
        Err(e) => {
            let note = format!("reduction refused: {e}; showing the enumeration only");
            Ok(Outcome::new(family_report(&set, Some(&note)), Some(note)))
        }
    }
}

// ------------------------------------------------------------- models

fn random_rational(seed: u64, deg: usize) -> Result<MeromorphicModel, String> {
    if deg == 0 {
        return Err("random model degree must be at least 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut poly = |d: usize| {
            let mut c: Vec<Rational> = (0..d).map(|_| rat_int(rng.gen_range(-3..=3))).collect();
            c.push(rat_int([-2, -1, 1, 2][rng.gen_range(0..4)]));
            Poly::from_coeffs(c)
        };
        let (n, d) = (poly(deg), poly(deg - 1));
        if let Ok(m) = RationalModel::from_polys(n, d) {
            if m.degree() == deg {
                return Ok(MeromorphicModel::Rational(m));
            }
        }
    }
    Err("could not draw a coprime random rational".into())
}

/// `random:D` draws a rational of degree D from the run seed; everything
/// else goes to the core model parser.
fn model(cfg: &RunConfig) -> Result<MeromorphicModel, String> {
    let spec = cfg.str("model");
    if let Some(d) = spec.strip_prefix("random:") {
        let d: usize = d.trim().parse().map_err(|_| format!("bad random degree `{d}`"))?;
        return random_rational(cfg.num("seed").map_err(|e| e.to_string())?, d);
    }
    parse_model(spec).map_err(|e| e.to_string())
}

fn shift(cfg: &RunConfig) -> Result<Complex64, String> {
    parse_exact_complex(cfg.str("c")).map(|c| c.to_c64()).map_err(|e| format!("shift `{}`: {e}", cfg.str("c")))
}

fn grid(cfg: &RunConfig) -> Result<(f64, f64, f64), String> {
    let e = |e: crate::config::ConfigError| e.to_string();
    Ok((cfg.positive("r_min").map_err(e)?, cfg.positive("r_max").map_err(e)?, cfg.ratio().map_err(e)?))
}

// ------------------------------------------------------------ drivers

fn shift_check(cfg: &RunConfig) -> Result<Outcome, String> {
    let f = model(cfg)?;
    let c = shift(cfg)?;
    let (lo, hi, ratio) = grid(cfg)?;
    let constants = charfn::shift_constants(&f, c).map_err(|e| e.to_string())?;
    let rows = charfn::shift_sweep(&f, c, lo, hi, ratio).map_err(|e| e.to_string())?;
    let failures: Vec<f64> = rows.iter().filter(|x| !x.pass).map(|x| x.r).collect();
    let mut csv = String::from("r,N_lhs,N_rhs,N_zero_lhs,N_zero_rhs,T_lhs,T_rhs,err,pass\n");
    for x in &rows {
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{}\n",
            x.r, x.poles.lhs, x.poles.rhs, x.zeros.lhs, x.zeros.rhs, x.characteristic.lhs, x.characteristic.rhs, x.quadrature_error, x.pass
        ));
    }
    let body = json!({
        "model": f.to_string(),
        "c": [c.re, c.im],
        "constants": to_value(&constants),
        "points": rows.len(),
        "failures": failures.len(),
        "pass": failures.is_empty(),
        "rows": to_value(&rows),
    });
    let rejection = (!failures.is_empty()).then(|| format!("shift inequality fails at r = {failures:?}"));
    Ok(Outcome::new(Report::new(body).with_csv(csv), rejection))
}

fn logdiff_check(cfg: &RunConfig) -> Result<Outcome, String> {
    let f = model(cfg)?;
    let c = shift(cfg)?;
    let (lo, hi, ratio) = grid(cfg)?;
    let e = |e: crate::config::ConfigError| e.to_string();
    let delta = cfg.positive("delta").map_err(e)?;
    let eps = cfg.positive("eps").map_err(e)?;
    let threshold = cfg.positive("threshold").map_err(e)?;
    let rep = charfn::verify_logdiff_bound(&f, c, delta, eps, lo, hi, ratio).map_err(|e| e.to_string())?;
    let certified = rep.density.lower_density <= threshold;
    let pass = rep.negative_control || certified;
    let body = json!({
        "model": f.to_string(),
        "c": [c.re, c.im],
        "points": rep.rows.len(),
        "skipped": rep.skipped.len(),
        "failures": rep.rows.iter().filter(|x| !x.pass).count(),
        "density": to_value(&rep.density),
        "negative_control": rep.negative_control,
        "certified": certified,
        "pass": pass,
        "rows": to_value(&rep.rows),
    });
    let rejection = (!pass).then(|| format!("exceptional set has lower density {} > {threshold}", rep.density.lower_density));
    Ok(Outcome::new(Report::new(body).with_csv(rep.to_csv()), rejection))
}

fn parse_growth(spec: &str) -> Result<GrowthFunction, String> {
    let bad = || format!("unknown growth `{spec}` (power:RHO, exproot:ALPHA[,BETA], exp, log)");
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match spec.split_once(':') {
        None if spec == "exp" => Ok(GrowthFunction::PureExp),
        None if spec == "log" => Ok(GrowthFunction::Log),
        Some(("power", rho)) => Ok(GrowthFunction::Power(num(rho)?)),
        Some(("exproot", args)) => {
            let (a, b) = args.split_once(',').unwrap_or((args, "1"));
            Ok(GrowthFunction::exp_root(num(a)?, num(b)?))
        }
        _ => Err(bad()),
    }
}

fn scan_summary(rep: &ScanReport) -> Value {
    json!({
        "points": rep.rows.len(),
        "skipped": rep.skipped.len(),
        "inequality_failures": rep.inequality_failures,
        "stalled_points": rep.stalled_points,
        "density": to_value(&rep.density),
    })
}

fn growth_scan(cfg: &RunConfig) -> Result<Outcome, String> {
    let e = |e: crate::config::ConfigError| e.to_string();
    let t = parse_growth(cfg.str("growth"))?;
    let horizon = cfg.positive("r_max").map_err(e)?;
    let ratio = cfg.ratio().map_err(e)?;
    let delta = cfg.positive("delta").map_err(e)?;
    let tol = cfg.positive("tol").map_err(e)?;
    let ge = |e: growth::GrowthError| e.to_string();
    match cfg.str("lemma") {
        "2.1" => {
            let threshold = cfg.positive("threshold").map_err(e)?;
            let rep = growth::scan_lemma21(&t, delta, horizon, ratio).map_err(ge)?;
            let pass = rep.certifies(threshold);
            let body = json!({ "lemma": "2.1", "growth": cfg.str("growth"), "scan": scan_summary(&rep), "pass": pass });
            let rejection = (!pass).then(|| format!("lower density {} exceeds {threshold}", rep.density.lower_density));
            Ok(Outcome::new(Report::new(body).with_csv(rep.to_csv()), rejection))
        }
        "2.2" => {
            let eps = cfg.positive("eps").map_err(e)?;
            let half = growth::scan_lemma22(&t, delta, eps, horizon / 2.0, ratio).map_err(ge)?;
            let full = growth::scan_lemma22(&t, delta, eps, horizon, ratio).map_err(ge)?;
            let stable = |a: &ScanReport, b: &ScanReport| doubling_stable(a.density.log_measure, b.density.log_measure, tol);
            let pass = stable(&half.increment, &full.increment) && stable(&half.reach, &full.reach);
            let mut csv = String::from("branch,r,lhs,rhs,pass\n");
            for (name, rep) in [("increment", &full.increment), ("reach", &full.reach)] {
                for row in rep.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{name},{row}\n"));
                }
            }
            let body = json!({
                "lemma": "2.2",
                "growth": cfg.str("growth"),
                "increment": scan_summary(&full.increment),
                "reach": scan_summary(&full.reach),
                "half_horizon_log_measure": [half.increment.density.log_measure, half.reach.density.log_measure],
                "pass": pass,
            });
            let rejection = (!pass).then(|| "log measure of the exceptional set grows under horizon doubling".to_string());
            Ok(Outcome::new(Report::new(body).with_csv(csv), rejection))
        }
        "finite" => {
            let h = cfg.positive("h").map_err(e)?;
            let k = cfg.positive("k").map_err(e)?;
            let half = growth::scan_lemma22_finite_order(&t, h, k, horizon / 2.0, ratio).map_err(ge)?;
            let full = growth::scan_lemma22_finite_order(&t, h, k, horizon, ratio).map_err(ge)?;
            let pass = doubling_stable(half.density.log_measure, full.density.log_measure, tol);
            let body = json!({
                "lemma": "finite",
                "growth": cfg.str("growth"),
                "scan": scan_summary(&full),
                "half_horizon_log_measure": half.density.log_measure,
                "pass": pass,
            });
            let rejection = (!pass).then(|| "log measure of the exceptional set grows under horizon doubling".to_string());
            Ok(Outcome::new(Report::new(body).with_csv(full.to_csv()), rejection))
        }
        other => Err(format!("unknown lemma `{other}` (2.1, 2.2 or finite)")),
    }
}

fn product_example(cfg: &RunConfig) -> Result<Outcome, String> {
    let e = |e: crate::config::ConfigError| e.to_string();
    let s: usize = cfg.num("levels").map_err(e)?;
    let n1: u64 = cfg.num("n1").map_err(e)?;
    let c = shift(cfg)?;
    let (f, cert) = build_example_product(s, n1, DEFAULT_N_CAP).map_err(|e| e.to_string())?;
    let broken: Vec<usize> = cert.inequalities.iter().filter(|(_, th, n)| !((*n as f64) > *th)).map(|x| x.0).collect();
    let rows = charfn::example_product_report(&f, s, c).map_err(|e| e.to_string())?;
    let min_prox = rows.iter().map(|x| x.proximity_ratio).fold(f64::INFINITY, f64::min);
    let max_char = rows.iter().map(|x| x.characteristic_ratio).fold(f64::NEG_INFINITY, f64::max);
    let body = json!({
        "levels": cert.levels.iter().map(|l| json!({ "radius": l.radius, "n": l.n })).collect::<Vec<_>>(),
        "certificate": cert.inequalities.iter().map(|(k, th, n)| json!({ "k": k, "threshold": th, "n": n })).collect::<Vec<_>>(),
        "c": [c.re, c.im],
        "window": [rows.first().map(|x| x.r), rows.last().map(|x| x.r)],
        "min_proximity_ratio": min_prox,
        "max_characteristic_ratio": max_char,
        "pass": broken.is_empty(),
        "rows": to_value(&rows),
    });
    let csv = render_example_csv(&rows);
    let text = crate::render::flatten_text(&body) + &csv;
    let rejection = (!broken.is_empty()).then(|| format!("level inequality fails at k = {broken:?}"));
    Ok(Outcome::new(Report::new(body).with_csv(csv).with_text(text), rejection))
}

/// Hard checks: exact bounds (q/2)^n k0 and the ceiling invariants.
fn chain_problems(chain: &PoleChain, q: u64) -> Vec<String> {
    let mut out = Vec::new();
    let step = rat(q as i64, 2);
    let mut b = rat_int(chain.k0 as i64);
    for (n, bound) in chain.bounds.iter().enumerate() {
        if *bound != b {
            out.push(format!("bound {n} is not exact"));
        }
        let ceiling = Rational::from_integer(chain.ceilings[n].into());
        if bound.ceil() > ceiling {
            out.push(format!("ceiling {n} below bound"));
        }
        if n > 0 && chain.ceilings[n] < chain.ceilings[n - 1] {
            out.push(format!("ceiling {n} decreases"));
        }
        b = &b * &step;
    }
    out
}

fn polechain(cfg: &RunConfig) -> Result<Outcome, String> {
    let e = |e: crate::config::ConfigError| e.to_string();
    let k0: u64 = cfg.num("k0").map_err(e)?;
    let steps: usize = cfg.num("steps").map_err(e)?;
    let q: u64 = cfg.num("degree").map_err(e)?;
    let blacklist = cfg.list("blacklist").map_err(e)?;
    let pe = |e: poleprop::PoleError| e.to_string();
    let chains = if blacklist.is_empty() {
        vec![poleprop::chain_with_degree(k0, steps, q).map_err(pe)?]
    } else {
        if q != 3 {
            return Err("--blacklist supports only the proven degree 3".into());
        }
        poleprop::chain_avoiding(k0, steps, &blacklist).map_err(pe)?
    };
    let mut problems = Vec::new();
    let mut bodies = Vec::new();
    let mut csv = String::new();
    for ch in &chains {
        problems.extend(chain_problems(ch, q));
        let g = poleprop::growth_lower_bound(ch);
        bodies.push(json!({
            "chain": to_value(ch),
            "growth": { "D": g.base, "K": g.factor },
        }));
        csv.push_str(&poleprop::render_chain_csv(ch));
    }
    let body = json!({ "k0": k0, "steps": steps, "degree": q, "chains": bodies, "problems": problems, "pass": problems.is_empty() });
    let rejection = (!problems.is_empty()).then(|| problems.join("; "));
    Ok(Outcome::new(Report::new(body).with_csv(csv), rejection))
}
