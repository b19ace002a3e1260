//! Nevanlinna characteristic of concrete models and the shift and
//! logarithmic-difference inequalities checked against them.
//!
//! N is always taken from the divisor in closed form. Only m involves
//! quadrature, so every reported error estimate is one-sided noise in m.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{geometric_grid, DensityReport, ExceptionSet};
use crate::model::{Counting, MeromorphicModel, ModelError};
use crate::quad::{integrate, QuadConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharError {
    #[error("pole on the circle |z| = {0} after perturbation")]
    PoleOnCircle(f64),
    #[error("quadrature did not converge at r = {r} (error estimate {error:.3e})")]
    QuadratureNonConvergence { r: f64, error: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proximity {
    pub value: f64,
    pub error: f64,
    /// Radius actually used after any perturbation.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSample {
    pub r: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "err")]
    pub quadrature_error_estimate: f64,
}

const BAND: f64 = 0.1;
const MAX_BREAKS: usize = 20_000;

fn quad_config() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-11,
        max_panels: 400_000,
    }
}

/// (1/2π)∮ log⁺|f(re^{iθ})| dθ with panel breaks at divisor points near
/// the circle.
pub fn proximity_m(model: &MeromorphicModel, r: f64) -> Result<Proximity, CharError> {
    proximity_with(model, r, &quad_config())
}

pub fn proximity_with(model: &MeromorphicModel, r: f64, cfg: &QuadConfig) -> Result<Proximity, CharError> {
    if !(r > 0.0) {
        return Err(CharError::Precondition("r must be positive".into()));
    }
    let mut radius = r;
    let mut tries = 0;
    while model.pole_on_circle(radius, 1e-12 * radius) {
        tries += 1;
        if tries > 3 {
            return Err(CharError::PoleOnCircle(r));
        }
        radius += 1e-9 * r;
    }
    let mut breaks = model.near_circle_args(radius, BAND * radius, MAX_BREAKS);
    breaks.sort_by(f64::total_cmp);
    let q = integrate(
        |t: f64| {
            let v = model.log_abs(Complex64::from_polar(radius, t));
            if v.is_nan() {
                0.0
            } else {
                v.max(0.0)
            }
        },
        0.0,
        2.0 * PI,
        &breaks,
        cfg,
    );
    if !q.converged {
        return Err(CharError::QuadratureNonConvergence { r, error: q.error });
    }
    Ok(Proximity {
        value: q.value / (2.0 * PI),
        error: q.error / (2.0 * PI),
        r: radius,
    })
}

pub fn counting_n(model: &MeromorphicModel, r: f64, kind: Counting) -> f64 {
    model.counting(r, kind)
}

/// T = m + N(poles).
pub fn characteristic_t(model: &MeromorphicModel, r: f64) -> Result<CharacteristicSample, CharError> {
    let m = proximity_m(model, r)?;
    let n = model.counting(m.r, Counting::Poles);
    Ok(CharacteristicSample {
        r,
        m: m.value,
        n,
        t: m.value + n,
        quadrature_error_estimate: m.error,
    })
}

pub fn render_samples_csv(samples: &[CharacteristicSample]) -> String {
    let mut s = String::from("r,m,N,T,err\n");
    for x in samples {
        s.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}\n", x.r, x.m, x.n, x.t, x.quadrature_error_estimate));
    }
    s
}

// ------------------------------------------------------------ shift

fn n_factor(c: f64, r: f64) -> f64 {
    1.0 + c / r + (1.0 + c) * c.ln_1p() / (r + c).ln()
}

fn t_factor(c: f64, r: f64) -> f64 {
    1.0 + (2.0 + c) * c.ln_1p() / (r + c).ln()
}

/// Additive constants measured at r0 = 1 + 2|c| plus log 2 of slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftConstants {
    pub r0: f64,
    pub poles: f64,
    pub zeros: f64,
    pub characteristic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    fn holds(&self, noise: f64) -> bool {
        self.lhs <= self.rhs + noise + 1e-12 * self.rhs.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    pub r: f64,
    /// N(r, f_c) against (1 + |c|/r + (1+|c|)log(1+|c|)/log(r+|c|)) N(r+|c|, f) + K.
    pub poles: Sides,
    pub zeros: Sides,
    /// T(r, f_c) against (1 + (2+|c|)log(1+|c|)/log(r+|c|)) T(r+|c|, f) + K.
    pub characteristic: Sides,
    pub quadrature_error: f64,
    pub pass: bool,
}

struct ShiftRaw {
    n_poles: (f64, f64),
    n_zeros: (f64, f64),
    t: (f64, f64),
    err: f64,
}

fn shift_raw(model: &MeromorphicModel, c: Complex64, r: f64) -> Result<ShiftRaw, CharError> {
    let a = c.norm();
    let shifted = model.clone().shifted(c);
    let ts = characteristic_t(&shifted, r)?;
    let tb = characteristic_t(model, r + a)?;
    Ok(ShiftRaw {
        n_poles: (shifted.counting(r, Counting::Poles), model.counting(r + a, Counting::Poles)),
        n_zeros: (shifted.counting(r, Counting::Zeros), model.counting(r + a, Counting::Zeros)),
        t: (ts.t, tb.t),
        err: ts.quadrature_error_estimate + tb.quadrature_error_estimate,
    })
}

pub fn shift_constants(model: &MeromorphicModel, c: Complex64) -> Result<ShiftConstants, CharError> {
    let a = c.norm();
    let r0 = 1.0 + 2.0 * a;
    let raw = shift_raw(model, c, r0)?;
    let k = |(lhs, base): (f64, f64), factor: f64| (lhs - factor * base).max(0.0) + 2f64.ln();
    Ok(ShiftConstants {
        r0,
        poles: k(raw.n_poles, n_factor(a, r0)),
        zeros: k(raw.n_zeros, n_factor(a, r0)),
        characteristic: k(raw.t, t_factor(a, r0)),
    })
}

/// Requires r > 1 + |c|.
pub fn shift_inequality_check(
    model: &MeromorphicModel,
    c: Complex64,
    r: f64,
    k: &ShiftConstants,
) -> Result<ShiftCheck, CharError> {
    let a = c.norm();
    if !(r > 1.0 + a) {
        return Err(CharError::Precondition(format!("need r > 1 + |c| = {}", 1.0 + a)));
    }
    let raw = shift_raw(model, c, r)?;
    let side = |(lhs, base): (f64, f64), factor: f64, k: f64| Sides { lhs, rhs: factor * base + k };
    let poles = side(raw.n_poles, n_factor(a, r), k.poles);
    let zeros = side(raw.n_zeros, n_factor(a, r), k.zeros);
    let characteristic = side(raw.t, t_factor(a, r), k.characteristic);
    let pass = poles.holds(0.0) && zeros.holds(0.0) && characteristic.holds(raw.err);
    Ok(ShiftCheck {
        r,
        poles,
        zeros,
        characteristic,
        quadrature_error: raw.err,
        pass,
    })
}

/// Checks the shift inequalities on a geometric grid.
pub fn shift_sweep(model: &MeromorphicModel, c: Complex64, r_lo: f64, r_hi: f64, ratio: f64) -> Result<Vec<ShiftCheck>, CharError> {
    let k = shift_constants(model, c)?;
    geometric_grid(r_lo, r_hi, ratio)
        .par_iter()
        .map(|&r| shift_inequality_check(model, c, r, &k))
        .collect()
}

// ---------------------------------------------------- log difference

/// m(r, f_c/f), integrating log|f(z+c)| − log|f(z)| jointly.
pub fn log_diff_m(model: &MeromorphicModel, c: Complex64, r: f64) -> Result<Proximity, CharError> {
    if c.norm() == 0.0 {
        return Ok(Proximity { value: 0.0, error: 0.0, r });
    }
    let q = MeromorphicModel::Quotient {
        num: Box::new(model.clone().shifted(c)),
        den: Box::new(model.clone()),
    };
    proximity_m(&q, r)
}

fn is_exp_exp(model: &MeromorphicModel) -> bool {
    match model {
        MeromorphicModel::ExpExp => true,
        MeromorphicModel::Shifted { base, .. } | MeromorphicModel::Power { base, .. } => is_exp_exp(base),
        MeromorphicModel::Quotient { num, den } => is_exp_exp(num) || is_exp_exp(den),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogDiffRow {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub err: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogDiffReport {
    pub rows: Vec<LogDiffRow>,
    pub set: ExceptionSet,
    pub density: DensityReport,
    /// Grid points with T(r) ≤ e.
    pub skipped: Vec<f64>,
    /// The model violates the growth hypothesis; the scan is diagnostic.
    pub negative_control: bool,
}

impl LogDiffReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,lhs,rhs,pass\n");
        for row in &self.rows {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e},{}\n", row.r, row.lhs, row.rhs, row.pass));
        }
        s
    }
}

/// m(r, f_c/f) ≤ 436e(1+|c|)((log log T)^{1+ε} log T / r)^δ T on [r_lo, R].
pub fn verify_logdiff_bound(
    model: &MeromorphicModel,
    c: Complex64,
    delta: f64,
    eps: f64,
    r_lo: f64,
    horizon: f64,
    ratio: f64,
) -> Result<LogDiffReport, CharError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(CharError::Precondition("need 0 < δ < 1/2".into()));
    }
    let grid = geometric_grid(r_lo, horizon, ratio);
    let rows: Vec<Option<LogDiffRow>> = grid
        .par_iter()
        .map(|&r| -> Result<Option<LogDiffRow>, CharError> {
            let t = characteristic_t(model, r)?.t;
            if t <= E {
                return Ok(None);
            }
            let lt = t.ln();
            let rhs = 436.0 * E * (1.0 + c.norm()) * (lt.ln().powf(1.0 + eps) * lt / r).powf(delta) * t;
            let lhs = log_diff_m(model, c, r)?;
            Ok(Some(LogDiffRow {
                r,
                lhs: lhs.value,
                rhs,
                err: lhs.error,
                pass: lhs.value - lhs.error <= rhs,
            }))
        })
        .collect::<Result<_, _>>()?;
    let flagged: Vec<bool> = rows.iter().map(|x| x.as_ref().is_some_and(|x| !x.pass)).collect();
    let set = ExceptionSet::from_cells(&grid, &flagged, horizon);
    let skipped = grid.iter().zip(&rows).filter(|(_, x)| x.is_none()).map(|(g, _)| *g).collect();
    Ok(LogDiffReport {
        density: set.densities(),
        set,
        rows: rows.into_iter().flatten().collect(),
        skipped,
        negative_control: is_exp_exp(model),
    })
}

// ------------------------------------------------- example product

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub r: f64,
    pub t_f: f64,
    pub t_f3: f64,
    pub m_quotient: f64,
    /// m(r, f_3/f) / T(r, f_3)
    pub proximity_ratio: f64,
    /// T(r, f) / T(r, f_3)
    pub characteristic_ratio: f64,
    pub err: f64,
}

pub const EXAMPLE_POINTS: usize = 6;

/// Window radii r_s − 1/2 + k/12, k = 0..5 (r_s itself excluded).
pub fn example_window(r_s: f64) -> Vec<f64> {
    (0..EXAMPLE_POINTS).map(|k| r_s - 0.5 + k as f64 / 12.0).collect()
}

/// Table over the window below level s of a product model, shift c.
pub fn example_product_report(model: &MeromorphicModel, s: usize, c: Complex64) -> Result<Vec<ExampleRow>, CharError> {
    let MeromorphicModel::CanonicalProduct(p) = model else {
        return Err(CharError::Precondition("expects a canonical product".into()));
    };
    let level = p
        .levels
        .get(s.wrapping_sub(1))
        .ok_or_else(|| CharError::Precondition(format!("model has no level {s}")))?;
    let shifted = model.clone().shifted(c);
    example_window(level.radius)
        .par_iter()
        .map(|&r| {
            let tf = characteristic_t(model, r)?;
            let tf3 = characteristic_t(&shifted, r)?;
            let mq = log_diff_m(model, c, r)?;
            Ok(ExampleRow {
                r,
                t_f: tf.t,
                t_f3: tf3.t,
                m_quotient: mq.value,
                proximity_ratio: mq.value / tf3.t,
                characteristic_ratio: tf.t / tf3.t,
                err: tf.quadrature_error_estimate + tf3.quadrature_error_estimate + mq.error,
            })
        })
        .collect()
}

pub fn render_example_csv(rows: &[ExampleRow]) -> String {
    let mut s = String::from("r,T_f,T_f3,m_f3_over_f,proximity_ratio,characteristic_ratio,err\n");
    for x in rows {
        s.push_str(&format!(
            "{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}\n",
            x.r, x.t_f, x.t_f3, x.m_quotient, x.proximity_ratio, x.characteristic_ratio, x.err
        ));
    }
    s
}

// ------------------------------------------ finite-order shift identity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualFit {
    /// (r, N(r + |c|) − N(r))
    pub residuals: Vec<(f64, f64)>,
    /// Least-squares slope of log|residual| against log r; None when the
    /// residual vanishes identically.
    pub exponent: Option<f64>,
}

pub fn shift_identity_finite_order(
    model: &MeromorphicModel,
    c: Complex64,
    kind: Counting,
    r_lo: f64,
    horizon: f64,
    ratio: f64,
) -> ResidualFit {
    let a = c.norm();
    let residuals: Vec<(f64, f64)> = geometric_grid(r_lo, horizon, ratio)
        .into_iter()
        .map(|r| (r, model.counting(r + a, kind) - model.counting(r, kind)))
        .collect();
    let pts: Vec<(f64, f64)> = residuals
        .iter()
        .filter(|(_, v)| v.abs() > 0.0)
        .map(|(r, v)| (r.ln(), v.abs().ln()))
        .collect();
    let exponent = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    ResidualFit { residuals, exponent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_example_product, parse_model, DEFAULT_N_CAP};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn baselines() {
        let z = parse_model("rational:z").unwrap();
        for r in [2.0, 10.0, 100.0] {
            let s = characteristic_t(&z, r).unwrap();
            assert!((s.m - f64::ln(r)).abs() < 1e-9 && s.n == 0.0);
        }
        let e = MeromorphicModel::exp_z();
        for r in [5.0, 50.0] {
            let s = characteristic_t(&e, r).unwrap();
            assert!((s.t * PI / r - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn exp_exp_shift() {
        let f = MeromorphicModel::ExpExp;
        let f1 = f.clone().shifted(c(1.0, 0.0));
        for r in [3.0, 4.0] {
            let a = proximity_m(&f, r).unwrap().value;
            let b = proximity_m(&f1, r).unwrap().value;
            assert!((b / a - E).abs() < 1e-6);
        }
    }

    #[test]
    fn error_estimate_bounds_rerun() {
        let m = parse_model("rational:{z^3-2}/{z^2+z+5}").unwrap();
        let a = proximity_m(&m, 2.3).unwrap();
        let tight = QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-14,
            max_panels: 1_000_000,
        };
        let b = proximity_with(&m, 2.3, &tight).unwrap();
        assert!((a.value - b.value).abs() <= a.error + b.error + 1e-14);
    }

    #[test]
    fn shift_check_simple_pole() {
        let m = parse_model("rational:1/(z-1)").unwrap();
        let rows = shift_sweep(&m, c(1.0, 0.0), 3.0, 300.0, 1.2).unwrap();
        assert!(rows.iter().all(|x| x.pass));
        let k = shift_constants(&m, c(0.0, 0.0)).unwrap();
        assert!(shift_inequality_check(&m, c(0.0, 0.0), 5.0, &k).unwrap().pass);
    }

    #[test]
    fn log_diff_values() {
        let e = MeromorphicModel::exp_z();
        assert!((log_diff_m(&e, c(1.0, 0.0), 7.0).unwrap().value - 1.0).abs() < 1e-9);
        let z = parse_model("rational:z").unwrap();
        let mut last = f64::INFINITY;
        for r in [2.0, 10.0, 100.0] {
            let v = log_diff_m(&z, c(1.0, 0.0), r).unwrap().value;
            assert!(v <= 2f64.ln() && v < last);
            last = v;
        }
        assert_eq!(log_diff_m(&z, c(0.0, 0.0), 3.0).unwrap().value, 0.0);
        let rep = verify_logdiff_bound(&e, c(1.0, 0.0), 0.25, 1.0, 10.0, 1e3, 1.1).unwrap();
        assert!(rep.set.intervals.is_empty() && !rep.negative_control);
        assert!(verify_logdiff_bound(&MeromorphicModel::ExpExp, c(1.0, 0.0), 0.25, 1.0, 3.0, 4.0, 1.1)
            .unwrap()
            .negative_control);
    }

    #[test]
    fn pole_on_circle_is_perturbed() {
        let m = parse_model("rational:1/(z-2)").unwrap();
        let p = proximity_m(&m, 2.0).unwrap();
        assert!(p.r > 2.0 && p.value.is_finite());
    }

    #[test]
    fn finite_order_residuals() {
        let m = parse_model("rational:1/(z-1)").unwrap();
        let fit = shift_identity_finite_order(&m, c(1.0, 0.0), Counting::Poles, 10.0, 1e4, 1.1);
        assert!(fit.exponent.unwrap() <= 0.0);
        let poly = parse_model("rational:z^3+1").unwrap();
        let fit = shift_identity_finite_order(&poly, c(1.0, 0.0), Counting::Poles, 10.0, 1e4, 1.1);
        assert!(fit.exponent.is_none() && fit.residuals.iter().all(|x| x.1 == 0.0));
    }

    #[test]
    fn example_product_runs() {
        let (f, _) = build_example_product(2, 1, DEFAULT_N_CAP).unwrap();
        let rows = example_product_report(&f, 2, c(3.0, 0.0)).unwrap();
        assert_eq!(rows.len(), EXAMPLE_POINTS);
        assert!(rows.iter().all(|x| x.proximity_ratio > 0.5 && x.characteristic_ratio < 1.0));
    }
}
