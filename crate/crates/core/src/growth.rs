//! Growth-function lemmas: the φ functionals, exceptional-set scans,
//! the Edrei–Fuchs measure bound and density reports.
//!
//! Values are handled on the logarithmic scale (`log_t`) so that e^r and
//! faster functions can be scanned far out without overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{integrate, QuadConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("T({r}) = {value} does not exceed e")]
    TooSmall { r: f64, value: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid sampled growth data: {0}")]
    BadSample(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Growth data on [1, ∞) with closed forms or samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GrowthFunction {
    /// r^ρ
    Power(f64),
    /// β·exp(r^α)
    ExpRoot { alpha: f64, beta: f64 },
    /// e^r
    PureExp,
    /// log r
    Log,
    Max(Vec<GrowthFunction>),
    Sum(Vec<GrowthFunction>),
    /// ∫_1^r A(t)/t dt
    Integral(Box<GrowthFunction>),
    Sampled(SampledGrowth),
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl GrowthFunction {
    pub fn exp_root(alpha: f64, beta: f64) -> Self {
        GrowthFunction::ExpRoot { alpha, beta }
    }

    /// log T(r).
    pub fn log_t(&self, r: f64) -> f64 {
        match self {
            GrowthFunction::Power(rho) => rho * r.ln(),
            GrowthFunction::ExpRoot { alpha, beta } => beta.ln() + r.powf(*alpha),
            GrowthFunction::PureExp => r,
            GrowthFunction::Log => r.ln().ln(),
            GrowthFunction::Max(v) => v.iter().map(|g| g.log_t(r)).fold(f64::NEG_INFINITY, f64::max),
            GrowthFunction::Sum(v) => log_sum_exp(&v.iter().map(|g| g.log_t(r)).collect::<Vec<_>>()),
            GrowthFunction::Integral(a) => {
                if let GrowthFunction::Power(rho) = **a {
                    if rho.abs() < 1e-300 {
                        return r.ln().ln();
                    }
                    return ((r.powf(rho) - 1.0) / rho).ln();
                }
                if r <= 1.0 {
                    return f64::NEG_INFINITY;
                }
                let q = integrate(
                    |s: f64| {
                        let t = s.exp();
                        a.log_t(t).exp()
                    },
                    0.0,
                    r.ln(),
                    &[],
                    &QuadConfig {
                        abs_tol: 1e-12,
                        rel_tol: 1e-11,
                        ..QuadConfig::default()
                    },
                );
                q.value.ln()
            }
            GrowthFunction::Sampled(s) => s.log_t(r),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.log_t(r).exp()
    }
}

/// Sampled T on an increasing radius grid, interpolated linearly in log r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrowth {
    grid: Vec<f64>,
    values: Vec<f64>,
    /// Largest relative lift applied by the monotone repair.
    pub repair: f64,
}

const SAMPLE_TOL: f64 = 1e-9;

impl SampledGrowth {
    /// Repairs to a non-decreasing envelope (at most 1e-9 relative) and
    /// checks convexity of T in log r.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, GrowthError> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(GrowthError::BadSample("need at least two (r, T) pairs".into()));
        }
        if grid[0] < 1.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GrowthError::BadSample("grid must be increasing and start at r ≥ 1".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(GrowthError::BadSample("values must be positive and finite".into()));
        }
        let mut repaired = values.clone();
        let mut repair: f64 = 0.0;
        for i in 1..repaired.len() {
            if repaired[i] < repaired[i - 1] {
                repair = repair.max((repaired[i - 1] - repaired[i]) / repaired[i - 1]);
                repaired[i] = repaired[i - 1];
            }
        }
        if repair > SAMPLE_TOL {
            return Err(GrowthError::BadSample(format!("not non-decreasing (relative dip {repair:.3e})")));
        }
        let s: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
        let scale = repaired.last().copied().unwrap_or(1.0);
        for i in 1..s.len() - 1 {
            let left = (repaired[i] - repaired[i - 1]) / (s[i] - s[i - 1]);
            let right = (repaired[i + 1] - repaired[i]) / (s[i + 1] - s[i]);
            if right < left - SAMPLE_TOL * scale.max(left.abs()) {
                return Err(GrowthError::BadSample(format!("not convex in log r at r = {}", grid[i])));
            }
        }
        Ok(SampledGrowth {
            grid,
            values: repaired,
            repair,
        })
    }

    fn log_t(&self, r: f64) -> f64 {
        let s = r.ln();
        let n = self.grid.len();
        let i = match self.grid.partition_point(|g| *g <= r) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (s0, s1) = (self.grid[i].ln(), self.grid[i + 1].ln());
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let v = v0 + (v1 - v0) * (s - s0) / (s1 - s0);
        v.max(self.values[0].min(v0)).ln()
    }
}

/// Geometric grid from `lo` to `hi` (both included).
pub fn geometric_grid(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut g = Vec::new();
    let n = ((hi / lo).ln() / ratio.ln()).floor() as usize;
    for k in 0..=n {
        g.push(lo * ratio.powi(k as i32));
    }
    if g.last().is_some_and(|x| *x < hi * (1.0 - 1e-12)) {
        g.push(hi);
    }
    g
}

/// Running maximum of t / max{1, log T(t)} on a fine grid.
pub struct PhiTable {
    radii: Vec<f64>,
    running: Vec<f64>,
}

const PHI_RATIO: f64 = 1.0005;

impl PhiTable {
    pub fn new(t: &GrowthFunction, r_max: f64) -> Self {
        let radii = geometric_grid(1.0, r_max.max(1.0), PHI_RATIO);
        let vals: Vec<f64> = radii.par_iter().map(|r| r / t.log_t(*r).max(1.0)).collect();
        let mut running = Vec::with_capacity(vals.len());
        let mut m = f64::NEG_INFINITY;
        for v in vals {
            m = m.max(v);
            running.push(m);
        }
        PhiTable { radii, running }
    }

    pub fn phi(&self, t: &GrowthFunction, r: f64) -> f64 {
        let k = self.radii.partition_point(|x| *x <= r);
        let here = r / t.log_t(r).max(1.0);
        if k == 0 {
            return here;
        }
        self.running[k - 1].max(here)
    }
}

/// φ(r) = max_{1≤t≤r} t / max{1, log T(t)}.
pub fn phi(t: &GrowthFunction, r: f64) -> f64 {
    PhiTable::new(t, r).phi(t, r)
}

/// φ_{T,ε}(r) = r / ((log log T(r))^{1+ε} log T(r)), defined for T(r) > e.
pub fn phi_eps(t: &GrowthFunction, eps: f64, r: f64) -> Result<f64, GrowthError> {
    let lt = t.log_t(r);
    if lt <= 1.0 {
        return Err(GrowthError::TooSmall { r, value: lt.exp() });
    }
    Ok(r / (lt.ln().powf(1.0 + eps) * lt))
}

/// Disjoint ordered intervals inside [1, horizon].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionSet {
    pub intervals: Vec<(f64, f64)>,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lower_density: f64,
    pub upper_density: f64,
    pub linear_measure: f64,
    pub log_measure: f64,
}

impl ExceptionSet {
    pub fn empty(horizon: f64) -> Self {
        ExceptionSet {
            intervals: Vec::new(),
            horizon,
        }
    }

    /// Clips to [1, horizon], sorts and merges touching intervals.
    pub fn from_intervals(mut iv: Vec<(f64, f64)>, horizon: f64) -> Self {
        iv = iv
            .into_iter()
            .map(|(a, b)| (a.max(1.0), b.min(horizon)))
            .filter(|(a, b)| b > a)
            .collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        ExceptionSet { intervals: out, horizon }
    }

    /// Grid cells [r_i, r_{i+1}) whose left point is flagged.
    pub fn from_cells(grid: &[f64], flagged: &[bool], horizon: f64) -> Self {
        let iv = (0..grid.len())
            .filter(|&i| flagged[i])
            .map(|i| (grid[i], grid.get(i + 1).copied().unwrap_or(horizon)))
            .collect();
        Self::from_intervals(iv, horizon)
    }

    pub fn linear_measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |acc, (a, b)| acc + (b - a))
    }

    pub fn log_measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |acc, (a, b)| acc + (b / a).ln())
    }

    /// |E ∩ [1, r]|.
    pub fn measure_up_to(&self, r: f64) -> f64 {
        self.intervals
            .iter()
            .take_while(|(a, _)| *a < r)
            .fold(0.0, |acc, (a, b)| acc + (b.min(r) - a))
    }

    /// Min and max of |E ∩ [1, r]| / r over the tail window r ∈ [√R, R].
    /// The ratio is monotone between interval endpoints, so endpoints suffice.
    pub fn densities(&self) -> DensityReport {
        let r_max = self.horizon;
        let r_min = r_max.sqrt().max(1.0);
        let mut pts = vec![r_min, r_max];
        for (a, b) in &self.intervals {
            for x in [*a, *b] {
                if x > r_min && x < r_max {
                    pts.push(x);
                }
            }
        }
        let rho: Vec<f64> = pts.iter().map(|r| self.measure_up_to(*r) / r).collect();
        DensityReport {
            lower_density: rho.iter().copied().fold(f64::INFINITY, f64::min),
            upper_density: rho.iter().copied().fold(0.0, f64::max),
            linear_measure: self.linear_measure(),
            log_measure: self.log_measure(),
        }
    }
}

/// Relative growth from `before` to `after` is at most `tol`.
pub fn doubling_stable(before: f64, after: f64, tol: f64) -> bool {
    after <= before * (1.0 + tol) + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureCause {
    /// The displayed inequality fails.
    Inequality,
    /// φ has stopped growing: φ(r) < 2φ(√r).
    PhiStalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: f64,
    /// log of the left side.
    pub lhs: f64,
    /// log of the right side.
    pub rhs: f64,
    pub pass: bool,
    pub causes: Vec<FailureCause>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub set: ExceptionSet,
    pub density: DensityReport,
    /// Grid points excluded by the lemma's preconditions.
    pub skipped: Vec<f64>,
    pub inequality_failures: usize,
    pub stalled_points: usize,
}

impl ScanReport {
    fn assemble(grid: &[f64], rows: Vec<Option<ScanRow>>, horizon: f64) -> Self {
        let flagged: Vec<bool> = rows.iter().map(|r| r.as_ref().is_some_and(|x| !x.pass)).collect();
        let set = ExceptionSet::from_cells(grid, &flagged, horizon);
        let skipped = grid
            .iter()
            .zip(&rows)
            .filter(|(_, r)| r.is_none())
            .map(|(g, _)| *g)
            .collect();
        let rows: Vec<ScanRow> = rows.into_iter().flatten().collect();
        let count = |c| rows.iter().filter(|r| r.causes.contains(&c)).count();
        ScanReport {
            density: set.densities(),
            inequality_failures: count(FailureCause::Inequality),
            stalled_points: count(FailureCause::PhiStalled),
            rows,
            set,
            skipped,
        }
    }

    /// Zero-density certificate at the horizon.
    pub fn certifies(&self, threshold: f64) -> bool {
        self.density.lower_density <= threshold
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,lhs,rhs,pass\n");
        for row in &self.rows {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e},{}\n", row.r, row.lhs, row.rhs, row.pass));
        }
        s
    }
}

fn check_open(name: &str, v: f64, lo: f64, hi: f64) -> Result<(), GrowthError> {
    if v > lo && v < hi {
        Ok(())
    } else {
        Err(GrowthError::BadParameter(format!("{name} = {v} must lie in ({lo}, {hi})")))
    }
}

/// T(r + φ^δ) ≤ T(r)(1 + 4φ^{δ−1/2}) on a geometric grid over [1, R].
/// A point also fails while φ has not yet started to diverge.
pub fn scan_lemma21(t: &GrowthFunction, delta: f64, horizon: f64, ratio: f64) -> Result<ScanReport, GrowthError> {
    check_open("delta", delta, 0.0, 0.5)?;
    check_open("ratio", ratio, 1.0, f64::INFINITY)?;
    let grid = geometric_grid(1.0, horizon, ratio);
    let table = PhiTable::new(t, horizon);
    let rows: Vec<Option<ScanRow>> = grid
        .par_iter()
        .map(|&r| {
            let ph = table.phi(t, r);
            let lhs = t.log_t(r + ph.powf(delta));
            let rhs = t.log_t(r) + (4.0 * ph.powf(delta - 0.5)).ln_1p();
            let mut causes = Vec::new();
            if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                causes.push(FailureCause::Inequality);
            }
            if ph < 2.0 * table.phi(t, r.sqrt()) {
                causes.push(FailureCause::PhiStalled);
            }
            Some(ScanRow {
                r,
                lhs,
                rhs,
                pass: causes.is_empty(),
                causes,
            })
        })
        .collect();
    Ok(ScanReport::assemble(&grid, rows, horizon))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Report {
    /// T(r + φ_ε^δ) ≤ T(r)(1 + 4e φ_ε^{δ−1}).
    pub increment: ScanReport,
    /// T(r + φ_ε) ≤ e·T(r).
    pub reach: ScanReport,
}

/// Scans both displayed conclusions; points with T(r) ≤ e or outside the
/// guards 2^{1/(1−δ)} < φ_ε(r) < r are skipped.
pub fn scan_lemma22(
    t: &GrowthFunction,
    delta: f64,
    eps: f64,
    horizon: f64,
    ratio: f64,
) -> Result<Lemma22Report, GrowthError> {
    check_open("delta", delta, 0.0, 1.0)?;
    check_open("eps", eps, 0.0, f64::INFINITY)?;
    check_open("ratio", ratio, 1.0, f64::INFINITY)?;
    let grid = geometric_grid(1.0, horizon, ratio);
    let floor = 2f64.powf(1.0 / (1.0 - delta));
    let pairs: Vec<Option<(ScanRow, ScanRow)>> = grid
        .par_iter()
        .map(|&r| {
            let pe = phi_eps(t, eps, r).ok()?;
            if !(pe > floor && pe < r) {
                return None;
            }
            let base = t.log_t(r);
            let row = |lhs: f64, rhs: f64| {
                let ok = lhs <= rhs + 1e-12 * rhs.abs().max(1.0);
                ScanRow {
                    r,
                    lhs,
                    rhs,
                    pass: ok,
                    causes: if ok { vec![] } else { vec![FailureCause::Inequality] },
                }
            };
            let inc = row(
                t.log_t(r + pe.powf(delta)),
                base + (4.0 * std::f64::consts::E * pe.powf(delta - 1.0)).ln_1p(),
            );
            let reach = row(t.log_t(r + pe), base + 1.0);
            Some((inc, reach))
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().map(|p| p.map(|(x, y)| (Some(x), Some(y))).unwrap_or((None, None))).unzip();
    Ok(Lemma22Report {
        increment: ScanReport::assemble(&grid, a, horizon),
        reach: ScanReport::assemble(&grid, b, horizon),
    })
}

/// Finite-order branch: T(r + h) ≤ T(r)(1 + 4hK/r) with supplied h, K.
pub fn scan_lemma22_finite_order(
    t: &GrowthFunction,
    h: f64,
    k: f64,
    horizon: f64,
    ratio: f64,
) -> Result<ScanReport, GrowthError> {
    check_open("h", h, 0.0, f64::INFINITY)?;
    check_open("ratio", ratio, 1.0, f64::INFINITY)?;
    let grid = geometric_grid(1.0, horizon, ratio);
    let rows = grid
        .par_iter()
        .map(|&r| {
            let lhs = t.log_t(r + h);
            let rhs = t.log_t(r) + (4.0 * h * k / r).ln_1p();
            let ok = lhs <= rhs + 1e-12 * rhs.abs().max(1.0);
            Some(ScanRow {
                r,
                lhs,
                rhs,
                pass: ok,
                causes: if ok { vec![] } else { vec![FailureCause::Inequality] },
            })
        })
        .collect();
    Ok(ScanReport::assemble(&grid, rows, horizon))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdreiFuchs {
    /// Linear measure of {r ∈ [a, A] : ψ(r + φ(ψ(r))) ≥ ψ(r) + 1}.
    pub measured: f64,
    /// ∫_{ψ(a)−1}^{ψ(A)} φ(t) dt.
    pub bound: f64,
    pub bound_error: f64,
}

impl EdreiFuchs {
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

const EF_CELLS: usize = 200_000;

/// Measures the exceptional set of the Edrei–Fuchs lemma on [a, A] and the
/// integral bound for it.
pub fn edrei_fuchs_bound<P, F>(psi: P, phi: F, a: f64, big_a: f64) -> Result<EdreiFuchs, GrowthError>
where
    P: Fn(f64) -> f64 + Sync,
    F: Fn(f64) -> f64 + Sync,
{
    if !(big_a > a) {
        return Err(GrowthError::BadParameter("need a < A".into()));
    }
    let step = (big_a - a) / EF_CELLS as f64;
    let xs: Vec<f64> = (0..=EF_CELLS).map(|i| a + step * i as f64).collect();
    let ps: Vec<f64> = xs.par_iter().map(|x| psi(*x)).collect();
    if ps.windows(2).any(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0)) {
        return Err(GrowthError::HypothesisViolation("ψ is not non-decreasing".into()));
    }
    let (lo, hi) = (ps[0] - 1.0, ps[EF_CELLS]);
    let ts: Vec<f64> = (0..=1000).map(|i| lo + (hi - lo) * i as f64 / 1000.0).collect();
    let fs: Vec<f64> = ts.iter().map(|t| phi(*t)).collect();
    if fs.iter().any(|v| !(*v >= 0.0)) {
        return Err(GrowthError::HypothesisViolation("φ must be non-negative".into()));
    }
    if fs.windows(2).any(|w| w[1] > w[0] + 1e-12 * w[0].abs().max(1e-300)) {
        return Err(GrowthError::HypothesisViolation("φ is not non-increasing".into()));
    }
    let member = |r: f64| {
        let p = psi(r);
        psi(r + phi(p)) >= p + 1.0
    };
    let flags: Vec<bool> = xs.par_iter().map(|x| member(*x)).collect();
    let cells: Vec<f64> = (0..EF_CELLS)
        .into_par_iter()
        .map(|i| {
            let (x0, x1) = (xs[i], xs[i + 1]);
            match (flags[i], flags[i + 1]) {
                (true, true) => x1 - x0,
                (false, false) => 0.0,
                (f0, _) => {
                    let (mut l, mut h) = (x0, x1);
                    for _ in 0..60 {
                        let m = 0.5 * (l + h);
                        if member(m) == f0 {
                            l = m;
                        } else {
                            h = m;
                        }
                    }
                    if f0 {
                        l - x0
                    } else {
                        x1 - h
                    }
                }
            }
        })
        .collect();
    let measured = cells.iter().sum();
    let q = if hi > lo {
        integrate(&phi, lo, hi, &[], &QuadConfig { abs_tol: 1e-12, rel_tol: 1e-10, ..QuadConfig::default() })
    } else {
        crate::quad::QuadResult { value: 0.0, error: 0.0, panels: 0, converged: true }
    };
    Ok(EdreiFuchs {
        measured,
        bound: q.value,
        bound_error: q.error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRatioReport {
    pub d: f64,
    pub ratios: Vec<(f64, f64)>,
    /// Minimum ratio over the upper half of the grid (in log r).
    pub tail_min: f64,
    pub holds: bool,
    pub boundary: bool,
}

/// Diagnostic for liminf N(dr)/N(r) ≥ d on a geometric grid.
pub fn scan_shift_ratio(n: &GrowthFunction, d: f64, r_min: f64, r_max: f64, ratio: f64) -> Result<ShiftRatioReport, GrowthError> {
    check_open("d", d, 1.0, f64::INFINITY)?;
    let grid = geometric_grid(r_min, r_max, ratio);
    let ratios: Vec<(f64, f64)> = grid.iter().map(|&r| (r, (n.log_t(d * r) - n.log_t(r)).exp())).collect();
    let cut = (r_min * r_max).sqrt();
    let tail_min = ratios
        .iter()
        .filter(|(r, _)| *r >= cut)
        .map(|(_, q)| *q)
        .fold(f64::INFINITY, f64::min);
    Ok(ShiftRatioReport {
        d,
        holds: tail_min >= d * (1.0 - 1e-9),
        boundary: (tail_min - d).abs() <= 1e-6 * d,
        ratios,
        tail_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_closed_forms() {
        for r in [1.0, 2.0, 50.0, 1e4] {
            assert!((phi(&GrowthFunction::PureExp, r) - 1.0).abs() < 1e-15);
        }
        let sq = GrowthFunction::Power(2.0);
        for r in [20.0, 100.0, 1e4] {
            let exact = r / (2.0 * f64::ln(r));
            assert!((phi(&sq, r) - exact).abs() < 1e-9 * exact);
        }
        // below e^2 the running max is attained at √e where log T = 1
        assert!((phi(&sq, 3.0) - 1f64.exp().sqrt()).abs() < 1e-3);
        let table = PhiTable::new(&sq, 1e3);
        let g = geometric_grid(1.0, 1e3, 1.01);
        assert!(g.windows(2).all(|w| table.phi(&sq, w[1]) >= table.phi(&sq, w[0])));
    }

    #[test]
    fn phi_eps_values() {
        let sq = GrowthFunction::Power(2.0);
        let r = 10f64.exp();
        let v = phi_eps(&sq, 1.0, r).unwrap();
        assert!((v - r / (20f64.ln().powi(2) * 20.0)).abs() < 1e-9 * v);
        assert!(matches!(phi_eps(&sq, 1.0, 1.5), Err(GrowthError::TooSmall { .. })));
        assert!(phi_eps(&sq, 0.5, r).unwrap() >= phi_eps(&sq, 2.0, r).unwrap());
    }

    #[test]
    fn densities_examples() {
        let full = ExceptionSet::from_intervals(vec![(1.0, 1e6)], 1e6);
        let d = full.densities();
        assert!(d.upper_density <= 1.0 && d.lower_density >= 1.0 - 1e-3);
        let h = 2f64.powi(20);
        let dyadic = ExceptionSet::from_intervals((0..=20).map(|k| (2f64.powi(k), 2f64.powi(k) + 1.0)).collect(), h);
        assert!((dyadic.linear_measure() - 20.0).abs() < 1e-12);
        assert!(dyadic.densities().upper_density < 0.02);
        let e = ExceptionSet::empty(100.0).densities();
        assert_eq!((e.lower_density, e.upper_density, e.linear_measure, e.log_measure), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn lemma21_controls() {
        let rep = scan_lemma21(&GrowthFunction::Power(2.0), 0.25, 1e4, 1.01).unwrap();
        assert_eq!(rep.inequality_failures, 0);
        assert!(rep.set.intervals.iter().all(|(_, b)| *b < 100.0));
        let neg = scan_lemma21(&GrowthFunction::PureExp, 0.25, 1e4, 1.01).unwrap();
        assert!(!neg.certifies(0.05));
        assert_eq!(neg.stalled_points, neg.rows.len());
    }

    #[test]
    fn lemma22_examples() {
        let p5 = scan_lemma22(&GrowthFunction::Power(5.0), 0.5, 1.0, 1e4, 1.01).unwrap();
        let p5b = scan_lemma22(&GrowthFunction::Power(5.0), 0.5, 1.0, 2e4, 1.01).unwrap();
        assert!(!p5.increment.skipped.is_empty());
        assert!(doubling_stable(p5.increment.density.log_measure, p5b.increment.density.log_measure, 0.1));
        let int = GrowthFunction::Integral(Box::new(GrowthFunction::Power(1.0)));
        assert!((int.value(5.0) - 4.0).abs() < 1e-12);
        let rep = scan_lemma22(&int, 0.5, 1.0, 1e4, 1.01).unwrap();
        assert_eq!(rep.increment.inequality_failures + rep.reach.inequality_failures, 0);
        assert!(!rep.increment.rows.is_empty());
        let fin = scan_lemma22_finite_order(&GrowthFunction::Power(2.0), 1.0, 1.0, 1e3, 1.01).unwrap();
        assert_eq!(fin.inequality_failures, 0);
    }

    #[test]
    fn integral_by_quadrature() {
        let g = GrowthFunction::Integral(Box::new(GrowthFunction::Sum(vec![GrowthFunction::Power(1.0), GrowthFunction::Power(2.0)])));
        let r: f64 = 7.0;
        assert!((g.value(r) - ((r - 1.0) + (r * r - 1.0) / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn edrei_fuchs_degenerate() {
        let e = edrei_fuchs_bound(|r| 3.0 * r, |_| 0.0, 1.0, 5.0).unwrap();
        assert_eq!((e.measured, e.bound), (0.0, 0.0));
        let e = edrei_fuchs_bound(|_| 4.0, |t| 1.0 / t, 1.0, 5.0).unwrap();
        assert_eq!(e.measured, 0.0);
        assert!(edrei_fuchs_bound(|r| -r, |_| 1.0, 1.0, 2.0).is_err());
        let stair = edrei_fuchs_bound(|r: f64| r.floor(), |_| 0.5, 1.0, 50.0).unwrap();
        assert!((stair.measured - 24.5).abs() < 1e-6 && stair.slack() >= 0.0);
    }

    #[test]
    fn sampled_checks() {
        let grid: Vec<f64> = (1..=50).map(|k| k as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|r| r * r).collect();
        let s = SampledGrowth::new(grid.clone(), vals.clone()).unwrap();
        let g = GrowthFunction::Sampled(s);
        assert!((g.value(10.0) - 100.0).abs() < 1e-9);
        let mut dip = vals.clone();
        dip[10] *= 0.9;
        assert!(SampledGrowth::new(grid.clone(), dip).is_err());
        let concave: Vec<f64> = grid.iter().map(|r| 1.0 + r.ln().sqrt()).collect();
        assert!(SampledGrowth::new(grid, concave).is_err());
    }

    #[test]
    fn shift_ratio() {
        let r = scan_shift_ratio(&GrowthFunction::Power(2.0), 2.0, 10.0, 1e4, 1.05).unwrap();
        assert!(r.holds && !r.boundary && (r.tail_min - 4.0).abs() < 1e-9);
        let r = scan_shift_ratio(&GrowthFunction::Power(1.0), 2.0, 10.0, 1e4, 1.05).unwrap();
        assert!(r.holds && r.boundary);
        let r = scan_shift_ratio(&GrowthFunction::Log, 2.0, 10.0, 1e4, 1.05).unwrap();
        assert!(!r.holds);
    }
}
