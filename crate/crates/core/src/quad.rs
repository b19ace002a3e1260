//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut fv = [0.0; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = rk * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let asc = asc * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    Panel {
        a,
        b,
        value: rk * h,
        error: err,
    }
}

/// Pairwise summation in position order.
fn pairwise(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let m = v.len() / 2;
    pairwise(&v[..m]) + pairwise(&v[m..])
}

/// Integrates `f` over [a, b], starting from panels split at `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadConfig) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap: BinaryHeap<Panel> = pts.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut done: Vec<Panel> = Vec::new();
    let min_width = (b - a).abs() * 1e-15;
    let totals = |heap: &BinaryHeap<Panel>, done: &[Panel]| {
        let v: f64 = heap.iter().chain(done).map(|p| p.value).sum();
        let e: f64 = heap.iter().chain(done).map(|p| p.error).sum();
        (v, e)
    };
    let (mut value, mut error) = totals(&heap, &done);
    let mut converged = true;
    let mut iter = 0usize;
    while error > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        if heap.len() + done.len() >= cfg.max_panels {
            converged = false;
            break;
        }
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if (p.b - p.a) <= min_width || mid <= p.a || mid >= p.b {
            done.push(p);
            if heap.is_empty() {
                converged = false;
                break;
            }
            continue;
        }
        let l = gk15(&f, p.a, mid);
        let r = gk15(&f, mid, p.b);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        iter += 1;
        if iter.is_multiple_of(256) {
            (value, error) = totals(&heap, &done);
        }
    }
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(done);
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let vals: Vec<f64> = all.iter().map(|p| p.value).collect();
    let errs: Vec<f64> = all.iter().map(|p| p.error).collect();
    let error = pairwise(&errs);
    QuadResult {
        value: pairwise(&vals),
        error,
        panels: all.len(),
        converged: converged && error <= cfg.abs_tol.max(cfg.rel_tol * pairwise(&vals).abs()) * 1.0001,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_and_kinked() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| x.sin(), 0.0, PI, &[], &cfg);
        assert!((r.value - 2.0).abs() < 1e-12 && r.converged);
        let r = integrate(|x| x.cos().max(0.0), 0.0, 2.0 * PI, &[], &cfg);
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
        let r = integrate(|x: f64| x.abs().ln(), -1.0, 1.0, &[0.0], &cfg);
        assert!((r.value + 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadConfig {
            max_panels: 4,
            ..QuadConfig::default()
        };
        let r = integrate(|x| (1.0 / x).sin(), 1e-3, 1.0, &[], &cfg);
        assert!(!r.converged);
    }
}
