//! Randomized invariants for the parser, degree calculus, growth lemmas,
//! Nevanlinna functionals and pole chains.

mod common;

use diffnev::clunie::{admissible, degree_profile, verdict, PStats};
use diffnev::exact::{rat, rat_int, rat_to_f64, Poly, RatFun, Rational};
use diffnev::growth::{edrei_fuchs_bound, geometric_grid, phi, GrowthFunction};
use diffnev::model::{zpoly, Counting, MeromorphicModel, RationalModel};
use diffnev::poleprop::chain;
use diffnev::{charfn, parse_equation, ClunieEquation, Coefficient, DiffPolynomial, Term};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scaled(d: &DiffPolynomial, factors: &[i64]) -> DiffPolynomial {
    let terms = d
        .terms()
        .iter()
        .zip(factors.iter().cycle())
        .map(|(t, &k)| Term {
            coeff: match &t.coeff {
                Coefficient::Rational(r) => Coefficient::Rational(r.mul(&RatFun::from_rational(rat_int(k)))),
                c => c.clone(),
            },
            index: t.index.clone(),
        })
        .collect();
    DiffPolynomial::new(d.shift_values(), terms).unwrap()
}

fn reversed(d: &DiffPolynomial) -> DiffPolynomial {
    let terms = d.terms().iter().rev().cloned().collect();
    DiffPolynomial::new(d.shift_values(), terms).unwrap()
}

fn functionals(d: &DiffPolynomial) -> Vec<u64> {
    let mut v = vec![
        d.total_degree().unwrap(),
        d.weight().unwrap(),
        d.kappa().unwrap(),
        d.deg0().unwrap(),
        d.ord0().unwrap(),
    ];
    v.extend((1..=d.n_shifts()).map(|j| d.shift_degree(j).unwrap()));
    v
}

fn oracle_eval(d: &DiffPolynomial, w: impl Fn(Complex64) -> Complex64, z: Complex64) -> (Complex64, f64) {
    let shifts = d.shift_values();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for t in d.terms() {
        let Coefficient::Rational(r) = &t.coeff else { panic!("symbolic") };
        let eval = |p: &Poly<Rational>| {
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| z.powu(k as u32) * rat_to_f64(c))
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
        };
        let mut term = eval(r.num()) / eval(r.den());
        let e = t.index.exponents();
        term *= w(z).powu(e[0] as u32);
        for (j, s) in shifts.iter().enumerate() {
            term *= w(z + s.to_c64()).powu(e[j + 1] as u32);
        }
        sum += term;
        scale += term.norm();
    }
    (sum, scale)
}

fn random_numeric_p(seed: u64) -> DiffPolynomial {
    let mut r = rng(seed);
    loop {
        let text = common::random_equation_text(&mut r);
        if let Ok(eq) = parse_equation(&text) {
            return eq.p;
        }
    }
}

fn random_model(seed: u64) -> MeromorphicModel {
    let mut r = rng(seed);
    let deg = r.gen_range(1..=3);
    common::random_rational(&mut r, deg)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn canonical_text_round_trips(seed in any::<u64>()) {
        let text = common::random_equation_text(&mut rng(seed));
        let eq = parse_equation(&text).unwrap();
        let canon = eq.to_canonical_text();
        let back = parse_equation(&canon).unwrap();
        prop_assert_eq!(&back, &eq);
        prop_assert_eq!(back.to_canonical_text(), canon);
    }

    #[test]
    fn parser_is_total_on_noise(text in "[wz0-9a-c+*/^(){}.i=! \\-]{0,48}") {
        if let Err(e) = parse_equation(&text) {
            prop_assert!(!e.to_string().is_empty());
        }
    }

    #[test]
    fn parser_is_total_on_mutations(seed in any::<u64>(), at in any::<prop::sample::Index>(), junk in "[-+*/^(){}=!wzi0-9]{0,3}", cut in 0usize..4) {
        let text = common::random_equation_text(&mut rng(seed));
        let k = at.index(text.len() + 1);
        let mut mutated = text[..k].to_string();
        mutated.push_str(&junk);
        mutated.push_str(&text[(k + cut).min(text.len())..]);
        let _ = parse_equation(&mutated);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn degree_functionals_are_ordered(seed in any::<u64>()) {
        let p = random_numeric_p(seed);
        prop_assert!(p.weight().unwrap() >= p.kappa().unwrap());
        prop_assert!(p.deg0().unwrap() <= p.total_degree().unwrap());
        prop_assert!(p.ord0().unwrap() <= p.deg0().unwrap());
    }

    #[test]
    fn functionals_ignore_order_and_scale(seed in any::<u64>(), factors in prop::collection::vec(prop_oneof![-7i64..=-1, 1i64..=7], 1..5)) {
        let p = random_numeric_p(seed);
        let base = functionals(&p);
        prop_assert_eq!(functionals(&reversed(&p)), base.clone());
        prop_assert_eq!(functionals(&scaled(&p, &factors)), base);
    }

    #[test]
    fn homogeneous_kappa_formula(seed in any::<u64>()) {
        let p = common::random_homogeneous_p(&mut rng(seed));
        prop_assert!(p.is_homogeneous().unwrap());
        let min0 = p.terms().iter().map(|t| t.index.unshifted()).min().unwrap();
        prop_assert_eq!(p.kappa().unwrap(), p.total_degree().unwrap() - min0);
        if p.ord0().unwrap() == 0 {
            prop_assert_eq!(p.kappa().unwrap(), p.total_degree().unwrap());
        }
    }

    #[test]
    fn admissible_profiles_bound_pole_excess(seed in any::<u64>(), du in 0u64..5, dq in 0u64..5, k in 0u64..4, factors in prop::collection::vec(prop_oneof![-5i64..=-1, 1i64..=5], 1..4)) {
        let p = common::random_homogeneous_p(&mut rng(seed));
        let eq = common::equation(common::w_range(0, du), p, common::w_range(k.min(dq), dq));
        let prof = degree_profile(&eq);
        prop_assert!(prof.is_consistent());
        if let Ok(a) = admissible(&eq) {
            if a.admissible {
                prop_assert!(prof.big_d_w <= prof.kappa_hat as i64);
            }
        }
        let s = ClunieEquation::new(scaled(&eq.u, &factors), scaled(&eq.p, &factors), scaled(&eq.q, &factors)).unwrap();
        prop_assert_eq!(degree_profile(&s), prof);
        prop_assert_eq!(PStats::of(&s.p), PStats::of(&eq.p));
        prop_assert_eq!(verdict(&s), verdict(&eq));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn evaluate_matches_term_oracle(seed in any::<u64>(), a in -1.0f64..1.0, b in -1.0f64..1.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let p = random_numeric_p(seed);
        let w = |z: Complex64| (z * Complex64::new(a, b)).exp() + z;
        let z = Complex64::new(x, y);
        let (want, scale) = oracle_eval(&p, w, z);
        if !want.is_finite() || !scale.is_finite() {
            return Ok(());
        }
        match p.evaluate(w, z) {
            Ok(got) => prop_assert!((got - want).norm() <= 1e-12 * scale.max(1e-300), "{got} vs {want}"),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn phi_is_non_decreasing(rho in 0.5f64..6.0, alpha in 0.1f64..0.9) {
        for t in [GrowthFunction::Power(rho), GrowthFunction::exp_root(alpha, 1.0)] {
            let grid = geometric_grid(3.0, 1e4, 1.05);
            let vals: Vec<f64> = grid.iter().map(|&r| phi(&t, r)).collect();
            for w in vals.windows(2) {
                prop_assert!(w[1] >= w[0] * (1.0 - 1e-9), "{t:?}: {} < {}", w[1], w[0]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn edrei_fuchs_measure_within_bound(scale in 0.5f64..4.0, power in 1.0f64..3.0, c in 0.05f64..2.0, q in 0.0f64..2.0) {
        let psi = move |r: f64| scale * r.powf(power);
        let phi = move |t: f64| c / t.max(1.0).powf(q);
        let ef = edrei_fuchs_bound(psi, phi, 1.0, 20.0).unwrap();
        prop_assert!(ef.measured <= ef.bound * (1.0 + 1e-6) + ef.bound_error, "{ef:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn characteristic_sample_invariants(seed in any::<u64>()) {
        let f = random_model(seed);
        let grid = geometric_grid(2.0, 400.0, 1.3);
        let mut prev = f64::NEG_INFINITY;
        let mut prev_err = 0.0;
        for &r in &grid {
            let s = charfn::characteristic_t(&f, r).unwrap();
            prop_assert_eq!(s.t, s.m + s.n);
            prop_assert!(s.t >= prev - prev_err - s.quadrature_error_estimate - 1e-9, "T dropped at r = {r}");
            prev = s.t;
            prev_err = s.quadrature_error_estimate;
        }
        for w in grid.windows(3) {
            let n = |r: f64| f.counting(r, Counting::Poles);
            let mid = (w[0] * w[2]).sqrt();
            prop_assert!(n(mid) <= 0.5 * (n(w[0]) + n(w[2])) + 1e-12);
        }
    }

    #[test]
    fn shift_triangle_inequalities(seed in any::<u64>(), cr in -2.0f64..2.0, ci in -2.0f64..2.0) {
        let f = random_model(seed);
        let c = Complex64::new(cr, ci);
        prop_assume!(c.norm() > 0.1);
        let fc = f.clone().shifted(c);
        let back = MeromorphicModel::Quotient { num: Box::new(f.clone()), den: Box::new(fc.clone()) };
        for r in [3.0, 17.0, 90.0] {
            let m = charfn::proximity_m(&f, r).unwrap();
            let mc = charfn::proximity_m(&fc, r).unwrap();
            let fwd = charfn::log_diff_m(&f, c, r).unwrap();
            let bwd = charfn::proximity_m(&back, r).unwrap();
            let tol = m.error + mc.error + fwd.error + bwd.error + 1e-9;
            prop_assert!(mc.value <= m.value + fwd.value + tol);
            prop_assert!(m.value <= mc.value + bwd.value + tol);
        }
    }
}

/// T(r, R(f)) − d·T(r, f) is bounded, so the ratio tends to d. At r = 10⁴ the
/// bounded term is within 2% for outer maps with unit leading data; the last
/// outer map carries a log 2 offset that only settles the deviation.
#[test]
fn valiron_degree_law() {
    let inner = [
        RatFun::new(zpoly(&[1, 0, 1]), zpoly(&[0, 1])).unwrap(),
        RatFun::new(zpoly(&[-1, 1, 0, 1]), zpoly(&[1, 0, 2])).unwrap(),
        RatFun::from_poly(zpoly(&[1, 1])),
    ];
    let outer: [(Vec<Rational>, Vec<Rational>, bool); 3] = [
        (vec![rat_int(1), rat_int(0), rat_int(1)], vec![rat_int(0), rat_int(1)], true),
        (vec![rat_int(0), rat_int(0), rat_int(0), rat_int(1)], vec![rat_int(1)], true),
        (vec![rat_int(1), rat(1, 2)], vec![rat_int(-1), rat_int(0), rat_int(1)], false),
    ];
    for f in &inner {
        let base = MeromorphicModel::Rational(RationalModel::new(f.clone()).unwrap());
        for (num, den, strict) in &outer {
            let d = num.len().max(den.len()) as f64 - 1.0;
            let rf = MeromorphicModel::Rational(RationalModel::compose(num, den, f).unwrap());
            let at = |r: f64| {
                let t_f = charfn::characteristic_t(&base, r).unwrap().t;
                let t_rf = charfn::characteristic_t(&rf, r).unwrap().t;
                (t_rf / t_f, t_rf - d * t_f)
            };
            let (ratio, dev) = at(1e4);
            let (_, dev_lo) = at(1e3);
            assert!((dev - dev_lo).abs() < 1e-2, "deviation drifts: {dev_lo} -> {dev}");
            assert!(dev.abs() < 1.0, "deviation {dev} not bounded");
            if *strict {
                assert!((ratio / d - 1.0).abs() < 0.02, "ratio {ratio} against degree {d}");
            }
        }
    }
}

#[test]
fn pole_chain_domination() {
    for k0 in [1u64, 2, 3, 7] {
        let c = chain(k0, 100).unwrap();
        for n in 1..c.ceilings.len() {
            let (prev, next) = (c.ceilings[n - 1] as u128, c.ceilings[n] as u128);
            assert!(2 * next + 2 >= 3 * prev, "ceiling loss at n = {n}");
            assert!(c.bounds[n] > c.bounds[n - 1]);
            assert!(c.ceilings[n] >= c.ceilings[n - 1]);
        }
        let cubic = |n: usize| Rational::from_integer(((n * n * n) as i64).into());
        let start = (0..=100).rev().take_while(|&n| c.bounds[n] > cubic(n)).last();
        assert!(start.is_some_and(|s| s < 100), "k0 = {k0}: (3/2)^n·k0 never dominates n³");
    }
}
