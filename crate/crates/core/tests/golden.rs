//! The family listings for the benchmark polynomial against their golden files.

use diffnev::clunie::{degree_profile, enumerate_families, reduce_families, render_families_text, MinimalHyperType};
use diffnev::{parse_equation, DiffPolynomial};

const FAMILIES_14: &str = include_str!("data/families14.txt");
const FAMILIES_9: &str = include_str!("data/families9.txt");

#[test]
fn fourteen_families_match_golden_bytes() {
    let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    assert_eq!(render_families_text(&set), FAMILIES_14);
    let counts: Vec<usize> = set.case_counts().into_iter().map(|(_, n)| n).collect();
    assert_eq!(counts, [4, 5, 5]);
}

#[test]
fn nine_families_match_golden_bytes() {
    let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    let reduced = reduce_families(&set, MinimalHyperType).unwrap();
    assert_eq!(render_families_text(&reduced), FAMILIES_9);
    for f in &reduced.families {
        assert!(set.families.iter().any(|g| g.case == f.case && g.deg_u == f.deg_u), "{}", f.equation);
    }
}

#[test]
fn enumeration_is_stable_across_runs() {
    let a = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    let b = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn printed_equations_parse_into_their_family() {
    let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    for f in &set.families {
        let eq = parse_equation(&f.equation).unwrap();
        let prof = degree_profile(&eq);
        assert_eq!(prof.deg_u, f.deg_u, "{}", f.equation);
        assert_eq!(prof.deg_q, f.deg_q_max, "{}", f.equation);
        assert_eq!(prof.ord0_q, f.ord0_min, "{}", f.equation);
        assert_eq!(eq.to_canonical_text(), f.equation);
    }
}
