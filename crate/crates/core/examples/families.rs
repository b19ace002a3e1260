//! Prints the benchmark family lists.
use diffnev::clunie::{enumerate_families, reduce_families, render_families_text, MinimalHyperType};
use diffnev::DiffPolynomial;

fn main() {
    let set = enumerate_families(&DiffPolynomial::benchmark()).unwrap();
    print!("{}", render_families_text(&set));
    println!();
    print!("{}", render_families_text(&reduce_families(&set, MinimalHyperType).unwrap()));
}
