//! Prints the counterexample-product table for s = 2 and s = 3.

use diffnev::charfn::{example_product_report, render_example_csv};
use diffnev::model::{build_example_product, DEFAULT_N_CAP};
use num_complex::Complex64;

fn main() {
    for s in [2, 3] {
        let (f, _) = build_example_product(s, 1, DEFAULT_N_CAP).expect("levels");
        let rows = example_product_report(&f, s, Complex64::new(3.0, 0.0)).expect("report");
        print!("{}", render_example_csv(&rows));
    }
}
