//! Bosonic-core verdicts over a rational (alpha, beta) grid at c = 3.

use superpainleve::cli::{cmd_scan, load_system, parse_grid};
use superpainleve::ring::rat;

fn main() {
    let sys = load_system("skdv").unwrap();
    let alphas = parse_grid("-2:4:1/2").unwrap();
    let betas = parse_grid("-6,0,3,12").unwrap();
    let report = cmd_scan(&sys, &rat(3, 1), &alphas, &betas, None, 0);
    for (a, b) in &report.hits {
        println!("passing branch at alpha = {a}, beta = {b}");
    }
    println!("{} grid points", report.points.len());
}
