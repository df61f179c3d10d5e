//! The whole classification, with the differences from the published
//! tables itemized. Pass a window half-width to shrink the scan.

use superpainleve::atlas::report::{full_reproduction, ReproductionOptions};

fn main() {
    let window = std::env::args().nth(1).and_then(|w| w.parse().ok()).unwrap_or(20);
    let report = full_reproduction(&ReproductionOptions { window, ..ReproductionOptions::default() }).unwrap();
    print!("{}", report.to_text());
}
