//! Bosonic and fermionic resonance polynomials of the super-KdV family at
//! the SKdV(1) leading order.

use std::collections::HashMap;

use superpainleve::engine::{fermion_matrix_in_r, r_symbol, recursion_matrix, resonance_polynomial};
use superpainleve::kernel::{Expression, Parity, Sector, Symbol};
use superpainleve::model::build_skdv;
use superpainleve::ring::Gauss;

fn main() {
    let sys = build_skdv(Some(Expression::int(3)), Some(Expression::int(1)), Some(Expression::int(3)));
    let level0 = HashMap::from([
        (Symbol::series("u", 0, Parity::Even), Expression::int(1)),
        (Symbol::series("w", 0, Parity::Even), Expression::gauss(Gauss::k())),
    ]);

    let core = recursion_matrix(&sys.bosonic_core(), Sector::Bosonic, &level0).unwrap();
    let a = resonance_polynomial(&core).unwrap();
    println!("A(n) = {}   roots {:?}", a.render_factored(), a.roots);

    let fm = fermion_matrix_in_r(&sys, &level0).unwrap();
    for r in [2, 1, 0, -1] {
        let at = HashMap::from([(r_symbol(), Expression::int(r))]);
        let m: Vec<Vec<Expression>> = fm.iter().map(|row| row.iter().map(|e| e.substitute_unchecked(&at)).collect()).collect();
        let b = resonance_polynomial(&m).unwrap();
        println!("B(n), r = {r:2}: {}", b.render_factored());
    }
}
