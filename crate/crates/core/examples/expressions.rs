//! Parsing, formal time derivatives and substitution of series
//! coefficients.

use std::collections::HashMap;

use superpainleve::kernel::{parse_expression, Expression, NameTable, Parity, Symbol};

fn main() {
    let u2 = Symbol::series("u", 2, Parity::Even);
    let xi = Symbol::series("xi1", 0, Parity::Odd);
    let mut names = NameTable::default();
    names.insert("u2", Expression::symbol(u2));
    names.insert("xi", Expression::symbol(xi));
    names.insert("alpha", Expression::symbol(Symbol::param("alpha")));

    let e = parse_expression("(alpha - 1)/2 * u2^2 * xi + 3/2i * u2", &mut names, None).unwrap();
    println!("e          = {e}");
    println!("d/dt e     = {}", e.formal_dt());
    println!("d/d(u2) e  = {}", e.partial(u2));

    let at = HashMap::from([(Symbol::param("alpha"), Expression::int(3))]);
    println!("alpha = 3  : {}", e.substitute_unchecked(&at));
    println!("xi * xi    = {}", Expression::symbol(xi).pow(2));
}
