//! Exterior-algebra scalars: signs, nilpotency and exact inverses.

use superpainleve::ring::{rat, Gauss, GeneratorRegistry, GrassmannScalar};

fn main() {
    let mut reg = GeneratorRegistry::new();
    let a = reg.register("a").unwrap();
    let b = reg.register("b").unwrap();
    let (ta, tb) = (reg.generator(a), reg.generator(b));

    println!("ab + ba = {}", (&ta * &tb + &tb * &ta).render(Some(&reg)));
    println!("a^2     = {}", (&ta * &ta).render(Some(&reg)));

    // 2 + a b/3 + k a
    let x = GrassmannScalar::from_gauss(Gauss::int(2))
        + (&ta * &tb).scale(&Gauss::real(rat(1, 3)))
        + ta.scale(&Gauss::k());
    let inv = x.invert().unwrap();
    println!("x       = {}", x.render(Some(&reg)));
    println!("1/x     = {}", inv.render(Some(&reg)));
    println!("x/x     = {}", (&x * &inv).render(Some(&reg)));
}
