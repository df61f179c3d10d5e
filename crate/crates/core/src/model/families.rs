use std::collections::BTreeMap;

use super::{dx, dx_n, EvolutionSystem, FieldSpec};
use crate::kernel::{Expression, Parity, Symbol};
use crate::ring::{rat, Gauss};

fn jet(name: &str, k: u32, p: Parity) -> Expression {
    Expression::symbol(Symbol::jet(name, k, p))
}

fn param(name: &str) -> Expression {
    Expression::symbol(Symbol::param(name))
}

fn int(v: i64) -> Expression {
    Expression::int(v)
}

fn half(e: &Expression) -> Expression {
    e.scale(&Gauss::real(rat(1, 2)))
}

/// `eps_ij`, with `eps_12 = -eps_21 = 1`.
fn eps(i: usize, j: usize) -> i64 {
    match (i, j) {
        (1, 2) => 1,
        (2, 1) => -1,
        _ => 0,
    }
}

/// The N=2 super-KdV family in components: fields `u`, `w` (even, leads 2
/// and 1) and `xi1`, `xi2` (odd, lead 2 until fixed otherwise). Passing
/// `None` leaves a parameter symbolic.
pub fn build_skdv(c: Option<Expression>, alpha: Option<Expression>, beta: Option<Expression>) -> EvolutionSystem {
    let mut sys = EvolutionSystem::new(
        "skdv",
        &["c", "alpha", "beta"],
        vec![
            FieldSpec::new("u", Parity::Even, 2),
            FieldSpec::new("w", Parity::Even, 1),
            FieldSpec::new("xi1", Parity::Odd, 2),
            FieldSpec::new("xi2", Parity::Odd, 2),
        ],
    );
    let (e, o) = (Parity::Even, Parity::Odd);
    let u = jet("u", 0, e);
    let w = jet("w", 0, e);
    let xi = |i: usize, k: u32| jet(&format!("xi{i}"), k, o);
    let c_ = param("c");
    let six_c = &int(6) - &c_;
    let am1 = &param("alpha") - &int(1);
    let b = param("beta");

    let mut ut = -jet("u", 3, e) + int(6) * u.clone() * jet("u", 1, e);
    for i in 1..=2 {
        ut = ut - c_.clone() * xi(i, 0) * xi(i, 2);
    }
    ut = ut - c_.clone() * w.clone() * jet("w", 3, e) - six_c.clone() * jet("w", 1, e) * jet("w", 2, e)
        - half(&am1) * dx_n(&(w.clone() * w.clone()), 3)
        + b.clone() * dx(&(u.clone() * w.clone() * w.clone()))
        + int(2) * b.clone() * dx(&(xi(2, 0) * xi(1, 0) * w.clone()));
    sys.set_equation("u", ut).expect("parity");

    for i in 1..=2 {
        let mut xt = -xi(i, 3) + c_.clone() * jet("u", 1, e) * xi(i, 0) + six_c.clone() * u.clone() * xi(i, 1);
        for j in 1..=2 {
            let s = eps(i, j);
            if s == 0 {
                continue;
            }
            let s = int(s);
            xt = xt - s.clone() * c_.clone() * xi(j, 2) * w.clone()
                - s.clone() * six_c.clone() * xi(j, 1) * jet("w", 1, e)
                - s * am1.clone() * dx_n(&(xi(j, 0) * w.clone()), 2);
        }
        xt = xt + b.clone() * dx(&(xi(i, 0) * w.clone() * w.clone()));
        sys.set_equation(&format!("xi{i}"), xt).expect("parity");
    }

    let wt = -jet("w", 3, e) + c_.clone() * jet("u", 1, e) * w.clone() + six_c * u.clone() * jet("w", 1, e)
        + am1 * dx(&(u.clone() * w.clone() + xi(2, 0) * xi(1, 0)))
        + b * w.clone() * w.clone() * jet("w", 1, e);
    sys.set_equation("w", wt).expect("parity");

    let mut values = BTreeMap::new();
    for (name, v) in [("c", c), ("alpha", alpha), ("beta", beta)] {
        if let Some(v) = v {
            values.insert(name.to_string(), v);
        }
    }
    sys.with_params(&values)
}

/// The O(2)-invariant osp(2,2) KdV system: `u` (lead 2), odd `xi1`, `xi2`
/// and a static field `w` (`w_t = 0`, lead 1).
pub fn build_osp22() -> EvolutionSystem {
    let mut sys = EvolutionSystem::new(
        "osp22",
        &[],
        vec![
            FieldSpec::new("u", Parity::Even, 2),
            FieldSpec::new("w", Parity::Even, 1),
            FieldSpec::new("xi1", Parity::Odd, 2),
            FieldSpec::new("xi2", Parity::Odd, 2),
        ],
    );
    let (e, o) = (Parity::Even, Parity::Odd);
    let u = jet("u", 0, e);
    let w = jet("w", 0, e);
    let wx = jet("w", 1, e);
    let xi = |i: usize, k: u32| jet(&format!("xi{i}"), k, o);

    let mut inner = -jet("u", 2, e) + int(3) * u.clone() * u.clone();
    for i in 1..=2 {
        inner = inner - int(12) * xi(i, 0) * xi(i, 1);
    }
    inner = inner + int(24) * xi(2, 0) * xi(1, 0) * w.clone() + int(2) * wx.clone() * wx.clone()
        + int(2) * w.clone() * jet("w", 2, e)
        - int(6) * u.clone() * w.clone() * w.clone()
        + int(3) * w.clone().pow(4);
    sys.set_equation("u", dx(&inner)).expect("parity");

    for i in 1..=2 {
        let mut xt = int(-4) * xi(i, 3) + int(3) * jet("u", 1, e) * xi(i, 0) + int(6) * u.clone() * xi(i, 1)
            + int(6) * w.clone() * w.clone() * xi(i, 1)
            + int(6) * w.clone() * wx.clone() * xi(i, 0);
        for j in 1..=2 {
            let s = eps(i, j);
            if s == 0 {
                continue;
            }
            let s = int(s);
            xt = xt - int(12) * s.clone() * xi(j, 2) * w.clone() - int(12) * s.clone() * xi(j, 1) * wx.clone()
                - int(4) * s.clone() * xi(j, 0) * jet("w", 2, e)
                + int(6) * s.clone() * u.clone() * xi(j, 0) * w.clone()
                - int(2) * s * xi(j, 0) * w.clone().pow(3);
        }
        sys.set_equation(&format!("xi{i}"), xt).expect("parity");
    }
    sys
}

/// Bosonic system reached from the c = 0 core along `alpha ~ 2/u0`,
/// `beta u0^2 -> 0`, `u0 -> 0` after rescaling `u, w` by `alpha - 1`:
/// `u_t = -u_xxx - (w^2)_xxx / 2`, `w_t = -w_xxx + (u w)_x`.
pub fn build_skdv_c0_limit() -> EvolutionSystem {
    let mut sys = EvolutionSystem::new(
        "skdv-c0-limit",
        &[],
        vec![FieldSpec::new("u", Parity::Even, 2), FieldSpec::new("w", Parity::Even, 1)],
    );
    let e = Parity::Even;
    let u = jet("u", 0, e);
    let w = jet("w", 0, e);
    sys.set_equation("u", -jet("u", 3, e) - half(&dx_n(&(w.clone() * w.clone()), 3))).expect("parity");
    sys.set_equation("w", -jet("w", 3, e) + dx(&(u * w))).expect("parity");
    sys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equations_have_field_parity() {
        for sys in [build_skdv(None, None, None), build_osp22()] {
            for (f, e) in sys.fields.iter().zip(&sys.equations) {
                if let Some(e) = e {
                    assert_eq!(e.parity(), Some(f.parity), "{}", f.name);
                }
            }
        }
    }

    #[test]
    fn osp_u_equation_has_quadratic_flux() {
        let sys = build_osp22();
        let u = Symbol::jet("u", 0, Parity::Even);
        let ux = Symbol::jet("u", 1, Parity::Even);
        let eq = sys.equation("u").unwrap();
        let c = eq.partial(u).partial(ux);
        assert_eq!(c, Expression::int(6));
        assert!(sys.equation("w").is_none());
    }

    #[test]
    fn skdv_o_bosons_see_fermions_only_through_alpha_minus_one() {
        let sys = build_skdv(Some(int(0)), Some(int(1)), Some(int(0)));
        for f in ["u", "w"] {
            let eq = sys.equation(f).unwrap();
            assert!(eq.terms().all(|(m, _)| m.odd_degree() == 0), "{f}");
        }
    }
}
