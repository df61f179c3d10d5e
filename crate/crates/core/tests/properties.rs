mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn grassmann_associative(a in scalar(), b in scalar(), c in scalar()) {
        mul_associative(&a, &b, &c)?;
    }

    #[test]
    fn grassmann_distributive(a in scalar(), b in scalar(), c in scalar()) {
        distributive(&a, &b, &c)?;
    }

    #[test]
    fn grassmann_graded_commutative(p in any::<bool>(), q in any::<bool>(), seed in (homogeneous(false), homogeneous(true), homogeneous(false), homogeneous(true))) {
        let a = if p { &seed.1 } else { &seed.0 };
        let b = if q { &seed.3 } else { &seed.2 };
        graded_commutative(a, p, b, q)?;
    }

    #[test]
    fn odd_elements_square_to_zero(a in homogeneous(true)) {
        odd_squares_vanish(&a)?;
    }

    #[test]
    fn invert_is_two_sided(a in unit()) {
        inverse(&a)?;
    }

    #[test]
    fn formal_dt_leibniz(a in expression(), b in expression()) {
        leibniz(&a, &b)?;
    }

    #[test]
    fn normal_form_is_unique(t in terms(), c in terms()) {
        normal_form(&t, &c)?;
    }
}
