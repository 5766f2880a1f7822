//! Public-API properties over the shipped field files.

use std::path::PathBuf;

use hyperval::fieldfile::read_field;
use hyperval::{FieldRef, HFDesc, LFElem};
use num_rational::Ratio;
use proptest::prelude::*;

fn field(name: &str) -> FieldRef {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fields")
        .join(format!("{name}.field"));
    read_field(&path).unwrap()
}

fn vp(mut a: i64, p: i64) -> i64 {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5000i64..-1, 1i64..5000]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_valuations_match_p_adic_order(a in nonzero(), name in prop::sample::select(vec!["q2", "q3-sqrt3", "q2-cbrt2", "q9-sqrt3"])) {
        let k = field(name);
        let h = HFDesc::new(&k, 2).unwrap();
        let c = h.class_of(&LFElem::from_int(&k, a)).unwrap();
        let want = Ratio::from_integer(vp(a, k.p() as i64));
        prop_assert_eq!(h.val(&c).to_string(), want.to_string());
    }

    #[test]
    fn classes_respect_products_and_sums(a in nonzero(), b in nonzero(), n in 1u32..4, name in prop::sample::select(vec!["q3", "q2-sqrt2", "q3-sqrt-3", "q9"])) {
        let k = field(name);
        let h = HFDesc::new(&k, n).unwrap();
        let (x, y) = (LFElem::from_int(&k, a), LFElem::from_int(&k, b));
        let (cx, cy) = (h.class_of(&x).unwrap(), h.class_of(&y).unwrap());
        prop_assert_eq!(h.class_of(&x.mul(&y).unwrap()).unwrap(), h.mul(&cx, &cy));
        let ball = h.add(&cx, &cy);
        let sum = h.class_of(&x.add(&y).unwrap()).unwrap();
        prop_assert!(h.ball_contains(&ball, &sum).unwrap());
        prop_assert_eq!(h.neg(&cx), h.class_of(&x.neg()).unwrap());
    }
}
