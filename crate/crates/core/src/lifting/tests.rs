use super::*;
use crate::local::{FieldRef, LocalField};
use crate::triples::Triple;

fn q3_sqrt3(prec: u32) -> FieldRef {
    LocalField::pure(3, 2, 3, prec).unwrap()
}

fn q3_sqrt_m3(prec: u32) -> FieldRef {
    LocalField::pure(3, 2, -3, prec).unwrap()
}

fn q2_sqrt2(prec: u32) -> FieldRef {
    LocalField::pure(2, 2, 2, prec).unwrap()
}

fn over_p(src: &HFDesc, dst: &HFDesc) -> Vec<HFHom> {
    enumerate_homs(src, dst, true, DEFAULT_BUDGET).unwrap().homs
}

#[test]
fn identity_of_h2_q2_is_valid_and_over_p() {
    let h = HFDesc::new(&LocalField::qp(2, 10).unwrap(), 2).unwrap();
    let id = HFHom::identity(&h);
    let rep = validate_hom(&id, DEFAULT_BUDGET).unwrap();
    assert!(rep.valid(), "{:?}", rep.counterexample);
    assert!(rep.over_p);
    for level in -1..=3 {
        for c in h.classes_at(level).unwrap() {
            assert_eq!(id.apply(&c), c);
        }
    }
}

#[test]
fn sqrt3_to_sqrt_minus3_at_length_one() {
    let h1 = HFDesc::new(&q3_sqrt3(12), 1).unwrap();
    let h2 = HFDesc::new(&q3_sqrt_m3(12), 1).unwrap();
    let all = enumerate_homs(&h1, &h2, false, DEFAULT_BUDGET).unwrap();
    assert_eq!(all.homs.len(), 2);
    let three = p_class(&h1);
    let minus_three = h2.neg(&p_class(&h2));
    let images: Vec<HClass> = all.homs.iter().map(|f| f.pi_image().clone()).collect();
    assert_eq!(images, vec![h2.uniformizer(), h2.neg(&h2.uniformizer())]);
    for f in &all.homs {
        assert_eq!(f.apply(&three), minus_three);
        assert_eq!(f.apply(&h1.neg(&h1.one())), h2.neg(&h2.one()));
        assert!(!f.is_over_p());
    }
    assert!(over_p(&h1, &h2).is_empty());
}

#[test]
fn tame_self_homs_lift_to_plus_minus_pi() {
    let k = q3_sqrt3(12);
    let h = HFDesc::new(&k, 1).unwrap();
    let homs = over_p(&h, &h);
    assert_eq!(homs.len(), 2);
    let lifts: Vec<FieldHom> = homs.iter().map(|f| lift(f).unwrap()).collect();
    assert_eq!(lifts[0], FieldHom::identity(&k));
    assert_eq!(*lifts[1].pi_root(), k.pi().neg());
    for (f, g) in homs.iter().zip(&lifts) {
        assert_eq!(&induced_hom(g, 1, 1).unwrap(), f);
    }
}

#[test]
fn over_p_homs_fix_small_integers() {
    for (k, n) in [
        (q3_sqrt3(16), 3),
        (q2_sqrt2(16), 4),
        (LocalField::qp(2, 12).unwrap(), 3),
    ] {
        let h = HFDesc::new(&k, n).unwrap();
        for f in over_p(&h, &h) {
            for i in -50i64..=50 {
                let c = h.class_of(&LFElem::from_int(&k, i)).unwrap();
                assert_eq!(f.apply(&c), c, "{} moves {i}", f.describe());
            }
        }
    }
}

#[test]
fn teichmuller_check_catches_a_moved_digit() {
    let k = LocalField::qp(5, 10).unwrap();
    let h = HFDesc::new(&k, 2).unwrap();
    assert!(teichmuller_preservation_check(&HFHom::identity(&h)).unwrap());
    let six = h.class_of(&LFElem::from_int(&k, 6)).unwrap();
    let two = h.class(0, &[2]).unwrap();
    let moved = |x: &HClass| if *x == two { h.mul(x, &six) } else { x.clone() };
    assert!(!teichmuller_preserved_by(&h, &h, moved).unwrap());
}

#[test]
fn lift_refuses_below_the_sharp_bound() {
    let k = q2_sqrt2(16);
    let req = lift_requirement(&k, &k);
    assert_eq!(req.kind, LiftBoundKind::Sharp);
    assert_eq!(req.exceed, 6);
    let id = HFHom::identity(&HFDesc::new(&k, 3).unwrap());
    match lift(&id) {
        Err(Error::BelowBound { required, have }) => {
            assert_eq!(required, "6");
            assert_eq!(have, 3);
        }
        other => panic!("expected a refusal, got {other:?}"),
    }
}

#[test]
fn lift_refuses_homs_not_over_p() {
    let h1 = HFDesc::new(&q3_sqrt3(12), 1).unwrap();
    let h2 = HFDesc::new(&q3_sqrt_m3(12), 1).unwrap();
    let f = &enumerate_homs(&h1, &h2, false, DEFAULT_BUDGET)
        .unwrap()
        .homs[0];
    assert!(matches!(lift(f), Err(Error::InvalidInput(_))));
}

#[test]
fn identity_lifts_to_identity_at_length_eleven() {
    let k = q3_sqrt3(24);
    let id = HFHom::identity(&HFDesc::new(&k, 11).unwrap());
    assert_eq!(lift(&id).unwrap(), FieldHom::identity(&k));
}

#[test]
fn lift_composes_on_q2_sqrt2() {
    let k = q2_sqrt2(24);
    let h = HFDesc::new(&k, 7).unwrap();
    let homs = over_p(&h, &h);
    assert_eq!(homs.len(), 8);
    let id = FieldHom::identity(&k);
    let neg = FieldHom::new(&k, &k, Embedding::identity(k.residue()), k.pi().neg()).unwrap();
    let mut induced = 0;
    for f in &homs {
        let g = lift(f).unwrap();
        assert!(g == id || g == neg);
        assert!(is_lifting(&g, f).unwrap());
        if &induced_hom(&g, 7, 7).unwrap() == f {
            induced += 1;
        }
        for f2 in &homs {
            assert!(compose_check(f, f2).unwrap());
        }
    }
    assert_eq!(induced, 2);
}

/// `[π] ↦ [π(1 + π^6)]` respects every relation visible in `H_7(Q_2(√2))`
/// since `(1 + π^6)² ≡ 1 mod π^7`.
#[test]
fn twisted_identity_lifts_to_identity() {
    let k = q2_sqrt2(24);
    let h = HFDesc::new(&k, 7).unwrap();
    let twist = h.class(1, &[1, 0, 0, 0, 0, 0, 1]).unwrap();
    let f = HFHom::new(&h, &h, Embedding::identity(k.residue()), twist).unwrap();
    assert!(validate_hom(&f, DEFAULT_BUDGET).unwrap().valid());
    assert!(f.is_over_p());
    assert_eq!(lift(&f).unwrap(), FieldHom::identity(&k));
    assert_ne!(induced_hom(&FieldHom::identity(&k), 7, 7).unwrap(), f);
}

#[test]
fn isomorphism_decisions() {
    let k = q3_sqrt3(24);
    let k12 = LocalField::pure(3, 2, 12, 24).unwrap();
    let yes = is_isomorphic(&k, &k12, 11).unwrap();
    assert!(yes.isomorphic && yes.certified, "{}", yes.reason);
    assert_eq!(yes.bound, 10);
    let w = yes.witness.unwrap();
    assert!(mapped_root_vanishes(&w));
    let no = is_isomorphic(&k, &q3_sqrt_m3(24), 11).unwrap();
    assert!(!no.isomorphic && no.certified);
    let unram = is_isomorphic(&k, &LocalField::qp(3, 12).unwrap(), 2).unwrap();
    assert!(!unram.isomorphic);
}

fn mapped_root_vanishes(g: &FieldHom) -> bool {
    let poly = lift::mapped_eisenstein(g.source(), g.target(), g.sigma()).unwrap();
    poly.eval(g.pi_root()).unwrap().is_zero()
}

#[test]
fn field_hom_apply_is_multiplicative() {
    let k = q3_sqrt3(16);
    let h = HFDesc::new(&k, 1).unwrap();
    let neg = lift(&over_p(&h, &h)[1]).unwrap();
    let x = LFElem::from_int(&k, 7).add(&k.pi()).unwrap();
    let y = LFElem::from_int(&k, 5)
        .sub(&k.pi().pow(3).unwrap())
        .unwrap();
    let lhs = neg.apply(&x.mul(&y).unwrap()).unwrap();
    let rhs = neg.apply(&x).unwrap().mul(&neg.apply(&y).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    assert_eq!(neg.then(&neg).unwrap(), FieldHom::identity(&k));
}

#[test]
fn tr_is_functorial() {
    let k = q2_sqrt2(16);
    let h = HFDesc::new(&k, 4).unwrap();
    let homs = enumerate_homs(&h, &h, false, DEFAULT_BUDGET).unwrap().homs;
    assert!(homs.len() > 1);
    for f in &homs {
        for g in &homs {
            let lhs = tr_of_hom(&f.then(g).unwrap()).unwrap();
            let rhs = tr_of_hom(f).unwrap().then(&tr_of_hom(g).unwrap()).unwrap();
            assert_eq!(lhs.pi_image, rhs.pi_image);
            assert_eq!(lhs.eta, rhs.eta);
            assert_eq!(lhs.sigma, rhs.sigma);
            assert_eq!(&hom_of_triple_mor(&lhs).unwrap(), &f.then(g).unwrap());
        }
    }
}

#[test]
fn a_plus_4bx_is_a_hom_but_not_over_p() {
    let k = q3_sqrt3(12);
    let t = Triple::t_n_of_field(&k, 4).unwrap();
    let r = t.ring();
    let four = r.from_int(4);
    let mor = TripleMor {
        source: t.clone(),
        target: t.clone(),
        ram_index: 1,
        sigma: Embedding::identity(r.residue()),
        pi_image: r.mul(&four, &r.uniformizer()),
        eta: four,
    };
    let f = hom_of_triple_mor(&mor).unwrap();
    let rep = validate_hom(&f, DEFAULT_BUDGET).unwrap();
    assert!(rep.valid(), "{:?}", rep.counterexample);
    assert!(!rep.over_p);
    assert!(!f.is_over_p());
}

#[test]
fn validation_budget_is_enforced() {
    let h = HFDesc::new(&q3_sqrt3(12), 4).unwrap();
    let err = validate_hom(&HFHom::identity(&h), 10).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }));
}
