//! End-to-end acceptance checks. Each criterion prints one status line; the
//! process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hyperval::hyperfield::{check_axioms, AxiomConfig};
use hyperval::lifting::{
    compose_check, enumerate_homs, hom_of_triple_mor, induced_hom, is_isomorphic, is_lifting, lift,
    p_class, validate_hom, FieldHom, HFHom, DEFAULT_BUDGET,
};
use hyperval::local::{krasner_number, phi_q};
use hyperval::oracle::{compare_hypersum, CosetOracle};
use hyperval::triples::{roundtrip_check, TElem, Triple, TripleMor};
use hyperval::{Embedding, FieldRef, HFDesc, LFElem, LocalField};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 24;

fn qp(p: u32) -> FieldRef {
    LocalField::qp(p, PREC).unwrap()
}

fn pure(p: u32, e: u32, c: i64) -> FieldRef {
    LocalField::pure(p, e, c, PREC).unwrap()
}

fn test_fields() -> Vec<FieldRef> {
    vec![qp(2), pure(2, 2, 2), qp(3), pure(3, 2, 3)]
}

fn over_p(src: &HFDesc, dst: &HFDesc) -> Vec<HFHom> {
    enumerate_homs(src, dst, true, DEFAULT_BUDGET).unwrap().homs
}

/// A criterion panics on failure. `complete` is false when part of the
/// criterion is mathematically unattainable and was checked in weakened form.
struct Verdict {
    note: String,
    complete: bool,
}

impl From<String> for Verdict {
    fn from(note: String) -> Verdict {
        Verdict {
            note,
            complete: true,
        }
    }
}

type Check = fn() -> Verdict;

fn main() {
    let criteria: [(&str, Check, u64); 10] = [
        ("ball arithmetic equals coset enumeration", ball_oracle, 60),
        ("Q3(√3) and Q3(√-3) at length one", sqrt3_example, 10),
        ("tame bijection for Q3(√3)", tame_bijection, 10),
        (
            "lifting uniqueness and functoriality",
            lifting_functoriality,
            120,
        ),
        (
            "U(Tr(H)) roundtrip and Tr ring arithmetic",
            tr_roundtrip,
            60,
        ),
        ("a + bx ↦ a + 4bx is not over p", a_plus_4bx, 5),
        ("Krasner numbers", krasner_numbers, 10),
        ("over-p homomorphisms fix integers", integer_rigidity, 30),
        ("φ_q defines the valuation ring", phi_q_sweep, 10),
        ("hyperfield axioms", axiom_suite, 60),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let took = start.elapsed();
        let slow = took > Duration::from_secs(*limit);
        match outcome {
            Ok(v) => {
                let status = match (v.complete, slow) {
                    (true, false) => "PASS",
                    (true, true) => "PASS (slow)",
                    (false, _) => "PARTIAL",
                };
                println!(
                    "criterion {:>2} {status:<11} {name} [{:.2}s] {}",
                    i + 1,
                    took.as_secs_f64(),
                    v.note
                );
            }
            Err(_) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL        {name} [{:.2}s]",
                    i + 1,
                    took.as_secs_f64()
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn ball_oracle() -> Verdict {
    let mut pairs = 0u64;
    for (k, max_n) in [
        (qp(2), 3),
        (qp(3), 3),
        (pure(3, 2, 3), 3),
        (pure(2, 2, 2), 2),
    ] {
        let oracle = CosetOracle::new(&k, 12).unwrap();
        for n in 1..=max_n {
            let h = HFDesc::new(&k, n).unwrap();
            let mut classes = vec![h.zero()];
            for level in 0..=3 {
                classes.extend(h.classes_at(level).unwrap());
            }
            for a in &classes {
                for b in &classes {
                    let diff = compare_hypersum(&h, &oracle, a, b, 3).unwrap();
                    assert!(diff.is_none(), "{:?} n = {n}: {}", k, diff.unwrap());
                    pairs += 1;
                }
            }
        }
    }
    format!("{pairs} pairs").into()
}

fn sqrt3_example() -> Verdict {
    let (k1, k2) = (pure(3, 2, 3), pure(3, 2, -3));
    let h1 = HFDesc::new(&k1, 1).unwrap();
    let h2 = HFDesc::new(&k2, 1).unwrap();
    let all = enumerate_homs(&h1, &h2, false, DEFAULT_BUDGET).unwrap();
    assert_eq!(all.homs.len(), 2);
    for f in &all.homs {
        assert_eq!(f.apply(&p_class(&h1)), h2.neg(&p_class(&h2)));
    }
    assert!(over_p(&h1, &h2).is_empty());
    let iso = is_isomorphic(&k1, &k2, 11).unwrap();
    assert_eq!(iso.bound, 10);
    assert!(!iso.isomorphic && iso.certified);
    "2 homs, 0 over p, not isomorphic at n = 11"
        .to_string()
        .into()
}

fn tame_bijection() -> Verdict {
    let k = pure(3, 2, 3);
    let h = HFDesc::new(&k, 1).unwrap();
    let homs = over_p(&h, &h);
    assert_eq!(homs.len(), 2);
    let id = FieldHom::identity(&k);
    let neg = FieldHom::new(&k, &k, Embedding::identity(k.residue()), k.pi().neg()).unwrap();
    let lifts: Vec<FieldHom> = homs.iter().map(|f| lift(f).unwrap()).collect();
    assert!(lifts.contains(&id) && lifts.contains(&neg));
    assert!(lifts[0] != lifts[1]);
    for (f, g) in homs.iter().zip(&lifts) {
        assert_eq!(&induced_hom(g, 1, 1).unwrap(), f);
    }
    for g in [&id, &neg] {
        assert_eq!(&lift(&induced_hom(g, 1, 1).unwrap()).unwrap(), g);
    }
    "lifts are {id, √3 ↦ -√3}".to_string().into()
}

/// Pairs `(K₁, K₂)` from the test fields with `e₁ | e₂` and the precision
/// `m` just above the sharp bound, with `n = m`.
fn lifting_pairs() -> Vec<(HFDesc, HFDesc)> {
    let fields = test_fields();
    let mut out = Vec::new();
    for k1 in &fields {
        for k2 in &fields {
            if k1.p() != k2.p() || k2.e() % k1.e() != 0 {
                continue;
            }
            let req = hyperval::lifting::lift_requirement(k1, k2);
            let m = (req.exceed as u32 + 1).max(2);
            out.push((HFDesc::new(k1, m).unwrap(), HFDesc::new(k2, m).unwrap()));
        }
    }
    out
}

fn lifting_functoriality() -> Verdict {
    let mut total = 0;
    let mut not_induced = Vec::new();
    let mut homs_by_pair = Vec::new();
    for (h1, h2) in lifting_pairs() {
        let homs = over_p(&h1, &h2);
        assert!(
            !homs.is_empty(),
            "{} → {}",
            h1.field().name(),
            h2.field().name()
        );
        let mut twisted = 0;
        for f in &homs {
            let g = lift(f).unwrap();
            assert!(is_lifting(&g, f).unwrap());
            let back = induced_hom(&g, h1.n(), h2.n()).unwrap();
            assert_eq!(lift(&back).unwrap(), g);
            if back != *f {
                twisted += 1;
                // Same lift, image of [π] off by a class u with u² = 1.
                let u = h2.mul(f.pi_image(), &h2.inv(back.pi_image()).unwrap());
                assert_eq!(h2.mul(&u, &u), h2.one());
            }
        }
        total += homs.len();
        if twisted > 0 {
            not_induced.push(format!(
                "{twisted}/{} on H_{}({})",
                homs.len(),
                h2.n(),
                h2.field().name()
            ));
        }
        homs_by_pair.push((h1, h2, homs));
    }
    let mut pairs = 0;
    for (_, a2, fs) in &homs_by_pair {
        for (b1, _, gs) in &homs_by_pair {
            if a2 != b1 {
                continue;
            }
            for f in fs {
                for g in gs {
                    assert!(compose_check(f, g).unwrap());
                    pairs += 1;
                }
            }
        }
    }
    let section = if not_induced.is_empty() {
        "induced_hom(lift(h)) = h everywhere".to_string()
    } else {
        format!(
            "induced_hom(lift(h)) = h fails for twisted homs ({}), unattainable as stated",
            not_induced.join(", ")
        )
    };
    Verdict {
        note: format!("{total} homs, {pairs} composable pairs; {section}"),
        complete: not_induced.is_empty(),
    }
}

/// `a + b x` in `(Z/9)[x]/(x² - 3)` read off the digits of `Tr(H_4(Q3(√3)))`.
fn z9_pair(t: &TElem) -> (i64, i64) {
    let teich = [0i64, 1, -1];
    let mut acc = (0i64, 0i64);
    let mut pw = (1i64, 0i64);
    for &d in t.digits() {
        let c = teich[d as usize];
        acc = (
            (acc.0 + c * pw.0).rem_euclid(9),
            (acc.1 + c * pw.1).rem_euclid(9),
        );
        pw = ((3 * pw.1).rem_euclid(9), pw.0);
    }
    acc
}

fn tr_roundtrip() -> Verdict {
    let mut checked = 0;
    for k in test_fields() {
        for n in 1..=4 {
            let h = HFDesc::new(&k, n).unwrap();
            let rep = roundtrip_check(&h, 0, 2).unwrap();
            assert!(rep.passed(), "{k:?} n = {n}: {:?}", rep.counterexample);
            checked += rep.classes;
        }
    }
    let h = HFDesc::new(&pure(3, 2, 3), 4).unwrap();
    let t = Triple::tr_of_hyperfield(&h);
    let r = t.ring();
    let all = r.elements().unwrap();
    let pairs: BTreeSet<(i64, i64)> = all.iter().map(z9_pair).collect();
    assert_eq!(pairs.len(), 81);
    for x in &all {
        for y in &all {
            let ((a, b), (c, d)) = (z9_pair(x), z9_pair(y));
            assert_eq!(
                z9_pair(&r.mul(x, y)),
                (
                    (a * c + 3 * b * d).rem_euclid(9),
                    (a * d + b * c).rem_euclid(9)
                )
            );
            assert_eq!(
                z9_pair(&r.add(x, y)),
                ((a + c).rem_euclid(9), (b + d).rem_euclid(9))
            );
        }
    }
    format!("{checked} classes, 81 × 81 ring table").into()
}

fn a_plus_4bx() -> Verdict {
    let k = pure(3, 2, 3);
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
    assert!(!f.is_over_p());
    let h = f.source();
    let four_pi = h
        .class_of(&LFElem::from_int(&k, 4).mul(&k.pi()).unwrap())
        .unwrap();
    assert_eq!(f.apply(&h.uniformizer()), four_pi);
    format!(
        "{} additive pairs, {} products",
        rep.additive_pairs, rep.multiplicative_checks
    )
    .into()
}

/// `max ν(π - ζπ)` over the nontrivial `e`-th roots of unity `ζ` of `F_p`,
/// computed in `K = Q_p(p^{1/e})` when `μ_e ⊂ F_p`.
fn direct_conjugate_max(k: &FieldRef) -> Ratio<i64> {
    let res = k.residue();
    let e = k.e() as i64;
    let pi = k.pi();
    let mut roots = 0;
    let mut best = None::<Ratio<i64>>;
    for z in 1..res.q() {
        if res.pow(z, e) == Some(res.one()) {
            roots += 1;
            if z == res.one() {
                continue;
            }
            let d = pi.sub(&k.teichmuller(z).mul(&pi).unwrap()).unwrap();
            let v = Ratio::new(d.level().unwrap(), e);
            best = Some(best.map_or(v, |b: Ratio<i64>| b.max(v)));
        }
    }
    assert_eq!(roots, e, "μ_e ⊄ K");
    best.unwrap()
}

fn krasner_numbers() -> Verdict {
    let q3 = pure(3, 2, 3);
    let q2 = pure(2, 2, 2);
    assert_eq!(krasner_number(&q3).unwrap(), Ratio::new(1, 2));
    assert_eq!(krasner_number(&q2).unwrap(), Ratio::new(3, 2));
    let diff = |k: &FieldRef| {
        let d = k.pi().sub(&k.pi().neg()).unwrap();
        Ratio::new(d.level().unwrap(), k.e() as i64)
    };
    assert_eq!(diff(&q3), Ratio::new(1, 2));
    assert_eq!(diff(&q2), Ratio::new(3, 2));
    let mut cases = 0;
    for (p, e) in [
        (3u32, 2u32),
        (5, 2),
        (7, 3),
        (2, 3),
        (5, 4),
        (3, 4),
        (7, 2),
        (13, 4),
    ] {
        let k = pure(p, e, p as i64);
        let m = krasner_number(&k).unwrap();
        assert_eq!(m, Ratio::new(1, e as i64), "p = {p}, e = {e}");
        if (p - 1) % e == 0 {
            assert_eq!(direct_conjugate_max(&k), m);
            cases += 1;
        }
    }
    format!("2 wild, 8 tame, {cases} cross-checked in K").into()
}

fn integer_rigidity() -> Verdict {
    let mut homs = 0;
    let mut pairs = lifting_pairs();
    let k = pure(3, 2, 3);
    pairs.push((HFDesc::new(&k, 1).unwrap(), HFDesc::new(&k, 1).unwrap()));
    pairs.push((HFDesc::new(&k, 3).unwrap(), HFDesc::new(&k, 3).unwrap()));
    let k2 = pure(2, 2, 2);
    pairs.push((HFDesc::new(&k2, 4).unwrap(), HFDesc::new(&k2, 4).unwrap()));
    for (h1, h2) in pairs {
        for f in over_p(&h1, &h2) {
            for i in -50i64..=50 {
                let a = h1.class_of(&LFElem::from_int(h1.field(), i)).unwrap();
                let b = h2.class_of(&LFElem::from_int(h2.field(), i)).unwrap();
                assert_eq!(f.apply(&a), b, "{} moves {i}", f.describe());
            }
            homs += 1;
        }
    }
    format!("{homs} homs × 101 integers").into()
}

fn phi_q_sweep() -> Verdict {
    let k = pure(3, 2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut seen = 0;
    for level in -2i64..=2 {
        for _ in 0..40 {
            let digits: Vec<u32> = (0..PREC)
                .map(|i| {
                    if i == 0 {
                        rng.gen_range(1..3)
                    } else {
                        rng.gen_range(0..3)
                    }
                })
                .collect();
            let x = LFElem::from_digits(&k, level, digits);
            assert_eq!(phi_q(&x, 4).unwrap(), level >= 0, "{x}");
            seen += 1;
        }
    }
    format!("{seen} elements").into()
}

fn axiom_suite() -> Verdict {
    let mut exhaustive = 0;
    for (p, max_n) in [(2u32, 3u32), (3, 2)] {
        for n in 1..=max_n {
            let h = HFDesc::new(&qp(p), n).unwrap();
            let rep = check_axioms(
                &h,
                &AxiomConfig {
                    lo: 0,
                    hi: 2,
                    samples: None,
                    seed: 0,
                },
            )
            .unwrap();
            assert!(
                rep.passed(),
                "Q{p} n = {n}: {:?}",
                rep.first_counterexample()
            );
            exhaustive += rep.triples;
        }
    }
    let mut sampled = 0;
    for k in [pure(2, 2, 2), pure(3, 2, 3), pure(3, 2, -3)] {
        for n in 1..=3 {
            let h = HFDesc::new(&k, n).unwrap();
            let cfg = AxiomConfig {
                lo: 0,
                hi: 2,
                samples: Some(10_000),
                seed: 17,
            };
            let rep = check_axioms(&h, &cfg).unwrap();
            assert!(
                rep.passed(),
                "{k:?} n = {n}: {:?}",
                rep.first_counterexample()
            );
            sampled += rep.triples;
        }
    }
    format!("{exhaustive} exhaustive triples, {sampled} sampled").into()
}
