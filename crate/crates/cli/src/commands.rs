use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hyperval::fieldfile::read_field;
use hyperval::hyperfield::{check_axioms, AxiomConfig};
use hyperval::lifting::{enumerate_homs, is_isomorphic, lift, lift_requirement, HFHom, HomReport};
use hyperval::local::{krasner_number, lift_bound, newton_polygon, phi_q};
use hyperval::oracle::{compare_hypersum, CosetOracle};
use hyperval::triples::{roundtrip_check, Triple};
use hyperval::{Error, FieldRef, HClass, HFDesc, LFElem, Result, Value};
use num_rational::Ratio;
use serde_json::{json, Value as Json};

use crate::expr::{parse_class_expr, BinOp, ClassExpr, UnOp};
use hyperval::expr::parse_elem;

/// How a successful computation should be reported through the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A well-defined negative answer, such as "not isomorphic".
    Negative,
    /// A check found a violation.
    Counterexample,
}

pub struct Outcome {
    pub human: String,
    pub result: Json,
    pub provenance: Json,
    pub status: Status,
}

impl Outcome {
    fn new(human: String, result: Json, provenance: Json) -> Outcome {
        Outcome {
            human,
            result,
            provenance,
            status: Status::Ok,
        }
    }

    fn with_status(mut self, status: Status) -> Outcome {
        self.status = status;
        self
    }
}

/// Finds a field file: the path itself, then with `.field` appended, then
/// the same two names inside `fields/`.
pub fn resolve(spec: &str) -> Result<FieldRef> {
    let base = Path::new(spec);
    let candidates = [
        base.to_path_buf(),
        PathBuf::from(format!("{spec}.field")),
        Path::new("fields").join(spec),
        Path::new("fields").join(format!("{spec}.field")),
    ];
    for c in &candidates {
        if c.is_file() {
            return read_field(c);
        }
    }
    Err(Error::InvalidInput(format!(
        "no field file found for {spec:?}"
    )))
}

fn val_str(v: Value) -> String {
    v.to_string()
}

fn class_json(h: &HFDesc, c: &HClass) -> Json {
    json!({
        "class": h.render(c),
        "valuation": val_str(h.val(c)),
        "representative": h.rep(c).to_string(),
    })
}

fn hom_json(f: &HFHom, report: Option<&HomReport>) -> Json {
    json!({
        "sigma_frobenius_power": f.sigma().frob_power(),
        "pi_image": f.target().render(f.pi_image()),
        "over_p": f.is_over_p(),
        "report": report.map(|r| serde_json::to_value(r).expect("report serialises")),
    })
}

fn base_provenance(fields: &[&FieldRef]) -> Json {
    let list: Vec<Json> = fields
        .iter()
        .map(|k| json!({"name": k.name(), "precision": k.precision()}))
        .collect();
    json!({ "fields": list })
}

pub fn field_show(spec: &str) -> Result<Outcome> {
    let k = resolve(spec)?;
    let m = krasner_number(&k);
    let e = k.e() as u64;
    let mut partners = Vec::new();
    let mut human = format!(
        "{}\n  q = {}, tame = {}\n",
        k.describe(),
        k.residue().q(),
        k.is_tame()
    );
    match &m {
        Ok(m) => writeln!(human, "  M(K) = {m}").unwrap(),
        Err(err) => writeln!(human, "  M(K) unavailable: {err}").unwrap(),
    }
    for e2 in [e, 2 * e] {
        let uniform = lift_bound(e as u32, e2 as u32);
        let sharp = m.as_ref().ok().map(|m| {
            (*m * Ratio::from_integer((e * e2) as i64))
                .floor()
                .to_integer()
        });
        let tame = k.is_tame();
        writeln!(
            human,
            "  partner with e₂ = {e2}: {}uniform m > {uniform}",
            match (tame, sharp) {
                (true, _) => "tame, any m ≥ 1; ".to_string(),
                (false, Some(s)) => format!("sharp m > {s}; "),
                (false, None) => String::new(),
            }
        )
        .unwrap();
        partners.push(json!({"e2": e2, "uniform": uniform, "sharp": sharp, "tame": tame}));
    }
    let result = json!({
        "name": k.name(),
        "p": k.p(),
        "f": k.f(),
        "e": k.e(),
        "q": k.residue().q(),
        "precision": k.precision(),
        "tame": k.is_tame(),
        "krasner": m.as_ref().ok().map(|m| m.to_string()),
        "lift_bounds": partners,
    });
    Ok(Outcome::new(human, result, base_provenance(&[&k])))
}

pub fn krasner(spec: &str) -> Result<Outcome> {
    let k = resolve(spec)?;
    let m = krasner_number(&k)?;
    let mut human = format!("M({}) = {m}\n", k.name());
    let mut segments = Json::Null;
    if k.e() > 1 {
        let shifted = k.eisenstein_poly().taylor_shift(&k.pi())?.drop_low(1);
        let segs = newton_polygon(&shifted)?;
        human += "  Newton polygon of E(X + π)/X:";
        for s in &segs {
            write!(human, " slope {} × {}", s.slope, s.length).unwrap();
        }
        human.push('\n');
        segments = serde_json::to_value(&segs).expect("segments serialise");
    }
    let req = lift_requirement(&k, &k);
    writeln!(
        human,
        "  self-maps lift for m > {} ({:?} bound)",
        req.exceed, req.kind
    )
    .unwrap();
    let result = json!({
        "krasner": m.to_string(),
        "segments": segments,
        "self_requirement": serde_json::to_value(&req).expect("requirement serialises"),
    });
    Ok(Outcome::new(human, result, base_provenance(&[&k])))
}

pub fn hf_eval(spec: &str, n: u32, expr: &str, window: Option<(i64, i64)>) -> Result<Outcome> {
    let k = resolve(spec)?;
    let h = HFDesc::new(&k, n)?;
    let cls = |s: &str| -> Result<HClass> { h.class_of(&parse_elem(&k, s)?) };
    let single = |label: &str, c: HClass| {
        let human = format!("{label} = {} (ν = {})\n", h.render(&c), h.val(&c));
        (human, class_json(&h, &c))
    };
    let (human, result) = match parse_class_expr(expr)? {
        ClassExpr::Show(a) => single(&format!("[{a}]"), cls(&a)?),
        ClassExpr::Unary(UnOp::Neg, a) => single(&format!("-[{a}]"), h.neg(&cls(&a)?)),
        ClassExpr::Unary(UnOp::Inv, a) => single(&format!("[{a}]⁻¹"), h.inv(&cls(&a)?)?),
        ClassExpr::Unary(UnOp::Val, a) => {
            let v = h.val(&cls(&a)?);
            (
                format!("ν([{a}]) = {v}\n"),
                json!({ "valuation": val_str(v) }),
            )
        }
        ClassExpr::Pow(a, e) => single(&format!("[{a}]^{e}"), h.pow(&cls(&a)?, e)?),
        ClassExpr::Binary(a, BinOp::Mul, b) => {
            single(&format!("[{a}]·[{b}]"), h.mul(&cls(&a)?, &cls(&b)?))
        }
        ClassExpr::Binary(a, BinOp::Div, b) => {
            let q = h.mul(&cls(&a)?, &h.inv(&cls(&b)?)?);
            single(&format!("[{a}]/[{b}]"), q)
        }
        ClassExpr::Binary(a, op, b) => {
            let (x, mut y) = (cls(&a)?, cls(&b)?);
            if op == BinOp::Sub {
                y = h.neg(&y);
            }
            let ball = h.add(&x, &y);
            let min = x.level().into_iter().chain(y.level()).min().unwrap_or(0);
            let (lo, hi) = window.unwrap_or((min, min + n as i64));
            let members = h.ball_classes(&ball, lo, hi)?;
            let zero = ball.contains_zero()?;
            let sym = if op == BinOp::Add { "+" } else { "-" };
            let mut human = format!(
                "[{a}] {sym} [{b}] = {}\n  contains 0: {zero}\n  members with level in [{lo}, {hi}]: {}\n",
                h.render_ball(&ball),
                members.len()
            );
            for c in &members {
                writeln!(human, "    {} (ν = {})", h.render(c), h.val(c)).unwrap();
            }
            let result = json!({
                "center": ball.center.to_string(),
                "closed_radius": ball.radius.map(|_| ball.closed_radius().to_string()),
                "contains_zero": zero,
                "window": [lo, hi],
                "members": members.iter().map(|c| class_json(&h, c)).collect::<Vec<_>>(),
            });
            (human, result)
        }
    };
    let mut prov = base_provenance(&[&k]);
    prov["n"] = json!(n);
    Ok(Outcome::new(human, result, prov))
}

fn hyperfields(spec1: &str, n: u32, spec2: &str, m: u32) -> Result<(HFDesc, HFDesc)> {
    let (k1, k2) = (resolve(spec1)?, resolve(spec2)?);
    Ok((HFDesc::new(&k1, n)?, HFDesc::new(&k2, m)?))
}

fn pair_provenance(h1: &HFDesc, h2: &HFDesc, budget: u64) -> Json {
    let mut prov = base_provenance(&[h1.field(), h2.field()]);
    prov["n"] = json!(h1.n());
    prov["m"] = json!(h2.n());
    prov["budget"] = json!(budget);
    prov
}

pub fn homs(
    spec1: &str,
    n: u32,
    spec2: &str,
    m: u32,
    over_p: bool,
    budget: u64,
) -> Result<Outcome> {
    let (h1, h2) = hyperfields(spec1, n, spec2, m)?;
    let found = enumerate_homs(&h1, &h2, over_p, budget)?;
    let kind = if over_p {
        "homomorphisms over p"
    } else {
        "homomorphisms"
    };
    let mut human = format!(
        "{} {kind} H_{n}({}) → H_{m}({}) ({} candidates validated)\n",
        found.homs.len(),
        h1.field().name(),
        h2.field().name(),
        found.candidates
    );
    if let Some(r) = &found.reason {
        writeln!(human, "  {r}").unwrap();
    }
    for f in &found.homs {
        writeln!(
            human,
            "  σ = Frob^{}, [π] ↦ {}{}",
            f.sigma().frob_power(),
            h2.render(f.pi_image()),
            if f.is_over_p() { ", over p" } else { "" }
        )
        .unwrap();
    }
    let list: Vec<Json> = found
        .homs
        .iter()
        .zip(&found.reports)
        .map(|(f, r)| hom_json(f, Some(r)))
        .collect();
    let result = json!({
        "count": found.homs.len(),
        "candidates": found.candidates.to_string(),
        "over_p_only": over_p,
        "reason": found.reason,
        "homs": list,
    });
    let status = if found.homs.is_empty() {
        Status::Negative
    } else {
        Status::Ok
    };
    Ok(Outcome::new(human, result, pair_provenance(&h1, &h2, budget)).with_status(status))
}

pub fn lift_cmd(spec1: &str, n: u32, spec2: &str, m: u32, budget: u64) -> Result<Outcome> {
    let (h1, h2) = hyperfields(spec1, n, spec2, m)?;
    let req = lift_requirement(h1.field(), h2.field());
    if (m as u64) <= req.exceed {
        return Err(Error::BelowBound {
            required: req.exceed.to_string(),
            have: m,
        });
    }
    let found = enumerate_homs(&h1, &h2, true, budget)?;
    let mut human = format!(
        "{} homomorphisms over p; lifting needs m > {} ({:?})\n",
        found.homs.len(),
        req.exceed,
        req.kind
    );
    let mut list = Vec::new();
    for f in &found.homs {
        let g = lift(f)?;
        writeln!(human, "  {}\n    lifts to {}", f.describe(), g.describe()).unwrap();
        list.push(json!({
            "hom": hom_json(f, None),
            "pi_root": g.pi_root().to_string(),
            "sigma_frobenius_power": g.sigma().frob_power(),
        }));
    }
    let result = json!({ "count": list.len(), "lifts": list });
    let mut prov = pair_provenance(&h1, &h2, budget);
    prov["requirement"] = serde_json::to_value(&req).expect("requirement serialises");
    let status = if list.is_empty() {
        Status::Negative
    } else {
        Status::Ok
    };
    Ok(Outcome::new(human, result, prov).with_status(status))
}

pub fn iso(spec1: &str, spec2: &str, n: Option<u32>) -> Result<Outcome> {
    let (k1, k2) = (resolve(spec1)?, resolve(spec2)?);
    let n = n.unwrap_or_else(|| lift_bound(k1.e(), k2.e()) as u32 + 1);
    let d = is_isomorphic(&k1, &k2, n)?;
    let mut human = format!(
        "{} ≅ {}: {} ({})\n  n = {n}, uniform bound {}\n  {}\n",
        k1.name(),
        k2.name(),
        d.isomorphic,
        if d.certified {
            "certified"
        } else {
            "necessary condition only"
        },
        d.bound,
        d.reason
    );
    if let Some(w) = &d.witness {
        writeln!(human, "  witness: {}", w.describe()).unwrap();
    }
    let result = json!({
        "isomorphic": d.isomorphic,
        "certified": d.certified,
        "reason": d.reason,
        "witness": d.witness.as_ref().map(|w| w.pi_root().to_string()),
    });
    let mut prov = base_provenance(&[&k1, &k2]);
    prov["n"] = json!(n);
    prov["bound"] = json!(d.bound);
    let status = if d.isomorphic {
        Status::Ok
    } else {
        Status::Negative
    };
    Ok(Outcome::new(human, result, prov).with_status(status))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Axioms,
    Oracle,
    Roundtrip,
}

pub fn check(
    spec: &str,
    n: u32,
    suite: Suite,
    window: Option<(i64, i64)>,
    samples: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let k = resolve(spec)?;
    let h = HFDesc::new(&k, n)?;
    let (lo, hi) = window.unwrap_or((0, 2));
    let mut prov = base_provenance(&[&k]);
    prov["n"] = json!(n);
    prov["window"] = json!([lo, hi]);
    let (passed, human, result) = match suite {
        Suite::Axioms => {
            let cfg = AxiomConfig {
                lo,
                hi,
                samples,
                seed,
            };
            prov["seed"] = json!(samples.map(|_| seed));
            let rep = check_axioms(&h, &cfg)?;
            let mut human = format!(
                "axioms on H_{n}({}), window [{lo}, {hi}], {} triples ({}): {}\n",
                k.name(),
                rep.triples,
                if rep.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                if rep.passed() { "pass" } else { "FAIL" }
            );
            for o in &rep.outcomes {
                writeln!(
                    human,
                    "  {:<30} {:>10} checked {:>6} violations",
                    o.axiom, o.checked, o.violations
                )
                .unwrap();
            }
            if let Some((axiom, c)) = rep.first_counterexample() {
                writeln!(human, "  first counterexample ({axiom}): {c}").unwrap();
            }
            (
                rep.passed(),
                human,
                serde_json::to_value(&rep).expect("report serialises"),
            )
        }
        Suite::Oracle => {
            let depth = (hi + n as i64 + 6).max(1) as u32;
            let oracle = CosetOracle::new(&k, depth)?;
            let mut classes = vec![h.zero()];
            for level in lo..=hi {
                classes.extend(h.classes_at(level)?);
            }
            let mut pairs = 0u64;
            let mut first = None;
            let mut failures = 0u64;
            for a in &classes {
                for b in &classes {
                    pairs += 1;
                    if let Some(msg) = compare_hypersum(&h, &oracle, a, b, 3)? {
                        failures += 1;
                        first.get_or_insert(msg);
                    }
                }
            }
            let mut human = format!(
                "ball sums vs coset enumeration on H_{n}({}), window [{lo}, {hi}]: {pairs} pairs, {failures} mismatches\n",
                k.name()
            );
            if let Some(m) = &first {
                writeln!(human, "  first mismatch: {m}").unwrap();
            }
            let result = json!({"pairs": pairs, "failures": failures, "counterexample": first});
            (failures == 0, human, result)
        }
        Suite::Roundtrip => {
            let rep = roundtrip_check(&h, lo, hi)?;
            let human = roundtrip_human(&h, lo, hi, &rep);
            (
                rep.passed(),
                human,
                serde_json::to_value(&rep).expect("report serialises"),
            )
        }
    };
    let status = if passed {
        Status::Ok
    } else {
        Status::Counterexample
    };
    Ok(Outcome::new(human, result, prov).with_status(status))
}

fn roundtrip_human(
    h: &HFDesc,
    lo: i64,
    hi: i64,
    rep: &hyperval::triples::RoundtripReport,
) -> String {
    let mut s = format!(
        "U(Tr(H_{}({}))) ≅ H_{}: {} classes, {} pairs, window [{lo}, {hi}]: {}\n",
        h.n(),
        h.field().name(),
        h.n(),
        rep.classes,
        rep.pairs,
        if rep.passed() { "pass" } else { "FAIL" }
    );
    if let Some(c) = &rep.counterexample {
        writeln!(s, "  first failure: {c}").unwrap();
    }
    s
}

pub fn triple_roundtrip(spec: &str, n: u32, window: Option<(i64, i64)>) -> Result<Outcome> {
    let k = resolve(spec)?;
    let h = HFDesc::new(&k, n)?;
    let (lo, hi) = window.unwrap_or((0, 2));
    let t = Triple::tr_of_hyperfield(&h);
    let r = t.ring();
    let size = (r.residue().q() as u128).pow(r.length());
    let mut human = format!(
        "Tr(H_{n}({})): R of length {}, |R| = {size}, ε(generator) = {}\n",
        k.name(),
        r.length(),
        r.render(t.eps_gen())
    );
    let rep = roundtrip_check(&h, lo, hi)?;
    human += &roundtrip_human(&h, lo, hi, &rep);
    let result = json!({
        "length": r.length(),
        "ring_size": size.to_string(),
        "eps_generator": r.render(t.eps_gen()),
        "roundtrip": serde_json::to_value(&rep).expect("report serialises"),
    });
    let mut prov = base_provenance(&[&k]);
    prov["n"] = json!(n);
    prov["window"] = json!([lo, hi]);
    let status = if rep.passed() {
        Status::Ok
    } else {
        Status::Counterexample
    };
    Ok(Outcome::new(human, result, prov).with_status(status))
}

pub fn phiq(spec: &str, q: u32, x: &str) -> Result<Outcome> {
    let k = resolve(spec)?;
    let x: LFElem = parse_elem(&k, x)?;
    let holds = phi_q(&x, q)?;
    let human = format!(
        "∃y y^{q} = 1 + p x^{q} for x = {x}: {holds}\n  ν(x) = {}\n",
        x.valuation()
    );
    let result = json!({
        "holds": holds,
        "x": x.to_string(),
        "valuation": x.valuation().to_string(),
    });
    let mut prov = base_provenance(&[&k]);
    prov["q"] = json!(q);
    let status = if holds { Status::Ok } else { Status::Negative };
    Ok(Outcome::new(human, result, prov).with_status(status))
}
