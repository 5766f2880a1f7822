use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use super::enumerate::{over_p_candidates, search_space};
use super::{root_criterion, HFHom};
use crate::error::{Error, Result};
use crate::hyperfield::HFDesc;
use crate::local::model::Coeffs;
use crate::local::{
    hensel_root, krasner_number, lift_bound, Coefficient, FieldRef, LFElem, LFPoly, LocalField,
};
use crate::residue::{embeddings, Embedding};

/// A field embedding `g: K₁ → K₂`, given by `σ` on residue fields and
/// `g(π₁)`.
#[derive(Clone)]
pub struct FieldHom {
    source: FieldRef,
    target: FieldRef,
    sigma: Embedding,
    pi_root: LFElem,
}

impl fmt::Debug for FieldHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldHom({} -> {}, σ = Frob^{}, π ↦ {})",
            self.source.name(),
            self.target.name(),
            self.sigma.frob_power(),
            self.pi_root
        )
    }
}

impl PartialEq for FieldHom {
    /// Equality of `σ` and of `g(π₁)` at their common precision.
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source
            && *self.target == *other.target
            && self.sigma == other.sigma
            && self.pi_root == other.pi_root
    }
}

/// `σ(E₁)` as a polynomial over `K₂`.
pub(crate) fn mapped_eisenstein(k1: &FieldRef, k2: &FieldRef, sigma: &Embedding) -> Result<LFPoly> {
    let m1 = &k1.model;
    let mut coeffs = Vec::with_capacity(k1.e() as usize + 1);
    for (c, z) in k1.eisenstein().iter().zip(&m1.eis) {
        coeffs.push(match c {
            Coefficient::Int(v) => LFElem::from_int(k2, *v),
            Coefficient::Digits(_) => map_zq(k1, k2, sigma, z)?,
        });
    }
    coeffs.push(k2.one());
    Ok(LFPoly::new(coeffs))
}

/// `Σ t(d_j) p^j ↦ Σ t(σ d_j) p^j` on `Z_q₁ / p^k`.
fn map_zq(k1: &LocalField, k2: &FieldRef, sigma: &Embedding, a: &[u64]) -> Result<LFElem> {
    let m1 = &k1.model;
    let p = k1.p() as i64;
    let mut a: Coeffs = a.into();
    let mut acc = k2.zero();
    let mut pj = k2.one();
    let mut pj_int = 1i64;
    for j in 0..m1.k {
        let d = m1.zq_residue_shifted(&a, j);
        if d != 0 {
            let term = m1.zq_mul(k1.teich(d), &m1.zq_from_int(pj_int));
            a = m1.zq_sub(&a, &term);
            acc = acc.add(&k2.teichmuller(sigma.apply(d)).mul(&pj)?)?;
        }
        pj = pj.mul(&k2.p_elem())?;
        pj_int *= p;
    }
    acc.add(&LFElem::inexact_zero(k2, (m1.k * k2.e()) as i64))
}

impl FieldHom {
    /// Checks that `pi_root` is a root of `σ(E₁)` at working precision.
    pub fn new(
        source: &FieldRef,
        target: &FieldRef,
        sigma: Embedding,
        pi_root: LFElem,
    ) -> Result<FieldHom> {
        let poly = mapped_eisenstein(source, target, &sigma)?;
        if !poly.eval(&pi_root)?.is_zero() {
            return Err(Error::InvalidInput(
                "the image of π₁ is not a root of σ(E₁)".into(),
            ));
        }
        Ok(FieldHom {
            source: source.clone(),
            target: target.clone(),
            sigma,
            pi_root,
        })
    }

    pub fn identity(k: &FieldRef) -> FieldHom {
        FieldHom {
            source: k.clone(),
            target: k.clone(),
            sigma: Embedding::identity(k.residue()),
            pi_root: k.pi(),
        }
    }

    pub fn source(&self) -> &FieldRef {
        &self.source
    }
    pub fn target(&self) -> &FieldRef {
        &self.target
    }
    pub fn sigma(&self) -> &Embedding {
        &self.sigma
    }
    /// `g(π₁)`.
    pub fn pi_root(&self) -> &LFElem {
        &self.pi_root
    }

    /// `g(π₁^v Σ t(d_i) π₁^i) = g(π₁)^v Σ t(σ d_i) g(π₁)^i`.
    pub fn apply(&self, x: &LFElem) -> Result<LFElem> {
        let r = (self.target.e() / self.source.e()) as i64;
        let Some(v) = x.level() else {
            return Ok(match x.zero_abs() {
                None => self.target.zero(),
                Some(a) => LFElem::inexact_zero(&self.target, a * r),
            });
        };
        let digits = &x.digits()[..x.prec() as usize];
        let mut acc = self.target.zero();
        for &d in digits.iter().rev() {
            acc = acc
                .mul(&self.pi_root)?
                .add(&self.target.teichmuller(self.sigma.apply(d)))?;
        }
        let cap = LFElem::inexact_zero(&self.target, x.prec() as i64 * r);
        acc.add(&cap)?.mul(&self.pi_root.pow(v)?)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FieldHom) -> Result<FieldHom> {
        if *self.target != *next.source {
            return Err(Error::Mismatch(
                "field homomorphisms are not composable".into(),
            ));
        }
        Ok(FieldHom {
            source: self.source.clone(),
            target: next.target.clone(),
            sigma: self.sigma.then(&next.sigma)?,
            pi_root: next.apply(&self.pi_root)?,
        })
    }

    pub fn describe(&self) -> String {
        format!(
            "{} → {}, σ = Frob^{}, π ↦ {}",
            self.source.name(),
            self.target.name(),
            self.sigma.frob_power(),
            self.pi_root
        )
    }
}

/// Which bound [`lift`] enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftBoundKind {
    /// `p ∤ e₁`: any `m ≥ 1`.
    Tame,
    /// `m > M(K₁) e₁ e₂`.
    Sharp,
    /// `m > e₂ (1 + e₁²)`.
    Uniform,
}

/// The lifting requirement `m > exceed`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftRequirement {
    pub kind: LiftBoundKind,
    pub exceed: u64,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub krasner: Option<Ratio<i64>>,
}

fn ser_opt_ratio<S: serde::Serializer>(
    r: &Option<Ratio<i64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// The precision a homomorphism out of `H_n(K₁)` into `K₂` needs before it lifts.
pub fn lift_requirement(k1: &FieldRef, k2: &FieldRef) -> LiftRequirement {
    let krasner = krasner_number(k1).ok();
    let (e1, e2) = (k1.e() as i64, k2.e() as i64);
    if k1.is_tame() {
        return LiftRequirement {
            kind: LiftBoundKind::Tame,
            exceed: 0,
            krasner,
        };
    }
    match krasner {
        Some(m) => {
            let x = m * Ratio::from_integer(e1 * e2);
            LiftRequirement {
                kind: LiftBoundKind::Sharp,
                exceed: x.floor().to_integer() as u64,
                krasner,
            }
        }
        None => LiftRequirement {
            kind: LiftBoundKind::Uniform,
            exceed: lift_bound(e1 as u32, e2 as u32),
            krasner,
        },
    }
}

/// The unique field embedding inducing `h`.
///
/// `h` must be over `p` and `m` must clear [`lift_requirement`]. The image of
/// `π₁` is a root of `σ(E₁)` with `ν(g(π₁) - b) > M(K₁)`, where `b` is the
/// canonical representative of `h([π₁])`. It is found by Newton iteration
/// seeded at `b`; when the Hensel criterion fails there, the digits of `b`
/// beyond position `m` are refined up to `⌈M(K₁) e₂⌉ + 1` further places.
pub fn lift(h: &HFHom) -> Result<FieldHom> {
    let (k1, k2) = (h.source().field(), h.target().field());
    if !h.is_over_p() {
        return Err(Error::InvalidInput("only homomorphisms over p lift".into()));
    }
    let m = h.target().n();
    let req = lift_requirement(k1, k2);
    if (m as u64) <= req.exceed {
        return Err(Error::BelowBound {
            required: req.exceed.to_string(),
            have: m,
        });
    }
    let poly = mapped_eisenstein(k1, k2, h.sigma())?;
    let n2 = k2.precision() as usize;
    let mut digits = h.pi_image().digits().to_vec();
    digits.resize(n2, 0);
    let krasner = req.krasner.unwrap_or_else(|| Ratio::new(1, k1.e() as i64));
    let extra = (krasner * Ratio::from_integer(k2.e() as i64))
        .ceil()
        .to_integer() as usize
        + 1;
    let limit = (m as usize + extra).min(n2);
    let level = h.ram_index() as i64;
    let q2 = k2.residue().q();
    let b = h.target().rep(h.pi_image());
    let close = |x: &LFElem| -> Result<bool> { Ok(is_close(&x.sub(&b)?, krasner, k2.e())) };
    let found = search(&poly, k2, level, &mut digits, m as usize, limit, q2, &close)?;
    let pi_root = found.ok_or_else(|| {
        Error::NoConvergence(format!(
            "σ(E₁) has no root in {}",
            h.target().render(h.pi_image())
        ))
    })?;
    Ok(FieldHom {
        source: k1.clone(),
        target: k2.clone(),
        sigma: h.sigma().clone(),
        pi_root,
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    poly: &LFPoly,
    k2: &FieldRef,
    level: i64,
    digits: &mut Vec<u32>,
    pos: usize,
    limit: usize,
    q2: u32,
    close: &dyn Fn(&LFElem) -> Result<bool>,
) -> Result<Option<LFElem>> {
    let seed = LFElem::from_digits(k2, level, digits.clone());
    match hensel_root(poly, &seed) {
        Ok(root) => {
            if close(&root)? {
                return Ok(Some(root));
            }
        }
        Err(Error::HenselCriterion(_)) => {}
        Err(e) => return Err(e),
    }
    if pos >= limit {
        return Ok(None);
    }
    let keep = digits[pos];
    for d in 0..q2 {
        digits[pos] = d;
        if let Some(root) = search(poly, k2, level, digits, pos + 1, limit, q2, close)? {
            return Ok(Some(root));
        }
    }
    digits[pos] = keep;
    Ok(None)
}

/// `ν(d) > bound`, with `d` known to its absolute precision.
fn is_close(d: &LFElem, bound: Ratio<i64>, e: u32) -> bool {
    let level = match d.level() {
        Some(l) => l,
        None => match d.zero_abs() {
            Some(a) => a,
            None => return true,
        },
    };
    Ratio::new(level, e as i64) > bound
}

/// Whether `g` is a lifting of `h`: `g` induces the residue map of `h` and
/// `ν(g(π₁) - b) > M(K₁)` for the canonical representative `b` of `h([π₁])`.
///
/// Several homomorphisms over `p` can share one lifting, so this is weaker
/// than `induced_hom(g, n, m) = h`.
pub fn is_lifting(g: &FieldHom, h: &HFHom) -> Result<bool> {
    let (k1, k2) = (h.source().field(), h.target().field());
    if *g.source != **k1 || *g.target != **k2 || g.sigma != *h.sigma() {
        return Ok(false);
    }
    let krasner = krasner_number(k1)?;
    let b = h.target().rep(h.pi_image());
    Ok(is_close(&g.pi_root.sub(&b)?, krasner, k2.e()))
}

/// The homomorphism `[x]_n ↦ [g(x)]_m`.
pub fn induced_hom(g: &FieldHom, n: u32, m: u32) -> Result<HFHom> {
    let source = HFDesc::new(&g.source, n)?;
    let target = HFDesc::new(&g.target, m)?;
    let pi_image = target.class_of(&g.pi_root)?;
    HFHom::new(&source, &target, g.sigma.clone(), pi_image)
}

/// Whether `lift(g ∘ f) = lift(g) ∘ lift(f)`.
pub fn compose_check(f: &HFHom, g: &HFHom) -> Result<bool> {
    let gf = f.then(g)?;
    Ok(lift(&gf)? == lift(f)?.then(&lift(g)?)?)
}

/// Answer of [`is_isomorphic`].
#[derive(Clone, Debug)]
pub struct IsoDecision {
    pub isomorphic: bool,
    /// The answer follows from a lifted isomorphism or from an invariant,
    /// rather than from the existence of hyperfield homomorphisms alone.
    pub certified: bool,
    /// The uniform bound `e₂ (1 + e₁²)` that `n` is compared with.
    pub bound: u64,
    pub witness: Option<FieldHom>,
    pub reason: String,
}

fn over_p_lifts(src: &HFDesc, dst: &HFDesc) -> Result<(bool, Option<FieldHom>)> {
    let embs = match search_space(src, dst)? {
        Ok(e) => e,
        Err(_) => return Ok((false, None)),
    };
    let req = lift_requirement(src.field(), dst.field());
    let mut any = false;
    for sigma in &embs {
        for h in over_p_candidates(src, dst, sigma)? {
            if !root_criterion(&h)? {
                continue;
            }
            any = true;
            if (dst.n() as u64) > req.exceed {
                if let Ok(g) = lift(&h) {
                    return Ok((true, Some(g)));
                }
            }
        }
    }
    Ok((any, None))
}

/// Decides `K₁ ≅ K₂` through homomorphisms `H_n(K₁) ⇄ H_n(K₂)` over `p`.
///
/// A negative answer is always certified: an isomorphism induces
/// homomorphisms over `p` at every `n`. A positive answer is certified by a
/// lifted isomorphism, which needs `n` above the lifting bound.
pub fn is_isomorphic(k1: &FieldRef, k2: &FieldRef, n: u32) -> Result<IsoDecision> {
    let bound = lift_bound(k1.e(), k2.e());
    let no = |reason: String| IsoDecision {
        isomorphic: false,
        certified: true,
        bound,
        witness: None,
        reason,
    };
    if k1.p() != k2.p() {
        return Ok(no("different residue characteristic".into()));
    }
    if k1.e() != k2.e() {
        return Ok(no(format!(
            "ramification indices {} and {} differ",
            k1.e(),
            k2.e()
        )));
    }
    if k1.f() != k2.f() || embeddings(k1.residue(), k2.residue())?.is_empty() {
        return Ok(no("residue fields differ".into()));
    }
    let h1 = HFDesc::new(k1, n)?;
    let h2 = HFDesc::new(k2, n)?;
    let (fwd, witness) = over_p_lifts(&h1, &h2)?;
    if !fwd {
        return Ok(no(format!("no homomorphism H_{n}(K₁) → H_{n}(K₂) over p")));
    }
    let (back, back_witness) = over_p_lifts(&h2, &h1)?;
    if !back {
        return Ok(no(format!("no homomorphism H_{n}(K₂) → H_{n}(K₁) over p")));
    }
    let certified = witness.is_some() && back_witness.is_some();
    let reason = if certified {
        "homomorphisms over p exist both ways and lift to field embeddings".into()
    } else if n as u64 <= bound {
        format!("homomorphisms over p exist; n = {n} does not exceed {bound}, so this is only a necessary condition")
    } else {
        "homomorphisms over p exist but did not lift".into()
    };
    Ok(IsoDecision {
        isomorphic: true,
        certified,
        bound,
        witness,
        reason,
    })
}
