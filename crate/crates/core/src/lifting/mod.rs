//! Homomorphisms `H_n(K₁) → H_m(K₂)` and their lifts to field embeddings
//! `K₁ → K₂`.
//!
//! A homomorphism is described by a residue field embedding `σ` and the
//! image `[b]_m` of `[π₁]`. It acts on a class `[π₁^k Σ_{i<n} t(d_i) π₁^i]`
//! by sending it to `[b^k Σ t(σ d_i) b^i]_m`, with `b` the canonical
//! representative of the image class.

mod enumerate;
mod lift;

use std::fmt;

use serde::Serialize;

pub use enumerate::{enumerate_homs, HomEnumeration};
pub use lift::{
    compose_check, induced_hom, is_isomorphic, is_lifting, lift, lift_requirement, FieldHom,
    IsoDecision, LiftBoundKind, LiftRequirement,
};

use crate::error::{Error, Result};
use crate::hyperfield::{HClass, HFDesc};
use crate::local::model::Coeffs;
use crate::local::LFElem;
use crate::par;
use crate::residue::Embedding;
use crate::triples::{Triple, TripleMor, TruncatedDvr};

/// Default cap on class evaluations for validation and enumeration.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// A candidate homomorphism `H_n(K₁) → H_m(K₂)`.
#[derive(Clone)]
pub struct HFHom {
    source: HFDesc,
    target: HFDesc,
    sigma: Embedding,
    pi_image: HClass,
    ram: u32,
    beta: Coeffs,
    beta_inv: Coeffs,
    /// `π₂^{r i} β^i` for the `i` with `r i < m`.
    terms: Vec<Coeffs>,
}

impl fmt::Debug for HFHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HFHom({:?} -> {:?}, σ = Frob^{}, [π] ↦ {})",
            self.source,
            self.target,
            self.sigma.frob_power(),
            self.target.render(&self.pi_image)
        )
    }
}

impl PartialEq for HFHom {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.sigma == other.sigma
            && self.pi_image == other.pi_image
    }
}

impl HFHom {
    /// Fails when `e₁ ∤ e₂`, when `ν([b]) ≠ ν(π₁)`, or when `[x]_n` does not
    /// determine the image class, i.e. `r n < m` with `r = e₂/e₁`.
    pub fn new(
        source: &HFDesc,
        target: &HFDesc,
        sigma: Embedding,
        pi_image: HClass,
    ) -> Result<HFHom> {
        let (k1, k2) = (source.field(), target.field());
        if k1.p() != k2.p() {
            return Err(Error::Mismatch("fields over different primes".into()));
        }
        if **sigma.src() != **k1.residue() || **sigma.dst() != **k2.residue() {
            return Err(Error::Mismatch(
                "σ does not connect the residue fields".into(),
            ));
        }
        if k2.e() % k1.e() != 0 {
            return Err(Error::Unsupported(format!(
                "e₁ = {} does not divide e₂ = {}; no valuation-compatible homomorphisms",
                k1.e(),
                k2.e()
            )));
        }
        let ram = k2.e() / k1.e();
        if pi_image.level() != Some(ram as i64) || pi_image.digits().len() != target.n() as usize {
            return Err(Error::InvalidInput(format!(
                "the image of [π] must be a class of H_{} with valuation 1/{}",
                target.n(),
                k1.e()
            )));
        }
        if (ram * source.n()) < target.n() {
            return Err(Error::InvalidInput(format!(
                "H_{} does not determine H_{} classes when r = {ram}",
                source.n(),
                target.n()
            )));
        }
        let m = &k2.model;
        let beta = k2.unit_from_digits(pi_image.digits());
        let beta_inv = k2.unit_inverse(&beta);
        let mut terms = Vec::new();
        let mut bi = m.one();
        for i in 0..source.n() {
            if ram * i >= target.n() {
                break;
            }
            terms.push(m.mul(k2.pi_pow((ram * i) as usize), &bi));
            bi = m.mul(&bi, &beta);
        }
        Ok(HFHom {
            source: source.clone(),
            target: target.clone(),
            sigma,
            pi_image,
            ram,
            beta,
            beta_inv,
            terms,
        })
    }

    /// The identity of `H_n(K)`.
    pub fn identity(h: &HFDesc) -> HFHom {
        HFHom::new(
            h,
            h,
            Embedding::identity(h.field().residue()),
            h.uniformizer(),
        )
        .expect("identity data")
    }

    pub fn source(&self) -> &HFDesc {
        &self.source
    }
    pub fn target(&self) -> &HFDesc {
        &self.target
    }
    pub fn sigma(&self) -> &Embedding {
        &self.sigma
    }
    pub fn pi_image(&self) -> &HClass {
        &self.pi_image
    }
    /// `r = e₂ / e₁`.
    pub fn ram_index(&self) -> u32 {
        self.ram
    }

    /// The image of a class.
    pub fn apply(&self, a: &HClass) -> HClass {
        let Some(k) = a.level() else {
            return HClass::zero();
        };
        let k2 = self.target.field();
        let m = &k2.model;
        let mut acc = m.zero();
        for (&d, term) in a.digits().iter().zip(&self.terms) {
            if d != 0 {
                m.add_scaled(&mut acc, k2.teich(self.sigma.apply(d)), term);
            }
        }
        let base = if k >= 0 { &self.beta } else { &self.beta_inv };
        let mut e = k.unsigned_abs();
        let mut pw = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = m.mul(&acc, &pw);
            }
            pw = m.mul(&pw, &pw);
            e >>= 1;
        }
        HClass::from_parts(k * self.ram as i64, self.target.unit_digits_of_model(&acc))
    }

    /// `[p] ↦ [p]`.
    pub fn is_over_p(&self) -> bool {
        let p1 = p_class(&self.source);
        self.apply(&p1) == p_class(&self.target)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &HFHom) -> Result<HFHom> {
        if self.target != next.source {
            return Err(Error::Mismatch("homomorphisms are not composable".into()));
        }
        HFHom::new(
            &self.source,
            &next.target,
            self.sigma.then(&next.sigma)?,
            next.apply(&self.pi_image),
        )
    }

    pub fn describe(&self) -> String {
        format!(
            "H_{}({}) → H_{}({}), σ = Frob^{}, [π] ↦ {}",
            self.source.n(),
            self.source.field().name(),
            self.target.n(),
            self.target.field().name(),
            self.sigma.frob_power(),
            self.target.render(&self.pi_image)
        )
    }
}

/// `[p]` in `h`.
pub fn p_class(h: &HFDesc) -> HClass {
    h.class_of(&LFElem::from_int(h.field(), h.field().p() as i64))
        .expect("p is exact")
}

/// Outcome of [`validate_hom`].
#[derive(Clone, Debug, Serialize)]
pub struct HomReport {
    /// Pairs `([1], [c])` with `ν(c) ∈ [0, n θ₁]` checked for additive containment.
    pub additive_pairs: u64,
    pub additive_ok: bool,
    /// Products `u g` of units with generators of `(1 + m)/(1 + m^n)` checked.
    pub multiplicative_checks: u64,
    pub multiplicative_ok: bool,
    /// `σ(E₁)(b) ≡ 0 mod m^m`; only evaluated for candidates over `p`.
    pub root_criterion: Option<bool>,
    pub over_p: bool,
    pub counterexample: Option<String>,
}

impl HomReport {
    pub fn valid(&self) -> bool {
        self.additive_ok && self.multiplicative_ok && self.root_criterion != Some(false)
    }
}

/// Rough number of class evaluations [`validate_hom`] performs.
pub fn validation_cost(h: &HFHom) -> u128 {
    let s = &h.source;
    let cpl = s.classes_per_level();
    let q = s.field().residue().q() as u128;
    (s.n() as u128 + 1) * cpl * 3 + cpl * (s.n() as u128 - 1) * (q - 1)
}

/// Checks that `h` is a homomorphism of valued hyperfields.
///
/// Additivity is checked on the pairs `([1], [c])` with `0 ≤ ν(c) ≤ n θ₁`,
/// which covers every pair after multiplying by `[a]⁻¹`. Multiplicativity is
/// checked on products of units with the generators `1 + t(s) π₁^j` of
/// `(1 + m)/(1 + m^n)`; Teichmüller digits and powers of `π₁` are
/// multiplicative by construction.
pub fn validate_hom(h: &HFHom, budget: u64) -> Result<HomReport> {
    let cost = validation_cost(h);
    if cost > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: cost,
            budget,
        });
    }
    let (s, t) = (&h.source, &h.target);
    let n = s.n() as i64;
    let one = s.one();
    let f_one = h.apply(&one);
    let mut cs = Vec::new();
    for level in 0..=n {
        cs.extend(s.classes_at(level)?);
    }
    let additive = par::map(&cs, |c| -> Result<Option<String>> {
        let ball = s.add(&one, c);
        let target = t.add(&f_one, &h.apply(c));
        if ball.contains_zero()? && !target.contains_zero()? {
            return Ok(Some(format!(
                "0 ∈ [1] + {} but not in its image",
                s.render(c)
            )));
        }
        for x in s.ball_classes(&ball, 0, n)? {
            if !t.ball_contains(&target, &h.apply(&x))? {
                return Ok(Some(format!(
                    "{} ∈ [1] + {} maps outside f([1]) + f({})",
                    s.render(&x),
                    s.render(c),
                    s.render(c)
                )));
            }
        }
        Ok(None)
    });
    let mut counterexample = None;
    let mut additive_ok = true;
    for r in additive {
        if let Some(msg) = r? {
            additive_ok = false;
            counterexample.get_or_insert(msg);
        }
    }
    let k1 = s.field();
    let mut gens = Vec::new();
    for j in 1..n {
        for c in 1..k1.residue().q() {
            let g = k1.one().add(&k1.teichmuller(c).mul(&k1.pi().pow(j)?)?)?;
            gens.push(s.class_of(&g)?);
        }
    }
    let units = s.classes_at(0)?;
    let images: Vec<HClass> = gens.iter().map(|g| h.apply(g)).collect();
    let mult = par::map(&units, |u| {
        let fu = h.apply(u);
        gens.iter()
            .zip(&images)
            .find(|(g, fg)| h.apply(&s.mul(u, g)) != t.mul(&fu, fg))
            .map(|(g, _)| {
                format!(
                    "f({} · {}) ≠ f({}) f({})",
                    s.render(u),
                    s.render(g),
                    s.render(u),
                    s.render(g)
                )
            })
    });
    let mut multiplicative_ok = true;
    for msg in mult.into_iter().flatten() {
        multiplicative_ok = false;
        counterexample.get_or_insert(msg);
    }
    let over_p = h.is_over_p();
    let root_criterion = if over_p {
        Some(root_criterion(h)?)
    } else {
        None
    };
    if root_criterion == Some(false) {
        counterexample.get_or_insert("σ(E₁)(b) is not divisible by π₂^m".into());
    }
    Ok(HomReport {
        additive_pairs: cs.len() as u64,
        additive_ok,
        multiplicative_checks: (units.len() * gens.len()) as u64,
        multiplicative_ok,
        root_criterion,
        over_p,
        counterexample,
    })
}

/// `σ(E₁)(b) ≡ 0 mod π₂^m` for the canonical representative `b` of the image of `[π₁]`.
pub fn root_criterion(h: &HFHom) -> Result<bool> {
    let poly = lift::mapped_eisenstein(h.source.field(), h.target.field(), &h.sigma)?;
    let b = h.target.rep(&h.pi_image);
    let v = poly.eval(&b)?;
    let m = h.target.n() as i64;
    Ok(match v.level() {
        Some(l) => l >= m,
        None => v.zero_abs().is_none_or(|a| a >= m),
    })
}

/// Whether every Teichmüller class `[t(s)]` maps to a class fixed by `x ↦ x^q₂`.
pub fn teichmuller_preservation_check(h: &HFHom) -> Result<bool> {
    teichmuller_preserved_by(&h.source, &h.target, |x| h.apply(x))
}

/// [`teichmuller_preservation_check`] for an arbitrary class map.
pub fn teichmuller_preserved_by(
    source: &HFDesc,
    target: &HFDesc,
    f: impl Fn(&HClass) -> HClass,
) -> Result<bool> {
    let q2 = target.field().residue().q() as i64;
    for s in 1..source.field().residue().q() {
        let img = f(&source.class(0, &[s])?);
        if target.pow(&img, q2)? != img {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Tr(h): Tr(H₁) → Tr(H₂)`.
pub fn tr_of_hom(h: &HFHom) -> Result<TripleMor> {
    let src = Triple::tr_of_hyperfield(&h.source);
    let dst = Triple::tr_of_hyperfield(&h.target);
    let r2 = dst.ring().clone();
    let m = h.target.n() as usize;
    let r = h.ram as usize;
    let mut abs = vec![0u32; m];
    if r < m {
        abs[r..].copy_from_slice(&h.pi_image.digits()[..m - r]);
    }
    Ok(TripleMor {
        source: src,
        target: dst,
        ram_index: h.ram,
        sigma: h.sigma.clone(),
        pi_image: r2.elem(&abs)?,
        eta: r2.elem(h.pi_image.digits())?,
    })
}

/// The homomorphism `U(T₁) → U(T₂)` of a morphism between triples of the
/// form `T_n(K)`, as a map of hyperfields `H_n(K₁) → H_m(K₂)`.
pub fn hom_of_triple_mor(mor: &TripleMor) -> Result<HFHom> {
    let (r1, r2): (&TruncatedDvr, &TruncatedDvr) = (mor.source.ring(), mor.target.ring());
    let source = HFDesc::new(r1.field(), r1.length())?;
    let target = HFDesc::new(r2.field(), r2.length())?;
    let pi_image = target.class(mor.ram_index as i64, mor.eta.digits())?;
    HFHom::new(&source, &target, mor.sigma.clone(), pi_image)
}

#[cfg(test)]
mod tests;
