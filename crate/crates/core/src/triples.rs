//! Truncated DVRs, triples `(R, M, ε)` and the passage between triples and
//! discrete valued hyperfields.
//!
//! Every ring here is `R = R(K)/m^n` for a local field `K`, presented either
//! directly through the field ([`TruncatedDvr::of_field`]) or as
//! `O_H / ≡_ρ` for `H = H_n(K)` using only the hyperfield operations
//! ([`TruncatedDvr::of_hyperfield`]). Elements are stored as `n` absolute
//! Teichmüller digits `x = Σ_{i<n} t(d_i) π^i`.
//!
//! The module `M` of a triple is free of rank one on a generator `Π`, so an
//! element of `M^{⊗k}` is a pair `(a, k)` standing for `a Π^{⊗k}`; negative
//! `k` are formal duals.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperfield::{DiscreteHyperfield, HClass, HFDesc, SumSet, ENUMERATION_LIMIT};
use crate::local::FieldRef;
use crate::residue::{Embedding, FFDesc};

/// Where the ring operations of a truncated DVR come from.
#[derive(Clone, Debug)]
pub enum DvrSource {
    /// `R(K)/m^n` computed in the field.
    Field(FieldRef),
    /// `O_H / ≡_ρ` computed with hypersums and products of classes.
    Hyperfield(HFDesc),
}

/// The truncated DVR `R/m^n`.
#[derive(Clone, Debug)]
pub struct TruncatedDvr {
    source: DvrSource,
    residue: Arc<FFDesc>,
    n: u32,
}

/// An element of a truncated DVR as `n` absolute Teichmüller digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct TElem {
    digits: Vec<u32>,
}

impl TElem {
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }
}

impl TruncatedDvr {
    /// `R(K)/m^n`.
    pub fn of_field(field: &FieldRef, n: u32) -> Result<TruncatedDvr> {
        if n == 0 || n > field.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "length {n} must lie in 1..={}",
                field.precision()
            )));
        }
        Ok(TruncatedDvr {
            source: DvrSource::Field(field.clone()),
            residue: field.residue().clone(),
            n,
        })
    }

    /// `O_H / ≡_ρ` for `H = H_n(K)`; it has length `n`.
    pub fn of_hyperfield(h: &HFDesc) -> TruncatedDvr {
        TruncatedDvr {
            source: DvrSource::Hyperfield(h.clone()),
            residue: h.residue_field().clone(),
            n: h.n(),
        }
    }

    pub fn source(&self) -> &DvrSource {
        &self.source
    }
    /// The length `n`: `m^n = 0` and `m^{n-1} ≠ 0`.
    pub fn length(&self) -> u32 {
        self.n
    }
    /// The residue field `R/m`.
    pub fn residue(&self) -> &Arc<FFDesc> {
        &self.residue
    }
    /// The local field underlying either presentation.
    pub fn field(&self) -> &FieldRef {
        match &self.source {
            DvrSource::Field(k) => k,
            DvrSource::Hyperfield(h) => h.field(),
        }
    }

    /// Builds an element from absolute digits; missing digits are zero.
    pub fn elem(&self, digits: &[u32]) -> Result<TElem> {
        let q = self.residue.q();
        if digits.len() > self.n as usize || digits.iter().any(|&d| d >= q) {
            return Err(Error::InvalidInput(format!(
                "{digits:?} is not a digit vector of length {}",
                self.n
            )));
        }
        let mut d = digits.to_vec();
        d.resize(self.n as usize, 0);
        Ok(TElem { digits: d })
    }

    pub fn zero(&self) -> TElem {
        TElem {
            digits: vec![0; self.n as usize],
        }
    }
    pub fn one(&self) -> TElem {
        self.teich(1)
    }
    /// The Teichmüller element `t(s)`.
    pub fn teich(&self, s: u32) -> TElem {
        let mut d = vec![0; self.n as usize];
        d[0] = s;
        TElem { digits: d }
    }
    /// The image of `π`.
    pub fn uniformizer(&self) -> TElem {
        let mut d = vec![0; self.n as usize];
        if self.n > 1 {
            d[1] = 1;
        }
        TElem { digits: d }
    }

    pub fn from_int(&self, k: i64) -> TElem {
        match &self.source {
            DvrSource::Field(f) => self.from_model(f, &f.model.from_int(k)),
            DvrSource::Hyperfield(h) => {
                let x = crate::local::LFElem::from_int(h.field(), k);
                self.from_class(
                    &h.class_of(&x.truncate(h.n()))
                        .expect("integers are known to any precision"),
                )
            }
        }
    }

    /// `ν_R(x) = sup { i : x ∈ m^i }`, `None` for zero.
    pub fn val(&self, x: &TElem) -> Option<u32> {
        x.digits.iter().position(|&d| d != 0).map(|i| i as u32)
    }

    pub fn is_unit(&self, x: &TElem) -> bool {
        x.digits[0] != 0
    }

    /// Residue class in `R/m`.
    pub fn reduce(&self, x: &TElem) -> u32 {
        x.digits[0]
    }

    fn from_model(&self, field: &FieldRef, y: &[u64]) -> TElem {
        let mut d = vec![0; self.n as usize];
        if let Some((v, digits)) = field.extract(y, self.n) {
            for i in (v as usize)..self.n as usize {
                d[i] = digits[i - v as usize];
            }
        }
        TElem { digits: d }
    }

    fn to_class(&self, x: &TElem) -> HClass {
        match self.val(x) {
            None => HClass::zero(),
            Some(v) => {
                let h = match &self.source {
                    DvrSource::Hyperfield(h) => h,
                    DvrSource::Field(_) => unreachable!(),
                };
                h.class(v as i64, &x.digits[v as usize..])
                    .expect("leading digit is nonzero")
            }
        }
    }

    fn from_class(&self, c: &HClass) -> TElem {
        let mut d = vec![0; self.n as usize];
        if let Some(v) = c.level() {
            for (i, slot) in d.iter_mut().enumerate().skip(v.max(0) as usize) {
                *slot = c.digits()[i - v as usize];
            }
        }
        TElem { digits: d }
    }

    pub fn add(&self, a: &TElem, b: &TElem) -> TElem {
        match &self.source {
            DvrSource::Field(f) => {
                let m = &f.model;
                self.from_model(
                    f,
                    &m.add(
                        &f.unit_from_digits(&a.digits),
                        &f.unit_from_digits(&b.digits),
                    ),
                )
            }
            DvrSource::Hyperfield(h) => {
                let ball = h.add(&self.to_class(a), &self.to_class(b));
                self.from_class(
                    &h.ball_member(&ball)
                        .expect("integral classes have exact representatives"),
                )
            }
        }
    }

    pub fn neg(&self, a: &TElem) -> TElem {
        match &self.source {
            DvrSource::Field(f) => self.from_model(f, &f.model.neg(&f.unit_from_digits(&a.digits))),
            DvrSource::Hyperfield(h) => self.from_class(&h.neg(&self.to_class(a))),
        }
    }

    pub fn sub(&self, a: &TElem, b: &TElem) -> TElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &TElem, b: &TElem) -> TElem {
        match &self.source {
            DvrSource::Field(f) => {
                let m = &f.model;
                self.from_model(
                    f,
                    &m.mul(
                        &f.unit_from_digits(&a.digits),
                        &f.unit_from_digits(&b.digits),
                    ),
                )
            }
            DvrSource::Hyperfield(h) => {
                self.from_class(&h.mul(&self.to_class(a), &self.to_class(b)))
            }
        }
    }

    pub fn pow(&self, a: &TElem, mut k: u64) -> TElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Number of units, `(q - 1) q^(n - 1)`.
    pub fn unit_count(&self) -> u128 {
        let q = self.residue.q() as u128;
        (q - 1) * q.pow(self.n - 1)
    }

    pub fn inv(&self, a: &TElem) -> Result<TElem> {
        if !self.is_unit(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, (self.unit_count() - 1) as u64))
    }

    /// `x / π^j` for `x ∈ m^j`, determined modulo `m^(n - j)`; the undetermined
    /// digits are zero.
    pub fn shift_down(&self, x: &TElem, j: u32) -> TElem {
        let mut d: Vec<u32> = x.digits[(j as usize).min(self.n as usize)..].to_vec();
        d.resize(self.n as usize, 0);
        TElem { digits: d }
    }

    /// `x` modulo `m^l`, with digits from position `l` on cleared.
    pub fn truncate(&self, x: &TElem, l: u32) -> TElem {
        let mut d = x.digits.clone();
        for digit in d.iter_mut().skip(l as usize) {
            *digit = 0;
        }
        TElem { digits: d }
    }

    /// Every element, in lexicographic digit order.
    pub fn elements(&self) -> Result<Vec<TElem>> {
        self.with_prefix(&[])
    }

    /// Every unit, in lexicographic digit order.
    pub fn units(&self) -> Result<Vec<TElem>> {
        let mut out = Vec::new();
        for s in 1..self.residue.q() {
            out.extend(self.with_prefix(&[s])?);
        }
        Ok(out)
    }

    /// All elements whose leading digits are `prefix`.
    pub fn with_prefix(&self, prefix: &[u32]) -> Result<Vec<TElem>> {
        let q = self.residue.q() as u128;
        let free = self.n as usize - prefix.len();
        let count = q.pow(free as u32);
        if count > ENUMERATION_LIMIT {
            return Err(Error::BudgetExceeded {
                needed: count,
                budget: ENUMERATION_LIMIT as u64,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        for mut idx in 0..count {
            let mut d = prefix.to_vec();
            let mut tail = vec![0u32; free];
            for slot in tail.iter_mut().rev() {
                *slot = (idx % q) as u32;
                idx /= q;
            }
            d.extend(tail);
            out.push(TElem { digits: d });
        }
        Ok(out)
    }

    pub fn render(&self, x: &TElem) -> String {
        let terms: Vec<String> = x
            .digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| match i {
                0 => format!("t({})", self.residue.render(d)),
                1 => format!("t({})π", self.residue.render(d)),
                _ => format!("t({})π^{i}", self.residue.render(d)),
            })
            .collect();
        if terms.is_empty() {
            format!("0 mod π^{}", self.n)
        } else {
            format!("{} mod π^{}", terms.join(" + "), self.n)
        }
    }
}

/// A triple `(R, M, ε)` with `M = R Π` and `ε(Π) = eps_gen`.
#[derive(Clone, Debug)]
pub struct Triple {
    ring: Arc<TruncatedDvr>,
    eps_gen: TElem,
}

/// `scalar · Π^{⊗power}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ModElem {
    pub scalar: TElem,
    pub power: i64,
}

impl Triple {
    /// A triple on `ring` whose generator maps to `eps_gen`, which must
    /// generate the maximal ideal.
    pub fn new(ring: Arc<TruncatedDvr>, eps_gen: TElem) -> Result<Triple> {
        let ok = match ring.length() {
            1 => ring.val(&eps_gen).is_none(),
            _ => ring.val(&eps_gen) == Some(1),
        };
        if !ok {
            return Err(Error::InvalidInput(
                "ε(Π) must generate the maximal ideal".into(),
            ));
        }
        Ok(Triple { ring, eps_gen })
    }

    /// `T_n(K) = (R/m^n, m/m^(n+1), inclusion)` with `Π = [π]`.
    pub fn t_n_of_field(field: &FieldRef, n: u32) -> Result<Triple> {
        let ring = Arc::new(TruncatedDvr::of_field(field, n)?);
        let g = ring.uniformizer();
        Triple::new(ring, g)
    }

    /// `Tr(H) = (O_H/≡_ρ, m_H/≡_{ρ+θ}, [α]_{ρ+θ} ↦ [α]_ρ)` with `Π = [π]`.
    pub fn tr_of_hyperfield(h: &HFDesc) -> Triple {
        let ring = Arc::new(TruncatedDvr::of_hyperfield(h));
        let g = ring.uniformizer();
        Triple { ring, eps_gen: g }
    }

    pub fn ring(&self) -> &Arc<TruncatedDvr> {
        &self.ring
    }
    /// `ε(Π)`.
    pub fn eps_gen(&self) -> &TElem {
        &self.eps_gen
    }

    /// `ε^{⊗k}: M^{⊗k} → R` for `k ≥ 0`.
    pub fn eps(&self, x: &ModElem) -> Result<TElem> {
        if x.power < 0 {
            return Err(Error::InvalidInput(
                "ε is defined on nonnegative tensor powers".into(),
            ));
        }
        Ok(self
            .ring
            .mul(&x.scalar, &self.ring.pow(&self.eps_gen, x.power as u64)))
    }

    /// `ν_T(a Π^{⊗k}) = k + ν_R(a)`.
    pub fn val(&self, x: &ModElem) -> Option<i64> {
        self.ring.val(&x.scalar).map(|v| v as i64 + x.power)
    }

    /// `ε(Π) / π`, a unit.
    fn gen_unit(&self) -> TElem {
        if self.ring.length() == 1 {
            return self.ring.one();
        }
        self.ring.shift_down(&self.eps_gen, 1)
    }

    /// The unit `a` with `p = a Π^{⊗e}` in `M^{⊗e} = m^e/m^(n+e)`.
    pub fn unit_of_p(&self) -> Result<TElem> {
        let r = &self.ring;
        let field = r.field();
        let e = field.e();
        if r.length() <= e {
            return Err(Error::InvalidInput(format!(
                "length {} does not exceed e = {e}",
                r.length()
            )));
        }
        let p = crate::local::LFElem::from_int(field, field.p() as i64);
        let unit = r.elem(&p.digits()[..r.length() as usize])?;
        Ok(r.mul(&unit, &r.pow(&r.inv(&self.gen_unit())?, e as u64)))
    }

    /// The hyperfield `U(T)`.
    pub fn u(&self) -> UHyperfield {
        UHyperfield {
            triple: self.clone(),
        }
    }
}

/// An element `a Π^{⊗k}` of `U(T)` with `a` a unit, or zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct UElem {
    pub level: Option<i64>,
    pub unit: Option<TElem>,
}

impl UElem {
    pub fn zero() -> UElem {
        UElem {
            level: None,
            unit: None,
        }
    }
}

/// The discrete valued hyperfield `U(T) = {0} ∪ ⋃_k {x ∈ M^{⊗k} : ν_T(x) = k}`.
#[derive(Clone, Debug)]
pub struct UHyperfield {
    triple: Triple,
}

impl UHyperfield {
    pub fn triple(&self) -> &Triple {
        &self.triple
    }

    pub fn elem(&self, level: i64, unit: TElem) -> Result<UElem> {
        if !self.triple.ring.is_unit(&unit) {
            return Err(Error::InvalidInput(
                "U(T) elements need a unit coefficient".into(),
            ));
        }
        Ok(UElem {
            level: Some(level),
            unit: Some(unit),
        })
    }

    fn units_with_prefix(&self, level: i64, prefix: &TElem, len: u32) -> Result<Vec<UElem>> {
        let r = &self.triple.ring;
        Ok(r.with_prefix(&prefix.digits[..len as usize])?
            .into_iter()
            .map(|u| UElem {
                level: Some(level),
                unit: Some(u),
            })
            .collect())
    }
}

impl DiscreteHyperfield for UHyperfield {
    type Elem = UElem;

    fn zero(&self) -> UElem {
        UElem::zero()
    }
    fn one(&self) -> UElem {
        UElem {
            level: Some(0),
            unit: Some(self.triple.ring.one()),
        }
    }
    fn mul(&self, a: &UElem, b: &UElem) -> UElem {
        match (a.level, b.level, &a.unit, &b.unit) {
            (Some(k), Some(l), Some(x), Some(y)) => UElem {
                level: Some(k + l),
                unit: Some(self.triple.ring.mul(x, y)),
            },
            _ => UElem::zero(),
        }
    }
    fn neg(&self, a: &UElem) -> UElem {
        UElem {
            level: a.level,
            unit: a.unit.as_ref().map(|x| self.triple.ring.neg(x)),
        }
    }
    fn inv(&self, a: &UElem) -> Option<UElem> {
        let r = &self.triple.ring;
        Some(UElem {
            level: Some(-a.level?),
            unit: Some(r.inv(a.unit.as_ref()?).ok()?),
        })
    }
    fn level(&self, a: &UElem) -> Option<i64> {
        a.level
    }
    fn length(&self) -> u32 {
        self.triple.ring.length()
    }
    fn classes_at(&self, level: i64) -> Result<Vec<UElem>> {
        Ok(self
            .triple
            .ring
            .units()?
            .into_iter()
            .map(|u| UElem {
                level: Some(level),
                unit: Some(u),
            })
            .collect())
    }

    /// `a Π^{⊗k} + b Π^{⊗l}` with `k ≤ l` is computed in `M^{⊗k} ≅ R` as
    /// `s = a + b ε(Π)^(l-k)`. If `ν_R(s) = j` the sum is every
    /// `w Π^{⊗(k+j)}` with `w ε(Π)^j ≡ s`, a condition on `w` modulo
    /// `m^(n-j)`; if `s = 0` it is `0` together with every level `≥ k + n`.
    fn sum(&self, a: &UElem, b: &UElem, lo: i64, hi: i64) -> Result<SumSet<UElem>> {
        let r = &self.triple.ring;
        let n = r.length() as i64;
        let in_window = |l: i64| lo <= l && l <= hi;
        let (x, y) = match (a.level, b.level) {
            (None, None) => {
                return Ok(SumSet {
                    members: BTreeSet::new(),
                    contains_zero: true,
                })
            }
            (Some(_), None) | (None, Some(_)) => {
                let x = if a.level.is_some() { a } else { b };
                let members = [x.clone()]
                    .into_iter()
                    .filter(|e| in_window(e.level.unwrap()))
                    .collect();
                return Ok(SumSet {
                    members,
                    contains_zero: false,
                });
            }
            (Some(k), Some(l)) if k <= l => (a, b),
            _ => (b, a),
        };
        let k = x.level.unwrap();
        let d = (y.level.unwrap() - k) as u64;
        let (ua, ub) = (x.unit.as_ref().unwrap(), y.unit.as_ref().unwrap());
        let shifted = if d >= n as u64 {
            r.zero()
        } else {
            r.mul(ub, &r.pow(&self.triple.eps_gen, d))
        };
        let s = r.add(ua, &shifted);
        let mut members = BTreeSet::new();
        match r.val(&s) {
            None => {
                for level in lo.max(k + n)..=hi {
                    members.extend(self.classes_at(level)?);
                }
                Ok(SumSet {
                    members,
                    contains_zero: true,
                })
            }
            Some(j) => {
                if in_window(k + j as i64) {
                    let w = r.mul(
                        &r.shift_down(&s, j),
                        &r.pow(&r.inv(&self.triple.gen_unit())?, j as u64),
                    );
                    members.extend(self.units_with_prefix(k + j as i64, &w, r.length() - j)?);
                }
                Ok(SumSet {
                    members,
                    contains_zero: false,
                })
            }
        }
    }

    fn render(&self, a: &UElem) -> String {
        match (&a.level, &a.unit) {
            (Some(k), Some(u)) => format!("({})·Π^{k}", self.triple.ring.render(u)),
            _ => "0".into(),
        }
    }
}

/// A morphism of triples `(r, f, η)`.
///
/// The ring map is `f(Σ t(d_i) π₁^i) = Σ t(σ d_i) f(π₁)^i` and
/// `η(Π₁) = c Π₂^{⊗r}`.
#[derive(Clone, Debug)]
pub struct TripleMor {
    pub source: Triple,
    pub target: Triple,
    pub ram_index: u32,
    pub sigma: Embedding,
    /// `f(π₁)`.
    pub pi_image: TElem,
    /// `c` with `η(Π₁) = c Π₂^{⊗r}`.
    pub eta: TElem,
}

/// Outcome of checking the morphism laws.
#[derive(Clone, Debug, Serialize)]
pub struct MorLaws {
    pub ring_hom: bool,
    pub eps_compatible: bool,
    pub eta_iso: bool,
    pub pairs_checked: u64,
    pub exhaustive: bool,
}

impl MorLaws {
    pub fn holds(&self) -> bool {
        self.ring_hom && self.eps_compatible && self.eta_iso
    }
}

impl TripleMor {
    pub fn identity(t: &Triple) -> TripleMor {
        TripleMor {
            source: t.clone(),
            target: t.clone(),
            ram_index: 1,
            sigma: Embedding::identity(t.ring.residue()),
            pi_image: t.ring.uniformizer(),
            eta: t.ring.one(),
        }
    }

    /// The ring map `f: R₁ → R₂`.
    pub fn ring_map(&self, x: &TElem) -> TElem {
        let r2 = &self.target.ring;
        let mut acc = r2.zero();
        let mut pw = r2.one();
        for &d in &x.digits {
            if d != 0 {
                acc = r2.add(&acc, &r2.mul(&r2.teich(self.sigma.apply(d)), &pw));
            }
            pw = r2.mul(&pw, &self.pi_image);
        }
        acc
    }

    /// `η^{⊗k}(a Π₁^{⊗k}) = f(a) c^k Π₂^{⊗rk}`.
    pub fn eta_map(&self, x: &ModElem) -> Result<ModElem> {
        let r2 = &self.target.ring;
        let c = if x.power >= 0 {
            r2.pow(&self.eta, x.power as u64)
        } else {
            r2.pow(&r2.inv(&self.eta)?, (-x.power) as u64)
        };
        Ok(ModElem {
            scalar: r2.mul(&self.ring_map(&x.scalar), &c),
            power: x.power * self.ram_index as i64,
        })
    }

    /// `self` followed by `next`: `(r₁r₂, f₂∘f₁, η₂^{⊗r₁}∘η₁)`.
    pub fn then(&self, next: &TripleMor) -> Result<TripleMor> {
        let r3 = &next.target.ring;
        Ok(TripleMor {
            source: self.source.clone(),
            target: next.target.clone(),
            ram_index: self.ram_index * next.ram_index,
            sigma: self.sigma.then(&next.sigma)?,
            pi_image: next.ring_map(&self.pi_image),
            eta: r3.mul(
                &next.ring_map(&self.eta),
                &r3.pow(&next.eta, self.ram_index as u64),
            ),
        })
    }

    /// Checks that `f` is a ring homomorphism, that `f ∘ ε₁ = ε₂ ∘ η`, and
    /// that `η` is an isomorphism onto `M₂^{⊗r}`. Pairs are exhaustive when
    /// there are at most `pair_budget` of them, otherwise a seeded sample.
    pub fn check_laws(&self, pair_budget: u64, seed: u64) -> Result<MorLaws> {
        let (r1, r2) = (&self.source.ring, &self.target.ring);
        let q1 = r1.residue().q() as u128;
        let size = q1.pow(r1.length());
        let exhaustive = size * size <= pair_budget as u128;
        let pairs: Vec<(TElem, TElem)> = if exhaustive {
            let all = r1.elements()?;
            all.iter()
                .flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone())))
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || {
                let d: Vec<u32> = (0..r1.length())
                    .map(|_| rng.gen_range(0..q1 as u32))
                    .collect();
                r1.elem(&d).unwrap()
            };
            (0..pair_budget).map(|_| (draw(), draw())).collect()
        };
        let ring_hom = self.ring_map(&r1.one()) == r2.one()
            && crate::par::map(&pairs, |(a, b)| {
                self.ring_map(&r1.add(a, b)) == r2.add(&self.ring_map(a), &self.ring_map(b))
                    && self.ring_map(&r1.mul(a, b)) == r2.mul(&self.ring_map(a), &self.ring_map(b))
            })
            .into_iter()
            .all(|ok| ok);
        let lhs = self.ring_map(&self.source.eps_gen);
        let rhs = self.target.eps(&ModElem {
            scalar: self.eta.clone(),
            power: self.ram_index as i64,
        })?;
        Ok(MorLaws {
            ring_hom,
            eps_compatible: lhs == rhs,
            eta_iso: r2.is_unit(&self.eta),
            pairs_checked: pairs.len() as u64,
            exhaustive,
        })
    }

    /// Whether `a₁Π₁^{⊗e}` maps to `a₂Π₂^{⊗e}`, where `p = a_i ε(Π_i)^e`.
    pub fn is_over_p(&self) -> Result<bool> {
        let (r1, r2) = (&self.source.ring, &self.target.ring);
        let (e1, e2) = (r1.field().e(), r2.field().e());
        if r1.length() != r2.length() || e1 != e2 || self.ram_index != 1 {
            return Err(Error::InvalidInput(
                "over p needs equal lengths and ramification indices".into(),
            ));
        }
        let a1 = self.source.unit_of_p()?;
        let a2 = self.target.unit_of_p()?;
        Ok(self
            .eta_map(&ModElem {
                scalar: a1,
                power: e1 as i64,
            })?
            .scalar
            == a2)
    }

    /// The induced map `U(T₁) → U(T₂)`.
    pub fn u_map(&self, x: &UElem) -> Result<UElem> {
        match (&x.level, &x.unit) {
            (Some(k), Some(a)) => {
                let m = self.eta_map(&ModElem {
                    scalar: a.clone(),
                    power: *k,
                })?;
                Ok(UElem {
                    level: Some(m.power),
                    unit: Some(m.scalar),
                })
            }
            _ => Ok(UElem::zero()),
        }
    }
}

/// An isomorphism from a triple over `R(K)/m^n` to `T_n(K)`.
pub fn isomorphism_to_standard(t: &Triple) -> Result<TripleMor> {
    let ring = t.ring();
    let field = ring.field().clone();
    let standard = Triple::t_n_of_field(&field, ring.length())?;
    let target_ring = standard.ring().clone();
    let eta = target_ring.elem(t.gen_unit().digits())?;
    Ok(TripleMor {
        source: t.clone(),
        target: standard,
        ram_index: 1,
        sigma: Embedding::identity(ring.residue()),
        pi_image: target_ring.uniformizer(),
        eta,
    })
}

/// Result of comparing `U(Tr(H))` with `H`.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub classes: usize,
    pub pairs: u64,
    pub failures: u64,
    pub counterexample: Option<String>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `U(Tr(H)) → H`, `a Π^{⊗k} ↦ [π^k a]`.
pub fn u_tr_to_h(h: &HFDesc, x: &UElem) -> Result<HClass> {
    match (&x.level, &x.unit) {
        (Some(k), Some(a)) => h.class(*k, a.digits()),
        _ => Ok(HClass::zero()),
    }
}

/// `H → U(Tr(H))`, the inverse of [`u_tr_to_h`].
pub fn h_to_u_tr(x: &HClass) -> UElem {
    match x.level() {
        Some(k) => UElem {
            level: Some(k),
            unit: Some(TElem {
                digits: x.digits().to_vec(),
            }),
        },
        None => UElem::zero(),
    }
}

/// Checks that `u_tr_to_h` is an isometric isomorphism on all classes with
/// level in `[lo, hi]`: it is bijective there, preserves levels, products and
/// negatives, and carries each hypersum onto the hypersum of the images.
pub fn roundtrip_check(h: &HFDesc, lo: i64, hi: i64) -> Result<RoundtripReport> {
    let t = Triple::tr_of_hyperfield(h);
    let u = t.u();
    if t.ring().length() != h.n() {
        return Err(Error::Mismatch("Tr(H) has the wrong length".into()));
    }
    let mut classes = vec![UElem::zero()];
    for level in lo..=hi {
        classes.extend(u.classes_at(level)?);
    }
    let phi: Vec<HClass> = classes
        .iter()
        .map(|x| u_tr_to_h(h, x))
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<&HClass> = phi.iter().collect();
    let mut failures = 0u64;
    let mut counterexample = None;
    let mut note = |msg: String| {
        failures += 1;
        counterexample.get_or_insert(msg);
    };
    let expected = 1 + (hi - lo + 1).max(0) as u128 * h.classes_per_level();
    if distinct.len() as u128 != expected {
        note(format!(
            "image has {} classes, expected {expected}",
            distinct.len()
        ));
    }
    for (x, hx) in classes.iter().zip(&phi) {
        if h_to_u_tr(hx) != *x || hx.level() != x.level {
            note(format!(
                "{} is not sent to a class of the same level",
                u.render(x)
            ));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|i| (0..classes.len()).map(move |j| (i, j)))
        .collect();
    let results = crate::par::map(&pairs, |&(i, j)| -> Result<Option<String>> {
        let (x, y) = (&classes[i], &classes[j]);
        let (hx, hy) = (&phi[i], &phi[j]);
        if u_tr_to_h(h, &u.mul(x, y))? != h.mul(hx, hy) {
            return Ok(Some(format!(
                "product of {} and {}",
                u.render(x),
                u.render(y)
            )));
        }
        if i == j && u_tr_to_h(h, &u.neg(x))? != h.neg(hx) {
            return Ok(Some(format!("negative of {}", u.render(x))));
        }
        let su = u.sum(x, y, lo, hi)?;
        let sh = DiscreteHyperfield::sum(h, hx, hy, lo, hi)?;
        let mapped: BTreeSet<HClass> = su
            .members
            .iter()
            .map(|z| u_tr_to_h(h, z))
            .collect::<Result<_>>()?;
        if mapped != sh.members || su.contains_zero != sh.contains_zero {
            return Ok(Some(format!("sum of {} and {}", u.render(x), u.render(y))));
        }
        Ok(None)
    });
    for r in results {
        if let Some(msg) = r? {
            note(msg);
        }
    }
    Ok(RoundtripReport {
        classes: classes.len(),
        pairs: pairs.len() as u64,
        failures,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalField;

    fn q3_sqrt3() -> FieldRef {
        LocalField::pure(3, 2, 3, 12).unwrap()
    }

    /// `(Z/9)[x]/(x² - 3)` as pairs `(a, b)` for `a + b x`.
    fn oracle_mul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
        let (a, b) = x;
        let (c, d) = y;
        (
            (a * c + 3 * b * d).rem_euclid(9),
            (a * d + b * c).rem_euclid(9),
        )
    }

    /// Reads `a + b x` off absolute digits in `Q_3(√3)` with `x = π`.
    fn to_pair(r: &TruncatedDvr, t: &TElem) -> (i64, i64) {
        let teich = [0i64, 1, -1];
        let mut acc = (0i64, 0i64);
        let mut pw = (1i64, 0i64);
        for &d in t.digits() {
            let c = teich[d as usize];
            acc = (
                (acc.0 + c * pw.0).rem_euclid(9),
                (acc.1 + c * pw.1).rem_euclid(9),
            );
            pw = oracle_mul(pw, (0, 1));
        }
        assert_eq!(r.length(), 4);
        acc
    }

    #[test]
    fn tr_of_h4_matches_z9_sqrt3_multiplication() {
        let h = HFDesc::new(&q3_sqrt3(), 4).unwrap();
        let t = Triple::tr_of_hyperfield(&h);
        let r = t.ring();
        let all = r.elements().unwrap();
        assert_eq!(all.len(), 81);
        let pairs: BTreeSet<(i64, i64)> = all.iter().map(|x| to_pair(r, x)).collect();
        assert_eq!(pairs.len(), 81);
        for x in &all {
            for y in &all {
                assert_eq!(
                    to_pair(r, &r.mul(x, y)),
                    oracle_mul(to_pair(r, x), to_pair(r, y))
                );
                let (a, b) = to_pair(r, x);
                let (c, d) = to_pair(r, y);
                assert_eq!(
                    to_pair(r, &r.add(x, y)),
                    ((a + c).rem_euclid(9), (b + d).rem_euclid(9))
                );
            }
        }
    }

    #[test]
    fn t2_of_q2_is_z4() {
        let k = LocalField::qp(2, 8).unwrap();
        let t = Triple::t_n_of_field(&k, 2).unwrap();
        let r = t.ring();
        let value = |x: &TElem| x.digits()[0] as i64 + 2 * x.digits()[1] as i64;
        for a in 0..4 {
            for b in 0..4 {
                let (x, y) = (r.from_int(a), r.from_int(b));
                assert_eq!(value(&r.add(&x, &y)), (a + b) % 4);
                assert_eq!(value(&r.mul(&x, &y)), (a * b) % 4);
            }
        }
        assert_eq!(r.val(t.eps_gen()), Some(1));
    }

    #[test]
    fn field_and_hyperfield_rings_agree() {
        for (k, n) in [
            (LocalField::pure(2, 2, 2, 10).unwrap(), 3),
            (q3_sqrt3(), 3),
            (LocalField::qp(3, 6).unwrap(), 2),
        ] {
            let a = TruncatedDvr::of_field(&k, n).unwrap();
            let b = TruncatedDvr::of_hyperfield(&HFDesc::new(&k, n).unwrap());
            let all = a.elements().unwrap();
            for x in &all {
                assert_eq!(a.neg(x), b.neg(x));
                for y in &all {
                    assert_eq!(a.add(x, y), b.add(x, y), "{x:?} + {y:?}");
                    assert_eq!(a.mul(x, y), b.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn residue_field_and_length() {
        let h = HFDesc::new(&LocalField::qp(2, 8).unwrap(), 3).unwrap();
        let t = Triple::tr_of_hyperfield(&h);
        assert_eq!(t.ring().length(), 3);
        assert_eq!(**t.ring().residue(), **h.residue_field());
        let u1 = Triple::t_n_of_field(h.field(), 1).unwrap().u();
        assert_eq!(u1.triple().ring().residue().q(), 2);
    }

    #[test]
    fn u_of_t2_q2_one_plus_one() {
        let k = LocalField::qp(2, 8).unwrap();
        let u = Triple::t_n_of_field(&k, 2).unwrap().u();
        let one = DiscreteHyperfield::one(&u);
        let s = u.sum(&one, &one, -2, 6).unwrap();
        let h = HFDesc::new(&k, 2).unwrap();
        let two = h.class_of(&crate::LFElem::from_int(&k, 2)).unwrap();
        let six = h.class_of(&crate::LFElem::from_int(&k, 6)).unwrap();
        let got: BTreeSet<HClass> = s
            .members
            .iter()
            .map(|x| u_tr_to_h(&h, x).unwrap())
            .collect();
        assert_eq!(got, [two, six].into_iter().collect());
        assert!(!s.contains_zero);
    }

    #[test]
    fn roundtrip_small_fields() {
        for k in [LocalField::qp(2, 8).unwrap(), q3_sqrt3()] {
            for n in 1..=3 {
                let h = HFDesc::new(&k, n).unwrap();
                let report = roundtrip_check(&h, 0, 2).unwrap();
                assert!(report.passed(), "{:?}", report.counterexample);
            }
        }
    }

    #[test]
    fn a_plus_bx_to_a_plus_4bx_is_a_morphism_not_over_p() {
        let t = Triple::t_n_of_field(&q3_sqrt3(), 4).unwrap();
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
        for x in r.elements().unwrap() {
            let (a, b) = to_pair(r, &x);
            assert_eq!(to_pair(r, &mor.ring_map(&x)), (a, (4 * b).rem_euclid(9)));
        }
        assert!(mor.check_laws(10_000, 0).unwrap().holds());
        assert!(!mor.is_over_p().unwrap());
        let id = TripleMor::identity(&t);
        assert!(id.is_over_p().unwrap());
        let twice = mor.then(&mor).unwrap();
        assert_eq!(twice.pi_image, r.mul(&r.from_int(16), &r.uniformizer()));
        let short = Triple::t_n_of_field(&q3_sqrt3(), 2).unwrap();
        assert!(TripleMor::identity(&short).is_over_p().is_err());
    }

    #[test]
    fn random_generators_give_isomorphic_triples() {
        let k = q3_sqrt3();
        let ring = Arc::new(TruncatedDvr::of_field(&k, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let unit: Vec<u32> = (0..3)
                .map(|i| {
                    if i == 0 {
                        rng.gen_range(1..3)
                    } else {
                        rng.gen_range(0..3)
                    }
                })
                .collect();
            let g = ring.mul(&ring.elem(&unit).unwrap(), &ring.uniformizer());
            let t = Triple::new(ring.clone(), g).unwrap();
            let iso = isomorphism_to_standard(&t).unwrap();
            assert!(iso.check_laws(1_000_000, 0).unwrap().holds());
        }
        assert!(Triple::new(ring.clone(), ring.one()).is_err());
    }
}
