//! The valued hyperfields `H_n(K) = K / (1 + m^n)`.
//!
//! A nonzero class `[x]_n` is determined by `ν(x)` and the first `n`
//! Teichmüller digits of `x`. The hypersum of two classes is the set of
//! classes of all sums of representatives, which is the ball of elements `y`
//! with `ν(y - (a + b)) > (n - 1)/e + min(ν(a), ν(b))`.

mod axioms;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

pub use axioms::{
    check_axioms, AxiomConfig, AxiomOutcome, AxiomReport, DiscreteHyperfield, SumSet,
};

use crate::error::{Error, Result};
use crate::local::{FieldRef, LFElem, Value};

/// Hard cap on the number of classes a single enumeration may produce.
pub const ENUMERATION_LIMIT: u128 = 20_000_000;

/// The hyperfield `H_n(K)`.
#[derive(Clone)]
pub struct HFDesc {
    field: FieldRef,
    n: u32,
}

impl fmt::Debug for HFDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{}({:?})", self.n, self.field)
    }
}

impl PartialEq for HFDesc {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && *self.field == *other.field
    }
}

/// A class of `H_n(K)`: zero, or a level together with `n` unit digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct HClass {
    level: Option<i64>,
    digits: Vec<u32>,
}

impl HClass {
    pub fn zero() -> HClass {
        HClass {
            level: None,
            digits: Vec::new(),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.level.is_none()
    }
    /// Valuation in units of `ν(π)`.
    pub fn level(&self) -> Option<i64> {
        self.level
    }
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }
    pub(crate) fn from_parts(level: i64, digits: Vec<u32>) -> HClass {
        HClass {
            level: Some(level),
            digits,
        }
    }
}

/// The hypersum of two classes, as the set `{y : ν(y - center) > radius}`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: LFElem,
    /// Strict radius in units of `ν(π)`; `None` when the ball is `{0}`.
    pub radius: Option<i64>,
}

impl Ball {
    /// The equivalent closed radius `ρ + min(ν(a), ν(b))`, normalised.
    pub fn closed_radius(&self) -> Value {
        Value::from_level(self.radius.map(|r| r + 1), self.center.field().e())
    }

    /// Level of the center, or `None` if it vanishes beyond the radius.
    fn center_level(&self) -> Result<Option<i64>> {
        let Some(r) = self.radius else {
            return Ok(None);
        };
        match self.center.level() {
            Some(v) if v <= r => Ok(Some(v)),
            Some(_) => Ok(None),
            None => match self.center.zero_abs() {
                Some(a) if a <= r => Err(Error::PrecisionExhausted(
                    "ball center is not known to the radius".into(),
                )),
                _ => Ok(None),
            },
        }
    }

    pub fn contains_zero(&self) -> Result<bool> {
        Ok(self.center_level()?.is_none())
    }
}

impl HFDesc {
    pub fn new(field: &FieldRef, n: u32) -> Result<HFDesc> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if n > field.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "n = {n} exceeds the working precision {}",
                field.precision()
            )));
        }
        Ok(HFDesc {
            field: field.clone(),
            n,
        })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn e(&self) -> u32 {
        self.field.e()
    }
    /// `θ = ν(π)`.
    pub fn theta(&self) -> Ratio<i64> {
        Ratio::new(1, self.e() as i64)
    }
    /// `ρ = n θ`.
    pub fn rho(&self) -> Ratio<i64> {
        Ratio::new(self.n as i64, self.e() as i64)
    }

    /// Number of nonzero classes at each level, `(q - 1) q^(n - 1)`.
    pub fn classes_per_level(&self) -> u128 {
        let q = self.field.residue().q() as u128;
        (q - 1) * q.pow(self.n - 1)
    }

    pub fn zero(&self) -> HClass {
        HClass::zero()
    }

    pub fn one(&self) -> HClass {
        let mut d = vec![0; self.n as usize];
        d[0] = 1;
        HClass {
            level: Some(0),
            digits: d,
        }
    }

    /// The class `[π]`.
    pub fn uniformizer(&self) -> HClass {
        HClass {
            level: Some(1),
            ..self.one()
        }
    }

    /// Builds a class from a level and unit digits; missing digits are zero.
    pub fn class(&self, level: i64, digits: &[u32]) -> Result<HClass> {
        let q = self.field.residue().q();
        if digits.first().is_none_or(|&d| d == 0) || digits.iter().any(|&d| d >= q) {
            return Err(Error::InvalidInput(format!(
                "invalid unit digits {digits:?}"
            )));
        }
        let mut d: Vec<u32> = digits.iter().take(self.n as usize).copied().collect();
        d.resize(self.n as usize, 0);
        Ok(HClass {
            level: Some(level),
            digits: d,
        })
    }

    /// `[x]_n`. Fails when `x` is not known to `n` digits.
    pub fn class_of(&self, x: &LFElem) -> Result<HClass> {
        match x.level() {
            None if x.is_exact_zero() => Ok(HClass::zero()),
            None => Err(Error::PrecisionExhausted(
                "element is zero only to finite precision".into(),
            )),
            Some(v) => {
                if x.prec() < self.n {
                    return Err(Error::PrecisionExhausted(format!(
                        "element known to {} digits, class needs {}",
                        x.prec(),
                        self.n
                    )));
                }
                Ok(HClass {
                    level: Some(v),
                    digits: x.digits()[..self.n as usize].to_vec(),
                })
            }
        }
    }

    /// The canonical representative `π^v Σ_{i<n} t(d_i) π^i`.
    pub fn rep(&self, a: &HClass) -> LFElem {
        match a.level {
            None => self.field.zero(),
            Some(v) => LFElem::from_digits(&self.field, v, a.digits.clone()),
        }
    }

    pub(crate) fn unit_digits_of_model(&self, y: &[u64]) -> Vec<u32> {
        self.field.extract(y, self.n).expect("unit").1
    }

    pub fn mul(&self, a: &HClass, b: &HClass) -> HClass {
        match (a.level, b.level) {
            (Some(x), Some(y)) => {
                let m = &self.field.model;
                let u = m.mul(
                    &self.field.unit_from_digits(&a.digits),
                    &self.field.unit_from_digits(&b.digits),
                );
                HClass {
                    level: Some(x + y),
                    digits: self.unit_digits_of_model(&u),
                }
            }
            _ => HClass::zero(),
        }
    }

    pub fn neg(&self, a: &HClass) -> HClass {
        match a.level {
            None => HClass::zero(),
            Some(v) => {
                let u = self
                    .field
                    .model
                    .neg(&self.field.unit_from_digits(&a.digits));
                HClass {
                    level: Some(v),
                    digits: self.unit_digits_of_model(&u),
                }
            }
        }
    }

    pub fn inv(&self, a: &HClass) -> Result<HClass> {
        match a.level {
            None => Err(Error::DivisionByZero),
            Some(v) => {
                let u = self
                    .field
                    .unit_inverse(&self.field.unit_from_digits(&a.digits));
                Ok(HClass {
                    level: Some(-v),
                    digits: self.unit_digits_of_model(&u),
                })
            }
        }
    }

    pub fn pow(&self, a: &HClass, k: i64) -> Result<HClass> {
        if k < 0 {
            return self.pow(&self.inv(a)?, -k);
        }
        let mut acc = self.one();
        let mut base = a.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn val(&self, a: &HClass) -> Value {
        Value::from_level(a.level, self.e())
    }

    /// Hypersum `a + b`.
    pub fn add(&self, a: &HClass, b: &HClass) -> Ball {
        let center = self.rep(a).add(&self.rep(b)).expect("same field");
        let min = match (a.level, b.level) {
            (None, None) => {
                return Ball {
                    center,
                    radius: None,
                }
            }
            (Some(x), None) | (None, Some(x)) => x,
            (Some(x), Some(y)) => x.min(y),
        };
        Ball {
            center,
            radius: Some(min + self.n as i64 - 1),
        }
    }

    pub fn ball_contains(&self, ball: &Ball, c: &HClass) -> Result<bool> {
        let Some(r) = ball.radius else {
            return Ok(c.is_zero());
        };
        match ball.center_level()? {
            None => Ok(c.level.is_none_or(|v| v > r)),
            Some(vc) => {
                let fixed = ((r + 1 - vc) as usize).min(self.n as usize);
                if ball.center.prec() < fixed as u32 {
                    return Err(Error::PrecisionExhausted(
                        "ball center digits unknown".into(),
                    ));
                }
                Ok(c.level == Some(vc) && c.digits[..fixed] == ball.center.digits()[..fixed])
            }
        }
    }

    /// Nonzero classes of the ball with level in `[lo, hi]`, sorted.
    pub fn ball_classes(&self, ball: &Ball, lo: i64, hi: i64) -> Result<Vec<HClass>> {
        let Some(r) = ball.radius else {
            return Ok(Vec::new());
        };
        match ball.center_level()? {
            None => {
                let mut out = Vec::new();
                for level in lo.max(r + 1)..=hi {
                    out.extend(self.classes_at(level)?);
                }
                Ok(out)
            }
            Some(vc) => {
                if vc < lo || vc > hi {
                    return Ok(Vec::new());
                }
                let fixed = ((r + 1 - vc) as usize).min(self.n as usize);
                if ball.center.prec() < fixed as u32 {
                    return Err(Error::PrecisionExhausted(
                        "ball center digits unknown".into(),
                    ));
                }
                let prefix = &ball.center.digits()[..fixed];
                self.extend_prefix(vc, prefix)
            }
        }
    }

    /// One member of the ball: zero if the ball contains it, otherwise the
    /// class of the center with its free digits set to zero.
    pub fn ball_member(&self, ball: &Ball) -> Result<HClass> {
        let Some(r) = ball.radius else {
            return Ok(HClass::zero());
        };
        match ball.center_level()? {
            None => Ok(HClass::zero()),
            Some(vc) => {
                let fixed = ((r + 1 - vc) as usize).min(self.n as usize);
                if ball.center.prec() < fixed as u32 {
                    return Err(Error::PrecisionExhausted(
                        "ball center digits unknown".into(),
                    ));
                }
                let mut d = ball.center.digits()[..fixed].to_vec();
                d.resize(self.n as usize, 0);
                Ok(HClass {
                    level: Some(vc),
                    digits: d,
                })
            }
        }
    }

    /// All classes at `level` whose digits start with `prefix`.
    fn extend_prefix(&self, level: i64, prefix: &[u32]) -> Result<Vec<HClass>> {
        let q = self.field.residue().q() as u128;
        let free = self.n as usize - prefix.len().min(self.n as usize);
        let count = q.pow(free as u32);
        if count > ENUMERATION_LIMIT {
            return Err(Error::BudgetExceeded {
                needed: count,
                budget: ENUMERATION_LIMIT as u64,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut tail = vec![0u32; free];
        loop {
            let mut d = prefix[..prefix.len().min(self.n as usize)].to_vec();
            d.extend_from_slice(&tail);
            out.push(HClass {
                level: Some(level),
                digits: d,
            });
            let mut i = free;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                tail[i] += 1;
                if tail[i] < q as u32 {
                    break;
                }
                tail[i] = 0;
            }
        }
    }

    /// Every nonzero class at `level`, in lexicographic digit order.
    pub fn classes_at(&self, level: i64) -> Result<Vec<HClass>> {
        let q = self.field.residue().q();
        let mut out = Vec::new();
        for lead in 1..q {
            out.extend(self.extend_prefix(level, &[lead])?);
        }
        Ok(out)
    }

    /// The residue field `k_H = O_H / m_H`, which is that of `K`.
    pub fn residue_field(&self) -> &std::sync::Arc<crate::residue::FFDesc> {
        self.field.residue()
    }

    /// Generator of the value group `θ Z`.
    pub fn value_group(&self) -> Ratio<i64> {
        self.theta()
    }

    pub fn render(&self, a: &HClass) -> String {
        match a.level {
            None => "[0]".into(),
            Some(v) => {
                let res = self.field.residue();
                let d: Vec<String> = a.digits.iter().map(|&x| res.render(x)).collect();
                format!("[π^{v}·({})]", d.join(" "))
            }
        }
    }

    pub fn render_ball(&self, b: &Ball) -> String {
        match b.radius {
            None => "{[0]}".into(),
            Some(_) => format!(
                "B(center {}, closed radius {})",
                b.center,
                b.closed_radius()
            ),
        }
    }
}

impl DiscreteHyperfield for HFDesc {
    type Elem = HClass;
    fn zero(&self) -> HClass {
        HClass::zero()
    }
    fn one(&self) -> HClass {
        HFDesc::one(self)
    }
    fn mul(&self, a: &HClass, b: &HClass) -> HClass {
        HFDesc::mul(self, a, b)
    }
    fn neg(&self, a: &HClass) -> HClass {
        HFDesc::neg(self, a)
    }
    fn inv(&self, a: &HClass) -> Option<HClass> {
        HFDesc::inv(self, a).ok()
    }
    fn level(&self, a: &HClass) -> Option<i64> {
        a.level
    }
    fn length(&self) -> u32 {
        self.n
    }
    fn classes_at(&self, level: i64) -> Result<Vec<HClass>> {
        HFDesc::classes_at(self, level)
    }
    fn sum(&self, a: &HClass, b: &HClass, lo: i64, hi: i64) -> Result<SumSet<HClass>> {
        let ball = self.add(a, b);
        Ok(SumSet {
            members: self
                .ball_classes(&ball, lo, hi)?
                .into_iter()
                .collect::<BTreeSet<_>>(),
            contains_zero: ball.contains_zero()?,
        })
    }
    fn render(&self, a: &HClass) -> String {
        HFDesc::render(self, a)
    }
}
