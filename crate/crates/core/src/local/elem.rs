use std::fmt;
use std::sync::Arc;

use super::model::Coeffs;
use super::{FieldRef, LocalField, Value};
use crate::error::{Error, Result};

/// An element of a local field in canonical digit form.
///
/// A nonzero element is `π^val Σ t(digits[i]) π^i` where only the first
/// `prec` digits are guaranteed. A zero is either exact, or known only to be
/// divisible by `π^abs` after a cancelling subtraction.
#[derive(Clone)]
pub struct LFElem {
    field: FieldRef,
    val: Option<i64>,
    digits: Vec<u32>,
    prec: u32,
    zero_abs: Option<i64>,
    unit: Coeffs,
}

/// Binary operations selectable at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LFOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl LFElem {
    pub fn exact_zero(field: &FieldRef) -> LFElem {
        LFElem {
            field: field.clone(),
            val: None,
            digits: vec![0; field.precision() as usize],
            prec: 0,
            zero_abs: None,
            unit: field.model.zero(),
        }
    }

    /// Zero known modulo `π^abs` only.
    pub fn inexact_zero(field: &FieldRef, abs: i64) -> LFElem {
        LFElem {
            zero_abs: Some(abs),
            ..LFElem::exact_zero(field)
        }
    }

    /// `π^val Σ t(d_i) π^i` at full working precision. Leading zero digits
    /// shift the valuation; an all-zero list gives exact zero.
    pub fn from_digits(field: &FieldRef, val: i64, digits: Vec<u32>) -> LFElem {
        LFElem::from_digits_prec(field, val, digits, field.precision())
    }

    /// Like [`LFElem::from_digits`] with only `prec` digits guaranteed.
    pub fn from_digits_prec(field: &FieldRef, val: i64, digits: Vec<u32>, prec: u32) -> LFElem {
        let n = field.precision() as usize;
        let q = field.residue().q();
        let Some(lead) = digits.iter().take(prec as usize).position(|&d| d % q != 0) else {
            return if prec >= field.precision() && digits.iter().all(|&d| d % q == 0) {
                LFElem::exact_zero(field)
            } else {
                LFElem::inexact_zero(field, val + prec as i64)
            };
        };
        let prec = (prec as usize - lead).min(n);
        let mut d: Vec<u32> = digits[lead..].iter().take(prec).map(|&x| x % q).collect();
        d.resize(n, 0);
        let unit = field.unit_from_digits(&d[..prec]);
        LFElem {
            field: field.clone(),
            val: Some(val + lead as i64),
            digits: d,
            prec: prec as u32,
            zero_abs: None,
            unit,
        }
    }

    pub fn from_int(field: &FieldRef, n: i64) -> LFElem {
        if n == 0 {
            return LFElem::exact_zero(field);
        }
        let p = field.p() as i64;
        let (mut n, mut a) = (n, 0i64);
        while n % p == 0 {
            n /= p;
            a += 1;
        }
        let y = field
            .model
            .mul(&field.model.from_int(n), &field.p_unit_pow(a as u32));
        LFElem::from_model(field, a * field.e() as i64, &y, field.precision())
    }

    /// A scalar of `Z_q / p^k` from the model.
    pub(crate) fn from_zq(field: &FieldRef, c: &[u64]) -> LFElem {
        let m = &field.model;
        match m.zq_val(c) {
            None => LFElem::exact_zero(field),
            Some(a) => {
                let y = m.mul(&m.from_zq(&m.zq_div_p(c, a)), &field.p_unit_pow(a));
                let known = ((m.k - a) * m.e as u32).min(field.precision());
                LFElem::from_model(field, a as i64 * m.e as i64, &y, known)
            }
        }
    }

    /// `π^shift · y` for a model element `y` known modulo `π^known`.
    pub(crate) fn from_model(field: &FieldRef, shift: i64, y: &[u64], known: u32) -> LFElem {
        let known = known.min(field.model_digits());
        let v = field.model.val(y).map(|v| v as u32).filter(|&v| v < known);
        let Some(v) = v else {
            return LFElem::inexact_zero(field, shift + known as i64);
        };
        let prec = (known - v).min(field.precision());
        let (_, mut digits) = field.extract(y, prec).expect("nonzero model element");
        digits.resize(field.precision() as usize, 0);
        let unit = field.unit_from_digits(&digits[..prec as usize]);
        LFElem {
            field: field.clone(),
            val: Some(shift + v as i64),
            digits,
            prec,
            zero_abs: None,
            unit,
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    /// Valuation in units of `ν(π)`; `None` for zero.
    pub fn level(&self) -> Option<i64> {
        self.val
    }

    pub fn valuation(&self) -> Value {
        Value::from_level(self.val, self.field.e())
    }

    /// Teichmüller digits of the unit part, padded to the working precision.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Number of guaranteed unit digits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val.is_none() && self.zero_abs.is_none()
    }

    /// For a zero, the exponent `a` with the element known to lie in `π^a O`.
    pub fn zero_abs(&self) -> Option<i64> {
        self.zero_abs
    }

    /// Absolute precision: the element is known modulo `π^abs`; `None` if exact.
    pub fn abs_prec(&self) -> Option<i64> {
        match self.val {
            Some(v) => Some(v + self.prec as i64),
            None => self.zero_abs,
        }
    }

    fn same_field(&self, other: &LFElem) -> Result<()> {
        if !Arc::ptr_eq(&self.field, &other.field) && *self.field != *other.field {
            return Err(Error::Mismatch(format!(
                "{:?} vs {:?}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn arith(&self, op: LFOp, other: &LFElem) -> Result<LFElem> {
        match op {
            LFOp::Add => self.add(other),
            LFOp::Sub => self.sub(other),
            LFOp::Mul => self.mul(other),
            LFOp::Div => self.div(other),
        }
    }

    pub fn add(&self, other: &LFElem) -> Result<LFElem> {
        self.same_field(other)?;
        let fld = &self.field;
        let (x, y) = match (self.val, other.val) {
            (None, None) => {
                let abs = match (self.zero_abs, other.zero_abs) {
                    (None, b) => b,
                    (a, None) => a,
                    (Some(a), Some(b)) => Some(a.min(b)),
                };
                return Ok(match abs {
                    None => LFElem::exact_zero(fld),
                    Some(a) => LFElem::inexact_zero(fld, a),
                });
            }
            (None, Some(_)) => return Ok(other.absorb_zero(self.zero_abs)),
            (Some(_), None) => return Ok(self.absorb_zero(other.zero_abs)),
            (Some(a), Some(b)) => {
                if a <= b {
                    (self, other)
                } else {
                    (other, self)
                }
            }
        };
        let (a, b) = (x.val.unwrap(), y.val.unwrap());
        let d = (b - a) as u64;
        let m = &fld.model;
        let total = fld.model_digits() as u64;
        let known = (x.prec as u64).min(d + y.prec as u64).min(total) as u32;
        let sum = if d < total {
            m.add(&x.unit, &m.mul(&y.unit, fld.pi_pow(d as usize)))
        } else {
            x.unit.clone()
        };
        Ok(LFElem::from_model(fld, a, &sum, known))
    }

    /// Adds a zero known modulo `π^abs` to a nonzero element.
    fn absorb_zero(&self, abs: Option<i64>) -> LFElem {
        let Some(abs) = abs else {
            return self.clone();
        };
        let v = self.val.unwrap();
        if abs <= v {
            return LFElem::inexact_zero(&self.field, abs);
        }
        let prec = (self.prec as i64).min(abs - v) as u32;
        if prec == self.prec {
            return self.clone();
        }
        LFElem::from_digits_prec(&self.field, v, self.digits.clone(), prec)
    }

    pub fn neg(&self) -> LFElem {
        match self.val {
            None => self.clone(),
            Some(v) => {
                LFElem::from_model(&self.field, v, &self.field.model.neg(&self.unit), self.prec)
            }
        }
    }

    pub fn sub(&self, other: &LFElem) -> Result<LFElem> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LFElem) -> Result<LFElem> {
        self.same_field(other)?;
        let fld = &self.field;
        match (self.val, other.val) {
            (Some(a), Some(b)) => {
                let prod = fld.model.mul(&self.unit, &other.unit);
                Ok(LFElem::from_model(
                    fld,
                    a + b,
                    &prod,
                    self.prec.min(other.prec),
                ))
            }
            _ => {
                if self.is_exact_zero() || other.is_exact_zero() {
                    return Ok(LFElem::exact_zero(fld));
                }
                let lo = |e: &LFElem| e.val.or(e.zero_abs).unwrap();
                Ok(LFElem::inexact_zero(fld, lo(self) + lo(other)))
            }
        }
    }

    pub fn inv(&self) -> Result<LFElem> {
        let Some(v) = self.val else {
            return Err(Error::DivisionByZero);
        };
        let u = self.field.unit_inverse(&self.unit);
        Ok(LFElem::from_model(&self.field, -v, &u, self.prec))
    }

    pub fn div(&self, other: &LFElem) -> Result<LFElem> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<LFElem> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplication by `π^k`.
    pub fn shift(&self, k: i64) -> LFElem {
        let mut out = self.clone();
        out.val = self.val.map(|v| v + k);
        out.zero_abs = self.zero_abs.map(|a| a + k);
        out
    }

    /// Truncation to at most `prec` guaranteed digits.
    pub fn truncate(&self, prec: u32) -> LFElem {
        match self.val {
            None => self.clone(),
            Some(v) if prec < self.prec => {
                LFElem::from_digits_prec(&self.field, v, self.digits.clone(), prec)
            }
            Some(_) => self.clone(),
        }
    }

    /// Leading residue digit of a nonzero element.
    pub fn leading_digit(&self) -> Option<u32> {
        self.val.map(|_| self.digits[0])
    }
}

impl PartialEq for LFElem {
    /// Equality at the common known precision.
    fn eq(&self, other: &Self) -> bool {
        match (self.val, other.val) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                let n = self.prec.min(other.prec) as usize;
                a == b && self.digits[..n] == other.digits[..n]
            }
            _ => false,
        }
    }
}

impl fmt::Debug for LFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.field.e();
        match (self.val, self.zero_abs) {
            (None, None) => write!(f, "0"),
            (None, Some(a)) => write!(f, "O(π^{a})"),
            (Some(v), _) => {
                let res = self.field.residue();
                let shown: Vec<String> = self.digits[..self.prec as usize]
                    .iter()
                    .map(|&d| res.render(d))
                    .collect();
                write!(
                    f,
                    "π^{v}·[{}] (ν = {}, {} digits)",
                    shown.join(" "),
                    Value::from_level(Some(v), e),
                    self.prec
                )
            }
        }
    }
}

impl LocalField {
    /// Digit expansion `(level, digits)` of `x`, `None` for zero.
    pub fn digit_expansion(x: &LFElem) -> Option<(i64, Vec<u32>)> {
        x.level()
            .map(|v| (v, x.digits()[..x.prec() as usize].to_vec()))
    }
}
