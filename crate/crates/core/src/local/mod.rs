//! Totally ramified extensions `K = Q_q(π)` of unramified `Q_q`, where `π` is
//! a root of an Eisenstein polynomial with coefficients in `Z_q`.
//!
//! Every nonzero `x ∈ K` has a unique expansion `π^v Σ t(s_i) π^i` with `s_i`
//! in the residue field, `s_0 ≠ 0` and `t` the Teichmüller lift. [`LFElem`]
//! stores exactly this data, truncated to the field's working precision.

mod elem;
mod krasner;
pub(crate) mod model;
mod poly;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use elem::{LFElem, LFOp};
pub use krasner::{krasner_number, lift_bound, phi_q};
pub use poly::{hensel_root, newton_polygon, LFPoly, Segment};

use crate::error::{Error, Result};
use crate::residue::FFDesc;
use model::{Coeffs, Model};

/// A coefficient of an Eisenstein polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    /// An ordinary integer.
    Int(i64),
    /// `Σ t(d_j) p^j` with residue field indices `d_j`.
    Digits(Vec<u32>),
}

/// An exact valuation in `Q ∪ {∞}`, normalised so that `ν(p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(pub Option<Ratio<i64>>);

impl Value {
    pub fn from_level(level: Option<i64>, e: u32) -> Value {
        Value(level.map(|v| Ratio::new(v, e as i64)))
    }
    pub fn infinite() -> Value {
        Value(None)
    }
    pub fn is_infinite(&self) -> bool {
        self.0.is_none()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "inf"),
            Some(r) => write!(f, "{r}"),
        }
    }
}

/// Largest `p^k` the word-sized model arithmetic supports.
const MAX_PK: u128 = 1 << 62;

/// A local field together with its precomputed tables.
pub struct LocalField {
    name: String,
    residue: Arc<FFDesc>,
    e: u32,
    precision: u32,
    eisenstein: Vec<Coefficient>,
    pub(crate) model: Model,
    /// Teichmüller lifts in `Z_q / p^k`, indexed by residue element.
    teich: Vec<Coeffs>,
    /// `π^j` for `0 <= j <= e k`.
    pi_pow: Vec<Coeffs>,
    /// Powers of `-(a_0/p)^{-1} mod π`, which is the residue of `p / π^e`.
    p_ratio_pow: Vec<u32>,
    /// The unit `p / π^e` in the model.
    p_unit: Coeffs,
}

pub type FieldRef = Arc<LocalField>;

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        *self.residue == *other.residue
            && self.e == other.e
            && self.precision == other.precision
            && self.model.eis_eq(&other.model)
    }
}

impl Model {
    fn eis_eq(&self, other: &Model) -> bool {
        self.p == other.p && self.e == other.e && self.f == other.f && self.eis == other.eis
    }
}

fn coefficient_to_zq(c: &Coefficient, teich: &[Coeffs], m: &Model) -> Result<Coeffs> {
    match c {
        Coefficient::Int(n) => Ok(m.zq_from_int(*n)),
        Coefficient::Digits(ds) => {
            let mut acc = m.zq_zero();
            let mut pw = m.zq_from_int(1);
            let pz = m.zq_from_int(m.p as i64);
            for &d in ds {
                let t = teich.get(d as usize).ok_or_else(|| {
                    Error::InvalidInput(format!("digit {d} is not a residue field element"))
                })?;
                acc = m.zq_add(&acc, &m.zq_mul(t, &pw));
                pw = m.zq_mul(&pw, &pz);
            }
            Ok(acc)
        }
    }
}

impl LocalField {
    /// Builds `Q_q(π)` with `E(π) = 0`, coefficients listed `a_0 .. a_e`.
    ///
    /// `precision` is the number of `π`-adic digits carried by elements.
    pub fn new(
        name: impl Into<String>,
        residue: Arc<FFDesc>,
        eisenstein: Vec<Coefficient>,
        precision: u32,
    ) -> Result<FieldRef> {
        if eisenstein.len() < 2 {
            return Err(Error::NotEisenstein("degree must be at least 1".into()));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        let e = (eisenstein.len() - 1) as u32;
        let p = residue.p() as u64;
        let f = residue.f() as usize;
        let k = precision.div_ceil(e) + 1;
        if (p as u128).pow(k) >= MAX_PK {
            return Err(Error::Unsupported(format!(
                "p^{k} exceeds machine word arithmetic; lower the precision"
            )));
        }
        let g: Vec<u64> = residue.modulus()[..f].iter().map(|&c| c as u64).collect();
        let base = Model::new(p, k, g.clone(), vec![Model::int_in_zq(p, k, f, 0)]);
        let q = residue.q() as u64;
        let teich: Vec<Coeffs> = (0..residue.q())
            .map(|idx| {
                let mut x: Coeffs = residue.coeffs(idx).iter().map(|&c| c as u64).collect();
                loop {
                    let y = base.zq_pow(&x, q);
                    if y == x {
                        break x;
                    }
                    x = y;
                }
            })
            .collect();
        let coeffs: Vec<Coeffs> = eisenstein
            .iter()
            .map(|c| coefficient_to_zq(c, &teich, &base))
            .collect::<Result<_>>()?;
        if coeffs[e as usize] != base.zq_from_int(1) {
            return Err(Error::NotEisenstein("polynomial must be monic".into()));
        }
        for (i, c) in coeffs[..e as usize].iter().enumerate() {
            let v = base.zq_val(c);
            if i == 0 && v != Some(1) {
                return Err(Error::NotEisenstein(
                    "constant term must have valuation exactly 1".into(),
                ));
            }
            if v == Some(0) {
                return Err(Error::NotEisenstein(format!(
                    "coefficient of X^{i} is a unit"
                )));
            }
        }
        let model = Model::new(p, k, g, coeffs[..e as usize].to_vec());
        let total = (e * k) as usize;
        let mut pi_pow = vec![model.one()];
        let x = model.x();
        for j in 1..=total {
            pi_pow.push(model.mul(&pi_pow[j - 1], &x));
        }
        let u0 = model.zq_residue_shifted(&coeffs[0], 1);
        let ratio = residue.neg(residue.inv(u0).expect("a_0/p is a unit"));
        let mut p_ratio_pow = vec![1u32];
        for s in 1..=k as usize {
            p_ratio_pow.push(residue.mul(p_ratio_pow[s - 1], ratio));
        }
        let mut field = LocalField {
            name: name.into(),
            residue,
            e,
            precision,
            eisenstein,
            model,
            teich,
            pi_pow,
            p_ratio_pow,
            p_unit: Coeffs::new(),
        };
        let (_, digits) = field
            .extract(&field.model.from_int(p as i64), precision)
            .unwrap();
        field.p_unit = field.unit_from_digits(&digits);
        Ok(Arc::new(field))
    }

    /// `Q_p` as the totally ramified extension of degree 1 cut out by `X - p`.
    pub fn qp(p: u32, precision: u32) -> Result<FieldRef> {
        let res = FFDesc::prime(p)?;
        LocalField::new(
            format!("Q{p}"),
            res,
            vec![Coefficient::Int(-(p as i64)), Coefficient::Int(1)],
            precision,
        )
    }

    /// `Q_p(c^{1/e})` for an integer `c` with `ν_p(c) = 1`, via `X^e - c`.
    pub fn pure(p: u32, e: u32, c: i64, precision: u32) -> Result<FieldRef> {
        let res = FFDesc::prime(p)?;
        let mut co = vec![Coefficient::Int(-c)];
        co.extend((1..e).map(|_| Coefficient::Int(0)));
        co.push(Coefficient::Int(1));
        LocalField::new(format!("Q{p}({c}^(1/{e}))"), res, co, precision)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn residue(&self) -> &Arc<FFDesc> {
        &self.residue
    }
    pub fn p(&self) -> u32 {
        self.residue.p()
    }
    pub fn f(&self) -> u32 {
        self.residue.f()
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn eisenstein(&self) -> &[Coefficient] {
        &self.eisenstein
    }
    /// Whether `p` does not divide `e`.
    pub fn is_tame(&self) -> bool {
        !self.e.is_multiple_of(self.p())
    }

    pub(crate) fn model_digits(&self) -> u32 {
        self.model.e as u32 * self.model.k
    }

    /// `(p / π^e)^a` in the model.
    pub(crate) fn p_unit_pow(&self, a: u32) -> Coeffs {
        let mut acc = self.model.one();
        for _ in 0..a {
            acc = self.model.mul(&acc, &self.p_unit);
        }
        acc
    }

    pub(crate) fn teich(&self, d: u32) -> &Coeffs {
        &self.teich[d as usize]
    }

    pub(crate) fn pi_pow(&self, j: usize) -> &Coeffs {
        &self.pi_pow[j]
    }

    /// Rebuilds `Σ t(d_i) π^i` in the model.
    pub(crate) fn unit_from_digits(&self, digits: &[u32]) -> Coeffs {
        let mut acc = self.model.zero();
        for (i, &d) in digits.iter().enumerate() {
            if d != 0 && i < self.pi_pow.len() {
                self.model
                    .add_scaled(&mut acc, &self.teich[d as usize], &self.pi_pow[i]);
            }
        }
        acc
    }

    /// Valuation and the first `count` Teichmüller digits of a model element.
    ///
    /// Returns `None` when the element vanishes modulo `π^{e k}`; digit
    /// extraction stops at that bound.
    pub(crate) fn extract(&self, y: &[u64], count: u32) -> Option<(i64, Vec<u32>)> {
        let m = &self.model;
        let v = m.val(y)?;
        let total = self.model_digits() as u64;
        let mut y: Coeffs = y.into();
        let mut digits = Vec::with_capacity(count as usize);
        let e = m.e as u64;
        for j in v..(v + count as u64).min(total) {
            let i = (j % e) as usize;
            let s = ((j - i as u64) / e) as u32;
            let r = m.zq_residue_shifted(m.coeff(&y, i), s);
            let d = self.residue.mul(r, self.p_ratio_pow[s as usize]);
            if d != 0 {
                let neg = m.zq_sub(&m.zq_zero(), &self.teich[d as usize]);
                m.add_scaled(&mut y, &neg, &self.pi_pow[j as usize]);
            }
            digits.push(d);
        }
        digits.resize(count as usize, 0);
        Some((v as i64, digits))
    }

    /// Multiplicative inverse of a unit in the model by Newton iteration.
    pub(crate) fn unit_inverse(&self, u: &[u64]) -> Coeffs {
        let m = &self.model;
        let r = m.zq_residue_shifted(m.coeff(u, 0), 0);
        let r_inv = self.residue.inv(r).expect("unit has nonzero residue");
        let mut x = m.from_zq(&self.teich[r_inv as usize]);
        let two = m.from_int(2);
        let mut correct = 1u32;
        while correct < self.model_digits() {
            let ux = m.mul(u, &x);
            x = m.mul(&x, &m.sub(&two, &ux));
            correct *= 2;
        }
        x
    }

    pub fn zero(self: &Arc<Self>) -> LFElem {
        LFElem::exact_zero(self)
    }
    pub fn one(self: &Arc<Self>) -> LFElem {
        LFElem::from_int(self, 1)
    }
    pub fn pi(self: &Arc<Self>) -> LFElem {
        let mut d = vec![0u32; self.precision as usize];
        d[0] = 1;
        LFElem::from_digits(self, 1, d)
    }
    /// The integer `p` as a field element.
    pub fn p_elem(self: &Arc<Self>) -> LFElem {
        LFElem::from_int(self, self.p() as i64)
    }
    /// Teichmüller lift of a residue field element.
    pub fn teichmuller(self: &Arc<Self>, s: u32) -> LFElem {
        let mut d = vec![0u32; self.precision as usize];
        d[0] = s % self.residue.q();
        if s.is_multiple_of(self.residue.q()) {
            return LFElem::exact_zero(self);
        }
        LFElem::from_digits(self, 0, d)
    }

    /// The Eisenstein polynomial as a polynomial over `K`.
    pub fn eisenstein_poly(self: &Arc<Self>) -> LFPoly {
        let m = &self.model;
        let mut coeffs: Vec<LFElem> = m.eis.iter().map(|c| LFElem::from_zq(self, c)).collect();
        coeffs.push(self.one());
        LFPoly::new(coeffs)
    }

    /// Human-readable summary.
    pub fn describe(&self) -> String {
        let coeffs: Vec<String> = self
            .eisenstein
            .iter()
            .map(|c| match c {
                Coefficient::Int(n) => n.to_string(),
                Coefficient::Digits(d) => format!("{d:?}"),
            })
            .collect();
        format!(
            "{}: p = {}, f = {}, e = {}, residue modulus {:?}, Eisenstein [{}], precision {} digits",
            self.name,
            self.p(),
            self.f(),
            self.e,
            self.residue.modulus(),
            coeffs.join(", "),
            self.precision
        )
    }
}
