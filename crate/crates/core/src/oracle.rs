//! Brute-force hypersums by enumerating coset representatives.
//!
//! Elements of `O_K / p^k` are vectors `(c_0, .., c_{e-1})` of integers mod
//! `p^k` standing for `Σ c_i π^i`. Nothing here uses digit extraction or the
//! ball description of hypersums, so it can cross-check both. Only residue
//! degree 1 is supported.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hyperfield::{HClass, HFDesc};
use crate::local::{Coefficient, LocalField};

/// A class identified by its level and its representative reduced modulo
/// `π^(level + n)`.
pub type ClassKey = (i64, Vec<i64>);

pub struct CosetOracle {
    p: i64,
    e: usize,
    k: u32,
    pk: i64,
    eis: Vec<i64>,
    teich: Vec<i64>,
}

/// Classes of all sums of representatives modulo `π^depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSum {
    pub classes: BTreeSet<ClassKey>,
    /// Some pair of representatives sums to zero modulo `π^depth`.
    pub reaches_depth: bool,
    /// Classes at levels up to this bound are complete.
    pub determined_to: i64,
}

impl CosetOracle {
    /// An oracle able to resolve classes down to `π^depth`.
    pub fn new(field: &LocalField, depth: u32) -> Result<CosetOracle> {
        if field.f() != 1 {
            return Err(Error::Unsupported(
                "the coset oracle needs residue degree 1".into(),
            ));
        }
        let p = field.p() as i64;
        let e = field.e() as usize;
        let k = depth.div_ceil(e as u32) + 2;
        let pk = p.checked_pow(k).filter(|&x| x < (1 << 62)).ok_or_else(|| {
            Error::Unsupported("oracle depth exceeds machine word arithmetic".into())
        })?;
        let mut teich = vec![0i64];
        for d in 1..p {
            let mut x = d;
            for _ in 0..=k {
                let mut y = 1i64;
                for _ in 0..p {
                    y = ((y as i128 * x as i128).rem_euclid(pk as i128)) as i64;
                }
                x = y;
            }
            teich.push(x);
        }
        let eis = field.eisenstein()[..e]
            .iter()
            .map(|c| match c {
                Coefficient::Int(n) => n.rem_euclid(pk),
                Coefficient::Digits(ds) => {
                    let mut acc = 0i128;
                    let mut pw = 1i128;
                    for &d in ds {
                        acc += teich[d as usize] as i128 * pw;
                        pw = pw * p as i128 % pk as i128;
                    }
                    acc.rem_euclid(pk as i128) as i64
                }
            })
            .collect();
        Ok(CosetOracle {
            p,
            e,
            k,
            pk,
            eis,
            teich,
        })
    }

    fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y).rem_euclid(self.pk))
            .collect()
    }

    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let e = self.e;
        let pk = self.pk as i128;
        let mut prod = vec![0i128; 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] as i128 * b[j] as i128) % pk;
            }
        }
        for d in (e..2 * e - 1).rev() {
            let c = prod[d];
            for i in 0..e {
                prod[d - e + i] = (prod[d - e + i] - c * self.eis[i] as i128).rem_euclid(pk);
            }
        }
        prod[..e].iter().map(|&x| x.rem_euclid(pk) as i64).collect()
    }

    fn constant(&self, n: i64) -> Vec<i64> {
        let mut v = vec![0; self.e];
        v[0] = n.rem_euclid(self.pk);
        v
    }

    fn pi_pow(&self, j: usize) -> Vec<i64> {
        let mut x = vec![0; self.e];
        if self.e == 1 {
            x[0] = (-self.eis[0]).rem_euclid(self.pk);
        } else {
            x[1] = 1;
        }
        let mut acc = self.constant(1);
        for _ in 0..j {
            acc = self.mul(&acc, &x);
        }
        acc
    }

    fn vp(&self, mut c: i64) -> Option<u32> {
        if c == 0 {
            return None;
        }
        let mut v = 0;
        while c % self.p == 0 {
            c /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// `π`-adic valuation, `None` when zero modulo `p^k`.
    pub fn val(&self, a: &[i64]) -> Option<i64> {
        (0..self.e)
            .filter_map(|i| self.vp(a[i]).map(|v| self.e as i64 * v as i64 + i as i64))
            .min()
    }

    /// Reduction modulo `π^j`, coordinate-wise `c_i mod p^ceil((j - i)/e)`.
    fn reduce(&self, a: &[i64], j: i64) -> Vec<i64> {
        (0..self.e)
            .map(|i| {
                let s = ((j - i as i64).max(0) as u64).div_ceil(self.e as u64) as u32;
                a[i].rem_euclid(self.p.pow(s.min(self.k)))
            })
            .collect()
    }

    /// `π^level Σ t(d_i) π^i`, using this oracle's own Teichmüller lifts.
    pub fn rep(&self, level: i64, digits: &[u32]) -> Vec<i64> {
        assert!(level >= 0, "oracle works inside the valuation ring");
        let mut acc = vec![0; self.e];
        for (i, &d) in digits.iter().enumerate() {
            let term = self.mul(
                &self.constant(self.teich[d as usize]),
                &self.pi_pow(level as usize + i),
            );
            acc = self.add(&acc, &term);
        }
        acc
    }

    pub fn key(&self, z: &[i64], n: u32) -> Option<ClassKey> {
        let v = self.val(z)?;
        Some((v, self.reduce(z, v + n as i64)))
    }

    pub fn class_key(&self, level: i64, digits: &[u32], n: u32) -> ClassKey {
        self.key(&self.rep(level, digits), n)
            .expect("nonzero class")
    }

    /// Every residue class modulo `π^len`, as `Σ_{i<len} c_i π^i` with `0 <= c_i < p`.
    fn residues(&self, len: i64) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.e]];
        for i in 0..len.max(0) as usize {
            let pw = self.pi_pow(i);
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for x in &out {
                for c in 0..self.p {
                    next.push(self.add(x, &self.mul(&self.constant(c), &pw)));
                }
            }
            out = next;
        }
        out
    }

    /// All classes of `x + y` for `x ∈ [a]_n`, `y ∈ [b]_n`, resolved modulo
    /// `π^(min level + n + extra)`.
    pub fn hypersum(&self, a: &HClass, b: &HClass, n: u32, extra: u32) -> OracleSum {
        let la = a.level();
        let lb = b.level();
        let min = la.unwrap_or(i64::MAX).min(lb.unwrap_or(i64::MAX));
        if min == i64::MAX {
            return OracleSum {
                classes: BTreeSet::new(),
                reaches_depth: true,
                determined_to: i64::MAX,
            };
        }
        let depth = min + n as i64 + extra as i64;
        let coset = |c: &HClass| -> Vec<Vec<i64>> {
            match c.level() {
                None => vec![vec![0; self.e]],
                Some(v) => {
                    let base = self.rep(v, c.digits());
                    let step = self.mul(&base, &self.pi_pow(n as usize));
                    self.residues(depth - v - n as i64)
                        .iter()
                        .map(|s| self.add(&base, &self.mul(&step, s)))
                        .collect()
                }
            }
        };
        let (xs, ys) = (coset(a), coset(b));
        let mut classes = BTreeSet::new();
        let mut reaches_depth = false;
        for x in &xs {
            for y in &ys {
                let z = self.reduce(&self.add(x, y), depth);
                match self.val(&z) {
                    Some(v) if v < depth => {
                        if v + n as i64 <= depth {
                            classes.insert((v, self.reduce(&z, v + n as i64)));
                        }
                    }
                    _ => reaches_depth = true,
                }
            }
        }
        OracleSum {
            classes,
            reaches_depth,
            determined_to: depth - n as i64,
        }
    }
}

/// Compares `a + b` in `h` against brute force. Returns a description of the
/// first discrepancy, if any.
pub fn compare_hypersum(
    h: &HFDesc,
    oracle: &CosetOracle,
    a: &HClass,
    b: &HClass,
    extra: u32,
) -> Result<Option<String>> {
    let n = h.n();
    let brute = oracle.hypersum(a, b, n, extra);
    let ball = h.add(a, b);
    let min = a
        .level()
        .unwrap_or(i64::MAX)
        .min(b.level().unwrap_or(i64::MAX));
    if min == i64::MAX {
        return Ok((!ball.contains_zero()?).then(|| "0 + 0 does not contain 0".into()));
    }
    let members = h.ball_classes(&ball, min, brute.determined_to)?;
    let mine: BTreeSet<ClassKey> = members
        .iter()
        .map(|c| oracle.class_key(c.level().unwrap(), c.digits(), n))
        .collect();
    if mine != brute.classes {
        let extra_mine = mine.difference(&brute.classes).count();
        let extra_brute = brute.classes.difference(&mine).count();
        return Ok(Some(format!(
            "{} + {}: {} classes only in the ball, {} only in the coset enumeration",
            h.render(a),
            h.render(b),
            extra_mine,
            extra_brute
        )));
    }
    if ball.contains_zero()? != brute.reaches_depth {
        return Ok(Some(format!(
            "{} + {}: zero membership {} disagrees with coset enumeration {}",
            h.render(a),
            h.render(b),
            ball.contains_zero()?,
            brute.reaches_depth
        )));
    }
    Ok(None)
}
