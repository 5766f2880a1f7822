//! Finite fields `F_q = F_p[t]/(g)` with table-driven multiplication.
//!
//! Elements are encoded as integers `Σ c_j p^j` where `c_j` is the coefficient
//! of `t^j`. This index is also what digit expansions store.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported residue degree `f`.
pub const MAX_DEGREE: u32 = 8;
/// Largest supported residue field order `q`.
pub const MAX_ORDER: u64 = 1 << 16;

/// A finite field `F_p[t]/(g)` with `g` monic irreducible of degree `f`.
pub struct FFDesc {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FFDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for FFDesc {}

impl fmt::Debug for FFDesc {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "F_{}[t]/({:?})", self.p, self.modulus)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d: &u32| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Remainder of `a` modulo monic `b` over `F_p`, coefficients ascending.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - (lead * bj) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    let mut r = poly_rem(&prod, g, p);
    r.resize(g.len() - 1, 0);
    r
}

impl FFDesc {
    /// Builds `F_p[t]/(g)` from the ascending coefficients of a monic `g`.
    ///
    /// Irreducibility is verified by exhaustive trial division.
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Arc<FFDesc>> {
        if !is_prime(p) {
            return Err(Error::InvalidResidueField(format!("{p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidResidueField(
                "modulus must have degree at least 1".into(),
            ));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidResidueField("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidResidueField(format!(
                "modulus coefficients must lie in [0, {p})"
            )));
        }
        let f = (modulus.len() - 1) as u32;
        if f > MAX_DEGREE {
            return Err(Error::InvalidResidueField(format!(
                "degree {f} exceeds {MAX_DEGREE}"
            )));
        }
        let q64 = (p as u64).checked_pow(f).filter(|&q| q <= MAX_ORDER);
        let Some(q64) = q64 else {
            return Err(Error::InvalidResidueField(format!(
                "p^f exceeds {MAX_ORDER}"
            )));
        };
        let q = q64 as u32;
        for d in 1..=f / 2 {
            let count = p.pow(d);
            for idx in 0..count {
                let mut h: Vec<u32> = (0..d).map(|j| (idx / p.pow(j)) % p).collect();
                h.push(1);
                if poly_rem(&modulus, &h, p).iter().all(|&c| c == 0) {
                    return Err(Error::InvalidResidueField(format!(
                        "modulus {modulus:?} is divisible by {h:?}"
                    )));
                }
            }
        }
        let decode = |idx: u32| -> Vec<u32> { (0..f).map(|j| (idx / p.pow(j)) % p).collect() };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &x| acc * p + x) };
        let one = encode(&decode(1));
        let mut exp = Vec::new();
        if q == 2 {
            exp.push(one);
        } else {
            for g in 2..q {
                let gv = decode(g);
                let mut x = gv.clone();
                let mut powers = vec![one, g];
                while encode(&x) != one {
                    x = poly_mulmod(&x, &gv, &modulus, p);
                    powers.push(encode(&x));
                    if powers.len() > q as usize {
                        break;
                    }
                }
                powers.pop();
                if powers.len() == (q - 1) as usize {
                    exp = powers;
                    break;
                }
            }
        }
        let mut log = vec![0u32; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }
        Ok(Arc::new(FFDesc {
            p,
            f,
            q,
            modulus,
            exp,
            log,
        }))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<FFDesc>> {
        FFDesc::new(p, vec![0, 1])
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Coefficients of `t^0 .. t^{f-1}`.
    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        (0..self.f).map(|j| (a / self.p.pow(j)) % self.p).collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> u32 {
        c.iter().rev().fold(0, |acc, &x| acc * self.p + x % self.p)
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut r, mut pw) = (a, b, 0, 1);
        for _ in 0..self.f {
            r += ((a % self.p + b % self.p) % self.p) * pw;
            a /= self.p;
            b /= self.p;
            pw *= self.p;
        }
        r
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return (self.p - a) % self.p;
        }
        let (mut a, mut r, mut pw) = (a, 0, 1);
        for _ in 0..self.f {
            r += ((self.p - a % self.p) % self.p) * pw;
            a /= self.p;
            pw *= self.p;
        }
        r
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// `a^k` for any integer `k`; `None` for negative powers of zero.
    pub fn pow(&self, a: u32, k: i64) -> Option<u32> {
        if a == 0 {
            return match k.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => Some(self.one()),
                std::cmp::Ordering::Greater => Some(0),
            };
        }
        let n = (self.q - 1) as i64;
        let l = (self.log[a as usize] as i64 * k).rem_euclid(n);
        Some(self.exp[l as usize])
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as i64).unwrap()
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// The class of `t`.
    pub fn generator(&self) -> u32 {
        if self.f == 1 {
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    pub fn elem(self: &Arc<Self>, index: u32) -> FFElem {
        FFElem {
            desc: self.clone(),
            index: index % self.q,
        }
    }

    /// Evaluates a polynomial with `F_p` coefficients at `x`.
    pub fn eval_prime_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| {
            self.add(self.mul(acc, x), self.from_int(c as i64))
        })
    }

    /// Renders an element as a polynomial in `t`, or an integer when `f = 1`.
    pub fn render(&self, a: u32) -> String {
        if self.f == 1 {
            return a.to_string();
        }
        let c = self.coeffs(a);
        let terms: Vec<String> = c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &x)| x != 0)
            .map(|(j, &x)| match (j, x) {
                (0, x) => x.to_string(),
                (1, 1) => "t".to_string(),
                (1, x) => format!("{x}t"),
                (j, 1) => format!("t^{j}"),
                (j, x) => format!("{x}t^{j}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// An element of a finite field together with its descriptor.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElem {
    desc: Arc<FFDesc>,
    index: u32,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self.desc.render(self.index))
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self.desc.render(self.index))
    }
}

/// Field operations selectable at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FFOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FFElem {
    pub fn desc(&self) -> &Arc<FFDesc> {
        &self.desc
    }
    pub fn index(&self) -> u32 {
        self.index
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.desc.coeffs(self.index)
    }
    pub fn is_zero(&self) -> bool {
        self.index == 0
    }

    fn check(&self, other: &FFElem) -> Result<()> {
        if self.desc != other.desc {
            return Err(Error::Mismatch(format!(
                "{:?} vs {:?}",
                self.desc, other.desc
            )));
        }
        Ok(())
    }

    pub fn arith(&self, op: FFOp, other: &FFElem) -> Result<FFElem> {
        self.check(other)?;
        let d = &self.desc;
        let index = match op {
            FFOp::Add => d.add(self.index, other.index),
            FFOp::Sub => d.sub(self.index, other.index),
            FFOp::Mul => d.mul(self.index, other.index),
            FFOp::Div => d.mul(self.index, d.inv(other.index).ok_or(Error::DivisionByZero)?),
        };
        Ok(d.elem(index))
    }

    pub fn neg(&self) -> FFElem {
        self.desc.elem(self.desc.neg(self.index))
    }

    pub fn inv(&self) -> Result<FFElem> {
        Ok(self
            .desc
            .elem(self.desc.inv(self.index).ok_or(Error::DivisionByZero)?))
    }

    pub fn pow(&self, k: i64) -> Result<FFElem> {
        Ok(self
            .desc
            .elem(self.desc.pow(self.index, k).ok_or(Error::DivisionByZero)?))
    }

    pub fn frobenius(&self) -> FFElem {
        self.desc.elem(self.desc.frobenius(self.index))
    }
}

/// A field embedding `F_{q1} -> F_{q2}`, stored as a lookup table.
#[derive(Clone)]
pub struct Embedding {
    src: Arc<FFDesc>,
    dst: Arc<FFDesc>,
    frob_power: u32,
    table: Arc<Vec<u32>>,
}

impl PartialEq for Embedding {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.table == other.table
    }
}
impl Eq for Embedding {}

impl fmt::Debug for Embedding {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "Embedding(t -> {}, frob^{})",
            self.dst.render(self.apply(self.src.generator())),
            self.frob_power
        )
    }
}

impl Embedding {
    pub fn identity(desc: &Arc<FFDesc>) -> Embedding {
        Embedding {
            src: desc.clone(),
            dst: desc.clone(),
            frob_power: 0,
            table: Arc::new((0..desc.q()).collect()),
        }
    }

    pub fn src(&self) -> &Arc<FFDesc> {
        &self.src
    }
    pub fn dst(&self) -> &Arc<FFDesc> {
        &self.dst
    }
    /// Position of this embedding in the Frobenius orbit listed by [`embeddings`].
    pub fn frob_power(&self) -> u32 {
        self.frob_power
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.table[a as usize]
    }

    pub fn apply_elem(&self, a: &FFElem) -> Result<FFElem> {
        if a.desc != self.src {
            return Err(Error::Mismatch("element not in embedding source".into()));
        }
        Ok(self.dst.elem(self.apply(a.index)))
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Embedding) -> Result<Embedding> {
        if self.dst != then.src {
            return Err(Error::Mismatch("embeddings are not composable".into()));
        }
        let table: Vec<u32> = self.table.iter().map(|&x| then.apply(x)).collect();
        let frob_power = embeddings(&self.src, &then.dst)?
            .iter()
            .position(|e| *e.table == table)
            .unwrap_or(0) as u32;
        Ok(Embedding {
            src: self.src.clone(),
            dst: then.dst.clone(),
            frob_power,
            table: Arc::new(table),
        })
    }

    /// Whether the map is bijective, i.e. `f_src = f_dst`.
    pub fn is_bijective(&self) -> bool {
        self.src.f() == self.dst.f()
    }

    /// Inverse of a bijective embedding.
    pub fn inverse(&self) -> Result<Embedding> {
        if !self.is_bijective() {
            return Err(Error::Unsupported(
                "inverse of a non-surjective embedding".into(),
            ));
        }
        let mut table = vec![0u32; self.table.len()];
        for (a, &b) in self.table.iter().enumerate() {
            table[b as usize] = a as u32;
        }
        let frob_power = embeddings(&self.dst, &self.src)?
            .iter()
            .position(|e| *e.table == table)
            .unwrap_or(0) as u32;
        Ok(Embedding {
            src: self.dst.clone(),
            dst: self.src.clone(),
            frob_power,
            table: Arc::new(table),
        })
    }
}

/// All embeddings `src -> dst`, ordered by Frobenius power of the smallest root.
///
/// Empty when `f_src` does not divide `f_dst`.
pub fn embeddings(src: &Arc<FFDesc>, dst: &Arc<FFDesc>) -> Result<Vec<Embedding>> {
    if src.p() != dst.p() {
        return Err(Error::Mismatch(format!(
            "characteristics differ: {} vs {}",
            src.p(),
            dst.p()
        )));
    }
    if !dst.f().is_multiple_of(src.f()) {
        return Ok(Vec::new());
    }
    let root = (0..dst.q())
        .find(|&x| dst.eval_prime_poly(src.modulus(), x) == 0)
        .expect("an irreducible polynomial of degree dividing f splits in F_q");
    let mut out = Vec::new();
    let mut r = root;
    for i in 0..src.f() {
        let table: Vec<u32> = (0..src.q())
            .map(|a| dst.eval_prime_poly(&src.coeffs(a), r))
            .collect();
        out.push(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            frob_power: i,
            table: Arc::new(table),
        });
        r = dst.frobenius(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gf5_inverses_match_brute_force() {
        let k = FFDesc::prime(5).unwrap();
        for a in 1..5u32 {
            let brute = (1..5u32).find(|b| a * b % 5 == 1).unwrap();
            assert_eq!(k.inv(a), Some(brute));
        }
        assert_eq!(k.inv(0), None);
    }

    #[test]
    fn gf4_frobenius_of_t_is_t_plus_one() {
        let k = FFDesc::new(2, vec![1, 1, 1]).unwrap();
        let t = k.generator();
        assert_eq!(k.frobenius(t), k.from_coeffs(&[1, 1]));
    }

    #[test]
    fn gf9_frobenius_of_t_is_2t() {
        let k = FFDesc::new(3, vec![1, 0, 1]).unwrap();
        assert_eq!(k.frobenius(k.generator()), k.from_coeffs(&[0, 2]));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(FFDesc::new(2, vec![1, 0, 1]).is_err());
        assert!(FFDesc::new(4, vec![0, 1]).is_err());
        assert!(FFDesc::new(3, vec![2, 0, 1]).is_err());
    }

    #[test]
    fn embedding_counts() {
        let f3 = FFDesc::prime(3).unwrap();
        let f9 = FFDesc::new(3, vec![1, 0, 1]).unwrap();
        let f4 = FFDesc::new(2, vec![1, 1, 1]).unwrap();
        let f16 = FFDesc::new(2, vec![1, 1, 0, 0, 1]).unwrap();
        let f8 = FFDesc::new(2, vec![1, 1, 0, 1]).unwrap();
        assert_eq!(embeddings(&f3, &f9).unwrap().len(), 1);
        assert_eq!(embeddings(&f4, &f16).unwrap().len(), 2);
        assert_eq!(embeddings(&f4, &f8).unwrap().len(), 0);
        assert!(embeddings(&f3, &f4).is_err());
    }

    #[test]
    fn embedding_compose_and_inverse() {
        let f9 = FFDesc::new(3, vec![1, 0, 1]).unwrap();
        let g9 = FFDesc::new(3, vec![2, 1, 1]).unwrap();
        let e = embeddings(&f9, &g9).unwrap();
        assert_eq!(e.len(), 2);
        for emb in &e {
            let back = emb.inverse().unwrap();
            let id = emb.then(&back).unwrap();
            assert_eq!(id, Embedding::identity(&f9));
        }
    }

    fn fields() -> Vec<Arc<FFDesc>> {
        vec![
            FFDesc::prime(2).unwrap(),
            FFDesc::prime(7).unwrap(),
            FFDesc::new(2, vec![1, 1, 0, 1]).unwrap(),
            FFDesc::new(3, vec![1, 0, 1]).unwrap(),
            FFDesc::new(5, vec![2, 0, 1]).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(which in 0usize..5, a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
            let k = &fields()[which];
            let (a, b, c) = (a % k.q(), b % k.q(), c % k.q());
            prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
            prop_assert_eq!(k.add(a, k.neg(a)), 0);
            prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
            if a != 0 {
                prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            }
            let mut x = a;
            for _ in 0..k.f() { x = k.frobenius(x); }
            prop_assert_eq!(x, a);
            prop_assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
        }

        #[test]
        fn embeddings_are_ring_maps(a in 0u32..64, b in 0u32..64) {
            let f4 = FFDesc::new(2, vec![1, 1, 1]).unwrap();
            let f64_ = FFDesc::new(2, vec![1, 1, 0, 0, 0, 0, 1]).unwrap();
            let (a, b) = (a % 4, b % 4);
            for e in embeddings(&f4, &f64_).unwrap() {
                prop_assert_eq!(e.apply(f4.mul(a, b)), f64_.mul(e.apply(a), e.apply(b)));
                prop_assert_eq!(e.apply(f4.add(a, b)), f64_.add(e.apply(a), e.apply(b)));
            }
        }
    }
}
