//! The finite ring `(Z_q / p^k)[X] / (E(X))` in which local field units live.
//!
//! `Z_q / p^k` is `(Z / p^k)[t] / (g)` for a monic lift `g` of the residue
//! modulus. Elements are flat coefficient vectors indexed by `i * f + j` for
//! the monomial `X^i t^j`.

use smallvec::SmallVec;

pub(crate) type Coeffs = SmallVec<[u64; 8]>;

#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub p: u64,
    pub f: usize,
    pub e: usize,
    pub k: u32,
    pub pk: u64,
    /// Lower coefficients of the lifted residue modulus `g`.
    g: Vec<u64>,
    /// Lower coefficients `a_0 .. a_{e-1}` of the Eisenstein polynomial, each in `Z_q`.
    pub eis: Vec<Coeffs>,
}

impl Model {
    pub fn new(p: u64, k: u32, g: Vec<u64>, eis: Vec<Coeffs>) -> Model {
        let pk = p.pow(k);
        let f = g.len();
        let e = eis.len();
        let g = g.into_iter().map(|c| c % pk).collect();
        Model {
            p,
            f,
            e,
            k,
            pk,
            g,
            eis,
        }
    }

    /// Elements of `Z_q / p^k` (length `f`) without a model.
    pub fn int_in_zq(p: u64, k: u32, f: usize, n: i64) -> Coeffs {
        let pk = p.pow(k) as i128;
        let mut c: Coeffs = SmallVec::from_elem(0, f);
        c[0] = (n as i128).rem_euclid(pk) as u64;
        c
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pk as u128) as u64
    }
    #[inline]
    fn addmod(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pk {
            s - self.pk
        } else {
            s
        }
    }
    #[inline]
    fn submod(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pk - b
        }
    }

    pub fn zq_zero(&self) -> Coeffs {
        SmallVec::from_elem(0, self.f)
    }

    pub fn zq_from_int(&self, n: i64) -> Coeffs {
        Model::int_in_zq(self.p, self.k, self.f, n)
    }

    pub fn zq_add(&self, a: &[u64], b: &[u64]) -> Coeffs {
        a.iter().zip(b).map(|(&x, &y)| self.addmod(x, y)).collect()
    }

    pub fn zq_sub(&self, a: &[u64], b: &[u64]) -> Coeffs {
        a.iter().zip(b).map(|(&x, &y)| self.submod(x, y)).collect()
    }

    pub fn zq_mul(&self, a: &[u64], b: &[u64]) -> Coeffs {
        let f = self.f;
        if f == 1 {
            return smallvec::smallvec![self.mulmod(a[0], b[0])];
        }
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.addmod(prod[i + j], self.mulmod(x, y));
            }
        }
        for d in (f..2 * f - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for j in 0..f {
                prod[d - f + j] = self.submod(prod[d - f + j], self.mulmod(c, self.g[j]));
            }
        }
        prod.truncate(f);
        prod.into_iter().collect()
    }

    pub fn zq_pow(&self, a: &[u64], mut n: u64) -> Coeffs {
        let mut acc = self.zq_from_int(1);
        let mut base: Coeffs = a.into();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.zq_mul(&acc, &base);
            }
            base = self.zq_mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// `min_j ν_p(c_j)`, or `None` when the element is zero mod `p^k`.
    pub fn zq_val(&self, a: &[u64]) -> Option<u32> {
        a.iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut c = c;
                let mut v = 0;
                while c % self.p == 0 {
                    c /= self.p;
                    v += 1;
                }
                v
            })
            .min()
    }

    /// Residue of `a / p^s` as an `F_q` index, assuming `p^s` divides `a`.
    pub fn zq_residue_shifted(&self, a: &[u64], s: u32) -> u32 {
        let ps = self.p.pow(s);
        a.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + (c / ps) % self.p) as u32
    }

    /// `a / p^s` in `Z_q / p^(k-s)`, lifted back to `p^k` with zero high part.
    pub fn zq_div_p(&self, a: &[u64], s: u32) -> Coeffs {
        let ps = self.p.pow(s);
        a.iter().map(|&c| c / ps).collect()
    }

    pub fn zero(&self) -> Coeffs {
        SmallVec::from_elem(0, self.e * self.f)
    }

    pub fn from_zq(&self, a: &[u64]) -> Coeffs {
        let mut c = self.zero();
        c[..self.f].copy_from_slice(a);
        c
    }

    pub fn coeff<'a>(&self, a: &'a [u64], i: usize) -> &'a [u64] {
        &a[i * self.f..(i + 1) * self.f]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Coeffs {
        a.iter().zip(b).map(|(&x, &y)| self.addmod(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Coeffs {
        a.iter().zip(b).map(|(&x, &y)| self.submod(x, y)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Coeffs {
        a.iter().map(|&x| self.submod(0, x)).collect()
    }

    /// `a + s * b` for a scalar `s` of `Z_q`.
    pub fn add_scaled(&self, a: &mut [u64], s: &[u64], b: &[u64]) {
        let f = self.f;
        if f == 1 {
            let s = s[0];
            for (x, &y) in a.iter_mut().zip(b) {
                *x = self.addmod(*x, self.mulmod(s, y));
            }
            return;
        }
        for i in 0..self.e {
            let c = self.zq_mul(s, &b[i * f..(i + 1) * f]);
            for j in 0..f {
                a[i * f + j] = self.addmod(a[i * f + j], c[j]);
            }
        }
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Coeffs {
        let (e, f) = (self.e, self.f);
        if e == 1 {
            return self.zq_mul(a, b);
        }
        let mut prod: Vec<Coeffs> = vec![self.zq_zero(); 2 * e - 1];
        for i in 0..e {
            let ai = self.coeff(a, i);
            if ai.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..e {
                let bj = self.coeff(b, j);
                if bj.iter().all(|&c| c == 0) {
                    continue;
                }
                let m = self.zq_mul(ai, bj);
                prod[i + j] = self.zq_add(&prod[i + j], &m);
            }
        }
        for d in (e..2 * e - 1).rev() {
            let c = std::mem::replace(&mut prod[d], self.zq_zero());
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for i in 0..e {
                let m = self.zq_mul(&c, &self.eis[i]);
                prod[d - e + i] = self.zq_sub(&prod[d - e + i], &m);
            }
        }
        let mut out = self.zero();
        for i in 0..e {
            out[i * f..(i + 1) * f].copy_from_slice(&prod[i]);
        }
        out
    }

    pub fn one(&self) -> Coeffs {
        self.from_zq(&self.zq_from_int(1))
    }

    pub fn from_int(&self, n: i64) -> Coeffs {
        self.from_zq(&self.zq_from_int(n))
    }

    /// The class of `X`.
    pub fn x(&self) -> Coeffs {
        let mut c = self.zero();
        if self.e == 1 {
            for j in 0..self.f {
                c[j] = self.submod(0, self.eis[0][j]);
            }
        } else {
            c[self.f] = 1;
        }
        c
    }

    /// `π`-adic valuation of a model element, `None` if it vanishes mod `p^k`.
    pub fn val(&self, a: &[u64]) -> Option<u64> {
        (0..self.e)
            .filter_map(|i| {
                self.zq_val(self.coeff(a, i))
                    .map(|v| self.e as u64 * v as u64 + i as u64)
            })
            .min()
    }
}
