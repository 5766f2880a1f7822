use num_rational::Ratio;

use super::{hensel_root, newton_polygon, FieldRef, LFElem, LFPoly};
use crate::error::{Error, Result};

/// `M(K) = max ν(π - π')` over the conjugates `π' ≠ π` of the uniformiser.
///
/// Computed from the Newton polygon of `E(X + π) / X`. Zero when `e = 1`.
pub fn krasner_number(field: &FieldRef) -> Result<Ratio<i64>> {
    if field.e() == 1 {
        return Ok(Ratio::from_integer(0));
    }
    let shifted = field.eisenstein_poly().taylor_shift(&field.pi())?;
    let constant = &shifted.coeffs()[0];
    if !constant.is_zero() {
        return Err(Error::PrecisionExhausted(
            "E(π) does not vanish at working precision".into(),
        ));
    }
    let poly = shifted.drop_low(1);
    let segments = newton_polygon(&poly)?;
    Ok(segments.iter().map(|s| -s.slope).max().unwrap())
}

/// The uniform length bound `e2 (1 + e1^2)` above which every hyperfield
/// homomorphism over `p` lifts.
pub fn lift_bound(e1: u32, e2: u32) -> u64 {
    e2 as u64 * (1 + (e1 as u64).pow(2))
}

/// Whether `1 + p x^n` is an `n`-th power in `K`, for `p ∤ n`.
pub fn phi_q(x: &LFElem, n: u32) -> Result<bool> {
    let field = x.field();
    if n == 0 || n.is_multiple_of(field.p()) {
        return Err(Error::InvalidInput(format!(
            "exponent {n} must be positive and prime to p"
        )));
    }
    let c = field.one().add(&field.p_elem().mul(&x.pow(n as i64)?)?)?;
    let Some(v) = c.level() else {
        return Err(Error::PrecisionExhausted(
            "1 + p x^n vanishes at working precision".into(),
        ));
    };
    if v.rem_euclid(n as i64) != 0 {
        return Ok(false);
    }
    let unit = c.shift(-v);
    let res = field.residue();
    let target = unit.leading_digit().unwrap();
    let Some(s) = (1..res.q()).find(|&s| res.pow(s, n as i64) == Some(target)) else {
        return Ok(false);
    };
    let mut coeffs = vec![unit.neg()];
    coeffs.extend((1..n).map(|_| field.zero()));
    coeffs.push(field.one());
    let root = hensel_root(&LFPoly::new(coeffs), &field.teichmuller(s))?;
    let y = root.shift(v / n as i64);
    debug_assert!(y.pow(n as i64)?.sub(&c)?.is_zero());
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalField;

    /// `1/e + max ν(1 - ζ)` over nontrivial `e`-th roots of unity, for `X^e - c`.
    fn pure_krasner_oracle(p: i64, e: i64) -> Ratio<i64> {
        let mut best = Ratio::from_integer(0);
        for i in 1..e {
            let d = e / num_integer::gcd(i, e);
            let mut s = 0;
            let mut dd = d;
            while dd % p == 0 {
                dd /= p;
                s += 1;
            }
            let v = if dd == 1 && s > 0 {
                Ratio::new(1, p.pow(s - 1) * (p - 1))
            } else {
                Ratio::from_integer(0)
            };
            best = best.max(v);
        }
        Ratio::new(1, e) + best
    }

    #[test]
    fn krasner_numbers_match_conjugate_differences() {
        let cases = [
            (3u32, 2u32, 3i64),
            (2, 2, 2),
            (2, 3, 2),
            (3, 4, 3),
            (5, 2, 5),
            (2, 2, 6),
            (3, 3, 3),
        ];
        for (p, e, c) in cases {
            let k = LocalField::pure(p, e, c, 24).unwrap();
            assert_eq!(
                krasner_number(&k).unwrap(),
                pure_krasner_oracle(p as i64, e as i64),
                "{k:?}"
            );
        }
        assert_eq!(
            krasner_number(&LocalField::qp(7, 5).unwrap()).unwrap(),
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn frozen_krasner_values() {
        let q3 = LocalField::pure(3, 2, 3, 20).unwrap();
        let q2 = LocalField::pure(2, 2, 2, 20).unwrap();
        assert_eq!(krasner_number(&q3).unwrap(), Ratio::new(1, 2));
        assert_eq!(krasner_number(&q2).unwrap(), Ratio::new(3, 2));
    }

    #[test]
    fn lift_bound_values() {
        assert_eq!(lift_bound(2, 2), 10);
        assert_eq!(lift_bound(1, 1), 2);
        assert_eq!(lift_bound(2, 4), 20);
    }

    #[test]
    fn phi_q_on_small_elements() {
        let k = LocalField::pure(3, 2, 3, 20).unwrap();
        assert!(phi_q(&k.zero(), 4).unwrap());
        assert!(phi_q(&k.one(), 4).unwrap());
        assert!(!phi_q(&k.pi().inv().unwrap(), 4).unwrap());
        assert!(phi_q(&k.pi(), 4).unwrap());
        assert!(phi_q(&k.one(), 3).is_err());
    }
}
