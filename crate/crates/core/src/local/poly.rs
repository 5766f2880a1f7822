use num_rational::Ratio;
use serde::Serialize;

use super::{FieldRef, LFElem};
use crate::error::{Error, Result};

/// A polynomial over a local field, coefficients ascending.
#[derive(Clone, Debug)]
pub struct LFPoly {
    coeffs: Vec<LFElem>,
}

impl LFPoly {
    pub fn new(mut coeffs: Vec<LFElem>) -> LFPoly {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        LFPoly { coeffs }
    }

    pub fn from_ints(field: &FieldRef, coeffs: &[i64]) -> LFPoly {
        LFPoly::new(coeffs.iter().map(|&c| LFElem::from_int(field, c)).collect())
    }

    pub fn coeffs(&self) -> &[LFElem] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn field(&self) -> &FieldRef {
        self.coeffs[0].field()
    }

    pub fn eval(&self, x: &LFElem) -> Result<LFElem> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Result<LFPoly> {
        if self.coeffs.len() == 1 {
            return Ok(LFPoly::new(vec![self.field().zero()]));
        }
        let k = self.field().clone();
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&LFElem::from_int(&k, i as i64 + 1)))
            .collect::<Result<_>>()?;
        Ok(LFPoly::new(coeffs))
    }

    /// Coefficients of `P(X + c)`.
    pub fn taylor_shift(&self, c: &LFElem) -> Result<LFPoly> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1].mul(c)?;
                a[j] = a[j].add(&t)?;
            }
        }
        Ok(LFPoly { coeffs: a })
    }

    /// `P(X) / X^k` for the lowest `k` coefficients dropped.
    pub fn drop_low(&self, k: usize) -> LFPoly {
        LFPoly::new(self.coeffs[k..].to_vec())
    }

    pub fn map_coeffs(&self, f: impl Fn(&LFElem) -> Result<LFElem>) -> Result<LFPoly> {
        Ok(LFPoly::new(
            self.coeffs.iter().map(f).collect::<Result<_>>()?,
        ))
    }
}

/// One edge of a Newton polygon: slope in normalised valuation units and
/// horizontal length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Ratio<i64>,
    pub length: u32,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Lower convex hull of `(i, ν(a_i))`, as slopes with multiplicities.
///
/// Roots have valuations `-slope`. Coefficients that are zero only to some
/// precision must lie provably on or above the hull, otherwise the polygon is
/// undetermined and an error is returned.
pub fn newton_polygon(poly: &LFPoly) -> Result<Vec<Segment>> {
    let e = poly.field().e() as i64;
    let pts: Vec<(i64, i64)> = poly
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.level().map(|v| (i as i64, v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let (first, last) = (hull[0].0, hull[hull.len() - 1].0);
    for (i, c) in poly.coeffs().iter().enumerate() {
        if c.level().is_some() || c.is_exact_zero() {
            continue;
        }
        let i = i as i64;
        let abs = c.zero_abs().unwrap();
        if i < first || i > last {
            return Err(Error::PrecisionExhausted(format!(
                "coefficient {i} is zero only modulo π^{abs} and lies outside the polygon"
            )));
        }
        let w = hull
            .windows(2)
            .find(|w| w[0].0 <= i && i <= w[1].0)
            .unwrap();
        let (a, b) = (w[0], w[1]);
        let on_hull = Ratio::new(a.1 * (b.0 - a.0) + (b.1 - a.1) * (i - a.0), b.0 - a.0);
        if Ratio::from_integer(abs) < on_hull {
            return Err(Error::PrecisionExhausted(format!(
                "coefficient {i} is zero only modulo π^{abs}, below the polygon"
            )));
        }
    }
    Ok(hull
        .windows(2)
        .map(|w| Segment {
            slope: Ratio::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) * e),
            length: (w[1].0 - w[0].0) as u32,
        })
        .collect())
}

/// Newton iteration from `x0`, requiring `ν(P(x0)) > 2 ν(P'(x0))`.
///
/// The returned root satisfies `ν(x* - x0) >= ν(P(x0)) - ν(P'(x0))`.
pub fn hensel_root(poly: &LFPoly, x0: &LFElem) -> Result<LFElem> {
    let dpoly = poly.derivative()?;
    let px = poly.eval(x0)?;
    let dpx = dpoly.eval(x0)?;
    let Some(dv) = dpx.level() else {
        return Err(Error::HenselCriterion(
            "derivative vanishes at the seed".into(),
        ));
    };
    match px.level() {
        None => {
            if px.is_exact_zero() || px.zero_abs().unwrap() > 2 * dv {
                return Ok(certified(x0, px.zero_abs().map(|a| a - dv)));
            }
            return Err(Error::HenselCriterion(
                "P(x0) is not known precisely enough".into(),
            ));
        }
        Some(pv) if pv <= 2 * dv => {
            return Err(Error::HenselCriterion(format!(
                "ν(P(x0)) = {} is not greater than 2ν(P'(x0)) = {}",
                px.valuation(),
                super::Value::from_level(Some(2 * dv), poly.field().e())
            )));
        }
        _ => {}
    }
    let mut x = x0.clone();
    for _ in 0..64 {
        let px = poly.eval(&x)?;
        let dpx = dpoly.eval(&x)?;
        if px.is_zero() {
            let dv = dpx.level().expect("derivative stays a unit multiple");
            return Ok(certified(&x, px.zero_abs().map(|a| a - dv)));
        }
        let step = px.div(&dpx)?;
        if step.is_zero() {
            return Ok(certified(&x, step.zero_abs()));
        }
        x = x.sub(&step)?;
    }
    Err(Error::NoConvergence(
        "Newton iteration exceeded 64 steps".into(),
    ))
}

/// `x` cut down to the digits below absolute level `abs`, the distance to
/// the true root that the last residual certifies.
fn certified(x: &LFElem, abs: Option<i64>) -> LFElem {
    match (x.level(), abs) {
        (Some(v), Some(a)) => x.truncate((a - v).max(0) as u32),
        _ => x.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalField;

    fn r(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn polygon_of_x2_minus_3_over_q3() {
        let k = LocalField::qp(3, 10).unwrap();
        let p = LFPoly::from_ints(&k, &[-3, 0, 1]);
        assert_eq!(
            newton_polygon(&p).unwrap(),
            vec![Segment {
                slope: r(-1, 2),
                length: 2
            }]
        );
    }

    #[test]
    fn polygon_of_x2_minus_2x_over_q2() {
        let k = LocalField::qp(2, 10).unwrap();
        let p = LFPoly::from_ints(&k, &[0, -2, 1]);
        assert_eq!(
            newton_polygon(&p).unwrap(),
            vec![Segment {
                slope: r(-1, 1),
                length: 1
            }]
        );
    }

    #[test]
    fn polygon_with_two_slopes() {
        let k = LocalField::qp(5, 10).unwrap();
        let p = LFPoly::from_ints(&k, &[125, 5, 1]);
        assert_eq!(
            newton_polygon(&p).unwrap(),
            vec![
                Segment {
                    slope: r(-2, 1),
                    length: 1
                },
                Segment {
                    slope: r(-1, 1),
                    length: 1
                }
            ]
        );
    }

    #[test]
    fn sqrt_minus_one_in_q5() {
        let k = LocalField::qp(5, 12).unwrap();
        let p = LFPoly::from_ints(&k, &[1, 0, 1]);
        let root = hensel_root(&p, &LFElem::from_int(&k, 2)).unwrap();
        assert!(p.eval(&root).unwrap().is_zero());
        assert_eq!(root.digits()[0], 2);
        assert_eq!(root, k.teichmuller(2));
    }

    #[test]
    fn hensel_rejects_bad_seed() {
        let k = LocalField::qp(2, 12).unwrap();
        let bad = LFPoly::from_ints(&k, &[-5, 0, 1]);
        assert!(matches!(
            hensel_root(&bad, &LFElem::from_int(&k, 1)),
            Err(Error::HenselCriterion(_))
        ));
        let p = LFPoly::from_ints(&k, &[-17, 0, 1]);
        let root = hensel_root(&p, &LFElem::from_int(&k, 7)).unwrap();
        assert!(p.eval(&root).unwrap().is_zero());
    }

    #[test]
    fn taylor_shift_matches_direct_evaluation() {
        let k = LocalField::pure(3, 2, 3, 16).unwrap();
        let p = LFPoly::from_ints(&k, &[5, -3, 2, 7]);
        let c = k.pi();
        let s = p.taylor_shift(&c).unwrap();
        let x = LFElem::from_int(&k, 4);
        assert_eq!(s.eval(&x).unwrap(), p.eval(&x.add(&c).unwrap()).unwrap());
    }
}
