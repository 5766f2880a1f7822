//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Every function takes field descriptions as field-file text and returns a
//! JSON string. Errors come back as `{"error": ".."}`.

use hyperval::expr::parse_elem;
use hyperval::fieldfile::parse_field;
use hyperval::lifting::enumerate_homs;
use hyperval::local::{krasner_number, newton_polygon};
use hyperval::{HClass, HFDesc, Result};
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

/// Largest number of ball members returned to the page.
const MEMBER_CAP: usize = 2000;

fn class_json(h: &HFDesc, c: &HClass) -> Json {
    json!({
        "class": h.render(c),
        "level": c.level(),
        "digits": c.digits(),
        "valuation": h.val(c).to_string(),
    })
}

fn reply(r: Result<Json>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

pub fn ball_sum_json(field: &str, n: u32, x: &str, y: &str, lo: i64, hi: i64) -> Result<Json> {
    let k = parse_field(field)?;
    let h = HFDesc::new(&k, n)?;
    let a = h.class_of(&parse_elem(&k, x)?)?;
    let b = h.class_of(&parse_elem(&k, y)?)?;
    let ball = h.add(&a, &b);
    let members = h.ball_classes(&ball, lo, hi)?;
    let shown: Vec<Json> = members
        .iter()
        .take(MEMBER_CAP)
        .map(|c| class_json(&h, c))
        .collect();
    Ok(json!({
        "x": class_json(&h, &a),
        "y": class_json(&h, &b),
        "ball": h.render_ball(&ball),
        "contains_zero": ball.contains_zero()?,
        "q": k.residue().q(),
        "e": k.e(),
        "member_count": members.len(),
        "members": shown,
    }))
}

pub fn newton_json(field: &str) -> Result<Json> {
    let k = parse_field(field)?;
    let shifted = k.eisenstein_poly().taylor_shift(&k.pi())?.drop_low(1);
    let e = k.e() as i64;
    let points: Vec<Json> = shifted
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.level().map(|v| json!([i, v, e])))
        .collect();
    let segments = newton_polygon(&shifted)?;
    Ok(json!({
        "name": k.name(),
        "e": k.e(),
        "points": points,
        "segments": serde_json::to_value(&segments).expect("segments serialise"),
        "krasner": krasner_number(&k)?.to_string(),
    }))
}

pub fn homs_json(
    field1: &str,
    n: u32,
    field2: &str,
    m: u32,
    over_p: bool,
    budget: u64,
) -> Result<Json> {
    let h1 = HFDesc::new(&parse_field(field1)?, n)?;
    let h2 = HFDesc::new(&parse_field(field2)?, m)?;
    let found = enumerate_homs(&h1, &h2, over_p, budget)?;
    let homs: Vec<Json> = found
        .homs
        .iter()
        .map(|f| {
            json!({
                "sigma_frobenius_power": f.sigma().frob_power(),
                "pi_image": h2.render(f.pi_image()),
                "over_p": f.is_over_p(),
            })
        })
        .collect();
    Ok(json!({
        "count": homs.len(),
        "candidates": found.candidates.to_string(),
        "reason": found.reason,
        "homs": homs,
    }))
}

/// Sum `[x] + [y]` in `H_n(K)` with its members at levels `lo..=hi`.
#[wasm_bindgen]
pub fn ball_sum(field: &str, n: u32, x: &str, y: &str, lo: i32, hi: i32) -> String {
    reply(ball_sum_json(field, n, x, y, lo as i64, hi as i64))
}

/// Newton polygon of `E(X + π)/X` and the Krasner number.
#[wasm_bindgen]
pub fn newton(field: &str) -> String {
    reply(newton_json(field))
}

/// Homomorphisms `H_n(K1) → H_m(K2)`.
#[wasm_bindgen]
pub fn homs(field1: &str, n: u32, field2: &str, m: u32, over_p: bool, budget: u32) -> String {
    reply(homs_json(field1, n, field2, m, over_p, budget as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q2: &str = "p = 2\neisenstein = [-2, 1]\nprecision = 12\n";
    const Q3_SQRT3: &str = "p = 3\neisenstein = [-3, 0, 1]\nprecision = 16\n";
    const Q3_SQRT_M3: &str = "p = 3\neisenstein = [3, 0, 1]\nprecision = 16\n";
    const Q2_SQRT2: &str = "p = 2\neisenstein = [-2, 0, 1]\nprecision = 16\n";

    #[test]
    fn one_plus_one_in_h2_q2() {
        let r = ball_sum_json(Q2, 2, "1", "1", -2, 6).unwrap();
        assert_eq!(r["contains_zero"], false);
        assert_eq!(r["member_count"], 2);
        let r = ball_sum_json(Q3_SQRT3, 1, "1", "-1", 0, 2).unwrap();
        assert_eq!(r["contains_zero"], true);
    }

    #[test]
    fn newton_polygons() {
        let r = newton_json(Q3_SQRT3).unwrap();
        assert_eq!(r["krasner"], "1/2");
        let r = newton_json(Q2_SQRT2).unwrap();
        assert_eq!(r["krasner"], "3/2");
        assert!(r["points"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn hom_counts() {
        let r = homs_json(Q3_SQRT3, 1, Q3_SQRT_M3, 1, false, 1_000_000).unwrap();
        assert_eq!(r["count"], 2);
        let r = homs_json(Q3_SQRT3, 1, Q3_SQRT_M3, 1, true, 1_000_000).unwrap();
        assert_eq!(r["count"], 0);
    }

    #[test]
    fn page_presets_parse() {
        let js = include_str!("../www/app.js");
        let presets: Vec<String> = js
            .lines()
            .filter_map(|l| l.trim().split_once(": '"))
            .map(|(_, rest)| rest.trim_end_matches("',").replace("\\n", "\n"))
            .collect();
        assert_eq!(presets.len(), 8);
        for text in &presets {
            parse_field(text).unwrap();
            newton_json(text).unwrap();
        }
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v: Json = serde_json::from_str(&reply(newton_json("p = 4"))).unwrap();
        assert!(v["error"].is_string());
    }
}
