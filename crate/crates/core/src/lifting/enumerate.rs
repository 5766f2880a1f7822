use super::{root_criterion, validate_hom, validation_cost, HFHom, HomReport};
use crate::error::{Error, Result};
use crate::hyperfield::HFDesc;
use crate::par;
use crate::residue::{embeddings, Embedding};

/// The homomorphisms found by [`enumerate_homs`], in candidate order.
#[derive(Clone, Debug)]
pub struct HomEnumeration {
    pub homs: Vec<HFHom>,
    pub reports: Vec<HomReport>,
    /// Candidates that reached full validation.
    pub candidates: u128,
    /// Why the search space is empty, when it is.
    pub reason: Option<String>,
}

impl HomEnumeration {
    fn empty(reason: String) -> HomEnumeration {
        HomEnumeration {
            homs: Vec::new(),
            reports: Vec::new(),
            candidates: 0,
            reason: Some(reason),
        }
    }
}

/// Why no homomorphism `src → dst` is parametrised, if so; otherwise the
/// residue field embeddings to search.
pub(crate) fn search_space(
    src: &HFDesc,
    dst: &HFDesc,
) -> Result<std::result::Result<Vec<Embedding>, String>> {
    let (k1, k2) = (src.field(), dst.field());
    if k1.p() != k2.p() {
        return Ok(Err(format!(
            "residue characteristics {} and {} differ",
            k1.p(),
            k2.p()
        )));
    }
    if k2.e() % k1.e() != 0 {
        return Ok(Err(format!(
            "e₁ = {} does not divide e₂ = {}; only valuation-compatible maps are enumerated",
            k1.e(),
            k2.e()
        )));
    }
    let r = k2.e() / k1.e();
    if r * src.n() < dst.n() {
        return Err(Error::InvalidInput(format!(
            "H_{} classes do not determine H_{} classes (need r n ≥ m with r = {r})",
            src.n(),
            dst.n()
        )));
    }
    let embs = embeddings(k1.residue(), k2.residue())?;
    if embs.is_empty() {
        return Ok(Err(format!(
            "GF({}) does not embed in GF({})",
            k1.residue().q(),
            k2.residue().q()
        )));
    }
    Ok(Ok(embs))
}

/// Candidates over `p` for one residue embedding, found by extending the
/// digits of the image of `[π₁]` one at a time. A prefix of length `j`
/// survives when `[p]` maps to `[p]` in `H_j(K₂)`, which only depends on
/// those `j` digits.
pub(crate) fn over_p_candidates(
    src: &HFDesc,
    dst: &HFDesc,
    sigma: &Embedding,
) -> Result<Vec<HFHom>> {
    let k2 = dst.field();
    let q2 = k2.residue().q();
    let r = (k2.e() / src.field().e()) as i64;
    let m = dst.n() as usize;
    let truncated: Vec<HFDesc> = (1..=m as u32)
        .map(|j| HFDesc::new(k2, j))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = (1..q2).rev().map(|d| vec![d]).collect();
    while let Some(prefix) = stack.pop() {
        let h_j = &truncated[prefix.len() - 1];
        let cand = HFHom::new(src, h_j, sigma.clone(), h_j.class(r, &prefix)?)?;
        if !cand.is_over_p() {
            continue;
        }
        if prefix.len() == m {
            out.push(HFHom::new(src, dst, sigma.clone(), dst.class(r, &prefix)?)?);
            continue;
        }
        for d in (0..q2).rev() {
            let mut next = prefix.clone();
            next.push(d);
            stack.push(next);
        }
    }
    Ok(out)
}

/// All homomorphisms `H_n(K₁) → H_m(K₂)` of the form `(σ, [π₁] ↦ [b])`, or
/// only those over `p`, ordered by (embedding index, digits of `[b]`).
///
/// Candidates are validated with [`validate_hom`]. `budget` caps the total
/// number of class evaluations.
pub fn enumerate_homs(
    src: &HFDesc,
    dst: &HFDesc,
    over_p_only: bool,
    budget: u64,
) -> Result<HomEnumeration> {
    let embs = match search_space(src, dst)? {
        Ok(e) => e,
        Err(reason) => return Ok(HomEnumeration::empty(reason)),
    };
    let r = (dst.field().e() / src.field().e()) as i64;
    let mut cands = Vec::new();
    if over_p_only {
        for sigma in &embs {
            for h in over_p_candidates(src, dst, sigma)? {
                if root_criterion(&h)? {
                    cands.push(h);
                }
            }
        }
    } else {
        let per = dst.classes_per_level();
        let total = per * embs.len() as u128;
        if total > budget as u128 {
            return Err(Error::BudgetExceeded {
                needed: total,
                budget,
            });
        }
        for sigma in &embs {
            for c in dst.classes_at(r)? {
                cands.push(HFHom::new(src, dst, sigma.clone(), c)?);
            }
        }
    }
    let cost: u128 = cands.iter().map(validation_cost).sum();
    if cost > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: cost,
            budget,
        });
    }
    let reports = par::map(&cands, |h| validate_hom(h, u64::MAX));
    let mut out = HomEnumeration {
        homs: Vec::new(),
        reports: Vec::new(),
        candidates: cands.len() as u128,
        reason: None,
    };
    for (h, rep) in cands.into_iter().zip(reports) {
        let rep = rep?;
        if rep.valid() && (!over_p_only || rep.over_p) {
            out.homs.push(h);
            out.reports.push(rep);
        }
    }
    Ok(out)
}
