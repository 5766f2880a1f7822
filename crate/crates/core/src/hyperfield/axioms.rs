//! A generic checker for the hyperfield and valuation axioms on a finite
//! window of classes.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::par;

/// The part of a hypersum visible in a window of levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSet<E: Ord> {
    pub members: BTreeSet<E>,
    pub contains_zero: bool,
}

impl<E: Ord + Clone> SumSet<E> {
    fn restrict(&self, keep: impl Fn(&E) -> bool) -> SumSet<E> {
        SumSet {
            members: self.members.iter().filter(|x| keep(x)).cloned().collect(),
            contains_zero: self.contains_zero,
        }
    }
}

/// A valued hyperfield whose classes at a fixed level can be enumerated.
///
/// Levels are valuations in units of the value group generator `θ`, and
/// `length` is `ρ / θ`.
pub trait DiscreteHyperfield: Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn level(&self, a: &Self::Elem) -> Option<i64>;
    fn length(&self) -> u32;
    fn classes_at(&self, level: i64) -> Result<Vec<Self::Elem>>;
    /// Members of `a + b` with level in `[lo, hi]`, plus whether `0 ∈ a + b`.
    fn sum(&self, a: &Self::Elem, b: &Self::Elem, lo: i64, hi: i64) -> Result<SumSet<Self::Elem>>;
    fn render(&self, a: &Self::Elem) -> String;
}

/// Which triples to check.
#[derive(Clone, Debug)]
pub struct AxiomConfig {
    /// Lowest level of the window.
    pub lo: i64,
    /// Highest level of the window.
    pub hi: i64,
    /// `None` checks every triple; otherwise this many seeded random triples.
    pub samples: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomOutcome {
    pub axiom: &'static str,
    pub checked: u64,
    pub violations: u64,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub universe: usize,
    pub triples: u64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.violations == 0)
    }
    pub fn violations(&self) -> u64 {
        self.outcomes.iter().map(|o| o.violations).sum()
    }
    pub fn first_counterexample(&self) -> Option<(&'static str, &str)> {
        self.outcomes
            .iter()
            .find_map(|o| o.counterexample.as_deref().map(|c| (o.axiom, c)))
    }
}

const AXIOMS: [&str; 15] = [
    "additive-commutativity",
    "additive-associativity",
    "additive-identity",
    "unique-negative",
    "reversibility",
    "distributivity",
    "multiplicative-associativity",
    "multiplicative-commutativity",
    "multiplicative-inverse",
    "absorbing-zero",
    "valuation-zero",
    "valuation-multiplicative",
    "valuation-ultrametric",
    "valuation-single-level",
    "valuation-closed-ball",
];

fn idx(name: &str) -> usize {
    AXIOMS.iter().position(|&a| a == name).unwrap()
}

type Findings = Vec<(usize, Option<String>)>;

struct Ctx<'a, H: DiscreteHyperfield> {
    h: &'a H,
    universe: Vec<H::Elem>,
    index: HashMap<H::Elem, usize>,
    /// `table[i][j] = extended[i] + universe[j]` and `rtable[j][i] = universe[j] + extended[i]`.
    table: Vec<Vec<SumSet<H::Elem>>>,
    rtable: Vec<Vec<SumSet<H::Elem>>>,
    lo: i64,
    hi_obs: i64,
    wide: i64,
}

impl<'a, H: DiscreteHyperfield> Ctx<'a, H> {
    fn lvl(&self, a: &H::Elem) -> i64 {
        self.h.level(a).unwrap_or(i64::MAX)
    }

    fn show(&self, xs: &[&H::Elem]) -> String {
        xs.iter()
            .map(|x| self.h.render(x))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn in_obs(&self, s: &SumSet<H::Elem>) -> SumSet<H::Elem> {
        let (lo, hi) = (self.lo, self.hi_obs);
        s.restrict(|x| {
            let l = self.h.level(x).unwrap();
            lo <= l && l <= hi
        })
    }

    /// `a + b` with `a` from the extended set and `b` from the universe, or
    /// the reverse; falls back to direct evaluation.
    fn sum(&self, a: &H::Elem, b: &H::Elem) -> Result<SumSet<H::Elem>> {
        if let (Some(&i), Some(&j)) = (self.index.get(a), self.index.get(b)) {
            if j < self.universe.len() {
                return Ok(self.table[i][j].clone());
            }
            if i < self.universe.len() {
                return Ok(self.rtable[i][j].clone());
            }
        }
        self.h.sum(a, b, self.lo, self.wide)
    }

    /// `∪_{d ∈ a + b} (d + c)`, observed in the window.
    fn left_assoc(&self, ab: &SumSet<H::Elem>, c: &H::Elem, left: bool) -> Result<SumSet<H::Elem>> {
        let cap = self.hi_obs.max(self.lvl(c).min(self.wide)) + self.h.length() as i64 + 1;
        let mut ds: Vec<H::Elem> = ab
            .members
            .iter()
            .filter(|d| self.lvl(d) <= cap)
            .cloned()
            .collect();
        if ab.contains_zero {
            ds.push(self.h.zero());
        }
        let mut out = SumSet {
            members: BTreeSet::new(),
            contains_zero: false,
        };
        for d in &ds {
            let s = if left {
                self.sum(d, c)?
            } else {
                self.sum(c, d)?
            };
            out.contains_zero |= s.contains_zero;
            out.members.extend(self.in_obs(&s).members);
        }
        Ok(out)
    }

    fn check_triple(&self, a: &H::Elem, b: &H::Elem, c: &H::Elem) -> Result<Findings> {
        let h = self.h;
        let mut out: Findings = Vec::new();
        let mut report = |name: &str, ok: bool, msg: &dyn Fn() -> String| {
            out.push((idx(name), if ok { None } else { Some(msg()) }));
        };
        let ab = self.sum(a, b)?;
        let ba = self.sum(b, a)?;
        report(
            "additive-commutativity",
            self.in_obs(&ab) == self.in_obs(&ba),
            &|| {
                format!(
                    "{} + {} differs from the reverse order",
                    h.render(a),
                    h.render(b)
                )
            },
        );
        let bc = self.sum(b, c)?;
        let lhs = self.left_assoc(&ab, c, true)?;
        let rhs = self.left_assoc(&bc, a, false)?;
        report("additive-associativity", lhs == rhs, &|| {
            format!(
                "(a + b) + c differs from a + (b + c) for a, b, c = {}",
                self.show(&[a, b, c])
            )
        });
        let a0 = self.sum(a, &h.zero())?;
        let ident_ok = if h.level(a).is_none() {
            a0.contains_zero && a0.members.is_empty()
        } else {
            !a0.contains_zero && self.in_obs(&a0).members.iter().collect::<Vec<_>>() == vec![a]
        };
        report("additive-identity", ident_ok, &|| {
            format!("{} + 0 is not a singleton", h.render(a))
        });
        let nc = h.neg(c);
        let b_minus_c = self.h.sum(b, &nc, self.lo, self.wide)?;
        let a_plus_c = self.sum(a, c)?;
        let member = |s: &SumSet<H::Elem>, x: &H::Elem| {
            if h.level(x).is_none() {
                s.contains_zero
            } else {
                s.members.contains(x)
            }
        };
        report(
            "reversibility",
            member(&b_minus_c, a) == member(&a_plus_c, b),
            &|| {
                format!(
                    "a ∈ b - c and b ∈ a + c disagree for a, b, c = {}",
                    self.show(&[a, b, c])
                )
            },
        );
        let lc = self.lvl(c).min(self.wide);
        let shift = |s: &SumSet<H::Elem>| -> SumSet<H::Elem> {
            SumSet {
                members: s
                    .members
                    .iter()
                    .map(|x| h.mul(x, c))
                    .filter(|x| {
                        h.level(x)
                            .is_some_and(|l| l <= self.hi_obs.saturating_add(lc))
                    })
                    .collect(),
                contains_zero: s.contains_zero || h.level(c).is_none(),
            }
        };
        let left = shift(&self.in_obs(&ab));
        let right = if h.level(c).is_none() {
            SumSet {
                members: BTreeSet::new(),
                contains_zero: true,
            }
        } else {
            let s = h.sum(
                &h.mul(a, c),
                &h.mul(b, c),
                self.lo.saturating_add(lc),
                self.hi_obs.saturating_add(lc),
            )?;
            let lo = self.lo.saturating_add(lc);
            s.restrict(|x| h.level(x).is_some_and(|l| l >= lo))
        };
        report("distributivity", left == right, &|| {
            format!(
                "(a + b)c differs from ac + bc for a, b, c = {}",
                self.show(&[a, b, c])
            )
        });
        report(
            "multiplicative-associativity",
            h.mul(&h.mul(a, b), c) == h.mul(a, &h.mul(b, c)),
            &|| format!("(ab)c ≠ a(bc) for {}", self.show(&[a, b, c])),
        );
        report(
            "multiplicative-commutativity",
            h.mul(a, b) == h.mul(b, a),
            &|| format!("ab ≠ ba for {}", self.show(&[a, b])),
        );
        let inv_ok = match (h.level(a), h.inv(a)) {
            (None, None) => true,
            (Some(_), Some(x)) => h.mul(a, &x) == h.one() && h.mul(a, &h.one()) == *a,
            _ => false,
        };
        report("multiplicative-inverse", inv_ok, &|| {
            format!("{} has no inverse", h.render(a))
        });
        report(
            "absorbing-zero",
            h.level(&h.mul(a, &h.zero())).is_none(),
            &|| format!("0·{} ≠ 0", h.render(a)),
        );
        let mul_level = match (h.level(a), h.level(b)) {
            (Some(x), Some(y)) => h.level(&h.mul(a, b)) == Some(x + y),
            _ => h.level(&h.mul(a, b)).is_none(),
        };
        report("valuation-multiplicative", mul_level, &|| {
            format!("ν(ab) ≠ ν(a) + ν(b) for {}", self.show(&[a, b]))
        });
        let min = self.lvl(a).min(self.lvl(b));
        report(
            "valuation-ultrametric",
            ab.members.iter().all(|x| self.lvl(x) >= min),
            &|| {
                format!(
                    "a + b has a member below min(ν(a), ν(b)) for {}",
                    self.show(&[a, b])
                )
            },
        );
        let levels: BTreeSet<i64> = ab.members.iter().map(|x| self.lvl(x)).collect();
        report(
            "valuation-single-level",
            ab.contains_zero || levels.len() <= 1,
            &|| {
                format!(
                    "a + b spans several levels without containing 0 for {}",
                    self.show(&[a, b])
                )
            },
        );
        Ok(out)
    }

    fn check_element(&self, a: &H::Elem) -> Result<Findings> {
        let h = self.h;
        let mut out: Findings = Vec::new();
        let zero_ok = (h.level(a).is_none()) == (*a == h.zero());
        out.push((
            idx("valuation-zero"),
            (!zero_ok).then(|| format!("ν({}) is inconsistent", h.render(a))),
        ));
        let mut negs = Vec::new();
        for b in &self.universe {
            if self.sum(a, b)?.contains_zero {
                negs.push(b.clone());
            }
        }
        let ok = negs == vec![h.neg(a)];
        out.push((
            idx("unique-negative"),
            (!ok).then(|| {
                format!(
                    "{} has negatives {}",
                    h.render(a),
                    self.show(&negs.iter().collect::<Vec<_>>())
                )
            }),
        ));
        Ok(out)
    }

    /// `a + b` equals the closed ball of radius `length + min` around a member.
    fn check_ball(&self, a: &H::Elem, b: &H::Elem) -> Result<Findings> {
        let h = self.h;
        if h.level(a).is_none() && h.level(b).is_none() {
            return Ok(Vec::new());
        }
        let ab = self.in_obs(&self.sum(a, b)?);
        let Some(d) = ab.members.iter().next().cloned() else {
            return Ok(Vec::new());
        };
        let r = self.lvl(a).min(self.lvl(b)) + h.length() as i64;
        let nd = h.neg(&d);
        let mut ball = BTreeSet::new();
        for level in self.lo..=self.hi_obs {
            for x in h.classes_at(level)? {
                if x == d || h.sum(&x, &nd, self.lo, r - 1)?.members.is_empty() {
                    ball.insert(x);
                }
            }
        }
        let ball_zero = self.lvl(&d) >= r;
        let ok = ab.members == ball && ab.contains_zero == ball_zero;
        Ok(vec![(
            idx("valuation-closed-ball"),
            (!ok).then(|| {
                format!(
                    "a + b is not a closed ball of constant radius for {}",
                    self.show(&[a, b])
                )
            }),
        )])
    }
}

/// Checks the hyperfield and valuation axioms on `{0} ∪ {classes with level in [lo, hi]}`.
///
/// Hypersums are compared as sets of classes with level in `[lo, hi + length]`.
pub fn check_axioms<H: DiscreteHyperfield>(h: &H, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let n = h.length() as i64;
    let hi_obs = cfg.hi + n;
    let wide = cfg.hi + 3 * n + 2;
    let mut universe = vec![h.zero()];
    for level in cfg.lo..=cfg.hi {
        universe.extend(h.classes_at(level)?);
    }
    let mut extended = universe.clone();
    for level in cfg.hi + 1..=cfg.hi + 2 * n + 2 {
        extended.extend(h.classes_at(level)?);
    }
    let index: HashMap<H::Elem, usize> = extended
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i))
        .collect();
    let table: Vec<Vec<SumSet<H::Elem>>> = par::map(&extended, |x| {
        universe
            .iter()
            .map(|y| h.sum(x, y, cfg.lo, wide))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let rtable: Vec<Vec<SumSet<H::Elem>>> = par::map(&universe, |x| {
        extended
            .iter()
            .map(|y| h.sum(x, y, cfg.lo, wide))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let ctx = Ctx {
        h,
        universe,
        index,
        table,
        rtable,
        lo: cfg.lo,
        hi_obs,
        wide,
    };
    let u = ctx.universe.len();
    let triples: Vec<(usize, usize, usize)> = match cfg.samples {
        None => (0..u * u * u)
            .map(|t| (t / (u * u), (t / u) % u, t % u))
            .collect(),
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..s)
                .map(|_| {
                    (
                        rng.gen_range(0..u),
                        rng.gen_range(0..u),
                        rng.gen_range(0..u),
                    )
                })
                .collect()
        }
    };
    let pairs: BTreeSet<(usize, usize)> = match cfg.samples {
        None => (0..u * u).map(|t| (t / u, t % u)).collect(),
        Some(_) => triples.iter().map(|&(a, b, _)| (a, b)).collect(),
    };
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let mut findings: Vec<Result<Findings>> = par::map(&triples, |&(a, b, c)| {
        ctx.check_triple(&ctx.universe[a], &ctx.universe[b], &ctx.universe[c])
    });
    findings.extend(par::map_range(u, |a| ctx.check_element(&ctx.universe[a])));
    findings.extend(par::map(&pairs, |&(a, b)| {
        ctx.check_ball(&ctx.universe[a], &ctx.universe[b])
    }));
    let mut outcomes: Vec<AxiomOutcome> = AXIOMS
        .iter()
        .map(|&axiom| AxiomOutcome {
            axiom,
            checked: 0,
            violations: 0,
            counterexample: None,
        })
        .collect();
    for f in findings {
        for (i, bad) in f? {
            let o = &mut outcomes[i];
            o.checked += 1;
            if let Some(msg) = bad {
                o.violations += 1;
                o.counterexample.get_or_insert(msg);
            }
        }
    }
    Ok(AxiomReport {
        exhaustive: cfg.samples.is_none(),
        seed: cfg.samples.map(|_| cfg.seed),
        universe: u,
        triples: triples.len() as u64,
        outcomes,
    })
}
