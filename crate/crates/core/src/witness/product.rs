//! Product witness: each projection moves by its one-counter rules and the
//! two distributions are coupled so that both marginals are preserved.

use super::ids::{Letter, Pair, Proj};
use super::pn::{ResidualRule, Residuals};
use super::rules::{Dist, Omega, Rules};
use super::{close, Witness, WitnessError, WitnessStateId, DEFAULT_STATE_CAP};
use crate::geometry::GeometryConstants;
use crate::minsky::{Computation, SyncProduct};
use crate::rational::Rat;

fn both_labeled(t: &Pair) -> bool {
    t.left.label.is_some() && t.left.label == t.right.label && t.left.iota.is_some()
}

/// `ι` only survives on states labeled on both sides.
fn normalize(mut t: Pair) -> Pair {
    if t.left.label.is_none() || t.right.label.is_none() {
        t.left.iota = None;
        t.right.iota = None;
    }
    t
}

/// `None` for a free projection, which stays where it is.
fn side_dist(
    rules: &mut Rules,
    t: &Pair,
    k: usize,
    omega: &Omega,
) -> Result<Option<Dist>, WitnessError> {
    let p = t.side(k);
    if p.h {
        return Ok(None);
    }
    if p.label.is_some() && !both_labeled(t) {
        return rules.abandon(p).map(Some);
    }
    rules.successors(p, omega).map(Some)
}

fn pick(d: &Dist, what: &str, f: impl Fn(&Proj) -> bool, t: &Pair) -> Result<usize, WitnessError> {
    let mut it = d
        .iter()
        .enumerate()
        .filter(|(_, (p, _))| f(p))
        .map(|(i, _)| i);
    match (it.next(), it.next()) {
        (Some(i), None) => Ok(i),
        _ => Err(WitnessError::NoRule(format!("{t} ({what} successor)"))),
    }
}

/// Couples two per-side distributions. With `matched`, the labeled
/// successors are paired with each other up to the smaller probability and
/// the excess goes with the other side's `tc`. Every other non-`tc`
/// successor is paired with the other side's `tc`, and `tc ⊎ tc` takes the
/// remainder. Output order is fixed.
pub(crate) fn couple(
    t: &Pair,
    d1: &Dist,
    d2: &Dist,
    matched: bool,
) -> Result<Vec<(Pair, Rat)>, WitnessError> {
    let c1 = pick(d1, "tc", Proj::is_plain_c, t)?;
    let c2 = pick(d2, "tc", Proj::is_plain_c, t)?;
    let tc1 = &d1[c1].0;
    let tc2 = &d2[c2].0;
    let mut out: Vec<(Pair, Rat)> = Vec::new();
    let (mut m1, mut m2) = (None, None);
    if matched {
        let i1 = pick(d1, "labeled", |p| p.label.is_some(), t)?;
        let i2 = pick(d2, "labeled", |p| p.label.is_some(), t)?;
        let (u1, p1) = &d1[i1];
        let (u2, p2) = &d2[i2];
        out.push((
            Pair::new(u1.clone(), u2.clone()),
            p1.clone().min(p2.clone()),
        ));
        if p1 > p2 {
            out.push((Pair::new(u1.clone(), tc2.clone()), p1 - p2));
        }
        if p2 > p1 {
            out.push((Pair::new(tc1.clone(), u2.clone()), p2 - p1));
        }
        m1 = Some(i1);
        m2 = Some(i2);
    }
    for (i, (u, p)) in d1.iter().enumerate() {
        if i != c1 && Some(i) != m1 {
            out.push((Pair::new(u.clone(), tc2.clone()), p.clone()));
        }
    }
    for (i, (u, p)) in d2.iter().enumerate() {
        if i != c2 && Some(i) != m2 {
            out.push((Pair::new(tc1.clone(), u.clone()), p.clone()));
        }
    }
    let s: Rat = out.iter().map(|(_, p)| p).sum();
    let residual = Rat::one() - s;
    if residual.is_negative() {
        return Err(WitnessError::NegativeResidual {
            state: t.to_string(),
            residual,
        });
    }
    out.push((Pair::new(tc1.clone(), tc2.clone()), residual));
    Ok(out)
}

fn successors(
    rules: &mut Rules,
    t: &Pair,
    omegas: &[Omega; 2],
) -> Result<Vec<(Pair, Rat)>, WitnessError> {
    let d1 = side_dist(rules, t, 1, &omegas[0])?;
    let d2 = side_dist(rules, t, 2, &omegas[1])?;
    let raw = match (d1, d2) {
        (None, None) => vec![(t.clone(), Rat::one())],
        (Some(d1), None) => d1
            .into_iter()
            .map(|(u, p)| (Pair::new(u, t.right.clone()), p))
            .collect(),
        (None, Some(d2)) => d2
            .into_iter()
            .map(|(u, p)| (Pair::new(t.left.clone(), u), p))
            .collect(),
        (Some(d1), Some(d2)) => couple(t, &d1, &d2, both_labeled(t))?,
    };
    Ok(raw.into_iter().map(|(u, p)| (normalize(u), p)).collect())
}

/// Closure of `[0, {a,r0,ℓ1}, {a,r0,ℓ1}, 0, 0]`; side `k` propositions are
/// tagged with `k` in the emitted chain.
pub fn model_product(
    c: &GeometryConstants,
    p: &SyncProduct,
    w: &Computation,
    rule: ResidualRule,
) -> Result<Witness, WitnessError> {
    w.validate(p)?;
    let omegas = [Omega::new(w, 0)?, Omega::new(w, 1)?];
    let mut rules = Rules::new(c, Residuals::new(c, rule));
    let s = Proj::labeled(0, Letter::A, 0, 1, 0);
    let start = Pair::new(s.clone(), s);
    let (chain, order) = close(
        start,
        |t| successors(&mut rules, t, &omegas),
        |t| t.props(),
        DEFAULT_STATE_CAP,
    )?;
    Ok(Witness {
        chain,
        start: 0,
        ids: order.into_iter().map(WitnessStateId::Product).collect(),
    })
}
