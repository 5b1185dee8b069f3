//! Exact checks of the characteristic-vector equations on constructed chains.
//!
//! For a non-free state `t` with `v[t] ≠ κ` and `A_t` its `a`-successors:
//!
//! ```text
//! (1)  q = 1 − v[t]₁ + Σ_{u∈A_t} P(t,u)·v[u]₁
//! (2)  q = 1 − v[t]₁ − v[t]₂ + Σ_{u∈A_t} P(t,u)·(v[u]₁ + v[u]₂)
//! ```
//!
//! and then every `u ∈ A_t` has `v[u] = τ(v[t])`.

use serde::Serialize;

use super::relations::Mode;
use crate::geometry::{GeometryConstants, Vec2};
use crate::pctl::check::prob_until_bounded;
use crate::pctl::{characteristic_vector, MarkovChain};
use crate::rational::Rat;
use crate::reduction::{r, tag_name};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PremiseReport {
    /// `(state, side)` pairs the equations were evaluated at.
    pub checked: usize,
    pub eq1_failures: Vec<String>,
    pub eq2_failures: Vec<String>,
    pub tau_failures: Vec<String>,
    /// Non-free states whose vector is not on the `σ` ladder.
    pub off_ladder: Vec<String>,
}

impl PremiseReport {
    pub fn pass(&self) -> bool {
        self.eq1_failures.is_empty()
            && self.eq2_failures.is_empty()
            && self.tau_failures.is_empty()
            && self.off_ladder.is_empty()
    }
}

fn side_name(base: &str, side: Option<usize>) -> String {
    side.map_or_else(|| base.to_string(), |k| tag_name(base, k))
}

/// Evaluates both equations and the `τ` conclusion at every non-free state
/// (per side in product mode). `ladder_depth` bounds the `σⁿ(κ)` search.
pub fn check_premises(
    c: &GeometryConstants,
    mc: &MarkovChain,
    mode: Mode,
    ladder_depth: usize,
) -> PremiseReport {
    let ladder = c.sigma_ladder(ladder_depth);
    let sides: &[Option<usize>] = match mode {
        Mode::OneCounter => &[None],
        Mode::Product => &[Some(1), Some(2)],
    };
    let mut rep = PremiseReport::default();
    for &side in sides {
        let (a, b, h) = (
            side_name("a", side),
            side_name("b", side),
            side_name("h", side),
        );
        let v = |t: usize| -> Vec2 { characteristic_vector(mc, t, &a, &b) };
        for t in 0..mc.len() {
            if mc.has(t, &h) {
                continue;
            }
            let vt = v(t);
            let at = || format!("{} side {}", mc.id(t), side.unwrap_or(1));
            if !ladder.contains(&vt) {
                rep.off_ladder.push(format!("{}: v = {vt}", at()));
            }
            if vt == c.kappa {
                continue;
            }
            rep.checked += 1;
            let succ: Vec<(usize, &Rat)> = mc
                .row(t)
                .iter()
                .filter(|(u, _)| mc.has(*u, &a))
                .map(|(u, p)| (*u, p))
                .collect();
            let mut s1 = Rat::zero();
            let mut s12 = Rat::zero();
            for (u, p) in &succ {
                let vu = v(*u);
                s1 += &(*p * &vu.x1);
                s12 += &(*p * &(&vu.x1 + &vu.x2));
            }
            let eq1 = Rat::one() - &vt.x1 + s1;
            if eq1 != c.q {
                rep.eq1_failures.push(format!("{}: rhs = {eq1}", at()));
            }
            let eq2 = Rat::one() - &vt.x1 - &vt.x2 + s12;
            if eq2 != c.q {
                rep.eq2_failures.push(format!("{}: rhs = {eq2}", at()));
            }
            match c.tau(&vt) {
                Ok(want) => {
                    for (u, _) in &succ {
                        if v(*u) != want {
                            rep.tau_failures.push(format!("{} -> {}", at(), mc.id(*u)));
                        }
                    }
                }
                Err(e) => rep.tau_failures.push(format!("{}: {e}", at())),
            }
        }
    }
    rep
}

/// Measured `[F²(a∧S³), F²((b∧S⁴)∨d), F²((c∧S⁴∧e)∨d)]` at `t`, where `S`
/// is taken from the `rᵢ` proposition of `t`. `None` without one.
pub fn increment_conjuncts(mc: &MarkovChain, t: usize) -> Option<[Rat; 3]> {
    let i = (0..5).find(|&i| mc.has(t, &r(i)))?;
    let (s3, s4) = (r(i + 3), r(i + 4));
    let all = vec![true; mc.len()];
    let set = |f: &dyn Fn(usize) -> bool| -> Vec<bool> { (0..mc.len()).map(f).collect() };
    let g1 = set(&|u| mc.has(u, "a") && mc.has(u, &s3));
    let g2 = set(&|u| (mc.has(u, "b") && mc.has(u, &s4)) || mc.has(u, "d"));
    let g3 = set(&|u| (mc.has(u, "c") && mc.has(u, &s4) && mc.has(u, "e")) || mc.has(u, "d"));
    Some([
        prob_until_bounded(mc, t, &all, &g1, 2),
        prob_until_bounded(mc, t, &all, &g2, 2),
        prob_until_bounded(mc, t, &all, &g3, 2),
    ])
}
