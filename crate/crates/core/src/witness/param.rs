//! The counting chain for `ψ[σⁿ(κ)₁, σⁿ(κ)₂]`: a descending ladder
//! `t_n → … → t₀` where `tᵢ` has characteristic vector `σⁱ(κ)`.

use serde::{Deserialize, Serialize};

use super::{Witness, WitnessError, WitnessStateId};
use crate::geometry::GeometryConstants;
use crate::pctl::{MarkovChain, StateSpec};
use crate::rational::Rat;
use crate::reduction::r;

/// How the bottom of the ladder is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamLayout {
    /// `t₀ = {a, r}` is a final state with its own free successors
    /// `fa`, `fb`, `fc`; `3n+4` states.
    #[default]
    Closed,
    /// `t₀ = {h, a, r}` with a self-loop; `3n+1` states. `t₁` then has an
    /// `a`-successor carrying `h` and `t₀` violates the initial-state shape
    /// at `n = 0`, so the start never satisfies the formula.
    Printed,
}

impl ParamLayout {
    pub fn state_count(self, n: usize) -> usize {
        match self {
            ParamLayout::Closed => 3 * n + 4,
            ParamLayout::Printed => 3 * n + 1,
        }
    }
}

fn spec(id: &str, props: &[String], trans: Vec<(String, Rat)>) -> StateSpec {
    StateSpec {
        id: id.to_string(),
        props: props.to_vec(),
        trans,
    }
}

fn looping(id: &str, props: &[String]) -> StateSpec {
    spec(id, props, vec![(id.to_string(), Rat::one())])
}

fn p(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn model_param(
    c: &GeometryConstants,
    n: usize,
    layout: ParamLayout,
) -> Result<Witness, WitnessError> {
    // tᵢ carries r_{(n−i) mod 5}, so the start t_n carries r0.
    let ri = |i: usize| (n - i) % 5;
    let mut specs = Vec::with_capacity(layout.state_count(n));
    let mut ids = Vec::with_capacity(layout.state_count(n));
    let mut push = |s: StateSpec| {
        ids.push(WitnessStateId::Param(s.id.clone()));
        specs.push(s);
    };
    for i in (1..=n).rev() {
        let v = c.sigma_n(i);
        let k = ri(i);
        let rest = Rat::one() - &v.x1 - &v.x2;
        let (b, cc) = (format!("b{}", i - 1), format!("c{}", i - 1));
        push(spec(
            &format!("t{i}"),
            &p(&["a", &r(k)]),
            vec![
                (format!("t{}", i - 1), v.x1),
                (b.clone(), v.x2),
                (cc.clone(), rest),
            ],
        ));
        push(looping(&b, &p(&["h", "b", &r(k + 2)])));
        push(looping(&cc, &p(&["h", "c", &r(k + 2)])));
    }
    let k = ri(0);
    match layout {
        ParamLayout::Printed => push(looping("t0", &p(&["h", "a", &r(k)]))),
        ParamLayout::Closed => {
            let rest = Rat::one() - &c.kappa.x1 - &c.kappa.x2;
            push(spec(
                "t0",
                &p(&["a", &r(k)]),
                vec![
                    ("fa".into(), c.kappa.x1.clone()),
                    ("fb".into(), c.kappa.x2.clone()),
                    ("fc".into(), rest),
                ],
            ));
            push(looping("fa", &p(&["h", "a", &r(k + 1)])));
            push(looping("fb", &p(&["h", "b", &r(k + 2)])));
            push(looping("fc", &p(&["h", "c", &r(k + 2)])));
        }
    }
    let chain = MarkovChain::from_specs(specs)?;
    let start = chain.index_of(&format!("t{n}"))?;
    Ok(Witness { chain, start, ids })
}
