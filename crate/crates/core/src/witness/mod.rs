//! Finite witness chains for the compiled formulae, and the relations
//! (represents, simulates, covers) tying their states to machine runs.

pub mod ids;
pub mod one_counter;
pub mod param;
pub mod pn;
pub mod premises;
pub mod product;
pub mod relations;
mod rules;

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;

use thiserror::Error;

use crate::minsky::ComputationError;
use crate::pctl::{ChainError, MarkovChain, StateSpec};
use crate::rational::Rat;

pub use ids::{Letter, Mark, Pair, Proj, WitnessStateId};
pub use one_counter::model_one_counter;
pub use param::{model_param, ParamLayout};
pub use pn::{p_n, ResidualRule, Residuals, PN};
pub use premises::{check_premises, increment_conjuncts, PremiseReport};
pub use product::model_product;
pub use relations::{covers, represents, simulates, Mode, SimulationReport};

/// Closure stops with an error beyond this many states.
pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no finite witness: the computation has no period")]
    Aperiodic,
    #[error("expected a one-counter machine, found {0} counters")]
    NotOneCounter(usize),
    #[error("p_n is only defined for n >= 1")]
    ResidualIndex,
    #[error("p_{n} = {value} is outside (0, {bound}); choose other constants")]
    ResidualOutOfRange {
        n: usize,
        value: Box<Rat>,
        bound: Box<Rat>,
    },
    #[error("pairing at {state} leaves residual {residual} < 0; choose other constants")]
    NegativeResidual { state: String, residual: Rat },
    #[error("no successor rule applies to {0}")]
    NoRule(String),
    #[error("labeled state {0} does not match the computation")]
    OffRun(String),
    #[error("more than {0} states")]
    TooManyStates(usize),
    #[error(transparent)]
    Computation(#[from] ComputationError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A constructed chain with its start state and the structured id of every
/// state (same order as the chain).
#[derive(Debug, Clone)]
pub struct Witness {
    pub chain: MarkovChain,
    pub start: usize,
    pub ids: Vec<WitnessStateId>,
}

impl Witness {
    pub fn start_id(&self) -> &str {
        self.chain.id(self.start)
    }
}

/// Least chain containing `start` and closed under `succ`, in BFS order.
/// Zero-probability edges are dropped and duplicate targets merged.
pub(crate) fn close<K, F, P>(
    start: K,
    mut succ: F,
    props: P,
    cap: usize,
) -> Result<(MarkovChain, Vec<K>), WitnessError>
where
    K: Clone + Eq + Hash + Display,
    F: FnMut(&K) -> Result<Vec<(K, Rat)>, WitnessError>,
    P: Fn(&K) -> Vec<String>,
{
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut order = vec![start.clone()];
    index.insert(start, 0);
    let mut specs = Vec::new();
    let mut next = 0;
    while next < order.len() {
        let t = order[next].clone();
        next += 1;
        let mut row: Vec<(K, Rat)> = Vec::new();
        for (u, p) in succ(&t)? {
            if p.is_zero() {
                continue;
            }
            match row.iter_mut().find(|(v, _)| *v == u) {
                Some(slot) => slot.1 += &p,
                None => row.push((u, p)),
            }
        }
        for (u, _) in &row {
            if !index.contains_key(u) {
                if order.len() >= cap {
                    return Err(WitnessError::TooManyStates(cap));
                }
                index.insert(u.clone(), order.len());
                order.push(u.clone());
            }
        }
        specs.push(StateSpec {
            id: t.to_string(),
            props: props(&t),
            trans: row.into_iter().map(|(u, p)| (u.to_string(), p)).collect(),
        });
    }
    Ok((MarkovChain::from_specs(specs)?, order))
}
