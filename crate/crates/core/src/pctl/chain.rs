use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("duplicate state id {0:?}")]
    DuplicateState(String),
    #[error("state {from:?} has a transition to undeclared state {to:?}")]
    UnknownTarget { from: String, to: String },
    #[error("state {from:?} lists target {to:?} twice")]
    DuplicateTarget { from: String, to: String },
    #[error("state {from:?} has non-positive probability {p} to {to:?}")]
    NonPositive { from: String, to: String, p: Rat },
    #[error("row of state {state:?} sums to {sum}, not 1")]
    NotStochastic { state: String, sum: Rat },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("chain has no states")]
    Empty,
    #[error("invalid chain JSON: {0}")]
    Json(String),
}

/// Finite Markov chain with rational transition rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovChain {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    props: Vec<BTreeSet<String>>,
    trans: Vec<Vec<(usize, Rat)>>,
    preds: Vec<Vec<usize>>,
}

/// Unvalidated state record, the unit of the JSON format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpec {
    pub id: String,
    #[serde(default)]
    pub props: Vec<String>,
    pub trans: Vec<(String, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub states: Vec<StateSpec>,
}

impl MarkovChain {
    /// Validates stochasticity, targets and ids. State order is kept.
    pub fn from_specs(specs: Vec<StateSpec>) -> Result<MarkovChain, ChainError> {
        if specs.is_empty() {
            return Err(ChainError::Empty);
        }
        let mut index = HashMap::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(ChainError::DuplicateState(s.id.clone()));
            }
        }
        let mut ids = Vec::with_capacity(specs.len());
        let mut props = Vec::with_capacity(specs.len());
        let mut trans = Vec::with_capacity(specs.len());
        let mut preds = vec![Vec::new(); specs.len()];
        for (i, s) in specs.into_iter().enumerate() {
            let mut row = Vec::with_capacity(s.trans.len());
            let mut seen = BTreeSet::new();
            let mut sum = Rat::zero();
            for (to, p) in s.trans {
                let Some(&j) = index.get(&to) else {
                    return Err(ChainError::UnknownTarget { from: s.id, to });
                };
                if !seen.insert(j) {
                    return Err(ChainError::DuplicateTarget { from: s.id, to });
                }
                if !p.is_positive() {
                    return Err(ChainError::NonPositive { from: s.id, to, p });
                }
                sum += &p;
                row.push((j, p));
                preds[j].push(i);
            }
            if !sum.is_one() {
                return Err(ChainError::NotStochastic { state: s.id, sum });
            }
            ids.push(s.id);
            props.push(s.props.into_iter().collect());
            trans.push(row);
        }
        Ok(MarkovChain {
            ids,
            index,
            props,
            trans,
            preds,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, s: usize) -> &str {
        &self.ids[s]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ChainError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ChainError::UnknownState(id.to_string()))
    }

    pub fn props(&self, s: usize) -> &BTreeSet<String> {
        &self.props[s]
    }

    pub fn has(&self, s: usize, prop: &str) -> bool {
        self.props[s].contains(prop)
    }

    pub fn row(&self, s: usize) -> &[(usize, Rat)] {
        &self.trans[s]
    }

    pub fn predecessors(&self, s: usize) -> &[usize] {
        &self.preds[s]
    }

    pub fn prob(&self, s: usize, t: usize) -> Rat {
        self.trans[s]
            .iter()
            .find(|(u, _)| *u == t)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Every proposition used by some state, sorted.
    pub fn universe(&self) -> BTreeSet<String> {
        self.props.iter().flatten().cloned().collect()
    }

    /// States reachable from `start` (including it), in BFS order.
    pub fn reachable(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for (t, _) in &self.trans[s] {
                if !seen[*t] {
                    seen[*t] = true;
                    order.push(*t);
                }
            }
            i += 1;
        }
        order
    }

    pub fn to_spec(&self) -> ChainSpec {
        ChainSpec {
            states: (0..self.len())
                .map(|s| StateSpec {
                    id: self.ids[s].clone(),
                    props: self.props[s].iter().cloned().collect(),
                    trans: self.trans[s]
                        .iter()
                        .map(|(t, p)| (self.ids[*t].clone(), p.clone()))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("chain serializes")
    }

    pub fn from_json(text: &str) -> Result<MarkovChain, ChainError> {
        let spec: ChainSpec =
            serde_json::from_str(text).map_err(|e| ChainError::Json(e.to_string()))?;
        MarkovChain::from_specs(spec.states)
    }

    /// Graphviz rendering with proposition labels and exact edge weights.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph chain {\n  node [shape=box];\n");
        for s in 0..self.len() {
            let props: Vec<&str> = self.props[s].iter().map(String::as_str).collect();
            out.push_str(&format!(
                "  s{s} [label=\"{}\\n{{{}}}\"];\n",
                escape(&self.ids[s]),
                escape(&props.join(","))
            ));
        }
        for s in 0..self.len() {
            for (t, p) in &self.trans[s] {
                out.push_str(&format!("  s{s} -> s{t} [label=\"{p}\"];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Convenience builder used by tests and witness constructors.
#[derive(Debug, Default, Clone)]
pub struct ChainBuilder {
    specs: Vec<StateSpec>,
}

impl ChainBuilder {
    pub fn new() -> ChainBuilder {
        ChainBuilder::default()
    }

    pub fn state<S: AsRef<str>>(
        mut self,
        id: &str,
        props: &[S],
        trans: &[(&str, Rat)],
    ) -> ChainBuilder {
        self.specs.push(StateSpec {
            id: id.to_string(),
            props: props.iter().map(|p| p.as_ref().to_string()).collect(),
            trans: trans
                .iter()
                .map(|(t, p)| (t.to_string(), p.clone()))
                .collect(),
        });
        self
    }

    pub fn push(&mut self, spec: StateSpec) {
        self.specs.push(spec);
    }

    pub fn build(self) -> Result<MarkovChain, ChainError> {
        MarkovChain::from_specs(self.specs)
    }
}
