//! Two-counter machine to synchronized product of one-counter machines.
//!
//! First `M` (m instructions) is extended to `M̂` with 3m instructions: label
//! `m+j` restores counter 1 (`jzdec c1 zero {1} else {j}`) and `2m+j` does the
//! same for counter 2. Each `M̂` label `ℓ` then becomes two product labels
//! `(ℓ,0)` and `(ℓ,+)`, encoded as `2ℓ−1` and `2ℓ`. The machine owning `ℓ`'s
//! counter executes the instruction; the other one increments its counter at
//! `(ℓ,0)` and decrements it at `(ℓ,+)`, so its counter is one too high
//! exactly at `+` labels.

use serde::Serialize;
use thiserror::Error;

use super::machine::{Instruction, Machine, MachineError};
use super::product::{Partition, ProductError, SyncProduct};
use super::run::Configuration;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("expected a machine with at most two counters, found {0}")]
    NotTwoCounter(usize),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// `(ℓ, 0)` ↦ `2ℓ−1`.
pub fn encode_plain(l: usize) -> usize {
    2 * l - 1
}

/// `(ℓ, +)` ↦ `2ℓ`.
pub fn encode_plus(l: usize) -> usize {
    2 * l
}

/// Inverse of the encoding: `(ℓ, pending)`.
pub fn decode(label: usize) -> (usize, bool) {
    (label.div_ceil(2), label.is_multiple_of(2))
}

#[derive(Debug, Clone, Serialize)]
pub struct Translation {
    pub source: Machine,
    /// The 3m-instruction machine with restore steps.
    pub extended: Machine,
    pub product: SyncProduct,
    pub encoding: &'static str,
}

fn extend(m: &Machine) -> Result<Machine, MachineError> {
    let n = m.len();
    let mut ins: Vec<Instruction> = m.instructions().to_vec();
    for c in 1..=2 {
        for j in 1..=n {
            ins.push(Instruction::JzDec {
                counter: c,
                zero: vec![1],
                nonzero: vec![j],
            });
        }
    }
    Machine::new(ins, 2)
}

pub fn two_counter_to_product(m: &Machine) -> Result<Translation, TranslateError> {
    if m.counters() > 2 {
        return Err(TranslateError::NotTwoCounter(m.counters()));
    }
    let n = m.len();
    let hat = extend(m)?;
    let on = |l: usize, c: usize| hat.ins(l).counter() == c;
    let mut side: [Vec<Instruction>; 2] = [Vec::new(), Vec::new()];
    let mut i1 = Vec::new();
    let mut i2 = Vec::new();
    for l in 1..=3 * n {
        let ins = hat.ins(l);
        let own = ins.counter();
        let other = 3 - own;
        // Leaving (ℓ,0) the idle counter was bumped; a target on the same
        // counter goes to its + label where the idle machine undoes the bump,
        // a target on the other counter first passes through the restore step.
        let restore = if own == 1 { 2 * n } else { n };
        let plain = ins.map(1, |u| {
            if on(u, own) {
                encode_plus(u)
            } else {
                encode_plain(restore + u)
            }
        });
        let plus = ins.map(1, encode_plain);
        side[own - 1].push(plain);
        side[own - 1].push(plus);
        side[other - 1].push(Instruction::Inc {
            counter: 1,
            goto: vec![1],
        });
        side[other - 1].push(Instruction::JzDec {
            counter: 1,
            zero: vec![1],
            nonzero: vec![1],
        });
        let owner = if own == 1 { &mut i1 } else { &mut i2 };
        owner.push(encode_plain(l));
        owner.push(encode_plus(l));
    }
    let [s1, s2] = side;
    let product = SyncProduct::new(
        Machine::new(s1, 1)?,
        Machine::new(s2, 1)?,
        Partition::new(i1, i2),
    )?;
    Ok(Translation {
        source: m.clone(),
        extended: hat,
        product,
        encoding: "(l,0) -> 2l-1, (l,+) -> 2l",
    })
}

impl Translation {
    /// Maps product configurations at original labels back to `M`'s
    /// configurations, undoing the pending increment at `+` labels.
    pub fn induced_trace(&self, product_run: &[Configuration]) -> Vec<Configuration> {
        let n = self.source.len();
        product_run
            .iter()
            .filter_map(|d| {
                let (l, pending) = decode(d.label);
                if l > n {
                    return None;
                }
                let own = self.extended.ins(l).counter();
                let mut c = d.counters.clone();
                if pending {
                    c[2 - own] -= 1;
                }
                c.truncate(self.source.counters());
                Some(Configuration::new(l, c))
            })
            .collect()
    }
}
