use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::machine::{Instruction, Machine};

/// `(label, n₁, …, n_k)`; serialized as a flat JSON array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub label: usize,
    pub counters: Vec<u64>,
}

impl Configuration {
    pub fn new(label: usize, counters: Vec<u64>) -> Configuration {
        Configuration { label, counters }
    }

    /// `(1, 0, …, 0)`.
    pub fn initial(k: usize) -> Configuration {
        Configuration::new(1, vec![0; k])
    }

    /// Counter `j`, 1-based.
    pub fn counter(&self, j: usize) -> u64 {
        self.counters[j - 1]
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for n in &self.counters {
            write!(f, ",{n}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut v = Vec::with_capacity(self.counters.len() + 1);
        v.push(self.label as u64);
        v.extend(&self.counters);
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u64>::deserialize(d)?;
        let (label, counters) = v
            .split_first()
            .ok_or_else(|| serde::de::Error::custom("empty configuration"))?;
        Ok(Configuration::new(*label as usize, counters.to_vec()))
    }
}

/// Applies one instruction to the counter at index `j` (1-based) and returns
/// the chosen label set together with the updated counters.
pub(crate) fn apply<'a>(
    ins: &'a Instruction,
    counters: &[u64],
    j: usize,
) -> (&'a [usize], Vec<u64>) {
    let mut next = counters.to_vec();
    match ins {
        Instruction::Inc { goto, .. } => {
            next[j - 1] += 1;
            (goto, next)
        }
        Instruction::JzDec { zero, nonzero, .. } => {
            if next[j - 1] == 0 {
                (zero, next)
            } else {
                next[j - 1] -= 1;
                (nonzero, next)
            }
        }
    }
}

/// The one- or two-element successor set, in target-set order.
pub fn successors(m: &Machine, c: &Configuration) -> Vec<Configuration> {
    let ins = m.ins(c.label);
    let (labels, counters) = apply(ins, &c.counters, ins.counter());
    labels
        .iter()
        .map(|&l| Configuration::new(l, counters.clone()))
        .collect()
}

/// Anything with an initial configuration and a successor relation.
pub trait Stepper {
    fn initial(&self) -> Configuration;
    fn step(&self, c: &Configuration) -> Vec<Configuration>;
}

impl Stepper for Machine {
    fn initial(&self) -> Configuration {
        Configuration::initial(self.counters())
    }

    fn step(&self, c: &Configuration) -> Vec<Configuration> {
        successors(self, c)
    }
}

/// Resolves two-element successor sets: the i-th branching step takes
/// `choices[i]`; once the list runs out every branch takes the first element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub choices: Vec<usize>,
}

impl Strategy {
    pub fn first() -> Strategy {
        Strategy::default()
    }

    pub fn new(choices: Vec<usize>) -> Strategy {
        Strategy { choices }
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// `first`, or a comma-separated list of 0/1 indices such as `1,0,1`.
    fn from_str(s: &str) -> Result<Strategy, String> {
        let s = s.trim();
        if s.is_empty() || s == "first" {
            return Ok(Strategy::first());
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad strategy choice {x:?}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Strategy::new)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComputationError {
    #[error("position {pos}: {to} is not a successor of {from}")]
    NotAStep {
        pos: usize,
        from: Configuration,
        to: Configuration,
    },
    #[error("computation does not start at the initial configuration")]
    BadStart,
    #[error("period ({alpha},{beta}) is not 1 <= alpha < beta <= prefix length")]
    BadPeriod { alpha: usize, beta: usize },
    #[error("configurations at {a} and {b} differ")]
    SuffixMismatch { a: usize, b: usize },
    #[error("invalid computation JSON: {0}")]
    Json(String),
}

/// A finite prefix `C₀ … C_{N-1}`, and optionally a period `(α, β)` meaning
/// the sequences from `C_{α−1}` and from `C_{β−1}` coincide. The stored prefix
/// always ends at `C_{β−1}` when a period is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Computation {
    pub configurations: Vec<Configuration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
}

impl Computation {
    pub fn period(&self) -> Option<(usize, usize)> {
        self.alpha.zip(self.beta)
    }

    pub fn is_periodic(&self) -> bool {
        self.period().is_some()
    }

    pub fn prefix(&self) -> &[Configuration] {
        &self.configurations
    }

    /// `C_p`, unrolling the period when present; `None` past a non-periodic prefix.
    pub fn at(&self, p: usize) -> Option<&Configuration> {
        if p < self.configurations.len() {
            return self.configurations.get(p);
        }
        let (a, b) = self.period()?;
        let lo = a - 1;
        let len = b - a;
        self.configurations.get(lo + (p - lo) % len)
    }

    /// Positions `0..n` of the unrolled computation.
    pub fn unroll(&self, n: usize) -> Vec<Configuration> {
        (0..n).map_while(|p| self.at(p).cloned()).collect()
    }

    /// Whether `label` occurs infinitely often, i.e. inside the period.
    /// `false` for a non-periodic prefix.
    pub fn recurs(&self, label: usize) -> bool {
        match self.period() {
            Some((a, b)) => self.configurations[a - 1..b - 1]
                .iter()
                .any(|c| c.label == label),
            None => false,
        }
    }

    pub fn max_counter(&self) -> u64 {
        self.configurations
            .iter()
            .flat_map(|c| c.counters.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Replays every step and the period wrap-around against `m`.
    pub fn validate(&self, m: &dyn Stepper) -> Result<(), ComputationError> {
        let cs = &self.configurations;
        if cs.first() != Some(&m.initial()) {
            return Err(ComputationError::BadStart);
        }
        for (pos, w) in cs.windows(2).enumerate() {
            if !m.step(&w[0]).contains(&w[1]) {
                return Err(ComputationError::NotAStep {
                    pos: pos + 1,
                    from: w[0].clone(),
                    to: w[1].clone(),
                });
            }
        }
        if let Some((a, b)) = self.period() {
            if a == 0 || a >= b || b > cs.len() {
                return Err(ComputationError::BadPeriod { alpha: a, beta: b });
            }
            // Equal configurations at α−1 and β−1; the stored step
            // C_{α−1} → C_α is then also a valid step out of C_{β−1}.
            if cs[a - 1] != cs[b - 1] {
                return Err(ComputationError::SuffixMismatch { a: a - 1, b: b - 1 });
            }
            if a < cs.len() && !m.step(&cs[b - 1]).contains(&cs[a]) {
                return Err(ComputationError::NotAStep {
                    pos: b,
                    from: cs[b - 1].clone(),
                    to: cs[a].clone(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("computation serializes")
    }

    pub fn from_json(text: &str) -> Result<Computation, ComputationError> {
        serde_json::from_str(text).map_err(|e| ComputationError::Json(e.to_string()))
    }
}

/// Runs from the initial configuration for at most `max_steps` steps.
///
/// The run state is the configuration together with how many strategy choices
/// were consumed. A revisit of that pair means no new choice was consumed in
/// between, so the run repeats forever; with `C_i = C_j` (`i < j`) the result
/// has `α = i+1`, `β = j+1` and stores `C₀ … C_j`.
pub fn run_with_period_detection(
    m: &dyn Stepper,
    max_steps: usize,
    strategy: &Strategy,
) -> Computation {
    let mut cur = m.initial();
    let mut used = 0usize;
    let mut seen: HashMap<(Configuration, usize), usize> = HashMap::new();
    let mut configurations = Vec::new();
    for pos in 0..=max_steps {
        if let Some(&i) = seen.get(&(cur.clone(), used)) {
            configurations.push(cur);
            return Computation {
                configurations,
                alpha: Some(i + 1),
                beta: Some(pos + 1),
            };
        }
        seen.insert((cur.clone(), used), pos);
        configurations.push(cur.clone());
        if pos == max_steps {
            break;
        }
        let mut succ = m.step(&cur);
        let pick = if succ.len() > 1 {
            let c = strategy.choices.get(used).copied().unwrap_or(0);
            used = (used + 1).min(strategy.choices.len());
            c.min(succ.len() - 1)
        } else {
            0
        };
        cur = succ.swap_remove(pick);
    }
    Computation {
        configurations,
        alpha: None,
        beta: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> Machine {
        Machine::parse(text).unwrap()
    }

    #[test]
    fn recurrence_inside_period() {
        // 1 → 2 → 3 → 2 → …: label 1 only in the prefix.
        let mm = m("1: inc c1 goto {2}\n2: inc c1 goto {3}\n3: jzdec c1 zero {2} else {2}");
        let w = run_with_period_detection(&mm, 50, &Strategy::first());
        assert!(w.is_periodic());
        assert!(!w.recurs(1));
        assert!(w.recurs(2) && w.recurs(3));
        let back = m("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}");
        assert!(run_with_period_detection(&back, 50, &Strategy::first()).recurs(1));
    }

    #[test]
    fn successor_examples() {
        let mm = m("1: inc c1 goto {2,3}\n2: jzdec c1 zero {1} else {2}\n3: inc c1 goto {3}");
        let s = successors(&mm, &Configuration::new(1, vec![0]));
        assert_eq!(
            s,
            vec![
                Configuration::new(2, vec![1]),
                Configuration::new(3, vec![1])
            ]
        );
        assert_eq!(
            successors(&mm, &Configuration::new(2, vec![0])),
            vec![Configuration::new(1, vec![0])]
        );
        assert_eq!(
            successors(&mm, &Configuration::new(2, vec![5])),
            vec![Configuration::new(2, vec![4])]
        );
    }

    #[test]
    fn inc_dec_loop_is_periodic() {
        let mm = m("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}");
        let w = run_with_period_detection(&mm, 100, &Strategy::first());
        assert_eq!(w.period(), Some((1, 3)));
        assert_eq!(w.configurations.len(), 3);
        assert_eq!(
            w.configurations,
            vec![
                Configuration::new(1, vec![0]),
                Configuration::new(2, vec![1]),
                Configuration::new(1, vec![0]),
            ]
        );
        assert_eq!(w.at(3), Some(&Configuration::new(2, vec![1])));
        assert_eq!(w.at(4), Some(&Configuration::new(1, vec![0])));
        w.validate(&mm).unwrap();
    }

    #[test]
    fn counting_machine_never_repeats() {
        let mm = m("1: inc c1 goto {1}");
        let w = run_with_period_detection(&mm, 500, &Strategy::first());
        assert!(!w.is_periodic());
        assert_eq!(w.configurations.len(), 501);
        assert_eq!(w.at(501), None);
        w.validate(&mm).unwrap();
    }

    #[test]
    fn strategy_choices_are_consumed_in_order() {
        let mm = m("1: inc c1 goto {1,2}\n2: jzdec c1 zero {2} else {2}");
        let w = run_with_period_detection(&mm, 50, &"0,0,1".parse().unwrap());
        assert_eq!(w.configurations[3], Configuration::new(2, vec![3]));
        assert_eq!(w.max_counter(), 3);
        assert!(w.is_periodic());
        w.validate(&mm).unwrap();
    }

    #[test]
    fn validation_catches_tampering() {
        let mm = m("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}");
        let mut w = run_with_period_detection(&mm, 100, &Strategy::first());
        w.alpha = Some(2);
        assert!(w.validate(&mm).is_err());
        let mut w = run_with_period_detection(&mm, 100, &Strategy::first());
        w.configurations[1] = Configuration::new(2, vec![7]);
        assert!(matches!(
            w.validate(&mm),
            Err(ComputationError::NotAStep { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let mm = m("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}");
        let w = run_with_period_detection(&mm, 100, &Strategy::first());
        let text = w.to_json();
        assert!(text.contains("\"alpha\": 1"));
        assert_eq!(Computation::from_json(&text).unwrap(), w);
        assert!(Computation::from_json("[]").is_err());
    }
}
