use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::WitnessError;
use crate::geometry::{GeometryConstants, Vec2};
use crate::minsky::{Computation, Configuration, Stepper};
use crate::pctl::{characteristic_vector, Checker, Interner, MarkovChain};
use crate::reduction::{l, tag_name};

/// One-counter chains use untagged propositions, product chains tag each
/// side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    OneCounter,
    Product,
}

impl Mode {
    fn sides(self) -> &'static [Option<usize>] {
        match self {
            Mode::OneCounter => &[None],
            Mode::Product => &[Some(1), Some(2)],
        }
    }
}

fn name(base: &str, side: Option<usize>) -> String {
    side.map_or_else(|| base.to_string(), |k| tag_name(base, k))
}

/// Label indices `j` of the `ℓⱼ` propositions true at `t` on one side.
fn labels_at(mc: &MarkovChain, t: usize, side: Option<usize>) -> Vec<usize> {
    mc.props(t)
        .iter()
        .filter_map(|p| {
            let rest = p.strip_prefix('l')?;
            let digits = match side {
                None => rest,
                Some(k) => rest.strip_suffix(&format!("_{k}"))?,
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            digits.parse().ok()
        })
        .collect()
}

fn vector(mc: &MarkovChain, t: usize, side: Option<usize>) -> Vec2 {
    characteristic_vector(mc, t, &name("a", side), &name("b", side))
}

/// Exactly one label proposition per side, equal to the configuration's
/// label, and characteristic vectors `σⁿ(κ)` for each counter `n`.
pub fn represents(
    c: &GeometryConstants,
    mc: &MarkovChain,
    t: usize,
    config: &Configuration,
    mode: Mode,
) -> bool {
    let sides = mode.sides();
    if config.counters.len() != sides.len() {
        return false;
    }
    sides.iter().zip(&config.counters).all(|(&side, &n)| {
        labels_at(mc, t, side) == [config.label] && vector(mc, t, side) == c.sigma_n(n as usize)
    })
}

/// Memoized `σⁿ(κ)` lookup by value.
struct Ladder<'a> {
    c: &'a GeometryConstants,
    rungs: Vec<Vec2>,
}

impl Ladder<'_> {
    /// `n` with `σⁿ(κ) = v`. The second component strictly decreases along
    /// the ladder, so the search stops once it drops below `v₂`.
    fn find(&mut self, v: &Vec2) -> Option<u64> {
        let mut n = 0;
        loop {
            if n == self.rungs.len() {
                let next = self.c.sigma(&self.rungs[n - 1]).ok()?;
                self.rungs.push(next);
            }
            let r = &self.rungs[n];
            if r == v {
                return Some(n as u64);
            }
            if r.x2 < v.x2 {
                return None;
            }
            n += 1;
        }
    }
}

/// The configuration `t` represents, if any.
fn decode(mc: &MarkovChain, t: usize, mode: Mode, ladder: &mut Ladder) -> Option<Configuration> {
    let mut label = None;
    let mut counters = Vec::new();
    for &side in mode.sides() {
        let ls = labels_at(mc, t, side);
        let [j] = ls[..] else { return None };
        if label.is_some_and(|x| x != j) {
            return None;
        }
        label = Some(j);
        counters.push(ladder.find(&vector(mc, t, side))?);
    }
    Some(Configuration::new(label?, counters))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub reachable: usize,
    pub representing: usize,
    pub violations: Vec<String>,
}

impl SimulationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every reachable state representing a configuration has a
/// successor representing a successor configuration, and that every other
/// successor can never again reach a (jointly) labeled state.
pub fn simulates(
    c: &GeometryConstants,
    mc: &MarkovChain,
    s: usize,
    machine: &dyn Stepper,
    mode: Mode,
    max_states: usize,
) -> Result<SimulationReport, WitnessError> {
    let reach = mc.reachable(s);
    if reach.len() > max_states {
        return Err(WitnessError::TooManyStates(max_states));
    }
    let labels: BTreeSet<usize> = (0..mc.len())
        .flat_map(|t| mode.sides().iter().flat_map(move |&k| labels_at(mc, t, k)))
        .collect();
    let mut ix = Interner::new();
    let lits: Vec<_> = labels
        .iter()
        .map(|&j| {
            let parts: Vec<_> = mode
                .sides()
                .iter()
                .map(|&k| ix.atom(&name(&l(j), k)))
                .collect();
            let both = ix.and_all(parts);
            ix.not(both)
        })
        .collect();
    let none = ix.and_all(lits);
    let never = ix.always(none);
    let safe = Checker::new(mc).sat(&never);

    let mut ladder = Ladder {
        c,
        rungs: vec![c.kappa.clone()],
    };
    let mut report = SimulationReport {
        reachable: reach.len(),
        ..Default::default()
    };
    for &t in &reach {
        let Some(cfg) = decode(mc, t, mode, &mut ladder) else {
            continue;
        };
        report.representing += 1;
        let next = machine.step(&cfg);
        let mut found = false;
        for (u, _) in mc.row(t) {
            if next.iter().any(|d| represents(c, mc, *u, d, mode)) {
                found = true;
            } else if !safe[*u] {
                report.violations.push(format!(
                    "{} (representing {cfg}): successor {} neither represents a successor configuration nor avoids labels",
                    mc.id(t),
                    mc.id(*u)
                ));
            }
        }
        if !found {
            report.violations.push(format!(
                "{} (representing {cfg}): no successor represents a successor configuration",
                mc.id(t)
            ));
        }
    }
    Ok(report)
}

/// Whether some run from `s` represents `ω₀ … ω_{steps−1}` in order.
pub fn covers(
    c: &GeometryConstants,
    mc: &MarkovChain,
    s: usize,
    w: &Computation,
    steps: usize,
    mode: Mode,
) -> bool {
    if steps == 0 {
        return true;
    }
    let Some(first) = w.at(0) else { return false };
    if !represents(c, mc, s, first, mode) {
        return false;
    }
    let mut frontier: BTreeSet<usize> = [s].into();
    for p in 1..steps {
        let Some(cfg) = w.at(p) else { return false };
        frontier = frontier
            .iter()
            .flat_map(|&t| mc.row(t).iter().map(|(u, _)| *u))
            .filter(|&u| represents(c, mc, u, cfg, mode))
            .collect();
        if frontier.is_empty() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_constants;
    use crate::minsky::{run_with_period_detection, Machine, Partition, Strategy, SyncProduct};
    use crate::pctl::StateSpec;
    use crate::rational::Rat;
    use crate::witness::{model_one_counter, model_product, ResidualRule};

    fn loop_machine() -> Machine {
        Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap()
    }

    #[test]
    fn label_parsing() {
        let mc = MarkovChain::from_specs(vec![StateSpec {
            id: "x".into(),
            props: vec!["l12".into(), "l3_2".into(), "la".into(), "l".into()],
            trans: vec![("x".into(), Rat::one())],
        }])
        .unwrap();
        assert_eq!(labels_at(&mc, 0, None), vec![12]);
        assert_eq!(labels_at(&mc, 0, Some(2)), vec![3]);
        assert!(labels_at(&mc, 0, Some(1)).is_empty());
    }

    #[test]
    fn one_counter_relations() {
        let c = default_constants();
        let m = loop_machine();
        let w = run_with_period_detection(&m, 100, &Strategy::first());
        let wit = model_one_counter(&c, &m, &w, ResidualRule::default()).unwrap();
        let mc = &wit.chain;
        assert!(represents(
            &c,
            mc,
            wit.start,
            &Configuration::new(1, vec![0]),
            Mode::OneCounter
        ));
        assert!(!represents(
            &c,
            mc,
            wit.start,
            &Configuration::new(1, vec![1]),
            Mode::OneCounter
        ));
        let free = mc.index_of("[*|h,a,r1|*]").unwrap();
        assert!(!represents(
            &c,
            mc,
            free,
            &Configuration::new(1, vec![0]),
            Mode::OneCounter
        ));
        let rep = simulates(&c, mc, wit.start, &m, Mode::OneCounter, 10_000).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
        assert!(rep.representing >= 2);
        assert!(covers(&c, mc, wit.start, &w, 50, Mode::OneCounter));
        let other = Computation {
            configurations: vec![
                Configuration::new(1, vec![0]),
                Configuration::new(1, vec![1]),
            ],
            alpha: None,
            beta: None,
        };
        assert!(!covers(&c, mc, wit.start, &other, 2, Mode::OneCounter));
    }

    #[test]
    fn broken_label_is_reported() {
        let c = default_constants();
        let m = loop_machine();
        let w = run_with_period_detection(&m, 100, &Strategy::first());
        let wit = model_one_counter(&c, &m, &w, ResidualRule::default()).unwrap();
        let mut spec = wit.chain.to_spec();
        // Relabel the first successor of the start as ℓ1 instead of ℓ2.
        for s in &mut spec.states {
            if s.id == "[1|b,r2,l2|1]" {
                s.props = vec!["b".into(), "r2".into(), "l1".into()];
            }
        }
        let mc = MarkovChain::from_specs(spec.states).unwrap();
        let rep = simulates(&c, &mc, 0, &m, Mode::OneCounter, 10_000).unwrap();
        assert!(!rep.pass());
        assert!(
            rep.violations[0].starts_with("[0|a,r0,l1|0]"),
            "{:?}",
            rep.violations
        );
        assert_eq!(
            simulates(&c, &mc, 0, &m, Mode::OneCounter, 3).unwrap_err(),
            WitnessError::TooManyStates(3)
        );
    }

    #[test]
    fn product_relations() {
        let c = default_constants();
        let m1 = loop_machine();
        let m2 = Machine::parse("1: jzdec c1 zero {2} else {2}\n2: inc c1 goto {1}").unwrap();
        let p = SyncProduct::new(m1, m2, Partition::new([1], [2])).unwrap();
        let w = run_with_period_detection(&p, 100, &Strategy::first());
        let wit = model_product(&c, &p, &w, ResidualRule::default()).unwrap();
        let mc = &wit.chain;
        assert!(represents(
            &c,
            mc,
            wit.start,
            &Configuration::new(1, vec![0, 0]),
            Mode::Product
        ));
        let rep = simulates(&c, mc, wit.start, &p, Mode::Product, 100_000).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
        assert!(covers(&c, mc, wit.start, &w, 50, Mode::Product));
    }
}
