use super::ids::{Letter, Proj};
use super::pn::{ResidualRule, Residuals};
use super::rules::{Omega, Rules};
use super::{close, Witness, WitnessError, WitnessStateId, DEFAULT_STATE_CAP};
use crate::geometry::GeometryConstants;
use crate::minsky::{Computation, Machine};

/// Closure of `[0, {a, r0, ℓ1}, 0]` under the one-counter rules.
pub fn model_one_counter(
    c: &GeometryConstants,
    m: &Machine,
    w: &Computation,
    rule: ResidualRule,
) -> Result<Witness, WitnessError> {
    if m.counters() != 1 {
        return Err(WitnessError::NotOneCounter(m.counters()));
    }
    w.validate(m)?;
    let omega = Omega::new(w, 0)?;
    let mut rules = Rules::new(c, Residuals::new(c, rule));
    let start = Proj::labeled(0, Letter::A, 0, 1, 0);
    let (chain, order) = close(
        start,
        |t| rules.successors(t, &omega),
        |t| t.props(),
        DEFAULT_STATE_CAP,
    )?;
    Ok(Witness {
        chain,
        start: 0,
        ids: order.into_iter().map(WitnessStateId::OneCounter).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_constants;
    use crate::minsky::{run_with_period_detection, Strategy};
    use crate::pctl::Checker;
    use crate::rational::Rat;
    use crate::reduction::{build_psi_one_counter, CompileOptions};

    fn loop_machine() -> Machine {
        Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap()
    }

    fn witness(m: &Machine, rule: ResidualRule) -> Witness {
        let w = run_with_period_detection(m, 200, &Strategy::first());
        model_one_counter(&default_constants(), m, &w, rule).unwrap()
    }

    #[test]
    fn start_state_and_rows() {
        let w = witness(&loop_machine(), ResidualRule::default());
        assert_eq!(w.start_id(), "[0|a,r0,l1|0]");
        for s in 0..w.chain.len() {
            let sum: Rat = w.chain.row(s).iter().map(|(_, p)| p).sum();
            assert_eq!(sum, Rat::one());
            assert!(w
                .chain
                .row(s)
                .iter()
                .all(|(_, p)| p.is_positive() && *p <= Rat::one()));
        }
        assert_eq!(w.ids.len(), w.chain.len());
    }

    #[test]
    fn start_satisfies_compiled_formula() {
        let c = default_constants();
        let m = loop_machine();
        let f = build_psi_one_counter(&c, &m, CompileOptions::default());
        let w = witness(&m, ResidualRule::ParentNormalized);
        assert!(Checker::new(&w.chain).holds(&f.formula, w.start));
        let w = witness(&m, ResidualRule::Printed);
        assert!(!Checker::new(&w.chain).holds(&f.formula, w.start));
    }

    #[test]
    fn rejects_aperiodic_and_wide_machines() {
        let c = default_constants();
        let m = Machine::parse("1: inc c1 goto {1}").unwrap();
        let w = run_with_period_detection(&m, 30, &Strategy::first());
        assert_eq!(
            model_one_counter(&c, &m, &w, ResidualRule::default()).unwrap_err(),
            WitnessError::Aperiodic
        );
        let m2 = Machine::parse("1: inc c2 goto {1}").unwrap();
        assert_eq!(
            model_one_counter(&c, &m2, &w, ResidualRule::default()).unwrap_err(),
            WitnessError::NotOneCounter(2)
        );
    }
}
