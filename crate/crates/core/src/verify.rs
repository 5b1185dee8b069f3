//! End-to-end pipelines: compile, build the witness, model check it, and run
//! the relation and equation checks on the result.

use std::collections::HashSet;

use serde::Serialize;

use crate::geometry::GeometryConstants;
use crate::minsky::{run_with_period_detection, Machine, Strategy, SyncProduct};
use crate::par::ExecMode;
use crate::pctl::{characteristic_vector, Checker};
use crate::reduction::{
    build_Psi_product, build_psi_one_counter, build_psi_parameterized, l, recurrence_extension,
    CompileOptions, CompiledFormula, Family,
};
use crate::witness::{
    check_premises, covers, increment_conjuncts, model_one_counter, model_param, model_product,
    simulates, Mode, ParamLayout, ResidualRule, Witness, WitnessError,
};

pub const NO_FINITE_WITNESS: &str = "no finite witness; formula compiled only";

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub compile: CompileOptions,
    pub layout: ParamLayout,
    pub residual: ResidualRule,
    pub strategy: Strategy,
    pub max_steps: usize,
    pub cover_steps: usize,
    pub recurrence: bool,
    pub max_states: usize,
    pub mode: ExecMode,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            compile: CompileOptions::default(),
            layout: ParamLayout::default(),
            residual: ResidualRule::default(),
            strategy: Strategy::first(),
            max_steps: 1000,
            cover_steps: 50,
            recurrence: false,
            max_states: 200_000,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub family: Family,
    pub formula_dag_size: usize,
    pub lint_pass: bool,
    pub states: Option<usize>,
    pub start: Option<String>,
    pub sat: Option<bool>,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl VerifyReport {
    fn new(f: &CompiledFormula) -> VerifyReport {
        VerifyReport {
            family: f.family,
            formula_dag_size: f.formula.dag_size(),
            lint_pass: f.lint().pass,
            states: None,
            start: None,
            sat: None,
            checks: Vec::new(),
            note: None,
        }
    }

    /// A witness was built, the start satisfies the formula and every check
    /// passed.
    pub fn pass(&self) -> bool {
        self.sat == Some(true) && self.lint_pass && self.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    fn witness(&mut self, w: &Witness, f: &CompiledFormula, mode: ExecMode) {
        self.states = Some(w.chain.len());
        self.start = Some(w.start_id().to_string());
        self.sat = Some(Checker::with_mode(&w.chain, mode).holds(&f.formula, w.start));
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} {:?}\n", self.family));
        if let Some(n) = self.states {
            out.push_str(&format!("  states: {n}\n"));
        }
        if let (Some(s), Some(sat)) = (&self.start, self.sat) {
            out.push_str(&format!(
                "  start {s}: {}\n",
                if sat { "SAT" } else { "UNSAT" }
            ));
        }
        out.push_str(&format!(
            "  formula: dag size {}, fragment lint {}\n",
            self.formula_dag_size,
            if self.lint_pass { "pass" } else { "fail" }
        ));
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{mark}] {}: {}\n", c.name, c.detail));
        }
        if let Some(n) = &self.note {
            out.push_str(&format!("  {n}\n"));
        }
        out
    }
}

fn premises(rep: &mut VerifyReport, c: &GeometryConstants, w: &Witness, mode: Mode, depth: usize) {
    let p = check_premises(c, &w.chain, mode, depth);
    let failures =
        p.eq1_failures.len() + p.eq2_failures.len() + p.tau_failures.len() + p.off_ladder.len();
    rep.check(
        "vector equations",
        p.pass(),
        format!("{} states checked, {failures} failures", p.checked),
    );
}

/// Ladder witness for `ψ[σⁿ(κ)₁, σⁿ(κ)₂]`.
pub fn verify_param(
    c: &GeometryConstants,
    n: usize,
    opts: &VerifyOptions,
) -> Result<VerifyReport, WitnessError> {
    let (f, _, _) = build_psi_parameterized(c, n, opts.compile);
    let mut rep = VerifyReport::new(&f);
    let w = model_param(c, n, opts.layout)?;
    rep.witness(&w, &f, opts.mode);
    let expected = opts.layout.state_count(n);
    rep.check(
        "state count",
        w.chain.len() == expected,
        format!(
            "{} states, layout {:?} expects {expected}",
            w.chain.len(),
            opts.layout
        ),
    );
    let mut seen = HashSet::new();
    let mut on_ladder = true;
    let mut distinct = true;
    for i in 0..=n {
        let t = w.chain.index_of(&format!("t{i}"))?;
        let v = characteristic_vector(&w.chain, t, "a", "b");
        on_ladder &= v == c.sigma_n(i);
        distinct &= seen.insert(v);
    }
    rep.check(
        "t_i vectors equal sigma^i(kappa)",
        on_ladder,
        format!("i = 0..{n}"),
    );
    rep.check(
        "t_i vectors pairwise distinct",
        distinct,
        format!("{} vectors", n + 1),
    );
    premises(&mut rep, c, &w, Mode::OneCounter, n + 2);
    Ok(rep)
}

pub fn verify_one_counter(
    c: &GeometryConstants,
    m: &Machine,
    opts: &VerifyOptions,
) -> Result<VerifyReport, WitnessError> {
    let f = build_psi_one_counter(c, m, opts.compile);
    let mut rep = VerifyReport::new(&f);
    let run = run_with_period_detection(m, opts.max_steps, &opts.strategy);
    if !run.is_periodic() {
        rep.note = Some(NO_FINITE_WITNESS.to_string());
        return Ok(rep);
    }
    let w = model_one_counter(c, m, &run, opts.residual)?;
    rep.witness(&w, &f, opts.mode);
    let sim = simulates(c, &w.chain, w.start, m, Mode::OneCounter, opts.max_states)?;
    rep.check(
        "simulates",
        sim.pass(),
        format!(
            "{} representing states, {} violations",
            sim.representing,
            sim.violations.len()
        ),
    );
    let cov = covers(
        c,
        &w.chain,
        w.start,
        &run,
        opts.cover_steps,
        Mode::OneCounter,
    );
    rep.check("covers", cov, format!("{} steps", opts.cover_steps));
    premises(
        &mut rep,
        c,
        &w,
        Mode::OneCounter,
        run.max_counter() as usize + 2,
    );
    let want = [c.one_minus_q(), c.gamma.clone(), c.gamma.clone()];
    let mut incs = 0;
    let mut bad = Vec::new();
    for t in 0..w.chain.len() {
        let inc = (1..=m.len()).any(|j| w.chain.has(t, &l(j)) && m.ins(j).is_inc());
        if inc {
            incs += 1;
            if increment_conjuncts(&w.chain, t).as_ref() != Some(&want) {
                bad.push(w.chain.id(t).to_string());
            }
        }
    }
    rep.check(
        "increment F2 probabilities (1-q, gamma, gamma)",
        bad.is_empty(),
        format!("{incs} increment states, mismatches: {bad:?}"),
    );
    Ok(rep)
}

pub fn verify_product(
    c: &GeometryConstants,
    p: &SyncProduct,
    opts: &VerifyOptions,
) -> Result<VerifyReport, WitnessError> {
    let f = build_Psi_product(c, p, opts.compile);
    let mut rep = VerifyReport::new(&f);
    let run = run_with_period_detection(p, opts.max_steps, &opts.strategy);
    if !run.is_periodic() {
        rep.note = Some(NO_FINITE_WITNESS.to_string());
        return Ok(rep);
    }
    let w = model_product(c, p, &run, opts.residual)?;
    rep.witness(&w, &f, opts.mode);
    let sim = simulates(c, &w.chain, w.start, p, Mode::Product, opts.max_states)?;
    rep.check(
        "simulates",
        sim.pass(),
        format!(
            "{} representing states, {} violations",
            sim.representing,
            sim.violations.len()
        ),
    );
    let cov = covers(c, &w.chain, w.start, &run, opts.cover_steps, Mode::Product);
    rep.check("covers", cov, format!("{} steps", opts.cover_steps));
    premises(
        &mut rep,
        c,
        &w,
        Mode::Product,
        run.max_counter() as usize + 2,
    );
    if opts.recurrence {
        let rec = recurrence_extension(&f);
        let sat = Checker::with_mode(&w.chain, opts.mode).holds(&rec.formula, w.start);
        let recurs = run.recurs(1);
        rep.check(
            "recurrence SAT iff l1 recurs",
            sat == recurs,
            format!(
                "recurrence formula {}, l1 recurs: {recurs}",
                if sat { "SAT" } else { "UNSAT" }
            ),
        );
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_constants;
    use crate::minsky::Partition;

    #[test]
    fn param_pipeline() {
        let c = default_constants();
        let rep = verify_param(&c, 5, &VerifyOptions::default()).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        assert_eq!(rep.states, Some(19));
        assert_eq!(rep.start.as_deref(), Some("t5"));
        let printed = VerifyOptions {
            layout: ParamLayout::Printed,
            ..Default::default()
        };
        let rep = verify_param(&c, 5, &printed).unwrap();
        assert_eq!(rep.states, Some(16));
        assert_eq!(rep.sat, Some(false));
        assert!(!rep.pass());
    }

    #[test]
    fn one_counter_pipeline() {
        let c = default_constants();
        let m = Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap();
        let rep = verify_one_counter(&c, &m, &VerifyOptions::default()).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        let up = Machine::parse("1: inc c1 goto {1}").unwrap();
        let opts = VerifyOptions {
            max_steps: 40,
            ..Default::default()
        };
        let rep = verify_one_counter(&c, &up, &opts).unwrap();
        assert!(!rep.pass());
        assert_eq!(rep.note.as_deref(), Some(NO_FINITE_WITNESS));
        assert!(rep.summary().contains(NO_FINITE_WITNESS));
    }

    #[test]
    fn product_pipeline_with_recurrence() {
        let c = default_constants();
        let m1 = Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap();
        let m2 = Machine::parse("1: jzdec c1 zero {2} else {2}\n2: inc c1 goto {1}").unwrap();
        let p = SyncProduct::new(m1, m2, Partition::new([1], [2])).unwrap();
        let opts = VerifyOptions {
            recurrence: true,
            ..Default::default()
        };
        let rep = verify_product(&c, &p, &opts).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
    }
}
