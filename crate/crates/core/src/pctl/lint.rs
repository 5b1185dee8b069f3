//! Checks that a formula has the shape `φ₁ ∧ G=1 φ₂` where `φ₁`, `φ₂` use
//! only `X` and `U≤k` with `k ≤ 2`, optionally with one recurrence conjunct
//! `G=1 (… ⇒ P>0 [ … ])` that may use unbounded `F`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::ast::{as_always, Cmp, Formula, PathFormula, StateFormula};
use super::print::print_formula;

pub const MAX_STEP_BOUND: u32 = 2;
pub const RECURRENCE_NOTE: &str = "recurrence conjunct uses unbounded F";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Position in the syntax tree, e.g. `conj[1]/G/and.r/or.l`.
    pub location: String,
    /// The offending operator, printed (truncated for long operands).
    pub operator: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintReport {
    pub pass: bool,
    pub conjuncts: usize,
    pub always_conjuncts: usize,
    pub recurrence_conjuncts: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl fmt::Display for LintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.pass { "PASS" } else { "FAIL" })?;
        for v in &self.violations {
            writeln!(
                f,
                "  violation at {}: {} ({})",
                v.location, v.operator, v.reason
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    if let StateFormula::And(a, b) = &**f {
        flatten_and(a, out);
        flatten_and(b, out);
    } else {
        out.push(f.clone());
    }
}

fn short(f: &StateFormula) -> String {
    let s = print_formula(f);
    if s.chars().count() > 80 {
        let head: String = s.chars().take(77).collect();
        format!("{head}...")
    } else {
        s
    }
}

fn scan(f: &Formula, loc: &str, seen: &mut HashSet<usize>, out: &mut Vec<Violation>) {
    if !seen.insert(Arc::as_ptr(f) as usize) {
        return;
    }
    match &**f {
        StateFormula::Not(a) => scan(a, &format!("{loc}/not"), seen, out),
        StateFormula::And(a, b) => {
            scan(a, &format!("{loc}/and.l"), seen, out);
            scan(b, &format!("{loc}/and.r"), seen, out);
        }
        StateFormula::Or(a, b) => {
            scan(a, &format!("{loc}/or.l"), seen, out);
            scan(b, &format!("{loc}/or.r"), seen, out);
        }
        StateFormula::Implies(a, b) => {
            scan(a, &format!("{loc}/imp.l"), seen, out);
            scan(b, &format!("{loc}/imp.r"), seen, out);
        }
        StateFormula::Prob { path, .. } => {
            match path {
                PathFormula::Next(_) => {}
                PathFormula::BoundedUntil(_, _, k) if *k <= MAX_STEP_BOUND => {}
                PathFormula::BoundedUntil(_, _, k) => out.push(Violation {
                    location: loc.to_string(),
                    operator: short(f),
                    reason: format!("step bound {k} exceeds {MAX_STEP_BOUND}"),
                }),
                PathFormula::Until(..) => out.push(Violation {
                    location: loc.to_string(),
                    operator: short(f),
                    reason: "unbounded until".to_string(),
                }),
            }
            for (i, g) in path.operands().into_iter().enumerate() {
                scan(g, &format!("{loc}/P.{i}"), seen, out);
            }
        }
        _ => {}
    }
}

/// True when `body` is `x ⇒ P>0 [ … ]` and its only violations are
/// unbounded untils under `P>0`.
fn is_recurrence_body(body: &Formula, violations: &[Violation]) -> bool {
    let StateFormula::Implies(_, rhs) = &**body else {
        return false;
    };
    let positive =
        matches!(&**rhs, StateFormula::Prob { cmp: Cmp::Gt, bound, .. } if bound.is_zero());
    positive
        && violations
            .iter()
            .all(|v| v.reason == "unbounded until" && v.operator.starts_with("P>0 ["))
}

pub fn fragment_lint(f: &Formula) -> LintReport {
    let mut conj = Vec::new();
    flatten_and(f, &mut conj);
    let mut report = LintReport {
        pass: true,
        conjuncts: conj.len(),
        always_conjuncts: 0,
        recurrence_conjuncts: 0,
        violations: vec![],
        notes: vec![],
    };
    for (i, c) in conj.iter().enumerate() {
        let loc = format!("conj[{i}]");
        let mut seen = HashSet::new();
        let mut found = Vec::new();
        if let Some(body) = as_always(c) {
            scan(body, &format!("{loc}/G"), &mut seen, &mut found);
            if found.is_empty() {
                report.always_conjuncts += 1;
            } else if is_recurrence_body(body, &found) && report.recurrence_conjuncts == 0 {
                report.recurrence_conjuncts += 1;
                report.notes.push(format!("{loc}: {RECURRENCE_NOTE}"));
            } else {
                report.violations.extend(found);
            }
        } else {
            scan(c, &loc, &mut seen, &mut found);
            report.violations.extend(found);
        }
    }
    if report.always_conjuncts == 0 {
        report
            .notes
            .push("no G=1 conjunct; invariant part is trivially true".to_string());
    }
    report.pass = report.violations.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pctl::parse::parse_formula;

    #[test]
    fn accepts_fragment() {
        let f = parse_formula("a & P=1/2 [ X b ] & P=1 [ G (c | P=1 [ F<=2 d ]) ]").unwrap();
        let r = fragment_lint(&f);
        assert!(r.pass, "{r}");
        assert_eq!(r.always_conjuncts, 1);
        assert_eq!(r.conjuncts, 3);
    }

    #[test]
    fn rejects_unbounded_until_with_location() {
        let f = parse_formula("P>0 [ a U b ]").unwrap();
        let r = fragment_lint(&f);
        assert!(!r.pass);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].location, "conj[0]");
        assert_eq!(r.violations[0].operator, "P>0 [ a U b ]");
    }

    #[test]
    fn rejects_deep_step_bound() {
        let f = parse_formula("a & P=1 [ G (b | P>0 [ F<=3 c ]) ]").unwrap();
        let r = fragment_lint(&f);
        assert!(!r.pass);
        assert_eq!(r.violations[0].location, "conj[1]/G/or.r");
    }

    #[test]
    fn recurrence_conjunct_is_noted() {
        let f = parse_formula("a & P=1 [ G b ] & P=1 [ G (l => P>0 [ X P>0 [ F l ] ]) ]").unwrap();
        let r = fragment_lint(&f);
        assert!(r.pass, "{r}");
        assert_eq!(r.recurrence_conjuncts, 1);
        assert!(r.notes[0].contains(RECURRENCE_NOTE));
    }

    #[test]
    fn nested_always_is_a_violation() {
        let f = parse_formula("P=1 [ G P=1 [ G a ] ]").unwrap();
        assert!(!fragment_lint(&f).pass);
    }
}
