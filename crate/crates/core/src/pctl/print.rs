//! Canonical text form. `parse(print(f)) == f` for every formula.

use std::fmt::Write;

use super::ast::{as_always, Formula, PathFormula, StateFormula};

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;

pub fn print_formula(f: &StateFormula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0);
    out
}

fn wrap(out: &mut String, needed: bool, body: impl FnOnce(&mut String)) {
    if needed {
        out.push('(');
    }
    body(out);
    if needed {
        out.push(')');
    }
}

fn write_formula(out: &mut String, f: &StateFormula, ctx: u8) {
    match f {
        StateFormula::True => out.push_str("true"),
        StateFormula::False => out.push_str("false"),
        StateFormula::Atom(a) => out.push_str(a),
        StateFormula::Not(a) => {
            out.push('!');
            write_formula(out, a, PREC_NOT);
        }
        StateFormula::And(a, b) => wrap(out, ctx > PREC_AND, |out| {
            write_formula(out, a, PREC_AND);
            out.push_str(" & ");
            write_formula(out, b, PREC_NOT);
        }),
        StateFormula::Or(a, b) => wrap(out, ctx > PREC_OR, |out| {
            write_formula(out, a, PREC_OR);
            out.push_str(" | ");
            write_formula(out, b, PREC_AND);
        }),
        StateFormula::Implies(a, b) => wrap(out, ctx > PREC_IMPLIES, |out| {
            write_formula(out, a, PREC_OR);
            out.push_str(" => ");
            write_formula(out, b, PREC_IMPLIES);
        }),
        StateFormula::Prob { cmp, bound, path } => {
            if let Some(inner) = as_always(f) {
                out.push_str("P=1 [ G ");
                write_formula(out, inner, 0);
                out.push_str(" ]");
                return;
            }
            let _ = write!(out, "P{}{} [ ", cmp.symbol(), bound);
            write_path(out, path);
            out.push_str(" ]");
        }
        StateFormula::ExactMatch(q) => {
            out.push_str("same{");
            for (i, p) in q.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(p);
            }
            out.push('}');
        }
    }
}

fn is_true(f: &Formula) -> bool {
    matches!(**f, StateFormula::True)
}

fn write_path(out: &mut String, p: &PathFormula) {
    match p {
        PathFormula::Next(f) => {
            out.push_str("X ");
            write_formula(out, f, 0);
        }
        PathFormula::Until(a, b) if is_true(a) => {
            out.push_str("F ");
            write_formula(out, b, 0);
        }
        PathFormula::Until(a, b) => {
            write_formula(out, a, 0);
            out.push_str(" U ");
            write_formula(out, b, 0);
        }
        PathFormula::BoundedUntil(a, b, k) if is_true(a) => {
            let _ = write!(out, "F<={k} ");
            write_formula(out, b, 0);
        }
        PathFormula::BoundedUntil(a, b, k) => {
            write_formula(out, a, 0);
            let _ = write!(out, " U<={k} ");
            write_formula(out, b, 0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pctl::ast::{Cmp, Interner};
    use crate::rational::Rat;

    #[test]
    fn precedence_parens() {
        let mut i = Interner::new();
        let (a, b, c) = (i.atom("a"), i.atom("b"), i.atom("c"));
        let ab = i.or(a.clone(), b.clone());
        let f = i.and(ab, c.clone());
        assert_eq!(print_formula(&f), "(a | b) & c");
        let bc = i.and(b.clone(), c.clone());
        let g = i.and(a.clone(), bc);
        assert_eq!(print_formula(&g), "a & (b & c)");
        let ab2 = i.and(a.clone(), b.clone());
        let h = i.and(ab2, c.clone());
        assert_eq!(print_formula(&h), "a & b & c");
        let imp = i.implies(a.clone(), b.clone());
        let imp2 = i.implies(imp, c);
        assert_eq!(print_formula(&imp2), "(a => b) => c");
        let n = i.not(g);
        assert_eq!(print_formula(&n), "!(a & (b & c))");
    }

    #[test]
    fn probabilistic_forms() {
        let mut i = Interner::new();
        let r2 = i.atom("r2");
        let f = i.eventually_within(Cmp::Eq, Rat::new(13, 16), 2, r2.clone());
        assert_eq!(print_formula(&f), "P=13/16 [ F<=2 r2 ]");
        let g = i.always(r2.clone());
        assert_eq!(print_formula(&g), "P=1 [ G r2 ]");
        let x = i.next(Cmp::Gt, Rat::zero(), r2);
        assert_eq!(print_formula(&x), "P>0 [ X r2 ]");
        let s = i.exact_match(["b", "a"]);
        assert_eq!(print_formula(&s), "same{a,b}");
    }
}
