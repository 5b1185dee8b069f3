//! PCTL syntax, finite Markov chains and an exact model checker.

pub mod ast;
pub mod chain;
pub mod check;
pub mod lint;
pub mod parse;
pub mod print;

pub use ast::{as_always, Cmp, Formula, Interner, PathFormula, StateFormula};
pub use chain::{ChainBuilder, ChainError, MarkovChain, StateSpec};
pub use check::{characteristic_vector, sat_states, Checker};
pub use lint::{fragment_lint, LintReport};
pub use parse::{parse_formula, parse_formula_with, ParseError};
pub use print::print_formula;
