//! Text grammar for state formulae.
//!
//! ```text
//! formula := or ( "=>" formula )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | primary
//! primary := "true" | "false" | ident | "(" formula ")"
//!          | "same" "{" ident,* "}"
//!          | "P" cmp rat "[" path "]"
//! path    := "X" formula | "F" ("<=" k)? formula | "G" formula
//!          | formula "U" ("<=" k)? formula
//! ```
//! `G` is only accepted under `P=1`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Cmp, Formula, Interner, PathFormula};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Cmp(Cmp),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, n: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '=' => push(Tok::Cmp(Cmp::Eq), 1, &mut i, &mut col),
            '>' if chars.get(i + 1) == Some(&'=') => push(Tok::Cmp(Cmp::Ge), 2, &mut i, &mut col),
            '>' => push(Tok::Cmp(Cmp::Gt), 1, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'=') => push(Tok::Cmp(Cmp::Le), 2, &mut i, &mut col),
            '<' => push(Tok::Cmp(Cmp::Lt), 1, &mut i, &mut col),
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_digit() || chars[j] == '.' || chars[j] == '/')
                {
                    j += 1;
                }
                let s: String = chars[start..j].iter().collect();
                push(Tok::Num(s), j - start, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[start..j].iter().collect();
                push(Tok::Ident(s), j - start, &mut i, &mut col);
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["true", "false", "P", "X", "U", "F", "G", "same"];

pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    int: &'a mut Interner,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(self.int.implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            acc = self.int.or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = self.int.and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            let f = self.unary()?;
            return Ok(self.int.not(f));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(self.int.tt())
                }
                "false" => {
                    self.bump();
                    Ok(self.int.ff())
                }
                "same" => {
                    self.bump();
                    self.same()
                }
                "P" if matches!(self.peek_at(1), Tok::Cmp(_)) => {
                    self.bump();
                    self.prob()
                }
                n if is_reserved(n) => self.err(format!("unexpected keyword {n}")),
                _ => {
                    self.bump();
                    Ok(self.int.atom(&name))
                }
            },
            other => self.err(format!("expected a formula, found {other:?}")),
        }
    }

    fn same(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut props = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                match self.bump() {
                    Tok::Ident(s) if !is_reserved(&s) => {
                        props.insert(s);
                    }
                    _ => {
                        self.pos -= 1;
                        return self.err("expected a proposition name");
                    }
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace, "'}'")?;
        Ok(self.int.exact_match(props))
    }

    fn rat(&mut self) -> Result<Rat, ParseError> {
        match self.peek().clone() {
            Tok::Num(s) => match s.parse::<Rat>() {
                Ok(r) => {
                    self.bump();
                    Ok(r)
                }
                Err(e) => self.err(e.to_string()),
            },
            other => self.err(format!("expected a rational, found {other:?}")),
        }
    }

    fn step_bound(&mut self) -> Result<Option<u32>, ParseError> {
        if *self.peek() != Tok::Cmp(Cmp::Le) {
            return Ok(None);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(s) => match s.parse::<u32>() {
                Ok(k) => {
                    self.bump();
                    Ok(Some(k))
                }
                Err(_) => self.err(format!("expected a step bound, found {s:?}")),
            },
            other => self.err(format!("expected a step bound, found {other:?}")),
        }
    }

    fn prob(&mut self) -> Result<Formula, ParseError> {
        let cmp = match self.bump() {
            Tok::Cmp(c) => c,
            _ => unreachable!("checked by caller"),
        };
        let bound_pos = self.pos;
        let bound = self.rat()?;
        if !bound.in_unit_interval() {
            self.pos = bound_pos;
            return self.err(format!("probability bound {bound} outside [0,1]"));
        }
        self.expect(Tok::LBrack, "'['")?;
        let f = if self.is_ident("G") {
            if cmp != Cmp::Eq || !bound.is_one() {
                return self.err("G is only supported as P=1 [ G f ]");
            }
            self.bump();
            let body = self.formula()?;
            self.int.always(body)
        } else {
            let path = self.path()?;
            self.int
                .mk(super::ast::StateFormula::Prob { cmp, bound, path })
        };
        self.expect(Tok::RBrack, "']'")?;
        Ok(f)
    }

    fn path(&mut self) -> Result<PathFormula, ParseError> {
        if self.is_ident("X") {
            self.bump();
            return Ok(PathFormula::Next(self.formula()?));
        }
        if self.is_ident("F") {
            self.bump();
            let k = self.step_bound()?;
            let body = self.formula()?;
            let t = self.int.tt();
            return Ok(match k {
                Some(k) => PathFormula::BoundedUntil(t, body, k),
                None => PathFormula::Until(t, body),
            });
        }
        let lhs = self.formula()?;
        if !self.is_ident("U") {
            return self.err("expected 'U' in path formula");
        }
        self.bump();
        let k = self.step_bound()?;
        let rhs = self.formula()?;
        Ok(match k {
            Some(k) => PathFormula::BoundedUntil(lhs, rhs, k),
            None => PathFormula::Until(lhs, rhs),
        })
    }
}

/// Parses with a fresh interner.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut int = Interner::new();
    parse_formula_with(text, &mut int)
}

/// Parses, sharing nodes with everything already built through `int`.
pub fn parse_formula_with(text: &str, int: &mut Interner) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, int };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected trailing input {:?}", p.peek()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pctl::ast::StateFormula;
    use crate::pctl::print::print_formula;
    use std::sync::Arc;

    fn atom(s: &str) -> Formula {
        Arc::new(StateFormula::Atom(s.into()))
    }

    #[test]
    fn bounded_eventually() {
        let f = parse_formula("P=13/16 [ F<=2 r2 ]").unwrap();
        let want = StateFormula::Prob {
            cmp: Cmp::Eq,
            bound: Rat::new(13, 16),
            path: PathFormula::BoundedUntil(Arc::new(StateFormula::True), atom("r2"), 2),
        };
        assert_eq!(*f, want);
    }

    #[test]
    fn globally_is_sugar() {
        let f = parse_formula("P=1 [ G phi ]").unwrap();
        let want = StateFormula::Prob {
            cmp: Cmp::Eq,
            bound: Rat::zero(),
            path: PathFormula::Until(
                Arc::new(StateFormula::True),
                Arc::new(StateFormula::Not(atom("phi"))),
            ),
        };
        assert_eq!(*f, want);
        assert!(parse_formula("P>0 [ G phi ]").is_err());
    }

    #[test]
    fn bound_out_of_range() {
        let e = parse_formula("P>=1.5 [ X a ]").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        assert!(e.msg.contains("outside [0,1]"));
    }

    #[test]
    fn error_positions() {
        let e = parse_formula("a &\n  & b").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_formula("P>0 [ a b ]").is_err());
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("X").is_err());
        assert!(parse_formula("a # b").is_err());
    }

    #[test]
    fn until_operands_are_full_formulae() {
        let f = parse_formula("P>0 [ a & b U<=3 c | d ]").unwrap();
        match &*f {
            StateFormula::Prob {
                path: PathFormula::BoundedUntil(l, r, 3),
                ..
            } => {
                assert!(matches!(**l, StateFormula::And(..)));
                assert!(matches!(**r, StateFormula::Or(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trips() {
        for text in [
            "a",
            "!a & (b | c)",
            "a => b => c",
            "(a => b) => c",
            "P>=1/2 [ X same{a,b} ]",
            "P<0.25 [ a U b ]",
            "P=0 [ F<=3 !a ]",
            "P=1 [ G (a | P>0 [ X b ]) ]",
            "true & false",
            "same{}",
        ] {
            let f = parse_formula(text).unwrap();
            let printed = print_formula(&f);
            let again = parse_formula(&printed).unwrap();
            assert_eq!(f, again, "{text} -> {printed}");
        }
    }

    #[test]
    fn parser_shares_subtrees() {
        let f = parse_formula("(a & b) | (a & b)").unwrap();
        match &*f {
            StateFormula::Or(l, r) => assert!(Arc::ptr_eq(l, r)),
            _ => panic!(),
        }
    }
}
