use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A target label set; one or two labels, 1-based.
pub type Labels = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    /// `inc c_j; goto L`
    Inc { counter: usize, goto: Labels },
    /// `if c_j=0 then goto L else dec c_j; goto L'`
    JzDec {
        counter: usize,
        zero: Labels,
        nonzero: Labels,
    },
}

impl Instruction {
    pub fn counter(&self) -> usize {
        match self {
            Instruction::Inc { counter, .. } | Instruction::JzDec { counter, .. } => *counter,
        }
    }

    pub fn is_inc(&self) -> bool {
        matches!(self, Instruction::Inc { .. })
    }

    pub fn label_sets(&self) -> Vec<&Labels> {
        match self {
            Instruction::Inc { goto, .. } => vec![goto],
            Instruction::JzDec { zero, nonzero, .. } => vec![zero, nonzero],
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.label_sets().iter().all(|l| l.len() == 1)
    }

    /// Rewrites every target label and the counter index.
    pub fn map(&self, counter: usize, f: impl Fn(usize) -> usize) -> Instruction {
        let m = |l: &Labels| l.iter().map(|&x| f(x)).collect();
        match self {
            Instruction::Inc { goto, .. } => Instruction::Inc {
                counter,
                goto: m(goto),
            },
            Instruction::JzDec { zero, nonzero, .. } => Instruction::JzDec {
                counter,
                zero: m(zero),
                nonzero: m(nonzero),
            },
        }
    }
}

fn fmt_labels(l: &Labels) -> String {
    let parts: Vec<String> = l.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Inc { counter, goto } => {
                write!(f, "inc c{counter} goto {}", fmt_labels(goto))
            }
            Instruction::JzDec {
                counter,
                zero,
                nonzero,
            } => write!(
                f,
                "jzdec c{counter} zero {} else {}",
                fmt_labels(zero),
                fmt_labels(nonzero)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid machine: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// Numbered instruction list; label `i` is `instructions[i-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Machine {
    instructions: Vec<Instruction>,
    counters: usize,
}

impl Machine {
    pub fn new(instructions: Vec<Instruction>, counters: usize) -> Result<Machine, MachineError> {
        let m = Machine {
            instructions,
            counters,
        };
        let report = validate_machine(&m);
        if report.is_empty() {
            Ok(m)
        } else {
            Err(MachineError::Invalid(report))
        }
    }

    /// Counter count is the largest counter index used (at least 1).
    pub fn infer(instructions: Vec<Instruction>) -> Result<Machine, MachineError> {
        let k = instructions
            .iter()
            .map(Instruction::counter)
            .max()
            .unwrap_or(1)
            .max(1);
        Machine::new(instructions, k)
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Instruction at 1-based `label`.
    pub fn ins(&self, label: usize) -> &Instruction {
        &self.instructions[label - 1]
    }

    pub fn is_deterministic(&self) -> bool {
        self.instructions.iter().all(Instruction::is_deterministic)
    }

    pub fn with_counters(&self, k: usize) -> Result<Machine, MachineError> {
        Machine::new(self.instructions.clone(), k)
    }

    /// Parses the `.mm` text format:
    /// `i: inc cJ goto {a,b}` or `i: jzdec cJ zero {a} else {b,c}`.
    /// Blank lines and `#` comments are ignored; labels must be 1..m in order.
    pub fn parse(text: &str) -> Result<Machine, MachineError> {
        let mut instructions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_no = lineno + 1;
            let err = |msg: String| MachineError::Syntax { line: line_no, msg };
            let (label, body) = line
                .split_once(':')
                .ok_or_else(|| err("missing ':' after label".into()))?;
            let label: usize = label
                .trim()
                .parse()
                .map_err(|_| err(format!("bad label {:?}", label.trim())))?;
            if label != instructions.len() + 1 {
                return Err(err(format!(
                    "expected label {}, found {label}",
                    instructions.len() + 1
                )));
            }
            instructions.push(parse_instruction(body).map_err(err)?);
        }
        Machine::infer(instructions)
    }
}

fn parse_labels(s: &str) -> Result<Labels, String> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format!("expected {{...}}, found {s:?}"))?;
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad target label {:?}", x.trim()))
        })
        .collect()
}

fn parse_counter(s: &str) -> Result<usize, String> {
    s.strip_prefix('c')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("bad counter {s:?}"))
}

fn parse_instruction(body: &str) -> Result<Instruction, String> {
    let body = body.trim();
    if let Some(rest) = body.strip_prefix("inc ") {
        let (ctr, tail) = rest.trim().split_once(' ').ok_or("incomplete inc")?;
        let targets = tail.trim().strip_prefix("goto").ok_or("expected 'goto'")?;
        return Ok(Instruction::Inc {
            counter: parse_counter(ctr)?,
            goto: parse_labels(targets)?,
        });
    }
    if let Some(rest) = body.strip_prefix("jzdec ") {
        let (ctr, tail) = rest.trim().split_once(' ').ok_or("incomplete jzdec")?;
        let tail = tail.trim().strip_prefix("zero").ok_or("expected 'zero'")?;
        let (z, nz) = tail.split_once("else").ok_or("expected 'else'")?;
        return Ok(Instruction::JzDec {
            counter: parse_counter(ctr)?,
            zero: parse_labels(z)?,
            nonzero: parse_labels(nz)?,
        });
    }
    Err(format!("unknown instruction {body:?}"))
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instructions.iter().enumerate() {
            writeln!(f, "{}: {ins}", i + 1)?;
        }
        Ok(())
    }
}

/// Lists every structural problem; empty means well-formed.
pub fn validate_machine(m: &Machine) -> Vec<String> {
    let mut out = Vec::new();
    if m.instructions.is_empty() {
        out.push("machine has no instructions".to_string());
    }
    let len = m.instructions.len();
    for (i, ins) in m.instructions.iter().enumerate() {
        let label = i + 1;
        let c = ins.counter();
        if c == 0 || c > m.counters {
            out.push(format!("{label}: counter c{c} outside 1..{}", m.counters));
        }
        for set in ins.label_sets() {
            if set.is_empty() || set.len() > 2 {
                out.push(format!(
                    "{label}: target set {} must have one or two elements",
                    fmt_labels(set)
                ));
            }
            if set.len() == 2 && set[0] == set[1] {
                out.push(format!(
                    "{label}: target set {} repeats a label",
                    fmt_labels(set)
                ));
            }
            for &t in set {
                if t == 0 || t > len {
                    out.push(format!("{label}: target label {t} outside 1..{len}"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOOP: &str = "1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}\n";

    #[test]
    fn parse_and_print_round_trip() {
        let m = Machine::parse(LOOP).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.counters(), 1);
        assert_eq!(m.to_string(), LOOP);
        assert_eq!(Machine::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Machine::parse("2: inc c1 goto {1}"),
            Err(MachineError::Syntax { line: 1, .. })
        ));
        assert!(Machine::parse("1: add c1 goto {1}").is_err());
        assert!(Machine::parse("1: inc x goto {1}").is_err());
        assert!(Machine::parse("1: jzdec c1 zero {1}").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = Machine::parse("# loop\n\n1: inc c2 goto {1} # spin\n").unwrap();
        assert_eq!(m.counters(), 2);
    }

    #[test]
    fn validation_reports() {
        let ok = Machine::parse(LOOP).unwrap();
        assert!(validate_machine(&ok).is_empty());
        let bad = Machine {
            instructions: vec![Instruction::Inc {
                counter: 1,
                goto: vec![0],
            }],
            counters: 1,
        };
        assert_eq!(validate_machine(&bad).len(), 1);
        let three = Machine {
            instructions: vec![Instruction::Inc {
                counter: 1,
                goto: vec![1, 1, 1],
            }],
            counters: 1,
        };
        assert!(validate_machine(&three)
            .iter()
            .any(|v| v.contains("one or two elements")));
        assert!(Machine::parse("1: inc c1 goto {1,2,3}").is_err());
    }
}
