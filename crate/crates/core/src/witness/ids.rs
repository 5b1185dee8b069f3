use std::fmt;

use serde::{Serialize, Serializer};

use crate::reduction::tag_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    pub fn prop(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::B => "b",
            Letter::C => "c",
        }
    }
}

/// The `d`/`e` marker carried by some `c`-states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    D,
    E,
}

/// One-counter witness state `[ι, 𝓛, n]`. `𝓛` is always one letter, one
/// `rᵢ`, and optionally `h`, a `d`/`e` marker and a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proj {
    pub iota: Option<usize>,
    pub h: bool,
    pub letter: Letter,
    pub r: usize,
    pub mark: Option<Mark>,
    pub label: Option<usize>,
    pub n: Option<u64>,
}

impl Proj {
    /// `[⋆, {h, x, rᵢ, mark}, ⋆]`
    pub fn free(letter: Letter, r: usize, mark: Option<Mark>) -> Proj {
        Proj {
            iota: None,
            h: true,
            letter,
            r: r % 5,
            mark,
            label: None,
            n: None,
        }
    }

    /// `[⋆, {x, rᵢ, mark}, n]`
    pub fn star(letter: Letter, r: usize, mark: Option<Mark>, n: u64) -> Proj {
        Proj {
            iota: None,
            h: false,
            letter,
            r: r % 5,
            mark,
            label: None,
            n: Some(n),
        }
    }

    /// `[k, {x, rᵢ, ℓⱼ}, n]`
    pub fn labeled(k: usize, letter: Letter, r: usize, j: usize, n: u64) -> Proj {
        Proj {
            iota: Some(k),
            h: false,
            letter,
            r: r % 5,
            mark: None,
            label: Some(j),
            n: Some(n),
        }
    }

    /// Untagged propositions in canonical order.
    pub fn props(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(5);
        if self.h {
            out.push("h".to_string());
        }
        out.push(self.letter.prop().to_string());
        out.push(format!("r{}", self.r));
        match self.mark {
            Some(Mark::D) => out.push("d".into()),
            Some(Mark::E) => out.push("e".into()),
            None => {}
        }
        if let Some(j) = self.label {
            out.push(format!("l{j}"));
        }
        out
    }

    /// Propositions tagged for side `k` of a product.
    pub fn tagged_props(&self, k: usize) -> Vec<String> {
        self.props().iter().map(|p| tag_name(p, k)).collect()
    }

    /// `tc` in the successor classification: a `c`-state without `d`/`e`.
    pub fn is_plain_c(&self) -> bool {
        self.letter == Letter::C && self.mark.is_none()
    }

    fn body(&self) -> String {
        self.props().join(",")
    }
}

fn star_or<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref()
        .map_or_else(|| "*".to_string(), |v| v.to_string())
}

impl fmt::Display for Proj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}|{}|{}]",
            star_or(&self.iota),
            self.body(),
            star_or(&self.n)
        )
    }
}

/// `[ι, 𝓛₁, 𝓛₂, n₁, n₂]`. Both projections carry the same `ι`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub left: Proj,
    pub right: Proj,
}

impl Pair {
    pub fn new(left: Proj, right: Proj) -> Pair {
        Pair { left, right }
    }

    pub fn side(&self, k: usize) -> &Proj {
        if k == 1 {
            &self.left
        } else {
            &self.right
        }
    }

    pub fn props(&self) -> Vec<String> {
        let mut out = self.left.tagged_props(1);
        out.extend(self.right.tagged_props(2));
        out
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}|{}|{}|{}|{}]",
            star_or(&self.left.iota),
            self.left.body(),
            self.right.body(),
            star_or(&self.left.n),
            star_or(&self.right.n)
        )
    }
}

/// Stable name of a witness state; its `Display` form is the chain id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WitnessStateId {
    OneCounter(Proj),
    Product(Pair),
    /// `tᵢ`, `bᵢ`, `cᵢ` (and `fa`, `fb`, `fc` in the closed layout).
    Param(String),
}

impl fmt::Display for WitnessStateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessStateId::OneCounter(p) => p.fmt(f),
            WitnessStateId::Product(p) => p.fmt(f),
            WitnessStateId::Param(s) => f.write_str(s),
        }
    }
}

impl Serialize for WitnessStateId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rendering() {
        let t = Proj::labeled(3, Letter::A, 2, 1, 5);
        assert_eq!(t.to_string(), "[3|a,r2,l1|5]");
        let f = Proj::free(Letter::C, 9, Some(Mark::E));
        assert_eq!(f.to_string(), "[*|h,c,r4,e|*]");
        let s = Proj::star(Letter::C, 1, Some(Mark::D), 2);
        assert_eq!(WitnessStateId::OneCounter(s).to_string(), "[*|c,r1,d|2]");
    }

    #[test]
    fn pair_rendering_and_tags() {
        let p = Pair::new(
            Proj::labeled(0, Letter::A, 0, 1, 0),
            Proj::labeled(0, Letter::A, 0, 1, 0),
        );
        assert_eq!(p.to_string(), "[0|a,r0,l1|a,r0,l1|0|0]");
        assert_eq!(p.props(), vec!["a1", "r0_1", "l1_1", "a2", "r0_2", "l1_2"]);
        let json = serde_json::to_string(&WitnessStateId::Product(p)).unwrap();
        assert_eq!(json, "\"[0|a,r0,l1|a,r0,l1|0|0]\"");
    }

    #[test]
    fn plain_c_classification() {
        assert!(Proj::free(Letter::C, 0, None).is_plain_c());
        assert!(!Proj::free(Letter::C, 0, Some(Mark::D)).is_plain_c());
        assert!(!Proj::free(Letter::B, 0, None).is_plain_c());
    }
}
