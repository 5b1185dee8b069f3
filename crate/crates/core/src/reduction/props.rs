use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// `a, b, c, h, r0..r4`.
pub const BASE: [&str; 9] = ["a", "b", "c", "h", "r0", "r1", "r2", "r3", "r4"];

/// `r_{(i+k) mod 5}` as an index.
pub fn succ_index(i: usize, k: usize) -> usize {
    (i + k) % 5
}

/// `S^k(r_i)`.
pub fn succ_prop(i: usize, k: usize) -> String {
    r(succ_index(i, k))
}

pub fn r(i: usize) -> String {
    format!("r{}", i % 5)
}

/// Label proposition for instruction `j`.
pub fn l(j: usize) -> String {
    format!("l{j}")
}

/// Side-tagged name: `a` becomes `a1`; names ending in a digit get an
/// underscore so `r2` becomes `r2_1` and `l3` becomes `l3_1`.
pub fn tag_name(base: &str, k: usize) -> String {
    if base.ends_with(|c: char| c.is_ascii_digit()) {
        format!("{base}_{k}")
    } else {
        format!("{base}{k}")
    }
}

/// Which atomic propositions a compiled formula may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PropUniverse {
    /// `a, b, c, h, r0..r4`.
    Base,
    /// Base plus `l1..lm`, `d`, `e`.
    Extended { labels: usize },
    /// Two tagged copies of the extended set.
    Doubled { labels: usize },
}

impl PropUniverse {
    /// Untagged names of one copy.
    fn untagged(&self) -> Vec<String> {
        let mut out: Vec<String> = BASE.iter().map(|s| s.to_string()).collect();
        match self {
            PropUniverse::Base => {}
            PropUniverse::Extended { labels } | PropUniverse::Doubled { labels } => {
                out.extend((1..=*labels).map(l));
                out.push("d".into());
                out.push("e".into());
            }
        }
        out
    }

    /// Side `k` (1 or 2) of a doubled universe; the single side otherwise.
    pub fn side(&self, k: usize) -> Side {
        let tag = match self {
            PropUniverse::Doubled { .. } => Some(k),
            _ => None,
        };
        let mut names: Vec<String> = self
            .untagged()
            .iter()
            .map(|b| tag.map_or_else(|| b.clone(), |k| tag_name(b, k)))
            .collect();
        names.sort();
        Side { tag, names }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        match self {
            PropUniverse::Doubled { .. } => {
                let mut s: BTreeSet<String> = self.side(1).names.into_iter().collect();
                s.extend(self.side(2).names);
                s
            }
            _ => self.side(1).names.into_iter().collect(),
        }
    }

    pub fn labels(&self) -> usize {
        match self {
            PropUniverse::Base => 0,
            PropUniverse::Extended { labels } | PropUniverse::Doubled { labels } => *labels,
        }
    }
}

/// One copy of the proposition set, with its tagging rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Side {
    tag: Option<usize>,
    names: Vec<String>,
}

impl Side {
    pub fn name(&self, base: &str) -> String {
        match self.tag {
            Some(k) => tag_name(base, k),
            None => base.to_string(),
        }
    }

    pub fn tag(&self) -> Option<usize> {
        self.tag
    }

    /// Sorted, tagged names of this copy.
    pub fn universe(&self) -> &[String] {
        &self.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successor_propositions() {
        assert_eq!(succ_prop(3, 2), "r0");
        assert_eq!(succ_prop(2, 0), "r2");
        assert_eq!(succ_prop(1, 5), "r1");
    }

    #[test]
    fn universes() {
        assert_eq!(PropUniverse::Base.atoms().len(), 9);
        let ext = PropUniverse::Extended { labels: 3 };
        assert_eq!(ext.atoms().len(), 14);
        assert!(ext.atoms().contains("l3"));
        let dbl = PropUniverse::Doubled { labels: 3 };
        assert_eq!(dbl.atoms().len(), 28);
        let s1 = dbl.side(1);
        assert!(s1.universe().contains(&"l3_1".to_string()));
        assert!(s1.universe().contains(&"a1".to_string()));
        assert!(s1.universe().contains(&"r4_1".to_string()));
        assert!(!s1.universe().contains(&"a2".to_string()));
        assert_eq!(dbl.side(2).name("h"), "h2");
    }
}
