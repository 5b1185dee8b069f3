use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::machine::Machine;
use super::run::{apply, Configuration, Stepper};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("machine {0} must use exactly one counter")]
    NotOneCounter(usize),
    #[error("machines have {0} and {1} instructions")]
    LengthMismatch(usize, usize),
    #[error("label {0} is in both I1 and I2")]
    Overlap(usize),
    #[error("label {0} is in neither I1 nor I2")]
    Uncovered(usize),
    #[error("label {0} is outside 1..{1}")]
    OutOfRange(usize, usize),
    #[error("invalid partition JSON: {0}")]
    Json(String),
}

/// `(I₁, I₂)`: which machine picks the next label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    #[serde(rename = "I1")]
    pub i1: BTreeSet<usize>,
    #[serde(rename = "I2")]
    pub i2: BTreeSet<usize>,
}

impl Partition {
    pub fn new(
        i1: impl IntoIterator<Item = usize>,
        i2: impl IntoIterator<Item = usize>,
    ) -> Partition {
        Partition {
            i1: i1.into_iter().collect(),
            i2: i2.into_iter().collect(),
        }
    }

    /// 1 or 2: the side that owns `label`.
    pub fn owner(&self, label: usize) -> usize {
        if self.i1.contains(&label) {
            1
        } else {
            2
        }
    }

    pub fn from_json(text: &str) -> Result<Partition, ProductError> {
        serde_json::from_str(text).map_err(|e| ProductError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }

    fn check(&self, m: usize) -> Result<(), ProductError> {
        for &l in self.i1.iter().chain(&self.i2) {
            if l == 0 || l > m {
                return Err(ProductError::OutOfRange(l, m));
            }
        }
        if let Some(&l) = self.i1.intersection(&self.i2).next() {
            return Err(ProductError::Overlap(l));
        }
        if let Some(l) = (1..=m).find(|l| !self.i1.contains(l) && !self.i2.contains(l)) {
            return Err(ProductError::Uncovered(l));
        }
        Ok(())
    }
}

/// Two one-counter machines run in lock step; configurations are
/// `(j, n₁, n₂)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncProduct {
    m1: Machine,
    m2: Machine,
    partition: Partition,
}

impl SyncProduct {
    pub fn new(
        m1: Machine,
        m2: Machine,
        partition: Partition,
    ) -> Result<SyncProduct, ProductError> {
        for (i, m) in [(1, &m1), (2, &m2)] {
            if m.counters() != 1 {
                return Err(ProductError::NotOneCounter(i));
            }
        }
        if m1.len() != m2.len() {
            return Err(ProductError::LengthMismatch(m1.len(), m2.len()));
        }
        partition.check(m1.len())?;
        Ok(SyncProduct { m1, m2, partition })
    }

    pub fn len(&self) -> usize {
        self.m1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m1.is_empty()
    }

    /// Machine `k` (1 or 2).
    pub fn machine(&self, k: usize) -> &Machine {
        if k == 1 {
            &self.m1
        } else {
            &self.m2
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn is_deterministic(&self) -> bool {
        (1..=self.len()).all(|j| {
            let owner = self.machine(self.partition.owner(j));
            owner.ins(j).is_deterministic()
        })
    }
}

/// Both machines execute instruction `j`; the owner of `j` supplies the
/// labels, so every successor carries the same counter pair.
pub fn product_successors(p: &SyncProduct, d: &Configuration) -> Vec<Configuration> {
    let j = d.label;
    let (l1, n1) = apply(p.m1.ins(j), &d.counters[0..1], 1);
    let (l2, n2) = apply(p.m2.ins(j), &d.counters[1..2], 1);
    let labels = if p.partition.owner(j) == 1 { l1 } else { l2 };
    labels
        .iter()
        .map(|&l| Configuration::new(l, vec![n1[0], n2[0]]))
        .collect()
}

impl Stepper for SyncProduct {
    fn initial(&self) -> Configuration {
        Configuration::initial(2)
    }

    fn step(&self, c: &Configuration) -> Vec<Configuration> {
        product_successors(self, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minsky::run::{run_with_period_detection, Strategy};

    fn product(a: &str, b: &str, i1: &[usize], i2: &[usize]) -> SyncProduct {
        SyncProduct::new(
            Machine::parse(a).unwrap(),
            Machine::parse(b).unwrap(),
            Partition::new(i1.iter().copied(), i2.iter().copied()),
        )
        .unwrap()
    }

    const FILL: &str = "2: inc c1 goto {2}\n3: inc c1 goto {3}\n4: inc c1 goto {4}\n5: inc c1 goto {5}\n6: inc c1 goto {6}\n7: inc c1 goto {7}\n8: inc c1 goto {8}\n9: inc c1 goto {9}\n";

    #[test]
    fn owner_supplies_labels() {
        let a = format!("1: inc c1 goto {{2}}\n{FILL}");
        let b = format!("1: inc c1 goto {{5}}\n{FILL}");
        let p = product(&a, &b, &[1], &[2, 3, 4, 5, 6, 7, 8, 9]);
        let d = Configuration::new(1, vec![0, 0]);
        assert_eq!(
            product_successors(&p, &d),
            vec![Configuration::new(2, vec![1, 1])]
        );
        let q = product(&a, &b, &[2, 3, 4, 5, 6, 7, 8, 9], &[1]);
        assert_eq!(
            product_successors(&q, &d),
            vec![Configuration::new(5, vec![1, 1])]
        );
    }

    #[test]
    fn zero_test_on_one_side_decrement_on_other() {
        let a = format!("1: jzdec c1 zero {{1}} else {{3}}\n{FILL}");
        let b = format!("1: jzdec c1 zero {{9}} else {{9}}\n{FILL}");
        let p = product(&a, &b, &[1, 2, 3, 4, 5, 6, 7, 8, 9], &[]);
        let d = Configuration::new(1, vec![0, 4]);
        assert_eq!(
            product_successors(&p, &d),
            vec![Configuration::new(1, vec![0, 3])]
        );
    }

    #[test]
    fn successors_share_counters() {
        let a = "1: inc c1 goto {1,2}\n2: jzdec c1 zero {1} else {2,1}\n";
        let b = "1: jzdec c1 zero {2} else {1}\n2: inc c1 goto {2}\n";
        let p = product(a, b, &[1, 2], &[]);
        let w = run_with_period_detection(&p, 40, &"1,0,1,1".parse::<Strategy>().unwrap());
        w.validate(&p).unwrap();
        for c in w.prefix() {
            let s = product_successors(&p, c);
            assert!(!s.is_empty() && s.len() <= 2);
            assert!(s.iter().all(|x| x.counters == s[0].counters));
        }
    }

    #[test]
    fn partition_checks() {
        let a = "1: inc c1 goto {1}\n2: inc c1 goto {1}\n";
        let m = Machine::parse(a).unwrap();
        let bad = |i1: &[usize], i2: &[usize]| {
            SyncProduct::new(
                m.clone(),
                m.clone(),
                Partition::new(i1.to_vec(), i2.to_vec()),
            )
            .unwrap_err()
        };
        assert_eq!(bad(&[1, 2], &[2]), ProductError::Overlap(2));
        assert_eq!(bad(&[1], &[]), ProductError::Uncovered(2));
        assert_eq!(bad(&[1, 3], &[2]), ProductError::OutOfRange(3, 2));
        let p = Partition::from_json(r#"{"I1":[1],"I2":[2]}"#).unwrap();
        assert_eq!(p.owner(2), 2);
        assert_eq!(Partition::from_json(&p.to_json()).unwrap(), p);
        let two = Machine::parse("1: inc c2 goto {1}\n2: inc c1 goto {1}").unwrap();
        assert_eq!(
            SyncProduct::new(two, m.clone(), p).unwrap_err(),
            ProductError::NotOneCounter(1)
        );
    }
}
