//! The residual probability `pₙ` of a positive-counter `c`-state: the weight
//! of its `d`-successor, tuned so that the parent increment sees exactly `γ`
//! in its two `F²=γ` conjuncts.

use serde::{Deserialize, Serialize};

use super::WitnessError;
use crate::geometry::GeometryConstants;
use crate::rational::Rat;

/// Which denominator normalizes `γ − (1−q)σⁿ⁻¹(κ)₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualRule {
    /// `1 − σⁿ⁻¹(κ)₁ − σⁿ⁻¹(κ)₂`, the mass the parent increment sends to
    /// `c`-states. This is what makes `F²=γ` exact.
    #[default]
    ParentNormalized,
    /// `1 − σⁿ(κ)₁ − σⁿ(κ)₂`, the literal alternative. Off by a factor, so the `F²=γ`
    /// conjuncts fail on the resulting chains.
    Printed,
}

/// `pₙ` with its validated range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PN {
    pub n: usize,
    pub value: Rat,
    /// `1 − σⁿ(κ)₁ − σⁿ(κ)₂`, the exclusive upper bound.
    pub bound: Rat,
}

pub fn p_n(c: &GeometryConstants, n: usize, rule: ResidualRule) -> Result<PN, WitnessError> {
    if n == 0 {
        return Err(WitnessError::ResidualIndex);
    }
    let parent = c.sigma_n(n - 1);
    let here = c.sigma(&parent).expect("W is closed under sigma");
    let num = &c.gamma - &(c.one_minus_q() * &parent.x2);
    let bound = Rat::one() - &here.x1 - &here.x2;
    let den = match rule {
        ResidualRule::ParentNormalized => Rat::one() - &parent.x1 - &parent.x2,
        ResidualRule::Printed => bound.clone(),
    };
    let value = num
        .checked_div(&den)
        .map_err(|_| WitnessError::ResidualOutOfRange {
            n,
            value: Box::new(Rat::zero()),
            bound: Box::new(bound.clone()),
        })?;
    if !value.is_positive() || value >= bound {
        return Err(WitnessError::ResidualOutOfRange {
            n,
            value: Box::new(value),
            bound: Box::new(bound),
        });
    }
    Ok(PN { n, value, bound })
}

/// Memo of `pₙ` values for one constant set and rule.
#[derive(Debug, Clone)]
pub struct Residuals {
    c: GeometryConstants,
    rule: ResidualRule,
    cache: Vec<Rat>,
}

impl Residuals {
    pub fn new(c: &GeometryConstants, rule: ResidualRule) -> Residuals {
        Residuals {
            c: c.clone(),
            rule,
            cache: Vec::new(),
        }
    }

    pub fn get(&mut self, n: usize) -> Result<Rat, WitnessError> {
        while self.cache.len() < n {
            let k = self.cache.len() + 1;
            self.cache.push(p_n(&self.c, k, self.rule)?.value);
        }
        if n == 0 {
            return Err(WitnessError::ResidualIndex);
        }
        Ok(self.cache[n - 1].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_constants;

    #[test]
    fn printed_value_at_one() {
        let c = default_constants();
        let p = p_n(&c, 1, ResidualRule::Printed).unwrap();
        assert_eq!(p.value, Rat::new(32571, 443200));
        assert_eq!(p.bound, Rat::new(277, 376));
    }

    #[test]
    fn parent_normalized_value_at_one() {
        // (3/50 − 3/16 · 1/32) / (1 − 17/64 − 1/32)
        let c = default_constants();
        let p = p_n(&c, 1, ResidualRule::ParentNormalized).unwrap();
        let expect = (Rat::new(3, 50) - Rat::new(3, 512)) * Rat::new(64, 45);
        assert_eq!(p.value, expect);
        assert_eq!(p.value, Rat::new(693, 12800) * Rat::new(64, 45));
        assert!(p.value < p.bound);
    }

    #[test]
    fn positive_and_in_range_up_to_thirty() {
        let c = default_constants();
        for rule in [ResidualRule::ParentNormalized, ResidualRule::Printed] {
            let mut r = Residuals::new(&c, rule);
            for n in 1..=30 {
                assert!(r.get(n).unwrap().is_positive(), "{rule:?} n={n}");
            }
        }
    }

    /// The two γ-valued conjuncts of an increment at counter m see
    /// `σᵐ₂·σᵐ⁺¹₂ + (1−σᵐ₁−σᵐ₂)(σᵐ⁺¹₂ + p)` and `σᵐ₂(1−q) + (1−σᵐ₁−σᵐ₂)p`
    /// respectively; both equal γ for the parent-normalized p because
    /// `σᵐ⁺¹₂(1−σᵐ₁) = (1−q)σᵐ₂`.
    #[test]
    fn both_gamma_conjuncts_agree() {
        let c = default_constants();
        for m in 0..12 {
            let s = c.sigma_n(m);
            let t = c.sigma_n(m + 1);
            let rest = Rat::one() - &s.x1 - &s.x2;
            assert_eq!(&t.x2 * &(Rat::one() - &s.x1), c.one_minus_q() * &s.x2);
            let p = p_n(&c, m + 1, ResidualRule::ParentNormalized)
                .unwrap()
                .value;
            let g2 = &s.x2 * &t.x2 + &rest * &(&t.x2 + &p);
            let g3 = &s.x2 * &c.one_minus_q() + &rest * &p;
            assert_eq!(g2, c.gamma);
            assert_eq!(g3, c.gamma);
            let printed = p_n(&c, m + 1, ResidualRule::Printed).unwrap().value;
            assert_ne!(&s.x2 * &c.one_minus_q() + &rest * &printed, c.gamma);
        }
    }

    #[test]
    fn rejects_index_zero() {
        let c = default_constants();
        assert!(p_n(&c, 0, ResidualRule::Printed).is_err());
    }
}
