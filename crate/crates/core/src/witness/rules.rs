//! Successor distributions of a single projection `[ι, 𝓛, n]`.

use super::ids::{Letter, Mark, Proj};
use super::pn::Residuals;
use super::WitnessError;
use crate::geometry::{GeometryConstants, Vec2};
use crate::minsky::Computation;
use crate::rational::Rat;

pub(crate) type Dist = Vec<(Proj, Rat)>;

/// A periodic computation viewed as `(label, counter)` pairs for one side.
#[derive(Debug, Clone)]
pub(crate) struct Omega {
    configs: Vec<(usize, u64)>,
    alpha: usize,
}

impl Omega {
    /// Side `side` (0-based counter index) of `w`.
    pub(crate) fn new(w: &Computation, side: usize) -> Result<Omega, WitnessError> {
        let (alpha, beta) = w.period().ok_or(WitnessError::Aperiodic)?;
        let configs = w.configurations[..beta]
            .iter()
            .map(|c| (c.label, c.counters[side]))
            .collect();
        Ok(Omega { configs, alpha })
    }

    pub(crate) fn get(&self, k: usize) -> Option<(usize, u64)> {
        self.configs.get(k).copied()
    }

    pub(crate) fn next(&self, k: usize) -> usize {
        if k + 1 == self.configs.len() {
            self.alpha
        } else {
            k + 1
        }
    }
}

/// Everything the rules read: constants, the `σ` ladder and `pₙ`.
pub(crate) struct Rules {
    c: GeometryConstants,
    ladder: Vec<Vec2>,
    residuals: Residuals,
}

impl Rules {
    pub(crate) fn new(c: &GeometryConstants, residuals: Residuals) -> Rules {
        Rules {
            c: c.clone(),
            ladder: vec![c.kappa.clone()],
            residuals,
        }
    }

    fn sigma(&mut self, n: u64) -> Vec2 {
        let n = n as usize;
        while self.ladder.len() <= n {
            let last = self.ladder.last().expect("ladder starts at kappa");
            let next = self.c.sigma(last).expect("W is closed under sigma");
            self.ladder.push(next);
        }
        self.ladder[n].clone()
    }

    /// `[h,a,S]` at zero, `[⋆,{a,S},n−1]` otherwise.
    fn a_successor(r: usize, n: u64) -> Proj {
        if n == 0 {
            Proj::free(Letter::A, r + 1, None)
        } else {
            Proj::star(Letter::A, r + 1, None, n - 1)
        }
    }

    fn counter(t: &Proj) -> Result<u64, WitnessError> {
        t.n.ok_or_else(|| WitnessError::NoRule(t.to_string()))
    }

    /// Successors of `t` with its label honoured (Rule I for labeled states,
    /// Rules II–IV otherwise).
    pub(crate) fn successors(&mut self, t: &Proj, omega: &Omega) -> Result<Dist, WitnessError> {
        if t.h {
            return Ok(vec![(t.clone(), Rat::one())]);
        }
        match (t.iota, t.label, t.letter) {
            (Some(k), Some(j), Letter::A | Letter::B) => self.rule_one(t, k, j, omega),
            (None, None, Letter::A) => self.rule_two(t),
            (None, None, Letter::C) => self.rule_three(t),
            _ => Err(WitnessError::NoRule(t.to_string())),
        }
    }

    fn rule_one(
        &mut self,
        t: &Proj,
        k: usize,
        j: usize,
        omega: &Omega,
    ) -> Result<Dist, WitnessError> {
        let n = Self::counter(t)?;
        if omega.get(k) != Some((j, n)) {
            return Err(WitnessError::OffRun(t.to_string()));
        }
        let k2 = omega.next(k);
        let (j2, n2) = omega.get(k2).expect("next index lies inside the period");
        let v = self.sigma(n);
        let r = t.r;
        let one = Rat::one();
        let oq = self.c.one_minus_q();
        let rest = &self.c.q - &v.x1 - &v.x2;
        let hce = Proj::free(Letter::C, r + 2, Some(Mark::E));
        let hc = Proj::free(Letter::C, r + 2, None);
        let out = if n > 0 && n2 == n - 1 {
            vec![
                (Proj::labeled(k2, Letter::A, r + 1, j2, n2), v.x1),
                (Proj::free(Letter::B, r + 2, None), v.x2),
                (hce, oq),
                (hc, rest),
            ]
        } else if n == 0 && n2 == 0 {
            vec![
                (Proj::free(Letter::A, r + 1, None), v.x1),
                (Proj::labeled(k2, Letter::B, r + 2, j2, 0), v.x2),
                (hce, oq),
                (hc, rest),
            ]
        } else if n2 == n + 1 {
            vec![
                (Self::a_successor(r, n), v.x1),
                (Proj::labeled(k2, Letter::B, r + 2, j2, n2), v.x2),
                (Proj::star(Letter::C, r + 2, Some(Mark::E), n2), oq),
                (Proj::star(Letter::C, r + 2, None, n2), rest),
            ]
        } else {
            return Err(WitnessError::OffRun(t.to_string()));
        };
        debug_assert_eq!(out.iter().map(|(_, p)| p).sum::<Rat>(), one);
        Ok(out)
    }

    fn rule_two(&mut self, t: &Proj) -> Result<Dist, WitnessError> {
        let n = Self::counter(t)?;
        let v = self.sigma(n);
        let rest = Rat::one() - &v.x1 - &v.x2;
        Ok(vec![
            (Self::a_successor(t.r, n), v.x1),
            (Proj::free(Letter::B, t.r + 2, None), v.x2),
            (Proj::free(Letter::C, t.r + 2, None), rest),
        ])
    }

    fn rule_three(&mut self, t: &Proj) -> Result<Dist, WitnessError> {
        let n = Self::counter(t)?;
        if n == 0 {
            return Err(WitnessError::NoRule(t.to_string()));
        }
        let v = self.sigma(n);
        let p = self.residuals.get(n as usize)?;
        let rest = Rat::one() - &v.x1 - &v.x2 - &p;
        Ok(vec![
            (Proj::star(Letter::A, t.r + 1, None, n - 1), v.x1),
            (Proj::free(Letter::B, t.r + 2, None), v.x2),
            (Proj::free(Letter::C, t.r + 2, Some(Mark::D)), p),
            (Proj::free(Letter::C, t.r + 2, None), rest),
        ])
    }

    /// A labeled state whose partner side does not carry the same label
    /// gives its label up: the counter is kept, the label dropped.
    pub(crate) fn abandon(&mut self, t: &Proj) -> Result<Dist, WitnessError> {
        let n = Self::counter(t)?;
        if t.label.is_none() || t.h {
            return Err(WitnessError::NoRule(t.to_string()));
        }
        let v = self.sigma(n);
        let rest = &self.c.q - &v.x1 - &v.x2;
        Ok(vec![
            (Self::a_successor(t.r, n), v.x1),
            (Proj::free(Letter::B, t.r + 2, None), v.x2),
            (
                Proj::free(Letter::C, t.r + 2, Some(Mark::E)),
                self.c.one_minus_q(),
            ),
            (Proj::free(Letter::C, t.r + 2, None), rest),
        ])
    }
}
