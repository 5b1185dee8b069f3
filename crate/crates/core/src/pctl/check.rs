//! Exact bottom-up PCTL model checking.

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::{Cmp, Formula, PathFormula, StateFormula};
use super::chain::MarkovChain;
use crate::geometry::Vec2;
use crate::par::ExecMode;
use crate::rational::Rat;

pub type StateSet = Vec<bool>;

/// `Σ_{t ∈ target} P(s,t)`.
pub fn prob_next(mc: &MarkovChain, s: usize, target: &[bool]) -> Rat {
    mc.row(s)
        .iter()
        .filter(|(t, _)| target[*t])
        .map(|(_, p)| p)
        .sum()
}

pub fn prob_next_all(mc: &MarkovChain, target: &[bool], mode: ExecMode) -> Vec<Rat> {
    mode.map_range(mc.len(), |s| prob_next(mc, s, target))
}

/// Probabilities of `A U≤k B` for every state, by the step recurrence.
pub fn prob_until_bounded_all(
    mc: &MarkovChain,
    a: &[bool],
    b: &[bool],
    k: u32,
    mode: ExecMode,
) -> Vec<Rat> {
    let mut cur: Vec<Rat> = (0..mc.len())
        .map(|s| if b[s] { Rat::one() } else { Rat::zero() })
        .collect();
    for _ in 0..k {
        let prev = cur;
        cur = mode.map_range(mc.len(), |s| {
            if b[s] {
                Rat::one()
            } else if a[s] {
                mc.row(s).iter().map(|(t, p)| p * &prev[*t]).sum()
            } else {
                Rat::zero()
            }
        });
    }
    cur
}

pub fn prob_until_bounded(mc: &MarkovChain, s: usize, a: &[bool], b: &[bool], k: u32) -> Rat {
    prob_until_bounded_all(mc, a, b, k, ExecMode::Sequential)[s].clone()
}

/// States with positive probability of `A U B`: backward search from `B`
/// through `A`-states.
pub fn until_positive(mc: &MarkovChain, a: &[bool], b: &[bool]) -> StateSet {
    let mut pos = b.to_vec();
    let mut stack: Vec<usize> = (0..mc.len()).filter(|&s| b[s]).collect();
    while let Some(t) = stack.pop() {
        for &s in mc.predecessors(t) {
            if !pos[s] && a[s] {
                pos[s] = true;
                stack.push(s);
            }
        }
    }
    pos
}

/// Exact probabilities of `A U B` for every state.
///
/// States that cannot reach `B` through `A` get 0; the rest solve
/// `x_s = Σ_t P(s,t)·x_t` with `x = 1` on `B`, by Gaussian elimination.
pub fn prob_until_unbounded_all(mc: &MarkovChain, a: &[bool], b: &[bool]) -> Vec<Rat> {
    let pos = until_positive(mc, a, b);
    let unknown: Vec<usize> = (0..mc.len()).filter(|&s| pos[s] && !b[s]).collect();
    let mut col = vec![usize::MAX; mc.len()];
    for (i, &s) in unknown.iter().enumerate() {
        col[s] = i;
    }
    let n = unknown.len();
    let mut matrix: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut rhs: Vec<Rat> = Vec::with_capacity(n);
    for &s in &unknown {
        let mut row = vec![Rat::zero(); n];
        row[col[s]] = Rat::one();
        let mut r = Rat::zero();
        for (t, p) in mc.row(s) {
            if b[*t] {
                r += p;
            } else if col[*t] != usize::MAX {
                row[col[*t]] -= p;
            }
        }
        matrix.push(row);
        rhs.push(r);
    }
    let sol =
        solve(matrix, rhs).expect("system is nonsingular after removing probability-0 states");
    let mut out: Vec<Rat> = (0..mc.len())
        .map(|s| if b[s] { Rat::one() } else { Rat::zero() })
        .collect();
    for (i, &s) in unknown.iter().enumerate() {
        out[s] = sol[i].clone();
    }
    out
}

pub fn prob_until_unbounded(mc: &MarkovChain, s: usize, a: &[bool], b: &[bool]) -> Rat {
    prob_until_unbounded_all(mc, a, b)[s].clone()
}

/// Solves `M x = r` exactly. Pivots on the entry of smallest bit size in the
/// current column (ties broken by lowest row), so the elimination order is
/// deterministic. Returns `None` for singular systems.
pub fn solve(mut m: Vec<Vec<Rat>>, mut r: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = m.len();
    for c in 0..n {
        let pivot = (c..n)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| (m[i][c].bit_size(), i))?;
        m.swap(c, pivot);
        r.swap(c, pivot);
        let inv = m[c][c].recip().expect("nonzero pivot");
        for x in &mut m[c][c..] {
            *x = &*x * &inv;
        }
        r[c] = &r[c] * &inv;
        let pivot_row = m[c].clone();
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for (x, p) in m[i][c..].iter_mut().zip(&pivot_row[c..]) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
            let d = &f * &r[c];
            r[i] -= &d;
        }
    }
    Some(r)
}

/// `(P(X a), P(X b))` at `t`.
pub fn characteristic_vector(mc: &MarkovChain, t: usize, prop_a: &str, prop_b: &str) -> Vec2 {
    let sum = |p: &str| -> Rat {
        mc.row(t)
            .iter()
            .filter(|(u, _)| mc.has(*u, p))
            .map(|(_, pr)| pr)
            .sum()
    };
    Vec2::new(sum(prop_a), sum(prop_b))
}

/// Memoizing checker. Subformulae are cached by node identity, so formulae
/// built through one interner are evaluated once per shared node.
pub struct Checker<'a> {
    mc: &'a MarkovChain,
    mode: ExecMode,
    memo: HashMap<usize, (Formula, Arc<StateSet>)>,
}

impl<'a> Checker<'a> {
    pub fn new(mc: &'a MarkovChain) -> Checker<'a> {
        Checker::with_mode(mc, ExecMode::default())
    }

    pub fn with_mode(mc: &'a MarkovChain, mode: ExecMode) -> Checker<'a> {
        Checker {
            mc,
            mode,
            memo: HashMap::new(),
        }
    }

    pub fn chain(&self) -> &MarkovChain {
        self.mc
    }

    pub fn holds(&mut self, f: &Formula, s: usize) -> bool {
        self.sat(f)[s]
    }

    pub fn sat(&mut self, f: &Formula) -> Arc<StateSet> {
        let key = Arc::as_ptr(f) as usize;
        if let Some((_, set)) = self.memo.get(&key) {
            return set.clone();
        }
        let set = Arc::new(self.compute(f));
        self.memo.insert(key, (f.clone(), set.clone()));
        set
    }

    fn compute(&mut self, f: &Formula) -> StateSet {
        let n = self.mc.len();
        match &**f {
            StateFormula::True => vec![true; n],
            StateFormula::False => vec![false; n],
            StateFormula::Atom(a) => (0..n).map(|s| self.mc.has(s, a)).collect(),
            StateFormula::Not(g) => self.sat(g).iter().map(|x| !x).collect(),
            StateFormula::And(g, h) => {
                let (x, y) = (self.sat(g), self.sat(h));
                x.iter().zip(y.iter()).map(|(a, b)| *a && *b).collect()
            }
            StateFormula::Or(g, h) => {
                let (x, y) = (self.sat(g), self.sat(h));
                x.iter().zip(y.iter()).map(|(a, b)| *a || *b).collect()
            }
            StateFormula::Implies(g, h) => {
                let (x, y) = (self.sat(g), self.sat(h));
                x.iter().zip(y.iter()).map(|(a, b)| !*a || *b).collect()
            }
            StateFormula::ExactMatch(q) => {
                let mc = self.mc;
                self.mode.map_range(n, |s| {
                    let mine = q.iter().filter(|p| mc.has(s, p));
                    let mine: Vec<&String> = mine.collect();
                    mc.row(s)
                        .iter()
                        .all(|(t, _)| q.iter().filter(|p| mc.has(*t, p)).eq(mine.iter().copied()))
                })
            }
            StateFormula::Prob { cmp, bound, path } => self.prob(*cmp, bound, path),
        }
    }

    fn prob(&mut self, cmp: Cmp, bound: &Rat, path: &PathFormula) -> StateSet {
        if let PathFormula::Until(a, b) = path {
            let qualitative = bound.is_zero() && matches!(cmp, Cmp::Eq | Cmp::Gt | Cmp::Le);
            if qualitative {
                let (sa, sb) = (self.sat(a), self.sat(b));
                let pos = until_positive(self.mc, &sa, &sb);
                return match cmp {
                    Cmp::Gt => pos,
                    _ => pos.iter().map(|x| !x).collect(),
                };
            }
        }
        let probs = self.path_probabilities(path);
        self.mode.map_slice(&probs, |p| cmp.holds(p, bound))
    }

    /// Exact probability of the path formula at every state.
    pub fn path_probabilities(&mut self, path: &PathFormula) -> Vec<Rat> {
        match path {
            PathFormula::Next(g) => {
                let target = self.sat(g);
                prob_next_all(self.mc, &target, self.mode)
            }
            PathFormula::Until(a, b) => {
                let (sa, sb) = (self.sat(a), self.sat(b));
                prob_until_unbounded_all(self.mc, &sa, &sb)
            }
            PathFormula::BoundedUntil(a, b, k) => {
                let (sa, sb) = (self.sat(a), self.sat(b));
                prob_until_bounded_all(self.mc, &sa, &sb, *k, self.mode)
            }
        }
    }
}

/// One-shot satisfaction set.
pub fn sat_states(mc: &MarkovChain, f: &Formula) -> StateSet {
    Checker::new(mc).sat(f).as_ref().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pctl::chain::ChainBuilder;
    use crate::pctl::parse::parse_formula;

    fn split_chain() -> MarkovChain {
        ChainBuilder::new()
            .state("s", &["a"], &[("t", Rat::new(1, 2)), ("u", Rat::new(1, 2))])
            .state("t", &["b"], &[("t", Rat::one())])
            .state::<&str>("u", &[], &[("u", Rat::one())])
            .build()
            .unwrap()
    }

    fn gamble_chain() -> MarkovChain {
        ChainBuilder::new()
            .state(
                "s",
                &["a"],
                &[
                    ("goal", Rat::new(1, 3)),
                    ("s", Rat::new(1, 3)),
                    ("sink", Rat::new(1, 3)),
                ],
            )
            .state("goal", &["b"], &[("goal", Rat::one())])
            .state::<&str>("sink", &[], &[("sink", Rat::one())])
            .build()
            .unwrap()
    }

    fn set(mc: &MarkovChain, ids: &[&str]) -> StateSet {
        (0..mc.len()).map(|s| ids.contains(&mc.id(s))).collect()
    }

    #[test]
    fn next_probabilities() {
        let mc = ChainBuilder::new()
            .state("s", &["a"], &[("t", Rat::new(1, 3)), ("u", Rat::new(2, 3))])
            .state::<&str>("t", &[], &[("t", Rat::one())])
            .state::<&str>("u", &[], &[("u", Rat::one())])
            .build()
            .unwrap();
        assert_eq!(prob_next(&mc, 1, &set(&mc, &["t"])), Rat::one());
        assert_eq!(prob_next(&mc, 0, &set(&mc, &["t"])), Rat::new(1, 3));
        assert_eq!(prob_next(&mc, 0, &set(&mc, &[])), Rat::zero());
    }

    #[test]
    fn bounded_until_examples() {
        let mc = split_chain();
        let a = set(&mc, &["s"]);
        let b = set(&mc, &["t"]);
        assert_eq!(prob_until_bounded(&mc, 1, &a, &b, 5), Rat::one());
        assert_eq!(prob_until_bounded(&mc, 0, &a, &b, 0), Rat::zero());
        assert_eq!(prob_until_bounded(&mc, 0, &a, &b, 1), Rat::new(1, 2));
    }

    #[test]
    fn unbounded_until_examples() {
        let mc = gamble_chain();
        let all = vec![true; 3];
        let b = set(&mc, &["goal"]);
        assert_eq!(prob_until_unbounded(&mc, 0, &all, &b), Rat::new(1, 2));
        let none_a = vec![false; 3];
        assert_eq!(prob_until_unbounded(&mc, 2, &none_a, &b), Rat::zero());
        assert_eq!(prob_until_unbounded(&mc, 2, &all, &b), Rat::zero());
    }

    #[test]
    fn solver_singular_and_regular() {
        let m = vec![
            vec![Rat::int(2), Rat::int(1)],
            vec![Rat::int(1), Rat::int(3)],
        ];
        let r = vec![Rat::int(3), Rat::int(5)];
        assert_eq!(solve(m, r).unwrap(), vec![Rat::new(4, 5), Rat::new(7, 5)]);
        let sing = vec![
            vec![Rat::int(1), Rat::int(2)],
            vec![Rat::int(2), Rat::int(4)],
        ];
        assert!(solve(sing, vec![Rat::one(), Rat::one()]).is_none());
    }

    #[test]
    fn sat_examples() {
        let mc = gamble_chain();
        let f = parse_formula("a").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true, false, false]);
        let f = parse_formula("P=1 [ X true ]").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true; 3]);
        let f = parse_formula("P=1/2 [ F b ]").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true, false, false]);
        let f = parse_formula("P>0 [ F b ]").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true, true, false]);
        let f = parse_formula("P=1 [ G !b ]").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![false, false, true]);
        let f = parse_formula("nosuch | P>=1/3 [ X nosuch ]").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![false; 3]);
    }

    #[test]
    fn always_matches_its_expansion() {
        let mc = gamble_chain();
        let g = parse_formula("P=1 [ G !b ]").unwrap();
        let e = parse_formula("P=0 [ F !!b ]").unwrap();
        assert_eq!(sat_states(&mc, &g), sat_states(&mc, &e));
    }

    #[test]
    fn exact_match_semantics() {
        let mc = ChainBuilder::new()
            .state("s", &["h", "a"], &[("s", Rat::one())])
            .state("t", &["h", "a"], &[("u", Rat::one())])
            .state("u", &["h", "a", "z"], &[("u", Rat::one())])
            .build()
            .unwrap();
        let f = parse_formula("same{a,h}").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true, true, true]);
        let f = parse_formula("same{a,h,z}").unwrap();
        assert_eq!(sat_states(&mc, &f), vec![true, false, true]);
    }

    #[test]
    fn modes_agree_on_probabilities() {
        let mc = gamble_chain();
        let f = parse_formula("P>=1/3 [ F<=2 b ]").unwrap();
        let seq = Checker::with_mode(&mc, ExecMode::Sequential).sat(&f);
        let par = Checker::with_mode(&mc, ExecMode::Parallel).sat(&f);
        assert_eq!(seq, par);
    }

    #[test]
    fn characteristic_vector_basics() {
        let mc = split_chain();
        assert_eq!(
            characteristic_vector(&mc, 0, "a", "b"),
            Vec2::of((0, 1), (1, 2))
        );
        assert_eq!(characteristic_vector(&mc, 2, "a", "b"), Vec2::zero());
    }
}
