use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rational::Rat;

/// Shared, immutable formula node. Structurally equal subtrees built through
/// the same [`Interner`] are pointer-equal, which the checker exploits.
pub type Formula = Arc<StateFormula>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

impl Cmp {
    pub fn holds(self, value: &Rat, bound: &Rat) -> bool {
        match self {
            Cmp::Ge => value >= bound,
            Cmp::Gt => value > bound,
            Cmp::Le => value <= bound,
            Cmp::Lt => value < bound,
            Cmp::Eq => value == bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Eq => "=",
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateFormula {
    True,
    False,
    Atom(String),
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Implies(Formula, Formula),
    Prob {
        cmp: Cmp,
        bound: Rat,
        path: PathFormula,
    },
    /// Holds where every successor agrees with the state on these propositions.
    ExactMatch(BTreeSet<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathFormula {
    Next(Formula),
    Until(Formula, Formula),
    BoundedUntil(Formula, Formula, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("probability bound {0} outside [0,1]")]
pub struct BoundError(pub Rat);

impl StateFormula {
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            StateFormula::True
            | StateFormula::False
            | StateFormula::Atom(_)
            | StateFormula::ExactMatch(_) => vec![],
            StateFormula::Not(f) => vec![f],
            StateFormula::And(a, b) | StateFormula::Or(a, b) | StateFormula::Implies(a, b) => {
                vec![a, b]
            }
            StateFormula::Prob { path, .. } => path.operands(),
        }
    }

    /// All atoms, including the propositions named by `ExactMatch`.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        collect_atoms(self, &mut out, &mut seen);
        out
    }

    /// Number of distinct nodes in the shared DAG.
    pub fn dag_size(self: &Arc<Self>) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if seen.insert(Arc::as_ptr(&f) as usize) {
                stack.extend(f.children().into_iter().cloned());
            }
        }
        seen.len()
    }
}

fn collect_atoms(
    f: &StateFormula,
    out: &mut BTreeSet<String>,
    seen: &mut std::collections::HashSet<usize>,
) {
    if !seen.insert(f as *const StateFormula as usize) {
        return;
    }
    match f {
        StateFormula::Atom(a) => {
            out.insert(a.clone());
        }
        StateFormula::ExactMatch(q) => out.extend(q.iter().cloned()),
        _ => {
            for c in f.children() {
                collect_atoms(c, out, seen);
            }
        }
    }
}

impl PathFormula {
    pub fn operands(&self) -> Vec<&Formula> {
        match self {
            PathFormula::Next(f) => vec![f],
            PathFormula::Until(a, b) | PathFormula::BoundedUntil(a, b, _) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum NodeKey {
    True,
    False,
    Atom(String),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Prob(Cmp, Rat, u8, usize, usize, u32),
    Exact(BTreeSet<String>),
}

fn id(f: &Formula) -> usize {
    Arc::as_ptr(f) as usize
}

/// Hash-consing formula factory. Every constructor returns the existing node
/// when a structurally identical one was already built.
#[derive(Default)]
pub struct Interner {
    nodes: HashMap<NodeKey, Formula>,
}

impl Interner {
    pub fn new() -> Interner {
        Interner::default()
    }

    fn key_of(node: &StateFormula) -> NodeKey {
        match node {
            StateFormula::True => NodeKey::True,
            StateFormula::False => NodeKey::False,
            StateFormula::Atom(a) => NodeKey::Atom(a.clone()),
            StateFormula::Not(f) => NodeKey::Not(id(f)),
            StateFormula::And(a, b) => NodeKey::And(id(a), id(b)),
            StateFormula::Or(a, b) => NodeKey::Or(id(a), id(b)),
            StateFormula::Implies(a, b) => NodeKey::Implies(id(a), id(b)),
            StateFormula::Prob { cmp, bound, path } => {
                let (tag, l, r, k) = match path {
                    PathFormula::Next(f) => (0, id(f), 0, 0),
                    PathFormula::Until(a, b) => (1, id(a), id(b), 0),
                    PathFormula::BoundedUntil(a, b, k) => (2, id(a), id(b), *k),
                };
                NodeKey::Prob(*cmp, bound.clone(), tag, l, r, k)
            }
            StateFormula::ExactMatch(q) => NodeKey::Exact(q.clone()),
        }
    }

    /// Interns a node whose children are already interned.
    pub fn mk(&mut self, node: StateFormula) -> Formula {
        let key = Interner::key_of(&node);
        self.nodes
            .entry(key)
            .or_insert_with(|| Arc::new(node))
            .clone()
    }

    /// Rebuilds an arbitrary formula so that equal subtrees share nodes.
    pub fn intern(&mut self, f: &Formula) -> Formula {
        let mut memo: HashMap<usize, Formula> = HashMap::new();
        self.intern_rec(f, &mut memo)
    }

    fn intern_rec(&mut self, f: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(done) = memo.get(&id(f)) {
            return done.clone();
        }
        let rebuilt = match &**f {
            StateFormula::Not(a) => {
                let a = self.intern_rec(a, memo);
                StateFormula::Not(a)
            }
            StateFormula::And(a, b) => {
                let (a, b) = (self.intern_rec(a, memo), self.intern_rec(b, memo));
                StateFormula::And(a, b)
            }
            StateFormula::Or(a, b) => {
                let (a, b) = (self.intern_rec(a, memo), self.intern_rec(b, memo));
                StateFormula::Or(a, b)
            }
            StateFormula::Implies(a, b) => {
                let (a, b) = (self.intern_rec(a, memo), self.intern_rec(b, memo));
                StateFormula::Implies(a, b)
            }
            StateFormula::Prob { cmp, bound, path } => {
                let path = match path {
                    PathFormula::Next(a) => PathFormula::Next(self.intern_rec(a, memo)),
                    PathFormula::Until(a, b) => {
                        PathFormula::Until(self.intern_rec(a, memo), self.intern_rec(b, memo))
                    }
                    PathFormula::BoundedUntil(a, b, k) => PathFormula::BoundedUntil(
                        self.intern_rec(a, memo),
                        self.intern_rec(b, memo),
                        *k,
                    ),
                };
                StateFormula::Prob {
                    cmp: *cmp,
                    bound: bound.clone(),
                    path,
                }
            }
            leaf => leaf.clone(),
        };
        let out = self.mk(rebuilt);
        memo.insert(id(f), out.clone());
        out
    }

    pub fn tt(&mut self) -> Formula {
        self.mk(StateFormula::True)
    }

    pub fn ff(&mut self) -> Formula {
        self.mk(StateFormula::False)
    }

    pub fn atom(&mut self, name: &str) -> Formula {
        self.mk(StateFormula::Atom(name.to_string()))
    }

    pub fn not(&mut self, f: Formula) -> Formula {
        self.mk(StateFormula::Not(f))
    }

    pub fn and(&mut self, a: Formula, b: Formula) -> Formula {
        self.mk(StateFormula::And(a, b))
    }

    pub fn or(&mut self, a: Formula, b: Formula) -> Formula {
        self.mk(StateFormula::Or(a, b))
    }

    pub fn implies(&mut self, a: Formula, b: Formula) -> Formula {
        self.mk(StateFormula::Implies(a, b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn and_all(&mut self, fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => self.tt(),
            Some(first) => it.fold(first, |acc, f| self.and(acc, f)),
        }
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn or_any(&mut self, fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => self.ff(),
            Some(first) => it.fold(first, |acc, f| self.or(acc, f)),
        }
    }

    pub fn try_prob(
        &mut self,
        cmp: Cmp,
        bound: Rat,
        path: PathFormula,
    ) -> Result<Formula, BoundError> {
        if !bound.in_unit_interval() {
            return Err(BoundError(bound));
        }
        Ok(self.mk(StateFormula::Prob { cmp, bound, path }))
    }

    /// Panics on a bound outside `[0,1]`; compiler-internal use.
    pub fn prob(&mut self, cmp: Cmp, bound: Rat, path: PathFormula) -> Formula {
        self.try_prob(cmp, bound, path).expect("bound in [0,1]")
    }

    /// `P cmp r [ X f ]`
    pub fn next(&mut self, cmp: Cmp, bound: Rat, f: Formula) -> Formula {
        self.prob(cmp, bound, PathFormula::Next(f))
    }

    /// `P cmp r [ F<=k f ]`
    pub fn eventually_within(&mut self, cmp: Cmp, bound: Rat, k: u32, f: Formula) -> Formula {
        let t = self.tt();
        self.prob(cmp, bound, PathFormula::BoundedUntil(t, f, k))
    }

    /// `P cmp r [ F f ]`
    pub fn eventually(&mut self, cmp: Cmp, bound: Rat, f: Formula) -> Formula {
        let t = self.tt();
        self.prob(cmp, bound, PathFormula::Until(t, f))
    }

    /// `G=1 f`, i.e. `P=0 [ F !f ]`.
    pub fn always(&mut self, f: Formula) -> Formula {
        let nf = self.not(f);
        self.eventually(Cmp::Eq, Rat::zero(), nf)
    }

    pub fn exact_match<S: AsRef<str>>(&mut self, props: impl IntoIterator<Item = S>) -> Formula {
        let set = props.into_iter().map(|s| s.as_ref().to_string()).collect();
        self.mk(StateFormula::ExactMatch(set))
    }
}

/// Recognizes `P=0 [ F !f ]` and returns `f`.
pub fn as_always(f: &StateFormula) -> Option<&Formula> {
    if let StateFormula::Prob {
        cmp: Cmp::Eq,
        bound,
        path: PathFormula::Until(lhs, rhs),
    } = f
    {
        if bound.is_zero() && matches!(**lhs, StateFormula::True) {
            if let StateFormula::Not(inner) = &**rhs {
                return Some(inner);
            }
        }
    }
    None
}
