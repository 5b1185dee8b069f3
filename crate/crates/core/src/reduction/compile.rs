use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::props::{l, r, PropUniverse, Side};
use crate::geometry::GeometryConstants;
use crate::minsky::{Instruction, Machine, Partition, SyncProduct};
use crate::pctl::{fragment_lint, print_formula, Cmp, Formula, Interner, LintReport};
use crate::rational::Rat;

/// Upper bound in the second conjunct of `Interval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalBound {
    /// `X≤κ₁ a`, the bound the correctness argument relies on.
    #[default]
    Kappa1,
    /// `X≤κ₂ a`, the literal variant; UNSAT on the ladder witnesses.
    Kappa2,
}

/// Placement of the three `F²` conjuncts of an increment step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncScope {
    #[default]
    TopLevel,
    UnderNonZero,
}

/// Shape of the product's labeled-transient formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LTransShape {
    /// Additionally requires some label of this side, so unlabeled states
    /// cannot satisfy it vacuously.
    #[default]
    Guarded,
    /// The two implications only.
    Implications,
}

/// Body of the recurrence conjunct `G=1((ℓ₁¹∧ℓ₁²) ⇒ …)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecurrenceShape {
    /// `P>0 [ X P>0 [ F (ℓ₁¹∧ℓ₁²) ] ]`: a later return is required.
    #[default]
    NextThenEventually,
    /// `P>0 [ F (ℓ₁¹∧ℓ₁²) ]`, which the current state already satisfies.
    Eventually,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompileOptions {
    pub interval: IntervalBound,
    pub inc_scope: IncScope,
    pub ltrans: LTransShape,
    pub recurrence: RecurrenceShape,
}

impl CompileOptions {
    /// The literal alternative of every variant.
    pub fn strict_paper() -> CompileOptions {
        CompileOptions {
            interval: IntervalBound::Kappa2,
            inc_scope: IncScope::UnderNonZero,
            ltrans: LTransShape::Implications,
            recurrence: RecurrenceShape::Eventually,
        }
    }

    pub fn is_strict(&self) -> bool {
        *self == CompileOptions::strict_paper()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Parameterized,
    OneCounter,
    Product,
}

/// A compiled formula plus what it was compiled from.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    pub formula: Formula,
    pub family: Family,
    pub universe: PropUniverse,
    pub constants: GeometryConstants,
    pub options: CompileOptions,
    /// `(x, y)` of a parameterized instance.
    pub instance: Option<(Rat, Rat)>,
    pub n: Option<usize>,
    pub machines: Vec<Machine>,
    pub partition: Option<Partition>,
    pub recurrence: bool,
}

impl CompiledFormula {
    pub fn text(&self) -> String {
        print_formula(&self.formula)
    }

    pub fn lint(&self) -> LintReport {
        fragment_lint(&self.formula)
    }

    /// Atoms mentioned by the formula that lie outside its universe.
    pub fn stray_atoms(&self) -> BTreeSet<String> {
        let allowed = self.universe.atoms();
        self.formula
            .atoms()
            .into_iter()
            .filter(|a| !allowed.contains(a))
            .collect()
    }

    /// Metadata written next to the formula text.
    pub fn sidecar(&self) -> serde_json::Value {
        json!({
            "family": self.family,
            "universe": self.universe,
            "constants": {
                "q": self.constants.q,
                "sqrt_4q_minus_3": self.constants.sqrt_disc,
                "kappa": [self.constants.kappa.x1, self.constants.kappa.x2],
                "gamma": self.constants.gamma,
            },
            "options": self.options,
            "n": self.n,
            "x": self.instance.as_ref().map(|p| p.0.clone()),
            "y": self.instance.as_ref().map(|p| p.1.clone()),
            "machines": self.machines.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "partition": self.partition,
            "recurrence": self.recurrence,
            "dag_size": self.formula.dag_size(),
        })
    }
}

/// `Step[L]`: every target set replaced by `L`.
fn substitute(ins: &Instruction, targets: &[usize]) -> Instruction {
    match ins {
        Instruction::Inc { counter, .. } => Instruction::Inc {
            counter: *counter,
            goto: targets.to_vec(),
        },
        Instruction::JzDec { counter, .. } => Instruction::JzDec {
            counter: *counter,
            zero: targets.to_vec(),
            nonzero: targets.to_vec(),
        },
    }
}

fn props(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

struct Builder {
    ix: Interner,
    c: GeometryConstants,
    opts: CompileOptions,
}

impl Builder {
    fn new(c: &GeometryConstants, opts: CompileOptions) -> Builder {
        Builder {
            ix: Interner::new(),
            c: c.clone(),
            opts,
        }
    }

    fn at(&mut self, s: &Side, base: &str) -> Formula {
        let name = s.name(base);
        self.ix.atom(&name)
    }

    /// `Ex⟨B⟩` over the side's universe.
    fn ex(&mut self, s: &Side, b: &[String]) -> Formula {
        let want: BTreeSet<String> = b.iter().map(|p| s.name(p)).collect();
        debug_assert!(want.iter().all(|p| s.universe().contains(p)), "{want:?}");
        let lits: Vec<Formula> = s
            .universe()
            .iter()
            .map(|p| {
                let a = self.ix.atom(p);
                if want.contains(p) {
                    a
                } else {
                    self.ix.not(a)
                }
            })
            .collect();
        self.ix.and_all(lits)
    }

    fn x1(&mut self, f: Formula) -> Formula {
        self.ix.next(Cmp::Eq, Rat::one(), f)
    }

    fn f2(&mut self, bound: Rat, f: Formula) -> Formula {
        self.ix.eventually_within(Cmp::Eq, bound, 2, f)
    }

    fn zero(&mut self, s: &Side) -> Formula {
        let (a, b) = (self.at(s, "a"), self.at(s, "b"));
        let xa = self.ix.next(Cmp::Eq, self.c.kappa.x1.clone(), a);
        let xb = self.ix.next(Cmp::Eq, self.c.kappa.x2.clone(), b);
        self.ix.and(xa, xb)
    }

    fn interval(&mut self, s: &Side) -> Formula {
        let (a, b) = (self.at(s, "a"), self.at(s, "b"));
        let upper = match self.opts.interval {
            IntervalBound::Kappa1 => self.c.kappa.x1.clone(),
            IntervalBound::Kappa2 => self.c.kappa.x2.clone(),
        };
        let lo = self.ix.next(Cmp::Gt, self.c.iq_lower(), a.clone());
        let hi = self.ix.next(Cmp::Le, upper, a);
        let pb = self.ix.next(Cmp::Gt, Rat::zero(), b);
        self.ix.and_all([lo, hi, pb])
    }

    fn eq(&mut self, s: &Side, i: usize) -> Formula {
        let s2 = self.at(s, &r(i + 2));
        let s3 = self.at(s, &r(i + 3));
        let b = self.at(s, "b");
        let first = self.f2(self.c.q.clone(), s2.clone());
        let nb = self.ix.not(b.clone());
        let l = self.ix.and(s2, nb);
        let rt = self.ix.and(s3, b);
        let either = self.ix.or(l, rt);
        let second = self.f2(self.c.q.clone(), either);
        self.ix.and(first, second)
    }

    fn free(&mut self, s: &Side) -> Formula {
        let h = self.at(s, "h");
        let same = self.ix.exact_match(s.universe());
        self.ix.and(h, same)
    }

    /// `X=1 (Ex⟨B₁⟩ ∨ …)`
    fn all_next_in(&mut self, s: &Side, sets: &[Vec<String>]) -> Formula {
        let exs: Vec<Formula> = sets.iter().map(|b| self.ex(s, b)).collect();
        let any = self.ix.or_any(exs);
        self.x1(any)
    }

    fn fin(&mut self, s: &Side) -> Formula {
        let zero = self.zero(s);
        let mut ds = Vec::new();
        for i in 0..5 {
            let (s1, s2) = (r(i + 1), r(i + 2));
            let here = self.ex(s, &[String::from("a"), r(i)]);
            let fsuc = self.all_next_in(
                s,
                &[
                    props(&["h", "a", &s1]),
                    props(&["h", "b", &s2]),
                    props(&["h", "c", &s2]),
                ],
            );
            ds.push(self.ix.and_all([here, fsuc, zero.clone()]));
        }
        self.ix.or_any(ds)
    }

    fn trans(&mut self, s: &Side) -> Formula {
        let interval = self.interval(s);
        let mut ds = Vec::new();
        for i in 0..5 {
            let (s1, s2) = (r(i + 1), r(i + 2));
            let here = self.ex(s, &[String::from("a"), r(i)]);
            let suc = self.all_next_in(
                s,
                &[
                    props(&["a", &s1]),
                    props(&["h", "b", &s2]),
                    props(&["h", "c", &s2]),
                ],
            );
            let eq = self.eq(s, i);
            ds.push(self.ix.and_all([here, suc, interval.clone(), eq]));
        }
        self.ix.or_any(ds)
    }

    fn ctrans(&mut self, s: &Side) -> Formula {
        let interval = self.interval(s);
        let (c, h) = (self.at(s, "c"), self.at(s, "h"));
        let nh = self.ix.not(h);
        let mut ds = Vec::new();
        for i in 0..5 {
            let (s1, s2) = (r(i + 1), r(i + 2));
            let ri = self.at(s, &r(i));
            let csuc = self.all_next_in(
                s,
                &[
                    props(&["a", &s1]),
                    props(&["h", "b", &s2]),
                    props(&["h", "c", &s2]),
                    props(&["h", "c", &s2, "d"]),
                ],
            );
            let eq = self.eq(s, i);
            ds.push(
                self.ix
                    .and_all([c.clone(), ri, nh.clone(), csuc, interval.clone(), eq]),
            );
        }
        self.ix.or_any(ds)
    }

    /// `⋁_{ℓ'∈L} X=1(Ex⟨fixed…⟩ ∨ Ex⟨labeled,ℓ'⟩) ∧ X=1−q Ex⟨residual⟩`
    fn labeled_successors(
        &mut self,
        s: &Side,
        fixed: &[Vec<String>],
        labeled: &[String],
        targets: &[usize],
        residual: &[String],
    ) -> Formula {
        let mut ds = Vec::new();
        for &t in targets {
            let mut sets = fixed.to_vec();
            let mut lab = labeled.to_vec();
            lab.push(l(t));
            sets.push(lab);
            ds.push(self.all_next_in(s, &sets));
        }
        let any = self.ix.or_any(ds);
        let res = self.ex(s, residual);
        let res = self.ix.next(Cmp::Eq, self.c.one_minus_q(), res);
        self.ix.and(any, res)
    }

    fn step(&mut self, s: &Side, i: usize, ins: &Instruction) -> Formula {
        let (s1, s2, s3, s4) = (r(i + 1), r(i + 2), r(i + 3), r(i + 4));
        let zero = self.zero(s);
        let nonzero = self.ix.not(zero.clone());
        let interval = self.interval(s);
        let eq = self.eq(s, i);
        match ins {
            Instruction::JzDec {
                zero: lz,
                nonzero: lnz,
                ..
            } => {
                let hce = props(&["h", "c", &s2, "e"]);
                let zsuc = self.labeled_successors(
                    s,
                    &[
                        props(&["h", "a", &s1]),
                        props(&["h", "c", &s2]),
                        hce.clone(),
                    ],
                    &props(&["b", &s2]),
                    lz,
                    &hce,
                );
                let psuc = self.labeled_successors(
                    s,
                    &[
                        props(&["h", "b", &s2]),
                        props(&["h", "c", &s2]),
                        hce.clone(),
                    ],
                    &props(&["a", &s1]),
                    lnz,
                    &hce,
                );
                let b = self.at(s, "b");
                let b_zero = self.ix.implies(b, zero.clone());
                let b_zero = self.x1(b_zero);
                let zbranch = self.ix.and(zsuc, b_zero);
                let zpart = self.ix.implies(zero, zbranch);
                let pbranch = self.ix.and_all([psuc, interval, eq]);
                let ppart = self.ix.implies(nonzero, pbranch);
                self.ix.and(zpart, ppart)
            }
            Instruction::Inc { goto, .. } => {
                let ce = props(&["c", &s2, "e"]);
                let izsuc = self.labeled_successors(
                    s,
                    &[props(&["h", "a", &s1]), props(&["c", &s2]), ce.clone()],
                    &props(&["b", &s2]),
                    goto,
                    &ce,
                );
                let ipsuc = self.labeled_successors(
                    s,
                    &[props(&["a", &s1]), props(&["c", &s2]), ce.clone()],
                    &props(&["b", &s2]),
                    goto,
                    &ce,
                );
                let (a, b, c, d, e) = (
                    self.at(s, "a"),
                    self.at(s, "b"),
                    self.at(s, "c"),
                    self.at(s, "d"),
                    self.at(s, "e"),
                );
                let (r3, r4) = (self.at(s, &s3), self.at(s, &s4));
                let a3 = self.ix.and(a, r3);
                let g1 = self.f2(self.c.one_minus_q(), a3);
                let b4 = self.ix.and(b, r4.clone());
                let b4d = self.ix.or(b4, d.clone());
                let g2 = self.f2(self.c.gamma.clone(), b4d);
                let c4e = self.ix.and_all([c, r4, e]);
                let c4ed = self.ix.or(c4e, d);
                let g3 = self.f2(self.c.gamma.clone(), c4ed);
                let zpart = self.ix.implies(zero, izsuc);
                match self.opts.inc_scope {
                    IncScope::TopLevel => {
                        let pbranch = self.ix.and_all([ipsuc, interval, eq]);
                        let ppart = self.ix.implies(nonzero, pbranch);
                        self.ix.and_all([zpart, ppart, g1, g2, g3])
                    }
                    IncScope::UnderNonZero => {
                        let pbranch = self.ix.and_all([ipsuc, interval, eq, g1, g2, g3]);
                        let ppart = self.ix.implies(nonzero, pbranch);
                        self.ix.and(zpart, ppart)
                    }
                }
            }
        }
    }

    /// `⋁ᵢ ⋁ⱼ ⋁ₓ (Ex⟨x,rᵢ,ℓⱼ⟩ ∧ step(i, j))`
    fn labeled_transient(
        &mut self,
        s: &Side,
        m: usize,
        mut step: impl FnMut(&mut Builder, usize, usize) -> Formula,
    ) -> Formula {
        let mut ds = Vec::new();
        for i in 0..5 {
            for j in 1..=m {
                let st = step(self, i, j);
                for x in ["a", "b"] {
                    let here = self.ex(s, &[x.to_string(), r(i), l(j)]);
                    ds.push(self.ix.and(here, st.clone()));
                }
            }
        }
        self.ix.or_any(ds)
    }

    /// `STEPᵏ`: this side's own step when it owns the label, otherwise its
    /// step with the other side's targets substituted.
    fn product_step(
        &mut self,
        s: &Side,
        other: &Side,
        mine: &Instruction,
        theirs: &Instruction,
        owned: bool,
        i: usize,
    ) -> Formula {
        if owned {
            return self.step(s, i, mine);
        }
        match theirs {
            Instruction::JzDec { zero, nonzero, .. } => {
                let oz = self.zero(other);
                let onz = self.ix.not(oz.clone());
                let sz = self.step(s, i, &substitute(mine, zero));
                let snz = self.step(s, i, &substitute(mine, nonzero));
                let a = self.ix.implies(oz, sz);
                let b = self.ix.implies(onz, snz);
                self.ix.and(a, b)
            }
            Instruction::Inc { goto, .. } => self.step(s, i, &substitute(mine, goto)),
        }
    }

    fn init(&mut self, s: &Side) -> Formula {
        let here = self.ex(s, &props(&["a", "r0", "l1"]));
        let zero = self.zero(s);
        self.ix.and(here, zero)
    }

    fn opsuc_like(&mut self, s: &Side, i: usize, first: Vec<String>) -> Formula {
        let s2 = r(i + 2);
        let hce = props(&["h", "c", &s2, "e"]);
        let all = self.all_next_in(
            s,
            &[
                first,
                props(&["h", "b", &s2]),
                props(&["h", "c", &s2]),
                hce.clone(),
            ],
        );
        let res = self.ex(s, &hce);
        let res = self.ix.next(Cmp::Eq, self.c.one_minus_q(), res);
        self.ix.and(all, res)
    }

    fn abandon(&mut self, s: &Side) -> Formula {
        let zero = self.zero(s);
        let nonzero = self.ix.not(zero.clone());
        let interval = self.interval(s);
        let mut oz = Vec::new();
        let mut op = Vec::new();
        for i in 0..5 {
            let s1 = r(i + 1);
            let ri = self.at(s, &r(i));
            let ozsuc = self.opsuc_like(s, i, props(&["h", "a", &s1]));
            oz.push(self.ix.and(ri.clone(), ozsuc));
            let opsuc = self.opsuc_like(s, i, props(&["a", &s1]));
            let eq = self.eq(s, i);
            op.push(self.ix.and_all([ri, opsuc, interval.clone(), eq]));
        }
        let ozer = self.ix.or_any(oz);
        let opos = self.ix.or_any(op);
        let a = self.ix.implies(zero, ozer);
        let b = self.ix.implies(nonzero, opos);
        self.ix.and(a, b)
    }
}

/// `ψ(x, y)` for an arbitrary instance.
pub fn build_psi_instance(
    c: &GeometryConstants,
    x: &Rat,
    y: &Rat,
    opts: CompileOptions,
) -> CompiledFormula {
    let universe = PropUniverse::Base;
    let s = universe.side(1);
    let mut bd = Builder::new(c, opts);
    let here = bd.ex(&s, &props(&["a", "r0"]));
    let (a, b) = (bd.at(&s, "a"), bd.at(&s, "b"));
    let xa = bd.ix.next(Cmp::Eq, x.clone(), a);
    let yb = bd.ix.next(Cmp::Eq, y.clone(), b);
    let init = bd.ix.and_all([here, xa, yb]);
    let fin = bd.fin(&s);
    let trans = bd.trans(&s);
    let free = bd.free(&s);
    let inv = bd.ix.or_any([fin, trans, free]);
    let g = bd.ix.always(inv);
    CompiledFormula {
        formula: bd.ix.and(init, g),
        family: Family::Parameterized,
        universe,
        constants: c.clone(),
        options: opts,
        instance: Some((x.clone(), y.clone())),
        n: None,
        machines: vec![],
        partition: None,
        recurrence: false,
    }
}

/// `ψ[σⁿ(κ)₁, σⁿ(κ)₂]`, returned with its instance values.
pub fn build_psi_parameterized(
    c: &GeometryConstants,
    n: usize,
    opts: CompileOptions,
) -> (CompiledFormula, Rat, Rat) {
    let v = c.sigma_n(n);
    let mut out = build_psi_instance(c, &v.x1, &v.x2, opts);
    out.n = Some(n);
    (out, v.x1, v.x2)
}

/// Simulation formula for a one-counter machine.
pub fn build_psi_one_counter(
    c: &GeometryConstants,
    m: &Machine,
    opts: CompileOptions,
) -> CompiledFormula {
    let universe = PropUniverse::Extended { labels: m.len() };
    let s = universe.side(1);
    let mut bd = Builder::new(c, opts);
    let init = bd.init(&s);
    let fin = bd.fin(&s);
    let trans = bd.trans(&s);
    let ctrans = bd.ctrans(&s);
    let ltrans = bd.labeled_transient(&s, m.len(), |bd, i, j| bd.step(&s, i, m.ins(j)));
    let free = bd.free(&s);
    let inv = bd.ix.or_any([fin, trans, ctrans, ltrans, free]);
    let g = bd.ix.always(inv);
    CompiledFormula {
        formula: bd.ix.and(init, g),
        family: Family::OneCounter,
        universe,
        constants: c.clone(),
        options: opts,
        instance: None,
        n: None,
        machines: vec![m.clone()],
        partition: None,
        recurrence: false,
    }
}

/// Simulation formula for a synchronized product of two one-counter machines.
#[allow(non_snake_case)]
pub fn build_Psi_product(
    c: &GeometryConstants,
    p: &SyncProduct,
    opts: CompileOptions,
) -> CompiledFormula {
    let m = p.len();
    let universe = PropUniverse::Doubled { labels: m };
    let sides = [universe.side(1), universe.side(2)];
    let mut bd = Builder::new(c, opts);
    let part = p.partition();
    let mut per_side = Vec::new();
    let mut inits = Vec::new();
    for k in 1..=2 {
        let kk = 3 - k;
        let (s, so) = (&sides[k - 1], &sides[kk - 1]);
        let mine = p.machine(k);
        let theirs = p.machine(kk);
        let owned = if k == 1 { &part.i1 } else { &part.i2 };
        inits.push(bd.init(s));
        let fin = bd.fin(s);
        let trans = bd.trans(s);
        let ctrans = bd.ctrans(s);
        let free = bd.free(s);
        let sim = bd.labeled_transient(s, m, |bd, i, j| {
            bd.product_step(s, so, mine.ins(j), theirs.ins(j), owned.contains(&j), i)
        });
        let mut both = Vec::new();
        let mut alone = Vec::new();
        let mut any = Vec::new();
        for j in 1..=m {
            let (lk, lo) = (bd.at(s, &l(j)), bd.at(so, &l(j)));
            both.push(bd.ix.and(lk.clone(), lo.clone()));
            let nlo = bd.ix.not(lo);
            alone.push(bd.ix.and(lk.clone(), nlo));
            any.push(lk);
        }
        let both = bd.ix.or_any(both);
        let alone = bd.ix.or_any(alone);
        let abandon = bd.abandon(s);
        let to_sim = bd.ix.implies(both, sim);
        let to_abandon = bd.ix.implies(alone, abandon);
        let ltrans = match opts.ltrans {
            LTransShape::Guarded => {
                let labeled = bd.ix.or_any(any);
                bd.ix.and_all([labeled, to_sim, to_abandon])
            }
            LTransShape::Implications => bd.ix.and(to_sim, to_abandon),
        };
        per_side.push(bd.ix.or_any([fin, trans, ctrans, ltrans, free]));
    }
    let joint: Vec<Formula> = (1..=m)
        .map(|j| {
            let (a, b) = (bd.at(&sides[0], &l(j)), bd.at(&sides[1], &l(j)));
            bd.ix.and(a, b)
        })
        .collect();
    let joint = bd.ix.or_any(joint);
    let pass = bd.ix.next(Cmp::Gt, Rat::zero(), joint.clone());
    let lpass = bd.ix.implies(joint, pass);
    let inv = bd.ix.and(per_side[0].clone(), per_side[1].clone());
    let body = bd.ix.and(inv, lpass);
    let g = bd.ix.always(body);
    let formula = bd.ix.and_all([inits[0].clone(), inits[1].clone(), g]);
    CompiledFormula {
        formula,
        family: Family::Product,
        universe,
        constants: c.clone(),
        options: opts,
        instance: None,
        n: None,
        machines: vec![p.machine(1).clone(), p.machine(2).clone()],
        partition: Some(part.clone()),
        recurrence: false,
    }
}

/// `Ψ ∧ G=1((ℓ₁¹∧ℓ₁²) ⇒ …)`; see [`RecurrenceShape`].
pub fn recurrence_extension(psi: &CompiledFormula) -> CompiledFormula {
    let mut ix = Interner::new();
    let s1 = psi.universe.side(1);
    let s2 = psi.universe.side(2);
    let a = ix.atom(&s1.name(&l(1)));
    let b = ix.atom(&s2.name(&l(1)));
    let at_one = ix.and(a, b);
    let later = match psi.options.recurrence {
        RecurrenceShape::NextThenEventually => {
            let ev = ix.eventually(Cmp::Gt, Rat::zero(), at_one.clone());
            ix.next(Cmp::Gt, Rat::zero(), ev)
        }
        RecurrenceShape::Eventually => ix.eventually(Cmp::Gt, Rat::zero(), at_one.clone()),
    };
    let body = ix.implies(at_one, later);
    let g = ix.always(body);
    let mut out = psi.clone();
    out.formula = ix.and(psi.formula.clone(), g);
    out.recurrence = true;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_constants;
    use crate::pctl::ast::{as_always, StateFormula};

    fn loop_machine() -> Machine {
        Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap()
    }

    fn contains(hay: &Formula, needle: &Formula) -> bool {
        let mut stack = vec![hay.clone()];
        let mut seen = std::collections::HashSet::new();
        while let Some(f) = stack.pop() {
            if f == *needle {
                return true;
            }
            if seen.insert(std::sync::Arc::as_ptr(&f) as usize) {
                stack.extend(f.children().into_iter().cloned());
                if let StateFormula::Prob { path, .. } = &*f {
                    stack.extend(path.operands().into_iter().cloned());
                }
            }
        }
        false
    }

    #[test]
    fn instance_values() {
        let c = default_constants();
        let (_, x, y) = build_psi_parameterized(&c, 0, CompileOptions::default());
        assert_eq!((x, y), (Rat::new(17, 64), Rat::new(1, 32)));
        let (f, x, y) = build_psi_parameterized(&c, 1, CompileOptions::default());
        assert_eq!((x, y), (Rat::new(12, 47), Rat::new(3, 376)));
        assert!(f.lint().pass);
        assert!(f.stray_atoms().is_empty());
    }

    #[test]
    fn interval_variants_differ_only_in_bound() {
        let c = default_constants();
        let (a, _, _) = build_psi_parameterized(&c, 2, CompileOptions::default());
        let (b, _, _) = build_psi_parameterized(&c, 2, CompileOptions::strict_paper());
        assert!(a.text().contains("P<=17/64 [ X a ]"));
        assert!(b.text().contains("P<=1/32 [ X a ]"));
        assert!(!a.text().contains("P<=1/32 [ X a ]"));
    }

    #[test]
    fn deterministic_output() {
        let c = default_constants();
        let m = loop_machine();
        let a = build_psi_one_counter(&c, &m, CompileOptions::default());
        let b = build_psi_one_counter(&c, &m, CompileOptions::default());
        assert_eq!(a.text(), b.text());
    }

    #[test]
    fn one_counter_init_and_inc_conjunct() {
        let c = default_constants();
        let m = loop_machine();
        let f = build_psi_one_counter(&c, &m, CompileOptions::default());
        assert!(f.lint().pass, "{}", f.lint());
        assert!(f.stray_atoms().is_empty());
        assert_eq!(f.formula.atoms().len(), 13);
        let mut ix = Interner::new();
        let s = f.universe.side(1);
        let mut bd = Builder::new(&c, CompileOptions::default());
        let init = bd.init(&s);
        let init = ix.intern(&init);
        let f2 = ix.intern(&f.formula);
        let StateFormula::And(lhs, _) = &*f2 else {
            panic!("top-level conjunction")
        };
        assert_eq!(*lhs, init);
        // F²=γ((c ∧ S⁴(r₀) ∧ e) ∨ d) for the increment at ℓ₁, i = 0.
        let (cc, r4, e, d) = (ix.atom("c"), ix.atom("r4"), ix.atom("e"), ix.atom("d"));
        let conj = ix.and_all([cc, r4, e]);
        let body = ix.or(conj, d);
        let g3 = ix.eventually_within(Cmp::Eq, c.gamma.clone(), 2, body);
        assert!(contains(&f2, &g3));
    }

    #[test]
    fn product_shape() {
        let c = default_constants();
        let m1 = loop_machine();
        let m2 = Machine::parse("1: jzdec c1 zero {2} else {2}\n2: inc c1 goto {1}").unwrap();
        let p = SyncProduct::new(m1, m2, Partition::new([1], [2])).unwrap();
        let f = build_Psi_product(&c, &p, CompileOptions::default());
        let lint = f.lint();
        assert!(lint.pass, "{lint}");
        assert_eq!(lint.always_conjuncts, 1);
        assert!(f.stray_atoms().is_empty());
        let text = f.text();
        assert_eq!(
            text.matches("P>0 [ X l1_1 & l1_2 | l2_1 & l2_2 ]").count(),
            1
        );
        let rec = recurrence_extension(&f);
        let lint = rec.lint();
        assert!(lint.pass, "{lint}");
        assert_eq!(lint.recurrence_conjuncts, 1);
        let StateFormula::And(_, ext) = &*rec.formula else {
            panic!()
        };
        let body = as_always(ext).unwrap();
        assert_eq!(
            body.atoms(),
            ["l1_1", "l1_2"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn step_substitution() {
        let c = default_constants();
        let u = PropUniverse::Doubled { labels: 3 };
        let (s1, s2) = (u.side(1), u.side(2));
        let mut bd = Builder::new(&c, CompileOptions::default());
        let mine = Instruction::JzDec {
            counter: 1,
            zero: vec![1],
            nonzero: vec![2],
        };
        let inc = Instruction::Inc {
            counter: 1,
            goto: vec![3],
        };
        // Owned: the side's own step.
        let own = bd.product_step(&s1, &s2, &mine, &inc, true, 0);
        assert_eq!(own, bd.step(&s1, 0, &mine));
        // Other side increments: Step[L] with its targets, no zero test on it.
        let sub = bd.product_step(&s1, &s2, &mine, &inc, false, 0);
        assert_eq!(sub, bd.step(&s1, 0, &substitute(&mine, &[3])));
        assert!(!sub.atoms().contains("a2"));
        // Other side tests for zero: both branches guarded by its Zero.
        let dec = Instruction::JzDec {
            counter: 1,
            zero: vec![2],
            nonzero: vec![3],
        };
        let f = bd.product_step(&s1, &s2, &mine, &dec, false, 0);
        let StateFormula::And(za, nza) = &*f else {
            panic!("conjunction expected")
        };
        let z2 = bd.zero(&s2);
        assert!(matches!(&**za, StateFormula::Implies(g, _) if *g == z2));
        assert!(
            matches!(&**nza, StateFormula::Implies(g, _) if matches!(&**g, StateFormula::Not(x) if *x == z2))
        );
    }
}
