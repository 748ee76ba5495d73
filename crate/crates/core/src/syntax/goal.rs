//! Goals, definite clauses and programs, with elaboration into the
//! `∀x̄(G ⇒ A)` normal shape and fresh clause variants.

use super::formula::Constraint;
use super::subst::{FreshSource, Subst};
use super::term::Term;
use std::collections::BTreeSet;
use std::fmt;

/// Atomic formula `P(t₁,…,tₙ)` over a predicate symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredAtom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl PredAtom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> PredAtom {
        PredAtom {
            pred: pred.into(),
            args,
        }
    }

    pub fn apply_subst(&self, s: &Subst) -> PredAtom {
        PredAtom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|t| s.apply_term(t)).collect(),
        }
    }

    pub fn collect_free_vars(&self, bound: &BTreeSet<String>, out: &mut BTreeSet<String>) {
        for t in &self.args {
            for v in t.free_vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        }
    }
}

impl fmt::Display for PredAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.pred)
        } else {
            write!(f, "{}(", self.pred)?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    Atom(PredAtom),
    Constraint(Constraint),
    And(Box<Goal>, Box<Goal>),
    Or(Box<Goal>, Box<Goal>),
    ClauseImplies(Box<Clause>, Box<Goal>),
    ConstraintImplies(Constraint, Box<Goal>),
    Exists(String, Box<Goal>),
    Forall(String, Box<Goal>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    Atom(PredAtom),
    And(Box<Clause>, Box<Clause>),
    /// The implication head is always atomic.
    Implies(Box<Goal>, PredAtom),
    Forall(String, Box<Clause>),
}

impl Goal {
    pub fn truth() -> Goal {
        Goal::Constraint(Constraint::True)
    }

    /// Conjunction that collapses into a single constraint goal when both
    /// sides already are constraints, mirroring how formulas like
    /// `∃u∃v((x≈u ∧ y≈v) ∧ u²+v²≤1)` stay inside the constraint fragment.
    pub fn and(a: Goal, b: Goal) -> Goal {
        match (a, b) {
            (Goal::Constraint(ca), Goal::Constraint(cb)) => {
                Goal::Constraint(Constraint::and(ca, cb))
            }
            (a, b) => Goal::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Goal, b: Goal) -> Goal {
        Goal::Or(Box::new(a), Box::new(b))
    }

    pub fn clause_implies(d: Clause, g: Goal) -> Goal {
        Goal::ClauseImplies(Box::new(d), Box::new(g))
    }

    pub fn constraint_implies(c: Constraint, g: Goal) -> Goal {
        match g {
            Goal::Constraint(cg) => Goal::Constraint(Constraint::implies(c, cg)),
            g => Goal::ConstraintImplies(c, Box::new(g)),
        }
    }

    pub fn exists(v: impl Into<String>, g: Goal) -> Goal {
        match g {
            Goal::Constraint(c) => Goal::Constraint(Constraint::exists(v, c)),
            g => Goal::Exists(v.into(), Box::new(g)),
        }
    }

    pub fn forall(v: impl Into<String>, g: Goal) -> Goal {
        match g {
            Goal::Constraint(c) => Goal::Constraint(Constraint::forall(v, c)),
            g => Goal::Forall(v.into(), Box::new(g)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Goal::Atom(a) => a.collect_free_vars(bound, out),
            Goal::Constraint(c) => {
                for v in c.free_vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Goal::And(a, b) | Goal::Or(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Goal::ClauseImplies(d, g) => {
                d.collect_free_vars(bound, out);
                g.collect_free_vars(bound, out);
            }
            Goal::ConstraintImplies(c, g) => {
                for v in c.free_vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
                g.collect_free_vars(bound, out);
            }
            Goal::Exists(v, g) | Goal::Forall(v, g) => {
                let fresh = bound.insert(v.clone());
                g.collect_free_vars(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn apply_subst(&self, s: &Subst) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.apply_subst(s)),
            Goal::Constraint(c) => Goal::Constraint(c.apply_subst(s)),
            Goal::And(a, b) => Goal::And(Box::new(a.apply_subst(s)), Box::new(b.apply_subst(s))),
            Goal::Or(a, b) => Goal::Or(Box::new(a.apply_subst(s)), Box::new(b.apply_subst(s))),
            Goal::ClauseImplies(d, g) => {
                Goal::ClauseImplies(Box::new(d.apply_subst(s)), Box::new(g.apply_subst(s)))
            }
            Goal::ConstraintImplies(c, g) => {
                Goal::ConstraintImplies(c.apply_subst(s), Box::new(g.apply_subst(s)))
            }
            Goal::Exists(v, g) => {
                let (v2, rename, s2) = s.descend_binder(v, g.free_vars());
                let body = match rename {
                    Some(r) => g.apply_subst(&r).apply_subst(&s2),
                    None => g.apply_subst(&s2),
                };
                Goal::Exists(v2, Box::new(body))
            }
            Goal::Forall(v, g) => {
                let (v2, rename, s2) = s.descend_binder(v, g.free_vars());
                let body = match rename {
                    Some(r) => g.apply_subst(&r).apply_subst(&s2),
                    None => g.apply_subst(&s2),
                };
                Goal::Forall(v2, Box::new(body))
            }
        }
    }

    /// Canonical alpha-variant (shared counter with nested clauses and
    /// constraints).
    pub fn canon(&self) -> Goal {
        self.canon_rec(&mut 0, &Vec::new())
    }

    fn canon_rec(&self, counter: &mut usize, renaming: &Vec<(String, String)>) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(PredAtom {
                pred: a.pred.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| super::formula_canon_term(t, renaming))
                    .collect(),
            }),
            Goal::Constraint(c) => Goal::Constraint(super::canon_constraint_in(c, counter, renaming)),
            Goal::And(a, b) => Goal::And(
                Box::new(a.canon_rec(counter, renaming)),
                Box::new(b.canon_rec(counter, renaming)),
            ),
            Goal::Or(a, b) => Goal::Or(
                Box::new(a.canon_rec(counter, renaming)),
                Box::new(b.canon_rec(counter, renaming)),
            ),
            Goal::ClauseImplies(d, g) => Goal::ClauseImplies(
                Box::new(d.canon_rec(counter, renaming)),
                Box::new(g.canon_rec(counter, renaming)),
            ),
            Goal::ConstraintImplies(c, g) => Goal::ConstraintImplies(
                super::canon_constraint_in(c, counter, renaming),
                Box::new(g.canon_rec(counter, renaming)),
            ),
            Goal::Exists(v, g) => {
                let fresh = format!("${counter}");
                *counter += 1;
                let mut r2 = renaming.clone();
                r2.push((v.clone(), fresh.clone()));
                Goal::Exists(fresh, Box::new(g.canon_rec(counter, &r2)))
            }
            Goal::Forall(v, g) => {
                let fresh = format!("${counter}");
                *counter += 1;
                let mut r2 = renaming.clone();
                r2.push((v.clone(), fresh.clone()));
                Goal::Forall(fresh, Box::new(g.canon_rec(counter, &r2)))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Goal) -> bool {
        self.canon() == other.canon()
    }
}

impl Clause {
    pub fn fact(a: PredAtom) -> Clause {
        Clause::Atom(a)
    }

    pub fn implies(body: Goal, head: PredAtom) -> Clause {
        Clause::Implies(Box::new(body), head)
    }

    pub fn forall(v: impl Into<String>, d: Clause) -> Clause {
        Clause::Forall(v.into(), Box::new(d))
    }

    pub fn forall_closed(vars: Vec<String>, d: Clause) -> Clause {
        vars.into_iter().rev().fold(d, |acc, v| Clause::forall(v, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Clause::Atom(a) => a.collect_free_vars(bound, out),
            Clause::And(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Clause::Implies(g, head) => {
                g.collect_free_vars(bound, out);
                head.collect_free_vars(bound, out);
            }
            Clause::Forall(v, d) => {
                let fresh = bound.insert(v.clone());
                d.collect_free_vars(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn apply_subst(&self, s: &Subst) -> Clause {
        match self {
            Clause::Atom(a) => Clause::Atom(a.apply_subst(s)),
            Clause::And(a, b) => {
                Clause::And(Box::new(a.apply_subst(s)), Box::new(b.apply_subst(s)))
            }
            Clause::Implies(g, head) => {
                Clause::Implies(Box::new(g.apply_subst(s)), head.apply_subst(s))
            }
            Clause::Forall(v, d) => {
                let (v2, rename, s2) = s.descend_binder(v, d.free_vars());
                let body = match rename {
                    Some(r) => d.apply_subst(&r).apply_subst(&s2),
                    None => d.apply_subst(&s2),
                };
                Clause::Forall(v2, Box::new(body))
            }
        }
    }

    fn canon_rec(&self, counter: &mut usize, renaming: &Vec<(String, String)>) -> Clause {
        match self {
            Clause::Atom(a) => Clause::Atom(PredAtom {
                pred: a.pred.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| super::formula_canon_term(t, renaming))
                    .collect(),
            }),
            Clause::And(a, b) => Clause::And(
                Box::new(a.canon_rec(counter, renaming)),
                Box::new(b.canon_rec(counter, renaming)),
            ),
            Clause::Implies(g, head) => Clause::Implies(
                Box::new(g.canon_rec(counter, renaming)),
                PredAtom {
                    pred: head.pred.clone(),
                    args: head
                        .args
                        .iter()
                        .map(|t| super::formula_canon_term(t, renaming))
                        .collect(),
                },
            ),
            Clause::Forall(v, d) => {
                let fresh = format!("${counter}");
                *counter += 1;
                let mut r2 = renaming.clone();
                r2.push((v.clone(), fresh.clone()));
                Clause::Forall(fresh, Box::new(d.canon_rec(counter, &r2)))
            }
        }
    }

    pub fn canon(&self) -> Clause {
        self.canon_rec(&mut 0, &Vec::new())
    }

    pub fn alpha_eq(&self, other: &Clause) -> bool {
        self.canon() == other.canon()
    }
}

/// A finite set of definite clauses. Kept in text order (backchaining tries
/// clauses in this order) with duplicates collapsed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        let mut p = Program::default();
        for c in clauses {
            p.add(c);
        }
        p
    }

    pub fn add(&mut self, clause: Clause) {
        if !self.clauses.iter().any(|c| c.alpha_eq(&clause)) {
            self.clauses.push(clause);
        }
    }

    /// Program extended with one clause, as done when solving `D ⇒ G`.
    /// Assumptions sit in front: the most recently added clause is tried
    /// first by backchaining.
    pub fn extended(&self, clause: Clause) -> Program {
        if self.clauses.iter().any(|c| c.alpha_eq(&clause)) {
            return self.clone();
        }
        let mut clauses = Vec::with_capacity(self.clauses.len() + 1);
        clauses.push(clause);
        clauses.extend(self.clauses.iter().cloned());
        Program { clauses }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.extend(c.free_vars());
        }
        out
    }

    /// Elaboration: every clause decomposed into the shape `∀x̄(G ⇒ A)`.
    pub fn elaborate(&self) -> Vec<ElabClause> {
        let mut out: Vec<ElabClause> = Vec::new();
        for c in &self.clauses {
            for e in elab_clause(c) {
                if !out.iter().any(|x| x.alpha_eq(&e)) {
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Clause in elaborated normal shape `∀x₁…∀xₙ(G ⇒ A)`, n ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElabClause {
    pub vars: Vec<String>,
    pub body: Goal,
    pub head: PredAtom,
}

impl ElabClause {
    pub fn to_clause(&self) -> Clause {
        Clause::forall_closed(
            self.vars.clone(),
            Clause::implies(self.body.clone(), self.head.clone()),
        )
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.to_clause().free_vars()
    }

    pub fn alpha_eq(&self, other: &ElabClause) -> bool {
        self.to_clause().alpha_eq(&other.to_clause())
    }

    /// Variant with the bound variables replaced by fresh names.
    pub fn variant(&self, fresh: &mut FreshSource) -> ElabClause {
        let mut s = Subst::new();
        let mut vars = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            let w = fresh.fresh(v);
            s.bind(v.clone(), Term::Var(w.clone()));
            vars.push(w);
        }
        ElabClause {
            vars,
            body: self.body.apply_subst(&s),
            head: self.head.apply_subst(&s),
        }
    }
}

fn elab_clause(c: &Clause) -> Vec<ElabClause> {
    match c {
        Clause::Atom(a) => vec![ElabClause {
            vars: Vec::new(),
            body: Goal::truth(),
            head: a.clone(),
        }],
        Clause::And(a, b) => {
            let mut out = elab_clause(a);
            out.extend(elab_clause(b));
            out
        }
        Clause::Implies(g, head) => vec![ElabClause {
            vars: Vec::new(),
            body: (**g).clone(),
            head: head.clone(),
        }],
        Clause::Forall(v, d) => elab_clause(d)
            .into_iter()
            .map(|mut e| {
                // only quantify where the variable actually occurs free,
                // and avoid capturing an inner binder of the same name
                if e.vars.contains(v) {
                    e
                } else {
                    e.vars.insert(0, v.clone());
                    e
                }
            })
            .collect(),
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Atom(a) => write!(f, "{a}"),
            Goal::Constraint(c) => write!(f, "{c}"),
            Goal::And(a, b) => write!(f, "({a} /\\ {b})"),
            Goal::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Goal::ClauseImplies(d, g) => write!(f, "({d} => {g})"),
            Goal::ConstraintImplies(c, g) => write!(f, "({c} => {g})"),
            Goal::Exists(v, g) => write!(f, "exists {v}. {g}"),
            Goal::Forall(v, g) => write!(f, "forall {v}. {g}"),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Atom(a) => write!(f, "{a}"),
            Clause::And(a, b) => write!(f, "({a} /\\ {b})"),
            Clause::Implies(g, head) => write!(f, "({head} <= {g})"),
            Clause::Forall(v, d) => write!(f, "forall {v}. {d}"),
        }
    }
}
