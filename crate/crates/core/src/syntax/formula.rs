//! Constraint formulas: the fragment closed under conjunction, implication
//! and both quantifiers, over equations and domain atoms. There is no
//! disjunction and no primitive negation here.

use super::subst::Subst;
use super::term::Term;
use std::collections::BTreeSet;
use std::fmt;

pub const LEQ: &str = "<=";
pub const LT: &str = "<";
pub const NEQ: &str = "~=";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    True,
    False,
    Eq(Term, Term),
    /// Domain atom such as `<=`, `<` or `~=` applied to terms.
    Atom(String, Vec<Term>),
    And(Box<Constraint>, Box<Constraint>),
    Implies(Box<Constraint>, Box<Constraint>),
    Exists(String, Box<Constraint>),
    Forall(String, Box<Constraint>),
}

impl Constraint {
    pub fn eq(a: Term, b: Term) -> Constraint {
        Constraint::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Constraint {
        Constraint::Atom(NEQ.into(), vec![a, b])
    }

    pub fn leq(a: Term, b: Term) -> Constraint {
        Constraint::Atom(LEQ.into(), vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Constraint {
        Constraint::Atom(LT.into(), vec![a, b])
    }

    pub fn and(a: Constraint, b: Constraint) -> Constraint {
        Constraint::And(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction of a non-empty list; `True` for an empty one.
    pub fn conj(items: Vec<Constraint>) -> Constraint {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Constraint::True,
            Some(last) => it.fold(last, |acc, c| Constraint::and(c, acc)),
        }
    }

    pub fn implies(a: Constraint, b: Constraint) -> Constraint {
        Constraint::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: Constraint) -> Constraint {
        Constraint::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Constraint) -> Constraint {
        Constraint::Forall(v.into(), Box::new(body))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Constraint::True | Constraint::False | Constraint::Eq(..) | Constraint::Atom(..)
        )
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Eq(a, b) => {
                for v in a.free_vars().union(&b.free_vars()) {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Constraint::Atom(_, args) => {
                for t in args {
                    for v in t.free_vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Constraint::And(a, b) | Constraint::Implies(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Constraint::Exists(v, body) | Constraint::Forall(v, body) => {
                let fresh = bound.insert(v.clone());
                body.collect_free_vars(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn apply_subst(&self, s: &Subst) -> Constraint {
        match self {
            Constraint::True => Constraint::True,
            Constraint::False => Constraint::False,
            Constraint::Eq(a, b) => Constraint::Eq(s.apply_term(a), s.apply_term(b)),
            Constraint::Atom(sym, args) => Constraint::Atom(
                sym.clone(),
                args.iter().map(|t| s.apply_term(t)).collect(),
            ),
            Constraint::And(a, b) => Constraint::and(a.apply_subst(s), b.apply_subst(s)),
            Constraint::Implies(a, b) => Constraint::implies(a.apply_subst(s), b.apply_subst(s)),
            Constraint::Exists(v, body) => {
                let (v2, body2, s2) = s.descend_binder(v, body.free_vars());
                let new_body = if let Some(rename) = body2 {
                    body.apply_subst(&rename).apply_subst(&s2)
                } else {
                    body.apply_subst(&s2)
                };
                Constraint::exists(v2, new_body)
            }
            Constraint::Forall(v, body) => {
                let (v2, body2, s2) = s.descend_binder(v, body.free_vars());
                let new_body = if let Some(rename) = body2 {
                    body.apply_subst(&rename).apply_subst(&s2)
                } else {
                    body.apply_subst(&s2)
                };
                Constraint::forall(v2, new_body)
            }
        }
    }

    /// Flattens the outer conjunctive structure, dropping `True` conjuncts.
    /// A lone `True` flattens to the empty list.
    pub fn flatten(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    fn flatten_into(&self, out: &mut Vec<Constraint>) {
        match self {
            Constraint::True => {}
            Constraint::And(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            other => out.push(other.clone()),
        }
    }

    /// Light normalization used everywhere formulas are compared or stored:
    /// drops `True` conjuncts and vacuous quantifiers, flattens `True =>`,
    /// and propagates `False` through conjunction.
    pub fn normalize(&self) -> Constraint {
        match self {
            Constraint::True | Constraint::False | Constraint::Eq(..) | Constraint::Atom(..) => {
                self.clone()
            }
            Constraint::And(a, b) => {
                let a = a.normalize();
                let b = b.normalize();
                match (a, b) {
                    (Constraint::True, x) | (x, Constraint::True) => x,
                    (Constraint::False, _) | (_, Constraint::False) => Constraint::False,
                    (a, b) => Constraint::and(a, b),
                }
            }
            Constraint::Implies(a, b) => {
                let a = a.normalize();
                let b = b.normalize();
                match (a, b) {
                    (Constraint::True, x) => x,
                    (_, Constraint::True) => Constraint::True,
                    (Constraint::False, _) => Constraint::True,
                    (a, b) => Constraint::implies(a, b),
                }
            }
            Constraint::Exists(v, body) => {
                let body = body.normalize();
                if body.free_vars().contains(v) {
                    Constraint::exists(v.clone(), body)
                } else {
                    body
                }
            }
            Constraint::Forall(v, body) => {
                let body = body.normalize();
                if body.free_vars().contains(v) {
                    Constraint::forall(v.clone(), body)
                } else {
                    body
                }
            }
        }
    }

    /// Canonical alpha-variant: bound variables renamed to `$0`, `$1`, ... in
    /// traversal order. Two formulas are alpha-equivalent iff their canonical
    /// forms are structurally equal.
    pub fn canon(&self) -> Constraint {
        let mut counter = 0usize;
        self.canon_rec(&mut counter, &im_empty())
    }

    pub(crate) fn canon_rec(&self, counter: &mut usize, renaming: &Vec<(String, String)>) -> Constraint {
        let rename_term = |t: &Term| -> Term { rename_term_with(t, renaming) };
        match self {
            Constraint::True => Constraint::True,
            Constraint::False => Constraint::False,
            Constraint::Eq(a, b) => Constraint::Eq(rename_term(a), rename_term(b)),
            Constraint::Atom(sym, args) => {
                Constraint::Atom(sym.clone(), args.iter().map(rename_term).collect())
            }
            Constraint::And(a, b) => Constraint::and(
                a.canon_rec(counter, renaming),
                b.canon_rec(counter, renaming),
            ),
            Constraint::Implies(a, b) => Constraint::implies(
                a.canon_rec(counter, renaming),
                b.canon_rec(counter, renaming),
            ),
            Constraint::Exists(v, body) => {
                let fresh = format!("${counter}");
                *counter += 1;
                let mut r2 = renaming.clone();
                r2.push((v.clone(), fresh.clone()));
                Constraint::exists(fresh, body.canon_rec(counter, &r2))
            }
            Constraint::Forall(v, body) => {
                let fresh = format!("${counter}");
                *counter += 1;
                let mut r2 = renaming.clone();
                r2.push((v.clone(), fresh.clone()));
                Constraint::forall(fresh, body.canon_rec(counter, &r2))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Constraint) -> bool {
        self.normalize().canon() == other.normalize().canon()
    }
}

fn im_empty() -> Vec<(String, String)> {
    Vec::new()
}

pub(crate) fn rename_term_with(t: &Term, renaming: &[(String, String)]) -> Term {
    match t {
        Term::Var(v) => {
            // innermost binding wins
            for (from, to) in renaming.iter().rev() {
                if from == v {
                    return Term::Var(to.clone());
                }
            }
            t.clone()
        }
        Term::Num(_) => t.clone(),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| rename_term_with(a, renaming)).collect(),
        ),
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::True => write!(f, "true"),
            Constraint::False => write!(f, "false"),
            Constraint::Eq(a, b) => write!(f, "{a} = {b}"),
            Constraint::Atom(sym, args) if args.len() == 2 => {
                write!(f, "{} {} {}", args[0], sym, args[1])
            }
            Constraint::Atom(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Constraint::And(a, b) => write!(f, "({a} /\\ {b})"),
            Constraint::Implies(a, b) => write!(f, "({a} => {b})"),
            Constraint::Exists(v, b) => write!(f, "exists {v}. {b}"),
            Constraint::Forall(v, b) => write!(f, "forall {v}. {b}"),
        }
    }
}
