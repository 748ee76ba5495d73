//! The contract every constraint system satisfies: entailment, prefixed
//! satisfiability and simplification, with three-valued verdicts so that
//! sound-but-incomplete deciders can say so instead of guessing.

use crate::syntax::{Constraint, Subst, Term};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    /// Conjunction: False dominates, then Unknown, then True.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (Unknown, _) | (_, Unknown) => Unknown,
            (True, True) => True,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => write!(f, "true"),
            Verdict::False => write!(f, "false"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// Ordered quantifier prefix with pairwise-distinct variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct QuantifierPrefix {
    entries: Vec<(Quant, String)>,
}

impl QuantifierPrefix {
    pub fn empty() -> QuantifierPrefix {
        QuantifierPrefix::default()
    }

    pub fn push(&mut self, q: Quant, var: String) {
        debug_assert!(!self.contains(&var), "prefix variables must be distinct");
        self.entries.push((q, var));
    }

    pub fn pushed(&self, q: Quant, var: String) -> QuantifierPrefix {
        let mut p = self.clone();
        p.push(q, var);
        p
    }

    pub fn contains(&self, var: &str) -> bool {
        self.entries.iter().any(|(_, v)| v == var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.entries.iter().map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(Quant, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Wraps a formula in this prefix, outermost quantifier first.
    pub fn quantify(&self, body: Constraint) -> Constraint {
        self.entries
            .iter()
            .rev()
            .fold(body, |acc, (q, v)| match q {
                Quant::Exists => Constraint::exists(v.clone(), acc),
                Quant::Forall => Constraint::forall(v.clone(), acc),
            })
    }

    /// The suffix after dropping the first `k` entries, as in `Π − Π'`.
    pub fn suffix(&self, k: usize) -> QuantifierPrefix {
        QuantifierPrefix {
            entries: self.entries[k.min(self.entries.len())..].to_vec(),
        }
    }
}

impl fmt::Display for QuantifierPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.entries {
            match q {
                Quant::Forall => write!(f, "forall {v}. ")?,
                Quant::Exists => write!(f, "exists {v}. ")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("domain atom `{0}/{1}` is not interpreted by the {2} system")]
    UnknownAtom(String, usize, String),
    #[error("numeric atoms are not handled by the {0} system")]
    NumericInput(String),
}

/// The pair of a constraint language and an entailment relation, as seen by
/// the solver and the proof kernel.
///
/// `True` and `False` answers must be sound; `Unknown` is reserved for the
/// genuinely undecided part of an incomplete decider.
pub trait ConstraintSystem: Send + Sync {
    fn name(&self) -> &str;

    /// Domain-atom symbols this system interprets (equality is implicit).
    fn interprets_atom(&self, sym: &str, arity: usize) -> bool;

    /// Does `Γ ⊢ C` hold? Free variables are read universally.
    fn entails(&self, premises: &[Constraint], conclusion: &Constraint)
        -> Result<Verdict, SystemError>;

    /// Is `Π S` satisfiable? Free variables of `S` outside `Π` are read
    /// existentially.
    fn satisfiable(
        &self,
        prefix: &QuantifierPrefix,
        constraint: &Constraint,
    ) -> Result<Verdict, SystemError>;

    /// Equivalence-preserving simplification relative to the prefix.
    /// Returning the input unchanged is always safe.
    fn simplify(&self, prefix: &QuantifierPrefix, constraint: &Constraint) -> Constraint;
}

/// Validates that a formula only uses atoms a system interprets.
pub fn check_atoms(
    system: &dyn ConstraintSystem,
    c: &Constraint,
) -> Result<(), SystemError> {
    match c {
        Constraint::True | Constraint::False | Constraint::Eq(..) => Ok(()),
        Constraint::Atom(sym, args) => {
            if system.interprets_atom(sym, args.len()) {
                Ok(())
            } else {
                Err(SystemError::UnknownAtom(
                    sym.clone(),
                    args.len(),
                    system.name().to_string(),
                ))
            }
        }
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            check_atoms(system, a)?;
            check_atoms(system, b)
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => check_atoms(system, b),
    }
}

/// Structural entailment: a small intuitionistically-valid closure that
/// discharges the side conditions arising from certified resolutions without
/// consulting a domain decider. Sound for every constraint system.
///
/// Closure rules: conjunction flattening, `⊤` dropping, instantiating a
/// universal with its own bound name, opening an existential when the kept
/// piece does not mention the bound name, and modus ponens when an
/// implication's antecedent components are all present.
pub fn structural_entails(premises: &[Constraint], conclusion: &Constraint) -> bool {
    let mut closure = Closure::default();
    for p in premises {
        closure.saturate(p.normalize());
    }
    // modus ponens to a fixpoint
    loop {
        let mut fired = Vec::new();
        for c in &closure.items {
            if let Constraint::Implies(a, b) = c {
                if closure.covers(a) && !closure.covers(b) {
                    fired.push((**b).clone());
                }
            }
        }
        if fired.is_empty() {
            break;
        }
        for b in fired {
            closure.saturate(b);
        }
    }
    closure.covers(conclusion)
}

#[derive(Default)]
struct Closure {
    /// Canonical keys for dedup.
    seen: BTreeSet<Constraint>,
    /// Original pieces, names intact, for matching.
    items: Vec<Constraint>,
}

impl Closure {
    fn saturate(&mut self, c: Constraint) {
        let mut queue = vec![c];
        while let Some(c) = queue.pop() {
            for piece in extract_pieces(&c) {
                if self.seen.insert(piece.canon()) {
                    self.items.push(piece.clone());
                    queue.push(piece);
                }
            }
        }
    }

    fn covers(&self, conclusion: &Constraint) -> bool {
        let norm = conclusion.normalize();
        let components = norm.flatten();
        if components.is_empty() {
            return true; // normalized to truth
        }
        components.into_iter().all(|component| {
            self.seen.contains(&component.canon())
                || self.items.iter().any(|m| prefix_match(m, &component))
        })
    }
}

/// Does the stored piece `m`, read as `Q̄ φ`, entail the goal `∃v̄ ψ`?
/// Walks both prefixes: a `∀` on the left is instantiated with its own
/// name; an `∃` on the left must be consumed by an `∃` over the same
/// variable on the right (order within the goal's prefix is immaterial,
/// vacuous goal quantifiers are dropped by normalization).
fn prefix_match(m: &Constraint, goal: &Constraint) -> bool {
    fn strip_goal(goal: &Constraint) -> (BTreeSet<String>, &Constraint) {
        let mut vars = BTreeSet::new();
        let mut g = goal;
        while let Constraint::Exists(v, body) = g {
            vars.insert(v.clone());
            g = body;
        }
        (vars, g)
    }
    fn walk(m: &Constraint, pending: &mut BTreeSet<String>, matrix: &Constraint) -> bool {
        if pending.is_empty() && m.alpha_eq(matrix) {
            return true;
        }
        // the matrix may also sit inside a conjunction at this level
        if pending.is_empty() && m.flatten().iter().any(|p| p.alpha_eq(matrix)) {
            return true;
        }
        match m {
            Constraint::Forall(_, body) => walk(body, pending, matrix),
            Constraint::Exists(v, body) => {
                if pending.remove(v) {
                    let ok = walk(body, pending, matrix);
                    if !ok {
                        pending.insert(v.clone());
                    }
                    ok
                } else {
                    // existential over a name the goal does not bind: only
                    // usable if the matrix does not mention it
                    if matrix.free_vars().contains(v) {
                        false
                    } else {
                        walk(body, pending, matrix)
                    }
                }
            }
            _ => false,
        }
    }
    let (mut pending, matrix) = strip_goal(goal);
    walk(m, &mut pending, matrix)
}

/// Decomposes a formula into entailed pieces: conjuncts, universals opened
/// with their own bound name, and existentials opened only for pieces that
/// do not mention the bound variable.
fn extract_pieces(c: &Constraint) -> Vec<Constraint> {
    let mut out = Vec::new();
    let norm = c.normalize();
    extract_rec(&norm, &mut out);
    out
}

fn extract_rec(c: &Constraint, out: &mut Vec<Constraint>) {
    match c {
        Constraint::True => {}
        Constraint::And(a, b) => {
            extract_rec(a, out);
            extract_rec(b, out);
        }
        Constraint::Forall(v, body) => {
            out.push(c.clone());
            // ∀x φ ⊢ φ with x read as itself
            let _ = v;
            extract_rec(body, out);
        }
        Constraint::Exists(v, body) => {
            out.push(c.clone());
            let mut inner = Vec::new();
            extract_rec(body, &mut inner);
            for piece in inner {
                if !piece.free_vars().contains(v) {
                    out.push(piece);
                }
            }
        }
        other => out.push(other.clone()),
    }
}

/// Genericity helper used by property tests: entailment must be stable
/// under substitution of terms for free variables.
pub fn substituted_judgement(
    premises: &[Constraint],
    conclusion: &Constraint,
    s: &Subst,
) -> (Vec<Constraint>, Constraint) {
    (
        premises.iter().map(|p| p.apply_subst(s)).collect(),
        conclusion.apply_subst(s),
    )
}

/// Existential closure of a formula's free variables, in sorted order; the
/// satisfiability reading of free variables.
pub fn exists_closure(c: &Constraint) -> Constraint {
    let mut out = c.clone();
    for v in c.free_vars().into_iter().rev() {
        out = Constraint::exists(v, out);
    }
    out
}

/// Universal closure, the entailment reading of free variables.
pub fn forall_closure(c: &Constraint) -> Constraint {
    let mut out = c.clone();
    for v in c.free_vars().into_iter().rev() {
        out = Constraint::forall(v, out);
    }
    out
}

pub fn subst_term_for(var: &str, t: Term) -> Subst {
    Subst::single(var, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn structural_modus_ponens() {
        // {C => C', C} ⊢ C'
        let c = Constraint::leq(v("y"), Term::int(1));
        let c2 = Constraint::eq(v("x"), Term::constant("a"));
        let premises = vec![Constraint::implies(c.clone(), c2.clone()), c.clone()];
        assert!(structural_entails(&premises, &c2));
        assert!(!structural_entails(&[c.clone()], &c2));
    }

    #[test]
    fn structural_pieces_pass_quantifiers() {
        // forall w. (S /\ (C => C')) with C ⊢ C' when C, C' do not mention w
        let c = Constraint::leq(v("y"), Term::int(1));
        let c2 = Constraint::eq(v("x"), Term::constant("a"));
        let s = Constraint::forall(
            "w",
            Constraint::and(
                Constraint::leq(v("w"), Term::int(0)),
                Constraint::implies(c.clone(), c2.clone()),
            ),
        );
        assert!(structural_entails(&[s, c], &c2));
    }

    #[test]
    fn structural_exists_blocks_captured_pieces() {
        // exists w. (w = a) does not yield w = a as a piece
        let piece = Constraint::eq(v("w"), Term::constant("a"));
        let m = Constraint::exists("w", piece.clone());
        assert!(!structural_entails(&[m.clone()], &piece));
        // but the quantified formula itself is entailed
        assert!(structural_entails(&[m.clone()], &m));
    }

    #[test]
    fn prefix_match_reorders_existentials() {
        // forall z. exists a. exists b. phi ⊢ exists b. exists a. phi
        let phi = Constraint::and(
            Constraint::eq(v("a"), v("z")),
            Constraint::leq(v("b"), v("a")),
        );
        let stored = Constraint::forall(
            "z",
            Constraint::exists("a", Constraint::exists("b", phi.clone())),
        );
        let goal = Constraint::exists("b", Constraint::exists("a", phi));
        assert!(structural_entails(&[stored], &goal));
    }

    #[test]
    fn verdict_conjunction_absorbs() {
        use Verdict::*;
        assert_eq!(True.and(True), True);
        assert_eq!(True.and(Unknown), Unknown);
        assert_eq!(Unknown.and(False), False);
        assert_eq!(False.and(True), False);
    }
}
