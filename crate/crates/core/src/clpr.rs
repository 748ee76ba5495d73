//! The combined constraint system: finite trees whose leaves may be
//! rationals. Structural content routes to the tree machinery, numeric
//! content to linear arithmetic; variable sorts are inferred, never
//! declared, and a sort conflict is unsatisfiability rather than an error.

use crate::constraints::{
    check_atoms, structural_entails, ConstraintSystem, Quant, QuantifierPrefix, SystemError,
    Verdict,
};
use crate::herbrand::{unify_under_prefix, HerbrandSystem, PrefixedEquationProblem, UnifyOutcome};
use crate::linreal::LinRealSystem;
use crate::simplify::structural_simplify;
use crate::syntax::{is_arith_symbol, Constraint, Signature, Subst, Term, LEQ, LT, NEQ};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Tree,
    Numeric,
}

/// Result of decomposing mixed equational structure: residual tree
/// equations and disequations, numeric atoms, and the sort each variable
/// was pinned to (unknowns stay absent).
#[derive(Debug, Clone, Default)]
pub struct MixedConstraint {
    pub tree_eqs: Vec<(Term, Term)>,
    pub tree_diseqs: Vec<(Term, Term)>,
    pub numeric: Vec<Constraint>,
    pub sorts: BTreeMap<String, Sort>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortClash;

fn is_numeric_term(t: &Term, sorts: &BTreeMap<String, Sort>) -> bool {
    match t {
        Term::Num(_) => true,
        Term::Var(v) => sorts.get(v) == Some(&Sort::Numeric),
        Term::App(f, _) => is_arith_symbol(f),
    }
}

fn is_tree_term(t: &Term, sorts: &BTreeMap<String, Sort>) -> bool {
    match t {
        Term::Num(_) => false,
        Term::Var(v) => sorts.get(v) == Some(&Sort::Tree),
        Term::App(f, _) => !is_arith_symbol(f),
    }
}

impl MixedConstraint {
    fn assign(&mut self, v: &str, sort: Sort) -> Result<(), SortClash> {
        match self.sorts.insert(v.to_string(), sort) {
            Some(old) if old != sort => Err(SortClash),
            _ => Ok(()),
        }
    }

    /// One decomposition step over an equation: match constructors
    /// recursively, emit numeric equations where a side bottoms out
    /// numeric, keep variable bindings.
    pub fn decompose_eq(&mut self, left: &Term, right: &Term) -> Result<(), SortClash> {
        match (left, right) {
            (Term::App(f, fa), Term::App(g, ga))
                if !is_arith_symbol(f) && !is_arith_symbol(g) =>
            {
                if f != g || fa.len() != ga.len() {
                    return Err(SortClash);
                }
                for (a, b) in fa.iter().zip(ga) {
                    self.decompose_eq(a, b)?;
                }
                Ok(())
            }
            (a, b) if is_numeric_term(a, &self.sorts) || is_numeric_term(b, &self.sorts) => {
                // numeric equation; any variable on either side is numeric
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        self.assign(&v.clone(), Sort::Numeric)?;
                    }
                    if is_tree_term(t, &self.sorts) {
                        return Err(SortClash);
                    }
                }
                self.numeric.push(Constraint::eq(a.clone(), b.clone()));
                Ok(())
            }
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if is_tree_term(t, &self.sorts) {
                    self.assign(v, Sort::Tree)?;
                }
                self.tree_eqs.push((Term::Var(v.clone()), t.clone()));
                Ok(())
            }
            _ => Err(SortClash),
        }
    }
}

/// Decomposes a single equation from scratch, as the combined system sees
/// it. `None` means unsatisfiable (constructor or sort clash).
pub fn decompose(left: &Term, right: &Term) -> Option<MixedConstraint> {
    let mut out = MixedConstraint::default();
    // two passes so late sort evidence reaches early variables
    out.decompose_eq(left, right).ok()?;
    let eqs = std::mem::take(&mut out.tree_eqs);
    let numeric = std::mem::take(&mut out.numeric);
    for (a, b) in &eqs {
        out.decompose_eq(a, b).ok()?;
    }
    for c in numeric {
        if let Constraint::Eq(a, b) = &c {
            out.decompose_eq(a, b).ok()?;
        }
    }
    Some(out)
}

/// Gathered literal view of a mixed constraint formula.
struct MixedProblem {
    prefix: QuantifierPrefix,
    mixed: MixedConstraint,
    /// numeric comparison atoms and whole numeric implications
    numeric_rest: Vec<Constraint>,
    /// implications that could not be classified
    opaque: Vec<Constraint>,
    bottom: bool,
}

fn classify_sorts(c: &Constraint, sorts: &mut BTreeMap<String, Sort>) {
    // worklist sort inference: numerals and arithmetic force Numeric,
    // constructor terms force Tree, equations join
    let mut changed = true;
    while changed {
        changed = false;
        classify_walk(c, sorts, &mut changed);
    }
}

fn note(v: &str, s: Sort, sorts: &mut BTreeMap<String, Sort>, changed: &mut bool) {
    if sorts.get(v) != Some(&s) && !sorts.contains_key(v) {
        sorts.insert(v.to_string(), s);
        *changed = true;
    }
}

fn term_sort(t: &Term, sorts: &BTreeMap<String, Sort>) -> Option<Sort> {
    if is_numeric_term(t, sorts) {
        Some(Sort::Numeric)
    } else if is_tree_term(t, sorts) {
        Some(Sort::Tree)
    } else {
        None
    }
}

fn classify_walk(c: &Constraint, sorts: &mut BTreeMap<String, Sort>, changed: &mut bool) {
    let join = |a: &Term, b: &Term, sorts: &mut BTreeMap<String, Sort>, changed: &mut bool| {
        if let Some(s) = term_sort(a, sorts).or_else(|| term_sort(b, sorts)) {
            for t in [a, b] {
                if let Term::Var(v) = t {
                    note(v, s, sorts, changed);
                }
            }
        }
        // variables inside arithmetic structure are numeric
        for t in [a, b] {
            mark_arith_vars(t, false, sorts, changed);
        }
    };
    match c {
        Constraint::True | Constraint::False => {}
        Constraint::Eq(a, b) => join(a, b, sorts, changed),
        Constraint::Atom(sym, args) if sym == NEQ && args.len() == 2 => {
            join(&args[0], &args[1], sorts, changed)
        }
        Constraint::Atom(sym, args) if sym == LEQ || sym == LT => {
            for t in args {
                mark_arith_vars(t, true, sorts, changed);
            }
        }
        Constraint::Atom(..) => {}
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            classify_walk(a, sorts, changed);
            classify_walk(b, sorts, changed);
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => classify_walk(b, sorts, changed),
    }
}

fn mark_arith_vars(
    t: &Term,
    at_numeric_position: bool,
    sorts: &mut BTreeMap<String, Sort>,
    changed: &mut bool,
) {
    match t {
        Term::Var(v) => {
            if at_numeric_position {
                note(v, Sort::Numeric, sorts, changed);
            }
        }
        Term::Num(_) => {}
        Term::App(f, args) if is_arith_symbol(f) => {
            for a in args {
                mark_arith_vars(a, true, sorts, changed);
            }
        }
        Term::App(_, args) => {
            for a in args {
                mark_arith_vars(a, false, sorts, changed);
            }
        }
    }
}

fn gather_mixed(prefix: QuantifierPrefix, c: &Constraint) -> Option<MixedProblem> {
    let mut out = MixedProblem {
        prefix,
        mixed: MixedConstraint::default(),
        numeric_rest: Vec::new(),
        opaque: Vec::new(),
        bottom: false,
    };
    classify_sorts(c, &mut out.mixed.sorts);
    let mut taken: BTreeSet<String> = out.prefix.vars().cloned().collect();
    taken.extend(c.free_vars());
    if !gather_mixed_rec(c, &mut out, &mut taken) {
        return None;
    }
    Some(out)
}

fn gather_mixed_rec(
    c: &Constraint,
    out: &mut MixedProblem,
    taken: &mut BTreeSet<String>,
) -> bool {
    match c {
        Constraint::True => true,
        Constraint::False => {
            out.bottom = true;
            true
        }
        Constraint::Eq(a, b) => match out.mixed.decompose_eq(a, b) {
            Ok(()) => true,
            Err(SortClash) => {
                out.bottom = true;
                true
            }
        },
        Constraint::Atom(sym, args) if sym == NEQ && args.len() == 2 => {
            let a = &args[0];
            let b = &args[1];
            if is_numeric_term(a, &out.mixed.sorts) || is_numeric_term(b, &out.mixed.sorts) {
                out.numeric_rest.push(c.clone());
            } else {
                out.mixed.tree_diseqs.push((a.clone(), b.clone()));
            }
            true
        }
        Constraint::Atom(sym, _) if sym == LEQ || sym == LT => {
            out.numeric_rest.push(c.clone());
            true
        }
        Constraint::Atom(..) => false,
        Constraint::And(a, b) => {
            gather_mixed_rec(a, out, taken) && gather_mixed_rec(b, out, taken)
        }
        Constraint::Implies(a, b) => {
            match a.normalize() {
                Constraint::True => gather_mixed_rec(b, out, taken),
                Constraint::False => true,
                ante => {
                    let whole = Constraint::implies(ante, (**b).clone());
                    if constraint_is_numeric(&whole, &out.mixed.sorts) {
                        out.numeric_rest.push(whole);
                    } else {
                        out.opaque.push(whole);
                    }
                    true
                }
            }
        }
        Constraint::Exists(v, body) | Constraint::Forall(v, body) => {
            let q = if matches!(c, Constraint::Exists(..)) {
                Quant::Exists
            } else {
                Quant::Forall
            };
            let fresh = crate::syntax::primed_avoiding(v, taken);
            taken.insert(fresh.clone());
            let renamed = if fresh == *v {
                (**body).clone()
            } else {
                body.apply_subst(&Subst::single(v, Term::Var(fresh.clone())))
            };
            out.prefix.push(q, fresh);
            gather_mixed_rec(&renamed, out, taken)
        }
    }
}

fn constraint_is_numeric(c: &Constraint, sorts: &BTreeMap<String, Sort>) -> bool {
    match c {
        Constraint::True | Constraint::False => true,
        Constraint::Eq(a, b) => {
            term_numeric_only(a, sorts) && term_numeric_only(b, sorts)
        }
        Constraint::Atom(sym, args) if sym == LEQ || sym == LT || sym == NEQ => {
            args.iter().all(|t| term_numeric_only(t, sorts))
        }
        Constraint::Atom(..) => false,
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            constraint_is_numeric(a, sorts) && constraint_is_numeric(b, sorts)
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => constraint_is_numeric(b, sorts),
    }
}

fn term_numeric_only(t: &Term, sorts: &BTreeMap<String, Sort>) -> bool {
    match t {
        Term::Num(_) => true,
        Term::Var(v) => sorts.get(v) != Some(&Sort::Tree),
        Term::App(f, args) => {
            is_arith_symbol(f) && args.iter().all(|a| term_numeric_only(a, sorts))
        }
    }
}

fn constraint_is_tree_only(c: &Constraint) -> bool {
    !crate::herbrand::constraint_mentions_arith(c)
        && no_comparison_atoms(c)
}

fn no_comparison_atoms(c: &Constraint) -> bool {
    match c {
        Constraint::True | Constraint::False | Constraint::Eq(..) => true,
        Constraint::Atom(sym, _) => sym == NEQ,
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            no_comparison_atoms(a) && no_comparison_atoms(b)
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => no_comparison_atoms(b),
    }
}

fn constraint_mentions_tree(c: &Constraint, sorts: &BTreeMap<String, Sort>) -> bool {
    match c {
        Constraint::True | Constraint::False => false,
        Constraint::Eq(a, b) => {
            !term_numeric_only(a, sorts) || !term_numeric_only(b, sorts)
        }
        Constraint::Atom(_, args) => args.iter().any(|t| !term_numeric_only(t, sorts)),
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            constraint_mentions_tree(a, sorts) || constraint_mentions_tree(b, sorts)
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => {
            constraint_mentions_tree(b, sorts)
        }
    }
}

/// The combined system over a program signature.
pub struct ClprSystem {
    trees: HerbrandSystem,
    reals: LinRealSystem,
}

impl ClprSystem {
    pub fn new(signature: Signature) -> ClprSystem {
        ClprSystem {
            trees: HerbrandSystem::new(signature),
            reals: LinRealSystem::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        self.trees.signature()
    }

    /// Satisfiability of `Π S` in the combined theory: iterated
    /// decomposition, then the tree residue and the numeric residue are
    /// decided by their own systems (variable sorts are disjoint, so the
    /// conjunction of verdicts is sound).
    pub fn decide(
        &self,
        prefix: &QuantifierPrefix,
        c: &Constraint,
    ) -> Result<Verdict, SystemError> {
        check_atoms(self, c)?;
        let norm = c.normalize();

        // pure fragments take the direct route
        if constraint_is_tree_only(&norm) {
            return self.trees.satisfiable(prefix, &norm);
        }
        let mut probe_sorts = BTreeMap::new();
        classify_sorts(&norm, &mut probe_sorts);
        if !constraint_mentions_tree(&norm, &probe_sorts) {
            return self.reals.satisfiable(prefix, &norm);
        }

        let mut full = QuantifierPrefix::empty();
        for v in norm.free_vars() {
            if !prefix.contains(&v) {
                full.push(Quant::Exists, v);
            }
        }
        for (q, v) in prefix.entries() {
            full.push(*q, v.clone());
        }
        let Some(problem) = gather_mixed(full, &norm) else {
            return Ok(Verdict::Unknown);
        };
        if problem.bottom {
            return Ok(Verdict::False);
        }
        if !problem.opaque.is_empty() {
            return Ok(Verdict::Unknown);
        }

        // tree side under the tree part of the prefix
        let sorts = &problem.mixed.sorts;
        let mut tree_prefix = QuantifierPrefix::empty();
        let mut num_prefix = QuantifierPrefix::empty();
        for (q, v) in problem.prefix.entries() {
            match sorts.get(v) {
                Some(Sort::Numeric) => num_prefix.push(*q, v.clone()),
                _ => tree_prefix.push(*q, v.clone()),
            }
        }
        let tree_problem = PrefixedEquationProblem {
            prefix: tree_prefix,
            free: BTreeSet::new(),
            positives: problem.mixed.tree_eqs.clone(),
            negatives: problem.mixed.tree_diseqs.clone(),
        };
        let tree_verdict = match unify_under_prefix(&tree_problem, self.trees.signature()) {
            Ok(UnifyOutcome::Solved(_)) => Verdict::True,
            Ok(UnifyOutcome::Unsatisfiable) => Verdict::False,
            _ => Verdict::Unknown,
        };
        if tree_verdict == Verdict::False {
            return Ok(Verdict::False);
        }

        let mut numeric = problem.mixed.numeric.clone();
        numeric.extend(problem.numeric_rest.clone());
        let numeric_verdict = self
            .reals
            .satisfiable(&num_prefix, &Constraint::conj(numeric))?;
        Ok(tree_verdict.and(numeric_verdict))
    }

    fn entails_internal(
        &self,
        premises: &[Constraint],
        conclusion: &Constraint,
    ) -> Result<Verdict, SystemError> {
        if structural_entails(premises, conclusion) {
            return Ok(Verdict::True);
        }
        let combined = Constraint::conj(premises.to_vec()).normalize();
        let conclusion = conclusion.normalize();

        if constraint_is_tree_only(&combined) && constraint_is_tree_only(&conclusion) {
            return self.trees.entails(&[combined], &conclusion);
        }
        let mut sorts = BTreeMap::new();
        classify_sorts(&combined, &mut sorts);
        classify_sorts(&conclusion, &mut sorts);
        if !constraint_mentions_tree(&combined, &sorts)
            && !constraint_mentions_tree(&conclusion, &sorts)
        {
            return self.reals.entails(&[combined], &conclusion);
        }

        // premises: pull existentials, decompose
        let Some(premise) = gather_mixed(QuantifierPrefix::empty(), &combined) else {
            return Ok(Verdict::Unknown);
        };
        if premise.bottom {
            return Ok(Verdict::True);
        }
        if !premise.opaque.is_empty() {
            return Ok(Verdict::Unknown);
        }
        let Some(sigma) = crate::herbrand::plain_mgu(&premise.mixed.tree_eqs) else {
            return Ok(Verdict::True);
        };

        self.entails_goal(&premise, &sigma, &conclusion)
    }

    fn entails_goal(
        &self,
        premise: &MixedProblem,
        sigma: &Subst,
        goal: &Constraint,
    ) -> Result<Verdict, SystemError> {
        match goal {
            Constraint::True => Ok(Verdict::True),
            Constraint::And(a, b) => {
                let va = self.entails_goal(premise, sigma, a)?;
                if va == Verdict::False {
                    return Ok(Verdict::False);
                }
                Ok(va.and(self.entails_goal(premise, sigma, b)?))
            }
            Constraint::Implies(a, b) => {
                let mut extended: Vec<Constraint> = premise_constraints(premise, sigma);
                extended.push(a.apply_subst(sigma));
                self.entails_internal(&extended, &b.apply_subst(sigma))
            }
            Constraint::Forall(v, body) => {
                // fresh-rename and keep universal reading
                let mut taken: BTreeSet<String> = body.free_vars();
                taken.extend(sigma.iter().flat_map(|(x, t)| {
                    let mut s = t.free_vars();
                    s.insert(x.clone());
                    s
                }));
                let fresh = crate::syntax::primed_avoiding(v, &taken);
                let renamed = body.apply_subst(&Subst::single(v, Term::Var(fresh)));
                self.entails_goal(premise, sigma, &renamed)
            }
            _ => {
                // existentially quantified mixed literal conjunction
                let goal_s = goal.apply_subst(sigma).normalize();
                let Some(gp) = gather_mixed(QuantifierPrefix::empty(), &goal_s) else {
                    return Ok(Verdict::Unknown);
                };
                if gp.bottom {
                    // ⊥ in the goal: entailed only if premises are unsat,
                    // which plain_mgu already ruled out for the tree part
                    return Ok(Verdict::Unknown);
                }
                if !gp.opaque.is_empty() {
                    return Ok(Verdict::Unknown);
                }

                // tree side: premise bindings + disequations against the
                // goal's structural residue
                let mut tree_premises: Vec<Constraint> = Vec::new();
                for (v, t) in sigma.iter() {
                    if !crate::herbrand::constraint_mentions_arith(&Constraint::eq(
                        Term::Var(v.clone()),
                        t.clone(),
                    )) {
                        tree_premises.push(Constraint::eq(Term::Var(v.clone()), t.clone()));
                    }
                }
                for (a, b) in &premise.mixed.tree_diseqs {
                    tree_premises.push(Constraint::neq(
                        sigma.apply_term(a),
                        sigma.apply_term(b),
                    ));
                }
                let mut tree_goal_parts: Vec<Constraint> = gp
                    .mixed
                    .tree_eqs
                    .iter()
                    .map(|(a, b)| Constraint::eq(a.clone(), b.clone()))
                    .collect();
                tree_goal_parts.extend(
                    gp.mixed
                        .tree_diseqs
                        .iter()
                        .map(|(a, b)| Constraint::neq(a.clone(), b.clone())),
                );
                let tree_exists: Vec<String> = gp
                    .prefix
                    .entries()
                    .iter()
                    .filter(|(q, v)| {
                        *q == Quant::Exists && gp.mixed.sorts.get(v) != Some(&Sort::Numeric)
                    })
                    .map(|(_, v)| v.clone())
                    .collect();
                let mut tree_goal = Constraint::conj(tree_goal_parts);
                for v in tree_exists.into_iter().rev() {
                    tree_goal = Constraint::exists(v, tree_goal);
                }
                let tree_verdict = if tree_goal == Constraint::True {
                    Verdict::True
                } else {
                    self.trees.entails(&tree_premises, &tree_goal)?
                };
                if tree_verdict == Verdict::False {
                    return Ok(Verdict::False);
                }

                // numeric side
                let mut num_premises: Vec<Constraint> = premise
                    .mixed
                    .numeric
                    .iter()
                    .chain(premise.numeric_rest.iter())
                    .map(|c| c.apply_subst(sigma))
                    .collect();
                num_premises.retain(|c| c != &Constraint::True);
                let mut num_goal_parts = gp.mixed.numeric.clone();
                num_goal_parts.extend(gp.numeric_rest.clone());
                let num_exists: Vec<String> = gp
                    .prefix
                    .entries()
                    .iter()
                    .filter(|(q, v)| {
                        *q == Quant::Exists && gp.mixed.sorts.get(v) == Some(&Sort::Numeric)
                    })
                    .map(|(_, v)| v.clone())
                    .collect();
                let mut num_goal = Constraint::conj(num_goal_parts);
                for v in num_exists.into_iter().rev() {
                    num_goal = Constraint::exists(v, num_goal);
                }
                let numeric_verdict = if num_goal == Constraint::True {
                    Verdict::True
                } else {
                    self.reals.entails(&num_premises, &num_goal)?
                };
                Ok(tree_verdict.and(numeric_verdict))
            }
        }
    }
}

fn premise_constraints(premise: &MixedProblem, sigma: &Subst) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = Vec::new();
    for (v, t) in sigma.iter() {
        out.push(Constraint::eq(Term::Var(v.clone()), t.clone()));
    }
    for (a, b) in &premise.mixed.tree_diseqs {
        out.push(Constraint::neq(sigma.apply_term(a), sigma.apply_term(b)));
    }
    for c in premise.mixed.numeric.iter().chain(premise.numeric_rest.iter()) {
        out.push(c.apply_subst(sigma));
    }
    out
}

impl ConstraintSystem for ClprSystem {
    fn name(&self) -> &str {
        "clpr"
    }

    fn interprets_atom(&self, sym: &str, arity: usize) -> bool {
        arity == 2 && (sym == LEQ || sym == LT || sym == NEQ)
    }

    fn entails(
        &self,
        premises: &[Constraint],
        conclusion: &Constraint,
    ) -> Result<Verdict, SystemError> {
        for p in premises {
            check_atoms(self, p)?;
        }
        check_atoms(self, conclusion)?;
        self.entails_internal(premises, conclusion)
    }

    fn satisfiable(
        &self,
        prefix: &QuantifierPrefix,
        constraint: &Constraint,
    ) -> Result<Verdict, SystemError> {
        self.decide(prefix, constraint)
    }

    fn simplify(&self, _prefix: &QuantifierPrefix, constraint: &Constraint) -> Constraint {
        structural_simplify(constraint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn sig_lists() -> Signature {
        let mut s = Signature::default();
        s.declare_constructor("[]", 0).unwrap();
        s.declare_constructor("[|]", 2).unwrap();
        s.declare_constructor("ex2", 1).unwrap();
        s.declare_constructor("a", 0).unwrap();
        s
    }

    #[test]
    fn decompose_matches_numeric_leaf() {
        // [ex2(N)] = [ex2(13/2)] leaves only N = 13/2
        let left = Term::list(vec![Term::app("ex2", vec![v("N")])]);
        let right = Term::list(vec![Term::app("ex2", vec![Term::ratio(13, 2)])]);
        let out = decompose(&left, &right).unwrap();
        assert!(out.tree_eqs.is_empty());
        assert_eq!(out.numeric.len(), 1);
        assert_eq!(
            out.numeric[0],
            Constraint::eq(v("N"), Term::ratio(13, 2))
        );
        assert_eq!(out.sorts.get("N"), Some(&Sort::Numeric));
    }

    #[test]
    fn decompose_rejects_constructor_clash() {
        let left = Term::app("f", vec![v("x")]);
        let right = Term::app("g", vec![v("y")]);
        assert!(decompose(&left, &right).is_none());
    }

    #[test]
    fn decompose_keeps_tree_binding() {
        // x = [a | L]
        let right = Term::cons(Term::constant("a"), v("L"));
        let out = decompose(&v("x"), &right).unwrap();
        assert_eq!(out.tree_eqs, vec![(v("x"), right)]);
        assert!(out.numeric.is_empty());
    }

    #[test]
    fn mixed_satisfiability_example() {
        // exists N, L: L = [ex2(N)] /\ N > 6
        let sys = ClprSystem::new(sig_lists());
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "N".into());
        prefix.push(Quant::Exists, "L".into());
        let c = Constraint::and(
            Constraint::eq(v("L"), Term::list(vec![Term::app("ex2", vec![v("N")])])),
            Constraint::lt(Term::int(6), v("N")),
        );
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::True);
    }

    #[test]
    fn occurs_check_through_lists() {
        // exists L: L = [a | L] is false
        let sys = ClprSystem::new(sig_lists());
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "L".into());
        let c = Constraint::eq(v("L"), Term::cons(Term::constant("a"), v("L")));
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::False);
    }

    #[test]
    fn numeral_never_unifies_with_constructor() {
        let sys = ClprSystem::new(sig_lists());
        let c = Constraint::eq(Term::constant("a"), Term::int(3));
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn mixed_entailment_bridges_sorts() {
        // {L = [ex2(X)], X > 6} entails exists N (L = [ex2(N)] /\ N > 6)
        // and conversely
        let sys = ClprSystem::new(sig_lists());
        let answer = Constraint::exists(
            "X",
            Constraint::and(
                Constraint::eq(v("L"), Term::list(vec![Term::app("ex2", vec![v("X")])])),
                Constraint::lt(Term::int(6), v("X")),
            ),
        );
        let wanted = Constraint::exists(
            "N",
            Constraint::and(
                Constraint::eq(v("L"), Term::list(vec![Term::app("ex2", vec![v("N")])])),
                Constraint::lt(Term::int(6), v("N")),
            ),
        );
        assert_eq!(sys.entails(&[answer.clone()], &wanted).unwrap(), Verdict::True);
        assert_eq!(sys.entails(&[wanted], &answer).unwrap(), Verdict::True);
    }

    #[test]
    fn agrees_with_pure_backends() {
        let sys = ClprSystem::new(sig_lists());
        // purely structural goes the tree route
        let c = Constraint::eq(v("x"), Term::constant("a"));
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::True
        );
        // purely numeric goes the QE route
        let n = Constraint::and(
            Constraint::lt(v("x"), Term::int(0)),
            Constraint::lt(Term::int(0), v("x")),
        );
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &n).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn sort_inference_is_stable() {
        let c = Constraint::and(
            Constraint::eq(v("L"), Term::list(vec![Term::app("ex2", vec![v("N")])])),
            Constraint::lt(Term::int(6), v("N")),
        );
        let mut sorts = BTreeMap::new();
        classify_sorts(&c, &mut sorts);
        let snapshot = sorts.clone();
        classify_sorts(&c, &mut sorts);
        assert_eq!(snapshot, sorts);
        assert_eq!(sorts.get("N"), Some(&Sort::Numeric));
    }
}
