//! Finite trees under Clark's equality theory: unification under a mixed
//! quantifier prefix, disequation handling, and the decision procedures
//! backing the tree constraint system.
//!
//! Disequations are read over the program's own finite signature, not over
//! an assumed infinite one. On signatures whose ground-tree universe is
//! finite this makes `x ~= a` harder to satisfy than under Clark's
//! infinite-signature reading; the boundary is documented here on purpose.

use crate::constraints::{
    check_atoms, structural_entails, ConstraintSystem, Quant, QuantifierPrefix, SystemError,
    Verdict,
};
use crate::simplify::structural_simplify;
use crate::syntax::{Constraint, Signature, Subst, Term, NEQ};
use std::collections::{BTreeMap, BTreeSet};

/// Injected when the signature has no ground term at all, so that the
/// universe is never empty.
const SEED_CONSTANT: &str = "$seed";

/// A unification problem under a mixed prefix. Level 0 holds the free
/// variables (read existentially, scoped outside the prefix).
#[derive(Debug, Clone, Default)]
pub struct PrefixedEquationProblem {
    pub prefix: QuantifierPrefix,
    pub free: BTreeSet<String>,
    pub positives: Vec<(Term, Term)>,
    pub negatives: Vec<(Term, Term)>,
}

/// Triangular solved form: applying `bindings` to its own positives yields
/// syntactic identities; `residual` keeps the disequations that constrain
/// but do not bind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolvedForm {
    pub bindings: Subst,
    pub residual: Vec<(Term, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyOutcome {
    Solved(SolvedForm),
    Unsatisfiable,
    /// The disequation residue could not be decided within the enumeration
    /// cap (finite-universe fragment only).
    Undecided,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("constructor `{0}` used with arities {1} and {2}")]
    ArityMismatch(String, usize, usize),
    #[error("numeric leaves are not part of the tree fragment")]
    NumericLeaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VarInfo {
    quant: Quant,
    level: usize,
}

/// Decides `Π (⋀ positives ∧ ⋀ negatives)` over finite trees and returns a
/// most general solved form on success. Complete on this fragment, up to the
/// enumeration cap for disequations over a finite universe.
pub fn unify_under_prefix(
    problem: &PrefixedEquationProblem,
    sig: &Signature,
) -> Result<UnifyOutcome, ProblemError> {
    check_arities(problem)?;
    let mut levels: BTreeMap<String, VarInfo> = BTreeMap::new();
    for v in &problem.free {
        levels.insert(
            v.clone(),
            VarInfo {
                quant: Quant::Exists,
                level: 0,
            },
        );
    }
    for (i, (q, v)) in problem.prefix.entries().iter().enumerate() {
        levels.insert(
            v.clone(),
            VarInfo {
                quant: *q,
                level: i + 1,
            },
        );
    }

    let universe = UniverseInfo::of(sig);

    // Degenerate one-tree universe: every variable denotes the same tree.
    if let Some(ground) = universe.single_tree() {
        let mut s = Subst::new();
        for v in levels.keys() {
            s.bind(v.clone(), ground.clone());
        }
        let eq_ok = problem
            .positives
            .iter()
            .all(|(a, b)| s.apply_term(a) == s.apply_term(b));
        let neg_ok = problem
            .negatives
            .iter()
            .all(|(a, b)| s.apply_term(a) != s.apply_term(b));
        return Ok(if eq_ok && neg_ok {
            UnifyOutcome::Solved(SolvedForm {
                bindings: s,
                residual: Vec::new(),
            })
        } else {
            UnifyOutcome::Unsatisfiable
        });
    }

    let mut solver = Unifier {
        levels,
        bindings: Subst::new(),
    };
    for (a, b) in &problem.positives {
        if !solver.unify(a.clone(), b.clone()) {
            return Ok(UnifyOutcome::Unsatisfiable);
        }
    }

    let residual: Vec<(Term, Term)> = problem
        .negatives
        .iter()
        .map(|(a, b)| (solver.bindings.apply_term(a), solver.bindings.apply_term(b)))
        .collect();

    match decide_disequations(&residual, &solver.levels, &universe, &[]) {
        Verdict::True => Ok(UnifyOutcome::Solved(SolvedForm {
            bindings: solver.bindings,
            residual: residual
                .into_iter()
                .filter(|(a, b)| unifiable(a, b))
                .collect(),
        })),
        Verdict::False => Ok(UnifyOutcome::Unsatisfiable),
        Verdict::Unknown => Ok(UnifyOutcome::Undecided),
    }
}

fn check_arities(problem: &PrefixedEquationProblem) -> Result<(), ProblemError> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut walk = |t: &Term| -> Result<(), ProblemError> {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(_) => {}
                Term::Num(_) => return Err(ProblemError::NumericLeaf),
                Term::App(f, args) => {
                    if let Some(&a) = seen.get(f) {
                        if a != args.len() {
                            return Err(ProblemError::ArityMismatch(f.clone(), a, args.len()));
                        }
                    } else {
                        seen.insert(f.clone(), args.len());
                    }
                    stack.extend(args.iter());
                }
            }
        }
        Ok(())
    };
    for (a, b) in problem.positives.iter().chain(problem.negatives.iter()) {
        walk(a)?;
        walk(b)?;
    }
    Ok(())
}

struct Unifier {
    levels: BTreeMap<String, VarInfo>,
    bindings: Subst,
}

impl Unifier {
    fn info(&self, v: &str) -> VarInfo {
        // variables not in the declared sets are treated as outermost
        // existentials, matching the free-variable reading
        self.levels.get(v).copied().unwrap_or(VarInfo {
            quant: Quant::Exists,
            level: 0,
        })
    }

    fn unify(&mut self, a: Term, b: Term) -> bool {
        let a = self.bindings.apply_term(&a);
        let b = self.bindings.apply_term(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                let xi = self.info(&x);
                match (&xi.quant, &t) {
                    (Quant::Exists, _) => self.bind_exists(&x, xi, t),
                    (Quant::Forall, Term::Var(y)) => {
                        let yi = self.info(y);
                        match yi.quant {
                            // two distinct universals can never be equal
                            Quant::Forall => false,
                            Quant::Exists => self.bind_exists(&y.clone(), yi, Term::Var(x)),
                        }
                    }
                    // a universal variable ranges over all trees; it cannot
                    // be a fixed constructor term (universe has >= 2 trees)
                    (Quant::Forall, _) => false,
                }
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return false;
                }
                fa.into_iter().zip(ga).all(|(x, y)| self.unify(x, y))
            }
            (Term::Num(_), _) | (_, Term::Num(_)) => false,
        }
    }

    fn bind_exists(&mut self, x: &str, xi: VarInfo, t: Term) -> bool {
        if t.contains_var(x) {
            return false; // occurs-check: finite trees only
        }
        // an existential may only depend on universals introduced earlier
        for v in t.free_vars() {
            let vi = self.info(&v);
            match vi.quant {
                Quant::Forall => {
                    if vi.level > xi.level {
                        return false;
                    }
                }
                Quant::Exists => {
                    // lower later existentials: they must now be solvable
                    // without the universals between the two levels
                    if vi.level > xi.level {
                        self.levels.insert(
                            v.clone(),
                            VarInfo {
                                quant: Quant::Exists,
                                level: xi.level,
                            },
                        );
                    }
                }
            }
        }
        self.bindings = self.bindings.compose(&Subst::single(x, t));
        true
    }
}

pub fn unifiable(a: &Term, b: &Term) -> bool {
    plain_mgu(&[(a.clone(), b.clone())]).is_some()
}

/// Ordinary most-general unifier with all variables flexible (no prefix).
pub fn plain_mgu(eqs: &[(Term, Term)]) -> Option<Subst> {
    let mut s = Subst::new();
    let mut stack: Vec<(Term, Term)> = eqs.to_vec();
    while let Some((a, b)) = stack.pop() {
        let a = s.apply_term(&a);
        let b = s.apply_term(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.contains_var(&x) {
                    return None;
                }
                s = s.compose(&Subst::single(&x, t));
            }
            (Term::Num(p), Term::Num(q)) => {
                if p != q {
                    return None;
                }
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                stack.extend(fa.into_iter().zip(ga));
            }
            (Term::Num(_), _) | (_, Term::Num(_)) => return None,
        }
    }
    Some(s)
}

/// What the ground-tree universe of a signature looks like.
#[derive(Debug, Clone)]
struct UniverseInfo {
    /// All ground trees when the universe is finite.
    finite: Option<Vec<Term>>,
}

impl UniverseInfo {
    fn of(sig: &Signature) -> UniverseInfo {
        let mut constants: Vec<String> = Vec::new();
        let mut builder = None;
        for (name, &arity) in sig.tree_constructors() {
            if arity == 0 {
                constants.push(name.clone());
            } else if builder.is_none() {
                builder = Some((name.clone(), arity));
            }
        }
        if constants.is_empty() {
            constants.push(SEED_CONSTANT.to_string());
        }
        let finite = if builder.is_none() {
            Some(constants.iter().map(|c| Term::constant(c.clone())).collect())
        } else {
            None
        };
        UniverseInfo { finite }
    }

    fn single_tree(&self) -> Option<Term> {
        match &self.finite {
            Some(ts) if ts.len() == 1 => Some(ts[0].clone()),
            _ => None,
        }
    }

    fn is_infinite(&self) -> bool {
        self.finite.is_none()
    }
}

const ENUM_CAP: usize = 1 << 20;

/// Joint satisfiability of a disequation set under the prefix. `context`
/// carries disequations already granted by the caller; a residual matching
/// one of them is discharged.
fn decide_disequations(
    diseqs: &[(Term, Term)],
    levels: &BTreeMap<String, VarInfo>,
    universe: &UniverseInfo,
    context: &[(Term, Term)],
) -> Verdict {
    let mut pending: Vec<(Term, Term)> = Vec::new();
    for (a, b) in diseqs {
        if a == b {
            return Verdict::False;
        }
        if !unifiable(a, b) {
            continue; // can never be violated
        }
        if context
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
        {
            continue;
        }
        pending.push((a.clone(), b.clone()));
    }
    if pending.is_empty() {
        return Verdict::True;
    }

    // A disequation is forced to fail when the universal player can match
    // both sides using only earlier-determined values.
    for (a, b) in &pending {
        if forall_can_force_equal(a, b, levels) {
            return Verdict::False;
        }
    }

    if universe.is_infinite() {
        // Infinitely many trees: finitely many exclusions can always be
        // dodged level by level.
        return Verdict::True;
    }

    // Finite universe: play the quantifier game exhaustively.
    let trees = universe.finite.as_ref().unwrap();
    let mut vars: Vec<(String, VarInfo)> = BTreeSet::from_iter(
        pending
            .iter()
            .flat_map(|(a, b)| a.free_vars().into_iter().chain(b.free_vars())),
    )
    .into_iter()
    .map(|v| {
        let info = levels.get(&v).copied().unwrap_or(VarInfo {
            quant: Quant::Exists,
            level: 0,
        });
        (v, info)
    })
    .collect();
    vars.sort_by_key(|(_, i)| i.level);
    if trees.len().pow(vars.len() as u32) > ENUM_CAP {
        return Verdict::Unknown;
    }
    let ok = game_eval(&vars, trees, &mut Subst::new(), &pending);
    if ok {
        Verdict::True
    } else {
        Verdict::False
    }
}

fn game_eval(
    vars: &[(String, VarInfo)],
    trees: &[Term],
    assignment: &mut Subst,
    diseqs: &[(Term, Term)],
) -> bool {
    match vars.split_first() {
        None => diseqs
            .iter()
            .all(|(a, b)| assignment.apply_term(a) != assignment.apply_term(b)),
        Some(((v, info), rest)) => {
            let mut results = trees.iter().map(|t| {
                let mut next = assignment.clone();
                next.bind(v.clone(), t.clone());
                game_eval(rest, trees, &mut next, diseqs)
            });
            match info.quant {
                Quant::Exists => results.any(|r| r),
                Quant::Forall => results.all(|r| r),
            }
        }
    }
}

/// Can the universal player force `a = b`? True when the two sides unify by
/// binding only universal variables to terms built from strictly earlier
/// variables.
fn forall_can_force_equal(a: &Term, b: &Term, levels: &BTreeMap<String, VarInfo>) -> bool {
    let info = |v: &str| {
        levels.get(v).copied().unwrap_or(VarInfo {
            quant: Quant::Exists,
            level: 0,
        })
    };
    let mut stack = vec![(a.clone(), b.clone())];
    let mut s = Subst::new();
    while let Some((x, y)) = stack.pop() {
        let x = s.apply_term(&x);
        let y = s.apply_term(&y);
        match (x, y) {
            (Term::Var(p), Term::Var(q)) if p == q => {}
            (Term::Var(p), t) | (t, Term::Var(p)) => {
                let pi = info(&p);
                if pi.quant != Quant::Forall {
                    return false;
                }
                if t.contains_var(&p) {
                    return false;
                }
                if t.free_vars().iter().any(|v| info(v).level >= pi.level) {
                    return false;
                }
                s = s.compose(&Subst::single(&p, t));
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return false;
                }
                stack.extend(fa.into_iter().zip(ga));
            }
            _ => return false,
        }
    }
    true
}

/// Literal shape extracted from the tree fragment of a constraint formula.
struct LiteralProblem {
    prefix: QuantifierPrefix,
    eqs: Vec<(Term, Term)>,
    diseqs: Vec<(Term, Term)>,
    /// `C ⇒ C'` conjuncts, kept whole.
    implications: Vec<(Constraint, Constraint)>,
    /// A `⊥` conjunct was seen: the problem is outright unsatisfiable.
    bottom: bool,
}

fn gather_literals(
    prefix: QuantifierPrefix,
    c: &Constraint,
    taken: &mut BTreeSet<String>,
) -> Option<LiteralProblem> {
    let mut out = LiteralProblem {
        prefix,
        eqs: Vec::new(),
        diseqs: Vec::new(),
        implications: Vec::new(),
        bottom: false,
    };
    if !gather_rec(c, &mut out, taken) {
        return None;
    }
    Some(out)
}

/// Pulls conjunction and inner quantifiers into prefix-and-literals shape.
/// Inner quantifiers are appended (innermost scope) with fresh renaming.
fn gather_rec(c: &Constraint, out: &mut LiteralProblem, taken: &mut BTreeSet<String>) -> bool {
    match c {
        Constraint::True => true,
        Constraint::False => {
            out.bottom = true;
            true
        }
        Constraint::Eq(a, b) => {
            out.eqs.push((a.clone(), b.clone()));
            true
        }
        Constraint::Atom(sym, args) if sym == NEQ && args.len() == 2 => {
            out.diseqs.push((args[0].clone(), args[1].clone()));
            true
        }
        Constraint::Atom(..) => false,
        Constraint::And(a, b) => gather_rec(a, out, taken) && gather_rec(b, out, taken),
        Constraint::Implies(a, b) => {
            out.implications.push(((**a).clone(), (**b).clone()));
            true
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
            gather_rec(&renamed, out, taken)
        }
    }
}

/// The tree-constraint system over a fixed signature.
pub struct HerbrandSystem {
    signature: Signature,
}

impl HerbrandSystem {
    pub fn new(signature: Signature) -> HerbrandSystem {
        HerbrandSystem { signature }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    fn reject_numeric(&self, c: &Constraint) -> Result<(), SystemError> {
        if constraint_mentions_arith(c) {
            Err(SystemError::NumericInput("tree".into()))
        } else {
            Ok(())
        }
    }

    /// Satisfiability of the prefix-and-literals fragment, with the
    /// best-effort treatment of implications described in the module docs.
    pub fn decide(
        &self,
        prefix: &QuantifierPrefix,
        c: &Constraint,
    ) -> Result<Verdict, SystemError> {
        check_atoms(self, c)?;
        self.reject_numeric(c)?;
        let norm = c.normalize();
        // free variables outside the prefix close existentially, outermost
        let mut full = QuantifierPrefix::empty();
        for v in norm.free_vars() {
            if !prefix.contains(&v) {
                full.push(Quant::Exists, v);
            }
        }
        for (q, v) in prefix.entries() {
            full.push(*q, v.clone());
        }
        let mut taken: BTreeSet<String> = full.vars().cloned().collect();
        taken.extend(norm.free_vars());
        let Some(mut lp) = gather_literals(full, &norm, &mut taken) else {
            return Ok(Verdict::Unknown);
        };
        if lp.bottom {
            return Ok(Verdict::False);
        }

        // Merge implications whose antecedent reduces to truth, drop those
        // whose antecedent is already refuted by the positive part.
        let mut opaque: Vec<(Constraint, Constraint)> = Vec::new();
        let mut queue = std::mem::take(&mut lp.implications);
        while let Some((ante, cons)) = queue.pop() {
            match ante.normalize() {
                Constraint::True => {
                    if !gather_rec(&cons.normalize(), &mut lp, &mut taken) {
                        return Ok(Verdict::Unknown);
                    }
                    if lp.bottom {
                        return Ok(Verdict::False);
                    }
                    queue.extend(std::mem::take(&mut lp.implications));
                }
                Constraint::False => {}
                other => {
                    // antecedent refuted by the positive equations?
                    match self.entails_internal(&lp_eq_constraints(&lp), &other)? {
                        Verdict::True => {
                            if !gather_rec(&cons.normalize(), &mut lp, &mut taken) {
                                return Ok(Verdict::Unknown);
                            }
                            if lp.bottom {
                                return Ok(Verdict::False);
                            }
                            queue.extend(std::mem::take(&mut lp.implications));
                        }
                        _ => {
                            let refuted = matches!(
                                self.satisfiable_literals(&lp.prefix, &{
                                    let mut probe = lp_eq_constraints(&lp);
                                    probe.push(other.clone());
                                    probe
                                })?,
                                Verdict::False
                            );
                            if !refuted {
                                opaque.push((other, cons));
                            }
                        }
                    }
                }
            }
        }

        let problem = PrefixedEquationProblem {
            prefix: lp.prefix.clone(),
            free: BTreeSet::new(),
            positives: lp.eqs.clone(),
            negatives: lp.diseqs.clone(),
        };
        let base = match unify_under_prefix(&problem, &self.signature) {
            Ok(UnifyOutcome::Solved(_)) => Verdict::True,
            Ok(UnifyOutcome::Unsatisfiable) => Verdict::False,
            Ok(UnifyOutcome::Undecided) => Verdict::Unknown,
            Err(_) => return Ok(Verdict::Unknown),
        };
        if base != Verdict::True || opaque.is_empty() {
            return Ok(base);
        }
        Ok(Verdict::Unknown)
    }

    fn satisfiable_literals(
        &self,
        prefix: &QuantifierPrefix,
        cs: &[Constraint],
    ) -> Result<Verdict, SystemError> {
        let mut taken: BTreeSet<String> = prefix.vars().cloned().collect();
        let Some(lp) = gather_literals(prefix.clone(), &Constraint::conj(cs.to_vec()), &mut taken)
        else {
            return Ok(Verdict::Unknown);
        };
        if lp.bottom {
            return Ok(Verdict::False);
        }
        if !lp.implications.is_empty() {
            return Ok(Verdict::Unknown);
        }
        let problem = PrefixedEquationProblem {
            prefix: lp.prefix,
            free: BTreeSet::new(),
            positives: lp.eqs,
            negatives: lp.diseqs,
        };
        Ok(match unify_under_prefix(&problem, &self.signature) {
            Ok(UnifyOutcome::Solved(_)) => Verdict::True,
            Ok(UnifyOutcome::Unsatisfiable) => Verdict::False,
            _ => Verdict::Unknown,
        })
    }

    fn entails_internal(
        &self,
        premises: &[Constraint],
        conclusion: &Constraint,
    ) -> Result<Verdict, SystemError> {
        if structural_entails(premises, conclusion) {
            return Ok(Verdict::True);
        }

        // Antecedent: flatten, pull existentials as outer universals.
        let mut taken: BTreeSet<String> = BTreeSet::new();
        for p in premises {
            taken.extend(p.free_vars());
        }
        taken.extend(conclusion.free_vars());
        let mut lp = LiteralProblem {
            prefix: QuantifierPrefix::empty(),
            eqs: Vec::new(),
            diseqs: Vec::new(),
            implications: Vec::new(),
            bottom: false,
        };
        for p in premises {
            // existential premises read universally over the entailment;
            // the quantifier kind is immaterial for a plain mgu
            let norm = p.normalize();
            if !gather_rec(&norm, &mut lp, &mut taken) {
                return Ok(Verdict::Unknown);
            }
        }
        if lp.bottom {
            return Ok(Verdict::True); // antecedent unsatisfiable
        }
        if !lp.implications.is_empty() {
            // implications in the antecedent are beyond this decider
            return Ok(Verdict::Unknown);
        }

        let Some(sigma) = plain_mgu(&lp.eqs) else {
            return Ok(Verdict::True); // antecedent unsatisfiable
        };
        let context: Vec<(Term, Term)> = lp
            .diseqs
            .iter()
            .map(|(a, b)| (sigma.apply_term(a), sigma.apply_term(b)))
            .collect();
        if context.iter().any(|(a, b)| a == b) {
            return Ok(Verdict::True); // antecedent unsatisfiable
        }

        self.entails_goal(&sigma, &context, &conclusion.normalize(), &mut taken)
    }

    fn entails_goal(
        &self,
        sigma: &Subst,
        context: &[(Term, Term)],
        goal: &Constraint,
        taken: &mut BTreeSet<String>,
    ) -> Result<Verdict, SystemError> {
        match goal {
            Constraint::True => Ok(Verdict::True),
            Constraint::False => {
                // ⊥ is entailed exactly when the antecedent cannot hold
                let universe = UniverseInfo::of(&self.signature);
                let levels: BTreeMap<String, VarInfo> = BTreeMap::new();
                Ok(
                    match decide_disequations(context, &levels, &universe, &[]) {
                        Verdict::True => Verdict::False,
                        Verdict::False => Verdict::True,
                        Verdict::Unknown => Verdict::Unknown,
                    },
                )
            }
            Constraint::And(a, b) => {
                let va = self.entails_goal(sigma, context, a, taken)?;
                if va == Verdict::False {
                    return Ok(Verdict::False);
                }
                Ok(va.and(self.entails_goal(sigma, context, b, taken)?))
            }
            Constraint::Forall(v, body) => {
                let fresh = crate::syntax::primed_avoiding(v, taken);
                taken.insert(fresh.clone());
                let renamed = if fresh == *v {
                    (**body).clone()
                } else {
                    body.apply_subst(&Subst::single(v, Term::Var(fresh)))
                };
                self.entails_goal(sigma, context, &renamed, taken)
            }
            Constraint::Implies(a, b) => {
                // fold the antecedent in and restart
                let mut premises: Vec<Constraint> = context
                    .iter()
                    .map(|(x, y)| Constraint::neq(x.clone(), y.clone()))
                    .collect();
                for (v, t) in sigma.iter() {
                    premises.push(Constraint::eq(Term::Var(v.clone()), t.clone()));
                }
                premises.push(a.apply_subst(sigma));
                self.entails_internal(&premises, &b.apply_subst(sigma))
            }
            _ => {
                // core case: an existentially quantified literal conjunction
                let goal_s = goal.apply_subst(sigma);
                let mut prefix = QuantifierPrefix::empty();
                let mut fv: BTreeSet<String> = goal_s.free_vars();
                for (a, b) in context {
                    fv.extend(a.free_vars());
                    fv.extend(b.free_vars());
                }
                for v in fv {
                    prefix.push(Quant::Forall, v);
                }
                let Some(lp) = gather_literals(prefix, &goal_s.normalize(), taken) else {
                    return Ok(Verdict::Unknown);
                };
                if !lp.implications.is_empty() {
                    return Ok(Verdict::Unknown);
                }
                let problem = PrefixedEquationProblem {
                    prefix: lp.prefix.clone(),
                    free: BTreeSet::new(),
                    positives: lp.eqs.clone(),
                    negatives: lp.diseqs.clone(),
                };
                match self.check_validity(&problem, context) {
                    Some(v) => Ok(v),
                    None => Ok(Verdict::Unknown),
                }
            }
        }
    }

    /// Validity of `∀x̄ ∃ȳ (eqs ∧ diseqs)` given granted context
    /// disequations on the universal variables.
    fn check_validity(
        &self,
        problem: &PrefixedEquationProblem,
        context: &[(Term, Term)],
    ) -> Option<Verdict> {
        let universe = UniverseInfo::of(&self.signature);
        let mut levels: BTreeMap<String, VarInfo> = BTreeMap::new();
        for (i, (q, v)) in problem.prefix.entries().iter().enumerate() {
            levels.insert(
                v.clone(),
                VarInfo {
                    quant: *q,
                    level: i + 1,
                },
            );
        }
        if let Some(ground) = universe.single_tree() {
            let mut s = Subst::new();
            for v in levels.keys() {
                s.bind(v.clone(), ground.clone());
            }
            let ok = problem
                .positives
                .iter()
                .all(|(a, b)| s.apply_term(a) == s.apply_term(b))
                && problem
                    .negatives
                    .iter()
                    .all(|(a, b)| s.apply_term(a) != s.apply_term(b));
            return Some(if ok { Verdict::True } else { Verdict::False });
        }

        let mut solver = Unifier {
            levels,
            bindings: Subst::new(),
        };
        for (a, b) in &problem.positives {
            if !solver.unify(a.clone(), b.clone()) {
                // prefix-respecting unification failed; without context
                // disequations this refutes validity outright
                return Some(if context.is_empty() {
                    Verdict::False
                } else {
                    self.counterexample_search(problem, context)
                });
            }
        }
        let residual: Vec<(Term, Term)> = problem
            .negatives
            .iter()
            .map(|(a, b)| (solver.bindings.apply_term(a), solver.bindings.apply_term(b)))
            .collect();
        let ctx: Vec<(Term, Term)> = context
            .iter()
            .map(|(a, b)| (solver.bindings.apply_term(a), solver.bindings.apply_term(b)))
            .collect();
        match decide_disequations(&residual, &solver.levels, &universe, &ctx) {
            Verdict::True => Some(Verdict::True),
            Verdict::False if context.is_empty() => Some(Verdict::False),
            Verdict::False => Some(self.counterexample_search(problem, context)),
            Verdict::Unknown => Some(Verdict::Unknown),
        }
    }

    /// Bounded refutation: ground instantiations of the universal variables
    /// that satisfy the context but falsify the goal.
    fn counterexample_search(
        &self,
        problem: &PrefixedEquationProblem,
        context: &[(Term, Term)],
    ) -> Verdict {
        let trees = enumerate_ground_terms(&self.signature, 2, 64);
        if trees.is_empty() {
            return Verdict::Unknown;
        }
        let forall_vars: Vec<String> = problem
            .prefix
            .entries()
            .iter()
            .filter(|(q, _)| *q == Quant::Forall)
            .map(|(_, v)| v.clone())
            .collect();
        if trees.len().pow(forall_vars.len() as u32) > 4096 {
            return Verdict::Unknown;
        }
        let exists_vars: Vec<String> = problem
            .prefix
            .entries()
            .iter()
            .filter(|(q, _)| *q == Quant::Exists)
            .map(|(_, v)| v.clone())
            .collect();

        let mut assignments = vec![Subst::new()];
        for v in &forall_vars {
            let mut next = Vec::new();
            for s in &assignments {
                for t in &trees {
                    let mut s2 = s.clone();
                    s2.bind(v.clone(), t.clone());
                    next.push(s2);
                }
            }
            assignments = next;
        }
        for s in assignments {
            let ctx_ok = context
                .iter()
                .all(|(a, b)| s.apply_term(a) != s.apply_term(b));
            if !ctx_ok {
                continue;
            }
            // does some existential instantiation satisfy the goal here?
            let pos: Vec<(Term, Term)> = problem
                .positives
                .iter()
                .map(|(a, b)| (s.apply_term(a), s.apply_term(b)))
                .collect();
            let neg: Vec<(Term, Term)> = problem
                .negatives
                .iter()
                .map(|(a, b)| (s.apply_term(a), s.apply_term(b)))
                .collect();
            let sat = exists_sat_bounded(&exists_vars, &self.signature, &pos, &neg);
            if !sat {
                return Verdict::False;
            }
        }
        Verdict::Unknown
    }
}

fn lp_eq_constraints(lp: &LiteralProblem) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = lp
        .eqs
        .iter()
        .map(|(a, b)| Constraint::eq(a.clone(), b.clone()))
        .collect();
    out.extend(
        lp.diseqs
            .iter()
            .map(|(a, b)| Constraint::neq(a.clone(), b.clone())),
    );
    out
}

fn exists_sat_bounded(
    vars: &[String],
    sig: &Signature,
    pos: &[(Term, Term)],
    neg: &[(Term, Term)],
) -> bool {
    let mut probe = PrefixedEquationProblem::default();
    for v in vars {
        probe.prefix.push(Quant::Exists, v.clone());
    }
    probe.positives = pos.to_vec();
    probe.negatives = neg.to_vec();
    match unify_under_prefix(&probe, sig) {
        Ok(UnifyOutcome::Unsatisfiable) => false,
        // solved, undecided or malformed: never claim a counterexample
        _ => true,
    }
}

pub fn constraint_mentions_arith(c: &Constraint) -> bool {
    match c {
        Constraint::True | Constraint::False => false,
        Constraint::Eq(a, b) => a.mentions_arith() || b.mentions_arith(),
        Constraint::Atom(sym, args) => {
            sym != NEQ || args.iter().any(Term::mentions_arith)
        }
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            constraint_mentions_arith(a) || constraint_mentions_arith(b)
        }
        Constraint::Exists(_, b) | Constraint::Forall(_, b) => constraint_mentions_arith(b),
    }
}

/// All ground trees over the signature, smallest first, capped.
pub fn enumerate_ground_terms(sig: &Signature, max_depth: usize, cap: usize) -> Vec<Term> {
    let mut layers: Vec<Term> = Vec::new();
    let mut current: Vec<Term> = sig
        .tree_constructors()
        .filter(|(_, &a)| a == 0)
        .map(|(n, _)| Term::constant(n.clone()))
        .collect();
    if current.is_empty() {
        current.push(Term::constant(SEED_CONSTANT));
    }
    layers.extend(current.iter().cloned());
    for _ in 1..=max_depth {
        let mut next = Vec::new();
        for (name, &arity) in sig.tree_constructors() {
            if arity == 0 {
                continue;
            }
            // argument tuples over everything built so far
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..arity {
                let mut grown = Vec::new();
                for tup in &tuples {
                    for t in &layers {
                        let mut tup2 = tup.clone();
                        tup2.push(t.clone());
                        grown.push(tup2);
                        if grown.len() > cap {
                            break;
                        }
                    }
                }
                tuples = grown;
            }
            for tup in tuples {
                next.push(Term::app(name.clone(), tup));
                if layers.len() + next.len() >= cap {
                    break;
                }
            }
        }
        for t in next {
            if !layers.contains(&t) {
                layers.push(t);
            }
            if layers.len() >= cap {
                return layers;
            }
        }
    }
    layers
}

impl ConstraintSystem for HerbrandSystem {
    fn name(&self) -> &str {
        "herbrand"
    }

    fn interprets_atom(&self, sym: &str, arity: usize) -> bool {
        sym == NEQ && arity == 2
    }

    fn entails(
        &self,
        premises: &[Constraint],
        conclusion: &Constraint,
    ) -> Result<Verdict, SystemError> {
        for p in premises {
            check_atoms(self, p)?;
            self.reject_numeric(p)?;
        }
        check_atoms(self, conclusion)?;
        self.reject_numeric(conclusion)?;
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

    fn sig_ab_f() -> Signature {
        let mut s = Signature::default();
        s.declare_constructor("a", 0).unwrap();
        s.declare_constructor("b", 0).unwrap();
        s.declare_constructor("f", 1).unwrap();
        s
    }

    fn sig_ab() -> Signature {
        let mut s = Signature::default();
        s.declare_constructor("a", 0).unwrap();
        s.declare_constructor("b", 0).unwrap();
        s
    }

    #[test]
    fn exists_after_forall_may_depend_on_it() {
        // forall y. exists x. x = f(y)  — solvable, x -> f(y)
        let mut p = PrefixedEquationProblem::default();
        p.prefix.push(Quant::Forall, "y".into());
        p.prefix.push(Quant::Exists, "x".into());
        p.positives.push((v("x"), Term::app("f", vec![v("y")])));
        match unify_under_prefix(&p, &sig_ab_f()).unwrap() {
            UnifyOutcome::Solved(sf) => {
                assert_eq!(sf.bindings.get("x"), Some(&Term::app("f", vec![v("y")])));
            }
            other => panic!("expected solved, got {other:?}"),
        }
    }

    #[test]
    fn exists_before_forall_may_not_depend_on_it() {
        // exists x. forall y. x = y — unsatisfiable
        let mut p = PrefixedEquationProblem::default();
        p.prefix.push(Quant::Exists, "x".into());
        p.prefix.push(Quant::Forall, "y".into());
        p.positives.push((v("x"), v("y")));
        assert_eq!(
            unify_under_prefix(&p, &sig_ab_f()).unwrap(),
            UnifyOutcome::Unsatisfiable
        );
    }

    #[test]
    fn empty_problem_is_solved_empty() {
        let p = PrefixedEquationProblem::default();
        match unify_under_prefix(&p, &sig_ab_f()).unwrap() {
            UnifyOutcome::Solved(sf) => assert!(sf.bindings.is_empty() && sf.residual.is_empty()),
            other => panic!("expected solved, got {other:?}"),
        }
    }

    #[test]
    fn occurs_check_rejects_cyclic_terms() {
        for quant in [Quant::Exists, Quant::Forall] {
            let mut p = PrefixedEquationProblem::default();
            let _ = quant;
            p.prefix.push(Quant::Exists, "x".into());
            p.positives.push((v("x"), Term::app("f", vec![v("x")])));
            assert_eq!(
                unify_under_prefix(&p, &sig_ab_f()).unwrap(),
                UnifyOutcome::Unsatisfiable
            );
        }
    }

    #[test]
    fn solved_bindings_are_idempotent_on_positives() {
        let mut p = PrefixedEquationProblem::default();
        p.free.insert("x".into());
        p.free.insert("y".into());
        p.positives.push((v("x"), Term::app("f", vec![v("y")])));
        p.positives.push((v("y"), Term::constant("a")));
        match unify_under_prefix(&p, &sig_ab_f()).unwrap() {
            UnifyOutcome::Solved(sf) => {
                for (a, b) in &p.positives {
                    assert_eq!(sf.bindings.apply_term(a), sf.bindings.apply_term(b));
                }
            }
            other => panic!("expected solved, got {other:?}"),
        }
    }

    #[test]
    fn arity_mismatch_is_rejected_input() {
        let mut p = PrefixedEquationProblem::default();
        p.positives.push((
            Term::app("f", vec![v("x")]),
            Term::app("f", vec![v("x"), v("y")]),
        ));
        assert!(unify_under_prefix(&p, &sig_ab_f()).is_err());
    }

    #[test]
    fn diseq_satisfiable_with_two_constants() {
        // exists x, y: x = a /\ y = b /\ x ~= y
        let sys = HerbrandSystem::new(sig_ab());
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "x".into());
        prefix.push(Quant::Exists, "y".into());
        let c = Constraint::conj(vec![
            Constraint::eq(v("x"), Term::constant("a")),
            Constraint::eq(v("y"), Term::constant("b")),
            Constraint::neq(v("x"), v("y")),
        ]);
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::True);
    }

    #[test]
    fn direct_contradiction_is_false() {
        // (x = a => false) /\ x = a  — empty prefix, x free
        let sys = HerbrandSystem::new(sig_ab());
        let c = Constraint::and(
            Constraint::implies(
                Constraint::eq(v("x"), Term::constant("a")),
                Constraint::False,
            ),
            Constraint::eq(v("x"), Term::constant("a")),
        );
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn maher_answer_is_satisfiable() {
        // y = b /\ x ~= a over signature {a, b}
        let sys = HerbrandSystem::new(sig_ab());
        let c = Constraint::and(
            Constraint::eq(v("y"), Term::constant("b")),
            Constraint::neq(v("x"), Term::constant("a")),
        );
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::True
        );
    }

    #[test]
    fn maher_single_answer_not_entailed() {
        // {y = b} does not entail x = a
        let sys = HerbrandSystem::new(sig_ab());
        let premises = vec![Constraint::eq(v("y"), Term::constant("b"))];
        let goal = Constraint::eq(v("x"), Term::constant("a"));
        assert_eq!(sys.entails(&premises, &goal).unwrap(), Verdict::False);
    }

    #[test]
    fn maher_equivalence_both_ways() {
        let sys = HerbrandSystem::new(sig_ab());
        // exists w. (w = x /\ b = y /\ w ~= a)  equivalent to  y = b /\ x ~= a
        let raw = Constraint::exists(
            "w",
            Constraint::conj(vec![
                Constraint::eq(v("w"), v("x")),
                Constraint::eq(Term::constant("b"), v("y")),
                Constraint::neq(v("w"), Term::constant("a")),
            ]),
        );
        let pretty = Constraint::and(
            Constraint::eq(v("y"), Term::constant("b")),
            Constraint::neq(v("x"), Term::constant("a")),
        );
        assert_eq!(sys.entails(&[raw.clone()], &pretty).unwrap(), Verdict::True);
        assert_eq!(sys.entails(&[pretty], &raw).unwrap(), Verdict::True);
    }

    #[test]
    fn entails_rejects_numeric_input() {
        let sys = HerbrandSystem::new(sig_ab());
        let c = Constraint::eq(v("x"), Term::int(1));
        assert!(sys.entails(&[], &c).is_err());
    }

    #[test]
    fn finite_universe_diseq_exhaustion() {
        // x ~= a /\ x ~= b is unsatisfiable over {a, b}
        let sys = HerbrandSystem::new(sig_ab());
        let c = Constraint::and(
            Constraint::neq(v("x"), Term::constant("a")),
            Constraint::neq(v("x"), Term::constant("b")),
        );
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::False
        );
        // but satisfiable over {a, b, f}
        let sys2 = HerbrandSystem::new(sig_ab_f());
        assert_eq!(
            sys2.satisfiable(&QuantifierPrefix::empty(), &c).unwrap(),
            Verdict::True
        );
    }

    #[test]
    fn congruence_properties() {
        let sys = HerbrandSystem::new(sig_ab_f());
        let t1 = Term::app("f", vec![v("x")]);
        let t2 = Term::app("f", vec![v("y")]);
        let t3 = Term::app("f", vec![Term::constant("a")]);
        assert_eq!(
            sys.entails(&[], &Constraint::eq(t1.clone(), t1.clone())).unwrap(),
            Verdict::True
        );
        assert_eq!(
            sys.entails(
                &[Constraint::eq(t1.clone(), t2.clone())],
                &Constraint::eq(t2.clone(), t1.clone())
            )
            .unwrap(),
            Verdict::True
        );
        assert_eq!(
            sys.entails(
                &[
                    Constraint::eq(t1.clone(), t2.clone()),
                    Constraint::eq(t2.clone(), t3.clone())
                ],
                &Constraint::eq(t1, t3)
            )
            .unwrap(),
            Verdict::True
        );
    }
}
