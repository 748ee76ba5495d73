//! The goal-solving engine: states are a quantifier prefix, a global
//! constraint and a multiset of ⟨local program, local constraint, goal⟩
//! triples. One transformation rule fires per goal shape; constraint goals
//! merge into the global store behind a satisfiability guard; atoms
//! backchain against fresh clause variants. Disjunct and clause selection
//! are the only don't-know choices and are explored by chronological
//! backtracking; triple selection is don't-care and fixed to the first.

mod solve;
mod trace;

pub use solve::{solve, SolveStatus, Solver};
pub use trace::{parse_trace, render_trace, replay, ReplayError};

use crate::constraints::{ConstraintSystem, Quant, QuantifierPrefix, SystemError, Verdict};
use crate::syntax::{Clause, Constraint, FreshSource, Goal, PredAtom, Program, Subst, Term};
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    Conj,
    Disj,
    ImplClause,
    ImplConstraint,
    ExQuant,
    UnivQuant,
    Constraint,
    Backchain,
}

impl RuleId {
    pub fn roman(self) -> &'static str {
        match self {
            RuleId::Conj => "i",
            RuleId::Disj => "ii",
            RuleId::ImplClause => "iii",
            RuleId::ImplConstraint => "iv",
            RuleId::ExQuant => "v",
            RuleId::UnivQuant => "vi",
            RuleId::Constraint => "vii",
            RuleId::Backchain => "viii",
        }
    }

    pub fn from_roman(s: &str) -> Option<RuleId> {
        Some(match s {
            "i" => RuleId::Conj,
            "ii" => RuleId::Disj,
            "iii" => RuleId::ImplClause,
            "iv" => RuleId::ImplConstraint,
            "v" => RuleId::ExQuant,
            "vi" => RuleId::UnivQuant,
            "vii" => RuleId::Constraint,
            "viii" => RuleId::Backchain,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    None,
    /// Disjunct 1 or 2.
    Branch(u8),
    /// Clause index into the elaboration of the local program.
    ClauseIdx(usize),
}

/// One goal triple. The id is stable across a resolution and names the
/// triple in traces and certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub id: u64,
    pub program: Program,
    pub constraint: Constraint,
    pub goal: Goal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub prefix: QuantifierPrefix,
    pub global: Constraint,
    pub triples: Vec<Triple>,
    pub protected: BTreeSet<String>,
}

impl State {
    pub fn is_final(&self) -> bool {
        self.triples.is_empty()
    }

    /// `Πₙ Sₙ`, the (partially) calculated answer constraint.
    pub fn answer_constraint(&self) -> Constraint {
        self.prefix.quantify(self.global.clone()).normalize()
    }

    /// Well-formedness: prefix variables distinct and disjoint from the
    /// protected set; free variables of the store and of every triple
    /// inside prefix ∪ protected.
    pub fn well_formed(&self) -> bool {
        let mut seen = BTreeSet::new();
        for v in self.prefix.vars() {
            if !seen.insert(v.clone()) || self.protected.contains(v) {
                return false;
            }
        }
        let mut scope: BTreeSet<String> = self.protected.clone();
        scope.extend(self.prefix.vars().cloned());
        let ok = |vars: BTreeSet<String>| vars.iter().all(|v| scope.contains(v));
        if !ok(self.global.free_vars()) {
            return false;
        }
        self.triples.iter().all(|t| {
            ok(t.goal.free_vars()) && ok(t.constraint.free_vars()) && ok(t.program.free_vars())
        })
    }

    pub fn digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        format!("{}", self.prefix).hash(&mut h);
        format!("{}", self.global.canon()).hash(&mut h);
        for t in &self.triples {
            t.id.hash(&mut h);
            format!("{}", t.goal.canon()).hash(&mut h);
            format!("{}", t.constraint.canon()).hash(&mut h);
            t.program.len().hash(&mut h);
            for c in t.program.clauses() {
                format!("{}", c.canon()).hash(&mut h);
            }
        }
        h.finish()
    }
}

/// `S₀ ≡ [⊤ □ ⟨Δ, ⊤, G⟩]` with the free variables of the program and goal
/// protected.
pub fn initial_state(program: &Program, goal: &Goal) -> State {
    let mut protected = program.free_vars();
    protected.extend(goal.free_vars());
    State {
        prefix: QuantifierPrefix::empty(),
        global: Constraint::True,
        triples: vec![Triple {
            id: 0,
            program: program.clone(),
            constraint: Constraint::True,
            goal: goal.clone(),
        }],
        protected,
    }
}

/// Every identifier occurring in the program and goal (free, bound,
/// constructor and predicate names alike); the fresh supply avoids all of
/// them.
pub fn reserved_names(program: &Program, goal: &Goal) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for c in program.clauses() {
        collect_clause_names(c, &mut out);
    }
    collect_goal_names(goal, &mut out);
    out
}

fn collect_term_names(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::Num(_) => {}
        Term::App(f, args) => {
            out.insert(f.clone());
            for a in args {
                collect_term_names(a, out);
            }
        }
    }
}

fn collect_constraint_names(c: &Constraint, out: &mut BTreeSet<String>) {
    match c {
        Constraint::True | Constraint::False => {}
        Constraint::Eq(a, b) => {
            collect_term_names(a, out);
            collect_term_names(b, out);
        }
        Constraint::Atom(_, args) => {
            for t in args {
                collect_term_names(t, out);
            }
        }
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            collect_constraint_names(a, out);
            collect_constraint_names(b, out);
        }
        Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
            out.insert(v.clone());
            collect_constraint_names(b, out);
        }
    }
}

fn collect_goal_names(g: &Goal, out: &mut BTreeSet<String>) {
    match g {
        Goal::Atom(a) => {
            out.insert(a.pred.clone());
            for t in &a.args {
                collect_term_names(t, out);
            }
        }
        Goal::Constraint(c) => collect_constraint_names(c, out),
        Goal::And(a, b) | Goal::Or(a, b) => {
            collect_goal_names(a, out);
            collect_goal_names(b, out);
        }
        Goal::ClauseImplies(d, g) => {
            collect_clause_names(d, out);
            collect_goal_names(g, out);
        }
        Goal::ConstraintImplies(c, g) => {
            collect_constraint_names(c, out);
            collect_goal_names(g, out);
        }
        Goal::Exists(v, g) | Goal::Forall(v, g) => {
            out.insert(v.clone());
            collect_goal_names(g, out);
        }
    }
}

fn collect_clause_names(c: &Clause, out: &mut BTreeSet<String>) {
    match c {
        Clause::Atom(a) => {
            out.insert(a.pred.clone());
            for t in &a.args {
                collect_term_names(t, out);
            }
        }
        Clause::And(a, b) => {
            collect_clause_names(a, out);
            collect_clause_names(b, out);
        }
        Clause::Implies(g, head) => {
            collect_goal_names(g, out);
            out.insert(head.pred.clone());
            for t in &head.args {
                collect_term_names(t, out);
            }
        }
        Clause::Forall(v, d) => {
            out.insert(v.clone());
            collect_clause_names(d, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    pub rule: RuleId,
    pub triple: usize,
    pub triple_id: u64,
    pub choice: Choice,
    pub fresh: Vec<String>,
    pub pre_digest: u64,
    pub post_digest: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Blocked {
    /// Rule vii guard came back false.
    GuardFalse,
    /// Rule vii guard came back unknown under the strict policy.
    GuardUnknown,
    /// Atom whose predicate has no clause with a matching head.
    NoMatchingClause,
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("triple selection {0} out of range")]
    SelectionOutOfRange(usize),
    #[error("rule needs a choice: {0}")]
    MissingChoice(&'static str),
    #[error("choice does not apply to the selected goal")]
    ChoiceMismatch,
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    #[default]
    Strict,
    Lenient,
}

/// Outcome of one rule application.
pub enum Applied {
    Next {
        state: State,
        record: StepRecord,
        /// ids of the triples the consumed triple became
        descendants: Vec<u64>,
        /// the guard verdict was unknown and the lenient policy let it pass
        unverified: bool,
        /// the clause variant used, when the rule was backchaining
        variant: Option<crate::syntax::ElabClause>,
    },
    Blocked(Blocked),
}

/// Applies the transformation rule determined by the selected triple's
/// goal shape. `choice` supplies the disjunct (rule ii) or the clause
/// (rule viii); the guard of rule vii consults the constraint system.
pub fn apply_rule(
    state: &State,
    selection: usize,
    choice: Choice,
    system: &dyn ConstraintSystem,
    policy: Policy,
    fresh: &mut FreshSource,
    next_id: &mut u64,
    step_index: usize,
) -> Result<Applied, EngineError> {
    let Some(triple) = state.triples.get(selection) else {
        return Err(EngineError::SelectionOutOfRange(selection));
    };
    let pre_digest = state.digest();
    let mut new_id = || {
        *next_id += 1;
        *next_id
    };

    let replace =
        |replacement: Vec<Triple>, rule: RuleId, choice: Choice, fresh_names: Vec<String>,
         prefix: QuantifierPrefix, global: Constraint, unverified: bool,
         variant: Option<crate::syntax::ElabClause>| {
            let mut triples = state.triples.clone();
            let descendants: Vec<u64> = replacement.iter().map(|t| t.id).collect();
            triples.splice(selection..=selection, replacement);
            let next = State {
                prefix,
                global,
                triples,
                protected: state.protected.clone(),
            };
            let record = StepRecord {
                index: step_index,
                rule,
                triple: selection,
                triple_id: triple.id,
                choice,
                fresh: fresh_names,
                pre_digest,
                post_digest: next.digest(),
            };
            Applied::Next {
                state: next,
                record,
                descendants,
                unverified,
                variant,
            }
        };

    match &triple.goal {
        Goal::And(g1, g2) => {
            let t1 = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: (**g1).clone(),
            };
            let t2 = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: (**g2).clone(),
            };
            Ok(replace(
                vec![t1, t2],
                RuleId::Conj,
                Choice::None,
                vec![],
                state.prefix.clone(),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::Or(g1, g2) => {
            let Choice::Branch(k) = choice else {
                return Err(EngineError::MissingChoice("disjunction needs a branch"));
            };
            let g = match k {
                1 => (**g1).clone(),
                2 => (**g2).clone(),
                _ => return Err(EngineError::ChoiceMismatch),
            };
            let t = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: g,
            };
            Ok(replace(
                vec![t],
                RuleId::Disj,
                choice,
                vec![],
                state.prefix.clone(),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::ClauseImplies(d, g) => {
            let t = Triple {
                id: new_id(),
                program: triple.program.extended((**d).clone()),
                constraint: triple.constraint.clone(),
                goal: (**g).clone(),
            };
            Ok(replace(
                vec![t],
                RuleId::ImplClause,
                Choice::None,
                vec![],
                state.prefix.clone(),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::ConstraintImplies(c, g) => {
            let t = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: Constraint::and(triple.constraint.clone(), c.clone()),
                goal: (**g).clone(),
            };
            Ok(replace(
                vec![t],
                RuleId::ImplConstraint,
                Choice::None,
                vec![],
                state.prefix.clone(),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::Exists(x, g) => {
            let w = fresh.fresh(x);
            let t = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: g.apply_subst(&Subst::single(x, Term::Var(w.clone()))),
            };
            Ok(replace(
                vec![t],
                RuleId::ExQuant,
                Choice::None,
                vec![w.clone()],
                state.prefix.pushed(Quant::Exists, w),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::Forall(x, g) => {
            let w = fresh.fresh(x);
            let t = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: g.apply_subst(&Subst::single(x, Term::Var(w.clone()))),
            };
            Ok(replace(
                vec![t],
                RuleId::UnivQuant,
                Choice::None,
                vec![w.clone()],
                state.prefix.pushed(Quant::Forall, w),
                state.global.clone(),
                false,
                None,
            ))
        }
        Goal::Constraint(c_prime) => {
            let extended = Constraint::and(
                state.global.clone(),
                Constraint::implies(triple.constraint.clone(), c_prime.clone()),
            );
            let verdict = system.satisfiable(&state.prefix, &extended)?;
            let unverified = match (verdict, policy) {
                (Verdict::True, _) => false,
                (Verdict::Unknown, Policy::Lenient) => true,
                (Verdict::Unknown, Policy::Strict) => {
                    return Ok(Applied::Blocked(Blocked::GuardUnknown))
                }
                (Verdict::False, _) => return Ok(Applied::Blocked(Blocked::GuardFalse)),
            };
            Ok(replace(
                vec![],
                RuleId::Constraint,
                Choice::None,
                vec![],
                state.prefix.clone(),
                extended,
                unverified,
                None,
            ))
        }
        Goal::Atom(atom) => {
            let Choice::ClauseIdx(idx) = choice else {
                return Err(EngineError::MissingChoice("backchaining needs a clause"));
            };
            let candidates = matching_clauses(&triple.program, atom);
            let Some(clause) = candidates.get(idx) else {
                return Ok(Applied::Blocked(Blocked::NoMatchingClause));
            };
            let variant = clause.variant(fresh);
            let fresh_names = variant.vars.clone();
            let premise = backchain_goal(atom, &variant);
            let t = Triple {
                id: new_id(),
                program: triple.program.clone(),
                constraint: triple.constraint.clone(),
                goal: premise,
            };
            Ok(replace(
                vec![t],
                RuleId::Backchain,
                Choice::ClauseIdx(idx),
                fresh_names,
                state.prefix.clone(),
                state.global.clone(),
                false,
                Some(variant),
            ))
        }
    }
}

/// Clauses of the local program's elaboration whose head predicate and
/// arity match the goal atom, in program-text order.
pub fn matching_clauses(program: &Program, atom: &PredAtom) -> Vec<crate::syntax::ElabClause> {
    program
        .elaborate()
        .into_iter()
        .filter(|c| c.head.pred == atom.pred && c.head.args.len() == atom.args.len())
        .collect()
}

/// The backchaining premise `∃x̄((A ≈ A') ∧ G)` for a goal atom `A` and a
/// clause variant with head `A'` and body `G`. Goal arguments sit on the
/// left of each equation. The smart constructors collapse the result into
/// a single constraint goal whenever the body is one.
pub fn backchain_goal(atom: &PredAtom, variant: &crate::syntax::ElabClause) -> Goal {
    let eqs = Constraint::conj(
        atom.args
            .iter()
            .zip(&variant.head.args)
            .map(|(a, b)| Constraint::eq(a.clone(), b.clone()))
            .collect(),
    );
    let mut g = Goal::and(Goal::Constraint(eqs), variant.body.clone());
    for v in variant.vars.iter().rev() {
        g = Goal::exists(v.clone(), g);
    }
    g
}

/// A computed answer: the final prefix and global constraint, the verdict
/// tag, and the trace that produced it.
#[derive(Debug, Clone)]
pub struct Answer {
    pub prefix: QuantifierPrefix,
    pub global: Constraint,
    pub verified: bool,
    pub trace: Vec<StepRecord>,
}

impl Answer {
    pub fn constraint(&self) -> Constraint {
        self.prefix.quantify(self.global.clone()).normalize()
    }
}
