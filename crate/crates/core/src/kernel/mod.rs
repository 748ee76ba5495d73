//! Sequent proofs as data. The calculus has one axiom discharging
//! constraint goals by entailment, one backchaining rule for atoms, and
//! the six right-introduction rules; a checker re-derives every rule
//! relation and side condition, so certificates are independently
//! verifiable.

mod certify;
mod check;
mod sexpr;

pub use certify::{certify_resolution, CertifyError};
pub use check::{check_proof, check_uniformity, Rejection};
pub use sexpr::{parse_proof, render_proof, SexprError};

use crate::constraints::Verdict;
use crate::syntax::{Constraint, ElabClause, Goal, Program};
use std::collections::BTreeSet;
use std::fmt;

/// A set of constraint formulas: conjunctions flattened, `⊤` dropped,
/// members deduplicated up to alpha-equivalence.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    items: Vec<Constraint>,
    keys: BTreeSet<Constraint>,
}

impl ConstraintSet {
    pub fn new() -> ConstraintSet {
        ConstraintSet::default()
    }

    pub fn from_iter(items: impl IntoIterator<Item = Constraint>) -> ConstraintSet {
        let mut s = ConstraintSet::new();
        for c in items {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, c: Constraint) {
        for piece in c.normalize().flatten() {
            let key = piece.canon();
            if self.keys.insert(key) {
                self.items.push(piece);
            }
        }
    }

    pub fn union(&self, c: &Constraint) -> ConstraintSet {
        let mut out = self.clone();
        out.insert(c.clone());
        out
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.keys.contains(&c.normalize().canon())
    }

    pub fn items(&self) -> &[Constraint] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn set_eq(&self, other: &ConstraintSet) -> bool {
        self.keys == other.keys
    }

    /// `other` extends `self` by exactly the members of `extra`.
    pub fn extends_by(&self, base: &ConstraintSet, extra: &Constraint) -> bool {
        self.set_eq(&base.union(extra))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.items.iter().flat_map(|c| c.free_vars()).collect()
    }
}

impl PartialEq for ConstraintSet {
    fn eq(&self, other: &Self) -> bool {
        self.set_eq(other)
    }
}

impl Eq for ConstraintSet {}

/// `Δ; Γ |- G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub program: Program,
    pub constraints: ConstraintSet,
    pub goal: Goal,
}

impl Sequent {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = self.program.free_vars();
        out.extend(self.constraints.free_vars());
        out.extend(self.goal.free_vars());
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} clauses]; ", self.program.len())?;
        for (i, c) in self.constraints.items().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, " |- {}", self.goal)
    }
}

/// Recorded entailment side condition `premises ⊢ conclusion`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCondition {
    pub premises: Vec<Constraint>,
    pub conclusion: Constraint,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleTag {
    /// Constraint goals discharged by entailment from Γ.
    ConstraintAxiom,
    /// Backchaining an atomic goal through a clause variant.
    Backchain { variant: ElabClause },
    /// Disjunct 1 or 2.
    OrRight(u8),
    AndRight,
    ImplyClauseRight,
    ImplyConstraintRight,
    ExistsRight { var: String, witness: Constraint },
    ForallRight { var: String },
}

impl RuleTag {
    pub fn arity(&self) -> usize {
        match self {
            RuleTag::ConstraintAxiom => 0,
            RuleTag::AndRight => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleTag::ConstraintAxiom => "constraint",
            RuleTag::Backchain { .. } => "clause",
            RuleTag::OrRight(_) => "or",
            RuleTag::AndRight => "and",
            RuleTag::ImplyClauseRight => "imply-clause",
            RuleTag::ImplyConstraintRight => "imply-constraint",
            RuleTag::ExistsRight { .. } => "exists",
            RuleTag::ForallRight { .. } => "forall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: RuleTag,
    pub side: Option<SideCondition>,
    pub premises: Vec<ProofTree>,
}

/// Number of sequents in the tree. Side conditions are not nodes.
pub fn proof_size(t: &ProofTree) -> usize {
    1 + t.premises.iter().map(proof_size).sum::<usize>()
}
