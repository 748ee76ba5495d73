//! The proof checker: every node must match its rule schema exactly, and
//! every side condition is re-decided against the constraint system.

use super::{ProofTree, RuleTag};
use crate::constraints::{structural_entails, ConstraintSystem, Verdict};
use crate::engine::backchain_goal;
use crate::syntax::{Constraint, Goal, Subst, Term};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum Rejection {
    #[error("node {0}: premise count does not match rule arity")]
    Arity(String),
    #[error("node {0}: goal shape does not match rule")]
    GoalShape(String),
    #[error("node {0}: premise sequent does not match rule schema")]
    PremiseShape(String),
    #[error("node {0}: side condition undischarged")]
    Undischarged(String),
    #[error("node {0}: recorded side condition disagrees with the re-decision")]
    VerdictMismatch(String),
    #[error("node {0}: freshness condition violated")]
    Freshness(String),
    #[error("node {0}: clause is not a variant of the program's elaboration")]
    NotAVariant(String),
    #[error("node {0}: not a uniform proof at this node")]
    NotUniform(String),
}

/// Accepts iff every node matches its rule schema and every entailment
/// side condition re-decides to a definitive yes.
pub fn check_proof(tree: &ProofTree, system: &dyn ConstraintSystem) -> Result<(), Rejection> {
    check_node(tree, system, "root")
}

fn entailment_holds(
    system: &dyn ConstraintSystem,
    premises: &[Constraint],
    conclusion: &Constraint,
) -> bool {
    structural_entails(premises, conclusion)
        || matches!(system.entails(premises, conclusion), Ok(Verdict::True))
}

fn check_side(
    node: &ProofTree,
    system: &dyn ConstraintSystem,
    expected_conclusion: &Constraint,
    at: &str,
) -> Result<(), Rejection> {
    let Some(side) = &node.side else {
        return Err(Rejection::Undischarged(at.into()));
    };
    if side.verdict != Verdict::True {
        return Err(Rejection::Undischarged(at.into()));
    }
    // the recorded condition must be the node's own, up to alpha
    if !side.conclusion.alpha_eq(expected_conclusion) {
        return Err(Rejection::VerdictMismatch(at.into()));
    }
    let gamma = node.conclusion.constraints.items();
    let same_premises = side.premises.len() == gamma.len()
        && side
            .premises
            .iter()
            .zip(gamma)
            .all(|(a, b)| a.alpha_eq(b));
    if !same_premises {
        return Err(Rejection::VerdictMismatch(at.into()));
    }
    if !entailment_holds(system, gamma, expected_conclusion) {
        return Err(Rejection::Undischarged(at.into()));
    }
    Ok(())
}

fn check_node(
    node: &ProofTree,
    system: &dyn ConstraintSystem,
    at: &str,
) -> Result<(), Rejection> {
    if node.premises.len() != node.rule.arity() {
        return Err(Rejection::Arity(at.into()));
    }
    let seq = &node.conclusion;
    match &node.rule {
        RuleTag::ConstraintAxiom => {
            let Goal::Constraint(c) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            check_side(node, system, c, at)?;
        }
        RuleTag::Backchain { variant } => {
            let Goal::Atom(atom) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            if variant.head.pred != atom.pred || variant.head.args.len() != atom.args.len() {
                return Err(Rejection::GoalShape(at.into()));
            }
            // the clause must be a variant (bound renaming) of a clause in
            // the elaborated program
            let vc = variant.to_clause();
            if !seq.program.elaborate().iter().any(|e| e.to_clause().alpha_eq(&vc)) {
                return Err(Rejection::NotAVariant(at.into()));
            }
            // the variant's bound names must be fresh for the conclusion
            let fv = seq.free_vars();
            if variant.vars.iter().any(|v| fv.contains(v)) {
                return Err(Rejection::Freshness(at.into()));
            }
            let premise = &node.premises[0];
            if premise.conclusion.program != seq.program
                || !premise.conclusion.constraints.set_eq(&seq.constraints)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
            let expected = backchain_goal(atom, variant);
            if !premise.conclusion.goal.alpha_eq(&expected) {
                return Err(Rejection::PremiseShape(at.into()));
            }
        }
        RuleTag::OrRight(k) => {
            let Goal::Or(g1, g2) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            let expected = match k {
                1 => g1,
                2 => g2,
                _ => return Err(Rejection::GoalShape(at.into())),
            };
            let premise = &node.premises[0];
            if premise.conclusion.program != seq.program
                || !premise.conclusion.constraints.set_eq(&seq.constraints)
                || !premise.conclusion.goal.alpha_eq(expected)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
        }
        RuleTag::AndRight => {
            let Goal::And(g1, g2) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            for (premise, expected) in node.premises.iter().zip([g1, g2]) {
                if premise.conclusion.program != seq.program
                    || !premise.conclusion.constraints.set_eq(&seq.constraints)
                    || !premise.conclusion.goal.alpha_eq(expected)
                {
                    return Err(Rejection::PremiseShape(at.into()));
                }
            }
        }
        RuleTag::ImplyClauseRight => {
            let Goal::ClauseImplies(d, g) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            let premise = &node.premises[0];
            if premise.conclusion.program != seq.program.extended((**d).clone())
                || !premise.conclusion.constraints.set_eq(&seq.constraints)
                || !premise.conclusion.goal.alpha_eq(g)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
        }
        RuleTag::ImplyConstraintRight => {
            let Goal::ConstraintImplies(c, g) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            let premise = &node.premises[0];
            if premise.conclusion.program != seq.program
                || !premise.conclusion.constraints.extends_by(&seq.constraints, c)
                || !premise.conclusion.goal.alpha_eq(g)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
        }
        RuleTag::ExistsRight { var, witness } => {
            let Goal::Exists(x, g) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            if seq.free_vars().contains(var) {
                return Err(Rejection::Freshness(at.into()));
            }
            let premise = &node.premises[0];
            let instantiated = g.apply_subst(&Subst::single(x, Term::Var(var.clone())));
            if premise.conclusion.program != seq.program
                || !premise
                    .conclusion
                    .constraints
                    .extends_by(&seq.constraints, witness)
                || !premise.conclusion.goal.alpha_eq(&instantiated)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
            let side_goal = Constraint::exists(var.clone(), witness.clone());
            check_side(node, system, &side_goal, at)?;
        }
        RuleTag::ForallRight { var } => {
            let Goal::Forall(x, g) = &seq.goal else {
                return Err(Rejection::GoalShape(at.into()));
            };
            if seq.free_vars().contains(var) {
                return Err(Rejection::Freshness(at.into()));
            }
            let premise = &node.premises[0];
            let instantiated = g.apply_subst(&Subst::single(x, Term::Var(var.clone())));
            if premise.conclusion.program != seq.program
                || !premise.conclusion.constraints.set_eq(&seq.constraints)
                || !premise.conclusion.goal.alpha_eq(&instantiated)
            {
                return Err(Rejection::PremiseShape(at.into()));
            }
        }
    }
    for (i, premise) in node.premises.iter().enumerate() {
        let path = format!("{at}.{i}");
        check_node(premise, system, &path)?;
    }
    Ok(())
}

/// Uniform-proof shape: internal nodes with a compound goal use the right
/// rule of the goal's outermost connective; atomic goals backchain;
/// constraint goals appear only at leaves.
pub fn check_uniformity(tree: &ProofTree) -> Result<(), Rejection> {
    check_uniform_node(tree, "root")
}

fn check_uniform_node(node: &ProofTree, at: &str) -> Result<(), Rejection> {
    let ok = match (&node.conclusion.goal, &node.rule) {
        (Goal::Constraint(_), RuleTag::ConstraintAxiom) => node.premises.is_empty(),
        (Goal::Atom(_), RuleTag::Backchain { .. }) => true,
        (Goal::And(..), RuleTag::AndRight) => true,
        (Goal::Or(..), RuleTag::OrRight(_)) => true,
        (Goal::ClauseImplies(..), RuleTag::ImplyClauseRight) => true,
        (Goal::ConstraintImplies(..), RuleTag::ImplyConstraintRight) => true,
        (Goal::Exists(..), RuleTag::ExistsRight { .. }) => true,
        (Goal::Forall(..), RuleTag::ForallRight { .. }) => true,
        _ => false,
    };
    if !ok {
        return Err(Rejection::NotUniform(at.into()));
    }
    for (i, premise) in node.premises.iter().enumerate() {
        check_uniform_node(premise, &format!("{at}.{i}"))?;
    }
    Ok(())
}
