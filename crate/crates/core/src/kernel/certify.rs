//! Builds a checkable proof from a successful resolution trace.
//!
//! The construction runs over the replayed states, top down. At state
//! index `i` write `R(i)` for the final global constraint under the
//! quantifiers the trace added after step `i`. The root proves the goal
//! from `R(0)`, the full answer constraint. Each step contributes the node
//! its rule dictates; an existential step's witness is `R(k+1)`
//! existentially closed over the prefix existentials that were not
//! introduced on this node's own lineage, which keeps both the side
//! condition and every deeper leaf structurally derivable.

use super::{ConstraintSet, ProofTree, RuleTag, Sequent, SideCondition};
use crate::constraints::{
    structural_entails, ConstraintSystem, Quant, QuantifierPrefix, Verdict,
};
use crate::engine::{
    Answer, Applied, Choice, EngineError, Policy, RuleId, State, StepRecord,
};
use crate::syntax::{Constraint, ElabClause, FreshSource, Goal, Program};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("trace does not replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("side condition could not be discharged at step {0}")]
    Undischarged(usize),
    #[error("certificate construction lost a triple (internal)")]
    LostTriple,
}

struct StepInfo {
    record: StepRecord,
    descendants: Vec<u64>,
    variant: Option<ElabClause>,
    /// the consumed triple, taken from the pre-state
    program: Program,
    goal: Goal,
}

/// Certifies a resolution: replays the trace under the strict policy (a
/// lenient trace with undischarged guards is refused by the replay) and
/// assembles the proof of `Δ; ΠₙSₙ |- G`.
pub fn certify_resolution(
    program: &Program,
    goal: &Goal,
    answer: &Answer,
    system: &dyn ConstraintSystem,
) -> Result<ProofTree, CertifyError> {
    // detailed replay, keeping consumed-triple data per step
    let mut states = vec![crate::engine::initial_state(program, goal)];
    let mut fresh = FreshSource::new(crate::engine::reserved_names(program, goal));
    let mut next_id = 0u64;
    let mut steps: Vec<StepInfo> = Vec::new();
    for (i, step) in answer.trace.iter().enumerate() {
        let state = states.last().unwrap().clone();
        let consumed = state
            .triples
            .get(step.triple)
            .ok_or(CertifyError::LostTriple)?
            .clone();
        match crate::engine::apply_rule(
            &state,
            step.triple,
            step.choice,
            system,
            Policy::Strict,
            &mut fresh,
            &mut next_id,
            i,
        )? {
            Applied::Next {
                state: next,
                record,
                descendants,
                variant,
                ..
            } => {
                steps.push(StepInfo {
                    record,
                    descendants,
                    variant,
                    program: consumed.program,
                    goal: consumed.goal,
                });
                states.push(next);
            }
            Applied::Blocked(b) => {
                return Err(CertifyError::Replay(format!(
                    "step {i} blocked under the strict policy: {b:?}"
                )))
            }
        }
    }
    let last = states.last().unwrap();
    if !last.is_final() {
        return Err(CertifyError::Replay("trace does not end in a final state".into()));
    }

    let builder = Builder {
        states,
        consumed_at: steps
            .iter()
            .enumerate()
            .map(|(k, s)| (s.record.triple_id, k))
            .collect(),
        steps,
        system,
    };

    let root_gamma = ConstraintSet::from_iter([builder.r_constraint(0)]);
    builder.descend(0, root_gamma, &BTreeSet::new())
}

struct Builder<'a> {
    states: Vec<State>,
    steps: Vec<StepInfo>,
    consumed_at: BTreeMap<u64, usize>,
    system: &'a dyn ConstraintSystem,
}

impl<'a> Builder<'a> {
    /// `(Πₙ − Πᵢ) Sₙ`, normalized.
    fn r_constraint(&self, i: usize) -> Constraint {
        let final_state = self.states.last().unwrap();
        let suffix = final_state.prefix.suffix(self.states[i].prefix.len());
        suffix.quantify(final_state.global.clone()).normalize()
    }

    fn prefix_at(&self, i: usize) -> &QuantifierPrefix {
        &self.states[i].prefix
    }

    /// Existential closure of `R(k+1)` over prefix existentials foreign to
    /// this lineage.
    fn witness(&self, k: usize, path_ex: &BTreeSet<String>, own: &str) -> Constraint {
        let base = self.r_constraint(k + 1);
        let free = base.free_vars();
        let mut out = base;
        // close innermost-last: iterate prefix outermost-first, wrap in
        // reverse so the outermost prefix variable ends outermost
        let foreign: Vec<String> = self
            .prefix_at(k + 1)
            .entries()
            .iter()
            .filter(|(q, v)| {
                *q == Quant::Exists && v != own && !path_ex.contains(v) && free.contains(v)
            })
            .map(|(_, v)| v.clone())
            .collect();
        for v in foreign.into_iter().rev() {
            out = Constraint::exists(v, out);
        }
        out
    }

    fn descend(
        &self,
        triple_id: u64,
        gamma: ConstraintSet,
        path_ex: &BTreeSet<String>,
    ) -> Result<ProofTree, CertifyError> {
        let &k = self
            .consumed_at
            .get(&triple_id)
            .ok_or(CertifyError::LostTriple)?;
        let info = &self.steps[k];
        let conclusion = Sequent {
            program: info.program.clone(),
            constraints: gamma.clone(),
            goal: info.goal.clone(),
        };

        let side_for = |conclusion_c: &Constraint| -> Result<SideCondition, CertifyError> {
            let premises: Vec<Constraint> = gamma.items().to_vec();
            let ok = structural_entails(&premises, conclusion_c)
                || matches!(
                    self.system.entails(&premises, conclusion_c),
                    Ok(Verdict::True)
                );
            if !ok {
                return Err(CertifyError::Undischarged(k));
            }
            Ok(SideCondition {
                premises,
                conclusion: conclusion_c.clone(),
                verdict: Verdict::True,
            })
        };

        match info.record.rule {
            RuleId::Conj => {
                let left = self.descend(info.descendants[0], gamma.clone(), path_ex)?;
                let right = self.descend(info.descendants[1], gamma.clone(), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::AndRight,
                    side: None,
                    premises: vec![left, right],
                })
            }
            RuleId::Disj => {
                let Choice::Branch(b) = info.record.choice else {
                    return Err(CertifyError::LostTriple);
                };
                let child = self.descend(info.descendants[0], gamma.clone(), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::OrRight(b),
                    side: None,
                    premises: vec![child],
                })
            }
            RuleId::ImplClause => {
                let child = self.descend(info.descendants[0], gamma.clone(), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::ImplyClauseRight,
                    side: None,
                    premises: vec![child],
                })
            }
            RuleId::ImplConstraint => {
                let Goal::ConstraintImplies(c, _) = &info.goal else {
                    return Err(CertifyError::LostTriple);
                };
                let child = self.descend(info.descendants[0], gamma.union(c), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::ImplyConstraintRight,
                    side: None,
                    premises: vec![child],
                })
            }
            RuleId::ExQuant => {
                let w = info.record.fresh[0].clone();
                let witness = self.witness(k, path_ex, &w);
                let side = side_for(&Constraint::exists(w.clone(), witness.clone()))?;
                let mut deeper = path_ex.clone();
                deeper.insert(w.clone());
                let child =
                    self.descend(info.descendants[0], gamma.union(&witness), &deeper)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::ExistsRight { var: w, witness },
                    side: Some(side),
                    premises: vec![child],
                })
            }
            RuleId::UnivQuant => {
                let w = info.record.fresh[0].clone();
                let child = self.descend(info.descendants[0], gamma.clone(), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::ForallRight { var: w },
                    side: None,
                    premises: vec![child],
                })
            }
            RuleId::Constraint => {
                let Goal::Constraint(c) = &info.goal else {
                    return Err(CertifyError::LostTriple);
                };
                let side = side_for(c)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::ConstraintAxiom,
                    side: Some(side),
                    premises: vec![],
                })
            }
            RuleId::Backchain => {
                let variant = info.variant.clone().ok_or(CertifyError::LostTriple)?;
                let child = self.descend(info.descendants[0], gamma.clone(), path_ex)?;
                Ok(ProofTree {
                    conclusion,
                    rule: RuleTag::Backchain { variant },
                    side: None,
                    premises: vec![child],
                })
            }
        }
    }
}
