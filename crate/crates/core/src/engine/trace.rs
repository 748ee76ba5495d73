//! Line-oriented trace serialization and deterministic replay.
//!
//! One step per line: `<index> <rule> triple=<k> choice=<c> fresh=<names>`
//! where `<rule>` is the roman tag i..viii, `<c>` is `-`, a disjunct
//! number, or a clause index, and `<names>` is `-` or a comma list.

use super::{apply_rule, Applied, Choice, EngineError, Policy, RuleId, State, StepRecord};
use crate::constraints::ConstraintSystem;
use crate::syntax::{FreshSource, Goal, Program};

pub fn render_trace(steps: &[StepRecord]) -> String {
    let mut out = String::new();
    for s in steps {
        let choice = match s.choice {
            Choice::None => "-".to_string(),
            Choice::Branch(k) => k.to_string(),
            Choice::ClauseIdx(i) => i.to_string(),
        };
        let fresh = if s.fresh.is_empty() {
            "-".to_string()
        } else {
            s.fresh.join(",")
        };
        out.push_str(&format!(
            "{} {} triple={} choice={} fresh={}\n",
            s.index,
            s.rule.roman(),
            s.triple,
            choice,
            fresh
        ));
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("line {0}: malformed trace line")]
    Malformed(usize),
    #[error("step {0}: replay diverged (digest mismatch)")]
    DigestMismatch(usize),
    #[error("step {0}: rule does not match the goal shape")]
    RuleMismatch(usize),
    #[error("step {0}: step was blocked on replay")]
    BlockedOnReplay(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Parses the textual format back into skeleton records (digests zeroed).
pub fn parse_trace(text: &str) -> Result<Vec<StepRecord>, ReplayError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let bad = || ReplayError::Malformed(lineno + 1);
        let index: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let rule = RuleId::from_roman(parts.next().ok_or_else(bad)?).ok_or_else(bad)?;
        let triple: usize = parts
            .next()
            .and_then(|s| s.strip_prefix("triple="))
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let choice_str = parts
            .next()
            .and_then(|s| s.strip_prefix("choice="))
            .ok_or_else(bad)?;
        let choice = match (rule, choice_str) {
            (_, "-") => Choice::None,
            (RuleId::Disj, k) => Choice::Branch(k.parse().map_err(|_| bad())?),
            (RuleId::Backchain, i) => Choice::ClauseIdx(i.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        let fresh_str = parts
            .next()
            .and_then(|s| s.strip_prefix("fresh="))
            .ok_or_else(bad)?;
        let fresh = if fresh_str == "-" {
            Vec::new()
        } else {
            fresh_str.split(',').map(|s| s.to_string()).collect()
        };
        out.push(StepRecord {
            index,
            rule,
            triple,
            triple_id: 0,
            choice,
            fresh,
            pre_digest: 0,
            post_digest: 0,
        });
    }
    Ok(out)
}

/// Replays a trace from the initial state for `program` and `goal`,
/// checking rule shapes and (when the records carry them) state digests.
/// Returns every intermediate state, initial state first, final state
/// last.
pub fn replay(
    program: &Program,
    goal: &Goal,
    steps: &[StepRecord],
    system: &dyn ConstraintSystem,
    policy: Policy,
) -> Result<Vec<State>, ReplayError> {
    let mut states = vec![super::initial_state(program, goal)];
    let mut fresh = FreshSource::new(super::reserved_names(program, goal));
    let mut next_id = 0u64;
    for (i, step) in steps.iter().enumerate() {
        let state = states.last().unwrap();
        if step.pre_digest != 0 && state.digest() != step.pre_digest {
            return Err(ReplayError::DigestMismatch(i));
        }
        match apply_rule(
            state,
            step.triple,
            step.choice,
            system,
            policy,
            &mut fresh,
            &mut next_id,
            i,
        )? {
            Applied::Next { state, record, .. } => {
                if record.rule != step.rule {
                    return Err(ReplayError::RuleMismatch(i));
                }
                if step.post_digest != 0 && record.post_digest != step.post_digest {
                    return Err(ReplayError::DigestMismatch(i));
                }
                if !step.fresh.is_empty() && record.fresh != step.fresh {
                    return Err(ReplayError::DigestMismatch(i));
                }
                states.push(state);
            }
            Applied::Blocked(_) => return Err(ReplayError::BlockedOnReplay(i)),
        }
    }
    Ok(states)
}
