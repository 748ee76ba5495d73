//! Depth-first search over the don't-know choices, pulled one answer at a
//! time.

use super::{
    apply_rule, initial_state, matching_clauses, reserved_names, Answer, Applied, Choice,
    EngineError, Policy, State, StepRecord,
};
use crate::constraints::ConstraintSystem;
use crate::syntax::{FreshSource, Goal, Program};

#[derive(Debug, Clone, Copy)]
pub struct SolveBudget {
    pub max_steps: usize,
    pub max_backtracks: usize,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_steps: 100_000,
            max_backtracks: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Running,
    /// Search space exhausted: the answer stream is complete.
    Complete,
    /// Step or backtrack budget ran out: failure is not finite.
    BudgetExhausted,
}

#[derive(Clone)]
struct Path {
    state: State,
    trace: Vec<StepRecord>,
    fresh: FreshSource,
    next_id: u64,
    unverified: bool,
}

struct ChoicePoint {
    saved: Path,
    alternatives: Vec<Choice>,
}

pub struct Solver<'a> {
    system: &'a dyn ConstraintSystem,
    policy: Policy,
    budget: SolveBudget,
    stack: Vec<ChoicePoint>,
    current: Option<Path>,
    steps_used: usize,
    backtracks_used: usize,
    status: SolveStatus,
    error: Option<EngineError>,
}

impl<'a> Solver<'a> {
    pub fn new(
        program: &Program,
        goal: &Goal,
        system: &'a dyn ConstraintSystem,
        policy: Policy,
        budget: SolveBudget,
    ) -> Solver<'a> {
        let state = initial_state(program, goal);
        let fresh = FreshSource::new(reserved_names(program, goal));
        Solver {
            system,
            policy,
            budget,
            stack: Vec::new(),
            current: Some(Path {
                state,
                trace: Vec::new(),
                fresh,
                next_id: 0,
                unverified: false,
            }),
            steps_used: 0,
            backtracks_used: 0,
            status: SolveStatus::Running,
            error: None,
        }
    }

    pub fn status(&self) -> SolveStatus {
        self.status
    }

    pub fn steps_used(&self) -> usize {
        self.steps_used
    }

    /// A system error surfaced during search (unknown atoms and the like).
    pub fn take_error(&mut self) -> Option<EngineError> {
        self.error.take()
    }

    fn backtrack(&mut self) -> bool {
        while let Some(cp) = self.stack.last_mut() {
            if self.backtracks_used >= self.budget.max_backtracks {
                self.status = SolveStatus::BudgetExhausted;
                return false;
            }
            match cp.alternatives.pop() {
                Some(choice) => {
                    self.backtracks_used += 1;
                    let path = cp.saved.clone();
                    if cp.alternatives.is_empty() {
                        self.stack.pop();
                    }
                    if self.step_with(path, choice) {
                        return true;
                    }
                    // blocked immediately: keep unwinding
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        if self.status == SolveStatus::Running {
            self.status = SolveStatus::Complete;
        }
        false
    }

    /// Applies one rule to the first triple of `path` with the given
    /// choice. On success the updated path becomes current.
    fn step_with(&mut self, mut path: Path, choice: Choice) -> bool {
        let step_index = path.trace.len();
        let mut fresh = path.fresh.clone();
        let mut next_id = path.next_id;
        match apply_rule(
            &path.state,
            0,
            choice,
            self.system,
            self.policy,
            &mut fresh,
            &mut next_id,
            step_index,
        ) {
            Ok(Applied::Next {
                state,
                record,
                unverified,
                ..
            }) => {
                self.steps_used += 1;
                path.state = state;
                path.trace.push(record);
                path.fresh = fresh;
                path.next_id = next_id;
                path.unverified |= unverified;
                self.current = Some(path);
                true
            }
            Ok(Applied::Blocked(_)) => false,
            Err(e) => {
                self.error = Some(e);
                self.status = SolveStatus::Complete;
                false
            }
        }
    }
}

impl<'a> Iterator for Solver<'a> {
    type Item = Answer;

    fn next(&mut self) -> Option<Answer> {
        loop {
            if self.error.is_some() {
                return None;
            }
            let Some(path) = self.current.take() else {
                if self.backtrack() {
                    continue;
                }
                return None;
            };

            if path.state.is_final() {
                let answer = Answer {
                    prefix: path.state.prefix.clone(),
                    global: path.state.global.clone(),
                    verified: !path.unverified,
                    trace: path.trace.clone(),
                };
                // subsequent pulls resume from the last choice point
                return Some(answer);
            }

            if self.steps_used >= self.budget.max_steps {
                self.status = SolveStatus::BudgetExhausted;
                return None;
            }

            let triple = &path.state.triples[0];
            match &triple.goal {
                Goal::Or(..) => {
                    self.stack.push(ChoicePoint {
                        saved: path.clone(),
                        alternatives: vec![Choice::Branch(2)],
                    });
                    if !self.step_with(path, Choice::Branch(1)) {
                        // blocked: fall through to backtracking
                    }
                }
                Goal::Atom(atom) => {
                    let n = matching_clauses(&triple.program, atom).len();
                    if n == 0 {
                        // finite failure for this path
                        continue;
                    }
                    if n > 1 {
                        // alternatives popped from the back: latest first
                        let alternatives: Vec<Choice> =
                            (1..n).rev().map(Choice::ClauseIdx).collect();
                        self.stack.push(ChoicePoint {
                            saved: path.clone(),
                            alternatives,
                        });
                    }
                    if !self.step_with(path, Choice::ClauseIdx(0)) {
                        // blocked: fall through
                    }
                }
                _ => {
                    if !self.step_with(path, Choice::None) {
                        // blocked constraint guard: fall through
                    }
                }
            }
        }
    }
}

/// Convenience entry point mirroring the engine's contract: a lazily
/// produced stream of answers.
pub fn solve<'a>(
    program: &Program,
    goal: &Goal,
    system: &'a dyn ConstraintSystem,
    policy: Policy,
    budget: SolveBudget,
) -> Solver<'a> {
    Solver::new(program, goal, system, policy, budget)
}
