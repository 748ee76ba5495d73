//! The mortgage goal: universal quantification over the payment space,
//! an existential interest rate, and nonlinear guards that only the
//! lenient policy lets through. The wrong base-case branch must still be
//! pruned by a definitive refutation.

use hhclp_core::engine::{self, Choice, Policy, RuleId};
use hhclp_core::kernel;
use hhclp_core::linreal::LinRealSystem;
use hhclp_core::syntax::{Clause, Constraint, Goal, PredAtom, Program, Term};

fn v(n: &str) -> Term {
    Term::var(n)
}

fn ratio(num: i64, den: i64) -> Term {
    Term::ratio(num, den)
}

pub fn mortgage_program() -> Program {
    let per_month = |p: Term, i: Term| {
        // p * i / 1200
        Term::app("/", vec![Term::app("*", vec![p, i]), Term::int(1200)])
    };
    // mortgage(P,T,I,M,B) <= 0 <= T /\ T <= 3 /\ TotalInt = T*(P*I/1200)
    //                        /\ B = P + TotalInt - T*M
    let base = Clause::forall_closed(
        vec!["P".into(), "T".into(), "I".into(), "M".into(), "B".into(), "TotalInt".into()],
        Clause::implies(
            Goal::Constraint(Constraint::conj(vec![
                Constraint::leq(Term::int(0), v("T")),
                Constraint::leq(v("T"), Term::int(3)),
                Constraint::eq(
                    v("TotalInt"),
                    Term::app("*", vec![v("T"), per_month(v("P"), v("I"))]),
                ),
                Constraint::eq(
                    v("B"),
                    Term::app(
                        "-",
                        vec![
                            Term::app("+", vec![v("P"), v("TotalInt")]),
                            Term::app("*", vec![v("T"), v("M")]),
                        ],
                    ),
                ),
            ])),
            PredAtom::new("mortgage", vec![v("P"), v("T"), v("I"), v("M"), v("B")]),
        ),
    );
    // mortgage(P,T,I,M,B) <= T > 3 /\ QuartInt = 3*(P*I/1200)
    //                        /\ mortgage(P+QuartInt-3*M, T-3, I, M, B)
    let recurse = Clause::forall_closed(
        vec!["P".into(), "T".into(), "I".into(), "M".into(), "B".into(), "QuartInt".into()],
        Clause::implies(
            Goal::and(
                Goal::Constraint(Constraint::and(
                    Constraint::lt(Term::int(3), v("T")),
                    Constraint::eq(
                        v("QuartInt"),
                        Term::app("*", vec![Term::int(3), per_month(v("P"), v("I"))]),
                    ),
                )),
                Goal::Atom(PredAtom::new(
                    "mortgage",
                    vec![
                        Term::app(
                            "-",
                            vec![
                                Term::app("+", vec![v("P"), v("QuartInt")]),
                                Term::app("*", vec![Term::int(3), v("M")]),
                            ],
                        ),
                        Term::app("-", vec![v("T"), Term::int(3)]),
                        v("I"),
                        v("M"),
                        v("B"),
                    ],
                )),
            ),
            PredAtom::new("mortgage", vec![v("P"), v("T"), v("I"), v("M"), v("B")]),
        ),
    );
    Program::new(vec![base, recurse])
}

pub fn mortgage_goal() -> Goal {
    // forall M, P. (0.9637 <= P/(6*M) <= 0.97 =>
    //   exists I. (0 <= Imin /\ Imin <= I /\ I <= Imax /\ mortgage(P,6,I,M,0)))
    let quotient = Term::app("/", vec![v("P"), Term::app("*", vec![Term::int(6), v("M")])]);
    let antecedent = Constraint::and(
        Constraint::leq(ratio(9637, 10000), quotient.clone()),
        Constraint::leq(quotient, ratio(97, 100)),
    );
    Goal::forall(
        "M",
        Goal::forall(
            "P",
            Goal::constraint_implies(
                antecedent,
                Goal::exists(
                    "I",
                    Goal::and(
                        Goal::Constraint(Constraint::conj(vec![
                            Constraint::leq(Term::int(0), v("Imin")),
                            Constraint::leq(v("Imin"), v("I")),
                            Constraint::leq(v("I"), v("Imax")),
                        ])),
                        Goal::Atom(PredAtom::new(
                            "mortgage",
                            vec![v("P"), Term::int(6), v("I"), v("M"), Term::int(0)],
                        )),
                    ),
                ),
            ),
        ),
    )
}

#[test]
fn lenient_policy_reaches_final_state() {
    let program = mortgage_program();
    let goal = mortgage_goal();
    let system = LinRealSystem::new();
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Lenient,
        Default::default(),
    );
    let answer = solver.next().expect("a final state under lenient policy");
    assert!(!answer.verified, "nonlinear guards leave the answer unverified");

    // the base clause is refuted at six months and taken at three: the
    // successful path backchains clause 1 (recursive) then clause 0
    let choices: Vec<Choice> = answer
        .trace
        .iter()
        .filter(|s| s.rule == RuleId::Backchain)
        .map(|s| s.choice)
        .collect();
    assert_eq!(choices, vec![Choice::ClauseIdx(1), Choice::ClauseIdx(0)]);

    // free variables of the answer are exactly the interest bounds
    let fv = answer.constraint().free_vars();
    assert_eq!(
        fv.into_iter().collect::<Vec<_>>(),
        vec!["Imax".to_string(), "Imin".to_string()]
    );

    // certification refuses lenient traces: the guards are undischarged
    assert!(kernel::certify_resolution(&program, &goal, &answer, &system).is_err());
}
