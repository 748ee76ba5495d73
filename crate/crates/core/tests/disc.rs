//! End-to-end run of the disc scenario: one universal goal against a
//! one-clause program over real arithmetic, checked down to the
//! certificate.

use hhclp_core::constraints::Verdict;
use hhclp_core::engine::{self, Policy, RuleId, SolveStatus};
use hhclp_core::kernel;
use hhclp_core::linreal::LinRealSystem;
use hhclp_core::syntax::{Clause, Constraint, Goal, PredAtom, Program, Term};
use hhclp_core::ConstraintSystem;

fn v(n: &str) -> Term {
    Term::var(n)
}

fn sq(t: Term) -> Term {
    Term::app("^", vec![t, Term::int(2)])
}

fn disc_program() -> Program {
    // disc(u, w) <= u^2 + w^2 <= 1, universally closed
    let body = Constraint::leq(Term::app("+", vec![sq(v("u")), sq(v("w"))]), Term::int(1));
    Program::new(vec![Clause::forall_closed(
        vec!["u".into(), "w".into()],
        Clause::implies(
            Goal::Constraint(body),
            PredAtom::new("disc", vec![v("u"), v("w")]),
        ),
    )])
}

fn disc_goal() -> Goal {
    // forall y. (y^2 <= 1/2 => disc(x, y))
    Goal::forall(
        "y",
        Goal::constraint_implies(
            Constraint::leq(sq(v("y")), Term::ratio(1, 2)),
            Goal::Atom(PredAtom::new("disc", vec![v("x"), v("y")])),
        ),
    )
}

#[test]
fn disc_resolution_and_certificate() {
    let program = disc_program();
    let goal = disc_goal();
    let system = LinRealSystem::new();
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    );

    let answer = solver.next().expect("one answer");
    assert!(answer.verified);

    // the narrated rule sequence: universal, constraint-implication,
    // backchain, constraint merge
    let rules: Vec<RuleId> = answer.trace.iter().map(|s| s.rule).collect();
    assert_eq!(
        rules,
        vec![
            RuleId::UnivQuant,
            RuleId::ImplConstraint,
            RuleId::Backchain,
            RuleId::Constraint
        ]
    );

    // no second answer: the single clause was the only choice
    assert!(solver.next().is_none());
    assert_eq!(solver.status(), SolveStatus::Complete);

    // the answer constraint mentions exactly the protected variable x
    let constraint = answer.constraint();
    assert_eq!(
        constraint.free_vars().into_iter().collect::<Vec<_>>(),
        vec!["x".to_string()]
    );

    // trace replay reproduces the final state bit for bit
    let states = engine::replay(&program, &goal, &answer.trace, &system, Policy::Strict)
        .expect("replay");
    let last = states.last().unwrap();
    assert!(last.is_final());
    assert_eq!(last.answer_constraint(), constraint);
    for (i, s) in states.iter().enumerate() {
        assert!(s.well_formed(), "state {i} ill-formed");
        // satisfiability is preserved along the strict trace
        assert_eq!(
            system.satisfiable(&s.prefix, &s.global).unwrap(),
            Verdict::True,
            "state {i} not satisfiable"
        );
    }

    // certificate: accepted by the checker, uniform, four sequents
    let proof =
        kernel::certify_resolution(&program, &goal, &answer, &system).expect("certificate");
    kernel::check_proof(&proof, &system).expect("checker accepts");
    kernel::check_uniformity(&proof).expect("uniform");
    assert_eq!(kernel::proof_size(&proof), 4);

    // serialization round-trips
    let text = kernel::render_proof(&proof);
    let back = kernel::parse_proof(&text).expect("parse back");
    assert_eq!(back, proof);
    kernel::check_proof(&back, &system).expect("checker accepts parsed proof");

    // and the answer is equivalent to x^2 <= 1/2 by entailment both ways
    let simple = Constraint::leq(sq(v("x")), Term::ratio(1, 2));
    assert_eq!(
        system.entails(&[simple.clone()], &constraint).unwrap(),
        Verdict::True,
        "x^2 <= 1/2 entails the answer"
    );
}
