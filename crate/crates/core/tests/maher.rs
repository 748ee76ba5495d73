//! Two incomparable computed answers out of a two-clause tree program:
//! no single answer is entailed by their common weakening.

use hhclp_core::constraints::Verdict;
use hhclp_core::engine::{self, Policy};
use hhclp_core::herbrand::HerbrandSystem;
use hhclp_core::kernel;
use hhclp_core::syntax::{Clause, Constraint, Goal, PredAtom, Program, Signature, Term};
use hhclp_core::ConstraintSystem;

fn v(n: &str) -> Term {
    Term::var(n)
}

fn maher_program() -> Program {
    // p(a, b).
    // forall x. (x ~= a => p(x, b)).
    Program::new(vec![
        Clause::fact(PredAtom::new(
            "p",
            vec![Term::constant("a"), Term::constant("b")],
        )),
        Clause::forall(
            "z",
            Clause::implies(
                Goal::Constraint(Constraint::neq(v("z"), Term::constant("a"))),
                PredAtom::new("p", vec![v("z"), Term::constant("b")]),
            ),
        ),
    ])
}

fn maher_signature() -> Signature {
    let mut s = Signature::default();
    s.declare_constructor("a", 0).unwrap();
    s.declare_constructor("b", 0).unwrap();
    s.declare_predicate("p", 2).unwrap();
    s.declare_domain_atom("~=", 2).unwrap();
    s
}

#[test]
fn two_answers_and_no_common_one() {
    let program = maher_program();
    let goal = Goal::Atom(PredAtom::new("p", vec![v("x"), v("y")]));
    let system = HerbrandSystem::new(maher_signature());
    let answers: Vec<_> = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    )
    .collect();
    assert_eq!(answers.len(), 2, "exactly two answers");

    let first_expected = Constraint::and(
        Constraint::eq(v("y"), Term::constant("b")),
        Constraint::eq(v("x"), Term::constant("a")),
    );
    let second_expected = Constraint::and(
        Constraint::eq(v("y"), Term::constant("b")),
        Constraint::neq(v("x"), Term::constant("a")),
    );
    for (answer, expected) in answers.iter().zip([first_expected, second_expected]) {
        let got = answer.constraint();
        assert_eq!(
            system.entails(&[got.clone()], &expected).unwrap(),
            Verdict::True,
            "answer {got} entails {expected}"
        );
        assert_eq!(
            system.entails(&[expected.clone()], &got).unwrap(),
            Verdict::True,
            "{expected} entails answer {got}"
        );
    }

    // the paper's point: y = b alone entails neither x = a nor x ~= a
    let weak = Constraint::eq(v("y"), Term::constant("b"));
    assert_eq!(
        system
            .entails(&[weak.clone()], &Constraint::eq(v("x"), Term::constant("a")))
            .unwrap(),
        Verdict::False
    );
    assert_eq!(
        system
            .entails(&[weak], &Constraint::neq(v("x"), Term::constant("a")))
            .unwrap(),
        Verdict::False
    );

    // both resolutions certify
    for answer in &answers {
        let proof = kernel::certify_resolution(&program, &goal, answer, &system)
            .expect("certificate");
        kernel::check_proof(&proof, &system).expect("accepted");
        kernel::check_uniformity(&proof).expect("uniform");
    }
}
