//! Hypothetical queries over the exam-records program: temporary facts,
//! scoped assumptions, and a mixed tree/numeric answer.

use hhclp_core::clpr::ClprSystem;
use hhclp_core::constraints::Verdict;
use hhclp_core::engine::{self, Policy, SolveStatus};
use hhclp_core::kernel;
use hhclp_core::syntax::{Clause, Constraint, Goal, PredAtom, Program, Signature, Term};
use hhclp_core::ConstraintSystem;

fn v(n: &str) -> Term {
    Term::var(n)
}

fn c(n: &str) -> Term {
    Term::constant(n)
}

fn exam_signature() -> Signature {
    let mut s = Signature::default();
    for k in ["bob", "fran", "pep", "[]", "ex1", "ex2"] {
        s.declare_constructor(k, if k == "ex1" || k == "ex2" { 1 } else { 0 })
            .unwrap();
    }
    s.declare_constructor("[|]", 2).unwrap();
    s.declare_predicate("exercise1", 2).unwrap();
    s.declare_predicate("exercise2", 2).unwrap();
    s.declare_predicate("pass", 1).unwrap();
    s.declare_predicate("need-to-pass", 2).unwrap();
    s
}

fn exam_program() -> Program {
    let fact = |p: &str, who: &str, mark: Term| {
        Clause::fact(PredAtom::new(p, vec![c(who), mark]))
    };
    // pass(A) <= exercise1(A,N1) /\ exercise2(A,N2) /\ (N1+N2)/2 > 5
    let pass = Clause::forall_closed(
        vec!["A".into(), "N1".into(), "N2".into()],
        Clause::implies(
            Goal::and(
                Goal::Atom(PredAtom::new("exercise1", vec![v("A"), v("N1")])),
                Goal::and(
                    Goal::Atom(PredAtom::new("exercise2", vec![v("A"), v("N2")])),
                    Goal::Constraint(Constraint::lt(
                        Term::int(5),
                        Term::app(
                            "/",
                            vec![Term::app("+", vec![v("N1"), v("N2")]), Term::int(2)],
                        ),
                    )),
                ),
            ),
            PredAtom::new("pass", vec![v("A")]),
        ),
    );
    // need-to-pass(A, [])        <= pass(A)
    // need-to-pass(A, [ex2(X)|L]) <= (exercise2(A,X) => need-to-pass(A,L))
    // need-to-pass(A, [ex1(X)|L]) <= (exercise1(A,X) => need-to-pass(A,L))
    let ntp_done = Clause::forall(
        "A",
        Clause::implies(
            Goal::Atom(PredAtom::new("pass", vec![v("A")])),
            PredAtom::new("need-to-pass", vec![v("A"), Term::nil()]),
        ),
    );
    let ntp_assume = |ex: &str, tag: &str| {
        Clause::forall_closed(
            vec!["A".into(), "X".into(), "L".into()],
            Clause::implies(
                Goal::clause_implies(
                    Clause::fact(PredAtom::new(ex, vec![v("A"), v("X")])),
                    Goal::Atom(PredAtom::new("need-to-pass", vec![v("A"), v("L")])),
                ),
                PredAtom::new(
                    "need-to-pass",
                    vec![v("A"), Term::cons(Term::app(tag, vec![v("X")]), v("L"))],
                ),
            ),
        )
    };
    Program::new(vec![
        fact("exercise1", "bob", Term::int(4)),
        fact("exercise1", "fran", Term::int(3)),
        fact("exercise2", "fran", Term::int(6)),
        fact("exercise1", "pep", Term::int(5)),
        fact("exercise2", "pep", Term::int(6)),
        pass,
        ntp_done,
        ntp_assume("exercise2", "ex2"),
        ntp_assume("exercise1", "ex1"),
    ])
}

#[test]
fn pass_bob_fails_finitely() {
    let system = ClprSystem::new(exam_signature());
    let program = exam_program();
    let goal = Goal::Atom(PredAtom::new("pass", vec![c("bob")]));
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    );
    assert!(solver.next().is_none());
    assert_eq!(solver.status(), SolveStatus::Complete, "finite failure");
}

#[test]
fn hypothetical_fact_makes_bob_pass() {
    let system = ClprSystem::new(exam_signature());
    let program = exam_program();
    // exercise2(bob, 6.5) => pass(bob)
    let goal = Goal::clause_implies(
        Clause::fact(PredAtom::new(
            "exercise2",
            vec![c("bob"), Term::ratio(13, 2)],
        )),
        Goal::Atom(PredAtom::new("pass", vec![c("bob")])),
    );
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    );
    let answer = solver.next().expect("succeeds");
    assert!(answer.verified);

    // the assumption does not leak: pass(bob) still fails afterwards
    let again = Goal::Atom(PredAtom::new("pass", vec![c("bob")]));
    assert!(engine::solve(
        &program,
        &again,
        &system,
        Policy::Strict,
        Default::default()
    )
    .next()
    .is_none());
}

#[test]
fn need_to_pass_answer_shape() {
    let system = ClprSystem::new(exam_signature());
    let program = exam_program();
    let goal = Goal::Atom(PredAtom::new("need-to-pass", vec![c("bob"), v("L")]));
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    );
    let answer = solver.next().expect("an answer");
    let got = answer.constraint();

    // equivalent to exists N (L = [ex2(N)] /\ N > 6)
    let expected = Constraint::exists(
        "N",
        Constraint::and(
            Constraint::eq(v("L"), Term::list(vec![Term::app("ex2", vec![v("N")])])),
            Constraint::lt(Term::int(6), v("N")),
        ),
    );
    assert_eq!(
        system.entails(&[got.clone()], &expected).unwrap(),
        Verdict::True,
        "{got} entails {expected}"
    );
    assert_eq!(
        system.entails(&[expected.clone()], &got).unwrap(),
        Verdict::True,
        "{expected} entails {got}"
    );

    let proof =
        kernel::certify_resolution(&program, &goal, &answer, &system).expect("certificate");
    kernel::check_proof(&proof, &system).expect("accepted");
    kernel::check_uniformity(&proof).expect("uniform");
}
