//! The memoizing reversible fib program: local assumptions as a memo
//! table, linear step growth, and both query directions.

use hhclp_core::constraints::Verdict;
use hhclp_core::engine::{self, Policy};
use hhclp_core::kernel;
use hhclp_core::linreal::LinRealSystem;
use hhclp_core::syntax::{Clause, Constraint, Goal, PredAtom, Program, Term};
use hhclp_core::ConstraintSystem;

fn v(n: &str) -> Term {
    Term::var(n)
}

fn fib_program() -> Program {
    let fib = Clause::forall_closed(
        vec!["N".into(), "X".into()],
        Clause::implies(
            Goal::clause_implies(
                Clause::fact(PredAtom::new("memfib", vec![Term::int(0), Term::int(1)])),
                Goal::clause_implies(
                    Clause::fact(PredAtom::new("memfib", vec![Term::int(1), Term::int(1)])),
                    Goal::Atom(PredAtom::new(
                        "getfib",
                        vec![v("N"), v("X"), Term::int(1)],
                    )),
                ),
            ),
            PredAtom::new("fib", vec![v("N"), v("X")]),
        ),
    );
    let lookup = Clause::forall_closed(
        vec!["N".into(), "X".into(), "M".into()],
        Clause::implies(
            Goal::and(
                Goal::Constraint(Constraint::and(
                    Constraint::leq(Term::int(0), v("N")),
                    Constraint::leq(v("N"), v("M")),
                )),
                Goal::Atom(PredAtom::new("memfib", vec![v("N"), v("X")])),
            ),
            PredAtom::new("getfib", vec![v("N"), v("X"), v("M")]),
        ),
    );
    let extend = Clause::forall_closed(
        vec!["N".into(), "X".into(), "M".into(), "F1".into(), "F2".into()],
        Clause::implies(
            Goal::and(
                Goal::Constraint(Constraint::lt(v("M"), v("N"))),
                Goal::and(
                    Goal::Atom(PredAtom::new(
                        "memfib",
                        vec![Term::app("-", vec![v("M"), Term::int(1)]), v("F1")],
                    )),
                    Goal::and(
                        Goal::Atom(PredAtom::new("memfib", vec![v("M"), v("F2")])),
                        Goal::clause_implies(
                            Clause::fact(PredAtom::new(
                                "memfib",
                                vec![
                                    Term::app("+", vec![v("M"), Term::int(1)]),
                                    Term::app("+", vec![v("F1"), v("F2")]),
                                ],
                            )),
                            Goal::Atom(PredAtom::new(
                                "getfib",
                                vec![v("N"), v("X"), Term::app("+", vec![v("M"), Term::int(1)])],
                            )),
                        ),
                    ),
                ),
            ),
            PredAtom::new("getfib", vec![v("N"), v("X"), v("M")]),
        ),
    );
    Program::new(vec![fib, lookup, extend])
}

fn solve_fib(goal: Goal) -> (hhclp_core::engine::Answer, LinRealSystem) {
    let system = LinRealSystem::new();
    let program = fib_program();
    let mut solver = engine::solve(
        &program,
        &goal,
        &system,
        Policy::Strict,
        Default::default(),
    );
    let answer = solver.next().expect("an answer");
    (answer, system)
}

#[test]
fn fib_forward() {
    let goal = Goal::Atom(PredAtom::new("fib", vec![Term::int(10), v("X")]));
    let (answer, system) = solve_fib(goal);
    assert!(answer.verified);
    let entailed = system
        .entails(
            &[answer.constraint()],
            &Constraint::eq(v("X"), Term::int(89)),
        )
        .unwrap();
    assert_eq!(entailed, Verdict::True, "answer entails X = 89");
}

#[test]
fn fib_backward() {
    let goal = Goal::Atom(PredAtom::new("fib", vec![v("N"), Term::int(89)]));
    let (answer, system) = solve_fib(goal);
    let entailed = system
        .entails(
            &[answer.constraint()],
            &Constraint::eq(v("N"), Term::int(10)),
        )
        .unwrap();
    assert_eq!(entailed, Verdict::True, "answer entails N = 10");
}

#[test]
fn fib_steps_grow_linearly() {
    let mut lens = Vec::new();
    for n in [5i64, 10, 15, 20] {
        let goal = Goal::Atom(PredAtom::new("fib", vec![Term::int(n), v("X")]));
        let (answer, _) = solve_fib(goal);
        lens.push(answer.trace.len() as f64);
    }
    // perfect linearity gives r^2 = 1; demand > 0.99
    let xs = [5.0f64, 10.0, 15.0, 20.0];
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = lens.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&lens).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = lens.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&lens)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r2 = 1.0 - ss_res / ss_tot.max(1e-12);
    assert!(r2 > 0.99, "r^2 = {r2}, lengths {lens:?}");
}

#[test]
fn fib_small_certificate() {
    let goal = Goal::Atom(PredAtom::new("fib", vec![Term::int(2), v("X")]));
    let (answer, system) = solve_fib(goal);
    let program = fib_program();
    let goal = Goal::Atom(PredAtom::new("fib", vec![Term::int(2), v("X")]));
    let proof = kernel::certify_resolution(&program, &goal, &answer, &system)
        .expect("certificate");
    kernel::check_proof(&proof, &system).expect("checker accepts");
    kernel::check_uniformity(&proof).expect("uniform");
}
