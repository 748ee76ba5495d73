//! Linear rational arithmetic with complete quantifier elimination, plus
//! the sound fallback for nonlinear atoms. All coefficients stay exact
//! rationals end to end.

pub mod eval;
pub mod fallback;
pub mod poly;
pub mod qe;

pub use fallback::Strategy;
pub use poly::{Monomial, Poly, PolyError};
pub use qe::{LinAtom, LinError, Qff, Rel, DEFAULT_ATOM_BUDGET};

use crate::constraints::{
    check_atoms, structural_entails, ConstraintSystem, QuantifierPrefix, SystemError, Verdict,
};
use crate::simplify::structural_simplify;
use crate::syntax::{Constraint, LEQ, LT, NEQ};

/// Eliminates `∃x` from a quantifier-free linear formula.
pub fn qe_exists(x: &str, c: &Constraint) -> Result<Constraint, LinError> {
    let mut budget = qe::Budget::new(DEFAULT_ATOM_BUDGET);
    let q = qe::to_qff(c, &mut budget)?;
    let out = qe::qe_exists_qff(x, &q, &mut budget)?;
    Ok(qe::qff_to_constraint(&out))
}

/// Eliminates `∀x` from a quantifier-free linear formula.
pub fn qe_forall(x: &str, c: &Constraint) -> Result<Constraint, LinError> {
    let mut budget = qe::Budget::new(DEFAULT_ATOM_BUDGET);
    let q = qe::to_qff(c, &mut budget)?;
    let out = qe::qe_forall_qff(x, &q, &mut budget)?;
    Ok(qe::qff_to_constraint(&out))
}

/// Routing decision procedure: a purely linear constraint gets the complete
/// quantifier-elimination verdict; anything with a nonlinear atom goes to
/// the fallback, whose `Unknown` propagates. The formula is closed (free
/// variables existentially) and simplified first, which keeps repeated
/// satisfiability rechecks of a growing store cheap.
pub fn decide(prefix: &QuantifierPrefix, c: &Constraint) -> (Verdict, Strategy) {
    let closed = close_existentially(prefix, c);
    let simplified = structural_simplify(&closed);
    match qe::linear_decide(&QuantifierPrefix::empty(), &simplified, DEFAULT_ATOM_BUDGET) {
        Ok(v) => (v, Strategy::Linear),
        Err(LinError::Budget) => (Verdict::Unknown, Strategy::Linear),
        Err(_) => fallback::decide_closed_truth(&simplified, fallback::MAX_GRID_DEPTH),
    }
}

/// Free variables of `c` not in the prefix close existentially, outermost.
pub fn close_existentially(prefix: &QuantifierPrefix, c: &Constraint) -> Constraint {
    use crate::constraints::Quant;
    let mut full = QuantifierPrefix::empty();
    for v in c.free_vars() {
        if !prefix.contains(&v) {
            full.push(Quant::Exists, v);
        }
    }
    for (q, v) in prefix.entries() {
        full.push(*q, v.clone());
    }
    full.quantify(c.clone())
}

/// The real-arithmetic constraint system.
pub struct LinRealSystem;

impl LinRealSystem {
    pub fn new() -> LinRealSystem {
        LinRealSystem
    }
}

impl Default for LinRealSystem {
    fn default() -> Self {
        LinRealSystem::new()
    }
}

impl ConstraintSystem for LinRealSystem {
    fn name(&self) -> &str {
        "linreal"
    }

    fn interprets_atom(&self, sym: &str, arity: usize) -> bool {
        arity == 2 && (sym == LEQ || sym == LT || sym == NEQ)
    }

    fn entails(
        &self,
        premises: &[Constraint],
        conclusion: &Constraint,
    ) -> Result<Verdict, SystemError> {
        for p in premises {
            check_atoms(self, p)?;
        }
        check_atoms(self, conclusion)?;
        if structural_entails(premises, conclusion) {
            return Ok(Verdict::True);
        }
        let premises: Vec<Constraint> =
            premises.iter().map(structural_simplify).collect();
        let conclusion = &structural_simplify(conclusion);
        match qe::linear_entails(&premises, conclusion, DEFAULT_ATOM_BUDGET) {
            Ok(v) => Ok(v),
            Err(LinError::Budget) => Ok(Verdict::Unknown),
            Err(_) => Ok(fallback::fallback_entails(&premises, conclusion).0),
        }
    }

    fn satisfiable(
        &self,
        prefix: &QuantifierPrefix,
        constraint: &Constraint,
    ) -> Result<Verdict, SystemError> {
        check_atoms(self, constraint)?;
        Ok(decide(prefix, constraint).0)
    }

    fn simplify(&self, _prefix: &QuantifierPrefix, constraint: &Constraint) -> Constraint {
        structural_simplify(constraint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Quant;
    use crate::syntax::Term;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn sq(t: Term) -> Term {
        Term::app("^", vec![t, Term::int(2)])
    }

    fn entails_equivalent(a: &Constraint, b: &Constraint) -> bool {
        let sys = LinRealSystem::new();
        sys.entails(&[a.clone()], b).unwrap() == Verdict::True
            && sys.entails(&[b.clone()], a).unwrap() == Verdict::True
    }

    #[test]
    fn qe_exists_squeeze() {
        // exists x. (x <= y /\ z <= x)  ==  z <= y
        let c = Constraint::and(
            Constraint::leq(v("x"), v("y")),
            Constraint::leq(v("z"), v("x")),
        );
        let out = qe_exists("x", &c).unwrap();
        assert!(!out.free_vars().contains("x"));
        assert!(entails_equivalent(&out, &Constraint::leq(v("z"), v("y"))));
    }

    #[test]
    fn qe_exists_not_free_is_identity() {
        let c = Constraint::leq(v("y"), Term::int(1));
        let out = qe_exists("x", &c).unwrap();
        assert!(entails_equivalent(&out, &c));
    }

    #[test]
    fn qe_exists_equation_substitution() {
        // exists x. (x = 2y /\ x >= 1)  ==  2y >= 1
        let c = Constraint::and(
            Constraint::eq(v("x"), Term::app("*", vec![Term::int(2), v("y")])),
            Constraint::leq(Term::int(1), v("x")),
        );
        let out = qe_exists("x", &c).unwrap();
        let expected = Constraint::leq(
            Term::int(1),
            Term::app("*", vec![Term::int(2), v("y")]),
        );
        assert!(entails_equivalent(&out, &expected));
    }

    #[test]
    fn qe_forall_implication() {
        // forall x. (x >= y => x >= z)  ==  z <= y
        let c = Constraint::implies(
            Constraint::leq(v("y"), v("x")),
            Constraint::leq(v("z"), v("x")),
        );
        let out = qe_forall("x", &c).unwrap();
        assert!(entails_equivalent(&out, &Constraint::leq(v("z"), v("y"))));
    }

    #[test]
    fn qe_forall_truth_and_falsity() {
        assert!(entails_equivalent(
            &qe_forall("x", &Constraint::True).unwrap(),
            &Constraint::True
        ));
        // forall x. x >= 0 is false
        let c = Constraint::leq(Term::int(0), v("x"));
        let out = qe_forall("x", &c).unwrap();
        assert!(entails_equivalent(&out, &Constraint::False));
    }

    #[test]
    fn qe_rejects_nonlinear_atoms() {
        let c = Constraint::leq(sq(v("x")), Term::int(1));
        assert!(matches!(qe_exists("x", &c), Err(LinError::Nonlinear(_))));
    }

    #[test]
    fn decide_examples() {
        // exists N: N > 1 /\ N = 2 — true
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "N".into());
        let c = Constraint::and(
            Constraint::lt(Term::int(1), v("N")),
            Constraint::eq(v("N"), Term::int(2)),
        );
        assert_eq!(decide(&prefix, &c), (Verdict::True, Strategy::Linear));

        // exists x: x < 0 /\ x > 0 — false
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "x".into());
        let c = Constraint::and(
            Constraint::lt(v("x"), Term::int(0)),
            Constraint::lt(Term::int(0), v("x")),
        );
        assert_eq!(decide(&prefix, &c).0, Verdict::False);
    }

    #[test]
    fn disc_side_condition_by_interval() {
        // {x^2 <= 1/2, y^2 <= 1/2} |= exists u, v. (x = u /\ y = v /\ u^2 + v^2 <= 1)
        let sys = LinRealSystem::new();
        let premises = vec![
            Constraint::leq(sq(v("x")), Term::ratio(1, 2)),
            Constraint::leq(sq(v("y")), Term::ratio(1, 2)),
        ];
        let goal = Constraint::exists(
            "u",
            Constraint::exists(
                "w",
                Constraint::conj(vec![
                    Constraint::eq(v("x"), v("u")),
                    Constraint::eq(v("y"), v("w")),
                    Constraint::leq(
                        Term::app("+", vec![sq(v("u")), sq(v("w"))]),
                        Term::int(1),
                    ),
                ]),
            ),
        );
        assert_eq!(sys.entails(&premises, &goal).unwrap(), Verdict::True);
    }

    #[test]
    fn disc_rule_guard_satisfiable() {
        // forall y. (y^2 <= 1/2 => exists u, v. (x=u /\ y=v /\ u^2+v^2 <= 1))
        let sys = LinRealSystem::new();
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Forall, "y".into());
        let s = Constraint::implies(
            Constraint::leq(sq(v("y")), Term::ratio(1, 2)),
            Constraint::exists(
                "u",
                Constraint::exists(
                    "w",
                    Constraint::conj(vec![
                        Constraint::eq(v("x"), v("u")),
                        Constraint::eq(v("y"), v("w")),
                        Constraint::leq(
                            Term::app("+", vec![sq(v("u")), sq(v("w"))]),
                            Term::int(1),
                        ),
                    ]),
                ),
            ),
        );
        assert_eq!(sys.satisfiable(&prefix, &s).unwrap(), Verdict::True);
    }

    #[test]
    fn sqrt_two_witness_by_bracketing() {
        // exists x. x^2 = 2 — true although no rational witness exists
        let sys = LinRealSystem::new();
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Exists, "x".into());
        let c = Constraint::eq(sq(v("x")), Term::int(2));
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::True);
    }

    #[test]
    fn fallback_refutes_by_counterexample() {
        // forall x. x^2 >= x fails at x = 1/2
        let sys = LinRealSystem::new();
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Forall, "x".into());
        let c = Constraint::leq(v("x"), sq(v("x")));
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::False);
    }

    #[test]
    fn fallback_does_not_guess() {
        // forall x. x^2 >= 2x - 2 is true but outside the strategies:
        // the honest answer is unknown, never a guess
        let sys = LinRealSystem::new();
        let mut prefix = QuantifierPrefix::empty();
        prefix.push(Quant::Forall, "x".into());
        let c = Constraint::leq(
            Term::app(
                "-",
                vec![Term::app("*", vec![Term::int(2), v("x")]), Term::int(2)],
            ),
            sq(v("x")),
        );
        assert_eq!(sys.satisfiable(&prefix, &c).unwrap(), Verdict::Unknown);
    }

    #[test]
    fn bottom_is_unsatisfiable() {
        let sys = LinRealSystem::new();
        assert_eq!(
            sys.satisfiable(&QuantifierPrefix::empty(), &Constraint::False)
                .unwrap(),
            Verdict::False
        );
        assert_eq!(
            sys.entails(&[], &Constraint::True).unwrap(),
            Verdict::True
        );
    }

    #[test]
    fn normalization_is_canonical() {
        let p = Poly::from_term(&Term::app(
            "+",
            vec![
                Term::app("*", vec![Term::ratio(2, 3), v("x")]),
                Term::ratio(4, 6),
            ],
        ))
        .unwrap();
        let a1 = LinAtom::new(Rel::Le, p.clone());
        let a2 = LinAtom::new(Rel::Le, a1.poly.clone());
        assert_eq!(a1, a2);
    }
}
