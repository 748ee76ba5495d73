//! Syntax core: terms, constraint formulas, goals, clauses and programs,
//! together with capture-avoiding substitution, elaboration and variants.

pub mod formula;
pub mod goal;
pub mod subst;
pub mod term;

pub use formula::{Constraint, LEQ, LT, NEQ};
pub use goal::{Clause, ElabClause, Goal, PredAtom, Program};
pub use subst::{primed_avoiding, FreshSource, Subst};
pub use term::{display_rational, is_arith_symbol, Signature, SignatureError, Term};

pub(crate) fn formula_canon_term(t: &Term, renaming: &[(String, String)]) -> Term {
    formula::rename_term_with(t, renaming)
}

pub(crate) fn canon_constraint_in(
    c: &Constraint,
    counter: &mut usize,
    renaming: &Vec<(String, String)>,
) -> Constraint {
    c.canon_rec(counter, renaming)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn atom(p: &str, args: Vec<Term>) -> PredAtom {
        PredAtom::new(p, args)
    }

    #[test]
    fn subst_replaces_free_occurrences() {
        // p(x,y)[a/x] = p(a,y)
        let g = Goal::Atom(atom("p", vec![v("x"), v("y")]));
        let s = Subst::single("x", Term::constant("a"));
        let expected = Goal::Atom(atom("p", vec![Term::constant("a"), v("y")]));
        assert_eq!(g.apply_subst(&s), expected);
    }

    #[test]
    fn subst_renames_to_avoid_capture() {
        // (forall x. p(x,y))[x/y] is alpha-equal to forall x'. p(x', x)
        let g = Goal::Forall("x".into(), Box::new(Goal::Atom(atom("p", vec![v("x"), v("y")]))));
        let s = Subst::single("y", v("x"));
        let got = g.apply_subst(&s);
        let expected = Goal::Forall(
            "z".into(),
            Box::new(Goal::Atom(atom("p", vec![v("z"), v("x")]))),
        );
        assert!(got.alpha_eq(&expected));
    }

    #[test]
    fn subst_on_nonlinear_constraint() {
        // (x^2 + y^2 <= 1)[u/x] = u^2 + y^2 <= 1
        let sq = |t: Term| Term::app("^", vec![t, Term::int(2)]);
        let c = Constraint::leq(
            Term::app("+", vec![sq(v("x")), sq(v("y"))]),
            Term::int(1),
        );
        let s = Subst::single("x", v("u"));
        let expected = Constraint::leq(
            Term::app("+", vec![sq(v("u")), sq(v("y"))]),
            Term::int(1),
        );
        assert_eq!(c.apply_subst(&s), expected);
    }

    #[test]
    fn free_vars_of_quantified_implication() {
        // fv(forall y. (y^2 <= 1/2 => disc(x,y))) = {x}
        let sq = |t: Term| Term::app("^", vec![t, Term::int(2)]);
        let g = Goal::forall(
            "y",
            Goal::constraint_implies(
                Constraint::leq(sq(v("y")), Term::ratio(1, 2)),
                Goal::Atom(atom("disc", vec![v("x"), v("y")])),
            ),
        );
        let fv = g.free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);

        assert!(Constraint::True.free_vars().is_empty());
        let c = Constraint::exists("x", Constraint::eq(v("x"), v("y")));
        assert_eq!(c.free_vars().into_iter().collect::<Vec<_>>(), vec!["y"]);
    }

    #[test]
    fn elaborate_fact() {
        let p = Program::new(vec![Clause::fact(atom("p", vec![Term::constant("a")]))]);
        let e = p.elaborate();
        assert_eq!(e.len(), 1);
        assert!(e[0].vars.is_empty());
        assert!(e[0].body.alpha_eq(&Goal::truth()));
        assert_eq!(e[0].head, atom("p", vec![Term::constant("a")]));
    }

    #[test]
    fn elaborate_unfolds_conjunction_under_forall() {
        // forall x. (p(x) /\ (q(x) => r(x)))
        let d = Clause::forall(
            "x",
            Clause::And(
                Box::new(Clause::fact(atom("p", vec![v("x")]))),
                Box::new(Clause::implies(
                    Goal::Atom(atom("q", vec![v("x")])),
                    atom("r", vec![v("x")]),
                )),
            ),
        );
        let e = Program::new(vec![d]).elaborate();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].vars, vec!["x".to_string()]);
        assert!(e[0].body.alpha_eq(&Goal::truth()));
        assert_eq!(e[0].head.pred, "p");
        assert_eq!(e[1].vars, vec!["x".to_string()]);
        assert!(e[1].body.alpha_eq(&Goal::Atom(atom("q", vec![v("x")]))));
        assert_eq!(e[1].head.pred, "r");
    }

    #[test]
    fn elaborate_is_idempotent_on_normal_clauses() {
        let sq = |t: Term| Term::app("^", vec![t, Term::int(2)]);
        let body = Constraint::leq(
            Term::app("+", vec![sq(v("x")), sq(v("y"))]),
            Term::int(1),
        );
        let d = Clause::forall_closed(
            vec!["x".into(), "y".into()],
            Clause::implies(Goal::Constraint(body), atom("disc", vec![v("x"), v("y")])),
        );
        let p = Program::new(vec![d.clone()]);
        let e = p.elaborate();
        assert_eq!(e.len(), 1);
        assert!(e[0].to_clause().alpha_eq(&d));
    }

    #[test]
    fn variant_freshens_bound_variables() {
        let mut fresh = FreshSource::new(["x".to_string(), "q".to_string(), "p".to_string()]);
        let e = ElabClause {
            vars: vec!["x".into()],
            body: Goal::Atom(atom("q", vec![v("x")])),
            head: atom("p", vec![v("x")]),
        };
        let v1 = e.variant(&mut fresh);
        assert_ne!(v1.vars[0], "x");
        assert!(v1.to_clause().alpha_eq(&e.to_clause()));

        let v2 = e.variant(&mut fresh);
        assert_ne!(v1.vars[0], v2.vars[0]);
        assert_eq!(e.free_vars(), v1.free_vars());

        // no bound variables: unchanged
        let f = ElabClause {
            vars: vec![],
            body: Goal::truth(),
            head: atom("p", vec![Term::constant("a")]),
        };
        let fv = f.variant(&mut fresh);
        assert_eq!(f, fv);
    }

    #[test]
    fn identity_subst_is_alpha_identity() {
        let g = Goal::exists(
            "x",
            Goal::and(
                Goal::Atom(atom("p", vec![v("x"), v("y")])),
                Goal::Constraint(Constraint::eq(v("x"), v("y"))),
            ),
        );
        assert!(g.apply_subst(&Subst::new()).alpha_eq(&g));
    }

    #[test]
    fn subst_composition_agrees_with_sequencing() {
        let t = Term::app("f", vec![v("x"), v("y"), v("z")]);
        let s1 = Subst::single("x", Term::app("g", vec![v("y")]));
        let mut s2 = Subst::new();
        s2.bind("y".into(), Term::constant("a"));
        s2.bind("z".into(), v("y"));
        let seq = s2.apply_term(&s1.apply_term(&t));
        let composed = s1.compose(&s2).apply_term(&t);
        assert_eq!(seq, composed);
    }
}
