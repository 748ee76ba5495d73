//! Equivalence-preserving constraint simplification shared by the systems:
//! truth cleanup, vacuous-quantifier removal, elimination of existential
//! variables pinned by an equation, and exact folding of ground arithmetic.

use crate::linreal::eval::fold_term;
use crate::syntax::{Constraint, Subst, Term};

pub fn structural_simplify(c: &Constraint) -> Constraint {
    let mut current = c.clone();
    for _ in 0..8 {
        let next = pass(&current).normalize();
        if next == current {
            return current;
        }
        current = next;
    }
    current
}

fn pass(c: &Constraint) -> Constraint {
    match c {
        Constraint::True | Constraint::False => c.clone(),
        Constraint::Eq(a, b) => {
            let (a, b) = (fold_term(a), fold_term(b));
            match (&a, &b) {
                (Term::Num(p), Term::Num(q)) => {
                    if p == q {
                        Constraint::True
                    } else {
                        Constraint::False
                    }
                }
                _ if a == b => Constraint::True,
                _ => Constraint::Eq(a, b),
            }
        }
        Constraint::Atom(sym, args) => {
            let args: Vec<Term> = args.iter().map(fold_term).collect();
            if let Some(v) = crate::linreal::eval::eval_ground_atom(sym, &args) {
                return if v { Constraint::True } else { Constraint::False };
            }
            Constraint::Atom(sym.clone(), args)
        }
        Constraint::And(a, b) => {
            // merge sibling implications sharing an antecedent:
            // (C => A) /\ (C => B)  =>  C => (A /\ B)
            let mut parts = conjuncts(&Constraint::and(pass(a), pass(b)));
            let mut merged: Vec<Constraint> = Vec::new();
            'outer: for p in parts.drain(..) {
                if let Constraint::Implies(ante, cons) = &p {
                    for q in merged.iter_mut() {
                        if let Constraint::Implies(a2, c2) = q {
                            if ante.alpha_eq(a2) {
                                *c2 = Box::new(Constraint::and((**c2).clone(), (**cons).clone()));
                                continue 'outer;
                            }
                        }
                    }
                }
                merged.push(p);
            }
            Constraint::conj(merged)
        }
        Constraint::Implies(a, b) => {
            let (a, b) = (pass(a), pass(b));
            // (C => (C => phi)) collapses to C => phi
            if let Constraint::Implies(a2, b2) = &b {
                if a.alpha_eq(a2) {
                    return Constraint::implies(a, (**b2).clone());
                }
            }
            Constraint::implies(a, b)
        }
        Constraint::Exists(v, body) => {
            let body = pass(body);
            // exists v. (v = t /\ phi)  =>  phi[t/v]  when v not in t
            if let Some(rest) = eliminate_pinned(v, &body) {
                return rest;
            }
            Constraint::exists(v.clone(), body)
        }
        Constraint::Forall(v, body) => Constraint::forall(v.clone(), pass(body)),
    }
}

/// Looks for a conjunct `v ≈ t` (either orientation) with `v` not in `t`
/// and substitutes it away. Only inside purely conjunctive bodies.
fn eliminate_pinned(v: &str, body: &Constraint) -> Option<Constraint> {
    let parts = conjuncts(body);
    let mut pin: Option<(usize, Term)> = None;
    for (i, p) in parts.iter().enumerate() {
        if let Constraint::Eq(a, b) = p {
            match (a, b) {
                (Term::Var(x), t) if x == v && !t.contains_var(v) => {
                    pin = Some((i, t.clone()));
                    break;
                }
                (t, Term::Var(x)) if x == v && !t.contains_var(v) => {
                    pin = Some((i, t.clone()));
                    break;
                }
                _ => {}
            }
        }
    }
    let (idx, t) = pin?;
    let s = Subst::single(v, t);
    let rest: Vec<Constraint> = parts
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, p)| p.apply_subst(&s))
        .collect();
    Some(Constraint::conj(rest))
}

/// Conjuncts of a purely conjunctive formula, or a singleton list.
fn conjuncts(c: &Constraint) -> Vec<Constraint> {
    match c {
        Constraint::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        Constraint::True => Vec::new(),
        other => vec![other.clone()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn drops_true_conjuncts() {
        let c = Constraint::and(Constraint::True, Constraint::eq(v("x"), Term::int(1)));
        assert_eq!(
            structural_simplify(&c),
            Constraint::eq(v("x"), Term::int(1))
        );
    }

    #[test]
    fn eliminates_pinned_existentials() {
        // exists u. exists v. (x = u /\ y = v /\ u^2 + v^2 <= 1)
        //   =>  x^2 + y^2 <= 1
        let sq = |t: Term| Term::app("^", vec![t, Term::int(2)]);
        let body = Constraint::conj(vec![
            Constraint::eq(v("x"), v("u")),
            Constraint::eq(v("y"), v("w")),
            Constraint::leq(Term::app("+", vec![sq(v("u")), sq(v("w"))]), Term::int(1)),
        ]);
        let c = Constraint::exists("u", Constraint::exists("w", body));
        let expected = Constraint::leq(
            Term::app("+", vec![sq(v("x")), sq(v("y"))]),
            Term::int(1),
        );
        assert!(structural_simplify(&c).alpha_eq(&expected));
    }

    #[test]
    fn folds_ground_arithmetic() {
        // 3 <= 1+1 is false
        let c = Constraint::leq(
            Term::int(3),
            Term::app("+", vec![Term::int(1), Term::int(1)]),
        );
        assert_eq!(structural_simplify(&c), Constraint::False);
    }
}
