//! Exact evaluation of arithmetic terms and ground atoms, plus constant
//! folding used by the simplifier.

use crate::syntax::{Constraint, Term, LEQ, LT, NEQ};
use num::{BigRational, Signed, Zero};
use std::collections::BTreeMap;

pub fn fold_term(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Num(_) => t.clone(),
        Term::App(f, args) => {
            let folded: Vec<Term> = args.iter().map(fold_term).collect();
            if let Some(q) = apply_arith(f, &folded) {
                return Term::Num(q);
            }
            Term::App(f.clone(), folded)
        }
    }
}

fn apply_arith(f: &str, args: &[Term]) -> Option<BigRational> {
    let num = |t: &Term| -> Option<BigRational> {
        match t {
            Term::Num(q) => Some(q.clone()),
            _ => None,
        }
    };
    match (f, args.len()) {
        ("+", 2) => Some(num(&args[0])? + num(&args[1])?),
        ("-", 2) => Some(num(&args[0])? - num(&args[1])?),
        ("*", 2) => Some(num(&args[0])? * num(&args[1])?),
        ("/", 2) => {
            let d = num(&args[1])?;
            if d.is_zero() {
                None
            } else {
                Some(num(&args[0])? / d)
            }
        }
        ("neg", 1) => Some(-num(&args[0])?),
        ("^", 2) => {
            let base = num(&args[0])?;
            let e = num(&args[1])?;
            if !e.is_integer() || e.is_negative() {
                return None;
            }
            let n: u32 = e.numer().try_into().ok()?;
            let mut out = BigRational::from_integer(1.into());
            for _ in 0..n {
                out *= &base;
            }
            Some(out)
        }
        _ => None,
    }
}

/// Full evaluation under an environment; `None` when a variable is missing,
/// a free constructor appears, or a division by zero occurs.
pub fn eval_term(t: &Term, env: &BTreeMap<String, BigRational>) -> Option<BigRational> {
    match t {
        Term::Var(v) => env.get(v).cloned(),
        Term::Num(q) => Some(q.clone()),
        Term::App(f, args) => {
            let vals: Vec<Term> = args
                .iter()
                .map(|a| eval_term(a, env).map(Term::Num))
                .collect::<Option<Vec<_>>>()?;
            apply_arith(f, &vals)
        }
    }
}

/// Ground comparison atoms; `None` when arguments are not numerals.
pub fn eval_ground_atom(sym: &str, args: &[Term]) -> Option<bool> {
    if args.len() != 2 {
        return None;
    }
    let (a, b) = match (&args[0], &args[1]) {
        (Term::Num(a), Term::Num(b)) => (a, b),
        _ => return None,
    };
    match sym {
        LEQ => Some(a <= b),
        LT => Some(a < b),
        NEQ => Some(a != b),
        _ => None,
    }
}

/// Truth of a constraint at a rational point. Quantifiers are sampled on
/// the supplied witness values (existentials pinned by an equation are
/// substituted exactly first, via the shared simplifier). Used by the
/// region plotting demo; the acceptance oracles have their own evaluator.
pub fn sample_eval(
    c: &Constraint,
    env: &BTreeMap<String, BigRational>,
    quantifier_samples: &[BigRational],
) -> Option<bool> {
    let simplified = crate::simplify::structural_simplify(c);
    eval_rec(&simplified, env, quantifier_samples)
}

fn eval_rec(
    c: &Constraint,
    env: &BTreeMap<String, BigRational>,
    samples: &[BigRational],
) -> Option<bool> {
    match c {
        Constraint::True => Some(true),
        Constraint::False => Some(false),
        Constraint::Eq(a, b) => Some(eval_term(a, env)? == eval_term(b, env)?),
        Constraint::Atom(sym, args) => {
            let vals: Vec<Term> = args
                .iter()
                .map(|t| eval_term(t, env).map(Term::Num))
                .collect::<Option<Vec<_>>>()?;
            eval_ground_atom(sym, &vals)
        }
        Constraint::And(a, b) => Some(eval_rec(a, env, samples)? && eval_rec(b, env, samples)?),
        Constraint::Implies(a, b) => {
            Some(!eval_rec(a, env, samples)? || eval_rec(b, env, samples)?)
        }
        Constraint::Exists(v, body) => {
            let mut any = false;
            for q in samples {
                let mut env2 = env.clone();
                env2.insert(v.clone(), q.clone());
                if eval_rec(body, &env2, samples)? {
                    any = true;
                    break;
                }
            }
            Some(any)
        }
        Constraint::Forall(v, body) => {
            for q in samples {
                let mut env2 = env.clone();
                env2.insert(v.clone(), q.clone());
                if !eval_rec(body, &env2, samples)? {
                    return Some(false);
                }
            }
            Some(true)
        }
    }
}
