//! Sound semi-decision for constraints with nonlinear atoms. Three
//! strategies, tried in order: exact ground evaluation after pinned
//! substitution, monomial relaxation (the interval strategy: each higher
//! monomial becomes a fresh variable, even powers keep a nonnegativity
//! guard, and the complete linear decider runs on the abstraction), and
//! rational witness or counterexample search on a candidate grid, with
//! sign-change bracketing for existential polynomial equations. Whatever
//! remains is `Unknown`, never a guess.

use super::eval::eval_term;
use super::poly::Poly;
use super::qe::{linear_decide, LinError, DEFAULT_ATOM_BUDGET};
use crate::constraints::{Quant, QuantifierPrefix, Verdict};
use crate::simplify::structural_simplify;
use crate::syntax::{Constraint, Subst, Term, LEQ, LT, NEQ};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Which strategy produced a definitive nonlinear verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Decided by the complete linear pipeline (no nonlinear atom left).
    Linear,
    /// Exact evaluation of a variable-free formula.
    Ground,
    /// Monomial relaxation / interval reasoning.
    Interval,
    /// Rational witness or counterexample, possibly via sign-change
    /// bracketing.
    Witness,
}

pub const MAX_GRID_DEPTH: usize = 3;

/// Decides `Π S` (free variables closed existentially) as well as the
/// strategies allow.
pub fn fallback_decide(prefix: &QuantifierPrefix, c: &Constraint) -> (Verdict, Strategy) {
    let mut full = QuantifierPrefix::empty();
    for v in c.free_vars() {
        if !prefix.contains(&v) {
            full.push(Quant::Exists, v);
        }
    }
    for (q, v) in prefix.entries() {
        full.push(*q, v.clone());
    }
    let closed = full.quantify(c.clone());
    decide_closed_truth(&closed, MAX_GRID_DEPTH)
}

/// Validity reading: all free variables universal.
pub fn fallback_entails(premises: &[Constraint], conclusion: &Constraint) -> (Verdict, Strategy) {
    let implication = Constraint::implies(
        Constraint::conj(premises.to_vec()),
        conclusion.clone(),
    );
    let closed = crate::constraints::forall_closure(&implication);
    decide_closed_truth(&closed, MAX_GRID_DEPTH)
}

/// Truth value of a closed constraint.
pub fn decide_closed_truth(c: &Constraint, depth: usize) -> (Verdict, Strategy) {
    let f = structural_simplify(c);
    match &f {
        Constraint::True => return (Verdict::True, Strategy::Ground),
        Constraint::False => return (Verdict::False, Strategy::Ground),
        _ => {}
    }

    match linear_decide(&QuantifierPrefix::empty(), &f, DEFAULT_ATOM_BUDGET) {
        Ok(v) => return (v, Strategy::Linear),
        Err(LinError::Nonlinear(_)) | Err(LinError::Poly(_)) => {}
        Err(LinError::Budget) => return (Verdict::Unknown, Strategy::Linear),
    }

    if let Some(relaxed) = relax(&f, Quant::Forall) {
        if let Ok(Verdict::True) =
            linear_decide(&QuantifierPrefix::empty(), &relaxed, DEFAULT_ATOM_BUDGET)
        {
            return (Verdict::True, Strategy::Interval);
        }
    }
    if let Some(relaxed) = relax(&f, Quant::Exists) {
        if let Ok(Verdict::False) =
            linear_decide(&QuantifierPrefix::empty(), &relaxed, DEFAULT_ATOM_BUDGET)
        {
            return (Verdict::False, Strategy::Interval);
        }
    }

    if depth == 0 {
        return (Verdict::Unknown, Strategy::Witness);
    }

    // A conjunct mentioning only universal variables refutes the whole
    // formula as soon as some assignment falsifies it, whatever the
    // existential witnesses do.
    if refute_universal_conjunct(&f, depth) {
        return (Verdict::False, Strategy::Witness);
    }

    match &f {
        Constraint::And(a, b) => {
            let (va, sa) = decide_closed_truth(a, depth);
            if va == Verdict::False {
                return (Verdict::False, sa);
            }
            let (vb, sb) = decide_closed_truth(b, depth);
            if vb == Verdict::False {
                return (Verdict::False, sb);
            }
            (va.and(vb), sa_join(sa, sb))
        }
        Constraint::Implies(a, b) => {
            let (va, sa) = decide_closed_truth(a, depth);
            match va {
                Verdict::False => (Verdict::True, sa),
                Verdict::True => decide_closed_truth(b, depth),
                Verdict::Unknown => {
                    let (vb, sb) = decide_closed_truth(b, depth);
                    if vb == Verdict::True {
                        (Verdict::True, sb)
                    } else {
                        (Verdict::Unknown, sb)
                    }
                }
            }
        }
        Constraint::Exists(v, body) => {
            if let Some(verdict) = bracketed_root_witness(v, body) {
                return (verdict, Strategy::Witness);
            }
            for q in candidate_values(v, body) {
                let inst = body.apply_subst(&Subst::single(v, Term::Num(q)));
                let (vi, _) = decide_closed_truth(&inst, depth - 1);
                if vi == Verdict::True {
                    return (Verdict::True, Strategy::Witness);
                }
            }
            (Verdict::Unknown, Strategy::Witness)
        }
        Constraint::Forall(v, body) => {
            for q in candidate_values(v, body) {
                let inst = body.apply_subst(&Subst::single(v, Term::Num(q)));
                let (vi, _) = decide_closed_truth(&inst, depth - 1);
                if vi == Verdict::False {
                    return (Verdict::False, Strategy::Witness);
                }
            }
            (Verdict::Unknown, Strategy::Witness)
        }
        _ => (Verdict::Unknown, Strategy::Witness),
    }
}

fn sa_join(a: Strategy, b: Strategy) -> Strategy {
    if a == b {
        a
    } else {
        Strategy::Witness
    }
}

fn refute_universal_conjunct(f: &Constraint, depth: usize) -> bool {
    let mut forall_vars: BTreeSet<String> = BTreeSet::new();
    let mut body = f;
    loop {
        match body {
            Constraint::Forall(v, b) => {
                forall_vars.insert(v.clone());
                body = b;
            }
            Constraint::Exists(_, b) => body = b,
            _ => break,
        }
    }
    for part in flatten_conj(body) {
        if !part.free_vars().is_subset(&forall_vars) {
            continue;
        }
        for neg in negation_branches(&part) {
            let closed = crate::constraints::exists_closure(&neg);
            if decide_closed_truth(&closed, depth - 1).0 == Verdict::True {
                return true;
            }
        }
    }
    false
}

/// Constraints whose satisfiability implies the negation of `c` holds
/// somewhere. Disjunctive branches are returned as separate entries.
fn negation_branches(c: &Constraint) -> Vec<Constraint> {
    match c {
        Constraint::True => Vec::new(),
        Constraint::False => vec![Constraint::True],
        Constraint::Eq(a, b) => vec![
            Constraint::lt(a.clone(), b.clone()),
            Constraint::lt(b.clone(), a.clone()),
        ],
        Constraint::Atom(sym, args) if sym == LEQ && args.len() == 2 => {
            vec![Constraint::lt(args[1].clone(), args[0].clone())]
        }
        Constraint::Atom(sym, args) if sym == LT && args.len() == 2 => {
            vec![Constraint::leq(args[1].clone(), args[0].clone())]
        }
        Constraint::Atom(sym, args) if sym == NEQ && args.len() == 2 => {
            vec![Constraint::eq(args[0].clone(), args[1].clone())]
        }
        Constraint::Atom(..) => Vec::new(),
        Constraint::And(a, b) => {
            let mut out = negation_branches(a);
            out.extend(negation_branches(b));
            out
        }
        Constraint::Implies(a, b) => negation_branches(b)
            .into_iter()
            .map(|n| Constraint::and(a.as_ref().clone(), n))
            .collect(),
        Constraint::Exists(..) | Constraint::Forall(..) => Vec::new(),
    }
}

/// Monomial relaxation. Every monomial of degree >= 2 whose variables are
/// all bound by `required` quantifiers is replaced by a fresh variable,
/// quantified like the monomial's innermost variable; even-power monomials
/// carry a `>= 0` guard. Returns `None` when some atom is not polynomial
/// or some abstracted monomial mixes quantifier kinds.
fn relax(c: &Constraint, required: Quant) -> Option<Constraint> {
    let mut ctx = RelaxCtx {
        required,
        binders: Vec::new(),
        table: BTreeMap::new(),
        counter: 0,
    };
    let body = relax_rec(c, &mut ctx)?;
    Some(body)
}

struct RelaxCtx {
    required: Quant,
    binders: Vec<(Quant, String)>,
    table: BTreeMap<super::poly::Monomial, String>,
    counter: usize,
}

fn relax_rec(c: &Constraint, ctx: &mut RelaxCtx) -> Option<Constraint> {
    match c {
        Constraint::True | Constraint::False => Some(c.clone()),
        Constraint::Eq(a, b) => relax_atom(None, a, b, ctx),
        Constraint::Atom(sym, args) if args.len() == 2 => {
            relax_atom(Some(sym.as_str()), &args[0], &args[1], ctx)
        }
        Constraint::Atom(..) => None,
        Constraint::And(a, b) => Some(Constraint::and(
            relax_rec(a, ctx)?,
            relax_rec(b, ctx)?,
        )),
        Constraint::Implies(a, b) => Some(Constraint::implies(
            relax_rec(a, ctx)?,
            relax_rec(b, ctx)?,
        )),
        Constraint::Exists(v, body) => {
            ctx.binders.push((Quant::Exists, v.clone()));
            let marker = ctx.binders.len();
            let inner = relax_rec(body, ctx)?;
            let wrapped = close_monomials_at(marker, inner, ctx);
            ctx.binders.pop();
            Some(Constraint::exists(v.clone(), wrapped))
        }
        Constraint::Forall(v, body) => {
            ctx.binders.push((Quant::Forall, v.clone()));
            let marker = ctx.binders.len();
            let inner = relax_rec(body, ctx)?;
            let wrapped = close_monomials_at(marker, inner, ctx);
            ctx.binders.pop();
            Some(Constraint::forall(v.clone(), wrapped))
        }
    }
}

/// Quantifies the freshly created monomial variables whose innermost
/// binder sits at `marker`, directly inside that binder.
fn close_monomials_at(marker: usize, body: Constraint, ctx: &mut RelaxCtx) -> Constraint {
    let mut out = body;
    let here: Vec<(super::poly::Monomial, String)> = ctx
        .table
        .iter()
        .filter(|(m, _)| innermost_binder_depth(m, &ctx.binders) == Some(marker))
        .map(|(m, v)| (m.clone(), v.clone()))
        .collect();
    for (m, mv) in here {
        let guard_needed = m.values().all(|p| p % 2 == 0);
        match ctx.required {
            Quant::Forall => {
                if guard_needed {
                    out = Constraint::implies(
                        Constraint::leq(Term::int(0), Term::var(mv.clone())),
                        out,
                    );
                }
                out = Constraint::forall(mv.clone(), out);
            }
            Quant::Exists => {
                if guard_needed {
                    out = Constraint::and(
                        Constraint::leq(Term::int(0), Term::var(mv.clone())),
                        out,
                    );
                }
                out = Constraint::exists(mv.clone(), out);
            }
        }
        ctx.table.remove(&m);
    }
    out
}

fn innermost_binder_depth(
    m: &super::poly::Monomial,
    binders: &[(Quant, String)],
) -> Option<usize> {
    let mut depth = None;
    for v in m.keys() {
        let d = binders.iter().rposition(|(_, b)| b == v)? + 1;
        depth = Some(depth.map_or(d, |cur: usize| cur.max(d)));
    }
    depth
}

fn relax_atom(
    sym: Option<&str>,
    left: &Term,
    right: &Term,
    ctx: &mut RelaxCtx,
) -> Option<Constraint> {
    let p = Poly::from_term(left).ok()?.sub(&Poly::from_term(right).ok()?);
    let mut rebuilt = Poly::zero();
    for (m, coeff) in p.terms() {
        let degree: u32 = m.values().sum();
        let part = if degree <= 1 {
            let mut mono = Poly::constant(coeff.clone());
            for (v, &pw) in m {
                mono = mono.mul(&Poly::var(v).pow(pw));
            }
            mono
        } else {
            // all variables of the abstracted monomial must carry the
            // required quantifier kind
            for v in m.keys() {
                let q = ctx
                    .binders
                    .iter()
                    .rev()
                    .find(|(_, b)| b == v)
                    .map(|(q, _)| *q)?;
                if q != ctx.required {
                    return None;
                }
            }
            let name = ctx.table.entry(m.clone()).or_insert_with(|| {
                ctx.counter += 1;
                format!("$m{}", ctx.counter)
            });
            Poly::var(name).scale(coeff)
        };
        rebuilt = rebuilt.add(&part);
    }
    let t = rebuilt.to_term();
    let zero = Term::int(0);
    Some(match sym {
        None => Constraint::eq(t, zero),
        Some(s) if s == LEQ => Constraint::leq(t, zero),
        Some(s) if s == LT => Constraint::lt(t, zero),
        Some(s) if s == NEQ => Constraint::neq(t, zero),
        Some(_) => return None,
    })
}

/// Candidate rational values for grid search: a small curated ladder plus
/// roots of atoms univariate in `v` (linear roots exactly; quadratic roots
/// when the discriminant is a perfect square), their midpoints and
/// off-by-one neighbours.
fn candidate_values(v: &str, body: &Constraint) -> Vec<BigRational> {
    let mut set: BTreeSet<BigRational> = BTreeSet::new();
    let half = BigRational::new(BigInt::one(), 2.into());
    for k in [-2i64, -1, 0, 1, 2] {
        set.insert(BigRational::from_integer(k.into()));
        set.insert(BigRational::from_integer(k.into()) + &half);
    }

    let mut roots: Vec<BigRational> = Vec::new();
    collect_atom_roots(v, body, &mut roots);
    roots.sort();
    for w in roots.windows(2) {
        set.insert((&w[0] + &w[1]) / BigRational::from_integer(2.into()));
    }
    let one = BigRational::one();
    for r in &roots {
        set.insert(r.clone());
        set.insert(r + &one);
        set.insert(r - &one);
        set.insert(r + &half);
        set.insert(r - &half);
    }
    set.into_iter().take(40).collect()
}

fn collect_atom_roots(v: &str, c: &Constraint, out: &mut Vec<BigRational>) {
    match c {
        Constraint::Eq(a, b) => collect_poly_roots(v, a, b, out),
        Constraint::Atom(_, args) if args.len() == 2 => {
            collect_poly_roots(v, &args[0], &args[1], out)
        }
        Constraint::And(a, b) | Constraint::Implies(a, b) => {
            collect_atom_roots(v, a, out);
            collect_atom_roots(v, b, out);
        }
        Constraint::Exists(w, b) | Constraint::Forall(w, b) => {
            if w != v {
                collect_atom_roots(v, b, out);
            }
        }
        _ => {}
    }
}

fn collect_poly_roots(v: &str, left: &Term, right: &Term, out: &mut Vec<BigRational>) {
    let (Ok(l), Ok(r)) = (Poly::from_term(left), Poly::from_term(right)) else {
        return;
    };
    let p = l.sub(&r);
    if !p.vars().iter().all(|x| x == v) {
        return;
    }
    // univariate in v: p = a v^2 + b v + c (degree <= 2 handled)
    let coeff = |pw: u32| -> BigRational {
        p.terms()
            .find(|(m, _)| m.get(v).copied().unwrap_or(0) == pw && (pw > 0 || m.is_empty()))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    };
    match p.degree() {
        0 => {}
        1 => {
            let a = coeff(1);
            let b = coeff(0);
            if !a.is_zero() {
                out.push(-b / a);
            }
        }
        2 => {
            let a = coeff(2);
            let b = coeff(1);
            let c = coeff(0);
            if a.is_zero() {
                if !b.is_zero() {
                    out.push(-c / b);
                }
                return;
            }
            let disc = &b * &b - BigRational::from_integer(4.into()) * &a * &c;
            if disc.is_negative() {
                return;
            }
            if let Some(root) = rational_sqrt(&disc) {
                let two_a = BigRational::from_integer(2.into()) * &a;
                out.push((-&b + &root) / &two_a);
                out.push((-&b - &root) / &two_a);
            }
        }
        _ => {}
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// `∃v (p(v) ≈ 0 ∧ rest)`: finds a sign change of the univariate
/// polynomial `p` on the candidate ladder and validates `rest` over the
/// bracketing interval with interval arithmetic. The intermediate value
/// theorem supplies the (possibly irrational) witness.
fn bracketed_root_witness(v: &str, body: &Constraint) -> Option<Verdict> {
    let parts = flatten_conj(body);
    let mut equation: Option<Poly> = None;
    let mut rest: Vec<&Constraint> = Vec::new();
    for part in &parts {
        if let Constraint::Eq(a, b) = part {
            let p = Poly::from_term(a).ok()?.sub(&Poly::from_term(b).ok()?);
            if p.vars().iter().all(|x| x == v) && p.degree() >= 1 && equation.is_none() {
                equation = Some(p);
                continue;
            }
        }
        rest.push(part);
    }
    let p = equation?;
    let mut env = BTreeMap::new();
    let ladder: Vec<BigRational> = {
        let mut xs = candidate_values(v, body);
        xs.sort();
        xs
    };
    for w in ladder.windows(2) {
        env.insert(v.to_string(), w[0].clone());
        let f_lo = p.eval(&env)?;
        env.insert(v.to_string(), w[1].clone());
        let f_hi = p.eval(&env)?;
        if f_lo.is_zero() || f_hi.is_zero() || (f_lo.is_negative() != f_hi.is_negative()) {
            let iv = Interval {
                lo: w[0].clone(),
                hi: w[1].clone(),
            };
            let all_ok = rest.iter().all(|r| interval_holds(r, v, &iv) == Some(true));
            if all_ok {
                return Some(Verdict::True);
            }
        }
    }
    None
}

fn flatten_conj(c: &Constraint) -> Vec<Constraint> {
    match c {
        Constraint::And(a, b) => {
            let mut out = flatten_conj(a);
            out.extend(flatten_conj(b));
            out
        }
        other => vec![other.clone()],
    }
}

/// Closed finite interval with rational endpoints.
#[derive(Debug, Clone)]
struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    fn point(q: &BigRational) -> Interval {
        Interval {
            lo: q.clone(),
            hi: q.clone(),
        }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Interval) -> Interval {
        let candidates = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Interval {
            lo: candidates.iter().min().unwrap().clone(),
            hi: candidates.iter().max().unwrap().clone(),
        }
    }

    fn pow(&self, e: u32) -> Interval {
        let mut out = Interval::point(&BigRational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        if e % 2 == 0 && out.lo.is_negative() {
            // even powers are nonnegative even across a sign change
            out.lo = BigRational::zero();
        }
        out
    }
}

fn interval_eval(t: &Term, v: &str, iv: &Interval) -> Option<Interval> {
    match t {
        Term::Var(x) if x == v => Some(iv.clone()),
        Term::Var(_) => None,
        Term::Num(q) => Some(Interval::point(q)),
        Term::App(f, args) => match (f.as_str(), args.len()) {
            ("+", 2) => Some(interval_eval(&args[0], v, iv)?.add(&interval_eval(&args[1], v, iv)?)),
            ("-", 2) => Some(interval_eval(&args[0], v, iv)?.sub(&interval_eval(&args[1], v, iv)?)),
            ("*", 2) => Some(interval_eval(&args[0], v, iv)?.mul(&interval_eval(&args[1], v, iv)?)),
            ("neg", 1) => Some(interval_eval(&args[0], v, iv)?.neg()),
            ("^", 2) => {
                let base = interval_eval(&args[0], v, iv)?;
                match &args[1] {
                    Term::Num(q) if q.is_integer() && !q.is_negative() => {
                        let e: u32 = q.numer().try_into().ok()?;
                        Some(base.pow(e))
                    }
                    _ => None,
                }
            }
            ("/", 2) => {
                let num = interval_eval(&args[0], v, iv)?;
                let den = interval_eval(&args[1], v, iv)?;
                if den.lo.is_positive() || den.hi.is_negative() {
                    let candidates = [
                        &num.lo / &den.lo,
                        &num.lo / &den.hi,
                        &num.hi / &den.lo,
                        &num.hi / &den.hi,
                    ];
                    Some(Interval {
                        lo: candidates.iter().min().unwrap().clone(),
                        hi: candidates.iter().max().unwrap().clone(),
                    })
                } else {
                    None
                }
            }
            _ => None,
        },
    }
}

/// Definitive truth of an atom over the whole interval, if determinable.
fn interval_holds(c: &Constraint, v: &str, iv: &Interval) -> Option<bool> {
    match c {
        Constraint::True => Some(true),
        Constraint::False => Some(false),
        Constraint::Atom(sym, args) if sym == LEQ && args.len() == 2 => {
            let l = interval_eval(&args[0], v, iv)?;
            let r = interval_eval(&args[1], v, iv)?;
            if l.hi <= r.lo {
                Some(true)
            } else if l.lo > r.hi {
                Some(false)
            } else {
                None
            }
        }
        Constraint::Atom(sym, args) if sym == LT && args.len() == 2 => {
            let l = interval_eval(&args[0], v, iv)?;
            let r = interval_eval(&args[1], v, iv)?;
            if l.hi < r.lo {
                Some(true)
            } else if l.lo >= r.hi {
                Some(false)
            } else {
                None
            }
        }
        Constraint::And(a, b) => {
            match (interval_holds(a, v, iv), interval_holds(b, v, iv)) {
                (Some(true), Some(true)) => Some(true),
                (Some(false), _) | (_, Some(false)) => Some(false),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Exact evaluation of a variable-free constraint; used by tests and the
/// ground strategy indirectly through the simplifier.
pub fn ground_truth(c: &Constraint) -> Option<bool> {
    let env: BTreeMap<String, BigRational> = BTreeMap::new();
    match c {
        Constraint::True => Some(true),
        Constraint::False => Some(false),
        Constraint::Eq(a, b) => Some(eval_term(a, &env)? == eval_term(b, &env)?),
        Constraint::Atom(sym, args) if args.len() == 2 => {
            let a = eval_term(&args[0], &env)?;
            let b = eval_term(&args[1], &env)?;
            match sym.as_str() {
                LEQ => Some(a <= b),
                LT => Some(a < b),
                NEQ => Some(a != b),
                _ => None,
            }
        }
        Constraint::And(a, b) => Some(ground_truth(a)? && ground_truth(b)?),
        Constraint::Implies(a, b) => Some(!ground_truth(a)? || ground_truth(b)?),
        _ => None,
    }
}
