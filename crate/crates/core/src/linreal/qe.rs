//! Quantifier elimination for linear rational arithmetic by equation
//! substitution and Fourier–Motzkin pair combination, over an internal
//! quantifier-free representation with explicit disjunction.

use super::poly::{Poly, PolyError};
use crate::constraints::{Quant, QuantifierPrefix, Verdict};
use crate::syntax::{Constraint, LEQ, LT, NEQ};
use num::{BigRational, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    /// `p ≈ 0`
    Eq,
    /// `p ≤ 0`
    Le,
    /// `p < 0`
    Lt,
}

/// Normalized linear atom `p rel 0` with coprime integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinAtom {
    pub rel: Rel,
    pub poly: Poly,
}

impl LinAtom {
    pub fn new(rel: Rel, poly: Poly) -> LinAtom {
        let (mut p, _) = poly.normalize_integer();
        if rel == Rel::Eq {
            // sign-canonical equations
            let flip = p
                .terms()
                .next()
                .map(|(_, c)| c.is_negative())
                .unwrap_or(false);
            if flip {
                p = p.neg();
            }
        }
        LinAtom { rel, poly: p }
    }

    fn truth_if_constant(&self) -> Option<bool> {
        let c = self.poly.as_constant()?;
        Some(match self.rel {
            Rel::Eq => c.is_zero(),
            Rel::Le => !c.is_positive(),
            Rel::Lt => c.is_negative(),
        })
    }
}

/// Quantifier-free formula over linear atoms. Disjunction exists only in
/// this internal representation; the constraint language has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Qff {
    True,
    False,
    Atom(LinAtom),
    And(Vec<Qff>),
    Or(Vec<Qff>),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum LinError {
    #[error("nonlinear atom: {0}")]
    Nonlinear(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("normal-form budget exceeded")]
    Budget,
}

pub const DEFAULT_ATOM_BUDGET: usize = 100_000;

pub struct Budget {
    pub remaining: usize,
}

impl Budget {
    pub fn new(n: usize) -> Budget {
        Budget { remaining: n }
    }

    fn spend(&mut self, n: usize) -> Result<(), LinError> {
        if self.remaining < n {
            return Err(LinError::Budget);
        }
        self.remaining -= n;
        Ok(())
    }
}

fn atom_from_terms(
    rel: Rel,
    left: &crate::syntax::Term,
    right: &crate::syntax::Term,
) -> Result<Qff, LinError> {
    let p = Poly::from_term(left)?.sub(&Poly::from_term(right)?);
    if !p.is_linear() {
        return Err(LinError::Nonlinear(format!("{p}")));
    }
    Ok(mk_atom(rel, p))
}

fn mk_atom(rel: Rel, p: Poly) -> Qff {
    let a = LinAtom::new(rel, p);
    match a.truth_if_constant() {
        Some(true) => Qff::True,
        Some(false) => Qff::False,
        None => Qff::Atom(a),
    }
}

/// Converts a constraint to quantifier-free form, eliminating any inner
/// quantifiers inside-out. The result is equivalent over the reals.
pub fn to_qff(c: &Constraint, budget: &mut Budget) -> Result<Qff, LinError> {
    budget.spend(1)?;
    Ok(match c {
        Constraint::True => Qff::True,
        Constraint::False => Qff::False,
        Constraint::Eq(a, b) => atom_from_terms(Rel::Eq, a, b)?,
        Constraint::Atom(sym, args) if sym == LEQ && args.len() == 2 => {
            atom_from_terms(Rel::Le, &args[0], &args[1])?
        }
        Constraint::Atom(sym, args) if sym == LT && args.len() == 2 => {
            atom_from_terms(Rel::Lt, &args[0], &args[1])?
        }
        Constraint::Atom(sym, args) if sym == NEQ && args.len() == 2 => {
            let p = Poly::from_term(&args[0])?.sub(&Poly::from_term(&args[1])?);
            if !p.is_linear() {
                return Err(LinError::Nonlinear(format!("{p}")));
            }
            Qff::Or(vec![mk_atom(Rel::Lt, p.clone()), mk_atom(Rel::Lt, p.neg())])
        }
        Constraint::Atom(sym, _) => {
            return Err(LinError::Nonlinear(format!("uninterpreted atom {sym}")))
        }
        Constraint::And(a, b) => Qff::And(vec![to_qff(a, budget)?, to_qff(b, budget)?]),
        Constraint::Implies(a, b) => {
            let na = negate(&to_qff(a, budget)?);
            Qff::Or(vec![na, to_qff(b, budget)?])
        }
        Constraint::Exists(v, body) => {
            let inner = to_qff(body, budget)?;
            qe_exists_qff(v, &inner, budget)?
        }
        Constraint::Forall(v, body) => {
            let inner = to_qff(body, budget)?;
            qe_forall_qff(v, &inner, budget)?
        }
    })
}

/// Classical negation by atom flipping.
pub fn negate(q: &Qff) -> Qff {
    match q {
        Qff::True => Qff::False,
        Qff::False => Qff::True,
        Qff::Atom(a) => match a.rel {
            // ¬(p ≤ 0) ≡ −p < 0;  ¬(p < 0) ≡ −p ≤ 0
            Rel::Le => mk_atom(Rel::Lt, a.poly.neg()),
            Rel::Lt => mk_atom(Rel::Le, a.poly.neg()),
            // ¬(p ≈ 0) ≡ p < 0 ∨ −p < 0
            Rel::Eq => Qff::Or(vec![
                mk_atom(Rel::Lt, a.poly.clone()),
                mk_atom(Rel::Lt, a.poly.neg()),
            ]),
        },
        Qff::And(xs) => Qff::Or(xs.iter().map(negate).collect()),
        Qff::Or(xs) => Qff::And(xs.iter().map(negate).collect()),
    }
}

/// Disjunctive normal form as a list of atom conjunctions.
fn dnf(q: &Qff, budget: &mut Budget) -> Result<Vec<Vec<LinAtom>>, LinError> {
    match q {
        Qff::True => Ok(vec![Vec::new()]),
        Qff::False => Ok(Vec::new()),
        Qff::Atom(a) => Ok(vec![vec![a.clone()]]),
        Qff::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(dnf(x, budget)?);
                budget.spend(out.len())?;
            }
            Ok(out)
        }
        Qff::And(xs) => {
            let mut out: Vec<Vec<LinAtom>> = vec![Vec::new()];
            for x in xs {
                let ds = dnf(x, budget)?;
                let mut next = Vec::new();
                for base in &out {
                    for d in &ds {
                        budget.spend(d.len() + 1)?;
                        let mut merged = base.clone();
                        for a in d {
                            if !merged.contains(a) {
                                merged.push(a.clone());
                            }
                        }
                        next.push(merged);
                    }
                }
                out = next;
            }
            Ok(out)
        }
    }
}

fn rebuild(disjuncts: Vec<Vec<LinAtom>>) -> Qff {
    if disjuncts.is_empty() {
        return Qff::False;
    }
    let mut out: Vec<Qff> = Vec::new();
    for conj in disjuncts {
        if conj.is_empty() {
            return Qff::True;
        }
        out.push(Qff::And(conj.into_iter().map(Qff::Atom).collect()));
    }
    Qff::Or(out)
}

/// `∃x` over one atom conjunction: substitute an equation when possible,
/// otherwise combine lower and upper bounds pairwise.
fn eliminate_from_conj(
    x: &str,
    conj: &[LinAtom],
    budget: &mut Budget,
) -> Result<Option<Vec<LinAtom>>, LinError> {
    let mut kept: Vec<LinAtom> = Vec::new();
    let mut eqs: Vec<(BigRational, Poly)> = Vec::new();
    let mut uppers: Vec<(Poly, bool)> = Vec::new(); // x ≤ bound (strict?)
    let mut lowers: Vec<(Poly, bool)> = Vec::new(); // bound ≤ x (strict?)
    for a in conj {
        let Some((c, rest)) = a.poly.split_linear_in(x) else {
            return Err(LinError::Nonlinear(format!("{}", a.poly)));
        };
        if c.is_zero() {
            kept.push(a.clone());
            continue;
        }
        let bound = rest.scale(&(-c.clone().recip())); // x rel bound
        match a.rel {
            Rel::Eq => eqs.push((c, rest)),
            Rel::Le | Rel::Lt => {
                let strict = a.rel == Rel::Lt;
                if c.is_positive() {
                    uppers.push((bound, strict));
                } else {
                    lowers.push((bound, strict));
                }
            }
        }
    }

    if let Some((c, rest)) = eqs.first() {
        // x = −rest/c substituted everywhere
        let replacement = rest.scale(&(-c.clone().recip()));
        let mut out = kept;
        for (c2, rest2) in eqs.iter().skip(1) {
            let p = Poly::var(x)
                .scale(c2)
                .add(rest2)
                .subst_var(x, &replacement);
            match push_atom(&mut out, Rel::Eq, p, budget)? {
                Some(()) => {}
                None => return Ok(None),
            }
        }
        for (bound, strict) in uppers {
            // x ≤ bound  =>  replacement − bound ≤ 0
            let p = replacement.sub(&bound);
            let rel = if strict { Rel::Lt } else { Rel::Le };
            if push_atom(&mut out, rel, p, budget)?.is_none() {
                return Ok(None);
            }
        }
        for (bound, strict) in lowers {
            let p = bound.sub(&replacement);
            let rel = if strict { Rel::Lt } else { Rel::Le };
            if push_atom(&mut out, rel, p, budget)?.is_none() {
                return Ok(None);
            }
        }
        return Ok(Some(out));
    }

    // pure inequalities: every lower must sit below every upper
    let mut out = kept;
    for (lo, lo_strict) in &lowers {
        for (hi, hi_strict) in &uppers {
            let rel = if *lo_strict || *hi_strict {
                Rel::Lt
            } else {
                Rel::Le
            };
            let p = lo.sub(hi);
            if push_atom(&mut out, rel, p, budget)?.is_none() {
                return Ok(None);
            }
        }
    }
    Ok(Some(out))
}

/// Push a normalized atom unless trivially true; `None` when it is
/// trivially false (the conjunction dies).
fn push_atom(
    out: &mut Vec<LinAtom>,
    rel: Rel,
    p: Poly,
    budget: &mut Budget,
) -> Result<Option<()>, LinError> {
    budget.spend(1)?;
    match mk_atom(rel, p) {
        Qff::True => Ok(Some(())),
        Qff::False => Ok(None),
        Qff::Atom(a) => {
            if !out.contains(&a) {
                out.push(a);
            }
            Ok(Some(()))
        }
        _ => unreachable!("mk_atom yields atoms or truth values"),
    }
}

pub fn qe_exists_qff(x: &str, q: &Qff, budget: &mut Budget) -> Result<Qff, LinError> {
    let disjuncts = dnf(q, budget)?;
    let mut out = Vec::new();
    for conj in &disjuncts {
        if let Some(reduced) = eliminate_from_conj(x, conj, budget)? {
            out.push(reduced);
        }
    }
    Ok(rebuild(out))
}

pub fn qe_forall_qff(x: &str, q: &Qff, budget: &mut Budget) -> Result<Qff, LinError> {
    Ok(negate(&qe_exists_qff(x, &negate(q), budget)?))
}

/// Truth of a closed (variable-free) quantifier-free formula.
pub fn decide_closed(q: &Qff) -> Option<bool> {
    match q {
        Qff::True => Some(true),
        Qff::False => Some(false),
        Qff::Atom(a) => a.truth_if_constant(),
        Qff::And(xs) => {
            let mut all = true;
            for x in xs {
                match decide_closed(x)? {
                    true => {}
                    false => all = false,
                }
            }
            Some(all)
        }
        Qff::Or(xs) => {
            let mut any = false;
            for x in xs {
                if decide_closed(x)? {
                    any = true;
                }
            }
            Some(any)
        }
    }
}

/// Complete decision for purely linear constraints: eliminate the prefix
/// inside-out, close remaining free variables existentially, evaluate.
pub fn linear_decide(
    prefix: &QuantifierPrefix,
    c: &Constraint,
    budget_size: usize,
) -> Result<Verdict, LinError> {
    let mut budget = Budget::new(budget_size);
    let attempt = (|| -> Result<Qff, LinError> {
        let mut q = to_qff(c, &mut budget)?;
        for (quant, v) in prefix.entries().iter().rev() {
            q = match quant {
                Quant::Exists => qe_exists_qff(v, &q, &mut budget)?,
                Quant::Forall => qe_forall_qff(v, &q, &mut budget)?,
            };
        }
        // any variables left are free: existential closure
        let mut vars: Vec<String> = qff_vars(&q).into_iter().collect();
        vars.sort();
        for v in vars {
            q = qe_exists_qff(&v, &q, &mut budget)?;
        }
        Ok(q)
    })();
    match attempt {
        Ok(q) => Ok(match decide_closed(&q) {
            Some(true) => Verdict::True,
            Some(false) => Verdict::False,
            None => Verdict::Unknown,
        }),
        Err(LinError::Budget) => Ok(Verdict::Unknown),
        Err(e) => Err(e),
    }
}

/// Validity of `⋀premises ⇒ conclusion` with free variables universal.
pub fn linear_entails(
    premises: &[Constraint],
    conclusion: &Constraint,
    budget_size: usize,
) -> Result<Verdict, LinError> {
    let mut budget = Budget::new(budget_size);
    let attempt = (|| -> Result<Qff, LinError> {
        let mut parts = Vec::new();
        for p in premises {
            parts.push(negate(&to_qff(p, &mut budget)?));
        }
        parts.push(to_qff(conclusion, &mut budget)?);
        let mut q = Qff::Or(parts);
        let mut vars: Vec<String> = qff_vars(&q).into_iter().collect();
        vars.sort();
        for v in vars {
            q = qe_forall_qff(&v, &q, &mut budget)?;
        }
        Ok(q)
    })();
    match attempt {
        Ok(q) => Ok(match decide_closed(&q) {
            Some(true) => Verdict::True,
            Some(false) => Verdict::False,
            None => Verdict::Unknown,
        }),
        Err(LinError::Budget) => Ok(Verdict::Unknown),
        Err(e) => Err(e),
    }
}

pub fn qff_vars(q: &Qff) -> std::collections::BTreeSet<String> {
    match q {
        Qff::True | Qff::False => Default::default(),
        Qff::Atom(a) => a.poly.vars(),
        Qff::And(xs) | Qff::Or(xs) => xs.iter().flat_map(qff_vars).collect(),
    }
}

/// Renders a quantifier-free formula back into the constraint language,
/// encoding disjunction classically as `(d₁ ⇒ ⊥) ⇒ d₂`.
pub fn qff_to_constraint(q: &Qff) -> Constraint {
    match q {
        Qff::True => Constraint::True,
        Qff::False => Constraint::False,
        Qff::Atom(a) => {
            let p = a.poly.to_term();
            let zero = crate::syntax::Term::int(0);
            match a.rel {
                Rel::Eq => Constraint::eq(p, zero),
                Rel::Le => Constraint::leq(p, zero),
                Rel::Lt => Constraint::lt(p, zero),
            }
        }
        Qff::And(xs) => Constraint::conj(xs.iter().map(qff_to_constraint).collect()),
        Qff::Or(xs) => {
            let mut it = xs.iter().rev();
            match it.next() {
                None => Constraint::False,
                Some(last) => it.fold(qff_to_constraint(last), |acc, d| {
                    Constraint::implies(
                        Constraint::implies(qff_to_constraint(d), Constraint::False),
                        acc,
                    )
                }),
            }
        }
    }
}
