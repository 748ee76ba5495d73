//! Multivariate polynomials with exact rational coefficients.

use crate::syntax::Term;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Variable-to-power map; the empty map is the constant monomial.
pub type Monomial = BTreeMap<String, u32>;

/// Sum of monomials with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("term is not polynomial: division by an expression containing variables")]
    NonConstantDivisor,
    #[error("term is not arithmetic: `{0}` is a free constructor")]
    NotArithmetic(String),
    #[error("exponent must be a non-negative integer literal")]
    BadExponent,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(q: BigRational) -> Poly {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Monomial::new(), q);
        }
        p
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(BigRational::from_integer(n.into()))
    }

    pub fn var(name: &str) -> Poly {
        let mut m = Monomial::new();
        m.insert(name.to_string(), 1);
        let mut p = Poly::zero();
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::new()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.values().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.keys().cloned())
            .collect()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (v, p) in m2 {
                    *m.entry(v.clone()).or_insert(0) += p;
                }
                let entry = out.terms.entry(m).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(BigRational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Coefficient map and constant of a linear polynomial.
    pub fn linear_parts(&self) -> Option<(BTreeMap<String, BigRational>, BigRational)> {
        let mut coeffs = BTreeMap::new();
        let mut konst = BigRational::zero();
        for (m, c) in &self.terms {
            match m.len() {
                0 => konst = c.clone(),
                1 => {
                    let (v, &p) = m.iter().next().unwrap();
                    if p != 1 {
                        return None;
                    }
                    coeffs.insert(v.clone(), c.clone());
                }
                _ => return None,
            }
        }
        Some((coeffs, konst))
    }

    /// Coefficient of `x` and the remainder, for a polynomial linear in `x`.
    pub fn split_linear_in(&self, x: &str) -> Option<(BigRational, Poly)> {
        let mut coeff = BigRational::zero();
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            match m.get(x) {
                None => {
                    rest.terms.insert(m.clone(), c.clone());
                }
                Some(1) if m.len() == 1 => coeff = c.clone(),
                Some(_) => return None, // higher power or mixed monomial
            }
        }
        Some((coeff, rest))
    }

    pub fn subst_var(&self, x: &str, replacement: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut base = Poly::constant(c.clone());
            for (v, &p) in m {
                let factor = if v == x {
                    replacement.pow(p)
                } else {
                    Poly::var(v).pow(p)
                };
                base = base.mul(&factor);
            }
            out = out.add(&base);
        }
        out
    }

    pub fn eval(&self, env: &BTreeMap<String, BigRational>) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (v, &p) in m {
                let val = env.get(v)?;
                for _ in 0..p {
                    prod *= val;
                }
            }
            total += prod;
        }
        Some(total)
    }

    /// Scales to coprime integer coefficients; returns the positive factor
    /// applied (useful for keeping inequality direction).
    pub fn normalize_integer(&self) -> (Poly, BigRational) {
        if self.terms.is_empty() {
            return (self.clone(), BigRational::one());
        }
        let mut denom_lcm = BigInt::one();
        for c in self.terms.values() {
            denom_lcm = num::integer::lcm(denom_lcm, c.denom().clone());
        }
        let mut numer_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c * BigRational::from_integer(denom_lcm.clone());
            numer_gcd = num::integer::gcd(numer_gcd, scaled.numer().clone());
        }
        if numer_gcd.is_zero() {
            numer_gcd = BigInt::one();
        }
        let factor = BigRational::new(denom_lcm, numer_gcd);
        (self.scale(&factor), factor)
    }

    /// Converts an arithmetic term. Division is allowed only by a term that
    /// folds to a nonzero constant.
    pub fn from_term(t: &Term) -> Result<Poly, PolyError> {
        match t {
            Term::Var(v) => Ok(Poly::var(v)),
            Term::Num(q) => Ok(Poly::constant(q.clone())),
            Term::App(f, args) => match (f.as_str(), args.len()) {
                ("+", 2) => Ok(Poly::from_term(&args[0])?.add(&Poly::from_term(&args[1])?)),
                ("-", 2) => Ok(Poly::from_term(&args[0])?.sub(&Poly::from_term(&args[1])?)),
                ("*", 2) => Ok(Poly::from_term(&args[0])?.mul(&Poly::from_term(&args[1])?)),
                ("neg", 1) => Ok(Poly::from_term(&args[0])?.neg()),
                ("/", 2) => {
                    let num = Poly::from_term(&args[0])?;
                    let den = Poly::from_term(&args[1])?;
                    match den.as_constant() {
                        Some(c) if !c.is_zero() => Ok(num.scale(&c.recip())),
                        _ => Err(PolyError::NonConstantDivisor),
                    }
                }
                ("^", 2) => {
                    let base = Poly::from_term(&args[0])?;
                    match &args[1] {
                        Term::Num(q) if q.is_integer() && !q.is_negative() => {
                            let e: u32 = q
                                .numer()
                                .try_into()
                                .map_err(|_| PolyError::BadExponent)?;
                            Ok(base.pow(e))
                        }
                        _ => Err(PolyError::BadExponent),
                    }
                }
                _ => Err(PolyError::NotArithmetic(f.clone())),
            },
        }
    }

    /// Renders back into a term, sum of monomials in map order.
    pub fn to_term(&self) -> Term {
        if self.terms.is_empty() {
            return Term::int(0);
        }
        let mut parts: Vec<Term> = Vec::new();
        for (m, c) in &self.terms {
            let mut factors: Vec<Term> = Vec::new();
            for (v, &p) in m {
                for _ in 0..p {
                    factors.push(Term::var(v.clone()));
                }
            }
            let mono = factors
                .into_iter()
                .reduce(|a, b| Term::app("*", vec![a, b]));
            let part = match mono {
                None => Term::Num(c.clone()),
                Some(mt) if c.is_one() => mt,
                Some(mt) => Term::app("*", vec![Term::Num(c.clone()), mt]),
            };
            parts.push(part);
        }
        parts
            .into_iter()
            .reduce(|a, b| Term::app("+", vec![a, b]))
            .unwrap()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

