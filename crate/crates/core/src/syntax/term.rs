//! First-order terms: finite trees over a signature, with exact rational leaves.

use num::BigRational;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Constructor used for non-empty lists, `[H|T]`.
pub const CONS: &str = "[|]";
/// Constant used for the empty list.
pub const NIL: &str = "[]";

/// Binary arithmetic symbols interpreted by the numeric constraint systems.
pub const ARITH_BINARY: [&str; 5] = ["+", "-", "*", "/", "^"];
/// Unary negation.
pub const ARITH_NEG: &str = "neg";

pub fn is_arith_symbol(name: &str) -> bool {
    ARITH_BINARY.contains(&name) || name == ARITH_NEG
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Num(BigRational),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn int(n: i64) -> Term {
        Term::Num(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Term {
        Term::Num(BigRational::new(num.into(), den.into()))
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::app(CONS, vec![head, tail])
    }

    /// `[a, b, c]` as nested cons cells.
    pub fn list(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |acc, it| Term::cons(it, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Num(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }

    /// Structural size, counting variables, numerals and applications.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Num(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// True when the term is built purely from arithmetic symbols, numerals
    /// and variables (no free constructors).
    pub fn is_arith(&self) -> bool {
        match self {
            Term::Var(_) | Term::Num(_) => true,
            Term::App(f, args) => is_arith_symbol(f) && args.iter().all(Term::is_arith),
        }
    }

    /// True when an arithmetic symbol occurs anywhere in the term.
    pub fn mentions_arith(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Num(_) => true,
            Term::App(f, args) => is_arith_symbol(f) || args.iter().any(Term::mentions_arith),
        }
    }
}

/// Renders a rational the way the surface syntax reads it back: integers
/// plainly, everything else as `num/den`.
pub fn display_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Term {
    /// Debug-oriented rendering; the surface printer owns the user-facing one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Num(q) => write!(f, "{}", display_rational(q)),
            Term::App(c, args) if args.is_empty() => write!(f, "{c}"),
            Term::App(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Ranked symbol table. Constructor, predicate and domain-atom namespaces
/// are disjoint; arities are fixed per symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub constructors: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
    pub domain_atoms: BTreeMap<String, usize>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` is declared in more than one namespace")]
    NamespaceClash(String),
    #[error("symbol `{0}` used with arity {1} but declared with arity {2}")]
    ArityMismatch(String, usize, usize),
}

impl Signature {
    pub fn declare_constructor(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.predicates.contains_key(name) || self.domain_atoms.contains_key(name) {
            return Err(SignatureError::NamespaceClash(name.to_string()));
        }
        match self.constructors.get(name) {
            Some(&a) if a != arity => Err(SignatureError::ArityMismatch(name.into(), arity, a)),
            _ => {
                self.constructors.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.constructors.contains_key(name) || self.domain_atoms.contains_key(name) {
            return Err(SignatureError::NamespaceClash(name.to_string()));
        }
        match self.predicates.get(name) {
            Some(&a) if a != arity => Err(SignatureError::ArityMismatch(name.into(), arity, a)),
            _ => {
                self.predicates.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn declare_domain_atom(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.constructors.contains_key(name) || self.predicates.contains_key(name) {
            return Err(SignatureError::NamespaceClash(name.to_string()));
        }
        match self.domain_atoms.get(name) {
            Some(&a) if a != arity => Err(SignatureError::ArityMismatch(name.into(), arity, a)),
            _ => {
                self.domain_atoms.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Free (non-arithmetic) constructors only.
    pub fn tree_constructors(&self) -> impl Iterator<Item = (&String, &usize)> {
        self.constructors
            .iter()
            .filter(|(name, _)| !is_arith_symbol(name) )
    }
}
