//! Substitutions and the fresh-variable supply.

use super::term::Term;
use std::collections::{BTreeMap, BTreeSet};

/// Finite binding set from variables to terms. `x ↦ x` entries are dropped
/// on construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    bindings: BTreeMap<String, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn single(var: impl Into<String>, term: Term) -> Subst {
        let mut s = Subst::new();
        s.bind(var.into(), term);
        s
    }

    pub fn bind(&mut self, var: String, term: Term) {
        if term != Term::Var(var.clone()) {
            self.bindings.insert(var, term);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.bindings.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Num(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    /// `self` then `other`: `t (self;other) = (t self) other`, normalized so
    /// that application stays idempotent on the combined domain.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut out = Subst::new();
        for (v, t) in &self.bindings {
            out.bind(v.clone(), other.apply_term(t));
        }
        for (v, t) in &other.bindings {
            if !out.bindings.contains_key(v) && !self.bindings.contains_key(v) {
                out.bind(v.clone(), t.clone());
            }
        }
        out
    }

    /// Binder bookkeeping shared by formula, goal and clause substitution.
    ///
    /// Returns the (possibly renamed) binder, an optional renaming to apply
    /// to the body first, and the substitution restricted away from the
    /// binder. Renaming happens exactly when the binder would capture a free
    /// variable of the incoming terms.
    pub fn descend_binder(
        &self,
        binder: &str,
        body_free: BTreeSet<String>,
    ) -> (String, Option<Subst>, Subst) {
        let mut restricted = Subst::new();
        let mut range_vars: BTreeSet<String> = BTreeSet::new();
        for (v, t) in &self.bindings {
            if v != binder && body_free.contains(v) {
                restricted.bind(v.clone(), t.clone());
                t.collect_vars(&mut range_vars);
            }
        }
        if restricted.is_empty() {
            return (binder.to_string(), None, restricted);
        }
        if range_vars.contains(binder) {
            let mut avoid = range_vars;
            avoid.extend(body_free);
            avoid.extend(restricted.domain().cloned());
            let fresh = primed_avoiding(binder, &avoid);
            let rename = Subst::single(binder, Term::Var(fresh.clone()));
            (fresh, Some(rename), restricted)
        } else {
            (binder.to_string(), None, restricted)
        }
    }
}

/// First of `base`, `base'`, `base''`, ... not contained in `avoid`.
pub fn primed_avoiding(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = base.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Monotone supply of variable names distinct from a reserved set and from
/// everything previously emitted.
#[derive(Debug, Clone, Default)]
pub struct FreshSource {
    reserved: BTreeSet<String>,
}

impl FreshSource {
    pub fn new(reserved: impl IntoIterator<Item = String>) -> FreshSource {
        FreshSource {
            reserved: reserved.into_iter().collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.reserved.insert(name.to_string());
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.reserved.contains(name)
    }

    /// Emits a name based on `base`, priming until free, and records it.
    pub fn fresh(&mut self, base: &str) -> String {
        let name = primed_avoiding(base, &self.reserved);
        self.reserved.insert(name.clone());
        name
    }

}
