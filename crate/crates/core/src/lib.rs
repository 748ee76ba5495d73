//! Goal solving over hereditary Harrop formulas parameterized by a
//! constraint system, following the state-transformation reading: a goal is
//! broken down by its outermost connective, atoms backchain against clause
//! variants, and constraints accumulate into a prefixed global store whose
//! satisfiability is rechecked at every constraint step. Computed answers
//! are prefixed constraint formulas, and every strict-mode answer can be
//! certified by an independently checkable sequent proof.

pub mod clpr;
pub mod constraints;
pub mod engine;
pub mod herbrand;
pub mod kernel;
pub mod linreal;
pub mod simplify;
pub mod syntax;

pub use constraints::{ConstraintSystem, Quant, QuantifierPrefix, SystemError, Verdict};
pub use syntax::{Clause, Constraint, ElabClause, Goal, PredAtom, Program, Signature, Subst, Term};
