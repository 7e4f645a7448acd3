//! Ideals of finite algebras in varieties with a BIT speciale witness.
//!
//! Terms, finite algebras given by operation tables, witness verification,
//! the determining ideal-term sets, and an ideal engine that checks every
//! verdict against congruence kernels.

pub mod algebra;
pub mod congruence;
pub mod error;
pub mod eval;
pub mod ideal;
pub mod parse;
pub mod reference;
pub mod selftest;
pub mod subset;
pub mod term;
pub mod termset;
pub mod variety;
pub mod witness;

pub use algebra::{eval_term, holds_identity, is_zero_ideal_term, load_algebra, subuniverse, FiniteAlgebra};
pub use congruence::{all_congruences, is_congruence, kernel_of, principal_congruence};
pub use error::{Error, Result};
pub use eval::Budget;
pub use parse::parse_term;
pub use subset::{Partition, Subset};
pub use term::{print_term, substitute, validate_term, vars_of, Signature, Term, Var, VarKind, VarSet};
pub use variety::{builtin, extend_signature, VarietySpec};
pub use witness::{verify_witness, BitWitness, BoundWitness};
pub use termset::{dedupe_semantic, dedupe_syntactic, extend_termset, gen_termset, ExtensionMode, TermSet, Variant};
pub use ideal::{closed_under, ideal_closure, is_ideal_oracle, list_ideals, nonempty_subsets, Check, CompiledSet, Condition, Failure, IdealEngine, IdealReport, Method, Oracle};
