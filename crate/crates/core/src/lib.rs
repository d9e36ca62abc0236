//! Workbench for the invariant theory of finite reflection groups: builds
//! the groups A_n, B_n, D_n, I₂(k), H₃ as explicit mirror arrangements,
//! constructs their Chevalley polynomial mappings over exact coefficient
//! fields, verifies the Jacobian factorization, degree bookkeeping, minor
//! flatness and stratification invariants behind the C^r composition
//! theorem, solves f = F∘P and the Cramer gradient system exactly, and
//! reproduces the differentiability-loss exponents numerically.

// index loops dominate the dense linear algebra here and read clearer
// than iterator chains over flat buffers
#![allow(clippy::needless_range_loop)]

pub mod chevalley;
pub mod coxeter;
pub mod polyalg;
pub mod rng;
pub mod selftest;
pub mod strata;
pub mod whitney;

pub use chevalley::{basic_invariants, ChevalleyError, ChevalleyMap, RewriteResult};
pub use coxeter::{build_group, CoxeterError, CoxeterTypeSpec, Family, ReflectionGroup};
pub use polyalg::{
    FieldElem, FieldTag, Flat, Matrix, Monomial, PolyError, SparsePoly, VanishingOrder,
};
pub use strata::{intersection_lattice, LatticeReport, StrataError, StratumData};
pub use whitney::{counterexample_probe, JetField, ProbeConfig, ProbeReport, WhitneyError};
