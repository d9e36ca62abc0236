//! Finite reflection groups A_n, B_n, D_n, I₂(k), H₃ as explicit hyperplane
//! arrangements and matrix groups.
//!
//! Groups are immutable after construction; element enumeration is cached
//! behind a `OnceLock`, so all operations can be shared across threads.

mod build;
mod graph;

pub use graph::{classify, CoxeterGraph};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyalg::json::CoefJson;
use crate::polyalg::{FieldElem, FieldTag, Matrix, SparsePoly};

/// Kept small on purpose: Reynolds averaging costs |W| · terms.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000;

/// Numeric backend tolerance for dedup, closure and identity tests.
pub const NUMERIC_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CoxeterError {
    #[error("unsupported rank {rank} for family {family:?}")]
    UnsupportedRank { family: Family, rank: usize },
    #[error("no exact field model for {0}; use the numeric backend")]
    UnsupportedFieldExact(String),
    #[error("group order {order} exceeds the element cap {cap}")]
    GroupTooLarge { order: u64, cap: usize },
    #[error("not a finite Coxeter type: {0}")]
    NotFiniteType(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    D,
    I2,
    H3,
}

/// A finite Coxeter type from the supported families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoxeterTypeSpec {
    pub family: Family,
    pub rank: usize,
    /// Bond order k, only meaningful for I₂(k).
    pub bond: u32,
}

impl CoxeterTypeSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self, CoxeterError> {
        let spec = CoxeterTypeSpec {
            family,
            rank,
            bond: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dihedral(k: u32) -> Result<Self, CoxeterError> {
        let spec = CoxeterTypeSpec {
            family: Family::I2,
            rank: 2,
            bond: k,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CoxeterError> {
        let bad = || CoxeterError::UnsupportedRank {
            family: self.family,
            rank: self.rank,
        };
        match self.family {
            Family::A | Family::B => {
                if self.rank < 1 {
                    return Err(bad());
                }
            }
            Family::D => {
                if self.rank < 3 {
                    return Err(bad());
                }
            }
            Family::I2 => {
                if self.rank != 2 || self.bond < 3 {
                    return Err(bad());
                }
            }
            Family::H3 => {
                if self.rank != 3 {
                    return Err(bad());
                }
            }
        }
        Ok(())
    }

    /// Degrees of the basic invariants, in increasing order.
    pub fn degrees(&self) -> Vec<u32> {
        match self.family {
            Family::A => (2..=self.rank as u32 + 1).collect(),
            Family::B => (1..=self.rank as u32).map(|i| 2 * i).collect(),
            Family::D => {
                let mut d: Vec<u32> = (1..self.rank as u32).map(|i| 2 * i).collect();
                d.push(self.rank as u32);
                d.sort_unstable();
                d
            }
            Family::I2 => vec![2, self.bond],
            Family::H3 => vec![2, 6, 10],
        }
    }

    pub fn order(&self) -> u64 {
        self.degrees().iter().map(|&k| k as u64).product()
    }

    pub fn reflection_count(&self) -> u32 {
        self.degrees().iter().map(|&k| k - 1).sum()
    }

    pub fn coxeter_number(&self) -> u32 {
        *self.degrees().last().expect("nonempty degrees")
    }

    /// Resolve coincidences between families: I₂(3) = A₂, I₂(4) = B₂, D₃ = A₃.
    pub fn canonical(&self) -> CoxeterTypeSpec {
        match (self.family, self.rank, self.bond) {
            (Family::I2, _, 3) => CoxeterTypeSpec {
                family: Family::A,
                rank: 2,
                bond: 0,
            },
            (Family::I2, _, 4) => CoxeterTypeSpec {
                family: Family::B,
                rank: 2,
                bond: 0,
            },
            (Family::D, 3, _) => CoxeterTypeSpec {
                family: Family::A,
                rank: 3,
                bond: 0,
            },
            _ => *self,
        }
    }
}

impl fmt::Display for CoxeterTypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::A => write!(f, "A{}", self.rank),
            Family::B => write!(f, "B{}", self.rank),
            Family::D => write!(f, "D{}", self.rank),
            Family::I2 => write!(f, "I2({})", self.bond),
            Family::H3 => write!(f, "H3"),
        }
    }
}

impl FromStr for CoxeterTypeSpec {
    type Err = CoxeterError;

    /// Accepts "A3", "B4", "D4", "I2(7)", "H3", case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        let err = || CoxeterError::Parse(format!("unrecognized group spec {s:?}"));
        if t == "H3" {
            return CoxeterTypeSpec::new(Family::H3, 3);
        }
        if let Some(body) = t.strip_prefix("I2") {
            let inner = body
                .strip_prefix('(')
                .and_then(|b| b.strip_suffix(')'))
                .ok_or_else(err)?;
            let k: u32 = inner.trim().parse().map_err(|_| err())?;
            return CoxeterTypeSpec::dihedral(k);
        }
        let (fam, rest) = t.split_at(1);
        let rank: usize = rest.parse().map_err(|_| err())?;
        match fam {
            "A" => CoxeterTypeSpec::new(Family::A, rank),
            "B" => CoxeterTypeSpec::new(Family::B, rank),
            "D" => CoxeterTypeSpec::new(Family::D, rank),
            _ => Err(err()),
        }
    }
}

/// One reflection: its hyperplane form (normalized so the first nonzero
/// coefficient is 1) and its matrix in the group's coordinates.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub lambda: Vec<FieldElem>,
    pub matrix: Matrix,
    pub hyperplane_id: usize,
}

impl Reflection {
    pub fn form_poly(&self) -> SparsePoly {
        SparsePoly::linear_form(&self.lambda)
    }
}

/// Normalize a linear form so its first nonzero coefficient is 1, keying
/// hyperplanes canonically regardless of root scaling.
pub fn normalize_form(form: &[FieldElem]) -> Vec<FieldElem> {
    let lead = form.iter().find(|c| !c.is_zero());
    match lead {
        None => form.to_vec(),
        Some(c) => {
            let inv = c.inverse();
            form.iter().map(|x| x.mul(&inv)).collect()
        }
    }
}

pub struct ReflectionGroup {
    spec: CoxeterTypeSpec,
    field: FieldTag,
    dim: usize,
    reflections: Vec<Reflection>,
    /// Inner-product matrix of the model; `None` means the standard one.
    gram: Option<Matrix>,
    /// Auxiliary linear forms the invariant constructions are built from:
    /// ambient coordinates for the essential A_n model, icosahedral axis
    /// forms for H₃.
    model_forms: Option<Vec<Vec<FieldElem>>>,
    elements: OnceLock<Vec<Matrix>>,
    simple_ids: OnceLock<Vec<usize>>,
}

impl fmt::Debug for ReflectionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReflectionGroup")
            .field("spec", &self.spec.to_string())
            .field("field", &self.field)
            .field("reflections", &self.reflections.len())
            .finish()
    }
}

/// Build a group over its canonical field backend: exact wherever an exact
/// model exists, binary64 for I₂(k) with k ∉ {3, 4, 6}.
pub fn build_group(spec: CoxeterTypeSpec) -> Result<ReflectionGroup, CoxeterError> {
    build::build(spec, build::preferred_backend(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Numeric,
}

pub fn build_group_with_backend(
    spec: CoxeterTypeSpec,
    backend: Backend,
) -> Result<ReflectionGroup, CoxeterError> {
    build::build(spec, backend)
}

impl ReflectionGroup {
    pub(crate) fn from_parts(
        spec: CoxeterTypeSpec,
        field: FieldTag,
        dim: usize,
        reflections: Vec<Reflection>,
        gram: Option<Matrix>,
        model_forms: Option<Vec<Vec<FieldElem>>>,
    ) -> Self {
        ReflectionGroup {
            spec,
            field,
            dim,
            reflections,
            gram,
            model_forms,
            elements: OnceLock::new(),
            simple_ids: OnceLock::new(),
        }
    }

    /// Forms backing the invariant construction, when the model has them.
    pub fn model_forms(&self) -> Option<&[Vec<FieldElem>]> {
        self.model_forms.as_deref()
    }

    pub fn spec(&self) -> CoxeterTypeSpec {
        self.spec
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u64 {
        self.spec.order()
    }

    pub fn reflections(&self) -> &[Reflection] {
        &self.reflections
    }

    pub fn gram(&self) -> Matrix {
        self.gram
            .clone()
            .unwrap_or_else(|| Matrix::identity(self.dim, self.field))
    }

    fn tol(&self) -> f64 {
        if self.field.is_exact() {
            0.0
        } else {
            NUMERIC_TOL
        }
    }

    /// Closure of the reflections under multiplication. Deterministic BFS,
    /// identity first. Cached after the first call.
    pub fn enumerate_elements(&self) -> Result<&[Matrix], CoxeterError> {
        self.enumerate_elements_capped(DEFAULT_ELEMENT_CAP)
    }

    pub fn enumerate_elements_capped(&self, cap: usize) -> Result<&[Matrix], CoxeterError> {
        if self.order() > cap as u64 {
            return Err(CoxeterError::GroupTooLarge {
                order: self.order(),
                cap,
            });
        }
        Ok(self.elements.get_or_init(|| self.close_generators()))
    }

    fn close_generators(&self) -> Vec<Matrix> {
        let gens: Vec<&Matrix> = self.reflections.iter().map(|r| &r.matrix).collect();
        let identity = Matrix::identity(self.dim, self.field);
        let mut out: Vec<Matrix> = vec![identity.clone()];
        if self.field.is_exact() {
            let mut seen: BTreeSet<MatrixKey> = BTreeSet::new();
            seen.insert(MatrixKey(identity));
            let mut head = 0;
            while head < out.len() {
                let current = out[head].clone();
                head += 1;
                for g in &gens {
                    let next = current.mul(g);
                    if seen.insert(MatrixKey(next.clone())) {
                        out.push(next);
                    }
                }
            }
        } else {
            let mut head = 0;
            while head < out.len() {
                let current = out[head].clone();
                head += 1;
                for g in &gens {
                    let next = current.mul(g);
                    if !out.iter().any(|m| m.approx_eq(&next, NUMERIC_TOL)) {
                        out.push(next);
                    }
                }
            }
        }
        debug_assert_eq!(out.len() as u64, self.order());
        out
    }

    /// All w with w² = identity, the identity included.
    pub fn involutions(&self) -> Result<Vec<Matrix>, CoxeterError> {
        let tol = self.tol();
        Ok(self
            .enumerate_elements()?
            .iter()
            .filter(|w| w.mul(w).is_identity(tol))
            .cloned()
            .collect())
    }

    /// The orbit {w·x : w ∈ W}, deduplicated exactly (or within the numeric
    /// tolerance on the numeric backend).
    pub fn orbit(&self, x: &[FieldElem]) -> Result<Vec<Vec<FieldElem>>, CoxeterError> {
        assert_eq!(x.len(), self.dim);
        let elements = self.enumerate_elements()?;
        let mut out: Vec<Vec<FieldElem>> = Vec::new();
        if self.field.is_exact() && x.iter().all(|c| c.tag().is_exact()) {
            let mut seen: BTreeSet<VecKey> = BTreeSet::new();
            for w in elements {
                let y = w.apply(x);
                if seen.insert(VecKey(y.clone())) {
                    out.push(y);
                }
            }
        } else {
            for w in elements {
                let y = w.apply(x);
                let dup = out.iter().any(|z| {
                    z.iter()
                        .zip(&y)
                        .all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= NUMERIC_TOL)
                });
                if !dup {
                    out.push(y);
                }
            }
        }
        Ok(out)
    }

    /// Indices of the reflections bounding the chamber of a generic point;
    /// these generate the group and form the nodes of its Coxeter graph.
    pub fn simple_reflections(&self) -> &[usize] {
        self.simple_ids.get_or_init(|| {
            graph::chamber_walls(self, &(0..self.reflections.len()).collect::<Vec<_>>())
        })
    }

    /// f is W-invariant iff it is fixed by every simple reflection.
    pub fn is_invariant(&self, f: &SparsePoly) -> bool {
        let tol = if self.field.is_exact() && f.field().is_exact() {
            0.0
        } else {
            NUMERIC_TOL
        };
        self.simple_reflections().iter().all(|&i| {
            let rows = self.reflections[i].matrix.row_vecs();
            f.act_linear(&rows).approx_eq(f, tol)
        })
    }

    /// Coxeter graph of the reflection subgroup generated by `subset`
    /// (saturated first), together with the saturated reflection ids.
    pub fn coxeter_graph(&self, subset: &[usize]) -> Result<CoxeterGraph, CoxeterError> {
        graph::subgroup_graph(self, subset)
    }

    /// Serialize per the wire format: spec string plus normalized forms.
    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            spec: self.spec.to_string(),
            field: self.field.to_string(),
            reflections: self
                .reflections
                .iter()
                .map(|r| ReflectionJson {
                    lambda: r.lambda.iter().map(CoefJson::from_elem).collect(),
                })
                .collect(),
            gram: self.gram.as_ref().map(|g| {
                g.row_vecs()
                    .iter()
                    .map(|row| row.iter().map(CoefJson::from_elem).collect())
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionJson {
    pub lambda: Vec<CoefJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    pub spec: String,
    pub field: String,
    pub reflections: Vec<ReflectionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<CoefJson>>>,
}

struct MatrixKey(Matrix);

impl PartialEq for MatrixKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp_total(&other.0) == std::cmp::Ordering::Equal
    }
}
impl Eq for MatrixKey {}
impl PartialOrd for MatrixKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MatrixKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp_total(&other.0)
    }
}

struct VecKey(Vec<FieldElem>);

impl PartialEq for VecKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for VecKey {}
impl PartialOrd for VecKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let o = a.cmp_total(b);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}
