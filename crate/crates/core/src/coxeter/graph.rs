//! Coxeter graphs of reflection subgroups and their classification into the
//! supported finite types.
//!
//! Simple reflections are found as the walls of the chamber of a generic
//! point: a mirror H_i bounds the chamber of x₀ iff no other mirror of the
//! subgroup separates x₀ from its reflection through H_i.

use std::collections::{BTreeMap, BTreeSet};

use crate::polyalg::{FieldElem, FieldTag, Matrix};
use crate::rng::SplitMix64;

use super::{CoxeterError, CoxeterTypeSpec, Family, ReflectionGroup, NUMERIC_TOL};

/// Graph on a set of simple reflections; edges carry the order m(s,t) ≥ 3
/// of the product of the two reflections (order 2 means no edge).
#[derive(Debug, Clone)]
pub struct CoxeterGraph {
    /// Reflection ids of the simple reflections (nodes).
    pub nodes: Vec<usize>,
    /// Edge labels keyed by node positions (i < j) within `nodes`.
    pub edges: BTreeMap<(usize, usize), u32>,
    /// Saturated reflection ids of the generated subgroup.
    pub saturated: Vec<usize>,
}

fn dot(a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    let mut acc = FieldElem::zero(FieldTag::Rational);
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

fn form_sign(form: &[FieldElem], point: &[FieldElem], exact: bool) -> i8 {
    let v = dot(form, point);
    if exact {
        v.sign()
    } else {
        let x = v.to_f64();
        if x.abs() <= NUMERIC_TOL {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// A deterministic point off every mirror in `subset`.
fn generic_point(group: &ReflectionGroup, subset: &[usize]) -> Vec<FieldElem> {
    let n = group.dim();
    let exact = group.field().is_exact();
    let mut rng = SplitMix64::new(0x9a7c_u64);
    for _ in 0..200 {
        let candidate: Vec<FieldElem> = (0..n)
            .map(|_| {
                let v = rng.nonzero_int(97);
                if exact {
                    FieldElem::from_ratio(v, 17)
                } else {
                    FieldElem::Numeric(v as f64 / 17.0)
                }
            })
            .collect();
        let clear = subset.iter().all(|&i| {
            let s = form_sign(&group.reflections()[i].lambda, &candidate, exact);
            s != 0
                && (exact
                    || dot(&group.reflections()[i].lambda, &candidate)
                        .to_f64()
                        .abs()
                        > 1e-6)
        });
        if clear {
            return candidate;
        }
    }
    panic!("no generic point found off {} mirrors", subset.len());
}

/// Walls of the chamber containing a generic point, among the mirrors of
/// `subset`. H_i is a wall iff no other mirror separates x₀ from σ_i(x₀).
pub(super) fn chamber_walls(group: &ReflectionGroup, subset: &[usize]) -> Vec<usize> {
    if subset.len() <= 1 {
        return subset.to_vec();
    }
    let exact = group.field().is_exact();
    let x0 = generic_point(group, subset);
    let signs: BTreeMap<usize, i8> = subset
        .iter()
        .map(|&j| (j, form_sign(&group.reflections()[j].lambda, &x0, exact)))
        .collect();
    let mut walls = Vec::new();
    for &i in subset {
        let y = group.reflections()[i].matrix.apply(&x0);
        let is_wall = subset
            .iter()
            .all(|&j| j == i || form_sign(&group.reflections()[j].lambda, &y, exact) == signs[&j]);
        if is_wall {
            walls.push(i);
        }
    }
    walls
}

/// Order of the product of two reflections, by iterating until the identity.
fn product_order(group: &ReflectionGroup, a: usize, b: usize) -> Result<u32, CoxeterError> {
    let tol = if group.field().is_exact() {
        0.0
    } else {
        NUMERIC_TOL
    };
    let p = group.reflections()[a]
        .matrix
        .mul(&group.reflections()[b].matrix);
    let mut acc = p.clone();
    for m in 1..=1000 {
        if acc.is_identity(tol) {
            return Ok(m);
        }
        acc = acc.mul(&p);
    }
    Err(CoxeterError::NotFiniteType(
        "product of reflections has order > 1000".into(),
    ))
}

/// Saturate a reflection subset: close under multiplication and keep every
/// element of the closure that is itself a reflection of the group.
fn saturate(group: &ReflectionGroup, subset: &[usize]) -> Result<Vec<usize>, CoxeterError> {
    let ids: BTreeSet<usize> = subset.iter().copied().collect();
    for &i in &ids {
        assert!(i < group.reflections().len(), "bad reflection id {i}");
    }
    let gens: Vec<Matrix> = ids
        .iter()
        .map(|&i| group.reflections()[i].matrix.clone())
        .collect();
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    let exact = group.field().is_exact();
    let cap = group.order() as usize;
    let identity = Matrix::identity(group.dim(), group.field());
    let mut elements: Vec<Matrix> = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in &gens {
            let next = current.mul(g);
            let dup = elements.iter().any(|m| {
                if exact {
                    m.cmp_total(&next) == std::cmp::Ordering::Equal
                } else {
                    m.approx_eq(&next, NUMERIC_TOL)
                }
            });
            if !dup {
                elements.push(next);
                if elements.len() > cap {
                    return Err(CoxeterError::GroupTooLarge {
                        order: elements.len() as u64,
                        cap,
                    });
                }
            }
        }
    }
    let mut saturated = Vec::new();
    for (id, r) in group.reflections().iter().enumerate() {
        let member = elements.iter().any(|m| {
            if exact {
                m.cmp_total(&r.matrix) == std::cmp::Ordering::Equal
            } else {
                m.approx_eq(&r.matrix, NUMERIC_TOL)
            }
        });
        if member {
            saturated.push(id);
        }
    }
    Ok(saturated)
}

pub(super) fn subgroup_graph(
    group: &ReflectionGroup,
    subset: &[usize],
) -> Result<CoxeterGraph, CoxeterError> {
    let saturated = saturate(group, subset)?;
    let nodes = chamber_walls(group, &saturated);
    let mut edges = BTreeMap::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let m = product_order(group, nodes[i], nodes[j])?;
            if m >= 3 {
                edges.insert((i, j), m);
            }
        }
    }
    Ok(CoxeterGraph {
        nodes,
        edges,
        saturated,
    })
}

/// Classify each connected component of the graph as a finite type.
/// Coincidences are reported canonically (I₂(3) as A₂, I₂(4) as B₂).
pub fn classify(graph: &CoxeterGraph) -> Result<Vec<CoxeterTypeSpec>, CoxeterError> {
    let n = graph.nodes.len();
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for (&(i, j), &m) in &graph.edges {
        adj[i].push((j, m));
        adj[j].push((i, m));
    }
    // connected components
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = count;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let mut out = Vec::new();
    for c in 0..count {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        out.push(classify_component(&members, &adj)?);
    }
    out.sort();
    Ok(out)
}

fn classify_component(
    members: &[usize],
    adj: &[Vec<(usize, u32)>],
) -> Result<CoxeterTypeSpec, CoxeterError> {
    let m = members.len();
    if m == 1 {
        return CoxeterTypeSpec::new(Family::A, 1);
    }
    let edge_count: usize = members.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edge_count != m - 1 {
        return Err(CoxeterError::NotFiniteType(format!(
            "component with {m} nodes and {edge_count} edges is not a tree"
        )));
    }
    let max_deg = members.iter().map(|&v| adj[v].len()).max().unwrap();
    if max_deg >= 3 {
        return classify_fork(members, adj);
    }
    // path: walk from an endpoint
    let start = *members
        .iter()
        .find(|&&v| adj[v].len() == 1)
        .expect("path has endpoints");
    let mut labels = Vec::new();
    let mut prev = usize::MAX;
    let mut at = start;
    loop {
        let next = adj[at].iter().find(|&&(w, _)| w != prev);
        match next {
            None => break,
            Some(&(w, label)) => {
                labels.push(label);
                prev = at;
                at = w;
            }
        }
    }
    debug_assert_eq!(labels.len(), m - 1);
    let big: Vec<u32> = labels.iter().copied().filter(|&l| l > 3).collect();
    if big.is_empty() {
        return CoxeterTypeSpec::new(Family::A, m);
    }
    if m == 2 {
        let l = labels[0];
        return Ok(match l {
            3 => CoxeterTypeSpec::new(Family::A, 2)?,
            4 => CoxeterTypeSpec::new(Family::B, 2)?,
            _ => CoxeterTypeSpec::dihedral(l)?,
        });
    }
    if big.len() == 1 {
        let at_end = labels[0] > 3 || labels[m - 2] > 3;
        if at_end && big[0] == 4 {
            return CoxeterTypeSpec::new(Family::B, m);
        }
        if at_end && big[0] == 5 && m == 3 {
            return CoxeterTypeSpec::new(Family::H3, 3);
        }
    }
    Err(CoxeterError::NotFiniteType(format!(
        "path with labels {labels:?} is outside the supported families"
    )))
}

fn classify_fork(
    members: &[usize],
    adj: &[Vec<(usize, u32)>],
) -> Result<CoxeterTypeSpec, CoxeterError> {
    let centers: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&v| adj[v].len() >= 3)
        .collect();
    let all_simple = members.iter().all(|&v| adj[v].iter().all(|&(_, l)| l == 3));
    if centers.len() != 1 || adj[centers[0]].len() != 3 || !all_simple {
        return Err(CoxeterError::NotFiniteType(
            "branched graph outside the supported families".into(),
        ));
    }
    let center = centers[0];
    let mut branch_lengths = Vec::new();
    for &(first, _) in &adj[center] {
        let mut len = 1;
        let mut prev = center;
        let mut at = first;
        while let Some(&(w, _)) = adj[at].iter().find(|&&(w, _)| w != prev) {
            len += 1;
            prev = at;
            at = w;
        }
        branch_lengths.push(len);
    }
    branch_lengths.sort_unstable();
    if branch_lengths[0] == 1 && branch_lengths[1] == 1 {
        let rank = branch_lengths[2] + 3;
        debug_assert_eq!(rank, members.len());
        return CoxeterTypeSpec::new(Family::D, rank);
    }
    Err(CoxeterError::NotFiniteType(
        "branched graph outside the supported families".into(),
    ))
}
