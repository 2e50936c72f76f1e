//! Reachability and absorbing-class analysis on the torus jump graph.
//!
//! Sites are flat torus indices (first coordinate fastest); edges are jumps
//! of positive probability. A *sink* is a closed communicating class that
//! is a proper subset of the torus: trajectories can fall in but never
//! leave. Transitivity asks whether every site of the subgroup generated by
//! a given set of directions is reachable from the origin.

use crate::env::Environment;
use crate::error::Error;
use crate::lattice::{self, Point};
use crate::Result;
use serde::Serialize;
use std::collections::VecDeque;

/// Outcome of the reachability / absorbing-class analysis.
#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub generators: Vec<Point>,
    pub horizon: usize,
    /// Torus extents, for decoding the flat site indices below.
    pub extents: Vec<usize>,
    /// Sites reachable from the origin within `horizon` jumps (sorted).
    pub reachable: Vec<usize>,
    /// Strongly connected components of the positive-probability graph,
    /// each sorted, ordered by smallest member.
    pub sccs: Vec<Vec<usize>>,
    /// Closed communicating classes that are proper subsets of the torus.
    pub sinks: Vec<Vec<usize>>,
    /// True when every site generated by `generators` is reachable.
    pub transitive: bool,
}

/// Positive-probability adjacency of the torus chain.
fn jump_graph(env: &Environment) -> Result<Vec<Vec<usize>>> {
    let extents = env.extents().ok_or(Error::NotPeriodic)?.to_vec();
    let domain = lattice::box_sites(&extents);
    let mut adj = vec![Vec::new(); domain.len()];
    for (i, site) in domain.iter().enumerate() {
        let jd = env.dist_at(site)?;
        for disp in jd.displacements() {
            let j = crate::env::torus_index(&extents, &lattice::add(site, disp));
            if !adj[i].contains(&j) {
                adj[i].push(j);
            }
        }
        adj[i].sort_unstable();
    }
    Ok(adj)
}

/// Breadth-first reachability from `start`, capped at `max_depth` levels.
fn reachable_within(adj: &[Vec<usize>], start: usize, max_depth: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back((start, 0usize));
    while let Some((v, depth)) = queue.pop_front() {
        if depth == max_depth {
            continue;
        }
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back((w, depth + 1));
            }
        }
    }
    (0..adj.len()).filter(|&v| seen[v]).collect()
}

struct TarjanState {
    index: usize,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], st: &mut TarjanState) {
    st.idx[v] = Some(st.index);
    st.low[v] = st.index;
    st.index += 1;
    st.stack.push(v);
    st.on_stack[v] = true;

    for &w in &adj[v] {
        if st.idx[w].is_none() {
            strongconnect(w, adj, st);
            st.low[v] = st.low[v].min(st.low[w]);
        } else if st.on_stack[w] {
            st.low[v] = st.low[v].min(st.idx[w].unwrap());
        }
    }

    if st.low[v] == st.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = st.stack.pop().expect("stack underflow");
            st.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        comp.sort_unstable();
        st.comps.push(comp);
    }
}

/// Tarjan SCC decomposition, components ordered by smallest member.
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut st = TarjanState {
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            strongconnect(v, adj, &mut st);
        }
    }
    st.comps.sort_by_key(|c| c[0]);
    st.comps
}

/// Sites of the subgroup generated by `generators`, reduced mod the torus.
fn generated_subgroup(extents: &[usize], generators: &[Point]) -> Vec<usize> {
    let n: usize = extents.iter().product();
    let mut seen = vec![false; n];
    let origin = vec![0i64; extents.len()];
    seen[crate::env::torus_index(extents, &origin)] = true;
    let mut queue: VecDeque<Point> = VecDeque::new();
    queue.push_back(origin);
    while let Some(site) = queue.pop_front() {
        for g in generators {
            for sign in [1i64, -1] {
                let step: Point = g.iter().map(|&c| sign * c).collect();
                let next = lattice::add(&site, &step);
                let idx = crate::env::torus_index(extents, &next);
                if !seen[idx] {
                    seen[idx] = true;
                    queue.push_back(crate::env::torus_site(extents, idx));
                }
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

/// Analyzes reachability, communicating classes, and sinks of a periodic
/// environment's torus chain.
///
/// `generators` defaults to the standard basis when empty.
pub fn transitivity_report(
    env: &Environment,
    generators: &[Point],
    horizon: usize,
) -> Result<TransitivityReport> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be >= 1".into()));
    }
    let extents = env.extents().ok_or(Error::NotPeriodic)?.to_vec();
    let generators: Vec<Point> = if generators.is_empty() {
        (0..env.dim())
            .map(|axis| {
                let mut e = vec![0i64; env.dim()];
                e[axis] = 1;
                e
            })
            .collect()
    } else {
        for g in generators {
            if g.len() != env.dim() {
                return Err(Error::DimensionMismatch {
                    expected: env.dim(),
                    got: g.len(),
                });
            }
        }
        generators.to_vec()
    };

    let adj = jump_graph(env)?;
    let n_sites = adj.len();
    let reachable = reachable_within(&adj, 0, horizon);
    let sccs = strongly_connected_components(&adj);

    let mut comp_of = vec![usize::MAX; n_sites];
    for (cid, comp) in sccs.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    let sinks: Vec<Vec<usize>> = sccs
        .iter()
        .filter(|comp| {
            comp.len() < n_sites
                && comp
                    .iter()
                    .all(|&v| adj[v].iter().all(|&w| comp_of[w] == comp_of[v]))
        })
        .cloned()
        .collect();

    let targets = generated_subgroup(&extents, &generators);
    let transitive = targets.iter().all(|t| reachable.binary_search(t).is_ok());

    Ok(TransitivityReport {
        generators,
        horizon,
        extents,
        reachable,
        sccs,
        sinks,
        transitive,
    })
}
