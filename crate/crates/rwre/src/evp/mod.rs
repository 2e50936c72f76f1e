//! Exact oracles for periodic environments.
//!
//! Re-centering the walk at the walker turns a periodic environment into a
//! finite Markov chain on the torus: the state is "which translate of the
//! environment the walker sees", i.e. the walker's position mod the
//! periods. On that chain everything the simulators estimate — stationary
//! measure, velocity, diffusion matrix, entropy rate — is plain linear
//! algebra, which is what makes desk-scale verification possible.

mod graph;

pub use graph::{transitivity_report, TransitivityReport};

use crate::env::{self, DriftVector, Environment, JumpDistribution};
use crate::error::Error;
use crate::lattice;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Residual tolerance for stationary solves.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Step tolerance for the power-iteration fallback.
const POWER_STEP_TOL: f64 = 1e-15;
/// Iteration budget for the power-iteration fallback.
const POWER_MAX_ITERS: usize = 1_000_000;

/// The re-centered chain of a periodic environment, reduced to the torus.
///
/// `matrix[x][x']` sums the probabilities of all jumps from site `x` that
/// land on torus site `x'`.
#[derive(Debug, Clone)]
pub struct EvpChain {
    extents: Vec<usize>,
    dists: Vec<JumpDistribution>,
    matrix: DMatrix<f64>,
}

impl EvpChain {
    pub fn n_sites(&self) -> usize {
        self.dists.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    /// Row-stochastic transition matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Jump law at a flat torus index.
    pub fn dist(&self, site: usize) -> &JumpDistribution {
        &self.dists[site]
    }

    /// Positive-probability adjacency per site.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.n_sites();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if self.matrix[(i, j)] > 0.0 {
                    adj[i].push(j);
                }
            }
        }
        adj
    }
}

/// Builds the torus chain of a periodic environment.
pub fn build_evp_chain(env: &Environment) -> Result<EvpChain> {
    let extents = env.extents().ok_or(Error::NotPeriodic)?.to_vec();
    let domain = lattice::box_sites(&extents);
    let n = domain.len();
    let mut matrix = DMatrix::zeros(n, n);
    let mut dists = Vec::with_capacity(n);
    for (i, site) in domain.iter().enumerate() {
        let jd = env.dist_at(site)?;
        for (disp, &p) in jd.displacements().iter().zip(jd.probs()) {
            let j = env::torus_index(&extents, &lattice::add(site, disp));
            matrix[(i, j)] += p;
        }
        dists.push(jd.clone());
    }
    Ok(EvpChain {
        extents,
        dists,
        matrix,
    })
}

/// A probability vector over torus sites with `pi M = pi`.
#[derive(Debug, Clone, Serialize)]
pub struct StationaryMeasure {
    pub weights: Vec<f64>,
    /// True when the chain restricted to the sites reachable from the
    /// origin is not a single communicating class; the measure is then the
    /// long-run occupation limit started at the origin, supported on the
    /// closed classes it can fall into.
    pub reducible: bool,
    /// Final `max_y |(pi M)_y - pi_y|`.
    pub residual: f64,
}

fn stationarity_residual(matrix: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let n = weights.len();
    let mut worst = 0.0f64;
    for y in 0..n {
        let mut incoming = 0.0;
        for x in 0..n {
            incoming += weights[x] * matrix[(x, y)];
        }
        worst = worst.max((incoming - weights[y]).abs());
    }
    worst
}

/// Power iteration on the lazy kernel `(I + M)/2` started from the origin.
///
/// The lazy kernel shares stationary measures with `M` but is aperiodic on
/// every closed class, so the iteration always settles; started at the
/// origin it converges to the absorption-weighted stationary measure.
fn power_iteration_stationary(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    let mut pi = vec![0.0f64; n];
    pi[0] = 1.0;
    let mut next = vec![0.0f64; n];
    for _ in 0..POWER_MAX_ITERS {
        for y in 0..n {
            let mut acc = 0.0;
            for x in 0..n {
                acc += pi[x] * matrix[(x, y)];
            }
            next[y] = 0.5 * pi[y] + 0.5 * acc;
        }
        let diff = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if diff < POWER_STEP_TOL {
            return Ok(pi);
        }
    }
    let residual = stationarity_residual(matrix, &pi);
    if residual <= STATIONARY_TOL {
        Ok(pi)
    } else {
        Err(Error::NumericalFailure(format!(
            "power iteration exhausted its budget at residual {residual:e}"
        )))
    }
}

/// Solves `pi M = pi, Σ pi = 1`.
///
/// Irreducible chains (restricted to the class reachable from the origin)
/// go through a direct linear solve on `(M^T - I)` with a normalization row;
/// reducible chains fall back to lazy power iteration from the origin and
/// are flagged. The returned measure always satisfies the residual bound.
pub fn stationary_distribution(chain: &EvpChain) -> Result<StationaryMeasure> {
    let n = chain.n_sites();
    let adj = chain.adjacency();

    // restrict to the forward-closed set reachable from the origin
    let mut reachable = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    reachable[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !reachable[w] {
                reachable[w] = true;
                queue.push_back(w);
            }
        }
    }
    let r_sites: Vec<usize> = (0..n).filter(|&v| reachable[v]).collect();

    let sccs_on_r = {
        let index_of: std::collections::HashMap<usize, usize> =
            r_sites.iter().enumerate().map(|(ri, &v)| (v, ri)).collect();
        let sub_adj: Vec<Vec<usize>> = r_sites
            .iter()
            .map(|&v| adj[v].iter().map(|w| index_of[w]).collect())
            .collect();
        graph::strongly_connected_components(&sub_adj)
    };
    let reducible = sccs_on_r.len() > 1;

    let weights = if reducible {
        power_iteration_stationary(&chain.matrix)?
    } else {
        match direct_solve(&chain.matrix, &r_sites) {
            Some(w) if stationarity_residual(&chain.matrix, &w) <= STATIONARY_TOL => w,
            _ => power_iteration_stationary(&chain.matrix)?,
        }
    };

    let residual = stationarity_residual(&chain.matrix, &weights);
    if residual > STATIONARY_TOL {
        return Err(Error::NumericalFailure(format!(
            "stationary solve residual {residual:e} exceeds {STATIONARY_TOL:e}"
        )));
    }
    Ok(StationaryMeasure {
        weights,
        reducible,
        residual,
    })
}

fn direct_solve(matrix: &DMatrix<f64>, r_sites: &[usize]) -> Option<Vec<f64>> {
    let k = r_sites.len();
    // A = M_R^T - I with the last row replaced by the normalization Σ pi = 1
    let mut a = DMatrix::zeros(k, k);
    for (ri, &i) in r_sites.iter().enumerate() {
        for (rj, &j) in r_sites.iter().enumerate() {
            a[(rj, ri)] = matrix[(i, j)] - if ri == rj { 1.0 } else { 0.0 };
        }
    }
    for c in 0..k {
        a[(k - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(k);
    b[k - 1] = 1.0;
    let solution = a.lu().solve(&b)?;
    if solution.iter().any(|&w| w < -1e-9) {
        return None;
    }
    let mut weights = vec![0.0f64; matrix.nrows()];
    let total: f64 = solution.iter().sum();
    for (ri, &i) in r_sites.iter().enumerate() {
        weights[i] = solution[ri].max(0.0) / total;
    }
    Some(weights)
}

/// Residual of the steady-state balance identity, evaluated through the
/// displacement enumeration rather than the transition matrix.
///
/// For every singleton target set `B = {y}` this sums, over sites `x` and
/// support displacements `d` with `x + d = y` on the torus, the mass
/// `pi(x) q_d(x)`, and returns the worst `|pi(y) - incoming(y)|`. It is an
/// independent code path from [`stationary_distribution`], which is the
/// point: the solver's output must satisfy the summation identity.
pub fn verify_steady_state_identity(chain: &EvpChain, pi: &StationaryMeasure) -> f64 {
    let n = chain.n_sites();
    let mut incoming = vec![0.0f64; n];
    for x in 0..n {
        let site = env::torus_site(&chain.extents, x);
        let jd = &chain.dists[x];
        for (disp, &q) in jd.displacements().iter().zip(jd.probs()) {
            let y = env::torus_index(&chain.extents, &lattice::add(&site, disp));
            incoming[y] += pi.weights[x] * q;
        }
    }
    incoming
        .iter()
        .zip(&pi.weights)
        .map(|(inc, w)| (inc - w).abs())
        .fold(0.0f64, f64::max)
}

/// Asymptotic velocity `Σ_x pi(x) * local_drift(x)`.
pub fn exact_velocity(env: &Environment, pi: &StationaryMeasure) -> Result<DriftVector> {
    let extents = env.extents().ok_or(Error::NotPeriodic)?;
    let domain = lattice::box_sites(extents);
    let mut components = vec![0.0f64; env.dim()];
    for (i, site) in domain.iter().enumerate() {
        let drift = env.local_drift(site)?;
        for (axis, c) in drift.components.iter().enumerate() {
            components[axis] += pi.weights[i] * c;
        }
    }
    Ok(DriftVector { components })
}

/// Exact diffusion matrix `Σ_x pi(x) Σ_d q_d(x) d dᵀ` of a doubly
/// stochastic, zero-drift periodic environment.
///
/// Both preconditions are enforced; under them the uniform measure is
/// stationary and the rescaled walk's limit covariance is this matrix.
pub fn exact_diffusion_matrix(env: &Environment, pi: &StationaryMeasure) -> Result<DMatrix<f64>> {
    let extents = env.extents().ok_or(Error::NotPeriodic)?;
    let ds = env::check_doubly_stochastic(env, 1)?;
    if !ds.ok {
        return Err(Error::ContractViolation(
            "diffusion matrix requires a doubly stochastic environment".into(),
        ));
    }
    let zd = env::check_zero_drift(env, 1);
    if !zd.ok {
        return Err(Error::ContractViolation(format!(
            "diffusion matrix requires zero local drift; max drift norm {}",
            zd.max_drift_norm
        )));
    }
    let d = env.dim();
    let domain = lattice::box_sites(extents);
    let mut c = DMatrix::zeros(d, d);
    for (i, site) in domain.iter().enumerate() {
        let jd = env.dist_at(site)?;
        for (disp, &q) in jd.displacements().iter().zip(jd.probs()) {
            for a in 0..d {
                for b in 0..d {
                    c[(a, b)] += pi.weights[i] * q * (disp[a] as f64) * (disp[b] as f64);
                }
            }
        }
    }
    Ok(c)
}

/// Exact entropy rate `Σ_x pi(x) H(x)` — the long-run decay rate of
/// cylinder measures on this environment.
pub fn exact_entropy_rate(env: &Environment, pi: &StationaryMeasure) -> Result<f64> {
    let extents = env.extents().ok_or(Error::NotPeriodic)?;
    let domain = lattice::box_sites(extents);
    let mut rate = 0.0;
    for (i, site) in domain.iter().enumerate() {
        rate += pi.weights[i] * env.dist_at(site)?.entropy();
    }
    Ok(rate)
}

/// Density of the stationary measure against the uniform measure, per site.
///
/// All densities are strictly positive exactly when the chain visits every
/// site in steady state; zeros flag sites outside the support (sinks steal
/// all the mass).
pub fn radon_nikodym(pi: &StationaryMeasure) -> Vec<f64> {
    let n = pi.weights.len() as f64;
    pi.weights.iter().map(|w| w * n).collect()
}
