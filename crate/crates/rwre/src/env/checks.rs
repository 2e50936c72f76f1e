//! Executable validators for environment assumptions.
//!
//! Each check scans a finite set of sites: one fundamental domain for
//! periodic environments (where the check is exhaustive, hence exact), or
//! the centered window `[-r, r]^d` otherwise. Failures are reported, not
//! thrown.

use super::{Environment, AGGREGATE_TOL};
use crate::error::Error;
use crate::lattice::{self, Point};
use crate::Result;
use serde::Serialize;

fn scan_sites(env: &Environment, window_radius: i64) -> Vec<Point> {
    match env.fundamental_domain() {
        Some(domain) => domain,
        None => lattice::centered_window(env.dim(), window_radius),
    }
}

/// Result of the tail-decay check `p(y) <= K |y|^{-d-gamma}`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub ok: bool,
    /// Site and displacement with the largest `p / bound` ratio.
    pub worst_site: Point,
    pub worst_displacement: Point,
    pub worst_prob: f64,
    pub worst_bound: f64,
}

/// Checks the polynomial tail bound at every scanned site.
///
/// The zero displacement carries an infinite bound and never violates.
pub fn check_decay(env: &Environment, k: f64, gamma: f64, window_radius: i64) -> DecayReport {
    let d = env.dim() as f64;
    let mut worst_ratio = -1.0;
    let mut report = DecayReport {
        ok: true,
        worst_site: vec![0; env.dim()],
        worst_displacement: vec![0; env.dim()],
        worst_prob: 0.0,
        worst_bound: f64::INFINITY,
    };
    for site in scan_sites(env, window_radius) {
        let jd = env.dist_at(&site).expect("site from scan window");
        for (disp, &p) in jd.displacements().iter().zip(jd.probs()) {
            if lattice::is_zero(disp) {
                continue;
            }
            let bound = k * lattice::euclid_norm(disp).powf(-d - gamma);
            let ratio = p / bound;
            if ratio > worst_ratio {
                worst_ratio = ratio;
                report.worst_site = site.clone();
                report.worst_displacement = disp.clone();
                report.worst_prob = p;
                report.worst_bound = bound;
            }
        }
    }
    report.ok = worst_ratio <= 1.0;
    report
}

/// Result of the incoming-mass check `Σ_x p_{xy} = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct DoublyStochasticReport {
    pub ok: bool,
    /// Incoming probability mass per scanned target site.
    pub per_site_incoming: Vec<(Point, f64)>,
}

impl DoublyStochasticReport {
    /// Target sites whose incoming mass differs from 1.
    pub fn failing_sites(&self) -> Vec<&Point> {
        self.per_site_incoming
            .iter()
            .filter(|(_, mass)| (mass - 1.0).abs() > AGGREGATE_TOL)
            .map(|(site, _)| site)
            .collect()
    }
}

/// Sums incoming mass onto every target site.
///
/// Periodic environments are reduced to the torus, where the sum over one
/// fundamental domain is exhaustive and exact. Otherwise targets live in the
/// centered window and sources in the window inflated by the support radius,
/// which must fit: `window_radius >= support_radius`.
pub fn check_doubly_stochastic(
    env: &Environment,
    window_radius: i64,
) -> Result<DoublyStochasticReport> {
    let support = env.support_radius();
    if let Some(extents) = env.extents() {
        let domain = lattice::box_sites(extents);
        let mut incoming = vec![0.0f64; domain.len()];
        for site in &domain {
            let jd = env.dist_at(site).expect("domain site");
            for (disp, &p) in jd.displacements().iter().zip(jd.probs()) {
                let target = lattice::add(site, disp);
                incoming[super::torus_index(extents, &target)] += p;
            }
        }
        let per_site_incoming: Vec<(Point, f64)> = domain.into_iter().zip(incoming).collect();
        let ok = per_site_incoming
            .iter()
            .all(|(_, m)| (m - 1.0).abs() <= AGGREGATE_TOL);
        return Ok(DoublyStochasticReport {
            ok,
            per_site_incoming,
        });
    }

    if window_radius < support {
        return Err(Error::WindowTooSmall {
            radius: window_radius,
            support,
        });
    }
    let targets = lattice::centered_window(env.dim(), window_radius);
    let sources = lattice::centered_window(env.dim(), window_radius + support);
    let mut incoming: std::collections::HashMap<Point, f64> =
        targets.iter().map(|t| (t.clone(), 0.0)).collect();
    for source in &sources {
        let jd = env.dist_at(source).expect("source site");
        for (disp, &p) in jd.displacements().iter().zip(jd.probs()) {
            let target = lattice::add(source, disp);
            if let Some(mass) = incoming.get_mut(&target) {
                *mass += p;
            }
        }
    }
    let per_site_incoming: Vec<(Point, f64)> = targets
        .into_iter()
        .map(|t| {
            let m = incoming[&t];
            (t, m)
        })
        .collect();
    let ok = per_site_incoming
        .iter()
        .all(|(_, m)| (m - 1.0).abs() <= AGGREGATE_TOL);
    Ok(DoublyStochasticReport {
        ok,
        per_site_incoming,
    })
}

/// Result of the martingale (zero local drift) check.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroDriftReport {
    pub ok: bool,
    pub max_drift_norm: f64,
    pub worst_site: Point,
}

/// Zero-drift tolerance: drift sums are a handful of exact products.
const DRIFT_TOL: f64 = 1e-12;

pub fn check_zero_drift(env: &Environment, window_radius: i64) -> ZeroDriftReport {
    let mut max_norm = 0.0;
    let mut worst = vec![0; env.dim()];
    for site in scan_sites(env, window_radius) {
        let norm = env.dist_at(&site).expect("scan site").drift().norm();
        if norm > max_norm {
            max_norm = norm;
            worst = site;
        }
    }
    ZeroDriftReport {
        ok: max_norm <= DRIFT_TOL,
        max_drift_norm: max_norm,
        worst_site: worst,
    }
}

/// Result of the point-mass scan (deterministic sites).
#[derive(Debug, Clone, Serialize)]
pub struct NondeterminismReport {
    pub ok: bool,
    pub deterministic_sites: Vec<Point>,
}

pub fn check_nondeterministic(env: &Environment, window_radius: i64) -> NondeterminismReport {
    let deterministic_sites: Vec<Point> = scan_sites(env, window_radius)
        .into_iter()
        .filter(|site| env.dist_at(site).expect("scan site").is_deterministic())
        .collect();
    NondeterminismReport {
        ok: deterministic_sites.is_empty(),
        deterministic_sites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::tests::{jd, mirror_pair_env};
    use crate::env::{ColumnLabel, JumpDistribution};
    use approx::assert_abs_diff_eq;

    #[test]
    fn srw_passes_all_checks() {
        let env = Environment::simple_random_walk(1);
        assert!(check_decay(&env, 1.0, 1.0, 3).ok);
        assert!(check_doubly_stochastic(&env, 3).unwrap().ok);
        assert!(check_zero_drift(&env, 3).ok);
        assert!(check_nondeterministic(&env, 3).ok);
    }

    #[test]
    fn long_jump_violates_decay() {
        let env =
            Environment::homogeneous(jd(1, &[(&[3], 0.5), (&[-1], 0.5)])).unwrap();
        let report = check_decay(&env, 1.0, 1.0, 2);
        assert!(!report.ok);
        assert_eq!(report.worst_displacement, vec![3]);
        // 0.5 > 3^{-2}
        assert_abs_diff_eq!(report.worst_bound, 1.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn periodic_decay_ignores_window_size() {
        let env = mirror_pair_env();
        let a = check_decay(&env, 1.0, 1.0, 1);
        let b = check_decay(&env, 1.0, 1.0, 10);
        assert_eq!(a.ok, b.ok);
        assert_eq!(a.worst_site, b.worst_site);
    }

    #[test]
    fn column_pattern_aba_doubles_incoming_mass_at_b() {
        // Labels around the origin: column -1 = A, 0 = B, 1 = A. A B-site
        // receives 1/2 from each horizontal A-neighbor plus 1/2 from each
        // vertical B-neighbor.
        let env = (0..5000u64)
            .map(|s| Environment::column_ab(0.5, s).unwrap())
            .find(|e| {
                e.column_label(-1) == Some(ColumnLabel::A)
                    && e.column_label(0) == Some(ColumnLabel::B)
                    && e.column_label(1) == Some(ColumnLabel::A)
            })
            .expect("some seed produces the A,B,A pattern");
        let report = check_doubly_stochastic(&env, 2).unwrap();
        assert!(!report.ok);
        let origin_mass = report
            .per_site_incoming
            .iter()
            .find(|(site, _)| site == &vec![0, 0])
            .unwrap()
            .1;
        assert_abs_diff_eq!(origin_mass, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_pair_incoming_mass_matches_brute_force() {
        let env = mirror_pair_env();
        let report = check_doubly_stochastic(&env, 2).unwrap();
        // brute force: sum the two-site torus by hand
        let mut expected = [0.0f64; 2];
        for site in 0..2i64 {
            let d = env.dist_at(&[site]).unwrap();
            for (disp, &p) in d.displacements().iter().zip(d.probs()) {
                let target = (site + disp[0]).rem_euclid(2) as usize;
                expected[target] += p;
            }
        }
        for (site, mass) in &report.per_site_incoming {
            assert_abs_diff_eq!(*mass, expected[site[0] as usize], epsilon = 1e-15);
        }
        // both displacements from either site land on the other, so the
        // mirror pair is in fact doubly stochastic
        assert!(report.ok);
    }

    #[test]
    fn window_smaller_than_support_is_rejected() {
        let family = vec![(jd(1, &[(&[2], 0.5), (&[-2], 0.5)]), 1.0)];
        let env = Environment::seeded_iid(1, family, 1).unwrap();
        assert!(matches!(
            check_doubly_stochastic(&env, 1),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn biased_site_fails_zero_drift() {
        let env = Environment::homogeneous(jd(1, &[(&[1], 0.7), (&[-1], 0.3)])).unwrap();
        let report = check_zero_drift(&env, 2);
        assert!(!report.ok);
        assert_abs_diff_eq!(report.max_drift_norm, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn column_ab_has_zero_drift_everywhere() {
        let env = Environment::column_ab(0.5, 11).unwrap();
        assert!(check_zero_drift(&env, 4).ok);
        assert!(check_nondeterministic(&env, 4).ok);
    }

    #[test]
    fn point_mass_site_is_flagged() {
        let table = vec![
            JumpDistribution::new(1, vec![(vec![1], 1.0)]).unwrap(),
            jd(1, &[(&[1], 0.5), (&[-1], 0.5)]),
        ];
        let env = Environment::periodic(vec![2], table).unwrap();
        let report = check_nondeterministic(&env, 2);
        assert!(!report.ok);
        assert_eq!(report.deterministic_sites, vec![vec![0]]);
    }

    #[test]
    fn translation_invariant_single_site_torus_is_doubly_stochastic() {
        let env = Environment::homogeneous(jd(1, &[(&[2], 0.25), (&[-1], 0.75)])).unwrap();
        assert!(check_doubly_stochastic(&env, 3).unwrap().ok);
    }
}
