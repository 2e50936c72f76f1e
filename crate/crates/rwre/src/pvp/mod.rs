//! The walk as an interval dynamical system.
//!
//! Each site's jump law splits `[0,1)` into right-open branches, one per
//! support displacement in canonical order, with widths equal to the jump
//! probabilities. One step reads the branch containing the internal
//! coordinate `s` (that is the jump taken), rescales the branch affinely
//! back onto `[0,1)`, and re-centers the walker. Iterating from a uniform
//! `s` reproduces the walk's law exactly.
//!
//! A 64-bit float carries ~53 bits of `s`, and every step consumes about
//! `H` bits (the entropy of the site's law), so float iteration is faithful
//! only for short horizons. Three modes resolve this:
//!
//! * [`Mode::Faithful`] — iterate the float `s`; use for demos and short
//!   horizons (up to roughly `53 / H` steps).
//! * [`Mode::Refresh`] — draw a fresh uniform coordinate every step. After
//!   conditioning on the branch taken, the rescaled coordinate is again
//!   uniform and independent, so this has the same trajectory law for any
//!   horizon; it is the workhorse for statistics.
//! * [`Mode::ExactRational`] — track `s` as an exact rational; bit-exact at
//!   any horizon, used by the coding round-trip and cylinder oracles.

mod coding;

pub use coding::{
    cylinder_log_measure, decode_trajectory, encode_trajectory, DisplacementSequence, RatInterval,
};

use crate::env::{Environment, JumpDistribution};
use crate::error::Error;
use crate::lattice::{self, Point};
use crate::Result;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Largest `f64` strictly below 1, the top of the half-open unit interval.
const ONE_BELOW: f64 = f64::from_bits(0x3FEF_FFFF_FFFF_FFFF);

/// Iteration mode; see the module docs for the trade-offs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Faithful,
    #[default]
    Refresh,
    ExactRational,
}

/// The interval partition of one site's jump law.
///
/// Branch `i` is `[a_i, a_{i+1})` with width equal to the i-th canonical
/// jump probability; breakpoints are prefix sums. In exact mode the final
/// breakpoint is exactly 1.
#[derive(Debug, Clone)]
pub struct Partition {
    breakpoints: Vec<f64>,
    displacements: Vec<Point>,
    exact: Option<Vec<BigRational>>,
}

/// Builds the partition of `[0,1)` induced by a jump law.
pub fn build_partition(jd: &JumpDistribution) -> Partition {
    let mut breakpoints = Vec::with_capacity(jd.support_size() + 1);
    let mut acc = 0.0f64;
    breakpoints.push(0.0);
    for &q in jd.probs() {
        acc += q;
        breakpoints.push(acc);
    }
    let exact = jd.exact_probs().map(|qs| {
        let mut acc = BigRational::zero();
        let mut out = Vec::with_capacity(qs.len() + 1);
        out.push(BigRational::zero());
        for q in qs {
            acc += q;
            out.push(acc.clone());
        }
        out
    });
    Partition {
        breakpoints,
        displacements: jd.displacements().to_vec(),
        exact,
    }
}

impl Partition {
    /// Number of branches.
    pub fn len(&self) -> usize {
        self.displacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacements.is_empty()
    }

    /// Breakpoints `a_0 = 0 <= ... <= a_k ≈ 1`, one more than branches.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Exact breakpoints when the law has rational probabilities.
    pub fn exact_breakpoints(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn displacements(&self) -> &[Point] {
        &self.displacements
    }

    /// The branch containing `s`: 0-based index and its displacement.
    ///
    /// Branches are right-open, so a coordinate sitting exactly on a
    /// breakpoint belongs to the branch above it.
    pub fn locate(&self, s: f64) -> Result<(usize, &Point)> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::SOutOfRange(s));
        }
        let k = self.len();
        let idx = self.breakpoints[1..k].partition_point(|&a| a <= s);
        Ok((idx, &self.displacements[idx]))
    }

    /// The branch map: rescales the branch containing `s` onto `[0,1)`.
    pub fn phi(&self, s: f64) -> Result<f64> {
        let (idx, _) = self.locate(s)?;
        let lo = self.breakpoints[idx];
        let width = self.breakpoints[idx + 1] - self.breakpoints[idx];
        Ok(((s - lo) / width).min(ONE_BELOW))
    }

    /// Exact-branch lookup for a rational coordinate in `[0,1)`.
    pub fn locate_exact(&self, s: &BigRational) -> Result<usize> {
        let bps = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::NonRationalProbabilities("partition breakpoints".into()))?;
        if s < &BigRational::zero() || s >= &bps[self.len()] {
            return Err(Error::SOutOfRange(crate::env::rational_to_f64(s)));
        }
        // supports are tiny; a linear scan beats rational binary search
        let mut idx = 0;
        while &bps[idx + 1] <= s {
            idx += 1;
        }
        Ok(idx)
    }

    /// Exact branch map.
    pub fn phi_exact(&self, s: &BigRational) -> Result<BigRational> {
        let idx = self.locate_exact(s)?;
        let bps = self.exact.as_ref().expect("checked by locate_exact");
        let width = &bps[idx + 1] - &bps[idx];
        Ok((s - &bps[idx]) / width)
    }
}

/// Internal coordinate of the interval dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum SValue {
    Float(f64),
    Exact(BigRational),
}

/// One point of the skew-product phase space: internal coordinate, walker
/// position, and a shared handle to the base environment. The environment
/// seen by the walker is the base environment re-centered at `position`;
/// no translated copy is ever materialized.
#[derive(Debug, Clone)]
pub struct PvpState {
    s: SValue,
    position: Point,
    env: Arc<Environment>,
    step_count: u64,
}

impl PvpState {
    /// Starts at the origin with a float coordinate.
    pub fn new(env: Arc<Environment>, s0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s0) {
            return Err(Error::SOutOfRange(s0));
        }
        let dim = env.dim();
        Ok(Self {
            s: SValue::Float(s0),
            position: vec![0; dim],
            env,
            step_count: 0,
        })
    }

    /// Starts at the origin with an exact rational coordinate.
    pub fn new_exact(env: Arc<Environment>, s0: BigRational) -> Result<Self> {
        if s0 < BigRational::zero() || s0 >= BigRational::from_integer(1.into()) {
            return Err(Error::SOutOfRange(crate::env::rational_to_f64(&s0)));
        }
        let dim = env.dim();
        Ok(Self {
            s: SValue::Exact(s0),
            position: vec![0; dim],
            env,
            step_count: 0,
        })
    }

    pub fn s(&self) -> &SValue {
        &self.s
    }

    /// Float shadow of the internal coordinate.
    pub fn s_float(&self) -> f64 {
        match &self.s {
            SValue::Float(s) => *s,
            SValue::Exact(s) => crate::env::rational_to_f64(s),
        }
    }

    pub fn position(&self) -> &[i64] {
        &self.position
    }

    pub fn env(&self) -> &Arc<Environment> {
        &self.env
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Jump law at the walker's current position.
    pub fn current_dist(&self) -> Result<&JumpDistribution> {
        self.env.dist_at(&self.position)
    }

    /// One iteration of the skew product: consume the branch containing
    /// `s`, jump by its displacement, rescale `s`. Returns the jump taken.
    pub fn step(&mut self) -> Result<Point> {
        let jd = self.env.dist_at(&self.position)?;
        let (disp, new_s) = match &self.s {
            SValue::Float(s) => {
                if !(0.0..1.0).contains(s) {
                    return Err(Error::SOutOfRange(*s));
                }
                let (idx, r) = scan_branch(jd, *s);
                (jd.displacements()[idx].clone(), SValue::Float(r))
            }
            SValue::Exact(s) => {
                let qs = jd.exact_probs().ok_or_else(|| {
                    Error::NonRationalProbabilities(format!(
                        "law at {:?} has no exact representation",
                        self.position
                    ))
                })?;
                let (idx, r) = scan_branch_exact(qs, s)?;
                (jd.displacements()[idx].clone(), SValue::Exact(r))
            }
        };
        lattice::add_assign(&mut self.position, &disp);
        self.s = new_s;
        self.step_count += 1;
        Ok(disp)
    }

    /// One refresh-mode iteration: the branch is chosen by a fresh uniform
    /// draw, and `s` becomes the rescaled draw (again uniform in law).
    pub fn refresh_step<R: Rng>(&mut self, rng: &mut R) -> Result<Point> {
        let jd = self.env.dist_at(&self.position)?;
        let u: f64 = rng.gen();
        let (idx, r) = scan_branch(jd, u);
        let disp = jd.displacements()[idx].clone();
        lattice::add_assign(&mut self.position, &disp);
        self.s = SValue::Float(r);
        self.step_count += 1;
        Ok(disp)
    }
}

/// Branch lookup plus rescale without materializing the partition.
///
/// Accumulates prefix sums in the same order as [`build_partition`], so the
/// result is bit-identical to `(locate, phi)` on the built partition.
#[inline]
pub(crate) fn scan_branch(jd: &JumpDistribution, u: f64) -> (usize, f64) {
    let probs = jd.probs();
    let last = probs.len() - 1;
    let mut lo = 0.0f64;
    for (i, &q) in probs.iter().enumerate() {
        let hi = lo + q;
        if u < hi || i == last {
            return (i, ((u - lo) / q).min(ONE_BELOW).max(0.0));
        }
        lo = hi;
    }
    unreachable!("support is never empty")
}

fn scan_branch_exact(qs: &[BigRational], s: &BigRational) -> Result<(usize, BigRational)> {
    if s < &BigRational::zero() {
        return Err(Error::SOutOfRange(crate::env::rational_to_f64(s)));
    }
    let mut lo = BigRational::zero();
    let last = qs.len() - 1;
    for (i, q) in qs.iter().enumerate() {
        let hi = &lo + q;
        if s < &hi {
            return Ok((i, (s - lo) / q));
        }
        if i == last {
            break;
        }
        lo = hi;
    }
    Err(Error::SOutOfRange(crate::env::rational_to_f64(s)))
}

/// A realized walk: positions `X_0 = 0, X_1, ..., X_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub positions: Vec<Point>,
}

impl Trajectory {
    pub fn n_steps(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }

    pub fn endpoint(&self) -> &Point {
        self.positions.last().expect("trajectories are non-empty")
    }

    /// Consecutive differences, i.e. the jumps taken.
    pub fn displacements(&self) -> DisplacementSequence {
        let dim = self.positions.first().map(|p| p.len()).unwrap_or(0);
        let steps = self
            .positions
            .windows(2)
            .map(|w| lattice::sub(&w[1], &w[0]))
            .collect();
        DisplacementSequence { dim, steps }
    }

    /// True if the walk revisits its starting point at some step `k >= 1`.
    pub fn returned(&self) -> bool {
        let start = &self.positions[0];
        self.positions[1..].iter().any(|p| p == start)
    }

    /// `min_{1<=k<=n} |X_k - X_0|` (Euclidean).
    pub fn min_distance(&self) -> f64 {
        let start = &self.positions[0];
        self.positions[1..]
            .iter()
            .map(|p| lattice::euclid_norm(&lattice::sub(p, start)))
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV rows `step,x_1,...,x_d`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.positions.first().map(|p| p.len()).unwrap_or(0);
        write!(w, "step")?;
        for axis in 1..=dim {
            write!(w, ",x_{axis}")?;
        }
        writeln!(w)?;
        for (k, pos) in self.positions.iter().enumerate() {
            write!(w, "{k}")?;
            for c in pos {
                write!(w, ",{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Runs `n` steps in the given mode, returning the realized trajectory and
/// leaving `state` at its end.
///
/// Faithful and exact modes are deterministic and leave `rng` untouched;
/// refresh mode consumes one draw per step.
pub fn iterate<R: Rng>(
    state: &mut PvpState,
    n: usize,
    mode: Mode,
    rng: &mut R,
) -> Result<Trajectory> {
    match (mode, &state.s) {
        (Mode::Faithful, SValue::Float(_)) => {}
        (Mode::Refresh, SValue::Float(_)) => {}
        (Mode::ExactRational, SValue::Exact(_)) => {}
        (Mode::ExactRational, SValue::Float(_)) => {
            return Err(Error::Config(
                "exact_rational iteration needs a state built with new_exact".into(),
            ))
        }
        (_, SValue::Exact(_)) => {
            return Err(Error::Config(
                "float-mode iteration on an exact state; use exact_rational".into(),
            ))
        }
    }
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(state.position.clone());
    for _ in 0..n {
        match mode {
            Mode::Refresh => state.refresh_step(rng)?,
            Mode::Faithful | Mode::ExactRational => state.step()?,
        };
        positions.push(state.position.clone());
    }
    Ok(Trajectory { positions })
}

/// Entropy of the jump law at a site: `Σ q_i ln(1/q_i)`.
///
/// This is the fiber integral of the branch-width observable; it vanishes
/// exactly at deterministic sites.
pub fn step_entropy(env: &Environment, x: &[i64]) -> Result<f64> {
    Ok(env.dist_at(x)?.entropy())
}

/// A site observable: a pure function of the environment re-centered at the
/// walker, which is exactly the class whose orbit averages the re-centered
/// process governs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// One component of the local drift.
    DriftComponent { axis: usize },
    /// Entropy of the local jump law.
    StepEntropy,
    /// 1.0 when the law at `position + offset` never moves along `axis`.
    ///
    /// With `axis = 0, offset = +e1` this reads "the next column over is a
    /// vertical-movement column".
    NoMotionAlongAxis { offset: Point, axis: usize },
    /// 1.0 when the law at the current site equals the given distribution.
    MatchesDistribution { dist: JumpDistribution },
}

impl Observable {
    pub fn eval(&self, env: &Environment, position: &[i64]) -> Result<f64> {
        match self {
            Observable::DriftComponent { axis } => {
                let drift = env.local_drift(position)?;
                drift
                    .components
                    .get(*axis)
                    .copied()
                    .ok_or(Error::DimensionMismatch {
                        expected: env.dim(),
                        got: *axis + 1,
                    })
            }
            Observable::StepEntropy => step_entropy(env, position),
            Observable::NoMotionAlongAxis { offset, axis } => {
                let probe = lattice::add(position, offset);
                let jd = env.dist_at(&probe)?;
                let still = jd
                    .displacements()
                    .iter()
                    .all(|d| d.get(*axis).copied().unwrap_or(0) == 0);
                Ok(if still { 1.0 } else { 0.0 })
            }
            Observable::MatchesDistribution { dist } => {
                Ok(if env.dist_at(position)? == dist { 1.0 } else { 0.0 })
            }
        }
    }
}

/// Orbit average `(1/n) Σ_{k<n} f(env re-centered at X_k)`.
pub fn birkhoff_average<R: Rng>(
    state: &mut PvpState,
    observable: &Observable,
    n: usize,
    mode: Mode,
    rng: &mut R,
) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..n {
        let env = state.env.clone();
        acc += observable.eval(&env, &state.position)?;
        match mode {
            Mode::Refresh => state.refresh_step(rng)?,
            Mode::Faithful | Mode::ExactRational => state.step()?,
        };
    }
    Ok(acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::JumpDistribution;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jd(dim: usize, entries: &[(&[i64], f64)]) -> JumpDistribution {
        JumpDistribution::new(
            dim,
            entries.iter().map(|(d, p)| (d.to_vec(), *p)).collect(),
        )
        .unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn srw1() -> Arc<Environment> {
        Arc::new(Environment::simple_random_walk(1))
    }

    #[test]
    fn srw_partition_has_expected_breakpoints() {
        let env = srw1();
        let p = build_partition(env.dist_at(&[0]).unwrap());
        assert_eq!(p.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.displacements(), &[vec![-1], vec![1]]);
    }

    #[test]
    fn biased_partition_orders_canonically() {
        let p = build_partition(&jd(1, &[(&[1], 0.7), (&[-1], 0.3)]));
        assert_eq!(p.breakpoints(), &[0.0, 0.3, 1.0]);
        assert_eq!(p.displacements(), &[vec![-1], vec![1]]);
    }

    #[test]
    fn srw2_partition_is_quarters_in_lex_order() {
        let env = Environment::simple_random_walk(2);
        let p = build_partition(env.dist_at(&[0, 0]).unwrap());
        assert_eq!(p.breakpoints(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(
            p.displacements(),
            &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn locate_honors_right_open_branches() {
        let env = srw1();
        let p = build_partition(env.dist_at(&[0]).unwrap());
        assert_eq!(p.locate(0.25).unwrap(), (0, &vec![-1]));
        // a breakpoint belongs to the branch above it
        assert_eq!(p.locate(0.5).unwrap(), (1, &vec![1]));
        assert_eq!(p.locate(0.999999).unwrap(), (1, &vec![1]));
        assert!(p.locate(1.0).is_err());
        assert!(p.locate(-0.1).is_err());
    }

    #[test]
    fn phi_rescales_each_branch_onto_unit() {
        let env = srw1();
        let p = build_partition(env.dist_at(&[0]).unwrap());
        assert_abs_diff_eq!(p.phi(0.75).unwrap(), 0.5, epsilon = 0.0);
        assert_eq!(p.phi(0.0).unwrap(), 0.0);
        assert_eq!(p.phi(0.5).unwrap(), 0.0);

        let q = build_partition(&jd(1, &[(&[1], 0.7), (&[-1], 0.3)]));
        assert_eq!(q.phi(0.3).unwrap(), 0.0);
    }

    #[test]
    fn step_composes_locate_and_phi() {
        let mut state = PvpState::new(srw1(), 0.75).unwrap();
        let disp = state.step().unwrap();
        assert_eq!(disp, vec![1]);
        assert_eq!(state.position(), &[1]);
        assert_abs_diff_eq!(state.s_float(), 0.5, epsilon = 0.0);
        assert_eq!(state.step_count(), 1);

        // s = 0 always takes the first canonical branch
        let mut state = PvpState::new(srw1(), 0.0).unwrap();
        assert_eq!(state.step().unwrap(), vec![-1]);

        // two successive steps unroll the composition
        let mut state = PvpState::new(srw1(), 0.6).unwrap();
        let t = iterate(
            &mut state,
            2,
            Mode::Faithful,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        // s=0.6 -> branch +1, s'=0.2 -> branch -1
        assert_eq!(t.positions, vec![vec![0], vec![1], vec![0]]);
    }

    #[test]
    fn exact_iteration_matches_hand_unroll() {
        let env = srw1();
        let mut state = PvpState::new_exact(env, ratio(3, 4)).unwrap();
        let t = iterate(
            &mut state,
            2,
            Mode::ExactRational,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(t.displacements().steps, vec![vec![1], vec![-1]]);
        // 3/4 -> 1/2 -> 0
        assert_eq!(state.s(), &SValue::Exact(BigRational::zero()));
    }

    #[test]
    fn faithful_agrees_with_exact_for_dyadic_starts() {
        let env = srw1();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let numer = rng.gen_range(0u64..(1 << 30));
            let s = numer as f64 / (1u64 << 30) as f64;
            let mut float_state = PvpState::new(env.clone(), s).unwrap();
            let mut exact_state =
                PvpState::new_exact(env.clone(), ratio(numer as i64, 1 << 30)).unwrap();
            let tf = iterate(&mut float_state, 20, Mode::Faithful, &mut rng).unwrap();
            let te = iterate(&mut exact_state, 20, Mode::ExactRational, &mut rng).unwrap();
            assert_eq!(tf, te);
        }
    }

    #[test]
    fn refresh_mode_has_zero_mean_on_srw() {
        let env = srw1();
        let trials = 20_000usize;
        let n = 100usize;
        let mut sum = 0.0;
        for trial in 0..trials {
            let mut rng = crate::rng::trial_rng(77, trial as u64);
            let s0: f64 = rng.gen();
            let mut state = PvpState::new(env.clone(), s0).unwrap();
            let t = iterate(&mut state, n, Mode::Refresh, &mut rng).unwrap();
            sum += t.endpoint()[0] as f64;
        }
        let mean = sum / trials as f64;
        // stderr = sqrt(n)/sqrt(trials)
        let se = (n as f64).sqrt() / (trials as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "mean {mean} exceeds 4 x {se}");
    }

    #[test]
    fn exact_mode_requires_rational_probabilities() {
        // 1/3 cannot be recovered from a float's decimal form
        let third = 1.0 / 3.0;
        let law = JumpDistribution::new(
            1,
            vec![
                (vec![1], third),
                (vec![-1], third),
                (vec![2], 1.0 - 2.0 * third),
            ],
        )
        .unwrap();
        assert!(law.exact_probs().is_none());
        let env = Arc::new(Environment::homogeneous(law).unwrap());
        let mut state = PvpState::new_exact(env, ratio(1, 2)).unwrap();
        assert!(matches!(
            state.step(),
            Err(Error::NonRationalProbabilities(_))
        ));
    }

    #[test]
    fn mode_and_state_must_agree() {
        let env = srw1();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut float_state = PvpState::new(env.clone(), 0.5).unwrap();
        assert!(iterate(&mut float_state, 1, Mode::ExactRational, &mut rng).is_err());
        let mut exact_state = PvpState::new_exact(env, ratio(1, 2)).unwrap();
        assert!(iterate(&mut exact_state, 1, Mode::Refresh, &mut rng).is_err());
    }

    #[test]
    fn step_entropy_matches_closed_forms() {
        let env = srw1();
        assert_abs_diff_eq!(
            step_entropy(&env, &[0]).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );

        let point_mass =
            Environment::homogeneous(JumpDistribution::new(1, vec![(vec![1], 1.0)]).unwrap())
                .unwrap();
        assert_eq!(step_entropy(&point_mass, &[0]).unwrap(), 0.0);

        let biased = Environment::homogeneous(jd(1, &[(&[1], 0.7), (&[-1], 0.3)])).unwrap();
        let expected = -0.7 * 0.7f64.ln() - 0.3 * 0.3f64.ln();
        assert_abs_diff_eq!(
            step_entropy(&biased, &[0]).unwrap(),
            expected,
            epsilon = 1e-15
        );
    }

    #[test]
    fn birkhoff_average_of_constant_observables() {
        let env = srw1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 10, 100] {
            let mut state = PvpState::new(env.clone(), 0.3).unwrap();
            let avg = birkhoff_average(
                &mut state,
                &Observable::DriftComponent { axis: 0 },
                n,
                Mode::Refresh,
                &mut rng,
            )
            .unwrap();
            assert_eq!(avg, 0.0);
        }

        let biased =
            Arc::new(Environment::homogeneous(jd(1, &[(&[1], 0.7), (&[-1], 0.3)])).unwrap());
        let h = -0.7 * 0.7f64.ln() - 0.3 * 0.3f64.ln();
        let mut state = PvpState::new(biased, 0.3).unwrap();
        let avg = birkhoff_average(
            &mut state,
            &Observable::StepEntropy,
            57,
            Mode::Refresh,
            &mut rng,
        )
        .unwrap();
        assert_abs_diff_eq!(avg, h, epsilon = 1e-12);
    }

    #[test]
    fn scan_branch_matches_partition_path() {
        let law = jd(1, &[(&[1], 0.2), (&[-1], 0.3), (&[2], 0.5)]);
        let p = build_partition(&law);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let u: f64 = rng.gen();
            let (idx, r) = scan_branch(&law, u);
            let (pidx, _) = p.locate(u).unwrap();
            assert_eq!(idx, pidx);
            assert_eq!(r, p.phi(u).unwrap());
        }
    }
}
