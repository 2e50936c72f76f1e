//! Trajectory coding: finite walks as subintervals of `[0,1)`.
//!
//! A length-`n` displacement sequence corresponds to the right-open
//! interval of internal coordinates that realize it — a cylinder whose
//! length is the product of the branch probabilities along the way. The
//! decoder narrows `[0,1)` step by step, arithmetic-coding style; in exact
//! rational arithmetic the recovered width equals that product exactly,
//! which is the invariant the round-trip tests pin down.

use super::PvpState;
use crate::env::Environment;
use crate::error::Error;
use crate::lattice::{self, Point};
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

/// The jumps of a finite walk, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSequence {
    pub dim: usize,
    pub steps: Vec<Point>,
}

impl DisplacementSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A right-open interval `[lo, hi)` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, s: &BigRational) -> bool {
        &self.lo <= s && s < &self.hi
    }
}

#[derive(Serialize, Deserialize)]
struct RatIntervalRepr {
    lo: RationalRepr,
    hi: RationalRepr,
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl From<&BigRational> for RationalRepr {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl RationalRepr {
    fn parse(&self) -> Option<BigRational> {
        let num = BigInt::from_str(&self.num).ok()?;
        let den = BigInt::from_str(&self.den).ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RatIntervalRepr {
            lo: (&self.lo).into(),
            hi: (&self.hi).into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RatIntervalRepr::deserialize(deserializer)?;
        let lo = repr.lo.parse().ok_or_else(|| D::Error::custom("bad lo"))?;
        let hi = repr.hi.parse().ok_or_else(|| D::Error::custom("bad hi"))?;
        Ok(RatInterval { lo, hi })
    }
}

/// Log-measure of the cylinder realizing `seq` from the origin:
/// `Σ_k ln q_{i_k}` accumulated in log space so long sequences never
/// underflow. The cylinder's measure is `exp` of the result.
pub fn cylinder_log_measure(env: &Environment, seq: &DisplacementSequence) -> Result<f64> {
    let mut position = vec![0i64; env.dim()];
    let mut acc = 0.0f64;
    for (step, disp) in seq.steps.iter().enumerate() {
        let q = env
            .dist_at(&position)?
            .prob_of(disp)
            .ok_or_else(|| Error::UnrealizableStep {
                step,
                position: position.clone(),
                displacement: disp.clone(),
            })?;
        acc += q.ln();
        lattice::add_assign(&mut position, disp);
    }
    Ok(acc)
}

/// Reads off the first `n` jumps of the deterministic orbit of `state`.
///
/// The state is not advanced; float states encode faithfully (short
/// horizons), exact states encode bit-exactly.
pub fn encode_trajectory(state: &PvpState, n: usize) -> Result<DisplacementSequence> {
    let mut probe = state.clone();
    let mut steps = Vec::with_capacity(n);
    for _ in 0..n {
        steps.push(probe.step()?);
    }
    Ok(DisplacementSequence {
        dim: state.env().dim(),
        steps,
    })
}

/// Recovers the cylinder interval of internal coordinates realizing `seq`.
///
/// Requires exact rational probabilities along the path. The interval
/// narrows once per step: if the running interval is `[L, L+W)` and the
/// step's branch spans `[a, a+q)` of the unit interval, the new interval is
/// `[L + W·a, L + W·(a+q))`. The final width is exactly the product of the
/// branch probabilities.
pub fn decode_trajectory(env: &Environment, seq: &DisplacementSequence) -> Result<RatInterval> {
    let mut position = vec![0i64; env.dim()];
    let mut lo = BigRational::zero();
    let mut width = BigRational::one();
    for (step, disp) in seq.steps.iter().enumerate() {
        let jd = env.dist_at(&position)?;
        let unrealizable = || Error::UnrealizableStep {
            step,
            position: position.clone(),
            displacement: disp.clone(),
        };
        let idx = jd.index_of(disp).ok_or_else(unrealizable)?;
        let qs = jd.exact_probs().ok_or_else(|| {
            Error::NonRationalProbabilities(format!("law at {position:?} while decoding"))
        })?;
        let branch_lo: BigRational = qs[..idx].iter().fold(BigRational::zero(), |a, q| a + q);
        lo += &width * &branch_lo;
        width *= &qs[idx];
        lattice::add_assign(&mut position, disp);
    }
    let hi = &lo + &width;
    Ok(RatInterval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::JumpDistribution;
    use crate::pvp::iterate;
    use crate::pvp::Mode;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn srw1() -> Arc<Environment> {
        Arc::new(Environment::simple_random_walk(1))
    }

    fn seq1(steps: &[i64]) -> DisplacementSequence {
        DisplacementSequence {
            dim: 1,
            steps: steps.iter().map(|&s| vec![s]).collect(),
        }
    }

    #[test]
    fn srw_cylinders_have_uniform_log_measure() {
        let env = srw1();
        let seq = seq1(&[1, -1, 1, 1, -1, -1, 1, -1, 1, 1]);
        let lm = cylinder_log_measure(&env, &seq).unwrap();
        assert_abs_diff_eq!(lm, 10.0 * 0.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn biased_cylinder_multiplies_branch_probs() {
        let jd = JumpDistribution::new(1, vec![(vec![1], 0.7), (vec![-1], 0.3)]).unwrap();
        let env = Environment::homogeneous(jd).unwrap();
        let lm = cylinder_log_measure(&env, &seq1(&[1, 1, -1])).unwrap();
        assert_abs_diff_eq!(lm, (0.7f64 * 0.7 * 0.3).ln(), epsilon = 1e-12);
    }

    #[test]
    fn unrealizable_step_reports_its_index() {
        let env = srw1();
        let err = cylinder_log_measure(&env, &seq1(&[1, 3, 1])).unwrap_err();
        match err {
            Error::UnrealizableStep { step, .. } => assert_eq!(step, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn encode_matches_exact_iteration() {
        let env = srw1();
        let state = PvpState::new_exact(env.clone(), ratio(3, 4)).unwrap();
        let seq = encode_trajectory(&state, 2).unwrap();
        assert_eq!(seq.steps, vec![vec![1], vec![-1]]);

        let empty = encode_trajectory(&state, 0).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn decode_recovers_srw_cylinders() {
        let env = srw1();
        let plus = decode_trajectory(&env, &seq1(&[1])).unwrap();
        assert_eq!(plus.lo, ratio(1, 2));
        assert_eq!(plus.hi, ratio(1, 1));

        let mm = decode_trajectory(&env, &seq1(&[-1, -1])).unwrap();
        assert_eq!(mm.lo, ratio(0, 1));
        assert_eq!(mm.hi, ratio(1, 4));
    }

    #[test]
    fn round_trip_contains_start_and_width_is_exact() {
        let jd0 = JumpDistribution::from_rationals(
            1,
            vec![(vec![1], ratio(1, 3)), (vec![-1], ratio(2, 3))],
        )
        .unwrap();
        let jd1 = JumpDistribution::from_rationals(
            1,
            vec![
                (vec![1], ratio(1, 5)),
                (vec![-1], ratio(1, 5)),
                (vec![2], ratio(3, 5)),
            ],
        )
        .unwrap();
        let env = Arc::new(Environment::periodic(vec![2], vec![jd0, jd1]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let s = ratio(rng.gen_range(0..1_000_000), 1_000_000);
            let state = PvpState::new_exact(env.clone(), s.clone()).unwrap();
            let seq = encode_trajectory(&state, 25).unwrap();
            let interval = decode_trajectory(&env, &seq).unwrap();
            assert!(interval.contains(&s), "decoded interval misses s = {s}");

            // width equals the exact product of branch probabilities,
            // computed independently of the decoder
            let mut product = BigRational::one();
            let mut pos = vec![0i64];
            for disp in &seq.steps {
                let jd = env.dist_at(&pos).unwrap();
                let idx = jd.index_of(disp).unwrap();
                product *= &jd.exact_probs().unwrap()[idx];
                pos[0] += disp[0];
            }
            assert_eq!(interval.width(), product);

            // and the float log-measure agrees in log space
            let lm = cylinder_log_measure(&env, &seq).unwrap();
            let width_f = crate::env::rational_to_f64(&interval.width());
            assert_abs_diff_eq!(lm, width_f.ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn decoded_interval_reproduces_the_sequence() {
        let env = srw1();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut state = PvpState::new(env.clone(), rng.gen()).unwrap();
        let t = iterate(&mut state, 12, Mode::Refresh, &mut rng).unwrap();
        let seq = t.displacements();
        let interval = decode_trajectory(&env, &seq).unwrap();
        // the midpoint of the cylinder must encode back to the sequence
        let mid = (&interval.lo + &interval.hi) / BigRational::from_integer(2.into());
        let probe = PvpState::new_exact(env, mid).unwrap();
        assert_eq!(encode_trajectory(&probe, 12).unwrap(), seq);
    }

    #[test]
    fn interval_json_uses_decimal_strings() {
        let interval = RatInterval {
            lo: ratio(1, 3),
            hi: ratio(2, 3),
        };
        let json = serde_json::to_string(&interval).unwrap();
        assert!(json.contains("\"num\":\"1\""));
        assert!(json.contains("\"den\":\"3\""));
        let back: RatInterval = serde_json::from_str(&json).unwrap();
        assert_eq!(back, interval);
    }
}
