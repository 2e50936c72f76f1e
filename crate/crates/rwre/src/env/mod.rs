//! Environments on the integer lattice.
//!
//! An environment assigns a finite-support jump distribution to every site.
//! Three families are supported:
//!
//! * **Periodic** — a finite table on a torus, repeated over the lattice.
//!   Everything about these is exactly solvable (see [`crate::evp`]).
//! * **Seeded i.i.d.** — each site independently draws one member of a
//!   finite family of distributions; the draw is a pure function of
//!   `(master_seed, site)`, so the unbounded field is evaluated lazily and
//!   reproducibly.
//! * **ColumnAb** — the two-letter column environment on `Z^2`: columns are
//!   labeled A or B i.i.d.; A-sites jump `±e1` with probability 1/2 each,
//!   B-sites jump `±e2`. Its re-centered process is famously non-ergodic,
//!   which is exactly what it is here for.
//!
//! Translating an environment by `z` re-centers it: `shift(env, z)` looks up
//! site `x + z` of the original wherever the new environment is asked about
//! `x`. Environments are immutable after construction and cheap to share.

mod checks;
mod exact;
mod spec;

pub use checks::{
    check_decay, check_doubly_stochastic, check_nondeterministic, check_zero_drift, DecayReport,
    DoublyStochasticReport, NondeterminismReport, ZeroDriftReport,
};
pub use exact::{decimal_rational, rational_from_f64, rational_to_f64};
pub use spec::{EntrySpec, EnvironmentSpec, FamilyMemberSpec, JumpDistSpec};

use crate::error::Error;
use crate::lattice::{self, Point};
use crate::rng;
use crate::Result;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Absolute tolerance for probability sums at construction time.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Absolute tolerance for aggregate (summed) checks.
pub const AGGREGATE_TOL: f64 = 1e-10;

/// A finite-support probability distribution over lattice displacements.
///
/// Entries are stored in canonical order (ascending ℓ1 norm, ties broken
/// lexicographically); zero-probability entries are dropped at construction
/// so downstream interval partitions never contain empty branches. When all
/// probabilities are recoverable as rationals summing to exactly 1, the
/// exact representation is kept alongside the floats.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpDistribution {
    dim: usize,
    displacements: Vec<Point>,
    probs: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl JumpDistribution {
    /// Builds a distribution from float probabilities.
    pub fn new(dim: usize, entries: Vec<(Point, f64)>) -> Result<Self> {
        let mut kept: Vec<(Point, f64)> = Vec::with_capacity(entries.len());
        for (disp, prob) in entries {
            if disp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: disp.len(),
                });
            }
            if !(0.0..=1.0).contains(&prob) || !prob.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {prob} for displacement {disp:?} outside [0,1]"
                )));
            }
            if prob > 0.0 {
                kept.push((disp, prob));
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        kept.sort_by(|a, b| lattice::canonical_cmp(&a.0, &b.0));
        for pair in kept.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate displacement {:?}",
                    pair[0].0
                )));
            }
        }
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let exact_candidates: Option<Vec<BigRational>> =
            kept.iter().map(|(_, p)| exact::rational_from_f64(*p)).collect();
        let exact = exact_candidates.filter(|rs| exact::sums_to_one(rs));
        let (displacements, probs) = kept.into_iter().unzip();
        Ok(Self {
            dim,
            displacements,
            probs,
            exact,
        })
    }

    /// Builds a distribution from exact rational probabilities.
    ///
    /// The rationals must sum to exactly 1; zero entries are dropped.
    pub fn from_rationals(dim: usize, entries: Vec<(Point, BigRational)>) -> Result<Self> {
        use num_traits::Zero;
        let mut kept: Vec<(Point, BigRational)> = Vec::with_capacity(entries.len());
        for (disp, prob) in entries {
            if disp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: disp.len(),
                });
            }
            if prob < BigRational::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "negative probability for displacement {disp:?}"
                )));
            }
            if !prob.is_zero() {
                kept.push((disp, prob));
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        kept.sort_by(|a, b| lattice::canonical_cmp(&a.0, &b.0));
        for pair in kept.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate displacement {:?}",
                    pair[0].0
                )));
            }
        }
        let rationals: Vec<BigRational> = kept.iter().map(|(_, p)| p.clone()).collect();
        if !exact::sums_to_one(&rationals) {
            return Err(Error::InvalidDistribution(
                "rational probabilities do not sum to exactly 1".into(),
            ));
        }
        let displacements: Vec<Point> = kept.into_iter().map(|(d, _)| d).collect();
        let probs: Vec<f64> = rationals
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect();
        Ok(Self {
            dim,
            displacements,
            probs,
            exact: Some(rationals),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of support displacements.
    pub fn support_size(&self) -> usize {
        self.displacements.len()
    }

    /// Support displacements in canonical order.
    pub fn displacements(&self) -> &[Point] {
        &self.displacements
    }

    /// Probabilities aligned with [`Self::displacements`].
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Exact rational probabilities, present only when they sum to exactly 1.
    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Probability of one displacement (`None` when outside the support).
    pub fn prob_of(&self, displacement: &[i64]) -> Option<f64> {
        self.displacements
            .iter()
            .position(|d| d.as_slice() == displacement)
            .map(|i| self.probs[i])
    }

    /// Index of a displacement in canonical order.
    pub fn index_of(&self, displacement: &[i64]) -> Option<usize> {
        self.displacements
            .iter()
            .position(|d| d.as_slice() == displacement)
    }

    /// Mean displacement of one jump.
    pub fn drift(&self) -> DriftVector {
        let mut components = vec![0.0; self.dim];
        for (disp, &p) in self.displacements.iter().zip(&self.probs) {
            for (axis, &c) in disp.iter().enumerate() {
                components[axis] += p * c as f64;
            }
        }
        DriftVector { components }
    }

    /// Shannon entropy `Σ -q ln q` (natural log); zero iff deterministic.
    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&q| -q * q.ln()).sum()
    }

    /// One support atom means the jump from this site is deterministic.
    pub fn is_deterministic(&self) -> bool {
        self.displacements.len() == 1
    }

    /// Largest ∞-norm over the support.
    pub fn support_radius(&self) -> i64 {
        self.displacements
            .iter()
            .map(|d| lattice::linf_norm(d))
            .max()
            .unwrap_or(0)
    }
}

/// Mean one-step displacement at a site.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DriftVector {
    pub components: Vec<f64>,
}

impl DriftVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            components: vec![0.0; dim],
        }
    }
}

/// Column label for the two-letter environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ColumnLabel {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
enum EnvKind {
    Periodic {
        extents: Vec<usize>,
        table: Vec<JumpDistribution>,
    },
    SeededIid {
        family: Vec<JumpDistribution>,
        weights: Vec<f64>,
        cumulative: Vec<f64>,
        master_seed: u64,
    },
    ColumnAb {
        prob_a: f64,
        master_seed: u64,
        dist_a: JumpDistribution,
        dist_b: JumpDistribution,
    },
}

/// A random environment: a site → jump-distribution field with translation
/// semantics. Immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    dim: usize,
    offset: Point,
    kind: EnvKind,
}

impl Environment {
    /// Periodic environment on the torus spanned by `extents`.
    ///
    /// `table` is indexed row-major with the first coordinate fastest:
    /// `index = x_1 + L_1*(x_2 + L_2*(...))`.
    pub fn periodic(extents: Vec<usize>, table: Vec<JumpDistribution>) -> Result<Self> {
        let dim = extents.len();
        if dim == 0 || extents.iter().any(|&l| l == 0) {
            return Err(Error::InvalidEnvironment(
                "periodic extents must all be >= 1".into(),
            ));
        }
        let n_sites: usize = extents.iter().product();
        if table.len() != n_sites {
            return Err(Error::InvalidEnvironment(format!(
                "table has {} entries, torus has {} sites",
                table.len(),
                n_sites
            )));
        }
        if let Some(bad) = table.iter().find(|jd| jd.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            offset: vec![0; dim],
            kind: EnvKind::Periodic { extents, table },
        })
    }

    /// Homogeneous environment: one law at every site (a 1-site torus).
    pub fn homogeneous(jd: JumpDistribution) -> Result<Self> {
        let dim = jd.dim();
        Self::periodic(vec![1; dim], vec![jd])
    }

    /// Simple random walk in dimension `dim`: `±e_k` each with prob `1/(2d)`.
    pub fn simple_random_walk(dim: usize) -> Self {
        use num_bigint::BigInt;
        let q = BigRational::new(BigInt::from(1), BigInt::from(2 * dim as i64));
        let mut entries = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            for sign in [-1i64, 1] {
                let mut d = vec![0i64; dim];
                d[axis] = sign;
                entries.push((d, q.clone()));
            }
        }
        let jd = JumpDistribution::from_rationals(dim, entries).expect("srw law is valid");
        Self::homogeneous(jd).expect("srw env is valid")
    }

    /// I.i.d. environment: site `x` draws `family[i]` with probability
    /// `weights[i]`, as a pure function of `(master_seed, x)`.
    pub fn seeded_iid(
        dim: usize,
        family: Vec<(JumpDistribution, f64)>,
        master_seed: u64,
    ) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidEnvironment("empty family".into()));
        }
        let mut members = Vec::with_capacity(family.len());
        let mut weights = Vec::with_capacity(family.len());
        for (jd, w) in family {
            if jd.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: jd.dim(),
                });
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidEnvironment(format!(
                    "family weight {w} outside [0,1]"
                )));
            }
            members.push(jd);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidEnvironment(format!(
                "family weights sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self {
            dim,
            offset: vec![0; dim],
            kind: EnvKind::SeededIid {
                family: members,
                weights,
                cumulative,
                master_seed,
            },
        })
    }

    /// Two-letter column environment on `Z^2` with i.i.d. column labels.
    pub fn column_ab(prob_a: f64, master_seed: u64) -> Result<Self> {
        if !(prob_a > 0.0 && prob_a < 1.0) {
            return Err(Error::InvalidEnvironment(format!(
                "prob_a must lie in (0,1), got {prob_a}"
            )));
        }
        Ok(Self {
            dim: 2,
            offset: vec![0; 2],
            kind: EnvKind::ColumnAb {
                prob_a,
                master_seed,
                dist_a: Self::ab_dist(0),
                dist_b: Self::ab_dist(1),
            },
        })
    }

    /// Periodic rendering of a column environment from an explicit pattern.
    ///
    /// Extents are `(pattern.len(), vertical_extent)`.
    pub fn periodic_columns(pattern: &[ColumnLabel], vertical_extent: usize) -> Result<Self> {
        if pattern.is_empty() || vertical_extent == 0 {
            return Err(Error::InvalidEnvironment("empty column pattern".into()));
        }
        let mut table = Vec::with_capacity(pattern.len() * vertical_extent);
        for _row in 0..vertical_extent {
            for label in pattern {
                table.push(match label {
                    ColumnLabel::A => Self::ab_dist(0),
                    ColumnLabel::B => Self::ab_dist(1),
                });
            }
        }
        Self::periodic(vec![pattern.len(), vertical_extent], table)
    }

    fn ab_dist(axis: usize) -> JumpDistribution {
        use num_bigint::BigInt;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut minus = vec![0i64; 2];
        let mut plus = vec![0i64; 2];
        minus[axis] = -1;
        plus[axis] = 1;
        JumpDistribution::from_rationals(2, vec![(minus, half.clone()), (plus, half)])
            .expect("ab law is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, EnvKind::Periodic { .. })
    }

    /// Torus extents for periodic environments.
    pub fn extents(&self) -> Option<&[usize]> {
        match &self.kind {
            EnvKind::Periodic { extents, .. } => Some(extents),
            _ => None,
        }
    }

    /// Master seed for seeded kinds.
    pub fn master_seed(&self) -> Option<u64> {
        match &self.kind {
            EnvKind::Periodic { .. } => None,
            EnvKind::SeededIid { master_seed, .. } | EnvKind::ColumnAb { master_seed, .. } => {
                Some(*master_seed)
            }
        }
    }

    /// Same environment family with a fresh master seed (periodic kinds are
    /// returned unchanged) — the resampling hook for annealed ensembles.
    pub fn with_master_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out.kind {
            EnvKind::Periodic { .. } => {}
            EnvKind::SeededIid { master_seed, .. } | EnvKind::ColumnAb { master_seed, .. } => {
                *master_seed = seed;
            }
        }
        out
    }

    /// The i.i.d. family, if this is a seeded i.i.d. environment.
    pub fn family(&self) -> Option<&[JumpDistribution]> {
        match &self.kind {
            EnvKind::SeededIid { family, .. } => Some(family),
            _ => None,
        }
    }

    /// Jump distribution at site `x`.
    pub fn dist_at(&self, x: &[i64]) -> Result<&JumpDistribution> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let absolute = lattice::add(x, &self.offset);
        Ok(self.dist_at_absolute(&absolute))
    }

    fn dist_at_absolute(&self, x: &[i64]) -> &JumpDistribution {
        match &self.kind {
            EnvKind::Periodic { extents, table } => &table[torus_index(extents, x)],
            EnvKind::SeededIid {
                family,
                cumulative,
                master_seed,
                ..
            } => {
                let u = rng::hash_unit(*master_seed, rng::DOMAIN_SITE, x);
                let idx = cumulative.partition_point(|&c| c <= u).min(family.len() - 1);
                &family[idx]
            }
            EnvKind::ColumnAb { dist_a, dist_b, .. } => match self.column_label_absolute(x[0]) {
                ColumnLabel::A => dist_a,
                ColumnLabel::B => dist_b,
            },
        }
    }

    /// Column label at horizontal coordinate `j` (ColumnAb only).
    pub fn column_label(&self, j: i64) -> Option<ColumnLabel> {
        match &self.kind {
            EnvKind::ColumnAb { .. } => Some(self.column_label_absolute(j + self.offset[0])),
            _ => None,
        }
    }

    fn column_label_absolute(&self, j: i64) -> ColumnLabel {
        match &self.kind {
            EnvKind::ColumnAb {
                prob_a, master_seed, ..
            } => {
                if rng::hash_unit(*master_seed, rng::DOMAIN_COLUMN, &[j]) < *prob_a {
                    ColumnLabel::A
                } else {
                    ColumnLabel::B
                }
            }
            _ => unreachable!("column labels exist only for ColumnAb"),
        }
    }

    /// Translation action: the returned environment sees site `x` where this
    /// one sees `x + z`, so `shifted.dist_at(x) == self.dist_at(x + z)`.
    pub fn shift(&self, z: &[i64]) -> Result<Self> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut out = self.clone();
        lattice::add_assign(&mut out.offset, z);
        Ok(out)
    }

    /// Mean displacement of one jump from site `x`.
    pub fn local_drift(&self, x: &[i64]) -> Result<DriftVector> {
        Ok(self.dist_at(x)?.drift())
    }

    /// Largest support ∞-norm over all laws this environment can produce.
    pub fn support_radius(&self) -> i64 {
        match &self.kind {
            EnvKind::Periodic { table, .. } => {
                table.iter().map(|jd| jd.support_radius()).max().unwrap_or(0)
            }
            EnvKind::SeededIid { family, .. } => {
                family.iter().map(|jd| jd.support_radius()).max().unwrap_or(0)
            }
            EnvKind::ColumnAb { .. } => 1,
        }
    }

    /// True when every law has an exact rational representation.
    pub fn has_exact_probs(&self) -> bool {
        match &self.kind {
            EnvKind::Periodic { table, .. } => table.iter().all(|jd| jd.exact_probs().is_some()),
            EnvKind::SeededIid { family, .. } => {
                family.iter().all(|jd| jd.exact_probs().is_some())
            }
            EnvKind::ColumnAb { .. } => true,
        }
    }

    /// Sites of one fundamental domain (periodic environments only).
    pub fn fundamental_domain(&self) -> Option<Vec<Point>> {
        self.extents().map(lattice::box_sites)
    }
}

/// Row-major torus index with the first coordinate fastest.
pub(crate) fn torus_index(extents: &[usize], x: &[i64]) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (&c, &l) in x.iter().zip(extents) {
        let reduced = c.rem_euclid(l as i64) as usize;
        idx += reduced * stride;
        stride *= l;
    }
    idx
}

/// Inverse of [`torus_index`]: the domain site for a flat index.
pub(crate) fn torus_site(extents: &[usize], mut idx: usize) -> Point {
    let mut site = Vec::with_capacity(extents.len());
    for &l in extents {
        site.push((idx % l) as i64);
        idx /= l;
    }
    site
}
