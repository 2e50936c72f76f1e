//! JSON schema for environment descriptions.
//!
//! ```json
//! {"kind": "periodic", "dim": 1, "extents": [2],
//!  "table": [{"entries": [{"disp": [1], "prob": 0.7}, {"disp": [-1], "prob": 0.3}]},
//!            {"entries": [{"disp": [1], "prob": 0.3}, {"disp": [-1], "prob": 0.7}]}]}
//!
//! {"kind": "iid", "dim": 2, "master_seed": 7,
//!  "family": [{"weight": 1.0, "dist": {"entries": [...]}}]}
//!
//! {"kind": "column_ab", "prob_a": 0.5, "master_seed": 7}
//! ```
//!
//! Probabilities are decimal numbers; their decimal text (as reproduced by
//! the shortest float representation) is what the exact-rational mode
//! recovers, so `0.7` means `7/10` exactly.

use super::{Environment, JumpDistribution};
use crate::lattice::Point;
use crate::Result;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntrySpec {
    pub disp: Point,
    pub prob: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JumpDistSpec {
    pub entries: Vec<EntrySpec>,
}

impl JumpDistSpec {
    pub fn build(&self, dim: usize) -> Result<JumpDistribution> {
        JumpDistribution::new(
            dim,
            self.entries
                .iter()
                .map(|e| (e.disp.clone(), e.prob))
                .collect(),
        )
    }

    pub fn from_dist(jd: &JumpDistribution) -> Self {
        Self {
            entries: jd
                .displacements()
                .iter()
                .zip(jd.probs())
                .map(|(d, &p)| EntrySpec {
                    disp: d.clone(),
                    prob: p,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FamilyMemberSpec {
    pub weight: f64,
    pub dist: JumpDistSpec,
}

/// Declarative environment description; see the module docs for examples.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Periodic {
        dim: usize,
        extents: Vec<usize>,
        table: Vec<JumpDistSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Point>,
    },
    Iid {
        dim: usize,
        family: Vec<FamilyMemberSpec>,
        master_seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Point>,
    },
    ColumnAb {
        prob_a: f64,
        master_seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Point>,
    },
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Environment> {
        let (env, offset) = match self {
            EnvironmentSpec::Periodic {
                dim,
                extents,
                table,
                offset,
            } => {
                let dists: Result<Vec<JumpDistribution>> =
                    table.iter().map(|t| t.build(*dim)).collect();
                (Environment::periodic(extents.clone(), dists?)?, offset)
            }
            EnvironmentSpec::Iid {
                dim,
                family,
                master_seed,
                offset,
            } => {
                let members: Result<Vec<(JumpDistribution, f64)>> = family
                    .iter()
                    .map(|m| Ok((m.dist.build(*dim)?, m.weight)))
                    .collect();
                (
                    Environment::seeded_iid(*dim, members?, *master_seed)?,
                    offset,
                )
            }
            EnvironmentSpec::ColumnAb {
                prob_a,
                master_seed,
                offset,
            } => (Environment::column_ab(*prob_a, *master_seed)?, offset),
        };
        match offset {
            Some(z) => env.shift(z),
            None => Ok(env),
        }
    }
}

impl Environment {
    /// Declarative description of this environment; inverse of
    /// [`EnvironmentSpec::build`] up to distribution equality.
    pub fn to_spec(&self) -> EnvironmentSpec {
        let offset = if self.offset.iter().all(|&c| c == 0) {
            None
        } else {
            Some(self.offset.clone())
        };
        match &self.kind {
            super::EnvKind::Periodic { extents, table } => EnvironmentSpec::Periodic {
                dim: self.dim,
                extents: extents.clone(),
                table: table.iter().map(JumpDistSpec::from_dist).collect(),
                offset,
            },
            super::EnvKind::SeededIid {
                family,
                weights,
                master_seed,
                ..
            } => EnvironmentSpec::Iid {
                dim: self.dim,
                family: family
                    .iter()
                    .zip(weights)
                    .map(|(jd, &weight)| FamilyMemberSpec {
                        weight,
                        dist: JumpDistSpec::from_dist(jd),
                    })
                    .collect(),
                master_seed: *master_seed,
                offset,
            },
            super::EnvKind::ColumnAb {
                prob_a,
                master_seed,
                ..
            } => EnvironmentSpec::ColumnAb {
                prob_a: *prob_a,
                master_seed: *master_seed,
                offset,
            },
        }
    }
}

impl Serialize for JumpDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        JumpDistSpec::from_dist(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JumpDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = JumpDistSpec::deserialize(deserializer)?;
        let dim = spec
            .entries
            .first()
            .map(|e| e.disp.len())
            .ok_or_else(|| serde::de::Error::custom("empty support"))?;
        spec.build(dim).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_json() {
        let text = r#"{
            "kind": "periodic", "dim": 1, "extents": [2],
            "table": [
                {"entries": [{"disp": [1], "prob": 0.7}, {"disp": [-1], "prob": 0.3}]},
                {"entries": [{"disp": [1], "prob": 0.3}, {"disp": [-1], "prob": 0.7}]}
            ]
        }"#;
        let spec: EnvironmentSpec = serde_json::from_str(text).unwrap();
        let env = spec.build().unwrap();
        let serialized = serde_json::to_string(&env.to_spec()).unwrap();
        let reparsed: EnvironmentSpec = serde_json::from_str(&serialized).unwrap();
        let env2 = reparsed.build().unwrap();
        assert_eq!(env, env2);
        assert!(env.has_exact_probs());
    }

    #[test]
    fn iid_and_column_specs_build() {
        let iid: EnvironmentSpec = serde_json::from_str(
            r#"{"kind": "iid", "dim": 1, "master_seed": 5,
                "family": [{"weight": 1.0,
                            "dist": {"entries": [{"disp": [1], "prob": 0.5},
                                                  {"disp": [-1], "prob": 0.5}]}}]}"#,
        )
        .unwrap();
        assert!(iid.build().is_ok());

        let ab: EnvironmentSpec =
            serde_json::from_str(r#"{"kind": "column_ab", "prob_a": 0.5, "master_seed": 1}"#)
                .unwrap();
        let env = ab.build().unwrap();
        assert_eq!(env.dim(), 2);
    }

    #[test]
    fn bad_specs_are_rejected() {
        let missing_mass: EnvironmentSpec = serde_json::from_str(
            r#"{"kind": "periodic", "dim": 1, "extents": [1],
                "table": [{"entries": [{"disp": [1], "prob": 0.5}]}]}"#,
        )
        .unwrap();
        assert!(missing_mass.build().is_err());
    }
}
