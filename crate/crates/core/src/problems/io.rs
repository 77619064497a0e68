//! JSON instance files.
//!
//! Every document carries a schema version and a `kind` tag. Reals are
//! written with shortest round-trip formatting, so save/load is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, ProblemError};
use crate::problems::knapsack::KnapsackInstance;
use crate::problems::qubo::QuboInstance;
use crate::problems::simplex::SimplexQpInstance;
use crate::problems::xor3::IsingXorInstance;

pub const INSTANCE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Qubo(QuboInstance),
    Knapsack(KnapsackInstance),
    IsingXor(IsingXorInstance),
    SimplexQp(SimplexQpInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Qubo(_) => "qubo",
            Instance::Knapsack(_) => "knapsack",
            Instance::IsingXor(_) => "ising3xor",
            Instance::SimplexQp(_) => "simplexqp",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Qubo(q) => q.n(),
            Instance::Knapsack(k) => k.n(),
            Instance::IsingXor(x) => x.n(),
            Instance::SimplexQp(s) => s.n(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDocument {
            schema_version: INSTANCE_SCHEMA_VERSION,
            payload: Payload::from(self),
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceParseError> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        if doc.schema_version != INSTANCE_SCHEMA_VERSION {
            return Err(InstanceParseError::Schema(doc.schema_version));
        }
        Ok(doc.payload.into_instance()?)
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            InstanceParseError::Json(source) => BenchError::Json {
                path: path.to_path_buf(),
                source,
            },
            InstanceParseError::Schema(v) => BenchError::Config(format!(
                "{}: unsupported instance schema version {v}",
                path.display()
            )),
            InstanceParseError::Problem(p) => BenchError::Problem(p),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceParseError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported instance schema version {0}")]
    Schema(u32),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Serialize, Deserialize)]
struct InstanceDocument {
    schema_version: u32,
    #[serde(flatten)]
    payload: Payload,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Payload {
    Qubo {
        n: usize,
        /// Row-major upper triangle including the diagonal.
        upper: Vec<f64>,
    },
    Knapsack {
        n: usize,
        capacity: f64,
        weights: Vec<f64>,
        values: Vec<f64>,
    },
    #[serde(rename = "ising3xor")]
    IsingXor {
        n: usize,
        clauses: Vec<ClauseRecord>,
        a: Vec<Vec<u8>>,
        b: Vec<u8>,
        planted: Vec<i8>,
    },
    #[serde(rename = "simplexqp")]
    SimplexQp {
        n: usize,
        upper: Vec<f64>,
        step_sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClauseRecord {
    vars: [usize; 3],
    coefficient: i64,
}

fn bits_to_u8(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| b as u8).collect()
}

fn u8_to_bits(values: &[u8]) -> Result<Vec<bool>, ProblemError> {
    values
        .iter()
        .map(|&v| match v {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(ProblemError::InvalidInstance(format!("expected 0 or 1, found {v}"))),
        })
        .collect()
}

impl From<&Instance> for Payload {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Qubo(q) => Payload::Qubo {
                n: q.n(),
                upper: q.upper_triangle(),
            },
            Instance::Knapsack(k) => Payload::Knapsack {
                n: k.n(),
                capacity: k.capacity(),
                weights: k.weights().to_vec(),
                values: k.values().to_vec(),
            },
            Instance::IsingXor(x) => Payload::IsingXor {
                n: x.n(),
                clauses: x
                    .clauses()
                    .iter()
                    .map(|c| ClauseRecord {
                        vars: c.vars,
                        coefficient: c.coefficient,
                    })
                    .collect(),
                a: x.a_matrix().iter().map(|row| bits_to_u8(row)).collect(),
                b: bits_to_u8(x.b_vector()),
                planted: x.planted().to_vec(),
            },
            Instance::SimplexQp(s) => Payload::SimplexQp {
                n: s.n(),
                upper: s.matrix().upper_triangle(),
                step_sigma: s.step_sigma(),
            },
        }
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), ProblemError> {
    if expected == found {
        Ok(())
    } else {
        Err(ProblemError::DimensionMismatch { expected, found })
    }
}

impl Payload {
    fn into_instance(self) -> Result<Instance, ProblemError> {
        Ok(match self {
            Payload::Qubo { n, upper } => Instance::Qubo(QuboInstance::from_upper_triangle(n, &upper)?),
            Payload::Knapsack {
                n,
                capacity,
                weights,
                values,
            } => {
                check_len(n, weights.len())?;
                Instance::Knapsack(KnapsackInstance::new(capacity, weights, values)?)
            }
            Payload::IsingXor {
                n,
                clauses,
                a,
                b,
                planted,
            } => {
                check_len(n, a.len())?;
                let a = a.iter().map(|row| u8_to_bits(row)).collect::<Result<Vec<_>, _>>()?;
                let inst = IsingXorInstance::from_system(a, u8_to_bits(&b)?)?;
                // the stored clause list and planted state are audit copies;
                // they must agree with what the system implies
                let derived: Vec<ClauseRecord> = inst
                    .clauses()
                    .iter()
                    .map(|c| ClauseRecord {
                        vars: c.vars,
                        coefficient: c.coefficient,
                    })
                    .collect();
                if derived != clauses {
                    return Err(ProblemError::InvalidInstance(
                        "clause list disagrees with the linear system".into(),
                    ));
                }
                if inst.planted() != planted.as_slice() {
                    return Err(ProblemError::InvalidInstance(
                        "planted state disagrees with the linear system".into(),
                    ));
                }
                Instance::IsingXor(inst)
            }
            Payload::SimplexQp { n, upper, step_sigma } => Instance::SimplexQp(SimplexQpInstance::new(
                QuboInstance::from_upper_triangle(n, &upper)?,
                step_sigma,
            )?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use crate::problems::xor3::generate_3r3xor;

    fn round_trip(inst: Instance) {
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn every_kind_round_trips_exactly() {
        let mut rng = RngStream::new(61, 0);
        round_trip(Instance::Qubo(QuboInstance::generate(9, true, &mut rng)));
        round_trip(Instance::Knapsack(
            KnapsackInstance::generate(15, 5000.0, &mut rng).unwrap(),
        ));
        round_trip(Instance::IsingXor(generate_3r3xor(10, 1000, &mut rng).unwrap()));
        round_trip(Instance::SimplexQp(
            SimplexQpInstance::generate(7, 0.1, &mut rng).unwrap(),
        ));
    }

    #[test]
    fn kind_tag_is_present() {
        let mut rng = RngStream::new(62, 0);
        let text = Instance::Qubo(QuboInstance::generate(3, true, &mut rng)).to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "qubo");
        assert_eq!(v["schema_version"], INSTANCE_SCHEMA_VERSION);
        assert_eq!(v["upper"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn tampered_planted_state_is_rejected() {
        let mut rng = RngStream::new(63, 0);
        let text = Instance::IsingXor(generate_3r3xor(8, 1000, &mut rng).unwrap()).to_json();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let first = v["planted"][0].as_i64().unwrap();
        v["planted"][0] = (-first).into();
        assert!(matches!(
            Instance::from_json(&v.to_string()),
            Err(InstanceParseError::Problem(_))
        ));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = r#"{"schema_version": 99, "kind": "qubo", "n": 1, "upper": [1.0]}"#;
        assert!(matches!(
            Instance::from_json(text),
            Err(InstanceParseError::Schema(99))
        ));
    }
}
