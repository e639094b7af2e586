//! Outcome records shared by every verification routine.

use serde::{Deserialize, Serialize};

use crate::expr::{SamplePoint, ZeroTest};

/// One named identity tested on the sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub passed: bool,
    #[serde(with = "lenient_f64")]
    pub max_residual: f64,
    pub witness: Option<SamplePoint>,
}

impl Part {
    pub fn new(name: impl Into<String>, test: ZeroTest) -> Self {
        Part {
            name: name.into(),
            passed: test.passed,
            max_residual: test.max_residual,
            witness: test.witness,
        }
    }

    /// A part that passes when `test` fails, e.g. "this field is not zero".
    /// The reported residual is the size that was found.
    pub fn nonzero(name: impl Into<String>, test: ZeroTest) -> Self {
        Part {
            name: name.into(),
            passed: !test.passed,
            max_residual: test.max_residual,
            witness: test.witness,
        }
    }

    /// Scalar comparison against a tolerance, without sampling.
    pub fn scalar(
        name: impl Into<String>,
        residual: f64,
        tol: f64,
        witness: Option<SamplePoint>,
    ) -> Self {
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        Part {
            name: name.into(),
            passed: residual < tol,
            max_residual: residual,
            witness,
        }
    }
}

/// Result of a verification routine: the conjunction of its parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub passed: bool,
    #[serde(with = "lenient_f64")]
    pub max_residual: f64,
    pub witness: Option<SamplePoint>,
    pub parts: Vec<Part>,
}

impl Outcome {
    pub fn from_parts(parts: Vec<Part>) -> Self {
        let passed = parts.iter().all(|p| p.passed);
        // the witness comes from the first failing part, else from the worst one
        let lead = parts.iter().find(|p| !p.passed).or_else(|| {
            parts
                .iter()
                .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        });
        let max_residual = parts.iter().map(|p| p.max_residual).fold(0.0, f64::max);
        let witness = lead.and_then(|p| p.witness.clone());
        Outcome {
            passed,
            max_residual,
            witness,
            parts,
        }
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }
}

/// JSON has no infinities or NaN; those are written as strings.
pub mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
