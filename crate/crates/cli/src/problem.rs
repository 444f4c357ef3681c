//! The JSON problem file.
//!
//! ```json
//! {
//!   "A": [[2, 0], [0, 1]],
//!   "theta": "sphere",
//!   "h": {"kind": "sparsity", "kappa": 2},
//!   "xbar": [0, 1]
//! }
//! ```

use serde::{Deserialize, Serialize};
use sparsekl::{HKind, ProblemSpec, SymMatrix, ThetaKind};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HSpec {
    ZeroNorm { nu: f64 },
    Sparsity { kappa: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub theta: String,
    pub h: HSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xbar: Option<Vec<f64>>,
}

/// A validated problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub spec: ProblemSpec,
    pub x0: Option<Vec<f64>>,
    pub xbar: Option<Vec<f64>>,
}

fn parse_error(msg: impl Into<String>) -> Failure {
    Failure::new(2, msg)
}

fn check_matrix(a: &[Vec<f64>]) -> Result<(), Failure> {
    let p = a.len();
    if p == 0 {
        return Err(parse_error("\"A\" is empty"));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != p {
            return Err(parse_error(format!("\"A\" row {i} has {} entries, expected {p}", row.len())));
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            if (a[i][j] - a[j][i]).abs() > 1e-12 {
                return Err(parse_error(format!(
                    "\"A\" is not symmetric: A[{i}][{j}] = {} but A[{j}][{i}] = {}",
                    a[i][j], a[j][i]
                )));
            }
        }
    }
    Ok(())
}

fn check_vector(name: &str, v: &Option<Vec<f64>>, p: usize) -> Result<(), Failure> {
    match v {
        Some(v) if v.len() != p => {
            Err(parse_error(format!("\"{name}\" has {} entries, expected {p}", v.len())))
        }
        _ => Ok(()),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| parse_error(format!("problem file: {e}")))
    }

    pub fn validate(self) -> Result<Loaded, Failure> {
        check_matrix(&self.a)?;
        let p = self.a.len();
        let theta: ThetaKind = self.theta.parse().map_err(|_| {
            parse_error(format!(
                "\"theta\" must be one of zero, sphere, simplex, nonneg, sphere_nonneg; got {:?}",
                self.theta
            ))
        })?;
        let h = match self.h {
            HSpec::ZeroNorm { nu } => HKind::ZeroNorm { nu },
            HSpec::Sparsity { kappa } => HKind::SparsityBall { kappa },
        };
        check_vector("x0", &self.x0, p)?;
        check_vector("xbar", &self.xbar, p)?;
        let a = SymMatrix::from_rows(&self.a).map_err(|e| parse_error(format!("\"A\": {e}")))?;
        let spec = ProblemSpec::new(a, theta, h).map_err(|e| parse_error(format!("\"h\": {e}")))?;
        Ok(Loaded { spec, x0: self.x0, xbar: self.xbar })
    }

    pub fn from_spec(spec: &ProblemSpec, xbar: Option<Vec<f64>>) -> Self {
        Self {
            a: spec.a().to_rows(),
            theta: spec.theta().name().to_string(),
            h: match spec.h() {
                HKind::ZeroNorm { nu } => HSpec::ZeroNorm { nu },
                HKind::SparsityBall { kappa } => HSpec::Sparsity { kappa },
            },
            x0: None,
            xbar,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn load(path: &std::path::Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_error(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::parse(&text)?.validate()
}

/// Parses `1.5,-2,3e-4` with a dot decimal separator regardless of locale.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(format!("vector entry {i} ({t:?}) is not a finite number")))
        })
        .collect()
}
