//! Serializable mirrors of the core reports. Field order is fixed by the
//! struct layout, so output is stable for a given input.

use bell_core::ns::ConstantCertificate;
use bell_core::ow::{BoundLineCheck, GammaSolve, OwReport, SearchOutcome};
use bell_core::quantum::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Header {
    pub tool: String,
    pub schema: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Header {
            tool: "bell".into(),
            schema: SCHEMA_VERSION,
            command: command.into(),
            seed,
        }
    }
}

/// Context indices: a scalar for one steering party, a list otherwise.
fn indices(v: &[usize]) -> Value {
    if v.len() == 1 {
        Value::from(v[0])
    } else {
        Value::from(v.to_vec())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ContextJson {
    pub x: Value,
    pub a: Value,
    pub weight: f64,
    pub expectation: Option<f64>,
    pub lambda_max: f64,
    pub gap: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OwReportJson {
    pub direction: String,
    pub tol: f64,
    pub value: f64,
    pub contexts: Vec<ContextJson>,
    pub max_gap: Option<f64>,
    pub verdict: bool,
}

impl From<&OwReport> for OwReportJson {
    fn from(r: &OwReport) -> Self {
        let max_gap = r.max_gap();
        OwReportJson {
            direction: r.direction.label(),
            tol: r.tol,
            value: r.value,
            contexts: r
                .contexts
                .iter()
                .map(|c| ContextJson {
                    x: indices(&c.context.inputs),
                    a: indices(&c.context.outputs),
                    weight: c.weight,
                    expectation: c.expectation,
                    lambda_max: c.lambda_max,
                    gap: c.gap,
                })
                .collect(),
            max_gap: max_gap.is_finite().then_some(max_gap),
            verdict: r.verdict,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CertificateJson {
    pub constant: bool,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub residual: Option<f64>,
}

impl From<Option<&ConstantCertificate>> for CertificateJson {
    fn from(c: Option<&ConstantCertificate>) -> Self {
        let w = c.and_then(|c| c.witness).map(|w| w.as_array());
        CertificateJson {
            constant: c.is_some(),
            k: c.map(|c| c.k),
            alpha: w.map(|w| w[0]),
            beta: w.map(|w| w[1]),
            gamma: w.map(|w| w[2]),
            delta: w.map(|w| w[3]),
            residual: c.map(|c| c.residual),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GammaJson {
    pub gamma: Option<f64>,
    pub candidates: Vec<CandidateJson>,
    pub spread: Option<f64>,
    pub diagnostic: Option<String>,
    pub report: Option<OwReportJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CandidateJson {
    pub x: Value,
    pub a: Value,
    pub gamma: f64,
}

fn candidate(c: &(Context, f64)) -> CandidateJson {
    CandidateJson {
        x: indices(&c.0.inputs),
        a: indices(&c.0.outputs),
        gamma: c.1,
    }
}

impl From<&GammaSolve> for GammaJson {
    fn from(g: &GammaSolve) -> Self {
        GammaJson {
            gamma: g.gamma,
            candidates: g.candidates.iter().map(candidate).collect(),
            spread: g.spread.is_finite().then_some(g.spread),
            diagnostic: g.diagnostic.clone(),
            report: g.report.as_ref().map(OwReportJson::from),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SearchJson {
    pub found: bool,
    pub weights: [f64; 4],
    pub k: f64,
    pub rank: usize,
    pub residual: f64,
    pub game: Option<Vec<Vec<f64>>>,
    pub diagnostic: Option<String>,
    pub report: Option<OwReportJson>,
}

impl From<&SearchOutcome> for SearchJson {
    fn from(s: &SearchOutcome) -> Self {
        SearchJson {
            found: s.game.is_some(),
            weights: s.weights.as_array(),
            k: s.k,
            rank: s.rank,
            residual: s.residual,
            game: s.game.as_ref().map(|g| table_rows(g)),
            diagnostic: s.diagnostic.clone(),
            report: s.report.as_ref().map(OwReportJson::from),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LineJson {
    pub x: Value,
    pub a: Value,
    pub scale: f64,
    pub shift: f64,
    pub residual: f64,
    pub lambda: f64,
    pub expectation: Option<f64>,
}

impl From<&BoundLineCheck> for LineJson {
    fn from(l: &BoundLineCheck) -> Self {
        LineJson {
            x: indices(&l.context.inputs),
            a: indices(&l.context.outputs),
            scale: l.scale,
            shift: l.shift,
            residual: l.residual,
            lambda: l.lambda,
            expectation: l.expectation,
        }
    }
}

/// Rows of the bipartite block table.
pub fn table_rows(e: &bell_core::BellExpression) -> Vec<Vec<f64>> {
    match e.table_shape() {
        Ok((rows, cols)) => (0..rows)
            .map(|r| (0..cols).map(|c| e.table_entry(r, c)).collect())
            .collect(),
        Err(_) => vec![e.coeffs().to_vec()],
    }
}

/// One row of a parameter scan.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub index: usize,
    pub seed: Option<u64>,
    pub params: Vec<f64>,
    pub value: f64,
    pub max_gap: f64,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}
