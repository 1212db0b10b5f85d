//! Seeded parameter scans. Sample seeds come from one generator, the samples
//! run in parallel and the records are kept in sample order.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use anyhow::{bail, Result};
use bell_core::families::{
    boundary_sample, tilted_chsh, tilted_realization, weighted_xor_game, TiltedPoint,
};
use bell_core::ow::ow_report;
use bell_core::quantum::Steering;
use bell_core::scenario::evaluate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::report::ScanRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanKind {
    /// Boundary points of the unbiased three-parameter family.
    ThreeParam,
    /// Tilted-CHSH points with θ uniform in (0, π/4].
    Tilted,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::ThreeParam => "three-param",
            ScanKind::Tilted => "tilted",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ScanKind::ThreeParam => &["a00", "a01", "a10"],
            ScanKind::Tilted => &["theta", "alpha"],
        }
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct ScanSummary {
    pub kind: String,
    pub samples: usize,
    pub tol: f64,
    pub params: Vec<String>,
    pub all_ow: bool,
    pub worst_gap: f64,
    pub records: Vec<ScanRecord>,
}

fn sample(kind: ScanKind, index: usize, seed: u64, tol: f64, timing: bool) -> Result<ScanRecord> {
    let t0 = Instant::now();
    let (params, expr, r) = match kind {
        ScanKind::ThreeParam => {
            let p = boundary_sample(seed);
            (
                p.angles[..3].to_vec(),
                weighted_xor_game(&p)?,
                p.realization(),
            )
        }
        ScanKind::Tilted => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let theta = FRAC_PI_4 * (1.0 - rng.gen::<f64>());
            let p = TiltedPoint::new(theta)?;
            (
                vec![p.theta, p.alpha],
                tilted_chsh(&p, 1.0),
                tilted_realization(&p),
            )
        }
    };
    let rep = ow_report(&expr, &r, &Steering::a_to_b(), tol)?;
    let value = evaluate(&expr, &r.behavior()?)?;
    Ok(ScanRecord {
        index,
        seed: Some(seed),
        params,
        value,
        max_gap: rep.max_gap(),
        verdict: rep.verdict,
        wall_ms: timing.then(|| t0.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn run(
    kind: ScanKind,
    samples: usize,
    seed: u64,
    tol: f64,
    timing: bool,
) -> Result<ScanSummary> {
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..samples).map(|_| rng.gen()).collect();
    let records = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| sample(kind, i, s, tol, timing))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanSummary {
        kind: kind.name().into(),
        samples,
        tol,
        params: kind.param_names().iter().map(|s| s.to_string()).collect(),
        all_ow: records.iter().all(|r| r.verdict),
        worst_gap: records
            .iter()
            .map(|r| r.max_gap)
            .fold(f64::NEG_INFINITY, f64::max),
        records,
    })
}

pub fn verdict_label(ow: bool) -> &'static str {
    if ow {
        "OW"
    } else {
        "not-OW"
    }
}

/// Header `seed,<params>,value,max_gap,verdict[,wall_ms]`.
pub fn to_csv(s: &ScanSummary) -> Result<String> {
    let timing = s.records.iter().any(|r| r.wall_ms.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed".to_string()];
    header.extend(s.params.iter().cloned());
    header.extend(["value", "max_gap", "verdict"].map(String::from));
    if timing {
        header.push("wall_ms".into());
    }
    w.write_record(&header)?;
    for r in &s.records {
        let mut row = vec![r.seed.map(|v| v.to_string()).unwrap_or_default()];
        row.extend(r.params.iter().map(|p| p.to_string()));
        row.push(r.value.to_string());
        row.push(r.max_gap.to_string());
        row.push(verdict_label(r.verdict).into());
        if let Some(ms) = r.wall_ms {
            row.push(format!("{ms:.3}"));
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
