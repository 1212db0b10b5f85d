//! Tables, realization files and named fixtures.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use bell_core::cglmp::{gd_game, optimal_state, psi_gamma_realization, zohren_gill};
use bell_core::families::{
    boundary_sample, canonical_chsh_realization, cglmp2_zg, chsh_xor, counterexample_gamma_family,
    tilted_chsh, tilted_chsh_prime, tilted_family, tilted_realization, weighted_xor_game,
    BoundaryPoint3Param, CounterExample, TiltedPoint,
};
use bell_core::linalg::{c, ComplexMatrix, C64};
use bell_core::mermin::{ghz_realization, mermin_expression};
use bell_core::ow::GammaFamily;
use bell_core::quantum::{Measurement, Realization, Steering};
use bell_core::seesaw::{seesaw_maximize, SeesawConfig};
use bell_core::table::parse_table_as;
use bell_core::{BellExpression, Scenario};
use serde::{Deserialize, Serialize};

/// `mA,mB,nA,nB`.
pub fn parse_scenario(s: &str) -> Result<Scenario> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad scenario entry {t:?}"))
        })
        .collect::<Result<_>>()?;
    let [ma, mb, na, nb] = v[..] else {
        bail!("scenario must be mA,mB,nA,nB, got {s:?}");
    };
    Ok(Scenario::bipartite(ma, mb, na, nb)?)
}

pub fn read_table(path: &Path, scenario: Option<&str>) -> Result<BellExpression> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let e = match scenario {
        Some(s) => parse_table_as(&text, &parse_scenario(s)?)?,
        None => bell_core::table::parse_table(&text)?,
    };
    Ok(e.with_label(path.display().to_string()))
}

type Cx = [f64; 2];

fn to_c(v: &Cx) -> C64 {
    c(v[0], v[1])
}

fn from_c(z: C64) -> Cx {
    [z.re, z.im]
}

/// A measurement given either as projectors or as a labeled basis.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum MeasurementJson {
    Projectors {
        projectors: Vec<Vec<Vec<Cx>>>,
    },
    Basis {
        basis: Vec<Vec<Cx>>,
        labels: Option<Vec<usize>>,
        outcomes: Option<usize>,
    },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RealizationJson {
    pub dims: Vec<usize>,
    pub state: Vec<Cx>,
    /// `measurements[party][input]`.
    pub measurements: Vec<Vec<MeasurementJson>>,
}

impl RealizationJson {
    pub fn to_realization(&self) -> Result<Realization> {
        let state = self.state.iter().map(to_c).collect();
        let mut ms = Vec::new();
        for party in &self.measurements {
            let mut v = Vec::new();
            for m in party {
                v.push(match m {
                    MeasurementJson::Projectors { projectors } => {
                        let ps = projectors
                            .iter()
                            .map(|p| {
                                ComplexMatrix::from_vec(p.iter().flatten().map(to_c).collect())
                            })
                            .collect::<std::result::Result<Vec<_>, _>>()?;
                        Measurement::new(ps)?
                    }
                    MeasurementJson::Basis {
                        basis,
                        labels,
                        outcomes,
                    } => {
                        let b: Vec<Vec<C64>> =
                            basis.iter().map(|k| k.iter().map(to_c).collect()).collect();
                        match labels {
                            Some(l) => {
                                Measurement::from_labeled_basis(&b, l, outcomes.unwrap_or(b.len()))?
                            }
                            None => Measurement::from_basis(&b)?,
                        }
                    }
                });
            }
            ms.push(v);
        }
        Ok(Realization::new(self.dims.clone(), state, ms)?)
    }

    pub fn from_realization(r: &Realization) -> Self {
        let matrix = |m: &ComplexMatrix| -> Vec<Vec<Cx>> {
            (0..m.dim())
                .map(|i| (0..m.dim()).map(|j| from_c(m.get(i, j))).collect())
                .collect()
        };
        RealizationJson {
            dims: r.dims().to_vec(),
            state: r.state().iter().map(|&z| from_c(z)).collect(),
            measurements: r
                .measurements()
                .iter()
                .map(|party| {
                    party
                        .iter()
                        .map(|m| MeasurementJson::Projectors {
                            projectors: m.projectors().iter().map(matrix).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn read_realization(path: &Path) -> Result<Realization> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: RealizationJson =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    j.to_realization()
}

/// Named expression with its reference realization and natural direction.
pub struct Fixture {
    pub expr: BellExpression,
    pub realization: Realization,
    pub direction: Steering,
    /// Present for families with a free Γ.
    pub gamma_family: Option<GammaFamily>,
}

#[derive(Clone, Debug, Default)]
pub struct FixtureParams {
    pub gamma: Option<f64>,
    pub theta: Option<f64>,
    pub angles: Option<Vec<f64>>,
    pub seed: u64,
    pub restarts: usize,
    pub d: Option<usize>,
}

pub const FAMILIES: &[&str] = &[
    "chsh-xor",
    "cglmp2",
    "c1",
    "c2",
    "three-param",
    "tilted",
    "tilted-prime",
    "cglmp-zg",
    "cglmp-gd",
    "cglmp-psi",
    "mermin",
];

pub fn three_param_point(p: &FixtureParams) -> Result<BoundaryPoint3Param> {
    match &p.angles {
        Some(a) if a.len() == 3 => Ok(BoundaryPoint3Param::new(a[0], a[1], a[2])?),
        Some(a) => bail!("--angles needs three values a00,a01,a10, got {}", a.len()),
        None => Ok(boundary_sample(p.seed)),
    }
}

pub fn tilted_point(p: &FixtureParams) -> Result<TiltedPoint> {
    Ok(TiltedPoint::new(
        p.theta.unwrap_or(std::f64::consts::PI / 8.0),
    )?)
}

pub fn seesaw_config(p: &FixtureParams) -> SeesawConfig {
    SeesawConfig {
        restarts: p.restarts.max(1),
        seed: p.seed,
        ..SeesawConfig::default()
    }
}

pub fn fixture(name: &str, p: &FixtureParams) -> Result<Fixture> {
    let a_to_b = Steering::a_to_b();
    let mut gamma_family = None;
    let (expr, realization, direction) = match name {
        "chsh" | "chsh-xor" => (chsh_xor(), canonical_chsh_realization(), a_to_b),
        "cglmp2" => (cglmp2_zg(), canonical_chsh_realization(), a_to_b),
        "c1" | "c2" => {
            let which = if name == "c1" {
                CounterExample::C1
            } else {
                CounterExample::C2
            };
            let fam = counterexample_gamma_family(which);
            // The maximizer is recovered at Γ = 0, where the family is the original inequality.
            let r = seesaw_maximize(&fam.at(0.0), [2, 2], &seesaw_config(p))?.realization;
            let e = fam.at(p.gamma.unwrap_or(which.reported_gamma()));
            gamma_family = Some(fam);
            (e, r, a_to_b)
        }
        "three-param" => {
            let pt = three_param_point(p)?;
            (weighted_xor_game(&pt)?, pt.realization(), a_to_b)
        }
        "tilted" => {
            let t = tilted_point(p)?;
            gamma_family = Some(tilted_family(&t));
            (
                tilted_chsh(&t, p.gamma.unwrap_or(1.0)),
                tilted_realization(&t),
                a_to_b,
            )
        }
        "tilted-prime" => {
            let t = tilted_point(p)?;
            (
                tilted_chsh_prime(&t, p.gamma.unwrap_or(1.0))?,
                tilted_realization(&t),
                Steering::b_to_a(),
            )
        }
        "cglmp-zg" | "cglmp-gd" => {
            let d = p.d.unwrap_or(3);
            let e = if name == "cglmp-zg" {
                zohren_gill(d)?
            } else {
                gd_game(d)?
            };
            (e, optimal_state(d)?.realization, a_to_b)
        }
        "cglmp-psi" => (zohren_gill(3)?, psi_gamma_realization()?, a_to_b),
        "mermin" => (mermin_expression(), ghz_realization(), Steering::a_to_bc()),
        _ => {
            return Err(anyhow!(
                "unknown family {name:?}; known: {}",
                FAMILIES.join(", ")
            ))
        }
    };
    Ok(Fixture {
        expr,
        realization,
        direction,
        gamma_family,
    })
}
