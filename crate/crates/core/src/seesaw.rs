//! See-saw maximization of a bipartite expression over projective
//! measurements and pure states of fixed local dimensions.
//!
//! Each restart alternates three exact updates: the state becomes the top
//! eigenvector of the Bell operator, then each party's measurements are
//! re-optimized against the other's. Every step can only raise the value.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, fix_phase, hermitian_eig, inner, re, ComplexMatrix, C64, MAX_DIM};
use crate::quantum::{random_basis, Measurement, Realization};
use crate::{BellExpression, Error, Result};

/// Slack allowed for a step to count as nondecreasing.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once a full round improves the value by less than this.
    pub stagnation: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            restarts: 50,
            max_iters: 20_000,
            stagnation: 1e-15,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeesawRun {
    pub restart: usize,
    pub value: f64,
    pub iterations: usize,
    /// Most negative single-step change seen; `≥ −MONOTONE_SLACK` in a sound run.
    pub worst_step: f64,
    pub realization: Realization,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeesawResult {
    pub value: f64,
    pub best_restart: usize,
    /// Canonicalized best realization.
    pub realization: Realization,
    pub values: Vec<f64>,
}

/// A party's measurement for one input: orthonormal basis plus outcome labels.
#[derive(Clone, Debug)]
struct Basis {
    vectors: Vec<Vec<C64>>,
    labels: Vec<usize>,
}

impl Basis {
    fn projectors(&self, outcomes: usize) -> Result<Vec<ComplexMatrix>> {
        let d = self.vectors.len();
        let mut out = vec![ComplexMatrix::zeros(d)?; outcomes];
        for (v, &l) in self.vectors.iter().zip(&self.labels) {
            out[l].add_scaled_in_place(&ComplexMatrix::outer(v, v)?, re(1.0))?;
        }
        Ok(out)
    }

    fn score(&self, m: &[ComplexMatrix]) -> Result<f64> {
        let mut s = 0.0;
        for (v, &l) in self.vectors.iter().zip(&self.labels) {
            s += m[l].expectation(v)?.re;
        }
        Ok(s)
    }
}

struct Problem<'a> {
    expr: &'a BellExpression,
    dims: [usize; 2],
    inputs: [usize; 2],
    outputs: [usize; 2],
}

impl Problem<'_> {
    /// `Σ_{y,b} V Π^y_b` for fixed `(x, a)` of `party`, acting on the other party.
    fn partner_operator(
        &self,
        party: usize,
        x: usize,
        a: usize,
        proj: &[Vec<Vec<ComplexMatrix>>],
    ) -> Result<ComplexMatrix> {
        let other = 1 - party;
        let mut m = ComplexMatrix::zeros(self.dims[other])?;
        for y in 0..self.inputs[other] {
            for b in 0..self.outputs[other] {
                let (outs, ins) = if party == 0 {
                    ([a, b], [x, y])
                } else {
                    ([b, a], [y, x])
                };
                let v = self.expr.coeff(&outs, &ins);
                if v != 0.0 {
                    m.add_scaled_in_place(&proj[other][y][b], re(v))?;
                }
            }
        }
        Ok(m)
    }

    fn bell_operator(&self, proj: &[Vec<Vec<ComplexMatrix>>]) -> Result<ComplexMatrix> {
        let mut w = ComplexMatrix::zeros(self.dims[0] * self.dims[1])?;
        for x in 0..self.inputs[0] {
            for a in 0..self.outputs[0] {
                let b_hat = self.partner_operator(0, x, a, proj)?;
                w.add_scaled_in_place(&proj[0][x][a].kron(&b_hat)?, re(1.0))?;
            }
        }
        Ok(w)
    }

    /// `M` with `Tr(Π M) = ⟨ψ|Π ⊗ op|ψ⟩` on `party`'s space (or `op ⊗ Π`).
    fn contract(&self, party: usize, psi: &[C64], op: &ComplexMatrix) -> Result<ComplexMatrix> {
        let [da, db] = self.dims;
        let d = self.dims[party];
        let mut m = ComplexMatrix::zeros(d)?;
        if party == 0 {
            // φ = (I ⊗ op)ψ
            let mut phi = vec![c(0.0, 0.0); da * db];
            for i in 0..da {
                let col = op.apply(&psi[i * db..(i + 1) * db])?;
                phi[i * db..(i + 1) * db].copy_from_slice(&col);
            }
            for i in 0..da {
                for ip in 0..da {
                    let mut s = c(0.0, 0.0);
                    for j in 0..db {
                        s += phi[i * db + j] * psi[ip * db + j].conj();
                    }
                    m.set(i, ip, s);
                }
            }
        } else {
            let mut phi = vec![c(0.0, 0.0); da * db];
            for j in 0..db {
                let col: Vec<C64> = (0..da).map(|i| psi[i * db + j]).collect();
                let out = op.apply(&col)?;
                for i in 0..da {
                    phi[i * db + j] = out[i];
                }
            }
            for j in 0..db {
                for jp in 0..db {
                    let mut s = c(0.0, 0.0);
                    for i in 0..da {
                        s += phi[i * db + j] * psi[i * db + jp].conj();
                    }
                    m.set(j, jp, s);
                }
            }
        }
        Ok(m.hermitian_part())
    }
}

/// Best basis for a single input given per-outcome operators `m`.
fn improve_basis(basis: &mut Basis, m: &[ComplexMatrix]) -> Result<()> {
    let d = basis.vectors.len();
    if m.len() == 2 {
        let diff = m[0].try_sub(&m[1])?;
        let eig = hermitian_eig(&diff)?;
        basis.vectors = eig.vectors.clone();
        basis.labels = eig
            .values
            .iter()
            .map(|&v| if v > 0.0 { 0 } else { 1 })
            .collect();
        return Ok(());
    }
    // Pairwise exact rotations; each one can only increase the score.
    for _sweep in 0..50 {
        let before = basis.score(m)?;
        for i in 0..d {
            for j in (i + 1)..d {
                let (li, lj) = (basis.labels[i], basis.labels[j]);
                if li == lj {
                    continue;
                }
                let diff = m[li].try_sub(&m[lj])?;
                let (u, v) = (basis.vectors[i].clone(), basis.vectors[j].clone());
                let du = diff.apply(&u)?;
                let dv = diff.apply(&v)?;
                let h = ComplexMatrix::from_vec(vec![
                    inner(&u, &du),
                    inner(&u, &dv),
                    inner(&v, &du),
                    inner(&v, &dv),
                ])?
                .hermitian_part();
                let eig = hermitian_eig(&h)?;
                let top = eig.top_vector();
                let (p, q) = (top[0], top[1]);
                basis.vectors[i] = (0..d).map(|k| u[k] * p + v[k] * q).collect();
                basis.vectors[j] = (0..d).map(|k| -u[k] * q.conj() + v[k] * p.conj()).collect();
            }
        }
        if basis.score(m)? - before < 1e-15 {
            break;
        }
    }
    Ok(())
}

fn random_start(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Result<Basis> {
    Ok(Basis {
        vectors: random_basis(rng, d)?,
        labels: (0..d).map(|k| k % n).collect(),
    })
}

fn check_problem(expr: &BellExpression, dims: [usize; 2]) -> Result<Problem<'_>> {
    let s = expr.scenario();
    if s.parties() != 2 {
        return Err(Error::UnsupportedScenario {
            required: "bipartite",
        });
    }
    for p in 0..2 {
        if dims[p] < s.outputs()[p] {
            return Err(Error::InvalidParameter(format!(
                "party {p}: dimension {} is below the outcome count {}",
                dims[p],
                s.outputs()[p]
            )));
        }
    }
    if dims[0] * dims[1] > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: dims[0] * dims[1],
            max: MAX_DIM,
        });
    }
    Ok(Problem {
        expr,
        dims,
        inputs: [s.inputs()[0], s.inputs()[1]],
        outputs: [s.outputs()[0], s.outputs()[1]],
    })
}

/// One restart; its random stream depends only on `(cfg.seed, restart)`.
pub fn seesaw_restart(
    expr: &BellExpression,
    dims: [usize; 2],
    cfg: &SeesawConfig,
    restart: usize,
) -> Result<SeesawRun> {
    let pb = check_problem(expr, dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut bases: Vec<Vec<Basis>> = Vec::new();
    for p in 0..2 {
        let mut v = Vec::new();
        for _ in 0..pb.inputs[p] {
            v.push(random_start(&mut rng, dims[p], pb.outputs[p])?);
        }
        bases.push(v);
    }
    let projectors = |bases: &Vec<Vec<Basis>>| -> Result<Vec<Vec<Vec<ComplexMatrix>>>> {
        (0..2)
            .map(|p| {
                bases[p]
                    .iter()
                    .map(|b| b.projectors(pb.outputs[p]))
                    .collect()
            })
            .collect()
    };

    let mut value = f64::NEG_INFINITY;
    let mut worst_step = 0.0f64;
    let mut iterations = 0;
    let mut step = |new: f64, value: &mut f64| {
        if value.is_finite() {
            worst_step = worst_step.min(new - *value);
        }
        *value = new;
    };
    while iterations < cfg.max_iters {
        iterations += 1;
        let start = value;
        let proj = projectors(&bases)?;
        let eig = hermitian_eig(&pb.bell_operator(&proj)?)?;
        let psi = eig.top_vector().to_vec();
        step(eig.max(), &mut value);
        for p in 0..2 {
            let proj = projectors(&bases)?;
            let mut total = 0.0;
            for x in 0..pb.inputs[p] {
                let ms: Vec<ComplexMatrix> = (0..pb.outputs[p])
                    .map(|a| pb.contract(p, &psi, &pb.partner_operator(p, x, a, &proj)?))
                    .collect::<Result<_>>()?;
                improve_basis(&mut bases[p][x], &ms)?;
                total += bases[p][x].score(&ms)?;
            }
            step(total, &mut value);
        }
        if start.is_finite() && value - start < cfg.stagnation {
            break;
        }
    }
    // Final state for the final measurements.
    let proj = projectors(&bases)?;
    let eig = hermitian_eig(&pb.bell_operator(&proj)?)?;
    let mut psi = eig.top_vector().to_vec();
    fix_phase(&mut psi);
    step(eig.max(), &mut value);

    let mut ms = Vec::new();
    for p in 0..2 {
        let mut v = Vec::new();
        for b in &bases[p] {
            v.push(Measurement::new(b.projectors(pb.outputs[p])?)?);
        }
        ms.push(v);
    }
    let realization = Realization::new(vec![dims[0], dims[1]], psi, ms)?;
    Ok(SeesawRun {
        restart,
        value,
        iterations,
        worst_step,
        realization,
    })
}

/// Picks the best run; earlier restarts win ties within `MONOTONE_SLACK`.
pub fn best_run(runs: &[SeesawRun]) -> Option<&SeesawRun> {
    let mut best: Option<&SeesawRun> = None;
    for r in runs {
        match best {
            Some(b) if r.value <= b.value + MONOTONE_SLACK => {}
            _ => best = Some(r),
        }
    }
    best
}

/// Assembles a result from runs produced in any order.
pub fn collect_runs(mut runs: Vec<SeesawRun>) -> Result<SeesawResult> {
    runs.sort_by_key(|r| r.restart);
    let best = best_run(&runs).ok_or_else(|| Error::InvalidParameter("no restarts".into()))?;
    Ok(SeesawResult {
        value: best.value,
        best_restart: best.restart,
        realization: best.realization.canonicalize()?,
        values: runs.iter().map(|r| r.value).collect(),
    })
}

pub fn seesaw_maximize(
    expr: &BellExpression,
    dims: [usize; 2],
    cfg: &SeesawConfig,
) -> Result<SeesawResult> {
    let runs = (0..cfg.restarts)
        .map(|k| seesaw_restart(expr, dims, cfg, k))
        .collect::<Result<Vec<_>>>()?;
    collect_runs(runs)
}
