//! Saturation reports, the qubit necessary condition, Γ-solving and OW-game
//! search.
//!
//! A Bell expression is an OW-game at a realization when every steered state
//! of nonzero weight reaches the top eigenvalue of its effective operator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{hermitian_eig, re, ComplexMatrix, C64};
use crate::ns::{
    delta_generators, ns_constant_value, ns_equivalent, ConstantCertificate, DeltaParams,
};
use crate::quantum::{effective_operator, Context, Realization, Steering};
use crate::scenario::evaluate;
use crate::{BellExpression, Error, Result};

/// Default absolute tolerance on gaps.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Agreement required between per-context Γ candidates.
pub const GAMMA_AGREEMENT: f64 = 1e-6;

/// Residual above which the necessary condition counts as violated.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ContextReport {
    pub context: Context,
    pub weight: f64,
    /// `⟨B̂⟩` in the steered state; `None` for zero-weight branches.
    pub expectation: Option<f64>,
    pub lambda_max: f64,
    pub gap: Option<f64>,
}

impl ContextReport {
    pub fn is_zero_weight(&self) -> bool {
        self.expectation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OwReport {
    pub direction: Steering,
    pub tol: f64,
    /// `I(P)` at the realization.
    pub value: f64,
    pub contexts: Vec<ContextReport>,
    pub verdict: bool,
}

impl OwReport {
    /// Largest gap over nonzero-weight contexts.
    pub fn max_gap(&self) -> f64 {
        self.contexts
            .iter()
            .filter_map(|c| c.gap)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn zero_weight_contexts(&self) -> Vec<&Context> {
        self.contexts
            .iter()
            .filter(|c| c.is_zero_weight())
            .map(|c| &c.context)
            .collect()
    }

    pub fn context(&self, ctx: &Context) -> Option<&ContextReport> {
        self.contexts.iter().find(|c| &c.context == ctx)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

pub fn ow_report(
    expr: &BellExpression,
    r: &Realization,
    direction: &Steering,
    tol: f64,
) -> Result<OwReport> {
    check_tol(tol)?;
    let scenario = r.scenario()?;
    scenario.ensure_same(expr.scenario())?;
    let value = evaluate(expr, &r.behavior()?)?;
    let mut contexts = Vec::new();
    for ctx in direction.contexts(&scenario) {
        let st = r.steered_state(direction, &ctx)?;
        let op = effective_operator(expr, r, direction, &ctx)?;
        let lambda_max = op.lambda_max();
        let expectation = match &st.rho {
            Some(rho) => Some(op.expectation(rho)?),
            None => None,
        };
        contexts.push(ContextReport {
            context: ctx,
            weight: st.weight,
            expectation,
            lambda_max,
            gap: expectation.map(|e| lambda_max - e),
        });
    }
    let verdict = contexts.iter().filter_map(|c| c.gap).all(|g| g <= tol);
    Ok(OwReport {
        direction: direction.clone(),
        tol,
        value,
        contexts,
        verdict,
    })
}

/// A single printed inequality `Σ ℓ_{yb} P(b|y, a_x) ≤ λ`, with `ℓ` indexed
/// over the steered party as `y·n + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundLine {
    pub context: Context,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundLineCheck {
    pub context: Context,
    /// Fit `B̂ = scale·L̂ + shift·I`.
    pub scale: f64,
    pub shift: f64,
    /// Frobenius norm of `B̂ − scale·L̂ − shift·I`.
    pub residual: f64,
    /// Top eigenvalue of `L̂`.
    pub lambda: f64,
    /// `⟨L̂⟩` in the steered state.
    pub expectation: Option<f64>,
}

impl BoundLineCheck {
    /// The line is an affine rewriting of the effective operator.
    pub fn is_faithful(&self, tol: f64) -> bool {
        self.scale > 0.0 && self.residual <= tol
    }

    pub fn gap(&self) -> Option<f64> {
        self.expectation.map(|e| self.lambda - e)
    }
}

fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Compares printed bound lines with the effective operators of a
/// single-party steering direction.
pub fn check_bound_lines(
    expr: &BellExpression,
    r: &Realization,
    direction: &Steering,
    lines: &[BoundLine],
) -> Result<Vec<BoundLineCheck>> {
    if direction.steered().len() != 1 {
        return Err(Error::UnsupportedScenario {
            required: "single steered party",
        });
    }
    let steered = direction.steered()[0];
    let n = r.scenario()?.outputs()[steered];
    let m = r.scenario()?.inputs()[steered];
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        if line.coeffs.len() != n * m {
            return Err(Error::ShapeMismatch {
                expected: n * m,
                found: line.coeffs.len(),
            });
        }
        let op = effective_operator(expr, r, direction, &line.context)?;
        let d = op.matrix.dim();
        let mut l = ComplexMatrix::zeros(d)?;
        for y in 0..m {
            for b in 0..n {
                l.add_scaled_in_place(r.projector(steered, y, b), re(line.coeffs[y * n + b]))?;
            }
        }
        let id = ComplexMatrix::identity(d)?;
        let (ll, li, ii) = (frob_inner(&l, &l), frob_inner(&l, &id), d as f64);
        let (lb, ib) = (frob_inner(&l, &op.matrix), frob_inner(&id, &op.matrix));
        let det = ll * ii - li * li;
        let (scale, shift) = if det.abs() <= 1e-12 * ll.max(1.0) * ii {
            (1.0, (ib - li) / ii)
        } else {
            ((lb * ii - li * ib) / det, (ll * ib - li * lb) / det)
        };
        let fit = &l.scale_real(scale) + &id.scale_real(shift);
        let residual = (&op.matrix - &fit).frobenius();
        let lambda = hermitian_eig(&l)?.max();
        let st = r.steered_state(direction, &line.context)?;
        let expectation = match &st.rho {
            Some(rho) => Some(l.expectation_in(rho)?.re),
            None => None,
        };
        out.push(BoundLineCheck {
            context: line.context.clone(),
            scale,
            shift,
            residual,
            lambda,
            expectation,
        });
    }
    Ok(out)
}

/// Entries of Bob's outcome-0 projectors in the basis `{|s⟩, |s⊥⟩}` adapted to
/// the steered state `|s⟩`: `p_y = ⟨s|Π^y_0|s⟩`, `q_y = ⟨s|Π^y_0|s⊥⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorParams {
    pub p: [f64; 2],
    pub q: [f64; 2],
}

impl ProjectorParams {
    /// `q₀/q₁` when `q₁ ≠ 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.q[1].abs() > 1e-12).then(|| self.q[0] / self.q[1])
    }
}

fn check_qubit_direction(r: &Realization, direction: &Steering) -> Result<usize> {
    let s = r.scenario()?;
    if direction.steering().len() != 1 || direction.steered().len() != 1 || r.parties() != 2 {
        return Err(Error::UnsupportedScenario {
            required: "bipartite one-way steering",
        });
    }
    let steered = direction.steered()[0];
    if r.dims()[steered] != 2 || s.inputs()[steered] != 2 || s.outputs()[steered] != 2 {
        return Err(Error::NotApplicable(
            "steered party must be a qubit with two binary measurements".into(),
        ));
    }
    Ok(steered)
}

pub fn projector_params(
    r: &Realization,
    direction: &Steering,
    ctx: &Context,
) -> Result<ProjectorParams> {
    let steered = check_qubit_direction(r, direction)?;
    let st = r.steered_state(direction, ctx)?;
    let rho = st
        .rho
        .ok_or_else(|| Error::NotApplicable(format!("context {ctx:?} has zero weight")))?;
    let eig = hermitian_eig(&rho)?;
    if eig.max() < 1.0 - 1e-8 {
        return Err(Error::NotApplicable(format!(
            "steered state for {ctx:?} is not pure (top eigenvalue {})",
            eig.max()
        )));
    }
    let s = eig.top_vector().to_vec();
    let mut perp: Vec<C64> = vec![-s[1].conj(), s[0].conj()];
    let raw = |perp: &[C64], y: usize| -> (f64, C64) {
        let pi = r.projector(steered, y, 0);
        let ps = pi.apply(perp).expect("qubit");
        let ss = pi.apply(&s).expect("qubit");
        let p = (s[0].conj() * ss[0] + s[1].conj() * ss[1]).re;
        let q = s[0].conj() * ps[0] + s[1].conj() * ps[1];
        (p, q)
    };
    let (_, q0) = raw(&perp, 0);
    let (_, q1) = raw(&perp, 1);
    let anchor = if q0.norm() > 1e-12 { q0 } else { q1 };
    if anchor.norm() > 1e-12 {
        let ph = anchor.conj() / anchor.norm();
        for z in perp.iter_mut() {
            *z *= ph;
        }
    }
    let (p0, q0) = raw(&perp, 0);
    let (p1, q1) = raw(&perp, 1);
    if q0.im.abs() > 1e-8 || q1.im.abs() > 1e-8 {
        return Err(Error::NotApplicable(format!(
            "off-diagonal entries cannot be made real simultaneously for {ctx:?} (Im q₁ = {:e})",
            q1.im
        )));
    }
    Ok(ProjectorParams {
        p: [p0, p1],
        q: [q0.re, q1.re],
    })
}

/// `q₀(V_{·0·0} − V_{·1·0}) + q₁(V_{·0·1} − V_{·1·1})` with the steering
/// party's context fixed; vanishes at OW points.
pub fn necessary_residual(
    expr: &BellExpression,
    direction: &Steering,
    ctx: &Context,
    params: &ProjectorParams,
) -> f64 {
    let w = steered_coeffs(expr, direction, ctx);
    params.q[0] * (w(0, 0) - w(1, 0)) + params.q[1] * (w(0, 1) - w(1, 1))
}

/// `(b, y) ↦ V` for the steered party, the steering party fixed by `ctx`.
fn steered_coeffs<'a>(
    expr: &'a BellExpression,
    direction: &Steering,
    ctx: &Context,
) -> impl Fn(usize, usize) -> f64 + 'a {
    let sp = direction.steering()[0];
    let (x, a) = (ctx.inputs[0], ctx.outputs[0]);
    move |b: usize, y: usize| {
        if sp == 0 {
            expr.coeff(&[a, b], &[x, y])
        } else {
            expr.coeff(&[b, a], &[y, x])
        }
    }
}

/// The OW-form table: row `(x, a)` is `[A, B, C, r(A − B) + C]` with three
/// free values per row, rows ordered `(0,0), (0,1), (1,0), (1,1)`.
pub fn ow_form(ratios: [f64; 4], free: [f64; 12]) -> Result<BellExpression> {
    if ratios.iter().chain(free.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "ratios and free values must be finite".into(),
        ));
    }
    let rows: Vec<[f64; 4]> = (0..4)
        .map(|k| {
            let (a, b, c) = (free[3 * k], free[3 * k + 1], free[3 * k + 2]);
            [a, b, c, ratios[k] * (a - b) + c]
        })
        .collect();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    BellExpression::from_table_rows(crate::Scenario::chsh(), &refs)
}

/// `base + Γ·direction`, the direction being constant on NS behaviors.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaFamily {
    pub base: BellExpression,
    pub direction: BellExpression,
    /// NS value of the direction table.
    pub direction_constant: f64,
}

impl GammaFamily {
    pub fn new(base: BellExpression, direction: BellExpression) -> Result<Self> {
        base.scenario().ensure_same(direction.scenario())?;
        let k = ns_constant_value(&direction)?.ok_or_else(|| {
            Error::InvalidParameter("direction table is not constant on NS behaviors".into())
        })?;
        Ok(GammaFamily {
            base,
            direction,
            direction_constant: k,
        })
    }

    pub fn at(&self, gamma: f64) -> BellExpression {
        self.base
            .add_scaled(&self.direction, gamma)
            .expect("same scenario")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSolve {
    /// Common Γ, present only if the candidates agree and the report passes.
    pub gamma: Option<f64>,
    /// Per-context candidates `Γ = −R_base/R_dir`.
    pub candidates: Vec<(Context, f64)>,
    pub spread: f64,
    pub report: Option<OwReport>,
    pub diagnostic: Option<String>,
}

pub fn solve_gamma(
    f: &GammaFamily,
    r: &Realization,
    direction: &Steering,
    tol: f64,
) -> Result<GammaSolve> {
    check_tol(tol)?;
    let s = r.scenario()?;
    let mut candidates = Vec::new();
    let mut diagnostic = None;
    for ctx in direction.contexts(&s) {
        if r.steered_state(direction, &ctx)?.rho.is_none() {
            continue;
        }
        let params = projector_params(r, direction, &ctx)?;
        let r_base = necessary_residual(&f.base, direction, &ctx, &params);
        let r_dir = necessary_residual(&f.direction, direction, &ctx, &params);
        if r_dir.abs() > RESIDUAL_TOL {
            candidates.push((ctx, -r_base / r_dir));
        } else if r_base.abs() > RESIDUAL_TOL {
            diagnostic = Some(format!(
                "context {ctx:?}: residual {r_base:e} independent of Γ"
            ));
        }
    }
    let fail = |candidates, spread, diagnostic| {
        Ok(GammaSolve {
            gamma: None,
            candidates,
            spread,
            report: None,
            diagnostic,
        })
    };
    if diagnostic.is_some() {
        return fail(candidates, f64::NAN, diagnostic);
    }
    if candidates.is_empty() {
        return fail(candidates, f64::NAN, Some("no context constrains Γ".into()));
    }
    let lo = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let hi = candidates
        .iter()
        .map(|c| c.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread > GAMMA_AGREEMENT {
        return fail(
            candidates,
            spread,
            Some(format!("candidates spread {spread:e} over [{lo}, {hi}]")),
        );
    }
    let gamma = candidates.iter().map(|c| c.1).sum::<f64>() / candidates.len() as f64;
    let report = ow_report(&f.at(gamma), r, direction, tol)?;
    let ok = report.verdict;
    Ok(GammaSolve {
        gamma: ok.then_some(gamma),
        candidates,
        spread,
        diagnostic: (!ok).then(|| {
            format!(
                "report at Γ = {gamma} fails with max gap {:e}",
                report.max_gap()
            )
        }),
        report: Some(report),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Certified OW-game `expr + Σ t_i G_i`, if found.
    pub game: Option<BellExpression>,
    /// Generator weights `t`.
    pub weights: DeltaParams,
    /// `expr − game` on NS behaviors.
    pub k: f64,
    /// Rank of the 4×4 residual system.
    pub rank: usize,
    /// Largest necessary-condition residual left after solving.
    pub residual: f64,
    pub report: Option<OwReport>,
    pub certificate: Option<ConstantCertificate>,
    pub diagnostic: Option<String>,
}

/// Looks for an OW-game NS-equivalent to `expr` at a two-qubit realization by
/// adding the Δ generators with weights that zero every necessary residual.
pub fn ow_game_search(expr: &BellExpression, r: &Realization, tol: f64) -> Result<SearchOutcome> {
    check_tol(tol)?;
    if !expr.scenario().is_2222() {
        return Err(Error::UnsupportedScenario {
            required: "(2,2,2,2)",
        });
    }
    let dir = Steering::a_to_b();
    let gens = delta_generators();
    let mut rows: Vec<[f64; 4]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for ctx in dir.contexts(&r.scenario()?) {
        if r.steered_state(&dir, &ctx)?.rho.is_none() {
            continue;
        }
        let params = projector_params(r, &dir, &ctx)?;
        let mut row = [0.0; 4];
        for (j, g) in gens.iter().enumerate() {
            row[j] = necessary_residual(g, &dir, &ctx, &params);
        }
        rows.push(row);
        rhs.push(-necessary_residual(expr, &dir, &ctx, &params));
    }
    let (t, rank) = least_squares(&rows, &rhs)?;
    let residual = rows
        .iter()
        .zip(&rhs)
        .map(|(row, b)| (row.iter().zip(&t).map(|(m, x)| m * x).sum::<f64>() - b).abs())
        .fold(0.0, f64::max);
    let weights = DeltaParams::new(t[0], t[1], t[2], t[3]);
    let k = -weights.sum();
    let mut out = SearchOutcome {
        game: None,
        weights,
        k,
        rank,
        residual,
        report: None,
        certificate: None,
        diagnostic: None,
    };
    if residual > RESIDUAL_TOL {
        out.diagnostic = Some(format!(
            "system of rank {rank} is inconsistent (residual {residual:e})"
        ));
        return Ok(out);
    }
    let mut game = expr.clone();
    for (g, w) in gens.iter().zip(t) {
        if w != 0.0 {
            game = game.add_scaled(g, w)?;
        }
    }
    let report = ow_report(&game, r, &dir, tol)?;
    out.certificate = ns_equivalent(expr, &game)?;
    if report.verdict {
        out.game = Some(game);
    } else {
        out.diagnostic = Some(format!(
            "necessary conditions hold (rank {rank}) but the report fails with max gap {:e}",
            report.max_gap()
        ));
    }
    out.report = Some(report);
    Ok(out)
}

/// Minimum-norm least-squares solution through the pseudo-inverse of `MᵀM`.
fn least_squares(rows: &[[f64; 4]], rhs: &[f64]) -> Result<([f64; 4], usize)> {
    let mut mtm = [[0.0; 4]; 4];
    let mut mtb = [0.0; 4];
    for (row, b) in rows.iter().zip(rhs) {
        for i in 0..4 {
            mtb[i] += row[i] * b;
            for j in 0..4 {
                mtm[i][j] += row[i] * row[j];
            }
        }
    }
    let m = ComplexMatrix::from_fn(4, |i, j| re(mtm[i][j]))?;
    let eig = hermitian_eig(&m)?;
    let cutoff = 1e-12 * eig.max().abs().max(1e-300);
    let mut t = [0.0; 4];
    let mut rank = 0;
    for (lam, v) in eig.values.iter().zip(&eig.vectors) {
        if *lam <= cutoff {
            continue;
        }
        rank += 1;
        let proj: C64 = (0..4).map(|i| v[i].conj() * mtb[i]).sum();
        for (i, ti) in t.iter_mut().enumerate() {
            *ti += (v[i] * proj).re / lam;
        }
    }
    Ok((t, rank))
}
