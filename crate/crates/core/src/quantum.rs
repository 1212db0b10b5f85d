//! Realizations, Born-rule behaviors, steered states and effective operators.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::linalg::{
    c, hermitian_eig, inner, norm, norm_sqr, re, ComplexMatrix, Eigen, C64, MAX_DIM, PROJECTOR_TOL,
};
use crate::odometer::advance;
use crate::scenario::Behavior;
use crate::{BellExpression, Error, Result, Scenario};

/// Steered branches lighter than this are treated as never occurring.
pub const ZERO_WEIGHT: f64 = 1e-14;

pub const STATE_NORM_TOL: f64 = 1e-12;

/// Quantum behaviors inherit the projector tolerance of their realization.
pub const QUANTUM_BEHAVIOR_TOL: f64 = 1e-10;

pub mod pauli {
    use super::*;

    pub fn i() -> ComplexMatrix {
        ComplexMatrix::identity(2).expect("2x2")
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![re(0.0), re(1.0), re(1.0), re(0.0)]).expect("2x2")
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)]).expect("2x2")
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![re(1.0), re(0.0), re(0.0), re(-1.0)]).expect("2x2")
    }

    /// `cos t·σ_z + sin t·σ_x`.
    pub fn planar(t: f64) -> ComplexMatrix {
        &z().scale_real(t.cos()) + &x().scale_real(t.sin())
    }
}

/// Computational basis vector `|k⟩` in dimension `d`.
pub fn ket(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![re(0.0); d];
    v[k] = re(1.0);
    v
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    vec![re(s), re(0.0), re(0.0), re(s)]
}

/// A complete set of orthogonal projectors, one per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    projectors: Vec<ComplexMatrix>,
}

impl Measurement {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(Error::InvalidRealization(
                "measurement without outcomes".into(),
            ));
        };
        let d = first.dim();
        let mut sum = ComplexMatrix::zeros(d)?;
        for (a, p) in projectors.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            let r = p.hermitian_residual().max(p.projector_residual());
            if r > PROJECTOR_TOL {
                return Err(Error::InvalidRealization(format!(
                    "outcome {a} is not a projector (residual {r:e})"
                )));
            }
            sum = &sum + p;
        }
        let r = sum.max_abs_diff(&ComplexMatrix::identity(d)?)?;
        if r > PROJECTOR_TOL {
            return Err(Error::InvalidRealization(format!(
                "projectors do not sum to identity (residual {r:e})"
            )));
        }
        for (a, p) in projectors.iter().enumerate() {
            for q in &projectors[a + 1..] {
                let r = p.try_mul(q)?.max_abs();
                if r > PROJECTOR_TOL {
                    return Err(Error::InvalidRealization(format!(
                        "projectors not orthogonal (residual {r:e})"
                    )));
                }
            }
        }
        Ok(Measurement { projectors })
    }

    /// One rank-1 outcome per basis vector.
    pub fn from_basis(basis: &[Vec<C64>]) -> Result<Self> {
        let labels: Vec<usize> = (0..basis.len()).collect();
        Self::from_labeled_basis(basis, &labels, basis.len())
    }

    /// Outcome `a` projects onto the span of the basis vectors labeled `a`.
    pub fn from_labeled_basis(
        basis: &[Vec<C64>],
        labels: &[usize],
        outcomes: usize,
    ) -> Result<Self> {
        if labels.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: labels.len(),
            });
        }
        let d = basis.len();
        let mut projectors = vec![ComplexMatrix::zeros(d)?; outcomes];
        for (v, &l) in basis.iter().zip(labels) {
            if l >= outcomes {
                return Err(Error::InvalidParameter(format!(
                    "label {l} >= {outcomes} outcomes"
                )));
            }
            projectors[l].add_scaled_in_place(&ComplexMatrix::outer(v, v)?, re(1.0))?;
        }
        Self::new(projectors)
    }

    /// `Π_0 = (I + O)/2`, `Π_1 = (I − O)/2` for a ±1-valued observable.
    pub fn from_observable(o: &ComplexMatrix) -> Result<Self> {
        let id = ComplexMatrix::identity(o.dim())?;
        Self::new(vec![(&id + o).scale_real(0.5), (&id - o).scale_real(0.5)])
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn projector(&self, a: usize) -> &ComplexMatrix {
        &self.projectors[a]
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// `U Π U†` for every outcome.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let projectors = self
            .projectors
            .iter()
            .map(|p| p.conjugate_by(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Measurement { projectors })
    }
}

/// A pure shared state with projective measurements for every party and input.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    dims: Vec<usize>,
    state: Vec<C64>,
    measurements: Vec<Vec<Measurement>>,
}

impl Realization {
    pub fn new(
        dims: Vec<usize>,
        state: Vec<C64>,
        measurements: Vec<Vec<Measurement>>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(Error::InvalidRealization(format!("{} parties", dims.len())));
        }
        let total: usize = dims.iter().product();
        if dims.contains(&0) || total > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: total,
                max: MAX_DIM,
            });
        }
        if state.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: state.len(),
            });
        }
        let n = norm(&state);
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidRealization(format!("state norm {n}")));
        }
        if measurements.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: measurements.len(),
            });
        }
        for (p, ms) in measurements.iter().enumerate() {
            if ms.is_empty() {
                return Err(Error::InvalidRealization(format!(
                    "party {p} has no inputs"
                )));
            }
            for m in ms {
                if m.dim() != dims[p] {
                    return Err(Error::DimensionMismatch {
                        expected: dims[p],
                        found: m.dim(),
                    });
                }
                if m.outcomes() != ms[0].outcomes() {
                    return Err(Error::InvalidRealization(format!(
                        "party {p} has inputs with different outcome counts"
                    )));
                }
            }
        }
        Ok(Realization {
            dims,
            state,
            measurements,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn state(&self) -> &[C64] {
        &self.state
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn measurements(&self) -> &[Vec<Measurement>] {
        &self.measurements
    }

    pub fn measurement(&self, party: usize, input: usize) -> &Measurement {
        &self.measurements[party][input]
    }

    pub fn projector(&self, party: usize, input: usize, outcome: usize) -> &ComplexMatrix {
        self.measurements[party][input].projector(outcome)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(
            self.measurements.iter().map(|m| m.len()).collect(),
            self.measurements.iter().map(|m| m[0].outcomes()).collect(),
        )
    }

    /// Same realization with another state on the same spaces.
    pub fn with_state(&self, state: Vec<C64>) -> Result<Self> {
        Self::new(self.dims.clone(), state, self.measurements.clone())
    }

    /// Same realization with other measurements for one party.
    pub fn with_party_measurements(&self, party: usize, ms: Vec<Measurement>) -> Result<Self> {
        let mut measurements = self.measurements.clone();
        measurements[party] = ms;
        Self::new(self.dims.clone(), self.state.clone(), measurements)
    }

    /// `(⊗_p O_p) ψ` where `None` stands for the identity.
    pub fn apply_local(&self, ops: &[Option<&ComplexMatrix>]) -> Vec<C64> {
        let mut v = self.state.clone();
        for (p, op) in ops.iter().enumerate() {
            if let Some(m) = op {
                v = apply_on_factor(&v, &self.dims, p, m);
            }
        }
        v
    }

    pub fn behavior(&self) -> Result<Behavior> {
        let s = self.scenario()?;
        let mut probs = Vec::with_capacity(s.len());
        s.for_each_entry(|outs, ins| {
            let ops: Vec<Option<&ComplexMatrix>> = (0..self.parties())
                .map(|p| Some(self.projector(p, ins[p], outs[p])))
                .collect();
            probs.push(norm_sqr(&self.apply_local(&ops)));
        });
        Behavior::with_tolerance(s, probs, QUANTUM_BEHAVIOR_TOL)
    }

    /// Conditional state of the steered parties given a context of the
    /// steering parties; remaining parties are traced out.
    pub fn steered_state(&self, steering: &Steering, ctx: &Context) -> Result<SteeredState> {
        steering.check(self.parties())?;
        ctx.check_against(steering, &self.scenario()?)?;
        let mut ops: Vec<Option<&ComplexMatrix>> = vec![None; self.parties()];
        for (k, &p) in steering.steering.iter().enumerate() {
            ops[p] = Some(self.projector(p, ctx.inputs[k], ctx.outputs[k]));
        }
        let phi = self.apply_local(&ops);
        let weight = norm_sqr(&phi);
        if weight < ZERO_WEIGHT {
            return Ok(SteeredState { weight, rho: None });
        }
        let rho = reduced_density(&phi, &self.dims, &steering.steered)?.scale_real(1.0 / weight);
        Ok(SteeredState {
            weight,
            rho: Some(rho),
        })
    }

    /// Reduced density matrix of the given parties.
    pub fn reduced_state(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        reduced_density(&self.state, &self.dims, keep)
    }

    /// Bipartite Schmidt form: local unitaries bring the state to
    /// `Σ σ_k |kk⟩` with `σ` descending; measurements follow.
    pub fn canonicalize(&self) -> Result<Realization> {
        if self.parties() != 2 {
            return Err(Error::UnsupportedScenario {
                required: "bipartite",
            });
        }
        let (da, db) = (self.dims[0], self.dims[1]);
        let m = |i: usize, j: usize| self.state[i * db + j];
        let mmd =
            ComplexMatrix::from_fn(da, |i, k| (0..db).map(|j| m(i, j) * m(k, j).conj()).sum())?;
        let eig = hermitian_eig(&mmd)?;
        let mut us: Vec<Vec<C64>> = Vec::new();
        let mut vs: Vec<Vec<C64>> = Vec::new();
        let mut sigma = Vec::new();
        for (lam, u) in eig.values.iter().rev().zip(eig.vectors.iter().rev()) {
            let s = lam.max(0.0).sqrt();
            if s < 1e-12 || us.len() == db {
                break;
            }
            let v: Vec<C64> = (0..db)
                .map(|j| (0..da).map(|i| u[i].conj() * m(i, j)).sum::<C64>() / s)
                .collect();
            us.push(u.clone());
            vs.push(v);
            sigma.push(s);
        }
        let us = complete_basis(us, da);
        let vs = complete_basis(vs, db);
        // U_A maps u_k to |k⟩; U_B maps v_k to |k⟩.
        let ua = ComplexMatrix::from_fn(da, |k, i| us[k][i].conj())?;
        let ub = ComplexMatrix::from_fn(db, |k, j| vs[k][j].conj())?;
        let mut state = vec![re(0.0); da * db];
        for (k, s) in sigma.iter().enumerate() {
            state[k * db + k] = re(*s);
        }
        let nrm = norm(&state);
        for z in state.iter_mut() {
            *z /= nrm;
        }
        let measurements = vec![
            self.measurements[0]
                .iter()
                .map(|mm| mm.conjugated(&ua))
                .collect::<Result<Vec<_>>>()?,
            self.measurements[1]
                .iter()
                .map(|mm| mm.conjugated(&ub))
                .collect::<Result<Vec<_>>>()?,
        ];
        Realization::new(self.dims.clone(), state, measurements)
    }

    /// Schmidt coefficients of a bipartite state, descending.
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>> {
        if self.parties() != 2 {
            return Err(Error::UnsupportedScenario {
                required: "bipartite",
            });
        }
        let e = hermitian_eig(&self.reduced_state(&[0])?)?;
        Ok(e.values.iter().rev().map(|l| l.max(0.0).sqrt()).collect())
    }
}

/// Applies `m` to tensor factor `party` of `v`.
fn apply_on_factor(v: &[C64], dims: &[usize], party: usize, m: &ComplexMatrix) -> Vec<C64> {
    let d = dims[party];
    let inner_sz: usize = dims[party + 1..].iter().product();
    let outer_sz: usize = dims[..party].iter().product();
    let mut out = vec![re(0.0); v.len()];
    for o in 0..outer_sz {
        for i in 0..inner_sz {
            for r in 0..d {
                let mut acc = re(0.0);
                for k in 0..d {
                    acc += m.get(r, k) * v[(o * d + k) * inner_sz + i];
                }
                out[(o * d + r) * inner_sz + i] = acc;
            }
        }
    }
    out
}

/// `Tr_{rest} |φ⟩⟨φ|` keeping the listed parties (ascending).
fn reduced_density(phi: &[C64], dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&p| dims[p]).collect();
    let dk: usize = keep_dims.iter().product();
    let dr: usize = rest_dims.iter().product();
    // Gather φ as a dk × dr matrix.
    let mut mat = vec![re(0.0); dk * dr];
    let mut digits = vec![0usize; dims.len()];
    loop {
        let mut full = 0;
        for (p, &dgt) in digits.iter().enumerate() {
            full = full * dims[p] + dgt;
        }
        let ki = keep.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
        let ri = rest.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
        mat[ki * dr + ri] = phi[full];
        if !advance(&mut digits, dims) {
            break;
        }
    }
    ComplexMatrix::from_fn(dk, |i, j| {
        (0..dr)
            .map(|r| mat[i * dr + r] * mat[j * dr + r].conj())
            .sum()
    })
}

/// Extends an orthonormal family to a basis of dimension `d` by Gram–Schmidt
/// over the computational basis.
fn complete_basis(mut vs: Vec<Vec<C64>>, d: usize) -> Vec<Vec<C64>> {
    for k in 0..d {
        if vs.len() == d {
            break;
        }
        let mut w = ket(d, k);
        for _ in 0..2 {
            for v in &vs {
                let ov = inner(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= ov * vi;
                }
            }
        }
        let n = norm(&w);
        if n > 1e-6 {
            vs.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    vs
}

/// Which parties steer and which are steered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Steering {
    steering: Vec<usize>,
    steered: Vec<usize>,
}

impl Steering {
    pub fn new(mut steering: Vec<usize>, mut steered: Vec<usize>) -> Result<Self> {
        steering.sort_unstable();
        steered.sort_unstable();
        steering.dedup();
        steered.dedup();
        if steering.is_empty() || steered.is_empty() || steering.iter().any(|p| steered.contains(p))
        {
            return Err(Error::InvalidParameter(
                "steering and steered parties must be disjoint and non-empty".into(),
            ));
        }
        Ok(Steering { steering, steered })
    }

    pub fn a_to_b() -> Self {
        Steering {
            steering: vec![0],
            steered: vec![1],
        }
    }

    pub fn b_to_a() -> Self {
        Steering {
            steering: vec![1],
            steered: vec![0],
        }
    }

    /// One black box steering two characterised devices.
    pub fn a_to_bc() -> Self {
        Steering {
            steering: vec![0],
            steered: vec![1, 2],
        }
    }

    /// Two black boxes steering one characterised device.
    pub fn ab_to_c() -> Self {
        Steering {
            steering: vec![0, 1],
            steered: vec![2],
        }
    }

    pub fn steering(&self) -> &[usize] {
        &self.steering
    }

    pub fn steered(&self) -> &[usize] {
        &self.steered
    }

    /// Labels such as `A->B` or `AB->C`.
    pub fn label(&self) -> String {
        let name = |ps: &[usize]| {
            ps.iter()
                .map(|&p| (b'A' + p as u8) as char)
                .collect::<String>()
        };
        format!("{}->{}", name(&self.steering), name(&self.steered))
    }

    pub fn parse(label: &str) -> Result<Self> {
        let (l, r) = label.split_once("->").ok_or_else(|| {
            Error::InvalidParameter(format!("steering direction {label:?}; expected e.g. A->B"))
        })?;
        let parties = |s: &str| -> Result<Vec<usize>> {
            s.trim()
                .chars()
                .map(|ch| match ch.to_ascii_uppercase() {
                    ch @ 'A'..='C' => Ok((ch as u8 - b'A') as usize),
                    _ => Err(Error::InvalidParameter(format!("unknown party {ch:?}"))),
                })
                .collect()
        };
        Self::new(parties(l)?, parties(r)?)
    }

    fn check(&self, parties: usize) -> Result<()> {
        if self
            .steering
            .iter()
            .chain(&self.steered)
            .any(|&p| p >= parties)
        {
            return Err(Error::ContextOutOfRange(format!(
                "{} in a {parties}-party realization",
                self.label()
            )));
        }
        if self.steering.len() + self.steered.len() != parties {
            return Err(Error::InvalidParameter(format!(
                "{} must cover all {parties} parties",
                self.label()
            )));
        }
        Ok(())
    }

    /// All contexts: inputs first, then outputs, lexicographic.
    pub fn contexts(&self, s: &Scenario) -> Vec<Context> {
        let in_radix: Vec<usize> = self.steering.iter().map(|&p| s.inputs()[p]).collect();
        let out_radix: Vec<usize> = self.steering.iter().map(|&p| s.outputs()[p]).collect();
        let mut out = Vec::new();
        let mut ins = vec![0usize; in_radix.len()];
        loop {
            let mut outs = vec![0usize; out_radix.len()];
            loop {
                out.push(Context {
                    inputs: ins.clone(),
                    outputs: outs.clone(),
                });
                if !advance(&mut outs, &out_radix) {
                    break;
                }
            }
            if !advance(&mut ins, &in_radix) {
                break;
            }
        }
        out
    }
}

/// Inputs and outputs of the steering parties, in ascending party order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl Context {
    /// Single-party context `(x, a)`.
    pub fn single(x: usize, a: usize) -> Self {
        Context {
            inputs: vec![x],
            outputs: vec![a],
        }
    }

    fn check_against(&self, steering: &Steering, s: &Scenario) -> Result<()> {
        let k = steering.steering.len();
        if self.inputs.len() != k || self.outputs.len() != k {
            return Err(Error::ContextOutOfRange(format!(
                "context {self:?} for {}",
                steering.label()
            )));
        }
        for (i, &p) in steering.steering.iter().enumerate() {
            if self.inputs[i] >= s.inputs()[p] || self.outputs[i] >= s.outputs()[p] {
                return Err(Error::ContextOutOfRange(format!(
                    "context {self:?} for {}",
                    steering.label()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteeredState {
    pub weight: f64,
    /// `None` for branches with weight below [`ZERO_WEIGHT`].
    pub rho: Option<ComplexMatrix>,
}

/// `B̂ = Σ V·(⊗ Π)` over the steered parties' inputs and outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveOperator {
    pub steering: Steering,
    pub context: Context,
    pub matrix: ComplexMatrix,
    pub eigen: Eigen,
}

impl EffectiveOperator {
    pub fn lambda_max(&self) -> f64 {
        self.eigen.max()
    }

    pub fn expectation(&self, rho: &ComplexMatrix) -> Result<f64> {
        Ok(self.matrix.expectation_in(rho)?.re)
    }
}

pub fn effective_operator(
    expr: &BellExpression,
    r: &Realization,
    steering: &Steering,
    ctx: &Context,
) -> Result<EffectiveOperator> {
    let s = expr.scenario();
    r.scenario()?.ensure_same(s)?;
    steering.check(r.parties())?;
    ctx.check_against(steering, s)?;
    let steered = &steering.steered;
    let dim: usize = steered.iter().map(|&p| r.dims()[p]).product();
    let mut matrix = ComplexMatrix::zeros(dim)?;
    let in_radix: Vec<usize> = steered.iter().map(|&p| s.inputs()[p]).collect();
    let out_radix: Vec<usize> = steered.iter().map(|&p| s.outputs()[p]).collect();
    let mut ins = vec![0usize; s.parties()];
    let mut outs = vec![0usize; s.parties()];
    for (k, &p) in steering.steering.iter().enumerate() {
        ins[p] = ctx.inputs[k];
        outs[p] = ctx.outputs[k];
    }
    let mut yi = vec![0usize; steered.len()];
    loop {
        let mut bo = vec![0usize; steered.len()];
        loop {
            for (k, &p) in steered.iter().enumerate() {
                ins[p] = yi[k];
                outs[p] = bo[k];
            }
            let v = expr.coeff(&outs, &ins);
            if v != 0.0 {
                let mut term = r.projector(steered[0], yi[0], bo[0]).clone();
                for k in 1..steered.len() {
                    term = term.kron(r.projector(steered[k], yi[k], bo[k]))?;
                }
                matrix.add_scaled_in_place(&term, re(v))?;
            }
            if !advance(&mut bo, &out_radix) {
                break;
            }
        }
        if !advance(&mut yi, &in_radix) {
            break;
        }
    }
    let eigen = hermitian_eig(&matrix)?;
    Ok(EffectiveOperator {
        steering: steering.clone(),
        context: ctx.clone(),
        matrix,
        eigen,
    })
}

/// Random unit vector with Gaussian-like components.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| c(gauss(rng), gauss(rng))).collect();
    let n = norm(&v);
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

/// Random orthonormal basis: eigenvectors of a random Hermitian matrix.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Vec<Vec<C64>>> {
    let mut m = ComplexMatrix::zeros(d)?;
    for i in 0..d {
        m.set(i, i, re(gauss(rng)));
        for j in i + 1..d {
            let z = c(gauss(rng), gauss(rng));
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    Ok(hermitian_eig(&m)?.vectors)
}

/// Random realization with rank-1 projective measurements (`outputs = dims`).
pub fn random_realization<R: Rng + ?Sized>(
    rng: &mut R,
    dims: &[usize],
    inputs: &[usize],
) -> Result<Realization> {
    let total: usize = dims.iter().product();
    let state = random_state(rng, total);
    let mut measurements = Vec::with_capacity(dims.len());
    for (&d, &m) in dims.iter().zip(inputs) {
        let ms = (0..m)
            .map(|_| Measurement::from_basis(&random_basis(rng, d)?))
            .collect::<Result<Vec<_>>>()?;
        measurements.push(ms);
    }
    Realization::new(dims.to_vec(), state, measurements)
}

/// Standard normal sample by Box–Muller.
pub(crate) fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (core::f64::consts::TAU * v).cos()
}
