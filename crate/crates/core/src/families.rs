//! Concrete (2,2,2,2) expressions and realizations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cglmp::zohren_gill;
use crate::linalg::re;
use crate::ow::{BoundLine, GammaFamily};
use crate::quantum::{pauli, phi_plus, Context, Measurement, Realization};
use crate::scenario::Behavior;
use crate::{BellExpression, Error, Result, Scenario};

fn int_table(rows: [[i64; 4]; 4]) -> BellExpression {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    BellExpression::from_int_table_rows(Scenario::chsh(), &refs).expect("4x4 table")
}

fn real_table(rows: [[f64; 4]; 4]) -> BellExpression {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    BellExpression::from_table_rows(Scenario::chsh(), &refs).expect("4x4 table")
}

/// The CHSH game in probability form: win iff `a ⊕ b = xy`.
pub fn chsh_xor() -> BellExpression {
    int_table([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]]).with_label("CHSH-XOR")
}

/// Zohren–Gill CGLMP for two outcomes.
pub fn cglmp2_zg() -> BellExpression {
    zohren_gill(2).expect("d = 2").with_label("CGLMP2-ZG")
}

/// `|Φ⁺⟩` measured along planar directions `cos t·σ_z + sin t·σ_x`, giving
/// correlators `E_xy = cos(a_x − b_y)`.
pub fn planar_realization(a0: f64, a1: f64, b0: f64, b1: f64) -> Result<Realization> {
    let m = |t: f64| Measurement::from_observable(&pauli::planar(t));
    Realization::new(
        vec![2, 2],
        phi_plus(),
        vec![vec![m(a0)?, m(a1)?], vec![m(b0)?, m(b1)?]],
    )
}

/// `|Φ⁺⟩` with `A₀ = σ_z`, `A₁ = σ_x`, `B_{0,1} = (σ_z ± σ_x)/√2`.
pub fn canonical_chsh_realization() -> Realization {
    planar_realization(0.0, PI / 2.0, PI / 4.0, -PI / 4.0).expect("valid realization")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CounterExample {
    C1,
    C2,
}

impl CounterExample {
    /// Γ at which the family becomes an OW-game, as reported.
    pub fn reported_gamma(self) -> f64 {
        match self {
            CounterExample::C1 => 0.4648162,
            CounterExample::C2 => 0.5601320,
        }
    }

    /// Reported top eigenvalues of the four bound lines, contexts in order.
    pub fn reported_lambdas(self) -> [f64; 4] {
        match self {
            CounterExample::C1 => [0.821605, 0.821605, 1.76759, 1.89197],
            CounterExample::C2 => [1.84450, 1.84450, 1.64649, 1.84450],
        }
    }
}

fn c1_base() -> BellExpression {
    int_table([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 0]])
}

fn c2_base() -> BellExpression {
    int_table([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1], [1, 0, 0, 0]])
}

/// The table the Γ-dependent part is added to.
pub fn counterexample_base(which: CounterExample) -> BellExpression {
    match which {
        CounterExample::C1 => c1_base(),
        CounterExample::C2 => c2_base(),
    }
}

fn c1_gamma_part() -> BellExpression {
    int_table([[1, 0, 1, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, 1]])
}

fn c1_constant_part() -> BellExpression {
    int_table([[0, 1, 0, 1], [0, 1, 0, 1], [0, -1, 0, -1], [0, -1, 0, -1]])
}

fn c2_gamma_part() -> BellExpression {
    int_table([[0, 1, -1, 0], [0, 1, -1, 0], [1, 0, 0, -1], [1, 0, 0, -1]])
}

/// `I_c(Γ)`: base table plus the full added table at `Γ`.
pub fn counterexample_game(which: CounterExample, gamma: f64) -> BellExpression {
    counterexample_gamma_family(which)
        .at(gamma)
        .with_label(match which {
            CounterExample::C1 => "c1",
            CounterExample::C2 => "c2",
        })
}

pub fn counterexample_gamma_family(which: CounterExample) -> GammaFamily {
    let (base, dir) = match which {
        CounterExample::C1 => (
            c1_base().add(&c1_constant_part()).expect("same scenario"),
            c1_gamma_part(),
        ),
        CounterExample::C2 => (c2_base(), c2_gamma_part()),
    };
    GammaFamily::new(base, dir).expect("direction is an NS constant")
}

fn line(x: usize, a: usize, coeffs: [f64; 4]) -> BoundLine {
    BoundLine {
        context: Context::single(x, a),
        coeffs: coeffs.to_vec(),
    }
}

/// The reported bound lines `Σ ℓ_{yb} P(b|y, a_x) ≤ λ` at `Γ`.
pub fn counterexample_bound_lines(which: CounterExample, g: f64) -> Vec<BoundLine> {
    match which {
        CounterExample::C1 => vec![
            line(0, 0, [g, 0.0, 0.0, 1.0 - g]),
            line(0, 1, [0.0, 1.0 - g, g, 0.0]),
            line(1, 0, [0.0, 1.0, 0.0, 1.0]),
            line(1, 1, [2.0 - g, 0.0, 1.0 - g, 0.0]),
        ],
        CounterExample::C2 => vec![
            line(0, 0, [1.0 - g, 0.0, 0.0, 1.0 + g]),
            line(0, 1, [0.0, 1.0 + g, 1.0 - g, 0.0]),
            line(1, 0, [0.0, 1.0, 0.0, 1.0]),
            line(1, 1, [1.0 + g, 0.0, g, 0.0]),
        ],
    }
}

/// A point of the unbiased three-parameter boundary, `E_xy = cos α_xy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint3Param {
    /// `[α₀₀, α₀₁, α₁₀, α₁₁]`.
    pub angles: [f64; 4],
}

pub const BOUNDARY_TOL: f64 = 1e-10;

impl BoundaryPoint3Param {
    /// Completes the point with `α₁₁ = α₀₀ + α₀₁ + α₁₀`.
    pub fn new(a00: f64, a01: f64, a10: f64) -> Result<Self> {
        Self::from_angles([a00, a01, a10, a00 + a01 + a10])
    }

    pub fn from_angles(angles: [f64; 4]) -> Result<Self> {
        if angles.iter().any(|&a| !(a > 0.0 && a < PI)) {
            return Err(Error::InvalidParameter(alloc::format!(
                "angles {angles:?} must lie in (0, π)"
            )));
        }
        let p = BoundaryPoint3Param { angles };
        let r = p.boundary_residual();
        if r.abs() > BOUNDARY_TOL {
            return Err(Error::InvalidParameter(alloc::format!(
                "not on the boundary (residual {r:e})"
            )));
        }
        Ok(p)
    }

    pub fn correlators(&self) -> [f64; 4] {
        self.angles.map(|a| a.cos())
    }

    /// `Σ (−1)^{xy} arcsin E_xy − π`.
    pub fn boundary_residual(&self) -> f64 {
        boundary_equation(self.correlators())
    }

    /// `|Φ⁺⟩` with `a₀ = 0`, `b₀ = −α₀₀`, `a₁ = −α₀₀ − α₁₀`, `b₁ = α₀₁`.
    pub fn realization(&self) -> Realization {
        let [a00, a01, a10, _] = self.angles;
        planar_realization(0.0, -a00 - a10, -a00, a01).expect("valid realization")
    }
}

fn boundary_equation(e: [f64; 4]) -> f64 {
    e[0].asin() + e[1].asin() + e[2].asin() - e[3].asin() - PI
}

/// Correlators `E_xy = P(a = b|xy) − P(a ≠ b|xy)`, order `00, 01, 10, 11`.
pub fn correlators(p: &Behavior) -> Result<[f64; 4]> {
    if !p.scenario().is_2222() {
        return Err(Error::UnsupportedScenario {
            required: "(2,2,2,2)",
        });
    }
    let mut e = [0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            e[2 * x + y] = p.prob(&[0, 0], &[x, y]) + p.prob(&[1, 1], &[x, y])
                - p.prob(&[0, 1], &[x, y])
                - p.prob(&[1, 0], &[x, y]);
        }
    }
    Ok(e)
}

/// Boundary-equation residual of a behavior's correlators.
pub fn boundary_residual(p: &Behavior) -> Result<f64> {
    Ok(boundary_equation(correlators(p)?))
}

/// Weighted XOR game tangent to the boundary point: weight `1/sin α_xy` on
/// `a = b`, with the sign flipped in block `(1,1)`.
pub fn weighted_xor_game(p: &BoundaryPoint3Param) -> Result<BellExpression> {
    let mut w = [0.0; 4];
    for (k, &a) in p.angles.iter().enumerate() {
        let s = a.sin();
        if s.abs() < 1e-12 {
            return Err(Error::InvalidParameter(
                "degenerate angle: sin α = 0".into(),
            ));
        }
        w[k] = 1.0 / s;
    }
    w[3] = -w[3];
    BellExpression::from_fn(Scenario::chsh(), |o, i| {
        if o[0] == o[1] {
            w[2 * i[0] + i[1]]
        } else {
            0.0
        }
    })
    .map(|e| e.with_label("weighted-XOR"))
}

/// Draws `α₀₀, α₀₁, α₁₀` uniformly on `{α > 0, Σα < π}` by rejection.
pub fn boundary_sample(seed: u64) -> BoundaryPoint3Param {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a: [f64; 3] = [
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * PI,
        ];
        if a.iter().all(|&v| v > 1e-9) && a.iter().sum::<f64>() < PI - 1e-9 {
            if let Ok(p) = BoundaryPoint3Param::new(a[0], a[1], a[2]) {
                return p;
            }
        }
    }
}

/// Tilted-CHSH point: `|ψ(θ)⟩ = cos θ|00⟩ + sin θ|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltedPoint {
    pub theta: f64,
    /// `α = 2/√(1 + 2tan²2θ)`.
    pub alpha: f64,
    /// `tan μ = sin 2θ`.
    pub mu: f64,
}

impl TiltedPoint {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI / 4.0 + 1e-15) {
            return Err(Error::InvalidParameter(alloc::format!(
                "θ = {theta} outside (0, π/4]"
            )));
        }
        let (s2, c2) = ((2.0 * theta).sin(), (2.0 * theta).cos());
        let alpha = 2.0 * c2.abs() / (c2 * c2 + 2.0 * s2 * s2).sqrt();
        Ok(TiltedPoint {
            theta,
            alpha,
            mu: s2.atan(),
        })
    }

    /// Acceptance grid `π/16, π/8, 3π/16, π/4`.
    pub fn grid() -> Vec<TiltedPoint> {
        [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|k| TiltedPoint::new(k * PI / 16.0).expect("in range"))
            .collect()
    }
}

pub fn tilted_realization(p: &TiltedPoint) -> Realization {
    let (c, s) = (p.theta.cos(), p.theta.sin());
    let state = vec![re(c), re(0.0), re(0.0), re(s)];
    let m =
        |o: &crate::linalg::ComplexMatrix| Measurement::from_observable(o).expect("±1 observable");
    let b0 = &pauli::z().scale_real(p.mu.cos()) + &pauli::x().scale_real(p.mu.sin());
    let b1 = &pauli::z().scale_real(p.mu.cos()) - &pauli::x().scale_real(p.mu.sin());
    Realization::new(
        vec![2, 2],
        state,
        vec![vec![m(&pauli::z()), m(&pauli::x())], vec![m(&b0), m(&b1)]],
    )
    .expect("valid realization")
}

fn tilted_base(p: &TiltedPoint) -> BellExpression {
    let a = p.alpha;
    real_table([
        [1.0 + a, a, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 1.0, 0.0],
    ])
}

/// The table subtracted with weight `Γ`; equals `2 sin²θ` on NS behaviors.
fn tilted_subtracted(p: &TiltedPoint) -> BellExpression {
    let c = (2.0 * p.theta).cos();
    let (s2, c2) = (p.theta.sin().powi(2), p.theta.cos().powi(2));
    real_table([
        [0.0, -c, 0.0, -c],
        [0.0, -c, 0.0, -c],
        [s2, c2, s2, c2],
        [s2, c2, s2, c2],
    ])
}

/// `I_α(Γ)`.
pub fn tilted_chsh(p: &TiltedPoint, gamma: f64) -> BellExpression {
    tilted_family(p).at(gamma).with_label("tilted")
}

pub fn tilted_family(p: &TiltedPoint) -> GammaFamily {
    GammaFamily::new(tilted_base(p), tilted_subtracted(p).scaled(-1.0))
        .expect("NS constant direction")
}

/// The tilted CHSH inequality in correlator form,
/// `α E^A_0 + E₀₀ + E₀₁ + E₁₀ − E₁₁`, with `E^A_0` read at `y = 0`.
pub fn tilted_correlator(alpha: f64) -> BellExpression {
    BellExpression::from_fn(Scenario::chsh(), |o, i| {
        let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
        let block = if i[0] == 1 && i[1] == 1 { -1.0 } else { 1.0 };
        let marginal = if i == [0, 0] { alpha * sign(o[0]) } else { 0.0 };
        block * sign(o[0] + o[1]) + marginal
    })
    .expect("finite")
    .with_label("tilted-correlator")
}

/// `Λ± = 2 sin²2θ / (cos 2θ ± √(1 + sin²2θ))` and the derived `X₁, X₂`.
pub fn tilted_prime_printed_x(p: &TiltedPoint) -> Result<(f64, f64)> {
    let s2 = (2.0 * p.theta).sin().powi(2);
    let c = (2.0 * p.theta).cos();
    let r = (1.0 + s2).sqrt();
    let lp = 2.0 * s2 / (c + r);
    let lm = 2.0 * s2 / (c - r);
    let den = lp - lm;
    if den.abs() < 1e-12 {
        return Err(Error::InvalidParameter("Λ₊ = Λ₋".into()));
    }
    Ok(((2.0 - lp - lm) / den, (2.0 * lp * lm - lp - lm) / den))
}

fn tilted_prime_added(p: &TiltedPoint, x1: f64, x2: f64) -> BellExpression {
    let a = p.alpha;
    real_table([
        [-a, -a, 0.0, 0.0],
        [x1 - a, x1 - a, -x1, -x1],
        [0.0, 0.0, 1.0, 1.0],
        [x2, x2, 1.0 - x2, 1.0 - x2],
    ])
}

/// `I'_α(Γ)` with the reported `X₁, X₂`.
pub fn tilted_chsh_prime(p: &TiltedPoint, gamma: f64) -> Result<BellExpression> {
    let (x1, x2) = tilted_prime_printed_x(p)?;
    Ok(tilted_chsh_prime_with(p, gamma, x1, x2))
}

/// `I'_α(Γ)` for arbitrary `X₁, X₂`.
pub fn tilted_chsh_prime_with(p: &TiltedPoint, gamma: f64, x1: f64, x2: f64) -> BellExpression {
    tilted_base(p)
        .add_scaled(&tilted_prime_added(p, x1, x2), gamma)
        .expect("same scenario")
        .with_label("tilted-prime")
}

/// Closed forms of the four line eigenvalues of `I_α(1)`, contexts in order.
pub fn tilted_lambdas(p: &TiltedPoint) -> [f64; 4] {
    let c4 = (4.0 * p.theta).cos();
    let l10 = 0.5 + 1.0 / (6.0 - 2.0 * c4).sqrt();
    [
        1.0 + (2.0 / (3.0 - c4)).sqrt(),
        (1.0 - c4) / (3.0 - c4 - (6.0 - 2.0 * c4).sqrt()),
        l10,
        l10,
    ]
}

/// Closed forms for `I_α(0)` at `x = 1`: `(⟨B(1,b)⟩, λ_{(1,b)})`.
pub fn tilted_gamma0_x1(p: &TiltedPoint) -> (f64, f64) {
    let c4 = (4.0 * p.theta).cos();
    let expectation = 1.0 + (1.0 - c4) / (6.0 - 2.0 * c4).sqrt();
    let lambda = 1.0 + (2.0 * p.theta).sin().abs() * (2.0 / (3.0 - c4)).sqrt();
    (expectation, lambda)
}

/// Reported bound lines of `I_α(1)` for Alice steering Bob.
pub fn tilted_bound_lines(p: &TiltedPoint) -> Vec<BoundLine> {
    let (s2, c2) = (p.theta.sin().powi(2), p.theta.cos().powi(2));
    vec![
        line(0, 0, [1.0, 0.0, 1.0, 0.0]),
        line(0, 1, [0.0, 1.0, 0.0, 1.0]),
        line(1, 0, [c2, 0.0, 0.0, s2]),
        line(1, 1, [0.0, s2, c2, 0.0]),
    ]
}

/// Reported bound lines of `I'_α(1)` for Bob steering Alice; coefficients
/// are indexed `x·2 + a` and contexts are `(y, b)`.
pub fn tilted_prime_bound_lines(p: &TiltedPoint, x1: f64, x2: f64) -> Vec<BoundLine> {
    let a = p.alpha;
    vec![
        line(0, 0, [1.0, x1 - a, 1.0, x2]),
        line(0, 1, [0.0, x1 + 1.0 - a, 0.0, x2 + 1.0]),
        line(1, 0, [1.0, -x1, 1.0, 2.0 - x2]),
        line(1, 1, [0.0, 1.0 - x1, 2.0, 1.0 - x2]),
    ]
}

/// `√(8 + 2α²)`, the quantum maximum of the correlator form.
pub fn tilted_quantum_value(alpha: f64) -> f64 {
    (8.0 + 2.0 * alpha * alpha).sqrt()
}

pub const SQRT_HALF: f64 = FRAC_1_SQRT_2;
