//! No-signaling rewritings of (2,2,2,2) tables.
//!
//! Within a block `(x, y)` we write `V_ab` for `V_{abxy}`. The difference
//! table keeps, per block, `top = V00 − V01`, `left = V00 − V10`,
//! `right = V01 − V11` and `bottom = V10 − V11`. Adding the generator tables
//! [`delta_generators`] with weights `(α, β, γ, δ)` shifts the difference
//! table by the stencil
//!
//! ```text
//!            top/bottom   left/right
//! (0,0)         +α           +γ
//! (0,1)         +β           −γ
//! (1,0)         −α           +δ
//! (1,1)         −β           −δ
//! ```
//!
//! and every generator takes the value 1 on all no-signaling behaviors.

use alloc::vec;
use alloc::vec::Vec;

use crate::scenario::{strategies, strategy_values, Behavior};
use crate::{BellExpression, Error, Result, Scenario};

/// Tolerance for deciding that an expression is constant on the NS set.
pub const CONSTANT_TOL: f64 = 1e-9;

const TOP: usize = 0;
const LEFT: usize = 1;
const RIGHT: usize = 2;
const BOTTOM: usize = 3;

fn require_2222(s: &Scenario) -> Result<()> {
    if s.is_2222() {
        Ok(())
    } else {
        Err(Error::UnsupportedScenario {
            required: "(2,2,2,2)",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DeltaParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl DeltaParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        DeltaParams {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn neg(self) -> Self {
        DeltaParams::new(-self.alpha, -self.beta, -self.gamma, -self.delta)
    }

    pub fn add(self, o: Self) -> Self {
        DeltaParams::new(
            self.alpha + o.alpha,
            self.beta + o.beta,
            self.gamma + o.gamma,
            self.delta + o.delta,
        )
    }

    pub fn sum(self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    pub fn as_array(self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Stencil entries `(top/bottom, left/right)` for block `(x, y)`.
    fn stencil(self, x: usize, y: usize) -> (f64, f64) {
        match (x, y) {
            (0, 0) => (self.alpha, self.gamma),
            (0, 1) => (self.beta, -self.gamma),
            (1, 0) => (-self.alpha, self.delta),
            _ => (-self.beta, -self.delta),
        }
    }
}

/// Per-block differences `[top, left, right, bottom]`, block index `2x + y`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DifferenceTable {
    pub blocks: [[f64; 4]; 4],
}

impl DifferenceTable {
    pub fn block(&self, x: usize, y: usize) -> [f64; 4] {
        self.blocks[2 * x + y]
    }

    /// Largest `|(top − bottom) − (left − right)|` over the blocks.
    pub fn consistency_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| ((b[TOP] - b[BOTTOM]) - (b[LEFT] - b[RIGHT])).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DifferenceTable) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn difference_table(expr: &BellExpression) -> Result<DifferenceTable> {
    require_2222(expr.scenario())?;
    let mut d = DifferenceTable::default();
    for x in 0..2 {
        for y in 0..2 {
            let v = |a: usize, b: usize| expr.coeff(&[a, b], &[x, y]);
            d.blocks[2 * x + y] = [
                v(0, 0) - v(0, 1),
                v(0, 0) - v(1, 0),
                v(0, 1) - v(1, 1),
                v(1, 0) - v(1, 1),
            ];
        }
    }
    Ok(d)
}

pub fn apply_delta(d: &DifferenceTable, p: DeltaParams) -> DifferenceTable {
    let mut out = *d;
    for x in 0..2 {
        for y in 0..2 {
            let (tb, lr) = p.stencil(x, y);
            let b = &mut out.blocks[2 * x + y];
            b[TOP] += tb;
            b[BOTTOM] += tb;
            b[LEFT] += lr;
            b[RIGHT] += lr;
        }
    }
    out
}

/// Least-squares parameters driving `d` towards zero, with the residual
/// `max |d + Δ(p)|`. The residual vanishes iff the table is an NS constant.
pub fn reduce_to_zero(d: &DifferenceTable) -> (DeltaParams, f64) {
    let tb = |x: usize, y: usize| d.block(x, y)[TOP] + d.block(x, y)[BOTTOM];
    let lr = |x: usize, y: usize| d.block(x, y)[LEFT] + d.block(x, y)[RIGHT];
    let p = DeltaParams::new(
        -(tb(0, 0) - tb(1, 0)) / 4.0,
        -(tb(0, 1) - tb(1, 1)) / 4.0,
        -(lr(0, 0) - lr(0, 1)) / 4.0,
        -(lr(1, 0) - lr(1, 1)) / 4.0,
    );
    let residual = apply_delta(d, p).max_abs();
    (p, residual)
}

/// Sum of the four entries of each block, index `2x + y`.
pub fn block_sums(expr: &BellExpression) -> Result<[f64; 4]> {
    require_2222(expr.scenario())?;
    let mut s = [0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    s[2 * x + y] += expr.coeff(&[a, b], &[x, y]);
                }
            }
        }
    }
    Ok(s)
}

/// The unique coefficient table with difference table `d` and the given block
/// sums. `d` must be internally consistent.
pub fn lift(d: &DifferenceTable, sums: [f64; 4]) -> Result<BellExpression> {
    let r = d.consistency_residual();
    if r > CONSTANT_TOL * d.max_abs().max(1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "inconsistent difference table (residual {r:e})"
        )));
    }
    let mut e = BellExpression::zeros(Scenario::chsh());
    for x in 0..2 {
        for y in 0..2 {
            let b = d.block(x, y);
            let v00 = (sums[2 * x + y] + b[TOP] + 2.0 * b[LEFT] + b[BOTTOM]) / 4.0;
            let v01 = v00 - b[TOP];
            let v10 = v00 - b[LEFT];
            let v11 = v10 - b[BOTTOM];
            for (a, bb, v) in [(0, 0, v00), (0, 1, v01), (1, 0, v10), (1, 1, v11)] {
                e.set(&[a, bb], &[x, y], v);
            }
        }
    }
    Ok(e)
}

fn table_from_cells(cells: &[((usize, usize), (usize, usize))], k: f64) -> BellExpression {
    let mut e = BellExpression::zeros(Scenario::chsh());
    for &((a, b), (x, y)) in cells {
        e.set(&[a, b], &[x, y], k);
    }
    e
}

fn column(b: usize, x: usize, y: usize) -> [((usize, usize), (usize, usize)); 2] {
    [((0, b), (x, y)), ((1, b), (x, y))]
}

fn row(a: usize, x: usize, y: usize) -> [((usize, usize), (usize, usize)); 2] {
    [((a, 0), (x, y)), ((a, 1), (x, y))]
}

fn pair(
    u: [((usize, usize), (usize, usize)); 2],
    v: [((usize, usize), (usize, usize)); 2],
) -> BellExpression {
    table_from_cells(&[u[0], u[1], v[0], v[1]], 1.0)
}

/// Generator tables `G_α, G_β, G_γ, G_δ`; each equals 1 on NS behaviors.
pub fn delta_generators() -> [BellExpression; 4] {
    [
        pair(column(0, 0, 0), column(1, 1, 0)),
        pair(column(0, 0, 1), column(1, 1, 1)),
        pair(row(0, 0, 0), row(1, 0, 1)),
        pair(row(0, 1, 0), row(1, 1, 1)),
    ]
}

/// `expr + Σ p_i G_i`.
pub fn add_generators(expr: &BellExpression, p: DeltaParams) -> Result<BellExpression> {
    let mut out = expr.clone();
    for (g, w) in delta_generators().iter().zip(p.as_array()) {
        if w != 0.0 {
            out = out.add_scaled(g, w)?;
        }
    }
    Ok(out)
}

/// Twelve tables equal to `k` on every NS behavior: four normalization
/// tables, four built on Bob's marginals and four on Alice's.
pub fn constant_basis(k: f64) -> Vec<BellExpression> {
    let mut out = Vec::with_capacity(12);
    for x in 0..2 {
        for y in 0..2 {
            let cells: Vec<_> = (0..2)
                .flat_map(|a| (0..2).map(move |b| ((a, b), (x, y))))
                .collect();
            out.push(table_from_cells(&cells, 1.0));
        }
    }
    out.push(pair(column(0, 0, 0), column(1, 1, 0)));
    out.push(pair(column(1, 0, 0), column(0, 1, 0)));
    out.push(pair(column(0, 0, 1), column(1, 1, 1)));
    out.push(pair(column(1, 0, 1), column(0, 1, 1)));
    out.push(pair(row(0, 0, 0), row(1, 0, 1)));
    out.push(pair(row(0, 0, 1), row(1, 0, 0)));
    out.push(pair(row(0, 1, 0), row(1, 1, 1)));
    out.push(pair(row(0, 1, 1), row(1, 1, 0)));
    out.into_iter().map(|t| t.scaled(k)).collect()
}

/// The value of `expr` if it is the same on every deterministic behavior
/// (hence on the whole NS set), decided by enumeration.
pub fn ns_constant_value(expr: &BellExpression) -> Result<Option<f64>> {
    let values = strategy_values(expr)?;
    if expr.exact().is_some() {
        let first = values[0];
        return Ok(values.iter().all(|&v| v == first).then_some(first));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((hi - lo <= CONSTANT_TOL).then_some(0.5 * (lo + hi)))
}

/// Proof that an expression is the constant `k` on NS behaviors.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCertificate {
    pub k: f64,
    /// Δ parameters zeroing the difference table; (2,2,2,2) only.
    pub witness: Option<DeltaParams>,
    /// `max |D + Δ(witness)|`; zero when no witness applies.
    pub residual: f64,
}

/// Certificate through the difference-table route; (2,2,2,2) only.
pub fn delta_certificate(expr: &BellExpression) -> Result<Option<ConstantCertificate>> {
    let d = difference_table(expr)?;
    let (p, residual) = reduce_to_zero(&d);
    if residual > CONSTANT_TOL {
        return Ok(None);
    }
    // After adding Σ p_i G_i every block is constant; read the constants off.
    let reduced = add_generators(expr, p)?;
    let sums = block_sums(&reduced)?;
    let k = sums.iter().sum::<f64>() / 4.0 - p.sum();
    Ok(Some(ConstantCertificate {
        k,
        witness: Some(p),
        residual,
    }))
}

/// Certificate that `expr` is an NS constant: enumeration decides, the Δ
/// route supplies the witness where it applies.
pub fn ns_constant_certificate(expr: &BellExpression) -> Result<Option<ConstantCertificate>> {
    let Some(k) = ns_constant_value(expr)? else {
        return Ok(None);
    };
    if expr.scenario().is_2222() {
        let d = difference_table(expr)?;
        let (p, residual) = reduce_to_zero(&d);
        return Ok(Some(ConstantCertificate {
            k,
            witness: Some(p),
            residual,
        }));
    }
    Ok(Some(ConstantCertificate {
        k,
        witness: None,
        residual: 0.0,
    }))
}

/// Certificate that `a − b` is the NS constant `k`, i.e. `a = b + k` on the
/// no-signaling set.
pub fn ns_equivalent(
    a: &BellExpression,
    b: &BellExpression,
) -> Result<Option<ConstantCertificate>> {
    ns_constant_certificate(&a.sub(b)?)
}

/// The 24 vertices of the (2,2,2,2) no-signaling polytope: 16 deterministic
/// points followed by the 8 PR boxes.
pub fn ns_vertices_2222() -> Vec<Behavior> {
    let s = Scenario::chsh();
    let mut out: Vec<Behavior> = strategies(&s)
        .expect("16 strategies")
        .map(|d| d.to_behavior(&s))
        .collect();
    for u in 0..2 {
        for v in 0..2 {
            for w in 0..2 {
                let mut probs = vec![0.0; 16];
                s.for_each_entry(|o, i| {
                    if (o[0] ^ o[1]) == ((i[0] & i[1]) ^ (u & i[0]) ^ (v & i[1]) ^ w) {
                        probs[s.index(o, i)] = 0.5;
                    }
                });
                out.push(Behavior::new(s.clone(), probs).expect("PR box is a valid behavior"));
            }
        }
    }
    out
}

/// Convex combination of the NS vertices with the given (unnormalized,
/// nonnegative) weights.
pub fn ns_mixture(weights: &[f64]) -> Result<Behavior> {
    let verts = ns_vertices_2222();
    if weights.len() != verts.len() {
        return Err(Error::ShapeMismatch {
            expected: verts.len(),
            found: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || total <= 0.0 {
        return Err(Error::InvalidParameter(
            "mixture weights must be nonnegative with positive sum".into(),
        ));
    }
    let mut probs = vec![0.0; 16];
    for (v, w) in verts.iter().zip(weights) {
        for (p, q) in probs.iter_mut().zip(v.probs()) {
            *p += w / total * q;
        }
    }
    Behavior::with_tolerance(Scenario::chsh(), probs, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cglmp::{gd_game, zohren_gill};
    use crate::families::{
        cglmp2_zg, chsh_xor, counterexample_game, counterexample_gamma_family, CounterExample,
    };
    use crate::scenario::evaluate;
    use proptest::prelude::*;

    #[test]
    fn chsh_difference_block_00() {
        let d = difference_table(&chsh_xor()).unwrap();
        assert_eq!(d.block(0, 0), [1.0, 1.0, -1.0, -1.0]);
        assert_eq!(d.consistency_residual(), 0.0);
    }

    #[test]
    fn constant_tables_have_zero_differences() {
        for t in constant_basis(2.5).iter().take(4) {
            assert_eq!(difference_table(t).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn bob_table_differences() {
        // First Bob table scaled by k: block (0,0) has top = bottom = k.
        let k = 3.0;
        let d = difference_table(&constant_basis(k)[4]).unwrap();
        assert_eq!(d.block(0, 0), [k, 0.0, 0.0, k]);
        assert_eq!(d.block(1, 0), [-k, 0.0, 0.0, -k]);
        assert_eq!(d.block(0, 1), [0.0; 4]);
    }

    #[test]
    fn delta_identity_and_inverse() {
        let d = difference_table(&chsh_xor()).unwrap();
        assert_eq!(apply_delta(&d, DeltaParams::default()), d);
        let p = DeltaParams::new(0.3, -1.0, 2.0, 0.125);
        assert!(apply_delta(&apply_delta(&d, p), p.neg()).max_abs_diff(&d) < 1e-15);
    }

    #[test]
    fn generators_shift_by_stencil() {
        let t = counterexample_game(CounterExample::C2, 0.3);
        let p = DeltaParams::new(0.7, -0.2, 1.1, -2.0);
        let lhs = difference_table(&add_generators(&t, p).unwrap()).unwrap();
        let rhs = apply_delta(&difference_table(&t).unwrap(), p);
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        for g in delta_generators() {
            assert_eq!(ns_constant_value(&g).unwrap(), Some(1.0));
        }
    }

    #[test]
    fn chsh_constant_part_reduces_to_zero() {
        // 2·I₂ − I_CHSH is the constant 3.
        let c = cglmp2_zg().scaled(2.0).sub(&chsh_xor()).unwrap();
        let (_, residual) = reduce_to_zero(&difference_table(&c).unwrap());
        assert_eq!(residual, 0.0);
        assert_eq!(ns_constant_value(&c).unwrap(), Some(3.0));
        assert_eq!(delta_certificate(&c).unwrap().unwrap().k, 3.0);
    }

    #[test]
    fn family_constants() {
        for gamma in [0.25, 1.0, 1.7] {
            let f = counterexample_gamma_family(CounterExample::C1);
            let add = counterexample_game(CounterExample::C1, gamma)
                .sub(&f.base)
                .unwrap();
            let k = ns_constant_value(&add).unwrap().unwrap();
            assert!((k - 2.0 * gamma).abs() < 1e-12);
        }
        let c2 = counterexample_game(CounterExample::C2, 1.0)
            .sub(&counterexample_game(CounterExample::C2, 0.0))
            .unwrap();
        assert_eq!(ns_constant_value(&c2).unwrap(), Some(0.0));
    }

    #[test]
    fn equivalences() {
        let cert = ns_equivalent(&chsh_xor(), &cglmp2_zg().scaled(2.0))
            .unwrap()
            .unwrap();
        assert_eq!(cert.k, -3.0);
        assert!(cert.residual < 1e-15);
        let g3 = ns_equivalent(&gd_game(3).unwrap(), &zohren_gill(3).unwrap().scaled(3.0))
            .unwrap()
            .unwrap();
        assert_eq!(g3.k, -3.0);
        assert!(g3.witness.is_none());
        assert!(
            ns_equivalent(&chsh_xor(), &counterexample_game(CounterExample::C1, 0.0))
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn basis_at_zero_and_values() {
        assert!(constant_basis(0.0)
            .iter()
            .all(|t| t.coeffs().iter().all(|&c| c == 0.0)));
        let basis = constant_basis(-1.5);
        assert_eq!(basis.len(), 12);
        for t in &basis {
            assert_eq!(ns_constant_value(t).unwrap(), Some(-1.5));
        }
    }

    #[test]
    fn lift_preserves_differences_and_sums() {
        let t = counterexample_game(CounterExample::C1, 0.4648);
        let d = difference_table(&t).unwrap();
        let back = lift(&d, block_sums(&t).unwrap()).unwrap();
        assert!(back.max_abs_diff(&t).unwrap() < 1e-15);
        let mut bad = d;
        bad.blocks[0][RIGHT] += 1.0;
        assert!(lift(&bad, [0.0; 4]).is_err());
    }

    #[test]
    fn ns_vertices_are_ns() {
        let v = ns_vertices_2222();
        assert_eq!(v.len(), 24);
        for b in &v {
            b.check(0.0).unwrap();
        }
        assert_eq!(evaluate(&chsh_xor(), &v[16]).unwrap(), 4.0);
    }

    #[test]
    fn non_2222_rejected() {
        let e = BellExpression::zeros(Scenario::bipartite(2, 2, 3, 3).unwrap());
        assert!(matches!(
            difference_table(&e),
            Err(Error::UnsupportedScenario { .. })
        ));
        assert_eq!(ns_constant_value(&e).unwrap(), Some(0.0));
    }

    fn table(v: &[f64]) -> BellExpression {
        BellExpression::new(Scenario::chsh(), v.to_vec()).unwrap()
    }

    proptest! {
        #[test]
        fn delta_group_laws(d in prop::array::uniform16(-3.0f64..3.0), p in prop::array::uniform4(-2.0f64..2.0),
                            q in prop::array::uniform4(-2.0f64..2.0)) {
            let d = difference_table(&table(&d)).unwrap();
            let p = DeltaParams::new(p[0], p[1], p[2], p[3]);
            let q = DeltaParams::new(q[0], q[1], q[2], q[3]);
            prop_assert!(apply_delta(&apply_delta(&d, p), q).max_abs_diff(&apply_delta(&d, p.add(q))) < 1e-12);
            prop_assert!(apply_delta(&apply_delta(&d, p), p.neg()).max_abs_diff(&d) < 1e-12);
            prop_assert!(apply_delta(&d, p).consistency_residual() < 1e-12);
        }

        #[test]
        fn lifted_delta_preserves_ns_value(v in prop::array::uniform16(-3.0f64..3.0), p in prop::array::uniform4(-2.0f64..2.0),
                                           w in prop::collection::vec(0.0f64..1.0, 24)) {
            let t = table(&v);
            let p = DeltaParams::new(p[0], p[1], p[2], p[3]);
            let d2 = apply_delta(&difference_table(&t).unwrap(), p);
            let shift = add_generators(&t, p).unwrap();
            let lifted = lift(&d2, block_sums(&shift).unwrap()).unwrap();
            prop_assert!(lifted.max_abs_diff(&shift).unwrap() < 1e-12);
            prop_assume!(w.iter().sum::<f64>() > 1e-3);
            let behavior = ns_mixture(&w).unwrap();
            let lhs = evaluate(&lifted, &behavior).unwrap();
            let rhs = evaluate(&t, &behavior).unwrap() + p.sum();
            prop_assert!((lhs - rhs).abs() < 1e-9);
            // Keeping T's own block sums removes the generator mass again.
            let same_sums = lift(&d2, block_sums(&t).unwrap()).unwrap();
            prop_assert!((evaluate(&same_sums, &behavior).unwrap() - evaluate(&t, &behavior).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn constant_two_routes_agree(w in prop::collection::vec(0.0f64..1.0, 12), k in -4.0f64..4.0,
                                     noise in prop::array::uniform16(-1.0f64..1.0), perturb in any::<bool>()) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-3);
            let basis = constant_basis(k);
            let mut t = BellExpression::zeros(Scenario::chsh());
            for (b, wi) in basis.iter().zip(&w) {
                t = t.add_scaled(b, wi / total).unwrap();
            }
            if perturb {
                t = t.add_scaled(&table(&noise), 0.1).unwrap();
            }
            let by_enum = ns_constant_value(&t).unwrap();
            let by_delta = delta_certificate(&t).unwrap();
            prop_assert_eq!(by_enum.is_some(), by_delta.is_some());
            if let (Some(a), Some(b)) = (by_enum, by_delta) {
                prop_assert!((a - k).abs() < 1e-9);
                prop_assert!((b.k - k).abs() < 1e-9);
            }
        }

        #[test]
        fn equivalence_relation(k1 in -3.0f64..3.0, k2 in -3.0f64..3.0, base in prop::array::uniform16(-2.0f64..2.0),
                                w1 in prop::collection::vec(0.0f64..1.0, 12), w2 in prop::collection::vec(0.0f64..1.0, 12)) {
            let mix = |k: f64, w: &[f64]| {
                let total: f64 = w.iter().sum::<f64>().max(1e-6);
                constant_basis(k).iter().zip(w).fold(BellExpression::zeros(Scenario::chsh()), |acc, (b, wi)| acc.add_scaled(b, wi / total).unwrap())
            };
            prop_assume!(w1.iter().sum::<f64>() > 1e-3 && w2.iter().sum::<f64>() > 1e-3);
            let a = table(&base);
            let b = a.add(&mix(k1, &w1)).unwrap();
            let c = b.add(&mix(k2, &w2)).unwrap();
            prop_assert!(ns_equivalent(&a, &a).unwrap().unwrap().k.abs() < 1e-12);
            let ab = ns_equivalent(&a, &b).unwrap().unwrap().k;
            let ba = ns_equivalent(&b, &a).unwrap().unwrap().k;
            let ac = ns_equivalent(&a, &c).unwrap().unwrap().k;
            let bc = ns_equivalent(&b, &c).unwrap().unwrap().k;
            prop_assert!((ab + ba).abs() < 1e-9);
            prop_assert!((ac - (ab + bc)).abs() < 1e-9);
            prop_assert!((ab + k1).abs() < 1e-9);
        }
    }
}
