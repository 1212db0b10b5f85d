//! The Mermin inequality on `(2,2,2;2,2,2)` and its two steering splits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{re, ComplexMatrix};
use crate::ow::{ow_report, OwReport};
use crate::quantum::{ket, pauli, Measurement, Realization, Steering};
use crate::scenario::Behavior;
use crate::{BellExpression, Error, Result, Scenario};

pub fn scenario() -> Scenario {
    Scenario::tripartite([2, 2, 2], [2, 2, 2]).expect("valid scenario")
}

/// `V = 1` iff `xyz ∈ {000, 011, 101, 110}` and `a ⊕ b ⊕ c = x ∨ y ∨ z`.
/// Local bound 3, quantum maximum 4.
pub fn mermin_expression() -> BellExpression {
    BellExpression::from_fn_int(scenario(), |o, i| {
        let even_inputs = (i[0] + i[1] + i[2]) % 2 == 0;
        let or = i[0] | i[1] | i[2];
        (even_inputs && (o[0] ^ o[1] ^ o[2]) == or) as i64
    })
    .with_label("Mermin")
}

/// `⟨A₀B₀C₀⟩ − ⟨A₀B₁C₁⟩ − ⟨A₁B₀C₁⟩ − ⟨A₁B₁C₀⟩`, equal to `2 I_M − 4` on
/// normalized behaviors.
pub fn mermin_correlator(p: &Behavior) -> Result<f64> {
    if p.scenario() != &scenario() {
        return Err(Error::UnsupportedScenario {
            required: "(2,2,2;2,2,2)",
        });
    }
    let corr = |x: usize, y: usize, z: usize| {
        let mut e = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let s = if (a + b + c) % 2 == 0 { 1.0 } else { -1.0 };
                    e += s * p.prob(&[a, b, c], &[x, y, z]);
                }
            }
        }
        e
    };
    Ok(corr(0, 0, 0) - corr(0, 1, 1) - corr(1, 0, 1) - corr(1, 1, 0))
}

fn ghz_state() -> Vec<crate::linalg::C64> {
    let mut s = vec![re(0.0); 8];
    s[0] = re(FRAC_1_SQRT_2);
    s[7] = re(FRAC_1_SQRT_2);
    s
}

fn with_observables(
    state: Vec<crate::linalg::C64>,
    o0: &ComplexMatrix,
    o1: &ComplexMatrix,
) -> Result<Realization> {
    let party = || -> Result<Vec<Measurement>> {
        Ok(vec![
            Measurement::from_observable(o0)?,
            Measurement::from_observable(o1)?,
        ])
    };
    Realization::new(vec![2, 2, 2], state, vec![party()?, party()?, party()?])
}

/// `(|000⟩ + |111⟩)/√2`, every party measuring `σ_x` on input 0 and `σ_y`
/// on input 1. Reaches `I_M = 4`.
pub fn ghz_realization() -> Realization {
    with_observables(ghz_state(), &pauli::x(), &pauli::y()).expect("valid realization")
}

/// GHZ with `σ_z` on input 0 and `σ_y` on input 1.
pub fn ghz_z_realization() -> Realization {
    with_observables(ghz_state(), &pauli::z(), &pauli::y()).expect("valid realization")
}

/// `|000⟩` measuring `σ_z` on both inputs; every outcome is 0, so `I_M = 1`.
pub fn product_realization() -> Realization {
    let s = [ket(2, 0), ket(2, 0), ket(2, 0)];
    let state = crate::linalg::kron_vec(&crate::linalg::kron_vec(&s[0], &s[1]), &s[2]);
    with_observables(state, &pauli::z(), &pauli::z()).expect("valid realization")
}

/// Which parties are black boxes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SteeringType {
    /// One box (A) steers the characterised pair BC.
    I,
    /// Two boxes (AB) steer the characterised C.
    II,
}

impl SteeringType {
    pub fn steering(self) -> Steering {
        match self {
            SteeringType::I => Steering::a_to_bc(),
            SteeringType::II => Steering::ab_to_c(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "i" | "I" | "1" => Ok(SteeringType::I),
            "ii" | "II" | "2" => Ok(SteeringType::II),
            _ => Err(Error::InvalidParameter(alloc::format!(
                "unknown steering type {s:?}"
            ))),
        }
    }
}

pub fn tripartite_ow_report(
    expr: &BellExpression,
    r: &Realization,
    ty: SteeringType,
    tol: f64,
) -> Result<OwReport> {
    if r.parties() != 3 {
        return Err(Error::UnsupportedScenario {
            required: "three parties",
        });
    }
    ow_report(expr, r, &ty.steering(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random_realization, Context};
    use crate::scenario::{evaluate, local_bound};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounds() {
        let m = mermin_expression();
        assert_eq!(local_bound(&m).unwrap().value, 3.0);
        let p = ghz_realization().behavior().unwrap();
        assert!((evaluate(&m, &p).unwrap() - 4.0).abs() < 1e-12);
        assert!((mermin_correlator(&p).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_even_parity() {
        let p = ghz_realization().behavior().unwrap();
        p.check(1e-12).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let want = if (a + b + c) % 2 == 0 { 0.25 } else { 0.0 };
                    assert!((p.prob(&[a, b, c], &[0, 0, 0]) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn correlator_identity_on_random_behaviors() {
        let m = mermin_expression();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_realization(&mut rng, &[2, 2, 2], &[2, 2, 2])
                .unwrap()
                .behavior()
                .unwrap();
            let lhs = 2.0 * evaluate(&m, &p).unwrap() - 4.0;
            assert!((lhs - mermin_correlator(&p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_reports() {
        let (m, r) = (mermin_expression(), ghz_realization());
        for (ty, lam) in [(SteeringType::I, 2.0), (SteeringType::II, 1.0)] {
            let rep = tripartite_ow_report(&m, &r, ty, 1e-10).unwrap();
            assert!(rep.verdict);
            for c in &rep.contexts {
                assert!((c.lambda_max - lam).abs() < 1e-10);
                assert!(c.gap.unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn decomposition_identities() {
        let (m, r) = (mermin_expression(), ghz_realization());
        let value = evaluate(&m, &r.behavior().unwrap()).unwrap();
        for ty in [SteeringType::I, SteeringType::II] {
            let rep = tripartite_ow_report(&m, &r, ty, 1e-10).unwrap();
            let total: f64 = rep
                .contexts
                .iter()
                .map(|c| c.weight * c.expectation.unwrap_or(0.0))
                .sum();
            assert!((total - value).abs() < 1e-9, "{ty:?}: {total} vs {value}");
            // Each steering setting carries its share of the value.
            let settings = if ty == SteeringType::I { 2.0 } else { 4.0 };
            for c in &rep.contexts {
                assert!((c.expectation.unwrap() - value / settings).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_under_party_permutation() {
        let m = mermin_expression();
        let s = scenario();
        s.for_each_entry(|o, i| {
            let v = m.coeff(o, i);
            assert_eq!(v, m.coeff(&[o[1], o[2], o[0]], &[i[1], i[2], i[0]]));
            assert_eq!(v, m.coeff(&[o[1], o[0], o[2]], &[i[1], i[0], i[2]]));
        });
        let r = ghz_realization();
        let a = ow_report(&m, &r, &Steering::a_to_bc(), 1e-10).unwrap();
        let b = ow_report(&m, &r, &Steering::new(vec![1], vec![0, 2]).unwrap(), 1e-10).unwrap();
        for (ca, cb) in a.contexts.iter().zip(&b.contexts) {
            assert_eq!(ca.context, cb.context);
            assert!((ca.lambda_max - cb.lambda_max).abs() < 1e-10);
            assert!((ca.expectation.unwrap() - cb.expectation.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_is_not_ow() {
        let (m, r) = (mermin_expression(), product_realization());
        let rep = tripartite_ow_report(&m, &r, SteeringType::I, 1e-7).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
        assert!(!rep.verdict);
    }

    #[test]
    fn steered_state_z_variant() {
        let st = ghz_z_realization()
            .steered_state(&Steering::a_to_bc(), &Context::single(0, 0))
            .unwrap();
        assert!((st.weight - 0.5).abs() < 1e-12);
        let rho = st.rho.unwrap();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(rho.frobenius() - 1.0 < 1e-12);
    }
}
