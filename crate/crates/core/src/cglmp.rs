//! CGLMP for `d` outcomes: the Zohren–Gill form, the weighted XOR game `G_d`,
//! the standard Fourier measurements and their steering operators.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{c, fix_phase, hermitian_eig, phase, re, ComplexMatrix, C64, MAX_DIM};
use crate::ow::{ow_report, OwReport, DEFAULT_TOL};
use crate::quantum::{Measurement, Realization, Steering};
use crate::{BellExpression, Error, Result, Scenario};

/// Largest `d` the acceptance checks cover.
pub const ACCEPTANCE_MAX_D: usize = 8;

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d ≥ 2, got {d}")));
    }
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: MAX_DIM,
        });
    }
    Ok(())
}

pub fn scenario(d: usize) -> Result<Scenario> {
    check_d(d)?;
    Scenario::bipartite(2, 2, d, d)
}

/// `P(a₀ ≤ b₀) + P(a₀ ≥ b₁) + P(a₁ ≥ b₀) + P(a₁ < b₁)`, local bound 3.
pub fn zohren_gill(d: usize) -> Result<BellExpression> {
    let s = scenario(d)?;
    let e = BellExpression::from_fn_int(s, |o, i| {
        let (a, b) = (o[0], o[1]);
        let hit = match (i[0], i[1]) {
            (0, 0) => a <= b,
            (0, 1) | (1, 0) => a >= b,
            _ => a < b,
        };
        hit as i64
    });
    Ok(e.with_label(format!("ZG{d}")))
}

/// `G_d = Σ_{xy} Σ_Δ Δ·P(a − b = (−1)^{x+y}(Δ+1) − xy | xy)`.
pub fn gd_game(d: usize) -> Result<BellExpression> {
    let s = scenario(d)?;
    let di = d as i64;
    let e = BellExpression::from_fn_int(s, |o, i| {
        let (x, y) = (i[0] as i64, i[1] as i64);
        let sign = if (x + y) % 2 == 0 { 1 } else { -1 };
        let diff = (o[0] as i64 - o[1] as i64).rem_euclid(di);
        (0..di)
            .find(|&delta| (sign * (delta + 1) - x * y).rem_euclid(di) == diff)
            .unwrap_or(0)
    });
    Ok(e.with_label(format!("G{d}")))
}

fn alice_phase(d: usize, x: usize) -> f64 {
    if x == 0 {
        0.0
    } else {
        PI / d as f64
    }
}

fn bob_phase(d: usize, y: usize) -> f64 {
    let t = PI / (2.0 * d as f64);
    if y == 0 {
        -t
    } else {
        t
    }
}

/// Alice's ket `|a_x⟩ = d^{-1/2} Σ_k e^{i2πka/d} e^{ikφ_x}|k⟩`.
pub fn alice_ket(d: usize, x: usize, a: usize) -> Vec<C64> {
    let n = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| phase(2.0 * PI * (k * a) as f64 / d as f64 + k as f64 * alice_phase(d, x)) * n)
        .collect()
}

/// Bob's ket `|b_y⟩ = d^{-1/2} Σ_k e^{−i2πkb/d} e^{ikθ_y}|k⟩`.
pub fn bob_ket(d: usize, y: usize, b: usize) -> Vec<C64> {
    let n = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| phase(-2.0 * PI * (k * b) as f64 / d as f64 + k as f64 * bob_phase(d, y)) * n)
        .collect()
}

/// Alice's and Bob's measurements, each `[input 0, input 1]`.
pub fn cglmp_measurements(d: usize) -> Result<[Vec<Measurement>; 2]> {
    check_d(d)?;
    let party = |ket: fn(usize, usize, usize) -> Vec<C64>| -> Result<Vec<Measurement>> {
        (0..2)
            .map(|x| {
                let basis: Vec<Vec<C64>> = (0..d).map(|a| ket(d, x, a)).collect();
                Measurement::from_basis(&basis)
            })
            .collect()
    };
    Ok([party(alice_ket)?, party(bob_ket)?])
}

/// `f₀(k,k') = (2/d) Σ_Δ Δ cos[(π/2d)(k−k')(4Δ+3)]`.
pub fn f0(d: usize, k: usize, kp: usize) -> f64 {
    let diff = k as f64 - kp as f64;
    let w = PI / (2.0 * d as f64);
    (0..d)
        .map(|delta| delta as f64 * (w * diff * (4 * delta + 3) as f64).cos())
        .sum::<f64>()
        * 2.0
        / d as f64
}

/// `f₁ = f₀·e^{−iπ(k−k')/d}`.
pub fn f1(d: usize, k: usize, kp: usize) -> C64 {
    phase(-PI * (k as f64 - kp as f64) / d as f64) * f0(d, k, kp)
}

/// `B(x,a)_{kk'} = e^{−i2πa(k−k')/d} f_x(k,k')`, the steering operator of
/// `G_d` on Bob for Alice's context `(x, a)`.
pub fn effective_ops_analytic(d: usize, x: usize, a: usize) -> Result<ComplexMatrix> {
    check_d(d)?;
    if x > 1 || a >= d {
        return Err(Error::ContextOutOfRange(format!(
            "(x, a) = ({x}, {a}) for d = {d}"
        )));
    }
    ComplexMatrix::from_fn(d, |k, kp| {
        let f = if x == 0 {
            re(f0(d, k, kp))
        } else {
            f1(d, k, kp)
        };
        phase(-2.0 * PI * (a as f64) * (k as f64 - kp as f64) / d as f64) * f
    })
}

/// `U_{a'a} = Σ_k e^{−i2π(a'−a)k/d}|k⟩⟨k|`, taking `B(x,a)` to `B(x,a')`.
pub fn shift_unitary(d: usize, a_to: usize, a_from: usize) -> Result<ComplexMatrix> {
    let diff = a_to as f64 - a_from as f64;
    let diag: Vec<C64> = (0..d)
        .map(|k| phase(-2.0 * PI * diff * k as f64 / d as f64))
        .collect();
    ComplexMatrix::diag(&diag)
}

/// `V = Σ_k e^{−iπk/d}|k⟩⟨k|`, taking `B(0,a)` to `B(1,a)`.
pub fn input_unitary(d: usize) -> Result<ComplexMatrix> {
    let diag: Vec<C64> = (0..d).map(|k| phase(-PI * k as f64 / d as f64)).collect();
    ComplexMatrix::diag(&diag)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalState {
    pub realization: Realization,
    /// Top eigenvector of `B(0,0)`, first nonzero component real positive.
    pub beta: Vec<C64>,
    pub lambda: f64,
    /// Multiplicity of the top eigenvalue; 1 whenever the state is unique.
    pub multiplicity: usize,
}

/// `Σ_k β_k |kk⟩` with the Fourier measurements.
pub fn optimal_state(d: usize) -> Result<OptimalState> {
    let b00 = effective_ops_analytic(d, 0, 0)?;
    let eig = hermitian_eig(&b00)?;
    let mut beta = eig.top_vector().to_vec();
    fix_phase(&mut beta);
    let realization = correlated_realization(d, &beta)?;
    Ok(OptimalState {
        realization,
        beta,
        lambda: eig.max(),
        multiplicity: eig.top_multiplicity(1e-9),
    })
}

fn correlated_realization(d: usize, coeffs: &[C64]) -> Result<Realization> {
    let mut state = alloc::vec![c(0.0, 0.0); d * d];
    for (k, &v) in coeffs.iter().enumerate() {
        state[k * d + k] = v;
    }
    let [ma, mb] = cglmp_measurements(d)?;
    Realization::new(alloc::vec![d, d], state, alloc::vec![ma, mb])
}

/// `γ = (√11 − √3)/2`.
pub fn psi_gamma_coefficient() -> f64 {
    (11f64.sqrt() - 3f64.sqrt()) / 2.0
}

/// `(|00⟩ + γ|11⟩ + |22⟩)/√(2+γ²)` with the `d = 3` Fourier measurements.
pub fn psi_gamma_realization() -> Result<Realization> {
    let g = psi_gamma_coefficient();
    let n = (2.0 + g * g).sqrt();
    correlated_realization(3, &[re(1.0 / n), re(g / n), re(1.0 / n)])
}

/// Alice-steers-Bob report of `ZG3` at the `ψ_γ` realization; contexts in
/// order `(0,0), (0,1), (0,2), (1,0), (1,1), (1,2)`.
pub fn cglmp3_report() -> Result<OwReport> {
    ow_report(
        &zohren_gill(3)?,
        &psi_gamma_realization()?,
        &Steering::a_to_b(),
        DEFAULT_TOL,
    )
}

/// Reported top eigenvalues for [`cglmp3_report`].
pub const TABLE1_LAMBDA: [f64; 6] = [2.0, 2.0, 2.0, 1.7454, 1.7454, 1.0];
/// Reported expectations for [`cglmp3_report`].
pub const TABLE1_EXPECTATION: [f64; 6] = [1.8083, 1.8407, 1.8083, 1.7287, 1.7287, 1.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{canonical_chsh_realization, chsh_xor};
    use crate::linalg::inner;
    use crate::ns::ns_equivalent;
    use crate::quantum::{effective_operator, Context};
    use crate::scenario::local_bound;

    #[test]
    fn d2_reductions() {
        assert_eq!(gd_game(2).unwrap().coeffs(), chsh_xor().coeffs());
        let zg = zohren_gill(2).unwrap();
        assert_eq!(zg.table_entry(0, 0), 1.0);
        assert_eq!(zg.table_entry(3, 3), 0.0);
    }

    #[test]
    fn gd3_table() {
        let g = gd_game(3).unwrap();
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|r| (0..6).map(|c| g.table_entry(r, c)).collect())
            .collect();
        assert_eq!(rows[0], [2.0, 1.0, 0.0, 2.0, 0.0, 1.0]);
        assert_eq!(rows[3], [2.0, 0.0, 1.0, 0.0, 2.0, 1.0]);
    }

    #[test]
    fn local_bounds_and_identity() {
        for d in 2..=5 {
            let zg = zohren_gill(d).unwrap();
            assert_eq!(local_bound(&zg).unwrap().value, 3.0, "d = {d}");
            let cert = ns_equivalent(&gd_game(d).unwrap(), &zg.scaled(d as f64))
                .unwrap()
                .unwrap();
            assert_eq!(cert.k, -3.0, "d = {d}");
        }
    }

    #[test]
    fn gd_entries_are_bounded() {
        for d in 2..=6 {
            let g = gd_game(d).unwrap();
            for &v in g.exact().unwrap() {
                assert!((0..d as i64).contains(&v));
            }
        }
    }

    #[test]
    fn fourier_bases() {
        for d in [2, 3, 5, 7] {
            for x in 0..2 {
                for a in 0..d {
                    for ap in 0..d {
                        let ip = inner(&alice_ket(d, x, a), &alice_ket(d, x, ap));
                        let iq = inner(&bob_ket(d, x, a), &bob_ket(d, x, ap));
                        let want = if a == ap { 1.0 } else { 0.0 };
                        assert!((ip - re(want)).norm() < 1e-12 && (iq - re(want)).norm() < 1e-12);
                    }
                }
            }
        }
        assert!(cglmp_measurements(7).is_ok());
    }

    #[test]
    fn kernel_shape() {
        for d in 2..=6 {
            for k in 0..d {
                for kp in 0..d {
                    assert!((f0(d, k, kp) - f0(d, kp, k)).abs() < 1e-12);
                    assert!((f1(d, k, kp).norm() - f0(d, k, kp).abs()).abs() < 1e-12);
                    if k > 0 && kp > 0 {
                        assert!((f0(d, k, kp) - f0(d, k - 1, kp - 1)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn analytic_operators_match_projector_sums() {
        for d in 2..=6 {
            let r = optimal_state(d).unwrap().realization;
            let g = gd_game(d).unwrap();
            for x in 0..2 {
                for a in 0..d {
                    let op =
                        effective_operator(&g, &r, &Steering::a_to_b(), &Context::single(x, a))
                            .unwrap();
                    let an = effective_ops_analytic(d, x, a).unwrap();
                    assert!(an.is_hermitian());
                    assert!(
                        op.matrix.max_abs_diff(&an).unwrap() < 1e-9,
                        "d = {d} ({x},{a})"
                    );
                }
            }
        }
    }

    #[test]
    fn covariance() {
        for d in [3, 4, 5] {
            let v = input_unitary(d).unwrap();
            for a in 0..d {
                let b0a = effective_ops_analytic(d, 0, a).unwrap();
                let b1a = effective_ops_analytic(d, 1, a).unwrap();
                assert!(b0a.conjugate_by(&v).unwrap().max_abs_diff(&b1a).unwrap() < 1e-12);
                for ap in 0..d {
                    let u = shift_unitary(d, ap, a).unwrap();
                    let target = effective_ops_analytic(d, 0, ap).unwrap();
                    assert!(b0a.conjugate_by(&u).unwrap().max_abs_diff(&target).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn optimal_state_is_ow() {
        for d in 2..=ACCEPTANCE_MAX_D {
            let opt = optimal_state(d).unwrap();
            assert_eq!(opt.multiplicity, 1);
            let rep = ow_report(
                &gd_game(d).unwrap(),
                &opt.realization,
                &Steering::a_to_b(),
                1e-8,
            )
            .unwrap();
            assert!(rep.verdict, "d = {d}: {}", rep.max_gap());
            for c in &rep.contexts {
                assert!((c.lambda_max - opt.lambda).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn steered_states_follow_fourier_phases() {
        let d = 4;
        let opt = optimal_state(d).unwrap();
        for x in 0..2 {
            for a in 0..d {
                let st = opt
                    .realization
                    .steered_state(&Steering::a_to_b(), &Context::single(x, a))
                    .unwrap();
                let want: Vec<C64> = (0..d)
                    .map(|k| {
                        phase(-2.0 * PI * (a * k) as f64 / d as f64 - k as f64 * alice_phase(d, x))
                            * opt.beta[k]
                    })
                    .collect();
                let rho = ComplexMatrix::projector_onto(&want).unwrap();
                assert!(st.rho.unwrap().max_abs_diff(&rho).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn d2_matches_canonical_chsh() {
        let p = optimal_state(2).unwrap().realization.behavior().unwrap();
        let q = canonical_chsh_realization().behavior().unwrap();
        let diff = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9);
    }

    #[test]
    fn d3_state_is_psi_gamma() {
        let opt = optimal_state(3).unwrap();
        let g = psi_gamma_coefficient();
        let n = (2.0 + g * g).sqrt();
        for (k, want) in [1.0 / n, g / n, 1.0 / n].iter().enumerate() {
            assert!((opt.beta[k] - re(*want)).norm() < 1e-10);
        }
    }

    #[test]
    fn table1() {
        let rep = cglmp3_report().unwrap();
        assert_eq!(rep.contexts.len(), 6);
        for (i, c) in rep.contexts.iter().enumerate() {
            assert!(
                (c.lambda_max - TABLE1_LAMBDA[i]).abs() < 5e-4,
                "{i}: {}",
                c.lambda_max
            );
            assert!(
                (c.expectation.unwrap() - TABLE1_EXPECTATION[i]).abs() < 5e-4,
                "{i}: {:?}",
                c.expectation
            );
        }
        assert!(rep.contexts[5].gap.unwrap().abs() < 1e-12);
        assert!(!rep.verdict);
    }

    #[test]
    fn rejects_small_d() {
        assert!(zohren_gill(1).is_err());
        assert!(gd_game(0).is_err());
        assert!(effective_ops_analytic(3, 2, 0).is_err());
    }
}
