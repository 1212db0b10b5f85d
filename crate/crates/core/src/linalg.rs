//! Small dense complex matrices and a cyclic Jacobi Hermitian eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex;

use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest supported dimension. A two-qudit Bell operator at `d = 8` is 64×64.
pub const MAX_DIM: usize = 64;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const PROJECTOR_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `e^{iφ}`.
pub fn phase(phi: f64) -> C64 {
    C64::new(phi.cos(), phi.sin())
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ComplexMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = re(1.0);
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        Ok(m)
    }

    /// Builds from row-major entries; the length must be a perfect square.
    pub fn from_vec(data: Vec<C64>) -> Result<Self> {
        let n = (0..=MAX_DIM)
            .find(|k| k * k == data.len())
            .ok_or(Error::DimensionMismatch {
                expected: (data.len() as f64).sqrt().ceil() as usize,
                found: data.len(),
            })?;
        check_dim(n)?;
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::from_fn(n, |i, j| re(entries[i * n + j]))
    }

    pub fn diag(d: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(d.len())?;
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        Ok(m)
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector_onto(v: &[C64]) -> Result<Self> {
        let nn = norm_sqr(v);
        if nn == 0.0 {
            return Err(Error::InvalidParameter(
                "projector onto the zero vector".into(),
            ));
        }
        Ok(Self::outer(v, v)?.scale_real(1.0 / nn))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        ComplexMatrix { n, data }
    }

    pub fn scale(&self, k: C64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| v * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| v * k).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `self += k·other`.
    pub fn add_scaled_in_place(&mut self, other: &Self, k: C64) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let (n, m) = (self.n, other.n);
        check_dim(n * m)?;
        Self::from_fn(n * m, |i, j| {
            self.get(i / m, j / m) * other.get(i % m, j % m)
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let n = self.n;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect())
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> Result<C64> {
        Ok(inner(v, &self.apply(v)?))
    }

    /// `Tr(M ρ)`.
    pub fn expectation_in(&self, rho: &ComplexMatrix) -> Result<C64> {
        self.check_same(rho)?;
        let n = self.n;
        let mut t = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                t += self.data[i * n + j] * rho.data[j * n + i];
            }
        }
        Ok(t)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `‖M − M†‖_∞` (max entry).
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        r
    }

    /// `‖MM† − I‖_∞`.
    pub fn unitary_residual(&self) -> f64 {
        let p = self.try_mul(&self.adjoint()).expect("same dimension");
        let id = Self::identity(self.n).expect("valid dimension");
        p.max_abs_diff(&id).expect("same dimension")
    }

    /// `‖M² − M‖_∞`.
    pub fn projector_residual(&self) -> f64 {
        let p = self.try_mul(self).expect("same dimension");
        p.max_abs_diff(self).expect("same dimension")
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= HERMITIAN_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_residual() <= UNITARY_TOL
    }

    pub fn is_projector(&self) -> bool {
        self.is_hermitian() && self.projector_residual() <= PROJECTOR_TOL
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        u.try_mul(self)?.try_mul(&u.adjoint())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`ComplexMatrix::try_add`] otherwise.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// `⟨u|v⟩`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

pub fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// Kronecker product of two vectors.
pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter()
        .flat_map(|&a| v.iter().map(move |&b| a * b))
        .collect()
}

/// Multiplies `v` by a unit phase so its first component above `1e-10` in
/// modulus is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-10) {
        let ph = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}

/// Spectral decomposition; `vectors[k]` belongs to `values[k]`, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Eigen {
    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn top_vector(&self) -> &[C64] {
        self.vectors.last().expect("non-empty spectrum")
    }

    /// Number of eigenvalues within `tol` of the largest.
    pub fn top_multiplicity(&self, tol: f64) -> usize {
        let m = self.max();
        self.values.iter().filter(|&&v| v >= m - tol).count()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n).expect("valid dimension");
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..n {
                for j in 0..n {
                    m.data[i * n + j] += v[i] * v[j].conj() * *lam;
                }
            }
        }
        m
    }

    /// Projector onto the eigenspace of eigenvalues above `threshold`.
    pub fn projector_above(&self, threshold: f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n).expect("valid dimension");
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            if *lam > threshold {
                for i in 0..n {
                    for j in 0..n {
                        m.data[i * n + j] += v[i] * v[j].conj();
                    }
                }
            }
        }
        m
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// The input is accepted if `‖M − M†‖ ≤ 1e-12·max(1, ‖M‖)` and symmetrized.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    let residual = m.hermitian_residual();
    if residual > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.n;
    let mut a = m.hermitian_part();
    for i in 0..n {
        a.data[i * n + i].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n)?;
    let scale = a.frobenius().max(1.0);

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.data[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.data[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                let g = 100.0 * r;
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a.data[p * n + q] = C64::new(0.0, 0.0);
                    a.data[q * n + p] = C64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, r, app, aqq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.data[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<C64> = (0..n).map(|i| v.data[i * n + k]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(Eigen { values, vectors })
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    apq: C64,
    r: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.n;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let e = apq.conj() / r;
    let (gpp, gpq, gqp, gqq) = (re(cs), re(sn), e * (-sn), e * cs);

    // A ← A G, V ← V G
    for k in 0..n {
        for m in [&mut *a, &mut *v] {
            let kp = m.data[k * n + p];
            let kq = m.data[k * n + q];
            m.data[k * n + p] = kp * gpp + kq * gqp;
            m.data[k * n + q] = kp * gpq + kq * gqq;
        }
    }
    // A ← G† A
    for k in 0..n {
        let pk = a.data[p * n + k];
        let qk = a.data[q * n + k];
        a.data[p * n + k] = gpp.conj() * pk + gqp.conj() * qk;
        a.data[q * n + k] = gpq.conj() * pk + gqq.conj() * qk;
    }
    a.data[p * n + q] = C64::new(0.0, 0.0);
    a.data[q * n + p] = C64::new(0.0, 0.0);
    a.data[p * n + p].im = 0.0;
    a.data[q * n + q].im = 0.0;
}
