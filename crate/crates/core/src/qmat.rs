//! Small complex matrices (dimension 2 or 4) and the state-space tools built
//! on them: Hermitian eigendecomposition by cyclic Jacobi rotations, trace
//! norm, trace distance and Bloch-ball parametrization of qubit states.
//!
//! Basis convention used throughout the crate: `|e> = (1, 0)` is the excited
//! state and `|g> = (0, 1)` the ground state. Two-qubit matrices are ordered
//! `|ee>, |eg>, |ge>, |gg>` with the system as the first tensor factor.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance on `|A - A^dagger|`, relative to the largest entry
/// once that exceeds one.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a state's trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;
const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix of dimension 2 or 4, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex64; MAX_DIM * MAX_DIM],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Dimension(dim));
        }
        Ok(Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row slices; every row must have `rows.len()` entries.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cplx: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&cplx)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `A - A^dagger`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_asymmetry() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for z in out.entries_mut() {
            *z *= c;
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum();
            }
        }
        out
    }

    /// Kronecker product of two 2x2 matrices (first factor is the system).
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(Error::Dimension(a.dim.max(b.dim)));
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    #[inline]
    fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim * self.dim]
    }

    #[inline]
    fn entries_mut(&mut self) -> &mut [Complex64] {
        let n = self.dim * self.dim;
        &mut self.data[..n]
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.entries_mut().iter_mut().zip(rhs.entries()) {
            *a += b;
        }
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.entries_mut().iter_mut().zip(rhs.entries()) {
            *a -= b;
        }
        self
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, c: f64) -> Self {
        self.scale(c)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectrum of a Hermitian matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors stored as columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    dim: usize,
    values: [f64; MAX_DIM],
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = self.vectors;
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                    .sum();
            }
        }
        out
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let asymmetry = a.max_asymmetry();
    if asymmetry > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// Cyclic complex Jacobi sweeps on a Hermitian matrix. Returns the diagonal
/// (unsorted) and, when requested, the accumulated unitary.
fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> ([f64; MAX_DIM], ComplexMatrix) {
    let n = a.dim;
    // Symmetrize to remove rounding-level anti-Hermitian parts.
    let mut m = *a;
    for i in 0..n {
        m[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n).expect("dim already validated");
    let threshold = JACOBI_TOL * m.frobenius_norm();
    // A single rotation diagonalizes a 2x2 block, so one sweep suffices there.
    let sweeps = if n == 2 { 1 } else { JACOBI_MAX_SWEEPS };

    for _ in 0..sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase that makes the pivot real, then a real plane rotation.
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U acts on the (p, q) plane: U_pp = c, U_pq = s,
                // U_qp = -s conj(phase), U_qq = c conj(phase).
                let up_q = -phase.conj() * s;
                let uq_q = phase.conj() * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c + akq * up_q;
                    m[(k, q)] = akp * s + akq * uq_q;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c + aqk * up_q.conj();
                    m[(q, k)] = apk * s + aqk * uq_q.conj();
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * up_q;
                        v[(k, q)] = vkp * s + vkq * uq_q;
                    }
                }
            }
        }
    }

    let mut values = [0.0; MAX_DIM];
    for (i, val) in values.iter_mut().enumerate().take(n) {
        *val = m[(i, i)].re;
    }
    (values, v)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(a)?;
    let n = a.dim;
    let (raw, vecs) = jacobi(a, true);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let mut values = [0.0; MAX_DIM];
    let mut vectors = vecs;
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = raw[src];
        for k in 0..n {
            vectors[(k, dst)] = vecs[(k, src)];
        }
    }
    Ok(HermitianEig {
        dim: n,
        values,
        vectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let (raw, _) = jacobi(a, false);
    let mut vals = raw[..a.dim].to_vec();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// Trace norm `sum |lambda_i|` of a Hermitian matrix.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    check_hermitian(a)?;
    let (raw, _) = jacobi(a, false);
    Ok(raw[..a.dim].iter().map(|x| x.abs()).sum())
}

/// `||a - b||_1 / 2` for matrices that are Hermitian by construction.
#[inline]
pub(crate) fn half_trace_norm_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.dim == 2 {
        // Eigenvalues of a 2x2 Hermitian matrix: mean +- sqrt(half_gap^2 + |offdiag|^2).
        let m00 = a[(0, 0)].re - b[(0, 0)].re;
        let m11 = a[(1, 1)].re - b[(1, 1)].re;
        let off = (a[(0, 1)] - b[(0, 1)]).norm();
        let mean = 0.5 * (m00 + m11);
        let radius = (0.5 * (m00 - m11)).hypot(off);
        return 0.5 * ((mean + radius).abs() + (mean - radius).abs());
    }
    let (raw, _) = jacobi(&(*a - *b), false);
    0.5 * raw[..a.dim].iter().map(|x| x.abs()).sum::<f64>()
}

/// Qubit (dim 2) or system-ancilla (dim 4) density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let asymmetry = m.max_asymmetry();
        if asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = *hermitian_eigenvalues(&m)?.last().expect("non-empty");
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is Hermitian with unit trace by construction.
    /// Positivity is the caller's responsibility.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn excited() -> Self {
        Self(ComplexMatrix::diag(&[1.0, 0.0]).expect("dim 2"))
    }

    pub fn ground() -> Self {
        Self(ComplexMatrix::diag(&[0.0, 1.0]).expect("dim 2"))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::diag(&[0.5, 0.5]).expect("dim 2"))
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Excited-state population `<e|rho|e>` (qubit states only).
    pub fn excited_population(&self) -> f64 {
        self.0[(0, 0)].re
    }

    /// Coherence `<e|rho|g>` (qubit states only).
    pub fn coherence(&self) -> Complex64 {
        self.0[(0, 1)]
    }
}

/// `D = ||rho1 - rho2||_1 / 2`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            left: rho1.dim(),
            right: rho2.dim(),
        });
    }
    Ok(0.5 * trace_norm(&(rho1.0 - rho2.0))?)
}

/// Point of the Bloch ball, `rho = (1 + r n.sigma) / 2` with `n` at polar
/// angle `theta` from the excited state and azimuth `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochVector {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        let b = Self { r, theta, phi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::InvalidBloch(format!("r = {} outside [0, 1]", self.r)));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidBloch(format!(
                "theta = {} outside [0, pi]",
                self.theta
            )));
        }
        if !(0.0..2.0 * PI).contains(&self.phi) {
            return Err(Error::InvalidBloch(format!(
                "phi = {} outside [0, 2pi)",
                self.phi
            )));
        }
        Ok(())
    }

    /// Canonical spherical coordinates of a Cartesian vector with `|v| <= 1`.
    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        let r = (x * x + y * y + z * z).sqrt().min(1.0);
        if r == 0.0 {
            return Self {
                r: 0.0,
                theta: 0.0,
                phi: 0.0,
            };
        }
        let theta = (z / r).clamp(-1.0, 1.0).acos();
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self { r, theta, phi }
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    /// The point reflected through the centre of the ball.
    pub fn antipode(&self) -> Self {
        let [x, y, z] = self.cartesian();
        let mut b = Self::from_cartesian(-x, -y, -z);
        b.r = self.r;
        b
    }
}

/// Qubit state from Cartesian Bloch coordinates; the caller guarantees `|v| <= 1`.
pub(crate) fn state_from_cartesian([x, y, z]: [f64; 3]) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(2).expect("dim 2");
    m[(0, 0)] = Complex64::new(0.5 * (1.0 + z), 0.0);
    m[(1, 1)] = Complex64::new(0.5 * (1.0 - z), 0.0);
    m[(0, 1)] = Complex64::new(0.5 * x, -0.5 * y);
    m[(1, 0)] = Complex64::new(0.5 * x, 0.5 * y);
    DensityMatrix(m)
}

/// Cartesian Bloch coordinates of a qubit matrix with unit trace.
pub(crate) fn cartesian_of(m: &ComplexMatrix) -> [f64; 3] {
    let c = m[(0, 1)];
    [2.0 * c.re, -2.0 * c.im, m[(0, 0)].re - m[(1, 1)].re]
}

pub fn bloch_to_state(b: &BlochVector) -> Result<DensityMatrix> {
    b.validate()?;
    Ok(state_from_cartesian(b.cartesian()))
}
