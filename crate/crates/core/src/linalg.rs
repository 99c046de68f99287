//! Dense complex linear algebra for 2x2 and 4x4 matrices.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Inputs further than this from Hermitian are rejected by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction
/// of the matrix norm.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

/// Which tensor factor of the `A (x) B` product an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const DIM: usize = N;

    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Row-major entries; `entries.len()` must be `N * N`.
    pub fn from_row_major(entries: &[C64]) -> Option<Self> {
        if entries.len() != N * N {
            return None;
        }
        let mut m = Self::zeros();
        for (k, z) in entries.iter().enumerate() {
            m.0[k / N][k % N] = *z;
        }
        Some(m)
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn row_major(&self) -> impl Iterator<Item = C64> + '_ {
        self.0.iter().flat_map(|row| row.iter().copied())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for i in 0..N {
            for j in i..N {
                gap = gap.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        gap
    }

    /// `(M + M^dagger) / 2`, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(self.0[i][i].re, 0.0);
            for j in (i + 1)..N {
                let z = (self.0[i][j] + self.0[j][i].conj()) * 0.5;
                m.0[i][j] = z;
                m.0[j][i] = z.conj();
            }
        }
        m
    }

    /// `sum |M_ij|^2`, which is `Tr(M^2)` for Hermitian `M`.
    pub fn frobenius_sq(&self) -> f64 {
        self.row_major().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.frobenius_sq())
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += self.0[i][j].norm_sqr();
                }
            }
        }
        sqrt(s)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.row_major()
            .zip(other.row_major())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `U diag(d) U^dagger`.
    pub fn conjugate_diagonal(u: &Self, d: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                let mut z = ZERO;
                for k in 0..N {
                    z += u.0[i][k] * u.0[j][k].conj() * d[k];
                }
                m.0[i][j] = z;
            }
        }
        m
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Matrix<N>;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Matrix<N>;

    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Matrix<N>;

    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

/// Eigen-decomposition `H = V diag(values) V^dagger` with `values` descending
/// and the columns of `vectors` in matching order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem<const N: usize> {
    pub values: [f64; N],
    pub vectors: Matrix<N>,
}

impl<const N: usize> EigenSystem<N> {
    pub fn reconstruct(&self) -> Matrix<N> {
        Matrix::conjugate_diagonal(&self.vectors, &self.values)
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }
}

/// Hermitian eigensystem by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before iterating. Inputs whose Hermiticity gap
/// exceeds [`HERMITIAN_TOL`] are rejected.
pub fn hermitian_eigensystem<const N: usize>(h: &Matrix<N>) -> Result<EigenSystem<N>> {
    if h.row_major().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let gap = h.hermiticity_gap();
    if gap > HERMITIAN_TOL {
        return Err(Error::NotHermitian(gap));
    }
    let mut a = h.hermitian_part();
    let mut v = Matrix::<N>::identity();
    let threshold = JACOBI_TOL * a.frobenius_norm();
    let negligible = 1e-18 * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= threshold {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q, negligible);
            }
        }
    }
    let off = a.off_diagonal_norm();
    if !converged && (off.is_nan() || off > threshold) {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order = [0usize; N];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    order.sort_unstable_by(|&i, &j| a.0[j][j].re.total_cmp(&a.0[i][i].re));

    let mut values = [0.0; N];
    let mut vectors = Matrix::<N>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a.0[src][src].re;
        for row in 0..N {
            vectors.0[row][dst] = v.0[row][src];
        }
    }
    Ok(EigenSystem { values, vectors })
}

/// Descending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<const N: usize>(h: &Matrix<N>) -> Result<[f64; N]> {
    hermitian_eigensystem(h).map(|e| e.values)
}

// One unitary rotation `A <- G^dagger A G`, `V <- V G` zeroing A[p][q].
fn rotate<const N: usize>(a: &mut Matrix<N>, v: &mut Matrix<N>, p: usize, q: usize, negligible: f64) {
    let apq = a.0[p][q];
    let g = apq.norm();
    if g <= negligible {
        a.0[p][q] = ZERO;
        a.0[q][p] = ZERO;
        return;
    }
    let phase = apq / g;
    let theta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * g);
    let t = if abs(theta) > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / sqrt(t * t + 1.0);
    let s = t * c;

    // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on the (p, q) plane.
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * gpp + akq * gqp;
        a.0[k][q] = akp * gpq + akq * gqq;
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * gpp + vkq * gqp;
        v.0[k][q] = vkp * gpq + vkq * gqq;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = gpp.conj() * apk + gqp.conj() * aqk;
        a.0[q][k] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
    a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
}

/// `A (x) B` in the `|00>, |01>, |10>, |11>` ordering.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Reduced matrix on `keep`, tracing out the other qubit.
pub fn partial_trace(m: &Matrix4, keep: Subsystem) -> Matrix2 {
    let mut r = Matrix2::zeros();
    for x in 0..2 {
        for y in 0..2 {
            r.0[x][y] = match keep {
                Subsystem::A => m.0[2 * x][2 * y] + m.0[2 * x + 1][2 * y + 1],
                Subsystem::B => m.0[x][y] + m.0[2 + x][2 + y],
            };
        }
    }
    r
}

/// Transpose of the `side` factor only.
pub fn partial_transpose(m: &Matrix4, side: Subsystem) -> Matrix4 {
    let mut r = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let src = match side {
                        Subsystem::A => m.0[2 * a2 + b][2 * a + b2],
                        Subsystem::B => m.0[2 * a + b2][2 * a2 + b],
                    };
                    r.0[2 * a + b][2 * a2 + b2] = src;
                }
            }
        }
    }
    r
}

/// `sigma_y (x) sigma_y`, real: anti-diagonal `(-1, 1, 1, -1)` read from (0, 3).
pub fn sigma_yy() -> Matrix4 {
    let sy = Matrix([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]);
    kron(&sy, &sy)
}

/// `(sigma_y (x) sigma_y) conj(M) (sigma_y (x) sigma_y)`.
///
/// `sigma_y (x) sigma_y` is a signed anti-diagonal permutation, so the
/// product reduces to `M~[i][j] = s_i s_j conj(M[3-i][3-j])`.
pub fn spin_flip(m: &Matrix4) -> Matrix4 {
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let mut r = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            r.0[i][j] = m.0[3 - i][3 - j].conj() * (SIGN[i] * SIGN[j]);
        }
    }
    r
}
