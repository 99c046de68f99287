//! Validated density matrices.

use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, Matrix, Matrix2, Matrix4, Subsystem};

/// Smallest eigenvalue a state may have and still count as PSD.
pub const PSD_TOL: f64 = 1e-10;
/// Default tolerance for Hermiticity and trace when ingesting matrices.
pub const DEFAULT_INGEST_TOL: f64 = 1e-9;

/// Measured invariant violations of a candidate density matrix. A field is
/// `Some` only when that invariant is violated.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Violations {
    pub hermiticity_gap: Option<f64>,
    pub trace_gap: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub non_finite: bool,
}

impl Violations {
    pub fn is_empty(&self) -> bool {
        *self == Violations::default()
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        if self.non_finite {
            write!(f, "non-finite entries")?;
            sep = "; ";
        }
        if let Some(g) = self.hermiticity_gap {
            write!(f, "{sep}hermiticity gap {g:e}")?;
            sep = "; ";
        }
        if let Some(g) = self.trace_gap {
            write!(f, "{sep}trace gap {g}")?;
            sep = "; ";
        }
        if let Some(m) = self.min_eigenvalue {
            write!(f, "{sep}negative eigenvalue {m:e}")?;
        }
        Ok(())
    }
}

/// A two-qubit state: Hermitian, unit trace, PSD.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix4(Matrix4);

/// A single-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensity(Matrix2);

fn check<const N: usize>(raw: &Matrix<N>, tol: f64) -> core::result::Result<Matrix<N>, Violations> {
    let mut v = Violations::default();
    if raw.row_major().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        v.non_finite = true;
        return Err(v);
    }
    let gap = raw.hermiticity_gap();
    if gap > tol {
        v.hermiticity_gap = Some(gap);
    }
    let tr = raw.trace();
    let trace_gap = (tr - linalg::C64::new(1.0, 0.0)).norm();
    if trace_gap > tol {
        v.trace_gap = Some(trace_gap);
    }
    let h = raw.hermitian_part();
    match hermitian_eigenvalues(&h) {
        Ok(ev) if ev[N - 1] < -PSD_TOL => v.min_eigenvalue = Some(ev[N - 1]),
        Ok(_) => {}
        // only reachable for pathological magnitudes
        Err(_) => v.non_finite = true,
    }
    if v.is_empty() {
        Ok(h.scale(1.0 / tr.re))
    } else {
        Err(v)
    }
}

impl DensityMatrix4 {
    /// Checks the state invariants against `tol` (Hermiticity and trace) and
    /// [`PSD_TOL`] (smallest eigenvalue). An accepted matrix is stored as its
    /// Hermitian part rescaled to unit trace.
    pub fn validate(raw: &Matrix4, tol: f64) -> Result<Self> {
        check(raw, tol).map(DensityMatrix4).map_err(Error::InvalidState)
    }

    /// Wraps a matrix the caller has built to be a valid state.
    pub(crate) fn from_trusted(m: Matrix4) -> Self {
        DensityMatrix4(m)
    }

    /// `|psi><psi|` of a normalized vector.
    pub fn pure(psi: &[linalg::C64; 4]) -> Result<Self> {
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange { name: "|psi|^2", value: n, expected: "1" });
        }
        Ok(DensityMatrix4(Matrix4::outer(psi).hermitian_part()))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4(Matrix4::identity().scale(0.25))
    }

    pub fn product(a: &QubitDensity, b: &QubitDensity) -> Self {
        DensityMatrix4(linalg::kron(&a.0, &b.0))
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.0
    }

    pub fn reduced(&self, keep: Subsystem) -> QubitDensity {
        QubitDensity(linalg::partial_trace(&self.0, keep))
    }

    pub fn partial_transpose(&self, side: Subsystem) -> Matrix4 {
        linalg::partial_transpose(&self.0, side)
    }

    pub fn spin_flip(&self) -> Matrix4 {
        linalg::spin_flip(&self.0)
    }

    /// Convex combination `sum w_i rho_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix4)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange { name: "mixture weight sum", value: total, expected: "1" });
        }
        let m = parts
            .iter()
            .fold(Matrix4::zeros(), |acc, (w, r)| acc + r.0.scale(*w));
        Ok(DensityMatrix4(m))
    }
}

impl QubitDensity {
    pub fn validate(raw: &Matrix2, tol: f64) -> Result<Self> {
        check(raw, tol).map(QubitDensity).map_err(Error::InvalidState)
    }

    /// Pure qubit state from Bloch angles.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        use crate::math::Float;
        let a = linalg::C64::new(Float::cos(theta / 2.0), 0.0);
        let b = linalg::C64::from_polar(Float::sin(theta / 2.0), phi);
        QubitDensity(Matrix2::outer(&[a, b]).hermitian_part())
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }
}

/// Free-function form of [`DensityMatrix4::reduced`].
pub fn partial_trace(rho: &DensityMatrix4, keep: Subsystem) -> QubitDensity {
    rho.reduced(keep)
}
