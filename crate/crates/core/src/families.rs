//! Named two-qubit state families.
//!
//! Bell basis order: `|Phi+>, |Phi->, |Psi+>, |Psi->` with
//! `|Phi±> = (|00> ± |11>)/sqrt 2` and `|Psi±> = (|01> ± |10>)/sqrt 2`.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::density::DensityMatrix4;
use crate::error::{Error, Result};
use crate::linalg::{Matrix4, C64};
use crate::math::sqrt;

const SPECTRUM_TOL: f64 = 1e-12;

/// MEMS regime boundary in `x`; the matching participation ratio is 9/5.
pub const MEMS_BRANCH_X: f64 = 2.0 / 3.0;
pub const MEMS_BRANCH_R: f64 = 1.8;

/// Four eigenvalues `p1 >= p2 >= p3 >= p4 >= 0` summing to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum4([f64; 4]);

impl Spectrum4 {
    /// Accepts an already sorted, normalized vector.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidSpectrum("entries must be finite and nonnegative"));
        }
        if p.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum("entries must be sorted descending"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum("entries must sum to 1"));
        }
        Ok(Spectrum4(p))
    }

    /// Sorts `p` descending before validating it.
    pub fn sorted(mut p: [f64; 4]) -> Result<Self> {
        p.sort_unstable_by(|a, b| b.total_cmp(a));
        Self::new(p)
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0[0]
    }

    /// `1 / sum p_i^2`.
    pub fn participation_ratio(&self) -> f64 {
        1.0 / self.0.iter().map(|p| p * p).sum::<f64>()
    }
}

/// The piecewise MEMS diagonal weight: 1/3 below `x = 2/3`, `x/2` above.
pub fn mems_g(x: f64) -> f64 {
    if x <= MEMS_BRANCH_X {
        1.0 / 3.0
    } else {
        x / 2.0
    }
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: x, expected: "[0, 1]" })
    }
}

/// Maximally entangled mixed state with concurrence `x`:
/// diagonal `(g, 1 - 2g, 0, g)`, corners `x/2`.
pub fn mems(x: f64) -> Result<DensityMatrix4> {
    check_unit_interval("x", x)?;
    let g = mems_g(x);
    let mut m = Matrix4::from_real_diagonal([g, 1.0 - 2.0 * g, 0.0, g]);
    m.0[0][3] = C64::new(x / 2.0, 0.0);
    m.0[3][0] = C64::new(x / 2.0, 0.0);
    Ok(DensityMatrix4::from_trusted(m))
}

/// Participation ratio of `mems(x)` from its closed-form spectrum.
pub fn mems_participation_ratio(x: f64) -> f64 {
    if x >= MEMS_BRANCH_X {
        1.0 / (x * x + (1.0 - x) * (1.0 - x))
    } else {
        // spectrum (1/3 + x/2, 1/3, 1/3 - x/2, 0)
        1.0 / (1.0 / 3.0 + x * x / 2.0)
    }
}

/// The `x` for which `mems(x)` has participation ratio `r`.
pub fn mems_x_from_r(r: f64) -> Result<f64> {
    if !(1.0..=3.0).contains(&r) {
        return Err(Error::OutOfRange { name: "R", value: r, expected: "[1, 3]" });
    }
    let omega = 1.0 / r;
    let x = if r <= MEMS_BRANCH_R {
        // 2x^2 - 2x + 1 - omega = 0, upper root
        0.5 * (1.0 + sqrt((2.0 * omega - 1.0).max(0.0)))
    } else {
        sqrt((2.0 * (omega - 1.0 / 3.0)).max(0.0))
    };
    Ok(x.clamp(0.0, 1.0))
}

/// The `x` for which `mems(x)` has largest eigenvalue `lambda`; MEMS only
/// reach `lambda >= 1/3`.
pub fn mems_x_from_lambda_max(lambda: f64) -> Option<f64> {
    if !(1.0 / 3.0..=1.0).contains(&lambda) {
        return None;
    }
    if lambda >= MEMS_BRANCH_X {
        // spectrum (x, 1 - x, 0, 0)
        Some(lambda)
    } else {
        // spectrum (1/3 + x/2, 1/3, 1/3 - x/2, 0)
        Some((2.0 * (lambda - 1.0 / 3.0)).clamp(0.0, 1.0))
    }
}

pub fn mems_from_r(r: f64) -> Result<DensityMatrix4> {
    mems(mems_x_from_r(r)?)
}

/// Ishizaka–Hiroshima state with eigenvalues `p`:
/// `diag(p2, (p1+p3)/2, (p1+p3)/2, p4)` with `(p3-p1)/2` coupling
/// `|01>` and `|10>`.
pub fn ih_state(p: &Spectrum4) -> DensityMatrix4 {
    let [p1, p2, p3, p4] = p.0;
    let mid = (p3 + p1) / 2.0;
    let mut m = Matrix4::from_real_diagonal([p2, mid, mid, p4]);
    m.0[1][2] = C64::new((p3 - p1) / 2.0, 0.0);
    m.0[2][1] = m.0[1][2];
    DensityMatrix4::from_trusted(m)
}

/// The four Bell vectors in the module's fixed order.
pub fn bell_vectors() -> [[C64; 4]; 4] {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    [[h, z, z, h], [h, z, z, -h], [z, h, h, z], [z, h, -h, z]]
}

/// `|Phi+><Phi+|`.
pub fn phi_plus() -> DensityMatrix4 {
    DensityMatrix4::from_trusted(Matrix4::outer(&bell_vectors()[0]))
}

/// `sum w_i |B_i><B_i|`.
pub fn bell_diagonal(w: [f64; 4]) -> Result<DensityMatrix4> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidSpectrum("Bell weights must be nonnegative"));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > SPECTRUM_TOL {
        return Err(Error::InvalidSpectrum("Bell weights must sum to 1"));
    }
    let m = bell_vectors()
        .iter()
        .zip(w)
        .fold(Matrix4::zeros(), |acc, (b, wi)| acc + Matrix4::outer(b).scale(wi));
    Ok(DensityMatrix4::from_trusted(m.hermitian_part()))
}

/// Ingestion gate for externally supplied matrices.
pub fn validate_density(raw: &Matrix4, tol: f64) -> Result<DensityMatrix4> {
    DensityMatrix4::validate(raw, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mems_matches_layout() {
        let m = *mems(0.5).unwrap().matrix();
        let g = 1.0 / 3.0;
        assert_eq!(m.0[0][0].re, g);
        assert_eq!(m.0[1][1].re, 1.0 - 2.0 * g);
        assert_eq!(m.0[2][2].re, 0.0);
        assert_eq!(m.0[3][3].re, g);
        assert_eq!(m.0[0][3].re, 0.25);
        assert_eq!(m.0[3][0].re, 0.25);
        assert!(mems(1.2).is_err() && mems(-0.1).is_err());
    }

    #[test]
    fn mems_pure_and_branch_point() {
        let pure = mems(1.0).unwrap();
        assert!(pure.matrix().max_abs_diff(phi_plus().matrix()) < 1e-15);
        assert!(close(mems_participation_ratio(MEMS_BRANCH_X), 1.8, 1e-12));
        // both branch formulas at x = 2/3
        let x: f64 = 2.0 / 3.0;
        let upper = 1.0 / (x * x + (1.0 - x) * (1.0 - x));
        let lower = 1.0 / (1.0 / 3.0 + x * x / 2.0);
        assert!(close(upper, 1.8, 1e-12) && close(lower, 1.8, 1e-12));
        assert_eq!(mems_g(x), 1.0 / 3.0);
        assert!(close(mems_g(x), x / 2.0, 1e-16));
    }

    #[test]
    fn mems_point_nine() {
        let ev = hermitian_eigenvalues(mems(0.9).unwrap().matrix()).unwrap();
        for (a, b) in ev.iter().zip([0.9, 0.1, 0.0, 0.0]) {
            assert!(close(*a, b, 1e-14));
        }
        assert!(close(mems_participation_ratio(0.9), 1.0 / 0.82, 1e-12));
        assert!(close(mems(0.9).unwrap().matrix().frobenius_sq(), 0.82, 1e-14));
    }

    #[test]
    fn r_to_x_endpoints() {
        assert!(close(mems_x_from_r(1.0).unwrap(), 1.0, 1e-15));
        assert!(close(mems_x_from_r(3.0).unwrap(), 0.0, 1e-7));
        assert!(close(mems_x_from_r(1.8).unwrap(), 2.0 / 3.0, 1e-12));
        assert!(mems_x_from_r(0.99).is_err() && mems_x_from_r(3.01).is_err());
        for k in 0..=200 {
            let r = 1.0 + 2.0 * k as f64 / 200.0;
            let x = mems_x_from_r(r).unwrap();
            assert!(close(mems_participation_ratio(x), r, 1e-9), "r={r}");
        }
    }

    #[test]
    fn lambda_to_x_inverts_spectrum() {
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            let ev = hermitian_eigenvalues(mems(x).unwrap().matrix()).unwrap();
            assert!(close(mems_x_from_lambda_max(ev[0]).unwrap(), x, 1e-12), "x={x}");
        }
        assert_eq!(mems_x_from_lambda_max(0.3), None);
    }

    #[test]
    fn ih_layout_and_spectrum() {
        let p = Spectrum4::new([0.5, 0.25, 0.15, 0.10]).unwrap();
        let m = *ih_state(&p).matrix();
        assert_eq!(m.0[0][0].re, 0.25);
        assert_eq!(m.0[1][1].re, 0.325);
        assert_eq!(m.0[1][2].re, -0.175);
        assert_eq!(m.0[3][3].re, 0.10);
        let ev = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in ev.iter().zip(p.values()) {
            assert!(close(*a, b, 1e-12));
        }
        let mixed = ih_state(&Spectrum4::new([0.25; 4]).unwrap());
        assert!(mixed.matrix().max_abs_diff(DensityMatrix4::maximally_mixed().matrix()) < 1e-16);
    }

    #[test]
    fn spectrum_rejections() {
        assert!(Spectrum4::new([0.2, 0.3, 0.25, 0.25]).is_err());
        assert!(Spectrum4::new([0.5, 0.3, 0.1, 0.0]).is_err());
        assert!(Spectrum4::new([1.1, 0.0, 0.0, -0.1]).is_err());
        assert_eq!(Spectrum4::sorted([0.1, 0.4, 0.2, 0.3]).unwrap().values(), [0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn bell_diagonal_extremes() {
        let b = bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(b.matrix().max_abs_diff(phi_plus().matrix()) < 1e-16);
        let id = bell_diagonal([0.25; 4]).unwrap();
        assert!(id.matrix().max_abs_diff(DensityMatrix4::maximally_mixed().matrix()) < 1e-16);
        assert!(bell_diagonal([0.5, 0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn validate_accepts_mems_layout() {
        assert!(validate_density(mems(0.5).unwrap().matrix(), 1e-9).is_ok());
    }
}
