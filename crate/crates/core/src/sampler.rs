//! Random states under the ZHSL measure (Haar eigenbasis times a flat
//! eigenvalue simplex), random IH states, and deterministic stream splitting.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::density::{DensityMatrix4, QubitDensity};
use crate::families::{ih_state, Spectrum4};
use crate::linalg::{Matrix, Matrix4, C64};
use crate::math::sqrt;

/// Generator identifier written to output metadata. Chunk `c` of stream
/// `s` is ChaCha8 keyed by `seed_from_u64(master_seed)` on stream
/// `(s << 40) | c`.
pub const GENERATOR_ID: &str = "rand_chacha-0.9/ChaCha8Rng;seed_from_u64(master);stream=(index<<40)|chunk";

/// Largest chunk index [`split_stream`] accepts.
pub const MAX_CHUNK: u64 = (1 << 40) - 1;

pub type Stream = ChaCha8Rng;

/// `(master_seed, stream_index)` fixes every sample drawn from the streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u32,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed, stream_index: 0 }
    }
}

/// Independent, reproducible stream for one work chunk.
///
/// # Panics
/// If `chunk > MAX_CHUNK`.
pub fn split_stream(seed: SeedSpec, chunk: u64) -> Stream {
    assert!(chunk <= MAX_CHUNK, "chunk index {chunk} exceeds {MAX_CHUNK}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
    rng.set_stream((u64::from(seed.stream_index) << 40) | chunk);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unitary: Gram–Schmidt on a complex Ginibre matrix. The
/// implied triangular factor has a positive real diagonal, which is the
/// phase fix that makes the result exactly Haar.
pub fn haar_unitary<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> Matrix<N> {
    let mut cols = [[C64::new(0.0, 0.0); N]; N];
    for col in cols.iter_mut() {
        for z in col.iter_mut() {
            *z = complex_gaussian(rng);
        }
    }
    for j in 0..N {
        // two projection passes keep the columns orthogonal to round-off
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: C64 = (0..N).map(|i| done[k][i].conj() * rest[0][i]).sum();
                for i in 0..N {
                    rest[0][i] -= proj * done[k][i];
                }
            }
        }
        let norm = sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = Matrix::<N>::zeros();
    for (j, col) in cols.iter().enumerate() {
        for i in 0..N {
            u.0[i][j] = col[i];
        }
    }
    u
}

/// Uniform (Lebesgue) point on the probability simplex: normalized unit
/// exponentials.
pub fn simplex_point<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [f64; N] {
    let mut p = [0.0; N];
    loop {
        let mut total = 0.0;
        for x in p.iter_mut() {
            *x = Exp1.sample(rng);
            total += *x;
        }
        if total > 0.0 {
            for x in p.iter_mut() {
                *x /= total;
            }
            return p;
        }
    }
}

/// `U diag(p) U^dagger` with `U` Haar and `p` flat on the simplex.
pub fn zhsl_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    zhsl_state_with_spectrum(rng).0
}

/// Like [`zhsl_state`], also returning the drawn eigenvalues (unsorted).
pub fn zhsl_state_with_spectrum<R: Rng + ?Sized>(rng: &mut R) -> (DensityMatrix4, [f64; 4]) {
    let u: Matrix4 = haar_unitary(rng);
    let p: [f64; 4] = simplex_point(rng);
    let rho = Matrix4::conjugate_diagonal(&u, &p).hermitian_part();
    (DensityMatrix4::from_trusted(rho), p)
}

/// A flat-simplex spectrum sorted descending, and its IH state.
pub fn ih_random<R: Rng + ?Sized>(rng: &mut R) -> (Spectrum4, DensityMatrix4) {
    let p = ih_spectrum(rng);
    (p, ih_state(&p))
}

/// Sorted flat-simplex spectrum.
pub fn ih_spectrum<R: Rng + ?Sized>(rng: &mut R) -> Spectrum4 {
    let mut p: [f64; 4] = simplex_point(rng);
    p.sort_unstable_by(|a, b| b.total_cmp(a));
    // exact normalization is guaranteed up to round-off by simplex_point
    Spectrum4::new(p).unwrap_or_else(|_| Spectrum4::sorted([0.25; 4]).expect("uniform spectrum is valid"))
}

/// Haar-random pure qubit state.
pub fn random_qubit_pure<R: Rng + ?Sized>(rng: &mut R) -> QubitDensity {
    let u: Matrix<2> = haar_unitary(rng);
    let m = Matrix::<2>::conjugate_diagonal(&u, &[1.0, 0.0]);
    QubitDensity::validate(&m, 1e-9).expect("projector of a unit vector")
}

/// Separable state: a flat-simplex mixture of `terms` (1..=4) random
/// pure product states.
pub fn separable_state<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> DensityMatrix4 {
    let terms = terms.clamp(1, 4);
    let w: [f64; 4] = simplex_point(rng);
    let total: f64 = w[..terms].iter().sum();
    let mut m = Matrix4::zeros();
    for wi in &w[..terms] {
        let a = random_qubit_pure(rng);
        let b = random_qubit_pure(rng);
        m = m + DensityMatrix4::product(&a, &b).matrix().scale(wi / total);
    }
    DensityMatrix4::from_trusted(m.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use crate::measures::{concurrence, concurrence_ih};

    #[test]
    fn unitarity() {
        let mut rng = split_stream(SeedSpec::new(3), 0);
        for _ in 0..200 {
            let u: Matrix4 = haar_unitary(&mut rng);
            assert!((u.adjoint() * u).max_abs_diff(&Matrix4::identity()) < 1e-12);
            let v: Matrix<2> = haar_unitary(&mut rng);
            assert!((v.adjoint() * v).max_abs_diff(&Matrix::<2>::identity()) < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let a: Matrix4 = haar_unitary(&mut split_stream(SeedSpec::new(42), 5));
        let b: Matrix4 = haar_unitary(&mut split_stream(SeedSpec::new(42), 5));
        assert_eq!(a, b);
        let c: Matrix4 = haar_unitary(&mut split_stream(SeedSpec::new(42), 6));
        assert_ne!(a, c);
        let d: Matrix4 = haar_unitary(&mut split_stream(SeedSpec { master_seed: 42, stream_index: 1 }, 5));
        assert_ne!(a, d);
    }

    #[test]
    fn simplex_points_are_normalized() {
        let mut rng = split_stream(SeedSpec::new(1), 0);
        for _ in 0..1000 {
            let p: [f64; 4] = simplex_point(&mut rng);
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zhsl_spectrum_is_the_drawn_point() {
        let mut rng = split_stream(SeedSpec::new(9), 0);
        for _ in 0..200 {
            let (rho, mut p) = zhsl_state_with_spectrum(&mut rng);
            p.sort_unstable_by(|a, b| b.total_cmp(a));
            let ev = hermitian_eigenvalues(rho.matrix()).unwrap();
            for (a, b) in ev.iter().zip(p) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ih_random_is_sorted_and_consistent() {
        let mut rng = split_stream(SeedSpec::new(2), 0);
        for _ in 0..500 {
            let (p, rho) = ih_random(&mut rng);
            assert!(p.values().windows(2).all(|w| w[0] >= w[1]));
            let c = concurrence(&rho).unwrap().value;
            assert!((c - concurrence_ih(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn separable_states_are_ppt() {
        let mut rng = split_stream(SeedSpec::new(4), 0);
        for k in 0..300 {
            let rho = separable_state(&mut rng, 1 + k % 4);
            assert!(crate::measures::is_ppt(&rho).unwrap());
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
