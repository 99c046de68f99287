//! Monte Carlo checks of the sampling distributions. Seeds are fixed, so
//! these are deterministic; thresholds are the usual 1% critical values.

use memsq_core::linalg::Matrix4;
use memsq_core::measures::{is_ppt, participation_ratio};
use memsq_core::sampler::{haar_unitary, simplex_point, split_stream, zhsl_state_with_spectrum, SeedSpec};

const N: usize = 100_000;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn haar_moments() {
    let mut rng = split_stream(SeedSpec::new(201), 0);
    let mut first = Vec::with_capacity(N);
    let mut second = Vec::with_capacity(N);
    for _ in 0..N {
        let u: Matrix4 = haar_unitary(&mut rng);
        let w = u.0[0][0].norm_sqr();
        first.push(w);
        second.push(w * w);
    }
    // |U_00|^2 ~ Beta(1, 3): mean 1/4, second moment 1/10
    let (m1, se1) = mean_and_se(&first);
    assert!((m1 - 0.25).abs() < 3.0 * se1, "mean {m1}, se {se1}");
    let (m2, se2) = mean_and_se(&second);
    assert!((m2 - 0.1).abs() < 3.0 * se2, "second moment {m2}, se {se2}");
}

#[test]
fn simplex_dim2_is_uniform_ks() {
    let mut rng = split_stream(SeedSpec::new(202), 0);
    let mut xs: Vec<f64> = (0..N).map(|_| simplex_point::<2, _>(&mut rng)[0]).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = N as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max);
    let critical = 1.628 / n.sqrt();
    assert!(d < critical, "KS statistic {d} >= {critical}");
}

#[test]
fn simplex_dim4_marginal_chi_square() {
    let mut rng = split_stream(SeedSpec::new(203), 0);
    const BINS: usize = 20;
    let mut hist = [0u64; BINS];
    let mut sums = [0.0; 4];
    let mut sq = [0.0; 4];
    for _ in 0..N {
        let p = simplex_point::<4, _>(&mut rng);
        hist[((p[0] * BINS as f64) as usize).min(BINS - 1)] += 1;
        for k in 0..4 {
            sums[k] += p[k];
            sq[k] += p[k] * p[k];
        }
    }
    // marginal density 3(1-x)^2, CDF 1 - (1-x)^3
    let cdf = |x: f64| 1.0 - (1.0 - x).powi(3);
    let chi2: f64 = (0..BINS)
        .map(|k| {
            let e = N as f64 * (cdf((k + 1) as f64 / BINS as f64) - cdf(k as f64 / BINS as f64));
            let o = hist[k] as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    // chi-square, 19 degrees of freedom, 1% upper tail
    assert!(chi2 < 36.191, "chi2 = {chi2}");
    for k in 0..4 {
        let n = N as f64;
        let m = sums[k] / n;
        let se = ((sq[k] / n - m * m) / n).sqrt();
        assert!((m - 0.25).abs() < 3.0 * se, "coordinate {k}: mean {m}");
    }
}

#[test]
fn zhsl_eigenvalue_mean_and_high_r_separability() {
    let mut rng = split_stream(SeedSpec::new(204), 0);
    let mut coord = Vec::with_capacity(N);
    let mut high_r = 0;
    for _ in 0..N {
        let (rho, p) = zhsl_state_with_spectrum(&mut rng);
        coord.push(p[0]);
        if participation_ratio(&rho) >= 3.0 {
            high_r += 1;
            assert!(is_ppt(&rho).unwrap());
        }
    }
    let (m, se) = mean_and_se(&coord);
    assert!((m - 0.25).abs() < 3.0 * se);
    assert!(high_r > 1000, "only {high_r} states with R >= 3");
}
