use memsq_core::experiments::{
    band_scan_lambda, band_scan_r, bound_check_eq7, escre_max_sweep, mems_conditional_profile, ppt_agreement,
    slope_check_eq8, Ensemble, SlopeForm, SweepConfig, Zone,
};
use memsq_core::families::mems_x_from_r;
use memsq_core::measures::{concurrence, eq7_bound, participation_ratio, LogBase, Order};
use memsq_core::sampler::{ih_random, split_stream, SeedSpec};

fn ih_config(samples: u64, range: (f64, f64), bins: usize) -> SweepConfig {
    SweepConfig {
        samples,
        bins,
        range,
        qset: vec![Order::Infinity],
        seed: SeedSpec::new(301),
        ensemble: Ensemble::IhOnly,
    }
}

#[test]
fn ih_band_lies_between_bound_and_mems() {
    let res = band_scan_r(&ih_config(20_000, (1.0, 1.8), 40), LogBase::Two, false).unwrap();
    let s = &res.scan.series;
    for (k, b) in s.bins.iter().enumerate() {
        let center = s.binning.center(k);
        if let Some(max) = b.max_c {
            assert!(max <= mems_x_from_r(center).unwrap() + 0.01, "bin {k}: {max}");
        }
        if let Some(min) = b.min_c {
            assert!(min >= eq7_bound(center).unwrap() - 0.01, "bin {k}: {min}");
        }
        // every IH state below R = 1.8 is entangled
        assert_eq!(b.count, b.qualifying);
    }
    assert!(res.overlay.iter().all(|o| o.mems_c.is_some() && o.eq7.is_some()));
}

#[test]
fn ih_scatter_stays_below_mems_curve() {
    let mut rng = split_stream(SeedSpec::new(302), 0);
    for _ in 0..10_000 {
        let (_, rho) = ih_random(&mut rng);
        let r = participation_ratio(&rho).min(3.0);
        let c = concurrence(&rho).unwrap().value;
        assert!(c <= mems_x_from_r(r).unwrap() + 1e-9);
    }
}

#[test]
fn lambda_band_respects_contours() {
    let scan = band_scan_lambda(&ih_config(20_000, (0.25, 1.0), 30), LogBase::Two, true).unwrap();
    assert_eq!(scan.contours.total_violations(), 0);
    assert_eq!(scan.records.len(), 20_000);
    for r in &scan.records {
        if r.lambda_max < 1.0 / 3.0 {
            assert!(r.concurrence < 1e-9);
        }
    }
    assert!(scan.contours.zones[Zone::III.index()].count > 0);
    assert!(band_scan_lambda(&SweepConfig { ensemble: Ensemble::ZhslAll, ..ih_config(10, (0.25, 1.0), 4) }, LogBase::Two, false).is_err());
}

#[test]
fn eq7_grid_and_sampling() {
    let grid: Vec<f64> = (0..50).map(|k| 1.0 + 0.8 * k as f64 / 49.0).collect();
    let report = bound_check_eq7(&grid, 100, SeedSpec::new(303)).unwrap();
    assert!(report.max_identity_residual() < 1e-12);
    assert_eq!(report.sampling.in_range, 5000);
    assert!(report.sampling.min_gap_in_range.unwrap() >= -1e-9);
    assert!(report.sampling.violations_outside > 0);
    assert!(bound_check_eq7(&[3.0], 1, SeedSpec::new(1)).is_err());
}

#[test]
fn eq8_slopes() {
    let eps = [1e-2, 1e-3, 1e-4];
    let r3 = slope_check_eq8(3.0, &eps, 0.02).unwrap();
    assert_eq!(r3.matched, Some(SlopeForm::Derived));
    assert!((r3.extrapolated - r3.derived).abs() < 1e-6 * r3.derived.abs());
    let mut last = 0.0f64;
    for q in [1.5, 2.0, 3.0, 5.0, 10.0] {
        let r = slope_check_eq8(q, &eps, 0.02).unwrap();
        assert!(r.extrapolated < 0.0 && r.raw.iter().all(|s| *s < 0.0));
        if q > 1.5 {
            assert!(r.extrapolated.abs() < last.abs());
        }
        last = r.extrapolated;
    }
}

#[test]
fn mems_profile_signs() {
    let xs: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    for p in mems_conditional_profile(&xs).unwrap() {
        if p.x > 0.67 - 1e-12 {
            assert!(p.s_inf_ab < 0.0, "x = {}", p.x);
        } else {
            assert!(p.s_inf_ab > 0.0, "x = {}", p.x);
        }
    }
    assert!(mems_conditional_profile(&[2.0 / 3.0]).unwrap()[0].s_inf_ab.abs() < 1e-12);
}

#[test]
fn small_escre_sweep_shape() {
    let mut c = SweepConfig::escre_default(SeedSpec::new(304));
    c.samples = 50_000;
    let s = escre_max_sweep(&c).unwrap();
    for b in &s.bins {
        if let Some(m) = b.max_c {
            assert!((0.0..=1.0).contains(&m));
        }
    }
    assert!(s.bins.iter().map(|b| b.count).sum::<u64>() <= c.samples);
    c.qset = vec![Order::new(2.0).unwrap()];
    assert!(escre_max_sweep(&c).is_err());
}

#[test]
fn ppt_matches_concurrence_small() {
    let mut c = SweepConfig::escre_default(SeedSpec::new(305));
    c.samples = 3000;
    let r = ppt_agreement(&c).unwrap();
    assert_eq!(r.exceptions(), 0);
    assert!(r.entangled > 0 && r.entangled < r.samples);
}
