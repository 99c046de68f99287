use memsq_core::experiments::{escre_max_sweep, BinSeries, Binning, SweepConfig};
use memsq_core::families::{ih_state, mems, mems_x_from_r, Spectrum4};
use memsq_core::linalg::{
    hermitian_eigensystem, hermitian_eigenvalues, kron, partial_trace, partial_transpose, Matrix, Matrix2, Matrix4,
    Subsystem, C64,
};
use memsq_core::measures::{
    classical_inequalities_hold, concurrence, concurrence_ih, conditional_renyi, conditional_tsallis,
    entanglement_of_formation, is_ppt, participation_ratio, renyi_entropy, renyi_to_tsallis, tsallis_entropy,
    EntropyParams, LogBase, Order, StateSpectra,
};
use memsq_core::sampler::{haar_unitary, separable_state, simplex_point, split_stream, zhsl_state, SeedSpec};
use memsq_core::DensityMatrix4;
use proptest::prelude::*;

fn state(seed: u64) -> DensityMatrix4 {
    zhsl_state(&mut split_stream(SeedSpec::new(seed), 0))
}

fn hermitian() -> impl Strategy<Value = Matrix4> {
    prop::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = C64::new(v[4 * i + j], v[16 + 4 * i + j]);
            }
        }
        m.hermitian_part()
    })
}

fn spectrum() -> impl Strategy<Value = [f64; 4]> {
    any::<u64>().prop_map(|s| simplex_point(&mut split_stream(SeedSpec::new(s), 0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eigensystem_reconstructs(h in hermitian()) {
        let e = hermitian_eigensystem(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-12);
        let v = e.vectors;
        prop_assert!((v.adjoint() * v).max_abs_diff(&Matrix4::identity()) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let tr: f64 = e.values.iter().sum();
        prop_assert!((tr - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn state_measures_in_range(seed in any::<u64>()) {
        let rho = state(seed);
        let c = concurrence(&rho).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&c));
        let r = participation_ratio(&rho);
        let l = hermitian_eigenvalues(rho.matrix()).unwrap()[0];
        prop_assert!(r >= 1.0 / l - 1e-9 && r <= 1.0 / (l * l) + 1e-9);
        prop_assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&r));
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut rng = split_stream(SeedSpec::new(seed), 1);
        let rho = zhsl_state(&mut rng);
        let ua: Matrix2 = haar_unitary(&mut rng);
        let ub: Matrix2 = haar_unitary(&mut rng);
        let u = kron(&ua, &ub);
        let rotated = DensityMatrix4::validate(&(u * *rho.matrix() * u.adjoint()), 1e-9).unwrap();
        let c0 = concurrence(&rho).unwrap().value;
        let c1 = concurrence(&rotated).unwrap().value;
        prop_assert!((c0 - c1).abs() < 1e-9);
    }

    #[test]
    fn concurrence_below_ih_and_mems(seed in any::<u64>()) {
        let rho = state(seed);
        let c = concurrence(&rho).unwrap().value;
        let p = Spectrum4::sorted(hermitian_eigenvalues(rho.matrix()).unwrap().map(|x| x.max(0.0))).unwrap();
        prop_assert!(c <= concurrence_ih(&p) + 1e-9);
        let r = participation_ratio(&rho).min(3.0);
        prop_assert!(c <= mems_x_from_r(r).unwrap() + 1e-9);
    }

    #[test]
    fn ih_state_has_its_spectrum(p in spectrum()) {
        let s = Spectrum4::sorted(p).unwrap();
        let ev = hermitian_eigenvalues(ih_state(&s).matrix()).unwrap();
        for (a, b) in ev.iter().zip(s.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_operations(seed in any::<u64>()) {
        let m = *state(seed).matrix();
        for side in [Subsystem::A, Subsystem::B] {
            prop_assert_eq!(partial_transpose(&partial_transpose(&m, side), side), m);
            prop_assert!((partial_trace(&m, side).trace().re - 1.0).abs() < 1e-12);
        }
        let full = partial_transpose(&partial_transpose(&m, Subsystem::A), Subsystem::B);
        let t = Matrix::<4>(core::array::from_fn(|i| core::array::from_fn(|j| m.0[j][i])));
        prop_assert!(full.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn tsallis_is_function_of_renyi(p in spectrum(), q in prop::sample::select(vec![0.3, 0.5, 0.9, 1.5, 2.0, 3.0, 7.0])) {
        let r = renyi_entropy(&p, EntropyParams::new(Order::new(q).unwrap(), LogBase::E)).unwrap();
        let t = tsallis_entropy(&p, q).unwrap();
        prop_assert!((renyi_to_tsallis(r, q) - t).abs() <= 1e-10 * t.abs().max(1.0));
    }

    #[test]
    fn renyi_nonincreasing_in_order(p in spectrum()) {
        let orders = [Order::new(0.5).unwrap(), Order::One, Order::new(2.0).unwrap(), Order::new(5.0).unwrap(), Order::Infinity];
        let s: Vec<f64> = orders.iter().map(|o| renyi_entropy(&p, EntropyParams::new(*o, LogBase::Two)).unwrap()).collect();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{:?}", s);
    }

    #[test]
    fn separable_states_obey_inequalities(seed in any::<u64>(), terms in 1usize..=4) {
        let rho = separable_state(&mut split_stream(SeedSpec::new(seed), 2), terms);
        prop_assert!(is_ppt(&rho).unwrap());
        prop_assert!(concurrence(&rho).unwrap().value < 1e-7);
        let qset = [Order::new(0.5).unwrap(), Order::new(2.0).unwrap(), Order::new(5.0).unwrap(), Order::Infinity];
        prop_assert!(classical_inequalities_hold(&rho, &qset).unwrap());
    }

    #[test]
    fn eof_monotone_in_concurrence(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(entanglement_of_formation(lo) <= entanglement_of_formation(hi) + 1e-15);
    }

    #[test]
    fn spin_flip_preserves_state_properties(seed in any::<u64>()) {
        let rho = state(seed);
        let f = rho.spin_flip();
        prop_assert!((f.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(f.max_abs_diff(&f.adjoint()) < 1e-15);
        prop_assert!(hermitian_eigenvalues(&f).unwrap()[3] > -1e-12);
    }

    #[test]
    fn partial_traces_are_states(seed in any::<u64>()) {
        let rho = state(seed);
        for side in [Subsystem::A, Subsystem::B] {
            let r = *rho.reduced(side).matrix();
            prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(hermitian_eigenvalues(&r).unwrap()[1] > -1e-12);
        }
    }

    #[test]
    fn mems_and_ih_have_symmetric_marginals(x in 0.0f64..=1.0, p in spectrum()) {
        let ih = ih_state(&Spectrum4::sorted(p).unwrap());
        for rho in [mems(x).unwrap(), ih] {
            let s = StateSpectra::of(&rho).unwrap();
            let (a, b) = (s.reduced(Subsystem::A), s.reduced(Subsystem::B));
            for k in 0..2 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
            for q in [0.5, 2.0, 5.0] {
                let ab = conditional_tsallis(&rho, q, Subsystem::B).unwrap();
                let ba = conditional_tsallis(&rho, q, Subsystem::A).unwrap();
                prop_assert!((ab - ba).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mems_spectrum_in_ih_form_keeps_concurrence(x in 0.0f64..=1.0) {
        let rho = mems(x).unwrap();
        let p = Spectrum4::sorted(hermitian_eigenvalues(rho.matrix()).unwrap().map(|v| v.max(0.0))).unwrap();
        let c = concurrence(&ih_state(&p)).unwrap().value;
        prop_assert!((c - x).abs() < 1e-10);
    }

    #[test]
    fn ih_formula_matches_state(p in spectrum()) {
        let s = Spectrum4::sorted(p).unwrap();
        prop_assert!((concurrence_ih(&s) - concurrence(&ih_state(&s)).unwrap().value).abs() < 1e-10);
    }

    #[test]
    fn conditional_tsallis_and_renyi_share_sign(seed in any::<u64>()) {
        let rho = state(seed);
        for q in [0.5, 2.0, 3.0, 5.0] {
            let t = conditional_tsallis(&rho, q, Subsystem::B).unwrap();
            let r = conditional_renyi(&rho, EntropyParams::new(Order::new(q).unwrap(), LogBase::E), Subsystem::B).unwrap();
            if t.abs() > 1e-12 && r.abs() > 1e-12 {
                prop_assert_eq!(t > 0.0, r > 0.0);
            }
        }
    }

    #[test]
    fn renyi_limits(p in spectrum()) {
        let at = |q: f64| renyi_entropy(&p, EntropyParams::new(Order::new(q).unwrap(), LogBase::E)).unwrap();
        let vn = renyi_entropy(&p, EntropyParams::new(Order::One, LogBase::E)).unwrap();
        let (lo, hi) = (at(1.0 + 1e-4), at(1.0 - 1e-4));
        prop_assert!(lo <= vn + 1e-6 && vn <= hi + 1e-6);
        let lmax = p.iter().copied().fold(0.0, f64::max);
        let gap = at(100.0) + lmax.ln();
        prop_assert!(gap >= (-lmax.ln() - 4f64.ln()) / 99.0 - 1e-12);
        prop_assert!(gap <= -lmax.ln() / 99.0 + 1e-12);
        if lmax >= 0.95 {
            prop_assert!(gap.abs() < 1e-3);
        }
    }

    #[test]
    fn bin_merge_is_associative(xs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, any::<bool>()), 0..60)) {
        let b = Binning { lo: 0.0, hi: 1.0, bins: 5 };
        let parts: Vec<BinSeries> = xs.chunks(7).map(|c| {
            let mut s = BinSeries::new(b);
            for (x, v, q) in c {
                s.record(*x, *v, *q, false);
            }
            s
        }).collect();
        let mut fwd = BinSeries::new(b);
        for p in &parts {
            fwd.merge(p).unwrap();
        }
        let mut rev = BinSeries::new(b);
        for p in parts.iter().rev() {
            rev.merge(p).unwrap();
        }
        prop_assert_eq!(fwd, rev);
    }
}

#[test]
fn escre_max_grows_with_sample_count() {
    let mut small = SweepConfig::escre_default(SeedSpec::new(11));
    small.samples = 5000;
    let mut large = small.clone();
    large.samples = 12_000;
    let a = escre_max_sweep(&small).unwrap();
    let b = escre_max_sweep(&large).unwrap();
    for (x, y) in a.bins.iter().zip(&b.bins) {
        assert!(x.count <= y.count);
        if let Some(m) = x.max_c {
            assert!(y.max_c.unwrap() >= m);
        }
    }
    assert!(b.counts().iter().sum::<u64>() + b.out_of_range <= large.samples);
}

#[test]
fn pure_states_are_never_escre() {
    let mut rng = split_stream(SeedSpec::new(21), 0);
    let mut entangled = 0;
    for _ in 0..2000 {
        let u: Matrix4 = haar_unitary(&mut rng);
        let psi: [C64; 4] = core::array::from_fn(|i| u.0[i][0]);
        let rho = DensityMatrix4::pure(&psi).unwrap();
        assert!(participation_ratio(&rho) < 1.0 + 1e-6);
        if concurrence(&rho).unwrap().value > 1e-6 {
            entangled += 1;
            for q in [Order::new(0.5).unwrap(), Order::new(2.0).unwrap(), Order::Infinity] {
                assert!(!classical_inequalities_hold(&rho, &[q]).unwrap());
            }
        }
    }
    assert!(entangled > 1900);
}
