use std::f64::consts::PI;

use proptest::prelude::*;

use eggwave::compression::{compress_with_filter, kept_count, largest_indices, prd};
use eggwave::wavelet::{
    double_shift_product, dwt_forward, dwt_inverse, max_depth, pollen_filter, FilterPair,
    NamedWavelet,
};

fn any_filter() -> impl Strategy<Value = FilterPair> {
    prop_oneof![
        proptest::sample::select(NamedWavelet::ALL.to_vec()).prop_map(|w| w.filter()),
        (-PI..=PI, -PI..=PI).prop_map(|(a, b)| pollen_filter(a, b).unwrap()),
    ]
}

fn signal(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0f64..100.0, min..=max)
        .prop_filter("nonzero energy", |x| x.iter().any(|v| v.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pollen_filters_are_orthonormal(a in -PI..=PI, b in -PI..=PI) {
        let f = pollen_filter(a, b).unwrap();
        let h = f.lowpass();
        prop_assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-10);
        prop_assert!((double_shift_product(h, 0) - 1.0).abs() < 1e-10);
        prop_assert!(double_shift_product(h, 1).abs() < 1e-10);
        prop_assert!(double_shift_product(h, 2).abs() < 1e-10);
        // Quadrature mirror relation.
        let g = f.highpass();
        for n in 0..6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((g[n] - sign * h[5 - n]).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_undoes_forward(x in signal(2, 300), f in any_filter(), d in 1usize..10) {
        let depth = d.min(max_depth(x.len()));
        let c = dwt_forward(&x, &f, depth).unwrap();
        let y = dwt_inverse(&c, &f).unwrap();
        prop_assert_eq!(y.len(), x.len());
        prop_assert!(prd(&x, &y).unwrap() < 1e-8);
    }

    #[test]
    fn subband_lengths_halve_upward(n in 2usize..5000, d in 1usize..12) {
        let depth = d.min(max_depth(n));
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let c = dwt_forward(&x, &NamedWavelet::Daubechies3.filter(), depth).unwrap();
        let mut len = n;
        for j in 1..=depth {
            len = len.div_ceil(2);
            prop_assert_eq!(c.detail(j).len(), len);
        }
        prop_assert_eq!(c.approximation().len(), len);
    }

    #[test]
    fn parseval_on_powers_of_two(k in 1u32..11, f in any_filter(), seed in any::<u64>()) {
        let n = 1usize << k;
        let x: Vec<f64> = (0..n).map(|i| ((i as u64 ^ seed) % 97) as f64 - 48.0).collect();
        let ex: f64 = x.iter().map(|v| v * v).sum();
        prop_assume!(ex > 0.0);
        let c = dwt_forward(&x, &f, max_depth(n)).unwrap();
        prop_assert!((c.energy() - ex).abs() / ex < 1e-10);
    }

    #[test]
    fn keep_sets_are_nested(flat in proptest::collection::vec(-5i32..5, 1..200), m1 in 1usize..200, m2 in 1usize..200) {
        let flat: Vec<f64> = flat.into_iter().map(f64::from).collect();
        let (lo, hi) = (m1.min(m2).min(flat.len()), m1.max(m2).min(flat.len()));
        let small = largest_indices(&flat, lo).unwrap();
        let large = largest_indices(&flat, hi).unwrap();
        prop_assert!(small.iter().all(|i| large.contains(i)));
        // Every kept magnitude is at least every dropped one.
        let floor = large.iter().map(|&i| flat[i].abs()).fold(f64::INFINITY, f64::min);
        for (i, v) in flat.iter().enumerate() {
            if !large.contains(&i) {
                prop_assert!(v.abs() <= floor);
            }
        }
    }

    #[test]
    fn kept_count_formula(total in 1usize..100_000, cr in 1.0f64..1000.0) {
        let m = kept_count(total, cr).unwrap();
        prop_assert_eq!(m, ((total as f64 / cr).floor() as usize).max(1));
    }

    #[test]
    fn discarded_energy_identity(k in 3u32..11, f in any_filter(), cr in 1.0f64..20.0, seed in any::<u64>()) {
        let n = 1usize << k;
        let x: Vec<f64> = (0..n)
            .map(|i| ((i as f64 + (seed % 1000) as f64) * 0.61).sin() + ((i as u64 * 7 + seed) % 13) as f64 * 0.1)
            .collect();
        let depth = max_depth(n).min(6);
        let out = compress_with_filter(&x, &f, depth, cr).unwrap();
        let coeffs = dwt_forward(&x, &f, depth).unwrap().to_flat();
        let discarded: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| out.kept_indices.binary_search(i).is_err())
            .map(|(_, c)| c * c)
            .sum();
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let lhs = out.prd_percent.powi(2) * ex / 1e4;
        prop_assert!((lhs - discarded).abs() <= 1e-8 * discarded.max(1e-300) + 1e-20, "{} vs {}", lhs, discarded);
    }

    #[test]
    fn prd_ignores_positive_scaling(x in signal(64, 400), f in any_filter(), k in 1e-3f64..1e4, cr in 1.0f64..10.0) {
        let depth = max_depth(x.len()).min(5);
        let scaled: Vec<f64> = x.iter().map(|v| v * k).collect();
        let a = compress_with_filter(&x, &f, depth, cr).unwrap();
        let b = compress_with_filter(&scaled, &f, depth, cr).unwrap();
        prop_assert_eq!(&a.kept_indices, &b.kept_indices);
        prop_assert!((a.prd_percent - b.prd_percent).abs() <= 1e-9 * a.prd_percent.max(1e-12));
    }
}
