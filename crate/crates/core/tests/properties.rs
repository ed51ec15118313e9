use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stbcsm::analysis::{exhaustive_minimizer, pairwise_term};
use stbcsm::config::{RunConfig, Scheme};
use stbcsm::geometry::{los_gain, OpticsConfig, Point3};
use stbcsm::link::Link;
use stbcsm::modulation::{build_alphabet, BitMapping};
use stbcsm::montecarlo::snr_to_sigma;
use stbcsm::prelude::q_function;
use stbcsm::spatial::PatternBook;
use stbcsm::transceiver::StbcSmLink;

fn link(scheme: Scheme, nt: usize, na: usize, m: usize) -> StbcSmLink {
    RunConfig::default()
        .with_scheme(scheme, nt, na, m)
        .build_stbc()
        .unwrap()
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gray_neighbours_differ_in_one_bit(k in 1u32..=6) {
        let m = 1usize << k;
        for i in 1..m {
            let a = BitMapping::Gray.label(i - 1);
            let b = BitMapping::Gray.label(i);
            prop_assert_eq!((a ^ b).count_ones(), 1);
            prop_assert_eq!(BitMapping::Gray.index(b), i);
        }
    }

    #[test]
    fn alphabet_mean_is_ip(k in 1u32..=6, ip in 0.01f64..10.0) {
        let a = build_alphabet(1 << k, ip).unwrap();
        let mean = a.levels().iter().sum::<f64>() / a.order() as f64;
        prop_assert!((mean - ip).abs() < 1e-12 * ip.max(1.0));
        for (x, c) in a.levels().iter().zip(a.complements()) {
            prop_assert!(*x > 0.0 && *c > 0.0);
            prop_assert!((x + c - 2.0 * ip).abs() < 1e-12 * ip.max(1.0));
        }
    }

    #[test]
    fn q_function_symmetry(x in -8.0f64..8.0) {
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-14);
        prop_assert!(q_function(x + 0.01) < q_function(x));
    }

    #[test]
    fn snr_sigma_inverse(snr in 0.0f64..250.0, ip in 0.1f64..5.0) {
        let s = snr_to_sigma(snr, ip);
        prop_assert!((20.0 * (ip / s).log10() - snr).abs() < 1e-9);
    }

    #[test]
    fn gain_falls_with_height(x in 0.0f64..5.0, y in 0.0f64..5.0, z in 1.0f64..3.5) {
        let o = OpticsConfig::default();
        let pd = Point3::new(x, y, 0.8);
        let near = los_gain(Point3::new(x, y, z), pd, &o).unwrap();
        let far = los_gain(Point3::new(x, y, z + 0.5), pd, &o).unwrap();
        prop_assert!(near > far && far > 0.0);
    }

    #[test]
    fn pattern_labels_round_trip(nt in 2usize..=8, na_off in 0usize..8) {
        let na = 1 + na_off % nt;
        let book = PatternBook::new(nt, na).unwrap();
        prop_assert_eq!(book.len(), 1 << book.index_bits());
        for p in book.patterns() {
            prop_assert_eq!(p.leds().len(), na);
            let bits = book.pattern_to_bits(p).unwrap();
            prop_assert_eq!(book.index_bits_to_pattern(&bits).unwrap(), p);
        }
    }

    #[test]
    fn stbc_noiseless_round_trip(nt in 2usize..=8, na_off in 0usize..7, k in 1u32..=4, seed in any::<u64>()) {
        let na = 2 + na_off % (nt - 1);
        let l = link(Scheme::StbcSm, nt, na, 1 << k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; l.slots()];
        let mut out = Vec::new();
        for _ in 0..8 {
            let bits = random_bits(&mut rng, l.frame_bits());
            l.modulate(&bits, &mut y).unwrap();
            l.demodulate(&y, &mut out);
            prop_assert_eq!(&out, &bits);
        }
    }

    #[test]
    fn two_step_matches_joint_ml(m_k in 1u32..=2, snr in 120.0f64..165.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in [link(Scheme::StbcSm, 6, 2, 1 << m_k), link(Scheme::QostbcSm, 4, 2, 1 << m_k)] {
            let sigma = snr_to_sigma(snr, l.alphabet().mean_power());
            for _ in 0..16 {
                let bits = random_bits(&mut rng, l.frame_bits());
                let tx = l.transmit(&bits).unwrap();
                let rx = l.apply_channel(&tx, sigma, &mut rng).unwrap();
                let y = rx.y.as_slice();
                let a = l.detect_joint_ml(y);
                let b = l.detect_two_step(y);
                prop_assert!((a.metric - b.metric).abs() <= 1e-9 * a.metric.max(1e-30));
            }
        }
    }

    #[test]
    fn decoupled_minimizer_is_exhaustive_minimum(m_k in 1u32..=3, seed in any::<u64>()) {
        let l = link(Scheme::QostbcSm, 4, 2, 1 << m_k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<usize> = (0..4).map(|_| rng.random_range(0..l.alphabet().order())).collect();
        let p = rng.random_range(0..l.book().len());
        let q = (p + 1 + rng.random_range(0..l.book().len() - 1)) % l.book().len();
        let t = pairwise_term(&l, p, q, &x).unwrap();
        let mut v = vec![0.0; l.slots()];
        l.noiseless(p, &x, &mut v);
        let brute = exhaustive_minimizer(&l, &v, q);
        let d = l.metric(&v, q, &brute).sqrt();
        prop_assert!((t.distance - d).abs() <= 1e-9 * d.max(1e-30));
    }
}
