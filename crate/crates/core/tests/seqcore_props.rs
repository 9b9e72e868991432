use dpmult::seqcore::{convolve_blocked, convolve_schoolbook, dp_norm, dyadic_constants};
use dpmult::{canonical, convolve, eval_symbol, norm, suffix_majorant, Exponent, FinSeq, NormKind, NormTag};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), 1.0f64..6.0].prop_map(|p| Exponent::new(p).unwrap())
}

fn seq(max_len: usize) -> impl Strategy<Value = FinSeq> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..max_len)
        .prop_map(|v| FinSeq::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap())
}

fn int_seq(max_len: usize) -> impl Strategy<Value = FinSeq> {
    prop::collection::vec(-50i32..50, 1..max_len)
        .prop_map(|v| FinSeq::from_real(&v.into_iter().map(f64::from).collect::<Vec<_>>()).unwrap())
}

fn kinds(p: Exponent) -> Vec<NormKind> {
    NormTag::ALL.iter().filter_map(|&t| NormKind::new(t, p).ok()).collect()
}

proptest! {
    #[test]
    fn majorant_is_least_decreasing_envelope(a in seq(200)) {
        let m = suffix_majorant(&a).moduli();
        let mods = a.moduli();
        prop_assert!(m.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(m.iter().zip(&mods).all(|(x, y)| x >= y));
        // least: every value is attained at or after its index
        for (n, &v) in m.iter().enumerate() {
            prop_assert!(mods[n..].contains(&v));
        }
        prop_assert_eq!(suffix_majorant(&suffix_majorant(&a)), suffix_majorant(&a));
    }

    #[test]
    fn dp_dominates_lp_and_sup(a in seq(200), p in exponent()) {
        let dp = dp_norm(&a, p);
        let lp = norm(&a, NormKind::new(NormTag::Lp, p).unwrap());
        prop_assert!(lp <= dp * (1.0 + 1e-12));
        prop_assert!(a.sup_modulus() <= dp * (1.0 + 1e-12));
        prop_assert_eq!(dp, dp_norm(&suffix_majorant(&a), p));
    }

    #[test]
    fn norms_are_homogeneous(a in seq(100), p in exponent(), s in (-5.0f64..5.0, -5.0f64..5.0)) {
        let s = Complex64::new(s.0, s.1);
        for k in kinds(p) {
            let lhs = norm(&a.scale(s), k);
            let rhs = s.norm() * norm(&a, k);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300), "{:?}: {} vs {}", k.tag(), lhs, rhs);
        }
    }

    #[test]
    fn triangle_inequality(a in seq(100), b in seq(100), p in exponent()) {
        // CES sums over the stored window, so compare on a common one
        let len = a.len().max(b.len());
        let (a, b) = (a.padded(len), b.padded(len));
        for k in kinds(p) {
            let lhs = norm(&(&a + &b), k);
            let rhs = norm(&a, k) + norm(&b, k);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{:?}: {} > {}", k.tag(), lhs, rhs);
        }
    }

    #[test]
    fn padding_does_not_change_norms(a in seq(60), extra in 0usize..40, p in exponent()) {
        let padded = a.padded(a.len() + extra);
        prop_assert_eq!(&padded, &a);
        for k in kinds(p).into_iter().filter(|k| k.tag() != NormTag::Ces) {
            prop_assert!((norm(&padded, k) - norm(&a, k)).abs() <= 1e-12 * norm(&a, k));
        }
    }

    #[test]
    fn shift_identity(a in seq(300), m in 0usize..=64, p in exponent()) {
        let lhs = dp_norm(&convolve(&canonical(m, m + 1).unwrap(), &a), p).powf(p.p());
        let rhs = m as f64 * a.sup_modulus().powf(p.p()) + dp_norm(&a, p).powf(p.p());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn convolution_is_a_commutative_algebra(a in int_seq(40), b in int_seq(40), c in int_seq(40)) {
        prop_assert_eq!(convolve(&a, &b), convolve(&b, &a));
        prop_assert_eq!(convolve(&convolve(&a, &b), &c), convolve(&a, &convolve(&b, &c)));
        prop_assert_eq!(convolve(&a, &(&b + &c)), &convolve(&a, &b) + &convolve(&a, &c));
        prop_assert_eq!(convolve(&a, &canonical(0, 1).unwrap()), a.clone());
    }

    #[test]
    fn symbol_is_multiplicative(a in seq(20), b in seq(20), r in 0.0f64..1.0, t in 0.0f64..6.3) {
        let z = Complex64::from_polar(r, t);
        let lhs = eval_symbol(&convolve(&a, &b), z);
        let rhs = eval_symbol(&a, z) * eval_symbol(&b, z);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + a.l1() * b.l1()));
    }

    #[test]
    fn kernels_agree(a in seq(700), b in seq(700)) {
        let x = convolve_schoolbook(&a, &b);
        let y = convolve_blocked(&a, &b);
        let scale = a.l1() * b.l1();
        prop_assert!((&x - &y).sup_modulus() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn json_round_trip(a in seq(50)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(FinSeq::from_json_str(&text).unwrap(), a);
    }
}

/// Both dyadic forms sit within `[2^{-1/p}, 2^{1/p}]` of the d_p norm.
#[test]
fn dyadic_equivalence_on_ten_thousand_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ps = [1.0, 1.5, 2.0, 3.0];
    for i in 0..10_000 {
        let len = rng.random_range(1..=2048);
        let sparse = rng.random_bool(0.3);
        let v: Vec<f64> = (0..len)
            .map(|_| if sparse && rng.random_bool(0.9) { 0.0 } else { rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-3..3)) })
            .collect();
        let a = FinSeq::from_real(&v).unwrap();
        let p = Exponent::new(ps[i % 4]).unwrap();
        let (c, cc) = dyadic_constants(p);
        let dp = dp_norm(&a, p);
        for tag in [NormTag::DpDyadicA, NormTag::DpDyadicB] {
            let d = norm(&a, NormKind::new(tag, p).unwrap());
            assert!(c * dp <= d * (1.0 + 1e-12) && d <= cc * dp * (1.0 + 1e-12), "{tag:?} len {len}: {d} vs {dp}");
        }
    }
}

#[test]
fn canonical_norms_all_p() {
    for p in [1.0, 1.5, 2.0, 3.0] {
        let e = Exponent::new(p).unwrap();
        for n in 0..=1000 {
            let v = dp_norm(&canonical(n, n + 1).unwrap(), e);
            let expect = ((n + 1) as f64).powf(1.0 / p);
            assert!((v - expect).abs() <= 1e-12 * expect);
        }
    }
}
