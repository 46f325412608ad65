//! Property tests for the max-plus algebra laws.
//!
//! Finite test scalars are dyadic (multiples of 1/1024, magnitude < 2^10),
//! so every sum formed by the checked identities is exact in f64 and the
//! laws hold bitwise; only the spectral-radius comparison divides by a
//! cycle length and uses a tolerance.

use maxplus::testkit::max_cycle_mean;
use maxplus::{MaxPlusMatrix, MaxPlusScalar};
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = MaxPlusScalar> {
    prop_oneof![
        6 => (-(1i64 << 20)..=(1i64 << 20))
            .prop_map(|ticks| MaxPlusScalar::finite(ticks as f64 / 1024.0)),
        1 => Just(MaxPlusScalar::EPS),
    ]
}

fn finite_dyadic() -> impl Strategy<Value = MaxPlusScalar> {
    (-(1i64 << 20)..=(1i64 << 20)).prop_map(|ticks| MaxPlusScalar::finite(ticks as f64 / 1024.0))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = MaxPlusMatrix> {
    prop::collection::vec(dyadic(), rows * cols)
        .prop_map(move |entries| MaxPlusMatrix::new(rows, cols, entries).unwrap())
}

fn finite_matrix(rows: usize, cols: usize) -> impl Strategy<Value = MaxPlusMatrix> {
    prop::collection::vec(finite_dyadic(), rows * cols)
        .prop_map(move |entries| MaxPlusMatrix::new(rows, cols, entries).unwrap())
}

fn square(max: usize) -> impl Strategy<Value = MaxPlusMatrix> {
    (1..=max).prop_flat_map(|n| matrix(n, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn scalar_semiring_laws(x in dyadic(), y in dyadic(), z in dyadic()) {
        // oplus: associative, commutative, idempotent, eps neutral
        prop_assert_eq!(x.oplus(y).oplus(z), x.oplus(y.oplus(z)));
        prop_assert_eq!(x.oplus(y), y.oplus(x));
        prop_assert_eq!(x.oplus(x), x);
        prop_assert_eq!(x.oplus(MaxPlusScalar::EPS), x);
        // otimes: associative, 0 identity, eps absorbing
        prop_assert_eq!(x.otimes(y).otimes(z), x.otimes(y.otimes(z)));
        prop_assert_eq!(x.otimes(MaxPlusScalar::ONE), x);
        prop_assert!(x.otimes(MaxPlusScalar::EPS).is_eps());
        // distributivity
        prop_assert_eq!(x.otimes(y.oplus(z)), x.otimes(y).oplus(x.otimes(z)));
        prop_assert_eq!(y.oplus(z).otimes(x), y.otimes(x).oplus(z.otimes(x)));
    }

    #[test]
    fn scalar_inverse_and_power(x in dyadic()) {
        prop_assert_eq!(x.inverse().inverse(), x);
        if x.is_finite() {
            prop_assert_eq!(x.otimes(x.inverse()), MaxPlusScalar::ONE);
        } else {
            prop_assert!(x.inverse().is_eps());
        }
        prop_assert_eq!(x.power(1.0).unwrap(), x);
    }

    #[test]
    fn matrix_otimes_is_monotonic(
        (a, b, bump_a, bump_b) in (1..=3usize, 1..=3usize, 1..=3usize).prop_flat_map(|(r, k, c)| {
            (matrix(r, k), matrix(k, c), matrix(r, k), matrix(k, c))
        })
    ) {
        let c_mat = a.oplus(&bump_a).unwrap();
        let d_mat = b.oplus(&bump_b).unwrap();
        prop_assert!(a.entrywise_le(&c_mat));
        prop_assert!(b.entrywise_le(&d_mat));
        let small = a.otimes(&b).unwrap();
        let large = c_mat.otimes(&d_mat).unwrap();
        prop_assert!(small.entrywise_le(&large));
    }

    #[test]
    fn product_dominates_rowmax_factorization(
        (a, b) in (1..=4usize).prop_flat_map(|n| (matrix(n, n), finite_matrix(n, n)))
    ) {
        // A (x) B >= (A (x) 0) (x) (B^- (x) 0)^- for finite B
        let product = a.otimes(&b).unwrap();
        let factored = a
            .row_maxima()
            .otimes(&b.conjugate().row_maxima().conjugate())
            .unwrap();
        prop_assert!(factored.entrywise_le(&product));
    }

    #[test]
    fn norm_inequalities(
        (a, b, bump) in (1..=4usize).prop_flat_map(|n| (matrix(n, n), finite_matrix(n, n), matrix(n, n)))
    ) {
        // monotone: A <= B implies ||A|| <= ||B||
        let larger = a.oplus(&bump).unwrap();
        prop_assert!(a.norm().as_f64() <= larger.norm().as_f64());
        // submultiplicative: ||A (x) B|| <= ||A|| (x) ||B||
        let product = a.otimes(&b).unwrap();
        prop_assert!(product.norm().as_f64() <= a.norm().otimes(b.norm()).as_f64());
        // finite B: ||A (x) B|| >= ||A|| (x) ||B^-||^-1
        let floor = a.norm().otimes(b.conjugate().norm().inverse());
        prop_assert!(product.norm().as_f64() >= floor.as_f64());
    }

    #[test]
    fn conjugate_is_an_involution(a in (1..=4usize, 1..=4usize).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }

    #[test]
    fn power_law(a in square(3), l in 0u32..=3, m in 0u32..=3) {
        let combined = a.pow(l + m).unwrap();
        let split = a.pow(l).unwrap().otimes(&a.pow(m).unwrap()).unwrap();
        prop_assert_eq!(combined, split);
    }

    #[test]
    fn matrix_text_round_trips(a in (1..=4usize, 1..=4usize).prop_flat_map(|(r, c)| matrix(r, c))) {
        let back: MaxPlusMatrix = a.to_string().parse().unwrap();
        prop_assert_eq!(a, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn spectral_radius_equals_brute_force_cycle_mean(a in square(5)) {
        let rho = a.spectral_radius().unwrap();
        let oracle = max_cycle_mean(&a);
        if oracle.is_eps() {
            prop_assert!(rho.is_eps());
        } else {
            prop_assert!((rho.as_f64() - oracle.as_f64()).abs() <= 1e-9,
                "rho {} vs cycle mean {}", rho.as_f64(), oracle.as_f64());
        }
    }
}
