use proptest::prelude::*;
use qde_core::mutation::{mutate_egsd, mutate_esd, mutate_pm1, mutate_pm13, mutate_pm3, mutate_rq};
use qde_core::{MutationSpec64, Quat, Strategy as Op};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quat() -> impl Strategy<Value = Quat> {
    prop::array::uniform4(-10.0..10.0f64).prop_map(Quat::from_array)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn egsd_with_real_scale_is_esd(a in quat(), b in quat(), c in quat(), alpha in 0.0..2.0f64) {
        prop_assert_eq!(mutate_egsd(a, b, c, Quat::from_real(alpha)), mutate_esd(a, b, c, alpha));
    }

    #[test]
    fn polar_identity_rotor(a in quat(), b in quat(), c in quat()) {
        prop_assert_eq!(mutate_pm1(a, b, 1.0, 0.0), a);
        prop_assert_eq!(mutate_pm3(a, b, c, 1.0, 0.0), c);
        prop_assert_eq!(mutate_pm13(a, b, c, 1.0, 0.0), c + a);
    }

    #[test]
    fn unit_rotors_keep_the_norm(a in quat(), b in quat(), c in quat(), beta in -2.0..2.0f64, seed: u64) {
        let tol = 1e-10 * (1.0 + a.norm().max(c.norm()));
        prop_assert!((mutate_pm1(a, b, 1.0, beta).norm() - a.norm()).abs() <= tol);
        prop_assert!((mutate_pm3(a, b, c, 1.0, beta).norm() - c.norm()).abs() <= tol);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!((mutate_rq(a, &mut rng).norm() - a.norm()).abs() <= tol);
    }

    #[test]
    fn polar_magnitude_scales_by_alpha_squared(a in quat(), b in quat(), alpha in 0.1..2.0f64, beta in -2.0..2.0f64) {
        let got = mutate_pm1(a, b, alpha, beta).norm();
        prop_assert!((got - alpha * alpha * a.norm()).abs() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn pm1_and_pm3_agree_on_equal_donors(a in quat(), b in quat(), alpha in 0.1..2.0f64, beta in -2.0..2.0f64) {
        prop_assert_eq!(mutate_pm1(a, b, alpha, beta), mutate_pm3(a, b, a, alpha, beta));
    }

    #[test]
    fn pm13_is_q3_plus_pm1(a in quat(), b in quat(), c in quat(), alpha in 0.1..2.0f64, beta in -2.0..2.0f64) {
        let lhs = mutate_pm13(a, b, c, alpha, beta) - c;
        let rhs = mutate_pm1(a, b, alpha, beta);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + c.norm()));
    }

    #[test]
    fn replaying_a_seed_reproduces_the_mutant(a in quat(), b in quat(), c in quat(), seed: u64) {
        for op in Op::ALL {
            let spec = MutationSpec64::with_defaults(op);
            let first = spec.apply(a, b, c, &mut ChaCha8Rng::seed_from_u64(seed));
            let second = spec.apply(a, b, c, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(first, second);
        }
    }
}

#[test]
fn every_strategy_is_total_on_zero_donors() {
    let z = Quat::zero();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for op in Op::ALL {
        let out = MutationSpec64::with_defaults(op).apply(z, z, z, &mut rng);
        assert!(out.is_finite(), "{op}");
    }
}

#[test]
fn unknown_strategy_names_the_valid_set() {
    let err = "PM2".parse::<Op>().unwrap_err().to_string();
    for tag in ["ESD", "EGSD", "PM1", "PM3", "PM13", "RQ"] {
        assert!(err.contains(tag), "{err}");
    }
}
