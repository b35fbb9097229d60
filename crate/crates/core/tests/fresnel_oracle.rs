mod common;

use casimir_core::fresnel::{compose, stack_coefficients};
use casimir_core::{Layer, MaterialModel, Polarization, SpectralPoint};
use common::{random_layers, random_material, random_point, rel_amplitude as rel, transfer_matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LENGTH: f64 = 1e-6;

fn worst_mismatch(layers: &[Layer], left: &MaterialModel, right: &MaterialModel, pt: &SpectralPoint) -> f64 {
    let got = stack_coefficients(layers, left, right, pt).unwrap();
    let want = transfer_matrix::stack(layers, left, right, pt);
    [
        rel(got.r_fwd(), want.r_fwd),
        rel(got.r_bwd(), want.r_bwd),
        rel(got.t_fwd(), want.t_fwd),
        rel(got.t_bwd(), want.t_bwd),
        rel(got.a(), want.a),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[test]
fn single_interface_matches_matrix_product() {
    let glass = MaterialModel::dielectric(2.25).unwrap();
    let magnetic = MaterialModel::constant(3.0, 2.0).unwrap();
    for q in Polarization::BOTH {
        let pt = SpectralPoint::new(3e14, 2e6, q);
        assert!(worst_mismatch(&[], &glass, &magnetic, &pt) < 1e-13);
    }
}

#[test]
fn seeded_random_stacks_match_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let count = rng.gen_range(0..=4);
        let layers = random_layers(&mut rng, count, 5e-9, 200e-9);
        let left = random_material(&mut rng);
        let right = random_material(&mut rng);
        let pt = random_point(&mut rng, LENGTH);
        let err = worst_mismatch(&layers, &left, &right, &pt);
        assert!(err < 1e-10, "mismatch {err:e} for {layers:?} between {left:?} and {right:?} at {pt:?}");
    }
}

#[test]
fn composition_of_halves_matches_whole() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let layers = random_layers(&mut rng, 4, 10e-9, 150e-9);
        let (left, right) = (random_material(&mut rng), random_material(&mut rng));
        let pt = random_point(&mut rng, LENGTH);
        let split = &layers[1];
        let lower = stack_coefficients(&layers[..1], &left, &split.material, &pt).unwrap();
        let upper = stack_coefficients(&layers[2..], &split.material, &right, &pt).unwrap();
        let kappa = common::medium(&split.material, &pt).2;
        let joined = compose(&lower, kappa, split.thickness, &upper).unwrap();
        let want = transfer_matrix::stack(&layers, &left, &right, &pt);
        assert!(rel(joined.r_fwd(), want.r_fwd) < 1e-10);
        assert!(rel(joined.a(), want.a) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matrix_oracle_agrees(seed in any::<u64>(), count in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = random_layers(&mut rng, count, 5e-9, 200e-9);
        let left = random_material(&mut rng);
        let right = random_material(&mut rng);
        let pt = random_point(&mut rng, LENGTH);
        prop_assert!(worst_mismatch(&layers, &left, &right, &pt) < 1e-10);
    }

    #[test]
    fn a_is_symmetric_under_reversal(seed in any::<u64>(), count in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = random_layers(&mut rng, count, 5e-9, 200e-9);
        let (left, right) = (random_material(&mut rng), random_material(&mut rng));
        let pt = random_point(&mut rng, LENGTH);
        let rev: Vec<Layer> = layers.iter().rev().cloned().collect();
        let fwd = stack_coefficients(&layers, &left, &right, &pt).unwrap();
        let bwd = stack_coefficients(&rev, &right, &left, &pt).unwrap();
        prop_assert!(rel(fwd.a(), bwd.a()) < 1e-12);
        prop_assert!(rel(fwd.r_fwd(), bwd.r_bwd()) < 1e-12);
    }
}
