mod common;

use causal_core::kernel::{classify, lagrangian, CausalRelation, DEFAULT_CLASSIFY_TOL};
use causal_core::operator::product_spectrum;
use causal_core::sphere::{
    boundary_angle, embed, grad_sphere_lagrangian, script_d, sphere_lagrangian, vec3,
};
use common::{fd_gradient, random_point, random_rotation, rng, rotate};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn closed_form_matches_product_spectra() {
    let mut r = rng(2024);
    for _ in 0..10_000 {
        let tau = r.gen_range(1.0..4.0);
        let (x, y) = (random_point(&mut r), random_point(&mut r));
        let closed = sphere_lagrangian(&x, &y, tau);
        let spectral = lagrangian(&embed(&x, tau), &embed(&y, tau)).unwrap();
        assert!(
            (closed - spectral).abs() <= 1e-9 * (1.0 + 8.0 * tau * tau),
            "{closed} vs {spectral}"
        );
    }
}

#[test]
fn gradients_match_central_differences() {
    let mut r = rng(77);
    let mut checked = 0;
    while checked < 1000 {
        let tau = r.gen_range(1.0..4.0);
        let (x, y) = (random_point(&mut r), random_point(&mut r));
        if script_d(x.cos_angle(&y), tau).unwrap().abs() <= 1e-3 {
            continue;
        }
        let g = grad_sphere_lagrangian(&x, &y, tau);
        let fd = fd_gradient(&x, &y, tau, 1e-6);
        let err = vec3::norm(&vec3::sub(&g, &fd));
        assert!(
            err <= 1e-5 * vec3::norm(&g).max(1.0),
            "err {err} at tau {tau}"
        );
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classification_follows_the_boundary_angle(seed in any::<u64>(), tau in 1.0f64..4.0) {
        let mut r = rng(seed);
        let (x, y) = (random_point(&mut r), random_point(&mut r));
        let c = x.cos_angle(&y);
        let cutoff = boundary_angle(tau).cos();
        prop_assume!((c - cutoff).abs() > 1e-6);
        let spectrum = product_spectrum(&embed(&x, tau), &embed(&y, tau)).unwrap();
        let spacelike = classify(&spectrum, DEFAULT_CLASSIFY_TOL) == CausalRelation::Spacelike;
        prop_assert_eq!(spacelike, c < cutoff);
        if spacelike {
            prop_assert_eq!(sphere_lagrangian(&x, &y, tau), 0.0);
        }
    }

    #[test]
    fn lagrangian_is_rotation_invariant(seed in any::<u64>(), tau in 1.0f64..4.0) {
        let mut r = rng(seed);
        let (x, y) = (random_point(&mut r), random_point(&mut r));
        let rot = random_rotation(&mut r);
        let a = sphere_lagrangian(&x, &y, tau);
        let b = sphere_lagrangian(&rotate(&rot, &x), &rotate(&rot, &y), tau);
        // Rotating moves the cosine by rounding, amplified by 𝒟′.
        let slack = 1e-12 * (1.0 + 8.0 * tau * tau) * (1.0 + tau * tau);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs() + slack, "{a} vs {b}");
    }
}
