use approx::assert_relative_eq;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use procrustes_core::rkhs::{covariance_distance_regularized, gram_form_covariance_distance};
use procrustes_core::sample;
use procrustes_core::*;

fn alpha(v: f64) -> AlphaParam {
    AlphaParam::new(v).unwrap()
}

fn poly2() -> KernelSpec {
    KernelSpec::polynomial(2, 1.0).unwrap()
}

#[test]
fn regularized_operator_distance_tends_to_unregularized() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for al in [0.5, 0.75, 1.0] {
        let x = sample::random_dataset(&mut rng, 10, 2, 0.0);
        let y = sample::random_dataset(&mut rng, 10, 2, 0.5);
        let k = KernelSpec::gaussian_rbf(1.0).unwrap();
        let limit = rkhs_alpha_distance_unregularized(&x, &y, &k, al).unwrap();
        let mut previous = f64::INFINITY;
        for gamma in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
            let d = rkhs_alpha_distance(&x, &y, &k, al, gamma).unwrap();
            let gap = (d - limit).abs() / limit;
            assert!(
                gap <= previous * 1.01,
                "alpha={al} gamma={gamma}: gap {gap} after {previous}"
            );
            previous = gap;
        }
        assert!(previous < 1e-3, "alpha={al}: gap {previous}");
    }
}

#[test]
fn unregularized_half_is_twice_bures_wasserstein() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let x = sample::random_dataset(&mut rng, 9, 3, 0.0);
    let y = sample::random_dataset(&mut rng, 9, 3, 0.2);
    let (_, cx) = explicit_feature_covariance(&x, &KernelSpec::Linear).unwrap();
    let (_, cy) = explicit_feature_covariance(&y, &KernelSpec::Linear).unwrap();
    let d = rkhs_alpha_distance_unregularized(&x, &y, &KernelSpec::Linear, 0.5).unwrap();
    assert_relative_eq!(
        d,
        2.0 * bures_wasserstein(&cx, &cy).unwrap().value,
        max_relative = 1e-8
    );
}

#[test]
fn gaussian_distance_at_half_is_wasserstein() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for (m, n) in [(8, 8), (7, 12)] {
        let x = sample::random_dataset(&mut rng, m, 2, 0.0);
        let y = sample::random_dataset(&mut rng, n, 2, 0.7);
        let k = KernelSpec::gaussian_rbf(0.9).unwrap();
        let g = rkhs_gaussian_distance(&x, &y, &k, alpha(0.5), 0.0).unwrap();
        let w = rkhs_wasserstein(&x, &y, &k).unwrap();
        assert_relative_eq!(g.distance, w.distance, max_relative = 1e-9);
        assert_relative_eq!(g.mean_term, w.mean_term, max_relative = 1e-12);
    }
}

#[test]
fn gram_form_matches_feature_space_for_unequal_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let x = sample::random_dataset(&mut rng, 11, 2, 0.0);
    let y = sample::random_dataset(&mut rng, 6, 2, 0.4);
    let (_, cx) = explicit_feature_covariance(&x, &poly2()).unwrap();
    let (_, cy) = explicit_feature_covariance(&y, &poly2()).unwrap();
    let gb = gram_bundle(&x, &y, &poly2()).unwrap();
    for al in [0.5, 0.8, 1.0, 1.7] {
        let got = gram_form_covariance_distance(&gb, al).unwrap();
        let want = alpha_procrustes(&cx, &cy, alpha(al)).unwrap().value;
        assert_relative_eq!(got, want, max_relative = 1e-8);
    }
}

#[test]
fn distances_vanish_only_when_moments_agree() {
    // x ↦ −x fixes every homogeneous degree-2 monomial, so the feature
    // distributions coincide although the point sets differ
    let pts = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, -1.0, -0.5, 0.3, -2.0, -0.3, 2.0]);
    let x = Dataset::new(pts.clone()).unwrap();
    let y = Dataset::new(-pts).unwrap();
    let k = KernelSpec::polynomial(2, 0.0).unwrap();
    assert!(rkhs_alpha_distance(&x, &y, &k, 0.7, 0.1).unwrap() < 1e-6);
    assert!(rkhs_wasserstein(&x, &y, &k).unwrap().distance < 1e-6);

    let shifted = Dataset::new(x.points().map(|v| v + 0.1)).unwrap();
    assert!(rkhs_wasserstein(&x, &shifted, &k).unwrap().distance > 1e-3);
}

#[test]
fn block_formula_in_badly_scaled_regime() {
    // cubic kernel with α = 1.5 puts block entries near 1e16; agreement with
    // the projected computation degrades to roughly ε·‖M‖ relative to d²
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for m in [4, 6, 8] {
        let x = sample::random_dataset(&mut rng, m, 2, 0.0);
        let y = sample::random_dataset(&mut rng, m, 2, 0.3);
        let k = KernelSpec::polynomial(3, 1.0).unwrap();
        let cg = CenteredGram::from_bundle(&gram_bundle(&x, &y, &k).unwrap()).unwrap();
        let block = covariance_distance_regularized(&cg, 1.5, 0.1).unwrap();
        let projected = covariance_distance_projected(&cg, alpha(1.5), 0.1).unwrap();
        assert_relative_eq!(block, projected, max_relative = 1e-6);
    }
}

#[test]
fn projection_handles_log_limit_and_unequal_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let x = sample::random_dataset(&mut rng, 9, 2, 0.0);
    let y = sample::random_dataset(&mut rng, 5, 2, 0.4);
    let (_, cx) = explicit_feature_covariance(&x, &poly2()).unwrap();
    let (_, cy) = explicit_feature_covariance(&y, &poly2()).unwrap();
    let cg = CenteredGram::from_bundle(&gram_bundle(&x, &y, &poly2()).unwrap()).unwrap();
    for al in [AlphaParam::log_limit(), alpha(-0.5), alpha(0.6)] {
        let got = covariance_distance_projected(&cg, al, 0.05).unwrap();
        let want = alpha_procrustes_regularized(&cx, &cy, 0.05, al)
            .unwrap()
            .value;
        assert_relative_eq!(got, want, max_relative = 1e-8);
    }
}
