//! Property tests for the structural invariants of the library.

use approx::assert_relative_eq;
use calib_core::calibrations::Octonion;
use calib_core::cheeger::{bruteforce_cheeger, random_graph, sweep_cheeger, Convention};
use calib_core::exterior::{binomial, comass, ComassOptions};
use calib_core::linalg::{random_frame, seeded};
use calib_core::quatlab::random_complex_plane;
use calib_core::quatlab::{newton_bound, quaternionic_angle, HyperHermitianSpace};
use calib_core::{ExprMap, MultiVector};
use proptest::prelude::*;
use rand::Rng;

fn form(dim: usize, grade: usize, coeffs: &[f64]) -> MultiVector {
    MultiVector::from_coeffs(dim, grade, coeffs[..binomial(dim, grade)].to_vec()).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 35)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_symmetric_and_positive(a in coeffs(), b in coeffs(), k in 1usize..5) {
        let (x, y) = (form(6, k, &a), form(6, k, &b));
        assert_relative_eq!(x.inner(&y).unwrap(), y.inner(&x).unwrap(), epsilon = 1e-12);
        let n2 = x.inner(&x).unwrap();
        prop_assert!(n2 >= 0.0);
        prop_assert!(n2 > 0.0 || x.coeffs().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn hodge_is_an_isometry(a in coeffs(), b in coeffs(), k in 0usize..6) {
        let (x, y) = (form(6, k, &a), form(6, k, &b));
        let (hx, hy) = (x.hodge(None).unwrap(), y.hodge(None).unwrap());
        assert_relative_eq!(hx.inner(&hy).unwrap(), x.inner(&y).unwrap(), epsilon = 1e-10, max_relative = 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative(a in coeffs(), b in coeffs(), k in 1usize..3, l in 1usize..3) {
        let (x, y) = (form(5, k, &a), form(5, l, &b));
        let xy = x.wedge(&y).unwrap();
        let yx = y.wedge(&x).unwrap().scale(if k * l % 2 == 0 { 1.0 } else { -1.0 });
        prop_assert!(xy.sub(&yx).unwrap().norm() <= 1e-12 * (1.0 + xy.norm()));
    }

    #[test]
    fn octonion_norm_is_multiplicative(a in prop::array::uniform8(-3.0..3.0f64), b in prop::array::uniform8(-3.0..3.0f64)) {
        let (x, y) = (Octonion(a), Octonion(b));
        assert_relative_eq!((x * y).norm(), x.norm() * y.norm(), epsilon = 1e-12, max_relative = 1e-13);
    }

    #[test]
    fn newton_bound_holds(l in prop::collection::vec(-5.0..5.0f64, 4)) {
        let (cross, squares) = newton_bound(&l);
        prop_assert!(cross <= squares + 1e-12);
    }

    #[test]
    fn complex_planes_have_angle_between_a_third_and_one(seed in any::<u64>()) {
        let space = HyperHermitianSpace::new(2).unwrap();
        let plane = random_complex_plane(&mut seeded(seed), &space).unwrap();
        let c = quaternionic_angle(&space, &plane).unwrap().cos_theta;
        prop_assert!((1.0 / 3.0 - 1e-10..=1.0 + 1e-10).contains(&c), "{}", c);
    }

    #[test]
    fn sweeps_never_beat_brute_force(seed in any::<u64>(), n in 3usize..11) {
        let mut rng = seeded(seed);
        let g = random_graph(&mut rng, n, 0.3);
        let h = bruteforce_cheeger(&g, Convention::HalfVolume).unwrap();
        let f: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if let Ok(s) = sweep_cheeger(&g, &f, Convention::HalfVolume) {
            prop_assert!(s.value >= h.value - 1e-12);
        }
    }

    #[test]
    fn printing_and_reparsing_is_stable(a in -3.0..3.0f64, b in 0.1..3.0f64, pick in 0usize..4) {
        let src = [
            format!("sin({a}*x1) + x2^3 - {b}/x1"),
            format!("exp(-{b}*(x1^2 + x2^2)) * cos(x2)"),
            format!("sqrt({b} + x1^2) - atan(x2 - {a})"),
            format!("-(x1 - {a})^2 * tanh(x2) + log({b} + x1^2)"),
        ][pick].clone();
        let once = ExprMap::parse(&[src.as_str()], 2).unwrap();
        let printed = once.exprs()[0].to_string();
        let twice = ExprMap::parse(&[printed.as_str()], 2).unwrap();
        prop_assert_eq!(&printed, &twice.exprs()[0].to_string());
        let x = [0.7, -0.4];
        assert_relative_eq!(once.eval(&x).unwrap()[0], twice.eval(&x).unwrap()[0], max_relative = 1e-14);
    }

    #[test]
    fn jets_follow_the_chain_rule(a in -2.0..2.0f64, b in -2.0..2.0f64, x1 in -1.0..1.0f64, x2 in -1.0..1.0f64) {
        let inner = format!("{a}*x1*x2 + x2^2 - {b}*x1");
        let g = ExprMap::parse(&[inner.as_str()], 2).unwrap().eval_jet2(&[x1, x2]).unwrap().remove(0);
        let composed = ExprMap::parse(&[format!("sin({inner})").as_str()], 2).unwrap().eval_jet2(&[x1, x2]).unwrap().remove(0);
        let (s, c) = g.value.sin_cos();
        assert_relative_eq!(composed.value, s, epsilon = 1e-12);
        for i in 0..2 {
            assert_relative_eq!(composed.grad[i], c * g.grad[i], epsilon = 1e-10);
            for j in 0..2 {
                let expected = c * g.hess[2 * i + j] - s * g.grad[i] * g.grad[j];
                assert_relative_eq!(composed.hess[2 * i + j], expected, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn comass_dominates_sampled_frames() {
    let mut rng = seeded(3);
    for trial in 0..3 {
        let c: Vec<f64> = (0..35).map(|_| rng.random_range(-1.0..1.0)).collect();
        let omega = form(6, 3, &c);
        let opts = ComassOptions { restarts: 40, grad_tol: 1e-9, max_iter: 5000, seed: trial };
        let value = comass(&omega, &opts).value;
        for _ in 0..1000 {
            let f = random_frame(&mut rng, 6, 3);
            assert!(omega.eval_frame(&f).unwrap().abs() <= value + 1e-9);
        }
    }
}
