use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;
use unifinsler::center::{f_a, solve_center, CenterOptions, CenterProblem};
use unifinsler::convexity::strong_convexity_modulus;
use unifinsler::geodesic::geodesic_between;
use unifinsler::linalg::{exp_skew, log_unitary, op_norm};
use unifinsler::metric::{d_2, d_inf, in_ball, BallSpec};
use unifinsler::random::{haar_unitary, random_in_ball, random_skew_with_norm, seeded, uniform, SeededRng};
use unifinsler::rigidity::{orbit, permutation_matrix, FiniteGroupAction};
use unifinsler::subspace::SubspaceSpec;
use unifinsler::{Tolerances, TraceConvention, Unitary};

const CONV: TraceConvention = TraceConvention::Normalized;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn haar(n: usize, rng: &mut SeededRng) -> Unitary {
    haar_unitary(n, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dinf_is_a_metric(seed in any::<u64>(), n in 1usize..6) {
        let tol = tol();
        let mut rng = seeded(seed);
        let (u, v, w) = (haar(n, &mut rng), haar(n, &mut rng), haar(n, &mut rng));
        let uv = d_inf(&u, &v, &tol).unwrap();
        prop_assert!((uv - d_inf(&v, &u, &tol).unwrap()).abs() <= 1e-10);
        prop_assert!(d_inf(&u, &u, &tol).unwrap() <= 1e-7);
        prop_assert!(uv <= PI + 1e-10);
        prop_assert!(uv <= d_inf(&u, &w, &tol).unwrap() + d_inf(&w, &v, &tol).unwrap() + 1e-9);
    }

    #[test]
    fn metrics_are_bi_invariant(seed in any::<u64>(), n in 1usize..6) {
        let tol = tol();
        let mut rng = seeded(seed);
        let (u, v, g, h) = (haar(n, &mut rng), haar(n, &mut rng), haar(n, &mut rng), haar(n, &mut rng));
        let (gu, gv) = (&(&g * &u) * &h, &(&g * &v) * &h);
        prop_assert!((d_inf(&u, &v, &tol).unwrap() - d_inf(&gu, &gv, &tol).unwrap()).abs() <= 1e-8);
        prop_assert!((d_2(&u, &v, CONV, &tol).unwrap() - d_2(&gu, &gv, CONV, &tol).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn log_inverts_exp(seed in any::<u64>(), n in 1usize..8, norm in 0.0..(PI - 0.05)) {
        let tol = tol();
        let x = random_skew_with_norm::<f64, _>(n, norm, &mut seeded(seed));
        let back = log_unitary(&exp_skew(&x, &tol).unwrap(), &tol).unwrap();
        prop_assert!(!back.branch_ambiguity);
        prop_assert!(op_norm(&(back.tangent.mat() - x.mat())) <= 1e-8);
    }

    #[test]
    fn chord_identity(seed in any::<u64>(), n in 1usize..8, norm in 0.0..PI) {
        let tol = tol();
        let x = random_skew_with_norm::<f64, _>(n, norm, &mut seeded(seed));
        let e = exp_skew(&x, &tol).unwrap();
        let lhs = op_norm(&(&unifinsler::Matrix::identity(n) - e.mat()));
        prop_assert!((lhs - 2.0 * (norm / 2.0).sin()).abs() <= 1e-9);
    }

    #[test]
    fn geodesics_have_constant_speed(seed in any::<u64>(), n in 1usize..6, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let tol = tol();
        let mut rng = seeded(seed);
        let u = haar(n, &mut rng);
        let v = random_in_ball(&u, 2.5, &mut rng);
        let g = geodesic_between(&u, &v, &tol).unwrap();
        let d = d_inf(&g.eval(s), &g.eval(t), &tol).unwrap();
        prop_assert!((d - (s - t).abs() * d_inf(&u, &v, &tol).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn sqrt_f_a_is_lipschitz(seed in any::<u64>(), n in 1usize..5, k in 1usize..5) {
        let tol = tol();
        let mut rng = seeded(seed);
        let sites: Vec<Unitary> = (0..k).map(|_| haar(n, &mut rng)).collect();
        let (u, v) = (haar(n, &mut rng), haar(n, &mut rng));
        let fu = f_a(&sites, &u, CONV, &tol).unwrap().sqrt();
        let fv = f_a(&sites, &v, CONV, &tol).unwrap().sqrt();
        prop_assert!((fu - fv).abs() <= d_2(&u, &v, CONV, &tol).unwrap() + 1e-9);
    }

    #[test]
    fn uniform_convexity_quarter_modulus(seed in any::<u64>(), n in 2usize..5, k in 1usize..4, r in 0.3f64..1.4) {
        // f_A(mid) <= (f_A(u) + f_A(v))/2 - (lambda/4) d_2(u, v)^2 for u, v
        // in every ball B_inf[a, r].
        let tol = tol();
        let mut rng = seeded(seed);
        let w = haar(n, &mut rng);
        let sites: Vec<Unitary> = (0..k).map(|_| random_in_ball(&w, r / 4.0, &mut rng)).collect();
        let inside = |p: &Unitary| sites.iter().all(|a| d_inf(a, p, &tol).unwrap() <= r);
        let u = random_in_ball(&w, 3.0 * r / 4.0, &mut rng);
        let v = random_in_ball(&w, 3.0 * r / 4.0, &mut rng);
        prop_assume!(inside(&u) && inside(&v));
        let mid = geodesic_between(&u, &v, &tol).unwrap().eval(0.5);
        let f = |p: &Unitary| f_a(&sites, p, CONV, &tol).unwrap();
        let d = d_2(&u, &v, CONV, &tol).unwrap();
        let slack = 0.5 * (f(&u) + f(&v)) - 0.25 * strong_convexity_modulus(r) * d * d - f(&mid);
        prop_assert!(slack >= -1e-9, "slack {slack}");
    }

    #[test]
    fn group_action_is_isometric(seed in any::<u64>()) {
        let tol = tol();
        let mut rng = seeded(seed);
        let g0 = haar(3, &mut rng);
        let gens = [permutation_matrix::<f64>(&[1, 2, 0]), permutation_matrix(&[1, 0, 2])];
        let pairs: Vec<_> = gens.iter().map(|p| (p.clone(), &(&g0.inverse() * p) * &g0)).collect();
        let act = FiniteGroupAction::generate(&pairs).unwrap();
        prop_assert_eq!(act.order(), 6);
        let (u, v) = (haar(3, &mut rng), haar(3, &mut rng));
        let h = rng.random_range(0..act.order());
        let d = d_inf(&u, &v, &tol).unwrap();
        prop_assert!((d_inf(&act.act(h, &u), &act.act(h, &v), &tol).unwrap() - d).abs() <= 1e-8);
        // The orbit of any orbit point is the same set, so its bound agrees.
        let full = SubspaceSpec::full();
        let a = orbit(&act, &u, &full, CONV, &tol).unwrap();
        let b = orbit(&act, &act.act(h, &u), &full, CONV, &tol).unwrap();
        prop_assert!((a.bound - b.bound).abs() <= 1e-7);
    }

    #[test]
    fn center_trace_is_feasible_and_monotone(seed in any::<u64>(), n in 1usize..4, k in 1usize..4) {
        let tol = tol();
        let mut rng = seeded(seed);
        let id = Unitary::identity(n);
        let sites: Vec<Unitary> = (0..k).map(|_| random_in_ball(&id, 0.5, &mut rng)).collect();
        let r = uniform(0.6, 1.4, &mut rng);
        let problem = CenterProblem::new(sites.clone(), SubspaceSpec::full(), r, TraceConvention::Standard, id, CenterOptions::default(), &tol).unwrap();
        let res = solve_center(&problem, &tol).unwrap();
        for w in res.trace.windows(2) {
            prop_assert!(w[1].f <= w[0].f + 1e-12);
        }
        for a in &sites {
            let ball = BallSpec::d_inf(a.clone(), r).unwrap();
            prop_assert!(in_ball(&res.center, &ball, &tol).unwrap().inside);
        }
    }
}

#[test]
fn single_precision_smoke() {
    let tol = Tolerances::single_precision();
    let mut rng = seeded(3);
    let x = random_skew_with_norm::<f32, _>(4, 1.3, &mut rng);
    let u: unifinsler::Unitary32 = exp_skew(&x, &tol).unwrap();
    let back = log_unitary(&u, &tol).unwrap().tangent;
    assert!(op_norm(&(back.mat() - x.mat())) <= 1e-4);
    let w = unifinsler::Unitary32::identity(4);
    assert!((d_inf(&w, &u, &tol).unwrap() - 1.3).abs() <= 1e-4);
    let g = geodesic_between(&w, &u, &tol).unwrap();
    assert!((d_inf(&w, &g.eval(0.5), &tol).unwrap() - 0.65).abs() <= 1e-4);
}
