use approx::assert_relative_eq;
use proptest::prelude::*;

use freetime::linalg::dot;
use freetime::models::{
    make_burgers, make_lotka_volterra, make_pendulum, BurgersDiscretization, BurgersParams, LotkaVolterraParams,
    PendulumParams,
};
use freetime::ProblemSpec;

fn lv() -> ProblemSpec {
    make_lotka_volterra(LotkaVolterraParams::default()).unwrap()
}

fn lv_terminal() -> ProblemSpec {
    make_lotka_volterra(LotkaVolterraParams::with_terminal_penalty()).unwrap()
}

fn pendulum() -> ProblemSpec {
    make_pendulum(PendulumParams::default()).unwrap()
}

fn burgers_small() -> ProblemSpec {
    burgers_with_alpha(BurgersParams::default().alpha)
}

fn burgers_with_alpha(alpha: f64) -> ProblemSpec {
    let params = BurgersParams {
        n_dof: 21,
        alpha,
        ..BurgersParams::default()
    };
    make_burgers(BurgersDiscretization::new(params).unwrap()).unwrap()
}

fn all_models() -> Vec<ProblemSpec> {
    vec![lv(), lv_terminal(), pendulum(), burgers_small()]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn rel_vec(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Deterministic pseudo-random vector in `[-1, 1]` from a seed.
fn pseudo(seed: u64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let x = (seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add((i as u64).wrapping_mul(1442695040888963407)))
                >> 11;
            2.0 * (x as f64 / (1u64 << 53) as f64) - 1.0
        })
        .collect()
}

/// A well-scaled state near the initial condition.
fn state_near_y0(pb: &ProblemSpec, seed: u64) -> Vec<f64> {
    pb.y0()
        .iter()
        .zip(pseudo(seed, pb.state_dim()))
        .map(|(y, r)| y + 0.1 * r)
        .collect()
}

#[test]
fn lotka_volterra_rhs_example() {
    let f = lv().f_eval(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
    assert_relative_eq!(f[0], 0.095, epsilon = 1e-14);
    assert_relative_eq!(f[1], -0.18, epsilon = 1e-14);
}

#[test]
fn pendulum_rhs_examples() {
    let pb = pendulum();
    assert_eq!(pb.f_eval(&[0.0, 0.0], &[0.0]).unwrap(), vec![0.0, 0.0]);
    let f = pb.f_eval(&[-1.0, 0.0], &[0.0]).unwrap();
    assert_eq!(f[0], 0.0);
    assert_relative_eq!(f[1], 1f64.sin(), epsilon = 1e-15);
}

#[test]
fn pendulum_state_jacobian_example() {
    let jz = pendulum().f_jac_y_apply(&[-1.0, 0.0], &[0.0], &[1.0, 0.0]);
    assert_eq!(jz[0], 0.0);
    assert_relative_eq!(jz[1], -(1f64.cos()), epsilon = 1e-15);
}

#[test]
fn lotka_volterra_control_jacobian_example() {
    let pb = lv();
    let e1 = pb.f_jac_u_apply(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 0.0]);
    let e2 = pb.f_jac_u_apply(&[1.0, 2.0], &[0.0, 0.0], &[0.0, 1.0]);
    assert_relative_eq!(e1[0], 0.95, epsilon = 1e-14);
    assert_relative_eq!(e2[1], 1.8, epsilon = 1e-14);
    assert_eq!((e1[1], e2[0]), (0.0, 0.0));
}

#[test]
fn running_cost_examples() {
    let pb = lv();
    assert_eq!(pb.running_cost(&[1.0, 2.0], &[0.0, 0.0]), 0.0);
    let (gy, gu) = pb.running_cost_grads(&[1.0, 2.0], &[0.0, 0.0]);
    assert_eq!((gy, gu), (vec![0.0, 0.0], vec![0.0, 0.0]));

    let params = LotkaVolterraParams {
        alpha: 10.0,
        ..LotkaVolterraParams::default()
    };
    let pb = make_lotka_volterra(params).unwrap();
    assert_relative_eq!(pb.running_cost(&[1.0, 2.0], &[1.0, 1.0]), -10.0, epsilon = 1e-14);
    let (_, gu) = pb.running_cost_grads(&[1.0, 2.0], &[1.0, 1.0]);
    assert_eq!(gu, vec![-10.0, -10.0]);
}

#[test]
fn burgers_running_cost_uses_omega_mass() {
    let pb = burgers_small();
    let u = pseudo(3, pb.control_dim());
    let mc = pb.model().control_mass().apply_vec(&u);
    let alpha = BurgersParams::default().alpha;
    assert_relative_eq!(
        pb.running_cost(pb.y0(), &u),
        -0.5 * alpha * dot(&u, &mc),
        max_relative = 1e-13
    );
}

#[test]
fn intermediate_and_terminal_cost_examples() {
    let pb = lv();
    let y = [0.7, 1.3];
    assert_eq!(pb.phi1_eval(&y), 1.3);
    assert_eq!(pb.phi1_grad(&y), vec![0.0, 1.0]);
    assert_eq!(pb.phi1_hess_apply(&y, &[0.4, -2.0]), vec![0.0, 0.0]);
    assert_eq!(pb.phi2_eval(&y), 0.0);

    let pb = lv_terminal();
    assert_eq!(pb.phi2_eval(&[1.0, 3.0]), 0.0);
    assert_eq!(pb.phi2_grad(&[1.0, 3.0]), vec![0.0, 0.0]);
}

#[test]
fn burgers_observation_gradient_is_mass_weighted() {
    let params = BurgersParams {
        n_dof: 21,
        ..BurgersParams::default()
    };
    let disc = BurgersDiscretization::new(params).unwrap();
    let md = freetime::linalg::Matrix::Tridiagonal(disc.observation_mass.clone());
    let pb = make_burgers(disc).unwrap();
    let y = state_near_y0(&pb, 5);
    let z = pseudo(6, pb.state_dim());
    let phi = pb.model().intermediate_cost();
    assert!(rel_vec(&phi.gradient(&y), &md.apply_vec(&y)) < 1e-14);
    assert!(rel_vec(&phi.hessian_apply(&y, &z), &md.apply_vec(&z)) < 1e-14);
    assert_relative_eq!(phi.value(&y), 0.5 * dot(&y, &md.apply_vec(&y)), max_relative = 1e-14);
}

#[test]
fn cost_gradients_match_central_differences() {
    let eps = 1e-5;
    for pb in all_models() {
        let n = pb.state_dim();
        let m = pb.control_dim();
        let y = state_near_y0(&pb, 11);
        let u: Vec<f64> = pseudo(12, m).iter().map(|v| 0.1 * v).collect();
        let dy = pseudo(13, n);
        let du = pseudo(14, m);
        let shift = |x: &[f64], d: &[f64], e: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + e * b).collect() };

        let (ly, lu) = pb.running_cost_grads(&y, &u);
        let fd = (pb.running_cost(&shift(&y, &dy, eps), &shift(&u, &du, eps))
            - pb.running_cost(&shift(&y, &dy, -eps), &shift(&u, &du, -eps)))
            / (2.0 * eps);
        let exact = dot(&ly, &dy) + dot(&lu, &du);
        assert!(
            rel(fd, exact) <= 1e-6,
            "{}: running cost {fd} vs {exact}",
            pb.model().name()
        );

        let phis = [Some(pb.model().intermediate_cost()), pb.model().terminal_cost()];
        for phi in phis.into_iter().flatten() {
            let fd = (phi.value(&shift(&y, &dy, eps)) - phi.value(&shift(&y, &dy, -eps))) / (2.0 * eps);
            let exact = dot(&phi.gradient(&y), &dy);
            assert!(
                rel(fd, exact) <= 1e-6,
                "{}: phi gradient {fd} vs {exact}",
                pb.model().name()
            );
            let fd: Vec<f64> = phi
                .gradient(&shift(&y, &dy, eps))
                .iter()
                .zip(phi.gradient(&shift(&y, &dy, -eps)))
                .map(|(a, b)| (a - b) / (2.0 * eps))
                .collect();
            let exact = phi.hessian_apply(&y, &dy);
            assert!(rel_vec(&fd, &exact) <= 1e-6, "{}: phi hessian", pb.model().name());
        }
    }
}

#[test]
fn second_derivative_of_hamiltonian_matches_differences() {
    let eps = 1e-5;
    // With the reference alpha the u-block of D^2 H is far below the
    // cancellation error of the difference quotient.
    let models = vec![lv(), lv_terminal(), pendulum(), burgers_with_alpha(1e-2)];
    for pb in models {
        let n = pb.state_dim();
        let m = pb.control_dim();
        let y = state_near_y0(&pb, 21);
        let u: Vec<f64> = pseudo(22, m).iter().map(|v| 0.1 * v).collect();
        let p = pseudo(23, n);
        let z = pseudo(24, n);
        let v = pseudo(25, m);
        let at = |e: f64| {
            let ye: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + e * b).collect();
            let ue: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + e * b).collect();
            pb.hamiltonian(&ye, &ue, &p).unwrap()
        };
        let (plus, minus) = (at(eps), at(-eps));
        let fd_y: Vec<f64> = plus
            .grad_y
            .iter()
            .zip(&minus.grad_y)
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        let fd_u: Vec<f64> = plus
            .grad_u
            .iter()
            .zip(&minus.grad_u)
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        let (hy, hu) = pb.f_hess_apply(&y, &u, &p, &z, &v);
        assert!(rel_vec(&fd_y, &hy) <= 1e-6, "{}: H_yy z + H_yu v", pb.model().name());
        assert!(rel_vec(&fd_u, &hu) <= 1e-6, "{}: H_uy z + H_uu v", pb.model().name());
    }
}

#[test]
fn linear_quadratic_hessian_is_control_only() {
    let pb = freetime::models::make_scalar_linear(&Default::default()).unwrap();
    let (hy, hu) = pb.f_hess_apply(&[0.3], &[0.2], &[1.5], &[0.7], &[2.0]);
    assert_eq!(hy, vec![0.0]);
    assert_eq!(hu, vec![-2.0]);
    assert_eq!(pb.f_jac_y_apply(&[5.0], &[-4.0], &[3.0]), vec![-3.0]);
    assert_eq!(pb.f_jac_u_apply(&[5.0], &[-4.0], &[3.0]), vec![3.0]);
}

fn model_for(index: usize) -> ProblemSpec {
    all_models().swap_remove(index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn state_jacobian_adjoint_identity(index in 0usize..4, seed in any::<u64>()) {
        let pb = model_for(index);
        let (n, m) = (pb.state_dim(), pb.control_dim());
        let y = state_near_y0(&pb, seed);
        let u = pseudo(seed ^ 1, m);
        let z = pseudo(seed ^ 2, n);
        let q = pseudo(seed ^ 3, n);
        let lhs = pb.state_inner(&pb.f_jac_y_apply(&y, &u, &z), &q);
        let rhs = pb.state_inner(&z, &pb.f_jac_y_adjoint_apply(&y, &u, &q));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn control_jacobian_adjoint_identity(index in 0usize..4, seed in any::<u64>()) {
        let pb = model_for(index);
        let (n, m) = (pb.state_dim(), pb.control_dim());
        let y = state_near_y0(&pb, seed);
        let u = pseudo(seed ^ 1, m);
        let v = pseudo(seed ^ 2, m);
        let q = pseudo(seed ^ 3, n);
        let lhs = pb.state_inner(&pb.f_jac_u_apply(&y, &u, &v), &q);
        let rhs = pb.control_inner(&v, &pb.f_jac_u_adjoint_apply(&y, &u, &q));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn hamiltonian_second_derivative_is_symmetric(index in 0usize..4, seed in any::<u64>()) {
        let pb = model_for(index);
        let (n, m) = (pb.state_dim(), pb.control_dim());
        let y = state_near_y0(&pb, seed);
        let u = pseudo(seed ^ 1, m);
        let p = pseudo(seed ^ 2, n);
        let (z, v) = (pseudo(seed ^ 3, n), pseudo(seed ^ 4, m));
        let (zh, vh) = (pseudo(seed ^ 5, n), pseudo(seed ^ 6, m));
        let (ay, au) = pb.f_hess_apply(&y, &u, &p, &zh, &vh);
        let (by, bu) = pb.f_hess_apply(&y, &u, &p, &z, &v);
        let lhs = dot(&z, &ay) + dot(&v, &au);
        let rhs = dot(&zh, &by) + dot(&vh, &bu);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn hamiltonian_is_reassembled_from_parts(index in 0usize..4, seed in any::<u64>()) {
        let pb = model_for(index);
        let (n, m) = (pb.state_dim(), pb.control_dim());
        let y = state_near_y0(&pb, seed);
        let u: Vec<f64> = pseudo(seed ^ 1, m).iter().map(|x| 0.1 * x).collect();
        let p = pseudo(seed ^ 2, n);
        let h = pb.hamiltonian(&y, &u, &p).unwrap();
        let parts = pb.running_cost(&y, &u) + pb.state_inner(&p, &pb.f_eval(&y, &u).unwrap());
        prop_assert!((h.value - parts).abs() <= 1e-12 * parts.abs().max(1.0));
    }
}
