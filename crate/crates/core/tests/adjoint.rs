mod common;

use proptest::prelude::*;

use common::{decay, max_abs_diff, tau, zero_dynamics};
use freetime::adjoint::{adjoint_solve, k_star_apply};
use freetime::forward::forward_solve;
use freetime::models::{make_lotka_volterra, LotkaVolterraParams};
use freetime::verification::{duality_gaps, SmoothField};
use freetime::{ControlGrid, SGrid, Side, SplitValues};

#[test]
fn linear_intermediate_cost_gives_piecewise_constant_adjoint() {
    let g = vec![0.6, -2.5];
    let pb = zero_dynamics(0.0, g.clone(), 4.0);
    let grid = SGrid::new(20).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, _| s);
    let tp = tau(&pb, 0.35);
    let y = forward_solve(&pb, &u, tp).unwrap();
    let p = adjoint_solve(&pb, &u, tp, &y).unwrap();
    let k = grid.mid();
    for i in 0..grid.n_nodes() {
        if i >= k {
            assert_eq!(p.at(i, Side::Right), &[0.0, 0.0], "node {i}");
        }
        if i <= k {
            assert_eq!(p.at(i, Side::Left), g.as_slice(), "node {i}");
        }
    }
}

#[test]
fn zero_data_gives_zero_adjoint() {
    let pb = zero_dynamics(0.0, vec![0.0, 0.0], 2.0);
    let grid = SGrid::new(10).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, _| s * s);
    let tp = tau(&pb, 0.5);
    let y = forward_solve(&pb, &u, tp).unwrap();
    let p = adjoint_solve(&pb, &u, tp, &y).unwrap();
    assert!(p.as_slice().iter().all(|v| *v == 0.0));

    let pb = decay(2.0, 1.0);
    let u = ControlGrid::from_fn(grid, 1, |_, s, _| s.cos());
    let y = forward_solve(&pb, &u, tp).unwrap();
    let q = k_star_apply(&pb, &u, tp, &y, &[0.0], &[0.0], &SplitValues::zeros(grid, 1)).unwrap();
    assert!(q.as_slice().iter().all(|v| *v == 0.0));
}

#[test]
fn jump_and_terminal_conditions_hold() {
    let pb = make_lotka_volterra(LotkaVolterraParams::with_terminal_penalty()).unwrap();
    let grid = SGrid::new(600).unwrap();
    let u = ControlGrid::from_fn(grid, 2, |_, s, c| 0.05 * (s + c as f64).sin());
    let tp = tau(&pb, 0.45);
    let y = forward_solve(&pb, &u, tp).unwrap();
    let p = adjoint_solve(&pb, &u, tp, &y).unwrap();
    let n = grid.n_steps();
    assert_eq!(p.at(n, Side::Right), pb.phi2_grad(y.node(n)).as_slice());
    assert_ne!(pb.phi2_grad(y.node(n)), vec![0.0, 0.0]);
    let residual: Vec<f64> = p
        .jump()
        .iter()
        .zip(pb.phi1_grad(y.node(grid.mid())))
        .map(|(j, d)| j + d)
        .collect();
    assert!(residual.iter().all(|r| r.abs() <= 1e-14), "{residual:?}");
}

#[test]
fn adjoint_solve_is_k_star_with_cost_data() {
    let pb = make_lotka_volterra(LotkaVolterraParams::with_terminal_penalty()).unwrap();
    let grid = SGrid::new(300).unwrap();
    let u = ControlGrid::from_fn(grid, 2, |_, s, c| 0.08 * (2.0 * s - c as f64).cos());
    let tp = tau(&pb, 0.6);
    let y = forward_solve(&pb, &u, tp).unwrap();
    let a = pb.phi1_grad(y.node(grid.mid()));
    let b = pb.phi2_grad(y.node(grid.n_steps()));
    // l_y vanishes for this model; the source is pi_dot l_y = 0.
    let w = SplitValues::from_fn(grid, 2, |i, side, c| {
        tp.pi_dot_side(side) * pb.running_cost_grads(y.node(i), u.node(i)).0[c]
    });
    let q = k_star_apply(&pb, &u, tp, &y, &a, &b, &w).unwrap();
    let p = adjoint_solve(&pb, &u, tp, &y).unwrap();
    assert!(max_abs_diff(q.as_slice(), p.as_slice()) <= 1e-13);
}

#[test]
fn duality_gap_is_second_order_on_the_scalar_model() {
    let pb = decay(2.0, 1.0);
    let control = |s: f64, _: usize| 0.5 * s.sin();
    let gaps = duality_gaps(&pb, tau(&pb, 0.4), &control, &[200, 400, 800], 7).unwrap();
    for w in gaps.windows(2) {
        let r = w[0] / w[1];
        assert!((3.5..=4.5).contains(&r), "gaps {gaps:?}");
    }
    assert!(gaps[1] <= 10.0 / 400f64.powi(2), "gap at N = 400: {}", gaps[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn k_star_superposition(
        a in prop::array::uniform2(-1.0f64..1.0),
        b in prop::array::uniform2(-1.0f64..1.0),
        c in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let pb = make_lotka_volterra(LotkaVolterraParams::default()).unwrap();
        let grid = SGrid::new(60).unwrap();
        let u = ControlGrid::from_fn(grid, 2, |_, s, k| 0.05 * (s * (k + 1) as f64).sin());
        let tp = tau(&pb, 0.5);
        let y = forward_solve(&pb, &u, tp).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let w = SmoothField::random(&mut rng, 2, 1.0).on_split_grid(grid);
        let w2 = SmoothField::random(&mut rng, 2, 1.0).on_split_grid(grid);
        let (a2, b2) = ([0.3, -0.7], [0.9, 0.1]);

        let q1 = k_star_apply(&pb, &u, tp, &y, &a, &b, &w).unwrap();
        let q2 = k_star_apply(&pb, &u, tp, &y, &a2, &b2, &w2).unwrap();
        let comb = |x: &[f64], z: &[f64]| -> Vec<f64> { x.iter().zip(z).map(|(p, q)| p + c * q).collect() };
        let wc = SplitValues::from_rows(grid, 2, |r, out| out.copy_from_slice(&comb(w.row_values(r), w2.row_values(r))));
        let qc = k_star_apply(&pb, &u, tp, &y, &comb(&a, &a2), &comb(&b, &b2), &wc).unwrap();
        let expected = comb(q1.as_slice(), q2.as_slice());
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(qc.as_slice(), &expected) <= 1e-12 * scale);
    }
}
