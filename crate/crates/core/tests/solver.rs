mod common;

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use robeam::model::{self, Beamformer, ChannelVector, RobustInstance};
use robeam::solver::{
    beta, extract_beamformer, lambda_max_2d, outer_product, reduced_dual, solve_closed_form,
    solve_dual_sdp, solve_grid_oracle, solve_nonrobust, verify_kkt, SolverPath,
};
use robeam::{Complex64, Error, RandomStream};

use common::{phase_distance, random_instance, random_unitary, rel_diff, DIMS};

fn orthogonal(eps: f64, rate: f64) -> RobustInstance {
    RobustInstance::new(
        ChannelVector::from_real(&[2.0, 0.0]).unwrap(),
        ChannelVector::from_real(&[0.0, 2.0]).unwrap(),
        10.0,
        1.0,
        rate,
        eps,
    )
    .unwrap()
}

/// 1-D grid over the power split `x² + y² = 10` of the orthogonal example.
/// Independent of the solver's plane decomposition.
fn orthogonal_split_oracle(x_min: f64, eps: f64) -> f64 {
    let p: f64 = 10.0;
    let steps = 200_000;
    (0..=steps)
        .map(|k| {
            let x = x_min + (p.sqrt() - x_min) * k as f64 / steps as f64;
            let y = (p - x * x).max(0.0).sqrt();
            let amp = (2.0 * y - eps * p.sqrt()).max(0.0);
            amp * amp
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn dual_orthogonal_perfect_csi() {
    let inst = orthogonal(0.0, 21f64.log2());
    let sol = solve_dual_sdp(&inst).unwrap();
    let oracle = orthogonal_split_oracle(5f64.sqrt(), 0.0);
    assert_relative_eq!(oracle, 20.0, max_relative = 1e-9);
    assert_relative_eq!(sol.nominal_energy, 20.0, max_relative = 1e-12);
    assert_relative_eq!(inst.h_hat.inner(&sol.w).unwrap().norm_sqr(), 20.0, max_relative = 1e-12);
    assert_relative_eq!(sol.w.power(), 10.0, max_relative = 1e-12);
}

#[test]
fn dual_orthogonal_with_uncertainty() {
    let eps = 1.0 / 10f64.sqrt();
    let inst = orthogonal(eps, 10f64.log2());
    assert_relative_eq!(beta(&inst), 16.0, max_relative = 1e-14);
    let sol = solve_dual_sdp(&inst).unwrap();
    let expected = 25.0 - 4.0 * 6f64.sqrt();
    assert_relative_eq!(orthogonal_split_oracle(2.0, eps), expected, max_relative = 1e-8);
    assert_relative_eq!(sol.guaranteed_energy, expected, max_relative = 1e-12);
    assert_relative_eq!(inst.h_hat.inner(&sol.w).unwrap().norm(), 4.0, max_relative = 1e-12);
    // ĝ ⟂ ĥ makes Q singular at the kink of the dual
    assert_eq!(sol.path, SolverPath::ClosedForm);
    assert_relative_eq!(sol.lambda, 1.0, max_relative = 1e-12);
    assert_relative_eq!(sol.mu, 4.0, max_relative = 1e-12);
    assert!(sol.kkt_residuals.max_residual() < 1e-10);
}

#[test]
fn vacuous_constraint_gives_matched_filter() {
    let mut rng = RandomStream::from_seed(21);
    for &n in &DIMS {
        let mut inst = random_instance(&mut rng, n);
        inst.rate_target = 0.0;
        inst.epsilon = 0.0;
        for sol in [solve_dual_sdp(&inst).unwrap(), solve_closed_form(&inst).unwrap()] {
            let mf: Vec<Complex64> = inst
                .g_hat
                .entries()
                .iter()
                .map(|z| z * (10f64.sqrt() / inst.g_hat.norm()))
                .collect();
            assert!(phase_distance(sol.w.entries(), &mf) < 1e-12);
            assert_relative_eq!(sol.nominal_energy, 10.0 * inst.g_hat.norm_sqr(), max_relative = 1e-12);
            assert_eq!(sol.lambda, 0.0);
        }
    }
}

#[test]
fn closed_form_collinear_channels() {
    let g = ChannelVector::new(vec![Complex64::new(1.0, -1.0), Complex64::new(0.5, 2.0)]).unwrap();
    for rate in [0.5, 2.0, 4.0] {
        let inst = RobustInstance::new(g.clone(), g.clone(), 10.0, 1.0, rate, 0.1).unwrap();
        let sol = solve_closed_form(&inst).unwrap();
        let mf: Vec<Complex64> = g.entries().iter().map(|z| z * (10f64.sqrt() / g.norm())).collect();
        assert!(phase_distance(sol.w.entries(), &mf) < 1e-12);
        let grid = solve_grid_oracle(&inst, 1000).unwrap();
        assert_relative_eq!(grid.nominal_energy, sol.nominal_energy, max_relative = 1e-12);
    }
}

#[test]
fn closed_form_boundary_puts_all_power_on_h() {
    let inst = orthogonal(0.0, 41f64.log2());
    let sol = solve_closed_form(&inst).unwrap();
    assert!(phase_distance(sol.w.entries(), &[Complex64::new(10f64.sqrt(), 0.0), Complex64::new(0.0, 0.0)]) < 1e-7);
    // the dual has no finite minimizer here; it defers to the closed form
    let dual = solve_dual_sdp(&inst).unwrap();
    assert_eq!(dual.path, SolverPath::ClosedForm);
}

#[test]
fn dual_and_closed_form_agree_on_orthogonal_cases() {
    for (eps, rate) in [(0.0, 21f64.log2()), (1.0 / 10f64.sqrt(), 10f64.log2()), (0.2, 3.0)] {
        let inst = orthogonal(eps, rate);
        let a = solve_dual_sdp(&inst).unwrap();
        let b = solve_closed_form(&inst).unwrap();
        assert!(phase_distance(a.w.entries(), b.w.entries()) < 1e-9);
        assert!((a.guaranteed_energy - b.guaranteed_energy).abs() < 1e-9);
    }
}

#[test]
fn grid_oracle_cases() {
    let inst = orthogonal(0.0, 21f64.log2());
    let sol = solve_grid_oracle(&inst, 10_000).unwrap();
    assert!((sol.nominal_energy - 20.0).abs() < 1e-6);
    assert_eq!(sol.path, SolverPath::Grid);

    let infeasible = orthogonal(3.0, 5.0);
    assert!(matches!(solve_grid_oracle(&infeasible, 1000), Err(Error::InfeasibleInstance { .. })));
    assert!(matches!(solve_dual_sdp(&infeasible), Err(Error::InfeasibleInstance { .. })));
    assert!(matches!(solve_closed_form(&infeasible), Err(Error::InfeasibleInstance { .. })));
    assert!(matches!(solve_grid_oracle(&inst, 10), Err(Error::InvalidField { field: "resolution", .. })));
}

#[test]
fn nonrobust_is_closed_form_at_zero_radius() {
    let mut rng = RandomStream::from_seed(22);
    for &n in &DIMS {
        let inst = random_instance(&mut rng, n).with_epsilon(0.3);
        let Ok(a) = solve_nonrobust(&inst) else { continue };
        let b = solve_closed_form(&inst.with_epsilon(0.0)).unwrap();
        assert_eq!(a, b);
    }
    let a = solve_nonrobust(&orthogonal(0.2, 21f64.log2())).unwrap();
    assert_relative_eq!(a.nominal_energy, 20.0, max_relative = 1e-12);
    let a = solve_nonrobust(&orthogonal(0.2, 0.0)).unwrap();
    assert_relative_eq!(a.nominal_energy, 40.0, max_relative = 1e-12);
}

#[test]
fn zero_channel_is_rejected() {
    let inst = RobustInstance::new(
        ChannelVector::from_real(&[1.0, 0.0]).unwrap(),
        ChannelVector::from_real(&[0.0, 0.0]).unwrap(),
        10.0,
        1.0,
        1.0,
        0.0,
    )
    .unwrap();
    assert!(matches!(solve_dual_sdp(&inst), Err(Error::ZeroChannel("g_hat"))));
}

/// Dense Hermitian eigendecomposition of the full N×N matrix.
fn dense_lambda_max(g: &ChannelVector, h: &ChannelVector, lambda: f64) -> f64 {
    let n = g.len();
    let (ge, he) = (g.entries(), h.entries());
    let m = DMatrix::from_fn(n, n, |i, j| ge[i] * ge[j].conj() + he[i] * he[j].conj() * lambda);
    m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn lambda_max_matches_dense_eigensolver() {
    let mut rng = RandomStream::from_seed(23);
    for trial in 0..200 {
        let n = DIMS[trial % 4];
        let inst = random_instance(&mut rng, n);
        let lambda = 5.0 * rng.uniform();
        let got = lambda_max_2d(&inst.g_hat, &inst.h_hat, lambda).unwrap();
        let want = dense_lambda_max(&inst.g_hat, &inst.h_hat, lambda);
        assert!(rel_diff(got, want) < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn oracle_triangle() {
    let mut rng = RandomStream::from_seed(24);
    for trial in 0..120 {
        let inst = random_instance(&mut rng, DIMS[trial % 4]);
        let dual = solve_dual_sdp(&inst).unwrap();
        let cf = solve_closed_form(&inst).unwrap();
        let grid = solve_grid_oracle(&inst, 10_000).unwrap();
        assert!(rel_diff(dual.guaranteed_energy, cf.guaranteed_energy) <= 1e-6, "trial {trial}");
        assert!(rel_diff(cf.guaranteed_energy, grid.guaranteed_energy) <= 1e-3, "trial {trial}");
        assert!(phase_distance(dual.w.entries(), cf.w.entries()) <= 1e-4, "trial {trial}");
    }
}

#[test]
fn dual_path_satisfies_kkt_and_rank_one() {
    let mut rng = RandomStream::from_seed(25);
    for trial in 0..120 {
        let inst = random_instance(&mut rng, DIMS[trial % 4]);
        let sol = solve_dual_sdp(&inst).unwrap();
        assert_eq!(sol.path, SolverPath::DualSdp);
        assert!(sol.duality_gap <= 1e-7, "gap {}", sol.duality_gap);
        assert!(sol.kkt_residuals.max_residual() <= 1e-7, "{:?}", sol.kkt_residuals);
        assert!(rel_diff(sol.w.power(), inst.power) <= 1e-8);
        assert!(sol.lambda >= 0.0 && sol.mu >= 0.0);
        let (w, defect) = extract_beamformer(&outer_product(&sol.w)).unwrap();
        assert!(defect <= 1e-9, "defect {defect}");
        assert!(phase_distance(w.entries(), sol.w.entries()) < 1e-8);
        let ip = inst.g_hat.inner(&sol.w).unwrap();
        assert!(ip.re >= 0.0 && ip.im.abs() < 1e-12);
    }
}

#[test]
fn kkt_detects_perturbed_beamformer() {
    let mut rng = RandomStream::from_seed(26);
    let mut checked = 0;
    while checked < 20 {
        let inst = random_instance(&mut rng, 4);
        let mut sol = solve_dual_sdp(&inst).unwrap();
        let noise: Vec<Complex64> = (0..4).map(|_| rng.complex_normal()).collect();
        let nn = noise.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = 0.01 * sol.w.norm() / nn;
        sol.w = Beamformer::new(sol.w.entries().iter().zip(&noise).map(|(a, b)| a + b * scale).collect()).unwrap();
        assert!(verify_kkt(&inst, &sol).stationarity > 1e-4);
        checked += 1;
    }
}

#[test]
fn kkt_detects_missing_multipliers() {
    let inst = orthogonal(0.0, 21f64.log2());
    let mut sol = solve_closed_form(&inst).unwrap();
    assert!(sol.lambda > 0.0);
    sol.lambda = 0.0;
    sol.mu = 0.0;
    let rep = verify_kkt(&inst, &sol);
    assert!(rep.dual_feas > 1.0);
    assert!(rep.stationarity > 1.0);

    // λ > 0 on a slack rate constraint breaks complementary slackness
    let inst = RobustInstance {
        g_hat: ChannelVector::from_real(&[2.0, 0.0]).unwrap(),
        ..orthogonal(0.0, 1.0)
    };
    let mut sol = solve_closed_form(&inst).unwrap();
    assert_eq!(sol.lambda, 0.0);
    sol.lambda = 1.0;
    assert!(verify_kkt(&inst, &sol).comp_slack_rate > 1.0);
}

#[test]
fn reduced_dual_is_convex() {
    let mut rng = RandomStream::from_seed(27);
    for trial in 0..200 {
        let inst = random_instance(&mut rng, DIMS[trial % 4]);
        let a = 10.0 * rng.uniform();
        let b = a + 10.0 * rng.uniform();
        let mid = reduced_dual(&inst, 0.5 * (a + b));
        assert!(mid <= 0.5 * (reduced_dual(&inst, a) + reduced_dual(&inst, b)) + 1e-10);
    }
}

#[test]
fn unitary_equivariance() {
    let mut rng = RandomStream::from_seed(28);
    for trial in 0..40 {
        let n = DIMS[trial % 4];
        let inst = random_instance(&mut rng, n);
        let u = random_unitary(&mut rng, n);
        let rotated = RobustInstance {
            h_hat: ChannelVector::new(common::apply(&u, inst.h_hat.entries())).unwrap(),
            g_hat: ChannelVector::new(common::apply(&u, inst.g_hat.entries())).unwrap(),
            ..inst.clone()
        };
        let a = solve_dual_sdp(&inst).unwrap();
        let b = solve_dual_sdp(&rotated).unwrap();
        let uw = common::apply(&u, a.w.entries());
        assert!(phase_distance(b.w.entries(), &uw) < 1e-6);
        assert!((a.guaranteed_energy - b.guaranteed_energy).abs() <= 1e-9 * a.guaranteed_energy.max(1.0));
    }
}

#[test]
fn guaranteed_energy_monotone_in_rate_and_radius() {
    let mut rng = RandomStream::from_seed(29);
    for trial in 0..40 {
        let base = random_instance(&mut rng, DIMS[trial % 4]);
        let r_top = {
            let amp = base.power.sqrt() * (base.h_hat.norm() - 0.5);
            (1.0 + amp * amp).log2()
        };
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let inst = RobustInstance { rate_target: r_top * k as f64 / 20.0, epsilon: 0.5, ..base.clone() };
            let e = solve_dual_sdp(&inst).unwrap().guaranteed_energy;
            assert!(e <= prev + 1e-9 * prev.min(1e6).max(1.0));
            prev = e;
        }
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let inst = RobustInstance { rate_target: 0.8 * r_top, epsilon: 0.5 * k as f64 / 19.0, ..base.clone() };
            let e = solve_dual_sdp(&inst).unwrap().guaranteed_energy;
            assert!(e <= prev + 1e-9 * prev.min(1e6).max(1.0));
            prev = e;
        }
    }
}

#[test]
fn robust_design_survives_its_own_worst_case() {
    let mut rng = RandomStream::from_seed(30);
    for trial in 0..50 {
        let inst = random_instance(&mut rng, DIMS[trial % 4]);
        let sol = solve_dual_sdp(&inst).unwrap();
        let rep = robeam::worstcase::adversarial_check(&inst, &sol.w, 200, &mut rng).unwrap();
        assert!(!rep.rate_outage, "{rep:?}");
        assert!(!rep.energy_bound_violated);
        assert!(rep.min_energy >= sol.guaranteed_energy - 1e-9);
        assert!(model::achieved_rate(&inst.h_hat, &sol.w, inst.sigma2).unwrap() >= inst.rate_target - 1e-9);
    }
}
