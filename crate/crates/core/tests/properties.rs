use proptest::prelude::*;

use jmlift::dynamics::{
    integrate, jm_geodesic, poisson_bracket, reparameterize, AngularMomentumZ, ClockRate, Direction,
    HamiltonianSystem, IntegratorConfig, OrbitalElements, Parameter, PhaseState, Trajectory,
};
use jmlift::geometry::{
    christoffel, gaussian_curvature, jm_lift, jm_lift_scaled, kepler_curvature, ConformalMetric, SystemSpec,
};
use jmlift::invariants::{evaluate_all, quadratic_invariant_transfer};
use jmlift::transforms::{
    bohlin_forward, bohlin_identity_residual, houri_swap, kepler_level, milnor_invert,
};
use jmlift::{vector, Matrix, Vector};

fn central_gradient(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    Vector::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

fn planar() -> impl Strategy<Value = Vector> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| vector(&[a, b]))
}

fn spatial() -> impl Strategy<Value = Vector> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| vector(&[a, b, c]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bohlin_identity_holds(q in planar(), p in planar()) {
        prop_assume!(q.norm() > 1e-2);
        prop_assert!(bohlin_identity_residual(&q, &p).unwrap() < 1e-13);
    }

    #[test]
    fn bohlin_is_two_to_one(q in planar(), p in planar()) {
        prop_assume!(q.norm() > 1e-2);
        let a = bohlin_forward(&q, &p).unwrap();
        let b = bohlin_forward(&-&q, &-&p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bohlin_level_is_rescaled_oscillator(q in planar(), p in planar(), a in 0.1..3.0f64, b in 0.1..3.0f64) {
        prop_assume!(q.norm() > 1e-1);
        let osc = SystemSpec::hooke(a, b, 0.0, 2).unwrap();
        let expected = 2.0 * osc.hamiltonian(&q, &p) / q.norm_squared();
        let got = kepler_level(&osc, &q, &p).unwrap();
        prop_assert!((got - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn houri_swap_is_an_involution(x in spatial(), p in spatial()) {
        let s = PhaseState::from_vectors(x, p).unwrap();
        prop_assert_eq!(houri_swap(&houri_swap(&s)), s);
    }

    #[test]
    fn milnor_inversion_is_an_involution(p in spatial()) {
        prop_assume!(p.norm() > 1e-3);
        let back = milnor_invert(&milnor_invert(&p).unwrap()).unwrap();
        prop_assert!((back - &p).amax() < 1e-13 * p.amax().max(1.0));
    }

    #[test]
    fn hamiltonian_gradients_match_differences(x in spatial(), p in spatial(), which in 0usize..6) {
        prop_assume!(x.norm() > 0.3 && p.norm() > 0.3);
        let kepler = SystemSpec::kepler(1.0, 0.5, 3).unwrap();
        let sys = match which {
            0 => HamiltonianSystem::Natural(kepler),
            1 => HamiltonianSystem::Jacobi(SystemSpec::hooke(1.0, 0.0, 9.0, 3).unwrap()),
            2 => HamiltonianSystem::TimeRescaled { spec: kepler, clock: ClockRate::LeviCivita },
            3 => HamiltonianSystem::HouriInverted { k: 0.7 },
            4 => HamiltonianSystem::Moser { beta: 1.0, energy: -0.5 },
            _ => HamiltonianSystem::RegularizedG { mu: 1.0, epsilon: 1.0 },
        };
        let (dx, dp) = sys.gradients(&x, &p).unwrap();
        let fx = central_gradient(|y| sys.value(y, &p).unwrap(), &x, 1e-6);
        let fp = central_gradient(|q| sys.value(&x, q).unwrap(), &p, 1e-6);
        let scale = 1.0 + dx.amax().max(dp.amax());
        prop_assert!((dx - fx).amax() < 1e-6 * scale);
        prop_assert!((dp - fp).amax() < 1e-6 * scale);
    }

    #[test]
    fn christoffel_matches_metric_differences(x in spatial(), energy in -0.4..2.0f64) {
        let spec = SystemSpec::kepler(1.0, energy, 3).unwrap();
        prop_assume!(x.norm() > 0.2 && spec.hill_margin(&x).map_or(false, |m| m > 0.05));
        let g = jm_lift(&spec, &ConformalMetric::cartesian(3)).unwrap();
        let gamma = christoffel(&g, &x).unwrap();
        let ginv = g.inverse(&x).unwrap();
        let h = 1e-5;
        let dg: Vec<Matrix> = (0..3).map(|m| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[m] += h;
            xm[m] -= h;
            (g.components(&xp).unwrap() - g.components(&xm).unwrap()) / (2.0 * h)
        }).collect();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let fd: f64 = (0..3)
                        .map(|l| 0.5 * ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]))
                        .sum();
                    prop_assert!((gamma.get(i, j, k) - fd).abs() < 1e-6 * gamma.max_abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn curvature_closed_form_matches_general_formula(r in 0.05..5.0f64, energy in -2.0..2.0f64, alpha in 0.2..3.0f64) {
        prop_assume!(r * energy + alpha > 0.05);
        let spec = SystemSpec::kepler(alpha, energy, 2).unwrap();
        let metric = jm_lift_scaled(&spec, &ConformalMetric::polar(), 1.0).unwrap();
        let general = gaussian_curvature(&metric, r).unwrap();
        let closed = kepler_curvature(alpha, energy, r);
        prop_assert!((general - closed).abs() <= 1e-10 * closed.abs().max(1e-12));
        prop_assert_eq!(closed > 0.0, energy < 0.0);
        // the Jacobi normalisation divides the curvature by 2m
        let jacobi = jm_lift(&spec, &ConformalMetric::polar()).unwrap();
        prop_assert!((2.0 * gaussian_curvature(&jacobi, r).unwrap() - closed).abs() <= 1e-10 * closed.abs().max(1e-12));
    }

    #[test]
    fn central_forces_commute_with_angular_momentum(x in planar(), p in planar()) {
        prop_assume!(x.norm() > 0.3);
        let s = PhaseState::from_vectors(x, p).unwrap();
        let h = HamiltonianSystem::Natural(SystemSpec::kepler(1.0, -0.5, 2).unwrap());
        prop_assert!(poisson_bracket(&h, &AngularMomentumZ, &s).unwrap().abs() < 1e-6);
    }
}

#[test]
fn reparameterization_round_trip() {
    let (spec, s0) = OrbitalElements::new(1.0, 0.6).initial_state(1.0, 1.0, 2).unwrap();
    let geodesic = jm_geodesic(&spec, &s0, (0.0, 1.0), &IntegratorConfig::implicit_midpoint(1e-3)).unwrap();
    let samples: Vec<PhaseState> = geodesic.samples.iter().map(|s| PhaseState { sigma: None, ..s.clone() }).collect();
    let times = geodesic.times().unwrap();
    let timed = Trajectory::from_samples(samples, times, Parameter::Time).unwrap();
    let back = reparameterize(&timed, &ClockRate::Maupertuis(spec), Direction::TimeToSigma).unwrap();
    for (a, b) in back.sigmas().unwrap().iter().zip(&geodesic.param) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn quadratic_invariants_lift_to_the_geodesic() {
    // H = |p|²/2m + U is quadratic with K² = δ/2m and K⁰ = U
    let (spec, s0) = OrbitalElements::new(1.0, 0.5).initial_state(1.0, 1.0, 2).unwrap();
    let geodesic = jm_geodesic(&spec, &s0, (0.0, 1.0), &IntegratorConfig::implicit_midpoint(1e-4)).unwrap();
    let dev = quadratic_invariant_transfer(
        &spec,
        |_| Matrix::identity(2, 2) * 0.5,
        |x| spec.potential.value(x),
        &geodesic,
    )
    .unwrap();
    assert!(dev < 1e-8, "{dev}");
}

#[test]
fn drift_shrinks_under_refinement() {
    let (spec, s0) = OrbitalElements::new(1.0, 0.5).initial_state(1.0, 1.0, 2).unwrap();
    let drift = |h: f64| {
        let traj = integrate(&HamiltonianSystem::Natural(spec), &s0, (0.0, 6.0), &IntegratorConfig::rk4(h)).unwrap();
        evaluate_all(&spec, &traj).unwrap().drift("H").unwrap().max_drift
    };
    assert!(drift(5e-3) < drift(1e-2));
}
