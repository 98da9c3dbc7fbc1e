mod common;

use std::f64::consts::PI;

use common::{expm_oracle, random_state, rel_err, rng};
use fcns_core::diagnostics::NormTrajectory;
use fcns_core::harness::fit_power_law;
use fcns_core::linear::{
    compressible_eigen, evolve_linear, lower_bound_constant, mode_propagator, r2_norm_trajectory,
    Mat3, ModeSymbol, RadialProfile,
};
use fcns_core::{Error, Grid, PhysParams, State};
use num_complex::Complex64;
use rand::Rng;

fn random_params(r: &mut impl Rng) -> PhysParams {
    PhysParams::new(r.random_range(0.5..1.0), r.random_range(1.0..5.0)).unwrap()
}

#[test]
fn eigenvalue_examples() {
    let p = PhysParams::new(0.5, 1.0).unwrap();
    let (a, b) = compressible_eigen(0.0, &p);
    assert_eq!((a, b), (Complex64::default(), Complex64::default()));
    let (a, b) = compressible_eigen(1.0, &p);
    let h = 3f64.sqrt() / 2.0;
    assert!((a - Complex64::new(-0.5, -h)).norm() < 1e-15);
    assert!((b - Complex64::new(-0.5, h)).norm() < 1e-15);

    let p = PhysParams::new(0.75, 1.0).unwrap();
    let (a, b) = compressible_eigen(16.0, &p);
    let s = 32.0 * 3f64.sqrt();
    assert!(rel_err(a.re, (-64.0 + s) / 2.0) < 1e-13 && a.im == 0.0);
    assert!(rel_err(b.re, (-64.0 - s) / 2.0) < 1e-13 && b.im == 0.0);
}

#[test]
fn eigenvalues_decay_and_oscillate_at_half_rate() {
    let mut r = rng(21);
    let mut oscillatory = 0;
    while oscillatory < 100 {
        let p = random_params(&mut r);
        let rho: f64 = r.random_range(1e-3..50.0);
        let d = rho.powf(2.0 * p.beta());
        let (a, b) = compressible_eigen(rho, &p);
        assert!(a.re.max(b.re) < 0.0);
        if d * d < 4.0 * p.gamma() * rho * rho {
            assert_eq!(a.re, -d / 2.0);
            assert_eq!(b.re, -d / 2.0);
            oscillatory += 1;
        }
    }
}

#[test]
fn propagator_matches_expm_oracle() {
    let mut r = rng(22);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut r);
        let rho: f64 = 10f64.powf(r.random_range(-2.0..1.0));
        let angle: f64 = r.random_range(0.0..2.0 * PI);
        let xi = [rho * angle.cos(), rho * angle.sin()];
        let t = r.random_range(0.0..10.0);
        let got = mode_propagator(xi, t, &p).unwrap();
        let want = expm_oracle(&ModeSymbol { xi, params: p }.matrix(), t);
        worst = worst.max(got.max_abs_diff(&want));
    }
    assert!(worst <= 1e-10, "worst entry error {worst}");
}

#[test]
fn propagator_semigroup_and_special_cases() {
    let mut r = rng(23);
    for _ in 0..200 {
        let p = random_params(&mut r);
        let xi = [r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)];
        let (t1, t2) = (r.random_range(0.0..3.0), r.random_range(0.0..3.0));
        let lhs = mode_propagator(xi, t1, &p)
            .unwrap()
            .mul(&mode_propagator(xi, t2, &p).unwrap());
        let rhs = mode_propagator(xi, t1 + t2, &p).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-11);
    }
    let p = PhysParams::new(0.6, 2.0).unwrap();
    for t in [0.0, 1.0, 1e6] {
        assert_eq!(
            mode_propagator([0.0, 0.0], t, &p).unwrap(),
            Mat3::identity()
        );
    }
    // Divergence-free data decays by the heat factor alone.
    let xi = [0.3, -1.2];
    let t = 2.5;
    let v = [
        Complex64::default(),
        Complex64::new(1.2, 0.4),
        Complex64::new(0.3, 0.1),
    ];
    let out = mode_propagator(xi, t, &p).unwrap().apply(v);
    let decay = (-(xi[0].hypot(xi[1])).powf(1.2) * t).exp();
    for k in 0..3 {
        assert!((out[k] - v[k] * decay).norm() <= 1e-15);
    }
    // Every entry dies out for xi != 0.
    let late = mode_propagator([0.2, 0.1], 5e3, &p).unwrap();
    assert!(late.max_abs_diff(&Mat3([[Complex64::default(); 3]; 3])) < 1e-12);
    assert!(matches!(
        mode_propagator(xi, -1.0, &p),
        Err(Error::NegativeTime(_))
    ));
}

#[test]
fn per_mode_energy_identity() {
    let mut r = rng(24);
    let h = 1e-3;
    for _ in 0..20 {
        let p = random_params(&mut r);
        let xi = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let v0 =
            [0, 1, 2].map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let t = r.random_range(0.5..3.0);
        let energy = |s: f64| {
            let v = mode_propagator(xi, s, &p).unwrap().apply(v0);
            p.gamma() * v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()
        };
        let v = mode_propagator(xi, t, &p).unwrap().apply(v0);
        let d = xi[0].hypot(xi[1]).powf(2.0 * p.beta());
        let dissipation = 2.0 * d * (v[1].norm_sqr() + v[2].norm_sqr());
        // Fourth-order central difference.
        let de = (8.0 * (energy(t + h) - energy(t - h))
            - (energy(t + 2.0 * h) - energy(t - 2.0 * h)))
            / (12.0 * h);
        assert!(
            (de + dissipation).abs() <= 1e-8 * (1.0 + dissipation),
            "{}",
            de + dissipation
        );
    }
}

#[test]
fn evolve_linear_semigroup_and_consistency() {
    let g = Grid::new(32, 9.0).unwrap();
    let p = PhysParams::new(0.7, 1.5).unwrap();
    assert!(evolve_linear(&State::zeros(&g), 3.0, &p).unwrap().is_zero());
    let s = random_state(&g, &mut rng(25), 1.0);
    let two = evolve_linear(&evolve_linear(&s, 0.4, &p).unwrap(), 0.9, &p).unwrap();
    let one = evolve_linear(&s, 1.3, &p).unwrap();
    let diff = two.try_sub(&one).unwrap().l2_energy().sqrt();
    assert!(diff <= 1e-11 * one.l2_energy().sqrt());

    // Off the Nyquist lines the field update is the per-mode propagator.
    for (i, j) in [(1, 0), (3, 5), (30, 17), (12, 25)] {
        let xi = g.xi(i, j);
        let m = mode_propagator(xi, 1.3, &p).unwrap();
        let v = m.apply([
            s.a.coeffs()[[i, j]],
            s.u[0].coeffs()[[i, j]],
            s.u[1].coeffs()[[i, j]],
        ]);
        let got = [
            one.a.coeffs()[[i, j]],
            one.u[0].coeffs()[[i, j]],
            one.u[1].coeffs()[[i, j]],
        ];
        for k in 0..3 {
            assert!((got[k] - v[k]).norm() <= 1e-14);
        }
    }
    assert!(one.hermitian_defect() < 1e-14);
}

/// Dense composite Simpson rule in the radius on a truncated interval.
fn simpson(f: impl Fn(f64) -> f64, b: f64, m: usize) -> f64 {
    let h = b / m as f64;
    let inner: f64 = (1..m)
        .map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h))
        .sum();
    h / 3.0 * (f(0.0) + f(b) + inner)
}

#[test]
fn radial_norm_oracles() {
    let p = PhysParams::new(0.5, 1.0).unwrap();
    let prof = RadialProfile::gaussian_density(1.0, 1.0);
    let v = r2_norm_trajectory(&prof, 0.0, &[0.0], &p).unwrap();
    assert!(rel_err(v[0], PI) <= 1e-12);

    for (beta, s1) in [(0.5, 0.0), (0.75, 1.0), (0.9, 0.5)] {
        let p = PhysParams::new(beta, 2.0).unwrap();
        let sigma = 1.5;
        let prof = RadialProfile::gaussian_incompressible(0.8, sigma);
        let times = [0.0, 0.5, 3.0, 20.0];
        let got = r2_norm_trajectory(&prof, s1, &times, &p).unwrap();
        for (t, g) in times.iter().zip(&got) {
            let want = 2.0
                * PI
                * simpson(
                    |r| {
                        let u = 0.8 * (-0.5 * sigma * sigma * r * r).exp();
                        r.powf(2.0 * s1 + 1.0) * u * u * (-2.0 * r.powf(2.0 * beta) * t).exp()
                    },
                    6.0,
                    200_000,
                );
            assert!(
                rel_err(*g, want) <= 1e-8,
                "beta {beta} t {t}: {g} vs {want}"
            );
        }
    }
    assert!(matches!(
        r2_norm_trajectory(&prof, 0.0, &[-1.0], &p),
        Err(Error::NegativeTime(_))
    ));
}

#[test]
fn radial_norm_decay_slope() {
    let p = PhysParams::new(0.5, 1.0).unwrap();
    let prof = RadialProfile::gaussian_density(1.0, 1.0);
    let times: Vec<f64> = (0..=40)
        .map(|k| 100.0 * 10f64.powf(k as f64 / 20.0))
        .collect();
    let values = r2_norm_trajectory(&prof, 0.0, &times, &p).unwrap();
    let mut tr = NormTrajectory::new(&["v".to_string()]);
    for (t, v) in times.iter().zip(values) {
        tr.push(*t, &[v]).unwrap();
    }
    let fit = fit_power_law(&tr, "v", [1e2, 1e4]).unwrap();
    assert!((fit.exponent + 2.0).abs() <= 0.05, "{}", fit.exponent);
}

#[test]
fn lower_bound_constant_cases() {
    assert_eq!(lower_bound_constant(0.0, 1.0, 0.0, 0.5), 0.0);
    let c = lower_bound_constant(1.0, 1.0, 0.0, 0.5);
    let want = 0.5 * PI * (0.25 - 0.75 * (-2f64).exp());
    assert!(rel_err(c * c, want) <= 1e-8);
    let mut prev = 0.0;
    for eta in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let c = lower_bound_constant(1.0, eta, 1.0, 0.75);
        assert!(c >= prev);
        prev = c;
    }
}
