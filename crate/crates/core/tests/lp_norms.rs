mod common;

use std::f64::consts::PI;

use common::{band_limited, random_field, rel_err, rng};
use fcns_core::littlewood_paley::{
    build_partition, gn_exponent, gn_ratio, lp_block, norm, norm_of, phi_j, NormRequest, SumIndex,
};
use fcns_core::{Error, Grid, SpectralField};
use num_complex::Complex64;
use rand::Rng;

#[test]
fn partition_of_unity_at_random_lattice_points() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let box_len = r.random_range(0.5..500.0);
        let k1: i64 = r.random_range(-256..=256);
        let k2: i64 = r.random_range(-256..=256);
        if k1 == 0 && k2 == 0 {
            continue;
        }
        let xi = 2.0 * PI / box_len * ((k1 * k1 + k2 * k2) as f64).sqrt();
        let j_lo = (3.0 * xi / 8.0).log2().floor() as i32 - 2;
        let j_hi = (4.0 * xi / 3.0).log2().ceil() as i32 + 2;
        let w: Vec<(i32, f64)> = (j_lo..=j_hi).map(|j| (j, phi_j(j, xi))).collect();
        let sum: f64 = w.iter().map(|(_, v)| v).sum();
        let sq: f64 = w.iter().map(|(_, v)| v * v).sum();
        assert!((sum - 1.0).abs() <= 1e-10, "sum {sum} at xi {xi}");
        assert!((0.5..=1.0).contains(&sq), "square sum {sq}");
        for (j, a) in &w {
            for (jp, b) in &w {
                if (j - jp).abs() >= 2 {
                    assert_eq!(a * b, 0.0);
                }
            }
        }
    }
}

#[test]
fn blocks_reassemble_the_field() {
    let g = Grid::new(32, 2.0 * PI).unwrap();
    let part = build_partition(&g);
    // |xi| = 4 = 2^2 sits in the middle of annulus 2.
    let mut f = SpectralField::zeros(&g);
    f.coeffs_mut()[[4, 0]] = Complex64::new(0.5, 0.0);
    f.coeffs_mut()[[28, 0]] = Complex64::new(0.5, 0.0);
    let mut total = SpectralField::zeros(&g);
    for j in part.range() {
        total = total.try_add(&lp_block(&f, j, &part).unwrap()).unwrap();
    }
    assert!(total.max_coeff_diff(&f) < 1e-15);
    let neighbours = [1, 2, 3]
        .iter()
        .map(|j| lp_block(&f, *j, &part).unwrap())
        .reduce(|a, b| a.try_add(&b).unwrap())
        .unwrap();
    assert!(neighbours.max_coeff_diff(&f) < 1e-15);

    let c = SpectralField::from_fn(&g, |_, _| 2.0);
    for j in part.range() {
        assert!(lp_block(&c, j, &part).unwrap().is_zero());
    }
    assert!(matches!(
        lp_block(&f, part.j_max() + 1, &part),
        Err(Error::JOutOfRange { .. })
    ));
}

#[test]
fn block_energy_bounds() {
    let g = Grid::new(64, 11.0).unwrap();
    let part = build_partition(&g);
    let f = random_field(&g, &mut rng(12), 1.0).without_mean();
    let blocks: f64 = part
        .range()
        .map(|j| lp_block(&f, j, &part).unwrap().l2_norm_sq())
        .sum();
    let ratio = blocks / f.l2_norm_sq();
    assert!((0.5..=1.0).contains(&ratio), "{ratio}");
    let b0 = norm(&f, NormRequest::Besov(0.0, SumIndex::Two), &part).unwrap();
    let r2 = (b0 / f.l2_norm()).powi(2);
    assert!((0.5..=1.0 + 1e-12).contains(&r2));
}

#[test]
fn zero_field_and_l2_consistency() {
    let g = Grid::new(32, 3.0).unwrap();
    let part = build_partition(&g);
    let z = SpectralField::zeros(&g);
    let requests = [
        NormRequest::L2,
        NormRequest::Lp(4.0),
        NormRequest::Lp(f64::INFINITY),
        NormRequest::Hs(1.5),
        NormRequest::HomHs(-0.5),
        NormRequest::Besov(-1.0, SumIndex::Infinity),
        NormRequest::Besov(0.5, SumIndex::One),
    ];
    for req in requests {
        assert_eq!(norm(&z, req, &part).unwrap(), 0.0, "{req:?}");
    }
    let f = random_field(&g, &mut rng(13), 1.0);
    let hs0 = norm(&f, NormRequest::Hs(0.0), &part).unwrap();
    assert!(rel_err(hs0, norm(&f, NormRequest::L2, &part).unwrap()) <= 1e-12);
    let l2 = norm(&f, NormRequest::Lp(2.0), &part).unwrap();
    assert!(rel_err(l2, f.l2_norm()) <= 1e-12);
}

#[test]
fn besov_matches_direct_loop() {
    let g = Grid::new(64, 20.0).unwrap();
    let part = build_partition(&g);
    let f = random_field(&g, &mut rng(14), 1.0).without_mean();
    let got = norm(&f, NormRequest::Besov(-1.0, SumIndex::Infinity), &part).unwrap();
    let n = g.n();
    let l = g.box_len();
    let mut want = 0.0f64;
    for j in part.range() {
        let mut sum = 0.0;
        for i in 0..n {
            for k in 0..n {
                let (k1, k2) = (g.wavenumber(i) as f64, g.wavenumber(k) as f64);
                if k1 == 0.0 && k2 == 0.0 {
                    continue;
                }
                let xi = 2.0 * PI / l * (k1 * k1 + k2 * k2).sqrt();
                let w = phi_j(j, xi);
                sum += w * w * f.coeffs()[[i, k]].norm_sqr() * l * l;
            }
        }
        want = want.max(2f64.powi(-j) * sum.sqrt());
    }
    assert!(rel_err(got, want) <= 1e-12, "{got} vs {want}");
    assert!(matches!(
        norm(
            &random_field(&g, &mut rng(15), 1.0),
            NormRequest::Besov(-1.0, SumIndex::Infinity),
            &part
        ),
        Err(Error::MeanModeNotZero)
    ));
}

#[test]
fn sobolev_norm_monotone_in_order() {
    let g = Grid::new(32, 6.0).unwrap();
    let part = build_partition(&g);
    for seed in 0..10 {
        let f = random_field(&g, &mut rng(100 + seed), 1.0);
        let vals: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
            .iter()
            .map(|s| norm(&f, NormRequest::Hs(*s), &part).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn vector_norm_adds_components() {
    let g = Grid::new(32, 6.0).unwrap();
    let part = build_partition(&g);
    let mut r = rng(16);
    let f = random_field(&g, &mut r, 1.0);
    let h = random_field(&g, &mut r, 1.0);
    let v = norm_of(&[&f, &h], NormRequest::Hs(1.0), &part).unwrap();
    let a = norm(&f, NormRequest::Hs(1.0), &part).unwrap();
    let b = norm(&h, NormRequest::Hs(1.0), &part).unwrap();
    assert!(rel_err(v, a.hypot(b)) <= 1e-14);
}

#[test]
fn gn_exponent_values() {
    assert!((gn_exponent(0.0, 0.0, 1.0, 4.0).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(gn_exponent(0.7, 0.7, 2.0, 2.0).unwrap(), 0.0);
    assert!((gn_exponent(1.0, 0.0, 2.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn gn_ratio_cases() {
    let g = Grid::new(32, 2.0 * PI).unwrap();
    let mut f = SpectralField::zeros(&g);
    f.coeffs_mut()[[1, 0]] = Complex64::new(0.5, 0.0);
    f.coeffs_mut()[[31, 0]] = Complex64::new(0.5, 0.0);
    for (s, s1, s2) in [(0.0, 0.0, 1.0), (1.0, 0.5, 2.0), (0.3, 0.2, 3.0)] {
        let r = gn_ratio(&f, s, s1, s2, 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-13, "{r}");
    }
    assert_eq!(
        gn_ratio(&SpectralField::zeros(&g), 0.0, 0.0, 1.0, 4.0),
        Err(Error::ZeroField)
    );
}

/// The constant of the interpolation inequality, measured over an ensemble
/// of band-limited fields, stays bounded as the grid is refined.
#[test]
fn gn_ratio_ensemble_is_resolution_stable() {
    let mut maxima = Vec::new();
    for n in [64usize, 128, 256] {
        let g = Grid::new(n, 2.0 * PI).unwrap();
        let mut r = rng(17);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let f = band_limited(&g, &mut r, 8, 1.0).without_mean();
            worst = worst.max(gn_ratio(&f, 0.0, 0.0, 1.0, 4.0).unwrap());
        }
        maxima.push(worst);
    }
    assert!(
        maxima.iter().all(|m| m.is_finite() && *m < 10.0),
        "{maxima:?}"
    );
}

/// Besov(-1, inf) of a mean-free bump is controlled by its L1 norm with a
/// constant that does not drift with the bump width.
#[test]
fn besov_embedding_of_l1_bumps() {
    let l = 100.0;
    let g = Grid::new(256, l).unwrap();
    let part = build_partition(&g);
    let mut constants = Vec::new();
    for sigma in [1.0, 2.0, 4.0] {
        let c = 0.5 * l;
        let f = SpectralField::from_fn(&g, |x, y| {
            1e-2 * (-((x - c).powi(2) + (y - c).powi(2)) / (2.0 * sigma * sigma)).exp()
        });
        let l1 = 1e-2 * 2.0 * PI * sigma * sigma;
        let b = norm(
            &f.without_mean(),
            NormRequest::Besov(-1.0, SumIndex::Infinity),
            &part,
        )
        .unwrap();
        assert!(b.is_finite());
        constants.push(b / l1);
    }
    let (lo, hi) = constants
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
            (lo.min(*c), hi.max(*c))
        });
    assert!(hi / lo < 1.5, "{constants:?}");
}
