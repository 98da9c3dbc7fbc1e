#![allow(dead_code)]

use fcns_core::linear::Mat3;
use fcns_core::{Grid, SpectralField, State};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real field with i.i.d. uniform samples in `[-amp, amp]`.
pub fn random_field(grid: &Grid, rng: &mut ChaCha8Rng, amp: f64) -> SpectralField {
    let n = grid.n();
    let values = Array2::from_shape_fn((n, n), |_| rng.random_range(-amp..amp));
    SpectralField::from_physical(grid, &values).unwrap()
}

/// Random real field whose spectrum is confined to `|k_1|, |k_2| <= band`.
pub fn band_limited(grid: &Grid, rng: &mut ChaCha8Rng, band: i64, amp: f64) -> SpectralField {
    let mut f = random_field(grid, rng, amp);
    let g = grid.clone();
    f = f.apply_symbol(|i, j| {
        let keep = g.wavenumber(i).abs() <= band && g.wavenumber(j).abs() <= band;
        if keep {
            1.0.into()
        } else {
            0.0.into()
        }
    });
    f
}

pub fn random_state(grid: &Grid, rng: &mut ChaCha8Rng, amp: f64) -> State {
    let a = random_field(grid, rng, amp);
    let u1 = random_field(grid, rng, amp);
    let u2 = random_field(grid, rng, amp);
    State::new(a, [u1, u2]).unwrap()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// `exp(-A t)` by scaling and squaring of a long Taylor series.
pub fn expm_oracle(a: &Mat3, t: f64) -> Mat3 {
    let mut m = a.0;
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x *= -t;
        }
    }
    let norm = m
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    let x = Mat3(m);
    let mut term = Mat3::identity();
    let mut sum = Mat3::identity();
    for k in 1..=24 {
        term = term.mul(&x);
        for row in term.0.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                sum.0[i][j] += term.0[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}
