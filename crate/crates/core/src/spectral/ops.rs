//! Fourier multipliers and physical-space compositions.

use ndarray::Zip;
use num_complex::Complex64;

use super::field::{truncate_2_3, SpectralField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Riesz multiplier `Lambda^s`: `c_k -> |xi_k|^s c_k`.
///
/// For `s > 0` the mean is annihilated; for `s < 0` a nonzero mean is
/// rejected because the homogeneous operator is undefined on constants.
pub fn lambda_s(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let norm = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mean = f.mean().norm();
        if mean > 1e-14 * norm {
            return Err(Error::NegativeOrderOnNonzeroMean { mean });
        }
    }
    let grid = f.grid().clone();
    let mut out = f.apply_symbol(|i, j| {
        if i == 0 && j == 0 {
            Complex64::default()
        } else {
            Complex64::new(grid.xi_norm(i, j).powf(s), 0.0)
        }
    });
    out.coeffs_mut()[[0, 0]] = Complex64::default();
    Ok(out)
}

/// `(-Delta)^beta = Lambda^{2 beta}`.
pub fn fractional_laplacian(f: &SpectralField, beta: f64) -> SpectralField {
    lambda_s(f, 2.0 * beta).expect("positive order never fails")
}

/// Spectral gradient `(d1 f, d2 f)`.
pub fn gradient(f: &SpectralField) -> [SpectralField; 2] {
    let grid = f.grid().clone();
    [0, 1].map(|c| f.apply_symbol(|i, j| I * grid.xi_odd(i, j)[c]))
}

/// Spectral divergence `d1 v1 + d2 v2`.
pub fn divergence(v: &[SpectralField; 2]) -> Result<SpectralField> {
    v[0].check_grid(&v[1])?;
    let grid = v[0].grid().clone();
    let mut out = SpectralField::zeros(&grid);
    Zip::indexed(out.coeffs_mut())
        .and(v[0].coeffs())
        .and(v[1].coeffs())
        .for_each(|(i, j), o, a, b| {
            let [x1, x2] = grid.xi_odd(i, j);
            *o = I * (x1 * a + x2 * b);
        });
    Ok(out)
}

/// Product of two fields evaluated on the physical grid. With `dealias`
/// both factors and the result are truncated by the 2/3 rule.
pub fn pointwise_product(
    f: &SpectralField,
    g: &SpectralField,
    dealias: bool,
) -> Result<SpectralField> {
    f.check_grid(g)?;
    let (pf, pg) = if dealias {
        (f.dealiased().to_physical(), g.dealiased().to_physical())
    } else {
        (f.to_physical(), g.to_physical())
    };
    let mut out = SpectralField::from_physical(f.grid(), &(pf * pg))?;
    if dealias {
        truncate_2_3(f.grid(), out.coeffs_mut());
    }
    Ok(out)
}

/// Applies `phi` at every physical grid point and transforms back.
///
/// No dealiasing is applied; a non-finite result anywhere is reported as a
/// domain violation.
pub fn pointwise_map(f: &SpectralField, phi: impl Fn(f64) -> f64) -> Result<SpectralField> {
    let mut values = f.to_physical();
    for v in values.iter_mut() {
        let mapped = phi(*v);
        if !mapped.is_finite() {
            return Err(Error::DomainViolation(format!(
                "map is not finite at physical value {v}"
            )));
        }
        *v = mapped;
    }
    SpectralField::from_physical(f.grid(), &values)
}
