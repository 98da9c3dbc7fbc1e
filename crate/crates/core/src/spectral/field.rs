use ndarray::{Array2, Zip};
use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// A real scalar field on a periodic grid, stored as Fourier coefficients.
///
/// The coefficients are normalized so that `f(x) = sum_k c_k e^{i xi_k . x}`
/// on the grid; Plancherel then reads `||f||^2_{L2} = L^2 sum_k |c_k|^2`
/// and the continuous transform is approximated by `f^(xi_k) ~ L^2 c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        SpectralField {
            grid: grid.clone(),
            coeffs: Array2::zeros((n, n)),
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Array2<Complex64>) -> Result<Self> {
        let n = grid.n();
        if coeffs.dim() != (n, n) {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs: coeffs.as_standard_layout().into_owned(),
        })
    }

    pub fn from_physical(grid: &Grid, values: &Array2<f64>) -> Result<Self> {
        let n = grid.n();
        if values.dim() != (n, n) {
            return Err(Error::GridMismatch);
        }
        let mut coeffs = values.mapv(|v| Complex64::new(v, 0.0));
        grid.fft_forward(&mut coeffs);
        let norm = 1.0 / (n * n) as f64;
        coeffs.mapv_inplace(|c| c * norm);
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Samples `f(x1, x2)` at the grid points and transforms.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(grid.coord(i), grid.coord(j)));
        Self::from_physical(grid, &values).expect("shape matches grid")
    }

    /// Values at the physical grid points (real part of the inverse transform).
    pub fn to_physical(&self) -> Array2<f64> {
        let mut data = self.coeffs.clone();
        self.grid.fft_inverse(&mut data);
        data.mapv(|c| c.re)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    /// Coefficient of signed wavenumber `(k1, k2)`.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[[self.grid.index_of(k1), self.grid.index_of(k2)]]
    }

    /// Spatial mean, i.e. the k = 0 coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[[0, 0]]
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let l = self.grid.box_len();
        l * l * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Rectangle-rule L2 norm on the physical grid.
    pub fn physical_l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self.to_physical().iter().map(|v| v * v).sum::<f64>() * dx * dx).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::default())
    }

    /// Largest violation of `c(-k) = conj(c(k))` relative to the largest
    /// coefficient (0 for the zero field).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mi = (n - i) % n;
                let mj = (n - j) % n;
                let d = (self.coeffs[[mi, mj]] - self.coeffs[[i, j]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.mapv(|c| c * factor),
        }
    }

    pub fn try_add(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        Ok(SpectralField {
            grid: self.grid.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn try_sub(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        Ok(SpectralField {
            grid: self.grid.clone(),
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Copy with the k = 0 coefficient removed.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[[0, 0]] = Complex64::default();
        out
    }

    /// Multiplies every coefficient by `symbol(i, j)`.
    pub fn apply_symbol(&self, symbol: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs
            .indexed_iter_mut()
            .for_each(|((i, j), c)| *c *= symbol(i, j));
        out
    }

    /// Zeroes the modes removed by the 2/3 rule.
    pub fn dealiased(&self) -> Self {
        let mut out = self.clone();
        truncate_2_3(&self.grid, &mut out.coeffs);
        out
    }

    /// Maximum of `|c_k - d_k|` over all modes.
    pub fn max_coeff_diff(&self, other: &SpectralField) -> f64 {
        let mut worst = 0.0f64;
        Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .for_each(|a, b| worst = worst.max((a - b).norm()));
        worst
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn truncate_2_3(grid: &Grid, coeffs: &mut Array2<Complex64>) {
    coeffs.indexed_iter_mut().for_each(|((i, j), c)| {
        if !grid.keeps_dealiased(i, j) {
            *c = Complex64::default();
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_coefficients() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&g, |x, y| (2.0 * x).cos() + 3.0 * y.sin());
        assert!((f.coeff(2, 0).re - 0.5).abs() < 1e-14);
        assert!((f.coeff(-2, 0).re - 0.5).abs() < 1e-14);
        assert!((f.coeff(0, 1).im + 1.5).abs() < 1e-14);
        assert!(f.hermitian_defect() < 1e-15);
    }

    #[test]
    fn plancherel_for_trig_field() {
        let l = 3.0;
        let g = Grid::new(32, l).unwrap();
        let f = SpectralField::from_fn(&g, |x, y| {
            1.0 + (2.0 * PI * x / l).cos() * (4.0 * PI * y / l).sin()
        });
        // mean 1 over area l^2 plus a product with mean square 1/4
        let exact = l * l * (1.0 + 0.25);
        assert!((f.l2_norm_sq() - exact).abs() < 1e-12 * exact);
        assert!((f.physical_l2_norm().powi(2) - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = SpectralField::zeros(&Grid::new(8, 1.0).unwrap());
        let b = SpectralField::zeros(&Grid::new(8, 2.0).unwrap());
        assert_eq!(a.try_add(&b).unwrap_err(), Error::GridMismatch);
    }
}
