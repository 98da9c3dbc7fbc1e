use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Periodic square box `[0, L)^2` sampled on an `n x n` grid.
///
/// Mode `(i, j)` of a coefficient array carries the signed integer
/// wavenumbers `(k(i), k(j))` in FFT order and the physical wavevector
/// `xi = 2*pi*k / L`. Cloning is cheap; the FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    box_len: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("box_len", &self.box_len)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_len == other.box_len
    }
}

impl Grid {
    pub fn new(n: usize, box_len: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 4"
            )));
        }
        if !(box_len.is_finite() && box_len > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {box_len} must be positive"
            )));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Grid {
            n,
            box_len,
            plans: Arc::new(plans),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Physical grid spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.box_len / self.n as f64
    }

    /// Lattice spacing in wavenumber space, `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_len
    }

    /// Signed integer wavenumber of array index `i` (FFT order; the
    /// Nyquist index `n/2` maps to `-n/2`).
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Array index of a signed wavenumber.
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Physical wavevector of mode `(i, j)`.
    pub fn xi(&self, i: usize, j: usize) -> [f64; 2] {
        let dk = self.dk();
        [
            dk * self.wavenumber(i) as f64,
            dk * self.wavenumber(j) as f64,
        ]
    }

    /// Wavevector used by odd symbols (derivatives): the component along a
    /// Nyquist index is zero so that real fields stay real.
    pub fn xi_odd(&self, i: usize, j: usize) -> [f64; 2] {
        let [x1, x2] = self.xi(i, j);
        [
            if self.is_nyquist(i) { 0.0 } else { x1 },
            if self.is_nyquist(j) { 0.0 } else { x2 },
        ]
    }

    pub fn xi_norm(&self, i: usize, j: usize) -> f64 {
        let [x1, x2] = self.xi(i, j);
        x1.hypot(x2)
    }

    /// Smallest nonzero lattice wavenumber magnitude.
    pub fn xi_min(&self) -> f64 {
        self.dk()
    }

    /// Largest lattice wavenumber magnitude (the Nyquist corner).
    pub fn xi_max(&self) -> f64 {
        let kmax = (self.n / 2) as f64 * self.dk();
        kmax * std::f64::consts::SQRT_2
    }

    /// Modes kept by the 2/3 rule: `|k_1|, |k_2| <= n/3`.
    pub fn keeps_dealiased(&self, i: usize, j: usize) -> bool {
        let n = self.n as i64;
        3 * self.wavenumber(i).abs() < n && 3 * self.wavenumber(j).abs() < n
    }

    /// Physical coordinate of grid index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Unnormalized forward 2D DFT, in place.
    pub(crate) fn fft_forward(&self, data: &mut Array2<Complex64>) {
        self.fft2(data, &self.plans.forward);
    }

    /// Unnormalized inverse 2D DFT, in place.
    pub(crate) fn fft_inverse(&self, data: &mut Array2<Complex64>) {
        self.fft2(data, &self.plans.inverse);
    }

    fn fft2(&self, data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        debug_assert_eq!(data.dim(), (n, n));
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        {
            let rows = data
                .as_slice_mut()
                .expect("coefficient arrays are in standard layout");
            plan.process_with_scratch(rows, &mut scratch);
        }
        let mut cols = vec![Complex64::default(); n * n];
        transpose(data.as_slice().expect("standard layout"), &mut cols, n);
        plan.process_with_scratch(&mut cols, &mut scratch);
        transpose(&cols, data.as_slice_mut().expect("standard layout"), n);
    }
}

/// Square out-of-place transpose in cache-sized tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const TILE: usize = 16;
    for bi in (0..n).step_by(TILE) {
        for bj in (0..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                for j in bj..(bj + TILE).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}
