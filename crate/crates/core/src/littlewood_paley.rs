//! Littlewood-Paley blocks on the wavenumber lattice and the norms built
//! from them (Besov, Sobolev, Lebesgue), plus Gagliardo-Nirenberg ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{lambda_s, Grid, SpectralField};

const INNER: f64 = 3.0 / 4.0;
const OUTER: f64 = 4.0 / 3.0;

fn smooth_step(x: f64) -> f64 {
    let h = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = h(x);
    let b = h(1.0 - x);
    a / (a + b)
}

/// Radial cutoff: 1 on `[0, 3/4]`, 0 on `[4/3, inf)`, smooth in between.
pub fn chi(r: f64) -> f64 {
    if r <= INNER {
        1.0
    } else if r >= OUTER {
        0.0
    } else {
        smooth_step((OUTER - r) / (OUTER - INNER))
    }
}

/// Dyadic profile `phi(r) = chi(r/2) - chi(r)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// `phi(2^{-j} r)`; the scaling by a power of two is exact.
pub fn phi_j(j: i32, r: f64) -> f64 {
    phi(r * 2f64.powi(-j))
}

/// The range of dyadic blocks needed to cover every nonzero lattice mode.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
}

pub fn build_partition(grid: &Grid) -> DyadicPartition {
    let j_min = (3.0 * grid.xi_min() / 8.0).log2().floor() as i32;
    let j_max = (4.0 * grid.xi_max() / 3.0).log2().ceil() as i32;
    DyadicPartition {
        grid: grid.clone(),
        j_min,
        j_max,
    }
}

impl DyadicPartition {
    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// `phi(2^{-j} |xi|)` at lattice mode `(i, k)`; zero at the origin.
    pub fn weight(&self, j: i32, i: usize, k: usize) -> f64 {
        if i == 0 && k == 0 {
            0.0
        } else {
            phi_j(j, self.grid.xi_norm(i, k))
        }
    }

    fn check_j(&self, j: i32) -> Result<()> {
        if self.range().contains(&j) {
            Ok(())
        } else {
            Err(Error::JOutOfRange {
                j,
                j_min: self.j_min,
                j_max: self.j_max,
            })
        }
    }

    /// Squared L2 norms of every block of the vector field, in one pass
    /// over the lattice. Each mode touches only the blocks whose annulus
    /// contains it.
    fn block_energies(&self, fields: &[&SpectralField]) -> Vec<f64> {
        let l = self.grid.box_len();
        let n = self.grid.n();
        let mut blocks = vec![0.0; (self.j_max - self.j_min + 1) as usize];
        for i in 0..n {
            for k in 0..n {
                if i == 0 && k == 0 {
                    continue;
                }
                let e: f64 = fields.iter().map(|f| f.coeffs()[[i, k]].norm_sqr()).sum();
                if e == 0.0 {
                    continue;
                }
                let r = self.grid.xi_norm(i, k);
                // phi(2^-j r) vanishes unless 3/4 < 2^-j r < 8/3.
                let j_lo = ((3.0 * r / 8.0).log2().floor() as i32).max(self.j_min);
                let j_hi = ((4.0 * r / 3.0).log2().ceil() as i32).min(self.j_max);
                for j in j_lo..=j_hi {
                    let w = phi_j(j, r);
                    blocks[(j - self.j_min) as usize] += w * w * e;
                }
            }
        }
        blocks.iter_mut().for_each(|b| *b *= l * l);
        blocks
    }
}

/// Homogeneous Littlewood-Paley block `Delta_j f`.
pub fn lp_block(f: &SpectralField, j: i32, part: &DyadicPartition) -> Result<SpectralField> {
    part.check_j(j)?;
    if f.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(f.apply_symbol(|i, k| part.weight(j, i, k).into()))
}

/// Summation index of the outer `l^r` norm over dyadic blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SumIndex {
    One,
    Two,
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormRequest {
    L2,
    /// Physical-grid `L^p`, `p` in `[2, inf]`.
    Lp(f64),
    /// Inhomogeneous Sobolev, multiplier `(1 + |xi|^2)^{s/2}`.
    Hs(f64),
    /// Homogeneous Sobolev, multiplier `|xi|^s`.
    HomHs(f64),
    /// Homogeneous Besov `B^s_{2,r}`.
    Besov(f64, SumIndex),
}

fn has_mean(f: &SpectralField) -> bool {
    let total = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    f.mean().norm() > 1e-14 * total
}

fn weighted_sum(f: &SpectralField, weight: impl Fn(f64) -> f64, skip_mean: bool) -> f64 {
    let grid = f.grid();
    let l = grid.box_len();
    let mut sum = 0.0;
    for ((i, k), c) in f.coeffs().indexed_iter() {
        if skip_mean && i == 0 && k == 0 {
            continue;
        }
        sum += weight(grid.xi_norm(i, k)) * c.norm_sqr();
    }
    l * l * sum
}

/// Norm of the vector field `(f_1, ..., f_m)`: Hilbertian norms add in
/// squares; Besov blocks combine the components before the `l^r` sum.
pub fn norm_of(fields: &[&SpectralField], req: NormRequest, part: &DyadicPartition) -> Result<f64> {
    for f in fields {
        if f.grid() != part.grid() {
            return Err(Error::GridMismatch);
        }
    }
    match req {
        NormRequest::L2 => Ok(fields.iter().map(|f| f.l2_norm_sq()).sum::<f64>().sqrt()),
        NormRequest::Hs(s) => Ok(fields
            .iter()
            .map(|f| weighted_sum(f, |r| (1.0 + r * r).powf(s), false))
            .sum::<f64>()
            .sqrt()),
        NormRequest::HomHs(s) => {
            if s <= 0.0 && fields.iter().any(|f| has_mean(f)) {
                return Err(Error::MeanModeNotZero);
            }
            Ok(fields
                .iter()
                .map(|f| weighted_sum(f, |r| r.powf(2.0 * s), true))
                .sum::<f64>()
                .sqrt())
        }
        NormRequest::Lp(p) => {
            if !(p >= 2.0) {
                return Err(Error::InvalidNorm(format!("p = {p} must lie in [2, inf]")));
            }
            lp_norm(fields, p)
        }
        NormRequest::Besov(s, r) => {
            if s <= 0.0 && fields.iter().any(|f| has_mean(f)) {
                return Err(Error::MeanModeNotZero);
            }
            let energies = part.block_energies(fields);
            let blocks = part
                .range()
                .zip(energies)
                .map(|(j, b)| 2f64.powf(j as f64 * s) * b.sqrt());
            Ok(match r {
                SumIndex::One => blocks.sum(),
                SumIndex::Two => blocks.map(|b| b * b).sum::<f64>().sqrt(),
                SumIndex::Infinity => blocks.fold(0.0, f64::max),
            })
        }
    }
}

fn lp_norm(fields: &[&SpectralField], p: f64) -> Result<f64> {
    let Some(first) = fields.first() else {
        return Ok(0.0);
    };
    let dx = first.grid().dx();
    let phys: Vec<_> = fields.iter().map(|f| f.to_physical()).collect();
    let n = first.grid().n();
    let mut acc = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            let m = phys
                .iter()
                .map(|v| v[[i, k]] * v[[i, k]])
                .sum::<f64>()
                .sqrt();
            if p.is_infinite() {
                acc = acc.max(m);
            } else {
                acc += m.powf(p);
            }
        }
    }
    Ok(if p.is_infinite() {
        acc
    } else {
        (acc * dx * dx).powf(1.0 / p)
    })
}

pub fn norm(f: &SpectralField, req: NormRequest, part: &DyadicPartition) -> Result<f64> {
    norm_of(&[f], req, part)
}

/// Interpolation exponent solving `s + 1 - 2/p = (1 - theta) s1 + theta s2`.
pub fn gn_exponent(s: f64, s1: f64, s2: f64, p: f64) -> Result<f64> {
    if !(s2 > s1 && s1 >= 0.0 && s >= 0.0 && p >= 2.0) {
        return Err(Error::InvalidNorm(format!(
            "need s2 > s1 >= 0, s >= 0, p >= 2 (got s={s}, s1={s1}, s2={s2}, p={p})"
        )));
    }
    let theta = (s + 1.0 - 2.0 / p - s1) / (s2 - s1);
    let ok = if p.is_infinite() {
        theta > 0.0 && theta < 1.0 && s1 <= s
    } else {
        (0.0..=1.0).contains(&theta)
    };
    if ok {
        Ok(theta)
    } else {
        Err(Error::NoAdmissibleTheta { theta })
    }
}

/// `||Lambda^s f||_{L^p} / (||Lambda^{s1} f||^{1-theta} ||Lambda^{s2} f||^theta)`.
pub fn gn_ratio(f: &SpectralField, s: f64, s1: f64, s2: f64, p: f64) -> Result<f64> {
    let theta = gn_exponent(s, s1, s2, p)?;
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    if has_mean(f) {
        return Err(Error::MeanModeNotZero);
    }
    let top = lp_norm(&[&lambda_s(f, s)?], p)?;
    let low = lambda_s(f, s1)?.l2_norm();
    let high = lambda_s(f, s2)?.l2_norm();
    Ok(top / (low.powf(1.0 - theta) * high.powf(theta)))
}
