use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Density perturbation `a` (with `rho = 1 + a`) and velocity `u`.
#[derive(Clone, Debug)]
pub struct State {
    pub a: SpectralField,
    pub u: [SpectralField; 2],
}

impl State {
    pub fn new(a: SpectralField, u: [SpectralField; 2]) -> Result<Self> {
        a.check_grid(&u[0])?;
        a.check_grid(&u[1])?;
        Ok(State { a, u })
    }

    pub fn zeros(grid: &Grid) -> Self {
        State {
            a: SpectralField::zeros(grid),
            u: [SpectralField::zeros(grid), SpectralField::zeros(grid)],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    pub fn fields(&self) -> [&SpectralField; 3] {
        [&self.a, &self.u[0], &self.u[1]]
    }

    pub fn scaled(&self, c: f64) -> Self {
        State {
            a: self.a.scaled(c),
            u: [self.u[0].scaled(c), self.u[1].scaled(c)],
        }
    }

    pub fn try_sub(&self, other: &State) -> Result<Self> {
        Ok(State {
            a: self.a.try_sub(&other.a)?,
            u: [
                self.u[0].try_sub(&other.u[0])?,
                self.u[1].try_sub(&other.u[1])?,
            ],
        })
    }

    pub fn without_mean(&self) -> Self {
        State {
            a: self.a.without_mean(),
            u: [self.u[0].without_mean(), self.u[1].without_mean()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fields().iter().all(|f| f.is_zero())
    }

    /// Minimum of `1 + a` over the physical grid.
    pub fn min_density(&self) -> f64 {
        1.0 + self
            .a
            .to_physical()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum of `|u|` over the physical grid.
    pub fn max_speed(&self) -> f64 {
        let u1 = self.u[0].to_physical();
        let u2 = self.u[1].to_physical();
        u1.iter()
            .zip(u2.iter())
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }

    /// `||a||^2 + ||u||^2` in L2.
    pub fn l2_energy(&self) -> f64 {
        self.fields().iter().map(|f| f.l2_norm_sq()).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.fields()
            .iter()
            .map(|f| f.hermitian_defect())
            .fold(0.0, f64::max)
    }

    /// Errors unless `1 + a > floor` everywhere on the grid.
    pub fn check_admissible(&self, floor: f64) -> Result<()> {
        let m = self.min_density();
        if m > floor {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!(
                "min(1 + a) = {m} is not above {floor}"
            )))
        }
    }
}
