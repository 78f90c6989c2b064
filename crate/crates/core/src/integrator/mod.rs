//! Strang split-step integration of `i u_t - Lap u + lambda u|u|^alpha = 0`.
//!
//! Sign convention used everywhere in the crate: the linear flow multiplies
//! coefficient `(k, n)` by `exp(+i t (|xi|^2 + n^2))` and the nonlinear flow
//! is `u -> u exp(i lambda t |u|^alpha)`.

mod stepper;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{abs_pow, Complex64, Grid, SpectralError, SpectralField};

pub use stepper::{
    evolve, evolve_schedule, strang_step, BoundaryGuard, EvolveOutcome, Sample, Sink, Stepper,
};

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error(
        "non-finite value after step {step} (t = {time}); last good sample index {last_sample:?}"
    )]
    BlowUp {
        step: usize,
        time: f64,
        last_sample: Option<usize>,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("sink failed at sample {index}: {message}")]
    Sink { index: usize, message: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Power `alpha > 0` and sign `lambda`: `+1` defocusing, `-1` focusing,
/// `0` switches the nonlinearity off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    alpha: f64,
    lambda: f64,
}

impl PhysicsParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, IntegratorError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(IntegratorError::Argument(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if ![1.0, -1.0, 0.0].contains(&lambda) {
            return Err(IntegratorError::Argument(format!(
                "lambda must be +1, -1 or 0, got {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn defocusing(alpha: f64) -> Result<Self, IntegratorError> {
        Self::new(alpha, 1.0)
    }

    pub fn focusing(alpha: f64) -> Result<Self, IntegratorError> {
        Self::new(alpha, -1.0)
    }

    /// Linear flow only.
    pub fn linear(alpha: f64) -> Result<Self, IntegratorError> {
        Self::new(alpha, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Uniform stepping with a diagnostic sample every `sample_every` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

impl StepControl {
    pub fn new(dt: f64, t_end: f64, sample_every: usize) -> Result<Self, IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::Argument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(IntegratorError::Argument(format!(
                "t_end must be >= 0, got {t_end}"
            )));
        }
        if sample_every == 0 {
            return Err(IntegratorError::Argument(
                "sample_every must be >= 1".into(),
            ));
        }
        Ok(Self {
            dt,
            t_end,
            sample_every,
        })
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Step indices at which samples are taken, starting at 0.
    pub fn sample_steps(&self) -> Vec<usize> {
        (0..=self.n_steps()).step_by(self.sample_every).collect()
    }

    /// Largest per-step phase `dt * max(|xi|^2 + n^2)` divided by `2 pi`.
    /// Values above 1 mean the fastest modes are not resolved in time; the
    /// substep is still exact.
    pub fn phase_per_step(&self, grid: &Grid) -> f64 {
        self.dt * grid.max_symbol() / (2.0 * std::f64::consts::PI)
    }
}

/// `||u||^2_{L^2}`.
pub fn mass(field: &SpectralField) -> f64 {
    field.weighted_energy(|_, _| 1.0)
}

/// `1/2 ||grad u||^2 + lambda/(alpha+2) ||u||^{alpha+2}_{alpha+2}`.
pub fn energy(field: &SpectralField, physics: &PhysicsParams) -> f64 {
    let kinetic = 0.5 * field.weighted_energy(|xi, n| xi[0] * xi[0] + xi[1] * xi[1] + n * n);
    if physics.lambda == 0.0 {
        return kinetic;
    }
    let a = physics.alpha;
    let w = field.grid().weight();
    let pot: f64 = field
        .to_physical()
        .iter()
        .map(|z| abs_pow(*z, a + 2.0))
        .sum::<f64>()
        * w;
    kinetic + physics.lambda / (a + 2.0) * pot
}

/// Standing wave `sqrt(2) B sech(B x)` of the focusing cubic equation in
/// `d = 1`; it evolves as `u(0) exp(-i B^2 t)`.
pub fn soliton_profile(grid: Grid, b: f64) -> Result<SpectralField, IntegratorError> {
    if grid.d() != 1 {
        return Err(IntegratorError::Argument(
            "soliton profile needs d = 1".into(),
        ));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(IntegratorError::Argument(format!(
            "B must be positive, got {b}"
        )));
    }
    Ok(SpectralField::from_profile(grid, |x, _| {
        Complex64::new(2f64.sqrt() * b / (b * x[0]).cosh(), 0.0)
    })?)
}

/// Exact soliton at time `t`.
pub fn soliton_at(grid: Grid, b: f64, t: f64) -> Result<SpectralField, IntegratorError> {
    let u0 = soliton_profile(grid, b)?;
    let phase = Complex64::from_polar(1.0, -b * b * t);
    Ok(u0.apply_multiplier(|_, _| phase).with_time(t))
}

/// `||a - b||_{L^2}`.
pub fn l2_distance(a: &SpectralField, b: &SpectralField) -> Result<f64, SpectralError> {
    Ok(mass(&a.sub(b)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn params_validation() {
        assert!(PhysicsParams::new(0.0, 1.0).is_err());
        assert!(PhysicsParams::new(2.0, 0.5).is_err());
        assert!(StepControl::new(0.0, 1.0, 1).is_err());
        assert!(StepControl::new(1e-3, 1.0, 0).is_err());
        let c = StepControl::new(1e-3, 10.0, 100).unwrap();
        assert_eq!(c.n_steps(), 10_000);
        assert_eq!(c.sample_steps().len(), 101);
    }

    #[test]
    fn plane_wave_mass_energy() {
        let l = 4.0 * PI;
        let g = Grid::new(1, l, 32, 8).unwrap();
        let (a, k, n) = (0.8, 1.5, 2.0);
        let f = SpectralField::from_profile(g, |x, y| Complex64::from_polar(a, k * x[0] + n * y))
            .unwrap();
        let vol = 2.0 * PI * l;
        assert!((mass(&f) / (a * a * vol) - 1.0).abs() < 1e-13);
        for (lam, alpha) in [(1.0, 3.0), (-1.0, 2.5)] {
            let p = PhysicsParams::new(alpha, lam).unwrap();
            let want = 0.5 * a * a * (k * k + n * n) * vol
                + lam / (alpha + 2.0) * a.powf(alpha + 2.0) * vol;
            assert!((energy(&f, &p) / want - 1.0).abs() < 1e-12);
        }
        let z = SpectralField::zeros(g);
        assert_eq!(
            (
                mass(&z),
                energy(&z, &PhysicsParams::defocusing(3.0).unwrap())
            ),
            (0.0, 0.0)
        );
    }

    #[test]
    fn soliton_mass() {
        let g = Grid::new(1, 80.0, 1024, 4).unwrap();
        for b in [0.7, 1.0, 1.6] {
            let f = soliton_profile(g, b).unwrap();
            assert!((mass(&f) / (4.0 * b * 2.0 * PI) - 1.0).abs() < 1e-10);
        }
        assert!(soliton_profile(g, 0.0).is_err());
        assert!(soliton_profile(Grid::new(2, 8.0, 8, 4).unwrap(), 1.0).is_err());
    }
}
