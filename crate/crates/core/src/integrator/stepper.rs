use crate::spectral::{
    abs_pow, cube_cells, edge_cube_sup, transform, Complex64, Direction, Grid, SpectralField,
};

use super::{mass, IntegratorError, PhysicsParams, StepControl};

/// Precomputed linear phase for a fixed step and grid.
pub struct Stepper {
    grid: Grid,
    shape: Vec<usize>,
    physics: PhysicsParams,
    dt: f64,
    phase: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: Grid, physics: PhysicsParams, dt: f64) -> Self {
        let mut phase = vec![Complex64::default(); grid.len()];
        grid.for_each_mode(|i, xi, n| {
            phase[i] = Complex64::from_polar(1.0, dt * (xi[0] * xi[0] + xi[1] * xi[1] + n * n));
        });
        Self {
            grid,
            shape: grid.shape(),
            physics,
            dt,
            phase,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Exact nonlinear flow over `tau`; false if a non-finite value shows up.
    fn nonlinear(&self, u: &mut [Complex64], tau: f64) -> bool {
        let lam = self.physics.lambda();
        let alpha = self.physics.alpha();
        let mut finite = true;
        if lam == 0.0 {
            return u.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        }
        for z in u.iter_mut() {
            let m = abs_pow(*z, alpha);
            finite &= m.is_finite();
            *z *= Complex64::from_polar(1.0, lam * tau * m);
        }
        finite
    }

    fn linear(&self, u: &mut [Complex64]) {
        transform(u, &self.shape, Direction::Forward);
        for (z, p) in u.iter_mut().zip(&self.phase) {
            *z *= p;
        }
        transform(u, &self.shape, Direction::Inverse);
    }

    /// Advances physical samples by `steps` Strang steps. Adjacent half
    /// nonlinear substeps are merged. On failure returns the 0-based index
    /// of the offending step.
    pub fn advance(&self, u: &mut [Complex64], steps: usize) -> Result<(), usize> {
        if steps == 0 {
            return Ok(());
        }
        let half = 0.5 * self.dt;
        if !self.nonlinear(u, half) {
            return Err(0);
        }
        for s in 0..steps {
            self.linear(u);
            let tau = if s + 1 < steps { self.dt } else { half };
            if !self.nonlinear(u, tau) {
                return Err(s);
            }
        }
        Ok(())
    }
}

/// One Strang step: half nonlinear, full linear, half nonlinear.
pub fn strang_step(
    field: &SpectralField,
    physics: &PhysicsParams,
    dt: f64,
) -> Result<SpectralField, IntegratorError> {
    let st = Stepper::new(*field.grid(), *physics, dt);
    let mut u = field.to_physical();
    st.advance(&mut u, 1).map_err(|_| IntegratorError::BlowUp {
        step: 1,
        time: field.time() + dt,
        last_sample: None,
    })?;
    Ok(SpectralField::from_physical(
        *field.grid(),
        u,
        field.time() + dt,
    )?)
}

/// Flags mass near the box boundary: fires when the heaviest cube of side
/// `r_side` touching the strip `|x_i| >= 3L/8` carries more than `fraction`
/// of the total mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryGuard {
    pub r_side: f64,
    pub fraction: f64,
}

impl Default for BoundaryGuard {
    fn default() -> Self {
        Self {
            r_side: 1.0,
            fraction: 5e-3,
        }
    }
}

impl BoundaryGuard {
    pub fn edge_fraction(&self, field: &SpectralField) -> f64 {
        let g = field.grid();
        let cells = cube_cells(g, self.r_side.max(g.dx())).unwrap_or(1);
        let m = mass(field);
        if m == 0.0 {
            return 0.0;
        }
        let rho = crate::spectral::cube_density(field);
        edge_cube_sup(g, &rho, cells) / m
    }

    pub fn breached(&self, field: &SpectralField) -> bool {
        self.edge_fraction(field) > self.fraction
    }
}

/// State handed to sinks at each sampling time.
pub struct Sample<'a> {
    pub index: usize,
    pub step: usize,
    pub field: &'a SpectralField,
    /// Sticky: once the guard fires it stays set.
    pub boundary_flag: bool,
}

pub trait Sink {
    fn observe(&mut self, sample: &Sample<'_>) -> anyhow::Result<()>;
}

impl<F: FnMut(&Sample<'_>) -> anyhow::Result<()>> Sink for F {
    fn observe(&mut self, sample: &Sample<'_>) -> anyhow::Result<()> {
        self(sample)
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub final_field: SpectralField,
    pub guard_fired: bool,
    pub samples: usize,
}

/// Uniform run: samples at every `sample_every` steps from 0, final state at
/// `round(t_end / dt)` steps.
pub fn evolve(
    initial: &SpectralField,
    physics: &PhysicsParams,
    control: &StepControl,
    guard: Option<BoundaryGuard>,
    sinks: &mut [&mut dyn Sink],
) -> Result<EvolveOutcome, IntegratorError> {
    let steps = control.sample_steps();
    evolve_schedule(
        initial,
        physics,
        control.dt,
        &steps,
        control.n_steps(),
        guard,
        sinks,
    )
}

/// Samples at the listed step indices (non-decreasing) and stops after
/// `total_steps`.
pub fn evolve_schedule(
    initial: &SpectralField,
    physics: &PhysicsParams,
    dt: f64,
    sample_steps: &[usize],
    total_steps: usize,
    guard: Option<BoundaryGuard>,
    sinks: &mut [&mut dyn Sink],
) -> Result<EvolveOutcome, IntegratorError> {
    if sample_steps.windows(2).any(|w| w[1] < w[0]) {
        return Err(IntegratorError::Argument(
            "sample steps must be non-decreasing".into(),
        ));
    }
    if sample_steps.last().is_some_and(|&s| s > total_steps) {
        return Err(IntegratorError::Argument(
            "sample step beyond the end of the run".into(),
        ));
    }
    let grid = *initial.grid();
    let st = Stepper::new(grid, *physics, dt);
    let t0 = initial.time();
    let mut u = initial.to_physical();
    let mut cur = 0usize;
    let mut flag = false;
    let mut last = None;
    let blow = |cur: usize, s: usize, last: Option<usize>| IntegratorError::BlowUp {
        step: cur + s + 1,
        time: t0 + (cur + s + 1) as f64 * dt,
        last_sample: last,
    };
    for (idx, &target) in sample_steps.iter().enumerate() {
        st.advance(&mut u, target - cur)
            .map_err(|s| blow(cur, s, last))?;
        cur = target;
        let field = SpectralField::from_physical(grid, u.clone(), t0 + cur as f64 * dt)?;
        if let Some(g) = &guard {
            flag |= g.breached(&field);
        }
        let sample = Sample {
            index: idx,
            step: cur,
            field: &field,
            boundary_flag: flag,
        };
        for sink in sinks.iter_mut() {
            sink.observe(&sample).map_err(|e| IntegratorError::Sink {
                index: idx,
                message: format!("{e:#}"),
            })?;
        }
        last = Some(idx);
    }
    st.advance(&mut u, total_steps - cur)
        .map_err(|s| blow(cur, s, last))?;
    let final_field = SpectralField::from_physical(grid, u, t0 + total_steps as f64 * dt)?;
    Ok(EvolveOutcome {
        final_field,
        guard_fired: flag,
        samples: sample_steps.len(),
    })
}
