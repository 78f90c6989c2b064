//! Interaction Morawetz diagnostics with the weight `phi(x) = <x>`.
//!
//! Every two-point integral reduces, after integrating out `y`, to sums of
//! y-integrated densities against convolutions with derivatives of `phi`.
//! With `A` the gradient of the kinetic tensor, the combination returned by
//! [`MorawetzEngine::terms`] satisfies `lhs - rhs = S` up to rounding, and
//! `S` is a sum of nonnegative quadratic forms.

mod kernels;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::integrator::{evolve_schedule, IntegratorError, PhysicsParams, Sample};
use crate::spectral::{
    cube_cells, cube_sup_mass_rho, densities, transform_axes, Complex64, DensitySet, Direction,
    Grid, Result as SpectralResult, SpectralError, SpectralField,
};

pub use kernels::{grad_phi, hess_phi, lap_phi, phi, MorawetzKernels};

/// Individual contributions; `lhs = kin_k_rho + kin_rho_k + kin_grad + cross
/// + pot_factor * (pot_nu_rho + pot_rho_nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorawetzTerms {
    /// `4 sum K : (D^2 phi * rho)`
    pub kin_k_rho: f64,
    /// `4 sum rho (D^2 phi : * K)`
    pub kin_rho_k: f64,
    /// `2 sum grad rho . (D^2 phi * grad rho)`
    pub kin_grad: f64,
    /// `-8 sum P . (D^2 phi * P)`
    pub cross: f64,
    /// `sum nu (Lap phi * rho)`
    pub pot_nu_rho: f64,
    /// `sum rho (Lap phi * nu)`
    pub pot_rho_nu: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub s: f64,
}

impl MorawetzTerms {
    /// `lhs - rhs >= -tol * max(|lhs|, |rhs|, mass^2)`.
    pub fn inequality_holds(&self, mass: f64, tol: f64) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(mass * mass);
        self.lhs - self.rhs >= -tol * scale
    }
}

/// Kernels bound to one grid; reused across samples.
pub struct MorawetzEngine {
    kernels: MorawetzKernels,
}

impl MorawetzEngine {
    pub fn new(grid: Grid) -> Self {
        Self {
            kernels: MorawetzKernels::new(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.kernels.grid()
    }

    fn check(&self, field: &SpectralField) -> SpectralResult<()> {
        if field.grid() != self.grid() {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.grid().cell()
    }

    /// `J = -2 sum P . (grad phi * rho) + 2 sum rho (grad phi . * P)`.
    pub fn j_from(&self, ds: &DensitySet) -> f64 {
        let k = &self.kernels;
        let mut j = 0.0;
        for a in 0..ds.d {
            j -= 2.0 * self.dot(&ds.p[a], &k.conv_grad(a, &ds.rho));
            j += 2.0 * self.dot(&ds.rho, &k.conv_grad(a, &ds.p[a]));
        }
        j
    }

    pub fn j(&self, field: &SpectralField) -> SpectralResult<f64> {
        self.check(field)?;
        Ok(self.j_from(&densities(field, 1.0)))
    }

    pub fn terms_from(&self, ds: &DensitySet, physics: &PhysicsParams) -> MorawetzTerms {
        let k = &self.kernels;
        let d = ds.d;
        let (mut kin_k_rho, mut kin_rho_k, mut kin_grad, mut cross) = (0.0, 0.0, 0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                kin_k_rho += 4.0 * self.dot(ds.k(a, b), &k.conv_hess(a, b, &ds.rho));
                kin_rho_k += 4.0 * self.dot(&ds.rho, &k.conv_hess(a, b, ds.k(a, b)));
                kin_grad += 2.0 * self.dot(&ds.grad_rho[a], &k.conv_hess(a, b, &ds.grad_rho[b]));
                cross -= 8.0 * self.dot(&ds.p[a], &k.conv_hess(a, b, &ds.p[b]));
            }
        }
        let lam = physics.lambda();
        let alpha = physics.alpha();
        let (pot_nu_rho, pot_rho_nu) = if lam == 0.0 {
            (0.0, 0.0)
        } else {
            (
                self.dot(&ds.nu, &k.conv_lap(&ds.rho)),
                self.dot(&ds.rho, &k.conv_lap(&ds.nu)),
            )
        };
        let s = kin_k_rho + kin_rho_k + kin_grad + cross;
        let lhs = s + lam * 2.0 * alpha / (alpha + 2.0) * (pot_nu_rho + pot_rho_nu);
        let rhs = lam * 4.0 * alpha / (alpha + 2.0) * pot_nu_rho;
        MorawetzTerms {
            kin_k_rho,
            kin_rho_k,
            kin_grad,
            cross,
            pot_nu_rho,
            pot_rho_nu,
            lhs,
            rhs,
            s,
        }
    }

    pub fn terms(
        &self,
        field: &SpectralField,
        physics: &PhysicsParams,
    ) -> SpectralResult<MorawetzTerms> {
        self.check(field)?;
        Ok(self.terms_from(&densities(field, physics.alpha()), physics))
    }

    /// Positivity certificate `S`.
    pub fn positivity(&self, field: &SpectralField) -> SpectralResult<f64> {
        let lin = PhysicsParams::linear(1.0).expect("valid");
        Ok(self.terms(field, &lin)?.s)
    }

    /// `|(J(t+d) - J(t-d)) / 2d - lhs(t)|` with `d` read from the time tags.
    pub fn dj_dt_check(
        &self,
        minus: &SpectralField,
        mid: &SpectralField,
        plus: &SpectralField,
        physics: &PhysicsParams,
    ) -> SpectralResult<FdCheck> {
        let delta = central_delta(minus, mid, plus)?;
        let fd = (self.j(plus)? - self.j(minus)?) / (2.0 * delta);
        let exact = self.terms(mid, physics)?.lhs;
        Ok(FdCheck {
            delta,
            finite_difference: fd,
            exact,
            residual: (fd - exact).abs(),
        })
    }
}

fn central_delta(
    minus: &SpectralField,
    mid: &SpectralField,
    plus: &SpectralField,
) -> SpectralResult<f64> {
    let d1 = mid.time() - minus.time();
    let d2 = plus.time() - mid.time();
    if !(d1 > 0.0) || (d1 - d2).abs() > 1e-9 * d1.max(1.0) {
        return Err(SpectralError::Argument(format!(
            "snapshots must be equally spaced in time, got steps {d1} and {d2}"
        )));
    }
    Ok(0.5 * (d1 + d2))
}

/// Outcome of a central-difference check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub delta: f64,
    pub finite_difference: f64,
    pub exact: f64,
    pub residual: f64,
}

/// `J` for a single field.
pub fn morawetz_j(field: &SpectralField) -> f64 {
    MorawetzEngine::new(*field.grid()).j_from(&densities(field, 1.0))
}

/// `(lhs, rhs)` for a single field.
pub fn morawetz_terms(field: &SpectralField, physics: &PhysicsParams) -> MorawetzTerms {
    MorawetzEngine::new(*field.grid()).terms_from(&densities(field, physics.alpha()), physics)
}

pub fn positivity_certificate(field: &SpectralField) -> f64 {
    morawetz_terms(field, &PhysicsParams::linear(1.0).expect("valid")).s
}

pub fn finite_difference_dj_dt_check(
    minus: &SpectralField,
    mid: &SpectralField,
    plus: &SpectralField,
    physics: &PhysicsParams,
) -> SpectralResult<FdCheck> {
    MorawetzEngine::new(*mid.grid()).dj_dt_check(minus, mid, plus, physics)
}

/// Central-difference checks at several half-widths around one time, with
/// the observed convergence orders between consecutive widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdConvergence {
    pub t: f64,
    pub checks: Vec<FdCheck>,
    pub orders: Vec<f64>,
}

/// Evolves `initial` once and evaluates the `dJ/dt` check at `t_c` for each
/// half-width in `deltas` (rounded to whole steps, sorted ascending).
pub fn dj_dt_convergence(
    initial: &SpectralField,
    physics: &PhysicsParams,
    dt: f64,
    t_c: f64,
    deltas: &[f64],
) -> Result<FdConvergence, IntegratorError> {
    let c = (t_c / dt).round() as usize;
    let mut hs: Vec<usize> = deltas.iter().map(|d| (d / dt).round() as usize).collect();
    hs.sort_unstable();
    hs.dedup();
    if hs.first().is_none_or(|&h| h == 0 || h > c) {
        return Err(IntegratorError::Argument(format!(
            "half-widths must lie in [dt, t_c], got {deltas:?} with t_c = {t_c}"
        )));
    }
    let mut steps: Vec<usize> = hs.iter().flat_map(|&h| [c - h, c + h]).chain([c]).collect();
    steps.sort_unstable();
    steps.dedup();
    let mut kept: BTreeMap<usize, SpectralField> = BTreeMap::new();
    let mut sink = |s: &Sample<'_>| -> anyhow::Result<()> {
        kept.insert(s.step, s.field.clone());
        Ok(())
    };
    let total = *steps.last().expect("nonempty");
    evolve_schedule(initial, physics, dt, &steps, total, None, &mut [&mut sink])?;
    let engine = MorawetzEngine::new(*initial.grid());
    let checks = hs
        .iter()
        .map(|&h| engine.dj_dt_check(&kept[&(c - h)], &kept[&c], &kept[&(c + h)], physics))
        .collect::<Result<Vec<_>, _>>()?;
    let orders = checks
        .windows(2)
        .map(|w| (w[1].residual / w[0].residual).ln() / (w[1].delta / w[0].delta).ln())
        .collect();
    Ok(FdConvergence {
        t: kept[&c].time(),
        checks,
        orders,
    })
}

/// Smooth bump `exp(1 - 1/(1 - (|x - c|/w)^2))` supported in `|x - c| < w`.
pub fn bump(grid: &Grid, center: [f64; 2], width: f64) -> Vec<f64> {
    let mut out = vec![0.0; grid.x_len()];
    let d = grid.d();
    grid.for_each_x(|ix, _| {
        let x = grid.x_point(ix);
        let r2: f64 = (0..d).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() / (width * width);
        if r2 < 1.0 {
            out[ix] = (1.0 - 1.0 / (1.0 - r2)).exp();
        }
    });
    out
}

/// `|d/dt int psi |u|^2 - (-2 Im int conj(u) grad psi . grad u)|`, time
/// derivative by central difference.
pub fn local_mass_flux_residual(
    minus: &SpectralField,
    mid: &SpectralField,
    plus: &SpectralField,
    psi: &[f64],
) -> SpectralResult<FdCheck> {
    let g = *mid.grid();
    if psi.len() != g.x_len() {
        return Err(SpectralError::Argument(
            "psi must be sampled on the x-grid".into(),
        ));
    }
    let delta = central_delta(minus, mid, plus)?;
    let weighted = |f: &SpectralField| -> f64 {
        let rho = crate::spectral::cube_density(f);
        rho.iter().zip(psi).map(|(r, p)| r * p).sum::<f64>() * g.cell()
    };
    let fd = (weighted(plus) - weighted(minus)) / (2.0 * delta);
    let ds = densities(mid, 1.0);
    let mut flux = 0.0;
    for a in 0..g.d() {
        let gp = x_derivative(&g, psi, a);
        flux += ds.p[a].iter().zip(&gp).map(|(p, q)| p * q).sum::<f64>();
    }
    let exact = -2.0 * flux * g.cell();
    Ok(FdCheck {
        delta,
        finite_difference: fd,
        exact,
        residual: (fd - exact).abs(),
    })
}

fn x_derivative(grid: &Grid, f: &[f64], axis: usize) -> Vec<f64> {
    let shape = grid.x_shape();
    let axes: Vec<usize> = (0..grid.d()).collect();
    let mut v: Vec<Complex64> = f.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    transform_axes(&mut v, &shape, &axes, Direction::Forward);
    let xi = grid.xi_values();
    let nx = grid.nx();
    grid.for_each_x(|ix, iv| {
        let k = iv[axis];
        let w = if k == nx / 2 { 0.0 } else { xi[k] };
        v[ix] *= Complex64::new(0.0, w);
    });
    transform_axes(&mut v, &shape, &axes, Direction::Inverse);
    v.iter().map(|z| z.re).collect()
}

/// Running trapezoid integral of `cube_sup^((alpha+4)/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeSupAccumulator {
    cells: usize,
    power: f64,
    last: Option<(f64, f64)>,
    integral: f64,
    increments: Vec<f64>,
}

impl CubeSupAccumulator {
    pub fn new(grid: &Grid, r_side: f64, alpha: f64) -> SpectralResult<Self> {
        Ok(Self {
            cells: cube_cells(grid, r_side)?,
            power: 0.5 * (alpha + 4.0),
            last: None,
            integral: 0.0,
            increments: Vec::new(),
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Adds a sample given the cube-sup mass at time `t`; returns the
    /// running integral.
    pub fn push_value(&mut self, t: f64, cube_sup: f64) -> f64 {
        let v = cube_sup.powf(self.power);
        if let Some((t0, v0)) = self.last {
            let inc = 0.5 * (v0 + v) * (t - t0);
            self.integral += inc;
            self.increments.push(inc);
        }
        self.last = Some((t, v));
        self.integral
    }

    /// Computes the cube-sup mass of `field` and adds it; returns
    /// `(cube_sup, integral)`.
    pub fn push(&mut self, field: &SpectralField) -> (f64, f64) {
        let rho = crate::spectral::cube_density(field);
        let c = cube_sup_mass_rho(field.grid(), &rho, self.cells);
        (c, self.push_value(field.time(), c))
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }
}

/// One diagnostic sample of the Morawetz quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorawetzSample {
    pub t: f64,
    pub j: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub s: f64,
    pub cube_sup: f64,
    pub cube_sup_integral: f64,
}
