use super::norms::lebesgue_physical;
use super::{sobolev_h1, Grid, Result, SpectralError, SpectralField};

/// Number of x-cells spanned by a cube of side `r_side` (nearest integer).
pub fn cube_cells(grid: &Grid, r_side: f64) -> Result<usize> {
    let dx = grid.dx();
    if !(r_side >= dx) {
        return Err(SpectralError::Argument(format!(
            "cube side {r_side} is below one grid cell ({dx})"
        )));
    }
    Ok(((r_side / dx).round() as usize).clamp(1, grid.nx()))
}

/// Periodic moving-window sums of width `cells` along `axis`; entry `i`
/// holds the window starting at index `i`.
fn box_sum_axis(data: &[f64], shape: &[usize], axis: usize, cells: usize) -> Vec<f64> {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![0.0; data.len()];
    for o in 0..outer {
        for j in 0..stride {
            let at = |i: usize| o * n * stride + (i % n) * stride + j;
            let mut s: f64 = (0..cells).map(|i| data[at(i)]).sum();
            for i in 0..n {
                out[at(i)] = s;
                s += data[at(i + cells)] - data[at(i)];
            }
        }
    }
    out
}

fn window_sums(grid: &Grid, rho: &[f64], cells: usize) -> Vec<f64> {
    let shape = grid.x_shape();
    let mut w = rho.to_vec();
    for ax in 0..grid.d() {
        w = box_sum_axis(&w, &shape, ax, cells);
    }
    w
}

/// Sup over grid-aligned cubes of `sum rho * dx^d`.
pub fn cube_sup_mass_rho(grid: &Grid, rho: &[f64], cells: usize) -> f64 {
    window_sums(grid, rho, cells)
        .into_iter()
        .fold(0.0, f64::max)
        * grid.cell()
}

/// Sup over cubes that touch the outer strip `|x_i| >= 3L/8`.
pub fn edge_cube_sup(grid: &Grid, rho: &[f64], cells: usize) -> f64 {
    let nx = grid.nx();
    let edge = 3.0 * grid.l() / 8.0;
    let touches: Vec<bool> = (0..nx)
        .map(|i| (0..cells).any(|c| grid.x_coord((i + c) % nx).abs() >= edge))
        .collect();
    let sums = window_sums(grid, rho, cells);
    let mut best = 0.0f64;
    grid.for_each_x(|ix, iv| {
        let hit = touches[iv[0]] || (grid.d() == 2 && touches[iv[1]]);
        if hit {
            best = best.max(sums[ix]);
        }
    });
    best * grid.cell()
}

/// `sup_{x0} int_{Q(x0, r) x T} |u|^2`.
pub fn cube_sup_mass(field: &SpectralField, r_side: f64) -> Result<f64> {
    let g = field.grid();
    let cells = cube_cells(g, r_side)?;
    Ok(cube_sup_mass_rho(g, &cube_density(field), cells))
}

/// `rho(x) = int |u(x, y)|^2 dy` on the x-grid.
pub fn cube_density(field: &SpectralField) -> Vec<f64> {
    let g = field.grid();
    let u = field.to_physical();
    let dy = g.dy();
    u.chunks(g.ny())
        .map(|line| line.iter().map(|z| z.norm_sqr()).sum::<f64>() * dy)
        .collect()
}

/// Sides of the localized Gagliardo-Nirenberg inequality
/// `||u||_p <= C (sup-cube L^2)^{2/(d+3)} ||u||_{H^1}^{(d+1)/(d+3)}`
/// with `p = 2 + 4/(d+1)` and unit cubes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnCheck {
    pub d: usize,
    pub lhs: f64,
    pub cube_l2: f64,
    pub h1: f64,
}

impl GnCheck {
    pub fn exponent(&self) -> f64 {
        2.0 + 4.0 / (self.d as f64 + 1.0)
    }

    /// `lhs / rhs` with unit constant; zero for the zero field.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            return 0.0;
        }
        let d = self.d as f64;
        self.lhs / (self.cube_l2.powf(2.0 / (d + 3.0)) * self.h1.powf((d + 1.0) / (d + 3.0)))
    }
}

pub fn localized_gn_check(field: &SpectralField) -> Result<GnCheck> {
    let g = field.grid();
    let d = g.d();
    let p = 2.0 + 4.0 / (d as f64 + 1.0);
    let lhs = lebesgue_physical(&field.to_physical(), g.weight(), p);
    let cube_l2 = cube_sup_mass(field, 1.0)?.sqrt();
    Ok(GnCheck {
        d,
        lhs,
        cube_l2,
        h1: sobolev_h1(field),
    })
}
