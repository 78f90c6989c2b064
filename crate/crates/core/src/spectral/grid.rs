use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Result, SpectralError};

/// Uniform grid: `Nx` points per x-dimension on a box of side `L`, `Ny`
/// points on the circle of length `2pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    l: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(d: usize, l: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(SpectralError::Grid(format!("d must be 1 or 2, got {d}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(SpectralError::Grid(format!("L must be positive, got {l}")));
        }
        for (name, n) in [("Nx", nx), ("Ny", ny)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(SpectralError::Grid(format!(
                    "{name} must be a power of two >= 4, got {n}"
                )));
            }
        }
        Ok(Self { d, l, nx, ny })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Array shape `[Nx; d] ++ [Ny]`.
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.nx; self.d];
        s.push(self.ny);
        s
    }

    pub fn x_shape(&self) -> Vec<usize> {
        vec![self.nx; self.d]
    }

    pub fn len(&self) -> usize {
        self.x_len() * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_len(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    pub fn dx(&self) -> f64 {
        self.l / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * PI / self.ny as f64
    }

    /// Volume of one x-cell, `dx^d`.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    /// Rectangle-rule weight `dx^d * 2pi/Ny`.
    pub fn weight(&self) -> f64 {
        self.cell() * self.dy()
    }

    /// Weight turning `sum |coefficient|^2` into an `L^2` integral.
    pub fn coefficient_weight(&self) -> f64 {
        self.weight() / self.len() as f64
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.dx()
    }

    pub fn y_coord(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    /// Signed integer frequency for wrapped index `k` among `n` points.
    pub fn wrapped(k: usize, n: usize) -> i64 {
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Angular x-frequencies `2 pi k / L` in wrapped order.
    pub fn xi_values(&self) -> Vec<f64> {
        let f = 2.0 * PI / self.l;
        (0..self.nx)
            .map(|k| f * Self::wrapped(k, self.nx) as f64)
            .collect()
    }

    /// y-frequencies in wrapped order.
    pub fn n_values(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|n| Self::wrapped(n, self.ny) as f64)
            .collect()
    }

    /// Largest value of `|xi|^2 + n^2` on the grid.
    pub fn max_symbol(&self) -> f64 {
        let xi = PI * self.nx as f64 / self.l;
        let n = (self.ny / 2) as f64;
        self.d as f64 * xi * xi + n * n
    }

    /// Visits every mode with its flat index, x-frequency vector and
    /// y-frequency. Unused components of the x-frequency are zero.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 2], f64)) {
        let xi = self.xi_values();
        let nv = self.n_values();
        let mut idx = 0;
        self.for_each_x(|_, kv| {
            let xv = [xi[kv[0]], if self.d == 2 { xi[kv[1]] } else { 0.0 }];
            for n in &nv {
                f(idx, xv, *n);
                idx += 1;
            }
        });
    }

    /// Visits every x-mode (or x-point) with its flat index and per-axis
    /// indices.
    pub fn for_each_x(&self, mut f: impl FnMut(usize, [usize; 2])) {
        match self.d {
            1 => (0..self.nx).for_each(|i| f(i, [i, 0])),
            _ => {
                for i in 0..self.nx {
                    for j in 0..self.nx {
                        f(i * self.nx + j, [i, j]);
                    }
                }
            }
        }
    }

    /// Physical x-coordinates of flat x-index `idx`.
    pub fn x_point(&self, idx: usize) -> [f64; 2] {
        match self.d {
            1 => [self.x_coord(idx), 0.0],
            _ => [self.x_coord(idx / self.nx), self.x_coord(idx % self.nx)],
        }
    }
}
