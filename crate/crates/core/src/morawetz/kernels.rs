use crate::spectral::{transform, Complex64, Direction, Grid};

/// Samples of `phi = <x>` and its derivatives at the displacements
/// `m dx`, `|m| <= Nx - 1` per axis, transformed on a zero-padded grid of
/// `2 Nx` points per axis so products of transforms give linear (not
/// circular) convolutions.
pub struct MorawetzKernels {
    grid: Grid,
    padded: Vec<usize>,
    grad: Vec<Vec<Complex64>>,
    hess: Vec<Vec<Complex64>>,
    lap: Vec<Complex64>,
}

/// Upper-triangle index of `(a, b)` in a symmetric `d x d` array.
pub(crate) fn sym(d: usize, a: usize, b: usize) -> usize {
    crate::spectral::DensitySet::k_index(d, a, b)
}

pub fn phi(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `grad phi = x / <x>`.
pub fn grad_phi(x: &[f64], a: usize) -> f64 {
    x[a] / phi(x)
}

/// `D^2 phi = I / <x> - x x^T / <x>^3`.
pub fn hess_phi(x: &[f64], a: usize, b: usize) -> f64 {
    let p = phi(x);
    let delta = if a == b { 1.0 } else { 0.0 };
    delta / p - x[a] * x[b] / (p * p * p)
}

/// `Lap phi = (d + (d - 1)|x|^2) / <x>^3`.
pub fn lap_phi(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let p = phi(x);
    (d + (d - 1.0) * r2) / (p * p * p)
}

impl MorawetzKernels {
    pub fn new(grid: Grid) -> Self {
        let d = grid.d();
        let nx = grid.nx();
        let m = 2 * nx;
        let padded = vec![m; d];
        let total = m.pow(d as u32);
        let dx = grid.dx();
        // displacement for padded index i: wrapped offset times dx; the
        // unused slot at offset -Nx stays zero
        let disp = |i: usize| -> Option<f64> {
            let off = Grid::wrapped(i, m);
            if off == -(nx as i64) {
                None
            } else {
                Some(off as f64 * dx)
            }
        };
        let sample = |f: &dyn Fn(&[f64]) -> f64| -> Vec<Complex64> {
            let mut v = vec![Complex64::default(); total];
            for (idx, slot) in v.iter_mut().enumerate() {
                let coords: Option<Vec<f64>> = match d {
                    1 => disp(idx).map(|x| vec![x]),
                    _ => disp(idx / m).zip(disp(idx % m)).map(|(a, b)| vec![a, b]),
                };
                if let Some(x) = coords {
                    *slot = Complex64::new(f(&x), 0.0);
                }
            }
            transform(&mut v, &padded, Direction::Forward);
            v
        };
        let grad = (0..d).map(|a| sample(&|x| grad_phi(x, a))).collect();
        let mut hess = Vec::new();
        for a in 0..d {
            for b in a..d {
                hess.push(sample(&|x| hess_phi(x, a, b)));
            }
        }
        let lap = sample(&lap_phi);
        Self {
            grid,
            padded,
            grad,
            hess,
            lap,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(K * f)(x_i) = sum_j K(x_i - x_j) f(x_j) dx^d`.
    fn conv(&self, k_hat: &[Complex64], f: &[f64]) -> Vec<f64> {
        let d = self.grid.d();
        let nx = self.grid.nx();
        let m = 2 * nx;
        let mut v = vec![Complex64::default(); k_hat.len()];
        self.grid.for_each_x(|ix, iv| {
            let dst = if d == 1 { iv[0] } else { iv[0] * m + iv[1] };
            v[dst] = Complex64::new(f[ix], 0.0);
        });
        transform(&mut v, &self.padded, Direction::Forward);
        for (z, k) in v.iter_mut().zip(k_hat) {
            *z *= k;
        }
        transform(&mut v, &self.padded, Direction::Inverse);
        let cell = self.grid.cell();
        let mut out = vec![0.0; f.len()];
        self.grid.for_each_x(|ix, iv| {
            let src = if d == 1 { iv[0] } else { iv[0] * m + iv[1] };
            out[ix] = v[src].re * cell;
        });
        out
    }

    pub fn conv_grad(&self, a: usize, f: &[f64]) -> Vec<f64> {
        self.conv(&self.grad[a], f)
    }

    pub fn conv_hess(&self, a: usize, b: usize, f: &[f64]) -> Vec<f64> {
        self.conv(&self.hess[sym(self.grid.d(), a, b)], f)
    }

    pub fn conv_lap(&self, f: &[f64]) -> Vec<f64> {
        self.conv(&self.lap, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_identities() {
        for x in [[0.3, -1.2], [4.0, 0.0], [-2.5, 7.0]] {
            let tr = hess_phi(&x, 0, 0) + hess_phi(&x, 1, 1);
            assert!((tr - lap_phi(&x)).abs() < 1e-14);
            // PSD 2x2: nonnegative trace and determinant
            let det = hess_phi(&x, 0, 0) * hess_phi(&x, 1, 1) - hess_phi(&x, 0, 1).powi(2);
            assert!(det > -1e-15 && tr > 0.0);
            assert_eq!(grad_phi(&x, 0), -grad_phi(&[-x[0], -x[1]], 0));
        }
        assert!((hess_phi(&[2.0], 0, 0) - lap_phi(&[2.0])).abs() < 1e-15);
    }

    #[test]
    fn conv_matches_direct_sum() {
        let g = Grid::new(2, 6.0, 8, 4).unwrap();
        let k = MorawetzKernels::new(g);
        let f: Vec<f64> = (0..64).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
        let got = k.conv_hess(0, 1, &f);
        for i in 0..64 {
            let xi = g.x_point(i);
            let want: f64 = (0..64)
                .map(|j| {
                    let xj = g.x_point(j);
                    hess_phi(&[xi[0] - xj[0], xi[1] - xj[1]], 0, 1) * f[j]
                })
                .sum::<f64>()
                * g.cell();
            assert!((got[i] - want).abs() < 1e-12, "{i}");
        }
    }
}
