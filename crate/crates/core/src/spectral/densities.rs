use super::{abs_pow, SpectralField};

/// y-integrated densities on the x-grid.
///
/// `k` holds the symmetric kinetic tensor `Re int d_i u conj(d_j u) dy` as
/// its upper triangle in row order: `[K11]` for `d = 1`, `[K11, K12, K22]`
/// for `d = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySet {
    pub d: usize,
    pub rho: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
    pub grad_rho: Vec<Vec<f64>>,
}

impl DensitySet {
    pub fn k_index(d: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match d {
            1 => 0,
            _ => i + j,
        }
    }

    pub fn k(&self, i: usize, j: usize) -> &[f64] {
        &self.k[Self::k_index(self.d, i, j)]
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// `rho`, `P = int Im(conj(u) grad u)`, `K`, `nu = int |u|^{alpha+2}` and
/// `grad rho = int 2 Re(conj(u) grad u)`, with spectral x-derivatives and
/// the rectangle rule in y.
pub fn densities(field: &SpectralField, alpha: f64) -> DensitySet {
    let g = field.grid();
    let d = g.d();
    let ny = g.ny();
    let nxl = g.x_len();
    let dy = g.dy();
    let u = field.to_physical();
    let du: Vec<Vec<_>> = (0..d).map(|j| field.dx(j).to_physical()).collect();

    let mut rho = vec![0.0; nxl];
    let mut nu = vec![0.0; nxl];
    let mut p = vec![vec![0.0; nxl]; d];
    let mut grad_rho = vec![vec![0.0; nxl]; d];
    let mut k = vec![vec![0.0; nxl]; d * (d + 1) / 2];
    for ix in 0..nxl {
        for iy in 0..ny {
            let i = ix * ny + iy;
            let z = u[i];
            rho[ix] += z.norm_sqr();
            nu[ix] += abs_pow(z, alpha + 2.0);
            for a in 0..d {
                let c = z.conj() * du[a][i];
                p[a][ix] += c.im;
                grad_rho[a][ix] += 2.0 * c.re;
                for b in a..d {
                    k[DensitySet::k_index(d, a, b)][ix] += (du[a][i] * du[b][i].conj()).re;
                }
            }
        }
    }
    for v in [&mut rho, &mut nu]
        .into_iter()
        .chain(p.iter_mut())
        .chain(grad_rho.iter_mut())
        .chain(k.iter_mut())
    {
        v.iter_mut().for_each(|x| *x *= dy);
    }
    DensitySet {
        d,
        rho,
        p,
        k,
        nu,
        grad_rho,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lebesgue_norm, Complex64, Grid};
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_densities() {
        let l = 4.0 * PI;
        let g = Grid::new(1, l, 32, 8).unwrap();
        let (a, xi0) = (1.3, 1.5);
        let f =
            SpectralField::from_profile(g, |x, _| Complex64::from_polar(a, xi0 * x[0])).unwrap();
        let ds = densities(&f, 3.0);
        let c = 2.0 * PI * a * a;
        for ix in 0..g.x_len() {
            assert!((ds.rho[ix] - c).abs() < 1e-12);
            assert!((ds.p[0][ix] - c * xi0).abs() < 1e-11);
            assert!((ds.k[0][ix] - c * xi0 * xi0).abs() < 1e-10);
            assert!(ds.grad_rho[0][ix].abs() < 1e-11);
        }
    }

    #[test]
    fn real_field_has_no_current() {
        let g = Grid::new(2, 12.0, 32, 8).unwrap();
        let f = SpectralField::from_profile(g, |x, y| {
            Complex64::new(
                (-(x[0] * x[0] + 0.5 * x[1] * x[1])).exp() * (2.0 + y.cos()),
                0.0,
            )
        })
        .unwrap();
        let ds = densities(&f, 2.0);
        assert!(ds.p.iter().flatten().all(|v| v.abs() < 1e-12));
        let mass: f64 = ds.rho.iter().sum::<f64>() * g.cell();
        let l2 = lebesgue_norm(&f, 2.0).unwrap();
        assert!((mass / (l2 * l2) - 1.0).abs() < 1e-12);
        let grad = f.weighted_energy(|xi, _| xi[0] * xi[0] + xi[1] * xi[1]);
        let tr: f64 = (ds.k(0, 0).iter().sum::<f64>() + ds.k(1, 1).iter().sum::<f64>()) * g.cell();
        assert!((tr / grad - 1.0).abs() < 1e-12);
    }
}
