use super::fft::{transform, Direction};
use super::{Complex64, Grid, Result, SpectralError};

/// Fourier coefficients of `u(t, x, y)` on a [`Grid`] with a time tag.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    time: f64,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            coeffs: vec![Complex64::default(); grid.len()],
            grid,
            time: 0.0,
        }
    }

    /// Samples `sampler(x, y)` on the grid and transforms; `x` has `d`
    /// components.
    pub fn from_profile(grid: Grid, sampler: impl Fn(&[f64], f64) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let d = grid.d();
        grid.for_each_x(|ix, _| {
            let x = grid.x_point(ix);
            for j in 0..grid.ny() {
                values.push(sampler(&x[..d], grid.y_coord(j)));
            }
        });
        Self::from_physical(grid, values, 0.0)
    }

    pub fn from_physical(grid: Grid, mut values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SpectralError::Argument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(SpectralError::NonFinite(i));
        }
        transform(&mut values, &grid.shape(), Direction::Forward);
        Ok(Self {
            grid,
            coeffs: values,
            time,
        })
    }

    pub fn from_coefficients(grid: Grid, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::Argument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs, time })
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut v = self.coeffs.clone();
        transform(&mut v, &self.grid.shape(), Direction::Inverse);
        v
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    /// Coefficient at signed frequencies `(k, n)`; `k` has `d` entries.
    pub fn coefficient(&self, k: &[i64], n: i64) -> Complex64 {
        let wrap = |f: i64, len: usize| f.rem_euclid(len as i64) as usize;
        let nx = self.grid.nx();
        let kx = k.iter().fold(0, |acc, &ki| acc * nx + wrap(ki, nx));
        self.coeffs[kx * self.grid.ny() + wrap(n, self.grid.ny())]
    }

    /// Applies a Fourier multiplier `m(xi, n)`.
    pub fn apply_multiplier(&self, m: impl Fn([f64; 2], f64) -> Complex64) -> Self {
        let mut out = self.coeffs.clone();
        self.grid.for_each_mode(|i, xi, n| out[i] *= m(xi, n));
        Self {
            grid: self.grid,
            coeffs: out,
            time: self.time,
        }
    }

    /// `sum m(xi, n) |u_hat|^2` times the coefficient weight.
    pub fn weighted_energy(&self, m: impl Fn([f64; 2], f64) -> f64) -> f64 {
        let mut acc = 0.0;
        self.grid
            .for_each_mode(|i, xi, n| acc += m(xi, n) * self.coeffs[i].norm_sqr());
        acc * self.grid.coefficient_weight()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            coeffs,
            time: self.time,
        })
    }

    /// `d_y u`. The unpaired Nyquist mode is dropped so real fields stay
    /// real.
    pub fn dy(&self) -> Self {
        let nyq = -((self.grid.ny() / 2) as f64);
        self.apply_multiplier(|_, n| Complex64::new(0.0, if n == nyq { 0.0 } else { n }))
    }

    /// `d_{x_j} u`, Nyquist mode dropped as in [`Self::dy`].
    pub fn dx(&self, j: usize) -> Self {
        let nyq = self.grid.xi_values()[self.grid.nx() / 2];
        self.apply_multiplier(move |xi, _| {
            Complex64::new(0.0, if xi[j] == nyq { 0.0 } else { xi[j] })
        })
    }
}

/// `|z|^alpha`, via `exp(alpha log|z|)` with `|z|` floored at `1e-300`
/// unless `alpha` is an integer.
pub fn abs_pow(z: Complex64, alpha: f64) -> f64 {
    let m = z.norm();
    if alpha.fract() == 0.0 && alpha.abs() < 64.0 {
        m.powi(alpha as i32)
    } else {
        (alpha * m.max(1e-300).ln()).exp()
    }
}

/// Linear flow: coefficient `(k, n)` is multiplied by
/// `exp(+i t (|xi_k|^2 + n^2))`.
pub fn free_evolve(field: &SpectralField, t: f64) -> SpectralField {
    let mut out = field.apply_multiplier(|xi, n| {
        Complex64::from_polar(1.0, t * (xi[0] * xi[0] + xi[1] * xi[1] + n * n))
    });
    out.time = field.time + t;
    out
}
