use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use super::{Result, SpectralError, SpectralField};

/// Homogeneous `H^s_y` norm computed from the multiplier and from the
/// difference-quotient double integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsYNorms {
    pub multiplier: f64,
    pub quadrature: f64,
}

impl HsYNorms {
    pub fn ratio(&self) -> f64 {
        self.quadrature / self.multiplier
    }
}

const TAIL_PERIODS: usize = 400;

/// `c(s) = int_R |e^{ir} - 1|^2 / |r|^{1+2s} dr`, cached per `s`.
pub fn fractional_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpectralError::Argument(format!(
            "s must lie in (0, 1), got {s}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&s.to_bits())
    {
        return Ok(*c);
    }
    let c = compute_constant(s);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(s.to_bits(), c);
    Ok(c)
}

fn compute_constant(s: f64) -> f64 {
    // |e^{ir} - 1|^2 = 4 sin^2(r/2); integrand is even in r
    let f = |r: f64| {
        if r == 0.0 {
            0.0
        } else {
            let h = (0.5 * r).sin();
            4.0 * h * h / r.powf(1.0 + 2.0 * s)
        }
    };
    let tol = 1e-13;
    let mut total = 0.0;
    for j in 0..TAIL_PERIODS {
        let a = 2.0 * PI * j as f64;
        total += quadrature::integrate(f, a, a + 2.0 * PI, tol).integral;
    }
    // tail: int_R^inf 2(1 - cos r) r^{-a} dr with a = 1 + 2s, R a multiple
    // of 2pi, cosine part from the asymptotic integration-by-parts series
    let r = 2.0 * PI * TAIL_PERIODS as f64;
    let a = 1.0 + 2.0 * s;
    let mut cos_part = 0.0;
    let mut coef = a;
    let mut pow = a + 1.0;
    let mut sign = 1.0;
    for _ in 0..4 {
        cos_part += sign * coef * r.powf(-pow);
        coef *= (pow) * (pow + 1.0);
        pow += 2.0;
        sign = -sign;
    }
    let tail = 2.0 * (r.powf(-2.0 * s) / (2.0 * s) - cos_part);
    2.0 * (total + tail)
}

/// Both forms of `||u||_{H^s_y}` with the default truncation `|h| <= 50`
/// and `10^4` samples in `h`.
pub fn difference_quotient_hs_y(field: &SpectralField, s: f64) -> Result<HsYNorms> {
    difference_quotient_hs_y_with(field, s, 50.0, 10_000)
}

/// As [`difference_quotient_hs_y`] with explicit truncation `h_max` and
/// sample count. The range beyond `h_max` is added in closed form using the
/// mean of the shift energy.
pub fn difference_quotient_hs_y_with(
    field: &SpectralField,
    s: f64,
    h_max: f64,
    samples: usize,
) -> Result<HsYNorms> {
    let c = fractional_constant(s)?;
    if !(h_max > 0.0) || samples < 2 {
        return Err(SpectralError::Argument(
            "need h_max > 0 and at least 2 samples".into(),
        ));
    }
    let g = field.grid();
    let ny = g.ny();
    let nvals = g.n_values();
    let mut e = vec![0.0; ny];
    let coeffs = field.coefficients();
    for (i, z) in coeffs.iter().enumerate() {
        e[i % ny] += z.norm_sqr();
    }
    let w = g.coefficient_weight();
    e.iter_mut().for_each(|v| *v *= w);

    let multiplier = nvals
        .iter()
        .zip(&e)
        .map(|(n, en)| {
            if *n == 0.0 {
                0.0
            } else {
                n.abs().powf(2.0 * s) * en
            }
        })
        .sum::<f64>()
        .sqrt();

    // D(h) = int int |u(x, y+h) - u(x, y)|^2 = sum_n 4 sin^2(n h / 2) E_n
    let shift_energy = |h: f64| -> f64 {
        nvals
            .iter()
            .zip(&e)
            .map(|(n, en)| {
                let q = (0.5 * n * h).sin();
                4.0 * q * q * en
            })
            .sum()
    };
    // h = H tau^m removes the weak singularity at h = 0
    let m = 1.0 / (1.0 - s) + 1.0;
    let steps = if samples.is_multiple_of(2) {
        samples
    } else {
        samples + 1
    };
    let dt = 1.0 / steps as f64;
    let integrand = |tau: f64| -> f64 {
        if tau == 0.0 {
            return 0.0;
        }
        let h = h_max * tau.powf(m);
        shift_energy(h) * h.powf(-1.0 - 2.0 * s) * h_max * m * tau.powf(m - 1.0)
    };
    let mut acc = integrand(0.0) + integrand(1.0);
    for k in 1..steps {
        let wgt = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += wgt * integrand(k as f64 * dt);
    }
    let head = acc * dt / 3.0;
    let mean: f64 = nvals
        .iter()
        .zip(&e)
        .filter(|(n, _)| **n != 0.0)
        .map(|(_, en)| 2.0 * en)
        .sum();
    let tail = mean / (2.0 * s * h_max.powf(2.0 * s));
    let quadrature = (2.0 * (head + tail) / c).max(0.0).sqrt();
    Ok(HsYNorms {
        multiplier,
        quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Complex64, Grid};

    #[test]
    fn constant_known_value() {
        // c(1/2) = 2 pi / (sin(pi/2) Gamma(2)) = 2 pi
        let c = fractional_constant(0.5).unwrap();
        assert!((c / (2.0 * PI) - 1.0).abs() < 1e-8, "{c}");
        assert!(fractional_constant(0.0).is_err());
        assert!(fractional_constant(1.0).is_err());
    }

    #[test]
    fn single_mode_and_constant_field() {
        let g = Grid::new(1, 8.0, 16, 16).unwrap();
        let f = SpectralField::from_profile(g, |_, y| Complex64::from_polar(1.0, y)).unwrap();
        let n = difference_quotient_hs_y(&f, 0.5).unwrap();
        assert!((n.ratio() - 1.0).abs() < 0.02, "{n:?}");
        let mass = 2.0 * PI * 8.0;
        assert!((n.multiplier - mass.sqrt()).abs() < 1e-10);

        let f0 = SpectralField::from_profile(g, |x, _| Complex64::new((-x[0] * x[0]).exp(), 0.0))
            .unwrap();
        let n0 = difference_quotient_hs_y(&f0, 0.3).unwrap();
        assert!(n0.multiplier < 1e-12 && n0.quadrature < 1e-6);
    }
}
