use super::fft::{transform, transform_axes, Direction};
use super::{abs_pow, Complex64, Result, SpectralError, SpectralField};

/// `(sum |u|^q w)^(1/q)` on the physical grid; `q = inf` gives the max
/// modulus.
pub fn lebesgue_norm(field: &SpectralField, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(SpectralError::Argument(format!("q must be >= 1, got {q}")));
    }
    let u = field.to_physical();
    Ok(lebesgue_physical(&u, field.grid().weight(), q))
}

pub(crate) fn lebesgue_physical(u: &[Complex64], weight: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if q == 2.0 {
        return (u.iter().map(|z| z.norm_sqr()).sum::<f64>() * weight).sqrt();
    }
    (u.iter().map(|z| abs_pow(*z, q)).sum::<f64>() * weight).powf(1.0 / q)
}

/// `(sum (1 + |xi|^2 + n^2) |u_hat|^2)^(1/2)` with the coefficient weight.
pub fn sobolev_h1(field: &SpectralField) -> f64 {
    field
        .weighted_energy(|xi, n| 1.0 + xi[0] * xi[0] + xi[1] * xi[1] + n * n)
        .sqrt()
}

/// Norm of `H^s_x H^gamma_y` through the multiplier `<xi>^s <n>^gamma`.
pub fn hs_x_hgamma_y(field: &SpectralField, s: f64, gamma: f64) -> f64 {
    field
        .weighted_energy(|xi, n| {
            (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s) * (1.0 + n * n).powf(gamma)
        })
        .sqrt()
}

/// Homogeneous `H^s_y` norm from the multiplier `|n|^s`.
pub fn homogeneous_hs_y(field: &SpectralField, s: f64) -> f64 {
    field
        .weighted_energy(|_, n| if n == 0.0 { 0.0 } else { n.abs().powf(2.0 * s) })
        .sqrt()
}

/// Squared inner norm `h(x)^2 = ||u(x, .)||^2_{H^gamma_y}` at every x-point.
pub fn mixed_norm_profile(field: &SpectralField, gamma: f64) -> Vec<f64> {
    let g = field.grid();
    let mut v = field.coefficients().to_vec();
    let x_axes: Vec<usize> = (0..g.d()).collect();
    transform_axes(&mut v, &g.shape(), &x_axes, Direction::Inverse);
    let ny = g.ny();
    let scale = g.dy() / ny as f64;
    let mult: Vec<f64> = g
        .n_values()
        .iter()
        .map(|n| (1.0 + n * n).powf(gamma))
        .collect();
    v.chunks(ny)
        .map(|line| {
            line.iter()
                .zip(&mult)
                .map(|(z, m)| m * z.norm_sqr())
                .sum::<f64>()
                * scale
        })
        .collect()
}

/// `L^r_x H^gamma_y` norm; `r = inf` allowed.
pub fn mixed_norm(field: &SpectralField, r: f64, gamma: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(SpectralError::Argument(format!("r must be >= 1, got {r}")));
    }
    let prof = mixed_norm_profile(field, gamma);
    Ok(lr_of_profile(&prof, field.grid().cell(), r))
}

/// `L^r_x` norm of `sqrt(profile)` where `profile` holds squared values.
pub(crate) fn lr_of_profile(prof: &[f64], cell: f64, r: f64) -> f64 {
    if r.is_infinite() {
        return prof.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt();
    }
    (prof.iter().map(|h2| h2.max(0.0).powf(0.5 * r)).sum::<f64>() * cell).powf(1.0 / r)
}

/// Copies a wrapped spectrum of `from` shape into `to` shape, keeping
/// modes present in both and rescaling so physical samples are unchanged.
pub(crate) fn resize_spectrum(c: &[Complex64], from: &[usize], to: &[usize]) -> Vec<Complex64> {
    let total_to: usize = to.iter().product();
    let total_from: usize = from.iter().product();
    let scale = total_to as f64 / total_from as f64;
    let mut out = vec![Complex64::default(); total_to];
    let rank = from.len();
    let mut idx = vec![0usize; rank];
    for z in c {
        let mut dst = 0usize;
        let mut keep = true;
        for a in 0..rank {
            let f = super::Grid::wrapped(idx[a], from[a]);
            let half = (to[a] / 2) as i64;
            if f < -half || f >= to[a] as i64 - half {
                keep = false;
                break;
            }
            dst = dst * to[a] + f.rem_euclid(to[a] as i64) as usize;
        }
        if keep {
            out[dst] = z * scale;
        }
        for a in (0..rank).rev() {
            idx[a] += 1;
            if idx[a] < from[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

/// `||u|u|^alpha||_{H^s_y} / (||u||_{H^s_y} ||u||_inf^alpha)`, with the
/// product formed on a 3/2-padded grid.
pub fn fractional_leibniz_ratio(field: &SpectralField, s: f64, alpha: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpectralError::Argument(format!(
            "s must lie in (0, 1), got {s}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(SpectralError::Argument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let g = *field.grid();
    let shape = g.shape();
    let padded: Vec<usize> = shape.iter().map(|n| n * 3 / 2).collect();
    let mut v = resize_spectrum(field.coefficients(), &shape, &padded);
    transform(&mut v, &padded, Direction::Inverse);
    for z in v.iter_mut() {
        *z *= abs_pow(*z, alpha);
    }
    transform(&mut v, &padded, Direction::Forward);
    let prod =
        SpectralField::from_coefficients(g, resize_spectrum(&v, &padded, &shape), field.time())?;

    let sup = lebesgue_norm(field, f64::INFINITY)?;
    let den = homogeneous_hs_y(field, s) * sup.powf(alpha);
    if den == 0.0 {
        return Err(SpectralError::ZeroDenominator(
            "||u||_{H^s_y} ||u||_inf^alpha vanishes",
        ));
    }
    Ok(homogeneous_hs_y(&prod, s) / den)
}
