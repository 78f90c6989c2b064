//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use nlslab::spectral::{Complex64, Grid, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random coefficients on `|k_i| <= kmax`, `|n| <= nmax`, zero elsewhere.
pub fn band_limited(grid: Grid, seed: u64, kmax: i64, nmax: i64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = grid.shape();
    let nx = grid.nx();
    let ny = grid.ny();
    let mut c = vec![Complex64::default(); grid.len()];
    for (i, z) in c.iter_mut().enumerate() {
        let iy = i % ny;
        let n = Grid::wrapped(iy, ny);
        let mut ok = n.abs() <= nmax;
        let mut rest = i / ny;
        for _ in 1..shape.len() {
            let k = Grid::wrapped(rest % nx, nx);
            ok &= k.abs() <= kmax;
            rest /= nx;
        }
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if ok {
            *z = Complex64::new(re, im);
        }
    }
    SpectralField::from_coefficients(grid, c, 0.0).expect("matching length")
}

/// `A exp(-|x|^2 / w^2) (1 + mu cos y)`.
pub fn gaussian(grid: Grid, amplitude: f64, width: f64, mu: f64) -> SpectralField {
    SpectralField::from_profile(grid, |x, y| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::new(
            amplitude * (-r2 / (width * width)).exp() * (1.0 + mu * y.cos()),
            0.0,
        )
    })
    .expect("valid grid")
}

/// Grid and seeds of the frozen fractional-Leibniz family.
pub fn leibniz_family() -> impl Iterator<Item = SpectralField> {
    let g = Grid::new(1, 20.0, 64, 32).expect("valid grid");
    (0..100).map(move |seed| band_limited(g, seed, 8, 6))
}

/// Shrinking Gaussians for the localized Gagliardo-Nirenberg bound.
pub fn gn_family() -> Vec<SpectralField> {
    let widths = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let g1 = Grid::new(1, 20.0, 1024, 8).expect("valid grid");
    let g2 = Grid::new(2, 10.0, 256, 8).expect("valid grid");
    let mut out: Vec<SpectralField> = widths.iter().map(|w| gaussian(g1, 1.0, *w, 0.3)).collect();
    out.extend(widths.iter().map(|w| gaussian(g2, 1.0, *w, 0.3)));
    out
}

/// Frozen family for the d = 2 embedding `L^4_x H^{1/2 - gamma}_y <= C H^1`.
pub fn embedding_family() -> Vec<SpectralField> {
    let g = Grid::new(2, 10.0, 32, 16).expect("valid grid");
    let mut out: Vec<SpectralField> = (0..20).map(|seed| band_limited(g, seed, 6, 5)).collect();
    out.extend(
        [2.0, 1.0, 0.5, 0.25]
            .iter()
            .map(|w| gaussian(g, 1.0, *w, 0.5)),
    );
    out
}

pub const EMBEDDING_GAMMA: f64 = 0.1;

/// Raw critical-tuple conditions at spatial exponent `r`, in floating point,
/// written out independently of the exact closed forms.
pub fn brute_feasible(d: f64, a: f64, r: f64) -> bool {
    let iq = 1.0 / a - d / (2.0 * r);
    let ir = 1.0 / r;
    let iqt = 1.0 - (a + 1.0) * iq;
    let irt = 1.0 - (a + 1.0) * ir;
    let s = d / 2.0 - 2.0 * iq - d * ir;
    let mut ok = [iq, ir, iqt, irt].iter().all(|v| *v > 0.0 && *v < 0.5);
    // s vanishes identically at alpha = 4/d; allow rounding below zero
    ok &= s > -1e-12 && s < 0.5;
    if d >= 3.0 {
        ok &= iq + iqt < 1.0;
        let ratio = irt / ir;
        ok &= (d - 2.0) / d < ratio && ratio < d / (d - 2.0);
    }
    ok &= iq + d * ir < d / 2.0 && iqt + d * irt < d / 2.0;
    ok && a * ir < 1.0
}

/// Morawetz quantities by direct double sum over pairs of x-points.
#[derive(Debug, Clone, Copy)]
pub struct Direct {
    pub j: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub s: f64,
    pub pot_nu_rho: f64,
    pub pot_rho_nu: f64,
}

pub fn direct_morawetz(field: &SpectralField, alpha: f64, lambda: f64) -> Direct {
    use nlslab::spectral::densities;
    let g = field.grid();
    let d = g.d();
    let ds = densities(field, alpha);
    let m = g.x_len();
    let pts: Vec<[f64; 2]> = (0..m).map(|i| g.x_point(i)).collect();
    let kk = |a: usize, b: usize, i: usize| ds.k(a, b)[i];
    let (mut j, mut kin, mut cross, mut pnr, mut prn) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i1 in 0..m {
        for i2 in 0..m {
            let z = [pts[i1][0] - pts[i2][0], pts[i1][1] - pts[i2][1]];
            let r2: f64 = z[..d].iter().map(|v| v * v).sum();
            let br = (1.0 + r2).sqrt();
            let grad = |a: usize| z[a] / br;
            let hess = |a: usize, b: usize| {
                let delta = if a == b { 1.0 } else { 0.0 };
                delta / br - z[a] * z[b] / (br * br * br)
            };
            let lap = (d as f64 + (d as f64 - 1.0) * r2) / (br * br * br);
            for a in 0..d {
                j += -2.0 * ds.p[a][i1] * grad(a) * ds.rho[i2]
                    + 2.0 * ds.rho[i1] * grad(a) * ds.p[a][i2];
                for b in 0..d {
                    let h = hess(a, b);
                    kin +=
                        4.0 * kk(a, b, i1) * h * ds.rho[i2] + 4.0 * ds.rho[i1] * h * kk(a, b, i2);
                    kin += 2.0 * ds.grad_rho[a][i1] * h * ds.grad_rho[b][i2];
                    cross += -8.0 * ds.p[a][i1] * h * ds.p[b][i2];
                }
            }
            pnr += ds.nu[i1] * lap * ds.rho[i2];
            prn += ds.rho[i1] * lap * ds.nu[i2];
        }
    }
    let c2 = g.cell() * g.cell();
    let s = (kin + cross) * c2;
    let f = 2.0 * alpha / (alpha + 2.0);
    Direct {
        j: j * c2,
        lhs: s + lambda * f * (pnr + prn) * c2,
        rhs: lambda * 2.0 * f * pnr * c2,
        s,
        pot_nu_rho: pnr * c2,
        pot_rho_nu: prn * c2,
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
