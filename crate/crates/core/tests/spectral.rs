mod common;

use std::f64::consts::PI;

use nlslab::spectral::{
    densities, difference_quotient_hs_y, fractional_leibniz_ratio, free_evolve, hs_x_hgamma_y,
    lebesgue_norm, localized_gn_check, mixed_norm, read_snapshot, sobolev_h1, write_snapshot,
    Complex64, Grid, SpectralField,
};
use proptest::prelude::*;

use common::rel;

// Frozen calibration bounds: the largest ratio over the fixture family,
// rounded up in the fourth significant digit.
const LEIBNIZ_C_CAL: f64 = 0.2637;
const GN_C_CAL_D1: f64 = 0.5238;
const GN_C_CAL_D2: f64 = 0.4630;
const EMBEDDING_C_CAL: f64 = 0.4334;

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (3u32..7, 2u32..5).prop_map(|(a, b)| Grid::new(1, 20.0, 1 << (a + 2), 1 << b).unwrap()),
        (2u32..5, 2u32..4).prop_map(|(a, b)| Grid::new(2, 12.0, 1 << (a + 1), 1 << b).unwrap()),
    ]
}

fn field_strategy() -> impl Strategy<Value = SpectralField> {
    (grid_strategy(), any::<u64>()).prop_map(|(g, seed)| {
        let kmax = (g.nx() / 4) as i64;
        let nmax = (g.ny() / 4) as i64;
        common::band_limited(g, seed, kmax, nmax)
    })
}

#[test]
fn gaussian_coefficients_match_analytic_transform() {
    let g = Grid::new(1, 40.0, 256, 8).unwrap();
    let f = SpectralField::from_profile(g, |x, y| {
        Complex64::new((-x[0] * x[0]).exp() * (1.0 + y.cos()) / 2.0, 0.0)
    })
    .unwrap();
    let dx = g.dx();
    let ny = g.ny() as f64;
    let mut peak = 0.0f64;
    let mut worst = 0.0f64;
    for k in -(g.nx() as i64) / 2..(g.nx() as i64) / 2 {
        let xi = 2.0 * PI * k as f64 / g.l();
        // x-samples start at -L/2, hence the (-1)^k shift
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let fx = sign * PI.sqrt() * (-xi * xi / 4.0).exp() / dx;
        for n in -(g.ny() as i64) / 2..(g.ny() as i64) / 2 {
            let fy = match n.abs() {
                0 => ny / 2.0,
                1 => ny / 4.0,
                _ => 0.0,
            };
            let want = fx * fy;
            let got = f.coefficient(&[k], n);
            peak = peak.max(want.abs());
            worst = worst.max((got - Complex64::new(want, 0.0)).norm());
        }
    }
    assert!(
        worst < 1e-8 * peak,
        "worst deviation {worst:e} against peak {peak:e}"
    );
}

#[test]
fn gaussian_l2_norm() {
    let g = Grid::new(1, 40.0, 512, 4).unwrap();
    let f = common::gaussian(g, 1.0, 1.0, 0.0);
    let want = (PI / 2.0).powf(0.25) * (2.0 * PI).sqrt();
    assert!(rel(lebesgue_norm(&f, 2.0).unwrap(), want) < 1e-6);
}

#[test]
fn plane_wave_norms() {
    let g = Grid::new(1, 10.0, 32, 8).unwrap();
    let (k0, n0, a) = (3i64, 2i64, 0.7);
    let xi0 = 2.0 * PI * k0 as f64 / g.l();
    let f = SpectralField::from_profile(g, |x, y| {
        a * Complex64::new(0.0, xi0 * x[0] + n0 as f64 * y).exp()
    })
    .unwrap();
    let vol = 2.0 * PI * g.l();
    assert!(rel(lebesgue_norm(&f, 3.0).unwrap(), a * vol.powf(1.0 / 3.0)) < 1e-12);
    let h1 = a * ((1.0 + xi0 * xi0 + (n0 * n0) as f64) * vol).sqrt();
    assert!(rel(sobolev_h1(&f), h1) < 1e-12);
    let ds = densities(&f, 2.0);
    for i in 0..g.x_len() {
        assert!(rel(ds.rho[i], 2.0 * PI * a * a) < 1e-12);
        assert!(rel(ds.p[0][i], 2.0 * PI * a * a * xi0) < 1e-12);
        assert!(rel(ds.k[0][i], 2.0 * PI * a * a * xi0 * xi0) < 1e-12);
    }
}

#[test]
fn y_independent_mixed_norm_ignores_gamma() {
    let g = Grid::new(1, 20.0, 128, 8).unwrap();
    let f = common::gaussian(g, 1.0, 1.5, 0.0);
    let a = mixed_norm(&f, 4.0, 0.0).unwrap();
    let b = mixed_norm(&f, 4.0, 0.8).unwrap();
    assert!(rel(a, b) < 1e-12);
}

#[test]
fn difference_quotient_forms_agree_on_band_limited_fields() {
    let g = Grid::new(1, 20.0, 32, 32).unwrap();
    for seed in 0..5 {
        let f = common::band_limited(g, 700 + seed, 4, 8);
        for s in [0.3, 0.5, 0.7] {
            let r = difference_quotient_hs_y(&f, s).unwrap().ratio();
            assert!((0.98..=1.02).contains(&r), "seed {seed}, s {s}: ratio {r}");
        }
    }
}

#[test]
fn leibniz_ratio_stays_below_frozen_bound() {
    let worst = common::leibniz_family()
        .map(|f| fractional_leibniz_ratio(&f, 0.55, 5.0).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 0.0 && worst <= LEIBNIZ_C_CAL, "max ratio {worst}");
}

#[test]
fn gagliardo_nirenberg_stays_below_frozen_bound() {
    for f in common::gn_family() {
        let c = localized_gn_check(&f).unwrap();
        let bound = if c.d == 1 { GN_C_CAL_D1 } else { GN_C_CAL_D2 };
        assert!(
            c.ratio() > 0.0 && c.ratio() <= bound,
            "d = {}: ratio {}",
            c.d,
            c.ratio()
        );
    }
}

#[test]
fn embedding_stays_below_frozen_bound() {
    for f in common::embedding_family() {
        let ratio = mixed_norm(&f, 4.0, 0.5 - common::EMBEDDING_GAMMA).unwrap() / sobolev_h1(&f);
        assert!(ratio <= EMBEDDING_C_CAL, "ratio {ratio}");
    }
}

#[test]
fn snapshot_file_round_trip() {
    let g = Grid::new(2, 8.0, 8, 4).unwrap();
    let f = common::band_limited(g, 3, 2, 1).with_time(1.25);
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &f).unwrap();
    let back = read_snapshot(buf.as_slice()).unwrap();
    assert_eq!(back, f);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn parseval(f in field_strategy()) {
        let physical = lebesgue_norm(&f, 2.0).unwrap().powi(2);
        let spectral = f.weighted_energy(|_, _| 1.0);
        prop_assert!(rel(physical, spectral) < 1e-12);
    }

    #[test]
    fn mixed_norm_two_is_hilbert_norm(f in field_strategy(), gamma in 0.0f64..1.0) {
        let a = mixed_norm(&f, 2.0, gamma).unwrap();
        let b = hs_x_hgamma_y(&f, 0.0, gamma);
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn free_flow_is_an_isometry(
        f in field_strategy(),
        t in -5.0f64..5.0,
        s in -1.0f64..2.0,
        gamma in -1.0f64..2.0,
    ) {
        let w = free_evolve(&f, t);
        prop_assert!(rel(sobolev_h1(&w), sobolev_h1(&f)) < 1e-12);
        prop_assert!(rel(hs_x_hgamma_y(&w, s, gamma), hs_x_hgamma_y(&f, s, gamma)) < 1e-12);
        prop_assert!((w.time() - f.time() - t).abs() < 1e-15);
    }

    #[test]
    fn densities_reproduce_mass_and_gradient(f in field_strategy()) {
        let g = *f.grid();
        let ds = densities(&f, 3.0);
        let mass: f64 = ds.rho.iter().sum::<f64>() * g.cell();
        prop_assert!(rel(mass, lebesgue_norm(&f, 2.0).unwrap().powi(2)) < 1e-10);
        let trace: f64 = (0..g.d()).map(|a| ds.k(a, a).iter().sum::<f64>()).sum::<f64>() * g.cell();
        let grad_x = f.weighted_energy(|xi, _| xi[0] * xi[0] + xi[1] * xi[1]);
        prop_assert!(rel(trace, grad_x) < 1e-10);
        prop_assert!(ds.rho.iter().chain(&ds.nu).all(|v| *v >= 0.0));
    }
}
