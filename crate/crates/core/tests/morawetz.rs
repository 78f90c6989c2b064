mod common;

use std::collections::BTreeMap;

use nlslab::integrator::{evolve_schedule, mass, soliton_profile, PhysicsParams, Sample};
use nlslab::morawetz::{
    bump, dj_dt_convergence, local_mass_flux_residual, morawetz_j, CubeSupAccumulator,
    MorawetzEngine,
};
use nlslab::spectral::{sobolev_h1, Complex64, Grid, SpectralField};
use proptest::prelude::*;

use common::rel;

fn check_against_oracle(f: &SpectralField, physics: &PhysicsParams, tol: f64) {
    let engine = MorawetzEngine::new(*f.grid());
    let want = common::direct_morawetz(f, physics.alpha(), physics.lambda());
    let terms = engine.terms(f, physics).unwrap();
    let j = engine.j(f).unwrap();
    for (name, got, want) in [
        ("J", j, want.j),
        ("lhs", terms.lhs, want.lhs),
        ("rhs", terms.rhs, want.rhs),
        ("S", terms.s, want.s),
    ] {
        assert!(rel(got, want) < tol, "{name}: {got} vs {want}");
    }
}

/// Keeps the fields at the requested steps of one run.
fn snapshots(
    initial: &SpectralField,
    physics: &PhysicsParams,
    dt: f64,
    steps: &[usize],
) -> BTreeMap<usize, SpectralField> {
    let mut kept = BTreeMap::new();
    let mut sink = |s: &Sample<'_>| -> anyhow::Result<()> {
        kept.insert(s.step, s.field.clone());
        Ok(())
    };
    let total = *steps.last().unwrap();
    evolve_schedule(initial, physics, dt, steps, total, None, &mut [&mut sink]).unwrap();
    kept
}

#[test]
fn two_moving_bumps_match_direct_sum() {
    let g = Grid::new(1, 40.0, 256, 8).unwrap();
    let v = 1.5;
    let f = SpectralField::from_profile(g, |x, y| {
        let left = (-(x[0] + 6.0).powi(2)).exp() * Complex64::new(0.0, v * x[0]).exp();
        let right = (-(x[0] - 6.0).powi(2)).exp() * Complex64::new(0.0, -v * x[0]).exp();
        (left + right) * (1.0 + 0.2 * y.cos())
    })
    .unwrap();
    let want = common::direct_morawetz(&f, 1.0, 1.0);
    assert!(want.j.abs() > 1e-3);
    assert!(rel(morawetz_j(&f), want.j) < 1e-10);
}

#[test]
fn d2_terms_match_direct_sum() {
    let g = Grid::new(2, 12.0, 16, 8).unwrap();
    let physics = PhysicsParams::defocusing(1.5).unwrap();
    for seed in 0..4 {
        check_against_oracle(&common::band_limited(g, 40 + seed, 3, 2), &physics, 1e-9);
    }
}

#[test]
fn plane_wave_has_constant_j_and_zero_lhs() {
    let g = Grid::new(1, 20.0, 64, 8).unwrap();
    let xi0 = 2.0 * std::f64::consts::PI * 2.0 / g.l();
    let f = SpectralField::from_profile(g, |x, _| Complex64::new(0.0, xi0 * x[0]).exp()).unwrap();
    let engine = MorawetzEngine::new(g);
    let physics = PhysicsParams::defocusing(2.0).unwrap();
    let scale = mass(&f).powi(2);
    let j = engine.j(&f).unwrap();
    assert!(j.abs() < 1e-12 * scale);
    let terms = engine.terms(&f, &physics).unwrap();
    let want = common::direct_morawetz(&f, 2.0, 1.0);
    assert!((terms.lhs - want.lhs).abs() < 1e-9 * scale);
}

#[test]
fn dj_dt_matches_lhs_on_gaussian_run() {
    let g = Grid::new(1, 60.0, 1024, 8).unwrap();
    let u0 = common::gaussian(g, 1.0, 1.0, 0.1);
    let physics = PhysicsParams::defocusing(5.0).unwrap();
    let study = dj_dt_convergence(&u0, &physics, 1e-4, 0.5, &[1e-3, 2e-3, 4e-3]).unwrap();
    let first = study.checks[0];
    assert!((first.delta - 1e-3).abs() < 1e-12);
    let relres = first.residual / first.exact.abs();
    assert!(relres < 1e-4, "relative residual {relres:e}");
    for order in &study.orders {
        assert!((1.8..=2.2).contains(order), "orders {:?}", study.orders);
    }
}

#[test]
fn local_mass_flux_on_gaussian_run() {
    let g = Grid::new(1, 60.0, 1024, 8).unwrap();
    let u0 = common::gaussian(g, 1.0, 1.0, 0.1);
    let physics = PhysicsParams::defocusing(5.0).unwrap();
    let dt = 1e-3;
    let kept = snapshots(&u0, &physics, dt, &[499, 500, 501]);
    let psi = bump(&g, [1.5, 0.0], 5.0);
    let check = local_mass_flux_residual(&kept[&499], &kept[&500], &kept[&501], &psi).unwrap();
    assert!(check.exact.abs() > 1e-2, "flux {}", check.exact);
    assert!(check.residual < 1e-5, "residual {:e}", check.residual);
}

#[test]
fn local_mass_flux_vanishes_for_real_datum_at_start() {
    let g = Grid::new(1, 40.0, 256, 8).unwrap();
    let u0 = common::gaussian(g, 1.0, 1.0, 0.0);
    let ds = nlslab::spectral::densities(&u0, 1.0);
    let pm = ds.p[0].iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let rho_max = ds.rho.iter().fold(0.0f64, |m, r| m.max(*r));
    assert!(pm < 1e-12 * rho_max, "max P {pm:e}");
    assert!(morawetz_j(&u0).abs() < 1e-12 * mass(&u0).powi(2));
}

#[test]
fn soliton_cube_integral_grows_linearly() {
    let g = Grid::new(1, 80.0, 1024, 4).unwrap();
    let u0 = soliton_profile(g, 1.0).unwrap();
    let physics = PhysicsParams::focusing(2.0).unwrap();
    let mut acc = CubeSupAccumulator::new(&g, 1.0, 2.0).unwrap();
    let mut first = None;
    let mut sink = |s: &Sample<'_>| -> anyhow::Result<()> {
        let (c, _) = acc.push(s.field);
        first.get_or_insert(c);
        Ok(())
    };
    let steps: Vec<usize> = (0..=10).map(|i| i * 200).collect();
    evolve_schedule(&u0, &physics, 1e-3, &steps, 2000, None, &mut [&mut sink]).unwrap();
    let c0 = first.unwrap();
    let slope = c0.powf(3.0);
    // the integrand only moves with the O(dt^2) profile error of the scheme
    assert!(rel(acc.integral(), slope * 2.0) < 1e-5);
    for inc in acc.increments() {
        assert!(rel(*inc, slope * 0.2) < 1e-5);
    }
}

fn field_1d() -> impl Strategy<Value = SpectralField> {
    any::<u64>()
        .prop_map(|seed| common::band_limited(Grid::new(1, 20.0, 64, 8).unwrap(), seed, 12, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positivity_and_oracle(f in field_1d()) {
        let engine = MorawetzEngine::new(*f.grid());
        let physics = PhysicsParams::defocusing(3.0).unwrap();
        let terms = engine.terms(&f, &physics).unwrap();
        let scale = (mass(&f) + sobolev_h1(&f)).powi(4);
        prop_assert!(terms.s >= -1e-10 * scale);
        let want = common::direct_morawetz(&f, 3.0, 1.0);
        prop_assert!(rel(terms.s, want.s) < 1e-9);
        prop_assert!(rel(terms.lhs, want.lhs) < 1e-9);
        prop_assert!(rel(terms.rhs, want.rhs) < 1e-9);
        prop_assert!(terms.lhs - terms.rhs >= -1e-8 * terms.lhs.abs().max(terms.rhs.abs()).max(mass(&f).powi(2)));
    }

    #[test]
    fn symmetric_terms_coincide(f in field_1d()) {
        let physics = PhysicsParams::defocusing(2.5).unwrap();
        let terms = MorawetzEngine::new(*f.grid()).terms(&f, &physics).unwrap();
        prop_assert!(rel(terms.kin_k_rho, terms.kin_rho_k) < 1e-10);
        prop_assert!(rel(terms.pot_nu_rho, terms.pot_rho_nu) < 1e-10);
    }
}
