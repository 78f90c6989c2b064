use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::records::{AccumulatorColumns, DiagnosticsRecord, FileRecords, MorawetzColumns, Schema};
use super::{compute_exponents, Check, Datum, ExponentsReport, Preset, RunConfig, RunError};
use crate::exponents::{parse_rational, to_f64, Regime};
use crate::integrator::{
    energy, evolve_schedule, mass, soliton_profile, BoundaryGuard, IntegratorError, PhysicsParams,
    Sample, StepControl,
};
use crate::morawetz::{dj_dt_convergence, CubeSupAccumulator, FdConvergence, MorawetzEngine};
use crate::scattering::{
    cauchy_table, geometric_steps, pullback, series_summary, DecaySeries, ScatterReport,
    SpacetimeAccumulators,
};
use crate::spectral::{
    lebesgue_norm, read_snapshot, sobolev_h1, write_snapshot, Complex64, Grid, SpectralField,
};

/// Half-widths of the central-difference `dJ/dt` check around `t = 1`.
const FD_DELTAS: [f64; 3] = [0.02, 0.04, 0.08];
const FD_ORDER: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub preset: String,
    pub version: String,
    pub config: RunConfig,
    pub config_toml: String,
    pub alpha_exact: String,
    pub alpha_f64: f64,
    pub wall_seconds: f64,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Artifacts and verdicts of one preset run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub preset: Preset,
    pub checks: Vec<Check>,
    pub records: Vec<DiagnosticsRecord>,
    pub exponents: Option<ExponentsReport>,
    pub scatter: Option<ScatterReport>,
    pub fd: Option<FdConvergence>,
    pub guard_fired: bool,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn build_datum(cfg: &RunConfig, grid: Grid) -> Result<SpectralField, RunError> {
    let field = match &cfg.datum {
        Datum::Gaussian {
            amplitude,
            width,
            y_modulation,
        } => SpectralField::from_profile(grid, |x, y| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(
                amplitude * (-r2 / (width * width)).exp() * (1.0 + y_modulation * y.cos()),
                0.0,
            )
        })?,
        Datum::Soliton { b } => soliton_profile(grid, *b)?,
        Datum::PlaneWave { k, n, amplitude } => {
            let xi: Vec<f64> = k
                .iter()
                .map(|k| 2.0 * std::f64::consts::PI * *k as f64 / grid.l())
                .collect();
            SpectralField::from_profile(grid, |x, y| {
                let phase: f64 = x.iter().zip(&xi).map(|(x, k)| x * k).sum::<f64>() + *n as f64 * y;
                Complex64::from_polar(*amplitude, phase)
            })?
        }
        Datum::File { path } => {
            let f = read_snapshot(BufReader::new(File::open(path)?))?;
            if f.grid() != &grid {
                return Err(RunError::Config(format!(
                    "datum.path {}: snapshot grid {:?} differs from the configured grid {:?}",
                    path.display(),
                    f.grid(),
                    grid
                )));
            }
            f.with_time(0.0)
        }
    };
    Ok(field)
}

/// Validates `cfg`, runs its preset and writes every artifact into
/// `cfg.output`.
pub fn run_preset(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let started = Instant::now();
    fs::create_dir_all(&cfg.output)?;
    let params = cfg.problem_params()?;
    let exponents = compute_exponents(&params, &cfg.exponents);
    let mut outcome = match cfg.preset {
        Preset::Exponents => {
            let rep = exponents?;
            let all = rep.all_feasible;
            RunOutcome {
                preset: cfg.preset,
                checks: vec![Check::new(
                    "exponents_feasible",
                    all,
                    format!(
                        "regime {}, every constructed system re-verified",
                        rep.regime
                    ),
                )],
                records: Vec::new(),
                exponents: Some(rep),
                scatter: None,
                fd: None,
                guard_fired: false,
                files: Vec::new(),
            }
        }
        _ => {
            let rep = exponents.ok();
            run_evolution(cfg, rep)?
        }
    };
    if let Some(rep) = &outcome.exponents {
        let path = cfg.output.join("exponents.json");
        serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), rep)?;
        outcome.files.push(path);
    }
    let manifest = Manifest {
        preset: cfg.preset.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        config_toml: cfg.to_toml()?,
        alpha_exact: params.alpha().to_string(),
        alpha_f64: to_f64(params.alpha()),
        wall_seconds: started.elapsed().as_secs_f64(),
        files: outcome.files.clone(),
        checks: outcome.checks.clone(),
        passed: outcome.passed(),
    };
    let path = cfg.output.join("manifest.json");
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &manifest)?;
    outcome.files.push(path);
    Ok(outcome)
}

struct Sampler {
    physics: PhysicsParams,
    lq: Vec<f64>,
    engine: Option<MorawetzEngine>,
    cube: CubeSupAccumulator,
    acc: Option<SpacetimeAccumulators>,
}

impl Sampler {
    fn schema(&self) -> Schema {
        Schema {
            lq: self.lq.clone(),
            morawetz: self.engine.is_some(),
            accumulators: self.acc.is_some(),
        }
    }

    fn record(&mut self, field: &SpectralField, flag: bool) -> Result<DiagnosticsRecord, RunError> {
        let lq_norms = self
            .lq
            .iter()
            .map(|q| lebesgue_norm(field, *q))
            .collect::<Result<Vec<_>, _>>()?;
        let morawetz = match &self.engine {
            Some(e) => {
                let terms = e.terms(field, &self.physics)?;
                Some(MorawetzColumns {
                    j: e.j(field)?,
                    lhs: terms.lhs,
                    rhs: terms.rhs,
                    s: terms.s,
                })
            }
            None => None,
        };
        let (cube_sup, cube_sup_integral) = self.cube.push(field);
        let accumulators = self.acc.as_mut().map(|a| {
            let v = a.push(field);
            AccumulatorColumns {
                mixed_norm_theta: v[0].powf(1.0 / a.q_theta),
                theta: a.theta_norm.integral,
                u: a.u_lp.integral,
                dy_u: a.dy_lp.integral,
                grad_x_u: a.dx_lp.integral,
            }
        });
        Ok(DiagnosticsRecord {
            t: field.time(),
            mass: mass(field),
            energy: energy(field, &self.physics),
            h1_norm: sobolev_h1(field),
            lq_norms,
            morawetz,
            cube_sup,
            cube_sup_integral,
            accumulators,
            boundary_guard_flag: flag,
        })
    }
}

fn spacetime_accumulators(
    cfg: &RunConfig,
    rep: Option<&ExponentsReport>,
) -> Result<Option<SpacetimeAccumulators>, RunError> {
    let Some(rep) = rep else { return Ok(None) };
    let (Some(theta), Some(aux)) = (&rep.theta, &rep.auxiliary) else {
        return Ok(None);
    };
    if rep.regime != Regime::Scattering {
        return Ok(None);
    }
    let params = cfg.problem_params()?;
    let delta = parse_rational(&cfg.exponents.delta)
        .map_err(|e| RunError::Config(format!("exponents.delta: {e}")))?;
    Ok(Some(SpacetimeAccumulators::new(
        &theta.value,
        &aux.value,
        &delta,
        &params,
    )?))
}

fn run_evolution(
    cfg: &RunConfig,
    exponents: Option<ExponentsReport>,
) -> Result<RunOutcome, RunError> {
    let g = &cfg.grid;
    let grid = Grid::new(g.d, g.l, g.nx, g.ny)?;
    let physics = PhysicsParams::new(cfg.alpha_f64()?, cfg.physics.lambda)?;
    let control = StepControl::new(cfg.control.dt, cfg.control.t_end, cfg.control.sample_every)?;
    let initial = build_datum(cfg, grid)?;

    let mut sampler = Sampler {
        physics,
        lq: cfg.lq.clone(),
        engine: cfg.morawetz.enabled.then(|| MorawetzEngine::new(grid)),
        cube: CubeSupAccumulator::new(&grid, cfg.morawetz.r_side, physics.alpha())?,
        acc: spacetime_accumulators(cfg, exponents.as_ref())?,
    };

    let uniform = control.sample_steps();
    let wants_snapshots = matches!(cfg.preset, Preset::Scattering | Preset::SolitonControl);
    let geometric: BTreeSet<usize> = if wants_snapshots {
        geometric_steps(
            cfg.scattering.t0,
            cfg.scattering.ratio,
            cfg.control.t_end,
            cfg.control.dt,
        )
        .into_iter()
        .filter(|s| *s <= control.n_steps())
        .collect()
    } else {
        BTreeSet::new()
    };
    let record_steps: BTreeSet<usize> = uniform.iter().copied().collect();
    let schedule: Vec<usize> = record_steps.union(&geometric).copied().collect();

    let records_path = cfg.output.join("records.csv");
    let mut writer = FileRecords::create(&records_path, sampler.schema())?;
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut snapshots: Vec<SpectralField> = Vec::new();
    let mut sink_error: Option<RunError> = None;
    let mut sink = |s: &Sample<'_>| -> anyhow::Result<()> {
        let mut step = || -> Result<(), RunError> {
            if record_steps.contains(&s.step) {
                let rec = sampler.record(s.field, s.boundary_flag)?;
                writer.write(&rec)?;
                records.push(rec);
            }
            if geometric.contains(&s.step) {
                snapshots.push(s.field.clone());
            }
            Ok(())
        };
        step().map_err(|e| {
            let msg = e.to_string();
            sink_error = Some(e);
            anyhow::anyhow!(msg)
        })
    };
    let result = evolve_schedule(
        &initial,
        &physics,
        control.dt,
        &schedule,
        control.n_steps(),
        Some(BoundaryGuard::default()),
        &mut [&mut sink],
    );
    let outcome = match result {
        Ok(o) => o,
        Err(IntegratorError::Sink { .. }) if sink_error.is_some() => {
            return Err(sink_error.expect("checked"))
        }
        Err(source) => {
            let last_record = records.len().checked_sub(1);
            return Err(RunError::Aborted {
                last_record,
                source,
            });
        }
    };
    let mut files = vec![writer.finish()?];
    let path = cfg.output.join("final.bin");
    write_snapshot(BufWriter::new(File::create(&path)?), &outcome.final_field)?;
    files.push(path);

    let sc = &cfg.scattering;
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let decay: Vec<DecaySeries> = cfg
        .lq
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let vals = records.iter().map(|r| r.lq_norms[i]).collect();
            series_summary(*q, g.d, times.clone(), vals, sc.transient)
        })
        .collect();

    let mut checks = Vec::new();
    let mut fd = None;
    let mut scatter = None;
    let guard_fired = outcome.guard_fired;
    match cfg.preset {
        Preset::Decay | Preset::Morawetz => {
            if cfg.preset == Preset::Decay {
                for s in &decay {
                    checks.push(Check::new(
                        format!("decay_lq_{}", s.q),
                        s.decay_factor >= sc.decay_factor && s.monotone_tail,
                        format!(
                            "early max / last = {:.4}, monotone after t = {}: {}{}",
                            s.decay_factor,
                            sc.transient,
                            s.monotone_tail,
                            if s.in_decay_range {
                                ""
                            } else {
                                " (outside the decay range)"
                            }
                        ),
                    ));
                }
                let cube: Vec<f64> = records.iter().map(|r| r.cube_sup).collect();
                let c = series_summary(f64::NAN, g.d, times.clone(), cube, sc.transient);
                checks.push(Check::new(
                    "decay_cube_sup",
                    c.decay_factor >= sc.decay_factor && c.monotone_tail,
                    format!(
                        "early max / last = {:.4}, monotone tail: {}",
                        c.decay_factor, c.monotone_tail
                    ),
                ));
            }
            if cfg.morawetz.enabled {
                checks.extend(morawetz_checks(cfg, &records));
                let conv = dj_dt_convergence(&initial, &physics, control.dt, 1.0, &FD_DELTAS)?;
                let ok = conv
                    .orders
                    .iter()
                    .all(|o| (FD_ORDER.0..=FD_ORDER.1).contains(o));
                checks.push(Check::new(
                    "dj_dt_order",
                    ok,
                    format!("observed orders {:?}", conv.orders),
                ));
                fd = Some(conv);
            }
            checks.push(Check::new(
                "boundary_guard",
                !guard_fired,
                if guard_fired {
                    "mass reached the edge strip"
                } else {
                    "never fired"
                },
            ));
        }
        Preset::SolitonControl | Preset::Scattering => {
            let table = cauchy_table(&snapshots)?;
            let f_plus = pullback(snapshots.last().expect("table has snapshots"));
            let report = ScatterReport::build(
                &table,
                sc.tail_start,
                sc.terminal_ratio,
                decay,
                sampler
                    .acc
                    .as_ref()
                    .map(|a| a.summaries(sc.saturation))
                    .unwrap_or_default(),
                &f_plus,
                snapshots.last().expect("nonempty").time(),
            );
            let path = cfg.output.join("f_plus.bin");
            write_snapshot(BufWriter::new(File::create(&path)?), &f_plus)?;
            files.push(path);
            if cfg.preset == Preset::SolitonControl {
                let worst = report
                    .decay
                    .iter()
                    .map(|s| s.max_relative_variation)
                    .fold(0.0, f64::max);
                checks.push(Check::new(
                    "no_decay",
                    worst < sc.constancy_tol,
                    format!("max relative variation of the L^q norms {worst:.3e}"),
                ));
                checks.push(Check::new(
                    "no_scattering",
                    report.tail.count >= 2 && !report.tail.converging,
                    format!(
                        "Cauchy differences after t = {}: strictly decreasing {}, terminal / first {:.4}",
                        sc.tail_start, report.tail.strictly_decreasing, report.tail.terminal_over_first
                    ),
                ));
            } else {
                checks.push(Check::new(
                    "cauchy_tail_decreasing",
                    report.flags.cauchy_tail_decreasing,
                    format!("consecutive differences {:?}", report.tail_values()),
                ));
                checks.push(Check::new(
                    "cauchy_terminal_ratio",
                    report.flags.terminal_ratio_ok,
                    format!(
                        "terminal / first = {:.4} (limit {})",
                        report.tail.terminal_over_first, sc.terminal_ratio
                    ),
                ));
                let detail = report
                    .accumulators
                    .iter()
                    .map(|a| format!("{} {:.3e}", a.name, a.saturation_ratio))
                    .collect::<Vec<_>>()
                    .join(", ");
                checks.push(Check::new(
                    "accumulators_saturated",
                    !report.accumulators.is_empty() && report.flags.accumulators_saturated,
                    if detail.is_empty() {
                        "no accumulators configured".to_string()
                    } else {
                        detail
                    },
                ));
                checks.push(Check::new(
                    "boundary_guard",
                    !guard_fired,
                    if guard_fired {
                        "mass reached the edge strip"
                    } else {
                        "never fired"
                    },
                ));
            }
            let path = cfg.output.join("scatter_report.json");
            serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &report)?;
            files.push(path);
            scatter = Some(report);
        }
        Preset::Exponents => unreachable!("handled without evolution"),
    }
    Ok(RunOutcome {
        preset: cfg.preset,
        checks,
        records,
        exponents,
        scatter,
        fd,
        guard_fired,
        files,
    })
}

fn morawetz_checks(cfg: &RunConfig, records: &[DiagnosticsRecord]) -> Vec<Check> {
    let mut worst_gap = f64::INFINITY;
    let mut worst_s = f64::INFINITY;
    for r in records {
        let m = r.morawetz.expect("Morawetz columns enabled");
        let scale = m.lhs.abs().max(m.rhs.abs()).max(r.mass * r.mass);
        worst_gap = worst_gap.min((m.lhs - m.rhs) / scale);
        worst_s = worst_s.min(m.s / scale);
    }
    vec![
        Check::new(
            "morawetz_inequality",
            worst_gap >= -cfg.morawetz.tol,
            format!("min (lhs - rhs) / scale = {worst_gap:.3e}"),
        ),
        Check::new(
            "morawetz_positivity",
            worst_s >= -cfg.morawetz.positivity_tol,
            format!("min S / scale = {worst_s:.3e}"),
        ),
    ]
}

/// Reads a manifest back.
pub fn read_manifest(path: &Path) -> Result<Manifest, RunError> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
