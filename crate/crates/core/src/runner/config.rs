use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::exponents::{parse_rational, rat, ri, ProblemParams, Regime, Strictness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Decay,
    SolitonControl,
    Morawetz,
    Scattering,
    Exponents,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Decay => "decay",
            Preset::SolitonControl => "soliton-control",
            Preset::Morawetz => "morawetz",
            Preset::Scattering => "scattering",
            Preset::Exponents => "exponents",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub l: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Rational string such as `"5"` or `"7/2"`.
    pub alpha: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Datum {
    /// `A exp(-|x|^2 / w^2) (1 + mu cos y)`
    Gaussian {
        amplitude: f64,
        width: f64,
        y_modulation: f64,
    },
    Soliton {
        b: f64,
    },
    /// `A exp(i (k.x + n y))`
    PlaneWave {
        k: Vec<i64>,
        n: i64,
        amplitude: f64,
    },
    File {
        path: PathBuf,
    },
}

impl Datum {
    fn kind(&self) -> &'static str {
        match self {
            Datum::Gaussian { .. } => "gaussian",
            Datum::Soliton { .. } => "soliton",
            Datum::PlaneWave { .. } => "plane_wave",
            Datum::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    /// Explicit theta; the largest feasible one on the resolution grid
    /// otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    pub epsilon: String,
    pub theta_resolution: String,
    pub delta: String,
    pub mode: Strictness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorawetzOptions {
    pub enabled: bool,
    pub r_side: f64,
    /// Relative slack for `lhs - rhs`.
    pub tol: f64,
    /// Relative slack for `S`.
    pub positivity_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringOptions {
    /// First geometric snapshot time.
    pub t0: f64,
    pub ratio: f64,
    /// End of the initial transient for monotonicity checks.
    pub transient: f64,
    /// Start of the Cauchy tail.
    pub tail_start: f64,
    pub terminal_ratio: f64,
    pub saturation: f64,
    pub decay_factor: f64,
    pub constancy_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Preset,
    pub output: PathBuf,
    pub lq: Vec<f64>,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub control: ControlConfig,
    pub datum: Datum,
    pub exponents: ExponentOptions,
    pub morawetz: MorawetzOptions,
    pub scattering: ScatteringOptions,
}

impl RunConfig {
    /// Fully populated defaults for `preset`.
    pub fn preset_defaults(preset: Preset) -> Self {
        let base = RunConfig {
            preset,
            output: PathBuf::from("out"),
            lq: vec![4.0, 8.0],
            grid: GridConfig {
                d: 1,
                l: 200.0,
                nx: 4096,
                ny: 32,
            },
            physics: PhysicsConfig {
                alpha: "5".into(),
                lambda: 1.0,
            },
            control: ControlConfig {
                dt: 1e-3,
                t_end: 10.0,
                sample_every: 100,
            },
            datum: Datum::Gaussian {
                amplitude: 1.0,
                width: 0.6,
                y_modulation: 0.1,
            },
            exponents: ExponentOptions {
                r: Some("8".into()),
                theta: None,
                epsilon: "1/10".into(),
                theta_resolution: "1/100".into(),
                delta: "1/20".into(),
                mode: Strictness::Equality,
            },
            morawetz: MorawetzOptions {
                enabled: true,
                r_side: 1.0,
                tol: 1e-8,
                positivity_tol: 1e-10,
            },
            scattering: ScatteringOptions {
                t0: 1.0,
                ratio: 1.3,
                transient: 1.0,
                tail_start: 5.0,
                terminal_ratio: 0.2,
                saturation: 1e-4,
                decay_factor: 3.0,
                constancy_tol: 1e-3,
            },
        };
        match preset {
            Preset::Decay | Preset::Exponents => base,
            Preset::Morawetz => RunConfig {
                control: ControlConfig {
                    t_end: 2.0,
                    ..base.control.clone()
                },
                ..base
            },
            Preset::SolitonControl => RunConfig {
                lq: vec![4.0, 6.0],
                grid: GridConfig {
                    d: 1,
                    l: 80.0,
                    nx: 1024,
                    ny: 4,
                },
                physics: PhysicsConfig {
                    alpha: "2".into(),
                    lambda: -1.0,
                },
                control: ControlConfig {
                    t_end: 20.0,
                    ..base.control.clone()
                },
                datum: Datum::Soliton { b: 1.0 },
                exponents: ExponentOptions {
                    r: None,
                    ..base.exponents.clone()
                },
                morawetz: MorawetzOptions {
                    enabled: false,
                    ..base.morawetz.clone()
                },
                ..base
            },
            Preset::Scattering => RunConfig {
                lq: vec![4.0],
                grid: GridConfig {
                    d: 1,
                    l: 800.0,
                    nx: 8192,
                    ny: 8,
                },
                control: ControlConfig {
                    t_end: 40.0,
                    ..base.control.clone()
                },
                datum: Datum::Gaussian {
                    amplitude: 1.0,
                    width: 1.0,
                    y_modulation: 0.2,
                },
                morawetz: MorawetzOptions {
                    enabled: false,
                    ..base.morawetz.clone()
                },
                ..base
            },
        }
    }

    /// TOML text of the fully populated config.
    pub fn to_toml(&self) -> Result<String, RunError> {
        toml::to_string(self).map_err(|e| RunError::Config(format!("cannot serialize config: {e}")))
    }

    pub fn problem_params(&self) -> Result<ProblemParams, RunError> {
        ProblemParams::parse(self.grid.d as u32, &self.physics.alpha)
            .map_err(|e| RunError::Config(format!("physics.alpha: {e}")))
    }

    pub fn alpha_f64(&self) -> Result<f64, RunError> {
        Ok(crate::exponents::to_f64(self.problem_params()?.alpha()))
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        let g = &self.grid;
        if !(1..=2).contains(&g.d) {
            return bad(format!("grid.d = {} must be 1 or 2", g.d));
        }
        if !(g.l.is_finite() && g.l > 0.0) {
            return bad(format!("grid.l = {} must be positive", g.l));
        }
        for (name, n) in [("grid.nx", g.nx), ("grid.ny", g.ny)] {
            if n < 2 || n % 2 != 0 {
                return bad(format!("{name} = {n} must be even and at least 2"));
            }
        }
        let params = self.problem_params()?;
        if ![-1.0, 0.0, 1.0].contains(&self.physics.lambda) {
            return bad(format!(
                "physics.lambda = {} must be -1, 0 or 1",
                self.physics.lambda
            ));
        }
        let c = &self.control;
        if !(c.dt.is_finite() && c.dt > 0.0) || !(c.t_end.is_finite() && c.t_end >= 0.0) {
            return bad(format!(
                "control: need dt > 0 and t_end >= 0, got dt = {}, t_end = {}",
                c.dt, c.t_end
            ));
        }
        if c.sample_every == 0 {
            return bad("control.sample_every must be positive".into());
        }
        if self.lq.iter().any(|q| !(*q >= 1.0)) {
            return bad(format!("lq = {:?}: every exponent must be >= 1", self.lq));
        }
        for (name, v) in [
            ("exponents.epsilon", &self.exponents.epsilon),
            (
                "exponents.theta_resolution",
                &self.exponents.theta_resolution,
            ),
            ("exponents.delta", &self.exponents.delta),
        ] {
            parse_rational(v).map_err(|e| RunError::Config(format!("{name}: {e}")))?;
        }
        for (name, v) in [
            ("exponents.r", &self.exponents.r),
            ("exponents.theta", &self.exponents.theta),
        ] {
            if let Some(v) = v {
                parse_rational(v).map_err(|e| RunError::Config(format!("{name}: {e}")))?;
            }
        }
        if let Datum::PlaneWave { k, .. } = &self.datum {
            if k.len() != g.d {
                return bad(format!("datum.k has {} entries, grid.d = {}", k.len(), g.d));
            }
        }
        let alpha = params.alpha();
        match self.preset {
            Preset::Scattering => {
                if params.regime() != Regime::Scattering {
                    let lo = rat(4, g.d as i64);
                    return bad(format!(
                        "physics.alpha = {alpha}: alpha <= 4/d = {lo} violates the scattering range 4/d < alpha < 4/(d-1)"
                    ));
                }
                if self.physics.lambda != 1.0 {
                    return bad(
                        "physics.lambda must be 1 (defocusing) for the scattering preset".into(),
                    );
                }
            }
            Preset::Decay | Preset::Morawetz => {
                if self.physics.lambda != 1.0 {
                    return bad(format!(
                        "physics.lambda = {} must be 1 (defocusing) for the {} preset",
                        self.physics.lambda,
                        self.preset.name()
                    ));
                }
            }
            Preset::SolitonControl => {
                if g.d != 1 || *alpha != ri(2) || self.physics.lambda != -1.0 {
                    return bad(format!(
                        "soliton-control needs grid.d = 1, physics.alpha = 2, physics.lambda = -1; got {}, {alpha}, {}",
                        g.d, self.physics.lambda
                    ));
                }
                if !matches!(self.datum, Datum::Soliton { .. }) {
                    return bad("datum.kind must be soliton for the soliton-control preset".into());
                }
            }
            Preset::Exponents => {}
        }
        Ok(())
    }
}

/// Parses TOML text; missing keys take the defaults of the named preset.
pub fn parse_config(text: &str) -> Result<RunConfig, RunError> {
    let user: toml::Table =
        toml::from_str(text).map_err(|e| RunError::Config(format!("malformed config: {e}")))?;
    let preset: Preset = match user.get("preset") {
        Some(v) => v
            .clone()
            .try_into()
            .map_err(|e| RunError::Config(format!("preset: {e}")))?,
        None => return Err(RunError::Config("preset: missing".into())),
    };
    let defaults = RunConfig::preset_defaults(preset);
    let mut merged = toml::Table::try_from(&defaults)
        .map_err(|e| RunError::Config(format!("cannot serialize defaults: {e}")))?;
    let default_kind = defaults.datum.kind();
    for (key, value) in user {
        merge(&mut merged, key, value, default_kind);
    }
    let cfg: RunConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e| RunError::Config(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(into: &mut toml::Table, key: String, value: toml::Value, default_kind: &str) {
    let same_datum = key != "datum"
        || value
            .get("kind")
            .and_then(|k| k.as_str())
            .is_none_or(|k| k == default_kind);
    match (into.get_mut(&key), value) {
        (Some(toml::Value::Table(dst)), toml::Value::Table(src)) if same_datum => {
            for (k, v) in src {
                dst.insert(k, v);
            }
        }
        (_, v) => {
            into.insert(key, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_decay_config_gets_defaults() {
        let c = parse_config("preset = \"decay\"").unwrap();
        assert_eq!(
            (c.control.dt, c.grid.l, c.grid.nx, c.grid.ny),
            (1e-3, 200.0, 4096, 32)
        );
    }

    #[test]
    fn scattering_range_checks() {
        assert!(parse_config("preset = \"scattering\"\n[physics]\nalpha = \"5\"").is_ok());
        let e = parse_config("preset = \"scattering\"\n[physics]\nalpha = \"1/2\"")
            .unwrap_err()
            .to_string();
        assert!(
            e.contains("physics.alpha") && e.contains("4/d < alpha < 4/(d-1)"),
            "{e}"
        );
        let e = parse_config("preset = \"scattering\"\n[physics]\nalpha = \"3\"").unwrap_err();
        assert!(e.to_string().contains("alpha <= 4/d"));
    }

    #[test]
    fn datum_kind_switch_replaces_table() {
        let c = parse_config(
            "preset = \"exponents\"\n[datum]\nkind = \"plane_wave\"\nk = [3]\nn = 1\namplitude = 0.5",
        )
        .unwrap();
        assert_eq!(
            c.datum,
            Datum::PlaneWave {
                k: vec![3],
                n: 1,
                amplitude: 0.5
            }
        );
        let c = parse_config("preset = \"decay\"\n[datum]\nwidth = 2.0").unwrap();
        assert!(
            matches!(c.datum, Datum::Gaussian { width, amplitude, .. } if width == 2.0 && amplitude == 1.0)
        );
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(parse_config("preset = \"decay\"\n[grid]\nbogus = 1").is_err());
        assert!(parse_config("preset = [").is_err());
        assert!(parse_config("[grid]\nd = 1").is_err());
        assert!(parse_config("preset = \"decay\"\n[physics]\nlambda = -1.0").is_err());
        assert!(parse_config("preset = \"soliton-control\"\n[physics]\nalpha = \"3\"").is_err());
        assert!(parse_config("preset = \"decay\"\n[grid]\nnx = 33").is_err());
    }

    #[test]
    fn round_trip_every_preset() {
        for p in [
            Preset::Decay,
            Preset::SolitonControl,
            Preset::Morawetz,
            Preset::Scattering,
            Preset::Exponents,
        ] {
            let c = RunConfig::preset_defaults(p);
            assert_eq!(parse_config(&c.to_toml().unwrap()).unwrap(), c);
        }
    }
}
