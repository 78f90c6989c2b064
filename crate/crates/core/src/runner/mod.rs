//! Config parsing, presets and artifact emission.

mod config;
mod presets;
mod records;

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{
    auxiliary_pair, critical_tuple, feasible_r_interval, max_feasible_theta, parse_rational,
    perturbed_tuple, subcritical_pair, theta_tuple, AuxPair, ConstraintReport, ExponentError,
    ProblemParams, RInterval, Regime, StrichartzTuple, Strictness, SubcriticalPair, ThetaTuple,
};
use crate::integrator::IntegratorError;
use crate::scattering::ScatteringError;
use crate::spectral::SpectralError;

pub use config::{
    parse_config, ControlConfig, Datum, ExponentOptions, GridConfig, MorawetzOptions,
    PhysicsConfig, Preset, RunConfig, ScatteringOptions,
};
pub use presets::{build_datum, read_manifest, run_preset, Manifest, RunOutcome};
pub use records::{
    read_records, schema_from_header, verify_records, AccumulatorColumns, DiagnosticsRecord,
    FileRecords, MorawetzColumns, RecordWriter, Schema, VerifySummary,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("records: {0}")]
    Records(String),
    #[error("integration aborted (last good record: {last_record:?}): {source}")]
    Aborted {
        last_record: Option<usize>,
        #[source]
        source: IntegratorError,
    },
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One named pass/fail verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verified<T> {
    pub value: T,
    pub report: ConstraintReport,
}

impl<T> From<(T, ConstraintReport)> for Verified<T> {
    fn from((value, report): (T, ConstraintReport)) -> Self {
        Self { value, report }
    }
}

/// Everything `exponents.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentsReport {
    pub d: u32,
    pub alpha: String,
    pub regime: Regime,
    pub s: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcritical: Option<Verified<SubcriticalPair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_interval: Option<RInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<Verified<StrichartzTuple>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbed: Option<Verified<StrichartzTuple>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Verified<ThetaTuple>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<Verified<AuxPair>>,
    pub all_feasible: bool,
}

impl ExponentsReport {
    fn reports(&self) -> impl Iterator<Item = &ConstraintReport> {
        let a = self.subcritical.iter().map(|v| &v.report);
        let b = self.critical.iter().map(|v| &v.report);
        let c = self.perturbed.iter().map(|v| &v.report);
        let d = self.theta.iter().map(|v| &v.report);
        let e = self.auxiliary.iter().map(|v| &v.report);
        a.chain(b).chain(c).chain(d).chain(e)
    }
}

/// Builds every exponent system available in the regime of `params`.
pub fn compute_exponents(
    params: &ProblemParams,
    opts: &ExponentOptions,
) -> Result<ExponentsReport, RunError> {
    let field = |name: &str, v: &str| {
        parse_rational(v).map_err(|e| RunError::Config(format!("exponents.{name}: {e}")))
    };
    let mut rep = ExponentsReport {
        d: params.d(),
        alpha: params.alpha().to_string(),
        regime: params.regime(),
        s: params.critical_regularity().to_string(),
        subcritical: None,
        r_interval: None,
        critical: None,
        perturbed: None,
        theta: None,
        auxiliary: None,
        all_feasible: true,
    };
    match params.regime() {
        Regime::Subcritical => rep.subcritical = Some(subcritical_pair(params)?.into()),
        Regime::Boundary => {}
        Regime::Scattering => {
            rep.r_interval = Some(feasible_r_interval(params)?);
            let r = opts.r.as_deref().map(|r| field("r", r)).transpose()?;
            let base: Verified<StrichartzTuple> = critical_tuple(params, r)?.into();
            if !base.report.feasible {
                // the derived systems all start from a feasible base
                rep.critical = Some(base);
                rep.all_feasible = false;
                return Ok(rep);
            }
            let eps = field("epsilon", &opts.epsilon)?;
            let perturbed: Verified<StrichartzTuple> =
                perturbed_tuple(&base.value, params, &eps)?.into();
            let theta = match &opts.theta {
                Some(t) => field("theta", t)?,
                None => max_feasible_theta(
                    &base.value,
                    params,
                    &field("theta_resolution", &opts.theta_resolution)?,
                )?,
            };
            rep.theta = Some(theta_tuple(&base.value, params, &theta)?.into());
            // strict inequalities need the epsilon-perturbed tuple; at the
            // critical tuple itself they collapse to equalities
            let source = match opts.mode {
                Strictness::Strict => &perturbed.value,
                Strictness::Equality => &base.value,
            };
            rep.auxiliary =
                Some(auxiliary_pair(params, &source.inv_q, &source.inv_r, opts.mode).into());
            rep.perturbed = Some(perturbed);
            rep.critical = Some(base);
        }
    }
    let all = rep.reports().all(|r| r.feasible);
    rep.all_feasible = all;
    Ok(rep)
}

/// Accepts `strict` or `equality`.
pub fn parse_strictness(text: &str) -> Result<Strictness, RunError> {
    match text {
        "strict" => Ok(Strictness::Strict),
        "equality" => Ok(Strictness::Equality),
        other => Err(RunError::Config(format!(
            "mode must be strict or equality, got {other:?}"
        ))),
    }
}
