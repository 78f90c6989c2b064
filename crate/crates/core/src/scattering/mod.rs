//! Free-flow pullbacks, H^1 Cauchy differences, L^q decay series and
//! space-time norm accumulators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{
    rat, to_f64, verify_tuple, AuxPair, ExponentError, ProblemParams, Rational, ThetaTuple,
    TupleClaim,
};
use crate::spectral::{
    free_evolve, lebesgue_norm, mixed_norm_profile, sobolev_h1, SpectralError, SpectralField,
};

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("need at least {need} snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },
    #[error("snapshot times must be strictly increasing")]
    UnorderedTimes,
    #[error("infeasible exponent data: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `w = exp(-i t (-Lap))`-inverse of the free flow applied to `u(t)`; the
/// result carries time tag 0.
pub fn pullback(field: &SpectralField) -> SpectralField {
    free_evolve(field, -field.time()).with_time(0.0)
}

/// `C_ij = ||w(t_i) - w(t_j)||_{H^1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyTable {
    pub times: Vec<f64>,
    /// Row-major `n x n`.
    pub matrix: Vec<f64>,
}

impl CauchyTable {
    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n() + j]
    }

    /// `C_{i,i+1}`.
    pub fn consecutive(&self) -> Vec<f64> {
        (0..self.n().saturating_sub(1))
            .map(|i| self.get(i, i + 1))
            .collect()
    }

    /// `max_{j > i >= k} C_ij` for each `k`.
    pub fn tail_max(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n.saturating_sub(1)];
        let mut running = 0.0f64;
        for k in (0..n.saturating_sub(1)).rev() {
            for j in k + 1..n {
                running = running.max(self.get(k, j));
            }
            out[k] = running;
        }
        out
    }

    /// Whether `tail_max` strictly decreases in `k`.
    pub fn tail_decreasing(&self) -> bool {
        self.tail_max().windows(2).all(|w| w[1] < w[0])
    }

    /// Consecutive differences starting at the first `t_i >= t_min`.
    pub fn tail(&self, t_min: f64) -> (Vec<f64>, Vec<f64>) {
        let c = self.consecutive();
        let start = self
            .times
            .iter()
            .position(|t| *t >= t_min)
            .unwrap_or(c.len());
        let start = start.min(c.len());
        (self.times[start..c.len()].to_vec(), c[start..].to_vec())
    }

    /// Strict decrease of consecutive differences for `t_i >= t_min` and
    /// the ratio terminal / first of that tail. Convergence is detected
    /// when the tail strictly decreases and the ratio is below
    /// `terminal_ratio`.
    pub fn tail_summary(&self, t_min: f64, terminal_ratio: f64) -> TailSummary {
        let (_, tail) = self.tail(t_min);
        let strictly_decreasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);
        let ratio = match (tail.first(), tail.last()) {
            (Some(f), Some(l)) if *f > 0.0 => l / f,
            _ => f64::NAN,
        };
        TailSummary {
            t_min,
            count: tail.len(),
            strictly_decreasing,
            terminal_over_first: ratio,
            converging: strictly_decreasing && ratio < terminal_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub t_min: f64,
    pub count: usize,
    pub strictly_decreasing: bool,
    pub terminal_over_first: f64,
    pub converging: bool,
}

pub fn cauchy_table(snapshots: &[SpectralField]) -> Result<CauchyTable, ScatteringError> {
    if snapshots.len() < 3 {
        return Err(ScatteringError::TooFewSnapshots {
            need: 3,
            got: snapshots.len(),
        });
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScatteringError::UnorderedTimes);
    }
    let w: Vec<SpectralField> = snapshots.par_iter().map(pullback).collect();
    let n = w.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let vals: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| w[i].sub(&w[j]).map(|d| sobolev_h1(&d)))
        .collect::<Result<_, _>>()?;
    let mut matrix = vec![0.0; n * n];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        matrix[i * n + j] = v;
        matrix[j * n + i] = v;
    }
    Ok(CauchyTable { times, matrix })
}

/// `||u(t_i)||_{L^q}` over the snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub q: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Max over `t <= transient`.
    pub early_max: f64,
    pub last: f64,
    /// `early_max / last`.
    pub decay_factor: f64,
    /// `last / max`.
    pub ratio_last_max: f64,
    /// Non-increasing for `t >= transient`.
    pub monotone_tail: bool,
    /// Max relative deviation from the first value.
    pub max_relative_variation: f64,
    pub in_decay_range: bool,
}

/// Whether `q` lies in `(2, 2(d+1)/(d-1))` (any `q > 2` for `d = 1`).
pub fn in_decay_range(d: usize, q: f64) -> bool {
    if d == 1 {
        q > 2.0
    } else {
        q > 2.0 && q < 2.0 * (d as f64 + 1.0) / (d as f64 - 1.0)
    }
}

pub fn decay_series(
    snapshots: &[SpectralField],
    q_list: &[f64],
    transient: f64,
) -> Result<Vec<DecaySeries>, ScatteringError> {
    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    let d = snapshots.first().map(|s| s.grid().d()).unwrap_or(1);
    q_list
        .iter()
        .map(|&q| {
            let values = snapshots
                .iter()
                .map(|s| lebesgue_norm(s, q))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(series_summary(q, d, times.clone(), values, transient))
        })
        .collect()
}

pub fn series_summary(
    q: f64,
    d: usize,
    times: Vec<f64>,
    values: Vec<f64>,
    transient: f64,
) -> DecaySeries {
    let early_max = times
        .iter()
        .zip(&values)
        .filter(|(t, _)| **t <= transient)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let max = values.iter().cloned().fold(0.0, f64::max);
    let last = values.last().copied().unwrap_or(0.0);
    let tail: Vec<f64> = times
        .iter()
        .zip(&values)
        .filter(|(t, _)| **t >= transient)
        .map(|(_, v)| *v)
        .collect();
    let first = values.first().copied().unwrap_or(0.0);
    let max_relative_variation = if first > 0.0 {
        values
            .iter()
            .map(|v| (v / first - 1.0).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    DecaySeries {
        q,
        decay_factor: if last > 0.0 {
            early_max / last
        } else {
            f64::INFINITY
        },
        ratio_last_max: if max > 0.0 { last / max } else { 0.0 },
        monotone_tail: tail.windows(2).all(|w| w[1] <= w[0]),
        max_relative_variation,
        in_decay_range: in_decay_range(d, q),
        early_max,
        last,
        times,
        values,
    }
}

/// Running trapezoid integral with increment bookkeeping.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Accumulator {
    pub integral: f64,
    pub increments: Vec<f64>,
    pub last: Option<(f64, f64)>,
}

impl Accumulator {
    pub fn push(&mut self, t: f64, v: f64) {
        if let Some((t0, v0)) = self.last {
            let inc = 0.5 * (v0 + v) * (t - t0);
            self.integral += inc;
            self.increments.push(inc);
        }
        self.last = Some((t, v));
    }

    pub fn peak_increment(&self) -> f64 {
        self.increments.iter().cloned().fold(0.0, f64::max)
    }

    pub fn final_increment(&self) -> f64 {
        self.increments.last().copied().unwrap_or(0.0)
    }

    /// `final / peak`; zero when nothing was accumulated.
    pub fn saturation_ratio(&self) -> f64 {
        let p = self.peak_increment();
        if p > 0.0 {
            self.final_increment() / p
        } else {
            0.0
        }
    }

    pub fn summary(&self, name: &str, threshold: f64) -> AccumulatorSummary {
        AccumulatorSummary {
            name: name.to_string(),
            integral: self.integral,
            peak_increment: self.peak_increment(),
            final_increment: self.final_increment(),
            saturation_ratio: self.saturation_ratio(),
            saturated: self.saturation_ratio() < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulatorSummary {
    pub name: String,
    pub integral: f64,
    pub peak_increment: f64,
    pub final_increment: f64,
    pub saturation_ratio: f64,
    pub saturated: bool,
}

/// Accumulates `||u||^{q_theta}_{L^{r_theta}_x H^{1/2+delta}_y}` and
/// `||v||^l_{L^p_x L^2_y}` for `v = u, d_y u, grad_x u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeAccumulators {
    pub q_theta: f64,
    pub r_theta: f64,
    pub gamma: f64,
    pub l: f64,
    pub p: f64,
    pub theta_norm: Accumulator,
    pub u_lp: Accumulator,
    pub dy_lp: Accumulator,
    pub dx_lp: Accumulator,
}

impl SpacetimeAccumulators {
    /// Re-verifies both exponent systems and `1/2 + delta + s <= 1` exactly.
    pub fn new(
        theta: &ThetaTuple,
        aux: &AuxPair,
        delta: &Rational,
        params: &ProblemParams,
    ) -> Result<Self, ScatteringError> {
        let rep = verify_tuple(&TupleClaim::Theta(theta), params);
        if let Some(c) = rep.first_violation() {
            return Err(ScatteringError::Infeasible(format!(
                "theta tuple: {}",
                c.constraint
            )));
        }
        let rep = verify_tuple(&TupleClaim::Aux(aux), params);
        if let Some(c) = rep.first_violation() {
            return Err(ScatteringError::Infeasible(format!(
                "auxiliary pair: {}",
                c.constraint
            )));
        }
        let s = params.critical_regularity();
        if !(delta > &Rational::from_integer(0.into())) || rat(1, 2) + delta + &s > rat(1, 1) {
            return Err(ScatteringError::Infeasible(format!(
                "need delta > 0 and 1/2 + delta + s <= 1, got delta = {delta}, s = {s}"
            )));
        }
        let inv = |r: &Rational| 1.0 / to_f64(r);
        Ok(Self {
            q_theta: inv(&theta.inv_q),
            r_theta: inv(&theta.inv_r),
            gamma: 0.5 + to_f64(delta),
            l: inv(&aux.inv_l),
            p: inv(&aux.inv_p),
            theta_norm: Accumulator::default(),
            u_lp: Accumulator::default(),
            dy_lp: Accumulator::default(),
            dx_lp: Accumulator::default(),
        })
    }

    /// The four integrands at one time.
    pub fn integrands(&self, field: &SpectralField) -> [f64; 4] {
        let g = field.grid();
        let cell = g.cell();
        let lp = |prof: &[f64], r: f64| -> f64 {
            (prof.iter().map(|h2| h2.max(0.0).powf(0.5 * r)).sum::<f64>() * cell).powf(1.0 / r)
        };
        let theta = lp(&mixed_norm_profile(field, self.gamma), self.r_theta).powf(self.q_theta);
        let u = lp(&mixed_norm_profile(field, 0.0), self.p).powf(self.l);
        let dy = lp(&mixed_norm_profile(&field.dy(), 0.0), self.p).powf(self.l);
        let mut grad = vec![0.0; g.x_len()];
        for a in 0..g.d() {
            for (acc, v) in grad.iter_mut().zip(mixed_norm_profile(&field.dx(a), 0.0)) {
                *acc += v;
            }
        }
        let dx = lp(&grad, self.p).powf(self.l);
        [theta, u, dy, dx]
    }

    pub fn push(&mut self, field: &SpectralField) -> [f64; 4] {
        let v = self.integrands(field);
        let t = field.time();
        self.theta_norm.push(t, v[0]);
        self.u_lp.push(t, v[1]);
        self.dy_lp.push(t, v[2]);
        self.dx_lp.push(t, v[3]);
        v
    }

    pub fn summaries(&self, threshold: f64) -> Vec<AccumulatorSummary> {
        vec![
            self.theta_norm.summary("theta_norm", threshold),
            self.u_lp.summary("u_lp", threshold),
            self.dy_lp.summary("dy_u_lp", threshold),
            self.dx_lp.summary("grad_x_u_lp", threshold),
        ]
    }
}

/// Geometric times `t0 g^i <= t_end`, rounded to whole steps.
pub fn geometric_steps(t0: f64, ratio: f64, t_end: f64, dt: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut t = t0;
    while t <= t_end * (1.0 + 1e-12) {
        let s = (t / dt).round() as usize;
        if out.last() != Some(&s) {
            out.push(s);
        }
        t *= ratio;
    }
    out
}

/// Serialized summary of a scattering experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterReport {
    pub times: Vec<f64>,
    pub cauchy_matrix: Vec<f64>,
    pub consecutive_differences: Vec<f64>,
    pub tail: TailSummary,
    pub tail_max_decreasing: bool,
    pub decay: Vec<DecaySeries>,
    pub accumulators: Vec<AccumulatorSummary>,
    pub f_plus_time: f64,
    pub f_plus_h1: f64,
    pub flags: ScatterFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterFlags {
    pub cauchy_tail_decreasing: bool,
    pub terminal_ratio_ok: bool,
    pub accumulators_saturated: bool,
    pub decay_monotone: bool,
}

impl ScatterReport {
    /// Consecutive differences from the first `t_i >= tail.t_min`.
    pub fn tail_values(&self) -> Vec<f64> {
        let start = self
            .times
            .iter()
            .position(|t| *t >= self.tail.t_min)
            .unwrap_or(self.times.len());
        self.consecutive_differences
            .iter()
            .skip(start)
            .copied()
            .collect()
    }

    pub fn build(
        table: &CauchyTable,
        t_min: f64,
        terminal_ratio: f64,
        decay: Vec<DecaySeries>,
        accumulators: Vec<AccumulatorSummary>,
        f_plus: &SpectralField,
        f_plus_time: f64,
    ) -> Self {
        let tail = table.tail_summary(t_min, terminal_ratio);
        let flags = ScatterFlags {
            cauchy_tail_decreasing: tail.strictly_decreasing,
            terminal_ratio_ok: tail.terminal_over_first < terminal_ratio,
            accumulators_saturated: accumulators.iter().all(|a| a.saturated),
            decay_monotone: decay.iter().all(|d| d.monotone_tail),
        };
        Self {
            times: table.times.clone(),
            cauchy_matrix: table.matrix.clone(),
            consecutive_differences: table.consecutive(),
            tail,
            tail_max_decreasing: table.tail_decreasing(),
            decay,
            accumulators,
            f_plus_time,
            f_plus_h1: sobolev_h1(f_plus),
            flags,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Complex64, Grid};

    fn datum(g: Grid) -> SpectralField {
        SpectralField::from_profile(g, |x, y| {
            Complex64::new(
                (-x[0] * x[0]).exp() * (1.0 + 0.3 * y.cos()),
                0.1 * x[0] * (-x[0] * x[0]).exp(),
            )
        })
        .unwrap()
    }

    #[test]
    fn free_trajectory_has_constant_pullback() {
        let g = Grid::new(1, 40.0, 256, 8).unwrap();
        let u0 = datum(g);
        let snaps: Vec<SpectralField> = [0.0, 0.5, 1.5, 3.0]
            .iter()
            .map(|t| free_evolve(&u0, *t))
            .collect();
        let c = cauchy_table(&snaps).unwrap();
        assert!(c.matrix.iter().all(|v| *v < 1e-12 * sobolev_h1(&u0)));
        for i in 0..c.n() {
            assert_eq!(c.get(i, i), 0.0);
            for j in 0..c.n() {
                assert_eq!(c.get(i, j), c.get(j, i));
            }
        }
        assert_eq!(pullback(&u0), u0);
    }

    #[test]
    fn table_needs_ordered_snapshots() {
        let g = Grid::new(1, 40.0, 64, 4).unwrap();
        let u0 = datum(g);
        assert!(cauchy_table(&[u0.clone(), u0.clone()]).is_err());
        let s: Vec<_> = [0.0, 1.0, 1.0]
            .iter()
            .map(|t| u0.clone().with_time(*t))
            .collect();
        assert!(matches!(
            cauchy_table(&s),
            Err(ScatteringError::UnorderedTimes)
        ));
    }

    #[test]
    fn decay_range() {
        assert!(in_decay_range(1, 100.0));
        assert!(!in_decay_range(1, 2.0));
        assert!(in_decay_range(2, 5.9));
        assert!(!in_decay_range(2, 6.0));
    }

    #[test]
    fn geometric_schedule() {
        let s = geometric_steps(1.0, 1.3, 40.0, 1e-3);
        assert_eq!(s[0], 1000);
        assert_eq!(s.len(), 15);
        assert!(*s.last().unwrap() <= 40_000);
    }

    #[test]
    fn accumulator_zero_stream() {
        let mut a = Accumulator::default();
        for i in 0..5 {
            a.push(i as f64, 0.0);
        }
        assert_eq!((a.integral, a.saturation_ratio()), (0.0, 0.0));
    }
}
