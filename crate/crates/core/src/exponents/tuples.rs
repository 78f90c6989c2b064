use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::verify::{verify_tuple, TupleClaim};
use super::{
    rat, ri, Comparator, ConstraintReport, ExponentError, ProblemParams, Rational, Regime,
};
use crate::exponents::rational_str;

/// Pair `(q, r)` used for the local theory below the mass-critical power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalPair {
    #[serde(with = "rational_str")]
    pub inv_q: Rational,
    #[serde(with = "rational_str")]
    pub inv_r: Rational,
}

impl SubcriticalPair {
    pub fn q(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_q)
    }
    pub fn r(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_r)
    }
}

/// Exponent bundle `(q, r, q~, r~, s)` stored through reciprocals.
///
/// `strict` distinguishes the perturbed family, where the time-exponent
/// balance `1/q~' > (alpha+1)/q` is strict, from the critical one where it is
/// an identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzTuple {
    #[serde(with = "rational_str")]
    pub inv_q: Rational,
    #[serde(with = "rational_str")]
    pub inv_r: Rational,
    #[serde(with = "rational_str")]
    pub inv_q_tilde: Rational,
    #[serde(with = "rational_str")]
    pub inv_r_tilde: Rational,
    #[serde(with = "rational_str")]
    pub s: Rational,
    pub strict: bool,
}

impl StrichartzTuple {
    pub fn q(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_q)
    }
    pub fn r(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_r)
    }
    pub fn q_tilde(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_q_tilde)
    }
    pub fn r_tilde(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_r_tilde)
    }
}

/// Interpolated family with `(q_theta, r_theta) = (q, r)` of the base tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTuple {
    #[serde(with = "rational_str")]
    pub theta: Rational,
    #[serde(with = "rational_str")]
    pub inv_q: Rational,
    #[serde(with = "rational_str")]
    pub inv_r: Rational,
    #[serde(with = "rational_str")]
    pub inv_q_tilde: Rational,
    #[serde(with = "rational_str")]
    pub inv_r_tilde: Rational,
}

impl ThetaTuple {
    pub fn q(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_q)
    }
    pub fn r(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_r)
    }
    pub fn q_tilde(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_q_tilde)
    }
    pub fn r_tilde(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_r_tilde)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Strict,
    Equality,
}

/// Auxiliary pair `(l, p)` together with the `(q, r)` it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxPair {
    #[serde(with = "rational_str")]
    pub inv_l: Rational,
    #[serde(with = "rational_str")]
    pub inv_p: Rational,
    pub strictness: Strictness,
    #[serde(with = "rational_str")]
    pub source_inv_q: Rational,
    #[serde(with = "rational_str")]
    pub source_inv_r: Rational,
}

impl AuxPair {
    pub fn l(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_l)
    }
    pub fn p(&self) -> Option<Rational> {
        super::from_reciprocal(&self.inv_p)
    }
}

/// One named bound on `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub label: String,
    #[serde(with = "rational_str")]
    pub value: Rational,
}

/// Open interval of admissible spatial exponents `r` for the critical tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RInterval {
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
    pub lower_bounds: Vec<Bound>,
    pub upper_bounds: Vec<Bound>,
}

impl RInterval {
    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo < r && r < &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / ri(2)
    }
}

/// Explicit pair `(1/q, 1/r) = (d alpha / (4(alpha+2)), 1/(alpha+2))`.
pub fn subcritical_pair(
    params: &ProblemParams,
) -> Result<(SubcriticalPair, ConstraintReport), ExponentError> {
    if params.regime() != Regime::Subcritical {
        return Err(ExponentError::Regime(format!(
            "subcritical pair needs alpha < 4/d, got alpha = {} with d = {}",
            params.alpha(),
            params.d()
        )));
    }
    let a = params.alpha();
    let pair = SubcriticalPair {
        inv_q: params.dr() * a / (ri(4) * (a + ri(2))),
        inv_r: (a + ri(2)).recip(),
    };
    let report = verify_tuple(&TupleClaim::Subcritical(&pair), params);
    Ok((pair, report))
}

fn require_critical_range(params: &ProblemParams, what: &str) -> Result<(), ExponentError> {
    if params.regime() == Regime::Subcritical {
        return Err(ExponentError::Regime(format!(
            "{what} needs 4/d <= alpha < 4/(d-1), got alpha = {} with d = {}",
            params.alpha(),
            params.d()
        )));
    }
    Ok(())
}

/// Intersection of the closed-form bounds on `r`.
///
/// For `d >= 3` the two bounds coming from the ratio condition on `r / r~`
/// are included; for `d = 1, 2` they are dropped. The bound
/// `alpha d / (2 - alpha)` only exists when `alpha < 2`.
pub fn feasible_r_interval(params: &ProblemParams) -> Result<RInterval, ExponentError> {
    require_critical_range(params, "feasible_r_interval")?;
    let a = params.alpha();
    let d = params.dr();
    let one = Rational::one();
    let a1 = a + &one;

    let mut lower = vec![
        Bound {
            label: "alpha d / 2".into(),
            value: a * &d / ri(2),
        },
        Bound {
            label: "2".into(),
            value: ri(2),
        },
        Bound {
            label: "alpha (alpha+1) d / (alpha+2)".into(),
            value: a * &a1 * &d / (a + ri(2)),
        },
        Bound {
            label: "alpha + 1".into(),
            value: a1.clone(),
        },
    ];
    let mut upper = Vec::new();
    if a < &ri(2) {
        upper.push(Bound {
            label: "alpha d / (2 - alpha)".into(),
            value: a * &d / (ri(2) - a),
        });
    }
    upper.push(Bound {
        label: "alpha (alpha+1) d / 2".into(),
        value: a * &a1 * &d / ri(2),
    });
    upper.push(Bound {
        label: "2 (alpha + 1)".into(),
        value: ri(2) * &a1,
    });
    upper.push(Bound {
        label: "alpha (alpha+1) d / (alpha d - 2)".into(),
        value: a * &a1 * &d / (a * &d - ri(2)),
    });
    if params.d() >= 3 {
        lower.push(Bound {
            label: "(d-2)/d + alpha + 1".into(),
            value: (&d - ri(2)) / &d + &a1,
        });
        upper.push(Bound {
            label: "d/(d-2) + alpha + 1".into(),
            value: &d / (&d - ri(2)) + &a1,
        });
    }

    let lo = lower
        .iter()
        .map(|b| &b.value)
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let hi = upper
        .iter()
        .map(|b| &b.value)
        .min()
        .cloned()
        .unwrap_or_else(Rational::zero);
    if lo >= hi {
        return Err(ExponentError::Argument(format!(
            "empty r interval [{lo}, {hi}] for d = {}, alpha = {a}",
            params.d()
        )));
    }
    Ok(RInterval {
        lo,
        hi,
        lower_bounds: lower,
        upper_bounds: upper,
    })
}

/// Critical tuple at the spatial exponent `r` (interval midpoint when absent).
///
/// `s = (alpha d - 4)/(2 alpha)`, `1/q = 1/alpha - d/(2r)`,
/// `1/q~ = -1/alpha + (alpha+1) d/(2r)`, `1/r~ = 1 - (alpha+1)/r`.
/// An `r` outside the admissible interval still yields a tuple; its report
/// names the violated conditions.
pub fn critical_tuple(
    params: &ProblemParams,
    r: Option<Rational>,
) -> Result<(StrichartzTuple, ConstraintReport), ExponentError> {
    require_critical_range(params, "critical_tuple")?;
    let r = match r {
        Some(r) => r,
        None => feasible_r_interval(params)?.midpoint(),
    };
    if !r.is_positive() {
        return Err(ExponentError::Argument(format!(
            "r must be positive, got {r}"
        )));
    }
    let a = params.alpha();
    let d = params.dr();
    let a1 = a + Rational::one();
    let inv_r = r.recip();
    let tuple = StrichartzTuple {
        inv_q: a.recip() - &d * &inv_r / ri(2),
        inv_q_tilde: -a.recip() + &a1 * &d * &inv_r / ri(2),
        inv_r_tilde: Rational::one() - &a1 * &inv_r,
        inv_r,
        s: params.critical_regularity(),
        strict: false,
    };
    let report = verify_tuple(&TupleClaim::Critical(&tuple), params);
    Ok((tuple, report))
}

/// Moves `q` to `q + epsilon` at fixed `r, r~` and restores the summed
/// identity through `q~`; the time balance becomes strict.
pub fn perturbed_tuple(
    base: &StrichartzTuple,
    params: &ProblemParams,
    epsilon: &Rational,
) -> Result<(StrichartzTuple, ConstraintReport), ExponentError> {
    if epsilon.is_negative() {
        return Err(ExponentError::Argument(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    if epsilon.is_zero() {
        let report = verify_tuple(&TupleClaim::Critical(base), params);
        return Ok((base.clone(), report));
    }
    let q = base.q().ok_or_else(|| {
        ExponentError::InfeasibleBase(format!("1/q = {} has no finite exponent", base.inv_q))
    })?;
    let d = params.dr();
    let q_eps = &q + epsilon;
    let inv_q_eps = q_eps.recip();
    let beta = &d / ri(2) * (Rational::one() - &base.inv_r - &base.inv_r_tilde);
    let inv_q_tilde = &beta - &inv_q_eps;
    // 2/q_eps + d/r = d/2 - s_eps
    let s_eps = &d / ri(2) - ri(2) * &inv_q_eps - &d * &base.inv_r;
    let tuple = StrichartzTuple {
        inv_q: inv_q_eps,
        inv_r: base.inv_r.clone(),
        inv_q_tilde,
        inv_r_tilde: base.inv_r_tilde.clone(),
        s: s_eps,
        strict: true,
    };
    let mut report = verify_tuple(&TupleClaim::Critical(&tuple), params);
    report.check("s_eps > s", tuple.s.clone(), Comparator::Gt, base.s.clone());
    Ok((tuple, report))
}

/// Interpolated tuple: `(q_theta, r_theta) = (q, r)` and
/// `1/((alpha+1) q~_theta') = theta/q`,
/// `1/((alpha+1) r~_theta') = theta/r + 2(1-theta)/(alpha d)`.
pub fn theta_tuple(
    base: &StrichartzTuple,
    params: &ProblemParams,
    theta: &Rational,
) -> Result<(ThetaTuple, ConstraintReport), ExponentError> {
    if params.regime() != Regime::Scattering {
        return Err(ExponentError::Regime(format!(
            "theta family needs 4/d < alpha < 4/(d-1) strictly, got alpha = {} with d = {}",
            params.alpha(),
            params.d()
        )));
    }
    if !theta.is_positive() || theta > &Rational::one() {
        return Err(ExponentError::Argument(format!(
            "theta must lie in (0, 1], got {theta}"
        )));
    }
    let a = params.alpha();
    let a1 = a + Rational::one();
    let d = params.dr();
    let one = Rational::one();
    let inv_q_tilde = &one - &a1 * theta * &base.inv_q;
    let inv_r_tilde = &one - &a1 * (theta * &base.inv_r + ri(2) * (&one - theta) / (a * &d));
    let tuple = ThetaTuple {
        theta: theta.clone(),
        inv_q: base.inv_q.clone(),
        inv_r: base.inv_r.clone(),
        inv_q_tilde,
        inv_r_tilde,
    };
    let report = verify_tuple(&TupleClaim::Theta(&tuple), params);
    Ok((tuple, report))
}

/// Largest grid value `theta = 1 - k * resolution < 1` with a feasible
/// theta tuple. When `1 - resolution` is already infeasible the step is
/// halved until a feasible point next to `1` is found.
pub fn max_feasible_theta(
    base: &StrichartzTuple,
    params: &ProblemParams,
    resolution: &Rational,
) -> Result<Rational, ExponentError> {
    if !resolution.is_positive() || resolution >= &Rational::one() {
        return Err(ExponentError::Argument(format!(
            "resolution must lie in (0, 1), got {resolution}"
        )));
    }
    let base_report = verify_tuple(&TupleClaim::Critical(base), params);
    if !base_report.feasible {
        let first = base_report
            .first_violation()
            .map(|c| c.constraint.clone())
            .unwrap_or_default();
        return Err(ExponentError::InfeasibleBase(first));
    }
    let mut step = resolution.clone();
    // The feasible set is an interval ending at theta = 1, so only the first
    // grid point below 1 needs testing; a failure means the step is too
    // coarse for the window.
    for _ in 0..200 {
        let theta = Rational::one() - &step;
        let (_, report) = theta_tuple(base, params, &theta)?;
        if report.feasible {
            return Ok(theta);
        }
        step /= ri(2);
    }
    Err(ExponentError::Argument(
        "no feasible theta found below 1".into(),
    ))
}

/// Auxiliary pair `1/l = alpha d/(4r)`, `1/p = 1/2 - alpha/(2r)`.
pub fn auxiliary_pair(
    params: &ProblemParams,
    inv_q: &Rational,
    inv_r: &Rational,
    strictness: Strictness,
) -> (AuxPair, ConstraintReport) {
    let a = params.alpha();
    let d = params.dr();
    let pair = AuxPair {
        inv_l: a * &d * inv_r / ri(4),
        inv_p: rat(1, 2) - a * inv_r / ri(2),
        strictness,
        source_inv_q: inv_q.clone(),
        source_inv_r: inv_r.clone(),
    };
    let report = verify_tuple(&TupleClaim::Aux(&pair), params);
    (pair, report)
}
