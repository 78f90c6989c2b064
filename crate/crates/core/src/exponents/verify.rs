use num_traits::{One, Zero};

use super::{
    conjugate, is_zero, rat, ri, AuxPair, Comparator, ConstraintReport, ProblemParams, Rational,
    StrichartzTuple, Strictness, SubcriticalPair, ThetaTuple,
};

/// Anything whose conditions can be re-checked from the raw system.
#[derive(Debug, Clone, Copy)]
pub enum TupleClaim<'a> {
    Subcritical(&'a SubcriticalPair),
    /// Critical tuple, or its perturbation when `strict` is set.
    Critical(&'a StrichartzTuple),
    Theta(&'a ThetaTuple),
    Aux(&'a AuxPair),
}

/// Re-evaluates every raw condition the claim makes. Nothing is assumed
/// from the closed forms that produced it.
pub fn verify_tuple(claim: &TupleClaim<'_>, params: &ProblemParams) -> ConstraintReport {
    match claim {
        TupleClaim::Subcritical(p) => verify_subcritical(p, params),
        TupleClaim::Critical(t) => verify_strichartz(
            params,
            Raw {
                inv_q: &t.inv_q,
                inv_r: &t.inv_r,
                inv_qt: &t.inv_q_tilde,
                inv_rt: &t.inv_r_tilde,
                s: &t.s,
            },
            t.strict,
            true,
        ),
        TupleClaim::Theta(t) => {
            let s = params.critical_regularity();
            let mut rep = verify_strichartz(
                params,
                Raw {
                    inv_q: &t.inv_q,
                    inv_r: &t.inv_r,
                    inv_qt: &t.inv_q_tilde,
                    inv_rt: &t.inv_r_tilde,
                    s: &s,
                },
                false,
                false,
            );
            theta_identities(&mut rep, t, params);
            rep
        }
        TupleClaim::Aux(a) => verify_aux(a, params),
    }
}

struct Raw<'a> {
    inv_q: &'a Rational,
    inv_r: &'a Rational,
    inv_qt: &'a Rational,
    inv_rt: &'a Rational,
    s: &'a Rational,
}

fn verify_subcritical(p: &SubcriticalPair, params: &ProblemParams) -> ConstraintReport {
    let a = params.alpha();
    let d = params.dr();
    let a1 = a + Rational::one();
    let half = rat(1, 2);
    let mut rep = ConstraintReport::new();
    rep.check(
        "0 <= 1/q",
        p.inv_q.clone(),
        Comparator::Ge,
        Rational::zero(),
    );
    rep.check("1/q <= 1/2", p.inv_q.clone(), Comparator::Le, half.clone());
    rep.check(
        "0 <= 1/r",
        p.inv_r.clone(),
        Comparator::Ge,
        Rational::zero(),
    );
    rep.check("1/r <= 1/2", p.inv_r.clone(), Comparator::Le, half);
    rep.check(
        "2/q + d/r = d/2",
        ri(2) * &p.inv_q + &d * &p.inv_r,
        Comparator::Eq,
        &d / ri(2),
    );
    // (q, d) != (2, 2) encoded as a single rational: nonzero unless both hold
    let endpoint = if params.d() == 2 && p.inv_q == rat(1, 2) {
        Rational::zero()
    } else {
        Rational::one()
    };
    rep.check(
        "(q, d) != (2, 2)",
        endpoint,
        Comparator::Ne,
        Rational::zero(),
    );
    rep.check(
        "1/q' > (alpha+1)/q",
        conjugate(&p.inv_q),
        Comparator::Gt,
        &a1 * &p.inv_q,
    );
    rep.check(
        "1/r' = (alpha+1)/r",
        conjugate(&p.inv_r),
        Comparator::Eq,
        &a1 * &p.inv_r,
    );
    rep
}

fn verify_strichartz(
    params: &ProblemParams,
    t: Raw<'_>,
    strict: bool,
    with_time_balance: bool,
) -> ConstraintReport {
    let a = params.alpha();
    let d = params.dr();
    let a1 = a + Rational::one();
    let half = rat(1, 2);
    let zero = Rational::zero();
    let mut rep = ConstraintReport::new();

    for (name, v) in [
        ("1/q", t.inv_q),
        ("1/r", t.inv_r),
        ("1/q~", t.inv_qt),
        ("1/r~", t.inv_rt),
    ] {
        rep.check(
            format!("0 < {name}"),
            v.clone(),
            Comparator::Gt,
            zero.clone(),
        );
        rep.check(
            format!("{name} < 1/2"),
            v.clone(),
            Comparator::Lt,
            half.clone(),
        );
    }
    rep.check("0 <= s", t.s.clone(), Comparator::Ge, zero.clone());
    rep.check("s < 1/2", t.s.clone(), Comparator::Lt, half.clone());

    if params.d() >= 3 {
        rep.check(
            "1/q + 1/q~ < 1",
            t.inv_q + t.inv_qt,
            Comparator::Lt,
            Rational::one(),
        );
        // r/r~ = (1/r~)/(1/r); a zero 1/r is already flagged above
        let ratio = if is_zero(t.inv_r) {
            zero.clone()
        } else {
            t.inv_rt / t.inv_r
        };
        rep.check(
            "(d-2)/d < r/r~",
            ratio.clone(),
            Comparator::Gt,
            (&d - ri(2)) / &d,
        );
        rep.check("r/r~ < d/(d-2)", ratio, Comparator::Lt, &d / (&d - ri(2)));
    }

    rep.check(
        "1/q + d/r < d/2",
        t.inv_q + &d * t.inv_r,
        Comparator::Lt,
        &d / ri(2),
    );
    rep.check(
        "1/q~ + d/r~ < d/2",
        t.inv_qt + &d * t.inv_rt,
        Comparator::Lt,
        &d / ri(2),
    );
    rep.check(
        "2/q + d/r = d/2 - s",
        ri(2) * t.inv_q + &d * t.inv_r,
        Comparator::Eq,
        &d / ri(2) - t.s,
    );
    rep.check(
        "2/q + d/r + 2/q~ + d/r~ = d",
        ri(2) * t.inv_q + &d * t.inv_r + ri(2) * t.inv_qt + &d * t.inv_rt,
        Comparator::Eq,
        d.clone(),
    );

    if with_time_balance {
        if strict {
            rep.check(
                "1/q~' > (alpha+1)/q",
                conjugate(t.inv_qt),
                Comparator::Gt,
                &a1 * t.inv_q,
            );
        } else {
            rep.check(
                "1/q~' = (alpha+1)/q",
                conjugate(t.inv_qt),
                Comparator::Eq,
                &a1 * t.inv_q,
            );
        }
        rep.check(
            "1/r~' = (alpha+1)/r",
            conjugate(t.inv_rt),
            Comparator::Eq,
            &a1 * t.inv_r,
        );
    }

    let balance = a * t.inv_q + a * &d * t.inv_r / ri(2);
    if strict {
        rep.check(
            "alpha/q + alpha d/(2r) < 1",
            balance,
            Comparator::Lt,
            Rational::one(),
        );
    } else {
        rep.check(
            "alpha/q + alpha d/(2r) = 1",
            balance,
            Comparator::Eq,
            Rational::one(),
        );
    }
    rep.check("alpha/r < 1", a * t.inv_r, Comparator::Lt, Rational::one());
    rep
}

fn theta_identities(rep: &mut ConstraintReport, t: &ThetaTuple, params: &ProblemParams) {
    let a = params.alpha();
    let d = params.dr();
    let a1 = a + Rational::one();
    let th = &t.theta;
    rep.check(
        "1/((alpha+1) q~_theta') = theta/q_theta",
        conjugate(&t.inv_q_tilde) / &a1,
        Comparator::Eq,
        th * &t.inv_q,
    );
    rep.check(
        "1/((alpha+1) r~_theta') = theta/r_theta + 2(1-theta)/(alpha d)",
        conjugate(&t.inv_r_tilde) / &a1,
        Comparator::Eq,
        th * &t.inv_r + ri(2) * (Rational::one() - th) / (a * &d),
    );
}

fn verify_aux(p: &AuxPair, params: &ProblemParams) -> ConstraintReport {
    let a = params.alpha();
    let d = params.dr();
    let mut rep = ConstraintReport::new();
    rep.check("0 < 1/p", p.inv_p.clone(), Comparator::Gt, Rational::zero());
    rep.check("1/p <= 1/2", p.inv_p.clone(), Comparator::Le, rat(1, 2));
    rep.check("0 < 1/l", p.inv_l.clone(), Comparator::Gt, Rational::zero());
    rep.check("1/l < 1/2", p.inv_l.clone(), Comparator::Lt, rat(1, 2));
    rep.check(
        "2/l + d/p = d/2",
        ri(2) * &p.inv_l + &d * &p.inv_p,
        Comparator::Eq,
        &d / ri(2),
    );
    rep.check(
        "1/p' = 1/p + alpha/r",
        conjugate(&p.inv_p),
        Comparator::Eq,
        &p.inv_p + a * &p.source_inv_r,
    );
    let rhs = &p.inv_l + a * &p.source_inv_q;
    match p.strictness {
        Strictness::Strict => rep.check(
            "1/l' > 1/l + alpha/q",
            conjugate(&p.inv_l),
            Comparator::Gt,
            rhs,
        ),
        Strictness::Equality => rep.check(
            "1/l' = 1/l + alpha/q",
            conjugate(&p.inv_l),
            Comparator::Eq,
            rhs,
        ),
    };
    rep
}
