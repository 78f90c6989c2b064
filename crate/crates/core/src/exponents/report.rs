use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Relation asserted between the two sides of a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparator {
    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
            Comparator::Ne => lhs != rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }
}

/// One evaluated condition. Both sides are exact rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub constraint: String,
    #[serde(with = "crate::exponents::rational_str")]
    pub lhs: BigRational,
    pub cmp: Comparator,
    #[serde(with = "crate::exponents::rational_str")]
    pub rhs: BigRational,
    pub ok: bool,
}

/// Ordered list of evaluated constraints. `feasible` is the conjunction of
/// the per-constraint verdicts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub constraints: Vec<Constraint>,
    pub feasible: bool,
}

impl ConstraintReport {
    pub fn new() -> Self {
        Self {
            constraints: Vec::new(),
            feasible: true,
        }
    }

    pub fn check(
        &mut self,
        label: impl Into<String>,
        lhs: BigRational,
        cmp: Comparator,
        rhs: BigRational,
    ) -> bool {
        let ok = cmp.holds(&lhs, &rhs);
        self.feasible &= ok;
        self.constraints.push(Constraint {
            constraint: label.into(),
            lhs,
            cmp,
            rhs,
            ok,
        });
        ok
    }

    /// Appends every constraint of `other`.
    pub fn extend(&mut self, other: ConstraintReport) {
        for c in other.constraints {
            self.feasible &= c.ok;
            self.constraints.push(c);
        }
    }

    pub fn first_violation(&self) -> Option<&Constraint> {
        self.constraints.iter().find(|c| !c.ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.ok)
    }

    pub fn get(&self, label: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.constraint == label)
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(
                f,
                "[{}] {}: {} {} {}",
                if c.ok { "ok" } else { "FAIL" },
                c.constraint,
                c.lhs,
                c.cmp.symbol(),
                c.rhs
            )?;
        }
        write!(f, "feasible: {}", self.feasible)
    }
}
