//! Named, measured inequality checks collected by the constructions.

use serde::Serialize;

use crate::scalar::Scalar;

/// One asserted (or, in forced mode, merely measured) inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// What is being bounded, e.g. `"Lip(h) <= C*lambda"`.
    pub name: String,
    pub holds: bool,
    /// `false` for checks that are reported but do not decide pass/fail.
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    /// `measured <= bound` up to the float tolerance.
    pub fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::measured(name, measured.le_tol(&bound), measured, bound)
    }

    /// `measured >= bound` up to the float tolerance.
    pub fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::measured(name, bound.le_tol(&measured), measured, bound)
    }

    fn measured(name: impl Into<String>, holds: bool, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), holds, asserted: true, measured: Some(measured), bound: Some(bound), witness: None }
    }

    /// A yes/no property.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self { name: name.into(), holds, asserted: true, measured: None, bound: None, witness: None }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    /// Keep the measurement but stop it from deciding the outcome.
    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn asserted_if(mut self, asserted: bool) -> Self {
        self.asserted = asserted;
        self
    }

    /// `true` unless the check is asserted and fails.
    pub fn passes(&self) -> bool {
        self.holds || !self.asserted
    }
}

/// `true` when every asserted check holds.
pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::passes)
}

/// The asserted checks that fail.
pub fn failures(checks: &[Check]) -> Vec<&Check> {
    checks.iter().filter(|c| !c.passes()).collect()
}

/// Describes failing checks in one line.
pub fn describe_failures(checks: &[Check]) -> String {
    failures(checks)
        .iter()
        .map(|c| match (c.measured, c.bound) {
            (Some(m), Some(b)) => format!("{} (measured {m}, bound {b})", c.name),
            _ => c.name.clone(),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn informational_checks_never_fail() {
        let c = Check::le("x <= 1", 2.0, 1.0);
        assert!(!c.passes());
        assert!(c.clone().informational().passes());
        assert!(Check::ge("x >= 1", 1.0 - 1e-12, 1.0).holds);
        assert_eq!(describe_failures(&[c]), "x <= 1 (measured 2, bound 1)");
    }
}
