//! Verification results shared by every probe.

use std::fmt;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The checked claim's hypothesis does not hold for the supplied input.
    PremiseUnmet,
    /// The constraints leave the probed quantity undetermined.
    UnderDetermined,
    /// A budget ran out before the probe finished.
    Incomplete,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PremiseUnmet => "premise-unmet",
            Status::UnderDetermined => "under-determined",
            Status::Incomplete => "incomplete",
        }
    }

    /// Collapses to `pass`/`fail`: a probe that correctly found its premise
    /// unmet or its quantity undetermined has not failed.
    pub fn verdict(self) -> &'static str {
        match self {
            Status::Pass | Status::PremiseUnmet | Status::UnderDetermined => "pass",
            Status::Fail | Status::Incomplete => "fail",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Exact(Rational),
    Real(f64),
}

impl Quantity {
    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Exact(r) => rational::to_f64(r),
            Quantity::Real(x) => *x,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(r) => f.write_str(&rational::format(r)),
            // Rounding noise must not print as `-0.000000000000`.
            Quantity::Real(x) if x.abs() < 5e-13 => write!(f, "{:.12}", 0.0),
            Quantity::Real(x) => write!(f, "{x:.12}"),
        }
    }
}

/// Outcome of one verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub probe: String,
    pub status: Status,
    pub quantity: Option<Quantity>,
    pub bound: Option<Quantity>,
    pub witness: Option<String>,
    /// Extra ordered `key=value` facts.
    pub details: Vec<(String, String)>,
}

impl ProbeReport {
    pub fn new(probe: impl Into<String>, status: Status) -> Self {
        ProbeReport {
            probe: probe.into(),
            status,
            quantity: None,
            bound: None,
            witness: None,
            details: Vec::new(),
        }
    }

    pub fn with_quantity(mut self, q: Quantity) -> Self {
        self.quantity = Some(q);
        self
    }

    pub fn with_bound(mut self, b: Quantity) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.details
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `key=value` lines in a fixed order. The final line is always
    /// `status=pass|fail`, preceded by `outcome=` when the status is finer.
    pub fn to_lines(&self) -> Vec<String> {
        let mut out = vec![format!("probe={}", self.probe)];
        if let Some(q) = &self.quantity {
            out.push(format!("quantity={q}"));
        }
        if let Some(b) = &self.bound {
            out.push(format!("bound={b}"));
        }
        for (k, v) in &self.details {
            out.push(format!("{k}={v}"));
        }
        if let Some(w) = &self.witness {
            out.push(format!("witness={w}"));
        }
        if !matches!(self.status, Status::Pass | Status::Fail) {
            out.push(format!("outcome={}", self.status));
        }
        out.push(format!("status={}", self.status.verdict()));
        out
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.to_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn lines_end_with_verdict() {
        let r = ProbeReport::new("demo", Status::Incomplete)
            .with_quantity(Quantity::Exact(ratio(5, 6)))
            .detail("n", 3);
        assert_eq!(
            r.to_lines(),
            ["probe=demo", "quantity=5/6", "n=3", "outcome=incomplete", "status=fail"]
        );
        let r = ProbeReport::new("demo", Status::Pass).with_bound(Quantity::Real(0.5));
        assert_eq!(r.to_lines(), ["probe=demo", "bound=0.500000000000", "status=pass"]);
        assert_eq!(Status::PremiseUnmet.verdict(), "pass");
    }
}
