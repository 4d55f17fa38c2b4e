//! The JSON report every subcommand prints.

use nagata_core::check::{all_pass, Check};
use serde::Serialize;
use serde_json::Value;

use crate::io::Loaded;
use crate::CliError;

/// An input file and its SHA-256 digest.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

/// Deterministic record of one run: no timestamps or timings.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub exact: bool,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: Value,
    pub error: Option<ErrorInfo>,
}

impl RunReport {
    pub fn new(command: &str, args: Vec<String>, exact: bool, seed: u64) -> Self {
        RunReport {
            command: command.into(),
            args,
            inputs: Vec::new(),
            exact,
            seed,
            passed: false,
            checks: Vec::new(),
            result: Value::Null,
            error: None,
        }
    }

    pub fn input(&mut self, role: &str, file: &Loaded) {
        self.inputs.push(InputDigest {
            role: role.into(),
            path: file.path.display().to_string(),
            sha256: file.sha256.clone(),
        });
    }

    /// Records the checks and result; `passed` follows the asserted checks.
    pub fn finish(&mut self, checks: Vec<Check>, result: Value) {
        self.passed = all_pass(&checks);
        self.checks = checks;
        self.result = result;
    }

    pub fn fail(&mut self, e: &CliError) {
        let kind = match e {
            CliError::Input(_) => "input",
            CliError::Usage(_) => "usage",
            CliError::Run(_) => "run",
        };
        self.passed = false;
        self.error = Some(ErrorInfo { kind, message: e.to_string() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Short human summary: verdict, check counts and failing checks.
    pub fn summary(&self) -> String {
        let asserted: Vec<&Check> = self.checks.iter().filter(|c| c.asserted).collect();
        let failed: Vec<&&Check> = asserted.iter().filter(|c| !c.holds).collect();
        let mut out = format!(
            "{}: {} ({} of {} asserted checks hold)",
            self.command,
            if self.passed { "PASS" } else { "FAIL" },
            asserted.len() - failed.len(),
            asserted.len()
        );
        for c in failed {
            out.push_str(&format!("\n  failed: {}", c.name));
            if let (Some(m), Some(b)) = (c.measured, c.bound) {
                out.push_str(&format!(" (measured {m}, bound {b})"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!(" [{w}]"));
            }
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("\n  error: {}", e.message));
        }
        out
    }
}
