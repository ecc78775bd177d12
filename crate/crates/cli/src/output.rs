//! Run summaries and file emission. Every numeric lands in text at 17
//! significant digits so reruns are byte-comparable.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// One checked claim: a measured value against its expectation.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    /// Stable key naming what is checked (machine-friendly).
    pub claim: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Assertion {
    /// Absolute comparison `|measured - expected| <= tolerance`.
    pub fn close(claim: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Assertion {
            claim: claim.to_string(),
            measured,
            expected,
            tolerance,
            pass: (measured - expected).abs() <= tolerance,
        }
    }

    /// One-sided comparison `measured <= bound`.
    pub fn at_most(claim: &str, measured: f64, bound: f64) -> Self {
        Assertion {
            claim: claim.to_string(),
            measured,
            expected: bound,
            tolerance: 0.0,
            pass: measured <= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub preset: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub pass: bool,
}

impl Summary {
    pub fn new(preset: &str, seed: u64, parameters: serde_json::Value) -> Self {
        Summary {
            preset: preset.to_string(),
            seed,
            parameters,
            assertions: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, a: Assertion) {
        self.pass &= a.pass;
        self.assertions.push(a);
    }

    pub fn warn(&mut self, text: impl Into<String>) {
        self.warnings.push(text.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Human-readable report: one line per assertion.
    pub fn render_text(&self) -> String {
        let mut out = format!("run {}\n", self.preset);
        for a in &self.assertions {
            out.push_str(&format!(
                "  [{}] {}: measured {:.10e} vs {:.10e} (tol {:.1e})\n",
                if a.pass { "pass" } else { "FAIL" },
                a.claim,
                a.measured,
                a.expected,
                a.tolerance
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("  note: {w}\n"));
        }
        for f in &self.outputs {
            out.push_str(&format!("  wrote {f}\n"));
        }
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }
}

/// Output directory handling: flag value, else `LOGITDYN_OUT_DIR`, else
/// `./out`.
pub fn resolve_out_dir(flag: Option<&str>) -> PathBuf {
    match flag {
        Some(d) => PathBuf::from(d),
        None => std::env::var("LOGITDYN_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|_| PathBuf::from("out")),
    }
}

pub fn write_file(
    dir: &Path,
    name: &str,
    contents: &str,
    summary: &mut Summary,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    summary.outputs.push(path.display().to_string());
    Ok(())
}
