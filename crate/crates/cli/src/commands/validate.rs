//! Prints every violated precondition of a config, plus non-blocking
//! warnings for parameter ranges the ergodicity theory does not cover.

use crate::config;
use crate::Failure;
use std::path::Path;

pub fn run(path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: config::Config = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))?;

    let diag = config::validate(&cfg);
    for w in &diag.warnings {
        println!("warning: {w}");
    }
    for v in &diag.violations {
        println!("violation: {v}");
    }
    if diag.violations.is_empty() {
        println!("config ok ({} warning(s))", diag.warnings.len());
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} violation(s)",
            diag.violations.len()
        )))
    }
}
