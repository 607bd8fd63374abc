//! Output emission: JSON/CSV to stdout or a file.

use anyhow::{Context, Result};
use serde::Serialize;
use std::path::Path;

pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(&text, out)
}

pub fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Flattens a simulate report into per-message CSV rows.
pub fn flatten_csv(report: &super::SimulateReport) -> String {
    let mut out = String::from(
        "k,trials,correct,total_error,undetected_error,erasure,defaulted,resolved,unresolved,error_rate,undetected_rate,erasure_rate\n",
    );
    for m in &report.per_k {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            m.k,
            m.trials,
            m.correct,
            m.total_error,
            m.undetected_error,
            m.erasure,
            m.defaulted,
            m.resolved,
            m.unresolved,
            m.error_rate(),
            m.undetected_rate(),
            m.erasure_rate(),
        ));
    }
    out
}
