//! CSV and JSON encodings of radial functions, traces and reports.

use heatlab_core::mild_solver::SolveTrace;
use heatlab_core::radial_field::RadialFunction;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// `r,u` rows preceded by `# key: value` comment lines.
pub fn radial_csv(f: &RadialFunction, comments: &[(&str, String)]) -> Result<String, CliError> {
    let mut out = String::new();
    for (key, value) in comments {
        out.push_str(&format!("# {key}: {value}\n"));
    }
    out.push_str(&format!(
        "# singular_power: {}\n# support_radius: {}\n",
        f.singular_power(),
        f.support_radius()
    ));
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["r", "u"])?;
    for (r, u) in f.grid().nodes().iter().zip(f.values()) {
        writer.write_record([r.to_string(), u.to_string()])?;
    }
    out.push_str(
        &String::from_utf8(writer.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"),
    );
    Ok(out)
}

/// Read back the `r,u` rows written by [`radial_csv`], skipping comments.
pub fn read_radial_csv(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        let (r, u): (f64, f64) = record?;
        rows.push((r, u));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    sup_norm: f64,
    lr_norm: f64,
    scaled_sup: f64,
}

/// `t, sup_norm, lr_norm, t^{ρ/2r}·sup_norm` per snapshot.
pub fn trace_csv(trace: &SolveTrace) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for (k, &t) in trace.times.iter().enumerate() {
        writer.serialize(TraceRow {
            t,
            sup_norm: trace.sup_norms[k],
            lr_norm: trace.lr_norms[k],
            scaled_sup: t.powf(trace.decay_exponent) * trace.sup_norms[k],
        })?;
    }
    Ok(String::from_utf8(writer.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
}

/// Status and constants of a trace.
pub fn trace_header(trace: &SolveTrace) -> Value {
    json!({
        "status": trace.status.label(),
        "snapshots": trace.times.len(),
        "t_first": trace.times.first(),
        "t_last": trace.times.last(),
        "iterations": trace.iterations,
        "sweep_changes": trace.sweep_changes,
        "decay_exponent": trace.decay_exponent,
        "r": trace.r,
        "decay_constant": trace.decay_constant,
        "residual": finite(trace.residual),
        "monotone_defect": trace.monotone_defect,
        "sandwich_defect": trace.sandwich_defect,
        "escape_time": trace.escape_time,
        "startup_bound": trace.startup_bound,
    })
}

/// JSON has no infinities; they become `null`, like NaN.
pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Serialize rows with a header into CSV text.
pub fn rows_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(!rows.is_empty())
        .from_writer(Vec::new());
    if rows.is_empty() {
        writer.write_record(header)?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    Ok(String::from_utf8(writer.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
}

pub fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    text
}
