//! CSV reports of evaluation results.
//!
//! Columns: `dataset`, `algorithm`, `fold`, then one column per measure.
//! With per-label output each macro measure is followed by one
//! `<measure>[<label>]` column per label. Cross-validation emits one row per
//! fold (`1`..`k`) followed by `mean` and `std` rows; holdout emits a single
//! row with fold `holdout`. Values have six fractional digits.

use std::fs::{self, OpenOptions};
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::eval::EvaluationResult;
use crate::metrics::{Measure, MeasureValue};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0} already exists (pass the overwrite flag to replace it)")]
    Exists(PathBuf),
    #[error("measure '{0}' was not evaluated")]
    NotEvaluated(String),
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn number(v: f64) -> String {
    // Avoid "-0.000000".
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Renders the report. An empty `filter` selects every evaluated measure.
pub fn render_report(result: &EvaluationResult, filter: &[Measure], per_label: bool) -> Result<String, ReportError> {
    let selected: Vec<Measure> = if filter.is_empty() {
        result.measures.clone()
    } else {
        filter.to_vec()
    };
    let mut columns: Vec<usize> = Vec::with_capacity(selected.len());
    for m in &selected {
        let i = result
            .measures
            .iter()
            .position(|x| x == m)
            .ok_or_else(|| ReportError::NotEvaluated(m.name().to_string()))?;
        if per_label && m.is_macro() && !result.per_label {
            return Err(ReportError::NotEvaluated(format!("{m} per label")));
        }
        columns.push(i);
    }

    let mut header = vec!["dataset".to_string(), "algorithm".to_string(), "fold".to_string()];
    for m in &selected {
        header.push(m.name().to_string());
        if per_label && m.is_macro() {
            header.extend(result.label_names.iter().map(|l| format!("{m}[{l}]")));
        }
    }

    let mut out = String::new();
    let push_row = |out: &mut String, fold: &str, values: &[MeasureValue]| {
        let mut fields = vec![quote(&result.dataset), quote(&result.algorithm), quote(fold)];
        for (&i, m) in columns.iter().zip(&selected) {
            let v = &values[i];
            fields.push(number(v.value));
            if per_label && m.is_macro() {
                let per = v.per_label.as_deref().unwrap_or_default();
                fields.extend(per.iter().map(|&x| number(x)));
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    };
    out.push_str(&header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));
    out.push('\n');
    match (&result.mean, &result.std) {
        (Some(mean), Some(std)) => {
            for f in &result.folds {
                push_row(&mut out, &(f.fold + 1).to_string(), &f.values);
            }
            push_row(&mut out, "mean", mean);
            push_row(&mut out, "std", std);
        }
        _ => {
            for f in &result.folds {
                push_row(&mut out, "holdout", &f.values);
            }
        }
    }
    Ok(out)
}

/// Writes the report to `path`, creating parent directories. An existing
/// file is replaced only when `overwrite` is set.
pub fn write_report(
    result: &EvaluationResult,
    path: &Path,
    filter: &[Measure],
    per_label: bool,
    overwrite: bool,
) -> Result<(), ReportError> {
    let text = render_report(result, filter, per_label)?;
    let io_err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut opts = OpenOptions::new();
    opts.write(true);
    if overwrite {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    let mut file = opts.open(path).map_err(|e| {
        if e.kind() == io::ErrorKind::AlreadyExists {
            ReportError::Exists(path.to_path_buf())
        } else {
            io_err(e)
        }
    })?;
    file.write_all(text.as_bytes()).map_err(io_err)
}
