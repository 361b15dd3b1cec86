//! CSV ingestion and emission for point sets in either coordinate model.
//!
//! Poincaré-disk files carry columns `x,y[,label]`; hyperboloid files carry
//! `x0,x1,x2[,label]`. Files may omit the header, in which case the model is
//! inferred from the number of numeric columns. All numbers are written in
//! scientific notation with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use hyperq::{from_ball, to_ball, BPoint, HPoint};
use nalgebra::DVector;

use crate::CliError;

/// Coordinate model of a CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Poincare,
    Hyperboloid,
}

impl Model {
    fn columns(self) -> usize {
        match self {
            Model::Poincare => 2,
            Model::Hyperboloid => 3,
        }
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            Model::Poincare => &["x", "y"],
            Model::Hyperboloid => &["x0", "x1", "x2"],
        }
    }
}

/// A parsed point file: hyperboloid-model points plus the optional label
/// column and the model the file was written in.
#[derive(Debug, Clone)]
pub struct PointFile {
    pub points: Vec<HPoint>,
    pub labels: Option<Vec<String>>,
    pub model: Model,
}

fn input_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}:{line}: {msg}", path.display()))
}

fn split_line(line: &str) -> Vec<String> {
    line.split(',').map(|f| f.trim().to_string()).collect()
}

/// Classifies the first row: a header (returning its model and whether it
/// declares a label column) or a data row.
fn classify_header(fields: &[String]) -> Option<(Model, bool)> {
    let lower: Vec<String> = fields.iter().map(|f| f.to_ascii_lowercase()).collect();
    for model in [Model::Poincare, Model::Hyperboloid] {
        let want = model.header();
        let n = want.len();
        if lower.len() == n && lower == want {
            return Some((model, false));
        }
        if lower.len() == n + 1 && lower[..n] == *want && lower[n] == "label" {
            return Some((model, true));
        }
    }
    None
}

/// Reads a point file, inferring the model from the header or the column
/// count unless `expect` pins it. Malformed rows are reported with their
/// 1-based line number.
pub fn read_points(path: &Path, expect: Option<Model>) -> Result<PointFile, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push((i + 1, split_line(line)));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{}: file contains no data rows",
            path.display()
        )));
    }

    // Header handling: a non-numeric first row must be a recognized header.
    let mut declared: Option<(Model, bool)> = None;
    if rows[0].1.iter().any(|f| f.parse::<f64>().is_err()) {
        let (line, fields) = rows.remove(0);
        declared = Some(classify_header(&fields).ok_or_else(|| {
            input_err(
                path,
                line,
                format!(
                    "unrecognized header `{}` (expected `x,y[,label]` or `x0,x1,x2[,label]`)",
                    fields.join(",")
                ),
            )
        })?);
        if rows.is_empty() {
            return Err(CliError::Input(format!(
                "{}: file contains no data rows",
                path.display()
            )));
        }
    }

    // Model resolution: explicit flag > header > column-count inference.
    let ncols = rows[0].1.len();
    let numeric_prefix = rows[0].1.iter().take_while(|f| f.parse::<f64>().is_ok()).count();
    let inferred = match (numeric_prefix, ncols) {
        (2, 2) | (2, 3) => Some((Model::Poincare, ncols == 3)),
        (3, 3) | (3, 4) => Some((Model::Hyperboloid, ncols == 4)),
        (4, 4) => Some((Model::Hyperboloid, true)),
        _ => None,
    };
    let (model, labeled) = match (expect, declared, inferred) {
        (_, Some((m, l)), _) => {
            if let Some(e) = expect {
                if e != m {
                    return Err(CliError::Input(format!(
                        "{}: file header declares the {} model but --model asked for {}",
                        path.display(),
                        model_name(m),
                        model_name(e)
                    )));
                }
            }
            (m, l)
        }
        (Some(e), None, _) => {
            let want = e.columns();
            if ncols != want && ncols != want + 1 {
                return Err(input_err(
                    path,
                    rows[0].0,
                    format!(
                        "expected {want} coordinates for the {} model, found {ncols} fields",
                        model_name(e)
                    ),
                ));
            }
            (e, ncols == want + 1)
        }
        (None, None, Some(mi)) => mi,
        (None, None, None) => {
            return Err(input_err(
                path,
                rows[0].0,
                format!("cannot infer the coordinate model from {ncols} fields"),
            ));
        }
    };

    let want = model.columns();
    let mut points = Vec::with_capacity(rows.len());
    let mut labels: Vec<String> = Vec::with_capacity(if labeled { rows.len() } else { 0 });
    for (line, fields) in &rows {
        let expect_cols = want + usize::from(labeled);
        if fields.len() != expect_cols {
            return Err(input_err(
                path,
                *line,
                format!("expected {expect_cols} fields, found {}", fields.len()),
            ));
        }
        let mut coords = Vec::with_capacity(want);
        for f in &fields[..want] {
            coords.push(f.parse::<f64>().map_err(|_| {
                input_err(path, *line, format!("`{f}` is not a valid number"))
            })?);
        }
        let p = match model {
            Model::Poincare => {
                let b = BPoint::new(DVector::from_vec(coords))
                    .map_err(|e| input_err(path, *line, e))?;
                from_ball(&b)
            }
            Model::Hyperboloid => HPoint::new(DVector::from_vec(coords))
                .map_err(|e| input_err(path, *line, e))?,
        };
        points.push(p);
        if labeled {
            labels.push(fields[want].clone());
        }
    }
    Ok(PointFile {
        points,
        labels: labeled.then_some(labels),
        model,
    })
}

pub fn model_name(model: Model) -> &'static str {
    match model {
        Model::Poincare => "poincare",
        Model::Hyperboloid => "hyperboloid",
    }
}

/// Renders a point file as CSV text (header + rows, 17 significant digits).
pub fn render_csv(
    points: &[HPoint],
    labels: Option<&[String]>,
    model: Model,
) -> Result<String, CliError> {
    if let Some(ls) = labels {
        if ls.len() != points.len() {
            return Err(CliError::Input(format!(
                "{} labels for {} points",
                ls.len(),
                points.len()
            )));
        }
    }
    let mut out = String::new();
    out.push_str(&model.header().join(","));
    if labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, p) in points.iter().enumerate() {
        let coords: Vec<f64> = match model {
            Model::Poincare => to_ball(p).coords().iter().copied().collect(),
            Model::Hyperboloid => p.coords().iter().copied().collect(),
        };
        let mut first = true;
        for c in coords {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{c:.16e}");
            first = false;
        }
        if let Some(ls) = labels {
            let _ = write!(out, ",{}", ls[i]);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename), or to stdout when `path` is `None`.
pub fn write_atomic(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            tmp.write_all(content.as_bytes())
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            tmp.persist(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(())
        }
    }
}
