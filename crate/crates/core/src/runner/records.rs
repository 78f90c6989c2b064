use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;

/// Column layout of one run; fixed once the writer is created.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub lq: Vec<f64>,
    pub morawetz: bool,
    pub accumulators: bool,
}

impl Schema {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["t", "mass", "energy", "h1_norm"]
            .map(String::from)
            .to_vec();
        h.extend(self.lq.iter().map(|q| format!("lq_{q}")));
        if self.morawetz {
            h.extend(["J", "morawetz_lhs", "morawetz_rhs", "positivity_S"].map(String::from));
        }
        h.extend(["cube_sup", "cube_sup_integral"].map(String::from));
        if self.accumulators {
            h.extend(
                [
                    "mixed_norm_theta",
                    "acc_theta",
                    "acc_u",
                    "acc_dy_u",
                    "acc_grad_x_u",
                ]
                .map(String::from),
            );
        }
        h.push("boundary_guard_flag".into());
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorawetzColumns {
    pub j: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccumulatorColumns {
    pub mixed_norm_theta: f64,
    pub theta: f64,
    pub u: f64,
    pub dy_u: f64,
    pub grad_x_u: f64,
}

/// One row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h1_norm: f64,
    pub lq_norms: Vec<f64>,
    pub morawetz: Option<MorawetzColumns>,
    pub cube_sup: f64,
    pub cube_sup_integral: f64,
    pub accumulators: Option<AccumulatorColumns>,
    pub boundary_guard_flag: bool,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

impl DiagnosticsRecord {
    pub fn fields(&self, schema: &Schema) -> Result<Vec<String>, RunError> {
        if self.lq_norms.len() != schema.lq.len()
            || self.morawetz.is_some() != schema.morawetz
            || self.accumulators.is_some() != schema.accumulators
        {
            return Err(RunError::Records("record does not match the schema".into()));
        }
        let mut out = vec![
            fmt(self.t),
            fmt(self.mass),
            fmt(self.energy),
            fmt(self.h1_norm),
        ];
        out.extend(self.lq_norms.iter().map(|v| fmt(*v)));
        if let Some(m) = &self.morawetz {
            out.extend([m.j, m.lhs, m.rhs, m.s].map(fmt));
        }
        out.extend([self.cube_sup, self.cube_sup_integral].map(fmt));
        if let Some(a) = &self.accumulators {
            out.extend([a.mixed_norm_theta, a.theta, a.u, a.dy_u, a.grad_x_u].map(fmt));
        }
        out.push(u8::from(self.boundary_guard_flag).to_string());
        Ok(out)
    }

    pub fn from_fields(schema: &Schema, fields: &[f64]) -> Result<Self, RunError> {
        if fields.len() != schema.header().len() {
            return Err(RunError::Records(format!(
                "expected {} columns, got {}",
                schema.header().len(),
                fields.len()
            )));
        }
        let mut it = fields.iter().copied();
        let mut next = || it.next().expect("length checked");
        let (t, mass, energy, h1_norm) = (next(), next(), next(), next());
        let lq_norms = schema.lq.iter().map(|_| next()).collect();
        let morawetz = schema.morawetz.then(|| MorawetzColumns {
            j: next(),
            lhs: next(),
            rhs: next(),
            s: next(),
        });
        let (cube_sup, cube_sup_integral) = (next(), next());
        let accumulators = schema.accumulators.then(|| AccumulatorColumns {
            mixed_norm_theta: next(),
            theta: next(),
            u: next(),
            dy_u: next(),
            grad_x_u: next(),
        });
        let boundary_guard_flag = next() != 0.0;
        Ok(Self {
            t,
            mass,
            energy,
            h1_norm,
            lq_norms,
            morawetz,
            cube_sup,
            cube_sup_integral,
            accumulators,
            boundary_guard_flag,
        })
    }
}

/// CSV writer; the header is written on creation.
pub struct RecordWriter<W: Write> {
    schema: Schema,
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W, schema: Schema) -> Result<Self, RunError> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(schema.header()).map_err(csv_err)?;
        Ok(Self { schema, inner })
    }

    pub fn write(&mut self, rec: &DiagnosticsRecord) -> Result<(), RunError> {
        self.inner
            .write_record(rec.fields(&self.schema)?)
            .map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<W, RunError> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| RunError::Records(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> RunError {
    RunError::Records(e.to_string())
}

/// Writes to `<path>.partial` and renames on success, so an interrupted
/// run leaves the partial file behind.
pub struct FileRecords {
    writer: RecordWriter<File>,
    partial: PathBuf,
    target: PathBuf,
}

impl FileRecords {
    pub fn create(path: &Path, schema: Schema) -> Result<Self, RunError> {
        let partial = path.with_extension("csv.partial");
        let file = File::create(&partial)?;
        Ok(Self {
            writer: RecordWriter::new(file, schema)?,
            partial,
            target: path.to_path_buf(),
        })
    }

    pub fn write(&mut self, rec: &DiagnosticsRecord) -> Result<(), RunError> {
        self.writer.write(rec).map_err(|e| {
            RunError::Records(format!(
                "{e}; partial output left at {}",
                self.partial.display()
            ))
        })
    }

    pub fn finish(self) -> Result<PathBuf, RunError> {
        let partial = self.partial.clone();
        let file = self.writer.finish().map_err(|e| {
            RunError::Records(format!("{e}; partial output left at {}", partial.display()))
        })?;
        file.sync_all()?;
        std::fs::rename(&self.partial, &self.target)?;
        Ok(self.target)
    }
}

/// Header and numeric rows of a records file.
pub fn read_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), RunError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| RunError::Records(format!("row {}: {f:?}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Rebuilds the schema from a header row.
pub fn schema_from_header(header: &[String]) -> Result<Schema, RunError> {
    let lq = header
        .iter()
        .filter_map(|h| h.strip_prefix("lq_"))
        .map(|q| {
            q.parse::<f64>()
                .map_err(|e| RunError::Records(format!("column lq_{q}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let schema = Schema {
        lq,
        morawetz: header.iter().any(|h| h == "morawetz_lhs"),
        accumulators: header.iter().any(|h| h == "acc_theta"),
    };
    if schema.header() != header {
        return Err(RunError::Records(format!("unrecognized header {header:?}")));
    }
    Ok(schema)
}

/// Outcome of re-checking the inequality columns of a records file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub rows: usize,
    pub inequality_violations: Vec<usize>,
    pub positivity_violations: Vec<usize>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.inequality_violations.is_empty() && self.positivity_violations.is_empty()
    }
}

/// `lhs - rhs >= -tol * scale` and `S >= -positivity_tol * scale` on every
/// row, with `scale = max(|lhs|, |rhs|, mass^2)`.
pub fn verify_records(
    path: &Path,
    tol: f64,
    positivity_tol: f64,
) -> Result<VerifySummary, RunError> {
    let (header, rows) = read_records(path)?;
    let schema = schema_from_header(&header)?;
    if !schema.morawetz {
        return Err(RunError::Records(format!(
            "{} has no Morawetz columns to verify",
            path.display()
        )));
    }
    let mut summary = VerifySummary {
        rows: rows.len(),
        inequality_violations: Vec::new(),
        positivity_violations: Vec::new(),
    };
    for (i, row) in rows.iter().enumerate() {
        let rec = DiagnosticsRecord::from_fields(&schema, row)?;
        let m = rec.morawetz.expect("schema has Morawetz columns");
        let scale = m.lhs.abs().max(m.rhs.abs()).max(rec.mass * rec.mass);
        if !(m.lhs - m.rhs >= -tol * scale) {
            summary.inequality_violations.push(i);
        }
        if !(m.s >= -positivity_tol * scale) {
            summary.positivity_violations.push(i);
        }
    }
    Ok(summary)
}
