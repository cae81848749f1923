//! JSON-lines dataset files.
//!
//! Line 1 is a header object (format version, tool version, config hash,
//! feature ordering, codebook ids/overheads, delays); every following line
//! is one row: assistance features, per-codebook true AGCS labels, and
//! provenance (channel seed, scenario id, delta). Channels are never stored
//! — they regenerate from (config, seed).

use crate::error::{Error, Result};
use crate::predictor::{Dataset, DatasetRow};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format_version: u32,
    pub tool_version: String,
    /// Hex FNV-1a hash of the generating config.
    pub config_hash: String,
    /// Names of the feature columns, in order.
    pub feature_names: Vec<String>,
    /// Column counts per assistance group (after complex-mode expansion).
    pub sdcp_cols: usize,
    pub fdcp_cols: usize,
    pub tdcp_cols: usize,
    /// Full assistance feature count driving the default hidden width.
    pub full_feature_count: usize,
    pub codebook_ids: Vec<u32>,
    pub codebook_overhead_bits: Vec<u64>,
    pub deltas: Vec<usize>,
    pub num_layers: usize,
    pub complex_mode: bool,
}

/// Write header + rows as JSON lines. Output is byte-identical for
/// identical inputs.
pub fn write_dataset(path: &Path, header: &DatasetHeader, rows: &[DatasetRow]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut out, header).map_err(io_err)?;
    out.write_all(b"\n")?;
    for row in rows {
        serde_json::to_writer(&mut out, row).map_err(io_err)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn io_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::Other, e))
}

/// Read and validate a dataset file; malformed lines report their line
/// number.
pub fn read_dataset(path: &Path) -> Result<(DatasetHeader, Vec<DatasetRow>)> {
    let display = path.display().to_string();
    let fmt = |line: usize, msg: String| Error::Format {
        path: display.clone(),
        line,
        msg,
    };
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header_line = lines
        .next()
        .ok_or_else(|| fmt(1, "missing header line".into()))??;
    let header: DatasetHeader = serde_json::from_str(&header_line)
        .map_err(|e| fmt(1, format!("bad header: {e}")))?;
    if header.format_version != DATASET_FORMAT_VERSION {
        return Err(fmt(
            1,
            format!(
                "unsupported dataset format version {} (expected {DATASET_FORMAT_VERSION})",
                header.format_version
            ),
        ));
    }
    if header.feature_names.len() != header.sdcp_cols + header.fdcp_cols + header.tdcp_cols {
        return Err(fmt(1, "feature names do not match group column counts".into()));
    }
    if header.codebook_ids.len() != header.codebook_overhead_bits.len() {
        return Err(fmt(1, "codebook ids and overhead table lengths differ".into()));
    }

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: DatasetRow = serde_json::from_str(&line)
            .map_err(|e| fmt(line_no, format!("bad row: {e}")))?;
        if row.features.len() != header.feature_names.len() {
            return Err(fmt(
                line_no,
                format!(
                    "row has {} features, header lists {}",
                    row.features.len(),
                    header.feature_names.len()
                ),
            ));
        }
        if row.labels.len() != header.codebook_ids.len() {
            return Err(fmt(
                line_no,
                format!(
                    "row has {} labels for {} codebooks",
                    row.labels.len(),
                    header.codebook_ids.len()
                ),
            ));
        }
        if row.labels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(fmt(line_no, "label outside [0, 1]".into()));
        }
        if !header.deltas.contains(&row.delta) {
            return Err(fmt(line_no, format!("delta {} not in header", row.delta)));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Materialize an in-memory dataset (all rows tagged Train until splits are
/// assigned).
pub fn to_dataset(header: &DatasetHeader, rows: Vec<DatasetRow>) -> Result<Dataset> {
    Dataset::new(
        rows,
        header.feature_names.clone(),
        header.codebook_ids.clone(),
        header.full_feature_count,
    )
}

/// Assistance feature group toggles for training/evaluation views.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureGroups {
    pub sdcp: bool,
    pub fdcp: bool,
    pub tdcp: bool,
}

impl FeatureGroups {
    pub fn all() -> Self {
        Self {
            sdcp: true,
            fdcp: true,
            tdcp: true,
        }
    }

    /// Parse a comma-separated group list, e.g. `"sdcp,fdcp"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut groups = Self {
            sdcp: false,
            fdcp: false,
            tdcp: false,
        };
        for part in spec.split(',') {
            match part.trim().to_ascii_lowercase().as_str() {
                "sdcp" => groups.sdcp = true,
                "fdcp" => groups.fdcp = true,
                "tdcp" => groups.tdcp = true,
                "" => {}
                other => {
                    return Err(Error::Config(format!(
                        "unknown feature group '{other}' (expected sdcp, fdcp, tdcp)"
                    )))
                }
            }
        }
        if !(groups.sdcp || groups.fdcp || groups.tdcp) {
            return Err(Error::Config("feature group list is empty".into()));
        }
        Ok(groups)
    }

    /// Column mask over the header's feature layout.
    pub fn mask(&self, header: &DatasetHeader) -> Vec<bool> {
        let mut mask = Vec::with_capacity(header.feature_names.len());
        mask.extend(std::iter::repeat(self.sdcp).take(header.sdcp_cols));
        mask.extend(std::iter::repeat(self.fdcp).take(header.fdcp_cols));
        mask.extend(std::iter::repeat(self.tdcp).take(header.tdcp_cols));
        mask
    }
}
