//! Overhead-aware codebook selection policies and their evaluation harness.
//!
//! Candidates are always ordered by CSI overhead, strictly increasing. The
//! threshold-first policy returns the first (cheapest) candidate whose
//! predicted AGCS meets a common threshold, falling back to the highest
//! prediction when none does. The reference-gain policy keeps a reference
//! codebook unless some candidate beats it by that candidate's own margin,
//! in which case the highest-predicted feasible candidate wins. Both
//! comparisons are inclusive (≥), and argmax ties break toward the lower
//! index, i.e. toward lower overhead.

use crate::error::{Error, Result};
use crate::predictor::{Dataset, PredictorModel, Split};
use serde::{Deserialize, Serialize};

/// Policy variant over a candidate list ordered by increasing overhead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SelectionPolicy {
    /// First candidate with predicted AGCS ≥ `rho_min`; argmax fallback.
    ThresholdFirst { rho_min: f64 },
    /// Highest-predicted candidate whose gain over the reference meets its
    /// per-candidate threshold; the reference when none qualifies.
    ReferenceGain {
        ref_index: usize,
        /// Per-candidate gain thresholds; `None` only at the reference slot.
        rho0: Vec<Option<f64>>,
    },
}

/// First index (in overhead order) whose prediction meets `rho_min`
/// inclusively; if none, the argmax of the predictions (lowest index wins
/// exact ties).
pub fn select_threshold_first(preds: &[f64], rho_min: f64) -> usize {
    debug_assert!(!preds.is_empty());
    for (i, p) in preds.iter().enumerate() {
        if *p >= rho_min {
            return i;
        }
    }
    argmax_lowest(preds)
}

fn argmax_lowest(preds: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, p) in preds.iter().enumerate().skip(1) {
        if *p > preds[best] {
            best = i;
        }
    }
    best
}

/// Among candidates whose gain over the reference meets their own threshold
/// (inclusively), return the one with the highest prediction (lowest index
/// on ties); the reference when the feasible set is empty.
pub fn select_reference_gain(
    preds: &[f64],
    ref_index: usize,
    rho0: &[Option<f64>],
) -> Result<usize> {
    if ref_index >= preds.len() {
        return Err(Error::Config(format!(
            "reference index {ref_index} outside the {} candidates",
            preds.len()
        )));
    }
    if rho0.len() != preds.len() {
        return Err(Error::Config(format!(
            "rho0 has {} entries for {} candidates",
            rho0.len(),
            preds.len()
        )));
    }
    let ref_pred = preds[ref_index];
    let mut best: Option<usize> = None;
    for (i, p) in preds.iter().enumerate() {
        if i == ref_index {
            continue;
        }
        let threshold = rho0[i].ok_or_else(|| {
            Error::Config(format!("candidate {i} has no rho0 threshold"))
        })?;
        if p - ref_pred >= threshold {
            let better = match best {
                None => true,
                Some(b) => *p > preds[b],
            };
            if better {
                best = Some(i);
            }
        }
    }
    Ok(best.unwrap_or(ref_index))
}

/// Apply a policy to one prediction vector.
pub fn select(policy: &SelectionPolicy, preds: &[f64]) -> Result<usize> {
    if preds.is_empty() {
        return Err(Error::Config("empty prediction vector".into()));
    }
    match policy {
        SelectionPolicy::ThresholdFirst { rho_min } => Ok(select_threshold_first(preds, *rho_min)),
        SelectionPolicy::ReferenceGain { ref_index, rho0 } => {
            select_reference_gain(preds, *ref_index, rho0)
        }
    }
}

/// Aggregates for one policy or fixed-codebook baseline.
#[derive(Debug, Clone, Serialize)]
pub struct PolicyReportEntry {
    pub name: String,
    pub mean_agcs: f64,
    /// 5th percentile of the achieved true AGCS (nearest-rank).
    pub p5_agcs: f64,
    pub mean_overhead_bits: f64,
    /// Percent saved versus the always-largest-codebook baseline.
    pub overhead_reduction_pct: f64,
}

/// Achieved-AGCS / overhead comparison of policies against every
/// fixed-codebook baseline.
#[derive(Debug, Clone, Serialize)]
pub struct PolicyReport {
    pub entries: Vec<PolicyReportEntry>,
    pub rows_evaluated: usize,
}

fn percentile_5(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let rank = ((0.05 * n as f64).ceil() as usize).max(1) - 1;
    values[rank.min(n - 1)]
}

/// Evaluate policies on a dataset split: per row, predict (or use the true
/// labels when `model` is `None`), select, then score the selected
/// codebook's TRUE AGCS and overhead. Baseline entries cover every fixed
/// codebook; reductions are relative to the largest (last) candidate.
pub fn evaluate_policy(
    dataset: &Dataset,
    model: Option<&PredictorModel>,
    policies: &[(String, SelectionPolicy)],
    overhead_bits: &[u64],
    split: Option<Split>,
) -> Result<PolicyReport> {
    let g = dataset.label_len();
    if overhead_bits.len() != g {
        return Err(Error::Shape(format!(
            "overhead table has {} entries for {g} codebooks",
            overhead_bits.len()
        )));
    }
    let idx: Vec<usize> = match split {
        Some(s) => dataset.indices_in(s),
        None => (0..dataset.rows.len()).collect(),
    };
    if idx.is_empty() {
        return Err(Error::Config("no rows to evaluate the policy on".into()));
    }

    let largest = *overhead_bits.last().unwrap() as f64;
    let mut entries = Vec::new();

    for (name, policy) in policies {
        let mut achieved = Vec::with_capacity(idx.len());
        let mut overhead_sum = 0.0;
        for &i in &idx {
            let row = &dataset.rows[i];
            let preds = match model {
                Some(m) => m.forward(&row.features)?,
                None => row.labels.clone(),
            };
            let sel = select(policy, &preds)?;
            achieved.push(row.labels[sel]);
            overhead_sum += overhead_bits[sel] as f64;
        }
        let mean_agcs = achieved.iter().sum::<f64>() / achieved.len() as f64;
        let mean_overhead = overhead_sum / idx.len() as f64;
        entries.push(PolicyReportEntry {
            name: name.clone(),
            mean_agcs,
            p5_agcs: percentile_5(&mut achieved),
            mean_overhead_bits: mean_overhead,
            overhead_reduction_pct: 100.0 * (1.0 - mean_overhead / largest),
        });
    }

    for (c, &bits) in overhead_bits.iter().enumerate() {
        let mut achieved: Vec<f64> = idx.iter().map(|&i| dataset.rows[i].labels[c]).collect();
        let mean_agcs = achieved.iter().sum::<f64>() / achieved.len() as f64;
        entries.push(PolicyReportEntry {
            name: format!("fixed_c{}", dataset.codebook_ids[c]),
            mean_agcs,
            p5_agcs: percentile_5(&mut achieved),
            mean_overhead_bits: bits as f64,
            overhead_reduction_pct: 100.0 * (1.0 - bits as f64 / largest),
        });
    }

    Ok(PolicyReport {
        entries,
        rows_evaluated: idx.len(),
    })
}
