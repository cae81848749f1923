//! UE assistance information: normalized spatial, frequency and time channel
//! autocorrelation (SDCP, FDCP, TDCP) and predictor feature assembly.
//!
//! Each correlation sums `h(x + Δ)·conj(h(x))` over a window that shrinks
//! with the offset; every sum is divided by its count of contributing terms
//! before normalizing to the zero-offset value (overlap normalization), so a
//! pure plane wave reports magnitude 1 at every offset. Spatial products pair
//! ports within the same polarization group only; all correlations average
//! over resource blocks, slots and rx antennas.
//!
//! Reports hold magnitudes by default. In complex mode the normalized complex
//! values are kept alongside and feature assembly interleaves re/im.

use crate::channel::{ChannelRealization, NUM_POL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Assistance report dimensions and mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssistanceConfig {
    /// Frequency offsets F (FDCP length).
    pub freq_offsets: usize,
    /// Time delays Q (TDCP length).
    pub time_delays: usize,
    /// Report complex correlations (features interleave re/im) instead of
    /// magnitudes.
    #[serde(default)]
    pub complex_mode: bool,
}

impl Default for AssistanceConfig {
    fn default() -> Self {
        Self {
            freq_offsets: 8,
            time_delays: 4,
            complex_mode: false,
        }
    }
}

/// One UE assistance report: SDCP matrix, FDCP and TDCP vectors plus the
/// feature mask over all `N1·N2 + F + Q` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistanceReport {
    /// Offset grid extents (equal to the array dimensions).
    pub n1_offsets: usize,
    pub n2_offsets: usize,
    /// Magnitudes, row-major over (Δp1, Δp2): index `Δp1·N2 + Δp2`.
    pub sdcp: Vec<f64>,
    pub fdcp: Vec<f64>,
    pub tdcp: Vec<f64>,
    /// Normalized complex correlations, populated in complex mode.
    pub sdcp_complex: Option<Vec<Complex64>>,
    pub fdcp_complex: Option<Vec<Complex64>>,
    pub tdcp_complex: Option<Vec<Complex64>>,
    /// Mask over the concatenated [sdcp, fdcp, tdcp] entries.
    pub feature_mask: Vec<bool>,
}

/// Normalized complex spatial correlation over the full (N1 × N2) offset
/// grid, row-major `Δp1·N2 + Δp2`. Entry (0, 0) is exactly 1.
pub fn compute_sdcp_complex(chan: &ChannelRealization) -> Vec<Complex64> {
    let g = &chan.geometry;
    let s = &chan.scenario;
    let mut sums = vec![Complex64::new(0.0, 0.0); g.n1 * g.n2];
    for (d1, d2, slot) in offsets(g.n1, g.n2) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for rx in 0..s.num_rx {
            for pol in 0..NUM_POL {
                for p1 in 0..g.n1 - d1 {
                    for p2 in 0..g.n2 - d2 {
                        let hi = g.port_index(pol, p1 + d1, p2 + d2);
                        let lo = g.port_index(pol, p1, p2);
                        for f in 0..s.num_rb {
                            for t in 0..s.num_slot {
                                acc += chan.at(rx, hi, f, t) * chan.at(rx, lo, f, t).conj();
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        sums[slot] = acc / count as f64;
    }
    let zero = sums[0];
    sums.iter().map(|c| c / zero).collect()
}

fn offsets(n1: usize, n2: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n1).flat_map(move |d1| (0..n2).map(move |d2| (d1, d2, d1 * n2 + d2)))
}

/// Normalized spatial correlation magnitudes (SDCP).
pub fn compute_sdcp(chan: &ChannelRealization) -> Vec<f64> {
    compute_sdcp_complex(chan).iter().map(|c| c.norm()).collect()
}

/// Normalized complex frequency correlation for RB offsets `0..F`.
pub fn compute_fdcp_complex(chan: &ChannelRealization, f_offsets: usize) -> Result<Vec<Complex64>> {
    let s = &chan.scenario;
    if f_offsets > s.num_rb {
        return Err(Error::Range(format!(
            "F={f_offsets} exceeds num_rb={}",
            s.num_rb
        )));
    }
    let ports = chan.geometry.num_ports();
    let mut sums = Vec::with_capacity(f_offsets);
    for df in 0..f_offsets {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for rx in 0..s.num_rx {
            for port in 0..ports {
                for f in 0..s.num_rb - df {
                    for t in 0..s.num_slot {
                        acc += chan.at(rx, port, f + df, t) * chan.at(rx, port, f, t).conj();
                        count += 1;
                    }
                }
            }
        }
        sums.push(acc / count as f64);
    }
    let zero = sums[0];
    Ok(sums.iter().map(|c| c / zero).collect())
}

/// Normalized frequency correlation magnitudes (FDCP).
pub fn compute_fdcp(chan: &ChannelRealization, f_offsets: usize) -> Result<Vec<f64>> {
    Ok(compute_fdcp_complex(chan, f_offsets)?
        .iter()
        .map(|c| c.norm())
        .collect())
}

/// Normalized complex time correlation for slot delays `0..Q`.
pub fn compute_tdcp_complex(chan: &ChannelRealization, q_delays: usize) -> Result<Vec<Complex64>> {
    let s = &chan.scenario;
    if q_delays > s.num_slot {
        return Err(Error::Range(format!(
            "Q={q_delays} exceeds num_slot={}",
            s.num_slot
        )));
    }
    let ports = chan.geometry.num_ports();
    let mut sums = Vec::with_capacity(q_delays);
    for dt in 0..q_delays {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for rx in 0..s.num_rx {
            for port in 0..ports {
                for f in 0..s.num_rb {
                    for t in 0..s.num_slot - dt {
                        acc += chan.at(rx, port, f, t + dt) * chan.at(rx, port, f, t).conj();
                        count += 1;
                    }
                }
            }
        }
        sums.push(acc / count as f64);
    }
    let zero = sums[0];
    Ok(sums.iter().map(|c| c / zero).collect())
}

/// Normalized time correlation magnitudes (TDCP).
pub fn compute_tdcp(chan: &ChannelRealization, q_delays: usize) -> Result<Vec<f64>> {
    Ok(compute_tdcp_complex(chan, q_delays)?
        .iter()
        .map(|c| c.norm())
        .collect())
}

impl AssistanceReport {
    /// Compute the full report with an all-true feature mask.
    pub fn compute(chan: &ChannelRealization, cfg: &AssistanceConfig) -> Result<Self> {
        let sdcp_c = compute_sdcp_complex(chan);
        let fdcp_c = compute_fdcp_complex(chan, cfg.freq_offsets)?;
        let tdcp_c = compute_tdcp_complex(chan, cfg.time_delays)?;
        let total = sdcp_c.len() + fdcp_c.len() + tdcp_c.len();
        Ok(Self {
            n1_offsets: chan.geometry.n1,
            n2_offsets: chan.geometry.n2,
            sdcp: sdcp_c.iter().map(|c| c.norm()).collect(),
            fdcp: fdcp_c.iter().map(|c| c.norm()).collect(),
            tdcp: tdcp_c.iter().map(|c| c.norm()).collect(),
            sdcp_complex: cfg.complex_mode.then_some(sdcp_c),
            fdcp_complex: cfg.complex_mode.then_some(fdcp_c),
            tdcp_complex: cfg.complex_mode.then_some(tdcp_c),
            feature_mask: vec![true; total],
        })
    }

    pub fn num_entries(&self) -> usize {
        self.sdcp.len() + self.fdcp.len() + self.tdcp.len()
    }
}

/// Concatenate [sdcp row-major, fdcp, tdcp] filtered by the feature mask;
/// masked-out entries are dropped, not zeroed. In complex mode each kept
/// entry contributes (re, im).
pub fn assemble_features(report: &AssistanceReport) -> Vec<f64> {
    let mut out = Vec::new();
    match (&report.sdcp_complex, &report.fdcp_complex, &report.tdcp_complex) {
        (Some(s), Some(f), Some(t)) => {
            for (i, c) in s.iter().chain(f).chain(t).enumerate() {
                if report.feature_mask[i] {
                    out.push(c.re);
                    out.push(c.im);
                }
            }
        }
        _ => {
            for (i, v) in report
                .sdcp
                .iter()
                .chain(&report.fdcp)
                .chain(&report.tdcp)
                .enumerate()
            {
                if report.feature_mask[i] {
                    out.push(*v);
                }
            }
        }
    }
    out
}

/// Stable names for the concatenated feature entries.
pub fn feature_names(n1: usize, n2: usize, f_offsets: usize, q_delays: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(n1 * n2 + f_offsets + q_delays);
    for d1 in 0..n1 {
        for d2 in 0..n2 {
            names.push(format!("sdcp[{d1},{d2}]"));
        }
    }
    for df in 0..f_offsets {
        names.push(format!("fdcp[{df}]"));
    }
    for dt in 0..q_delays {
        names.push(format!("tdcp[{dt}]"));
    }
    names
}
