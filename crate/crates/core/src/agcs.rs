//! Ideal precoder extraction and the aging-aware generalized cosine
//! similarity (AGCS).
//!
//! Per (resource block, slot) the i-th layer's ideal precoder is the i-th
//! right singular vector of the (num_rx × P) channel matrix, computed from
//! the rx-side Gram matrix and brought to a canonical phase (first entry of
//! largest magnitude made real-positive).
//!
//! AGCS evaluates a quantized precoder field w(k, l) — built from the stale
//! view of a realization — against the fresh view's full-granularity ideal
//! precoders: the mean over all (k, l, m, n) of
//! `|v(k,l,m,n)^H · w(k,l)| / (‖v‖·‖w‖)`, then averaged over layers and,
//! for dataset sweeps, over realizations.

use crate::channel::{generate_channel, ArrayGeometry, ChannelRealization, ChannelView, ScenarioConfig};
use crate::codebook::{Codebook, CodebookConfig, GridConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64;
use serde::Serialize;

/// Unit-norm ideal precoders for one layer on the (Nf, Nt, N_RB, Ns) grid.
#[derive(Debug, Clone)]
pub struct PrecoderField {
    pub grid: GridConfig,
    pub num_ports: usize,
    pub layer: usize,
    /// Layout: `[((k·Nt + l)·N_RB + m)·Ns + n]·P + port`.
    vectors: Vec<Complex64>,
}

impl PrecoderField {
    #[inline]
    pub fn vector(&self, k: usize, l: usize, m: usize, n: usize) -> &[Complex64] {
        let g = &self.grid;
        let tile = ((k * g.num_slot_groups + l) * g.rb_per_subband + m) * g.slots_per_group + n;
        &self.vectors[tile * self.num_ports..(tile + 1) * self.num_ports]
    }

    /// Build a field from explicit per-sample vectors (testing hook).
    pub fn from_vectors(
        grid: GridConfig,
        num_ports: usize,
        layer: usize,
        vectors: Vec<Complex64>,
    ) -> Result<Self> {
        let expect = grid.num_tiles() * grid.rb_per_subband * grid.slots_per_group * num_ports;
        if vectors.len() != expect {
            return Err(Error::Shape(format!(
                "precoder field has {} entries, expected {expect}",
                vectors.len()
            )));
        }
        Ok(Self {
            grid,
            num_ports,
            layer,
            vectors,
        })
    }
}

/// AGCS summary for one (codebook, delay) pair across a dataset sweep.
#[derive(Debug, Clone, Serialize)]
pub struct AgcsResult {
    pub codebook_id: u32,
    pub delta_slots: usize,
    pub mean: f64,
    /// N·(number of realizations), where N = Nf·Nt·N_RB·Ns.
    pub sample_count: usize,
    pub per_realization: Vec<f64>,
}

/// First `count` right singular vectors (descending singular value) of a
/// (rows × cols) matrix, each unit-norm with canonical phase.
pub fn right_singular_vectors(h: &CMat, count: usize) -> Result<Vec<Vec<Complex64>>> {
    if count > h.rows.min(h.cols) {
        return Err(Error::Range(format!(
            "requested {count} layers from a {}x{} matrix",
            h.rows, h.cols
        )));
    }
    if h.max_abs() == 0.0 {
        return Err(Error::Degenerate("all-zero channel matrix".into()));
    }
    // Rx-side Gram (rows × rows) keeps the eigenproblem tiny.
    let gram = h.mul(&h.hermitian());
    let (vals, vecs) = linalg::hermitian_eigen(&gram)?;
    let mut out = Vec::with_capacity(count);
    for layer in 0..count {
        let sigma_sq = vals[layer].max(0.0);
        if sigma_sq <= 1e-28 * vals[0].max(1e-300) {
            return Err(Error::Degenerate(format!(
                "channel matrix rank below {} (singular value ratio {:.3e})",
                layer + 1,
                (sigma_sq / vals[0]).sqrt()
            )));
        }
        let u = vecs.col(layer);
        // v = H^H u / σ
        let mut v = h.hermitian().mul_vec(&u);
        let nn = linalg::norm(&v);
        for z in &mut v {
            *z /= nn;
        }
        canonical_phase(&mut v);
        out.push(v);
    }
    Ok(out)
}

/// Rotate a vector so its first entry of largest magnitude is real-positive.
fn canonical_phase(v: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mag = v[0].norm();
    for (i, z) in v.iter().enumerate().skip(1) {
        let m = z.norm();
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let rot = (v[best] / best_mag).conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Extract the per-layer ideal precoder fields for a channel view, covering
/// the grid's (Nf·N_RB) × (Nt·Ns) resource block / slot window.
pub fn ideal_precoders(
    view: &ChannelView<'_>,
    grid: &GridConfig,
    num_layers: usize,
) -> Result<Vec<PrecoderField>> {
    let num_rx = view.num_rx();
    let ports = view.geometry().num_ports();
    if num_layers < 1 || num_layers > num_rx.min(ports) {
        return Err(Error::Range(format!(
            "num_layers {num_layers} outside 1..={}",
            num_rx.min(ports)
        )));
    }
    grid.validate(view.num_rb(), view.num_slot())?;

    let samples_per_field =
        grid.num_tiles() * grid.rb_per_subband * grid.slots_per_group * ports;
    let mut fields: Vec<Vec<Complex64>> = vec![Vec::with_capacity(samples_per_field); num_layers];
    for k in 0..grid.num_subbands {
        for l in 0..grid.num_slot_groups {
            for m in 0..grid.rb_per_subband {
                for n in 0..grid.slots_per_group {
                    let rb = k * grid.rb_per_subband + m;
                    let slot = l * grid.slots_per_group + n;
                    let h = CMat::from_fn(num_rx, ports, |r, p| view.at(r, p, rb, slot));
                    let vs = right_singular_vectors(&h, num_layers)?;
                    for (layer, v) in vs.into_iter().enumerate() {
                        fields[layer].extend_from_slice(&v);
                    }
                }
            }
        }
    }
    Ok(fields
        .into_iter()
        .enumerate()
        .map(|(layer, vectors)| PrecoderField {
            grid: *grid,
            num_ports: ports,
            layer,
            vectors,
        })
        .collect())
}

/// Per-(subband, slot-group) representative precoders: the mean of the
/// tile's per-(RB, slot) precoders after phase alignment to the tile's first
/// precoder, renormalized. Layout `k·Nt + l`.
pub fn representative_precoders(field: &PrecoderField) -> Vec<Vec<Complex64>> {
    let g = &field.grid;
    let p = field.num_ports;
    let mut out = Vec::with_capacity(g.num_tiles());
    for k in 0..g.num_subbands {
        for l in 0..g.num_slot_groups {
            let first = field.vector(k, l, 0, 0);
            let mut acc = vec![Complex64::new(0.0, 0.0); p];
            for m in 0..g.rb_per_subband {
                for n in 0..g.slots_per_group {
                    let v = field.vector(k, l, m, n);
                    let z = linalg::dot(first, v);
                    let rot = if z.norm() > 1e-15 {
                        (z / z.norm()).conj()
                    } else {
                        Complex64::new(1.0, 0.0)
                    };
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += b * rot;
                    }
                }
            }
            let nn = linalg::norm(&acc);
            if nn > 1e-12 {
                out.push(linalg::scale(&acc, Complex64::new(1.0 / nn, 0.0)));
            } else {
                out.push(first.to_vec());
            }
        }
    }
    out
}

/// Aging-aware generalized cosine similarity of a quantized precoder field
/// (layout `k·Nt + l`, unit-norm columns) against an ideal field.
pub fn compute_agcs(ideal: &PrecoderField, quantized: &[Vec<Complex64>]) -> Result<f64> {
    let g = &ideal.grid;
    if quantized.len() != g.num_tiles() {
        return Err(Error::Shape(format!(
            "quantized field has {} tiles, expected {}",
            quantized.len(),
            g.num_tiles()
        )));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for k in 0..g.num_subbands {
        for l in 0..g.num_slot_groups {
            let w = &quantized[k * g.num_slot_groups + l];
            if w.len() != ideal.num_ports {
                return Err(Error::Shape("quantized precoder length mismatch".into()));
            }
            let wn = linalg::norm(w);
            for m in 0..g.rb_per_subband {
                for n in 0..g.slots_per_group {
                    let v = ideal.vector(k, l, m, n);
                    let vn = linalg::norm(v);
                    total += linalg::dot(v, w).norm() / (vn * wn);
                    count += 1;
                }
            }
        }
    }
    Ok(total / count as f64)
}

/// Per-codebook AGCS for one realization at delay `delta`, averaged over
/// layers: quantize from the stale view's representatives, evaluate against
/// the fresh view's ideal precoders.
pub fn realization_agcs(
    chan: &ChannelRealization,
    codebooks: &[Codebook],
    delta: usize,
    grid: &GridConfig,
    num_layers: usize,
) -> Result<Vec<f64>> {
    let (stale, fresh) = chan.lag_view(delta)?;
    let stale_fields = ideal_precoders(&stale, grid, num_layers)?;
    let fresh_fields = if delta == 0 {
        None // stale and fresh views coincide
    } else {
        Some(ideal_precoders(&fresh, grid, num_layers)?)
    };
    let fresh_fields = fresh_fields.as_ref().unwrap_or(&stale_fields);

    let reps: Vec<Vec<Vec<Complex64>>> =
        stale_fields.iter().map(representative_precoders).collect();

    let mut out = Vec::with_capacity(codebooks.len());
    for cb in codebooks {
        let mut acc = 0.0;
        for layer in 0..num_layers {
            let qp = cb.quantize(&reps[layer])?;
            let w = cb.reconstruct(&qp);
            acc += compute_agcs(&fresh_fields[layer], &w)?;
        }
        out.push(acc / num_layers as f64);
    }
    Ok(out)
}

/// Sweep AGCS over seeds × codebooks × delays; results ordered by
/// (codebook, delay) in input order.
pub fn agcs_over_dataset(
    geometry: &ArrayGeometry,
    scenario: &ScenarioConfig,
    seeds: &[u64],
    codebooks: &[CodebookConfig],
    deltas: &[usize],
    grid: &GridConfig,
    num_layers: usize,
) -> Result<Vec<AgcsResult>> {
    if seeds.is_empty() || codebooks.is_empty() || deltas.is_empty() {
        return Err(Error::Config("empty seeds/codebooks/deltas list".into()));
    }
    let bound: Vec<Codebook> = codebooks
        .iter()
        .map(|c| Codebook::new(*c, *geometry, *grid))
        .collect::<Result<_>>()?;
    let n_per = grid.num_tiles() * grid.rb_per_subband * grid.slots_per_group;

    let mut per: Vec<Vec<f64>> = vec![Vec::with_capacity(seeds.len()); bound.len() * deltas.len()];
    for &seed in seeds {
        let chan = generate_channel(geometry, scenario, seed)?;
        for (di, &delta) in deltas.iter().enumerate() {
            let values = realization_agcs(&chan, &bound, delta, grid, num_layers)?;
            for (ci, v) in values.into_iter().enumerate() {
                per[ci * deltas.len() + di].push(v);
            }
        }
    }

    let mut results = Vec::with_capacity(per.len());
    for (ci, cb) in codebooks.iter().enumerate() {
        for (di, &delta) in deltas.iter().enumerate() {
            let vals = &per[ci * deltas.len() + di];
            results.push(AgcsResult {
                codebook_id: cb.id,
                delta_slots: delta,
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
                sample_count: n_per * vals.len(),
                per_realization: vals.clone(),
            });
        }
    }
    Ok(results)
}
