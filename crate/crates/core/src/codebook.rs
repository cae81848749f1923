//! Generalized DFT codebooks: basis selection, sparse linear-combination
//! coefficients, reconstruction and CSI overhead pricing.
//!
//! A codebook quantizes a field of per-(subband, slot-group) precoders as
//! `W = W1 · W2 · (Wf ⊗ Wd)^H`:
//!
//! - `W1` (P × 2L) is block diagonal with the same L spatial DFT beams per
//!   polarization, picked from an (O1, O2)-oversampled 2D grid;
//! - `Wf` (Nf × M) and `Wd` (Nt × T) hold oversampled 1D DFT columns over
//!   subbands and slot groups, with the DC column always included;
//! - `W2` (2L × MT) holds the combined coefficients, of which only the K
//!   strongest survive, optionally amplitude/phase-quantized.
//!
//! Index conventions (fixed): spatial beam `(q1, q2)` flattens to
//! `q2·(n1·O1) + q1`; a `(q1 mod O1, q2 mod O2)` rotation family is an
//! orthogonal basis. Precoder fields and Kronecker rows are subband-major
//! (`k·Nt + l`), W2 columns are frequency-major (`m·T + t`).

use crate::channel::ArrayGeometry;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Quantization parameter set identifying one candidate codebook.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodebookConfig {
    pub id: u32,
    /// Spatial beams per polarization.
    pub l: usize,
    /// Frequency basis vectors.
    pub m: usize,
    /// Time basis vectors.
    pub t: usize,
    /// Maximum reported coefficients.
    pub k: usize,
    /// Spatial oversampling factors.
    pub o1: usize,
    pub o2: usize,
    /// Frequency/time oversampling factors.
    pub of: usize,
    pub ot: usize,
    /// Coefficient quantization depths; 0 means pass-through.
    pub amp_bits: u8,
    pub phase_bits: u8,
}

impl CodebookConfig {
    pub fn validate(&self, geometry: &ArrayGeometry, grid: &GridConfig) -> Result<()> {
        let spatial = geometry.ports_per_pol();
        if self.l < 1 || self.l > spatial {
            return Err(Error::Config(format!(
                "codebook {}: L={} outside 1..={spatial}",
                self.id, self.l
            )));
        }
        if self.m < 1 || self.m > grid.num_subbands {
            return Err(Error::Config(format!(
                "codebook {}: M={} outside 1..={}",
                self.id, self.m, grid.num_subbands
            )));
        }
        if self.t < 1 || self.t > grid.num_slot_groups {
            return Err(Error::Config(format!(
                "codebook {}: T={} outside 1..={}",
                self.id, self.t, grid.num_slot_groups
            )));
        }
        let max_k = 2 * self.l * self.m * self.t;
        if self.k < 1 || self.k > max_k {
            return Err(Error::Config(format!(
                "codebook {}: K={} outside 1..={max_k}",
                self.id, self.k
            )));
        }
        if self.o1 < 1 || self.o2 < 1 || self.of < 1 || self.ot < 1 {
            return Err(Error::Config(format!(
                "codebook {}: oversampling factors must be >= 1",
                self.id
            )));
        }
        Ok(())
    }
}

/// Reporting granularity: `Nf` subbands of `N_RB` resource blocks and `Nt`
/// slot groups of `Ns` slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub num_subbands: usize,
    pub rb_per_subband: usize,
    pub num_slot_groups: usize,
    pub slots_per_group: usize,
}

impl GridConfig {
    pub fn num_tiles(&self) -> usize {
        self.num_subbands * self.num_slot_groups
    }

    pub fn covered_rbs(&self) -> usize {
        self.num_subbands * self.rb_per_subband
    }

    pub fn covered_slots(&self) -> usize {
        self.num_slot_groups * self.slots_per_group
    }

    pub fn validate(&self, num_rb: usize, usable_slots: usize) -> Result<()> {
        if self.num_subbands < 1
            || self.rb_per_subband < 1
            || self.num_slot_groups < 1
            || self.slots_per_group < 1
        {
            return Err(Error::Config("grid extents must be >= 1".into()));
        }
        if self.covered_rbs() > num_rb {
            return Err(Error::Config(format!(
                "grid covers {} RBs but the channel has {num_rb}",
                self.covered_rbs()
            )));
        }
        if self.covered_slots() > usable_slots {
            return Err(Error::Config(format!(
                "grid covers {} slots but only {usable_slots} are usable",
                self.covered_slots()
            )));
        }
        Ok(())
    }
}

/// Selected basis indices plus sparse W2 coefficients — the report content.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedPrecoder {
    /// L indices into the oversampled 2D spatial grid, strictly increasing;
    /// shared by both polarizations.
    pub spatial_beams: Vec<usize>,
    /// M indices into the oversampled frequency DFT columns.
    pub freq_indices: Vec<usize>,
    /// T indices into the oversampled time DFT columns.
    pub time_indices: Vec<usize>,
    /// Sparse (row, column, value) entries of the 2L × MT matrix W2,
    /// at most K of them, sorted by (row, column).
    pub coeffs: Vec<(usize, usize, Complex64)>,
}

impl QuantizedPrecoder {
    pub fn validate(&self, config: &CodebookConfig, geometry: &ArrayGeometry, grid: &GridConfig) -> Result<()> {
        let check_indices = |idx: &[usize], len: usize, bound: usize, what: &str| -> Result<()> {
            if idx.len() != len {
                return Err(Error::Shape(format!("{what}: expected {len} indices, got {}", idx.len())));
            }
            for w in idx.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::Shape(format!("{what}: indices not strictly increasing")));
                }
            }
            if idx.iter().any(|&i| i >= bound) {
                return Err(Error::Range(format!("{what}: index out of bounds {bound}")));
            }
            Ok(())
        };
        let spatial_grid = geometry.ports_per_pol() * config.o1 * config.o2;
        check_indices(&self.spatial_beams, config.l, spatial_grid, "spatial beams")?;
        check_indices(&self.freq_indices, config.m, grid.num_subbands * config.of, "freq basis")?;
        check_indices(&self.time_indices, config.t, grid.num_slot_groups * config.ot, "time basis")?;
        if self.coeffs.len() > config.k {
            return Err(Error::Shape(format!(
                "{} coefficients exceed K={}",
                self.coeffs.len(),
                config.k
            )));
        }
        for &(r, c, _) in &self.coeffs {
            if r >= 2 * config.l || c >= config.m * config.t {
                return Err(Error::Range("coefficient position out of bounds".into()));
            }
        }
        Ok(())
    }
}

/// Oversampled 2D spatial DFT beam grid. Beams are columns, unit-modulus
/// entries, flattened `q2·(n1·O1) + q1`.
#[derive(Debug, Clone)]
pub struct BeamGrid {
    pub n1: usize,
    pub n2: usize,
    pub o1: usize,
    pub o2: usize,
    /// `ports_per_pol × num_beams`.
    pub beams: CMat,
}

impl BeamGrid {
    pub fn num_beams(&self) -> usize {
        self.n1 * self.o1 * self.n2 * self.o2
    }

    pub fn beam(&self, index: usize) -> Vec<Complex64> {
        self.beams.col(index)
    }

    #[inline]
    pub fn beam_index(&self, q1: usize, q2: usize) -> usize {
        q2 * (self.n1 * self.o1) + q1
    }
}

/// Build the `n1·n2·O1·O2` candidate beams. Beam `(q1, q2)` has port entry
/// `exp(j·2π·(p1·q1/(O1·n1) + p2·q2/(O2·n2)))`.
pub fn spatial_dft_grid(geometry: &ArrayGeometry, o1: usize, o2: usize) -> BeamGrid {
    let (n1, n2) = (geometry.n1, geometry.n2);
    let num_beams = n1 * o1 * n2 * o2;
    let ports = n1 * n2;
    let mut beams = CMat::zeros(ports, num_beams);
    for q2 in 0..n2 * o2 {
        for q1 in 0..n1 * o1 {
            let b = q2 * (n1 * o1) + q1;
            for p2 in 0..n2 {
                for p1 in 0..n1 {
                    let phase = 2.0 * PI
                        * (p1 as f64 * q1 as f64 / (o1 * n1) as f64
                            + p2 as f64 * q2 as f64 / (o2 * n2) as f64);
                    beams.set(p2 * n1 + p1, b, Complex64::new(phase.cos(), phase.sin()));
                }
            }
        }
    }
    BeamGrid {
        n1,
        n2,
        o1,
        o2,
        beams,
    }
}

/// Projected power of every candidate beam against the per-polarization
/// halves of the precoder field.
fn beam_powers(reps: &[Vec<Complex64>], grid: &BeamGrid) -> Vec<f64> {
    let ports = grid.n1 * grid.n2;
    let inv_norm_sq = 1.0 / ports as f64;
    let mut powers = vec![0.0; grid.num_beams()];
    for (b, pw) in powers.iter_mut().enumerate() {
        for v in reps {
            debug_assert_eq!(v.len(), 2 * ports);
            for half in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..ports {
                    acc += grid.beams.at(p, b).conj() * v[half * ports + p];
                }
                *pw += acc.norm_sqr() * inv_norm_sq;
            }
        }
    }
    powers
}

/// Greedily select L mutually orthogonal beams from one rotation family,
/// maximizing total projected power over all precoders and both polarization
/// halves. Ties break toward the lowest index. Returns strictly increasing
/// grid indices.
pub fn select_spatial_beams(reps: &[Vec<Complex64>], l: usize, grid: &BeamGrid) -> Vec<usize> {
    let powers = beam_powers(reps, grid);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r2 in 0..grid.o2 {
        for r1 in 0..grid.o1 {
            // All beams of the (r1, r2) family, in increasing index order.
            let mut family: Vec<usize> = Vec::with_capacity(grid.n1 * grid.n2);
            for i2 in 0..grid.n2 {
                for i1 in 0..grid.n1 {
                    family.push(grid.beam_index(r1 + i1 * grid.o1, r2 + i2 * grid.o2));
                }
            }
            family.sort_unstable();
            let mut ranked = family.clone();
            ranked.sort_by(|&a, &b| {
                powers[b].partial_cmp(&powers[a]).unwrap().then(a.cmp(&b))
            });
            let chosen: Vec<usize> = ranked.into_iter().take(l).collect();
            let score: f64 = chosen.iter().map(|&b| powers[b]).sum();
            let better = match &best {
                None => true,
                Some((s, _)) => score > *s,
            };
            if better {
                let mut sorted = chosen;
                sorted.sort_unstable();
                best = Some((score, sorted));
            }
        }
    }
    best.expect("at least one family").1
}

/// One oversampled DFT column: entry `k` is `exp(j·2π·k·q/(ovs·n))`.
pub fn dft_column(n: usize, q: usize, ovs: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let phase = 2.0 * PI * k as f64 * q as f64 / (ovs * n) as f64;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect()
}

fn column_powers_1d(seqs: &[Vec<Complex64>], n: usize, ovs: usize) -> Vec<f64> {
    let inv_norm_sq = 1.0 / n as f64;
    (0..n * ovs)
        .map(|q| {
            let col = dft_column(n, q, ovs);
            seqs.iter()
                .map(|s| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, v) in s.iter().enumerate() {
                        acc += col[k].conj() * v;
                    }
                    acc.norm_sqr() * inv_norm_sq
                })
                .sum()
        })
        .collect()
}

/// Rank candidates by projected power, always forcing the DC column into the
/// selection; ties break toward the lowest index. Returns sorted indices.
fn select_with_dc(powers: &[f64], count: usize) -> Vec<usize> {
    let mut rest: Vec<usize> = (1..powers.len()).collect();
    rest.sort_by(|&a, &b| powers[b].partial_cmp(&powers[a]).unwrap().then(a.cmp(&b)));
    let mut chosen: Vec<usize> = std::iter::once(0)
        .chain(rest.into_iter().take(count.saturating_sub(1)))
        .collect();
    chosen.sort_unstable();
    chosen
}

/// Select M frequency DFT columns for a precoder field laid out `k·Nt + l`.
pub fn select_freq_basis(
    reps: &[Vec<Complex64>],
    m: usize,
    nf: usize,
    nt: usize,
    of: usize,
) -> Vec<usize> {
    let ports = if reps.is_empty() { 0 } else { reps[0].len() };
    let mut seqs = Vec::with_capacity(nt * ports);
    for l in 0..nt {
        for p in 0..ports {
            seqs.push((0..nf).map(|k| reps[k * nt + l][p]).collect());
        }
    }
    select_with_dc(&column_powers_1d(&seqs, nf, of), m)
}

/// Select T time DFT columns for a precoder field laid out `k·Nt + l`.
pub fn select_time_basis(
    reps: &[Vec<Complex64>],
    t: usize,
    nf: usize,
    nt: usize,
    ot: usize,
) -> Vec<usize> {
    let ports = if reps.is_empty() { 0 } else { reps[0].len() };
    let mut seqs = Vec::with_capacity(nf * ports);
    for k in 0..nf {
        for p in 0..ports {
            seqs.push((0..nt).map(|l| reps[k * nt + l][p]).collect());
        }
    }
    select_with_dc(&column_powers_1d(&seqs, nt, ot), t)
}

/// Build the block-diagonal spatial basis `W1` (P × 2L) with identical beam
/// blocks on both polarizations.
pub fn build_w1(grid: &BeamGrid, beam_indices: &[usize]) -> CMat {
    let ports = grid.n1 * grid.n2;
    let l = beam_indices.len();
    let mut w1 = CMat::zeros(2 * ports, 2 * l);
    for (j, &b) in beam_indices.iter().enumerate() {
        for p in 0..ports {
            let v = grid.beams.at(p, b);
            w1.set(p, j, v);
            w1.set(ports + p, l + j, v);
        }
    }
    w1
}

/// Build a 1D DFT basis matrix (`n × indices.len()`).
pub fn build_dft_basis(n: usize, ovs: usize, indices: &[usize]) -> CMat {
    let mut m = CMat::zeros(n, indices.len());
    for (j, &q) in indices.iter().enumerate() {
        let col = dft_column(n, q, ovs);
        for (k, v) in col.iter().enumerate() {
            m.set(k, j, *v);
        }
    }
    m
}

/// Kronecker weight vector for tile (k, l): entry `m·T + t` is
/// `conj(Wf[k, m] · Wd[l, t])`, so that `w(k, l) = W1 · W2 · weight`.
fn kron_weight(wf: &CMat, wd: &CMat, k: usize, l: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(wf.cols * wd.cols);
    for m in 0..wf.cols {
        for t in 0..wd.cols {
            out.push((wf.at(k, m) * wd.at(l, t)).conj());
        }
    }
    out
}

/// Least-squares fit of the dense 2L × MT coefficient matrix:
/// minimizes Σ_(k,l) ‖v̄(k,l) − W1·W2·weight(k,l)‖². With orthogonal bases
/// this reduces to projection coefficients. `reps` is laid out `k·Nt + l`.
pub fn compute_w2(reps: &[Vec<Complex64>], w1: &CMat, wf: &CMat, wd: &CMat) -> Result<CMat> {
    let (nf, nt) = (wf.rows, wd.rows);
    if reps.len() != nf * nt {
        return Err(Error::Shape(format!(
            "precoder field has {} tiles, expected {}",
            reps.len(),
            nf * nt
        )));
    }
    let mt = wf.cols * wd.cols;
    let tiles = nf * nt;

    // V: P × tiles, C: MT × tiles.
    let v = CMat::from_fn(w1.rows, tiles, |r, c| reps[c][r]);
    let mut c_mat = CMat::zeros(mt, tiles);
    for k in 0..nf {
        for l in 0..nt {
            let w = kron_weight(wf, wd, k, l);
            for (i, val) in w.iter().enumerate() {
                c_mat.set(i, k * nt + l, *val);
            }
        }
    }

    // Normal equations factor: (W1^H W1) W2 (C C^H) = W1^H V C^H.
    let g1 = w1.hermitian().mul(w1);
    let g2 = c_mat.mul(&c_mat.hermitian());
    let rhs = w1.hermitian().mul(&v).mul(&c_mat.hermitian());
    let x = linalg::solve(&g1, &rhs)?;
    linalg::solve_right(&g2, &x)
}

/// Keep the K largest-magnitude entries of W2 (ties break toward the lowest
/// (row, column)); returns sparse entries sorted by (row, column).
pub fn prune_top_k(w2: &CMat, k: usize) -> Vec<(usize, usize, Complex64)> {
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::with_capacity(w2.rows * w2.cols);
    for r in 0..w2.rows {
        for c in 0..w2.cols {
            entries.push((r, c, w2.at(r, c)));
        }
    }
    entries.sort_by(|a, b| {
        b.2.norm()
            .partial_cmp(&a.2.norm())
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    let mut kept: Vec<(usize, usize, Complex64)> = entries.into_iter().take(k).collect();
    kept.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    kept
}

/// Quantize coefficient amplitudes (geometric grid with ratio 1/√2,
/// normalized to the strongest coefficient) and phases (uniform grid).
/// Zero bit depths pass the corresponding component through unchanged.
pub fn quantize_coeffs(
    coeffs: &[(usize, usize, Complex64)],
    amp_bits: u8,
    phase_bits: u8,
) -> Vec<(usize, usize, Complex64)> {
    if coeffs.is_empty() || (amp_bits == 0 && phase_bits == 0) {
        return coeffs.to_vec();
    }
    let max_amp = coeffs.iter().map(|e| e.2.norm()).fold(0.0, f64::max);
    if max_amp == 0.0 {
        return coeffs.to_vec();
    }
    let ratio_ln = std::f64::consts::FRAC_1_SQRT_2.ln();
    coeffs
        .iter()
        .map(|&(r, c, z)| {
            let amp = z.norm();
            if amp == 0.0 {
                return (r, c, z);
            }
            let q_amp = if amp_bits > 0 {
                let levels = 1u32 << amp_bits;
                let idx = ((amp / max_amp).ln() / ratio_ln)
                    .round()
                    .clamp(0.0, (levels - 1) as f64);
                max_amp * std::f64::consts::FRAC_1_SQRT_2.powf(idx)
            } else {
                amp
            };
            let q_phase = if phase_bits > 0 {
                let levels = (1u32 << phase_bits) as f64;
                let step = 2.0 * PI / levels;
                (z.arg() / step).round() * step
            } else {
                z.arg()
            };
            (r, c, Complex64::from_polar(q_amp, q_phase))
        })
        .collect()
}

/// CSI reporting cost in bits for one codebook:
/// `L·⌈log2 grid⌉ + M·⌈log2 Nf·Of⌉ + T·⌈log2 Nt·Ot⌉ + K·(amp+phase bits)
///  + K·⌈log2 2L·M·T⌉`. This formula is normative for candidate ordering.
pub fn overhead_bits(config: &CodebookConfig, geometry: &ArrayGeometry, grid: &GridConfig) -> u64 {
    fn ceil_log2(x: usize) -> u64 {
        if x <= 1 {
            0
        } else {
            64 - (x as u64 - 1).leading_zeros() as u64
        }
    }
    let spatial_grid = geometry.ports_per_pol() * config.o1 * config.o2;
    let freq_grid = grid.num_subbands * config.of;
    let time_grid = grid.num_slot_groups * config.ot;
    let positions = 2 * config.l * config.m * config.t;
    config.l as u64 * ceil_log2(spatial_grid)
        + config.m as u64 * ceil_log2(freq_grid)
        + config.t as u64 * ceil_log2(time_grid)
        + config.k as u64 * (config.amp_bits as u64 + config.phase_bits as u64)
        + config.k as u64 * ceil_log2(positions)
}

/// A codebook bound to its array geometry and reporting grid.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub config: CodebookConfig,
    pub geometry: ArrayGeometry,
    pub grid: GridConfig,
}

impl Codebook {
    pub fn new(config: CodebookConfig, geometry: ArrayGeometry, grid: GridConfig) -> Result<Self> {
        config.validate(&geometry, &grid)?;
        Ok(Self {
            config,
            geometry,
            grid,
        })
    }

    /// Quantize a representative precoder field (layout `k·Nt + l`, vectors
    /// of length P) into basis indices plus ≤ K coefficients.
    pub fn quantize(&self, reps: &[Vec<Complex64>]) -> Result<QuantizedPrecoder> {
        let (nf, nt) = (self.grid.num_subbands, self.grid.num_slot_groups);
        if reps.len() != nf * nt {
            return Err(Error::Shape(format!(
                "precoder field has {} tiles, expected {}",
                reps.len(),
                nf * nt
            )));
        }
        let beam_grid = spatial_dft_grid(&self.geometry, self.config.o1, self.config.o2);
        let spatial_beams = select_spatial_beams(reps, self.config.l, &beam_grid);
        let freq_indices = select_freq_basis(reps, self.config.m, nf, nt, self.config.of);
        let time_indices = select_time_basis(reps, self.config.t, nf, nt, self.config.ot);

        let w1 = build_w1(&beam_grid, &spatial_beams);
        let wf = build_dft_basis(nf, self.config.of, &freq_indices);
        let wd = build_dft_basis(nt, self.config.ot, &time_indices);
        let w2 = compute_w2(reps, &w1, &wf, &wd)?;
        let pruned = prune_top_k(&w2, self.config.k);
        let coeffs = quantize_coeffs(&pruned, self.config.amp_bits, self.config.phase_bits);
        Ok(QuantizedPrecoder {
            spatial_beams,
            freq_indices,
            time_indices,
            coeffs,
        })
    }

    /// Rebuild the per-(subband, slot-group) precoders `w(k, l)`, columns
    /// unit-normalized. An all-zero column falls back to the first selected
    /// spatial beam on polarization 0.
    pub fn reconstruct(&self, qp: &QuantizedPrecoder) -> Vec<Vec<Complex64>> {
        let (nf, nt) = (self.grid.num_subbands, self.grid.num_slot_groups);
        let beam_grid = spatial_dft_grid(&self.geometry, self.config.o1, self.config.o2);
        let w1 = build_w1(&beam_grid, &qp.spatial_beams);
        let wf = build_dft_basis(nf, self.config.of, &qp.freq_indices);
        let wd = build_dft_basis(nt, self.config.ot, &qp.time_indices);

        let mt = qp.freq_indices.len() * qp.time_indices.len();
        let mut w2 = CMat::zeros(2 * qp.spatial_beams.len(), mt);
        for &(r, c, v) in &qp.coeffs {
            w2.set(r, c, v);
        }

        let ports = self.geometry.num_ports();
        let half = self.geometry.ports_per_pol();
        let mut out = Vec::with_capacity(nf * nt);
        for k in 0..nf {
            for l in 0..nt {
                let weight = kron_weight(&wf, &wd, k, l);
                let col = w1.mul_vec(&w2.mul_vec(&weight));
                let nn = linalg::norm(&col);
                if nn > 1e-15 {
                    out.push(linalg::scale(&col, Complex64::new(1.0 / nn, 0.0)));
                } else {
                    // Documented fallback: first selected beam, polarization 0.
                    let beam = beam_grid.beam(qp.spatial_beams[0]);
                    let bn = linalg::norm(&beam);
                    let mut w = vec![Complex64::new(0.0, 0.0); ports];
                    for (p, b) in beam.iter().enumerate().take(half) {
                        w[p] = b / bn;
                    }
                    out.push(w);
                }
            }
        }
        out
    }

    pub fn overhead_bits(&self) -> u64 {
        overhead_bits(&self.config, &self.geometry, &self.grid)
    }
}

/// Desk-scale codebook set for a 4×2 array: five configurations from a
/// single-beam coarse case up to a full-rank multi-beam case, ordered by
/// strictly increasing overhead.
pub fn desk_codebook_set() -> Vec<CodebookConfig> {
    let base = |id, l, m, k| CodebookConfig {
        id,
        l,
        m,
        t: 1,
        k,
        o1: 4,
        o2: 4,
        of: 1,
        ot: 1,
        amp_bits: 4,
        phase_bits: 4,
    };
    vec![
        base(0, 1, 1, 2),
        base(1, 2, 3, 6),
        base(2, 2, 4, 10),
        base(3, 4, 6, 16),
        base(4, 8, 8, 40),
    ]
}

/// Full-scale codebook set for a 16×8 array (256 ports), matching the five
/// published parameter rows (the single-beam case reports one coefficient
/// per polarization).
pub fn full_scale_codebook_set() -> Vec<CodebookConfig> {
    let base = |id, l, m, k| CodebookConfig {
        id,
        l,
        m,
        t: 1,
        k,
        o1: 4,
        o2: 4,
        of: 1,
        ot: 1,
        amp_bits: 4,
        phase_bits: 4,
    };
    vec![
        base(0, 1, 1, 2),
        base(1, 2, 5, 10),
        base(2, 2, 5, 20),
        base(3, 12, 5, 60),
        base(4, 12, 9, 216),
    ]
}
