//! Seeded parametric geometric multipath channel generation for a
//! cross-polarized 2D antenna array.
//!
//! A realization is a complex tensor indexed by (rx antenna, BS port,
//! resource block, slot). Ports flatten polarization-major, then the second
//! (vertical) dimension, then the first (horizontal) dimension:
//! `port = pol·n1·n2 + p2·n1 + p1`, so SDCP offsets and DFT beam indices line
//! up with the same (p1, p2) convention everywhere.
//!
//! Channels are sums of `num_rays` plane waves. Per ray: angles drawn around
//! boresight with the configured spreads, delay drawn exponential with mean
//! `delay_spread_s`, Doppler drawn uniform in ±`doppler_max_hz`, and one
//! independent complex gain per (polarization, rx) pair. With a Rician
//! K-factor the first ray is a zero-delay line-of-sight component carrying
//! power K/(K+1) (angles drawn with a quarter of the spread, constant-modulus
//! gains), and the remaining power splits equally among the diffuse rays.
//! After accumulation the tensor is rescaled so the mean of |h|² is exactly 1.
//!
//! A realization is never stored; it is regenerated bit-identically from
//! (geometry, scenario, seed) via the SplitMix64 stream in [`crate::rng`].

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Polarization count is fixed: two port groups (e.g. ±45° slants).
pub const NUM_POL: usize = 2;

/// Cross-polarized 2D port array: `n1 × n2` ports per polarization,
/// `P = 2·n1·n2` digital ports total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    /// Port count in the first (horizontal) dimension.
    pub n1: usize,
    /// Port count in the second (vertical) dimension.
    pub n2: usize,
    /// Horizontal port spacing in wavelengths.
    pub d_h: f64,
    /// Vertical port spacing in wavelengths.
    pub d_v: f64,
}

impl ArrayGeometry {
    pub fn new(n1: usize, n2: usize, d_h: f64, d_v: f64) -> Self {
        Self { n1, n2, d_h, d_v }
    }

    /// Total digital port count `P = 2·n1·n2`.
    pub fn num_ports(&self) -> usize {
        NUM_POL * self.n1 * self.n2
    }

    /// Ports per polarization group.
    pub fn ports_per_pol(&self) -> usize {
        self.n1 * self.n2
    }

    /// Flat port index (polarization-major, then p2, then p1).
    #[inline]
    pub fn port_index(&self, pol: usize, p1: usize, p2: usize) -> usize {
        pol * self.n1 * self.n2 + p2 * self.n1 + p1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::Config(format!(
                "array dimensions must be >= 1, got {}x{}",
                self.n1, self.n2
            )));
        }
        if !(self.d_h > 0.0) || !(self.d_v > 0.0) {
            return Err(Error::Config(format!(
                "port spacings must be positive, got d_h={}, d_v={}",
                self.d_h, self.d_v
            )));
        }
        Ok(())
    }
}

/// Parametric multipath scenario: ray statistics plus the time/frequency
/// grid extents of one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub num_rays: usize,
    /// Rician K-factor in dB; `None` means pure NLoS (no deterministic ray).
    pub rician_k_db: Option<f64>,
    /// RMS delay spread in seconds (mean of the exponential delay draw).
    pub delay_spread_s: f64,
    pub azimuth_spread_deg: f64,
    pub zenith_spread_deg: f64,
    /// Maximum Doppler shift in Hz; per-ray Doppler is uniform in ± this.
    pub doppler_max_hz: f64,
    pub num_rx: usize,
    /// Frequency width of one resource block in Hz.
    pub rb_spacing_hz: f64,
    /// Duration of one slot in seconds.
    pub slot_duration_s: f64,
    pub num_rb: usize,
    pub num_slot: usize,
    /// Draw per-ray gains as an outer product over (rx, polarization) instead
    /// of independently; keeps a single-ray channel exactly rank one.
    #[serde(default)]
    pub rank1_gains: bool,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_rays < 1 {
            return Err(Error::Config("num_rays must be >= 1".into()));
        }
        if self.num_rx < 1 || self.num_rb < 1 || self.num_slot < 1 {
            return Err(Error::Config(format!(
                "grid extents must be >= 1, got num_rx={}, num_rb={}, num_slot={}",
                self.num_rx, self.num_rb, self.num_slot
            )));
        }
        for (name, v) in [
            ("delay_spread_s", self.delay_spread_s),
            ("azimuth_spread_deg", self.azimuth_spread_deg),
            ("zenith_spread_deg", self.zenith_spread_deg),
            ("doppler_max_hz", self.doppler_max_hz),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.rb_spacing_hz >= 0.0) || !(self.slot_duration_s >= 0.0) {
            return Err(Error::Config(
                "rb_spacing_hz and slot_duration_s must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Array steering vector of length `n1·n2` for a plane wave from the given
/// direction. Entry for port (p1, p2) is
/// `exp(j·2π·(d_h·p1·sin(zenith)·sin(azimuth) + d_v·p2·cos(zenith)))`,
/// flattened with p1 fastest (the within-polarization port order).
pub fn steering_vector(geometry: &ArrayGeometry, azimuth_rad: f64, zenith_rad: f64) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(geometry.n1 * geometry.n2);
    let kh = 2.0 * PI * geometry.d_h * zenith_rad.sin() * azimuth_rad.sin();
    let kv = 2.0 * PI * geometry.d_v * zenith_rad.cos();
    for p2 in 0..geometry.n2 {
        for p1 in 0..geometry.n1 {
            let phase = kh * p1 as f64 + kv * p2 as f64;
            v.push(Complex64::new(phase.cos(), phase.sin()));
        }
    }
    v
}

/// One seeded channel realization.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub geometry: ArrayGeometry,
    pub scenario: ScenarioConfig,
    pub seed: u64,
    /// Layout: `[rx][port][rb][slot]`, slot fastest.
    samples: Vec<Complex64>,
}

impl ChannelRealization {
    /// Wrap an externally built sample tensor (layout `[rx][port][rb][slot]`).
    /// Useful for synthetic fixtures; such a realization does not satisfy the
    /// regenerate-from-seed contract.
    pub fn from_samples(
        geometry: ArrayGeometry,
        scenario: ScenarioConfig,
        seed: u64,
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        geometry.validate()?;
        scenario.validate()?;
        let expect = scenario.num_rx * geometry.num_ports() * scenario.num_rb * scenario.num_slot;
        if samples.len() != expect {
            return Err(Error::Shape(format!(
                "sample tensor has {} entries, expected {}",
                samples.len(),
                expect
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite channel sample".into()));
        }
        Ok(Self {
            geometry,
            scenario,
            seed,
            samples,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    #[inline]
    fn flat(&self, rx: usize, port: usize, rb: usize, slot: usize) -> usize {
        ((rx * self.geometry.num_ports() + port) * self.scenario.num_rb + rb)
            * self.scenario.num_slot
            + slot
    }

    #[inline]
    pub fn at(&self, rx: usize, port: usize, rb: usize, slot: usize) -> Complex64 {
        self.samples[self.flat(rx, port, rb, slot)]
    }

    /// View of the whole slot range.
    pub fn view(&self) -> ChannelView<'_> {
        ChannelView {
            chan: self,
            slot_offset: 0,
            num_slot: self.scenario.num_slot,
        }
    }

    /// Aligned (stale, fresh) views separated by `delta_slots`: the quantizer
    /// consumes the stale view, the AGCS evaluator compares against fresh.
    pub fn lag_view(&self, delta_slots: usize) -> Result<(ChannelView<'_>, ChannelView<'_>)> {
        let n = self.scenario.num_slot;
        if delta_slots >= n {
            return Err(Error::Range(format!(
                "delta_slots {delta_slots} must be < num_slot {n}"
            )));
        }
        let len = n - delta_slots;
        Ok((
            ChannelView {
                chan: self,
                slot_offset: 0,
                num_slot: len,
            },
            ChannelView {
                chan: self,
                slot_offset: delta_slots,
                num_slot: len,
            },
        ))
    }
}

/// Borrowed window of a realization over a contiguous slot range.
#[derive(Debug, Clone, Copy)]
pub struct ChannelView<'a> {
    chan: &'a ChannelRealization,
    slot_offset: usize,
    num_slot: usize,
}

impl<'a> ChannelView<'a> {
    #[inline]
    pub fn at(&self, rx: usize, port: usize, rb: usize, slot: usize) -> Complex64 {
        debug_assert!(slot < self.num_slot);
        self.chan.at(rx, port, rb, slot + self.slot_offset)
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.chan.geometry
    }

    pub fn num_rx(&self) -> usize {
        self.chan.scenario.num_rx
    }

    pub fn num_rb(&self) -> usize {
        self.chan.scenario.num_rb
    }

    pub fn num_slot(&self) -> usize {
        self.num_slot
    }
}

struct Ray {
    steer: Vec<Complex64>,
    delay_s: f64,
    doppler_hz: f64,
    /// Gain per (pol, rx): `gains[pol][rx]`.
    gains: Vec<Vec<Complex64>>,
}

/// Generate a seeded channel realization. Deterministic: equal arguments
/// produce bit-identical tensors.
pub fn generate_channel(
    geometry: &ArrayGeometry,
    scenario: &ScenarioConfig,
    seed: u64,
) -> Result<ChannelRealization> {
    geometry.validate()?;
    scenario.validate()?;

    let mut rng = SplitMix64::new(seed);
    let az_spread = scenario.azimuth_spread_deg.to_radians();
    let zen_spread = scenario.zenith_spread_deg.to_radians();

    let k_lin = scenario.rician_k_db.map(|db| 10f64.powf(db / 10.0));
    let num_rays = scenario.num_rays;

    let mut rays = Vec::with_capacity(num_rays);
    for ray_idx in 0..num_rays {
        let is_los = ray_idx == 0 && k_lin.is_some();
        // LoS ray: boresight-biased angles, zero delay.
        let (az, zen, delay) = if is_los {
            let az = rng.normal() * az_spread * 0.25;
            let zen = PI / 2.0 + rng.normal() * zen_spread * 0.25;
            (az, zen, 0.0)
        } else {
            let az = rng.normal() * az_spread;
            let zen = PI / 2.0 + rng.normal() * zen_spread;
            let u = rng.next_f64();
            let delay = -scenario.delay_spread_s * (1.0 - u).ln();
            (az, zen, delay)
        };
        let doppler = rng.uniform(-scenario.doppler_max_hz, scenario.doppler_max_hz);

        let power = match k_lin {
            Some(k) => {
                if num_rays == 1 {
                    1.0
                } else if ray_idx == 0 {
                    k / (k + 1.0)
                } else {
                    1.0 / ((k + 1.0) * (num_rays - 1) as f64)
                }
            }
            None => 1.0 / num_rays as f64,
        };
        let amp = power.sqrt();

        let gains = if scenario.rank1_gains {
            let rx_fac: Vec<Complex64> = (0..scenario.num_rx)
                .map(|_| if is_los { rng.unit_phase() } else { rng.complex_normal() })
                .collect();
            let pol_fac: Vec<Complex64> = (0..NUM_POL)
                .map(|_| if is_los { rng.unit_phase() } else { rng.complex_normal() })
                .collect();
            (0..NUM_POL)
                .map(|pol| rx_fac.iter().map(|&a| a * pol_fac[pol] * amp).collect())
                .collect()
        } else {
            (0..NUM_POL)
                .map(|_| {
                    (0..scenario.num_rx)
                        .map(|_| {
                            if is_los {
                                rng.unit_phase() * amp
                            } else {
                                rng.complex_normal() * amp
                            }
                        })
                        .collect()
                })
                .collect()
        };

        rays.push(Ray {
            steer: steering_vector(geometry, az, zen),
            delay_s: delay,
            doppler_hz: doppler,
            gains,
        });
    }

    let ports_per_pol = geometry.ports_per_pol();
    let num_ports = geometry.num_ports();
    let (num_rb, num_slot) = (scenario.num_rb, scenario.num_slot);
    let mut samples = vec![Complex64::new(0.0, 0.0); scenario.num_rx * num_ports * num_rb * num_slot];

    let mut fphase = vec![Complex64::new(0.0, 0.0); num_rb];
    let mut tphase = vec![Complex64::new(0.0, 0.0); num_slot];
    for ray in &rays {
        for (f, p) in fphase.iter_mut().enumerate() {
            let ang = -2.0 * PI * f as f64 * scenario.rb_spacing_hz * ray.delay_s;
            *p = Complex64::new(ang.cos(), ang.sin());
        }
        for (t, p) in tphase.iter_mut().enumerate() {
            let ang = 2.0 * PI * t as f64 * scenario.slot_duration_s * ray.doppler_hz;
            *p = Complex64::new(ang.cos(), ang.sin());
        }
        for rx in 0..scenario.num_rx {
            for pol in 0..NUM_POL {
                let g = ray.gains[pol][rx];
                for i in 0..ports_per_pol {
                    let gs = g * ray.steer[i];
                    let port = pol * ports_per_pol + i;
                    let base = ((rx * num_ports + port) * num_rb) * num_slot;
                    for f in 0..num_rb {
                        let gf = gs * fphase[f];
                        let row = base + f * num_slot;
                        for t in 0..num_slot {
                            samples[row + t] += gf * tphase[t];
                        }
                    }
                }
            }
        }
    }

    let mean_power: f64 =
        samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64;
    if !(mean_power > 0.0) || !mean_power.is_finite() {
        return Err(Error::Numerical(format!(
            "channel mean power {mean_power} is not positive and finite"
        )));
    }
    let scale = 1.0 / mean_power.sqrt();
    for z in &mut samples {
        *z *= scale;
    }

    Ok(ChannelRealization {
        geometry: *geometry,
        scenario: scenario.clone(),
        seed,
        samples,
    })
}
