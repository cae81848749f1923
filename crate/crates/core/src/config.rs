//! Experiment configuration: geometry, scenario mixture, reporting grid,
//! codebook set, assistance dimensions, delays, training and selection
//! settings, all under one global seed.
//!
//! Configs are plain JSON. Scenario templates give parameter *ranges*; each
//! dataset row draws a template by mixture weight and then uniform values
//! within the ranges, from a per-row derived stream. Two presets ship:
//! [`ExperimentConfig::desk_scale`] (4×2 array, runs in seconds) and
//! [`ExperimentConfig::full_scale`] (16×8 array, 256 ports).

use crate::assistance::AssistanceConfig;
use crate::channel::{ArrayGeometry, ScenarioConfig};
use crate::codebook::{self, CodebookConfig, GridConfig};
use crate::error::{Error, Result};
use crate::predictor::TrainConfig;
use crate::rng::{derive_seed, SplitMix64};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One scenario template of the mixture; scalar draws are uniform in the
/// given [lo, hi] ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub name: String,
    pub weight: f64,
    pub num_rays: usize,
    /// `None` disables the line-of-sight ray entirely.
    pub rician_k_db: Option<[f64; 2]>,
    pub delay_spread_s: [f64; 2],
    pub azimuth_spread_deg: [f64; 2],
    pub zenith_spread_deg: [f64; 2],
    pub doppler_max_hz: [f64; 2],
}

/// Policy thresholds; `rho0` aligns with the codebook list and must be set
/// for every non-reference candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSettings {
    pub rho_min: f64,
    pub reference_id: u32,
    pub rho0: Vec<Option<f64>>,
}

/// Trainer settings as stored in config files; `seed: null` derives the
/// training seed from the global seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub hidden_layers: usize,
    pub hidden_width: Option<usize>,
    pub split_fractions: [f64; 3],
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub geometry: ArrayGeometry,
    pub num_rx: usize,
    pub num_rb: usize,
    pub num_slot: usize,
    pub rb_spacing_hz: f64,
    pub slot_duration_s: f64,
    pub scenarios: Vec<ScenarioTemplate>,
    pub grid: GridConfig,
    pub codebooks: Vec<CodebookConfig>,
    pub assistance: AssistanceConfig,
    /// CSI measurement/reporting delays (slots); one dataset row per
    /// (realization, delta).
    pub deltas: Vec<usize>,
    pub dataset_size: usize,
    pub num_layers: usize,
    pub train: TrainSettings,
    pub selection: SelectionSettings,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.num_rx < 1 || self.num_rb < 1 || self.num_slot < 1 {
            return Err(Error::Config("num_rx/num_rb/num_slot must be >= 1".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::Config("at least one scenario template required".into()));
        }
        let weight_sum: f64 = self.scenarios.iter().map(|s| s.weight).sum();
        if self.scenarios.iter().any(|s| s.weight < 0.0) || (weight_sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "scenario mixture weights must be nonnegative and sum to 1, got {weight_sum}"
            )));
        }
        for t in &self.scenarios {
            if t.num_rays < 1 {
                return Err(Error::Config(format!("scenario {}: num_rays must be >= 1", t.name)));
            }
            let ranges = [
                ("delay_spread_s", t.delay_spread_s),
                ("azimuth_spread_deg", t.azimuth_spread_deg),
                ("zenith_spread_deg", t.zenith_spread_deg),
                ("doppler_max_hz", t.doppler_max_hz),
            ];
            for (name, [lo, hi]) in ranges {
                if !(lo >= 0.0) || lo > hi {
                    return Err(Error::Config(format!(
                        "scenario {}: bad {name} range [{lo}, {hi}]",
                        t.name
                    )));
                }
            }
            if let Some([lo, hi]) = t.rician_k_db {
                if lo > hi {
                    return Err(Error::Config(format!(
                        "scenario {}: bad rician_k_db range [{lo}, {hi}]",
                        t.name
                    )));
                }
            }
        }
        if self.deltas.is_empty() {
            return Err(Error::Config("deltas list must not be empty".into()));
        }
        let max_delta = *self.deltas.iter().max().unwrap();
        if max_delta >= self.num_slot {
            return Err(Error::Config(format!(
                "max delta {max_delta} must be < num_slot {}",
                self.num_slot
            )));
        }
        self.grid.validate(self.num_rb, self.num_slot - max_delta)?;
        if self.codebooks.is_empty() {
            return Err(Error::Config("codebook set must not be empty".into()));
        }
        for cb in &self.codebooks {
            cb.validate(&self.geometry, &self.grid)?;
        }
        let overheads = self.overhead_table();
        if overheads.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "codebook overheads must be strictly increasing, got {overheads:?}"
            )));
        }
        if self.assistance.freq_offsets > self.num_rb || self.assistance.freq_offsets < 1 {
            return Err(Error::Config("assistance freq_offsets outside 1..=num_rb".into()));
        }
        if self.assistance.time_delays > self.num_slot || self.assistance.time_delays < 1 {
            return Err(Error::Config("assistance time_delays outside 1..=num_slot".into()));
        }
        if self.dataset_size < 1 {
            return Err(Error::Config("dataset_size must be >= 1".into()));
        }
        if self.num_layers < 1 || self.num_layers > self.num_rx {
            return Err(Error::Config(format!(
                "num_layers {} outside 1..=num_rx", self.num_layers
            )));
        }
        self.train_config().validate()?;
        let ref_pos = self.reference_position()?;
        if self.selection.rho0.len() != self.codebooks.len() {
            return Err(Error::Config(format!(
                "rho0 has {} entries for {} codebooks",
                self.selection.rho0.len(),
                self.codebooks.len()
            )));
        }
        for (i, r) in self.selection.rho0.iter().enumerate() {
            if i != ref_pos && r.is_none() {
                return Err(Error::Config(format!(
                    "rho0 missing for non-reference candidate at position {i}"
                )));
            }
        }
        Ok(())
    }

    /// Index of the reference codebook within the candidate list.
    pub fn reference_position(&self) -> Result<usize> {
        self.codebooks
            .iter()
            .position(|c| c.id == self.selection.reference_id)
            .ok_or_else(|| {
                Error::Config(format!(
                    "reference codebook id {} not in the candidate set",
                    self.selection.reference_id
                ))
            })
    }

    /// Overhead in bits per candidate, in list order.
    pub fn overhead_table(&self) -> Vec<u64> {
        self.codebooks
            .iter()
            .map(|c| codebook::overhead_bits(c, &self.geometry, &self.grid))
            .collect()
    }

    /// Concrete trainer configuration with the seed resolved against the
    /// global seed.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.train.learning_rate,
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            hidden_layers: self.train.hidden_layers,
            hidden_width: self.train.hidden_width,
            split_fractions: self.train.split_fractions,
            seed: self
                .train
                .seed
                .unwrap_or_else(|| derive_seed(self.seed, "train", 0)),
        }
    }

    /// Draw one concrete scenario from the mixture. Draw order per row:
    /// template pick, then K (if enabled), delay spread, azimuth spread,
    /// zenith spread, Doppler.
    pub fn draw_scenario(&self, rng: &mut SplitMix64) -> (usize, ScenarioConfig) {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut idx = self.scenarios.len() - 1;
        for (i, t) in self.scenarios.iter().enumerate() {
            acc += t.weight;
            if u < acc {
                idx = i;
                break;
            }
        }
        let t = &self.scenarios[idx];
        let rician_k_db = t.rician_k_db.map(|[lo, hi]| rng.uniform(lo, hi));
        let scenario = ScenarioConfig {
            num_rays: t.num_rays,
            rician_k_db,
            delay_spread_s: rng.uniform(t.delay_spread_s[0], t.delay_spread_s[1]),
            azimuth_spread_deg: rng.uniform(t.azimuth_spread_deg[0], t.azimuth_spread_deg[1]),
            zenith_spread_deg: rng.uniform(t.zenith_spread_deg[0], t.zenith_spread_deg[1]),
            doppler_max_hz: rng.uniform(t.doppler_max_hz[0], t.doppler_max_hz[1]),
            num_rx: self.num_rx,
            rb_spacing_hz: self.rb_spacing_hz,
            slot_duration_s: self.slot_duration_s,
            num_rb: self.num_rb,
            num_slot: self.num_slot,
            rank1_gains: false,
        };
        (idx, scenario)
    }

    /// FNV-1a hash of the canonical JSON serialization; embedded in every
    /// output file for provenance.
    pub fn config_hash(&self) -> u64 {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.as_bytes() {
            h = (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01B3);
        }
        h
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Format {
                path: path.display().to_string(),
                line: e.line(),
                msg: e.to_string(),
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    /// Desk-scale preset: 4×2 cross-polarized array (16 ports), 24 RBs ×
    /// 12 slots, a 50/50 LoS/NLoS mixture, five codebooks.
    pub fn desk_scale() -> Self {
        Self {
            geometry: ArrayGeometry::new(4, 2, 0.5, 0.8),
            num_rx: 2,
            num_rb: 24,
            num_slot: 12,
            rb_spacing_hz: 360e3,
            slot_duration_s: 5e-4,
            scenarios: vec![
                ScenarioTemplate {
                    name: "los_pedestrian".into(),
                    weight: 0.5,
                    num_rays: 8,
                    rician_k_db: Some([9.0, 16.0]),
                    delay_spread_s: [2e-8, 1e-7],
                    azimuth_spread_deg: [1.0, 6.0],
                    zenith_spread_deg: [1.0, 3.0],
                    doppler_max_hz: [2.0, 20.0],
                },
                ScenarioTemplate {
                    name: "nlos_urban".into(),
                    weight: 0.5,
                    num_rays: 24,
                    rician_k_db: None,
                    delay_spread_s: [4e-7, 9e-7],
                    azimuth_spread_deg: [35.0, 80.0],
                    zenith_spread_deg: [5.0, 18.0],
                    doppler_max_hz: [10.0, 200.0],
                },
            ],
            grid: GridConfig {
                num_subbands: 12,
                rb_per_subband: 2,
                num_slot_groups: 4,
                slots_per_group: 2,
            },
            codebooks: codebook::desk_codebook_set(),
            assistance: AssistanceConfig::default(),
            deltas: vec![0, 2, 4],
            dataset_size: 2000,
            num_layers: 1,
            train: TrainSettings {
                learning_rate: 1e-3,
                epochs: 300,
                batch_size: 32,
                hidden_layers: 2,
                hidden_width: None,
                split_fractions: [0.7, 0.15, 0.15],
                seed: None,
            },
            selection: SelectionSettings {
                rho_min: 0.55,
                reference_id: 0,
                rho0: vec![None, Some(0.04), Some(0.045), Some(0.1), Some(0.25)],
            },
            seed: 20260809,
        }
    }

    /// Full-scale preset: 16×8 array (256 ports), published codebook
    /// parameter rows, 5 ms reporting delay at 0.5 ms slots. Slow; intended
    /// for overnight sweeps, not for the test suite.
    pub fn full_scale() -> Self {
        Self {
            geometry: ArrayGeometry::new(16, 8, 0.5, 0.8),
            num_rx: 4,
            num_rb: 270,
            num_slot: 18,
            rb_spacing_hz: 360e3,
            slot_duration_s: 5e-4,
            scenarios: vec![
                ScenarioTemplate {
                    name: "los_mixed_mobility".into(),
                    weight: 0.5,
                    num_rays: 20,
                    rician_k_db: Some([4.0, 13.0]),
                    delay_spread_s: [3e-8, 3e-7],
                    azimuth_spread_deg: [2.0, 15.0],
                    zenith_spread_deg: [1.0, 6.0],
                    doppler_max_hz: [2.0, 200.0],
                },
                ScenarioTemplate {
                    name: "nlos_mixed_mobility".into(),
                    weight: 0.5,
                    num_rays: 24,
                    rician_k_db: None,
                    delay_spread_s: [1e-7, 1e-6],
                    azimuth_spread_deg: [10.0, 70.0],
                    zenith_spread_deg: [2.0, 15.0],
                    doppler_max_hz: [2.0, 200.0],
                },
            ],
            grid: GridConfig {
                num_subbands: 18,
                rb_per_subband: 15,
                num_slot_groups: 2,
                slots_per_group: 4,
            },
            codebooks: codebook::full_scale_codebook_set(),
            assistance: AssistanceConfig::default(),
            deltas: vec![0, 10],
            dataset_size: 2000,
            num_layers: 2,
            train: TrainSettings {
                learning_rate: 1e-3,
                epochs: 300,
                batch_size: 32,
                hidden_layers: 2,
                hidden_width: None,
                split_fractions: [0.7, 0.15, 0.15],
                seed: None,
            },
            selection: SelectionSettings {
                rho_min: 0.55,
                reference_id: 0,
                rho0: vec![None, Some(0.04), Some(0.045), Some(0.1), Some(0.25)],
            },
            seed: 20260809,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ExperimentConfig::desk_scale().validate().unwrap();
        ExperimentConfig::full_scale().validate().unwrap();
    }

    #[test]
    fn desk_preset_round_trips_through_json() {
        let config = ExperimentConfig::desk_scale();
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
        assert_eq!(config.config_hash(), back.config_hash());
    }

    #[test]
    fn hash_changes_with_seed() {
        let a = ExperimentConfig::desk_scale();
        let mut b = a.clone();
        b.seed += 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn scenario_draws_cover_the_mixture() {
        let config = ExperimentConfig::desk_scale();
        let mut counts = vec![0usize; config.scenarios.len()];
        for i in 0..2000 {
            let mut rng = SplitMix64::new(derive_seed(1, "scenario", i));
            let (idx, scen) = config.draw_scenario(&mut rng);
            counts[idx] += 1;
            scen.validate().unwrap();
            let t = &config.scenarios[idx];
            assert!(scen.delay_spread_s >= t.delay_spread_s[0]);
            assert!(scen.delay_spread_s <= t.delay_spread_s[1]);
            assert_eq!(scen.rician_k_db.is_some(), t.rician_k_db.is_some());
        }
        // 50/50 mixture within sampling noise.
        let frac = counts[0] as f64 / 2000.0;
        assert!((frac - 0.5).abs() < 0.05, "LoS fraction {frac}");
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = ExperimentConfig::desk_scale();
        c.scenarios[0].weight = 0.8; // weights no longer sum to 1
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = ExperimentConfig::desk_scale();
        c.deltas = vec![0, 12];
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = ExperimentConfig::desk_scale();
        c.selection.rho0[2] = None;
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = ExperimentConfig::desk_scale();
        c.selection.reference_id = 42;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn load_reports_parse_errors_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\n  \"geometry\": oops\n}\n").unwrap();
        match ExperimentConfig::load(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let config = ExperimentConfig::desk_scale();
        config.save(&path).unwrap();
        let back = ExperimentConfig::load(&path).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn shipped_config_files_match_the_presets() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let desk = ExperimentConfig::load(&root.join("desk.json")).unwrap();
        assert_eq!(desk, ExperimentConfig::desk_scale());
        let full = ExperimentConfig::load(&root.join("full_scale.json")).unwrap();
        assert_eq!(full, ExperimentConfig::full_scale());
    }
}
