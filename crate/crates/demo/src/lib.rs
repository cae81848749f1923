//! Browser playground for the desk-scale codebook-selection setup.
//!
//! Three operations are exported to JavaScript, all JSON-string in /
//! JSON-string out so the page needs no glue types:
//!
//! - [`assistance_profile`] — generate one seeded channel and return its
//!   SDCP / FDCP / TDCP correlation report.
//! - [`agcs_vs_delay`] — sweep the desk codebook set over reporting delays
//!   and return mean AGCS curves with per-codebook overhead.
//! - [`policy_decision`] — apply both selection policies to a prediction
//!   vector and explain the decision.
//!
//! Build for the web with `wasm-pack build crates/demo --target web` and
//! serve `crates/demo/www/`. The same functions compile natively, which is
//! how the unit tests drive them.

use cbsel_core::agcs::realization_agcs;
use cbsel_core::assistance::{AssistanceConfig, AssistanceReport};
use cbsel_core::channel::{generate_channel, ArrayGeometry, ScenarioConfig};
use cbsel_core::codebook::{desk_codebook_set, overhead_bits, Codebook, GridConfig};
use cbsel_core::error::Result;
use cbsel_core::rng::derive_seed;
use cbsel_core::selection::{select_reference_gain, select_threshold_first};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

fn demo_geometry() -> ArrayGeometry {
    ArrayGeometry::new(4, 2, 0.5, 0.8)
}

fn demo_grid() -> GridConfig {
    GridConfig {
        num_subbands: 12,
        rb_per_subband: 2,
        num_slot_groups: 4,
        slots_per_group: 2,
    }
}

/// Scenario knobs exposed to the page.
#[derive(Debug, Clone, Deserialize)]
struct ScenarioParams {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_rays")]
    num_rays: usize,
    /// Rician K in dB; null/absent disables the LoS ray.
    #[serde(default)]
    rician_k_db: Option<f64>,
    #[serde(default = "default_delay_ns")]
    delay_spread_ns: f64,
    #[serde(default = "default_az")]
    azimuth_spread_deg: f64,
    #[serde(default = "default_zen")]
    zenith_spread_deg: f64,
    #[serde(default = "default_doppler")]
    doppler_hz: f64,
}

fn default_seed() -> u64 {
    1
}
fn default_rays() -> usize {
    12
}
fn default_delay_ns() -> f64 {
    300.0
}
fn default_az() -> f64 {
    25.0
}
fn default_zen() -> f64 {
    6.0
}
fn default_doppler() -> f64 {
    80.0
}

impl ScenarioParams {
    fn to_scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            num_rays: self.num_rays.clamp(1, 64),
            rician_k_db: self.rician_k_db,
            delay_spread_s: (self.delay_spread_ns.max(0.0)) * 1e-9,
            azimuth_spread_deg: self.azimuth_spread_deg.max(0.0),
            zenith_spread_deg: self.zenith_spread_deg.max(0.0),
            doppler_max_hz: self.doppler_hz.max(0.0),
            num_rx: 2,
            rb_spacing_hz: 360e3,
            slot_duration_s: 5e-4,
            num_rb: 24,
            num_slot: 12,
            rank1_gains: false,
        }
    }
}

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

#[derive(Serialize)]
struct ProfileResponse {
    /// SDCP magnitudes as rows over the first port offset.
    sdcp: Vec<Vec<f64>>,
    fdcp: Vec<f64>,
    tdcp: Vec<f64>,
}

fn assistance_profile_inner(params_json: &str) -> Result<String> {
    let params: ScenarioParams = serde_json::from_str(params_json)
        .map_err(|e| cbsel_core::Error::Config(format!("bad params: {e}")))?;
    let scenario = params.to_scenario();
    let chan = generate_channel(&demo_geometry(), &scenario, params.seed)?;
    let report = AssistanceReport::compute(
        &chan,
        &AssistanceConfig {
            freq_offsets: 8,
            time_delays: 4,
            complex_mode: false,
        },
    )?;
    let g = demo_geometry();
    let sdcp = (0..g.n1)
        .map(|d1| (0..g.n2).map(|d2| report.sdcp[d1 * g.n2 + d2]).collect())
        .collect();
    let resp = ProfileResponse {
        sdcp,
        fdcp: report.fdcp,
        tdcp: report.tdcp,
    };
    Ok(serde_json::to_string(&resp).expect("serializes"))
}

/// Channel-correlation report for one seeded desk-scale channel.
/// Input: `{seed, num_rays, rician_k_db, delay_spread_ns,
/// azimuth_spread_deg, zenith_spread_deg, doppler_hz}` (all optional).
#[wasm_bindgen]
pub fn assistance_profile(params_json: &str) -> String {
    assistance_profile_inner(params_json).unwrap_or_else(err_json)
}

#[derive(Debug, Clone, Deserialize)]
struct AgcsParams {
    #[serde(flatten)]
    scenario: ScenarioParams,
    /// Realizations to average (clamped to 1..=16).
    #[serde(default = "default_num_seeds")]
    num_seeds: usize,
}

fn default_num_seeds() -> usize {
    4
}

#[derive(Serialize)]
struct AgcsCurve {
    codebook_id: u32,
    label: String,
    overhead_bits: u64,
    mean_agcs: Vec<f64>,
}

#[derive(Serialize)]
struct AgcsResponse {
    deltas: Vec<usize>,
    curves: Vec<AgcsCurve>,
}

fn agcs_vs_delay_inner(params_json: &str) -> Result<String> {
    let params: AgcsParams = serde_json::from_str(params_json)
        .map_err(|e| cbsel_core::Error::Config(format!("bad params: {e}")))?;
    let geometry = demo_geometry();
    let grid = demo_grid();
    let scenario = params.scenario.to_scenario();
    let configs = desk_codebook_set();
    let codebooks: Vec<Codebook> = configs
        .iter()
        .map(|c| Codebook::new(*c, geometry, grid))
        .collect::<Result<_>>()?;
    let deltas: Vec<usize> = vec![0, 1, 2, 3, 4];
    let num_seeds = params.num_seeds.clamp(1, 16);

    let mut sums = vec![vec![0.0; deltas.len()]; codebooks.len()];
    for s in 0..num_seeds as u64 {
        let chan = generate_channel(
            &geometry,
            &scenario,
            derive_seed(params.scenario.seed, "demo-agcs", s),
        )?;
        for (di, &delta) in deltas.iter().enumerate() {
            let vals = realization_agcs(&chan, &codebooks, delta, &grid, 1)?;
            for (ci, v) in vals.into_iter().enumerate() {
                sums[ci][di] += v;
            }
        }
    }
    let curves = configs
        .iter()
        .zip(sums)
        .map(|(c, row)| AgcsCurve {
            codebook_id: c.id,
            label: format!("c{} (L={}, M={}, K={})", c.id, c.l, c.m, c.k),
            overhead_bits: overhead_bits(c, &geometry, &grid),
            mean_agcs: row.into_iter().map(|v| v / num_seeds as f64).collect(),
        })
        .collect();
    let resp = AgcsResponse { deltas, curves };
    Ok(serde_json::to_string(&resp).expect("serializes"))
}

/// Mean AGCS versus reporting delay for the desk codebook set.
/// Input: the scenario knobs plus `num_seeds`.
#[wasm_bindgen]
pub fn agcs_vs_delay(params_json: &str) -> String {
    agcs_vs_delay_inner(params_json).unwrap_or_else(err_json)
}

#[derive(Deserialize)]
struct PolicyParams {
    /// Predicted AGCS per candidate, in overhead order (5 entries for the
    /// desk set).
    preds: Vec<f64>,
    #[serde(default = "default_rho_min")]
    rho_min: f64,
    /// Gain thresholds for the non-reference candidates (reference is the
    /// first candidate).
    #[serde(default = "default_rho0")]
    rho0: Vec<f64>,
}

fn default_rho_min() -> f64 {
    0.55
}

fn default_rho0() -> Vec<f64> {
    vec![0.04, 0.045, 0.1, 0.25]
}

#[derive(Serialize)]
struct PolicyResponse {
    threshold_first: usize,
    threshold_fallback_used: bool,
    reference_gain: usize,
    overhead_bits: Vec<u64>,
    overhead_saved_pct_threshold: f64,
    overhead_saved_pct_reference: f64,
}

fn policy_decision_inner(params_json: &str) -> Result<String> {
    let params: PolicyParams = serde_json::from_str(params_json)
        .map_err(|e| cbsel_core::Error::Config(format!("bad params: {e}")))?;
    let n = params.preds.len();
    if n < 2 {
        return Err(cbsel_core::Error::Config(
            "need at least two candidates".into(),
        ));
    }
    if params.rho0.len() != n - 1 {
        return Err(cbsel_core::Error::Config(format!(
            "need {} rho0 thresholds for {n} candidates",
            n - 1
        )));
    }
    let geometry = demo_geometry();
    let grid = demo_grid();
    let overheads: Vec<u64> = desk_codebook_set()
        .iter()
        .take(n)
        .map(|c| overhead_bits(c, &geometry, &grid))
        .collect();

    let tf = select_threshold_first(&params.preds, params.rho_min);
    let fallback = params.preds.iter().all(|p| *p < params.rho_min);
    let rho0: Vec<Option<f64>> = std::iter::once(None)
        .chain(params.rho0.iter().map(|v| Some(*v)))
        .collect();
    let rg = select_reference_gain(&params.preds, 0, &rho0)?;

    let largest = *overheads.last().unwrap() as f64;
    let resp = PolicyResponse {
        threshold_first: tf,
        threshold_fallback_used: fallback,
        reference_gain: rg,
        overhead_saved_pct_threshold: 100.0 * (1.0 - overheads[tf] as f64 / largest),
        overhead_saved_pct_reference: 100.0 * (1.0 - overheads[rg] as f64 / largest),
        overhead_bits: overheads,
    };
    Ok(serde_json::to_string(&resp).expect("serializes"))
}

/// Apply both selection policies to a prediction vector.
/// Input: `{preds: [..], rho_min, rho0: [..]}`.
#[wasm_bindgen]
pub fn policy_decision(params_json: &str) -> String {
    policy_decision_inner(params_json).unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_returns_correlations() {
        let out = assistance_profile("{\"seed\": 3, \"doppler_hz\": 50}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["sdcp"].as_array().unwrap().len(), 4);
        assert_eq!(v["sdcp"][0].as_array().unwrap().len(), 2);
        assert_eq!(v["fdcp"].as_array().unwrap().len(), 8);
        assert_eq!(v["tdcp"].as_array().unwrap().len(), 4);
        assert_eq!(v["sdcp"][0][0].as_f64().unwrap(), 1.0);
        assert_eq!(v["fdcp"][0].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn profile_defaults_apply() {
        let out = assistance_profile("{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
    }

    #[test]
    fn agcs_curves_cover_the_desk_set() {
        let out = agcs_vs_delay("{\"seed\": 5, \"num_seeds\": 2, \"doppler_hz\": 120}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let curves = v["curves"].as_array().unwrap();
        assert_eq!(curves.len(), 5);
        for c in curves {
            let vals = c["mean_agcs"].as_array().unwrap();
            assert_eq!(vals.len(), 5);
            for x in vals {
                let x = x.as_f64().unwrap();
                assert!((0.0..=1.0 + 1e-9).contains(&x));
            }
        }
        // Overheads strictly increase across the set.
        let bits: Vec<u64> = curves
            .iter()
            .map(|c| c["overhead_bits"].as_u64().unwrap())
            .collect();
        assert!(bits.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn policy_decision_matches_worked_example() {
        let out = policy_decision(
            "{\"preds\": [0.50, 0.56, 0.58, 0.61, 0.72], \"rho_min\": 0.55}",
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["threshold_first"].as_u64().unwrap(), 1);
        assert_eq!(v["reference_gain"].as_u64().unwrap(), 3);
        assert_eq!(v["threshold_fallback_used"].as_bool().unwrap(), false);
    }

    #[test]
    fn bad_input_yields_error_json() {
        let out = policy_decision("{\"preds\": [0.5]}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());

        let out = assistance_profile("not json");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }
}
