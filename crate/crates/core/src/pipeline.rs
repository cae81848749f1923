//! The command pipeline behind the CLI: dataset generation, training,
//! evaluation, importance analysis, policy evaluation and plotting. All
//! file formats and reproducibility metadata live here or in
//! [`crate::dataset_io`] / [`crate::predictor`].
//!
//! Randomness: every stage derives its stream from the config's global seed
//! (`seed ⊕ purpose tag ⊕ index`), so rerunning a command with identical
//! inputs produces byte-identical outputs.

use crate::agcs::realization_agcs;
use crate::assistance::{assemble_features, feature_names, AssistanceReport};
use crate::channel::generate_channel;
use crate::codebook::Codebook;
use crate::config::ExperimentConfig;
use crate::dataset_io::{
    read_dataset, to_dataset, write_dataset, DatasetHeader, FeatureGroups, DATASET_FORMAT_VERSION,
};
use crate::error::{Error, Result};
use crate::predictor::{
    evaluate_mse, label_variance, load_model, permutation_importance, prune_and_retrain,
    save_model, train, Dataset, LossPoint, ModelMeta, PredictorModel, Split,
};
use crate::rng::{derive_seed, SplitMix64};
use crate::selection::{evaluate_policy, PolicyReport, SelectionPolicy};
use crate::svgplot;
use std::path::{Path, PathBuf};

/// Keep fractions of the prune-and-retrain sweep (full set down to 5%).
pub const PRUNE_SWEEP_FRACTIONS: [f64; 5] = [1.0, 0.6, 0.4, 0.2, 0.05];

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Generate the dataset file: for each of `dataset_size` seeded
/// realizations, compute the assistance report once and one row of true
/// per-codebook AGCS labels per delay.
pub fn cmd_dataset(config: &ExperimentConfig, out: &Path) -> Result<usize> {
    config.validate()?;
    let codebooks: Vec<Codebook> = config
        .codebooks
        .iter()
        .map(|c| Codebook::new(*c, config.geometry, config.grid))
        .collect::<Result<_>>()?;

    let mut names = feature_names(
        config.geometry.n1,
        config.geometry.n2,
        config.assistance.freq_offsets,
        config.assistance.time_delays,
    );
    let group_cols = |n: usize| if config.assistance.complex_mode { 2 * n } else { n };
    if config.assistance.complex_mode {
        names = names
            .iter()
            .flat_map(|n| [format!("{n}.re"), format!("{n}.im")])
            .collect();
    }
    let sdcp_cols = group_cols(config.geometry.n1 * config.geometry.n2);
    let fdcp_cols = group_cols(config.assistance.freq_offsets);
    let tdcp_cols = group_cols(config.assistance.time_delays);

    let header = DatasetHeader {
        format_version: DATASET_FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: format!("{:016x}", config.config_hash()),
        feature_names: names,
        sdcp_cols,
        fdcp_cols,
        tdcp_cols,
        full_feature_count: sdcp_cols + fdcp_cols + tdcp_cols,
        codebook_ids: config.codebooks.iter().map(|c| c.id).collect(),
        codebook_overhead_bits: config.overhead_table(),
        deltas: config.deltas.clone(),
        num_layers: config.num_layers,
        complex_mode: config.assistance.complex_mode,
    };

    let mut rows = Vec::with_capacity(config.dataset_size * config.deltas.len());
    for i in 0..config.dataset_size as u64 {
        let mut scen_rng = SplitMix64::new(derive_seed(config.seed, "scenario", i));
        let (scenario_id, scenario) = config.draw_scenario(&mut scen_rng);
        let chan_seed = derive_seed(config.seed, "channel", i);
        let chan = generate_channel(&config.geometry, &scenario, chan_seed)?;
        let report = AssistanceReport::compute(&chan, &config.assistance)?;
        let features = assemble_features(&report);
        for &delta in &config.deltas {
            let labels = realization_agcs(&chan, &codebooks, delta, &config.grid, config.num_layers)?
                .into_iter()
                .map(|v| v.clamp(0.0, 1.0))
                .collect();
            rows.push(crate::predictor::DatasetRow {
                features: features.clone(),
                labels,
                seed: chan_seed,
                scenario_id,
                delta,
            });
        }
    }
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_dataset(out, &header, &rows)?;
    Ok(rows.len())
}

/// Row/feature view options for training.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub features: FeatureGroups,
    /// Train on rows of this delay only. Required when the dataset holds
    /// several delays and `delta_feature` is off (one model per regime).
    pub delta: Option<usize>,
    /// Append the delay as an extra input feature instead of filtering.
    pub delta_feature: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            features: FeatureGroups::all(),
            delta: None,
            delta_feature: false,
        }
    }
}

fn build_view(
    header: &DatasetHeader,
    dataset: &Dataset,
    mask: &[bool],
    delta: Option<usize>,
    delta_feature: bool,
) -> Result<Dataset> {
    let mut view = dataset.project_features(mask)?;
    if let Some(d) = delta {
        if !header.deltas.contains(&d) {
            return Err(Error::Config(format!(
                "delta {d} not present in the dataset (has {:?})",
                header.deltas
            )));
        }
        view = view.filter_delta(d);
        if view.rows.is_empty() {
            return Err(Error::Config(format!("no rows with delta {d}")));
        }
    } else if header.deltas.len() > 1 && !delta_feature {
        return Err(Error::Config(format!(
            "dataset holds several deltas {:?}: pass a delta filter for a per-regime model \
             or enable the delta feature",
            header.deltas
        )));
    }
    if delta_feature {
        view = view.with_delta_feature();
    }
    Ok(view)
}

/// Train on a dataset file and write the checkpoint plus
/// `<model>.loss.csv`. Returns (final train MSE, final validation MSE).
pub fn cmd_train(
    config: &ExperimentConfig,
    dataset_path: &Path,
    model_out: &Path,
    options: &TrainOptions,
) -> Result<(f64, Option<f64>)> {
    config.validate()?;
    let (header, rows) = read_dataset(dataset_path)?;
    let dataset = to_dataset(&header, rows)?;
    let mask = options.features.mask(&header);
    let mut view = build_view(&header, &dataset, &mask, options.delta, options.delta_feature)?;

    let train_config = config.train_config();
    view.assign_splits(
        train_config.split_fractions,
        derive_seed(train_config.seed, "split", 0),
    )?;
    let (model, curve) = train(&view, &train_config)?;

    let meta = ModelMeta {
        config_hash: u64::from_str_radix(&header.config_hash, 16).unwrap_or(0),
        train_seed: train_config.seed,
        delta_filter: options.delta,
        delta_feature: options.delta_feature,
        split_fractions: train_config.split_fractions,
        feature_mask: mask,
    };
    if let Some(dir) = model_out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    save_model(&model, &meta, model_out)?;
    write_text(&loss_curve_path(model_out), &loss_curve_csv(&curve))?;

    let last = curve.last().expect("at least one epoch");
    Ok((last.train_mse, last.val_mse))
}

pub fn loss_curve_path(model_out: &Path) -> PathBuf {
    let mut os = model_out.as_os_str().to_os_string();
    os.push(".loss.csv");
    PathBuf::from(os)
}

fn loss_curve_csv(curve: &[LossPoint]) -> String {
    let mut out = String::from("epoch,train_mse,val_mse\n");
    for p in curve {
        let val = p.val_mse.map_or(String::new(), |v| format!("{v}"));
        out.push_str(&format!("{},{},{}\n", p.epoch, p.train_mse, val));
    }
    out
}

/// Load a checkpoint and rebuild the exact dataset view it was trained on
/// (mask, delta handling, splits).
pub fn load_model_view(
    model_path: &Path,
    dataset_path: &Path,
) -> Result<(PredictorModel, ModelMeta, DatasetHeader, Dataset)> {
    let (model, meta) = load_model(model_path)?;
    let (header, rows) = read_dataset(dataset_path)?;
    let expect_hash = u64::from_str_radix(&header.config_hash, 16).unwrap_or(0);
    if meta.config_hash != expect_hash {
        return Err(Error::Config(format!(
            "model was trained against config hash {:016x}, dataset has {}",
            meta.config_hash, header.config_hash
        )));
    }
    let dataset = to_dataset(&header, rows)?;
    let mut view = build_view(
        &header,
        &dataset,
        &meta.feature_mask,
        meta.delta_filter,
        meta.delta_feature,
    )?;
    view.assign_splits(meta.split_fractions, derive_seed(meta.train_seed, "split", 0))?;
    if view.feature_len() != model.input_dim() {
        return Err(Error::Shape(format!(
            "dataset view has {} features but the model expects {}",
            view.feature_len(),
            model.input_dim()
        )));
    }
    Ok((model, meta, header, view))
}

/// Per-codebook test MSE CSV (×10⁻³ units), with the label-variance
/// baseline alongside. Returns (mse, variance) per codebook.
pub fn cmd_eval(
    model_path: &Path,
    dataset_path: &Path,
    out: &Path,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (model, _, header, view) = load_model_view(model_path, dataset_path)?;
    let mse = evaluate_mse(&model, &view, Split::Test)?;
    let var = label_variance(&view, Split::Test)?;
    let mut csv = String::from("codebook_id,test_mse_x1e3,label_variance_x1e3\n");
    for (i, id) in header.codebook_ids.iter().enumerate() {
        csv.push_str(&format!("{},{:.6},{:.6}\n", id, mse[i] * 1e3, var[i] * 1e3));
    }
    write_text(out, &csv)?;
    Ok((mse, var))
}

/// Permutation importance CSV plus the prune-and-retrain sweep over
/// [`PRUNE_SWEEP_FRACTIONS`]; writes `<prefix>.importance.csv` and
/// `<prefix>.prune.csv`.
pub fn cmd_importance(
    config: &ExperimentConfig,
    model_path: &Path,
    dataset_path: &Path,
    out_prefix: &Path,
) -> Result<Vec<f64>> {
    config.validate()?;
    let (model, meta, header, view) = load_model_view(model_path, dataset_path)?;
    let importance = permutation_importance(
        &model,
        &view,
        Split::Test,
        5,
        derive_seed(meta.train_seed, "importance", 0),
    )?;

    let mut csv = String::from("index,feature,importance_mse_x1e3\n");
    for (i, name) in view.feature_names.iter().enumerate() {
        csv.push_str(&format!("{i},{name},{:.6}\n", importance[i] * 1e3));
    }
    write_text(&prefixed(out_prefix, ".importance.csv"), &csv)?;

    let train_config = config.train_config();
    let mut sweep = String::from("keep_fraction,kept_features,overhead_reduction_pct");
    for id in &header.codebook_ids {
        sweep.push_str(&format!(",mse_c{id}_x1e3"));
    }
    sweep.push_str(",mean_mse_x1e3\n");
    for kf in PRUNE_SWEEP_FRACTIONS {
        let outcome = prune_and_retrain(&view, &importance, kf, &train_config)?;
        let mean = outcome.per_codebook_mse.iter().sum::<f64>()
            / outcome.per_codebook_mse.len() as f64;
        sweep.push_str(&format!(
            "{kf},{},{:.1}",
            outcome.kept_features,
            outcome.overhead_reduction * 100.0
        ));
        for m in &outcome.per_codebook_mse {
            sweep.push_str(&format!(",{:.6}", m * 1e3));
        }
        sweep.push_str(&format!(",{:.6}\n", mean * 1e3));
    }
    write_text(&prefixed(out_prefix, ".prune.csv"), &sweep)?;
    Ok(importance)
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_os_string();
    os.push(suffix);
    PathBuf::from(os)
}

/// Evaluate both selection policies plus all fixed-codebook baselines on
/// the test split; writes `<prefix>.csv` and `<prefix>.json`. With `oracle`
/// the true labels stand in for model predictions.
pub fn cmd_select(
    config: &ExperimentConfig,
    model_path: &Path,
    dataset_path: &Path,
    out_prefix: &Path,
    oracle: bool,
) -> Result<PolicyReport> {
    config.validate()?;
    let (model, _, header, view) = load_model_view(model_path, dataset_path)?;
    let ref_index = config.reference_position()?;
    let policies = vec![
        (
            "threshold_first".to_string(),
            SelectionPolicy::ThresholdFirst {
                rho_min: config.selection.rho_min,
            },
        ),
        (
            "reference_gain".to_string(),
            SelectionPolicy::ReferenceGain {
                ref_index,
                rho0: config.selection.rho0.clone(),
            },
        ),
    ];
    let report = evaluate_policy(
        &view,
        (!oracle).then_some(&model),
        &policies,
        &header.codebook_overhead_bits,
        Some(Split::Test),
    )?;

    let mut csv =
        String::from("name,mean_agcs,p5_agcs,mean_overhead_bits,overhead_reduction_pct\n");
    for e in &report.entries {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{:.2},{:.2}\n",
            e.name, e.mean_agcs, e.p5_agcs, e.mean_overhead_bits, e.overhead_reduction_pct
        ));
    }
    write_text(&prefixed(out_prefix, ".csv"), &csv)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Numerical(format!("report serialization: {e}")))?;
    write_text(&prefixed(out_prefix, ".json"), &(json + "\n"))?;
    Ok(report)
}

/// Render an SVG from a pipeline artifact, dispatching on the extension:
/// `.jsonl` datasets become per-codebook AGCS CDFs (optionally filtered to
/// one delta), `.csv` loss curves become line charts, and `.json` policy
/// reports become overhead-vs-AGCS scatter plots.
pub fn cmd_plot(input: &Path, out: &Path, delta: Option<usize>) -> Result<()> {
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let svg = match ext.as_str() {
        "jsonl" => plot_dataset_cdf(input, delta)?,
        "csv" => plot_loss_curve(input)?,
        "json" => plot_policy_scatter(input)?,
        other => {
            return Err(Error::Config(format!(
                "cannot plot '.{other}' files (expected .jsonl dataset, .csv loss curve \
                 or .json policy report)"
            )))
        }
    };
    write_text(out, &svg)?;
    Ok(())
}

fn plot_dataset_cdf(input: &Path, delta: Option<usize>) -> Result<String> {
    let (header, rows) = read_dataset(input)?;
    let rows: Vec<_> = match delta {
        Some(d) => rows.into_iter().filter(|r| r.delta == d).collect(),
        None => rows,
    };
    if rows.is_empty() {
        return Err(Error::Config("no dataset rows to plot".into()));
    }
    let sets: Vec<(String, Vec<f64>)> = header
        .codebook_ids
        .iter()
        .enumerate()
        .map(|(c, id)| {
            (
                format!("codebook {id} ({} bits)", header.codebook_overhead_bits[c]),
                rows.iter().map(|r| r.labels[c]).collect(),
            )
        })
        .collect();
    let title = match delta {
        Some(d) => format!("True AGCS distribution (delta = {d} slots)"),
        None => "True AGCS distribution (all deltas)".to_string(),
    };
    Ok(svgplot::cdf_chart(&title, "AGCS", &sets))
}

fn plot_loss_curve(input: &Path) -> Result<String> {
    let display = input.display().to_string();
    let text = std::fs::read_to_string(input)?;
    let mut train_pts = Vec::new();
    let mut val_pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if !line.starts_with("epoch,") {
                return Err(Error::Format {
                    path: display,
                    line: 1,
                    msg: "expected a loss-curve CSV header 'epoch,train_mse,val_mse'".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() < 2 {
            return Err(Error::Format {
                path: display,
                line: i + 1,
                msg: "short loss-curve row".into(),
            });
        }
        let epoch: f64 = parts[0].parse().map_err(|_| Error::Format {
            path: display.clone(),
            line: i + 1,
            msg: "bad epoch".into(),
        })?;
        let tr: f64 = parts[1].parse().map_err(|_| Error::Format {
            path: display.clone(),
            line: i + 1,
            msg: "bad train mse".into(),
        })?;
        train_pts.push((epoch, tr));
        if parts.len() > 2 && !parts[2].is_empty() {
            if let Ok(v) = parts[2].parse::<f64>() {
                val_pts.push((epoch, v));
            }
        }
    }
    if train_pts.is_empty() {
        return Err(Error::Config("loss curve has no rows".into()));
    }
    let mut series = vec![svgplot::Series {
        name: "train".into(),
        points: train_pts,
    }];
    if !val_pts.is_empty() {
        series.push(svgplot::Series {
            name: "validation".into(),
            points: val_pts,
        });
    }
    Ok(svgplot::line_chart("Training loss", "epoch", "MSE", &series))
}

fn plot_policy_scatter(input: &Path) -> Result<String> {
    let display = input.display().to_string();
    let text = std::fs::read_to_string(input)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: display.clone(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let entries = value
        .get("entries")
        .and_then(|e| e.as_array())
        .ok_or_else(|| Error::Format {
            path: display.clone(),
            line: 1,
            msg: "policy report has no entries array".into(),
        })?;
    if entries.is_empty() {
        return Err(Error::Config("policy report has no entries".into()));
    }
    let mut points = Vec::with_capacity(entries.len());
    for e in entries {
        let name = e.get("name").and_then(|v| v.as_str()).unwrap_or("?");
        let x = e
            .get("mean_overhead_bits")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::Format {
                path: display.clone(),
                line: 1,
                msg: "entry missing mean_overhead_bits".into(),
            })?;
        let y = e
            .get("mean_agcs")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::Format {
                path: display.clone(),
                line: 1,
                msg: "entry missing mean_agcs".into(),
            })?;
        points.push((x, y, name.to_string()));
    }
    Ok(svgplot::scatter_chart(
        "Overhead / achieved-AGCS tradeoff",
        "mean CSI overhead (bits)",
        "mean achieved AGCS",
        &points,
    ))
}
