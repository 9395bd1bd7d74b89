//! Batch front-end for the MORF pipeline.
//!
//! Subcommands: extract, eval, synth, pyramid-dump, phase-dump.
//! Flag precedence: command line > --config file > built-in defaults.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use morf_core::dataset::{load_manifest, load_sequence, save_manifest_relative};
use morf_core::io::{
    load_gray_frame, read_descriptors_bin, read_descriptors_csv, write_descriptors_bin,
    write_descriptors_csv, write_float_plane, DescriptorRow,
};
use morf_core::morf::{extract_morf, AmplifyMode, MorfParams};
use morf_core::riesz::{filter_phase_sequence, riesz_transform, TemporalFilterConfig};
use morf_core::svm::{evaluate_loso_features, FeatureSet, GridSpec, Metrics};
use morf_core::synth::{make_motion_dataset, MotionClass, MotionDatasetSpec};
use morf_core::{build_pyramid, GrayFrame, MorfError};

type Result<T> = std::result::Result<T, MorfError>;

#[derive(Parser)]
#[command(
    name = "morf",
    about = "Mean oriented Riesz features: extraction, synthetic data, and LOSO evaluation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract MORF descriptors for every sequence in a manifest.
    Extract(ExtractArgs),
    /// Leave-one-subject-out evaluation with an SVM over MORF descriptors.
    Eval(EvalArgs),
    /// Render a synthetic motion dataset (frames plus manifest).
    Synth(SynthArgs),
    /// Dump Laplacian pyramid bands of one image as float planes.
    PyramidDump(PyramidDumpArgs),
    /// Dump filtered quaternionic phase planes for a frame directory.
    PhaseDump(PhaseDumpArgs),
}

/// Feature / filter flags shared by extract and eval.
#[derive(Args, Debug, Default, Clone)]
struct FeatureFlags {
    /// Optional JSON config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Pyramid levels, comma separated (e.g. 2 or 2,3).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,

    /// Grid columns.
    #[arg(long)]
    gx: Option<usize>,

    /// Grid rows.
    #[arg(long)]
    gy: Option<usize>,

    /// Orientation bins.
    #[arg(long)]
    o: Option<usize>,

    /// Phase amplification factor (1 disables).
    #[arg(long)]
    alpha: Option<f64>,

    /// Amplification mapping: sine (quaternion exponentiation) or linear.
    #[arg(long, value_parser = parse_amplify_mode)]
    amplify_mode: Option<AmplifyMode>,

    /// L2-normalize each level segment of the descriptor.
    #[arg(long)]
    normalize: bool,

    /// Temporal band-pass lower corner in Hz.
    #[arg(long)]
    low_hz: Option<f64>,

    /// Temporal band-pass upper corner in Hz.
    #[arg(long)]
    high_hz: Option<f64>,

    /// Amplitude-weighted spatial smoothing sigma in pixels (0 disables).
    #[arg(long)]
    spatial_sigma: Option<f64>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_amplify_mode(s: &str) -> std::result::Result<AmplifyMode, String> {
    match s {
        "sine" => Ok(AmplifyMode::Sine),
        "linear" => Ok(AmplifyMode::Linear),
        other => Err(format!("unknown amplify mode '{other}' (sine|linear)")),
    }
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,

    /// Output descriptor CSV path.
    #[arg(long)]
    out: PathBuf,

    /// Also write the binary descriptor file here.
    #[arg(long)]
    bin: Option<PathBuf>,

    /// Optional binary vote mask image (non-zero pixels participate).
    #[arg(long)]
    mask: Option<PathBuf>,

    #[command(flatten)]
    features: FeatureFlags,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,

    /// Output metrics JSON path.
    #[arg(long)]
    out: PathBuf,

    /// Per-sequence prediction CSV path (default: next to metrics).
    #[arg(long)]
    pred_csv: Option<PathBuf>,

    /// Reuse previously extracted descriptors (.csv or .morf) instead of
    /// re-extracting.
    #[arg(long)]
    descriptors: Option<PathBuf>,

    /// SVM grid, e.g. "C=0.1,1,10,100;gamma=1/d,10/d,1/dm2,10/dm2;c0=0,1".
    #[arg(long)]
    grid: Option<String>,

    /// Parameter preset: smic-hs (MORF level 2) or casme2 (amplified 2&3 fusion).
    #[arg(long)]
    preset: Option<String>,

    /// Sweep one parameter, e.g. "o=4..10" or "alpha=1,5,10"; writes one
    /// metrics record per value.
    #[arg(long)]
    param_sweep: Option<String>,

    /// Optional binary vote mask image.
    #[arg(long)]
    mask: Option<PathBuf>,

    #[command(flatten)]
    features: FeatureFlags,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output directory for frames and manifest.
    #[arg(long)]
    out: PathBuf,

    /// Motion classes, comma separated (right,left,up,down,diag).
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,

    #[arg(long)]
    subjects: Option<usize>,

    #[arg(long)]
    reps: Option<usize>,

    /// Gaussian intensity noise sigma.
    #[arg(long)]
    noise: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    width: Option<usize>,

    #[arg(long)]
    height: Option<usize>,

    #[arg(long)]
    frames: Option<usize>,

    #[arg(long)]
    fps: Option<f64>,

    /// Optional JSON config file; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PyramidDumpArgs {
    /// Input image (PNG/PGM).
    #[arg(long)]
    input: PathBuf,

    #[arg(long, default_value_t = 3)]
    levels: usize,

    /// Output directory for .plane files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PhaseDumpArgs {
    /// Directory of sequence frames.
    #[arg(long)]
    frames: PathBuf,

    /// Pyramid level to dump.
    #[arg(long, default_value_t = 2)]
    level: usize,

    /// Frames per second of the sequence.
    #[arg(long, default_value_t = 30.0)]
    fps: f64,

    /// Output directory for .plane files.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    features: FeatureFlags,
}

/// Optional config-file fields mirroring the shared flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    levels: Option<Vec<usize>>,
    gx: Option<usize>,
    gy: Option<usize>,
    o: Option<usize>,
    alpha: Option<f64>,
    amplify_mode: Option<AmplifyMode>,
    normalize: Option<bool>,
    low_hz: Option<f64>,
    high_hz: Option<f64>,
    fps: Option<f64>,
    spatial_sigma: Option<f64>,
    jobs: Option<usize>,
    grid: Option<String>,
    classes: Option<Vec<String>>,
    subjects: Option<usize>,
    reps: Option<usize>,
    noise: Option<f64>,
    seed: Option<u64>,
    width: Option<usize>,
    height: Option<usize>,
    frames: Option<usize>,
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| MorfError::Config(format!("config file {}: {e}", p.display())))
        }
    }
}

/// Resolved parameters after merging flags, config file, preset, defaults.
struct Resolved {
    params: MorfParams,
    filter: TemporalFilterConfig,
    grid: GridSpec,
}

fn resolve(
    flags: &FeatureFlags,
    cfg: &FileConfig,
    preset: Option<&str>,
    grid_flag: Option<&str>,
    fps: f64,
) -> Result<Resolved> {
    let preset_params = match preset {
        None => None,
        Some("smic-hs") => Some(MorfParams { levels: vec![2], alpha: 1.0, ..Default::default() }),
        Some("casme2") => {
            Some(MorfParams { levels: vec![2, 3], alpha: 5.0, ..Default::default() })
        }
        Some(other) => {
            return Err(MorfError::Config(format!(
                "unknown preset '{other}' (smic-hs|casme2)"
            )))
        }
    };
    let base = preset_params.unwrap_or_default();
    let params = MorfParams {
        gx: flags.gx.or(cfg.gx).unwrap_or(base.gx),
        gy: flags.gy.or(cfg.gy).unwrap_or(base.gy),
        o: flags.o.or(cfg.o).unwrap_or(base.o),
        levels: flags.levels.clone().or_else(|| cfg.levels.clone()).unwrap_or(base.levels),
        alpha: flags.alpha.or(cfg.alpha).unwrap_or(base.alpha),
        normalize: flags.normalize || cfg.normalize.unwrap_or(base.normalize),
        amplify_mode: flags.amplify_mode.or(cfg.amplify_mode).unwrap_or(base.amplify_mode),
    };
    params.validate()?;
    let defaults = TemporalFilterConfig::default();
    let filter = TemporalFilterConfig {
        low_hz: flags.low_hz.or(cfg.low_hz).unwrap_or(defaults.low_hz),
        high_hz: flags.high_hz.or(cfg.high_hz).unwrap_or(defaults.high_hz),
        fps,
        spatial_sigma: flags
            .spatial_sigma
            .or(cfg.spatial_sigma)
            .unwrap_or(defaults.spatial_sigma),
    };
    let grid = match grid_flag.or(cfg.grid.as_deref()) {
        Some(s) => parse_grid(s)?,
        None => GridSpec::default(),
    };
    Ok(Resolved { params, filter, grid })
}

/// Parses "C=...;gamma=...;c0=..." where gamma entries are absolute floats,
/// "K/d" (over feature length), or "K/dm2" (over length times mean squared
/// training entry).
fn parse_grid(spec: &str) -> Result<GridSpec> {
    let mut grid = GridSpec {
        cs: vec![],
        gammas: vec![],
        gammas_over_dim: vec![],
        gammas_scaled: vec![],
        coef0s: vec![],
    };
    for part in spec.split(';') {
        let (key, rest) = part
            .split_once('=')
            .ok_or_else(|| MorfError::Config(format!("grid term '{part}' missing '='")))?;
        match key.trim() {
            "C" | "c" => {
                for tok in rest.split(',') {
                    grid.cs.push(parse_f64(tok)?);
                }
            }
            "gamma" | "g" => {
                for tok in rest.split(',') {
                    let tok = tok.trim();
                    if let Some(k) = tok.strip_suffix("/dm2") {
                        grid.gammas_scaled.push(parse_f64(k)?);
                    } else if let Some(k) = tok.strip_suffix("/d") {
                        grid.gammas_over_dim.push(parse_f64(k)?);
                    } else {
                        grid.gammas.push(parse_f64(tok)?);
                    }
                }
            }
            "c0" | "coef0" => {
                for tok in rest.split(',') {
                    grid.coef0s.push(parse_f64(tok)?);
                }
            }
            other => {
                return Err(MorfError::Config(format!("unknown grid key '{other}'")));
            }
        }
    }
    if grid.cs.is_empty()
        || grid.coef0s.is_empty()
        || (grid.gammas.is_empty()
            && grid.gammas_over_dim.is_empty()
            && grid.gammas_scaled.is_empty())
    {
        return Err(MorfError::Config("grid must define C, gamma, and c0 lists".into()));
    }
    // Materialization catches non-positive values before any computation.
    grid.materialize(1)?;
    Ok(grid)
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|e| MorfError::Config(format!("bad number '{tok}': {e}")))
}

fn init_rayon(jobs: Option<usize>, cfg: &FileConfig) {
    if let Some(n) = jobs.or(cfg.jobs) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

fn extract_all(
    manifest_path: &Path,
    params: &MorfParams,
    filter: &TemporalFilterConfig,
    mask: Option<&GrayFrame>,
) -> Result<(Vec<DescriptorRow>, Vec<String>)> {
    use rayon::prelude::*;
    let manifest = load_manifest(manifest_path)?;
    let results: Vec<std::result::Result<DescriptorRow, String>> = manifest
        .sequences
        .par_iter()
        .map(|seq| {
            let run = || -> Result<DescriptorRow> {
                let frames = load_sequence(seq)?;
                let cfg = TemporalFilterConfig { fps: seq.fps, ..*filter };
                let d = extract_morf(&frames, seq.f_onset, seq.f_apex, params, &cfg, mask)?;
                Ok(DescriptorRow {
                    id: seq.id.clone(),
                    label: seq.label.clone(),
                    values: d.values,
                })
            };
            run().map_err(|e| format!("sequence '{}': {e}", seq.id))
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(msg) => failures.push(msg),
        }
    }
    Ok((rows, failures))
}

fn cmd_extract(args: &ExtractArgs) -> Result<i32> {
    let cfg = load_file_config(args.features.config.as_ref())?;
    init_rayon(args.features.jobs, &cfg);
    let resolved = resolve(&args.features, &cfg, None, None, 30.0)?;
    let mask = match &args.mask {
        Some(p) => Some(load_gray_frame(p)?),
        None => None,
    };
    let (rows, failures) =
        extract_all(&args.manifest, &resolved.params, &resolved.filter, mask.as_ref())?;
    write_descriptors_csv(&args.out, &rows)?;
    if let Some(bin) = &args.bin {
        write_descriptors_bin(bin, &resolved.params, &rows)?;
    }
    println!(
        "extracted {} descriptors of length {} -> {}",
        rows.len(),
        resolved.params.descriptor_len(),
        args.out.display()
    );
    for f in &failures {
        eprintln!("error: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct SweepRecord {
    param: String,
    value: f64,
    metrics: Metrics,
}

fn feature_set_for(
    manifest_path: &Path,
    params: &MorfParams,
    filter: &TemporalFilterConfig,
    mask: Option<&GrayFrame>,
    descriptors: Option<&PathBuf>,
) -> Result<FeatureSet> {
    let manifest = load_manifest(manifest_path)?;
    let rows: Vec<DescriptorRow> = match descriptors {
        Some(path) => {
            let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
            if ext.eq_ignore_ascii_case("morf") {
                read_descriptors_bin(path)?.1
            } else {
                read_descriptors_csv(path)?
            }
        }
        None => {
            let (rows, failures) = extract_all(manifest_path, params, filter, mask)?;
            if !failures.is_empty() {
                for f in &failures {
                    eprintln!("error: {f}");
                }
                return Err(MorfError::Sequence(format!(
                    "{} sequences failed extraction",
                    failures.len()
                )));
            }
            rows
        }
    };
    let by_id: std::collections::BTreeMap<&str, &DescriptorRow> =
        rows.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut ids = Vec::new();
    let mut subjects = Vec::new();
    let mut labels = Vec::new();
    let mut features = Vec::new();
    for seq in &manifest.sequences {
        let row = by_id.get(seq.id.as_str()).ok_or_else(|| {
            MorfError::Feature(format!("no descriptor for sequence '{}'", seq.id))
        })?;
        ids.push(seq.id.clone());
        subjects.push(seq.subject_id.clone());
        labels.push(
            manifest
                .class_index(&seq.label)
                .ok_or_else(|| MorfError::Feature(format!("label '{}' unknown", seq.label)))?,
        );
        features.push(row.values.clone());
    }
    Ok(FeatureSet { ids, subjects, labels, features, classes: manifest.classes.clone() })
}

fn write_predictions_csv(path: &Path, metrics: &Metrics, set: &FeatureSet) -> Result<()> {
    let mut out = String::from("id,subject,true_label,predicted_label\n");
    for fold in &metrics.folds {
        for (i, id) in fold.test_ids.iter().enumerate() {
            let subject = set
                .ids
                .iter()
                .position(|x| x == id)
                .map(|p| set.subjects[p].clone())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                id, subject, fold.true_labels[i], fold.predicted_labels[i]
            ));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let cfg = load_file_config(args.features.config.as_ref())?;
    init_rayon(args.features.jobs, &cfg);
    let resolved = resolve(
        &args.features,
        &cfg,
        args.preset.as_deref(),
        args.grid.as_deref(),
        cfg.fps.unwrap_or(30.0),
    )?;
    let mask = match &args.mask {
        Some(p) => Some(load_gray_frame(p)?),
        None => None,
    };

    let sweep = match &args.param_sweep {
        Some(s) => Some(parse_sweep(s)?),
        None => None,
    };

    match sweep {
        None => {
            let set = feature_set_for(
                &args.manifest,
                &resolved.params,
                &resolved.filter,
                mask.as_ref(),
                args.descriptors.as_ref(),
            )?;
            let metrics = evaluate_loso_features(&set, &resolved.grid)?;
            std::fs::write(&args.out, serde_json::to_string_pretty(&metrics).unwrap())?;
            let pred_path = args
                .pred_csv
                .clone()
                .unwrap_or_else(|| args.out.with_extension("predictions.csv"));
            write_predictions_csv(&pred_path, &metrics, &set)?;
            println!("accuracy {:.4}  macro-F1 {:.4}", metrics.accuracy, metrics.f_measure);
            println!("metrics -> {}", args.out.display());
            Ok(0)
        }
        Some((param, values)) => {
            let mut records = Vec::new();
            for v in values {
                let mut p = resolved.params.clone();
                match param.as_str() {
                    "o" => p.o = v as usize,
                    "gx" => p.gx = v as usize,
                    "gy" => p.gy = v as usize,
                    "alpha" => p.alpha = v,
                    other => {
                        return Err(MorfError::Config(format!(
                            "unsupported sweep parameter '{other}'"
                        )))
                    }
                }
                p.validate()?;
                let set = feature_set_for(
                    &args.manifest,
                    &p,
                    &resolved.filter,
                    mask.as_ref(),
                    None,
                )?;
                let metrics = evaluate_loso_features(&set, &resolved.grid)?;
                println!(
                    "{param}={v}: accuracy {:.4}  macro-F1 {:.4}",
                    metrics.accuracy, metrics.f_measure
                );
                records.push(SweepRecord { param: param.clone(), value: v, metrics });
            }
            std::fs::write(&args.out, serde_json::to_string_pretty(&records).unwrap())?;
            println!("sweep metrics -> {}", args.out.display());
            Ok(0)
        }
    }
}

/// "o=4..10" (inclusive range) or "alpha=1,5,10" (list).
fn parse_sweep(s: &str) -> Result<(String, Vec<f64>)> {
    let (key, rest) = s
        .split_once('=')
        .ok_or_else(|| MorfError::Config(format!("sweep '{s}' missing '='")))?;
    let values = if let Some((a, b)) = rest.split_once("..") {
        let lo = parse_f64(a)? as i64;
        let hi = parse_f64(b)? as i64;
        if lo > hi {
            return Err(MorfError::Config(format!("empty sweep range '{rest}'")));
        }
        (lo..=hi).map(|v| v as f64).collect()
    } else {
        rest.split(',').map(parse_f64).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(MorfError::Config("sweep has no values".into()));
    }
    Ok((key.trim().to_string(), values))
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    let cfg = load_file_config(args.config.as_ref())?;
    let defaults = MotionDatasetSpec::default();
    let class_names = args
        .classes
        .clone()
        .or_else(|| cfg.classes.clone())
        .unwrap_or_else(|| vec!["left".into(), "right".into(), "up".into()]);
    let classes = class_names
        .iter()
        .map(|n| MotionClass::from_name(n))
        .collect::<Result<Vec<_>>>()?;
    let spec = MotionDatasetSpec {
        classes,
        subjects: args.subjects.or(cfg.subjects).unwrap_or(defaults.subjects),
        reps: args.reps.or(cfg.reps).unwrap_or(defaults.reps),
        noise_sigma: args.noise.or(cfg.noise).unwrap_or(defaults.noise_sigma),
        seed: args.seed.or(cfg.seed).unwrap_or(defaults.seed),
        width: args.width.or(cfg.width).unwrap_or(defaults.width),
        height: args.height.or(cfg.height).unwrap_or(defaults.height),
        frames: args.frames.or(cfg.frames).unwrap_or(defaults.frames),
        fps: args.fps.or(cfg.fps).unwrap_or(defaults.fps),
    };
    let manifest = make_motion_dataset(&spec, &args.out)?;
    let manifest_path = args.out.join("manifest.json");
    save_manifest_relative(&manifest, &manifest_path)?;
    println!("{}", manifest_path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// pyramid-dump / phase-dump
// ---------------------------------------------------------------------------

// Float-plane channel ids.
const CH_SUBBAND: u32 = 0;
const CH_PC: u32 = 3;
const CH_PS: u32 = 4;
const CH_AMPLITUDE: u32 = 5;
const CH_RESIDUAL: u32 = 6;

fn cmd_pyramid_dump(args: &PyramidDumpArgs) -> Result<i32> {
    std::fs::create_dir_all(&args.out)?;
    let frame = load_gray_frame(&args.input)?;
    let pyr = build_pyramid(&frame, args.levels)?;
    for (k, band) in pyr.bands.iter().enumerate() {
        let path = args.out.join(format!("band_{:02}.plane", k + 1));
        write_float_plane(&path, band, (k + 1) as u32, CH_SUBBAND)?;
    }
    write_float_plane(
        &args.out.join("residual.plane"),
        &pyr.residual,
        args.levels as u32,
        CH_RESIDUAL,
    )?;
    println!("wrote {} band planes + residual -> {}", pyr.bands.len(), args.out.display());
    Ok(0)
}

fn cmd_phase_dump(args: &PhaseDumpArgs) -> Result<i32> {
    std::fs::create_dir_all(&args.out)?;
    let cfg = load_file_config(args.features.config.as_ref())?;
    let resolved = resolve(&args.features, &cfg, None, None, args.fps)?;

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.frames)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|s| s.to_ascii_lowercase()),
                Some(ref ext) if ["png", "pgm", "ppm", "pnm"].contains(&ext.as_str())
            )
        })
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(MorfError::Sequence(format!(
            "phase-dump needs >= 2 frames, found {}",
            paths.len()
        )));
    }
    let level = args.level;
    let mono: Vec<_> = paths
        .iter()
        .map(|p| {
            let frame = load_gray_frame(p)?;
            let pyr = build_pyramid(&frame, level)?;
            riesz_transform(pyr.band(level).expect("level checked by build"), level)
        })
        .collect::<Result<Vec<_>>>()?;
    let phases = filter_phase_sequence(&mono, &resolved.filter)?;
    for (t, (phase, m)) in phases.iter().zip(&mono).enumerate() {
        write_float_plane(
            &args.out.join(format!("frame_{t:04}_pc.plane")),
            &phase.pc,
            level as u32,
            CH_PC,
        )?;
        write_float_plane(
            &args.out.join(format!("frame_{t:04}_ps.plane")),
            &phase.ps,
            level as u32,
            CH_PS,
        )?;
        write_float_plane(
            &args.out.join(format!("frame_{t:04}_amplitude.plane")),
            &m.amplitude().a,
            level as u32,
            CH_AMPLITUDE,
        )?;
    }
    println!("wrote {} frames of phase planes -> {}", phases.len(), args.out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Synth(args) => cmd_synth(args),
        Command::PyramidDump(args) => cmd_pyramid_dump(args),
        Command::PhaseDump(args) => cmd_phase_dump(args),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
