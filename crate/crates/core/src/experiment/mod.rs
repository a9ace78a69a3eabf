//! Experiment runner: configs and figure presets in, entropy profiles and
//! fit summaries out.
//!
//! A run writes `<id>[_<tag>]_profile.csv` (header `n,S_bits`) per tagged
//! sub-experiment and one `<id>_fit.json` holding every fit of the bundle.

mod config;
mod presets;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, Model, PatternKind, ProfileKind, SupportConfig, SupportKind};
pub use presets::{preset, Preset, FIGURE_IDS};

use crate::entanglement::{entropy_profile, fit_df, full_range, DfEstimate, EntropyProfile, FitWindow};
use crate::error::{Error, Result};
use crate::su2::{assemble_state, SpinS, WVector};
use crate::sun::{assemble_state_n, WTensor};
use config::StatePlan;

/// Overrides applied on top of a preset.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trim: Option<f64>,
}

/// d_f fitted at one step of a convergence sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub k: u32,
    pub d_f: f64,
    pub rel_err: Option<f64>,
}

/// Fit summary of one run, as written to `<id>_fit.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub tag: String,
    pub d_f: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    pub max_abs_residual: f64,
    pub points_used: usize,
    pub target: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(rename = "L")]
    pub l: usize,
    pub k: Vec<u32>,
    pub seed: u64,
    pub trim: Option<f64>,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergencePoint>,
}

/// One tagged sub-experiment with its profile.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub profile: EntropyProfile,
    pub summary: RunSummary,
}

/// Everything produced by a figure or custom run.
#[derive(Clone, Debug)]
pub struct OutputBundle {
    pub id: String,
    pub description: String,
    pub note: Option<String>,
    pub runs: Vec<RunOutput>,
}

#[derive(Serialize)]
struct FitFile<'a> {
    id: &'a str,
    description: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    pass: bool,
    runs: Vec<&'a RunSummary>,
}

impl OutputBundle {
    /// True when every run with a target lies within its tolerance.
    pub fn passed(&self) -> bool {
        self.runs.iter().all(|r| r.summary.pass)
    }

    pub fn profile_file_name(&self, run: &RunOutput) -> String {
        if self.runs.len() == 1 {
            format!("{}_profile.csv", self.id)
        } else {
            format!("{}_{}_profile.csv", self.id, run.summary.tag)
        }
    }

    pub fn fit_file_name(&self) -> String {
        format!("{}_fit.json", self.id)
    }

    pub fn fit_json(&self) -> Result<String> {
        let file = FitFile {
            id: &self.id,
            description: &self.description,
            note: self.note.as_deref(),
            pass: self.passed(),
            runs: self.runs.iter().map(|r| &r.summary).collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Numerical(format!("fit summary not serializable: {e}")))
    }

    /// Writes the CSV profiles and the fit summary into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for run in &self.runs {
            let path = dir.join(self.profile_file_name(run));
            std::fs::write(&path, run.profile.to_csv())?;
            written.push(path);
        }
        let path = dir.join(self.fit_file_name());
        std::fs::write(&path, self.fit_json()? + "\n")?;
        written.push(path);
        Ok(written)
    }
}

fn su2_state(l: usize, plan: &StatePlan) -> Result<WVector> {
    match plan {
        StatePlan::Su2 { spin, support, profile, zeros } => assemble_state(l, SpinS::new(*spin)?, support, profile, *zeros),
        StatePlan::Su2Basis { spin, m } => WVector::basis(l, SpinS::new(*spin)?, *m),
        _ => unreachable!("SO(4) chains are SU(2) plans"),
    }
}

/// Entropy profile over every n of the state a config describes.
pub fn compute_profile(config: &ExperimentConfig) -> Result<EntropyProfile> {
    let l = config.l;
    let n_set = full_range(l);
    match config.plan()? {
        plan @ (StatePlan::Su2 { .. } | StatePlan::Su2Basis { .. }) => entropy_profile(&su2_state(l, &plan)?, &n_set),
        StatePlan::So4 { chains } => {
            let ps = chains
                .iter()
                .map(|c| entropy_profile(&su2_state(l, c)?, &n_set))
                .collect::<Result<Vec<_>>>()?;
            let points = ps[0].points.iter().zip(&ps[1].points).map(|(a, b)| (a.0, a.1 + b.1)).collect();
            Ok(EntropyProfile { l, points })
        }
        StatePlan::SuN { factors, profiles, zeros } => {
            let w = assemble_state_n(l, config.two_s as usize, &factors, &profiles, zeros)?;
            entropy_profile(&w, &n_set)
        }
        StatePlan::SuNBasis { m } => entropy_profile(&WTensor::basis(l, config.two_s as usize, &m)?, &n_set),
    }
}

fn window(config: &ExperimentConfig) -> FitWindow {
    FitWindow { trim: config.trim }
}

/// Runs one config: profile, fit and optional d_f(k) sequence.
pub fn run_config(tag: &str, config: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    config.validate()?;
    let target = config.target();
    let profile = compute_profile(config)?;
    let est: DfEstimate = fit_df(&profile, window(config), target)?;
    let mut convergence = Vec::new();
    if let Some(ks) = &config.convergence_k {
        let ks_main = config.ks();
        for &k in ks {
            let d_f = if ks_main.iter().all(|&x| x == k) {
                est.d_f
            } else {
                fit_df(&compute_profile(&config.with_k(k))?, window(config), target)?.d_f
            };
            convergence.push(ConvergencePoint { k, d_f, rel_err: target.map(|t| (d_f - t).abs() / t) });
        }
    }
    let pass = match (est.rel_err_vs_target, config.tolerance) {
        (Some(e), Some(tol)) => e <= tol,
        _ => true,
    };
    let summary = RunSummary {
        tag: tag.to_string(),
        d_f: est.d_f,
        s0: est.s0,
        max_abs_residual: est.max_abs_residual,
        points_used: est.points_used,
        target,
        rel_err: est.rel_err_vs_target,
        tolerance: config.tolerance,
        pass,
        l: config.l,
        k: config.ks(),
        seed: config.seed,
        trim: config.trim,
        runtime_s: start.elapsed().as_secs_f64(),
        convergence,
    };
    Ok(RunOutput { config: config.clone(), profile, summary })
}

/// Runs a user config as a single-run bundle named `custom`.
pub fn run_custom(config: &ExperimentConfig) -> Result<OutputBundle> {
    let run = run_config("custom", config)?;
    Ok(OutputBundle { id: "custom".into(), description: "custom configuration".into(), note: None, runs: vec![run] })
}

/// Runs every sub-experiment of a figure preset.
pub fn run_figure(id: &str, opts: RunOptions) -> Result<OutputBundle> {
    let p = preset(id, opts.seed.unwrap_or(0))?;
    let runs = p
        .runs
        .iter()
        .map(|(tag, c)| {
            let mut c = c.clone();
            if opts.trim.is_some() {
                c.trim = opts.trim;
            }
            run_config(tag, &c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutputBundle { id: p.id, description: p.description, note: p.note, runs })
}
