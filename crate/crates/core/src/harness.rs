//! Experiment configuration, trials, sweeps and CSV results.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{AttackKind, FakeInit};
use crate::defenses::{apply_defense, degree_gap_threshold, evaluate_detection, DefenseKind, DetectorConfig};
use crate::error::{Error, Result};
use crate::estimator::Metric;
use crate::gain::{
    gain_between, theoretical_gain_cc, theoretical_gain_degree, BaselineMode, GainOptions, Pairing, Scenario,
};
use crate::graph::Graph;
use crate::ldp::{split_budget, CollectionMode, Report};
use crate::rng::Seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Registry name, `synthetic-facebook`, or an edge-list path.
    pub dataset: String,
    pub metric: Metric,
    pub attack: AttackKind,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: CollectionMode,
    pub fake_init: FakeInit,
    pub baseline: BaselineMode,
    pub pairing: Pairing,
    pub defense: DefenseKind,
    pub min_support: Option<usize>,
    pub max_itemset_size: Option<usize>,
    pub itemset_threshold: Option<usize>,
    pub degree_gap_threshold: Option<f64>,
    pub naive_fraction: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub large: bool,
    /// Record wall time per trial; off keeps CSV output reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: "facebook".to_string(),
            metric: Metric::DegreeCentrality,
            attack: AttackKind::Mga,
            epsilon: 4.0,
            alpha: 0.5,
            beta: 0.05,
            gamma: 0.05,
            trials: 10,
            seed: 1,
            mode: CollectionMode::SynchronizedPair,
            fake_init: FakeInit::Fresh,
            baseline: BaselineMode::WithFakes,
            pairing: Pairing::Paired,
            defense: DefenseKind::None,
            min_support: None,
            max_itemset_size: None,
            itemset_threshold: None,
            degree_gap_threshold: None,
            naive_fraction: None,
            cache_dir: None,
            large: false,
            timing: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad value `{value}` for `{key}`"))),
    }
}

impl ExperimentConfig {
    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "dataset" => self.dataset = value.to_string(),
            "metric" => self.metric = value.parse()?,
            "attack" => self.attack = value.parse()?,
            "epsilon" => self.epsilon = parse(&key, value)?,
            "alpha" => self.alpha = parse(&key, value)?,
            "beta" => self.beta = parse(&key, value)?,
            "gamma" => self.gamma = parse(&key, value)?,
            "trials" => self.trials = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "mode" => self.mode = value.parse()?,
            "fake_init" => self.fake_init = value.parse()?,
            "baseline" => {
                self.baseline = match value {
                    "with-fakes" => BaselineMode::WithFakes,
                    "genuine-only" => BaselineMode::GenuineOnly,
                    _ => return Err(Error::Config(format!("bad value `{value}` for `baseline`"))),
                }
            }
            "pairing" => {
                self.pairing = match value {
                    "paired" => Pairing::Paired,
                    "unpaired" => Pairing::Unpaired,
                    _ => return Err(Error::Config(format!("bad value `{value}` for `pairing`"))),
                }
            }
            "defense" => self.defense = value.parse()?,
            "min_support" => self.min_support = Some(parse(&key, value)?),
            "max_itemset_size" => self.max_itemset_size = Some(parse(&key, value)?),
            "itemset_threshold" => self.itemset_threshold = Some(parse(&key, value)?),
            "degree_gap_threshold" => self.degree_gap_threshold = Some(parse(&key, value)?),
            "naive_fraction" => self.naive_fraction = Some(parse(&key, value)?),
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            "large" => self.large = parse_bool(&key, value)?,
            "timing" => self.timing = parse_bool(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: k + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                line: k + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(crate::dataset::default_cache_dir)
    }

    pub fn load_graph(&self) -> Result<Graph> {
        Ok(crate::dataset::load_dataset(&self.dataset, &self.cache_dir(), self.large)?.0)
    }

    /// Detector settings for the given reports, with overrides applied.
    pub fn detector(&self, reports: &[Report]) -> DetectorConfig {
        let mut d = DetectorConfig::for_reports(reports);
        if let Some(v) = self.min_support {
            d.min_support = v;
        }
        if let Some(v) = self.max_itemset_size {
            d.max_itemset_size = v;
        }
        if let Some(v) = self.itemset_threshold {
            d.itemset_threshold = v;
        }
        if let Some(v) = self.degree_gap_threshold {
            d.degree_gap_threshold = Some(v);
        }
        if let Some(v) = self.naive_fraction {
            d.naive_fraction = v;
        }
        d
    }
}

/// One line of the results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub metric: Metric,
    pub attack: AttackKind,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub trial: usize,
    pub gain_empirical: f64,
    pub gain_theoretical: f64,
    pub defense: DefenseKind,
    /// Itemset count, degree gap or naive fraction in force; empty without
    /// a defense.
    pub threshold: Option<f64>,
    pub post_defense_gain: f64,
    pub precision: f64,
    pub recall: f64,
    pub wall_time_ms: u64,
}

pub const RESULT_HEADER: [&str; 15] = [
    "dataset",
    "metric",
    "attack",
    "epsilon",
    "beta",
    "gamma",
    "trial",
    "gain_empirical",
    "gain_theoretical",
    "defense",
    "threshold",
    "post_defense_gain",
    "precision",
    "recall",
    "wall_time_ms",
];

/// Closed-form MGA reference for the configured metric, in the same units
/// as the empirical gain. For degree the crafted-link count is rescaled by
/// the estimator's `1 / (2p - 1)`.
pub fn reference_gain(metric: Metric, m: usize, r: usize, n: usize, p: f64, avg_perturbed_degree: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    match metric {
        Metric::DegreeCentrality => theoretical_gain_degree(m, r, n, avg_perturbed_degree) / (2.0 * p - 1.0),
        Metric::ClusteringCoefficient => {
            theoretical_gain_cc(m, r, n, p, avg_perturbed_degree).unwrap_or(f64::NAN)
        }
    }
}

/// Seed of trial `k`; shared across sweep values so curves use common
/// randomness.
pub fn trial_seed(cfg: &ExperimentConfig, trial: usize) -> Seed {
    Seed(cfg.seed).derive(trial as u64)
}

fn threshold_in_force(cfg: &ExperimentConfig, detector: &DetectorConfig) -> Option<f64> {
    match cfg.defense {
        DefenseKind::Detect1 => Some(detector.itemset_threshold as f64),
        DefenseKind::Detect2 => detector.degree_gap_threshold,
        DefenseKind::Naive1 | DefenseKind::Naive2 => Some(detector.naive_fraction),
        DefenseKind::None => None,
    }
}

/// Run one trial on an already loaded genuine graph.
pub fn run_trial_on(graph: &Graph, cfg: &ExperimentConfig, trial: usize) -> Result<ResultRow> {
    let start = Instant::now();
    let params = split_budget(cfg.epsilon, cfg.alpha)?;
    let seed = trial_seed(cfg, trial);
    let sc = Scenario::build(graph, cfg.beta, cfg.gamma, cfg.fake_init, params, cfg.mode, seed)?;
    let plan = sc.craft(cfg.attack, cfg.metric)?;
    let options = GainOptions {
        pairing: cfg.pairing,
        baseline: cfg.baseline,
    };
    let gain = sc.empirical_gain(&plan, options)?.total;
    let theory = reference_gain(
        cfg.metric,
        sc.threat.fakes,
        sc.threat.targets.len(),
        sc.threat.total(),
        params.p,
        sc.knowledge.avg_perturbed_degree,
    );

    let attacked = sc.attack_reports(&plan)?;
    let mut detector = cfg.detector(&attacked);
    if cfg.defense == DefenseKind::Detect2 && detector.degree_gap_threshold.is_none() {
        detector.degree_gap_threshold = Some(degree_gap_threshold(&attacked, params.p, params.epsilon2));
    }
    let (post, quality) = if cfg.defense == DefenseKind::None {
        (gain, evaluate_detection(&Default::default(), &sc.threat.fake_set()))
    } else {
        let detection = apply_defense(cfg.defense, &attacked, params.p, params.epsilon2, &detector)?;
        let before = sc.baseline_reports(options)?;
        let post = gain_between(&before, &detection.cleaned, &sc.threat.targets, cfg.metric, params.p, cfg.mode)?.total;
        (post, evaluate_detection(&detection.flagged, &sc.threat.fake_set()))
    };
    if !gain.is_finite() || !post.is_finite() {
        warn!("trial {trial} of {} produced a non-finite gain", cfg.dataset);
    }
    Ok(ResultRow {
        dataset: cfg.dataset.clone(),
        metric: cfg.metric,
        attack: cfg.attack,
        epsilon: cfg.epsilon,
        beta: cfg.beta,
        gamma: cfg.gamma,
        trial,
        gain_empirical: gain,
        gain_theoretical: theory,
        defense: cfg.defense,
        threshold: threshold_in_force(cfg, &detector),
        post_defense_gain: post,
        precision: quality.precision,
        recall: quality.recall,
        wall_time_ms: if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

/// Load the configured dataset and run one trial.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<ResultRow> {
    run_trial_on(&cfg.load_graph()?, cfg, trial)
}

/// All `cfg.trials` trials of one configuration, ordered by trial index.
pub fn run_trials_on(graph: &Graph, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial_on(graph, cfg, t))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Epsilon,
    Beta,
    Gamma,
    /// The active defense's threshold.
    Threshold,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Epsilon => "epsilon",
            SweepParam::Beta => "beta",
            SweepParam::Gamma => "gamma",
            SweepParam::Threshold => "threshold",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" | "eps" => Ok(SweepParam::Epsilon),
            "beta" => Ok(SweepParam::Beta),
            "gamma" => Ok(SweepParam::Gamma),
            "threshold" => Ok(SweepParam::Threshold),
            other => Err(Error::Config(format!("cannot sweep `{other}`"))),
        }
    }
}

/// `cfg` with `param` set to `value`.
pub fn with_param(cfg: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig> {
    let mut c = cfg.clone();
    match param {
        SweepParam::Epsilon => c.epsilon = value,
        SweepParam::Beta => c.beta = value,
        SweepParam::Gamma => c.gamma = value,
        SweepParam::Threshold => match c.defense {
            DefenseKind::Detect1 => c.itemset_threshold = Some(value.round().max(0.0) as usize),
            DefenseKind::Detect2 => c.degree_gap_threshold = Some(value),
            DefenseKind::Naive1 | DefenseKind::Naive2 => c.naive_fraction = Some(value),
            DefenseKind::None => return Err(Error::Config("threshold sweep needs a defense".into())),
        },
    }
    Ok(c)
}

/// Every value crossed with every trial, in value order then trial order.
pub fn run_sweep_on(graph: &Graph, cfg: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<ResultRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| with_param(cfg, param, v))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(c, t)| run_trial_on(graph, &configs[c], t))
        .collect()
}

pub fn run_sweep(cfg: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<ResultRow>> {
    run_sweep_on(&cfg.load_graph()?, cfg, param, values)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with [`RESULT_HEADER`]; rows in the given order.
pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.metric.to_string(),
            r.attack.to_string(),
            r.epsilon.to_string(),
            r.beta.to_string(),
            r.gamma.to_string(),
            r.trial.to_string(),
            r.gain_empirical.to_string(),
            r.gain_theoretical.to_string(),
            r.defense.to_string(),
            opt(r.threshold),
            r.post_defense_gain.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.wall_time_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_path(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_results(std::fs::File::create(path)?, rows)
}

fn field<T: FromStr>(rec: &csv::StringRecord, k: usize, line: usize) -> Result<T> {
    let raw = rec.get(k).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad `{}` value `{raw}`", RESULT_HEADER[k]),
    })
}

/// Parse a results CSV written by [`write_results`].
pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RESULT_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        rows.push(ResultRow {
            dataset: rec.get(0).unwrap_or("").to_string(),
            metric: field(&rec, 1, line)?,
            attack: field(&rec, 2, line)?,
            epsilon: field(&rec, 3, line)?,
            beta: field(&rec, 4, line)?,
            gamma: field(&rec, 5, line)?,
            trial: field(&rec, 6, line)?,
            gain_empirical: field(&rec, 7, line)?,
            gain_theoretical: field(&rec, 8, line)?,
            defense: field(&rec, 9, line)?,
            threshold: match rec.get(10).unwrap_or("") {
                "" => None,
                _ => Some(field(&rec, 10, line)?),
            },
            post_defense_gain: field(&rec, 11, line)?,
            precision: field(&rec, 12, line)?,
            recall: field(&rec, 13, line)?,
            wall_time_ms: field(&rec, 14, line)?,
        });
    }
    Ok(rows)
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
