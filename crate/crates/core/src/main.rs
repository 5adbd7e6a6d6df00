use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ldp_poison::dataset::{fetch_dataset, load_dataset, CACHE_ENV};
use ldp_poison::estimator::{assemble_perturbed_graph, write_estimates_csv, Metric};
use ldp_poison::graph::{degree_centrality, local_clustering_coefficient, triangle_count};
use ldp_poison::harness::{run_sweep_on, run_trials_on, write_results, ExperimentConfig, SweepParam};
use ldp_poison::ldp::{collect_reports, split_budget, write_reports_binary, CollectionMode};
use ldp_poison::plot::render_plot;
use ldp_poison::Seed;

#[derive(Parser)]
#[command(name = "ldp-poison", version, about = "Poisoning attacks on graph metrics under edge LDP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download a registry dataset into the cache and verify it.
    Fetch {
        name: String,
        #[arg(long, env = CACHE_ENV, default_value = "data")]
        cache_dir: PathBuf,
    },
    /// Exact metrics, or LDP estimates when --epsilon is given.
    Metrics {
        #[arg(long, default_value = "facebook")]
        dataset: String,
        #[arg(long, env = CACHE_ENV, default_value = "data")]
        cache_dir: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "degree")]
        metric: Metric,
        #[arg(long, default_value = "synchronized-pair")]
        mode: CollectionMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated node ids; all nodes when omitted.
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
        /// Also save the perturbed reports in binary form.
        #[arg(long)]
        reports_out: Option<PathBuf>,
        #[arg(long)]
        large: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run trials of one attack configuration.
    Attack(Experiment),
    /// Run trials with a countermeasure applied.
    Defend(Experiment),
    /// Sweep one parameter over a list of values.
    Sweep {
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Plot mean y against x per series from a results CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "epsilon")]
        x: String,
        #[arg(long, default_value = "gain_empirical")]
        y: String,
        #[arg(long, default_value = "attack")]
        series: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Experiment flags; each overrides the config file, which overrides the
/// built-in defaults.
#[derive(Args)]
struct Experiment {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    attack: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    fake_init: Option<String>,
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    pairing: Option<String>,
    #[arg(long)]
    defense: Option<String>,
    #[arg(long)]
    min_support: Option<String>,
    #[arg(long)]
    max_itemset_size: Option<String>,
    #[arg(long)]
    itemset_threshold: Option<String>,
    #[arg(long)]
    degree_gap_threshold: Option<String>,
    #[arg(long)]
    naive_fraction: Option<String>,
    #[arg(long, env = CACHE_ENV)]
    cache_dir: Option<String>,
    /// Allow datasets flagged as large.
    #[arg(long)]
    large: bool,
    /// Record wall time per trial (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// Results CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Experiment {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("dataset", &self.dataset),
            ("metric", &self.metric),
            ("attack", &self.attack),
            ("epsilon", &self.epsilon),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("mode", &self.mode),
            ("fake_init", &self.fake_init),
            ("baseline", &self.baseline),
            ("pairing", &self.pairing),
            ("defense", &self.defense),
            ("min_support", &self.min_support),
            ("max_itemset_size", &self.max_itemset_size),
            ("itemset_threshold", &self.itemset_threshold),
            ("degree_gap_threshold", &self.degree_gap_threshold),
            ("naive_fraction", &self.naive_fraction),
            ("cache_dir", &self.cache_dir),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.large |= self.large;
        cfg.timing |= self.timing;
        Ok(cfg)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run_experiment(exp: &Experiment, cfg: &ExperimentConfig) -> Result<()> {
    let graph = cfg.load_graph()?;
    let rows = run_trials_on(&graph, cfg)?;
    write_results(output(&exp.out)?, &rows)?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Fetch { name, cache_dir } => {
            let path = fetch_dataset(&name, &cache_dir)?;
            println!("{}", path.display());
        }
        Command::Metrics {
            dataset,
            cache_dir,
            epsilon,
            alpha,
            metric,
            mode,
            seed,
            nodes,
            reports_out,
            large,
            out,
        } => {
            let (g, source) = load_dataset(&dataset, &cache_dir, large)?;
            let nodes: Vec<usize> = if nodes.is_empty() { (0..g.num_nodes()).collect() } else { nodes };
            if let Some(&bad) = nodes.iter().find(|&&i| i >= g.num_nodes()) {
                bail!("node {bad} is outside {source} ({} nodes)", g.num_nodes());
            }
            let mut w = output(&out)?;
            match epsilon {
                None => {
                    writeln!(w, "node_id,degree_centrality,triangles,clustering_coefficient")?;
                    for i in nodes {
                        writeln!(
                            w,
                            "{i},{},{},{}",
                            degree_centrality(&g, i)?,
                            triangle_count(&g, i),
                            local_clustering_coefficient(&g, i)
                        )?;
                    }
                }
                Some(eps) => {
                    let params = split_budget(eps, alpha)?;
                    let reports = collect_reports(&g, &params, mode, Seed(seed))?;
                    if let Some(path) = reports_out {
                        write_reports_binary(File::create(&path)?, &reports)?;
                    }
                    let pg = assemble_perturbed_graph(&reports, mode)?;
                    write_estimates_csv(&mut w, &pg, params.p, metric, nodes)?;
                }
            }
        }
        Command::Attack(exp) => {
            let cfg = exp.config()?;
            run_experiment(&exp, &cfg)?;
        }
        Command::Defend(exp) => {
            let cfg = exp.config()?;
            if cfg.defense == ldp_poison::defenses::DefenseKind::None {
                bail!("defend needs --defense (itemsets, degree_gap, naive_top or naive_extremes)");
            }
            run_experiment(&exp, &cfg)?;
        }
        Command::Sweep { exp, param, values } => {
            let cfg = exp.config()?;
            let graph = cfg.load_graph()?;
            let rows = run_sweep_on(&graph, &cfg, param, &values)?;
            write_results(output(&exp.out)?, &rows)?;
        }
        Command::Plot { csv, x, y, series, out } => {
            render_plot(&csv, &x, &y, &series, &out)?;
        }
    }
    Ok(())
}
