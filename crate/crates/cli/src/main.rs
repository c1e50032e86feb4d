use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rumor_core::bench::{run_experiment, ExperimentConfig, GeneratorSpec};
use rumor_core::graph::{load_edge_list, load_labeled_edge_list, parse_infected_set, IdTable, InfectedSet};
use rumor_core::sim::{spread_until_n, spread_until_t_with_outcome, SpreadConfig};
use rumor_core::starlike::{detect_source_peak, likelihood_curves, time_grid};
use rumor_core::{detect_source, Error, Graph, Method, QuadratureConfig, RumorSnapshot};

#[derive(Parser)]
#[command(name = "rumor", version, about = "Contagion source detection under the SI model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list
    Gen {
        /// er:N:P, random-tree:N, line:N, star:ARMS:LEN or grid:W:H
        generator: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spread from a source and write the infected set
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        source: String,
        /// Stop once this many nodes are infected
        #[arg(long, conflicts_with = "t", required_unless_present = "t")]
        n: Option<usize>,
        /// Stop at this time
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `node_id infection_time` lines here
        #[arg(long)]
        outcome: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score every infected node and print the estimate as JSON
    Detect {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        snapshot: SnapshotArgs,
        #[arg(long, default_value = "starlike")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank nodes by the peak of their likelihood over the time grid
        #[arg(long, conflicts_with = "at_t")]
        peak: bool,
        /// Rank nodes by their likelihood at the observed time (default)
        #[arg(long)]
        at_t: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Likelihood of every infected node over a time grid, as CSV
    Curves {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        snapshot: SnapshotArgs,
        #[arg(long, default_value = "starlike")]
        method: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark experiment
    Bench {
        /// key = value config file; flags below override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        generator: Option<String>,
        /// fixed_n or fixed_t
        #[arg(long)]
        mode: Option<String>,
        /// Comma-separated infection ratios or horizons
        #[arg(long)]
        settings: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated methods
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Aggregate CSV destination (stdout when omitted)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Per-trial JSON-lines destination
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list file
    #[arg(long)]
    graph: PathBuf,
    /// Node tokens are arbitrary labels mapped to dense ids
    #[arg(long)]
    labels: bool,
    /// Write the label-to-id table here (with --labels)
    #[arg(long, requires = "labels")]
    id_table: Option<PathBuf>,
}

#[derive(Args)]
struct SnapshotArgs {
    /// Infected set: one node per line, optional `# t=<time>` header
    #[arg(long)]
    infected: PathBuf,
    /// Observation time; overrides the file header
    #[arg(long)]
    time: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.05)]
    t_start: f64,
    /// Defaults to three times the number of infected nodes
    #[arg(long)]
    t_stop: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    t_step: f64,
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
}

impl QuadArgs {
    fn config(&self) -> QuadratureConfig {
        let mut q = QuadratureConfig::default();
        if let Some(v) = self.abs_tol {
            q.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            q.rel_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            q.max_subdivisions = v;
        }
        q
    }
}

impl GridArgs {
    fn times(&self, n_infected: usize) -> Result<Vec<f64>, Error> {
        let stop = self.t_stop.unwrap_or(3.0 * n_infected as f64);
        time_grid(self.t_start, stop, self.t_step)
    }
}

struct Input {
    graph: Graph,
    ids: Option<IdTable>,
}

impl Input {
    fn load(args: &GraphArgs) -> Result<Self, Error> {
        let file = fs::File::open(&args.graph)?;
        if !args.labels {
            return Ok(Input {
                graph: load_edge_list(file)?,
                ids: None,
            });
        }
        let (graph, ids) = load_labeled_edge_list(file)?;
        if let Some(path) = &args.id_table {
            ids.write_to(fs::File::create(path)?)?;
        }
        Ok(Input { graph, ids: Some(ids) })
    }

    fn node(&self, token: &str) -> Result<usize, Error> {
        match &self.ids {
            Some(ids) => ids
                .id(token)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown node label {token:?}"))),
            None => token
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("malformed node id {token:?}"))),
        }
    }

    /// `untimed` stands in for a missing observation time when the caller
    /// does not use it.
    fn snapshot(&self, args: &SnapshotArgs, untimed: Option<f64>) -> Result<RumorSnapshot, Error> {
        let text = fs::read_to_string(&args.infected)?;
        let set = match &self.ids {
            None => parse_infected_set(&text)?,
            Some(_) => {
                let mut nodes = Vec::new();
                let mut time = None;
                for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                    if let Some(c) = line.strip_prefix('#') {
                        if let Some(v) = c.trim().strip_prefix("t=") {
                            time = Some(
                                v.trim()
                                    .parse()
                                    .map_err(|_| Error::InvalidArgument(format!("malformed time {v:?}")))?,
                            );
                        }
                        continue;
                    }
                    nodes.push(self.node(line.split_whitespace().next().unwrap_or(line))?);
                }
                InfectedSet { nodes, time }
            }
        };
        let time = args.time.or(set.time).or(untimed);
        set.into_snapshot(&self.graph, time)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { generator, seed, output } => {
            let spec: GeneratorSpec = generator.parse()?;
            let g = spec.generate(seed)?;
            write_output(output.as_deref(), &g.to_edge_list())
        }
        Command::Simulate {
            graph,
            source,
            n,
            t,
            rate,
            seed,
            outcome,
            output,
        } => {
            let input = Input::load(&graph)?;
            let source = input.node(&source)?;
            let cfg = SpreadConfig { rate, seed };
            let (snap, out) = match (n, t) {
                (Some(n), _) => spread_until_n(&input.graph, source, n, &cfg)?,
                (None, Some(t)) => spread_until_t_with_outcome(&input.graph, source, t, &cfg)?,
                (None, None) => unreachable!("clap requires --n or --t"),
            };
            if let Some(path) = outcome {
                fs::write(path, out.to_text())?;
            }
            write_output(output.as_deref(), &snap.to_text())
        }
        Command::Detect {
            graph,
            snapshot,
            method,
            seed,
            peak,
            at_t: _,
            grid,
            quad,
            output,
        } => {
            let input = Input::load(&graph)?;
            let snap = input.snapshot(&snapshot, peak.then_some(0.0))?;
            let method: Method = method.parse()?;
            let q = quad.config();
            let result = if peak {
                let times = grid.times(snap.len())?;
                detect_source_peak(&input.graph, &snap, method, &times, &q, seed)?
            } else {
                detect_source(&input.graph, &snap, method, &q, seed)?
            };
            let mut json = serde_json::to_string_pretty(&result).expect("detection result serializes");
            json.push('\n');
            write_output(output.as_deref(), &json)
        }
        Command::Curves {
            graph,
            snapshot,
            method,
            grid,
            quad,
            output,
        } => {
            let input = Input::load(&graph)?;
            let snap = input.snapshot(&snapshot, Some(0.0))?;
            let method: Method = method.parse()?;
            let times = grid.times(snap.len())?;
            let points = likelihood_curves(&input.graph, &snap, method, &times, &quad.config())?;
            let mut csv = String::from("node,T,log_likelihood\n");
            for p in points {
                csv.push_str(&format!("{},{},{}\n", p.node, p.time, p.log_likelihood));
            }
            write_output(output.as_deref(), &csv)
        }
        Command::Bench {
            config,
            generator,
            mode,
            settings,
            trials,
            methods,
            seed,
            csv,
            jsonl,
        } => {
            let mut pairs: Vec<(String, String)> = Vec::new();
            if let Some(path) = config {
                let text = fs::read_to_string(path)?;
                let file_cfg = ExperimentConfig::parse(&text)?;
                pairs.extend(config_pairs(&file_cfg));
            }
            let flags = [
                ("generator", generator),
                ("mode", mode),
                ("settings", settings),
                ("trials", trials.map(|v| v.to_string())),
                ("methods", methods),
                ("seed", seed.map(|v| v.to_string())),
            ];
            pairs.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
            let cfg = ExperimentConfig::from_pairs(pairs)?;
            let report = run_experiment(&cfg)?;
            if report.total_resamples() > 0 {
                eprintln!(
                    "resampled {} sources whose component was smaller than the target size",
                    report.total_resamples()
                );
            }
            if let Some(path) = jsonl {
                fs::write(path, report.to_jsonl())?;
            }
            write_output(csv.as_deref(), &report.to_csv()?)
        }
    }
}

fn config_pairs(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    use rumor_core::bench::Mode;
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let (mode, settings) = match &cfg.mode {
        Mode::FixedN(v) => ("fixed_n", join(v)),
        Mode::FixedT(v) => ("fixed_t", join(v)),
    };
    let methods = cfg.methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(",");
    [
        ("generator", cfg.generator.to_string()),
        ("mode", mode.to_string()),
        ("settings", settings),
        ("trials", cfg.trials.to_string()),
        ("methods", methods),
        ("seed", cfg.master_seed.to_string()),
        ("abs_tol", cfg.quadrature.abs_tol.to_string()),
        ("rel_tol", cfg.quadrature.rel_tol.to_string()),
        ("max_subdivisions", cfg.quadrature.max_subdivisions.to_string()),
        ("max_resamples", cfg.max_resamples.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
