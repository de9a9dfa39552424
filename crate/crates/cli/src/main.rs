use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use engagenet::graphio::{export_graph, import_graph, Graph, GraphFormat};
use engagenet::hetnet::{build_tripartite, TripartiteNetwork};
use engagenet::pipeline::{
    cluster_significance, cluster_statistics, ingest_files, run_pipeline, ExportFormat, Ingested, InputSource,
    PipelineConfig, Vocabularies,
};
use engagenet::sbm::{infer_partition, PartitionResult, SbmConfig};
use engagenet::sigfilter::{write_significant_edges, FilterConfig};
use engagenet::synth::{generate_dataset, SynthConfig};

#[derive(Parser)]
#[command(
    name = "engagenet",
    version,
    about = "Tripartite engagement networks from coded team communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as input CSVs.
    Simulate(SimulateArgs),
    /// Parse and cross-check input CSVs; prints a JSON summary.
    Ingest(InputArgs),
    /// Build the tripartite network (or its student × pair projection).
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        projection: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Infer student clusters.
    Cluster {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        sbm: SbmArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Significant location × behavior edges for every cluster.
    Filter {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        bonferroni: bool,
        #[arg(long)]
        behaviors: Option<PathBuf>,
        /// Output directory for the per-cluster CSVs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the two largest clusters on satisfaction and performance.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every stage and write a bundle.
    Run(RunArgs),
    /// Convert an exported graph between formats.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        format: String,
        /// Export the student × pair projection of a tripartite input.
        #[arg(long)]
        projection: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Planted,
    Study,
    Null,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "study")]
    preset: Preset,
    /// Synthetic configuration as JSON; overrides the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    students: usize,
    /// Code occurrences per student (planted and null presets).
    #[arg(long, default_value_t = 40)]
    per_student: usize,
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long)]
    out: PathBuf,
}

impl SimulateArgs {
    fn synth_config(&self) -> Result<SynthConfig> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(serde_json::from_str(&text)?);
        }
        Ok(match self.preset {
            Preset::Planted => SynthConfig::planted(self.students, self.per_student, self.overlap, self.seed),
            Preset::Null => SynthConfig::null(self.students, self.per_student, self.seed),
            Preset::Study => SynthConfig {
                overlap: self.overlap,
                ..SynthConfig::study_scale(self.seed)
            },
        })
    }
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    students: Option<PathBuf>,
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    behaviors: Option<PathBuf>,
    #[arg(long)]
    locations: Option<PathBuf>,
    /// Comma-separated phases to keep, e.g. `1,2`.
    #[arg(long)]
    phases: Option<String>,
}

impl InputArgs {
    fn vocab(&self) -> Result<Vocabularies> {
        Ok(Vocabularies::load(
            self.behaviors.as_deref(),
            self.locations.as_deref(),
        )?)
    }

    fn ingest(&self) -> Result<Ingested> {
        let phases = parse_phases(self.phases.as_deref())?;
        Ok(ingest_files(
            &self.events,
            self.students.as_deref(),
            self.scores.as_deref(),
            &self.vocab()?,
            phases.as_ref(),
        )?)
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Event log to build the network from.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Previously exported tripartite network or student × pair projection.
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl GraphSource {
    fn load(&self) -> Result<Graph> {
        if let Some(p) = &self.graph {
            return Ok(import_graph(p)?);
        }
        let events = self.events.as_ref().expect("clap enforces one source");
        let vocab = Vocabularies::load(None, None)?;
        let ing = ingest_files(events, None, None, &vocab, None)?;
        Ok(Graph::Tripartite(build_tripartite(&ing.dataset.triads())))
    }

    fn network(&self) -> Result<TripartiteNetwork> {
        match self.load()? {
            Graph::Tripartite(n) => Ok(n),
            Graph::Bipartite(_) => bail!("this command needs the tripartite network, not a projection"),
        }
    }
}

#[derive(Args)]
struct SbmArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: u32,
    /// Require at least two student clusters.
    #[arg(long)]
    no_trivial: bool,
}

impl SbmArgs {
    fn config(&self) -> SbmConfig {
        SbmConfig {
            seed: self.seed,
            restarts: self.restarts,
            allow_trivial: !self.no_trivial,
            ..SbmConfig::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Full pipeline configuration as JSON; other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "synthetic")]
    events: Option<PathBuf>,
    #[arg(long)]
    students: Option<PathBuf>,
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Use a generated dataset instead of input files.
    #[arg(long, value_enum)]
    synthetic: Option<Preset>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phases: Option<String>,
    /// Comma-separated subset of json, graphml, csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match (&self.config, &self.events, self.synthetic) {
            (Some(path), _, _) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                // A bundle manifest embeds its configuration under `config`.
                let inner = value.get("config").cloned().unwrap_or(value);
                serde_json::from_value(inner)?
            }
            (None, Some(events), _) => {
                PipelineConfig::from_files(events, self.students.clone(), self.scores.clone(), &self.out)
            }
            (None, None, Some(preset)) => {
                let seed = self.seed.unwrap_or(0);
                let synth = match preset {
                    Preset::Planted => SynthConfig::planted(60, 40, 0.0, seed),
                    Preset::Null => SynthConfig::null(60, 40, seed),
                    Preset::Study => SynthConfig::study_scale(seed),
                };
                PipelineConfig::synthetic(synth, &self.out)
            }
            (None, None, None) => bail!("give --events, --synthetic or --config"),
        };
        cfg.output_dir = self.out.clone();
        if let Some(seed) = self.seed {
            cfg.sbm.seed = seed;
            if let InputSource::Synthetic(s) = &mut cfg.input {
                s.seed = seed;
            }
        }
        if let Some(r) = self.restarts {
            cfg.sbm.restarts = r;
        }
        if let Some(a) = self.alpha {
            cfg.filter.alpha = a;
        }
        if let Some(p) = parse_phases(self.phases.as_deref())? {
            cfg.phases = Some(p);
        }
        if let Some(f) = &self.format {
            cfg.formats = f
                .split(',')
                .map(|t| t.trim().parse::<ExportFormat>())
                .collect::<Result<_, _>>()?;
        }
        Ok(cfg)
    }
}

fn parse_phases(raw: Option<&str>) -> Result<Option<BTreeSet<u8>>> {
    let Some(raw) = raw else { return Ok(None) };
    let phases = raw
        .split(',')
        .map(|p| p.trim().parse::<u8>().with_context(|| format!("bad phase `{p}`")))
        .collect::<Result<BTreeSet<u8>>>()?;
    if phases.is_empty() || phases.iter().any(|p| !(1..=4).contains(p)) {
        bail!("phases must lie in 1..=4");
    }
    Ok(Some(phases))
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_partition(path: &Path) -> Result<PartitionResult> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // Library errors already embed their causes in the message.
            match err.downcast_ref::<engagenet::Error>() {
                Some(e) => eprintln!("error: {e}"),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => {
            let out = generate_dataset(&args.synth_config()?)?;
            fs::create_dir_all(&args.out)?;
            let ds = &out.dataset;
            let file = |name: &str| fs::File::create(args.out.join(name)).map(std::io::BufWriter::new);
            engagenet::events::write_event_log(file("events.csv")?, &ds.events)?;
            engagenet::events::write_students(file("students.csv")?, &ds.students)?;
            engagenet::events::write_team_scores(file("scores.csv")?, &ds.scores)?;
            out.planted.write_csv(file("planted.csv")?)?;
            eprintln!(
                "wrote {} events for {} students to {}",
                ds.events.len(),
                ds.students.len(),
                args.out.display()
            );
        }
        Command::Ingest(input) => {
            let ing = input.ingest()?;
            let ds = &ing.dataset;
            let findings: Vec<String> = ds.validate().findings.iter().map(|f| f.to_string()).collect();
            let summary = serde_json::json!({
                "events": ds.events.len(),
                "triads": ds.triads().len(),
                "students": ds.students.len(),
                "teams": ds.scores.len(),
                "digests": ing.digests,
                "findings": findings,
            });
            write_json(&summary, None)?;
        }
        Command::Build {
            input,
            format,
            projection,
            out,
        } => {
            let format: GraphFormat = format.parse()?;
            let net = build_tripartite(&input.ingest()?.dataset.triads());
            let graph = if projection {
                Graph::Bipartite(net.project_student_pair())
            } else {
                Graph::Tripartite(net)
            };
            export_graph(&graph, format, &out)?;
        }
        Command::Cluster { source, sbm, out } => {
            let g = match source.load()? {
                Graph::Tripartite(n) => n.project_student_pair(),
                Graph::Bipartite(g) => g,
            };
            let p = infer_partition(&g, &sbm.config())?;
            eprintln!(
                "{} student clusters, description length {:.3} nats",
                p.left_blocks().len(),
                p.description_length
            );
            write_json(&p, Some(&out))?;
        }
        Command::Filter {
            source,
            partition,
            alpha,
            bonferroni,
            behaviors,
            out,
        } => {
            let net = source.network()?;
            let p = read_partition(&partition)?;
            let n_codes = Vocabularies::load(behaviors.as_deref(), None)?.scheme.len();
            let cfg = FilterConfig {
                alpha,
                bonferroni,
                ..FilterConfig::default()
            };
            fs::create_dir_all(&out)?;
            for (_, r) in cluster_significance(&net, &p, &cfg, n_codes)? {
                let id = r.cluster_id.expect("cluster id is set");
                let path = out.join(format!("significant_edges_cluster_{id}.csv"));
                write_significant_edges(fs::File::create(&path)?, &r)?;
                eprintln!("cluster {id}: {} significant edges", r.retained.len());
            }
        }
        Command::Stats { input, partition, out } => {
            let ing = input.ingest()?;
            let p = read_partition(&partition)?;
            let mut warnings = Vec::new();
            let mut report = cluster_statistics(&ing.dataset, &p, &mut warnings);
            report.input_digests = ing.digests;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            write_json(&report, out.as_deref())?;
        }
        Command::Run(args) => {
            let cfg = args.pipeline_config()?;
            let bundle = run_pipeline(&cfg)?;
            for w in &bundle.manifest.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "{} student clusters; bundle written to {}",
                bundle.partition.left_blocks().len(),
                cfg.output_dir.display()
            );
        }
        Command::Export {
            input,
            format,
            projection,
            out,
        } => {
            let format: GraphFormat = format.parse()?;
            let graph = match (import_graph(&input)?, projection) {
                (Graph::Tripartite(n), true) => Graph::Bipartite(n.project_student_pair()),
                (_, true) => bail!("--projection needs a tripartite input"),
                (g, false) => g,
            };
            export_graph(&graph, format, &out)?;
        }
    }
    Ok(())
}
