//! End-to-end orchestration: ingest, build, project, infer, filter, test,
//! and write a reproducible output bundle.
//!
//! Every artifact except the stage timings in `manifest.json` is a pure
//! function of the configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{
    median_split, parse_event_log, parse_students, parse_team_scores, write_event_log, write_students,
    write_team_scores, CodingScheme, Dataset, LocationTaxonomy, Performance,
};
use crate::graphio::{export_to_string, Graph, GraphFormat};
use crate::hetnet::{build_tripartite, BipartiteGraph, TripartiteNetwork};
use crate::sbm::{infer_partition, PartitionResult, SbmConfig};
use crate::sigfilter::{filter_significant, write_significant_edges, FilterConfig, SignificanceResult};
use crate::stats::{fisher_exact, mann_whitney_u, sha256_hex, Alternative, StatsReport};
use crate::synth::{generate_dataset, PlantedLabels, SynthConfig};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever an output layout changes.
pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Files {
        events: PathBuf,
        students: Option<PathBuf>,
        scores: Option<PathBuf>,
    },
    Synthetic(SynthConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    Graphml,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::Graphml),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: InputSource,
    /// Behavior vocabulary file; the healthcare scheme when unset.
    #[serde(default)]
    pub behaviors: Option<PathBuf>,
    /// Location vocabulary file; the simulation ward when unset.
    #[serde(default)]
    pub locations: Option<PathBuf>,
    /// Keep only events in these phases.
    #[serde(default)]
    pub phases: Option<BTreeSet<u8>>,
    #[serde(default)]
    pub sbm: SbmConfig,
    #[serde(default)]
    pub filter: FilterConfig,
    /// Not part of the recorded configuration, so bundles written to
    /// different places stay identical.
    #[serde(default, skip_serializing)]
    pub output_dir: PathBuf,
    /// `json` and `graphml` select graph exports; `csv` selects tables.
    #[serde(default = "all_formats")]
    pub formats: BTreeSet<ExportFormat>,
}

fn all_formats() -> BTreeSet<ExportFormat> {
    [ExportFormat::Json, ExportFormat::Graphml, ExportFormat::Csv].into()
}

impl PipelineConfig {
    pub fn synthetic(synth: SynthConfig, output_dir: impl Into<PathBuf>) -> Self {
        let sbm = SbmConfig::with_seed(synth.seed);
        Self {
            input: InputSource::Synthetic(synth),
            behaviors: None,
            locations: None,
            phases: None,
            sbm,
            filter: FilterConfig::default(),
            output_dir: output_dir.into(),
            formats: all_formats(),
        }
    }

    pub fn from_files(
        events: impl Into<PathBuf>,
        students: Option<PathBuf>,
        scores: Option<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            input: InputSource::Files {
                events: events.into(),
                students,
                scores,
            },
            behaviors: None,
            locations: None,
            phases: None,
            sbm: SbmConfig::default(),
            filter: FilterConfig::default(),
            output_dir: output_dir.into(),
            formats: all_formats(),
        }
    }

    /// SHA-256 of the compact JSON form, which omits `output_dir`.
    pub fn digest(&self) -> Result<String> {
        Ok(sha256_hex(&serde_json::to_vec(self)?))
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if let InputSource::Synthetic(s) = &self.input {
            s.validate()?;
        }
        if let Some(p) = &self.phases {
            if p.is_empty() || p.iter().any(|x| !(1..=4).contains(x)) {
                return Err(Error::InvalidInput("phases must be a non-empty subset of 1..=4".into()));
            }
        }
        if self.sbm.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Vocabularies {
    pub scheme: CodingScheme,
    pub taxonomy: LocationTaxonomy,
}

impl Vocabularies {
    pub fn load(behaviors: Option<&Path>, locations: Option<&Path>) -> Result<Self> {
        Ok(Self {
            scheme: behaviors.map_or_else(|| Ok(CodingScheme::healthcare()), CodingScheme::load)?,
            taxonomy: locations.map_or_else(|| Ok(LocationTaxonomy::simulation_ward()), LocationTaxonomy::load)?,
        })
    }
}

/// Parsed inputs together with the SHA-256 of each raw input.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub dataset: Dataset,
    pub digests: BTreeMap<String, String>,
    pub planted: Option<PlantedLabels>,
    /// CSV text of generated inputs, keyed by file name.
    pub generated: BTreeMap<String, String>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Reads event, student and score files and records their digests.
pub fn ingest_files(
    events: &Path,
    students: Option<&Path>,
    scores: Option<&Path>,
    vocab: &Vocabularies,
    phases: Option<&BTreeSet<u8>>,
) -> Result<Ingested> {
    let mut ing = Ingested::default();
    let raw = read_bytes(events)?;
    ing.digests.insert("events".into(), sha256_hex(&raw));
    ing.dataset.events = parse_event_log(raw.as_slice(), &vocab.scheme, &vocab.taxonomy, phases)?;
    if let Some(p) = students {
        let raw = read_bytes(p)?;
        ing.digests.insert("students".into(), sha256_hex(&raw));
        ing.dataset.students = parse_students(raw.as_slice())?;
    }
    if let Some(p) = scores {
        let raw = read_bytes(p)?;
        ing.digests.insert("scores".into(), sha256_hex(&raw));
        ing.dataset.scores = parse_team_scores(raw.as_slice())?;
    }
    Ok(ing)
}

/// Generates a dataset and renders it in the input CSV layouts.
pub fn ingest_synthetic(cfg: &SynthConfig, vocab: &Vocabularies, phases: Option<&BTreeSet<u8>>) -> Result<Ingested> {
    let out = generate_dataset(cfg)?;
    let mut ing = Ingested {
        dataset: out.dataset,
        planted: Some(out.planted),
        ..Default::default()
    };
    for e in &ing.dataset.events {
        e.validate(&vocab.scheme, &vocab.taxonomy)?;
    }
    let render = |f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> String {
        let mut buf = Vec::new();
        f(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV writers emit UTF-8")
    };
    let ds = &ing.dataset;
    let files = [
        ("events", render(&|b| write_event_log(b, &ds.events))),
        ("students", render(&|b| write_students(b, &ds.students))),
        ("scores", render(&|b| write_team_scores(b, &ds.scores))),
    ];
    for (name, text) in files {
        ing.digests.insert(name.into(), sha256_hex(text.as_bytes()));
        ing.generated.insert(format!("{name}.csv"), text);
    }
    let planted = render(&|b| ing.planted.as_ref().expect("set above").write_csv(b));
    ing.generated.insert("planted.csv".into(), planted);
    if let Some(p) = phases {
        ing.dataset.events.retain(|e| e.phase.is_some_and(|x| p.contains(&x)));
    }
    Ok(ing)
}

/// Filters every student cluster's location × code projection.
///
/// Unless `cfg.success_prob` is set, the null model uses `1 / n_codes`.
pub fn cluster_significance(
    net: &TripartiteNetwork,
    partition: &PartitionResult,
    cfg: &FilterConfig,
    n_codes: usize,
) -> Result<Vec<(BipartiteGraph, SignificanceResult)>> {
    let cfg = FilterConfig {
        success_prob: cfg.success_prob.or(Some(1.0 / n_codes as f64)),
        ..cfg.clone()
    };
    partition
        .left_blocks()
        .into_iter()
        .map(|b| {
            let g = net.project_cluster_lc(partition, b)?;
            let mut r = filter_significant(&g, &cfg)?;
            r.cluster_id = Some(b);
            Ok((g, r))
        })
        .collect()
}

/// Compares the two largest student clusters: Mann-Whitney U on
/// satisfaction and a one-tailed Fisher test of cluster against the team
/// median split. Tests without data are skipped with a note.
pub fn cluster_statistics(dataset: &Dataset, partition: &PartitionResult, warnings: &mut Vec<String>) -> StatsReport {
    let mut report = StatsReport::default();
    let blocks = partition.left_blocks();
    if blocks.len() < 2 {
        report.notes.push("single student cluster; comparisons skipped".into());
        return report;
    }
    if blocks.len() > 2 {
        report.notes.push(format!(
            "{} student clusters; comparing clusters {} and {}",
            blocks.len(),
            blocks[0],
            blocks[1]
        ));
    }
    let (first, second) = (blocks[0], blocks[1]);
    let cluster_of = |s: &str| partition.block_of_left(s);

    let mut x = Vec::new();
    let mut y = Vec::new();
    for s in &dataset.students {
        if let Some(v) = s.satisfaction {
            match cluster_of(&s.student_id) {
                Some(b) if b == first => x.push(f64::from(v)),
                Some(b) if b == second => y.push(f64::from(v)),
                _ => {}
            }
        }
    }
    if x.is_empty() || y.is_empty() {
        report
            .notes
            .push("no satisfaction ratings for one of the clusters; Mann-Whitney U skipped".into());
    } else {
        match mann_whitney_u(&x, &y, Alternative::TwoSided) {
            Ok(r) => report.mwu = Some(r),
            Err(e) => report.notes.push(format!("Mann-Whitney U skipped: {e}")),
        }
    }

    if dataset.scores.is_empty() || dataset.students.is_empty() {
        report
            .notes
            .push("no team scores or student records; Fisher test skipped".into());
        return report;
    }
    let split = match median_split(&dataset.scores) {
        Ok(s) => s,
        Err(e) => {
            report.notes.push(format!("Fisher test skipped: {e}"));
            return report;
        }
    };
    warnings.extend(split.warnings.iter().cloned());
    let mut table = [[0u64; 2]; 2];
    for s in &dataset.students {
        let row = match cluster_of(&s.student_id) {
            Some(b) if b == first => 0,
            Some(b) if b == second => 1,
            _ => continue,
        };
        match split.label_of(&s.team_id) {
            Some(Performance::High) => table[row][0] += 1,
            Some(Performance::Low) => table[row][1] += 1,
            None => {}
        }
    }
    match fisher_exact(&table, Alternative::Greater) {
        Ok(r) => report.fisher = Some(r),
        Err(e) => report.notes.push(format!("Fisher test skipped: {e}")),
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub bundle_format: u32,
    pub config: PipelineConfig,
    pub config_digest: String,
    pub seed: u64,
    /// Output file → SHA-256, excluding this manifest.
    pub outputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    /// Stage → milliseconds. The only non-reproducible field.
    pub stage_timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct RunBundle {
    pub network: TripartiteNetwork,
    pub projection: BipartiteGraph,
    pub partition: PartitionResult,
    pub clusters: Vec<(BipartiteGraph, SignificanceResult)>,
    pub stats: StatsReport,
    pub planted: Option<PlantedLabels>,
    pub manifest: Manifest,
}

struct Stages {
    timings: BTreeMap<String, f64>,
}

impl Stages {
    fn run<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f().map_err(|e| e.at_stage(name));
        self.timings.insert(name.into(), t.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn to_json_text<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Runs every stage and writes the bundle into `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunBundle> {
    let mut stages = Stages {
        timings: BTreeMap::new(),
    };
    let mut warnings = Vec::new();
    stages.run("config", || cfg.validate())?;

    let (vocab, ingested) = stages.run("ingest", || {
        let vocab = Vocabularies::load(cfg.behaviors.as_deref(), cfg.locations.as_deref())?;
        let ing = match &cfg.input {
            InputSource::Files {
                events,
                students,
                scores,
            } => ingest_files(
                events,
                students.as_deref(),
                scores.as_deref(),
                &vocab,
                cfg.phases.as_ref(),
            )?,
            InputSource::Synthetic(s) => ingest_synthetic(s, &vocab, cfg.phases.as_ref())?,
        };
        Ok((vocab, ing))
    })?;
    warnings.extend(ingested.dataset.validate().findings.iter().map(|f| f.to_string()));

    let network = stages.run("build", || {
        let net = build_tripartite(&ingested.dataset.triads());
        if net.is_empty() {
            return Err(Error::InvalidInput("no triads after filtering".into()));
        }
        Ok(net)
    })?;
    let projection = stages.run("project", || Ok(network.project_student_pair()))?;
    let partition = stages.run("infer", || infer_partition(&projection, &cfg.sbm))?;
    let clusters = stages.run("filter", || {
        cluster_significance(&network, &partition, &cfg.filter, vocab.scheme.len())
    })?;
    let stats = stages.run("stats", || {
        let mut s = cluster_statistics(&ingested.dataset, &partition, &mut warnings);
        s.input_digests = ingested.digests.clone();
        warnings.extend(s.notes.iter().cloned());
        Ok(s)
    })?;

    let mut files: BTreeMap<String, String> = BTreeMap::new();
    stages.run("render", || {
        let graph_formats: Vec<GraphFormat> = cfg
            .formats
            .iter()
            .filter_map(|f| match f {
                ExportFormat::Json => Some(GraphFormat::Json),
                ExportFormat::Graphml => Some(GraphFormat::Graphml),
                ExportFormat::Csv => None,
            })
            .collect();
        let net_graph = Graph::Tripartite(network.clone());
        let proj_graph = Graph::Bipartite(projection.clone());
        for &f in &graph_formats {
            files.insert(format!("network.{f}"), export_to_string(&net_graph, f)?);
            files.insert(
                format!("projection_student_pair.{f}"),
                export_to_string(&proj_graph, f)?,
            );
            for (g, r) in &clusters {
                let id = r.cluster_id.expect("set by cluster_significance");
                files.insert(
                    format!("cluster_{id}_location_code.{f}"),
                    export_to_string(&Graph::Bipartite(g.clone()), f)?,
                );
            }
        }
        if cfg.formats.contains(&ExportFormat::Csv) {
            for (_, r) in &clusters {
                let mut buf = Vec::new();
                write_significant_edges(&mut buf, r).expect("writing to memory");
                let id = r.cluster_id.expect("set by cluster_significance");
                files.insert(
                    format!("significant_edges_cluster_{id}.csv"),
                    String::from_utf8(buf).expect("UTF-8"),
                );
            }
            for (name, text) in &ingested.generated {
                files.insert(format!("inputs/{name}"), text.clone());
            }
        }
        files.insert("partition.json".into(), to_json_text(&partition)?);
        let sig: Vec<&SignificanceResult> = clusters.iter().map(|(_, r)| r).collect();
        files.insert("significance.json".into(), to_json_text(&sig)?);
        files.insert("stats.json".into(), to_json_text(&stats)?);
        Ok(())
    })?;

    stages.run("write", || {
        for (name, text) in &files {
            let path = cfg.output_dir.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    })?;

    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        bundle_format: BUNDLE_FORMAT_VERSION,
        config: cfg.clone(),
        config_digest: cfg.digest()?,
        seed: cfg.sbm.seed,
        outputs: files
            .iter()
            .map(|(k, v)| (k.clone(), sha256_hex(v.as_bytes())))
            .collect(),
        warnings,
        stage_timings_ms: stages.timings,
    };
    let path = cfg.output_dir.join("manifest.json");
    std::fs::write(&path, to_json_text(&manifest)?).map_err(|e| Error::io(&path, e).at_stage("write"))?;

    Ok(RunBundle {
        network,
        projection,
        partition,
        clusters,
        stats,
        planted: ingested.planted,
        manifest,
    })
}
