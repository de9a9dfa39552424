//! Full pipeline on a planted synthetic dataset, writing a bundle.
//!
//! Run with `cargo run --release --example run_pipeline [output-dir]`.

use std::path::PathBuf;

use engagenet::pipeline::{run_pipeline, PipelineConfig};
use engagenet::synth::{adjusted_rand_index, SynthConfig};

fn main() -> engagenet::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("engagenet-run"), PathBuf::from);
    let cfg = PipelineConfig::synthetic(SynthConfig::planted(60, 40, 0.0, 5), &out);
    let bundle = run_pipeline(&cfg)?;

    let planted = bundle.planted.as_ref().expect("synthetic input");
    println!(
        "{} clusters, ARI {:.3}, config digest {}",
        bundle.partition.left_blocks().len(),
        adjusted_rand_index(&bundle.partition.assignment.left, &planted.labels)?,
        &bundle.manifest.config_digest[..12]
    );
    for (_, r) in &bundle.clusters {
        println!(
            "cluster {}: {} significant edges",
            r.cluster_id.expect("set"),
            r.retained.len()
        );
    }
    if let Some(m) = &bundle.stats.mwu {
        println!("satisfaction: U = {}, p = {:.4}", m.u, m.p_value);
    }
    if let Some(f) = &bundle.stats.fisher {
        println!(
            "performance: one-tailed p = {:.4}, OR = {:.2}",
            f.p_one_tailed, f.odds_ratio
        );
    }
    for note in &bundle.stats.notes {
        println!("note: {note}");
    }
    println!("files:");
    for name in bundle.manifest.outputs.keys() {
        println!("  {}", out.join(name).display());
    }
    Ok(())
}
