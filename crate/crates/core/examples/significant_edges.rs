//! Keep the location x behaviour edges of each cluster that beat the
//! degree-preserving binomial null model.
//!
//! Run with `cargo run --release --example significant_edges`.

use engagenet::hetnet::build_tripartite;
use engagenet::pipeline::cluster_significance;
use engagenet::sbm::{infer_partition, SbmConfig};
use engagenet::sigfilter::{binomial_sf, significance_threshold, write_significant_edges, FilterConfig};
use engagenet::synth::{generate_dataset, SynthConfig};

fn main() -> engagenet::Result<()> {
    let p = 1.0 / 11.0;
    for k in [10, 50, 110, 400] {
        let t = significance_threshold(k, p, 0.05)?;
        println!(
            "k = {k:>3}: threshold {t:>2}, P(X >= t) = {:.4}",
            binomial_sf(k, p, t as i64)?
        );
    }

    let data = generate_dataset(&SynthConfig::study_scale(2))?;
    let net = build_tripartite(&data.dataset.triads());
    let partition = infer_partition(&net.project_student_pair(), &SbmConfig::with_seed(2))?;
    let clusters = cluster_significance(&net, &partition, &FilterConfig::default(), 11)?;
    let stdout = std::io::stdout();
    for (graph, result) in &clusters {
        println!(
            "\ncluster {}: {} of {} edges retained",
            result.cluster_id.expect("set"),
            result.retained.len(),
            graph.edge_count()
        );
        write_significant_edges(stdout.lock(), result).expect("stdout");
    }
    Ok(())
}
