//! Export a network and its projection to JSON and GraphML and read them
//! back.
//!
//! Run with `cargo run --example graph_round_trip`.

use engagenet::graphio::{export_to_string, import_from_str, Graph, GraphFormat};
use engagenet::hetnet::build_tripartite;
use engagenet::synth::{generate_dataset, SynthConfig};

fn main() -> engagenet::Result<()> {
    let data = generate_dataset(&SynthConfig::planted(6, 5, 0.2, 1))?;
    let net = build_tripartite(&data.dataset.triads());
    let graphs = [
        Graph::Tripartite(net.clone()),
        Graph::Bipartite(net.project_student_pair()),
    ];
    for graph in &graphs {
        for format in [GraphFormat::Json, GraphFormat::Graphml] {
            let text = export_to_string(graph, format)?;
            let back = import_from_str(&text)?;
            let kind = match graph {
                Graph::Tripartite(_) => "tripartite",
                Graph::Bipartite(_) => "projection",
            };
            println!(
                "{kind:<10} {format:<7} {:>6} bytes, identical after import: {}",
                text.len(),
                back == *graph
            );
        }
    }
    let xml = export_to_string(&graphs[0], GraphFormat::Graphml)?;
    println!("\n{}", xml.lines().take(16).collect::<Vec<_>>().join("\n"));

    match import_from_str(&xml[..xml.len() / 2]) {
        Err(e) => println!("\ntruncated file: {e}"),
        Ok(_) => unreachable!("half a document cannot parse"),
    }
    Ok(())
}
