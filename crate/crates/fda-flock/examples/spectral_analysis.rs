//! Spectrum of the reduced consensus operator
//! `M = -phi (I + theta*phi*t_ph A)^-1 L` on small graphs: the zero mode is
//! the consensus direction, every other eigenvalue's real part is an
//! alignment decay rate, and the prediction coupling reshapes those rates.
//!
//! ```bash
//! cargo run --release --example spectral_analysis
//! ```

use fda_flock::analysis::{analyze_graph, graph_from_edges, GraphMatrices, PhiWeights};

fn complete(n: usize) -> GraphMatrices {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    graph_from_edges(n, &edges)
}

fn ring(n: usize) -> GraphMatrices {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph_from_edges(n, &edges)
}

fn main() {
    let cases: [(&str, GraphMatrices, f64); 3] = [
        ("pair", graph_from_edges(2, &[(0, 1)]), 1.0),
        ("ring of 6", ring(6), 0.5),
        ("complete on 5", complete(5), 0.25),
    ];

    for (name, graph, phi) in &cases {
        println!("{name}: n = {}, phi = {phi}", graph.n());
        println!("  theta   zero modes   slowest decay   stable");
        for theta in [0.0, 0.4, 0.8] {
            let report = analyze_graph(graph, theta, PhiWeights::Scalar(*phi), 1.0)
                .expect("well-conditioned small case");
            println!(
                "  {theta:<7} {:>10} {:>15.4} {:>8}",
                report.zero_modes,
                report.slowest_decay.unwrap_or(f64::NAN),
                report.stable
            );
        }
        println!();
    }

    println!("pushing the coupling up on the pair until the preconditioner fails:");
    let pair = graph_from_edges(2, &[(0, 1)]);
    for coupling in [0.5, 0.9, 0.99, 1.0] {
        match analyze_graph(&pair, 1.0, PhiWeights::Scalar(coupling), 1.0) {
            Ok(report) => println!(
                "  coupling {coupling}: slowest decay {:.3}, margin {:.3}",
                report.slowest_decay.unwrap_or(f64::NAN),
                report.margin
            ),
            Err(err) => println!("  coupling {coupling}: {err}"),
        }
    }
}
