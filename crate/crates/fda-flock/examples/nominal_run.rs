//! Run the baseline scenario with the FDA controller under exact perception
//! and watch alignment, spacing, and centroid travel evolve.
//!
//! ```bash
//! cargo run --release --example nominal_run
//! ```

use fda_flock::sim::{self, ScenarioConfig};

fn main() {
    let config = ScenarioConfig {
        seed: 42,
        ..ScenarioConfig::default()
    };
    let record = sim::run(&config).expect("baseline scenario runs");

    println!(
        "{} agents, {} steps of {} s, model {}",
        config.params.n,
        config.params.total_steps(),
        config.params.dt,
        config.params.model
    );
    println!();
    println!("    t      gamma     d_min   d_mean    d_max    S_cum  parts");
    for row in record.metrics.iter().step_by(125) {
        println!(
            "{:>6.2}  {:>8.4}  {:>7.3}  {:>7.3}  {:>7.3}  {:>7.2}  {:>5}",
            row.t, row.gamma, row.d_min, row.d_mean, row.d_max, row.s_cum, row.components
        );
    }

    let summary = &record.summary;
    println!();
    println!("final gamma        {:.4}", summary.final_gamma);
    match summary.time_to_gamma_0_9 {
        Some(t) => println!("gamma >= 0.9 at    {t:.2} s"),
        None => println!("gamma >= 0.9       never"),
    }
    println!("centroid travel    {:.2} m", summary.s_total);
    println!("closest approach   {:.3} m", summary.min_distance);
}
