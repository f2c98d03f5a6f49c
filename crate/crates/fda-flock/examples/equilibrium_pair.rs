//! Two agents released at rest, 1.5 m apart: the cohesion-separation weight
//! `psi(d) = 1 - delta*k/d` is zero at spacing `delta*k = 1`, attractive
//! beyond it, repulsive inside it, so the pair settles to exactly 1 m.
//!
//! ```bash
//! cargo run --release --example equilibrium_pair
//! ```

use fda_flock::sim::{self, ScenarioConfig};
use fda_flock::state::{AgentState, FlockState, Model};
use fda_flock::vec::VecM;

fn main() {
    let mut config = ScenarioConfig::default();
    config.params.n = 2;
    config.params.model = Model::Reactive;
    config.params.delta = 1.0;

    let initial = FlockState {
        step: 0,
        time: 0.0,
        agents: vec![
            AgentState::at_rest(VecM::from([0.0, 0.0, 0.0])),
            AgentState::at_rest(VecM::from([1.5, 0.0, 0.0])),
        ],
    };
    let record = sim::run_from(initial, &config).expect("pair scenario runs");

    println!("equilibrium spacing: delta * |N_i| = {} m\n", config.params.delta);
    println!("    t    spacing    overshoot");
    for row in record.metrics.iter().step_by(50) {
        println!("{:>6.2}  {:>8.5}  {:>+9.5}", row.t, row.d_min, row.d_min - 1.0);
    }

    let last = record.metrics.last().unwrap();
    println!("\nspacing after {} s: {:.6} m", last.t, last.d_min);
}
