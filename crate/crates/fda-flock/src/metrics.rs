//! Evaluation metrics: directional alignment, pairwise distance statistics,
//! centroid path length, and a connectivity diagnostic.
//!
//! Metrics always read true states. In perturbed runs only the controllers
//! see corrupted data; evaluation stays omniscient.

use serde::{Deserialize, Serialize};

use crate::interaction::NeighborSet;
use crate::state::AgentState;
use crate::vec::{cosine_similarity, VecM};

/// Per-timestep metrics row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSample {
    pub t: f64,
    /// Flock-averaged per-agent mean cosine similarity with neighbors.
    pub gamma: f64,
    pub d_min: f64,
    pub d_mean: f64,
    pub d_max: f64,
    pub centroid: VecM,
    /// Cumulative centroid path length up to this sample, accumulated at
    /// full step resolution regardless of the recording cadence.
    pub s_cum: f64,
    /// Connected components of the interaction graph; > 1 flags a
    /// fragmented flock.
    pub components: usize,
}

/// How agents with no neighbors enter the alignment average.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolatedAgents {
    /// Leave isolated agents out of the outer mean (default): isolation is
    /// not misalignment.
    Exclude,
    /// Count isolated agents as zero similarity.
    CountAsZero,
}

/// Directional alignment: for each agent with neighbors, the mean cosine
/// similarity between its velocity and each neighbor's; then the mean over
/// agents. Returns 0 when no agent has neighbors.
pub fn alignment_gamma(states: &[AgentState], neighbor_sets: &[NeighborSet]) -> f64 {
    alignment_gamma_with(states, neighbor_sets, IsolatedAgents::Exclude)
}

pub fn alignment_gamma_with(
    states: &[AgentState],
    neighbor_sets: &[NeighborSet],
    isolated: IsolatedAgents,
) -> f64 {
    let mut outer_sum = 0.0;
    let mut outer_count = 0usize;
    for (i, set) in neighbor_sets.iter().enumerate() {
        if set.is_empty() {
            if isolated == IsolatedAgents::CountAsZero {
                outer_count += 1;
            }
            continue;
        }
        let inner: f64 = set
            .members
            .iter()
            .map(|&j| cosine_similarity(&states[i].velocity, &states[j].velocity))
            .sum::<f64>()
            / set.len() as f64;
        outer_sum += inner;
        outer_count += 1;
    }
    if outer_count == 0 {
        0.0
    } else {
        outer_sum / outer_count as f64
    }
}

/// Minimum, mean, and maximum over all n(n-1)/2 unordered pairs, not only
/// neighbors.
pub fn distance_stats(positions: &[VecM]) -> (f64, f64, f64) {
    let n = positions.len();
    assert!(n >= 2, "distance stats need at least two agents");
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (&positions[j] - &positions[i]).norm();
            min = min.min(d);
            max = max.max(d);
            sum += d;
            pairs += 1;
        }
    }
    (min, sum / pairs as f64, max)
}

/// Mean of the positions.
pub fn centroid(positions: &[VecM]) -> VecM {
    let n = positions.len();
    assert!(n >= 1);
    let mut sum = VecM::zeros(positions[0].dim());
    for p in positions {
        sum += p;
    }
    sum.scale(1.0 / n as f64)
}

/// Arc length of a centroid series: sum of consecutive displacements.
pub fn centroid_path_length(series: &[VecM]) -> f64 {
    series.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum()
}

/// Number of connected components of the r-ball interaction graph.
pub fn interaction_components(positions: &[VecM], r: f64) -> usize {
    let n = positions.len();
    if n == 0 {
        return 0;
    }
    let mut visited = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        components += 1;
        visited[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !visited[j] && (&positions[j] - &positions[i]).norm() <= r {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn states_with_velocities(velocities: &[[f64; 3]]) -> Vec<AgentState> {
        velocities
            .iter()
            .map(|v| AgentState {
                position: VecM::zeros(3),
                velocity: VecM::from(*v),
                control: VecM::zeros(3),
            })
            .collect()
    }

    fn complete_sets(n: usize) -> Vec<NeighborSet> {
        (0..n)
            .map(|i| NeighborSet {
                owner: i,
                members: (0..n).filter(|&j| j != i).collect(),
            })
            .collect()
    }

    #[test]
    fn gamma_is_one_for_identical_velocities() {
        let states = states_with_velocities(&[[1.0, 2.0, 0.5]; 4]);
        assert_eq!(alignment_gamma(&states, &complete_sets(4)), 1.0);
    }

    #[test]
    fn gamma_is_minus_one_for_antiparallel_pair() {
        let states = states_with_velocities(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]);
        assert_eq!(alignment_gamma(&states, &complete_sets(2)), -1.0);
    }

    #[test]
    fn gamma_zero_for_orthogonal_triple() {
        // Brute force: every pair is orthogonal, so all cosines are 0.
        let states =
            states_with_velocities(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let gamma = alignment_gamma(&states, &complete_sets(3));
        assert!(gamma.abs() < 1e-15, "gamma {gamma}");
    }

    #[test]
    fn gamma_isolated_policy() {
        let states = states_with_velocities(&[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        // Agent 2 is isolated; 0 and 1 see each other.
        let sets = vec![
            NeighborSet { owner: 0, members: vec![1] },
            NeighborSet { owner: 1, members: vec![0] },
            NeighborSet { owner: 2, members: vec![] },
        ];
        assert_eq!(alignment_gamma_with(&states, &sets, IsolatedAgents::Exclude), 1.0);
        let zeroed = alignment_gamma_with(&states, &sets, IsolatedAgents::CountAsZero);
        assert!((zeroed - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_zero_when_everyone_is_isolated() {
        let states = states_with_velocities(&[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let sets = vec![
            NeighborSet { owner: 0, members: vec![] },
            NeighborSet { owner: 1, members: vec![] },
        ];
        assert_eq!(alignment_gamma(&states, &sets), 0.0);
    }

    #[test]
    fn distance_stats_two_agents() {
        let positions = vec![VecM::from([0.0, 0.0, 0.0]), VecM::from([3.0, 0.0, 0.0])];
        assert_eq!(distance_stats(&positions), (3.0, 3.0, 3.0));
    }

    #[test]
    fn distance_stats_collinear_triple() {
        // Pairs are {1, 1, 2}: min 1, mean 4/3, max 2.
        let positions = vec![
            VecM::from([0.0, 0.0, 0.0]),
            VecM::from([1.0, 0.0, 0.0]),
            VecM::from([2.0, 0.0, 0.0]),
        ];
        let (dmin, dmean, dmax) = distance_stats(&positions);
        assert_eq!(dmin, 1.0);
        assert!((dmean - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(dmax, 2.0);
    }

    #[test]
    fn distance_stats_coincident() {
        let positions = vec![VecM::zeros(3), VecM::zeros(3), VecM::zeros(3)];
        assert_eq!(distance_stats(&positions), (0.0, 0.0, 0.0));
    }

    #[test]
    fn path_length_constant_centroid() {
        let series = vec![VecM::from([1.0, 2.0, 3.0]); 10];
        assert_eq!(centroid_path_length(&series), 0.0);
    }

    #[test]
    fn path_length_straight_line() {
        // 2 m/s for 25 s sampled at 0.02 s: 1251 samples, 50 m of travel.
        let dt = 0.02;
        let series: Vec<VecM> = (0..=1250)
            .map(|k| VecM::from([2.0 * dt * k as f64, 0.0, 0.0]))
            .collect();
        assert!((centroid_path_length(&series) - 50.0).abs() < 1e-6);
    }

    #[test]
    fn path_length_single_sample() {
        assert_eq!(centroid_path_length(&[VecM::zeros(3)]), 0.0);
    }

    #[test]
    fn components_counts() {
        let tight = vec![
            VecM::from([0.0, 0.0, 0.0]),
            VecM::from([1.0, 0.0, 0.0]),
            VecM::from([0.0, 1.0, 0.0]),
        ];
        assert_eq!(interaction_components(&tight, 2.0), 1);

        let split = vec![
            VecM::from([0.0, 0.0, 0.0]),
            VecM::from([1.0, 0.0, 0.0]),
            VecM::from([100.0, 0.0, 0.0]),
            VecM::from([101.0, 0.0, 0.0]),
        ];
        assert_eq!(interaction_components(&split, 2.0), 2);
        assert_eq!(interaction_components(&split[..1], 2.0), 1);
    }

    /// Rotation about the z axis; enough to exercise invariance.
    fn rotate_z(v: &VecM, angle: f64) -> VecM {
        let (s, c) = angle.sin_cos();
        let comps = v.as_slice();
        VecM::from([
            c * comps[0] - s * comps[1],
            s * comps[0] + c * comps[1],
            comps[2],
        ])
    }

    proptest! {
        #[test]
        fn gamma_invariant_under_rotation_and_scaling(
            vels in prop::collection::vec(prop::array::uniform3(-3.0f64..3.0), 3..6),
            angle in 0.0f64..std::f64::consts::TAU,
            scales in prop::collection::vec(0.1f64..10.0, 6),
        ) {
            let states = states_with_velocities(&vels);
            let sets = complete_sets(states.len());
            let base = alignment_gamma(&states, &sets);

            let transformed: Vec<AgentState> = states
                .iter()
                .zip(&scales)
                .map(|(a, s)| AgentState {
                    position: a.position.clone(),
                    velocity: rotate_z(&a.velocity, angle).scale(*s),
                    control: a.control.clone(),
                })
                .collect();
            let rotated = alignment_gamma(&transformed, &sets);
            prop_assert!((base - rotated).abs() < 1e-9, "{base} vs {rotated}");
        }

        #[test]
        fn distance_stats_invariant_under_rigid_motion(
            pts in prop::collection::vec(prop::array::uniform3(-10.0f64..10.0), 2..8),
            angle in 0.0f64..std::f64::consts::TAU,
            shift in prop::array::uniform3(-50.0f64..50.0),
        ) {
            let positions: Vec<VecM> = pts.iter().map(|p| VecM::from(*p)).collect();
            let (a1, b1, c1) = distance_stats(&positions);
            let offset = VecM::from(shift);
            let moved: Vec<VecM> = positions
                .iter()
                .map(|p| &rotate_z(p, angle) + &offset)
                .collect();
            let (a2, b2, c2) = distance_stats(&moved);
            prop_assert!((a1 - a2).abs() < 1e-9);
            prop_assert!((b1 - b2).abs() < 1e-9);
            prop_assert!((c1 - c2).abs() < 1e-9);
        }

        #[test]
        fn subsampled_path_is_never_longer(
            pts in prop::collection::vec(prop::array::uniform3(-5.0f64..5.0), 4..40),
            stride in 2usize..5,
        ) {
            let series: Vec<VecM> = pts.iter().map(|p| VecM::from(*p)).collect();
            let mut sub: Vec<VecM> = series.iter().step_by(stride).cloned().collect();
            if sub.last() != series.last() {
                sub.push(series.last().unwrap().clone());
            }
            prop_assert!(
                centroid_path_length(&sub) <= centroid_path_length(&series) + 1e-9
            );
        }
    }
}
