//! The smooth saturation map, neighbor velocity prediction, and the two
//! control laws.
//!
//! Both laws share the cohesion-separation term; they differ only in the
//! alignment term. The reactive law matches neighbors' current velocities.
//! The future direction-aware (FDA) law blends that with a short-horizon
//! prediction of each neighbor's velocity, weighted by `theta`:
//!
//! ```text
//! u_i = sum_j psi(||p_j - p_i||)(p_j - p_i)
//!     + (1 - theta) * phi * sum_j (v_j - v_i)
//!     + theta * phi * sum_j (v_j_pred - v_i)
//! ```
//!
//! with `v_j_pred = sat(v_j + t_ph * u_j, v_max)`. Neighbor states enter
//! through [`PerceivedNeighbor`] views, so the same code path handles exact,
//! delayed, and noise-corrupted perception. The observer's own position and
//! velocity are always its true current state.

use crate::error::{Error, Result};
use crate::interaction::{self, DIST_FLOOR};
use crate::perception::PerceivedNeighbor;
use crate::state::{AgentState, FlockParams, Model};
use crate::vec::VecM;

/// A control command before and after magnitude limiting.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlCommand {
    /// The unsaturated sum of interaction terms (m/s^2).
    pub raw: VecM,
    /// The applied control: `saturate(raw, u_max)`.
    pub applied: VecM,
}

impl ControlCommand {
    pub fn from_raw(raw: VecM, u_max: f64) -> Self {
        let applied = saturate(&raw, u_max);
        ControlCommand { raw, applied }
    }

    pub fn zero(m: usize) -> Self {
        ControlCommand {
            raw: VecM::zeros(m),
            applied: VecM::zeros(m),
        }
    }
}

/// Direction-preserving smooth magnitude limiter:
/// `x_max * tanh(||x|| / x_max) * x / ||x||`, with 0 mapping to 0.
///
/// The output norm is strictly below `x_max` for every finite input.
pub fn saturate(cmd: &VecM, x_max: f64) -> VecM {
    debug_assert!(x_max > 0.0);
    let n = cmd.norm();
    if n == 0.0 {
        return VecM::zeros(cmd.dim());
    }
    let scale = x_max * (n / x_max).tanh() / n;
    let mut out = cmd.scale(scale);
    // tanh rounds to exactly 1.0 for arguments beyond ~19, where rescale
    // rounding can land the recomputed norm at or a hair above the bound;
    // nudge back inside so the strict bound holds for all inputs.
    let mut tries = 0;
    while out.norm() >= x_max && tries < 8 {
        out = out.scale(1.0 - 2.0 * f64::EPSILON);
        tries += 1;
    }
    out
}

/// Extrapolate a neighbor's velocity one prediction horizon ahead and
/// saturate the result to the speed bound: `sat(v + t_ph * u, v_max)`.
pub fn predict_velocity(v: &VecM, u: &VecM, t_ph: f64, v_max: f64) -> VecM {
    saturate(&(v + &(u * t_ph)), v_max)
}

/// Reactive control law: cohesion-separation plus velocity-consensus
/// alignment on the neighbors' (perceived) current velocities.
pub fn reactive_control(
    i: usize,
    states: &[AgentState],
    views: &[PerceivedNeighbor],
    params: &FlockParams,
) -> Result<ControlCommand> {
    if views.is_empty() {
        return Ok(ControlCommand::zero(params.m));
    }
    let me = &states[i];
    let phi = interaction::phi(views.len())?;
    let mut raw = cohesion_separation(i, me, views, params.delta)?;
    raw += &(&alignment_sum(views, &me.velocity) * phi);
    Ok(ControlCommand::from_raw(raw, params.u_max))
}

/// Future direction-aware control law. At `theta = 0` the predictive term
/// vanishes and the command equals the reactive one on the same inputs.
pub fn fda_control(
    i: usize,
    states: &[AgentState],
    views: &[PerceivedNeighbor],
    params: &FlockParams,
) -> Result<ControlCommand> {
    if views.is_empty() {
        return Ok(ControlCommand::zero(params.m));
    }
    let me = &states[i];
    let phi = interaction::phi(views.len())?;
    let mut raw = cohesion_separation(i, me, views, params.delta)?;
    raw += &(&alignment_sum(views, &me.velocity) * ((1.0 - params.theta) * phi));
    if params.theta > 0.0 {
        let pred = predictive_alignment_sum(views, &me.velocity, params.t_ph, params.v_max);
        raw += &(&pred * (params.theta * phi));
    }
    Ok(ControlCommand::from_raw(raw, params.u_max))
}

/// Dispatch on the configured model.
pub fn control(
    model: Model,
    i: usize,
    states: &[AgentState],
    views: &[PerceivedNeighbor],
    params: &FlockParams,
) -> Result<ControlCommand> {
    match model {
        Model::Reactive => reactive_control(i, states, views, params),
        Model::Fda => fda_control(i, states, views, params),
    }
}

/// `sum_j psi(||p~_j - p_i||)(p~_j - p_i)` over the perceived neighbor
/// positions, with the observer's true position. The neighborhood size
/// entering psi is the view count (neighborhoods are decided on true
/// positions before perception).
fn cohesion_separation(
    observer: usize,
    me: &AgentState,
    views: &[PerceivedNeighbor],
    delta: f64,
) -> Result<VecM> {
    let k = views.len();
    let mut sum = VecM::zeros(me.position.dim());
    for view in views {
        let offset = &view.p - &me.position;
        let d = offset.norm();
        let w = interaction::psi(d, delta, k).map_err(|_| Error::AgentsTooClose {
            observer,
            neighbor: view.index,
            distance: d,
            floor: DIST_FLOOR,
        })?;
        sum += &(&offset * w);
    }
    Ok(sum)
}

/// `sum_j (v~_j - v_i)` with the observer's true velocity.
fn alignment_sum(views: &[PerceivedNeighbor], v_self: &VecM) -> VecM {
    let mut sum = VecM::zeros(v_self.dim());
    for view in views {
        sum += &(&view.v - v_self);
    }
    sum
}

/// `sum_j (v~_j_pred - v_i)` with predictions from the perceived velocity
/// and control of each neighbor.
fn predictive_alignment_sum(
    views: &[PerceivedNeighbor],
    v_self: &VecM,
    t_ph: f64,
    v_max: f64,
) -> VecM {
    let mut sum = VecM::zeros(v_self.dim());
    for view in views {
        sum += &(&predict_velocity(&view.v, &view.u, t_ph, v_max) - v_self);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reference tanh built from exp, independent of `f64::tanh`.
    fn tanh_ref(x: f64) -> f64 {
        let e = (2.0 * x).exp();
        (e - 1.0) / (e + 1.0)
    }

    fn view(index: usize, p: [f64; 3], v: [f64; 3], u: [f64; 3]) -> PerceivedNeighbor {
        PerceivedNeighbor {
            index,
            p: VecM::from(p),
            v: VecM::from(v),
            u: VecM::from(u),
        }
    }

    fn agent(p: [f64; 3], v: [f64; 3]) -> AgentState {
        AgentState {
            position: VecM::from(p),
            velocity: VecM::from(v),
            control: VecM::zeros(3),
        }
    }

    #[test]
    fn saturate_zero_maps_to_zero() {
        let out = saturate(&VecM::from([0.0, 0.0, 0.0]), 4.0);
        assert_eq!(out, VecM::from([0.0, 0.0, 0.0]));
    }

    #[test]
    fn saturate_large_input_approaches_bound() {
        let out = saturate(&VecM::from([1000.0, 0.0, 0.0]), 4.0);
        assert!((out.norm() - 4.0).abs() < 1e-9, "norm {}", out.norm());
        assert!(out.norm() < 4.0);
        assert!(out.as_slice()[1] == 0.0 && out.as_slice()[2] == 0.0);
    }

    #[test]
    fn saturate_at_bound_magnitude_matches_tanh_of_one() {
        let out = saturate(&VecM::from([4.0, 0.0, 0.0]), 4.0);
        let expected = 4.0 * tanh_ref(1.0);
        assert!((out.norm() - expected).abs() < 1e-12, "norm {}", out.norm());
    }

    #[test]
    fn predict_coasting_neighbor() {
        let out = predict_velocity(
            &VecM::from([1.0, 0.0, 0.0]),
            &VecM::from([0.0, 0.0, 0.0]),
            1.0,
            4.0,
        );
        let expected = 4.0 * tanh_ref(0.25);
        assert!((out.norm() - expected).abs() < 1e-12);
        assert!(out.as_slice()[1] == 0.0 && out.as_slice()[2] == 0.0);
    }

    #[test]
    fn predict_zero_inputs() {
        let zero = VecM::zeros(3);
        assert_eq!(predict_velocity(&zero, &zero, 1.0, 4.0), VecM::zeros(3));
    }

    #[test]
    fn predict_matches_saturated_extrapolation() {
        let out = predict_velocity(
            &VecM::from([1.0, 0.0, 0.0]),
            &VecM::from([0.0, 2.0, 0.0]),
            1.0,
            4.0,
        );
        assert_eq!(out, saturate(&VecM::from([1.0, 2.0, 0.0]), 4.0));
    }

    #[test]
    fn reactive_zero_at_equilibrium_with_matched_velocities() {
        let params = FlockParams {
            delta: 1.0,
            ..FlockParams::default()
        };
        let states = vec![agent([0.0; 3], [1.0, 0.0, 0.0]), agent([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])];
        let views = vec![view(1, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3])];
        let cmd = reactive_control(0, &states, &views, &params).unwrap();
        assert_eq!(cmd.raw, VecM::zeros(3));
        assert_eq!(cmd.applied, VecM::zeros(3));
    }

    #[test]
    fn reactive_isolated_agent_commands_nothing() {
        let params = FlockParams::default();
        let states = vec![agent([0.0; 3], [1.0, 0.0, 0.0])];
        let cmd = reactive_control(0, &states, &[], &params).unwrap();
        assert_eq!(cmd.applied, VecM::zeros(3));
    }

    #[test]
    fn reactive_pure_attraction_case() {
        // Two agents 2 m apart, delta = 1, equal velocities:
        // raw = psi(2,1,1) * (2,0,0) = 0.5 * (2,0,0) = (1,0,0).
        let params = FlockParams {
            delta: 1.0,
            ..FlockParams::default()
        };
        let states = vec![agent([0.0; 3], [0.5, 0.0, 0.0]), agent([2.0, 0.0, 0.0], [0.5, 0.0, 0.0])];
        let views = vec![view(1, [2.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0; 3])];
        let cmd = reactive_control(0, &states, &views, &params).unwrap();
        assert_eq!(cmd.raw, VecM::from([1.0, 0.0, 0.0]));
    }

    #[test]
    fn fda_at_theta_zero_is_bitwise_reactive() {
        let params = FlockParams {
            theta: 0.0,
            ..FlockParams::default()
        };
        let states = vec![agent([0.0; 3], [0.3, -0.2, 1.1]), agent([1.7, 0.4, -0.9], [0.8, 0.1, 0.0])];
        let views = vec![view(1, [1.7, 0.4, -0.9], [0.8, 0.1, 0.0], [0.5, -2.0, 1.0])];
        let fda = fda_control(0, &states, &views, &params).unwrap();
        let reactive = reactive_control(0, &states, &views, &params).unwrap();
        assert_eq!(fda, reactive);
    }

    #[test]
    fn fda_predictive_alignment_hand_case() {
        // Equilibrium spacing (cohesion term zero), equal current velocities
        // (reactive alignment zero): the command is purely the predictive
        // term 0.8 * (sat((1,1,0), 4) - (1,0,0)).
        let params = FlockParams {
            theta: 0.8,
            t_ph: 1.0,
            delta: 1.0,
            ..FlockParams::default()
        };
        let v = [1.0, 0.0, 0.0];
        let states = vec![agent([0.0; 3], v), agent([1.0, 0.0, 0.0], v)];
        let views = vec![view(1, [1.0, 0.0, 0.0], v, [0.0, 1.0, 0.0])];
        let cmd = fda_control(0, &states, &views, &params).unwrap();

        let sqrt2 = 2.0f64.sqrt();
        let mag = 4.0 * tanh_ref(sqrt2 / 4.0);
        let pred = [mag / sqrt2, mag / sqrt2, 0.0];
        let expected = [0.8 * (pred[0] - 1.0), 0.8 * pred[1], 0.0];
        for (got, want) in cmd.raw.as_slice().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn fda_theta_one_zero_control_neighbors() {
        // theta = 1 with coasting neighbors: alignment becomes
        // phi * sum(sat(v_j, v_max) - v_i).
        let params = FlockParams {
            theta: 1.0,
            delta: 1.0,
            ..FlockParams::default()
        };
        let states = vec![agent([0.0; 3], [0.0; 3]), agent([1.0, 0.0, 0.0], [2.0, 0.0, 0.0])];
        let views = vec![view(1, [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0; 3])];
        let cmd = fda_control(0, &states, &views, &params).unwrap();
        let expected = saturate(&VecM::from([2.0, 0.0, 0.0]), 4.0);
        assert_eq!(cmd.raw, expected);
    }

    #[test]
    fn zero_horizon_does_not_reduce_to_reactive() {
        // Prediction re-saturates the neighbor velocity, so t_ph = 0 still
        // differs from the reactive law whenever the neighbor is moving.
        let params = FlockParams {
            theta: 1.0,
            t_ph: 0.0,
            ..FlockParams::default()
        };
        let states = vec![agent([0.0; 3], [0.0; 3]), agent([2.0, 0.0, 0.0], [2.0, 0.0, 0.0])];
        let views = vec![view(1, [2.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0; 3])];
        let fda = fda_control(0, &states, &views, &params).unwrap();
        let reactive = reactive_control(0, &states, &views, &params).unwrap();
        assert_ne!(fda.raw, reactive.raw);
    }

    #[test]
    fn near_coincident_view_is_reported_with_pair() {
        let params = FlockParams::default();
        let states = vec![agent([0.0; 3], [0.0; 3]), agent([1e-9, 0.0, 0.0], [0.0; 3])];
        let views = vec![view(1, [1e-9, 0.0, 0.0], [0.0; 3], [0.0; 3])];
        let err = reactive_control(0, &states, &views, &params).unwrap_err();
        match err {
            Error::AgentsTooClose {
                observer, neighbor, ..
            } => {
                assert_eq!((observer, neighbor), (0, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn direction_cosine(a: &VecM, b: &VecM) -> f64 {
        a.dot(b) / (a.norm() * b.norm())
    }

    proptest! {
        #[test]
        fn saturation_bound_and_direction(
            raw in prop::array::uniform3(-1e6f64..1e6),
            x_max in 0.1f64..100.0,
        ) {
            let cmd = VecM::from(raw);
            let out = saturate(&cmd, x_max);
            prop_assert!(out.norm() < x_max);
            if cmd.norm() > 1e-9 {
                prop_assert!(direction_cosine(&cmd, &out) > 1.0 - 1e-9);
            }
        }

        #[test]
        fn saturation_monotone_in_active_range(
            dir in prop::array::uniform3(-1.0f64..1.0),
            lo in 1e-3f64..4.0,
            ratio in 1.001f64..10.0,
            x_max in 0.5f64..50.0,
        ) {
            // Strict monotonicity is checked where the tanh response still
            // resolves in f64 (inputs up to ~5 * x_max); far beyond that the
            // curve is flat at the bound by construction.
            let d = VecM::from(dir);
            prop_assume!(d.norm() > 1e-3);
            let unit = d.scale(1.0 / d.norm());
            let n1 = lo * x_max;
            let n2 = (lo * ratio).min(5.0) * x_max;
            prop_assume!(n2 > n1 * 1.0005);
            let m1 = saturate(&unit.scale(n1), x_max).norm();
            let m2 = saturate(&unit.scale(n2), x_max).norm();
            prop_assert!(m2 > m1, "m1={m1} m2={m2}");
        }

        #[test]
        fn fda_raw_is_affine_in_theta(
            p in prop::array::uniform3(0.5f64..3.0),
            v_self in prop::array::uniform3(-2.0f64..2.0),
            v1 in prop::array::uniform3(-2.0f64..2.0),
            v2 in prop::array::uniform3(-2.0f64..2.0),
            u1 in prop::array::uniform3(-4.0f64..4.0),
            u2 in prop::array::uniform3(-4.0f64..4.0),
            theta in 0.0f64..1.0,
        ) {
            let states = vec![agent([0.0; 3], v_self), agent(p, v1), agent([-1.3, 2.0, 0.4], v2)];
            let views = vec![
                view(1, p, v1, u1),
                view(2, [-1.3, 2.0, 0.4], v2, u2),
            ];
            let raw_at = |th: f64| {
                let params = FlockParams { theta: th, ..FlockParams::default() };
                fda_control(0, &states, &views, &params).unwrap().raw
            };
            let r0 = raw_at(0.0);
            let r1 = raw_at(1.0);
            let rt = raw_at(theta);
            let blend = &r0.scale(1.0 - theta) + &r1.scale(theta);
            for (a, b) in rt.as_slice().iter().zip(blend.as_slice()) {
                prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }
}
