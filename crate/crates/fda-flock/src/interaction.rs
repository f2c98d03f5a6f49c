//! Metric neighborhoods and the pairwise interaction weights.
//!
//! The cohesion-separation weight `psi(d) = 1 - delta*k/d` is repulsive
//! below the equilibrium spacing `delta*k`, zero at it, and attractive
//! above, saturating at 1 for distant neighbors. The alignment weight is
//! `1/k`. Both are defined only on nonempty neighborhoods; callers emit a
//! zero control for isolated agents instead.

use crate::error::{Error, Result};
use crate::vec::VecM;

/// Floor under pairwise distances fed to `psi`. At or below it the
/// simulation reports a degeneracy instead of silently clamping: the model
/// treats collision avoidance as built in, so a near-coincident pair means
/// the physics has already been violated.
pub const DIST_FLOOR: f64 = 1e-6;

/// Indices of the agents within interaction radius of one owner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSet {
    pub owner: usize,
    pub members: Vec<usize>,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All `j != i` with `||p_j - p_i|| <= r` (closed ball).
///
/// Rebuilt from scratch every step: an O(n^2) scan is plenty at the scale
/// this simulator targets.
pub fn neighbors(positions: &[VecM], i: usize, r: f64) -> NeighborSet {
    let members = positions
        .iter()
        .enumerate()
        .filter(|(j, p)| *j != i && (*p - &positions[i]).norm() <= r)
        .map(|(j, _)| j)
        .collect();
    NeighborSet { owner: i, members }
}

/// Cohesion-separation weight `1 - delta*k/d` for a neighbor at distance
/// `d` in a neighborhood of size `k`.
pub fn psi(d: f64, delta: f64, k: usize) -> Result<f64> {
    if d <= DIST_FLOOR {
        return Err(Error::DistanceBelowFloor {
            distance: d,
            floor: DIST_FLOOR,
        });
    }
    Ok(1.0 - delta * k as f64 / d)
}

/// Alignment weight `1/k`; undefined for an empty neighborhood.
pub fn phi(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::EmptyNeighborhood);
    }
    Ok(1.0 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pos(coords: [f64; 3]) -> VecM {
        VecM::from(coords)
    }

    #[test]
    fn neighbor_within_radius() {
        let positions = vec![pos([0.0, 0.0, 0.0]), pos([1.0, 0.0, 0.0])];
        assert_eq!(neighbors(&positions, 0, 7.5).members, vec![1]);
    }

    #[test]
    fn neighbor_outside_radius() {
        let positions = vec![pos([0.0, 0.0, 0.0]), pos([8.0, 0.0, 0.0])];
        assert!(neighbors(&positions, 0, 7.5).is_empty());
    }

    #[test]
    fn boundary_is_included() {
        let positions = vec![pos([0.0, 0.0, 0.0]), pos([7.5, 0.0, 0.0])];
        assert_eq!(neighbors(&positions, 0, 7.5).members, vec![1]);
    }

    #[test]
    fn psi_zero_at_equilibrium_spacing() {
        assert_eq!(psi(3.0, 1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn psi_attractive_beyond_equilibrium() {
        assert_eq!(psi(2.0, 1.0, 1).unwrap(), 0.5);
    }

    #[test]
    fn psi_repulsive_below_equilibrium() {
        assert_eq!(psi(1.0, 1.0, 2).unwrap(), -1.0);
    }

    #[test]
    fn psi_rejects_near_coincident_pair() {
        let err = psi(1e-7, 1.0, 1).unwrap_err();
        assert!(matches!(err, Error::DistanceBelowFloor { .. }));
    }

    #[test]
    fn phi_values_and_empty_error() {
        assert_eq!(phi(1).unwrap(), 1.0);
        assert_eq!(phi(4).unwrap(), 0.25);
        assert!(matches!(phi(0), Err(Error::EmptyNeighborhood)));
    }

    proptest! {
        #[test]
        fn neighborhood_is_symmetric(
            coords in prop::collection::vec(prop::array::uniform3(-20.0f64..20.0), 2..10),
            r in 0.5f64..30.0,
        ) {
            let positions: Vec<VecM> = coords.into_iter().map(VecM::from).collect();
            let sets: Vec<NeighborSet> =
                (0..positions.len()).map(|i| neighbors(&positions, i, r)).collect();
            for (i, set) in sets.iter().enumerate() {
                for &j in &set.members {
                    prop_assert!(sets[j].members.contains(&i));
                }
            }
        }

        #[test]
        fn psi_sign_matches_distance_vs_equilibrium(
            d in 1e-3f64..100.0,
            delta in 0.0f64..5.0,
            k in 1usize..8,
        ) {
            let w = psi(d, delta, k).unwrap();
            let gap = d - delta * k as f64;
            if gap.abs() > 1e-12 {
                prop_assert_eq!(w.signum(), gap.signum());
            }
        }

        #[test]
        fn psi_saturates_at_unit_weight(delta in 0.1f64..5.0, k in 1usize..8) {
            let far = 1e9;
            let w = psi(far, delta, k).unwrap();
            prop_assert!(w > 0.0 && w <= 1.0);
            prop_assert!((w - 1.0).abs() < 1e-6);
        }
    }
}
