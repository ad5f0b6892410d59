use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::model::{velocity_divergence, Group, PlasmaState};
use crate::spectral::{norm_of_components, NormKind, ZeroModeRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NegativeSpace {
    NegSobolev,
    NegBesov,
}

impl NegativeSpace {
    pub fn kind(self, s: f64) -> NormKind {
        match self {
            NegativeSpace::NegSobolev => NormKind::NegSobolev(s),
            NegativeSpace::NegBesov => NormKind::NegBesov(s),
        }
    }

    /// Admissible orders: `0 < s < 3/2` for `H^-s`, `0 < s <= 3/2` for `B^-s_{2,inf}`.
    pub fn admits(self, s: f64) -> bool {
        match self {
            NegativeSpace::NegSobolev => s > 0.0 && s < 1.5,
            NegativeSpace::NegBesov => s > 0.0 && s <= 1.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTrack {
    pub time: f64,
    pub s: f64,
    pub space: NegativeSpace,
    /// `||u|| + ||theta|| + ||E|| + ||B||` in the chosen space.
    pub value: f64,
}

const TRACKED: [Group; 4] = [Group::Velocity, Group::Temperature, Group::Electric, Group::Magnetic];

/// Negative-order norm of `(u, theta, E, B)`; every component must be mean-zero.
pub fn track_negative_norms(state: &PlasmaState, s: f64, space: NegativeSpace) -> Result<NormTrack, DiagnosticsError> {
    track_negative_norms_with(state, s, space, ZeroModeRule::RequireZero)
}

/// As [`track_negative_norms`], with an explicit zero-mode rule. Trajectory
/// sampling uses [`ZeroModeRule::Annihilate`], since the mean of `u`,
/// `theta` and `E` is not conserved by the quadratic terms on the torus.
pub fn track_negative_norms_with(
    state: &PlasmaState,
    s: f64,
    space: NegativeSpace,
    rule: ZeroModeRule,
) -> Result<NormTrack, DiagnosticsError> {
    if !space.admits(s) {
        return Err(DiagnosticsError::Parameter(format!(
            "order s = {s} outside the admissible range for {space:?}"
        )));
    }
    let value = state.group_norm_sum(&TRACKED, space.kind(s), rule)?;
    Ok(NormTrack {
        time: state.time,
        s,
        space,
        value,
    })
}

/// Field combinations whose `L2` decay is predicted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecayTarget {
    /// `(n, u, theta, E, B)`
    Full,
    /// `(n, u, theta, E)`
    NoMagnetic,
    /// `n`
    Density,
    /// `(n, theta, div u)`
    Bootstrap,
}

impl DecayTarget {
    pub fn label(self) -> &'static str {
        match self {
            DecayTarget::Full => "nuthetaEB",
            DecayTarget::NoMagnetic => "nuthetaE",
            DecayTarget::Density => "n",
            DecayTarget::Bootstrap => "nthetapsi",
        }
    }
}

/// `||grad^k (...)||_{L2}` of a decay target, as the sum of the group norms.
pub fn decay_target_norm(state: &PlasmaState, target: DecayTarget, k: u32) -> f64 {
    let kind = NormKind::Sobolev(k as f64);
    let groups: &[Group] = match target {
        DecayTarget::Full => &Group::ALL,
        DecayTarget::NoMagnetic => &[Group::Density, Group::Velocity, Group::Temperature, Group::Electric],
        DecayTarget::Density => &[Group::Density],
        DecayTarget::Bootstrap => &[Group::Density, Group::Temperature],
    };
    let mut total = state
        .group_norm_sum(groups, kind, ZeroModeRule::Annihilate)
        .expect("positive-order norms do not fail");
    if target == DecayTarget::Bootstrap {
        let psi = velocity_divergence(state);
        total += norm_of_components(&[&psi], kind, ZeroModeRule::Annihilate).expect("positive order");
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_symbol, ring_weight, Grid, MultiplierSymbol, RealField};
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_tracks_zero() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let t = track_negative_norms(&PlasmaState::equilibrium(&g), 0.5, NegativeSpace::NegSobolev).unwrap();
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn single_mode_velocity() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.u[0] = RealField::from_fn(&g, |x| (2.0 * x[2]).sin()).to_spectral();
        let l2 = s.u[0].l2_norm_sqr().sqrt();
        let t = track_negative_norms(&s, 0.5, NegativeSpace::NegSobolev).unwrap();
        assert!((t.value - l2 / 2f64.sqrt()).abs() < 1e-13 * l2);
    }

    #[test]
    fn ring_supported_besov_endpoint() {
        // |xi| = 4 = 2^2 sits where phi_2 = 1: value = 2^{-3/2 * 2} ||u||
        let g = Grid::new(16, 2.0 * PI).unwrap();
        assert_eq!(ring_weight(2, 4.0), 1.0);
        let mut s = PlasmaState::equilibrium(&g);
        s.u[1] = RealField::from_fn(&g, |x| (4.0 * x[0]).cos()).to_spectral();
        let l2 = s.u[1].l2_norm_sqr().sqrt();
        let t = track_negative_norms(&s, 1.5, NegativeSpace::NegBesov).unwrap();
        assert!((t.value - 2f64.powf(-3.0) * l2).abs() < 1e-13 * l2);
    }

    #[test]
    fn range_and_mean_errors() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        assert!(track_negative_norms(&s, 1.5, NegativeSpace::NegSobolev).is_err());
        assert!(track_negative_norms(&s, 1.5, NegativeSpace::NegBesov).is_ok());
        assert!(track_negative_norms(&s, 0.0, NegativeSpace::NegBesov).is_err());
        s.theta.set_coefficient([0, 0, 0], 0.1.into());
        s.theta.set_coefficient([1, 0, 0], 0.1.into());
        s.theta.set_coefficient([-1, 0, 0], 0.1.into());
        assert!(matches!(
            track_negative_norms(&s, 0.5, NegativeSpace::NegSobolev),
            Err(DiagnosticsError::Spectral(_))
        ));
        assert!(track_negative_norms_with(&s, 0.5, NegativeSpace::NegSobolev, ZeroModeRule::Annihilate).is_ok());
    }

    #[test]
    fn bootstrap_target_includes_divergence() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.u[0] = RealField::from_fn(&g, |x| x[0].sin()).to_spectral();
        let psi = apply_symbol(&s.u[0], MultiplierSymbol::PartialDerivative { axis: 0 }).unwrap();
        let v = decay_target_norm(&s, DecayTarget::Bootstrap, 0);
        assert!((v - psi.l2_norm_sqr().sqrt()).abs() < 1e-12);
        assert_eq!(decay_target_norm(&s, DecayTarget::Density, 0), 0.0);
    }
}
