//! Hunt-Crossley compliant ground contact with regularized friction.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContactParams {
    /// Normal stiffness, N/m^1.5 (penetration in meters).
    pub stiffness: f64,
    /// Hunt-Crossley dissipation, s/m.
    pub dissipation: f64,
    /// Coulomb friction coefficient.
    pub friction: f64,
    /// Tangential velocity scale regularizing the friction law, m/s.
    pub v_reg: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            stiffness: 2.5e6,
            dissipation: 0.8,
            friction: 0.9,
            v_reg: 0.05,
        }
    }
}

/// Contact force for a point at signed `height` above the plane.
///
/// `normal_velocity` is the point velocity along the plane normal (positive
/// = separating), `tangential_velocity` along the plane tangent. Returns
/// `(normal_force, friction_force)` in plane coordinates; the normal force
/// is clamped at zero so the ground never pulls.
pub fn ground_contact(
    height: f64,
    normal_velocity: f64,
    tangential_velocity: f64,
    params: &ContactParams,
) -> (f64, f64) {
    let penetration = -height;
    if penetration <= 0.0 {
        return (0.0, 0.0);
    }
    let penetration_rate = -normal_velocity;
    let hertz = params.stiffness * penetration.powf(1.5);
    let normal = (hertz * (1.0 + 1.5 * params.dissipation * penetration_rate)).max(0.0);
    let friction = -params.friction * normal * (tangential_velocity / params.v_reg).tanh();
    (normal, friction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_penetration_means_no_force() {
        let p = ContactParams::default();
        assert_eq!(ground_contact(0.0, -1.0, 2.0, &p), (0.0, 0.0));
        assert_eq!(ground_contact(0.3, 0.0, 0.0, &p), (0.0, 0.0));
    }

    #[test]
    fn static_penetration_matches_direct_evaluation() {
        let p = ContactParams::default();
        let (normal, _) = ground_contact(-1e-3, 0.0, 0.0, &p);
        let expected = 2.5e6 * 1e-3f64.powf(1.5);
        assert!((normal - expected).abs() < 1e-9);
        assert!((normal - 79.0569415).abs() < 1e-6);
    }

    #[test]
    fn rapid_withdrawal_never_produces_adhesion() {
        let p = ContactParams::default();
        // separating fast enough to make (1 + 1.5 c δ̇) negative
        let (normal, friction) = ground_contact(-1e-3, 5.0, 0.0, &p);
        assert_eq!(normal, 0.0);
        assert_eq!(friction, 0.0);
    }

    #[test]
    fn friction_opposes_tangential_motion() {
        let p = ContactParams::default();
        let (_, f_pos) = ground_contact(-1e-3, 0.0, 1.0, &p);
        let (_, f_neg) = ground_contact(-1e-3, 0.0, -1.0, &p);
        assert!(f_pos < 0.0 && f_neg > 0.0);
        assert!((f_pos + f_neg).abs() < 1e-12);
    }
}
