//! The standing reward: ground-contact bonus minus a normalized penalty
//! over muscle effort, pelvis-height deviation, per-foot weight share and
//! loss of contact.

/// Target divisor for the per-foot weight share terms.
pub const W_TARGET_DIVISOR: f64 = 0.65;

/// Sum of the penalty weights: 1 + 16 + 64 + 64 + 128.
pub const PENALTY_NORMALIZER: f64 = 273.0;

#[derive(Debug, Clone, Copy)]
pub struct RewardInputs<'a> {
    pub activations: &'a [f64],
    pub pelvis_height: f64,
    pub reference_height: f64,
    /// Vertical ground reaction force on each foot divided by body weight.
    pub w_left: f64,
    pub w_right: f64,
    /// True when each foot's total normal contact force is positive.
    pub left_grounded: bool,
    pub right_grounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParts {
    /// Both-feet-grounded indicator, 0 or 1.
    pub r_grf: f64,
    pub activation_sq: f64,
    pub height_term: f64,
    pub w_left_term: f64,
    pub w_right_term: f64,
    pub contact_term: f64,
    pub penalty_magnitude: f64,
    pub norm_penalty: f64,
    pub reward: f64,
}

/// reward = 2·R_GRF − penalty/273 with
/// penalty = ‖m‖² + 16(H−H₀)² + 64(1−W_L/0.65)² + 64(1−W_R/0.65)² + 128(1−R_GRF).
pub fn compute_reward(inputs: &RewardInputs) -> RewardParts {
    let r_grf = if inputs.left_grounded && inputs.right_grounded {
        1.0
    } else {
        0.0
    };
    let activation_sq: f64 = inputs.activations.iter().map(|a| a * a).sum();
    let dh = inputs.pelvis_height - inputs.reference_height;
    let height_term = 16.0 * dh * dh;
    let wl = 1.0 - inputs.w_left / W_TARGET_DIVISOR;
    let wr = 1.0 - inputs.w_right / W_TARGET_DIVISOR;
    let w_left_term = 64.0 * wl * wl;
    let w_right_term = 64.0 * wr * wr;
    let contact_term = 128.0 * (1.0 - r_grf);
    let penalty_magnitude =
        activation_sq + height_term + w_left_term + w_right_term + contact_term;
    let norm_penalty = penalty_magnitude / PENALTY_NORMALIZER;
    RewardParts {
        r_grf,
        activation_sq,
        height_term,
        w_left_term,
        w_right_term,
        contact_term,
        penalty_magnitude,
        norm_penalty,
        reward: 2.0 * r_grf - norm_penalty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_stance_scores_two() {
        let parts = compute_reward(&RewardInputs {
            activations: &[0.0; 12],
            pelvis_height: 0.93,
            reference_height: 0.93,
            w_left: 0.65,
            w_right: 0.65,
            left_grounded: true,
            right_grounded: true,
        });
        assert!((parts.reward - 2.0).abs() < 1e-12);
        assert!(parts.penalty_magnitude.abs() < 1e-12);
    }

    #[test]
    fn airborne_matches_hand_evaluation() {
        let parts = compute_reward(&RewardInputs {
            activations: &[0.0; 12],
            pelvis_height: 0.93,
            reference_height: 0.93,
            w_left: 0.0,
            w_right: 0.0,
            left_grounded: false,
            right_grounded: false,
        });
        assert!((parts.penalty_magnitude - 256.0).abs() < 1e-12);
        assert!((parts.reward - (-256.0 / 273.0)).abs() < 1e-12);
        assert!((parts.reward + 0.93773).abs() < 1e-5);
    }

    #[test]
    fn loaded_stance_matches_hand_evaluation() {
        let parts = compute_reward(&RewardInputs {
            activations: &[0.1; 12],
            pelvis_height: 0.98,
            reference_height: 0.93,
            w_left: 0.5,
            w_right: 0.5,
            left_grounded: true,
            right_grounded: true,
        });
        let w_term = 64.0 * (1.0 - 0.5 / 0.65) * (1.0 - 0.5 / 0.65);
        let expected_mag = 0.12 + 0.04 + 2.0 * w_term;
        assert!((parts.penalty_magnitude - expected_mag).abs() < 1e-9);
        assert!((parts.reward - (2.0 - expected_mag / 273.0)).abs() < 1e-12);
        assert!((parts.reward - 1.97444).abs() < 1e-5);
    }

    #[test]
    fn one_foot_off_the_ground_clears_the_bonus() {
        let parts = compute_reward(&RewardInputs {
            activations: &[0.0; 12],
            pelvis_height: 0.93,
            reference_height: 0.93,
            w_left: 1.0,
            w_right: 0.0,
            left_grounded: true,
            right_grounded: false,
        });
        assert_eq!(parts.r_grf, 0.0);
        assert_eq!(parts.contact_term, 128.0);
        assert!(parts.reward < 0.0);
    }
}
