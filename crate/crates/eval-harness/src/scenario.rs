//! Evaluation scenarios and observation perturbation.

use biomech_env::{Draw, ObservationGroups};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{EvalError, Result, DEFAULT_EVAL_STEPS, DEFAULT_SEEDS};

/// One evaluation cell family: drop/incline draws, observation noise level,
/// the seeds to run, and the episode cap.
#[derive(Debug, Clone)]
pub struct EvalScenario {
    pub id: String,
    pub drop: Draw,
    pub incline_deg: Draw,
    pub obs_noise_sigma: f64,
    pub seeds: Vec<u64>,
    pub max_steps: u32,
}

impl EvalScenario {
    /// Level ground, no drop, no noise, the default seeds.
    pub fn baseline() -> Self {
        Self {
            id: "baseline".into(),
            drop: Draw::fixed(0.0),
            incline_deg: Draw::fixed(0.0),
            obs_noise_sigma: 0.0,
            seeds: DEFAULT_SEEDS.to_vec(),
            max_steps: DEFAULT_EVAL_STEPS,
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(EvalError::Scenario("seed list must be non-empty".into()));
        }
        if self.obs_noise_sigma < 0.0 {
            return Err(EvalError::Scenario("noise sigma must be >= 0".into()));
        }
        if self.max_steps == 0 {
            return Err(EvalError::Scenario("max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Adds i.i.d. N(0, σ) to every observation component before the agent sees
/// it. Perturbed activation readings are clipped back to [0, 1]; all other
/// groups are left unclipped.
pub fn perturb_observation<R: Rng + ?Sized>(
    obs: &mut ObservationGroups,
    sigma: f64,
    rng: &mut R,
) {
    if sigma == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    for group in [
        &mut obs.positions,
        &mut obs.orientations,
        &mut obs.joint_angles,
        &mut obs.joint_velocities,
        &mut obs.joint_accelerations,
    ] {
        for v in group.iter_mut() {
            *v += normal.sample(rng);
        }
    }
    for v in obs.prev_activations.iter_mut() {
        *v = (*v + normal.sample(rng)).clamp(0.0, 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sample_obs() -> ObservationGroups {
        ObservationGroups {
            positions: vec![0.1; 14],
            orientations: vec![0.2; 7],
            joint_angles: vec![-0.1; 7],
            joint_velocities: vec![0.0; 7],
            joint_accelerations: vec![1.0; 7],
            prev_activations: vec![0.9; 12],
        }
    }

    #[test]
    fn zero_sigma_is_identity() {
        let mut obs = sample_obs();
        let before = obs.clone();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        perturb_observation(&mut obs, 0.0, &mut rng);
        assert_eq!(obs, before);
    }

    #[test]
    fn activations_clip_while_other_groups_do_not() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut saw_clip = false;
        let mut saw_big_angle = false;
        for _ in 0..200 {
            let mut obs = sample_obs();
            perturb_observation(&mut obs, 0.3, &mut rng);
            assert!(obs
                .prev_activations
                .iter()
                .all(|&a| (0.0..=1.0).contains(&a)));
            saw_clip |= obs.prev_activations.iter().any(|&a| a == 1.0 || a == 0.0);
            saw_big_angle |= obs.orientations.iter().any(|&o| o > 1.0 || o < -0.6);
        }
        assert!(saw_clip, "0.9 + N(0, 0.3) should clip at 1.0 sometimes");
        assert!(saw_big_angle, "orientations must stay unclipped");
    }

    #[test]
    fn perturbation_scale_matches_sigma() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let sigma = 0.1;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut n = 0usize;
        for _ in 0..2000 {
            let mut obs = sample_obs();
            perturb_observation(&mut obs, sigma, &mut rng);
            // positions started at 0.1; far from any clipping
            for (&after, &before) in obs.positions.iter().zip(&[0.1; 14]) {
                let d = after - before;
                sum += d;
                sum_sq += d * d;
                n += 1;
            }
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean * mean).sqrt();
        assert!((std - sigma).abs() / sigma < 0.05, "std {std}");
    }
}
