//! Adapter exposing the standing environment through the trainer's
//! `Environment` surface.

use biomech_env::StandingEnv;

use crate::{EnvStep, Environment};

impl Environment for StandingEnv {
    fn group_dims(&self) -> Vec<usize> {
        StandingEnv::group_dims(self).to_vec()
    }

    fn action_dim(&self) -> usize {
        StandingEnv::action_dim(self)
    }

    fn reset(&mut self) -> Vec<f64> {
        StandingEnv::reset(self).concat()
    }

    fn step(&mut self, action: &[f64]) -> EnvStep {
        // the trainer only produces finite, clipped actions
        let result = StandingEnv::step(self, action).expect("finite action");
        EnvStep {
            obs: result.obs.concat(),
            reward: result.reward,
            done: result.done,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use biomech_env::{Draw, EnvConfig};

    #[test]
    fn bridge_exposes_matching_dimensions() {
        let cfg = EnvConfig {
            drop: Draw::fixed(0.0),
            ..EnvConfig::default()
        };
        let mut env = StandingEnv::new(cfg).unwrap();
        assert_eq!(Environment::group_dims(&env), vec![14, 7, 7, 7, 7, 12]);
        assert_eq!(Environment::action_dim(&env), 12);
        let obs = Environment::reset(&mut env);
        assert_eq!(obs.len(), 54);
        let step = Environment::step(&mut env, &vec![0.2; 12]);
        assert_eq!(step.obs.len(), 54);
        assert!(step.reward.is_finite());
    }
}
