//! Adam optimizer settings and the per-parameter update rule.

/// Adam hyperparameters plus the running step count used for bias correction.
///
/// `decay` follows the classic convention `lr_t = lr / (1 + decay * t)` with
/// `t` counted from zero; the default of 0.0 leaves the learning rate flat.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            decay: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_count: 0,
        }
    }
}

impl AdamConfig {
    pub fn new(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> bool {
        self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0
            && self.decay >= 0.0
    }

    /// Effective learning rate at step `t` (1-based).
    pub(crate) fn lr_at(&self, t: u64) -> f64 {
        self.learning_rate / (1.0 + self.decay * (t - 1) as f64)
    }
}

/// One bias-corrected Adam update over a parameter slice.
///
/// `grads` holds gradient sums over the mini-batch; they are divided by
/// `batch` here, so callers accumulate raw per-sample gradients.
pub(crate) fn update_params(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    cfg: &AdamConfig,
    t: u64,
    batch: usize,
) {
    debug_assert!(t >= 1);
    let lr = cfg.lr_at(t);
    let inv_batch = 1.0 / batch as f64;
    let bc1 = 1.0 - cfg.beta1.powi(t as i32);
    let bc2 = 1.0 - cfg.beta2.powi(t as i32);
    for i in 0..params.len() {
        let g = grads[i] * inv_batch;
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_matches_hand_evaluation() {
        // g=1, lr=1e-4, t=1: m̂=1, v̂=1, delta = −1e-4 / (1 + 1e-8)
        let cfg = AdamConfig::default();
        let mut p = [0.0];
        let mut m = [0.0];
        let mut v = [0.0];
        update_params(&mut p, &[1.0], &mut m, &mut v, &cfg, 1, 1);
        let expected = -1e-4 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-18, "got {}", p[0]);
        assert!((p[0] + 9.99999990e-5).abs() < 1e-12);
    }

    #[test]
    fn zero_gradient_zero_moments_leaves_params_unchanged() {
        let cfg = AdamConfig::default();
        let mut p = [0.75f64];
        let before = p[0].to_bits();
        let mut m = [0.0];
        let mut v = [0.0];
        update_params(&mut p, &[0.0], &mut m, &mut v, &cfg, 1, 64);
        assert_eq!(p[0].to_bits(), before);
    }

    #[test]
    fn decay_scales_learning_rate() {
        let cfg = AdamConfig {
            decay: 0.5,
            ..AdamConfig::default()
        };
        assert!((cfg.lr_at(1) - 1e-4).abs() < 1e-20);
        assert!((cfg.lr_at(3) - 1e-4 / 2.0).abs() < 1e-20);
    }
}
