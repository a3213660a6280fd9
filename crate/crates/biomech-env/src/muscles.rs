//! First-order muscle activation dynamics.

/// Advances activation toward excitation with asymmetric time constants
/// (activation is faster than deactivation), using the exact exponential
/// update of the first-order lag over one step.
pub fn activation_dynamics(a: f64, u: f64, dt: f64, tau_act: f64, tau_deact: f64) -> f64 {
    let tau = if u >= a { tau_act } else { tau_deact };
    let next = a + (u - a) * (1.0 - (-dt / tau).exp());
    next.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excitation_equal_to_activation_is_a_fixed_point() {
        for a in [0.0, 0.25, 1.0] {
            assert_eq!(activation_dynamics(a, a, 0.01, 0.01, 0.04), a);
        }
    }

    #[test]
    fn rise_matches_closed_form() {
        let a = activation_dynamics(0.0, 1.0, 0.01, 0.01, 0.04);
        let expected = 1.0 - (-1.0f64).exp();
        assert!((a - expected).abs() < 1e-12);
        assert!((a - 0.632120558).abs() < 1e-8);
    }

    #[test]
    fn decay_matches_closed_form() {
        let a = activation_dynamics(1.0, 0.0, 0.04, 0.01, 0.04);
        let expected = (-1.0f64).exp();
        assert!((a - expected).abs() < 1e-12);
        assert!((a - 0.367879441).abs() < 1e-8);
    }

    #[test]
    fn stays_in_unit_interval_under_any_excitation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let mut a = 0.0;
        for _ in 0..10_000 {
            let u: f64 = rng.random_range(0.0..1.0);
            a = activation_dynamics(a, u, 0.01, 0.01, 0.04);
            assert!((0.0..=1.0).contains(&a));
        }
    }
}
