//! Dense affine layer with activation, gradient buffers and Adam moments.

use rand::Rng;

use crate::adam::{update_params, AdamConfig};
use crate::{Activation, NnError, Result};

/// `y = activation(W x + b)` with row-major `W` of shape `[out × in]`.
///
/// Gradient buffers mirror the parameter shapes and accumulate across a
/// mini-batch. When `trainable` is false the optimizer and the backward pass
/// leave the parameters bit-identical, but the input gradient is still
/// computed so gradient flows through locked layers.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: Vec<f64>,
    pub(crate) grad_weights: Vec<f64>,
    pub(crate) grad_bias: Vec<f64>,
    pub(crate) m_weights: Vec<f64>,
    pub(crate) v_weights: Vec<f64>,
    pub(crate) m_bias: Vec<f64>,
    pub(crate) v_bias: Vec<f64>,
    trainable: bool,
    cached_input: Option<Vec<f64>>,
    cached_output: Option<Vec<f64>>,
}

impl DenseLayer {
    /// Weights drawn uniform in ±1/√fan_in, biases zero.
    pub fn new<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(in_dim > 0 && out_dim > 0, "layer dims must be > 0");
        let limit = 1.0 / (in_dim as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.random_range(-limit..limit))
            .collect();
        Self::from_parts(in_dim, out_dim, activation, weights, vec![0.0; out_dim])
    }

    /// All-zero parameters; used by tests and snapshot restore.
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self::from_parts(
            in_dim,
            out_dim,
            activation,
            vec![0.0; in_dim * out_dim],
            vec![0.0; out_dim],
        )
    }

    fn from_parts(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Self {
        let n = in_dim * out_dim;
        Self {
            in_dim,
            out_dim,
            activation,
            weights,
            bias,
            grad_weights: vec![0.0; n],
            grad_bias: vec![0.0; out_dim],
            m_weights: vec![0.0; n],
            v_weights: vec![0.0; n],
            m_bias: vec![0.0; out_dim],
            v_bias: vec![0.0; out_dim],
            trainable: true,
            cached_input: None,
            cached_output: None,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn trainable(&self) -> bool {
        self.trainable
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        self.trainable = trainable;
    }

    fn affine(&self, input: &[f64]) -> Vec<f64> {
        let mut z = self.bias.clone();
        for (o, zo) in z.iter_mut().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = 0.0;
            for (w, x) in row.iter().zip(input) {
                acc += w * x;
            }
            *zo += acc;
        }
        z
    }

    /// Pure forward pass without caching; usable through a shared reference.
    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.in_dim, "input width mismatch");
        let mut z = self.affine(input);
        self.activation.apply(&mut z);
        z
    }

    /// Forward pass that caches input and output for a later backward call.
    pub fn forward(&mut self, input: &[f64]) -> Vec<f64> {
        let out = self.infer(input);
        self.cached_input = Some(input.to_vec());
        self.cached_output = Some(out.clone());
        out
    }

    /// Accumulates parameter gradients (when trainable) and returns dL/dinput.
    ///
    /// The parameter gradients sum across calls until the next optimizer step;
    /// the input gradient is computed regardless of the trainable flag.
    pub fn backward(&mut self, upstream: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(upstream.len(), self.out_dim, "upstream width mismatch");
        let (input, output) = match (&self.cached_input, &self.cached_output) {
            (Some(i), Some(o)) => (i, o),
            _ => return Err(NnError::BackwardBeforeForward),
        };

        let mut d_z = vec![0.0; self.out_dim];
        self.activation.backprop(output, upstream, &mut d_z);

        let mut d_input = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let dz = d_z[o];
            let row = o * self.in_dim;
            for i in 0..self.in_dim {
                d_input[i] += self.weights[row + i] * dz;
            }
        }
        if self.trainable {
            for o in 0..self.out_dim {
                let dz = d_z[o];
                let row = o * self.in_dim;
                for i in 0..self.in_dim {
                    self.grad_weights[row + i] += dz * input[i];
                }
                self.grad_bias[o] += dz;
            }
        }
        Ok(d_input)
    }

    pub fn zero_grads(&mut self) {
        self.grad_weights.fill(0.0);
        self.grad_bias.fill(0.0);
    }

    /// Adam step on this layer alone; increments `cfg.step_count`.
    ///
    /// Accumulated gradients are averaged by `batch` and then cleared.
    pub fn adam_step(&mut self, cfg: &mut AdamConfig, batch: usize) {
        cfg.step_count += 1;
        let t = cfg.step_count;
        self.apply_adam(cfg, t, batch);
    }

    pub(crate) fn apply_adam(&mut self, cfg: &AdamConfig, t: u64, batch: usize) {
        if self.trainable {
            update_params(
                &mut self.weights,
                &self.grad_weights,
                &mut self.m_weights,
                &mut self.v_weights,
                cfg,
                t,
                batch,
            );
            update_params(
                &mut self.bias,
                &self.grad_bias,
                &mut self.m_bias,
                &mut self.v_bias,
                cfg,
                t,
                batch,
            );
        }
        self.zero_grads();
    }

    /// θ′ ← τ·θ + (1−τ)·θ′, applied to this layer as the target side.
    pub fn soft_update_from(&mut self, online: &DenseLayer, tau: f64) {
        debug_assert_eq!(self.weights.len(), online.weights.len());
        for (t, o) in self.weights.iter_mut().zip(&online.weights) {
            *t = tau * o + (1.0 - tau) * *t;
        }
        for (t, o) in self.bias.iter_mut().zip(&online.bias) {
            *t = tau * o + (1.0 - tau) * *t;
        }
    }

    /// Parameters in a fixed order (weights row-major, then bias).
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.extend_from_slice(&self.bias);
        p
    }

    pub fn grads(&self) -> Vec<f64> {
        let mut g = self.grad_weights.clone();
        g.extend_from_slice(&self.grad_bias);
        g
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let n = self.weights.len();
        assert_eq!(params.len(), n + self.bias.len(), "param count mismatch");
        self.weights.copy_from_slice(&params[..n]);
        self.bias.copy_from_slice(&params[n..]);
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    #[cfg(test)]
    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }
}
