//! Learnable output squashing: per-neuron `y = 0.5·(tanh(α·x + β) + 1)`.
//!
//! Maps ℝ → (0, 1), matching the muscle-excitation range, with a learnable
//! slope and shift per output channel. α starts at 1, β at 0, so the initial
//! map is the plain rescaled tanh with `y(0) = 0.5`.

use crate::adam::{update_params, AdamConfig};
use crate::{NnError, Result};

#[derive(Debug, Clone)]
pub struct ParamTanhLayer {
    pub(crate) alpha: Vec<f64>,
    pub(crate) beta: Vec<f64>,
    pub(crate) grad_alpha: Vec<f64>,
    pub(crate) grad_beta: Vec<f64>,
    pub(crate) m_alpha: Vec<f64>,
    pub(crate) v_alpha: Vec<f64>,
    pub(crate) m_beta: Vec<f64>,
    pub(crate) v_beta: Vec<f64>,
    pub(crate) adam: AdamConfig,
    trainable: bool,
    cached_input: Option<Vec<f64>>,
}

impl ParamTanhLayer {
    pub fn new(width: usize, adam: AdamConfig) -> Self {
        Self {
            alpha: vec![1.0; width],
            beta: vec![0.0; width],
            grad_alpha: vec![0.0; width],
            grad_beta: vec![0.0; width],
            m_alpha: vec![0.0; width],
            v_alpha: vec![0.0; width],
            m_beta: vec![0.0; width],
            v_beta: vec![0.0; width],
            adam,
            trainable: true,
            cached_input: None,
        }
    }

    pub fn width(&self) -> usize {
        self.alpha.len()
    }

    pub fn trainable(&self) -> bool {
        self.trainable
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        self.trainable = trainable;
    }

    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.width(), "input width mismatch");
        input
            .iter()
            .zip(self.alpha.iter().zip(&self.beta))
            .map(|(&x, (&a, &b))| 0.5 * ((a * x + b).tanh() + 1.0))
            .collect()
    }

    pub fn forward(&mut self, input: &[f64]) -> Vec<f64> {
        let y = self.infer(input);
        self.cached_input = Some(input.to_vec());
        y
    }

    pub fn backward(&mut self, upstream: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(upstream.len(), self.width(), "upstream width mismatch");
        let input = self
            .cached_input
            .as_ref()
            .ok_or(NnError::BackwardBeforeForward)?;
        let mut d_input = vec![0.0; self.width()];
        for i in 0..self.width() {
            let t = (self.alpha[i] * input[i] + self.beta[i]).tanh();
            let dz = upstream[i] * 0.5 * (1.0 - t * t);
            d_input[i] = dz * self.alpha[i];
            if self.trainable {
                self.grad_alpha[i] += dz * input[i];
                self.grad_beta[i] += dz;
            }
        }
        Ok(d_input)
    }

    pub fn zero_grads(&mut self) {
        self.grad_alpha.fill(0.0);
        self.grad_beta.fill(0.0);
    }

    pub fn adam_step(&mut self, batch: usize) {
        self.adam.step_count += 1;
        let t = self.adam.step_count;
        if self.trainable {
            update_params(
                &mut self.alpha,
                &self.grad_alpha,
                &mut self.m_alpha,
                &mut self.v_alpha,
                &self.adam,
                t,
                batch,
            );
            update_params(
                &mut self.beta,
                &self.grad_beta,
                &mut self.m_beta,
                &mut self.v_beta,
                &self.adam,
                t,
                batch,
            );
        }
        self.zero_grads();
    }

    pub fn soft_update_from(&mut self, online: &ParamTanhLayer, tau: f64) {
        for (t, o) in self.alpha.iter_mut().zip(&online.alpha) {
            *t = tau * o + (1.0 - tau) * *t;
        }
        for (t, o) in self.beta.iter_mut().zip(&online.beta) {
            *t = tau * o + (1.0 - tau) * *t;
        }
    }

    /// α then β.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.alpha.clone();
        p.extend_from_slice(&self.beta);
        p
    }

    pub fn grads(&self) -> Vec<f64> {
        let mut g = self.grad_alpha.clone();
        g.extend_from_slice(&self.grad_beta);
        g
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let w = self.width();
        assert_eq!(params.len(), 2 * w, "param count mismatch");
        self.alpha.copy_from_slice(&params[..w]);
        self.beta.copy_from_slice(&params[w..]);
    }
}
