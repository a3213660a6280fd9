//! A stack of dense layers sharing one Adam configuration.

use rand::Rng;

use crate::{Activation, AdamConfig, DenseLayer, Result};

/// Feed-forward network. Layers cache their own activations during
/// `forward`, so a net must see `forward` before each `backward`.
#[derive(Debug, Clone)]
pub struct DenseNet {
    layers: Vec<DenseLayer>,
    pub(crate) adam: AdamConfig,
}

impl DenseNet {
    /// Builds `input_dim → spec[0] → spec[1] → …` with the given activations.
    pub fn new<R: Rng + ?Sized>(
        input_dim: usize,
        spec: &[(usize, Activation)],
        adam: AdamConfig,
        rng: &mut R,
    ) -> Self {
        assert!(!spec.is_empty(), "a net needs at least one layer");
        let mut layers = Vec::with_capacity(spec.len());
        let mut prev = input_dim;
        for &(width, act) in spec {
            layers.push(DenseLayer::new(prev, width, act, rng));
            prev = width;
        }
        Self { layers, adam }
    }

    pub(crate) fn from_layers(layers: Vec<DenseLayer>, adam: AdamConfig) -> Self {
        Self { layers, adam }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn adam_config(&self) -> &AdamConfig {
        &self.adam
    }

    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        let mut x = self.layers[0].infer(input);
        for layer in &self.layers[1..] {
            x = layer.infer(&x);
        }
        x
    }

    pub fn forward(&mut self, input: &[f64]) -> Vec<f64> {
        let mut x = self.layers[0].forward(input);
        for layer in self.layers[1..].iter_mut() {
            x = layer.forward(&x);
        }
        x
    }

    /// Backpropagates through all layers and returns dL/dinput.
    pub fn backward(&mut self, upstream: &[f64]) -> Result<Vec<f64>> {
        let mut grad = upstream.to_vec();
        for layer in self.layers.iter_mut().rev() {
            grad = layer.backward(&grad)?;
        }
        Ok(grad)
    }

    /// One Adam step over all trainable layers; gradients are averaged by
    /// `batch` and cleared. The net-level step counter advances once.
    pub fn adam_step(&mut self, batch: usize) {
        self.adam.step_count += 1;
        let t = self.adam.step_count;
        let cfg = self.adam.clone();
        for layer in self.layers.iter_mut() {
            layer.apply_adam(&cfg, t, batch);
        }
    }

    pub fn zero_grads(&mut self) {
        for layer in self.layers.iter_mut() {
            layer.zero_grads();
        }
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        for layer in self.layers.iter_mut() {
            layer.set_trainable(trainable);
        }
    }

    pub fn trainable(&self) -> bool {
        self.layers.iter().all(|l| l.trainable())
    }

    pub fn soft_update_from(&mut self, online: &DenseNet, tau: f64) {
        debug_assert_eq!(self.layers.len(), online.layers.len());
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            t.soft_update_from(o, tau);
        }
    }

    /// All parameters, layer by layer (weights then bias within a layer).
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::new();
        for layer in &self.layers {
            p.extend(layer.params());
        }
        p
    }

    pub fn grads(&self) -> Vec<f64> {
        let mut g = Vec::new();
        for layer in &self.layers {
            g.extend(layer.grads());
        }
        g
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut offset = 0;
        for layer in self.layers.iter_mut() {
            let n = layer.param_count();
            layer.set_params(&params[offset..offset + n]);
            offset += n;
        }
        assert_eq!(offset, params.len(), "param count mismatch");
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }
}
