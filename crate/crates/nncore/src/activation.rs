//! Elementwise and vector activations.

/// Activation applied after a dense layer's affine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Tanh,
    /// Vector-valued: the whole layer output is one probability simplex.
    Softmax,
}

impl Activation {
    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Tanh => 1,
            Activation::Softmax => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Softmax),
            _ => None,
        }
    }

    /// Applies the activation to a pre-activation vector in place.
    pub(crate) fn apply(self, z: &mut [f64]) {
        match self {
            Activation::Linear => {}
            Activation::Tanh => {
                for v in z.iter_mut() {
                    *v = v.tanh();
                }
            }
            Activation::Softmax => {
                let y = softmax(z);
                z.copy_from_slice(&y);
            }
        }
    }

    /// Maps dL/dy to dL/dz given the post-activation output y.
    pub(crate) fn backprop(self, output: &[f64], d_output: &[f64], d_z: &mut [f64]) {
        match self {
            Activation::Linear => d_z.copy_from_slice(d_output),
            Activation::Tanh => {
                for ((dz, &y), &dy) in d_z.iter_mut().zip(output).zip(d_output) {
                    *dz = dy * (1.0 - y * y);
                }
            }
            Activation::Softmax => {
                // dz = y ⊙ (dy − <dy, y>)
                let dot: f64 = d_output.iter().zip(output).map(|(&dy, &y)| dy * y).sum();
                for ((dz, &y), &dy) in d_z.iter_mut().zip(output).zip(d_output) {
                    *dz = y * (dy - dot);
                }
            }
        }
    }
}

/// Numerically stable softmax: shifts by the max logit before exponentiating.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}
