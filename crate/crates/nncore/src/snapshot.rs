//! Bit-exact binary snapshots of layers and nets.
//!
//! The format is a little-endian stream: shapes first, then parameters and
//! Adam moments, then the optimizer step count. `f64` values round-trip via
//! their raw bit patterns, so restore reproduces training state exactly.
//! Gradient buffers are transient and are zeroed on restore.

use std::io::{Read, Write};

use crate::{Activation, AdamConfig, DenseLayer, DenseNet, NnError, ParamTanhLayer, Result};

pub fn write_u8<W: Write>(w: &mut W, v: u8) -> Result<()> {
    w.write_all(&[v])?;
    Ok(())
}

pub fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

pub fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_bits().to_le_bytes())?;
    Ok(())
}

pub fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_bits(u64::from_le_bytes(buf)))
}

pub fn write_f64_slice<W: Write>(w: &mut W, values: &[f64]) -> Result<()> {
    write_u64(w, values.len() as u64)?;
    for &v in values {
        write_f64(w, v)?;
    }
    Ok(())
}

pub fn read_f64_vec<R: Read>(r: &mut R, expected: usize) -> Result<Vec<f64>> {
    let n = read_u64(r)? as usize;
    if n != expected {
        return Err(NnError::Integrity(format!(
            "vector length {n}, expected {expected}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(read_f64(r)?);
    }
    Ok(out)
}

/// Four-byte section tag; mismatches become integrity errors.
pub fn write_tag<W: Write>(w: &mut W, tag: &[u8; 4]) -> Result<()> {
    w.write_all(tag)?;
    Ok(())
}

pub fn expect_tag<R: Read>(r: &mut R, tag: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    if &buf != tag {
        return Err(NnError::Integrity(format!(
            "bad section tag {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(tag)
        )));
    }
    Ok(())
}

pub fn write_adam<W: Write>(w: &mut W, cfg: &AdamConfig) -> Result<()> {
    write_f64(w, cfg.learning_rate)?;
    write_f64(w, cfg.decay)?;
    write_f64(w, cfg.beta1)?;
    write_f64(w, cfg.beta2)?;
    write_f64(w, cfg.epsilon)?;
    write_u64(w, cfg.step_count)
}

pub fn read_adam<R: Read>(r: &mut R) -> Result<AdamConfig> {
    Ok(AdamConfig {
        learning_rate: read_f64(r)?,
        decay: read_f64(r)?,
        beta1: read_f64(r)?,
        beta2: read_f64(r)?,
        epsilon: read_f64(r)?,
        step_count: read_u64(r)?,
    })
}

pub fn write_layer<W: Write>(w: &mut W, layer: &DenseLayer) -> Result<()> {
    write_tag(w, b"LAYR")?;
    write_u32(w, layer.in_dim() as u32)?;
    write_u32(w, layer.out_dim() as u32)?;
    write_u8(w, layer.activation().tag())?;
    write_u8(w, layer.trainable() as u8)?;
    write_f64_slice(w, &layer.weights)?;
    write_f64_slice(w, &layer.bias)?;
    write_f64_slice(w, &layer.m_weights)?;
    write_f64_slice(w, &layer.v_weights)?;
    write_f64_slice(w, &layer.m_bias)?;
    write_f64_slice(w, &layer.v_bias)
}

pub fn read_layer<R: Read>(r: &mut R) -> Result<DenseLayer> {
    expect_tag(r, b"LAYR")?;
    let in_dim = read_u32(r)? as usize;
    let out_dim = read_u32(r)? as usize;
    let act = Activation::from_tag(read_u8(r)?)
        .ok_or_else(|| NnError::Integrity("unknown activation tag".into()))?;
    let trainable = read_u8(r)? != 0;
    let mut layer = DenseLayer::zeros(in_dim, out_dim, act);
    let n = in_dim * out_dim;
    layer.weights = read_f64_vec(r, n)?;
    layer.bias = read_f64_vec(r, out_dim)?;
    layer.m_weights = read_f64_vec(r, n)?;
    layer.v_weights = read_f64_vec(r, n)?;
    layer.m_bias = read_f64_vec(r, out_dim)?;
    layer.v_bias = read_f64_vec(r, out_dim)?;
    layer.set_trainable(trainable);
    Ok(layer)
}

pub fn write_net<W: Write>(w: &mut W, net: &DenseNet) -> Result<()> {
    write_tag(w, b"DNET")?;
    write_adam(w, net.adam_config())?;
    write_u32(w, net.layers().len() as u32)?;
    for layer in net.layers() {
        write_layer(w, layer)?;
    }
    Ok(())
}

pub fn read_net<R: Read>(r: &mut R) -> Result<DenseNet> {
    expect_tag(r, b"DNET")?;
    let adam = read_adam(r)?;
    let n_layers = read_u32(r)? as usize;
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        layers.push(read_layer(r)?);
    }
    if layers.is_empty() {
        return Err(NnError::Integrity("net with no layers".into()));
    }
    Ok(DenseNet::from_layers(layers, adam))
}

pub fn write_param_tanh<W: Write>(w: &mut W, layer: &ParamTanhLayer) -> Result<()> {
    write_tag(w, b"PTNH")?;
    write_u32(w, layer.width() as u32)?;
    write_u8(w, layer.trainable() as u8)?;
    write_adam(w, &layer.adam)?;
    write_f64_slice(w, &layer.alpha)?;
    write_f64_slice(w, &layer.beta)?;
    write_f64_slice(w, &layer.m_alpha)?;
    write_f64_slice(w, &layer.v_alpha)?;
    write_f64_slice(w, &layer.m_beta)?;
    write_f64_slice(w, &layer.v_beta)
}

pub fn read_param_tanh<R: Read>(r: &mut R) -> Result<ParamTanhLayer> {
    expect_tag(r, b"PTNH")?;
    let width = read_u32(r)? as usize;
    let trainable = read_u8(r)? != 0;
    let adam = read_adam(r)?;
    let mut layer = ParamTanhLayer::new(width, adam);
    layer.alpha = read_f64_vec(r, width)?;
    layer.beta = read_f64_vec(r, width)?;
    layer.m_alpha = read_f64_vec(r, width)?;
    layer.v_alpha = read_f64_vec(r, width)?;
    layer.m_beta = read_f64_vec(r, width)?;
    layer.v_beta = read_f64_vec(r, width)?;
    layer.set_trainable(trainable);
    Ok(layer)
}
