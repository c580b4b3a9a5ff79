use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{ModelConfig, NLI_CLASSES, SEGMENTS};
use crate::labels::Objective;

pub const INIT_STD: f64 = 0.02;

/// Affine map `y = x·w + b`, with `w` stored input-major (`in × out`).
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Linear {
    pub fn zeros(input: usize, output: usize) -> Self {
        Linear {
            w: Array2::zeros((input, output)),
            b: Array1::zeros(output),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

impl LayerNorm {
    fn new(dim: usize) -> Self {
        LayerNorm {
            gamma: Array1::ones(dim),
            beta: Array1::zeros(dim),
        }
    }

    fn zeros(dim: usize) -> Self {
        LayerNorm {
            gamma: Array1::zeros(dim),
            beta: Array1::zeros(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    pub query: Linear,
    /// Key projection has no bias: a shared key offset shifts each softmax
    /// row by a constant, so its gradient is identically zero.
    pub key: Array2<f64>,
    pub value: Linear,
    pub attn_out: Linear,
    pub attn_norm: LayerNorm,
    pub ff_in: Linear,
    pub ff_out: Linear,
    pub ff_norm: LayerNorm,
}

/// Every trainable tensor of the model. Gradients and optimizer moments use
/// the same structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub token_emb: Array2<f64>,
    pub position_emb: Array2<f64>,
    pub segment_emb: Array2<f64>,
    pub emb_norm: LayerNorm,
    pub layers: Vec<EncoderLayer>,
    pub token_heads: BTreeMap<Objective, Linear>,
    pub nli_head: Linear,
}

/// Named, flattened view of one tensor.
pub struct TensorRef<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

pub struct TensorMut<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a mut [f64],
}

impl Weights {
    /// All-zero tensors shaped for `cfg` (layer-norm gains included).
    pub fn zeros(cfg: &ModelConfig) -> Self {
        let h = cfg.hidden;
        let f = cfg.ff_dim();
        Weights {
            token_emb: Array2::zeros((cfg.vocab_size, h)),
            position_emb: Array2::zeros((cfg.max_len, h)),
            segment_emb: Array2::zeros((SEGMENTS, h)),
            emb_norm: LayerNorm::zeros(h),
            layers: (0..cfg.layers)
                .map(|_| EncoderLayer {
                    query: Linear::zeros(h, h),
                    key: Array2::zeros((h, h)),
                    value: Linear::zeros(h, h),
                    attn_out: Linear::zeros(h, h),
                    attn_norm: LayerNorm::zeros(h),
                    ff_in: Linear::zeros(h, f),
                    ff_out: Linear::zeros(f, h),
                    ff_norm: LayerNorm::zeros(h),
                })
                .collect(),
            token_heads: cfg
                .head_dims
                .iter()
                .map(|(&o, &c)| (o, Linear::zeros(h, c)))
                .collect(),
            nli_head: Linear::zeros(h, NLI_CLASSES),
        }
    }

    /// Matrices ~ N(0, 0.02²), biases 0, layer-norm gain 1 and shift 0,
    /// drawn in tensor order from a ChaCha stream seeded by `cfg.seed`.
    pub fn init(cfg: &ModelConfig) -> Self {
        let mut w = Weights::zeros(cfg);
        let h = cfg.hidden;
        w.emb_norm = LayerNorm::new(h);
        for layer in &mut w.layers {
            layer.attn_norm = LayerNorm::new(h);
            layer.ff_norm = LayerNorm::new(h);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        for t in w.tensors_mut() {
            if t.shape.len() == 2 {
                for x in t.data.iter_mut() {
                    *x = normal.sample(&mut rng);
                }
            }
        }
        w
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.fill(0.0);
        z
    }

    pub fn fill(&mut self, value: f64) {
        for t in self.tensors_mut() {
            t.data.fill(value);
        }
    }

    pub fn tensors(&self) -> Vec<TensorRef<'_>> {
        fn m<'a>(name: String, a: &'a Array2<f64>) -> TensorRef<'a> {
            TensorRef {
                name,
                shape: a.shape().to_vec(),
                data: a.as_slice().expect("standard layout"),
            }
        }
        fn v<'a>(name: String, a: &'a Array1<f64>) -> TensorRef<'a> {
            TensorRef {
                name,
                shape: a.shape().to_vec(),
                data: a.as_slice().expect("standard layout"),
            }
        }
        let mut out = vec![
            m("embeddings.token".into(), &self.token_emb),
            m("embeddings.position".into(), &self.position_emb),
            m("embeddings.segment".into(), &self.segment_emb),
            v("embeddings.norm.gamma".into(), &self.emb_norm.gamma),
            v("embeddings.norm.beta".into(), &self.emb_norm.beta),
        ];
        for (i, l) in self.layers.iter().enumerate() {
            out.push(m(format!("layer{i}.key.weight"), &l.key));
            for (name, lin) in [
                ("query", &l.query),
                ("value", &l.value),
                ("attn_out", &l.attn_out),
                ("ff_in", &l.ff_in),
                ("ff_out", &l.ff_out),
            ] {
                out.push(m(format!("layer{i}.{name}.weight"), &lin.w));
                out.push(v(format!("layer{i}.{name}.bias"), &lin.b));
            }
            for (name, ln) in [("attn_norm", &l.attn_norm), ("ff_norm", &l.ff_norm)] {
                out.push(v(format!("layer{i}.{name}.gamma"), &ln.gamma));
                out.push(v(format!("layer{i}.{name}.beta"), &ln.beta));
            }
        }
        for (obj, lin) in &self.token_heads {
            out.push(m(format!("head.{obj}.weight"), &lin.w));
            out.push(v(format!("head.{obj}.bias"), &lin.b));
        }
        out.push(m("head.NLI.weight".into(), &self.nli_head.w));
        out.push(v("head.NLI.bias".into(), &self.nli_head.b));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<TensorMut<'_>> {
        fn m<'a>(name: String, a: &'a mut Array2<f64>) -> TensorMut<'a> {
            TensorMut {
                name,
                shape: a.shape().to_vec(),
                data: a.as_slice_mut().expect("standard layout"),
            }
        }
        fn v<'a>(name: String, a: &'a mut Array1<f64>) -> TensorMut<'a> {
            TensorMut {
                name,
                shape: a.shape().to_vec(),
                data: a.as_slice_mut().expect("standard layout"),
            }
        }
        let mut out = vec![
            m("embeddings.token".into(), &mut self.token_emb),
            m("embeddings.position".into(), &mut self.position_emb),
            m("embeddings.segment".into(), &mut self.segment_emb),
            v("embeddings.norm.gamma".into(), &mut self.emb_norm.gamma),
            v("embeddings.norm.beta".into(), &mut self.emb_norm.beta),
        ];
        for (i, l) in self.layers.iter_mut().enumerate() {
            out.push(m(format!("layer{i}.key.weight"), &mut l.key));
            for (name, lin) in [
                ("query", &mut l.query),
                ("value", &mut l.value),
                ("attn_out", &mut l.attn_out),
                ("ff_in", &mut l.ff_in),
                ("ff_out", &mut l.ff_out),
            ] {
                out.push(m(format!("layer{i}.{name}.weight"), &mut lin.w));
                out.push(v(format!("layer{i}.{name}.bias"), &mut lin.b));
            }
            for (name, ln) in [("attn_norm", &mut l.attn_norm), ("ff_norm", &mut l.ff_norm)] {
                out.push(v(format!("layer{i}.{name}.gamma"), &mut ln.gamma));
                out.push(v(format!("layer{i}.{name}.beta"), &mut ln.beta));
            }
        }
        for (obj, lin) in self.token_heads.iter_mut() {
            out.push(m(format!("head.{obj}.weight"), &mut lin.w));
            out.push(v(format!("head.{obj}.bias"), &mut lin.b));
        }
        out.push(m("head.NLI.weight".into(), &mut self.nli_head.w));
        out.push(v("head.NLI.bias".into(), &mut self.nli_head.b));
        out
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &Weights, scale: f64) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.data.iter_mut().zip(src.data) {
                *d += scale * s;
            }
        }
    }

    /// Adds uniform noise in `[-scale, scale)` to every entry. Used to move
    /// gradient checks away from the near-zero initialization, where the
    /// query/key gradients are small enough for finite differences to be
    /// dominated by rounding.
    pub fn perturb(&mut self, seed: u64, scale: f64) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in self.tensors_mut() {
            for x in t.data.iter_mut() {
                *x += rng.gen_range(-scale..scale);
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.data.iter().all(|x| x.is_finite()))
    }
}
