use ndarray::{s, Array2, Array3, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::batch::Batch;
use super::config::SEGMENTS;
use super::ops::{self, NormCache};
use super::weights::Weights;
use super::{Model, ModelError};

struct LayerCache {
    input: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    /// `probs[b * heads + h]` is the `L × L` attention matrix.
    probs: Vec<Array2<f64>>,
    ctx: Array2<f64>,
    attn_drop: Option<Array2<f64>>,
    attn_norm: NormCache,
    mid: Array2<f64>,
    ff_pre: Array2<f64>,
    ff_act: Array2<f64>,
    ff_drop: Option<Array2<f64>>,
    ff_norm: NormCache,
}

struct TapeData {
    rows: usize,
    len: usize,
    ids: Vec<usize>,
    segments: Vec<usize>,
    emb_norm: NormCache,
    emb_drop: Option<Array2<f64>>,
    layers: Vec<LayerCache>,
}

/// Activations recorded by [`Model::forward_recorded`], consumed by
/// [`Model::backward`].
#[derive(Default)]
pub struct Tape {
    data: Option<TapeData>,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn is_recorded(&self) -> bool {
        self.data.is_some()
    }
}

fn dropout_mask(
    rng: &mut Option<&mut ChaCha8Rng>,
    p: f64,
    shape: (usize, usize),
) -> Option<Array2<f64>> {
    let rng = rng.as_mut()?;
    if p <= 0.0 {
        return None;
    }
    let keep = 1.0 / (1.0 - p);
    Some(Array2::from_shape_simple_fn(shape, || {
        if rng.gen::<f64>() < p {
            0.0
        } else {
            keep
        }
    }))
}

fn apply_mask(x: &mut Array2<f64>, mask: &Option<Array2<f64>>) {
    if let Some(m) = mask {
        *x *= m;
    }
}

impl Model {
    /// Encoder forward pass: `[batch, L, hidden]`. Dropout is active iff an
    /// RNG is supplied.
    pub fn forward(
        &self,
        b: &Batch,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Array3<f64>, ModelError> {
        self.run(b, rng, None)
    }

    /// Forward pass that records activations for a later [`Model::backward`].
    pub fn forward_recorded(
        &self,
        b: &Batch,
        rng: Option<&mut ChaCha8Rng>,
        tape: &mut Tape,
    ) -> Result<Array3<f64>, ModelError> {
        self.run(b, rng, Some(tape))
    }

    fn check_input(&self, b: &Batch) -> Result<(), ModelError> {
        let (rows, len) = b.ids.dim();
        if rows == 0 || len == 0 {
            return Err(ModelError::EmptyBatch);
        }
        if len > self.config.max_len {
            return Err(ModelError::InputOutOfRange(format!(
                "sequence length {len} exceeds max_len {}",
                self.config.max_len
            )));
        }
        if b.segments.dim() != (rows, len) || b.attention_mask.dim() != (rows, len) {
            return Err(ModelError::Shape(
                "ids, segments and attention mask differ in shape".into(),
            ));
        }
        if let Some(id) = b
            .ids
            .iter()
            .find(|&&id| id as usize >= self.config.vocab_size)
        {
            return Err(ModelError::InputOutOfRange(format!(
                "token id {id} >= vocab_size {}",
                self.config.vocab_size
            )));
        }
        if let Some(s) = b.segments.iter().find(|&&s| s as usize >= SEGMENTS) {
            return Err(ModelError::InputOutOfRange(format!("segment id {s}")));
        }
        if b.attention_mask
            .rows()
            .into_iter()
            .any(|r| !r.iter().any(|&m| m))
        {
            return Err(ModelError::InputOutOfRange(
                "sequence with no unmasked position".into(),
            ));
        }
        Ok(())
    }

    fn run(
        &self,
        b: &Batch,
        mut rng: Option<&mut ChaCha8Rng>,
        tape: Option<&mut Tape>,
    ) -> Result<Array3<f64>, ModelError> {
        self.check_input(b)?;
        let cfg = &self.config;
        let w = &self.weights;
        let (rows, len) = b.ids.dim();
        let h = cfg.hidden;
        let n = rows * len;
        let p = cfg.dropout;

        let ids: Vec<usize> = b.ids.iter().map(|&i| i as usize).collect();
        let segments: Vec<usize> = b.segments.iter().map(|&s| s as usize).collect();
        let mut x = Array2::zeros((n, h));
        for (r, mut row) in x.rows_mut().into_iter().enumerate() {
            row += &w.token_emb.row(ids[r]);
            row += &w.position_emb.row(r % len);
            row += &w.segment_emb.row(segments[r]);
        }
        let (mut x, emb_norm) = ops::layer_norm(&x, &w.emb_norm);
        let emb_drop = dropout_mask(&mut rng, p, (n, h));
        apply_mask(&mut x, &emb_drop);

        let recording = tape.is_some();
        let mut caches = Vec::with_capacity(cfg.layers);
        for layer in &w.layers {
            let q = ops::linear(&x.view(), &layer.query);
            let k = x.dot(&layer.key);
            let v = ops::linear(&x.view(), &layer.value);
            let (ctx, probs) = attention(&q, &k, &v, &b.attention_mask, cfg.heads);
            let mut a = ops::linear(&ctx.view(), &layer.attn_out);
            let attn_drop = dropout_mask(&mut rng, p, (n, h));
            apply_mask(&mut a, &attn_drop);
            a += &x;
            let (mid, attn_norm) = ops::layer_norm(&a, &layer.attn_norm);
            let ff_pre = ops::linear(&mid.view(), &layer.ff_in);
            let ff_act = ff_pre.mapv(ops::gelu);
            let mut f = ops::linear(&ff_act.view(), &layer.ff_out);
            let ff_drop = dropout_mask(&mut rng, p, (n, h));
            apply_mask(&mut f, &ff_drop);
            f += &mid;
            let (out, ff_norm) = ops::layer_norm(&f, &layer.ff_norm);
            let input = std::mem::replace(&mut x, out);
            if recording {
                caches.push(LayerCache {
                    input,
                    q,
                    k,
                    v,
                    probs,
                    ctx,
                    attn_drop,
                    attn_norm,
                    mid,
                    ff_pre,
                    ff_act,
                    ff_drop,
                    ff_norm,
                });
            }
        }
        if let Some(tape) = tape {
            tape.data = Some(TapeData {
                rows,
                len,
                ids,
                segments,
                emb_norm,
                emb_drop,
                layers: caches,
            });
        }
        Ok(x.into_shape_with_order((rows, len, h)).expect("row-major"))
    }

    /// Attention probabilities per layer, `[layer][row * heads + head]`,
    /// from a dropout-free pass.
    pub fn attention_probs(&self, b: &Batch) -> Result<Vec<Vec<Array2<f64>>>, ModelError> {
        let mut tape = Tape::new();
        self.forward_recorded(b, None, &mut tape)?;
        let data = tape.data.expect("recorded");
        Ok(data.layers.into_iter().map(|l| l.probs).collect())
    }

    /// Reverse pass through the recorded forward. `d_hidden` is
    /// `dL/d hidden` with the shape of the forward output. Consumes the tape.
    pub fn backward(&self, tape: &mut Tape, d_hidden: &Array3<f64>) -> Result<Weights, ModelError> {
        let data = tape.data.take().ok_or(ModelError::NoForward)?;
        let cfg = &self.config;
        let w = &self.weights;
        let h = cfg.hidden;
        let n = data.rows * data.len;
        if d_hidden.dim() != (data.rows, data.len, h) {
            return Err(ModelError::Shape(format!(
                "gradient shape {:?} does not match recorded output ({}, {}, {h})",
                d_hidden.dim(),
                data.rows,
                data.len
            )));
        }
        let mut g = w.zeros_like();
        let mut dx = d_hidden
            .to_owned()
            .into_shape_with_order((n, h))
            .expect("row-major");

        for (li, c) in data.layers.iter().enumerate().rev() {
            let layer = &w.layers[li];
            let gl = &mut g.layers[li];
            let mut d_mid =
                ops::layer_norm_backward(&dx, &c.ff_norm, &layer.ff_norm, &mut gl.ff_norm);
            let mut d_f = d_mid.clone();
            apply_mask(&mut d_f, &c.ff_drop);
            let mut d_act =
                ops::linear_backward(&c.ff_act.view(), &d_f.view(), &layer.ff_out, &mut gl.ff_out);
            ndarray::Zip::from(&mut d_act)
                .and(&c.ff_pre)
                .for_each(|d, &z| *d *= ops::gelu_grad(z));
            d_mid +=
                &ops::linear_backward(&c.mid.view(), &d_act.view(), &layer.ff_in, &mut gl.ff_in);

            let d_a =
                ops::layer_norm_backward(&d_mid, &c.attn_norm, &layer.attn_norm, &mut gl.attn_norm);
            let mut d_in = d_a.clone();
            let mut d_attn = d_a;
            apply_mask(&mut d_attn, &c.attn_drop);
            let d_ctx = ops::linear_backward(
                &c.ctx.view(),
                &d_attn.view(),
                &layer.attn_out,
                &mut gl.attn_out,
            );
            let (dq, dk, dv) =
                attention_backward(&d_ctx, &c.q, &c.k, &c.v, &c.probs, data.rows, cfg.heads);
            d_in += &ops::linear_backward(&c.input.view(), &dq.view(), &layer.query, &mut gl.query);
            gl.key += &c.input.t().dot(&dk);
            d_in += &dk.dot(&layer.key.t());
            d_in += &ops::linear_backward(&c.input.view(), &dv.view(), &layer.value, &mut gl.value);
            dx = d_in;
        }

        apply_mask(&mut dx, &data.emb_drop);
        let d_emb = ops::layer_norm_backward(&dx, &data.emb_norm, &w.emb_norm, &mut g.emb_norm);
        for (r, row) in d_emb.rows().into_iter().enumerate() {
            let mut t = g.token_emb.row_mut(data.ids[r]);
            t += &row;
            let mut pos = g.position_emb.row_mut(r % data.len);
            pos += &row;
            let mut seg = g.segment_emb.row_mut(data.segments[r]);
            seg += &row;
        }
        Ok(g)
    }
}

/// Multi-head scaled dot-product attention over `rows` sequences stacked in
/// `q`, `k`, `v` (each `(rows·L) × hidden`). Keys where `mask` is false get
/// `-inf` logits.
fn attention(
    q: &Array2<f64>,
    k: &Array2<f64>,
    v: &Array2<f64>,
    mask: &ndarray::Array2<bool>,
    heads: usize,
) -> (Array2<f64>, Vec<Array2<f64>>) {
    let (rows, len) = mask.dim();
    let hidden = q.ncols();
    let dh = hidden / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut ctx = Array2::zeros((rows * len, hidden));
    let mut probs = Vec::with_capacity(rows * heads);
    for r in 0..rows {
        let span = r * len..(r + 1) * len;
        let keep = mask.row(r);
        for hd in 0..heads {
            let cols = hd * dh..(hd + 1) * dh;
            let qh = q.slice(s![span.clone(), cols.clone()]);
            let kh = k.slice(s![span.clone(), cols.clone()]);
            let vh = v.slice(s![span.clone(), cols.clone()]);
            let mut sc = qh.dot(&kh.t()) * scale;
            for (j, &m) in keep.iter().enumerate() {
                if !m {
                    sc.column_mut(j).fill(f64::NEG_INFINITY);
                }
            }
            ops::softmax_rows(&mut sc);
            ctx.slice_mut(s![span.clone(), cols]).assign(&sc.dot(&vh));
            probs.push(sc);
        }
    }
    (ctx, probs)
}

fn attention_backward(
    d_ctx: &Array2<f64>,
    q: &Array2<f64>,
    k: &Array2<f64>,
    v: &Array2<f64>,
    probs: &[Array2<f64>],
    rows: usize,
    heads: usize,
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let hidden = q.ncols();
    let len = q.nrows() / rows;
    let dh = hidden / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut dq = Array2::zeros(q.raw_dim());
    let mut dk = Array2::zeros(k.raw_dim());
    let mut dv = Array2::zeros(v.raw_dim());
    for r in 0..rows {
        let span = r * len..(r + 1) * len;
        for hd in 0..heads {
            let cols = hd * dh..(hd + 1) * dh;
            let p = &probs[r * heads + hd];
            let dc: ArrayView2<f64> = d_ctx.slice(s![span.clone(), cols.clone()]);
            let qh = q.slice(s![span.clone(), cols.clone()]);
            let kh = k.slice(s![span.clone(), cols.clone()]);
            let vh = v.slice(s![span.clone(), cols.clone()]);
            dv.slice_mut(s![span.clone(), cols.clone()])
                .assign(&p.t().dot(&dc));
            let dp = dc.dot(&vh.t());
            let mut ds = p * &dp;
            let row_dot = ds.sum_axis(Axis(1));
            for (mut row, (prow, &rd)) in ds
                .rows_mut()
                .into_iter()
                .zip(p.rows().into_iter().zip(row_dot.iter()))
            {
                row.zip_mut_with(&prow, |d, &pv| *d -= pv * rd);
            }
            ds *= scale;
            dq.slice_mut(s![span.clone(), cols.clone()])
                .assign(&ds.dot(&kh));
            dk.slice_mut(s![span.clone(), cols])
                .assign(&ds.t().dot(&qh));
        }
    }
    (dq, dk, dv)
}
