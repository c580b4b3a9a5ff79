//! Position-wise primitives with their backward passes. Activations are
//! `rows × features` matrices.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};

use super::weights::{LayerNorm, Linear};

pub const LN_EPS: f64 = 1e-12;

pub fn linear(x: &ArrayView2<f64>, lin: &Linear) -> Array2<f64> {
    let mut y = x.dot(&lin.w);
    y += &lin.b;
    y
}

/// Accumulates parameter gradients into `grad` and returns `dL/dx`.
pub fn linear_backward(
    x: &ArrayView2<f64>,
    dy: &ArrayView2<f64>,
    lin: &Linear,
    grad: &mut Linear,
) -> Array2<f64> {
    grad.w += &x.t().dot(dy);
    grad.b += &dy.sum_axis(Axis(0));
    dy.dot(&lin.w.t())
}

pub struct NormCache {
    pub xhat: Array2<f64>,
    pub rstd: Array1<f64>,
}

pub fn layer_norm(x: &Array2<f64>, ln: &LayerNorm) -> (Array2<f64>, NormCache) {
    let n = x.ncols() as f64;
    let mut xhat = x.clone();
    let mut rstd = Array1::zeros(x.nrows());
    for (mut row, r) in xhat.rows_mut().into_iter().zip(rstd.iter_mut()) {
        let mean = row.sum() / n;
        row.mapv_inplace(|v| v - mean);
        let var = row.iter().map(|v| v * v).sum::<f64>() / n;
        *r = 1.0 / (var + LN_EPS).sqrt();
        let s = *r;
        row.mapv_inplace(|v| v * s);
    }
    let y = &xhat * &ln.gamma + &ln.beta;
    (y, NormCache { xhat, rstd })
}

pub fn layer_norm_backward(
    dy: &Array2<f64>,
    cache: &NormCache,
    ln: &LayerNorm,
    grad: &mut LayerNorm,
) -> Array2<f64> {
    grad.gamma += &(dy * &cache.xhat).sum_axis(Axis(0));
    grad.beta += &dy.sum_axis(Axis(0));
    let n = dy.ncols() as f64;
    let mut dx = dy * &ln.gamma;
    for ((mut row, xh), &r) in dx
        .rows_mut()
        .into_iter()
        .zip(cache.xhat.rows())
        .zip(cache.rstd.iter())
    {
        let mean_d = row.sum() / n;
        let mean_dx = row.iter().zip(xh.iter()).map(|(a, b)| a * b).sum::<f64>() / n;
        Zip::from(&mut row)
            .and(&xh)
            .for_each(|d, &h| *d = r * (*d - mean_d - h * mean_dx));
    }
    dx
}

pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

pub fn gelu_grad(x: f64) -> f64 {
    let cdf = 0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    cdf + x * pdf
}

/// Row-wise softmax; `-inf` entries get probability 0.
pub fn softmax_rows(s: &mut Array2<f64>) {
    for mut row in s.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Neumaier summation. Loss totals run over thousands of terms, and plain
/// accumulation leaves enough noise to disturb finite-difference checks.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
