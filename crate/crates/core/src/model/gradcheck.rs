use serde::Serialize;

use super::batch::Batch;
use super::loss::LossKind;
use super::weights::Weights;
use super::{Model, ModelError};
use crate::labels::Objective;

#[derive(Debug, Clone, Serialize)]
pub struct TensorCheck {
    pub name: String,
    pub entries: usize,
    pub max_rel_err: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub eps: f64,
    pub tol: f64,
    pub tensors: Vec<TensorCheck>,
}

impl GradCheckReport {
    pub fn max_rel_err(&self) -> f64 {
        self.tensors
            .iter()
            .map(|t| t.max_rel_err)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&TensorCheck> {
        self.tensors
            .iter()
            .filter(|t| t.max_rel_err.is_nan() || t.max_rel_err >= self.tol)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-8)
}

/// Compares `analytic` against central differences of `f` at `params`,
/// perturbing every entry. `params` is restored on return.
pub fn grad_check_fn(
    params: &mut Weights,
    analytic: &Weights,
    eps: f64,
    tol: f64,
    mut f: impl FnMut(&Weights) -> f64,
) -> GradCheckReport {
    let shapes: Vec<(String, usize)> = params
        .tensors()
        .iter()
        .map(|t| (t.name.clone(), t.data.len()))
        .collect();
    let grads: Vec<Vec<f64>> = analytic.tensors().iter().map(|t| t.data.to_vec()).collect();
    let mut tensors = Vec::with_capacity(shapes.len());
    for (ti, (name, len)) in shapes.into_iter().enumerate() {
        let mut check = TensorCheck {
            name,
            entries: len,
            max_rel_err: 0.0,
            worst_index: 0,
            analytic: 0.0,
            numeric: 0.0,
        };
        for (j, &a) in grads[ti].iter().enumerate() {
            let orig = entry(params, ti, j);
            set_entry(params, ti, j, orig + eps);
            let plus = f(params);
            set_entry(params, ti, j, orig - eps);
            let minus = f(params);
            set_entry(params, ti, j, orig);
            let numeric = (plus - minus) / (2.0 * eps);
            let e = rel_err(a, numeric);
            if e > check.max_rel_err || e.is_nan() {
                check.max_rel_err = if e.is_nan() { f64::INFINITY } else { e };
                check.worst_index = j;
                check.analytic = a;
                check.numeric = numeric;
            }
        }
        tensors.push(check);
    }
    GradCheckReport { eps, tol, tensors }
}

fn entry(w: &mut Weights, ti: usize, j: usize) -> f64 {
    w.tensors_mut()[ti].data[j]
}

fn set_entry(w: &mut Weights, ti: usize, j: usize, v: f64) {
    w.tensors_mut()[ti].data[j] = v;
}

/// Finite-difference check of [`Model::loss_and_grads`] on `b` with
/// dropout off. Failures are reported, not returned as errors.
pub fn grad_check(
    model: &Model,
    b: &Batch,
    objectives: &[Objective],
    kind: LossKind,
    eps: f64,
    tol: f64,
) -> Result<GradCheckReport, ModelError> {
    let (_, analytic) = model.loss_and_grads(b, objectives, kind, None)?;
    let mut probe = model.clone();
    let mut params = std::mem::replace(&mut probe.weights, analytic.zeros_like());
    let report = grad_check_fn(&mut params, &analytic, eps, tol, |w| {
        probe.weights.clone_from(w);
        probe.loss_value(b, objectives, kind).unwrap_or(f64::NAN)
    });
    Ok(report)
}
