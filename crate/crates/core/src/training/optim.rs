use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::model::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub lr: f64,
    pub betas: (f64, f64),
    pub eps: f64,
    pub weight_decay: f64,
}

impl OptimizerConfig {
    fn with_lr(lr: f64) -> Self {
        OptimizerConfig {
            lr,
            betas: (0.9, 0.999),
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }

    /// Pre-training rate used with full-size pretrained encoders.
    pub fn reference_pretrain() -> Self {
        Self::with_lr(6e-5)
    }

    /// Fine-tuning rate used with full-size pretrained encoders.
    pub fn reference_finetune() -> Self {
        Self::with_lr(5e-6)
    }

    /// Randomly initialised desk-scale encoders need larger steps to move
    /// within a few epochs.
    pub fn desk_pretrain() -> Self {
        Self::with_lr(1e-3)
    }

    pub fn desk_finetune() -> Self {
        Self::with_lr(5e-4)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad =
            |field: &'static str, reason: String| Err(TrainError::InvalidConfig { field, reason });
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr", format!("{} is not a positive finite rate", self.lr));
        }
        for (name, b) in [("betas.0", self.betas.0), ("betas.1", self.betas.1)] {
            if !(0.0..1.0).contains(&b) {
                return bad(name, format!("{b} is outside [0, 1)"));
            }
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return bad("eps", format!("{} must be positive", self.eps));
        }
        if self.weight_decay.is_nan() || self.weight_decay < 0.0 {
            return bad(
                "weight_decay",
                format!("{} must be non-negative", self.weight_decay),
            );
        }
        Ok(())
    }
}

/// One AdamW update of a flat tensor at step `t` (1-based). Decay is applied
/// to the parameter directly, before and independent of the adaptive step.
/// Nothing is modified when `grads` holds a non-finite value.
pub fn adamw_step(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    cfg: &OptimizerConfig,
    lr: f64,
    t: u64,
) -> Result<(), TrainError> {
    assert!(t >= 1, "AdamW steps are 1-based");
    assert!(params.len() == grads.len() && m.len() == params.len() && v.len() == params.len());
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(TrainError::NonFiniteGradient);
    }
    let (b1, b2) = cfg.betas;
    let c1 = 1.0 - b1.powi(t as i32);
    let c2 = 1.0 - b2.powi(t as i32);
    let decay = 1.0 - lr * cfg.weight_decay;
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        let mhat = m[i] / c1;
        let vhat = v[i] / c2;
        params[i] = params[i] * decay - lr * mhat / (vhat.sqrt() + cfg.eps);
    }
    Ok(())
}

/// AdamW over a whole [`Weights`] set. Tensors outside the active set are
/// left untouched, weight decay included.
pub struct AdamW {
    pub config: OptimizerConfig,
    m: Weights,
    v: Weights,
    t: u64,
}

impl AdamW {
    pub fn new(config: OptimizerConfig, like: &Weights) -> Self {
        AdamW {
            config,
            m: like.zeros_like(),
            v: like.zeros_like(),
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Applies one step with learning rate `lr` to tensors whose name passes
    /// `active`. On a non-finite gradient nothing changes and an error is
    /// returned.
    pub fn step(
        &mut self,
        params: &mut Weights,
        grads: &Weights,
        lr: f64,
        active: impl Fn(&str) -> bool,
    ) -> Result<(), TrainError> {
        let g = grads.tensors();
        let selected: Vec<bool> = g.iter().map(|t| active(&t.name)).collect();
        if g.iter()
            .zip(&selected)
            .any(|(t, &on)| on && t.data.iter().any(|x| !x.is_finite()))
        {
            return Err(TrainError::NonFiniteGradient);
        }
        self.t += 1;
        let t = self.t;
        let ps = params.tensors_mut();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        for ((((p, gr), m), v), on) in ps.into_iter().zip(&g).zip(ms).zip(vs).zip(&selected) {
            if *on {
                adamw_step(p.data, gr.data, m.data, v.data, &self.config, lr, t)?;
            }
        }
        debug_assert!(params.all_finite() && self.m.all_finite() && self.v.all_finite());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grad_zero_decay_is_identity() {
        let cfg = OptimizerConfig {
            weight_decay: 0.0,
            ..OptimizerConfig::reference_pretrain()
        };
        let mut p = [0.3, -2.0];
        let (mut m, mut v) = ([0.0; 2], [0.0; 2]);
        for t in 1..=5 {
            adamw_step(&mut p, &[0.0, 0.0], &mut m, &mut v, &cfg, cfg.lr, t).unwrap();
        }
        assert_eq!(p, [0.3, -2.0]);
    }

    #[test]
    fn nan_gradient_aborts_without_mutation() {
        let cfg = OptimizerConfig::desk_pretrain();
        let mut p = [1.0, 2.0];
        let (mut m, mut v) = ([0.1; 2], [0.2; 2]);
        let r = adamw_step(&mut p, &[0.5, f64::NAN], &mut m, &mut v, &cfg, cfg.lr, 3);
        assert!(matches!(r, Err(TrainError::NonFiniteGradient)));
        assert_eq!((p, m, v), ([1.0, 2.0], [0.1; 2], [0.2; 2]));
    }

    #[test]
    fn presets_validate() {
        for c in [
            OptimizerConfig::reference_pretrain(),
            OptimizerConfig::reference_finetune(),
            OptimizerConfig::desk_pretrain(),
            OptimizerConfig::desk_finetune(),
        ] {
            c.validate().unwrap();
        }
        assert_eq!(OptimizerConfig::reference_pretrain().lr, 6e-5);
        assert_eq!(OptimizerConfig::reference_finetune().lr, 5e-6);
        let bad = OptimizerConfig {
            betas: (1.0, 0.9),
            ..OptimizerConfig::desk_pretrain()
        };
        assert!(bad.validate().is_err());
    }
}
