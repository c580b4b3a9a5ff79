//! Binary checkpoint: magic, format version, config JSON, then every named
//! tensor as row-major little-endian f64.

use std::io::{Read, Write};
use std::path::Path;

use super::config::ModelConfig;
use super::weights::Weights;
use super::{Model, ModelError};

pub const MAGIC: &[u8; 8] = b"LGPTCKPT";
pub const FORMAT_VERSION: u32 = 1;

fn corrupt(msg: impl Into<String>) -> ModelError {
    ModelError::Checkpoint(msg.into())
}

impl Model {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        let cfg = serde_json::to_vec(&self.config).expect("config serializes");
        out.extend_from_slice(&(cfg.len() as u64).to_le_bytes());
        out.extend_from_slice(&cfg);
        let tensors = self.weights.tensors();
        out.extend_from_slice(&(tensors.len() as u64).to_le_bytes());
        for t in tensors {
            out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
            out.extend_from_slice(t.name.as_bytes());
            out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
            for &d in &t.shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for &x in t.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Model, ModelError> {
        let mut r = bytes;
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| corrupt("truncated header"))?;
        if &magic != MAGIC {
            return Err(corrupt("not a checkpoint (bad magic)"));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(corrupt(format!("unsupported format version {version}")));
        }
        let cfg_len = read_u64(&mut r)? as usize;
        let cfg_bytes = take(&mut r, cfg_len)?;
        let config: ModelConfig =
            serde_json::from_slice(cfg_bytes).map_err(|e| corrupt(format!("config block: {e}")))?;
        config.validate()?;
        let mut weights = Weights::zeros(&config);
        let count = read_u64(&mut r)? as usize;
        let mut tensors = weights.tensors_mut();
        if count != tensors.len() {
            return Err(corrupt(format!(
                "{count} tensors, config implies {}",
                tensors.len()
            )));
        }
        for t in tensors.iter_mut() {
            let name_len = read_u32(&mut r)? as usize;
            let name = std::str::from_utf8(take(&mut r, name_len)?)
                .map_err(|_| corrupt("tensor name not UTF-8"))?;
            if name != t.name {
                return Err(corrupt(format!("expected tensor {}, found {name}", t.name)));
            }
            let ndim = read_u32(&mut r)? as usize;
            let mut shape = Vec::with_capacity(ndim);
            for _ in 0..ndim {
                shape.push(read_u64(&mut r)? as usize);
            }
            if shape != t.shape {
                return Err(corrupt(format!(
                    "tensor {name}: shape {shape:?}, expected {:?}",
                    t.shape
                )));
            }
            for x in t.data.iter_mut() {
                let mut b = [0u8; 8];
                r.read_exact(&mut b)
                    .map_err(|_| corrupt(format!("tensor {name} truncated")))?;
                *x = f64::from_le_bytes(b);
            }
        }
        drop(tensors);
        if !r.is_empty() {
            return Err(corrupt(format!("{} trailing bytes", r.len())));
        }
        Ok(Model { config, weights })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Model, ModelError> {
        Model::from_bytes(&std::fs::read(path)?)
    }
}

fn take<'a>(r: &mut &'a [u8], n: usize) -> Result<&'a [u8], ModelError> {
    if r.len() < n {
        return Err(corrupt("truncated"));
    }
    let (head, tail) = r.split_at(n);
    *r = tail;
    Ok(head)
}

fn read_u32(r: &mut &[u8]) -> Result<u32, ModelError> {
    Ok(u32::from_le_bytes(take(r, 4)?.try_into().expect("4 bytes")))
}

fn read_u64(r: &mut &[u8]) -> Result<u64, ModelError> {
    Ok(u64::from_le_bytes(take(r, 8)?.try_into().expect("8 bytes")))
}
