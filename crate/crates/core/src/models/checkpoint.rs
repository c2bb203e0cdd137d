//! JSON checkpoints.
//!
//! Layout (field order fixed):
//!
//! ```text
//! { "version": 1, "kind": "ReciprocalMLP", "dims": {"input", "layers", "classes"},
//!   "alpha": <radians>, "seed": <u64>, "pcn_step": <f64>,
//!   "tensors": [ {"name": "w_in", "shape": [rows, cols], "data": [row-major values]}, ... ] }
//! ```
//!
//! Tensors appear in [`Params::tensors`] order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dims, ModelKind, Network, Params};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub kind: ModelKind,
    pub dims: Dims,
    pub alpha: f64,
    pub seed: u64,
    pub pcn_step: f64,
    pub tensors: Vec<TensorRecord>,
}

impl Checkpoint {
    pub fn from_network(net: &Network, alpha: f64, seed: u64) -> Self {
        let tensors = net
            .params
            .tensors()
            .into_iter()
            .map(|t| TensorRecord {
                name: t.name,
                shape: t.shape,
                data: t.data.to_vec(),
            })
            .collect();
        Self {
            version: CHECKPOINT_VERSION,
            kind: net.kind,
            dims: net.dims.clone(),
            alpha,
            seed,
            pcn_step: net.pcn_step,
            tensors,
        }
    }

    pub fn to_network(&self) -> Result<Network> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {}",
                self.version
            )));
        }
        self.dims.validate()?;
        let mut params: Params = Params::zeros(self.kind, &self.dims);
        let slots = params.tensors_mut();
        let shapes: Vec<_> = Params::<f64>::zeros(self.kind, &self.dims)
            .tensors()
            .into_iter()
            .map(|t| t.shape)
            .collect();
        if slots.len() != self.tensors.len() {
            return Err(Error::Checkpoint(format!(
                "{} tensors stored, {} expected",
                self.tensors.len(),
                slots.len()
            )));
        }
        for ((slot, rec), shape) in slots.into_iter().zip(&self.tensors).zip(shapes) {
            if slot.name != rec.name || shape != rec.shape || rec.data.len() != slot.data.len() {
                return Err(Error::Checkpoint(format!(
                    "tensor {} {:?} does not match expected {} {:?}",
                    rec.name, rec.shape, slot.name, shape
                )));
            }
            slot.data.copy_from_slice(&rec.data);
        }
        let mut net = Network::new(self.kind, self.dims.clone(), params)?;
        net.pcn_step = self.pcn_step;
        Ok(net)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}
