//! Sparse JSON checkpoints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::params::{CogParams, Head, SeparateWm, WeightStore};
use crate::error::{Error, Result};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoreKind {
    Cog,
    SeparateWm,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub kind: StoreKind,
    pub version: u64,
    pub hash_seed: u64,
    pub dim: usize,
    /// Non-zero weights per head as `(index, value)` pairs in index order.
    pub heads: BTreeMap<Head, Vec<(u32, f64)>>,
}

fn sparse(w: &[f64]) -> Vec<(u32, f64)> {
    w.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i as u32, *v)).collect()
}

fn dense(entries: &[(u32, f64)], len: usize, head: Head) -> Result<Vec<f64>> {
    let mut w = vec![0.0; len];
    for &(i, v) in entries {
        let slot = w
            .get_mut(i as usize)
            .ok_or_else(|| Error::CheckpointMismatch(format!("{} index {i} out of range", head.as_str())))?;
        *slot = v;
    }
    Ok(w)
}

impl Checkpoint {
    fn capture(store: &impl WeightStore, kind: StoreKind) -> Self {
        let h = store.hasher();
        let heads = Head::ALL.into_iter().filter_map(|hd| store.head(hd).map(|w| (hd, sparse(w)))).collect();
        Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            kind,
            version: store.version(),
            hash_seed: h.seed,
            dim: h.dim,
            heads,
        }
    }

    pub fn from_cog(p: &CogParams) -> Self {
        Self::capture(p, StoreKind::Cog)
    }

    pub fn from_separate(p: &SeparateWm) -> Self {
        Self::capture(p, StoreKind::SeparateWm)
    }

    fn check(&self, kind: StoreKind, dim: usize, hash_seed: u64) -> Result<()> {
        if self.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: self.schema_version, expected: CHECKPOINT_SCHEMA_VERSION });
        }
        if self.kind != kind {
            return Err(Error::CheckpointMismatch(format!("expected {kind:?}, found {:?}", self.kind)));
        }
        if self.dim != dim || self.hash_seed != hash_seed {
            return Err(Error::CheckpointMismatch(format!(
                "dim/hash_seed {}/{} do not match expected {dim}/{hash_seed}",
                self.dim, self.hash_seed
            )));
        }
        Ok(())
    }

    fn head(&self, head: Head) -> Result<Vec<f64>> {
        let entries = self.heads.get(&head).map(Vec::as_slice).unwrap_or_default();
        dense(entries, self.dim * head.width(), head)
    }

    /// Restores a model, requiring the caller's dimension and hash seed.
    pub fn into_cog(&self, dim: usize, hash_seed: u64) -> Result<CogParams> {
        self.check(StoreKind::Cog, dim, hash_seed)?;
        Ok(CogParams {
            hash_seed,
            dim,
            policy_w: self.head(Head::Policy)?,
            trans_w: self.head(Head::Trans)?,
            state_w: self.head(Head::State)?,
            critic_w: self.head(Head::Critic)?,
            version: self.version,
        })
    }

    pub fn into_separate(&self, dim: usize, hash_seed: u64) -> Result<SeparateWm> {
        self.check(StoreKind::SeparateWm, dim, hash_seed)?;
        Ok(SeparateWm { hash_seed, dim, trans_w: self.head(Head::Trans)?, version: self.version })
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("checkpoint serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json()))
    }
}

/// Hex sha256 over the bit patterns of one head's weights.
pub fn weight_hash(store: &impl WeightStore, head: Head) -> String {
    let mut h = Sha256::new();
    if let Some(w) = store.head(head) {
        for v in w {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
