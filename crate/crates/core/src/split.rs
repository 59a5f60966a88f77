//! Deterministic train/validation/test assignment of blocks.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
    /// Every block.
    All,
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            "all" => Ok(Split::All),
            other => Err(format!("unknown split {other:?} (train, validation, test, all)")),
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::All => "all",
        })
    }
}

/// Assigns each block id to a split by a seeded hash, so membership does
/// not change when other blocks are added or removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSelector {
    pub seed: u64,
    /// Percent of buckets in train, then validation; the rest is test.
    pub train_pct: u8,
    pub validation_pct: u8,
}

impl Default for SplitSelector {
    fn default() -> Self {
        Self {
            seed: 0,
            train_pct: 80,
            validation_pct: 10,
        }
    }
}

impl SplitSelector {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if u16::from(self.train_pct) + u16::from(self.validation_pct) > 100 {
            return Err("train_pct + validation_pct exceeds 100".into());
        }
        Ok(())
    }

    /// Bucket in 0..100.
    pub fn bucket(&self, block_id: &str) -> u8 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(block_id.as_bytes());
        let digest = h.finalize();
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        (u64::from_be_bytes(first) % 100) as u8
    }

    pub fn assign(&self, block_id: &str) -> Split {
        let b = self.bucket(block_id);
        if b < self.train_pct {
            Split::Train
        } else if b < self.train_pct.saturating_add(self.validation_pct) {
            Split::Validation
        } else {
            Split::Test
        }
    }

    pub fn contains(&self, split: Split, block_id: &str) -> bool {
        split == Split::All || self.assign(block_id) == split
    }
}
