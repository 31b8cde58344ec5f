//! Repair accounting: what each surviving node read and sent.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optimal repair bandwidth `d·α / (d − k + 1)` when `d` helpers are contacted.
pub fn gamma_star(n: usize, k: usize, d: usize, alpha: usize) -> Result<Ratio<u64>> {
    if d < k || d + 1 > n {
        return Err(Error::BadHelperCount {
            d,
            k,
            max: n.saturating_sub(1),
        });
    }
    Ok(Ratio::new((d * alpha) as u64, (d - k + 1) as u64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorCount {
    pub node: usize,
    /// Symbols read from the helper's storage.
    pub accessed: usize,
    /// Symbols sent over the network (rank of the repair matrix).
    pub downloaded: usize,
    /// 0-based symbol indices that were read.
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairReport {
    pub failed: usize,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// One entry per surviving node, in node order; helpers that were not
    /// contacted carry zero counts.
    pub survivors: Vec<SurvivorCount>,
}

impl RepairReport {
    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn total_accessed(&self) -> usize {
        self.survivors.iter().map(|s| s.accessed).sum()
    }

    pub fn total_downloaded(&self) -> usize {
        self.survivors.iter().map(|s| s.downloaded).sum()
    }

    /// `α / r`, the per-helper share at `d = n − 1`.
    pub fn optimal_per_node(&self) -> Ratio<u64> {
        Ratio::new(self.alpha as u64, self.r() as u64)
    }

    pub fn optimal_bandwidth(&self) -> bool {
        let opt = self.optimal_per_node();
        self.survivors
            .iter()
            .all(|s| Ratio::from_integer(s.downloaded as u64) == opt)
    }

    pub fn optimal_access(&self) -> bool {
        let opt = self.optimal_per_node();
        self.survivors
            .iter()
            .all(|s| Ratio::from_integer(s.accessed as u64) == opt)
    }

    /// `downloaded ≤ accessed ≤ α` at every helper and one entry per survivor.
    pub fn is_consistent(&self) -> bool {
        self.survivors.len() + 1 == self.n
            && self.survivors.iter().all(|s| {
                s.downloaded <= s.accessed && s.accessed <= self.alpha && s.node != self.failed
            })
    }

    /// Download per unit of stored data, comparable across sub-packetizations.
    pub fn normalized_bandwidth(&self) -> Ratio<u64> {
        Ratio::new(self.total_downloaded() as u64, self.alpha as u64)
    }

    pub fn normalized_access(&self) -> Ratio<u64> {
        Ratio::new(self.total_accessed() as u64, self.alpha as u64)
    }

    /// Row set shared by every helper, if all helpers read the same rows.
    pub fn common_rows(&self) -> Option<&[usize]> {
        let first = self.survivors.first()?;
        self.survivors
            .iter()
            .all(|s| s.rows == first.rows)
            .then_some(first.rows.as_slice())
    }
}
