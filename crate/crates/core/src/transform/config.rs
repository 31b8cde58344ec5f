use serde::{Deserialize, Serialize};

use crate::codes::SystematicCodeSpec;
use crate::error::{Error, Result};

use super::conditions::constant_target_masks;

/// Which nodes carry the paired data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Target nodes store the paired combinations.
    PairTargets,
    /// Target nodes keep their data; `r` remainder nodes absorb the pairing so
    /// the code stays systematic.
    PairRemainders,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformConfig {
    /// Node id of target `t`, for `t ∈ [0, r)`.
    pub targets: Vec<usize>,
    /// `perms[l][j] = π_l(j)`.
    pub perms: Vec<Vec<usize>>,
    pub variant: Variant,
    /// Segment length `N`.
    pub segment_len: usize,
    /// Segments per base payload, `α = δ·N`.
    pub delta: usize,
    /// Remainder nodes rewritten by [`Variant::PairRemainders`]; defaults to
    /// the last `r` non-target nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<Vec<usize>>,
}

impl TransformConfig {
    /// Identity permutations, `N = α`, `δ = 1`.
    pub fn new(targets: Vec<usize>, variant: Variant, alpha: usize) -> Self {
        let r = targets.len();
        Self {
            targets,
            perms: identity_perms(r),
            variant,
            segment_len: alpha,
            delta: 1,
            modified: None,
        }
    }

    /// Like [`TransformConfig::new`] but with permutations chosen by
    /// [`default_perms`].
    pub fn for_base(base: &SystematicCodeSpec, targets: Vec<usize>, variant: Variant) -> Self {
        let cfg = Self::new(targets, variant, base.alpha());
        let perms = default_perms(base, &cfg.targets, cfg.segment_len);
        cfg.with_perms(perms)
    }

    pub fn with_perms(mut self, perms: Vec<Vec<usize>>) -> Self {
        self.perms = perms;
        self
    }

    pub fn with_segmentation(mut self, segment_len: usize, delta: usize) -> Self {
        self.segment_len = segment_len;
        self.delta = delta;
        self
    }

    pub fn with_modified(mut self, modified: Vec<usize>) -> Self {
        self.modified = Some(modified);
        self
    }

    pub fn r(&self) -> usize {
        self.targets.len()
    }

    /// `π_l(j) = π_j(l)` for all `l, j`.
    pub fn perms_symmetric(&self) -> bool {
        let r = self.r();
        (0..r).all(|l| (0..r).all(|j| self.perms[l][j] == self.perms[j][l]))
    }

    /// Position in `targets` of `node`.
    pub fn target_index(&self, node: usize) -> Option<usize> {
        self.targets.iter().position(|&t| t == node)
    }

    /// Non-target nodes in increasing order.
    pub fn remainders(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|j| !self.targets.contains(j)).collect()
    }

    pub fn modified_nodes(&self, n: usize) -> Vec<usize> {
        match &self.modified {
            Some(m) => m.clone(),
            None => {
                let rest = self.remainders(n);
                rest[rest.len().saturating_sub(self.r())..].to_vec()
            }
        }
    }

    pub fn validate(&self, base: &SystematicCodeSpec) -> Result<()> {
        let (n, r) = (base.n(), base.r());
        if self.targets.len() != r {
            return Err(Error::BadTargets(format!(
                "{} targets given, the code has r = {r}",
                self.targets.len()
            )));
        }
        check_distinct(&self.targets, n, "target")?;
        if self.perms.len() != r || self.perms.iter().any(|p| !is_permutation(p, r)) {
            return Err(Error::BadTargets(format!(
                "need {r} permutations of [0, {r})"
            )));
        }
        if base.alpha() % 2 == 1 {
            return Err(Error::OddSubpacketization(base.alpha()));
        }
        if self.segment_len % 2 == 1 || self.segment_len == 0 {
            return Err(Error::OddLength(self.segment_len));
        }
        if self.segment_len * self.delta != base.alpha() {
            return Err(Error::ShapeMismatch(format!(
                "N·δ = {}·{} does not equal alpha = {}",
                self.segment_len,
                self.delta,
                base.alpha()
            )));
        }
        if self.variant == Variant::PairRemainders {
            let modified = self.modified_nodes(n);
            if modified.len() != r {
                return Err(Error::BadTargets(format!(
                    "systematic pairing needs {r} remainder nodes to rewrite, found {}",
                    modified.len()
                )));
            }
            check_distinct(&modified, n, "modified")?;
            if let Some(&m) = modified.iter().find(|m| self.targets.contains(m)) {
                return Err(Error::BadTargets(format!(
                    "node {m} is both target and modified"
                )));
            }
        }
        Ok(())
    }
}

fn check_distinct(nodes: &[usize], n: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for &j in nodes {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::BadTargets(format!(
                "{what} nodes {nodes:?} must be distinct ids below {n}"
            )));
        }
    }
    Ok(())
}

fn is_permutation(p: &[usize], r: usize) -> bool {
    let mut seen = vec![false; r];
    p.len() == r
        && p.iter()
            .all(|&x| x < r && !std::mem::replace(&mut seen[x], true))
}

pub fn identity_perms(r: usize) -> Vec<Vec<usize>> {
    (0..r).map(|_| (0..r).collect()).collect()
}

/// `π_l(j) = l + j mod r`.
pub fn cyclic_perms(r: usize) -> Vec<Vec<usize>> {
    (0..r)
        .map(|l| (0..r).map(|j| (l + j) % r).collect())
        .collect()
}

/// Identity when every non-naive remainder node reads the same data from each
/// target, cyclic otherwise.
pub fn default_perms(
    base: &SystematicCodeSpec,
    targets: &[usize],
    alpha: usize,
) -> Vec<Vec<usize>> {
    let r = targets.len();
    let all_constant = (0..base.n())
        .filter(|i| !targets.contains(i))
        .filter(|&i| !base.strategy(i).is_naive())
        .all(|i| constant_target_masks(base, targets, i, alpha));
    if all_constant {
        identity_perms(r)
    } else {
        cyclic_perms(r)
    }
}
