//! The two requirements under which a remainder node keeps its base repair
//! cost after the transformation.

use crate::codes::{RepairStrategy, SystematicCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::{detect_paired_blocks, BitMatrix, BitVector};

use super::TransformConfig;

/// A repair matrix in square `α × α` form together with the rows of that form
/// that the base repair plan consumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct HelperMask {
    pub square: BitMatrix,
    pub compact: Vec<usize>,
}

impl HelperMask {
    pub fn apply(&self, x: &BitVector) -> BitVector {
        self.square.mul_vec(x)
    }

    pub fn compact(&self, masked: &BitVector) -> BitVector {
        BitVector::from_bools(self.compact.iter().map(|&r| masked.get(r)))
    }
}

/// Row selections become diagonal indicators, the same form the base repair
/// plan reads them in; explicit matrices are padded with zero rows. `None` when a matrix has more than `α` rows.
pub(crate) fn helper_mask(
    strategy: &RepairStrategy,
    helper: usize,
    alpha: usize,
) -> Option<HelperMask> {
    match strategy {
        RepairStrategy::Naive => None,
        RepairStrategy::RowSelect { rows } => {
            let mut square = BitMatrix::zeros(alpha, alpha);
            for &r in rows {
                square.set(r, r, true);
            }
            Some(HelperMask {
                square,
                compact: (0..alpha).collect(),
            })
        }
        RepairStrategy::Matrices { helpers } => {
            let s = &helpers[helper];
            if s.rows() > alpha {
                return None;
            }
            let mut square = BitMatrix::zeros(alpha, alpha);
            square.write_block(0, 0, s);
            Some(HelperMask {
                square,
                compact: (0..s.rows()).collect(),
            })
        }
    }
}

/// Checks that every repair matrix of node `i` is paired block-diagonal for
/// segment length `N` and `δ` segments; returns the half-blocks per helper.
pub fn check_r1(
    base: &SystematicCodeSpec,
    i: usize,
    segment_len: usize,
    delta: usize,
) -> Result<Vec<(usize, Vec<BitMatrix>)>> {
    let strategy = base.strategy(i);
    if strategy.is_naive() {
        return Err(Error::InvalidParameters(format!(
            "node {i} repairs naively; R1 concerns matrix-based strategies"
        )));
    }
    (0..base.n())
        .filter(|&s| s != i)
        .map(|s| {
            let mask = helper_mask(strategy, s, base.alpha()).ok_or(Error::R1Violation {
                node: i,
                helper: s,
                row: base.alpha(),
                col: 0,
            })?;
            detect_paired_blocks(&mask.square, segment_len, delta)
                .map(|blocks| (s, blocks))
                .map_err(|m| Error::R1Violation {
                    node: i,
                    helper: s,
                    row: m.row,
                    col: m.col,
                })
        })
        .collect()
}

/// Every target helper of node `i` is read through the same matrix.
pub(crate) fn constant_target_masks(
    base: &SystematicCodeSpec,
    targets: &[usize],
    i: usize,
    alpha: usize,
) -> bool {
    let strategy = base.strategy(i);
    let masks: Vec<Option<BitMatrix>> = targets
        .iter()
        .map(|&t| helper_mask(strategy, t, alpha).map(|m| m.square))
        .collect();
    masks.windows(2).all(|w| w[0] == w[1])
}

/// Symmetric permutations, or the same matrix at every target helper.
pub fn check_r2(base: &SystematicCodeSpec, config: &TransformConfig, i: usize) -> Result<()> {
    if config.perms_symmetric() || constant_target_masks(base, &config.targets, i, base.alpha()) {
        Ok(())
    } else {
        Err(Error::R2Violation { node: i })
    }
}
