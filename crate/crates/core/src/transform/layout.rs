//! Step 2 and step 3 of the transformation on per-instance data.
//!
//! Arrays are indexed `[l][j]`: instance `l`, target `j`.

use crate::error::Result;
use crate::gf2::BitVector;
use crate::pairing::{boxplus, unpair};

use super::TransformConfig;

/// `h_j^{(l)} = g^{(l)}` at node `τ(π_l(j))`, where `instances[l]` holds the
/// `n` payloads of instance `l`.
pub fn permute_targets(
    instances: &[Vec<BitVector>],
    config: &TransformConfig,
) -> Vec<Vec<BitVector>> {
    let r = config.r();
    (0..r)
        .map(|l| {
            (0..r)
                .map(|j| instances[l][config.targets[config.perms[l][j]]].clone())
                .collect()
        })
        .collect()
}

/// `h′_j^{(j)} = h_j^{(j)}`, `h′_j^{(l)} = h_j^{(l)} + h_l^{(j)}` for `j > l`
/// and `h_j^{(l)} ⊞_N h_l^{(j)}` for `j < l`.
pub fn pair_targets(h: &[Vec<BitVector>], segment_len: usize) -> Result<Vec<Vec<BitVector>>> {
    let r = h.len();
    let mut out = h.to_vec();
    for l in 0..r {
        for j in 0..r {
            if j > l {
                out[l][j] = &h[l][j] ^ &h[j][l];
            } else if j < l {
                out[l][j] = boxplus(&h[l][j], &h[j][l], segment_len)?;
            }
        }
    }
    Ok(out)
}

/// Inverse of [`pair_targets`].
///
/// Also yields the `v` vectors of the systematic variant: pairing `v` gives
/// back `h`.
pub fn unpair_targets(
    paired: &[Vec<BitVector>],
    segment_len: usize,
) -> Result<Vec<Vec<BitVector>>> {
    let r = paired.len();
    let mut out = paired.to_vec();
    for l in 0..r {
        for j in l + 1..r {
            // sum = h_j^{(l)} + h_l^{(j)}, boxed = h_l^{(j)} ⊞ h_j^{(l)}
            let (a, b) = unpair(&paired[l][j], &paired[j][l], segment_len)?;
            out[j][l] = a;
            out[l][j] = b;
        }
    }
    Ok(out)
}
