use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

use super::{RepairStrategy, SystematicCodeSpec};

/// Primitive polynomials for GF(2^w), `w = 1..=16`, with the leading term.
const POLYS: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Field {
    w: usize,
    poly: u32,
}

impl Field {
    pub(crate) fn new(w: usize) -> Option<Self> {
        (1..=16).contains(&w).then(|| Self {
            w,
            poly: POLYS[w - 1],
        })
    }

    pub(crate) fn mul(self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.w & 1 == 1 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub(crate) fn inv(self, a: u32) -> u32 {
        assert_ne!(a, 0, "zero has no inverse");
        // a^(2^w − 2)
        let mut result = 1;
        let mut base = a;
        let mut e = (1u32 << self.w) - 2;
        while e != 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// `w × w` binary matrix of multiplication by `e`; column `c` holds the
    /// bits of `e·x^c`.
    pub(crate) fn companion(self, e: u32) -> BitMatrix {
        let cols: Vec<u32> = (0..self.w).map(|c| self.mul(e, 1 << c)).collect();
        BitMatrix::from_fn(self.w, self.w, |r, c| cols[c] >> r & 1 == 1)
    }
}

/// Systematic `(n,k)` code from the Cauchy matrix `1/(x_i + y_j)` over
/// GF(2^w) with `x_i = i` and `y_j = r + j`, expanded to `w × w` binary blocks.
/// All nodes repair naively.
pub fn cauchy_binary_mds(n: usize, k: usize, w: usize) -> Result<SystematicCodeSpec> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParameters(format!(
            "need n > k > 0, got n={n} k={k}"
        )));
    }
    let field = Field::new(w)
        .ok_or_else(|| Error::InvalidParameters(format!("field degree w={w} outside 1..=16")))?;
    if n > 1 << w {
        return Err(Error::FieldTooSmall { n, w });
    }
    let r = n - k;
    let coding = (0..r)
        .map(|i| {
            (0..k)
                .map(|j| field.companion(field.inv((i ^ (r + j)) as u32)))
                .collect()
        })
        .collect();
    SystematicCodeSpec::new(
        format!("cauchy-{n}-{k}-w{w}"),
        n,
        k,
        w,
        coding,
        vec![RepairStrategy::Naive; n],
    )
}
