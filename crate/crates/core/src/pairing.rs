//! Half-split pairing of two binary vectors.
//!
//! A segment of even length `N` splits into halves `[0]` and `[1]`. The box
//! operator mixes a partner into a segment as
//!
//! ```text
//! a ⊞ b = ( a[0] + b[0] + b[1] ;  a[1] + b[0] )
//! ```
//!
//! and `⊞_N` applies it segment by segment. Together with plain XOR it forms
//! an invertible pair: `(a, b) ↦ (a + b, a ⊞_N b)` is a bijection, which is
//! what lets the transformation store mixed data without losing information
//! while using only XORs.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// A vector viewed as `segments` consecutive blocks of even length `segment_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentedVector {
    vec: BitVector,
    segment_len: usize,
}

impl SegmentedVector {
    pub fn new(vec: BitVector, segment_len: usize) -> Result<Self> {
        check_layout(vec.len(), segment_len)?;
        Ok(Self { vec, segment_len })
    }

    pub fn zeros(segments: usize, segment_len: usize) -> Result<Self> {
        Self::new(BitVector::zeros(segments * segment_len), segment_len)
    }

    pub fn segments(&self) -> usize {
        self.vec.len() / self.segment_len
    }

    pub fn segment_len(&self) -> usize {
        self.segment_len
    }

    pub fn as_bits(&self) -> &BitVector {
        &self.vec
    }

    pub fn into_bits(self) -> BitVector {
        self.vec
    }

    pub fn segment(&self, i: usize) -> BitVector {
        self.vec.slice(i * self.segment_len, self.segment_len)
    }

    /// Half `h ∈ {0, 1}` of segment `i`.
    pub fn half(&self, i: usize, h: usize) -> BitVector {
        let half = self.segment_len / 2;
        self.vec.slice(i * self.segment_len + h * half, half)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.segment_len != other.segment_len || self.vec.len() != other.vec.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.segments(),
                self.segment_len,
                other.segments(),
                other.segment_len
            )));
        }
        Ok(())
    }
}

fn check_layout(len: usize, segment_len: usize) -> Result<()> {
    if segment_len == 0 || segment_len % 2 == 1 {
        return Err(Error::OddLength(segment_len));
    }
    if !len.is_multiple_of(segment_len) {
        return Err(Error::ShapeMismatch(format!(
            "length {len} is not a multiple of segment length {segment_len}"
        )));
    }
    Ok(())
}

/// Which combination of an unknown `a` with a known `b` was stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `a ⊞_N b`
    ABoxB,
    /// `b ⊞_N a`
    BBoxA,
    /// `a + b`
    APlusB,
}

/// Applies a per-segment rule that combines the four input halves into two
/// output halves.
fn map_halves(
    a: &BitVector,
    b: &BitVector,
    segment_len: usize,
    rule: impl Fn([&BitVector; 4]) -> (BitVector, BitVector),
) -> Result<(BitVector, BitVector)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    check_layout(a.len(), segment_len)?;
    let half = segment_len / 2;
    let mut out0 = BitVector::zeros(a.len());
    let mut out1 = BitVector::zeros(a.len());
    for seg in 0..a.len() / segment_len {
        let base = seg * segment_len;
        let (a0, a1) = (a.slice(base, half), a.slice(base + half, half));
        let (b0, b1) = (b.slice(base, half), b.slice(base + half, half));
        let (p, q) = rule([&a0, &a1, &b0, &b1]);
        // the rule returns segment-sized results packed as (first, second)
        out0.write(base, &p.slice(0, half));
        out0.write(base + half, &p.slice(half, half));
        out1.write(base, &q.slice(0, half));
        out1.write(base + half, &q.slice(half, half));
    }
    Ok((out0, out1))
}

fn join(lo: &BitVector, hi: &BitVector) -> BitVector {
    BitVector::concat([lo, hi])
}

/// `a ⊞_N b` on raw bit vectors.
pub fn boxplus(a: &BitVector, b: &BitVector, segment_len: usize) -> Result<BitVector> {
    let (out, _) = map_halves(a, b, segment_len, |[a0, a1, b0, b1]| {
        let lo = &(a0 ^ b0) ^ b1;
        let hi = a1 ^ b0;
        let seg = join(&lo, &hi);
        (seg.clone(), seg)
    })?;
    Ok(out)
}

/// The box operator on a single segment.
pub fn boxplus_segment(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    boxplus(a, b, a.len())
}

pub fn boxplus_n(a: &SegmentedVector, b: &SegmentedVector) -> Result<SegmentedVector> {
    a.same_shape(b)?;
    let out = boxplus(&a.vec, &b.vec, a.segment_len)?;
    SegmentedVector::new(out, a.segment_len)
}

/// Recovers `(a, b)` from `sum = a + b` and `boxed = a ⊞_N b`.
///
/// Per segment: `b[1] = x[0] + y[0]`, `b[0] = x[1] + y[1] + b[1]`, then
/// `a = x + b`.
pub fn unpair(
    sum: &BitVector,
    boxed: &BitVector,
    segment_len: usize,
) -> Result<(BitVector, BitVector)> {
    map_halves(sum, boxed, segment_len, |[x0, x1, y0, y1]| {
        let b1 = x0 ^ y0;
        let b0 = &(x1 ^ y1) ^ &b1;
        let a0 = x0 ^ &b0;
        let a1 = x1 ^ &b1;
        (join(&a0, &a1), join(&b0, &b1))
    })
}

pub fn unpair_sum_box(
    x: &SegmentedVector,
    y: &SegmentedVector,
) -> Result<(SegmentedVector, SegmentedVector)> {
    x.same_shape(y)?;
    let (a, b) = unpair(&x.vec, &y.vec, x.segment_len)?;
    Ok((
        SegmentedVector::new(a, x.segment_len)?,
        SegmentedVector::new(b, x.segment_len)?,
    ))
}

/// Recovers `a` from the known partner `b` and one stored combination.
pub fn cancel(
    known_b: &BitVector,
    combo: &BitVector,
    kind: PairKind,
    segment_len: usize,
) -> Result<BitVector> {
    let (a, _) = match kind {
        PairKind::APlusB => map_halves(combo, known_b, segment_len, |[c0, c1, b0, b1]| {
            let seg = join(&(c0 ^ b0), &(c1 ^ b1));
            (seg.clone(), seg)
        })?,
        // c = (a0 + b0 + b1 ; a1 + b0)
        PairKind::ABoxB => map_halves(combo, known_b, segment_len, |[c0, c1, b0, b1]| {
            let seg = join(&(&(c0 ^ b0) ^ b1), &(c1 ^ b0));
            (seg.clone(), seg)
        })?,
        // c = (b0 + a0 + a1 ; b1 + a0)
        PairKind::BBoxA => map_halves(combo, known_b, segment_len, |[c0, c1, b0, b1]| {
            let a0 = c1 ^ b1;
            let a1 = &(c0 ^ b0) ^ &a0;
            let seg = join(&a0, &a1);
            (seg.clone(), seg)
        })?,
    };
    Ok(a)
}

pub fn cancel_partner(
    known_b: &SegmentedVector,
    combo: &SegmentedVector,
    kind: PairKind,
) -> Result<SegmentedVector> {
    known_b.same_shape(combo)?;
    let a = cancel(&known_b.vec, &combo.vec, kind, known_b.segment_len)?;
    SegmentedVector::new(a, known_b.segment_len)
}

/// Recovers `(S·a, S·b)` for `S = diag(S′, S′)` from `S(a + b)` and `S(a ⊞ b)`.
///
/// The unpairing formulas only add halves together, and `S` acts on both
/// halves through the same `S′`, so they apply verbatim to the masked halves.
/// `s_half` fixes the expected shape: `sx` and `sy` must have `2·rows(S′)`
/// entries.
pub fn masked_unpair(
    sx: &BitVector,
    sy: &BitVector,
    s_half: &BitMatrix,
) -> Result<(BitVector, BitVector)> {
    let expected = 2 * s_half.rows();
    for v in [sx, sy] {
        if v.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "masked vector of length {} for a {}x{} half-block",
                v.len(),
                s_half.rows(),
                s_half.cols()
            )));
        }
    }
    if expected == 0 {
        return Ok((BitVector::zeros(0), BitVector::zeros(0)));
    }
    unpair(sx, sy, expected)
}
