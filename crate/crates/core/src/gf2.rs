//! Exact linear algebra over GF(2).
//!
//! Vectors are bit-packed into `u64` words, least significant bit first. All
//! code symbols in this crate are single bits, so node payloads, messages and
//! linear forms over message bits are all [`BitVector`]s.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A column vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Vector of length `len` with ones exactly at `ones`.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_indices(len, &[i])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.gen()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
    }

    /// Concatenate `parts` top to bottom.
    pub fn concat<'a, I: IntoIterator<Item = &'a BitVector>>(parts: I) -> Self {
        let parts: Vec<&BitVector> = parts.into_iter().collect();
        let len = parts.iter().map(|p| p.len).sum();
        let mut out = Self::zeros(len);
        let mut at = 0;
        for p in parts {
            out.write(at, p);
            at += p.len;
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(
            start + len <= self.len,
            "slice {start}..{} out of range {}",
            start + len,
            self.len
        );
        let mut out = BitVector::zeros(len);
        for (w, slot) in out.words.iter_mut().enumerate() {
            *slot = self.word_at(start + w * WORD);
        }
        if let Some(last) = out.words.last_mut() {
            *last &= tail_mask(len);
        }
        out
    }

    /// Overwrite bits `[offset, offset + src.len())` with `src`.
    pub fn write(&mut self, offset: usize, src: &BitVector) {
        self.combine_at(offset, src, |_, s| s);
    }

    /// XOR `src` into bits `[offset, offset + src.len())`.
    pub fn xor_at(&mut self, offset: usize, src: &BitVector) {
        self.combine_at(offset, src, |d, s| d ^ s);
    }

    fn combine_at(&mut self, offset: usize, src: &BitVector, op: impl Fn(u64, u64) -> u64) {
        assert!(
            offset + src.len <= self.len,
            "write {offset}..{} out of range {}",
            offset + src.len,
            self.len
        );
        for (w, &word) in src.words.iter().enumerate() {
            let chunk = (src.len - w * WORD).min(WORD);
            let mask = if chunk == WORD {
                u64::MAX
            } else {
                (1u64 << chunk) - 1
            };
            let pos = offset + w * WORD;
            let (q, r) = (pos / WORD, pos % WORD);
            let cur = self.word_at(pos) & mask;
            let val = op(cur, word) & mask;
            self.words[q] = (self.words[q] & !(mask << r)) | (val << r);
            if r != 0 && chunk > WORD - r {
                let hi_mask = mask >> (WORD - r);
                self.words[q + 1] = (self.words[q + 1] & !hi_mask) | (val >> (WORD - r));
            }
        }
    }

    /// 64 bits starting at bit `pos`; bits past the end read as zero.
    fn word_at(&self, pos: usize) -> u64 {
        let (q, r) = (pos / WORD, pos % WORD);
        let lo = self.words.get(q).copied().unwrap_or(0) >> r;
        if r == 0 {
            lo
        } else {
            lo | self.words.get(q + 1).copied().unwrap_or(0) << (WORD - r)
        }
    }

    /// Little-endian bit order within bytes: bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_bytes_le(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = (self.words[i / 8] >> (8 * (i % 8))) as u8;
        }
        out
    }

    pub fn from_bytes_le(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::LengthMismatch {
                expected: len.div_ceil(8),
                actual: bytes.len(),
            });
        }
        let mut v = BitVector::zeros(len);
        for (i, &b) in bytes.iter().enumerate() {
            v.words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if let Some(last) = v.words.last() {
            if last & !tail_mask(len) != 0 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
        Ok(v)
    }
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        Self {
            cols,
            rows: (0..rows)
                .map(|r| BitVector::from_bools((0..cols).map(|c| f(r, c))))
                .collect(),
        }
    }

    /// Square `order × order` matrix that keeps the listed rows of its input
    /// and zeroes the others.
    pub fn row_selector(order: usize, keep: &[usize]) -> Self {
        let mut m = Self::zeros(order, order);
        for &i in keep {
            m.set(i, i, true);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        BitVector::from_bools(self.rows.iter().map(|r| r.dot(x)))
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows(), "matrix dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.cols);
                for c in r.ones() {
                    acc ^= &other.rows[c];
                }
                acc
            })
            .collect();
        BitMatrix {
            cols: other.cols,
            rows,
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Rows `[r0, r0 + rows)`, columns `[c0, c0 + cols)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> BitMatrix {
        BitMatrix {
            cols,
            rows: self.rows[r0..r0 + rows]
                .iter()
                .map(|r| r.slice(c0, cols))
                .collect(),
        }
    }

    pub fn write_block(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        for (i, row) in block.rows.iter().enumerate() {
            self.rows[r0 + i].write(c0, row);
        }
    }

    pub fn block_diag(blocks: &[BitMatrix]) -> BitMatrix {
        let rows = blocks.iter().map(BitMatrix::rows).sum();
        let cols = blocks.iter().map(BitMatrix::cols).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.write_block(r, c, b);
            r += b.rows();
            c += b.cols();
        }
        out
    }

    pub fn vstack(blocks: &[&BitMatrix]) -> Result<BitMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut rows = Vec::new();
        for b in blocks {
            if b.cols != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    actual: b.cols,
                });
            }
            rows.extend(b.rows.iter().cloned());
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Columns holding at least one nonzero entry; for a repair matrix these
    /// are the symbols a helper has to read.
    pub fn nonzero_columns(&self) -> Vec<usize> {
        let mut acc = BitVector::zeros(self.cols);
        for r in &self.rows {
            for (a, b) in acc.words.iter_mut().zip(&r.words) {
                *a |= b;
            }
        }
        acc.ones().collect()
    }

    pub fn rank(&self) -> usize {
        let mut basis = RowBasis::new(self.cols, 0);
        for r in &self.rows {
            basis.insert_plain(r.clone());
        }
        basis.rank()
    }

    /// Any `x` with `self · x = y`.
    pub fn solve(&self, y: &BitVector) -> Result<BitVector> {
        if y.len() != self.rows() {
            return Err(Error::LengthMismatch {
                expected: self.rows(),
                actual: y.len(),
            });
        }
        let basis = RowBasis::from_matrix(&self.transpose());
        basis.express(y).ok_or(Error::NoSolution)
    }

    /// `D` with `D · self = I`; `None` unless `self` has full column rank.
    pub fn left_inverse(&self) -> Option<BitMatrix> {
        let basis = RowBasis::from_matrix(self);
        if basis.rank() < self.cols {
            return None;
        }
        let rows = (0..self.cols)
            .map(|c| basis.express(&BitVector::unit(self.cols, c)))
            .collect::<Option<Vec<_>>>()?;
        Some(BitMatrix {
            cols: self.rows(),
            rows,
        })
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows() != self.cols {
            return None;
        }
        self.left_inverse()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Incremental XOR basis that remembers how each reduced row was formed from
/// the inserted rows.
///
/// Rows are kept in insertion order and each is reduced against all earlier
/// pivots, so a single forward pass fully reduces any query vector.
#[derive(Clone, Debug)]
pub struct RowBasis {
    width: usize,
    sources: usize,
    inserted: usize,
    rows: Vec<BasisRow>,
}

#[derive(Clone, Debug)]
struct BasisRow {
    pivot: usize,
    vec: BitVector,
    combo: BitVector,
}

impl RowBasis {
    /// `sources` is the number of rows that will be inserted with combination
    /// tracking; it fixes the length of the returned coefficient vectors.
    pub fn new(width: usize, sources: usize) -> Self {
        Self {
            width,
            sources,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut b = Self::new(m.cols, m.rows());
        for r in &m.rows {
            b.insert(r.clone());
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts the next source row; returns whether it raised the rank.
    pub fn insert(&mut self, v: BitVector) -> bool {
        assert_eq!(v.len(), self.width, "basis row width mismatch");
        assert!(
            self.inserted < self.sources,
            "more rows than declared sources"
        );
        let combo = BitVector::unit(self.sources, self.inserted);
        self.inserted += 1;
        self.push_reduced(v, combo)
    }

    fn insert_plain(&mut self, v: BitVector) -> bool {
        self.push_reduced(v, BitVector::zeros(0))
    }

    fn push_reduced(&mut self, mut v: BitVector, mut combo: BitVector) -> bool {
        let track = !combo.is_empty();
        for row in &self.rows {
            if v.get(row.pivot) {
                v ^= &row.vec;
                if track {
                    combo ^= &row.combo;
                }
            }
        }
        match v.first_one() {
            Some(pivot) => {
                self.rows.push(BasisRow {
                    pivot,
                    vec: v,
                    combo,
                });
                true
            }
            None => false,
        }
    }

    /// Coefficients `c` over the inserted rows with `Σ c_i row_i = v`.
    pub fn express(&self, v: &BitVector) -> Option<BitVector> {
        assert_eq!(v.len(), self.width, "query width mismatch");
        let mut v = v.clone();
        let mut coeff = BitVector::zeros(self.sources);
        for row in &self.rows {
            if v.get(row.pivot) {
                v ^= &row.vec;
                coeff ^= &row.combo;
            }
        }
        v.is_zero().then_some(coeff)
    }
}

/// First entry at which a matrix departs from the paired block-diagonal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockMismatch {
    pub row: usize,
    pub col: usize,
}

/// Decomposes `s` into `delta` half-blocks `B_0..B_{delta-1}` of order `N/2`
/// such that `s = diag(B_0, B_0, B_1, B_1, …)`.
///
/// Fails with the first (row-major) entry that breaks the form: a nonzero
/// entry off the diagonal blocks, or a second copy differing from the first.
pub fn detect_paired_blocks(
    s: &BitMatrix,
    segment_len: usize,
    delta: usize,
) -> Result<Vec<BitMatrix>, BlockMismatch> {
    assert!(segment_len.is_multiple_of(2), "segment length must be even");
    let order = segment_len * delta;
    if s.rows() != order || s.cols() != order {
        return Err(BlockMismatch {
            row: s.rows().min(order),
            col: s.cols().min(order),
        });
    }
    let half = segment_len / 2;
    // block index of each half-block along the diagonal is r / half
    for r in 0..order {
        let band = r / half;
        for c in s.row(r).ones() {
            if c / half != band {
                return Err(BlockMismatch { row: r, col: c });
            }
        }
        if band % 2 == 1 {
            let twin = r - half;
            for c in 0..half {
                let lo = band * half;
                if s.get(r, lo + c) != s.get(twin, lo - half + c) {
                    return Err(BlockMismatch {
                        row: r,
                        col: lo + c,
                    });
                }
            }
        }
    }
    Ok((0..delta)
        .map(|m| s.submatrix(m * segment_len, m * segment_len, half, half))
        .collect())
}

/// Inverse of [`detect_paired_blocks`].
pub fn assemble_paired_blocks(blocks: &[BitMatrix]) -> BitMatrix {
    let doubled: Vec<BitMatrix> = blocks.iter().flat_map(|b| [b.clone(), b.clone()]).collect();
    BitMatrix::block_diag(&doubled)
}
