//! On-disk formats: code specs (JSON), shard files (binary) and repair
//! reports (text, CSV, JSON).
//!
//! Bit strings are packed little-endian: bit `i` lives in byte `i / 8` at
//! position `i % 8`. Matrices are flattened row-major before packing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codes::{RepairStrategy, SystematicCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::report::RepairReport;
use crate::transform::{apply_transform, TransformConfig, TransformedCode};

pub const SPEC_FORMAT: &str = "repairforge-spec/1";
pub const REPORT_FORMAT: &str = "repairforge-report/1";
pub const SHARD_MAGIC: &[u8; 4] = b"RFSH";
pub const SHARD_VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub bits: String,
}

impl MatrixFile {
    pub fn from_matrix(m: &BitMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            bits: hex::encode(BitVector::concat(m.row_vectors()).to_bytes_le()),
        }
    }

    pub fn to_matrix(&self) -> Result<BitMatrix> {
        let bytes =
            hex::decode(&self.bits).map_err(|e| Error::Format(format!("matrix hex: {e}")))?;
        let flat = BitVector::from_bytes_le(&bytes, self.rows * self.cols)?;
        BitMatrix::from_rows(
            self.cols,
            (0..self.rows)
                .map(|r| flat.slice(r * self.cols, self.cols))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyFile {
    Naive,
    Rows { rows: Vec<usize> },
    Matrices { helpers: Vec<MatrixFile> },
}

/// How a spec was derived from another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub base: Box<SpecFile>,
    pub transform: TransformConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub format: String,
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// `coding[i][j]` is `A_{i,j}`, each `alpha × alpha`.
    pub coding: Vec<Vec<String>>,
    pub repair: Vec<StrategyFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lineage: Option<Lineage>,
}

impl SpecFile {
    pub fn from_spec(spec: &SystematicCodeSpec) -> Self {
        let alpha = spec.alpha();
        Self {
            format: SPEC_FORMAT.into(),
            name: spec.name().into(),
            n: spec.n(),
            k: spec.k(),
            alpha,
            coding: spec
                .coding()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|a| MatrixFile::from_matrix(a).bits)
                        .collect()
                })
                .collect(),
            repair: spec
                .strategies()
                .iter()
                .map(|s| match s {
                    RepairStrategy::Naive => StrategyFile::Naive,
                    RepairStrategy::RowSelect { rows } => StrategyFile::Rows { rows: rows.clone() },
                    RepairStrategy::Matrices { helpers } => StrategyFile::Matrices {
                        helpers: helpers.iter().map(MatrixFile::from_matrix).collect(),
                    },
                })
                .collect(),
            lineage: None,
        }
    }

    /// Flat spec plus the base and configuration it was derived from.
    pub fn from_transformed(code: &TransformedCode, notes: Vec<String>) -> Self {
        let mut file = Self::from_spec(code.spec());
        file.lineage = Some(Lineage {
            base: Box::new(Self::from_spec(code.base())),
            transform: code.config().clone(),
            notes,
        });
        file
    }

    pub fn with_lineage_base(mut self, base: SpecFile) -> Self {
        if let Some(l) = self.lineage.as_mut() {
            *l.base = base;
        }
        self
    }

    pub fn to_spec(&self) -> Result<SystematicCodeSpec> {
        if self.format != SPEC_FORMAT {
            return Err(Error::Format(format!(
                "unsupported spec format {:?}, expected {SPEC_FORMAT}",
                self.format
            )));
        }
        let alpha = self.alpha;
        let coding = self
            .coding
            .iter()
            .map(|row| {
                row.iter()
                    .map(|bits| {
                        MatrixFile {
                            rows: alpha,
                            cols: alpha,
                            bits: bits.clone(),
                        }
                        .to_matrix()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let repair = self
            .repair
            .iter()
            .map(|s| match s {
                StrategyFile::Naive => Ok(RepairStrategy::Naive),
                StrategyFile::Rows { rows } => Ok(RepairStrategy::RowSelect { rows: rows.clone() }),
                StrategyFile::Matrices { helpers } => Ok(RepairStrategy::Matrices {
                    helpers: helpers
                        .iter()
                        .map(MatrixFile::to_matrix)
                        .collect::<Result<Vec<_>>>()?,
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        SystematicCodeSpec::new(self.name.clone(), self.n, self.k, alpha, coding, repair)
    }

    /// Rebuilds the structural code from the lineage and checks that it
    /// reproduces this file's matrices. `None` without lineage.
    pub fn to_transformed(&self) -> Option<Result<TransformedCode>> {
        let lineage = self.lineage.as_ref()?;
        Some((|| {
            let base = lineage.base.to_spec()?;
            let code = apply_transform(&base, lineage.transform.clone())?;
            if code.spec() != &self.to_spec()? {
                return Err(Error::Format(format!(
                    "spec {:?} does not match the transformation recorded in its lineage",
                    self.name
                )));
            }
            Ok(code)
        })())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(format!("spec file: {e}")))
    }
}

/// SHA-256 over the canonical JSON of the spec without lineage.
pub fn spec_sha256(spec: &SystematicCodeSpec) -> [u8; 32] {
    let json = serde_json::to_vec(&SpecFile::from_spec(spec)).expect("spec files serialize");
    Sha256::digest(&json).into()
}

pub fn spec_sha256_hex(spec: &SystematicCodeSpec) -> String {
    hex::encode(spec_sha256(spec))
}

/// One node's share of an encoded file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shard {
    pub node: usize,
    pub alpha: usize,
    pub stripes: usize,
    /// Length of the original message in bits, before padding.
    pub message_bits: u64,
    pub spec_hash: [u8; 32],
    /// `stripes · alpha` bits, stripe-major.
    pub bits: BitVector,
}

impl Shard {
    pub fn stripe(&self, s: usize) -> BitVector {
        self.bits.slice(s * self.alpha, self.alpha)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(57 + self.bits.len() / 8);
        out.extend_from_slice(SHARD_MAGIC);
        out.push(SHARD_VERSION);
        out.extend_from_slice(&(self.node as u32).to_le_bytes());
        out.extend_from_slice(&(self.alpha as u32).to_le_bytes());
        out.extend_from_slice(&(self.stripes as u32).to_le_bytes());
        out.extend_from_slice(&self.message_bits.to_le_bytes());
        out.extend_from_slice(&self.spec_hash);
        out.extend_from_slice(&self.bits.to_bytes_le());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        const HEADER: usize = 4 + 1 + 4 + 4 + 4 + 8 + 32;
        if bytes.len() < HEADER || &bytes[..4] != SHARD_MAGIC {
            return Err(Error::Format("not a shard file".into()));
        }
        if bytes[4] != SHARD_VERSION {
            return Err(Error::Format(format!(
                "unsupported shard version {}",
                bytes[4]
            )));
        }
        let u32_at =
            |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
        let node = u32_at(5);
        let alpha = u32_at(9);
        let stripes = u32_at(13);
        let message_bits = u64::from_le_bytes(bytes[17..25].try_into().expect("8 bytes"));
        let spec_hash: [u8; 32] = bytes[25..57].try_into().expect("32 bytes");
        let bits = BitVector::from_bytes_le(&bytes[HEADER..], stripes * alpha)?;
        Ok(Self {
            node,
            alpha,
            stripes,
            message_bits,
            spec_hash,
            bits,
        })
    }
}

/// Raw bytes to message bits, least significant bit of each byte first,
/// zero-padded to whole stripes of `k·α` bits.
pub fn bytes_to_stripes(data: &[u8], stripe_bits: usize) -> Vec<BitVector> {
    let bits = BitVector::from_bytes_le(data, data.len() * 8).expect("exact length");
    let stripes = bits.len().div_ceil(stripe_bits).max(1);
    (0..stripes)
        .map(|s| {
            let start = s * stripe_bits;
            let take = stripe_bits.min(bits.len().saturating_sub(start));
            let mut v = BitVector::zeros(stripe_bits);
            v.write(0, &bits.slice(start, take));
            v
        })
        .collect()
}

pub fn stripes_to_bytes(stripes: &[BitVector], message_bits: u64) -> Vec<u8> {
    let all = BitVector::concat(stripes);
    all.slice(0, message_bits as usize).to_bytes_le()
}

/// Repair reports of one code, one per failed node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSet {
    pub format: String,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub nodes: Vec<NodeReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeReport {
    #[serde(flatten)]
    pub report: RepairReport,
    pub total_accessed: usize,
    pub total_downloaded: usize,
    pub optimal_per_node: String,
    pub optimal_access: bool,
    pub optimal_bandwidth: bool,
}

impl ReportSet {
    pub fn new(spec: &SystematicCodeSpec, reports: Vec<RepairReport>) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            code: spec.name().into(),
            n: spec.n(),
            k: spec.k(),
            alpha: spec.alpha(),
            nodes: reports
                .into_iter()
                .map(|report| NodeReport {
                    total_accessed: report.total_accessed(),
                    total_downloaded: report.total_downloaded(),
                    optimal_per_node: report.optimal_per_node().to_string(),
                    optimal_access: report.optimal_access(),
                    optimal_bandwidth: report.optimal_bandwidth(),
                    report,
                })
                .collect(),
        }
    }

    /// JSON keeps the 0-based row indices of the API.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per (failed node, survivor); rows 1-based, `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {}\nfailed,survivor,accessed,downloaded,optimal_per_node,rows\n",
            self.format
        );
        for node in &self.nodes {
            for s in &node.report.survivors {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    node.report.failed,
                    s.node,
                    s.accessed,
                    s.downloaded,
                    node.optimal_per_node,
                    one_based(&s.rows, ";")
                ));
            }
        }
        out
    }

    /// Human-readable table; rows 1-based.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (n={}, k={}, alpha={}), optimal per survivor = alpha/r\n",
            self.code, self.n, self.k, self.alpha
        );
        out.push_str("node  downloaded  accessed  per-node-opt  bw-opt  access-opt  rows\n");
        for node in &self.nodes {
            let rows = match node.report.common_rows() {
                Some(rows) => format!("{{{}}}", one_based(rows, ",")),
                None => "varies".into(),
            };
            out.push_str(&format!(
                "{:<4}  {:>10}  {:>8}  {:>12}  {:>6}  {:>10}  {}\n",
                node.report.failed,
                node.total_downloaded,
                node.total_accessed,
                node.optimal_per_node,
                yes_no(node.optimal_bandwidth),
                yes_no(node.optimal_access),
                rows
            ));
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn one_based(rows: &[usize], sep: &str) -> String {
    rows.iter()
        .map(|r| (r + 1).to_string())
        .collect::<Vec<_>>()
        .join(sep)
}
