//! Binary MDS codes with optimal repair bandwidth and rebuilding access.
//!
//! Everything is exact GF(2) arithmetic: [`gf2`] holds the bit-level linear
//! algebra, [`pairing`] the half-split XOR recombination, [`codes`] the
//! systematic code model and base constructions, [`transform`] the node
//! transformation with its structural decoder and repairers, and
//! [`pipelines`] the multi-round compositions. [`simulate`] and [`format`]
//! back the storage simulator and its file formats.

pub mod codes;
pub mod error;
pub mod format;
pub mod gf2;
pub mod pairing;
pub mod pipelines;
pub mod report;
pub mod simulate;
pub mod transform;

pub use codes::{
    cauchy_binary_mds, evenodd, mdr1_6_4, mdr1_repair_rows, Codeword, MdsVerdict, RepairPlan,
    RepairStrategy, SystematicCodeSpec,
};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use pairing::{PairKind, SegmentedVector};
pub use pipelines::{algorithm1, algorithm2, Algorithm1Options, Algorithm2Options, PipelineOutput};
pub use report::{gamma_star, RepairReport, SurvivorCount};
pub use simulate::simulate_repair_all;
pub use transform::{
    apply_transform, apply_transform_systematic, space_share, NodeRole, TransformConfig,
    TransformedCode, Variant,
};
