//! Repair simulation: fail each node in turn on random codewords and check the
//! rebuilt payload bit for bit.

use rand::Rng;
use rayon::prelude::*;

use crate::codes::{Codeword, SystematicCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::report::RepairReport;
use crate::transform::TransformedCode;

/// Anything that can rebuild a node of a codeword of its flat spec.
pub trait Repairer: Sync {
    fn flat_spec(&self) -> &SystematicCodeSpec;
    fn repair_node(&self, node: usize, codeword: &Codeword) -> Result<(BitVector, RepairReport)>;
}

impl Repairer for SystematicCodeSpec {
    fn flat_spec(&self) -> &SystematicCodeSpec {
        self
    }

    fn repair_node(&self, node: usize, codeword: &Codeword) -> Result<(BitVector, RepairReport)> {
        self.repair_with_strategy(node, codeword)
    }
}

impl Repairer for TransformedCode {
    fn flat_spec(&self) -> &SystematicCodeSpec {
        self.spec()
    }

    fn repair_node(&self, node: usize, codeword: &Codeword) -> Result<(BitVector, RepairReport)> {
        self.repair(node, codeword)
    }
}

/// Repairs every node on `trials` random codewords; returns one report per
/// node. Any wrong payload or trial-dependent report is an error.
pub fn simulate_repair_all<C: Repairer, R: Rng>(
    code: &C,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<RepairReport>> {
    simulate_nodes(
        code,
        &(0..code.flat_spec().n()).collect::<Vec<_>>(),
        trials,
        rng,
    )
}

pub fn simulate_nodes<C: Repairer, R: Rng>(
    code: &C,
    nodes: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<RepairReport>> {
    let spec = code.flat_spec();
    let codewords = (0..trials.max(1))
        .map(|_| spec.encode(&BitVector::random(spec.message_len(), rng)))
        .collect::<Result<Vec<_>>>()?;
    nodes
        .par_iter()
        .map(|&node| {
            let mut first: Option<RepairReport> = None;
            for c in &codewords {
                let (payload, report) = code.repair_node(node, c)?;
                if &payload != c.node(node) {
                    return Err(Error::PayloadMismatch { node });
                }
                match &first {
                    None => first = Some(report),
                    Some(f) if *f != report => {
                        return Err(Error::InvalidParameters(format!(
                            "node {node}: repair report differs between trials"
                        )))
                    }
                    Some(_) => {}
                }
            }
            Ok(first.expect("at least one trial"))
        })
        .collect()
}
