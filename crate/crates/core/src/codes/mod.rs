//! Systematic binary codes: encoding, generic decoding, MDS verification and
//! matrix-driven repair.
//!
//! A code stores `α` bits per node. Nodes `0..k` hold the message verbatim and
//! parity node `k + i` holds `Σ_j A_{i,j} f_j`. Everything else in the crate
//! treats a [`SystematicCodeSpec`] as a black box with this shape.

mod cauchy;
mod evenodd;
mod mdr;

pub use cauchy::cauchy_binary_mds;
pub use evenodd::evenodd;
pub use mdr::{mdr1_6_4, mdr1_repair_rows};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, RowBasis};
use crate::report::{RepairReport, SurvivorCount};

/// How a failed node is rebuilt from the `n − 1` survivors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairStrategy {
    /// Reconstruct the whole message from `k` nodes.
    Naive,
    /// Read the same rows from every survivor.
    RowSelect { rows: Vec<usize> },
    /// `S_{i,j}` per helper `j`, indexed by node id; the entry at the failed
    /// node itself is ignored. Every matrix has `α` columns.
    Matrices { helpers: Vec<BitMatrix> },
}

impl RepairStrategy {
    pub fn is_naive(&self) -> bool {
        matches!(self, RepairStrategy::Naive)
    }

    /// `S_{i,j}` as an explicit `α`-column matrix. `None` for naive repair.
    pub fn helper_matrix(&self, helper: usize, alpha: usize) -> Option<BitMatrix> {
        match self {
            RepairStrategy::Naive => None,
            RepairStrategy::RowSelect { rows } => Some(BitMatrix::row_selector(alpha, rows)),
            RepairStrategy::Matrices { helpers } => Some(helpers[helper].clone()),
        }
    }

    /// Replicates the strategy over `copies` stacked instances.
    pub fn replicate(&self, copies: usize, alpha: usize) -> RepairStrategy {
        match self {
            RepairStrategy::Naive => RepairStrategy::Naive,
            RepairStrategy::RowSelect { rows } => RepairStrategy::RowSelect {
                rows: (0..copies)
                    .flat_map(|c| rows.iter().map(move |&r| c * alpha + r))
                    .collect(),
            },
            RepairStrategy::Matrices { helpers } => RepairStrategy::Matrices {
                helpers: helpers
                    .iter()
                    .map(|s| BitMatrix::block_diag(&vec![s.clone(); copies]))
                    .collect(),
            },
        }
    }
}

/// Node payloads of one stripe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub payloads: Vec<BitVector>,
}

impl Codeword {
    pub fn node(&self, i: usize) -> &BitVector {
        &self.payloads[i]
    }

    pub fn n(&self) -> usize {
        self.payloads.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MdsVerdict {
    Mds,
    /// First node subset (lexicographic order) that cannot decode.
    Counterexample(Vec<usize>),
}

impl MdsVerdict {
    pub fn is_mds(&self) -> bool {
        matches!(self, MdsVerdict::Mds)
    }
}

/// Precomputed combination that rebuilds one node from helper downloads.
#[derive(Clone, Debug)]
pub struct RepairPlan {
    pub failed: usize,
    /// `(helper, S_{failed,helper})` for every survivor in node order.
    pub helpers: Vec<(usize, BitMatrix)>,
    /// Maps the concatenated downloads `S·f_helper` to the lost payload.
    pub combine: BitMatrix,
}

impl RepairPlan {
    pub fn download(&self, codeword: &Codeword) -> Vec<BitVector> {
        self.helpers
            .iter()
            .map(|(j, s)| s.mul_vec(codeword.node(*j)))
            .collect()
    }

    pub fn rebuild(&self, downloads: &[BitVector]) -> BitVector {
        self.combine.mul_vec(&BitVector::concat(downloads))
    }

    pub fn report(&self, n: usize, k: usize, alpha: usize) -> RepairReport {
        RepairReport {
            failed: self.failed,
            n,
            k,
            alpha,
            survivors: self
                .helpers
                .iter()
                .map(|(j, s)| {
                    let rows = s.nonzero_columns();
                    SurvivorCount {
                        node: *j,
                        accessed: rows.len(),
                        downloaded: s.rank(),
                        rows,
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicCodeSpec {
    name: String,
    n: usize,
    k: usize,
    alpha: usize,
    coding: Vec<Vec<BitMatrix>>,
    repair: Vec<RepairStrategy>,
    generator: BitMatrix,
}

impl SystematicCodeSpec {
    /// `coding[i][j]` is the `α × α` matrix `A_{i,j}`; `repair` has one entry
    /// per node.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        k: usize,
        alpha: usize,
        coding: Vec<Vec<BitMatrix>>,
        repair: Vec<RepairStrategy>,
    ) -> Result<Self> {
        if k == 0 || n <= k || alpha == 0 {
            return Err(Error::InvalidParameters(format!(
                "need n > k > 0 and alpha > 0, got n={n} k={k} alpha={alpha}"
            )));
        }
        let r = n - k;
        if coding.len() != r || coding.iter().any(|row| row.len() != k) {
            return Err(Error::ShapeMismatch(format!("coding grid must be {r}x{k}")));
        }
        if coding
            .iter()
            .flatten()
            .any(|a| a.rows() != alpha || a.cols() != alpha)
        {
            return Err(Error::ShapeMismatch(format!(
                "coding matrices must be {alpha}x{alpha}"
            )));
        }
        if repair.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} repair strategies for {n} nodes",
                repair.len()
            )));
        }
        for (i, s) in repair.iter().enumerate() {
            match s {
                RepairStrategy::Naive => {}
                RepairStrategy::RowSelect { rows } => {
                    if rows.iter().any(|&r| r >= alpha) {
                        return Err(Error::ShapeMismatch(format!(
                            "node {i}: row index out of range {alpha}"
                        )));
                    }
                }
                RepairStrategy::Matrices { helpers } => {
                    if helpers.len() != n
                        || helpers
                            .iter()
                            .enumerate()
                            .any(|(j, m)| j != i && m.cols() != alpha)
                    {
                        return Err(Error::ShapeMismatch(format!(
                            "node {i}: repair matrices must cover {n} nodes with {alpha} columns"
                        )));
                    }
                }
            }
        }
        let generator = build_generator(n, k, alpha, &coding);
        Ok(Self {
            name: name.into(),
            n,
            k,
            alpha,
            coding,
            repair,
            generator,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn message_len(&self) -> usize {
        self.k * self.alpha
    }

    pub fn coding_matrix(&self, parity: usize, systematic: usize) -> &BitMatrix {
        &self.coding[parity][systematic]
    }

    pub fn coding(&self) -> &[Vec<BitMatrix>] {
        &self.coding
    }

    pub fn strategy(&self, node: usize) -> &RepairStrategy {
        &self.repair[node]
    }

    pub fn strategies(&self) -> &[RepairStrategy] {
        &self.repair
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_strategies(self, repair: Vec<RepairStrategy>) -> Result<Self> {
        Self::new(self.name, self.n, self.k, self.alpha, self.coding, repair)
    }

    /// `(n·α) × (k·α)` matrix mapping the message to all node payloads.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Rows of the generator belonging to `node`.
    pub fn node_rows(&self, node: usize) -> BitMatrix {
        self.generator
            .submatrix(node * self.alpha, 0, self.alpha, self.message_len())
    }

    fn stacked_rows(&self, nodes: &[usize]) -> BitMatrix {
        let idx: Vec<usize> = nodes
            .iter()
            .flat_map(|&j| (j * self.alpha)..((j + 1) * self.alpha))
            .collect();
        self.generator.select_rows(&idx)
    }

    pub fn encode(&self, message: &BitVector) -> Result<Codeword> {
        if message.len() != self.message_len() {
            return Err(Error::LengthMismatch {
                expected: self.message_len(),
                actual: message.len(),
            });
        }
        let data: Vec<BitVector> = (0..self.k)
            .map(|j| message.slice(j * self.alpha, self.alpha))
            .collect();
        let mut payloads = data.clone();
        for row in &self.coding {
            let mut p = BitVector::zeros(self.alpha);
            for (a, f) in row.iter().zip(&data) {
                p ^= &a.mul_vec(f);
            }
            payloads.push(p);
        }
        Ok(Codeword { payloads })
    }

    /// `(k·α) × (k·α)` matrix mapping the payloads of `nodes` (concatenated in
    /// the given order) back to the message.
    pub fn decoding_matrix(&self, nodes: &[usize]) -> Result<BitMatrix> {
        self.check_subset(nodes)?;
        self.stacked_rows(nodes)
            .inverse()
            .ok_or_else(|| Error::SingularSystem {
                nodes: nodes.to_vec(),
            })
    }

    fn check_subset(&self, nodes: &[usize]) -> Result<()> {
        if nodes.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: nodes.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &j in nodes {
            if j >= self.n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidParameters(format!(
                    "node set {nodes:?} must hold {} distinct ids below {}",
                    self.k, self.n
                )));
            }
        }
        Ok(())
    }

    /// Message from any `k` shards `(node, payload)`.
    pub fn reconstruct(&self, shards: &[(usize, BitVector)]) -> Result<BitVector> {
        let nodes: Vec<usize> = shards.iter().map(|(j, _)| *j).collect();
        self.check_subset(&nodes)?;
        for (_, p) in shards {
            if p.len() != self.alpha {
                return Err(Error::LengthMismatch {
                    expected: self.alpha,
                    actual: p.len(),
                });
            }
        }
        if nodes.iter().enumerate().all(|(pos, &j)| pos == j) {
            return Ok(BitVector::concat(shards.iter().map(|(_, p)| p)));
        }
        let d = self.decoding_matrix(&nodes)?;
        Ok(d.mul_vec(&BitVector::concat(shards.iter().map(|(_, p)| p))))
    }

    /// Checks every `k`-subset of nodes; the first failing subset in
    /// lexicographic order is reported.
    pub fn verify_mds(&self) -> MdsVerdict {
        let subsets = k_subsets(self.n, self.k);
        let full = self.message_len();
        match subsets
            .par_iter()
            .find_first(|s| self.stacked_rows(s).rank() < full)
        {
            Some(s) => MdsVerdict::Counterexample(s.clone()),
            None => MdsVerdict::Mds,
        }
    }

    /// Builds the combination that turns the downloads prescribed by the
    /// node's strategy into its payload.
    pub fn repair_plan(&self, failed: usize) -> Result<RepairPlan> {
        self.repair_plan_with(failed, &self.repair[failed])
    }

    pub fn repair_plan_with(&self, failed: usize, strategy: &RepairStrategy) -> Result<RepairPlan> {
        if failed >= self.n {
            return Err(Error::InvalidParameters(format!(
                "node {failed} out of range"
            )));
        }
        if strategy.is_naive() {
            return Err(Error::InvalidParameters(format!(
                "node {failed} uses naive repair"
            )));
        }
        let helpers: Vec<(usize, BitMatrix)> = (0..self.n)
            .filter(|&j| j != failed)
            .map(|j| (j, strategy.helper_matrix(j, self.alpha).expect("non-naive")))
            .collect();
        let forms: Vec<BitVector> = helpers
            .iter()
            .flat_map(|(j, s)| s.mul(&self.node_rows(*j)).into_rows())
            .collect();
        let mut basis = RowBasis::new(self.message_len(), forms.len());
        for f in forms {
            basis.insert(f);
        }
        let target = self.node_rows(failed);
        let combine = target
            .row_vectors()
            .iter()
            .map(|t| basis.express(t))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::StrategyIncomplete { node: failed })?;
        let width = helpers.iter().map(|(_, s)| s.rows()).sum();
        Ok(RepairPlan {
            failed,
            helpers,
            combine: BitMatrix::from_rows(width, combine)?,
        })
    }

    /// Rebuilds `failed` from the other payloads of `codeword` following its
    /// strategy; naive nodes are rebuilt from the first `k` survivors.
    pub fn repair_with_strategy(
        &self,
        failed: usize,
        codeword: &Codeword,
    ) -> Result<(BitVector, RepairReport)> {
        if codeword.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: codeword.n(),
            });
        }
        if self
            .repair
            .get(failed)
            .is_some_and(RepairStrategy::is_naive)
        {
            return self.repair_naive(failed, codeword);
        }
        let plan = self.repair_plan(failed)?;
        let downloads = plan.download(codeword);
        Ok((
            plan.rebuild(&downloads),
            plan.report(self.n, self.k, self.alpha),
        ))
    }

    /// `copies` independent codewords stacked instance-major, giving
    /// sub-packetization `copies·α`.
    pub fn space_share(&self, copies: usize) -> Result<SystematicCodeSpec> {
        if copies == 0 {
            return Err(Error::InvalidParameters(
                "space sharing needs at least one copy".into(),
            ));
        }
        if copies == 1 {
            return Ok(self.clone());
        }
        let coding = self
            .coding
            .iter()
            .map(|row| {
                row.iter()
                    .map(|a| BitMatrix::block_diag(&vec![a.clone(); copies]))
                    .collect()
            })
            .collect();
        let repair = self
            .repair
            .iter()
            .map(|s| s.replicate(copies, self.alpha))
            .collect();
        SystematicCodeSpec::new(
            format!("{}x{copies}", self.name),
            self.n,
            self.k,
            copies * self.alpha,
            coding,
            repair,
        )
    }

    /// Access and download counts prescribed by the strategy of `failed`,
    /// without running a repair. Naive nodes read everything from the first
    /// `k` survivors.
    pub fn strategy_report(&self, failed: usize) -> RepairReport {
        let strategy = &self.repair[failed];
        if strategy.is_naive() {
            let helpers: Vec<usize> = (0..self.n).filter(|&j| j != failed).take(self.k).collect();
            return naive_report(self.n, self.k, self.alpha, failed, &helpers);
        }
        RepairReport {
            failed,
            n: self.n,
            k: self.k,
            alpha: self.alpha,
            survivors: (0..self.n)
                .filter(|&j| j != failed)
                .map(|j| {
                    let s = strategy.helper_matrix(j, self.alpha).expect("non-naive");
                    let rows = s.nonzero_columns();
                    SurvivorCount {
                        node: j,
                        accessed: rows.len(),
                        downloaded: s.rank(),
                        rows,
                    }
                })
                .collect(),
        }
    }

    pub fn repair_naive(
        &self,
        failed: usize,
        codeword: &Codeword,
    ) -> Result<(BitVector, RepairReport)> {
        let helpers: Vec<usize> = (0..self.n).filter(|&j| j != failed).take(self.k).collect();
        let shards: Vec<(usize, BitVector)> = helpers
            .iter()
            .map(|&j| (j, codeword.node(j).clone()))
            .collect();
        let message = self.reconstruct(&shards)?;
        let payload = self.encode(&message)?.payloads.swap_remove(failed);
        Ok((
            payload,
            naive_report(self.n, self.k, self.alpha, failed, &helpers),
        ))
    }
}

pub(crate) fn naive_report(
    n: usize,
    k: usize,
    alpha: usize,
    failed: usize,
    helpers: &[usize],
) -> RepairReport {
    RepairReport {
        failed,
        n,
        k,
        alpha,
        survivors: (0..n)
            .filter(|&j| j != failed)
            .map(|j| {
                let used = helpers.contains(&j);
                SurvivorCount {
                    node: j,
                    accessed: if used { alpha } else { 0 },
                    downloaded: if used { alpha } else { 0 },
                    rows: if used {
                        (0..alpha).collect()
                    } else {
                        Vec::new()
                    },
                }
            })
            .collect(),
    }
}

fn build_generator(n: usize, k: usize, alpha: usize, coding: &[Vec<BitMatrix>]) -> BitMatrix {
    let mut g = BitMatrix::zeros(n * alpha, k * alpha);
    for j in 0..k {
        g.write_block(j * alpha, j * alpha, &BitMatrix::identity(alpha));
    }
    for (i, row) in coding.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            g.write_block((k + i) * alpha, j * alpha, a);
        }
    }
    g
}

/// Builds a systematic spec from an arbitrary generator whose first `k` node
/// blocks are the identity.
pub(crate) fn coding_from_generator(
    g: &BitMatrix,
    n: usize,
    k: usize,
    alpha: usize,
) -> Vec<Vec<BitMatrix>> {
    (0..n - k)
        .map(|i| {
            (0..k)
                .map(|j| g.submatrix((k + i) * alpha, j * alpha, alpha, alpha))
                .collect()
        })
        .collect()
}

/// All `k`-subsets of `[0, n)` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
