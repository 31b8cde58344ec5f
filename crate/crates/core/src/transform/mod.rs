//! The node transformation: `r` chosen target nodes gain optimal repair
//! bandwidth and rebuilding access, the other nodes keep their base repair
//! cost when their strategies allow it.
//!
//! A transformed codeword is built from `r` *virtual instances*, each a
//! codeword of the base code. Remainder node `i` stores `V^{(l)}_i` for every
//! instance `l`; target `τ(j)` stores the paired data `h′_j^{(l)}` computed
//! from `u_t^{(l)} = V^{(l)}_{τ(π_l(t))}`. With [`Variant::PairTargets`] the
//! virtual instances are independent base codewords. With
//! [`Variant::PairRemainders`] they are derived from base codewords so that
//! the targets end up storing their original data unchanged.

mod conditions;
mod config;
mod layout;

pub use conditions::{check_r1, check_r2};
pub use config::{cyclic_perms, default_perms, identity_perms, TransformConfig, Variant};
pub use layout::{pair_targets, permute_targets, unpair_targets};

use rayon::prelude::*;

use crate::codes::{
    coding_from_generator, Codeword, RepairPlan, RepairStrategy, SystematicCodeSpec,
};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::pairing::{boxplus, cancel, masked_unpair, PairKind};
use crate::report::{RepairReport, SurvivorCount};

use conditions::{helper_mask, HelperMask};

/// How a node of the transformed code is repaired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeRole {
    /// Target node with the given target index.
    Target(usize),
    /// Remainder whose base strategy is naive.
    NaiveRemainder,
    /// Remainder that keeps its base repair cost.
    OptimalRemainder,
    /// Remainder with a non-naive base strategy that breaks R1 or R2; it
    /// repairs naively in the derived spec.
    Violating(Error),
}

#[derive(Clone, Debug)]
struct RemainderRepair {
    plan: RepairPlan,
    /// Per base node: its repair mask and, for R1, its half-blocks.
    masks: Vec<Option<(HelperMask, Vec<BitMatrix>)>>,
}

#[derive(Clone, Debug)]
pub struct TransformedCode {
    base: SystematicCodeSpec,
    config: TransformConfig,
    spec: SystematicCodeSpec,
    roles: Vec<NodeRole>,
    remainder_repairs: Vec<Option<RemainderRepair>>,
}

pub fn apply_transform(
    base: &SystematicCodeSpec,
    config: TransformConfig,
) -> Result<TransformedCode> {
    TransformedCode::new(base, config)
}

/// The transformation that keeps the systematic nodes raw; `config.variant`
/// must be [`Variant::PairRemainders`].
pub fn apply_transform_systematic(
    base: &SystematicCodeSpec,
    config: TransformConfig,
) -> Result<TransformedCode> {
    if config.variant != Variant::PairRemainders {
        return Err(Error::InvalidParameters(
            "systematic transformation needs the pair-remainders variant".into(),
        ));
    }
    TransformedCode::new(base, config)
}

/// `c` stacked instances of `spec`.
pub fn space_share(spec: &SystematicCodeSpec, copies: usize) -> Result<SystematicCodeSpec> {
    spec.space_share(copies)
}

impl TransformedCode {
    pub fn new(base: &SystematicCodeSpec, config: TransformConfig) -> Result<Self> {
        config.validate(base)?;
        let (n, r) = (base.n(), base.r());
        let mut roles = Vec::with_capacity(n);
        let mut remainder_repairs = Vec::with_capacity(n);
        for i in 0..n {
            if let Some(j) = config.target_index(i) {
                roles.push(NodeRole::Target(j));
                remainder_repairs.push(None);
            } else if base.strategy(i).is_naive() {
                roles.push(NodeRole::NaiveRemainder);
                remainder_repairs.push(None);
            } else {
                match remainder_repair(base, &config, i) {
                    Ok(rr) => {
                        roles.push(NodeRole::OptimalRemainder);
                        remainder_repairs.push(Some(rr));
                    }
                    Err(e) => {
                        roles.push(NodeRole::Violating(e));
                        remainder_repairs.push(None);
                    }
                }
            }
        }
        let mut code = Self {
            base: base.clone(),
            config,
            spec: base.clone(),
            roles,
            remainder_repairs,
        };
        let alpha_new = r * base.alpha();
        let generator = code.probe_generator()?;
        let strategies = (0..n).map(|i| code.derived_strategy(i)).collect();
        let name = format!("{}~t{:?}", base.name(), code.config.targets);
        code.spec = SystematicCodeSpec::new(
            name,
            n,
            base.k(),
            alpha_new,
            coding_from_generator(&generator, n, base.k(), alpha_new),
            strategies,
        )?;
        Ok(code)
    }

    pub fn base(&self) -> &SystematicCodeSpec {
        &self.base
    }

    pub fn config(&self) -> &TransformConfig {
        &self.config
    }

    /// The derived code as a flat systematic spec; its message is the
    /// concatenated payloads of nodes `0..k`.
    pub fn spec(&self) -> &SystematicCodeSpec {
        &self.spec
    }

    pub fn into_spec(self) -> SystematicCodeSpec {
        self.spec
    }

    pub fn alpha(&self) -> usize {
        self.spec.alpha()
    }

    pub fn role(&self, node: usize) -> &NodeRole {
        &self.roles[node]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    fn base_alpha(&self) -> usize {
        self.base.alpha()
    }

    fn segment_len(&self) -> usize {
        self.config.segment_len
    }

    fn block(&self, payload: &BitVector, l: usize) -> BitVector {
        payload.slice(l * self.base_alpha(), self.base_alpha())
    }

    /// Node holding `u_t^{(l)}` in instance `l`.
    fn position(&self, l: usize, t: usize) -> usize {
        self.config.targets[self.config.perms[l][t]]
    }

    fn complete(&self, known: Vec<(usize, BitVector)>) -> Result<Vec<BitVector>> {
        let message = self.base.reconstruct(&known)?;
        Ok(self.base.encode(&message)?.payloads)
    }

    /// Virtual instances from `r` base messages.
    pub fn virtual_from_messages(&self, messages: &[BitVector]) -> Result<Vec<Vec<BitVector>>> {
        let r = self.config.r();
        if messages.len() != r {
            return Err(Error::LengthMismatch {
                expected: r,
                actual: messages.len(),
            });
        }
        let g = messages
            .iter()
            .map(|m| self.base.encode(m).map(|c| c.payloads))
            .collect::<Result<Vec<_>>>()?;
        if self.config.variant == Variant::PairTargets {
            return Ok(g);
        }
        let h = permute_targets(&g, &self.config);
        let v = unpair_targets(&h, self.segment_len())?;
        let modified = self.config.modified_nodes(self.base.n());
        g.into_iter()
            .enumerate()
            .map(|(l, mut inst)| {
                for (t, vt) in v[l].iter().enumerate() {
                    inst[self.position(l, t)] = vt.clone();
                }
                let known = inst
                    .into_iter()
                    .enumerate()
                    .filter(|(node, _)| !modified.contains(node))
                    .collect();
                self.complete(known)
            })
            .collect()
    }

    /// Node payloads of the transformed code for the given virtual instances.
    pub fn store(&self, instances: &[Vec<BitVector>]) -> Result<Codeword> {
        let u = permute_targets(instances, &self.config);
        let paired = pair_targets(&u, self.segment_len())?;
        let payloads = (0..self.base.n())
            .map(|node| match self.config.target_index(node) {
                Some(j) => BitVector::concat(paired.iter().map(|row| &row[j])),
                None => BitVector::concat(instances.iter().map(|inst| &inst[node])),
            })
            .collect();
        Ok(Codeword { payloads })
    }

    /// `(n·α′) × (k·α′)` map from the `r` base messages to the stored payloads,
    /// turned systematic by inverting its first `k` node blocks.
    fn probe_generator(&self) -> Result<BitMatrix> {
        let (n, k, r) = (self.base.n(), self.base.k(), self.config.r());
        let msg = self.base.message_len();
        let width = r * msg;
        let columns = (0..width)
            .into_par_iter()
            .map(|bit| {
                let messages: Vec<BitVector> = (0..r)
                    .map(|l| {
                        if bit / msg == l {
                            BitVector::unit(msg, bit % msg)
                        } else {
                            BitVector::zeros(msg)
                        }
                    })
                    .collect();
                let stored = self.store(&self.virtual_from_messages(&messages)?)?;
                Ok(BitVector::concat(&stored.payloads))
            })
            .collect::<Result<Vec<_>>>()?;
        let g_x = BitMatrix::from_rows(n * r * self.base_alpha(), columns)?.transpose();
        let head = g_x.submatrix(0, 0, k * r * self.base_alpha(), width);
        let inv = head.inverse().ok_or(Error::SingularSystem {
            nodes: (0..k).collect(),
        })?;
        Ok(g_x.mul(&inv))
    }

    fn derived_strategy(&self, i: usize) -> RepairStrategy {
        let alpha = self.base_alpha();
        let r = self.config.r();
        match &self.roles[i] {
            NodeRole::Target(j) => RepairStrategy::RowSelect {
                rows: (j * alpha..(j + 1) * alpha).collect(),
            },
            NodeRole::NaiveRemainder | NodeRole::Violating(_) => RepairStrategy::Naive,
            NodeRole::OptimalRemainder => match self.base.strategy(i) {
                s @ RepairStrategy::RowSelect { .. } => s.replicate(r, alpha),
                RepairStrategy::Matrices { helpers } => RepairStrategy::Matrices {
                    helpers: (0..self.base.n())
                        .map(|s| {
                            if s == i {
                                return BitMatrix::zeros(0, r * alpha);
                            }
                            let blocks: Vec<BitMatrix> = (0..r)
                                .map(|l| match self.config.target_index(s) {
                                    Some(j) => helpers[self.position(l, j)].clone(),
                                    None => helpers[s].clone(),
                                })
                                .collect();
                            BitMatrix::block_diag(&blocks)
                        })
                        .collect(),
                },
                RepairStrategy::Naive => unreachable!("naive strategies have their own role"),
            },
        }
    }

    fn check_shards(&self, shards: &[(usize, BitVector)]) -> Result<()> {
        let (n, k) = (self.base.n(), self.base.k());
        if shards.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: shards.len(),
            });
        }
        let mut seen = vec![false; n];
        for (j, p) in shards {
            if *j >= n || std::mem::replace(&mut seen[*j], true) {
                return Err(Error::InvalidParameters(format!(
                    "shards must come from {k} distinct nodes below {n}"
                )));
            }
            if p.len() != self.alpha() {
                return Err(Error::LengthMismatch {
                    expected: self.alpha(),
                    actual: p.len(),
                });
            }
        }
        Ok(())
    }

    /// Recovers every virtual instance from any `k` shards.
    ///
    /// Pairs between connected targets are unpaired first; those instances
    /// are completed through the base code, which exposes the partners
    /// needed to cancel the remaining paired blocks.
    pub fn decode_virtual(&self, shards: &[(usize, BitVector)]) -> Result<Vec<Vec<BitVector>>> {
        self.check_shards(shards)?;
        let r = self.config.r();
        let n_seg = self.segment_len();
        let mut target_payload: Vec<Option<&BitVector>> = vec![None; r];
        let mut remainders = Vec::new();
        for (node, p) in shards {
            match self.config.target_index(*node) {
                Some(t) => target_payload[t] = Some(p),
                None => remainders.push((*node, p)),
            }
        }
        let connected: Vec<usize> = (0..r).filter(|&t| target_payload[t].is_some()).collect();
        let stored = |t: usize, l: usize| self.block(target_payload[t].expect("connected"), l);

        // u[l][t] for t in the connected set
        let mut u: Vec<Vec<Option<BitVector>>> = vec![vec![None; r]; r];
        for &l in &connected {
            u[l][l] = Some(stored(l, l));
            for &t in connected.iter().filter(|&&t| t > l) {
                let (a, b) = crate::pairing::unpair(&stored(t, l), &stored(l, t), n_seg)?;
                u[t][l] = Some(a);
                u[l][t] = Some(b);
            }
        }
        let mut instances: Vec<Option<Vec<BitVector>>> = vec![None; r];
        let complete_instance = |l: usize, u_l: &[Option<BitVector>]| {
            let mut known: Vec<(usize, BitVector)> = remainders
                .iter()
                .map(|(node, p)| (*node, self.block(p, l)))
                .collect();
            known.extend(
                connected
                    .iter()
                    .map(|&t| (self.position(l, t), u_l[t].clone().expect("recovered"))),
            );
            self.complete(known)
        };
        for &l in &connected {
            instances[l] = Some(complete_instance(l, &u[l])?);
        }
        for l in (0..r).filter(|l| !connected.contains(l)) {
            for &t in &connected {
                let partner = &instances[t].as_ref().expect("completed")[self.position(t, l)];
                let kind = if t > l {
                    PairKind::APlusB
                } else {
                    PairKind::ABoxB
                };
                u[l][t] = Some(cancel(partner, &stored(t, l), kind, n_seg)?);
            }
            instances[l] = Some(complete_instance(l, &u[l])?);
        }
        Ok(instances
            .into_iter()
            .map(|i| i.expect("all instances"))
            .collect())
    }

    /// Message (payloads of nodes `0..k`) from any `k` shards.
    pub fn decode(&self, shards: &[(usize, BitVector)]) -> Result<BitVector> {
        let instances = self.decode_virtual(shards)?;
        let stored = self.store(&instances)?;
        Ok(BitVector::concat(&stored.payloads[..self.base.k()]))
    }

    /// Virtual instances behind a full codeword.
    pub fn virtual_instances(&self, codeword: &Codeword) -> Result<Vec<Vec<BitVector>>> {
        let shards: Vec<(usize, BitVector)> = (0..self.base.k())
            .map(|j| (j, codeword.node(j).clone()))
            .collect();
        self.decode_virtual(&shards)
    }

    pub fn encode(&self, message: &BitVector) -> Result<Codeword> {
        self.spec.encode(message)
    }

    /// Repairs any node by the procedure matching its role.
    pub fn repair(&self, node: usize, codeword: &Codeword) -> Result<(BitVector, RepairReport)> {
        if node >= self.base.n() {
            return Err(Error::InvalidParameters(format!(
                "node {node} out of range"
            )));
        }
        match self.roles[node] {
            NodeRole::Target(_) => self.repair_target(node, codeword),
            _ => self.repair_remainder(node, codeword),
        }
    }

    /// Target `τ(j)` reads block `j` from every survivor: instance `j` of the
    /// remainders, which determines all of `V^{(j)}`, and `h′_l^{(j)}` from the
    /// other targets, from which the partners cancel out.
    pub fn repair_target(
        &self,
        node: usize,
        codeword: &Codeword,
    ) -> Result<(BitVector, RepairReport)> {
        let Some(NodeRole::Target(j)) = self.roles.get(node).cloned() else {
            return Err(Error::NotATarget(node));
        };
        self.check_codeword(codeword)?;
        let r = self.config.r();
        let n_seg = self.segment_len();
        let download = |s: usize| self.block(codeword.node(s), j);
        let remainders: Vec<(usize, BitVector)> = self
            .config
            .remainders(self.base.n())
            .into_iter()
            .map(|s| (s, download(s)))
            .collect();
        let inst = self.complete(remainders)?;
        let blocks = (0..r)
            .map(|l| {
                let b = inst[self.position(j, l)].clone();
                if l == j {
                    return Ok(b);
                }
                let combo = download(self.config.targets[l]);
                if l < j {
                    let a = cancel(&b, &combo, PairKind::BBoxA, n_seg)?;
                    Ok(&a ^ &b)
                } else {
                    let a = &combo ^ &b;
                    boxplus(&a, &b, n_seg)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let alpha = self.base_alpha();
        let report = RepairReport {
            failed: node,
            n: self.base.n(),
            k: self.base.k(),
            alpha: self.alpha(),
            survivors: (0..self.base.n())
                .filter(|&s| s != node)
                .map(|s| SurvivorCount {
                    node: s,
                    accessed: alpha,
                    downloaded: alpha,
                    rows: (j * alpha..(j + 1) * alpha).collect(),
                })
                .collect(),
        };
        Ok((BitVector::concat(&blocks), report))
    }

    /// Remainder repair: every helper sends its base repair data per instance;
    /// paired target data is unpaired under the mask, then the base plan runs
    /// on each instance.
    pub fn repair_remainder(
        &self,
        node: usize,
        codeword: &Codeword,
    ) -> Result<(BitVector, RepairReport)> {
        let role = self
            .roles
            .get(node)
            .ok_or_else(|| Error::InvalidParameters(format!("node {node} out of range")))?;
        self.check_codeword(codeword)?;
        match role {
            NodeRole::Target(_) => Err(Error::NotARemainder(node)),
            NodeRole::Violating(e) => Err(e.clone()),
            NodeRole::NaiveRemainder => self.repair_naive(node, codeword),
            NodeRole::OptimalRemainder => {
                let rr = self.remainder_repairs[node]
                    .as_ref()
                    .expect("optimal remainder");
                let payload = self.repair_remainder_structural(node, rr, codeword)?;
                Ok((payload, self.spec.strategy_report(node)))
            }
        }
    }

    fn repair_naive(&self, node: usize, codeword: &Codeword) -> Result<(BitVector, RepairReport)> {
        let helpers: Vec<usize> = (0..self.base.n())
            .filter(|&j| j != node)
            .take(self.base.k())
            .collect();
        let shards: Vec<(usize, BitVector)> = helpers
            .iter()
            .map(|&j| (j, codeword.node(j).clone()))
            .collect();
        let stored = self.store(&self.decode_virtual(&shards)?)?;
        Ok((
            stored.payloads[node].clone(),
            crate::codes::naive_report(self.base.n(), self.base.k(), self.alpha(), node, &helpers),
        ))
    }

    fn repair_remainder_structural(
        &self,
        node: usize,
        rr: &RemainderRepair,
        codeword: &Codeword,
    ) -> Result<BitVector> {
        let (n, r) = (self.base.n(), self.config.r());
        let n_seg = self.segment_len();
        let mask = |s: usize| &rr.masks[s].as_ref().expect("helper mask").0;
        // masked[l][s] = S_{i,s} V^{(l)}_s in square form
        let mut masked: Vec<Vec<Option<BitVector>>> = vec![vec![None; n]; r];
        for s in (0..n).filter(|&s| s != node && self.config.target_index(s).is_none()) {
            for (l, row) in masked.iter_mut().enumerate() {
                row[s] = Some(mask(s).apply(&self.block(codeword.node(s), l)));
            }
        }
        // z[j][l] = S_{i,τ(π_l(j))} h′_j^{(l)}
        let z: Vec<Vec<BitVector>> = (0..r)
            .map(|j| {
                let payload = codeword.node(self.config.targets[j]);
                (0..r)
                    .map(|l| mask(self.position(l, j)).apply(&self.block(payload, l)))
                    .collect()
            })
            .collect();
        for l in 0..r {
            masked[l][self.position(l, l)] = Some(z[l][l].clone());
            for j in l + 1..r {
                let pos_jl = self.position(l, j);
                let halves = &rr.masks[pos_jl].as_ref().expect("helper mask").1;
                let mut sa = BitVector::zeros(self.base_alpha());
                let mut sb = BitVector::zeros(self.base_alpha());
                for (m, s_half) in halves.iter().enumerate() {
                    let (a, b) = masked_unpair(
                        &z[j][l].slice(m * n_seg, n_seg),
                        &z[l][j].slice(m * n_seg, n_seg),
                        s_half,
                    )?;
                    sa.write(m * n_seg, &a);
                    sb.write(m * n_seg, &b);
                }
                // a = u_l^{(j)}, b = u_j^{(l)}
                masked[j][self.position(j, l)] = Some(sa);
                masked[l][pos_jl] = Some(sb);
            }
        }
        let blocks: Vec<BitVector> = masked
            .iter()
            .map(|row| {
                let downloads: Vec<BitVector> = rr
                    .plan
                    .helpers
                    .iter()
                    .map(|(s, _)| mask(*s).compact(row[*s].as_ref().expect("all helpers")))
                    .collect();
                rr.plan.rebuild(&downloads)
            })
            .collect();
        Ok(BitVector::concat(&blocks))
    }

    fn check_codeword(&self, codeword: &Codeword) -> Result<()> {
        if codeword.n() != self.base.n() {
            return Err(Error::LengthMismatch {
                expected: self.base.n(),
                actual: codeword.n(),
            });
        }
        if let Some(p) = codeword.payloads.iter().find(|p| p.len() != self.alpha()) {
            return Err(Error::LengthMismatch {
                expected: self.alpha(),
                actual: p.len(),
            });
        }
        Ok(())
    }
}

fn remainder_repair(
    base: &SystematicCodeSpec,
    config: &TransformConfig,
    i: usize,
) -> Result<RemainderRepair> {
    let blocks = check_r1(base, i, config.segment_len, config.delta)?;
    check_r2(base, config, i)?;
    let plan = base
        .repair_plan(i)
        .map_err(|e| Error::BaseStrategyInvalid {
            node: i,
            reason: e.to_string(),
        })?;
    let mut masks = vec![None; base.n()];
    for (s, halves) in blocks {
        let mask = helper_mask(base.strategy(i), s, base.alpha()).expect("checked by R1");
        masks[s] = Some((mask, halves));
    }
    Ok(RemainderRepair { plan, masks })
}
