//! Multi-round compositions that give every node optimal repair.
//!
//! [`algorithm1`] starts from a code without efficient repair and transforms
//! `r` nodes per round. [`algorithm2`] starts from a code whose systematic
//! nodes already repair optimally and transforms the parities once.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{RepairStrategy, SystematicCodeSpec};
use crate::error::{Error, Result};
use crate::format::spec_sha256_hex;
use crate::gf2::{detect_paired_blocks, BitMatrix};
use crate::simulate::simulate_nodes;
use crate::transform::{
    apply_transform, check_r1, cyclic_perms, default_perms, identity_perms, NodeRole,
    TransformConfig, TransformedCode, Variant,
};

pub const MANIFEST_FORMAT: &str = "repairforge-pipeline/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermPolicy {
    /// Identity when every repairing remainder reads the same data from all
    /// targets, cyclic otherwise.
    #[default]
    Auto,
    Identity,
    Cyclic,
}

impl PermPolicy {
    fn perms(self, base: &SystematicCodeSpec, targets: &[usize]) -> Vec<Vec<usize>> {
        match self {
            PermPolicy::Auto => default_perms(base, targets, base.alpha()),
            PermPolicy::Identity => identity_perms(targets.len()),
            PermPolicy::Cyclic => cyclic_perms(targets.len()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Algorithm1Options {
    pub perms: PermPolicy,
    /// Use plain target pairing in every round, even when the targets are
    /// systematic.
    pub pair_targets_only: bool,
    /// Random codewords per node when simulating repair after each round.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default)]
pub struct Algorithm2Options {
    pub perms: PermPolicy,
    /// Space-share even when every systematic strategy already satisfies R1.
    pub force_space_share: bool,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPlan {
    pub round: usize,
    pub targets: Vec<usize>,
    pub perms: Vec<Vec<usize>>,
    pub variant: Variant,
    pub segment_len: usize,
    pub delta: usize,
    pub alpha_in: usize,
    pub alpha_out: usize,
}

/// Expected repair rows of each node after a round: nodes transformed in an
/// earlier round read the rows whose instance digit of that round equals
/// their target index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatedStrategy {
    pub segment_len: usize,
    pub r: usize,
    /// Per node: `(round, target index)` of its last transformation.
    pub last_targeted: Vec<Option<(usize, usize)>>,
    pub alpha: usize,
}

impl PropagatedStrategy {
    pub fn new(n: usize, r: usize, segment_len: usize) -> Self {
        Self {
            segment_len,
            r,
            last_targeted: vec![None; n],
            alpha: segment_len,
        }
    }

    /// Records a round; the sub-packetization grows by `r`.
    pub fn advance(&mut self, round: usize, targets: &[usize]) {
        for (j, &t) in targets.iter().enumerate() {
            self.last_targeted[t] = Some((round, j));
        }
        self.alpha *= self.r;
    }

    /// Instance digit of `row` in `round`.
    pub fn digit(&self, row: usize, round: usize) -> usize {
        row / (self.segment_len * self.r.pow(round as u32)) % self.r
    }

    pub fn rows(&self, node: usize) -> Option<Vec<usize>> {
        let (round, j) = self.last_targeted[node]?;
        Some(
            (0..self.alpha)
                .filter(|&x| self.digit(x, round) == j)
                .collect(),
        )
    }

    /// Half-block `w` (of size `N/2`) is the identity iff the digit matches.
    pub fn block_form(&self, node: usize) -> Option<BitMatrix> {
        let rows = self.rows(node)?;
        Some(BitMatrix::row_selector(self.alpha, &rows))
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub algorithm: &'static str,
    /// Base after the optional space sharing.
    pub base: SystematicCodeSpec,
    pub space_shared: bool,
    pub plans: Vec<RoundPlan>,
    pub rounds: Vec<TransformedCode>,
    pub notes: Vec<String>,
}

impl PipelineOutput {
    pub fn final_code(&self) -> &TransformedCode {
        self.rounds.last().expect("at least one round")
    }

    pub fn manifest(&self, original: &SystematicCodeSpec) -> PipelineManifest {
        PipelineManifest {
            format: MANIFEST_FORMAT.into(),
            algorithm: self.algorithm.into(),
            base: original.name().into(),
            base_sha256: spec_sha256_hex(original),
            space_shared: self.space_shared,
            rounds: self
                .plans
                .iter()
                .zip(&self.rounds)
                .map(|(plan, code)| RoundRecord {
                    plan: plan.clone(),
                    spec: code.spec().name().into(),
                    spec_sha256: spec_sha256_hex(code.spec()),
                })
                .collect(),
            final_alpha: self.final_code().alpha(),
            notes: self.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub plan: RoundPlan,
    pub spec: String,
    pub spec_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineManifest {
    pub format: String,
    pub algorithm: String,
    pub base: String,
    pub base_sha256: String,
    pub space_shared: bool,
    pub rounds: Vec<RoundRecord>,
    pub final_alpha: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Target windows of the `⌈n/r⌉` rounds. Early rounds cover `r` consecutive
/// nodes starting at `min(t·r, k − r)` (clamped at 0); the last round takes
/// the parities.
pub fn target_windows(n: usize, k: usize) -> Vec<Vec<usize>> {
    let r = n - k;
    let m = n.div_ceil(r);
    (0..m)
        .map(|t| {
            if t + 1 == m {
                (k..n).collect()
            } else {
                let start = (t * r).min(k.saturating_sub(r));
                (start..start + r).collect()
            }
        })
        .collect()
}

fn prepare_even(
    base: &SystematicCodeSpec,
    notes: &mut Vec<String>,
) -> Result<(SystematicCodeSpec, bool)> {
    if base.alpha() % 2 == 1 {
        notes.push(format!(
            "alpha = {} is odd; two instances were space-shared first",
            base.alpha()
        ));
        Ok((base.space_share(2)?, true))
    } else {
        Ok((base.clone(), false))
    }
}

fn verify_by_simulation(
    code: &TransformedCode,
    nodes: &[usize],
    trials: usize,
    seed: u64,
    round: usize,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ round as u64);
    let reports = simulate_nodes(code, nodes, trials.max(1), &mut rng).map_err(|e| {
        Error::PropagationFailure {
            round,
            node: match e {
                Error::PayloadMismatch { node } => node,
                _ => usize::MAX,
            },
            reason: e.to_string(),
        }
    })?;
    for rep in reports {
        if !rep.optimal_access() || !rep.optimal_bandwidth() {
            return Err(Error::PropagationFailure {
                round,
                node: rep.failed,
                reason: format!(
                    "downloads {} and accesses {} symbols instead of {} per survivor",
                    rep.total_downloaded(),
                    rep.total_accessed(),
                    rep.optimal_per_node()
                ),
            });
        }
    }
    Ok(())
}

/// Transforms `r` nodes per round until every node repairs optimally. The
/// final sub-packetization is `r^⌈n/r⌉·N` with `N` the (even) base α.
pub fn algorithm1(base: &SystematicCodeSpec, opts: &Algorithm1Options) -> Result<PipelineOutput> {
    let mut notes = Vec::new();
    let (base, space_shared) = prepare_even(base, &mut notes)?;
    let (n, k, r) = (base.n(), base.k(), base.r());
    let segment_len = base.alpha();
    let windows = target_windows(n, k);
    let mut propagated = PropagatedStrategy::new(n, r, segment_len);
    let mut current = base.clone();
    let mut plans = Vec::new();
    let mut rounds: Vec<TransformedCode> = Vec::new();
    for (t, targets) in windows.iter().enumerate() {
        let systematic_targets = targets.iter().all(|&j| j < k);
        let variant = if systematic_targets && !opts.pair_targets_only && k >= r {
            Variant::PairRemainders
        } else {
            Variant::PairTargets
        };
        let delta = current.alpha() / segment_len;
        let perms = opts.perms.perms(&current, targets);
        let config = TransformConfig::new(targets.clone(), variant, current.alpha())
            .with_perms(perms.clone())
            .with_segmentation(segment_len, delta);
        let code = apply_transform(&current, config)?;
        propagated.advance(t, targets);
        check_propagation(&code, &propagated, t)?;
        let optimal: Vec<usize> = (0..n)
            .filter(|&i| propagated.last_targeted[i].is_some())
            .collect();
        verify_by_simulation(&code, &optimal, opts.trials, opts.seed, t)?;
        plans.push(RoundPlan {
            round: t,
            targets: targets.clone(),
            perms,
            variant,
            segment_len,
            delta,
            alpha_in: current.alpha(),
            alpha_out: code.alpha(),
        });
        current = code.spec().clone();
        rounds.push(code);
    }
    Ok(PipelineOutput {
        algorithm: "alg1",
        base,
        space_shared,
        plans,
        rounds,
        notes,
    })
}

/// Every node transformed so far must repair through exactly the rows the
/// digit rule predicts, in paired block-diagonal form.
fn check_propagation(
    code: &TransformedCode,
    propagated: &PropagatedStrategy,
    round: usize,
) -> Result<()> {
    let spec = code.spec();
    for node in 0..spec.n() {
        let Some(expected) = propagated.rows(node) else {
            continue;
        };
        let fail = |reason: String| Error::PropagationFailure {
            round,
            node,
            reason,
        };
        if let NodeRole::Violating(e) = code.role(node) {
            return Err(fail(e.to_string()));
        }
        match spec.strategy(node) {
            RepairStrategy::RowSelect { rows } => {
                let mut got = rows.clone();
                got.sort_unstable();
                if got != expected {
                    return Err(fail(format!("reads rows {got:?}, expected {expected:?}")));
                }
            }
            other => return Err(fail(format!("unexpected strategy {other:?}"))),
        }
        let form = propagated.block_form(node).expect("targeted node");
        detect_paired_blocks(
            &form,
            propagated.segment_len,
            propagated.alpha / propagated.segment_len,
        )
        .map_err(|m| fail(format!("row set is not paired block-diagonal at {m:?}")))?;
    }
    Ok(())
}

/// Upgrades a code whose systematic nodes repair optimally: the parities
/// become targets of a single transformation, after space sharing two
/// instances when R1 fails (or when forced).
pub fn algorithm2(base: &SystematicCodeSpec, opts: &Algorithm2Options) -> Result<PipelineOutput> {
    let (n, k) = (base.n(), base.k());
    let mut notes = Vec::new();
    for i in 0..k {
        if base.strategy(i).is_naive() {
            return Err(Error::BaseStrategyInvalid {
                node: i,
                reason: "systematic node repairs naively".into(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    simulate_nodes(
        base,
        &(0..k).collect::<Vec<_>>(),
        opts.trials.max(1),
        &mut rng,
    )
    .map_err(|e| Error::BaseStrategyInvalid {
        node: match e {
            Error::PayloadMismatch { node } | Error::StrategyIncomplete { node } => node,
            _ => usize::MAX,
        },
        reason: e.to_string(),
    })?;
    let r1_failure = if base.alpha() % 2 == 1 {
        Some(format!("alpha = {} is odd", base.alpha()))
    } else {
        (0..k)
            .find_map(|i| check_r1(base, i, base.alpha(), 1).err())
            .map(|e| e.to_string())
    };
    let share = r1_failure.is_some() || opts.force_space_share;
    match (&r1_failure, opts.force_space_share) {
        (Some(reason), _) => notes.push(format!(
            "R1 fails on the base ({reason}); space-shared two instances"
        )),
        (None, true) => {
            notes.push("R1 already holds on the base; space sharing was forced on request".into())
        }
        (None, false) => notes.push("R1 holds on the base; no space sharing".into()),
    }
    let c2 = if share {
        base.space_share(2)?
    } else {
        base.clone()
    };
    let targets: Vec<usize> = (k..n).collect();
    let perms = opts.perms.perms(&c2, &targets);
    let config = TransformConfig::new(targets.clone(), Variant::PairTargets, c2.alpha())
        .with_perms(perms.clone());
    let code = apply_transform(&c2, config)?;
    for node in 0..n {
        if let NodeRole::Violating(e) = code.role(node) {
            return Err(Error::PropagationFailure {
                round: 0,
                node,
                reason: e.to_string(),
            });
        }
    }
    verify_by_simulation(
        &code,
        &(0..n).collect::<Vec<_>>(),
        opts.trials,
        opts.seed,
        0,
    )?;
    let plan = RoundPlan {
        round: 0,
        targets,
        perms,
        variant: Variant::PairTargets,
        segment_len: c2.alpha(),
        delta: 1,
        alpha_in: c2.alpha(),
        alpha_out: code.alpha(),
    };
    Ok(PipelineOutput {
        algorithm: "alg2",
        base: c2,
        space_shared: share,
        plans: vec![plan],
        rounds: vec![code],
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_follow_the_rule() {
        assert_eq!(
            target_windows(5, 3),
            vec![vec![0, 1], vec![1, 2], vec![3, 4]]
        );
        assert_eq!(target_windows(5, 2), vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(
            target_windows(7, 4),
            vec![vec![0, 1, 2], vec![1, 2, 3], vec![4, 5, 6]]
        );
        assert_eq!(target_windows(9, 6).len(), 3);
    }

    #[test]
    fn digit_rule_rows() {
        let mut p = PropagatedStrategy::new(5, 2, 2);
        p.advance(0, &[0, 1]);
        assert_eq!(p.rows(0).unwrap(), vec![0, 1]);
        p.advance(1, &[1, 2]);
        assert_eq!(p.rows(0).unwrap(), vec![0, 1, 4, 5]);
        assert_eq!(p.rows(1).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(p.rows(3), None);
    }
}
