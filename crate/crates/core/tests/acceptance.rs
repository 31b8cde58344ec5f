//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use common::{assert_rows, oracle_decode, random_codeword, rng};
use rand::Rng;
use repairforge::codes::k_subsets;
use repairforge::pairing::{boxplus, cancel, unpair, PairKind};
use repairforge::pipelines::{algorithm1, algorithm2, Algorithm1Options, Algorithm2Options};
use repairforge::simulate::simulate_repair_all;
use repairforge::transform::{unpair_targets, NodeRole};
use repairforge::{
    apply_transform, cauchy_binary_mds, evenodd, mdr1_6_4, BitVector, RepairReport,
    SystematicCodeSpec, TransformConfig, TransformedCode, Variant,
};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Box-plus on one segment written directly from its definition, bit by bit.
fn box_oracle(a: &BitVector, b: &BitVector) -> BitVector {
    let h = a.len() / 2;
    BitVector::from_bools((0..a.len()).map(|i| {
        if i < h {
            a.get(i) ^ b.get(i) ^ b.get(i + h)
        } else {
            a.get(i) ^ b.get(i - h)
        }
    }))
}

fn box_oracle_n(a: &BitVector, b: &BitVector, n: usize) -> BitVector {
    let segs: Vec<BitVector> = (0..a.len() / n)
        .map(|s| box_oracle(&a.slice(s * n, n), &b.slice(s * n, n)))
        .collect();
    BitVector::concat(&segs)
}

fn bits(v: u32, len: usize) -> BitVector {
    BitVector::from_bools((0..len).map(|i| v >> i & 1 == 1))
}

fn criterion_1() -> Outcome {
    let mut images = std::collections::HashSet::new();
    for code in 0..16u32 {
        let (a, b) = (bits(code & 3, 2), bits(code >> 2, 2));
        let x = &a ^ &b;
        let y = box_oracle(&a, &b);
        ensure!(
            boxplus(&a, &b, 2).unwrap() == y,
            "box-plus differs from definition at {code}"
        );
        ensure!(
            images.insert((x.to_string(), y.to_string())),
            "pair map not injective at {code}"
        );
        ensure!(
            unpair(&x, &y, 2).unwrap() == (a, b),
            "unpair failed at {code}"
        );
    }
    ensure!(images.len() == 16, "pair map is not a bijection");
    let mut g = rng(1);
    for trial in 0..10_000 {
        let t = g.gen_range(1..=4);
        let n = 2 * g.gen_range(1..=4);
        let a = BitVector::random(t * n, &mut g);
        let b = BitVector::random(t * n, &mut g);
        let x = &a ^ &b;
        let y = box_oracle_n(&a, &b, n);
        let yb = box_oracle_n(&b, &a, n);
        ensure!(
            unpair(&x, &y, n).unwrap() == (a.clone(), b.clone()),
            "round trip {trial}"
        );
        ensure!(
            cancel(&b, &y, PairKind::ABoxB, n).unwrap() == a,
            "cancel a⊞b {trial}"
        );
        ensure!(
            cancel(&b, &yb, PairKind::BBoxA, n).unwrap() == a,
            "cancel b⊞a {trial}"
        );
        ensure!(
            cancel(&b, &x, PairKind::APlusB, n).unwrap() == a,
            "cancel a+b {trial}"
        );
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let q0 = evenodd(3).map_err(|e| e.to_string())?;
    assert_rows(&q0, 3, &["a_0+b_0+c_0", "a_1+b_1+c_1"]);
    assert_rows(&q0, 4, &["a_0+b_1+c_0+c_1", "a_1+b_0+b_1+c_0"]);
    ensure!(k_subsets(5, 3).len() == 10, "subset count");
    ensure!(q0.verify_mds().is_mds(), "EVENODD(3) is not MDS");
    Ok(())
}

fn mdr_predicate(i: usize, a: usize) -> bool {
    let (a0, a1) = (a & 1, a >> 1 & 1);
    match i {
        0 => a1 == 0,
        1 => a1 == 1,
        2 => a0 + a1 == 0 || a0 + a1 == 2,
        3 => a0 + a1 == 1,
        _ => unreachable!(),
    }
}

fn common_rows(rep: &RepairReport) -> Option<Vec<usize>> {
    rep.common_rows().map(<[usize]>::to_vec)
}

fn criterion_3() -> Outcome {
    let spec = mdr1_6_4();
    let pn0: Vec<String> = (0..8).map(|j| format!("a_{j}+b_{j}+c_{j}+d_{j}")).collect();
    let pn0: Vec<&str> = pn0.iter().map(String::as_str).collect();
    assert_rows(&spec, 4, &pn0);
    assert_rows(
        &spec,
        5,
        &[
            "a_0+a_3+b_0+c_1+c_4+d_4",
            "a_1+a_2+b_1+c_5+d_0+d_5",
            "a_2+b_1+b_2+c_6+d_3+d_6",
            "a_3+b_0+b_3+c_2+c_7+d_7",
            "a_0+a_4+a_7+b_0+b_4+c_0+c_5+d_0",
            "a_1+a_5+a_6+b_1+b_5+c_1+d_1+d_4",
            "a_2+a_6+b_2+b_5+b_6+c_2+d_2+d_7",
            "a_3+a_7+b_3+b_4+b_7+c_3+c_6+d_3",
        ],
    );
    ensure!(spec.verify_mds().is_mds(), "MDR-1 is not MDS");
    let reports = simulate_repair_all(&spec, 20, &mut rng(3)).map_err(|e| e.to_string())?;
    for i in 0..4 {
        let want: Vec<usize> = (0..8).filter(|&a| mdr_predicate(i, a)).collect();
        let rep = &reports[i];
        ensure!(
            common_rows(rep) == Some(want.clone()),
            "node {i} reads {:?}, want {want:?}",
            rep.common_rows()
        );
        ensure!(
            want.len() == 4 && rep.optimal_bandwidth() && rep.optimal_access(),
            "node {i} not optimal"
        );
    }
    Ok(())
}

const Q1_PN0: [&str; 4] = [
    "a_0+a_2+a_3+b_0+b_1+c_0",
    "a_1+a_2+b_0+c_1",
    "a_2+a_3+b_1+b_2+c_2",
    "a_2+b_0+b_1+b_3+c_3",
];
const Q1_PN1: [&str; 4] = [
    "a_0+a_2+b_0+c_0+c_1",
    "a_1+a_3+b_1+c_0",
    "a_2+a_3+b_1+b_3+c_2+c_3",
    "a_2+b_0+b_1+b_2+b_3+c_2",
];
const Q2_PN0: [&str; 8] = [
    "a_0+a_2+a_3+b_0+b_1+b_4+b_5+c_0+c_1",
    "a_1+a_2+b_0+b_4+c_0",
    "a_2+a_3+b_1+b_2+b_6+b_7+c_2+c_3",
    "a_2+b_0+b_1+b_3+b_6+c_2",
    "a_4+a_6+a_7+b_5+c_0+c_4",
    "a_5+a_6+b_4+b_5+c_1+c_5",
    "a_6+a_7+b_4+b_6+b_7+c_0+c_1+c_3+c_6",
    "a_6+b_5+b_6+c_0+c_2+c_3+c_7",
];
const Q2_PN1: [&str; 8] = [
    "a_0+a_2+b_0+b_5+c_1",
    "a_1+a_3+b_1+b_4+b_5+c_0+c_1",
    "a_2+a_3+b_1+b_3+b_7+c_3",
    "a_2+b_0+b_1+b_2+b_3+b_6+b_7+c_2+c_3",
    "a_4+a_6+b_4+b_5+c_1+c_4+c_5",
    "a_5+a_7+b_4+c_0+c_1+c_4",
    "a_6+a_7+b_4+b_6+c_0+c_1+c_2+c_3+c_6+c_7",
    "a_6+b_5+b_7+c_0+c_2+c_6",
];
// multi-line cells are joined with `+`; repeated terms cancel
const Q3_PN0: [&str; 16] = [
    "$a_0+a_2+a_3+b_0+b_1+b_4+b_5+c_0+c_1$",
    "$a_1+a_2+b_0+b_4+c_0$",
    "$a_2+a_3+b_1+b_2+b_6+b_7+c_2+c_3$",
    "$a_2+b_0+b_1+b_3+b_6+c_2$",
    "$a_4+a_6+a_7+b_5+c_0+c_4$",
    "$a_5+a_6+b_4+b_5+c_1+c_5$",
    "$a_6+a_7+b_4+b_6+b_7+c_0+c_1+c_3+c_6$",
    "$a_6+b_5+b_6+c_0+c_2+c_3+c_7$",
    "$a_8+a_{10}+a_{11}+b_8+b_9+b_{12}+b_{13}+c_8+c_9$+$a_0+a_2+b_0+b_5+c_1$+$a_1+a_3+b_1+b_4+b_5+c_0+c_1$",
    "$a_9+a_{10}+b_8+b_{12}+c_8$+$a_0+a_2+b_0+b_5+c_1$",
    "$a_{10}+a_{11}+b_9+b_{10}+b_{14}+b_{15}+c_{10}+c_{11}$+$a_2+a_3+b_1+b_3+b_7+c_3$+$a_2+b_0+b_1+b_2+b_3+b_6+b_7+c_2+c_3$",
    "$a_{10}+b_8+b_9+b_{11}+b_{14}+c_{10}$+$a_2+a_3+b_1+b_3+b_7+c_3$",
    "$a_{12}+a_{14}+a_{15}+b_{13}+c_8+c_{12}$+$a_4+a_6+b_4+b_5+c_1+c_4+c_5$+$a_5+a_7+b_4+c_0+c_1+c_4$",
    "$a_{13}+a_{14}+b_{12}+b_{13}+c_9+c_{13}$+$a_4+a_6+b_4+b_5+c_1+c_4+c_5$",
    "$a_{14}+a_{15}+b_{12}+b_{14}+b_{15}+c_8+c_9+c_{11}+c_{14}$+$a_6+a_7+b_4+b_6+c_0+c_1+c_2+c_3+c_6+c_7$+$a_6+b_5+b_7+c_0+c_2+c_6$",
    "$a_{14}+b_{13}+b_{14}+c_8+c_{10}+c_{11}+c_{15}$+$a_6+a_7+b_4+b_6+c_0+c_1+c_2+c_3+c_6+c_7$",
];
const Q3_PN1: [&str; 16] = [
    "$a_0+a_2+b_0+b_5+c_1$+$a_8+a_{10}+a_{11}+b_8+b_9+b_{12}+b_{13}+c_8+c_9$",
    "$a_1+a_3+b_1+b_4+b_5+c_0+c_1$+$a_9+a_{10}+b_8+b_{12}+c_8$",
    "$a_2+a_3+b_1+b_3+b_7+c_3$+$a_{10}+a_{11}+b_9+b_{10}+b_{14}+b_{15}+c_{10}+c_{11}$",
    "$a_2+b_0+b_1+b_2+b_3+b_6+b_7+c_2+c_3$+$a_{10}+b_8+b_9+b_{11}+b_{14}+c_{10}$",
    "$a_4+a_6+b_4+b_5+c_1+c_4+c_5$+$a_{12}+a_{14}+a_{15}+b_{13}+c_8+c_{12}$",
    "$a_5+a_7+b_4+c_0+c_1+c_4$+$a_{13}+a_{14}+b_{12}+b_{13}+c_9+c_{13}$",
    "$a_6+a_7+b_4+b_6+c_0+c_1+c_2+c_3+c_6+c_7$+$a_{14}+a_{15}+b_{12}+b_{14}+b_{15}+c_8+c_9+c_{11}+c_{14}$",
    "$a_6+b_5+b_7+c_0+c_2+c_6$+$a_{14}+b_{13}+b_{14}+c_8+c_{10}+c_{11}+c_{15}$",
    "$a_8+a_{10}+b_8+b_{13}+c_9$",
    "$a_9+a_{11}+b_9+b_{12}+b_{13}+c_8+c_9$",
    "$a_{10}+a_{11}+b_9+b_{11}+b_{15}+c_{11}$",
    "$a_{10}+b_8+b_9+b_{10}+b_{11}+b_{14}+b_{15}+c_{10}+c_{11}$",
    "$a_{12}+a_{14}+b_{12}+b_{13}+c_9+c_{12}+c_{13}$",
    "$a_{13}+a_{15}+b_{12}+c_8+c_9+c_{12}$",
    "$a_{14}+a_{15}+b_{12}+b_{14}+c_8+c_9+c_{10}+c_{11}+c_{14}+c_{15}$",
    "$a_{14}+b_{13}+b_{15}+c_8+c_{10}+c_{14}$",
];

fn one_based(rows: &[usize]) -> Vec<usize> {
    rows.iter().map(|r| r + 1).collect()
}

fn criterion_4() -> Outcome {
    let q0 = evenodd(3).map_err(|e| e.to_string())?;
    let opts = Algorithm1Options {
        perms: repairforge::pipelines::PermPolicy::Identity,
        trials: 4,
        seed: 11,
        ..Default::default()
    };
    let out = algorithm1(&q0, &opts).map_err(|e| e.to_string())?;
    ensure!(out.rounds.len() == 3, "expected three rounds");
    let [q1, q2, q3] = [0, 1, 2].map(|t| out.rounds[t].spec());
    assert_rows(q1, 3, &Q1_PN0);
    assert_rows(q1, 4, &Q1_PN1);
    assert_rows(q2, 3, &Q2_PN0);
    assert_rows(q2, 4, &Q2_PN1);
    assert_rows(q3, 3, &Q3_PN0);
    assert_rows(q3, 4, &Q3_PN1);
    ensure!(q3.alpha() == 16, "alpha {}", q3.alpha());
    let want: [Vec<usize>; 5] = [
        vec![1, 2, 5, 6, 9, 10, 13, 14],
        vec![1, 2, 3, 4, 9, 10, 11, 12],
        vec![5, 6, 7, 8, 13, 14, 15, 16],
        (1..=8).collect(),
        (9..=16).collect(),
    ];
    let reports =
        simulate_repair_all(out.final_code(), 10, &mut rng(4)).map_err(|e| e.to_string())?;
    for (node, rep) in reports.iter().enumerate() {
        let rows =
            common_rows(rep).ok_or(format!("node {node} reads different rows per helper"))?;
        ensure!(
            one_based(&rows) == want[node],
            "node {node} rows {:?}",
            one_based(&rows)
        );
        ensure!(
            rep.survivors
                .iter()
                .all(|s| s.downloaded == 8 && s.accessed == 8),
            "node {node} is not 8 per survivor"
        );
    }
    Ok(())
}

/// Repair rows of each node of the space-shared MDR-1 result, over 5-bit row indices.
fn c3_rows(node: usize) -> Vec<usize> {
    (0..32)
        .filter(|&a| match node {
            0..=3 => mdr_predicate(node, a),
            4 => a >> 4 & 1 == 0,
            5 => a >> 4 & 1 == 1,
            _ => unreachable!(),
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let base = mdr1_6_4();
    let opts = Algorithm2Options {
        force_space_share: true,
        trials: 4,
        seed: 12,
        ..Default::default()
    };
    let out = algorithm2(&base, &opts).map_err(|e| e.to_string())?;
    let code = out.final_code();
    let spec = code.spec();
    ensure!(
        spec.alpha() == 32 && spec.alpha() == 4 * base.alpha(),
        "alpha {}",
        spec.alpha()
    );
    // every systematic bit probed: C_3 node payloads against MDR-1 instances
    for bit in 0..spec.message_len() {
        let m = BitVector::unit(spec.message_len(), bit);
        let c = spec.encode(&m).map_err(|e| e.to_string())?;
        let inst: Vec<Vec<BitVector>> = (0..4)
            .map(|l| {
                let msg = BitVector::concat(
                    (0..4)
                        .map(|i| c.node(i).slice(8 * l, 8))
                        .collect::<Vec<_>>()
                        .iter(),
                );
                base.encode(&msg).unwrap().payloads
            })
            .collect();
        let g = |p: usize, l: usize| inst[l][4 + p].clone();
        let tn0 = BitVector::concat(&[
            g(0, 0),
            g(0, 1),
            &(&g(0, 2) ^ &g(1, 0)) ^ &g(1, 1),
            &g(0, 3) ^ &g(1, 0),
        ]);
        let tn1 = BitVector::concat(&[&g(1, 0) ^ &g(0, 2), &g(1, 1) ^ &g(0, 3), g(1, 2), g(1, 3)]);
        ensure!(
            c.node(4) == &tn0,
            "PN0 differs from the expected layout (bit {bit})"
        );
        ensure!(
            c.node(5) == &tn1,
            "PN1 differs from the expected layout (bit {bit})"
        );
    }
    ensure!(spec.verify_mds().is_mds(), "C_3 is not MDS");
    let reports = simulate_repair_all(code, 10, &mut rng(5)).map_err(|e| e.to_string())?;
    for (node, rep) in reports.iter().enumerate() {
        ensure!(
            common_rows(rep) == Some(c3_rows(node)),
            "node {node} rows {:?}",
            rep.common_rows()
        );
        ensure!(
            rep.survivors
                .iter()
                .all(|s| s.downloaded == 16 && s.accessed == 16),
            "node {node} is not 16 per survivor"
        );
    }
    Ok(())
}

fn walkthrough_code() -> Result<(SystematicCodeSpec, TransformedCode), String> {
    let base = cauchy_binary_mds(9, 6, 4).map_err(|e| e.to_string())?;
    let config = TransformConfig::new(vec![6, 7, 8], Variant::PairTargets, 4);
    let code = apply_transform(&base, config).map_err(|e| e.to_string())?;
    Ok((base, code))
}

fn criterion_6() -> Outcome {
    let (base, code) = walkthrough_code()?;
    let spec = code.spec();
    let mut g = rng(6);
    let subsets = k_subsets(9, 6);
    ensure!(subsets.len() == 84, "subset count");
    for trial in 0..100 {
        let (m, c) = random_codeword(spec, &mut g);
        // base instances g^{(l)} from the message slices
        let inst: Vec<Vec<BitVector>> = (0..3)
            .map(|l| {
                let msg = BitVector::concat(
                    (0..6)
                        .map(|i| c.node(i).slice(4 * l, 4))
                        .collect::<Vec<_>>()
                        .iter(),
                );
                base.encode(&msg).unwrap().payloads
            })
            .collect();
        let gq = |i: usize, l: usize, s: usize| inst[l][6 + i].slice(2 * s, 2);
        let hq = |i: usize, l: usize, s: usize| c.node(6 + i).slice(4 * l + 2 * s, 2);
        for i in 0..3 {
            for l in 0..3 {
                let (want0, want1) = if i == l {
                    (gq(i, l, 0), gq(i, l, 1))
                } else if i > l {
                    (&gq(i, l, 0) ^ &gq(l, i, 0), &gq(i, l, 1) ^ &gq(l, i, 1))
                } else {
                    (
                        &(&gq(i, l, 0) ^ &gq(l, i, 0)) ^ &gq(l, i, 1),
                        &gq(i, l, 1) ^ &gq(l, i, 0),
                    )
                };
                ensure!(
                    hq(i, l, 0) == want0 && hq(i, l, 1) == want1,
                    "TN {i} block {l} layout"
                );
            }
        }
        let g11_0 = &hq(0, 1, 0) ^ &hq(1, 0, 0);
        let g01_1 = &g11_0 ^ &hq(1, 0, 1);
        let g10_0 = &g01_1 ^ &hq(0, 1, 1);
        let g00_1 = &g10_0 ^ &hq(1, 0, 0);
        ensure!(
            g11_0 == gq(1, 0, 1)
                && g01_1 == gq(0, 1, 1)
                && g10_0 == gq(1, 0, 0)
                && g00_1 == gq(0, 1, 0),
            "elimination chain breaks on trial {trial}"
        );
        let g00_2 = &(&hq(0, 2, 0) ^ &gq(2, 0, 0)) ^ &gq(2, 0, 1);
        let g01_2 = &hq(0, 2, 1) ^ &gq(2, 0, 0);
        ensure!(
            g00_2 == gq(0, 2, 0) && g01_2 == gq(0, 2, 1),
            "g_0^(2) step on trial {trial}"
        );
        let shards: Vec<_> = (2..8).map(|j| (j, c.node(j).clone())).collect();
        ensure!(
            code.decode(&shards).map_err(|e| e.to_string())? == m,
            "nodes 2..7 decode"
        );
        for sub in &subsets {
            let shards: Vec<_> = sub.iter().map(|&j| (j, c.node(j).clone())).collect();
            let structural = code.decode(&shards).map_err(|e| e.to_string())?;
            ensure!(
                structural == oracle_decode(spec, sub, &c) && structural == m,
                "subset {sub:?}"
            );
        }
        let (p, rep) = code.repair_target(6, &c).map_err(|e| e.to_string())?;
        ensure!(&p == c.node(6), "target 0 repair payload");
        ensure!(
            rep.survivors
                .iter()
                .all(|s| s.downloaded == 4 && s.accessed == 4 && s.rows == vec![0, 1, 2, 3]),
            "target 0 must read row 1 only"
        );
    }
    Ok(())
}

/// Transformed codes exercised by the structural property checks.
fn suite_codes() -> Result<Vec<TransformedCode>, String> {
    let err = |e: repairforge::Error| e.to_string();
    let mut codes = Vec::new();
    let q0 = evenodd(3).map_err(err)?;
    codes.extend(
        algorithm1(&q0, &Algorithm1Options::default())
            .map_err(err)?
            .rounds,
    );
    codes.extend(
        algorithm1(
            &cauchy_binary_mds(5, 2, 3).map_err(err)?,
            &Algorithm1Options::default(),
        )
        .map_err(err)?
        .rounds,
    );
    for force in [false, true] {
        let opts = Algorithm2Options {
            force_space_share: force,
            ..Default::default()
        };
        codes.extend(algorithm2(&mdr1_6_4(), &opts).map_err(err)?.rounds);
    }
    codes.push(walkthrough_code()?.1);
    let c53 = cauchy_binary_mds(5, 3, 4).map_err(err)?;
    for (targets, variant) in [
        (vec![0, 4], Variant::PairTargets),
        (vec![2, 1], Variant::PairRemainders),
        (vec![3, 4], Variant::PairTargets),
    ] {
        let cfg = TransformConfig::for_base(&c53, targets, variant);
        codes.push(apply_transform(&c53, cfg).map_err(err)?);
    }
    let mdr = mdr1_6_4();
    for perms in [
        repairforge::transform::cyclic_perms(2),
        vec![vec![1, 0], vec![1, 0]],
    ] {
        let cfg = TransformConfig::new(vec![4, 5], Variant::PairTargets, 8).with_perms(perms);
        codes.push(apply_transform(&mdr, cfg).map_err(err)?);
    }
    Ok(codes)
}

fn criterion_7() -> Outcome {
    let mut g = rng(7);
    let codes = suite_codes()?;
    for code in &codes {
        let spec = code.spec();
        let name = spec.name();
        ensure!(spec.verify_mds().is_mds(), "{name}: not MDS");
        let base = code.base();
        let reports = simulate_repair_all(code, 3, &mut g).map_err(|e| format!("{name}: {e}"))?;
        for (node, rep) in reports.iter().enumerate() {
            match code.role(node) {
                NodeRole::Target(_) => ensure!(
                    rep.optimal_access() && rep.optimal_bandwidth(),
                    "{name}: target {node} not optimal"
                ),
                NodeRole::OptimalRemainder | NodeRole::NaiveRemainder => {
                    let b = base.strategy_report(node);
                    ensure!(
                        rep.normalized_bandwidth() == b.normalized_bandwidth()
                            && rep.normalized_access() == b.normalized_access(),
                        "{name}: remainder {node} changed its normalized cost"
                    );
                }
                NodeRole::Violating(e) => return Err(format!("{name}: node {node}: {e}")),
            }
        }
        if code.config().variant == Variant::PairRemainders {
            check_systematic_preservation(code, &mut g)?;
        }
    }
    // recombination identities on random h arrays
    for _ in 0..200 {
        let r = g.gen_range(2..=4);
        let n = 2 * g.gen_range(1..=3);
        let len = n * g.gen_range(1..=3);
        let h: Vec<Vec<BitVector>> = (0..r)
            .map(|_| (0..r).map(|_| BitVector::random(len, &mut g)).collect())
            .collect();
        let v = unpair_targets(&h, n).map_err(|e| e.to_string())?;
        for l in 0..r {
            ensure!(v[l][l] == h[l][l], "diagonal v");
            for t in l + 1..r {
                // v[l][t] = v_t^{(l)}, h[l][t] = h_t^{(l)}
                ensure!(&v[l][t] ^ &v[t][l] == h[l][t], "sum identity");
                ensure!(
                    box_oracle_n(&v[t][l], &v[l][t], n) == h[t][l],
                    "box identity"
                );
            }
        }
    }
    Ok(())
}

/// Systematic nodes hold raw message slices of the base instances, with
/// targets reading instance `l` at position `π_l(j)`.
fn check_systematic_preservation<R: Rng>(code: &TransformedCode, g: &mut R) -> Outcome {
    let base = code.base();
    let cfg = code.config();
    let (k, a) = (base.k(), base.alpha());
    let msgs: Vec<BitVector> = (0..cfg.r())
        .map(|_| BitVector::random(base.message_len(), g))
        .collect();
    let stored = code
        .store(
            &code
                .virtual_from_messages(&msgs)
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
    for node in 0..k {
        for (l, msg) in msgs.iter().enumerate() {
            let src = match cfg.target_index(node) {
                Some(j) => cfg.targets[cfg.perms[l][j]],
                None => node,
            };
            if cfg.modified_nodes(base.n()).contains(&node) {
                continue;
            }
            ensure!(
                stored.node(node).slice(l * a, a) == msg.slice(src * a, a),
                "{}: systematic node {node} instance {l} is not raw",
                code.spec().name()
            );
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let err = |e: repairforge::Error| e.to_string();
    let cases = [
        evenodd(3).map_err(err)?,
        cauchy_binary_mds(5, 3, 4).map_err(err)?,
        cauchy_binary_mds(5, 2, 3).map_err(err)?,
        cauchy_binary_mds(7, 4, 4).map_err(err)?,
        cauchy_binary_mds(7, 4, 3).map_err(err)?,
    ];
    for base in &cases {
        let out = algorithm1(base, &Algorithm1Options::default()).map_err(err)?;
        let n_seg = if base.alpha() % 2 == 0 {
            base.alpha()
        } else {
            2 * base.alpha()
        };
        let r = base.r();
        let want = r.pow(base.n().div_ceil(r) as u32) * n_seg;
        ensure!(
            out.final_code().alpha() == want,
            "{}: alpha {} != {want}",
            base.name(),
            out.final_code().alpha()
        );
        let reports = simulate_repair_all(out.final_code(), 1, &mut rng(8)).map_err(err)?;
        ensure!(
            reports
                .iter()
                .all(|r| r.optimal_access() && r.optimal_bandwidth()),
            "{}: some node is not optimal",
            base.name()
        );
    }
    let base = mdr1_6_4();
    for force in [false, true] {
        let opts = Algorithm2Options {
            force_space_share: force,
            ..Default::default()
        };
        let alpha = algorithm2(&base, &opts).map_err(err)?.final_code().alpha();
        ensure!(
            alpha == 2 * base.alpha() || alpha == 4 * base.alpha(),
            "alg2 alpha {alpha}"
        );
        ensure!(
            alpha == if force { 32 } else { 16 },
            "alg2 alpha {alpha} (forced: {force})"
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        (
            "pairing oracle: bijectivity and 10^4 round trips",
            criterion_1,
        ),
        ("EVENODD(3) parities and MDS", criterion_2),
        ("MDR-1 (6,4) parities, repair rows, MDS", criterion_3),
        (
            "Algorithm 1 on EVENODD(3): Q_1, Q_2, Q_3 and repair rows",
            criterion_4,
        ),
        ("Algorithm 2 on MDR-1 with space sharing", criterion_5),
        (
            "(9,6) walkthrough: elimination chain, target repair, oracle decode",
            criterion_6,
        ),
        (
            "MDS, optimal target repair, unchanged remainder cost, systematic layout",
            criterion_7,
        ),
        ("sub-packetization laws", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
