#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repairforge::{BitVector, Codeword, SystematicCodeSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parses a sum of message symbols written in the usual array-code notation, such
/// as `$a_0+a_{10}+b_3$`. Letter `a` is systematic node 0, `b` node 1 and so
/// on; the subscript is the symbol index within the node.
pub fn expr(s: &str, k: usize, alpha: usize) -> BitVector {
    let cleaned: String = s
        .chars()
        .filter(|c| !matches!(c, '$' | '{' | '}' | '_' | ' '))
        .collect();
    let mut v = BitVector::zeros(k * alpha);
    for term in cleaned.split('+').filter(|t| !t.is_empty()) {
        let node = (term.as_bytes()[0] - b'a') as usize;
        let idx: usize = term[1..]
            .parse()
            .unwrap_or_else(|_| panic!("bad term {term}"));
        assert!(node < k && idx < alpha, "term {term} out of range");
        v.toggle(node * alpha + idx);
    }
    v
}

/// Generator row of symbol `row` at `node`, i.e. which message bits it sums.
pub fn symbol(spec: &SystematicCodeSpec, node: usize, row: usize) -> BitVector {
    spec.generator().row(node * spec.alpha() + row).clone()
}

/// Asserts that a parity node's rows equal the listed table expressions.
pub fn assert_rows(spec: &SystematicCodeSpec, node: usize, rows: &[&str]) {
    assert_eq!(rows.len(), spec.alpha());
    for (r, e) in rows.iter().enumerate() {
        assert_eq!(
            symbol(spec, node, r),
            expr(e, spec.k(), spec.alpha()),
            "node {node} row {r}: expected {e}"
        );
    }
}

pub fn random_codeword(spec: &SystematicCodeSpec, rng: &mut ChaCha8Rng) -> (BitVector, Codeword) {
    let m = BitVector::random(spec.message_len(), rng);
    let c = spec.encode(&m).unwrap();
    (m, c)
}

/// Independent Gaussian-elimination decode straight from the generator.
pub fn oracle_decode(spec: &SystematicCodeSpec, nodes: &[usize], c: &Codeword) -> BitVector {
    let idx: Vec<usize> = nodes
        .iter()
        .flat_map(|&j| (j * spec.alpha())..((j + 1) * spec.alpha()))
        .collect();
    let rows = spec.generator().select_rows(&idx);
    let y = BitVector::concat(nodes.iter().map(|&j| c.node(j)));
    rows.solve(&y).expect("consistent system")
}
