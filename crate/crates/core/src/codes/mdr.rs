use crate::gf2::BitMatrix;

use super::{RepairStrategy, SystematicCodeSpec};

/// Second parity of the `(6,4)` MDR-1 code: for each row, the `(node, symbol)`
/// terms. The first parity is the rowwise sum.
const PN1: [&[(usize, usize)]; 8] = [
    &[(0, 0), (0, 3), (1, 0), (2, 1), (2, 4), (3, 4)],
    &[(0, 1), (0, 2), (1, 1), (2, 5), (3, 0), (3, 5)],
    &[(0, 2), (1, 1), (1, 2), (2, 6), (3, 3), (3, 6)],
    &[(0, 3), (1, 0), (1, 3), (2, 2), (2, 7), (3, 7)],
    &[
        (0, 0),
        (0, 4),
        (0, 7),
        (1, 0),
        (1, 4),
        (2, 0),
        (2, 5),
        (3, 0),
    ],
    &[
        (0, 1),
        (0, 5),
        (0, 6),
        (1, 1),
        (1, 5),
        (2, 1),
        (3, 1),
        (3, 4),
    ],
    &[
        (0, 2),
        (0, 6),
        (1, 2),
        (1, 5),
        (1, 6),
        (2, 2),
        (3, 2),
        (3, 7),
    ],
    &[
        (0, 3),
        (0, 7),
        (1, 3),
        (1, 4),
        (1, 7),
        (2, 3),
        (2, 6),
        (3, 3),
    ],
];

/// Rows read from every survivor when systematic node `i ∈ [0,4)` of an
/// MDR-1 code with `α = 2^bits` fails. Only the two low index bits matter.
pub fn mdr1_repair_rows(i: usize, bits: u32) -> Vec<usize> {
    let keep = |a: usize| {
        let (a0, a1) = (a & 1, (a >> 1) & 1);
        match i {
            0 => a1 == 0,
            1 => a1 == 1,
            2 => a0 == a1,
            3 => a0 != a1,
            _ => panic!("MDR-1 row sets are defined for systematic nodes 0..4"),
        }
    };
    (0..1usize << bits).filter(|&a| keep(a)).collect()
}

/// The `(6,4)` MDR-1 code with `α = 8`; systematic nodes repair by row
/// selection, parities naively.
pub fn mdr1_6_4() -> SystematicCodeSpec {
    let alpha = 8;
    let row = vec![BitMatrix::identity(alpha); 4];
    let mut second = vec![BitMatrix::zeros(alpha, alpha); 4];
    for (r, terms) in PN1.iter().enumerate() {
        for &(node, s) in *terms {
            second[node].set(r, s, true);
        }
    }
    let mut repair: Vec<RepairStrategy> = (0..4)
        .map(|i| RepairStrategy::RowSelect {
            rows: mdr1_repair_rows(i, 3),
        })
        .collect();
    repair.extend([RepairStrategy::Naive, RepairStrategy::Naive]);
    SystematicCodeSpec::new("mdr1-6-4", 6, 4, alpha, vec![row, second], repair)
        .expect("static MDR-1 tables are well formed")
}
