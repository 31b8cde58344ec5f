mod common;

use common::{oracle_decode, random_codeword, rng};
use repairforge::codes::k_subsets;
use repairforge::simulate::simulate_repair_all;
use repairforge::{
    cauchy_binary_mds, evenodd, mdr1_6_4, mdr1_repair_rows, BitVector, Error, MdsVerdict,
};

#[test]
fn evenodd_family_is_mds_and_decodes() {
    let mut g = rng(31);
    for p in [3, 5, 7] {
        let spec = evenodd(p).unwrap();
        assert_eq!((spec.n(), spec.k(), spec.alpha()), (p + 2, p, p - 1));
        assert!(spec.verify_mds().is_mds(), "p = {p}");
        let (m, c) = random_codeword(&spec, &mut g);
        for sub in k_subsets(spec.n(), spec.k()) {
            let shards: Vec<_> = sub.iter().map(|&j| (j, c.node(j).clone())).collect();
            assert_eq!(spec.reconstruct(&shards).unwrap(), m);
        }
    }
    assert!(matches!(evenodd(9), Err(Error::NotPrime(9))));
    assert!(matches!(evenodd(2), Err(Error::NotPrime(2))));
}

#[test]
fn cauchy_codes_are_mds() {
    for (n, k, w) in [(5, 3, 3), (6, 3, 3), (9, 6, 4), (7, 4, 3)] {
        let spec = cauchy_binary_mds(n, k, w).unwrap();
        assert_eq!(spec.alpha(), w);
        assert_eq!(spec.verify_mds(), MdsVerdict::Mds, "({n},{k},{w})");
    }
    assert!(matches!(
        cauchy_binary_mds(9, 6, 3),
        Err(Error::FieldTooSmall { .. })
    ));
}

#[test]
fn mdr1_rows_match_predicates() {
    let spec = mdr1_6_4();
    let reports = simulate_repair_all(&spec, 5, &mut rng(32)).unwrap();
    for i in 0..4 {
        let rows = mdr1_repair_rows(i, 3);
        assert_eq!(reports[i].common_rows(), Some(rows.as_slice()));
        assert!(reports[i].optimal_access());
    }
    for i in 4..6 {
        assert_eq!(reports[i].total_downloaded(), 4 * 8);
    }
}

#[test]
fn generic_reconstruct_agrees_with_oracle() {
    let spec = cauchy_binary_mds(6, 3, 3).unwrap();
    let mut g = rng(33);
    for _ in 0..10 {
        let (m, c) = random_codeword(&spec, &mut g);
        for sub in k_subsets(6, 3) {
            assert_eq!(oracle_decode(&spec, &sub, &c), m);
        }
    }
}

#[test]
fn corrupted_shape_is_rejected() {
    let spec = evenodd(3).unwrap();
    let shards = vec![
        (0, BitVector::zeros(2)),
        (1, BitVector::zeros(3)),
        (2, BitVector::zeros(2)),
    ];
    assert!(spec.reconstruct(&shards).is_err());
    let short = vec![(0, BitVector::zeros(2)), (1, BitVector::zeros(2))];
    assert!(spec.reconstruct(&short).is_err());
}
