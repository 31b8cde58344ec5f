use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

use super::{RepairStrategy, SystematicCodeSpec};

/// The `(p + 2, p)` EVENODD array code with `α = p − 1`.
///
/// Row parity `P_i = Σ_j d_{i,j}`. Diagonal parity
/// `Q_i = S + Σ_j d_{⟨i−j⟩_p, j}` with the adjuster
/// `S = Σ_{j=1}^{p−1} d_{p−1−j, j}` and an imaginary zero row `p − 1`.
pub fn evenodd(p: usize) -> Result<SystematicCodeSpec> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let alpha = p - 1;
    let row = vec![BitMatrix::identity(alpha); p];
    let diag = (0..p)
        .map(|j| {
            BitMatrix::from_fn(alpha, alpha, |i, s| {
                let on_diagonal = (i + p - j) % p == s;
                let in_adjuster = j >= 1 && s == p - 1 - j;
                on_diagonal ^ in_adjuster
            })
        })
        .collect();
    SystematicCodeSpec::new(
        format!("evenodd-{p}"),
        p + 2,
        p,
        alpha,
        vec![row, diag],
        vec![RepairStrategy::Naive; p + 2],
    )
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primes() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert_eq!(evenodd(p).unwrap_err(), Error::NotPrime(p));
        }
    }

    #[test]
    fn larger_primes_are_mds() {
        assert!(evenodd(5).unwrap().verify_mds().is_mds());
        assert!(evenodd(7).unwrap().verify_mds().is_mds());
    }
}
