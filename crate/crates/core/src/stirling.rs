//! Signless Stirling numbers of the first kind.
//!
//! `c(n, k)` counts permutations of `n` elements with `k` left-to-right
//! minima (equivalently `k` cycles).

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::rat::factorial;
use crate::exactmath::{BiSeries, Poly, Rat};

pub const DEFAULT_MAX_N: usize = 64;

/// Triangular table of `c(n, k)` for `0 <= k <= n <= max_n`.
#[derive(Clone, Debug)]
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    /// Fills the table eagerly with `c(n,k) = c(n-1,k-1) + (n-1) c(n-1,k)`.
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let row = (0..=n)
                .map(|k| {
                    let left = if k >= 1 {
                        prev[k - 1].clone()
                    } else {
                        BigUint::zero()
                    };
                    let right = prev.get(k).map_or_else(BigUint::zero, |c| c * (n - 1));
                    left + right
                })
                .collect();
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `c(n, k)`, zero for `k < 0` or `k > n`. Panics if `n > max_n`.
    pub fn c(&self, n: usize, k: i64) -> BigUint {
        assert!(
            n <= self.max_n(),
            "Stirling table holds n <= {}, asked {n}",
            self.max_n()
        );
        if k < 0 {
            return BigUint::zero();
        }
        self.rows[n].get(k as usize).cloned().unwrap_or_default()
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n]
    }
}

/// Shared table up to [`DEFAULT_MAX_N`].
pub fn default_table() -> &'static StirlingTable {
    static TABLE: OnceLock<StirlingTable> = OnceLock::new();
    TABLE.get_or_init(|| StirlingTable::new(DEFAULT_MAX_N))
}

pub fn stirling_c(n: usize, k: i64) -> BigUint {
    if n <= DEFAULT_MAX_N {
        default_table().c(n, k)
    } else {
        StirlingTable::new(n).c(n, k)
    }
}

/// Permutations of length `n` encoding a finished `p`-player game:
/// `(n-1) c(n-1, n-p+1)`.
pub fn complete_game_count(n: usize, p: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    stirling_c(n - 1, n as i64 - p as i64 + 1) * (n - 1)
}

/// `n! [z^n] exp(v log 1/(1-z))` as a polynomial in `v`, for `n <= n_max`.
///
/// Computed purely with series arithmetic, independent of the recurrence.
pub fn egf_rows(n_max: usize) -> Result<Vec<Poly>> {
    let one_minus_z = BiSeries::from_fn(n_max, n_max, |i, j| match (i, j) {
        (0, 0) => Rat::one(),
        (0, 1) => -Rat::one(),
        _ => Rat::zero(),
    });
    let log_inv = BiSeries::one(n_max, n_max).div(&one_minus_z)?.log()?;
    // v * log(1/(1-z)): shift every u-row up by one power of v.
    let v = BiSeries::monomial(n_max, n_max, Rat::one(), 1, 0);
    let egf = (&v * &log_inv).exp()?;
    Ok((0..=n_max)
        .map(|n| {
            let nf = Rat::from_integer(factorial(n));
            Poly::new((0..=n_max).map(|k| egf.coeff(k, n) * &nf).collect())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EgfReport {
    pub rows_checked: usize,
}

/// Checks the exponential generating function of `c(n,k)` row by row.
pub fn verify_stirling_egf(n_max: usize) -> Result<EgfReport> {
    let table = StirlingTable::new(n_max);
    for (n, row) in egf_rows(n_max)?.into_iter().enumerate() {
        let want = Poly::new(
            table
                .row(n)
                .iter()
                .map(|c| Rat::from_integer(BigInt::from(c.clone())))
                .collect(),
        );
        if row != want {
            return Err(Error::IdentityViolation(format!(
                "Stirling EGF row {n}: series gives {row}, table gives {want}"
            )));
        }
    }
    Ok(EgfReport {
        rows_checked: n_max + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat::int;
    use crate::testutil::{all_perms, naive_lrm_count};

    fn count_lrm(n: usize, k: usize) -> usize {
        all_perms(n)
            .iter()
            .filter(|p| naive_lrm_count(p) == k)
            .count()
    }

    #[test]
    fn values_match_enumeration() {
        assert_eq!(stirling_c(3, 2), BigUint::from(count_lrm(3, 2)));
        assert_eq!(stirling_c(3, 2), BigUint::from(3u32));
        assert_eq!(stirling_c(4, 1), BigUint::from(count_lrm(4, 1)));
        assert_eq!(stirling_c(4, 1), BigUint::from(6u32));
        for n in 0..=7 {
            for k in 0..=n {
                assert_eq!(
                    stirling_c(n, k as i64),
                    BigUint::from(count_lrm(n, k)),
                    "c({n},{k})"
                );
            }
        }
    }

    #[test]
    fn edges() {
        for n in 0..10 {
            assert_eq!(stirling_c(n, n as i64), BigUint::one());
            assert!(stirling_c(n, -1).is_zero());
            assert!(stirling_c(n, n as i64 + 1).is_zero());
        }
        assert!(stirling_c(5, 0).is_zero());
        assert_eq!(stirling_c(0, 0), BigUint::one());
        // beyond the shared table
        assert_eq!(stirling_c(70, 70), BigUint::one());
    }

    #[test]
    fn row_sums_are_factorials() {
        let t = default_table();
        for n in 0..=DEFAULT_MAX_N {
            let sum: BigUint = t.row(n).iter().sum();
            assert_eq!(BigInt::from(sum), factorial(n), "n = {n}");
        }
    }

    #[test]
    fn complete_game_count_examples() {
        // brute force: lrm = n-p+1 and last entry != 1
        let brute = |n: usize, p: usize| {
            all_perms(n)
                .iter()
                .filter(|pi| naive_lrm_count(pi) == n + 1 - p && pi[n - 1] != 1)
                .count()
        };
        assert_eq!(complete_game_count(3, 2), BigUint::from(2u32));
        assert_eq!(complete_game_count(3, 2), BigUint::from(brute(3, 2)));
        assert_eq!(complete_game_count(2, 2), BigUint::one());
        assert!(complete_game_count(3, 5).is_zero());
        for n in 2..=7 {
            for p in 2..=n {
                assert_eq!(
                    complete_game_count(n, p),
                    BigUint::from(brute(n, p)),
                    "({n},{p})"
                );
            }
        }
    }

    #[test]
    fn complete_games_partition_last_not_one() {
        for n in 2..=8 {
            let total: BigUint = (2..=n).map(|p| complete_game_count(n, p)).sum();
            let brute = all_perms(n).iter().filter(|pi| pi[n - 1] != 1).count();
            assert_eq!(total, BigUint::from(brute));
            let closed = factorial(n) - factorial(n - 1);
            assert_eq!(BigInt::from(total), closed);
        }
    }

    #[test]
    fn egf_identity() {
        assert_eq!(verify_stirling_egf(6).unwrap().rows_checked, 7);
        let rows = egf_rows(4).unwrap();
        assert_eq!(rows[0], Poly::one());
        assert_eq!(rows[2], Poly::new(vec![int(0), int(1), int(1)]));
        assert!(verify_stirling_egf(20).is_ok());
    }
}
