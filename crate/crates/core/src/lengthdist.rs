//! Game-length distribution.
//!
//! `Q_{n,p}(x)` is the probability that, with `p` players left and distance
//! to beat `x`, the game ends after exactly `n` further throws. The table
//! comes from the first-throw recurrence; the closed generating functions
//! are expanded independently with series arithmetic so the two can be
//! compared coefficient by coefficient.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::rat::to_f64;
use crate::exactmath::{BiSeries, Poly, Rat, Series1};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub(crate) fn check_unit(x: &Rat) -> Result<()> {
    if x < &Rat::zero() || x > &Rat::one() {
        return Err(Error::OutOfUnitInterval(x.to_string()));
    }
    Ok(())
}

/// `Q_{n,p}(x)` for all `n <= max_n`, `1 <= p <= max_p`.
///
/// Filled eagerly in the constructor and immutable afterwards, so a table
/// can be shared across threads without locking.
#[derive(Clone, Debug)]
pub struct QTable {
    max_n: usize,
    /// `polys[p][n]`; row `p = 0` is unused and all zero.
    polys: Vec<Vec<Poly>>,
}

impl QTable {
    pub fn new(max_n: usize, max_p: usize) -> Self {
        let mut polys = vec![vec![Poly::zero(); max_n + 1]; max_p + 1];
        if max_p >= 1 {
            polys[1][0] = Poly::one();
        }
        for n in 1..=max_n {
            for p in 2..=max_p {
                let eliminated = polys[p - 1][n - 1].times_one_minus_x();
                let survived = polys[p][n - 1].integrate();
                polys[p][n] = &eliminated + &survived;
            }
        }
        QTable { max_n, polys }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn max_p(&self) -> usize {
        self.polys.len() - 1
    }

    /// Panics outside the table.
    pub fn get(&self, n: usize, p: usize) -> &Poly {
        &self.polys[p][n]
    }

    pub fn prob(&self, n: usize, p: usize) -> Rat {
        self.get(n, p).eval(&Rat::one())
    }

    /// `sum_{n <= big_n} Q_{n,p}(x)` as a polynomial.
    pub fn partial_sum(&self, p: usize, big_n: usize) -> Poly {
        self.polys[p][..=big_n].iter().sum()
    }

    /// Exact mass beyond `big_n` throws: `1 - sum_{n <= big_n} Q_{n,p}(x)`.
    pub fn tail(&self, p: usize, big_n: usize, x: &Rat) -> Rat {
        Rat::one() - self.partial_sum(p, big_n).eval(x)
    }
}

pub fn q_poly(n: usize, p: usize) -> Poly {
    QTable::new(n, p).get(n, p).clone()
}

/// `Q_{n,p} = Q_{n,p}(1)`.
pub fn q_prob(n: usize, p: usize) -> Rat {
    q_poly(n, p).eval(&Rat::one())
}

fn u_over_one_minus_u(nu: usize, nz: usize) -> BiSeries {
    BiSeries::from_fn(nu, nz, |i, j| {
        if j == 0 && i >= 1 {
            Rat::one()
        } else {
            Rat::zero()
        }
    })
}

/// `1 - c u z`.
fn one_minus_c_uz(nu: usize, nz: usize, c: Rat) -> BiSeries {
    &BiSeries::one(nu, nz) - &BiSeries::monomial(nu, nz, c, 1, 1)
}

/// Expands
/// `u/(1-u) + (u/(1-uz) - u/(1-u)) * ((1-uz)/(1-(1-x)uz))^(1-1/u)`
/// over the window `u^0..u^nu`, `z^0..z^nz`.
///
/// The power is `exp((1 - 1/u) log(...))`; every term of the logarithm
/// carries `(uz)^m` with `m >= 1`, so the division by `u` is exact and
/// the exponent has zero constant term.
pub fn q_closed_series(x: &Rat, nu: usize, nz: usize) -> Result<BiSeries> {
    check_unit(x)?;
    let wide = nu + 1;
    let ratio =
        one_minus_c_uz(wide, nz, Rat::one()).div(&one_minus_c_uz(wide, nz, Rat::one() - x))?;
    let log = ratio.log()?;
    let u_minus_one = &BiSeries::monomial(wide, nz, Rat::one(), 1, 0) - &BiSeries::one(wide, nz);
    let exponent = (&u_minus_one * &log).div_by_u()?;
    let power = exponent.exp()?;
    let a = u_over_one_minus_u(nu, nz);
    let b = BiSeries::from_fn(
        nu,
        nz,
        |i, j| if i == j + 1 { Rat::one() } else { Rat::zero() },
    );
    Ok(&a + &(&(&b - &a) * &power))
}

/// Expands `u + u^2/(1-u) * (1 + (z-1) (1-uz)^(-1/u))`, the distribution
/// from a fresh start.
pub fn q_uz_closed_series(nu: usize, nz: usize) -> Result<BiSeries> {
    let wide = nu + 1;
    let log = one_minus_c_uz(wide, nz, Rat::one()).log()?;
    let power = (-&log).div_by_u()?.exp()?;
    let z_minus_one = &BiSeries::monomial(nu, nz, Rat::one(), 0, 1) - &BiSeries::one(nu, nz);
    let inner = &BiSeries::one(nu, nz) + &(&z_minus_one * &power);
    let u2_over = BiSeries::from_fn(nu, nz, |i, j| {
        if j == 0 && i >= 2 {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let u = BiSeries::monomial(nu, nz, Rat::one(), 1, 0);
    Ok(&u + &(&u2_over * &inner))
}

/// The real number `multiplier * e^exponent`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledExact {
    pub multiplier: Rat,
    pub exponent: Rat,
}

impl ScaledExact {
    pub fn new(multiplier: Rat, exponent: Rat) -> Self {
        // zero has a single representation
        if multiplier.is_zero() {
            return ScaledExact {
                multiplier,
                exponent: Rat::zero(),
            };
        }
        ScaledExact {
            multiplier,
            exponent,
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.multiplier) * to_f64(&self.exponent).exp()
    }
}

impl fmt::Display for ScaledExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplier.is_zero() || self.exponent.is_zero() {
            write!(f, "{}", self.multiplier)
        } else if self.exponent.is_one() {
            write!(f, "{} · e", self.multiplier)
        } else {
            write!(f, "{} · e^{{{}}}", self.multiplier, self.exponent)
        }
    }
}

/// `[u^p]` of the expected-length generating function for every
/// `p <= max_p`: `E(u) = u^2 (1-u)^(-1-1/u) = e * u^2 * exp(s(u))`.
///
/// `(1 + 1/u) log(1/(1-u))` has constant term exactly 1, which becomes the
/// exponent tag; `s` is the remainder.
pub fn expected_lengths(max_p: usize) -> Vec<ScaledExact> {
    let wide = max_p + 1;
    let one_minus_u = Series1::from_fn('u', wide, |i| match i {
        0 => Rat::one(),
        1 => -Rat::one(),
        _ => Rat::zero(),
    });
    let log_inv = Series1::one('u', wide)
        .div(&one_minus_u)
        .and_then(|g| g.log())
        .expect("1/(1-u) has constant term 1");
    let over_u = log_inv.div_by_var().expect("log(1/(1-u)) vanishes at 0");
    let exponent = &log_inv.truncate(max_p) + &over_u;
    let (tag, rest) = exponent.split_constant();
    let body = rest.exp().expect("constant term was split off").shift_up(2);
    (0..=max_p)
        .map(|p| ScaledExact::new(body.coeff(p), tag.clone()))
        .collect()
}

/// `E_p`, the expected length of a fresh `p`-player game.
pub fn expected_length(p: usize) -> ScaledExact {
    expected_lengths(p).pop().expect("at least one entry")
}

/// `E_p(x)`, expected remaining throws with `p` players and distance to beat `x`.
///
/// `E(x,u) = u^2/(1-u)^2 * ((1-u)/(1-(1-x)u))^(1-1/u)`; the exponent series
/// has constant term exactly `x`, split off as the tag.
pub fn expected_remaining(p: usize, x: &Rat) -> Result<ScaledExact> {
    check_unit(x)?;
    if p == 0 {
        return Err(Error::TooFewPlayers { min: 1, got: 0 });
    }
    let wide = p + 1;
    let lin = |c: Rat| {
        Series1::from_fn('u', wide, |i| match i {
            0 => Rat::one(),
            1 => -c.clone(),
            _ => Rat::zero(),
        })
    };
    let log = lin(Rat::one()).div(&lin(Rat::one() - x))?.log()?;
    let exponent = &log.truncate(p) - &log.div_by_var()?;
    let (tag, rest) = exponent.split_constant();
    let power = rest.exp()?;
    // u^2/(1-u)^2 = sum_{m>=2} (m-1) u^m
    let prefactor = Series1::from_fn('u', p, |m| {
        if m >= 2 {
            Rat::from_integer(BigInt::from(m - 1))
        } else {
            Rat::zero()
        }
    });
    let e = &prefactor * &power;
    Ok(ScaledExact::new(e.coeff(p), tag))
}

/// `E_p(x) - (p + ln p + γ - 1 + ln x)`.
pub fn asymptotic_residual(p: usize, x: &Rat) -> Result<f64> {
    if p < 2 {
        return Err(Error::TooFewPlayers { min: 2, got: p });
    }
    let xf = to_f64(x);
    if xf <= 0.0 {
        return Err(Error::OutOfUnitInterval(x.to_string()));
    }
    let e = expected_remaining(p, x)?.to_f64();
    let pf = p as f64;
    Ok(e - (pf + pf.ln() + EULER_GAMMA - 1.0 + xf.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat::{factorial, int, rat};
    use crate::stirling::stirling_c;

    fn p(cs: &[(i64, i64)]) -> Poly {
        Poly::new(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn q_poly_examples() {
        assert_eq!(q_poly(3, 3), p(&[(0, 1), (2, 1), (-5, 2), (5, 6)]));
        assert_eq!(q_poly(4, 5), Poly::one_minus_x_pow(4));
        assert_eq!(q_poly(2, 2), p(&[(0, 1), (1, 1), (-1, 2)]));
        assert_eq!(q_poly(0, 1), Poly::one());
        assert_eq!(q_poly(3, 1), Poly::zero());
        assert_eq!(q_poly(0, 4), Poly::zero());
    }

    #[test]
    fn q_prob_examples() {
        assert_eq!(q_prob(4, 3), rat(3, 8));
        assert_eq!(q_prob(3, 2), rat(1, 3));
        assert_eq!(q_prob(0, 1), int(1));
    }

    #[test]
    fn q_prob_matches_stirling_formula() {
        let t = QTable::new(20, 20);
        for n in 2..=20 {
            for pp in 2..=n {
                let c = Rat::from_integer(BigInt::from(stirling_c(n - 1, (n + 1 - pp) as i64)));
                let want = c * int(n as i64 - 1) / Rat::from_integer(factorial(n));
                assert_eq!(t.prob(n, pp), want, "({n},{pp})");
            }
        }
    }

    #[test]
    fn degree_bound_and_range() {
        let t = QTable::new(15, 6);
        let samples = [int(0), rat(1, 3), rat(1, 2), rat(9, 10), int(1)];
        for n in 0..=15 {
            for pp in 1..=6 {
                let q = t.get(n, pp);
                assert!(q.degree() <= n as isize);
                for v in &samples {
                    let val = q.eval(v);
                    assert!(val >= Rat::zero() && val <= Rat::one());
                }
            }
        }
    }

    #[test]
    fn partial_sums_and_tails() {
        let t = QTable::new(40, 8);
        let xs = [int(0), rat(1, 4), rat(2, 3), int(1)];
        for pp in 1..=8 {
            for x in &xs {
                let mut prev = Rat::zero();
                for big_n in 0..=40 {
                    let s = t.partial_sum(pp, big_n).eval(x);
                    assert!(s >= prev && s <= Rat::one());
                    prev = s;
                }
            }
            assert!(to_f64(&t.tail(pp, 40, &int(1))) < 1e-12, "p = {pp}");
        }
    }

    fn assert_window_matches(series: &BiSeries, table: &QTable, x: &Rat, nu: usize, nz: usize) {
        for pp in 0..=nu {
            for n in 0..=nz {
                let want = if pp == 0 {
                    Rat::zero()
                } else {
                    table.get(n, pp).eval(x)
                };
                assert_eq!(series.coeff(pp, n), want, "[u^{pp} z^{n}] at x = {x}");
            }
        }
    }

    #[test]
    fn closed_series_matches_recurrence() {
        let table = QTable::new(10, 10);
        for x in [rat(1, 2), int(1), int(0), rat(1, 3)] {
            let s = q_closed_series(&x, 10, 10).unwrap();
            assert_window_matches(&s, &table, &x, 10, 10);
        }
        let s = q_uz_closed_series(10, 10).unwrap();
        assert_window_matches(&s, &table, &int(1), 10, 10);
        assert!(q_closed_series(&rat(3, 2), 2, 2).is_err());
    }

    #[test]
    fn closed_series_at_zero_is_deterministic() {
        let s = q_closed_series(&int(0), 8, 8).unwrap();
        for pp in 1..=8 {
            for n in 0..=8 {
                let want = if n + 1 == pp { int(1) } else { int(0) };
                assert_eq!(s.coeff(pp, n), want);
            }
        }
    }

    #[test]
    fn closed_series_rows_tend_to_one() {
        // sum_n [u^p z^n] -> 1; with 30 z-terms the mass is within 1e-12
        let s = q_closed_series(&rat(1, 2), 4, 30).unwrap();
        for pp in 1..=4 {
            let total: Rat = (0..=30).map(|n| s.coeff(pp, n)).sum();
            assert!(total <= int(1));
            assert!(1.0 - to_f64(&total) < 1e-12);
        }
    }

    #[test]
    fn expected_length_multipliers() {
        let want = [
            (1, 1),
            (3, 2),
            (47, 24),
            (115, 48),
            (16247, 5760),
            (37289, 11520),
            (10587043, 2903040),
            (2614099, 645120),
        ];
        let got = expected_lengths(9);
        for (i, &(a, b)) in want.iter().enumerate() {
            assert_eq!(
                got[i + 2],
                ScaledExact::new(rat(a, b), int(1)),
                "p = {}",
                i + 2
            );
        }
        assert_eq!(
            expected_length(9),
            ScaledExact::new(rat(2614099, 645120), int(1))
        );
        assert_eq!(expected_length(1), ScaledExact::new(int(0), int(0)));
        assert_eq!(expected_length(0).multiplier, int(0));
    }

    #[test]
    fn expected_remaining_examples() {
        for x in [rat(1, 2), rat(1, 7), int(1)] {
            assert_eq!(
                expected_remaining(2, &x).unwrap(),
                ScaledExact::new(int(1), x.clone())
            );
        }
        for pp in 1..=9 {
            assert_eq!(
                expected_remaining(pp, &int(1)).unwrap(),
                expected_length(pp)
            );
        }
        assert_eq!(
            expected_remaining(3, &int(0)).unwrap(),
            ScaledExact::new(int(2), int(0))
        );
        assert_eq!(
            expected_remaining(1, &rat(1, 2)).unwrap().multiplier,
            int(0)
        );
        assert!(expected_remaining(3, &int(2)).is_err());
    }

    #[test]
    fn expected_remaining_matches_summed_distribution() {
        // sum_n n Q_{n,p}(x) from the recurrence; truncated where n * tail < 1e-12
        let t = QTable::new(45, 5);
        for x in [rat(1, 2), rat(3, 4), int(1)] {
            for pp in 2..=5 {
                let mean: Rat = (0..=45)
                    .map(|n| t.get(n, pp).eval(&x) * int(n as i64))
                    .sum();
                let exact = expected_remaining(pp, &x).unwrap().to_f64();
                assert!((to_f64(&mean) - exact).abs() < 1e-12, "p={pp} x={x}");
            }
        }
    }

    #[test]
    fn residuals() {
        let r2 = asymptotic_residual(2, &int(1)).unwrap();
        let direct = std::f64::consts::E - (2.0 + 2f64.ln() + EULER_GAMMA - 1.0);
        assert!((r2 - direct).abs() < 1e-15);
        assert!((r2 - 0.448).abs() < 1e-3);
        for x in [int(1), rat(1, 2)] {
            let r: Vec<f64> = [10, 20, 40]
                .iter()
                .map(|&pp| asymptotic_residual(pp, &x).unwrap())
                .collect();
            assert!(r[0].abs() > r[1].abs() && r[1].abs() > r[2].abs(), "{r:?}");
            assert!(r.iter().all(|v| *v > 0.0));
        }
        assert!(asymptotic_residual(1, &int(1)).is_err());
        assert!(asymptotic_residual(3, &int(0)).is_err());
    }

    #[test]
    fn scaled_exact_display() {
        assert_eq!(
            ScaledExact::new(rat(47, 24), int(1)).to_string(),
            "47/24 · e"
        );
        assert_eq!(
            ScaledExact::new(int(1), rat(1, 2)).to_string(),
            "1 · e^{1/2}"
        );
        assert_eq!(ScaledExact::new(int(0), int(1)).to_string(), "0");
        assert_eq!(ScaledExact::new(int(2), int(0)).to_string(), "2");
    }
}
