//! Winning probabilities.
//!
//! `R_{n,p,k}(x)` is the probability that, with `p` players left and
//! distance to beat `x`, the `k`-th player in throwing order wins after
//! exactly `n` further throws. `P_{p,k}(x) = sum_n R_{n,p,k}(x)` is
//! enclosed rigorously: the partial sum is a lower bound and adding the
//! exact length-distribution tail gives an upper bound, because every
//! omitted `R` term is at most the matching `Q` term.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::rat::{from_f64_exact, to_decimal, to_f64, Rounding};
use crate::exactmath::{Poly, Rat};
use crate::lengthdist::{check_unit, QTable};

/// `R_{n,p,k}(x)` for `n <= max_n`, `1 <= k <= p <= max_p`.
///
/// Filled eagerly and immutable afterwards, like [`QTable`].
#[derive(Clone, Debug)]
pub struct RTable {
    max_n: usize,
    /// `polys[p][k - 1][n]`; `p = 0` is an empty placeholder.
    polys: Vec<Vec<Vec<Poly>>>,
}

impl RTable {
    pub fn new(max_n: usize, max_p: usize) -> Self {
        let mut polys: Vec<Vec<Vec<Poly>>> = (0..=max_p)
            .map(|p| vec![vec![Poly::zero(); max_n + 1]; p])
            .collect();
        if max_p >= 1 {
            polys[1][0][0] = Poly::one();
        }
        for n in 1..=max_n {
            for p in 2..=max_p {
                // k = 1: the first thrower survives and becomes the last in line
                polys[p][0][n] = polys[p][p - 1][n - 1].integrate();
                for k in 2..=p {
                    let eliminated = polys[p - 1][k - 2][n - 1].times_one_minus_x();
                    let survived = polys[p][k - 2][n - 1].integrate();
                    polys[p][k - 1][n] = &eliminated + &survived;
                }
            }
        }
        RTable { max_n, polys }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn max_p(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn get(&self, n: usize, p: usize, k: usize) -> Result<&Poly> {
        if k == 0 || k > p {
            return Err(Error::PlayerOutOfRange { p, k });
        }
        if p > self.max_p() {
            return Err(Error::TableTooSmall {
                limit: self.max_p(),
                requested: p,
            });
        }
        if n > self.max_n {
            return Err(Error::TableTooSmall {
                limit: self.max_n,
                requested: n,
            });
        }
        Ok(&self.polys[p][k - 1][n])
    }

    /// `sum_{n <= big_n} R_{n,p,k}(x)`.
    pub fn partial_sum(&self, p: usize, k: usize, big_n: usize) -> Result<Poly> {
        self.get(big_n, p, k)?;
        Ok(self.polys[p][k - 1][..=big_n].iter().sum())
    }
}

pub fn r_poly(n: usize, p: usize, k: usize) -> Result<Poly> {
    if k == 0 || k > p {
        return Err(Error::PlayerOutOfRange { p, k });
    }
    Ok(RTable::new(n, p).get(n, p, k)?.clone())
}

/// A closed interval `[lo, hi]` of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rat,
    pub hi: Rat,
}

impl Enclosure {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "enclosure bounds out of order");
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        from_f64_exact(v).is_some_and(|r| self.contains(&r))
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    /// Distance from `v` to the interval (zero inside).
    pub fn distance_f64(&self, v: f64) -> f64 {
        let lo = to_f64(&self.lo);
        let hi = to_f64(&self.hi);
        if v < lo {
            lo - v
        } else if v > hi {
            v - hi
        } else {
            0.0
        }
    }

    /// Outward-rounded decimal bounds.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (
            to_decimal(&self.lo, digits, Rounding::Down),
            to_decimal(&self.hi, digits, Rounding::Up),
        )
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal(15);
        write!(f, "[{lo}, {hi}]")
    }
}

/// Both tables needed for winning-probability enclosures.
#[derive(Clone, Debug)]
pub struct WinTables {
    pub q: QTable,
    pub r: RTable,
}

impl WinTables {
    pub fn new(max_n: usize, max_p: usize) -> Self {
        let (q, r) = rayon::join(|| QTable::new(max_n, max_p), || RTable::new(max_n, max_p));
        WinTables { q, r }
    }

    /// Enclosure of `P_{p,k}(x)` from the first `big_n + 1` terms.
    pub fn win_prob(&self, p: usize, k: usize, x: &Rat, big_n: usize) -> Result<Enclosure> {
        check_unit(x)?;
        let lo = self.r.partial_sum(p, k, big_n)?.eval(x);
        let tail = self.q.tail(p, big_n, x);
        Ok(Enclosure::new(lo.clone(), lo + tail))
    }

    /// Enclosures for every player `k = 1..=p`, sharing the tail computation.
    pub fn win_probs(&self, p: usize, x: &Rat, big_n: usize) -> Result<Vec<Enclosure>> {
        check_unit(x)?;
        if p == 0 {
            return Err(Error::TooFewPlayers { min: 1, got: 0 });
        }
        let tail = self.q.tail(p, big_n, x);
        (1..=p)
            .map(|k| {
                let lo = self.r.partial_sum(p, k, big_n)?.eval(x);
                Ok(Enclosure::new(lo.clone(), lo + &tail))
            })
            .collect()
    }

    pub fn check_monotonicity(&self, p: usize, big_n: usize) -> Result<Monotonicity> {
        if p < 2 {
            return Err(Error::TooFewPlayers { min: 2, got: p });
        }
        let encl = self.win_probs(p, &Rat::one(), big_n)?;
        for k in 1..p {
            let (a, b) = (&encl[k - 1], &encl[k]);
            if a.lo > b.hi {
                continue;
            }
            return Ok(if a.hi < b.lo {
                Monotonicity::Violated { k }
            } else {
                Monotonicity::Indeterminate { k }
            });
        }
        Ok(Monotonicity::Certified)
    }
}

pub fn win_prob(p: usize, k: usize, x: &Rat, big_n: usize) -> Result<Enclosure> {
    if k == 0 || k > p {
        return Err(Error::PlayerOutOfRange { p, k });
    }
    WinTables::new(big_n, p).win_prob(p, k, x, big_n)
}

/// Outcome of comparing `P_{p,k}` with `P_{p,k+1}` for every `k < p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// `lo(P_{p,k}) > hi(P_{p,k+1})` for every `k`.
    Certified,
    /// Enclosures of players `k` and `k + 1` overlap; raise the term count.
    Indeterminate { k: usize },
    /// `hi(P_{p,k}) < lo(P_{p,k+1})`.
    Violated { k: usize },
}

impl Monotonicity {
    pub fn is_certified(&self) -> bool {
        matches!(self, Monotonicity::Certified)
    }
}

pub fn check_monotonicity(p: usize, big_n: usize) -> Result<Monotonicity> {
    WinTables::new(big_n, p).check_monotonicity(p, big_n)
}

/// Known closed forms of `P_{p,k}(x)` in double precision: every player for
/// `p = 2, 3, 4` and any `x` in `[0, 1]`, and `P_{5,1}(1)`.
pub fn closed_form_p(p: usize, k: usize, x: f64) -> Result<f64> {
    let unsupported = || Error::UnsupportedClosedForm { p, k, x };
    if k == 0 || k > p {
        return Err(Error::PlayerOutOfRange { p, k });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfUnitInterval(x.to_string()));
    }
    let r3 = 3f64.sqrt();
    let em = (-x).exp();
    let eh = (-x / 2.0).exp();
    let s = (r3 * x / 2.0).sin();
    let c = (r3 * x / 2.0).cos();
    let v = match (p, k) {
        (2, 1) => 1.0 - em,
        (2, 2) => em,
        (3, 1) => 1.0 + (x - 1.0) * em - 2.0 / r3 * eh * s,
        (3, 2) => -em + eh * (s / r3 + c),
        (3, 3) => (2.0 - x) * em + eh * (s / r3 - c),
        (4, 1) => {
            1.0 + 1.25 * (x.cos() - x.sin()) - (3.0 * x * x - 8.0 * x + 5.0) / 4.0 * em
                + eh * (r3 * (x - 1.0 / 3.0) * s - (x + 1.0) * c)
        }
        (4, 2) => {
            // constant term of the e^{-x} coefficient fixed by sum_k P_{4,k} = 1
            1.25 * (x.cos() + x.sin())
                - (x * x - 6.0 * x + 1.0) / 4.0 * em
                - eh * ((x + 3.0) / r3 * s + (x + 1.0) * c)
        }
        (4, 3) => {
            1.25 * (x.sin() - x.cos())
                + (x * x - 7.0) / 4.0 * em
                + eh * (3.0 * c - (2.0 * x + 1.0) / r3 * s)
        }
        (4, 4) => {
            -1.25 * (x.sin() + x.cos())
                + (9.0 * x * x - 42.0 * x + 39.0) / 12.0 * em
                + eh * (5.0 / r3 * s + (2.0 * x - 1.0) * c)
        }
        (5, 1) if x == 1.0 => p51(),
        _ => return Err(unsupported()),
    };
    Ok(v)
}

fn p51() -> f64 {
    let r5 = 5f64.sqrt();
    let r3 = 3f64.sqrt();
    let w = (10.0 - 2.0 * r5).sqrt();
    let e_plus = ((r5 - 1.0) / 4.0).exp();
    let e_minus = ((-r5 - 1.0) / 4.0).exp();
    let a = w * (r5 + 1.0) / 8.0;
    let b = w / 4.0;
    1.0 - 12.5 * 1f64.cos() - w * (3.0 * r5 + 2.0) / 10.0 * e_plus * a.sin()
        + (3.0 * r5 + 7.0) / 2.0 * e_plus * a.cos()
        - (3.0 * r5 - 7.0) / 2.0 * e_minus * b.cos()
        - w * (r5 + 13.0) / 20.0 * e_minus * b.sin()
        + 5.0 * (-0.5f64).exp() * ((r3 / 2.0).cos() + (r3 / 2.0).sin() / r3)
}

/// Both sides of the roots-of-unity recursion at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RpReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Adaptive Simpson on `[a, b]`; a panel is accepted once the two-half
/// estimate moves by at most `15 * tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol, depth - 1)
    }
    if a == b {
        return Complex64::zero();
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 48)
}

/// Checks
/// `R_p(x,t,z) = (t^{p+1} - t)/p * sum_j R~_p(x, ζ^j, z) / (t - ζ^j)`
/// where `R~_p(x,t,z) = (z^{p-1} + t z ∫₀ˣ d/dv[(1-v) R_{p-1}(v,t,z)] e^{-vtz} dv) e^{xtz}`.
///
/// The left side sums the table directly. On the right, `R_{p-1}` is the
/// table truncated at `big_n` throws; the `v`-polynomials are differentiated
/// exactly before conversion to floating point, so the quadrature and the
/// truncation are the only error sources.
pub fn verify_rp_identity(
    p: usize,
    x: f64,
    t: Complex64,
    z: f64,
    big_n: usize,
    quad_tol: f64,
) -> Result<RpReport> {
    if p < 2 {
        return Err(Error::TooFewPlayers { min: 2, got: p });
    }
    let xr = from_f64_exact(x)
        .filter(|r| check_unit(r).is_ok())
        .ok_or_else(|| Error::OutOfUnitInterval(x.to_string()))?;
    if z.is_nan() || z.abs() >= 1.0 {
        return Err(Error::OutOfUnitInterval(format!("|z| = {}", z.abs())));
    }
    let roots: Vec<Complex64> = (0..p)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / p as f64))
        .collect();
    if roots.iter().any(|w| (t - w).norm() < 1e-12) {
        return Err(Error::RootOfUnityPole(t.to_string()));
    }
    let table = RTable::new(big_n, p);
    let zpow: Vec<f64> = (0..=big_n).map(|n| z.powi(n as i32)).collect();

    let mut lhs = Complex64::zero();
    for k in 1..=p {
        let mut sum = 0.0;
        for (n, zn) in zpow.iter().enumerate() {
            sum += to_f64(&table.get(n, p, k)?.eval(&xr)) * zn;
        }
        lhs += t.powu(k as u32) * sum;
    }

    // d/dv[(1 - v) sum_n z^n R_{n,p-1,k}(v)] as f64 coefficients, per k
    let derivs: Vec<Vec<f64>> = (1..p)
        .map(|k| {
            let mut acc = vec![0.0; big_n + 2];
            for (n, zn) in zpow.iter().enumerate() {
                let d = table.get(n, p - 1, k)?.times_one_minus_x().derivative();
                for (i, c) in d.coeffs().iter().enumerate() {
                    acc[i] += to_f64(c) * zn;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let tilde = |w: Complex64| -> Complex64 {
        let coeffs: Vec<Complex64> = (0..=big_n + 1)
            .map(|i| {
                derivs
                    .iter()
                    .enumerate()
                    .fold(Complex64::zero(), |acc, (k0, d)| {
                        acc + w.powu(k0 as u32 + 1) * d[i]
                    })
            })
            .collect();
        let wz = w * z;
        let integrand = |v: f64| -> Complex64 {
            let poly = coeffs
                .iter()
                .rev()
                .fold(Complex64::zero(), |acc, c| acc * v + c);
            wz * poly * (-wz * v).exp()
        };
        let integral = adaptive_simpson(&integrand, 0.0, x, quad_tol);
        (Complex64::new(z.powi(p as i32 - 1), 0.0) + integral) * (wz * x).exp()
    };

    let filtered = roots
        .iter()
        .fold(Complex64::zero(), |acc, &w| acc + tilde(w) / (t - w));
    let rhs = (t.powu(p as u32 + 1) - t) / p as f64 * filtered;
    Ok(RpReport {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}
