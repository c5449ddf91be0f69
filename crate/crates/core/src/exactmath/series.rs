//! Truncated formal power series in one and two variables.
//!
//! Every operation respects truncation: the coefficient at power `m` of a
//! result depends only on input coefficients at powers `<= m`. Binary
//! operations on series of different orders truncate to the smaller one.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::rat::{to_fraction_string, Rat};
use crate::error::{Error, Result};

fn small(i: usize) -> Rat {
    Rat::from_integer(BigInt::from(i))
}

/// A power series `sum_{i<=order} c_i var^i + O(var^(order+1))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series1 {
    var: char,
    coeffs: Vec<Rat>,
}

impl Series1 {
    pub fn zero(var: char, order: usize) -> Self {
        Series1 {
            var,
            coeffs: vec![Rat::zero(); order + 1],
        }
    }

    pub fn one(var: char, order: usize) -> Self {
        Series1::constant(var, order, Rat::one())
    }

    pub fn constant(var: char, order: usize, c: Rat) -> Self {
        let mut s = Series1::zero(var, order);
        s.coeffs[0] = c;
        s
    }

    /// The series consisting of the variable itself.
    pub fn variable(var: char, order: usize) -> Self {
        let mut s = Series1::zero(var, order);
        if order >= 1 {
            s.coeffs[1] = Rat::one();
        }
        s
    }

    /// Pads with zeros or truncates `coeffs` to `order + 1` entries.
    pub fn from_coeffs(var: char, order: usize, mut coeffs: Vec<Rat>) -> Self {
        coeffs.resize(order + 1, Rat::zero());
        Series1 { var, coeffs }
    }

    pub fn from_fn(var: char, order: usize, f: impl FnMut(usize) -> Rat) -> Self {
        Series1 {
            var,
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn from_poly(var: char, order: usize, p: &Poly) -> Self {
        Series1::from_fn(var, order, |i| p.coeff(i))
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Rat {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Series1 {
        Series1::from_coeffs(self.var, order, self.coeffs.clone())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn scale(&self, c: &Rat) -> Series1 {
        Series1 {
            var: self.var,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `var^k`, dropping what falls past the order.
    pub fn shift_up(&self, k: usize) -> Series1 {
        Series1::from_fn(self.var, self.order(), |i| {
            if i >= k {
                self.coeffs[i - k].clone()
            } else {
                Rat::zero()
            }
        })
    }

    /// Exact division by `var`; the result is one order shorter.
    pub fn div_by_var(&self) -> Result<Series1> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NotDivisibleByU);
        }
        if self.order() == 0 {
            return Ok(Series1::zero(self.var, 0));
        }
        Ok(Series1 {
            var: self.var,
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Separates the constant term: `self = c + rest` with `rest(0) = 0`.
    pub fn split_constant(&self) -> (Rat, Series1) {
        let mut rest = self.clone();
        let c = std::mem::replace(&mut rest.coeffs[0], Rat::zero());
        (c, rest)
    }

    pub fn derivative(&self) -> Series1 {
        // The top coefficient of the derivative is unknown, so it is zero-filled.
        Series1::from_fn(self.var, self.order(), |i| self.coeff(i + 1) * small(i + 1))
    }

    /// `exp(self)`; the constant term must be exactly zero.
    ///
    /// Uses the D-log recurrence `j f_j = sum_{i=1..j} i s_i f_{j-i}`.
    pub fn exp(&self) -> Result<Series1> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstantTerm(to_fraction_string(
                &self.coeffs[0],
            )));
        }
        let n = self.order();
        let mut f = vec![Rat::zero(); n + 1];
        f[0] = Rat::one();
        for j in 1..=n {
            let mut acc = Rat::zero();
            for i in 1..=j {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &f[j - i] * small(i);
                }
            }
            f[j] = acc / small(j);
        }
        Ok(Series1 {
            var: self.var,
            coeffs: f,
        })
    }

    /// `log(self)`; the constant term must be exactly one.
    pub fn log(&self) -> Result<Series1> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTermNotOne(to_fraction_string(
                &self.coeffs[0],
            )));
        }
        let n = self.order();
        let mut l = vec![Rat::zero(); n + 1];
        for j in 1..=n {
            let mut acc = &self.coeffs[j] * small(j);
            for (i, li) in l.iter().enumerate().take(j).skip(1) {
                if !li.is_zero() {
                    acc -= li * &self.coeffs[j - i] * small(i);
                }
            }
            l[j] = acc / small(j);
        }
        Ok(Series1 {
            var: self.var,
            coeffs: l,
        })
    }

    /// `self / rhs`; `rhs` must have a nonzero constant term.
    pub fn div(&self, rhs: &Series1) -> Result<Series1> {
        check_var(self.var, rhs.var)?;
        let b0 = &rhs.coeffs[0];
        if b0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let n = self.order().min(rhs.order());
        let mut c: Vec<Rat> = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut acc = self.coeffs[j].clone();
            for i in 1..=j {
                if !rhs.coeffs[i].is_zero() {
                    acc -= &rhs.coeffs[i] * &c[j - i];
                }
            }
            c.push(acc / b0);
        }
        Ok(Series1 {
            var: self.var,
            coeffs: c,
        })
    }
}

fn check_var(a: char, b: char) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::VariableMismatch(a, b))
    }
}

pub fn series_exp(s: &Series1) -> Result<Series1> {
    s.exp()
}

pub fn series_log(s: &Series1) -> Result<Series1> {
    s.log()
}

pub fn series_div(a: &Series1, b: &Series1) -> Result<Series1> {
    a.div(b)
}

// Ring operators panic on a variable mismatch; that is a programming error,
// not a data condition.
impl Add for &Series1 {
    type Output = Series1;
    fn add(self, rhs: &Series1) -> Series1 {
        assert_eq!(self.var, rhs.var, "adding series in different variables");
        let n = self.order().min(rhs.order());
        Series1::from_fn(self.var, n, |i| &self.coeffs[i] + &rhs.coeffs[i])
    }
}

impl Sub for &Series1 {
    type Output = Series1;
    fn sub(self, rhs: &Series1) -> Series1 {
        assert_eq!(
            self.var, rhs.var,
            "subtracting series in different variables"
        );
        let n = self.order().min(rhs.order());
        Series1::from_fn(self.var, n, |i| &self.coeffs[i] - &rhs.coeffs[i])
    }
}

impl Mul for &Series1 {
    type Output = Series1;
    fn mul(self, rhs: &Series1) -> Series1 {
        assert_eq!(
            self.var, rhs.var,
            "multiplying series in different variables"
        );
        let n = self.order().min(rhs.order());
        let mut out = vec![Rat::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series1 {
            var: self.var,
            coeffs: out,
        }
    }
}

impl Neg for &Series1 {
    type Output = Series1;
    fn neg(self) -> Series1 {
        Series1 {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// A bivariate series `sum c_{i,j} u^i z^j` over the dense window
/// `0 <= i <= N_u`, `0 <= j <= N_z`.
///
/// Stored as one `u`-series per power of `z`; exp, log and division run
/// the univariate recurrences in `z` with `u`-series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    rows: Vec<Series1>,
}

const U: char = 'u';

impl BiSeries {
    pub fn zero(nu: usize, nz: usize) -> Self {
        BiSeries {
            rows: vec![Series1::zero(U, nu); nz + 1],
        }
    }

    pub fn one(nu: usize, nz: usize) -> Self {
        BiSeries::constant(nu, nz, Rat::one())
    }

    pub fn constant(nu: usize, nz: usize, c: Rat) -> Self {
        let mut s = BiSeries::zero(nu, nz);
        s.rows[0] = Series1::constant(U, nu, c);
        s
    }

    pub fn from_fn(nu: usize, nz: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        BiSeries {
            rows: (0..=nz)
                .map(|j| Series1::from_fn(U, nu, |i| f(i, j)))
                .collect(),
        }
    }

    /// A series with no `z` dependence.
    pub fn from_u_series(s: &Series1, nz: usize) -> Self {
        let mut out = BiSeries::zero(s.order(), nz);
        out.rows[0] = Series1::from_coeffs(U, s.order(), s.coeffs().to_vec());
        out
    }

    /// The monomial `c u^i z^j`.
    pub fn monomial(nu: usize, nz: usize, c: Rat, i: usize, j: usize) -> Self {
        BiSeries::from_fn(nu, nz, |a, b| {
            if a == i && b == j {
                c.clone()
            } else {
                Rat::zero()
            }
        })
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.rows[0].order(), self.rows.len() - 1)
    }

    /// Coefficient of `u^i z^j`, zero outside the window.
    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.rows.get(j).map_or_else(Rat::zero, |r| r.coeff(i))
    }

    /// The `u`-series multiplying `z^j`.
    pub fn z_row(&self, j: usize) -> &Series1 {
        &self.rows[j]
    }

    pub fn constant_term(&self) -> &Rat {
        self.rows[0].constant_term()
    }

    pub fn scale(&self, c: &Rat) -> BiSeries {
        BiSeries {
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
        }
    }

    /// Exact division by `u`; `N_u` drops by one.
    pub fn div_by_u(&self) -> Result<BiSeries> {
        Ok(BiSeries {
            rows: self
                .rows
                .iter()
                .map(Series1::div_by_var)
                .collect::<Result<_>>()?,
        })
    }

    fn restrict(&self, nu: usize, nz: usize) -> BiSeries {
        BiSeries {
            rows: self.rows[..=nz].iter().map(|r| r.truncate(nu)).collect(),
        }
    }

    fn common(&self, rhs: &BiSeries) -> (usize, usize) {
        let (a, b) = self.orders();
        let (c, d) = rhs.orders();
        (a.min(c), b.min(d))
    }

    pub fn exp(&self) -> Result<BiSeries> {
        let c = self.constant_term();
        if !c.is_zero() {
            return Err(Error::NonZeroConstantTerm(to_fraction_string(c)));
        }
        let (nu, nz) = self.orders();
        let mut f: Vec<Series1> = Vec::with_capacity(nz + 1);
        f.push(self.rows[0].exp()?);
        for j in 1..=nz {
            let mut acc = Series1::zero(U, nu);
            for i in 1..=j {
                if !self.rows[i].is_zero() {
                    acc = &acc + &(&self.rows[i] * &f[j - i]).scale(&small(i));
                }
            }
            f.push(acc.scale(&(Rat::one() / small(j))));
        }
        Ok(BiSeries { rows: f })
    }

    pub fn log(&self) -> Result<BiSeries> {
        let c = self.constant_term();
        if !c.is_one() {
            return Err(Error::ConstantTermNotOne(to_fraction_string(c)));
        }
        let (nu, nz) = self.orders();
        let f0 = &self.rows[0];
        let mut l: Vec<Series1> = Vec::with_capacity(nz + 1);
        l.push(f0.log()?);
        for j in 1..=nz {
            let mut acc = self.rows[j].scale(&small(j));
            for (i, li) in l.iter().enumerate().skip(1) {
                if !li.is_zero() {
                    acc = &acc - &(li * &self.rows[j - i]).scale(&small(i));
                }
            }
            l.push(acc.div(f0)?.scale(&(Rat::one() / small(j))).truncate(nu));
        }
        Ok(BiSeries { rows: l })
    }

    pub fn div(&self, rhs: &BiSeries) -> Result<BiSeries> {
        if rhs.constant_term().is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let (nu, nz) = self.common(rhs);
        let b0 = &rhs.rows[0];
        let mut c: Vec<Series1> = Vec::with_capacity(nz + 1);
        for j in 0..=nz {
            let mut acc = self.rows[j].truncate(nu);
            for i in 1..=j {
                if !rhs.rows[i].is_zero() {
                    acc = &acc - &(&rhs.rows[i] * &c[j - i]);
                }
            }
            c.push(acc.div(b0)?.truncate(nu));
        }
        Ok(BiSeries { rows: c })
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        let (nu, nz) = self.common(rhs);
        let (a, b) = (self.restrict(nu, nz), rhs.restrict(nu, nz));
        BiSeries {
            rows: a.rows.iter().zip(&b.rows).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        let (nu, nz) = self.common(rhs);
        let (a, b) = (self.restrict(nu, nz), rhs.restrict(nu, nz));
        BiSeries {
            rows: a.rows.iter().zip(&b.rows).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        let (nu, nz) = self.common(rhs);
        let rows = (0..=nz)
            .map(|j| {
                let mut acc = Series1::zero(U, nu);
                for i in 0..=j {
                    if self.rows[i].is_zero() || rhs.rows[j - i].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&self.rows[i] * &rhs.rows[j - i]);
                }
                acc
            })
            .collect();
        BiSeries { rows }
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        BiSeries {
            rows: self.rows.iter().map(|r| -r).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat::{int, rat};
    use proptest::prelude::*;

    fn s(cs: &[(i64, i64)]) -> Series1 {
        Series1::from_coeffs(
            'u',
            cs.len() - 1,
            cs.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
    }

    #[test]
    fn exp_examples() {
        let u = Series1::variable('u', 3);
        assert_eq!(
            series_exp(&u).unwrap(),
            s(&[(1, 1), (1, 1), (1, 2), (1, 6)])
        );
        assert_eq!(
            series_exp(&Series1::zero('u', 4)).unwrap(),
            Series1::one('u', 4)
        );
        assert!(matches!(
            series_exp(&Series1::one('u', 2)),
            Err(Error::NonZeroConstantTerm(_))
        ));
    }

    #[test]
    fn exp_of_expected_length_exponent() {
        // s = sum (1/m + 1/(m+1)) u^m
        let e = Series1::from_fn('u', 4, |m| {
            if m == 0 {
                Rat::zero()
            } else {
                rat(1, m as i64) + rat(1, m as i64 + 1)
            }
        });
        let f = series_exp(&e).unwrap();
        assert_eq!(f.coeff(1), rat(3, 2));
        assert_eq!(f.coeff(2), rat(47, 24));
    }

    #[test]
    fn log_examples() {
        let one_minus_u = s(&[(1, 1), (-1, 1), (0, 1), (0, 1), (0, 1)]);
        let geo = series_div(&Series1::one('u', 4), &one_minus_u).unwrap();
        assert_eq!(
            series_log(&geo).unwrap(),
            s(&[(0, 1), (1, 1), (1, 2), (1, 3), (1, 4)])
        );
        assert_eq!(
            series_log(&Series1::one('u', 3)).unwrap(),
            Series1::zero('u', 3)
        );
        let u2 = Series1::variable('u', 5).shift_up(1);
        assert_eq!(series_log(&series_exp(&u2).unwrap()).unwrap(), u2);
        assert!(matches!(
            series_log(&Series1::zero('u', 2)),
            Err(Error::ConstantTermNotOne(_))
        ));
    }

    #[test]
    fn div_examples() {
        let one_minus_u = s(&[(1, 1), (-1, 1), (0, 1), (0, 1)]);
        assert_eq!(
            series_div(&Series1::one('u', 3), &one_minus_u).unwrap(),
            s(&[(1, 1), (1, 1), (1, 1), (1, 1)])
        );
        let b = s(&[(2, 1), (3, 1), (-1, 5)]);
        assert_eq!(series_div(&b, &b).unwrap(), Series1::one('u', 2));
        // u^2 / (1-u)^2 = u^2 + 2u^3 + 3u^4
        let sq = &s(&[(1, 1), (-1, 1), (0, 1), (0, 1), (0, 1)])
            * &s(&[(1, 1), (-1, 1), (0, 1), (0, 1), (0, 1)]);
        let u2 = Series1::variable('u', 4).shift_up(1);
        assert_eq!(
            series_div(&u2, &sq).unwrap(),
            s(&[(0, 1), (0, 1), (1, 1), (2, 1), (3, 1)])
        );
        assert_eq!(series_div(&u2, &u2), Err(Error::NonInvertibleSeries));
        assert!(matches!(
            series_div(&u2, &Series1::one('z', 4)),
            Err(Error::VariableMismatch('u', 'z'))
        ));
    }

    #[test]
    fn truncation_is_respected() {
        let a = s(&[(1, 1), (1, 1), (1, 1), (1, 1)]);
        let b = Series1::variable('u', 2);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a * &b).coeffs(), s(&[(0, 1), (1, 1), (1, 1)]).coeffs());
    }

    #[test]
    fn bivariate_exp_of_product() {
        // exp(u z) = sum (uz)^n / n!
        let uz = BiSeries::monomial(4, 4, int(1), 1, 1);
        let e = uz.exp().unwrap();
        for i in 0..=4 {
            for j in 0..=4 {
                let want = if i == j {
                    Rat::one() / Rat::from_integer(crate::exactmath::rat::factorial(i))
                } else {
                    Rat::zero()
                };
                assert_eq!(e.coeff(i, j), want, "({i},{j})");
            }
        }
    }

    #[test]
    fn bivariate_div_geometric() {
        // 1 / (1 - u z) = sum (uz)^n
        let d = &BiSeries::one(5, 5) - &BiSeries::monomial(5, 5, int(1), 1, 1);
        let g = BiSeries::one(5, 5).div(&d).unwrap();
        for i in 0..=5 {
            for j in 0..=5 {
                assert_eq!(g.coeff(i, j), if i == j { int(1) } else { int(0) });
            }
        }
        assert_eq!(
            g.div(&BiSeries::zero(5, 5)),
            Err(Error::NonInvertibleSeries)
        );
    }

    #[test]
    fn div_by_u_checks_row_zero() {
        let a = BiSeries::monomial(3, 2, int(2), 2, 1);
        let b = a.div_by_u().unwrap();
        assert_eq!(b.orders(), (2, 2));
        assert_eq!(b.coeff(1, 1), int(2));
        assert_eq!(BiSeries::one(3, 2).div_by_u(), Err(Error::NotDivisibleByU));
    }

    fn small_series(var: char, order: usize) -> impl Strategy<Value = Series1> {
        prop::collection::vec((-9i64..9, 1i64..6), order + 1).prop_map(move |cs| {
            Series1::from_coeffs(var, order, cs.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    fn small_bi() -> impl Strategy<Value = BiSeries> {
        prop::collection::vec((-5i64..5, 1i64..4), 16).prop_map(|cs| {
            BiSeries::from_fn(3, 3, |i, j| {
                let (n, d) = cs[4 * j + i];
                rat(n, d)
            })
        })
    }

    proptest! {
        #[test]
        fn series_distributive((a, b, c) in (small_series('u', 5), small_series('u', 5), small_series('u', 5))) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn exp_log_round_trip(s in small_series('u', 6)) {
            let (_, rest) = s.split_constant();
            let one_plus = &Series1::one('u', 6) + &rest;
            prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus.clone());
            prop_assert_eq!(rest.exp().unwrap().log().unwrap(), rest);
        }

        #[test]
        fn div_then_mul(a in small_series('u', 5), b in small_series('u', 5)) {
            prop_assume!(!b.constant_term().is_zero());
            let q = a.div(&b).unwrap();
            prop_assert_eq!(&q * &b, a);
        }

        #[test]
        fn bivariate_distributive((a, b, c) in (small_bi(), small_bi(), small_bi())) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn bivariate_exp_log_round_trip(s in small_bi()) {
            let rest = &s - &BiSeries::constant(3, 3, s.constant_term().clone());
            let one_plus = &BiSeries::one(3, 3) + &rest;
            prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
            prop_assert_eq!(rest.exp().unwrap().log().unwrap(), rest);
        }

        #[test]
        fn bivariate_div_then_mul(a in small_bi(), b in small_bi()) {
            prop_assume!(!b.constant_term().is_zero());
            prop_assert_eq!(&a.div(&b).unwrap() * &b, a);
        }
    }
}
