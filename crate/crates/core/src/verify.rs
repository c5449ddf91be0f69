//! Named verification suites shared by the CLI and the acceptance runner.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::Result;
use crate::exactmath::rat::{factorial, int, rat, to_f64};
use crate::exactmath::{Poly, Rat};
use crate::lengthdist::{expected_lengths, q_closed_series, q_prob, q_uz_closed_series, QTable};
use crate::permcount::{count_by_enumeration, injection_census, verify_injections, WinCountTable};
use crate::stirling::{complete_game_count, verify_stirling_egf};
use crate::winner::{closed_form_p, verify_rp_identity, Monotonicity, RTable, WinTables};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Stirling,
    Gf,
    Tables,
    Counts,
    Injections,
    RootsOfUnity,
    WinProb,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Stirling,
        Suite::Gf,
        Suite::Tables,
        Suite::Counts,
        Suite::Injections,
        Suite::RootsOfUnity,
        Suite::WinProb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stirling => "stirling",
            Suite::Gf => "gf",
            Suite::Tables => "tables",
            Suite::Counts => "counts",
            Suite::Injections => "injections",
            Suite::RootsOfUnity => "rootsofunity",
            Suite::WinProb => "winprob",
        }
    }

    pub fn run(self) -> Result<SuiteReport> {
        let checks = match self {
            Suite::Stirling => stirling_checks()?,
            Suite::Gf => gf_checks()?,
            Suite::Tables => table_checks(),
            Suite::Counts => count_checks()?,
            Suite::Injections => injection_checks()?,
            Suite::RootsOfUnity => roots_of_unity_checks()?,
            Suite::WinProb => winprob_checks()?,
        };
        Ok(SuiteReport {
            suite: self,
            checks,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

fn poly(cs: &[(i64, i64)]) -> Poly {
    Poly::new(cs.iter().map(|&(n, d)| rat(n, d)).collect())
}

/// Published `Q_{n,p}(x)` for `n <= 4`, `p <= 5`; omitted entries are zero.
pub fn reference_q_entries() -> Vec<((usize, usize), Poly)> {
    let x = Poly::x();
    let two_minus_x = poly(&[(2, 1), (-1, 1)]);
    vec![
        ((0, 1), Poly::one()),
        ((1, 2), Poly::one_minus_x_pow(1)),
        ((2, 2), poly(&[(0, 1), (1, 1), (-1, 2)])),
        ((2, 3), Poly::one_minus_x_pow(2)),
        ((3, 2), poly(&[(0, 1), (0, 1), (1, 2), (-1, 6)])),
        ((3, 3), poly(&[(0, 1), (2, 1), (-5, 2), (5, 6)])),
        ((3, 4), Poly::one_minus_x_pow(3)),
        ((4, 2), poly(&[(0, 1), (0, 1), (0, 1), (1, 6), (-1, 24)])),
        (
            (4, 3),
            (&(&x * &x) * &(&two_minus_x * &two_minus_x)).scale(&rat(3, 8)),
        ),
        ((4, 4), poly(&[(0, 1), (3, 1), (-6, 1), (13, 3), (-13, 12)])),
        ((4, 5), Poly::one_minus_x_pow(4)),
    ]
}

/// `R_{4,3,3}` exactly as published. Its `x^3` coefficient is a typo: with it,
/// the row does not sum to the published `Q_{4,3}`.
pub fn r433_as_published() -> Poly {
    poly(&[(0, 1), (0, 1), (1, 1), (-7, 3), (7, 24)])
}

/// Published `R_{n,p,k}(x)` for `1 <= n <= 4`, `p <= 4`; omitted entries are
/// zero. `R_{4,3,3}` is given with the corrected `-7x^3/6`.
pub fn reference_r_entries() -> Vec<((usize, usize, usize), Poly)> {
    let x = Poly::x();
    let one_minus_x = Poly::one_minus_x_pow(1);
    let two_minus_x = poly(&[(2, 1), (-1, 1)]);
    vec![
        ((1, 2, 2), one_minus_x.clone()),
        ((2, 2, 1), poly(&[(0, 1), (1, 1), (-1, 2)])),
        ((3, 2, 2), poly(&[(0, 1), (0, 1), (1, 2), (-1, 6)])),
        ((4, 2, 1), poly(&[(0, 1), (0, 1), (0, 1), (1, 6), (-1, 24)])),
        ((2, 3, 3), Poly::one_minus_x_pow(2)),
        ((3, 3, 1), poly(&[(0, 1), (1, 1), (-1, 1), (1, 3)])),
        ((3, 3, 2), poly(&[(0, 1), (1, 1), (-3, 2), (1, 2)])),
        ((4, 3, 2), poly(&[(0, 1), (0, 1), (1, 2), (-1, 3), (1, 12)])),
        ((4, 3, 3), poly(&[(0, 1), (0, 1), (1, 1), (-7, 6), (7, 24)])),
        ((3, 4, 4), Poly::one_minus_x_pow(3)),
        (
            (4, 4, 1),
            (&(&x * &two_minus_x) * &poly(&[(2, 1), (-2, 1), (1, 1)])).scale(&rat(1, 4)),
        ),
        (
            (4, 4, 2),
            (&(&x * &one_minus_x) * &poly(&[(3, 1), (-3, 1), (1, 1)])).scale(&rat(1, 3)),
        ),
        (
            (4, 4, 3),
            (&(&x * &Poly::one_minus_x_pow(2)) * &two_minus_x).scale(&rat(1, 2)),
        ),
    ]
}

/// Published decimals of `P_{p,k}(1)` as `(p, k, digits)`.
pub const PUBLISHED_WIN_DECIMALS: [(usize, usize, &str); 14] = [
    (2, 1, "0.6321205588"),
    (2, 2, "0.3678794412"),
    (3, 1, "0.4664928047"),
    (3, 2, "0.2918207124"),
    (3, 3, "0.2416864833"),
    (4, 1, "0.3711532353"),
    (4, 2, "0.242188553"),
    (4, 3, "0.2032205606"),
    (4, 4, "0.1834376522"),
    (5, 1, "0.3088745194"),
    (5, 2, "0.2071760032"),
    (5, 3, "0.1754708034"),
    (5, 4, "0.1592777163"),
    (5, 5, "0.1492009703"),
];

/// `E_p / e` for `p = 2..=9`.
pub const PUBLISHED_EXPECTED_MULTIPLIERS: [(i64, i64); 8] = [
    (1, 1),
    (3, 2),
    (47, 24),
    (115, 48),
    (16247, 5760),
    (37289, 11520),
    (10587043, 2903040),
    (2614099, 645120),
];

pub fn table_checks() -> Vec<Check> {
    let q = QTable::new(4, 5);
    let r = RTable::new(4, 4);
    let mut out = Vec::new();

    let qref = reference_q_entries();
    let mut bad = Vec::new();
    for n in 0..=4 {
        for p in 1..=5 {
            let want = qref
                .iter()
                .find(|(i, _)| *i == (n, p))
                .map_or(Poly::zero(), |e| e.1.clone());
            if q.get(n, p) != &want {
                bad.push(format!("Q_{n},{p}"));
            }
        }
    }
    out.push(Check::new(
        "Q table (n<=4, p<=5)",
        bad.is_empty(),
        format!("{} nonzero entries; mismatches: {bad:?}", qref.len()),
    ));

    let rref = reference_r_entries();
    let mut bad = Vec::new();
    for n in 1..=4 {
        for p in 2..=4 {
            for k in 1..=p {
                let want = rref
                    .iter()
                    .find(|(i, _)| *i == (n, p, k))
                    .map_or(Poly::zero(), |e| e.1.clone());
                if r.get(n, p, k).ok() != Some(&want) {
                    bad.push(format!("R_{n},{p},{k}"));
                }
            }
        }
    }
    out.push(Check::new(
        "R table (1<=n<=4, p<=4)",
        bad.is_empty(),
        format!("{} nonzero entries; mismatches: {bad:?}", rref.len()),
    ));

    // using only published data: R_{4,3,1} + R_{4,3,2} + R_{4,3,3} must be Q_{4,3}
    let find_r = |i| {
        rref.iter()
            .find(|(j, _)| *j == i)
            .map(|e| e.1.clone())
            .unwrap_or_default()
    };
    let q43 = qref.iter().find(|(i, _)| *i == (4, 3)).unwrap().1.clone();
    let row = &find_r((4, 3, 1)) + &find_r((4, 3, 2));
    let published_ok = &row + &r433_as_published() == q43;
    let corrected_ok = &row + &find_r((4, 3, 3)) == q43;
    out.push(Check::new(
        "published R_4,3,3 typo (-7x^3/3 -> -7x^3/6)",
        !published_ok && corrected_ok,
        "row sum against Q_4,3",
    ));
    out
}

pub fn stirling_checks() -> Result<Vec<Check>> {
    let egf = verify_stirling_egf(20);
    let mut out = vec![Check::new(
        "exp(v log 1/(1-z)) = sum c(n,k) v^k z^n / n!",
        egf.is_ok(),
        match &egf {
            Ok(r) => format!("{} rows", r.rows_checked),
            Err(e) => e.to_string(),
        },
    )];
    let mut bad = Vec::new();
    for n in 2..=20 {
        for p in 2..=n {
            let want = Rat::new(BigInt::from(complete_game_count(n, p)), factorial(n));
            if q_prob(n, p) != want {
                bad.push((n, p));
            }
        }
    }
    out.push(Check::new(
        "Q_n,p(1) = (n-1) c(n-1, n-p+1) / n!, 2 <= p <= n <= 20",
        bad.is_empty(),
        format!("mismatches: {bad:?}"),
    ));
    Ok(out)
}

/// Closed generating functions against the recurrence on a `size x size` window.
pub fn gf_window_checks(size: usize) -> Result<Vec<Check>> {
    let table = QTable::new(size - 1, size - 1);
    let mut out = Vec::new();
    for x in [int(0), rat(1, 2), int(1)] {
        let s = q_closed_series(&x, size, size)?;
        let mut bad = 0;
        for p in 0..size {
            for n in 0..size {
                let want = if p == 0 {
                    Rat::default()
                } else {
                    table.get(n, p).eval(&x)
                };
                if s.coeff(p, n) != want {
                    bad += 1;
                }
            }
        }
        out.push(Check::new(
            format!("Q(x,u,z) coefficients at x = {x}, {size}x{size} window"),
            bad == 0,
            format!("{bad} mismatches"),
        ));
    }
    let s = q_uz_closed_series(size, size)?;
    let mut bad = 0;
    for p in 1..size {
        for n in 0..size {
            if s.coeff(p, n) != table.prob(n, p) {
                bad += 1;
            }
        }
    }
    out.push(Check::new(
        format!("Q(u,z) coefficients, {size}x{size} window"),
        bad == 0,
        format!("{bad} mismatches"),
    ));
    Ok(out)
}

pub fn expected_length_check() -> Check {
    let got = expected_lengths(9);
    let mut bad = Vec::new();
    for (i, &(n, d)) in PUBLISHED_EXPECTED_MULTIPLIERS.iter().enumerate() {
        let e = &got[i + 2];
        if e.multiplier != rat(n, d) || e.exponent != int(1) {
            bad.push(format!("E_{}", i + 2));
        }
    }
    Check::new(
        "E_p / e multipliers, p = 2..9",
        bad.is_empty(),
        format!("mismatches: {bad:?}"),
    )
}

pub fn gf_checks() -> Result<Vec<Check>> {
    let mut out = gf_window_checks(20)?;
    out.push(expected_length_check());
    Ok(out)
}

pub fn count_checks() -> Result<Vec<Check>> {
    let t = WinCountTable::new(9, 5)?;
    let r = RTable::new(9, 5);
    let mut bad = Vec::new();
    for n in 0..=9 {
        for p in 1..=5 {
            let e = count_by_enumeration(n, p)?;
            let fact = Rat::from_integer(factorial(n));
            for k in 1..=p {
                let via_r = r.get(n, p, k)?.eval(&Rat::one()) * &fact;
                let w = t.w(n, p, k);
                if e[k - 1] != w || via_r != Rat::from_integer(w.into()) {
                    bad.push((n, p, k));
                }
            }
        }
    }
    let mut out = vec![Check::new(
        "enumeration = w recurrence = n! R_n,p,k(1), n <= 9, p <= 5",
        bad.is_empty(),
        format!("mismatches: {bad:?}"),
    )];
    let t = WinCountTable::new(20, 8)?;
    let mut bad = Vec::new();
    for n in 2..=20 {
        for p in 2..=n.min(8) {
            let total: u64 = (1..=p).map(|k| t.w(n, p, k)).sum();
            if complete_game_count(n, p).to_u64() != Some(total) {
                bad.push((n, p));
            }
        }
    }
    out.push(Check::new(
        "sum_k w_n,p,k = (n-1) c(n-1, n-p+1), n <= 20, p <= 8",
        bad.is_empty(),
        format!("mismatches: {bad:?}"),
    ));
    Ok(out)
}

pub fn injection_checks() -> Result<Vec<Check>> {
    let mut bad = Vec::new();
    let mut cases = 0;
    for n in 1..=9 {
        for p in 2..=5 {
            for k in 1..p {
                let c = injection_census(n, p, k)?;
                let prev = if n >= 2 {
                    injection_census(n - 1, p, k)?.v_bar
                } else {
                    0
                };
                cases += 1;
                if c.u > c.v || c.u_bar > (n as u64).saturating_sub(1) * prev {
                    bad.push((n, p, k));
                }
            }
        }
    }
    let mut out = vec![Check::new(
        "u_n,p,k+1 <= v_n,p,k and u'_n,p,k+1 <= (n-1) v'_n-1,p,k, n <= 9, p <= 5",
        bad.is_empty(),
        format!("{cases} cases; violations: {bad:?}"),
    )];
    let mut bad = Vec::new();
    for n in 2..=8 {
        for p in 2..=n.min(5) {
            for k in 1..p {
                let r = verify_injections(n, p, k)?;
                if !(r.first_ok && r.second_ok) {
                    bad.push((n, p, k));
                }
            }
        }
    }
    out.push(Check::new(
        "explicit injections are injective into their codomains, n <= 8",
        bad.is_empty(),
        format!("failures: {bad:?}"),
    ));
    Ok(out)
}

/// Sample points `(x, t, z)` for the roots-of-unity recursion.
pub const RP_SAMPLES: [(f64, (f64, f64), f64); 5] = [
    (0.5, (0.7, 0.0), 0.4),
    (1.0, (0.5, 0.2), 0.3),
    (0.25, (-0.6, 0.3), -0.5),
    (0.75, (1.4, -0.5), 0.2),
    (0.9, (0.1, 0.8), 0.6),
];

pub fn roots_of_unity_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [2, 3] {
        let mut worst: f64 = 0.0;
        for &(x, (re, im), z) in &RP_SAMPLES {
            let r = verify_rp_identity(p, x, Complex64::new(re, im), z, 60, 1e-9)?;
            worst = worst.max(r.residual);
        }
        out.push(Check::new(
            format!(
                "R_{p}(x,t,z) roots-of-unity recursion at {} points",
                RP_SAMPLES.len()
            ),
            worst < 1e-6,
            format!("max residual {worst:.2e}"),
        ));
    }
    Ok(out)
}

pub fn winprob_checks() -> Result<Vec<Check>> {
    let tables = WinTables::new(80, 8);
    let mut out = Vec::new();
    let mut uncertified = Vec::new();
    for p in 2..=8 {
        let m = tables.check_monotonicity(p, 80)?;
        if m != Monotonicity::Certified {
            uncertified.push((p, m));
        }
    }
    out.push(Check::new(
        "P_p,k(1) > P_p,k+1(1) certified, p = 2..8",
        uncertified.is_empty(),
        format!("uncertified: {uncertified:?}"),
    ));
    let mut worst_cf: f64 = 0.0;
    let mut worst_pub: f64 = 0.0;
    for (p, k, d) in PUBLISHED_WIN_DECIMALS {
        let e = tables.win_prob(p, k, &Rat::one(), 60)?;
        if let Ok(cf) = closed_form_p(p, k, 1.0) {
            worst_cf = worst_cf.max(e.distance_f64(cf));
        }
        worst_pub = worst_pub.max(e.distance_f64(d.parse().expect("literal")));
    }
    out.push(Check::new(
        "closed forms of P_p,k(1) within 1e-12 of enclosures, p <= 4 and P_5,1",
        worst_cf < 1e-12,
        format!("max distance {worst_cf:.1e}"),
    ));
    out.push(Check::new(
        "published decimals of P_p,k(1) within 1e-8 of enclosures",
        worst_pub < 1e-8,
        format!("max distance {worst_pub:.1e}"),
    ));
    let sum = tables.win_probs(5, &Rat::one(), 60)?;
    let lo: f64 = sum.iter().map(|e| to_f64(&e.lo)).sum();
    out.push(Check::new(
        "sum_k P_5,k(1) ~ 1",
        (lo - 1.0).abs() < 1e-12,
        format!("{lo}"),
    ));
    Ok(out)
}
