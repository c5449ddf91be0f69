//! Counting the permutations that encode a game won by a given player.
//!
//! `W_{n,p,k}` is the set of complete-game permutations of length `n` for
//! `p` players in which player `k` wins; `w_{n,p,k} = |W_{n,p,k}|` and
//! `w_{n,p,k,s}` further fixes `π_1 = s`. Three independent routes agree:
//! brute-force enumeration, the first-entry recurrence, and `n! R_{n,p,k}(1)`.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::engine::{play, GameRecord, Perm};
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_N: usize = 10;
pub const MAX_CENSUS_N: usize = 9;
/// `20!` still fits in a `u64`.
pub const MAX_TABLE_N: usize = 20;

/// Calls `visit` on every complete-game permutation of length `n` for `p >= 2`
/// players, in lexicographic order within each first entry. First entries are
/// processed in parallel and the per-entry accumulators merged in order.
pub fn fold_complete_games<T, I, V, M>(n: usize, p: usize, init: I, visit: V, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &[u32]) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationBudget {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    if p < 2 {
        return Err(Error::TooFewPlayers { min: 2, got: p });
    }
    let parts: Vec<T> = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut prefix = Vec::with_capacity(n);
            prefix.push(first);
            dfs(n, p, &mut prefix, 1u32 << first, first, 0, &mut |pi| {
                visit(&mut acc, pi)
            });
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init(), merge))
}

/// Extends `prefix` in increasing order, pruning as soon as the botch count
/// makes a complete `p`-player game of length `n` impossible.
fn dfs(
    n: usize,
    p: usize,
    prefix: &mut Vec<u32>,
    used: u32,
    best: u32,
    botches: usize,
    visit: &mut impl FnMut(&[u32]),
) {
    let len = prefix.len();
    if len == n {
        visit(prefix);
        return;
    }
    for v in 1..=n as u32 {
        if used & (1 << v) != 0 {
            continue;
        }
        let botch = v > best;
        let b = botches + botch as usize;
        let last = len + 1 == n;
        // the (p-1)-th botch ends the game, so it must be the final throw
        if b > p - 1 || (b == p - 1 && !last) || (last && (!botch || b != p - 1)) {
            continue;
        }
        if p - 1 - b > n - len - 1 {
            continue;
        }
        prefix.push(v);
        dfs(n, p, prefix, used | (1 << v), best.min(v), b, visit);
        prefix.pop();
    }
}

fn replay(pi: &[u32], p: usize) -> GameRecord {
    let d: Vec<f64> = pi.iter().map(|&v| v as f64).collect();
    let rec = play(p, &d).expect("enumerated permutation encodes a complete game");
    debug_assert_eq!(rec.length, pi.len());
    rec
}

/// `[k - 1][s - 1]` = number of games of length `n` won by `k` with `π_1 = s`.
pub fn count_by_enumeration_refined(n: usize, p: usize) -> Result<Vec<Vec<u64>>> {
    if p == 0 {
        return Err(Error::TooFewPlayers { min: 1, got: 0 });
    }
    if p == 1 || n < p {
        if n > MAX_ENUMERATION_N {
            return Err(Error::EnumerationBudget {
                n,
                max: MAX_ENUMERATION_N,
            });
        }
        return Ok(vec![vec![0; n]; p]);
    }
    fold_complete_games(
        n,
        p,
        || vec![vec![0u64; n]; p],
        |acc, pi| {
            let w = replay(pi, p).winner;
            acc[w - 1][pi[0] as usize - 1] += 1;
        },
        |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        },
    )
}

/// `[k - 1]` = `w_{n,p,k}` by brute force.
pub fn count_by_enumeration(n: usize, p: usize) -> Result<Vec<u64>> {
    if p == 1 && n == 0 {
        // the empty game: the lone player has already won
        return Ok(vec![1]);
    }
    Ok(count_by_enumeration_refined(n, p)?
        .into_iter()
        .map(|row| row.iter().sum())
        .collect())
}

/// `w_{n,p,k,s}` from the first-entry recurrence, for `n <= max_n`, `p <= max_p`.
#[derive(Clone, Debug)]
pub struct WinCountTable {
    max_n: usize,
    max_p: usize,
    /// `refined[n][p][k][s]`, with unused index 0 in each of `p`, `k`, `s`.
    refined: Vec<Vec<Vec<Vec<u64>>>>,
}

impl WinCountTable {
    pub fn new(max_n: usize, max_p: usize) -> Result<Self> {
        if max_n > MAX_TABLE_N {
            return Err(Error::TableTooSmall {
                limit: MAX_TABLE_N,
                requested: max_n,
            });
        }
        let mut refined: Vec<Vec<Vec<Vec<u64>>>> = (0..=max_n)
            .map(|n| {
                (0..=max_p)
                    .map(|p| vec![vec![0u64; n + 1]; p + 1])
                    .collect()
            })
            .collect();
        if max_n >= 2 && max_p >= 2 {
            refined[2][2][1][1] = 1;
        }
        for n in 3..=max_n {
            for p in 2..=max_p {
                for k in 1..=p {
                    let kbar = if k == 1 { p } else { k - 1 };
                    let khat = match k {
                        1 => Some(1),
                        2 => None,
                        _ => Some(k - 1),
                    };
                    let mut prefix = 0u64;
                    for s in 1..=n {
                        let mut w = prefix;
                        if let Some(kh) = khat {
                            if s < n {
                                w += (n - s) as u64
                                    * refined[n - 1][p - 1].get(kh).map_or(0, |r| r[s]);
                            }
                        }
                        if s < n {
                            prefix += refined[n - 1][p][kbar][s];
                        }
                        refined[n][p][k][s] = w;
                    }
                }
            }
        }
        Ok(WinCountTable {
            max_n,
            max_p,
            refined,
        })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn max_p(&self) -> usize {
        self.max_p
    }

    /// Out-of-range indices count zero.
    pub fn w_refined(&self, n: usize, p: usize, k: usize, s: usize) -> u64 {
        if n > self.max_n || p > self.max_p || k == 0 || k > p || s == 0 || s > n {
            return 0;
        }
        self.refined[n][p][k][s]
    }

    pub fn w(&self, n: usize, p: usize, k: usize) -> u64 {
        if n == 0 && p == 1 && k == 1 {
            return 1;
        }
        (1..=n).map(|s| self.w_refined(n, p, k, s)).sum()
    }
}

pub fn w_refined(n: usize, p: usize, k: usize, s: usize) -> Result<u64> {
    Ok(WinCountTable::new(n, p)?.w_refined(n, p, k, s))
}

/// Sizes of the four sets in the comparison of players `k` and `k + 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    /// Games won by `k + 1` whose last throw is not player `k`'s.
    pub u: u64,
    /// Games won by `k + 1` whose last throw is player `k`'s.
    pub u_bar: u64,
    /// Games won by `k` where player `k + 1`'s losing throw would lose even one throw earlier.
    pub v: u64,
    pub v_bar: u64,
}

impl Census {
    fn add(mut self, o: Census) -> Census {
        self.u += o.u;
        self.u_bar += o.u_bar;
        self.v += o.v;
        self.v_bar += o.v_bar;
        self
    }
}

/// 0-based index of `player`'s losing throw.
fn losing_throw(rec: &GameRecord, player: usize) -> Option<usize> {
    rec.throws
        .iter()
        .position(|t| t.player == player && t.eliminated)
}

/// Whether player `k + 1`'s losing throw at index `i` would still lose if
/// thrown before the preceding throw (player `k`'s).
fn in_v(pi: &[u32], rec: &GameRecord, k: usize) -> bool {
    let i = losing_throw(rec, k + 1).expect("a non-winner loses exactly once");
    debug_assert_eq!(rec.throws[i - 1].player, k);
    i >= 2 && pi[..i - 1].iter().any(|&v| v < pi[i])
}

pub fn injection_census(n: usize, p: usize, k: usize) -> Result<Census> {
    if n > MAX_CENSUS_N {
        return Err(Error::EnumerationBudget {
            n,
            max: MAX_CENSUS_N,
        });
    }
    if k == 0 || k >= p {
        return Err(Error::PlayerOutOfRange { p, k });
    }
    if n < p {
        return Ok(Census::default());
    }
    fold_complete_games(
        n,
        p,
        Census::default,
        |c, pi| {
            let rec = replay(pi, p);
            if rec.winner == k + 1 {
                if rec.throws[n - 1].player == k {
                    c.u_bar += 1;
                } else {
                    c.u += 1;
                }
            } else if rec.winner == k {
                if in_v(pi, &rec, k) {
                    c.v += 1;
                } else {
                    c.v_bar += 1;
                }
            }
        },
        Census::add,
    )
}

/// `U_{n,p,k+1} -> V_{n,p,k}`: swap player `k`'s losing throw with the
/// following (winning player's) throw.
pub fn swap_injection(pi: &Perm, p: usize, k: usize) -> Result<Perm> {
    let rec = play(p, &pi.as_distances())?;
    let i = losing_throw(&rec, k).ok_or(Error::PlayerOutOfRange { p, k })?;
    let mut e = pi.entries().to_vec();
    if i + 1 >= e.len() {
        return Err(Error::NotCompleteGame(p));
    }
    e.swap(i, i + 1);
    Ok(Perm::from_vec_unchecked(e))
}

/// `Ū_{n,p,k+1} -> V̄_{n-1,p,k} x {2..n}`: swap player `k`'s last good
/// throw with the next one, drop the final entry and standardize.
pub fn swap_delete_injection(pi: &Perm, p: usize, k: usize) -> Result<(Perm, u32)> {
    let rec = play(p, &pi.as_distances())?;
    let i = rec
        .throws
        .iter()
        .rposition(|t| t.player == k && !t.eliminated)
        .ok_or(Error::PlayerOutOfRange { p, k })?;
    let mut e = pi.entries().to_vec();
    if i + 1 >= e.len() {
        return Err(Error::NotCompleteGame(p));
    }
    e.swap(i, i + 1);
    let last = e.pop().expect("non-empty");
    for v in &mut e {
        if *v > last {
            *v -= 1;
        }
    }
    Ok((Perm::from_vec_unchecked(e), last))
}

/// Outcome of checking both injections on every element of their domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionReport {
    pub census: Census,
    /// `u` images, all distinct and all in `V_{n,p,k}`.
    pub first_ok: bool,
    /// `ū` images, all distinct and all in `V̄_{n-1,p,k} x {2..n}`.
    pub second_ok: bool,
}

pub fn verify_injections(n: usize, p: usize, k: usize) -> Result<InjectionReport> {
    let census = injection_census(n, p, k)?;
    if n < p {
        return Ok(InjectionReport {
            census,
            first_ok: true,
            second_ok: true,
        });
    }
    let domain: Vec<Vec<u32>> = fold_complete_games(
        n,
        p,
        Vec::new,
        |acc, pi| {
            if replay(pi, p).winner == k + 1 {
                acc.push(pi.to_vec());
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    let mut first = HashSet::new();
    let mut second = HashSet::new();
    let (mut first_ok, mut second_ok) = (true, true);
    for e in domain {
        let pi = Perm::from_vec_unchecked(e);
        let rec = play(p, &pi.as_distances())?;
        if rec.throws[n - 1].player != k {
            let img = swap_injection(&pi, p, k)?;
            let r = play(p, &img.as_distances())?;
            let lands = r.length == n && r.winner == k && in_v(img.entries(), &r, k);
            first_ok &= lands && first.insert(img);
        } else {
            let (img, last) = swap_delete_injection(&pi, p, k)?;
            let lands = play(p, &img.as_distances())
                .is_ok_and(|r| r.length == n - 1 && r.winner == k && !in_v(img.entries(), &r, k));
            second_ok &= lands && (2..=n as u32).contains(&last) && second.insert((img, last));
        }
    }
    Ok(InjectionReport {
        census,
        first_ok,
        second_ok,
    })
}
