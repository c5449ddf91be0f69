//! The game itself: replay from distances, the permutation encoding, and a
//! reproducible Monte Carlo simulator.
//!
//! Players are numbered from 1 in throwing order. A throw survives iff it
//! lands strictly closer than every earlier throw (and than the starting
//! distance to beat); otherwise its thrower is eliminated.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n];
        for &v in &entries {
            let i = v as usize;
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[i - 1] = true;
        }
        Ok(Perm(entries))
    }

    /// Trusted constructor for callers that generate bijections themselves.
    pub(crate) fn from_vec_unchecked(entries: Vec<u32>) -> Self {
        debug_assert!(Perm::new(entries.clone()).is_ok());
        Perm(entries)
    }

    pub fn identity(n: usize) -> Self {
        Perm((1..=n as u32).collect())
    }

    /// Parses one-digit-per-entry notation such as `"463215"`.
    pub fn from_digits(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|c| c.to_digit(10).ok_or(Error::InvalidPermutation(s.len())))
            .collect::<Result<Vec<_>>>()?;
        Perm::new(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_distances(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.0.len() < 10 { "" } else { " " };
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Rank transform: the smallest distance becomes 1.
pub fn encode(distances: &[f64]) -> Result<Perm> {
    if let Some(&d) = distances.iter().find(|d| !d.is_finite()) {
        return Err(Error::NonFiniteDistance(d));
    }
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));
    if let Some(w) = order
        .windows(2)
        .find(|w| distances[w[0]] == distances[w[1]])
    {
        return Err(Error::DuplicateDistance(distances[w[0]]));
    }
    let mut entries = vec![0u32; distances.len()];
    for (rank, &i) in order.iter().enumerate() {
        entries[i] = rank as u32 + 1;
    }
    Ok(Perm(entries))
}

/// 1-based positions that are left-to-right minima.
pub fn lrm_positions(pi: &Perm) -> Vec<usize> {
    let mut best = u32::MAX;
    let mut out = Vec::new();
    for (i, &v) in pi.0.iter().enumerate() {
        if v < best {
            best = v;
            out.push(i + 1);
        }
    }
    out
}

/// `n - p + 1` left-to-right minima, and the last position is a botch.
pub fn is_complete_game(pi: &Perm, p: usize) -> bool {
    let n = pi.len();
    if p < 2 || n == 0 {
        return false;
    }
    let lrm = lrm_positions(pi);
    lrm.len() + p == n + 1 && lrm.last() != Some(&n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Throw {
    pub player: usize,
    pub distance: f64,
    pub eliminated: bool,
}

/// Full trace of one finished game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameRecord {
    pub p: usize,
    pub throws: Vec<Throw>,
    pub winner: usize,
    pub length: usize,
}

impl GameRecord {
    /// 1-based indices of the throws that eliminated their thrower.
    pub fn elimination_throws(&self) -> Vec<usize> {
        self.throws
            .iter()
            .enumerate()
            .filter(|(_, t)| t.eliminated)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// The thrower of each throw, in order.
    pub fn players(&self) -> Vec<usize> {
        self.throws.iter().map(|t| t.player).collect()
    }
}

/// Replays the queue until one player remains, pulling distances from `next`.
/// `None` from `next` means the supply ran out.
fn run_game(
    p: usize,
    x0: f64,
    mut next: impl FnMut(f64) -> Option<f64>,
    mut on_throw: impl FnMut(Throw),
) -> std::result::Result<(usize, usize), usize> {
    let mut queue: VecDeque<usize> = (1..=p).collect();
    let mut best = x0;
    let mut length = 0;
    while queue.len() > 1 {
        let player = queue.pop_front().expect("queue has at least two players");
        let Some(d) = next(best) else {
            return Err(length);
        };
        length += 1;
        let eliminated = d >= best;
        if eliminated {
            on_throw(Throw {
                player,
                distance: d,
                eliminated,
            });
        } else {
            best = d;
            on_throw(Throw {
                player,
                distance: d,
                eliminated,
            });
            queue.push_back(player);
        }
    }
    Ok((queue[0], length))
}

/// Plays a `p`-player game from scratch (no distance to beat yet).
pub fn play(p: usize, distances: &[f64]) -> Result<GameRecord> {
    play_from(p, f64::INFINITY, distances)
}

/// Plays a `p`-player game where the first throw must beat `x0`.
/// Consumes exactly `length` distances; extra ones are ignored.
pub fn play_from(p: usize, x0: f64, distances: &[f64]) -> Result<GameRecord> {
    if p == 0 {
        return Err(Error::TooFewPlayers { min: 1, got: 0 });
    }
    let mut throws = Vec::new();
    let mut it = distances.iter().copied();
    let mut bad: Option<Error> = None;
    let outcome = run_game(
        p,
        x0,
        |_| {
            let d = it.next()?;
            if bad.is_none() && !d.is_finite() {
                bad = Some(Error::NonFiniteDistance(d));
            }
            Some(d)
        },
        |t| throws.push(t),
    );
    if let Some(e) = bad {
        return Err(e);
    }
    let (winner, length) = outcome.map_err(|supplied| Error::IncompleteGame {
        players: p,
        supplied,
    })?;
    let mut used: Vec<f64> = throws.iter().map(|t| t.distance).collect();
    used.sort_by(f64::total_cmp);
    if let Some(w) = used.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateDistance(w[0]));
    }
    Ok(GameRecord {
        p,
        throws,
        winner,
        length,
    })
}

/// Winner of the game a complete-game permutation encodes.
pub fn winner_of(pi: &Perm, p: usize) -> Result<usize> {
    if !is_complete_game(pi, p) {
        return Err(Error::NotCompleteGame(p));
    }
    Ok(play(p, &pi.as_distances())?.winner)
}

/// Aggregated Monte Carlo results. Merging is associative and commutative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimSummary {
    pub p: usize,
    pub games: u64,
    /// `win_counts[k - 1]` is the number of games player `k` won.
    pub win_counts: Vec<u64>,
    pub length_histogram: BTreeMap<usize, u64>,
}

impl SimSummary {
    fn empty(p: usize) -> Self {
        SimSummary {
            p,
            games: 0,
            win_counts: vec![0; p],
            length_histogram: BTreeMap::new(),
        }
    }

    fn merge(mut self, other: SimSummary) -> Self {
        self.games += other.games;
        for (a, b) in self.win_counts.iter_mut().zip(other.win_counts) {
            *a += b;
        }
        for (len, c) in other.length_histogram {
            *self.length_histogram.entry(len).or_insert(0) += c;
        }
        self
    }

    pub fn win_frequency(&self, k: usize) -> f64 {
        self.win_counts[k - 1] as f64 / self.games as f64
    }

    /// Binomial standard error of [`win_frequency`](Self::win_frequency).
    pub fn win_std_error(&self, k: usize) -> f64 {
        let f = self.win_frequency(k);
        (f * (1.0 - f) / self.games as f64).sqrt()
    }

    pub fn mean_length(&self) -> f64 {
        if self.games == 0 {
            return 0.0;
        }
        let total: u128 = self
            .length_histogram
            .iter()
            .map(|(&l, &c)| l as u128 * c as u128)
            .sum();
        total as f64 / self.games as f64
    }

    /// Sample variance of the game length.
    pub fn length_variance(&self) -> f64 {
        if self.games < 2 {
            return 0.0;
        }
        let mean = self.mean_length();
        let ss: f64 = self
            .length_histogram
            .iter()
            .map(|(&l, &c)| c as f64 * (l as f64 - mean).powi(2))
            .sum();
        ss / (self.games - 1) as f64
    }

    pub fn mean_std_error(&self) -> f64 {
        (self.length_variance() / self.games as f64).sqrt()
    }
}

/// Games per work unit. Fixed so the partition never depends on thread count.
const CHUNK: u64 = 4096;

/// Runs `games` independent games with uniform(0,1) distances.
///
/// Game `i` draws from the ChaCha8 stream `i` under key `seed`, so results
/// are bit-identical for any degree of parallelism.
pub fn simulate(p: usize, games: u64, seed: u64, x0: f64) -> Result<SimSummary> {
    if p == 0 {
        return Err(Error::TooFewPlayers { min: 1, got: 0 });
    }
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::OutOfUnitInterval(x0.to_string()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = games.div_ceil(CHUNK);
    let summary = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = SimSummary::empty(p);
            let end = ((c + 1) * CHUNK).min(games);
            for g in c * CHUNK..end {
                let mut rng = base.clone();
                rng.set_stream(g);
                let (winner, length) = run_game(
                    p,
                    x0,
                    |best| loop {
                        let d: f64 = rng.gen();
                        // a tie with the distance to beat is redrawn
                        if d != best {
                            return Some(d);
                        }
                    },
                    |_| {},
                )
                .expect("an unbounded supply always finishes the game");
                acc.games += 1;
                acc.win_counts[winner - 1] += 1;
                *acc.length_histogram.entry(length).or_insert(0) += 1;
            }
            acc
        })
        .reduce(|| SimSummary::empty(p), SimSummary::merge);
    Ok(summary)
}
