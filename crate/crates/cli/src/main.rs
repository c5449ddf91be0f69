use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dartline::engine::simulate;
use dartline::exactmath::rat::{to_decimal, Rounding};
use dartline::exactmath::{parse_rat, to_fraction_string, Rat};
use dartline::lengthdist::{expected_remaining, QTable};
use dartline::permcount::{count_by_enumeration, WinCountTable, MAX_ENUMERATION_N};
use dartline::verify::Suite;
use dartline::winner::{Monotonicity, WinTables};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

/// Decimal places shown for exact values and enclosure bounds.
const DIGITS: usize = 15;

#[derive(Parser)]
#[command(
    name = "dartline",
    version,
    about = "Exact analysis of the sequential elimination dart game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution of the number of remaining throws, Q_{n,p}(x).
    Length {
        #[arg(long, short)]
        players: usize,
        /// Largest n to print [default: 40 + 5p].
        #[arg(long)]
        max_throws: Option<usize>,
        /// Distance to beat, as a rational in [0, 1].
        #[arg(long, value_parser = parse_unit_rat, default_value = "1")]
        x: Rat,
    },
    /// Exact expected number of remaining throws, E_p(x).
    Expected {
        #[arg(long, short)]
        players: usize,
        #[arg(long, value_parser = parse_unit_rat, default_value = "1")]
        x: Rat,
    },
    /// Rigorous enclosures of each player's winning probability P_{p,k}(x).
    Winprob {
        #[arg(long, short)]
        players: usize,
        /// Number of terms summed [default: 40 + 5p].
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, value_parser = parse_unit_rat, default_value = "1")]
        x: Rat,
        /// One JSON object per line.
        #[arg(long)]
        json: bool,
    },
    /// CSV of P_{p,k}(x) enclosures at x = j/M, j = 0..M.
    Curve {
        #[arg(long, short)]
        players: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo simulation with a reproducible counter-based RNG.
    Simulate {
        #[arg(long, short)]
        players: usize,
        #[arg(long, default_value_t = 1_000_000)]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Starting distance to beat.
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
    },
    /// Number of length-n permutations encoding a game won by each player.
    Count {
        /// Permutation length (number of throws).
        #[arg(long, short)]
        n: usize,
        #[arg(long, short)]
        players: usize,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        /// all, stirling, gf, tables, counts, injections, rootsofunity or winprob.
        #[arg(long, default_value = "all", value_parser = parse_suites)]
        suite: SuiteSel,
    },
}

#[derive(Clone, Debug)]
struct SuiteSel(Vec<Suite>);

fn parse_suites(s: &str) -> Result<SuiteSel, String> {
    if s == "all" {
        return Ok(SuiteSel(Suite::ALL.to_vec()));
    }
    s.parse::<Suite>().map(|x| SuiteSel(vec![x]))
}

fn parse_unit_rat(s: &str) -> Result<Rat, String> {
    let r = parse_rat(s).map_err(|e| e.to_string())?;
    if r < Rat::zero() || r > Rat::one() {
        return Err(format!("{s} is outside [0, 1]"));
    }
    Ok(r)
}

enum Failure {
    Usage(String),
    Io(io::Error),
    Verification,
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<dartline::Error> for Failure {
    fn from(e: dartline::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn default_terms(p: usize) -> usize {
    40 + 5 * p
}

fn need_players(p: usize) -> Outcome {
    if p == 0 {
        return Err(Failure::Usage("--players must be at least 1".into()));
    }
    Ok(())
}

fn dec(r: &Rat) -> String {
    to_decimal(r, DIGITS, Rounding::Nearest)
}

fn cmd_length(out: &mut impl Write, p: usize, max_throws: Option<usize>, x: &Rat) -> Outcome {
    need_players(p)?;
    let big_n = max_throws.unwrap_or_else(|| default_terms(p));
    let table = QTable::new(big_n, p);
    writeln!(
        out,
        "# length --players {p} --max-throws {big_n} --x {}  [exact]",
        to_fraction_string(x)
    )?;
    writeln!(out, "n\tQ\tdecimal")?;
    let mut remaining = Rat::one();
    for n in p - 1..=big_n {
        let q = table.get(n, p).eval(x);
        remaining -= &q;
        writeln!(out, "{n}\t{}\t{}", to_fraction_string(&q), dec(&q))?;
        if remaining.is_zero() {
            break;
        }
    }
    writeln!(
        out,
        "tail\t{}\t{}",
        to_fraction_string(&remaining),
        dec(&remaining)
    )?;
    Ok(())
}

fn cmd_expected(out: &mut impl Write, p: usize, x: &Rat) -> Outcome {
    need_players(p)?;
    let e = expected_remaining(p, x)?;
    writeln!(
        out,
        "# expected --players {p} --x {}  [exact]",
        to_fraction_string(x)
    )?;
    writeln!(
        out,
        "E_{p}({}) = {e} ≈ {:.15}",
        to_fraction_string(x),
        e.to_f64()
    )?;
    writeln!(out, "multiplier\t{}", to_fraction_string(&e.multiplier))?;
    writeln!(out, "exponent\t{}", to_fraction_string(&e.exponent))?;
    Ok(())
}

fn cmd_winprob(
    out: &mut impl Write,
    p: usize,
    terms: Option<usize>,
    x: &Rat,
    as_json: bool,
) -> Outcome {
    need_players(p)?;
    let big_n = terms.unwrap_or_else(|| default_terms(p));
    let tables = WinTables::new(big_n, p);
    let encl = tables.win_probs(p, x, big_n)?;
    if p >= 2 && x.is_one() {
        match tables.check_monotonicity(p, big_n)? {
            Monotonicity::Certified => {}
            m => eprintln!("warning: ordering of players not certified at {big_n} terms ({m:?}); raise --terms"),
        }
    }
    if !as_json {
        writeln!(
            out,
            "# winprob --players {p} --terms {big_n} --x {}  [enclosure]",
            to_fraction_string(x)
        )?;
        writeln!(out, "k\tlo\thi\twidth")?;
    }
    for (i, e) in encl.iter().enumerate() {
        let (lo, hi) = e.to_decimal(DIGITS);
        let width = e.width().to_f64().unwrap_or(f64::NAN);
        if as_json {
            let rec = json!({
                "p": p,
                "x": to_fraction_string(x),
                "k": i + 1,
                "lo": lo,
                "hi": hi,
                "width": format!("{width:.3e}"),
                "lo_exact": to_fraction_string(&e.lo),
                "hi_exact": to_fraction_string(&e.hi),
                "digits": DIGITS,
                "provenance": "enclosure",
            });
            writeln!(out, "{rec}")?;
        } else {
            writeln!(out, "{}\t{lo}\t{hi}\t{width:.3e}", i + 1)?;
        }
    }
    Ok(())
}

fn cmd_curve(p: usize, samples: usize, terms: Option<usize>, path: &PathBuf) -> Outcome {
    need_players(p)?;
    if samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let big_n = terms.unwrap_or_else(|| default_terms(p));
    let tables = WinTables::new(big_n, p);
    let rows = (0..=samples)
        .into_par_iter()
        .map(|j| {
            let x = Rat::new((j as i64).into(), (samples as i64).into());
            let encl = tables.win_probs(p, &x, big_n)?;
            Ok(encl
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let (lo, hi) = e.to_decimal(DIGITS);
                    format!("{},{},{lo},{hi}\n", to_fraction_string(&x), i + 1)
                })
                .collect::<String>())
        })
        .collect::<Result<Vec<String>, dartline::Error>>()?;
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(b"x,k,lo,hi\n")?;
    for r in rows {
        f.write_all(r.as_bytes())?;
    }
    f.flush()?;
    Ok(())
}

fn cmd_simulate(out: &mut impl Write, p: usize, games: u64, seed: u64, x0: f64) -> Outcome {
    let s = simulate(p, games, seed, x0)?;
    writeln!(
        out,
        "# simulate --players {p} --games {games} --seed {seed} --x0 {x0}  [monte-carlo]"
    )?;
    writeln!(out, "k\twins\tfrequency\tstd_error")?;
    for k in 1..=p {
        writeln!(
            out,
            "{k}\t{}\t{:.6}\t{:.6}",
            s.win_counts[k - 1],
            s.win_frequency(k),
            s.win_std_error(k)
        )?;
    }
    writeln!(
        out,
        "mean_length\t{:.6}\t{:.6}",
        s.mean_length(),
        s.mean_std_error()
    )?;
    Ok(())
}

fn cmd_count(out: &mut impl Write, n: usize, p: usize) -> Result<bool, Failure> {
    need_players(p)?;
    let table = WinCountTable::new(n, p)?;
    let enumerated = if n <= MAX_ENUMERATION_N {
        Some(count_by_enumeration(n, p)?)
    } else {
        None
    };
    writeln!(out, "# count -n {n} --players {p}  [exact]")?;
    writeln!(out, "k\trecurrence\tenumeration")?;
    let mut agree = true;
    for k in 1..=p {
        let w = table.w(n, p, k);
        let e = enumerated.as_ref().map(|e| e[k - 1]);
        agree &= e.is_none_or(|e| e == w);
        let shown = e.map_or_else(|| "-".to_string(), |e| e.to_string());
        writeln!(out, "{k}\t{w}\t{shown}")?;
    }
    Ok(agree)
}

fn cmd_verify(out: &mut impl Write, suites: &[Suite]) -> Result<bool, Failure> {
    let mut all = true;
    for &s in suites {
        let report = s.run()?;
        writeln!(out, "== {s}")?;
        for c in &report.checks {
            writeln!(out, "{c}")?;
        }
        all &= report.passed();
    }
    writeln!(
        out,
        "{}",
        if all {
            "all checks passed"
        } else {
            "SOME CHECKS FAILED"
        }
    )?;
    Ok(all)
}

fn run(cli: Cli) -> Outcome {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let ok = match cli.command {
        Command::Length {
            players,
            max_throws,
            x,
        } => cmd_length(&mut out, players, max_throws, &x).map(|_| true),
        Command::Expected { players, x } => cmd_expected(&mut out, players, &x).map(|_| true),
        Command::Winprob {
            players,
            terms,
            x,
            json,
        } => cmd_winprob(&mut out, players, terms, &x, json).map(|_| true),
        Command::Curve {
            players,
            samples,
            terms,
            out: path,
        } => cmd_curve(players, samples, terms, &path).map(|_| true),
        Command::Simulate {
            players,
            games,
            seed,
            x0,
        } => cmd_simulate(&mut out, players, games, seed, x0).map(|_| true),
        Command::Count { n, players } => cmd_count(&mut out, n, players),
        Command::Verify { suite } => cmd_verify(&mut out, &suite.0),
    }?;
    out.flush()?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DARTLINE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DARTLINE_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
