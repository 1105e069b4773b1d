//! Command-line surface. Every command produces JSON; `--json` switches from
//! pretty-printed to single-line output. Exit codes: 0 success, 1 mismatch or
//! lost certification, 2 usage or input errors.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use polygame_core::abelian::{abelian_certificate, find_abelian_prime, NoraAbelianCubic, NoraAbelianHighdeg};
use polygame_core::game::{parse_rational, ArenaSpec};
use polygame_core::solver::{Solver, SolverConfig, DEFAULT_BUDGET};
use polygame_core::strategy::{strategy_by_name, NoraMultiPrime, Strategy};
use polygame_core::valued::poly::discriminant;
use polygame_core::valued::{newton_polygon_of, qp_root_exists};
use polygame_core::verify::{
    certify_strategy, default_theorem1_grid, random_games, theorem1_table, valued_certification_suite,
    Universe, ValuedSuiteConfig,
};
use polygame_core::zring::last_player;
use polygame_core::{Arena, Error, GameState, Player};
use serde::Serialize;
use serde_json::{json, Value};

use crate::session::{CreateSession, PostMove, Session};

#[derive(Debug, Parser)]
#[command(name = "polygame", version, about = "Polynomial coefficient games over Z/NZ and Q_p")]
pub struct Cli {
    /// Single-line JSON output
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a fresh game over Z/NZ by exhaustive search
    Solve {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        first: Player,
        /// Upper bound on (N+1)^(d+1)
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Play against the engine over Z/NZ; enter moves as `index value`
    Play {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        engine_role: Player,
        #[arg(long)]
        first: Player,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Newton polygons and root existence over Q_p
    Padic {
        #[command(subcommand)]
        command: PadicCommand,
    },
    /// Play against the engine over Q_p
    PlayPadic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        engine_role: Player,
        #[arg(long)]
        first: Player,
        /// Restrict coefficients to nonnegative order
        #[arg(long)]
        integral: bool,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Nora closes against several primes at once; emits per-prime certificates
    UnramifiedDemo {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Root avoidance in abelian extensions of Q
    Abelian {
        #[command(subcommand)]
        command: AbelianCommand,
    },
    /// Certification and classification checks, as JSONL records
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Run the HTTP session service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for the append-only session journal
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PadicCommand {
    Polygon {
        #[arg(long)]
        p: u64,
        /// a_0,a_1,...,a_d as integers or num/den
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
    },
    HasRoot {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AbelianCommand {
    /// One cubic game against a random adversary
    CubicDemo {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    FindPrime {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
    },
    /// One degree-d game (d > 8) against a random adversary
    HighdegDemo {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Solver against the classification on a grid of (N, d)
    Theorem1 {
        /// `default` or a file with one `N d` pair per line
        #[arg(long, default_value = "default")]
        grid: String,
    },
    /// Certify a named strategy
    Strategy {
        #[arg(long)]
        name: String,
        /// Modulus of a cyclic arena
        #[arg(long, conflicts_with = "p")]
        n: Option<u64>,
        /// Prime of a Q_p arena
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        role: Player,
        #[arg(long)]
        first: Player,
        /// `exhaustive` or `random:SEED:TRIALS[:BOUND]`
        #[arg(long, default_value = "exhaustive")]
        universe: String,
        #[arg(long)]
        integral: bool,
    },
    /// The Q_p strategy suite
    Valued {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
}

/// What a command produced and how the process should exit.
pub struct Report {
    pub records: Vec<Value>,
    /// Emit one compact record per line regardless of `--json`.
    pub jsonl: bool,
    pub code: i32,
}

impl Report {
    fn one(v: impl Serialize) -> Report {
        Report { records: vec![to_value(v)], jsonl: false, code: 0 }
    }

    fn with_code(mut self, ok: bool) -> Report {
        self.code = if ok { 0 } else { 1 };
        self
    }

    pub fn render(&self, compact: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            let s = if compact || self.jsonl {
                serde_json::to_string(r)
            } else {
                serde_json::to_string_pretty(r)
            };
            out.push_str(&s.expect("values serialize"));
            out.push('\n');
        }
        out
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn parse_coeffs(coeffs: &[String]) -> Result<Vec<num_rational::BigRational>, Error> {
    coeffs.iter().map(|c| parse_rational(c)).collect()
}

fn poly_strings(state: &GameState) -> Vec<String> {
    state.to_record().slots
}

/// First player that makes Nora move last.
fn nora_last_first(d: usize) -> Player {
    if last_player(d, Player::Nora) == Player::Nora {
        Player::Nora
    } else {
        Player::Wanda
    }
}

fn parse_universe(s: &str) -> Result<Universe, Error> {
    if s == "exhaustive" {
        return Ok(Universe::Exhaustive);
    }
    let bad = || Error::Parse(format!("bad universe {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["random", seed, trials, rest @ ..] if rest.len() <= 1 => Ok(Universe::Random {
            seed: seed.parse().map_err(|_| bad())?,
            trials: trials.parse().map_err(|_| bad())?,
            bound: rest.first().map_or(Ok(3), |b| b.parse()).map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

fn parse_grid(grid: &str) -> Result<Vec<(u64, usize)>, Error> {
    if grid == "default" {
        return Ok(default_theorem1_grid());
    }
    let text = std::fs::read_to_string(grid).map_err(|e| Error::Parse(format!("{grid}: {e}")))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let bad = || Error::Parse(format!("bad grid line {l:?}"));
            let mut it = l.split_whitespace();
            let n = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let d = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            Ok((n, d))
        })
        .collect()
}

/// Line-based play: the human types `index value`, `state` or `quit`.
pub fn play_loop(request: CreateSession, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Session, Error> {
    let mut session = Session::create("terminal".into(), request).map_err(session_error)?;
    let mut line = String::new();
    let io = |e: std::io::Error| Error::Parse(e.to_string());
    loop {
        let view = session.view();
        writeln!(out, "slots: {}", view.game.slots.join(" ")).map_err(io)?;
        if let Some(r) = &view.result {
            writeln!(out, "winner: {}", r.winner).map_err(io)?;
            return Ok(session);
        }
        writeln!(out, "your move ({}), `index value`:", session.human()).map_err(io)?;
        line.clear();
        if input.read_line(&mut line).map_err(io)? == 0 {
            return Ok(session);
        }
        let cmd = line.trim();
        match cmd {
            "" => continue,
            "quit" => return Ok(session),
            "state" => {
                writeln!(out, "{}", serde_json::to_string(&view).expect("serializable")).map_err(io)?;
                continue;
            }
            _ => {}
        }
        let mut parts = cmd.split_whitespace();
        let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            writeln!(out, "expected `index value`").map_err(io)?;
            continue;
        };
        let Ok(index) = i.parse() else {
            writeln!(out, "bad index {i:?}").map_err(io)?;
            continue;
        };
        match session.post_move(&PostMove { index, value: v.to_string() }) {
            Ok(()) => {
                if let Some(m) = session.view().engine_moves.last() {
                    if m.ply + 1 == session.game().moves_made() {
                        writeln!(out, "engine: a_{} = {}", m.index, m.value).map_err(io)?;
                    }
                }
            }
            Err(e) => writeln!(out, "rejected: {e}").map_err(io)?,
        }
    }
}

fn session_error(e: crate::session::SessionError) -> Error {
    match e {
        crate::session::SessionError::Game(e) => e,
        other => Error::Parse(other.to_string()),
    }
}

fn certify(strategy: &dyn Strategy, arena: &Arena, role: Player, first: Player, u: &Universe) -> Result<Report, Error> {
    let r = certify_strategy(strategy, arena, role, first, u)?;
    let ok = r.all_won();
    Ok(Report { records: vec![to_value(&r)], jsonl: true, code: 0 }.with_code(ok))
}

/// Runs a non-interactive command (everything except `play`, `play-padic`
/// and `serve`).
pub fn run_command(command: &Command) -> Result<Report, Error> {
    match command {
        Command::Solve { n, d, first, budget } => {
            let arena = Arena::cyclic(*n, *d)?;
            let solver = Solver::new(&arena, *first, &SolverConfig { budget: *budget, parallel: false })?;
            let r = solver.solve(&GameState::new(arena, *first))?;
            Ok(Report::one(json!({
                "winner": r.winner,
                "pv": r.principal_variation,
                "states_visited": r.states_visited,
            })))
        }
        Command::Padic { command } => match command {
            PadicCommand::Polygon { p, coeffs } => {
                Ok(Report::one(newton_polygon_of(&parse_coeffs(coeffs)?, *p)?))
            }
            PadicCommand::HasRoot { p, coeffs } => Ok(Report::one(qp_root_exists(&parse_coeffs(coeffs)?, *p)?)),
        },
        Command::UnramifiedDemo { primes, d, seed, bound } => {
            let s = NoraMultiPrime::new(primes.clone())?;
            let first = nora_last_first(*d);
            let arena = Arena::valued(primes[0], *d)?;
            s.applicable(&arena, first)?;
            let game = random_games(&s, &arena, first, *seed, 1, *bound)?.remove(0);
            let f = game.poly().rational_coeffs()?;
            let certificates = primes
                .iter()
                .map(|&p| Ok(json!({ "prime": p, "report": qp_root_exists(&f, p)? })))
                .collect::<Result<Vec<_>, Error>>()?;
            let ok = certificates.iter().all(|c| c["report"]["exists"] == json!(false));
            Ok(Report::one(json!({
                "primes": primes,
                "degree": d,
                "polynomial": poly_strings(&game),
                "log": game.to_record().log,
                "certificates": certificates,
                "rootless_everywhere": ok,
            }))
            .with_code(ok))
        }
        Command::Abelian { command } => match command {
            AbelianCommand::FindPrime { d, limit } => {
                let ap = find_abelian_prime(*d, *limit)?;
                let ok = ap.is_valid();
                Ok(Report::one(json!({ "prime": ap, "valid": ok })).with_code(ok))
            }
            AbelianCommand::CubicDemo { p, seed } => {
                let arena = Arena::valued(*p, 3)?;
                let game = random_games(&NoraAbelianCubic, &arena, Player::Wanda, *seed, 1, 3)?.remove(0);
                let f = game.poly().rational_coeffs()?;
                let cert = abelian_certificate(&f, *p)?;
                let ok = cert.no_qp_root && cert.disc_negative == Some(true);
                Ok(Report::one(json!({
                    "polynomial": poly_strings(&game),
                    "log": game.to_record().log,
                    "discriminant": discriminant(&f).to_string(),
                    "certificate": cert,
                    "galois_group_s3": ok,
                }))
                .with_code(ok))
            }
            AbelianCommand::HighdegDemo { d, seed } => {
                let s = NoraAbelianHighdeg::new(*d)?;
                let p = s.prime();
                let arena = Arena::valued(p, *d)?;
                let game = random_games(&s, &arena, nora_last_first(*d), *seed, 1, 3)?.remove(0);
                let f = game.poly().rational_coeffs()?;
                let cert = abelian_certificate(&f, p)?;
                let ok = cert.no_qp_root;
                Ok(Report::one(json!({
                    "abelian_prime": s.abelian_prime(),
                    "polynomial": poly_strings(&game),
                    "log": game.to_record().log,
                    "certificate": cert,
                }))
                .with_code(ok))
            }
        },
        Command::Verify { command } => match command {
            VerifyCommand::Theorem1 { grid } => {
                let rows = theorem1_table(&parse_grid(grid)?, &SolverConfig::default())?;
                let ok = rows.iter().all(|r| r.matches);
                Ok(Report { records: rows.iter().map(to_value).collect(), jsonl: true, code: 0 }.with_code(ok))
            }
            VerifyCommand::Strategy { name, n, p, d, role, first, universe, integral } => {
                let s = strategy_by_name(name)?;
                let spec = match (n, p) {
                    (Some(n), None) => ArenaSpec::Cyclic { modulus: *n },
                    (None, Some(p)) => ArenaSpec::Valued { prime: *p, ramification: 1, integral: *integral },
                    _ => return Err(Error::Parse("give exactly one of --n and --p".into())),
                };
                let arena = Arena::from_spec(&spec, *d, false)?;
                certify(s.as_ref(), &arena, *role, *first, &parse_universe(universe)?)
            }
            VerifyCommand::Valued { seeds, trials } => {
                let config = ValuedSuiteConfig { seeds: seeds.clone(), trials: *trials, ..Default::default() };
                let r = valued_certification_suite(&config)?;
                let mut records: Vec<Value> = r.runs.iter().map(to_value).collect();
                records.extend(r.totals.iter().map(to_value));
                records.push(json!({ "integral_polygon_misses": r.integral_polygon_misses }));
                Ok(Report { records, jsonl: true, code: 0 }.with_code(r.all_passed()))
            }
        },
        Command::Play { .. } | Command::PlayPadic { .. } | Command::Serve { .. } => {
            Err(Error::Parse("interactive command".into()))
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let interactive = match &cli.command {
        Command::Play { n, d, engine_role, first, strategy } => Some(CreateSession {
            arena: ArenaSpec::Cyclic { modulus: *n },
            degree: *d,
            engine_role: *engine_role,
            first: *first,
            strategy: strategy.clone(),
        }),
        Command::PlayPadic { p, d, engine_role, first, integral, strategy } => Some(CreateSession {
            arena: ArenaSpec::Valued { prime: *p, ramification: 1, integral: *integral },
            degree: *d,
            engine_role: *engine_role,
            first: *first,
            strategy: strategy.clone(),
        }),
        Command::Serve { port, persist } => {
            let store = match persist {
                Some(dir) => match crate::session::Store::persistent(dir) {
                    Ok(s) => s,
                    Err(e) => {
                        let _ = writeln!(err, "error: {e}");
                        return 2;
                    }
                },
                None => crate::session::Store::new(),
            };
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            let _ = writeln!(err, "listening on 127.0.0.1:{port}");
            return match rt.block_on(crate::api::serve(Arc::new(store), *port)) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            };
        }
        _ => None,
    };
    if let Some(req) = interactive {
        return match play_loop(req, input, out) {
            Ok(s) => {
                if cli.json {
                    let _ = writeln!(out, "{}", serde_json::to_string(&s.view()).expect("serializable"));
                }
                0
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        };
    }
    match run_command(&cli.command) {
        Ok(report) => {
            let _ = out.write_all(report.render(cli.json).as_bytes());
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
