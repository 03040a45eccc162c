//! `qdsig` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration error, 2 internal invariant
//! violation, 3 sweep produced no rows.

use std::fs::File;
use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{monte_carlo_with_threads, AttackKind, AttackParams, AttackSpec, TrialStats};
use crate::bits::BitString;
use crate::protocol::{oracle_honest, run_honest, Blame};
use crate::transcript::render_pass;

/// Environment variable carrying the worker-thread hint for Monte Carlo runs.
pub const THREADS_ENV: &str = "QDS_SIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 1,
    Invariant = 2,
    SweepFailed = 3,
}

#[derive(Debug, Parser)]
#[command(name = "qdsig", version, about = "Quantum digital signature scheme simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one honest session and write its transcript.
    Run(RunArgs),
    /// Monte Carlo estimate for one attack strategy.
    Attack(AttackArgs),
    /// Cross product of position counts and strategies.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value = "honest")]
    pub attack: String,
    /// Message bits, e.g. 0110; random from the seed when omitted.
    #[arg(long)]
    pub message: Option<String>,
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Include records holding private key material.
    #[arg(long)]
    pub include_private: bool,
    /// Prefix the transcript with a generation timestamp.
    #[arg(long)]
    pub timestamps: bool,
    /// Flip Bob's first measured bit before the invariant checks.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub attack: String,
    #[arg(long)]
    pub n: usize,
    /// Hex position mask (bit j selects position j+1) or "all".
    #[arg(long, default_value = "all")]
    pub mask: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Whether Charlie asks Alice for her pair directly.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub crosscheck: bool,
    /// Substitute message bits for masked positions.
    #[arg(long)]
    pub substitute: Option<String>,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated position counts.
    #[arg(long = "n-list", alias = "ns", value_delimiter = ',', num_args = 0..)]
    pub n_list: Vec<usize>,
    /// Comma-separated strategy names.
    #[arg(long = "attack-list", alias = "attacks", value_delimiter = ',', num_args = 0..)]
    pub attack_list: Vec<String>,
    #[arg(long, default_value = "all")]
    pub mask: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub crosscheck: bool,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long)]
    pub timestamps: bool,
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub attack: AttackKind,
    pub mask: String,
    pub crosscheck: bool,
    pub out_path: String,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("--n must be at least 1".into());
        }
        if self.trials == 0 {
            return Err("--trials must be at least 1".into());
        }
        BitString::parse_mask(&self.mask, self.n).map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn spec(&self, substitute: Option<BitString>) -> Result<AttackSpec, String> {
        self.validate()?;
        let mask = BitString::parse_mask(&self.mask, self.n).map_err(|e| e.to_string())?;
        let params = AttackParams {
            substitute,
            crosscheck: self.crosscheck,
        };
        AttackSpec::new(self.attack, mask, params).map_err(|e| e.to_string())
    }
}

/// One CSV row; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub attack: String,
    pub n: usize,
    pub mask_weight: usize,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson99_low: f64,
    pub wilson99_high: f64,
    pub v1_fail: u64,
    pub v2_fail: u64,
    pub v3_fail: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "attack,n,mask_weight,trials,successes,rate,wilson99_low,wilson99_high,v1_fail,v2_fail,v3_fail,seed";

impl From<&TrialStats> for CsvRow {
    fn from(s: &TrialStats) -> Self {
        Self {
            attack: s.attack.name().to_string(),
            n: s.n,
            mask_weight: s.mask_weight,
            trials: s.trials,
            successes: s.successes,
            rate: s.success_rate,
            wilson99_low: s.wilson_99_low,
            wilson99_high: s.wilson_99_high,
            v1_fail: s.v1_fail,
            v2_fail: s.v2_fail,
            v3_fail: s.v3_fail,
            seed: s.seed,
        }
    }
}

/// Serializes rows under the fixed header.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

pub fn read_csv(text: &str) -> Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

/// Parallelism hint from [`THREADS_ENV`]; defaults to 1.
pub fn threads_from_env() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
    }
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, out_path: &str, bytes: &[u8]) -> io::Result<()> {
        if out_path == "-" {
            self.stdout.write_all(bytes)
        } else {
            File::create(out_path)?.write_all(bytes)
        }
    }

    fn config_error(&mut self, msg: impl std::fmt::Display) -> ExitCode {
        let _ = writeln!(self.stderr, "error: {msg}");
        ExitCode::Config
    }

    /// Summary goes to stdout unless stdout already carries the payload.
    fn summary(&mut self, out_path: &str) -> &mut dyn Write {
        if out_path == "-" {
            &mut *self.stderr
        } else {
            &mut *self.stdout
        }
    }
}

fn parse_bits(flag: &str, text: &str, n: usize) -> Result<BitString, String> {
    let bits: BitString = text.parse().map_err(|e| format!("{flag}: {e}"))?;
    if bits.len() != n {
        return Err(format!("{flag} has {} bits, --n is {n}", bits.len()));
    }
    Ok(bits)
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode {
    let mut io = Io { stdout, stderr };
    let attack = match args.attack.parse::<AttackKind>() {
        Ok(k) => k,
        Err(e) => return io.config_error(e),
    };
    let config = RunConfig {
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        attack,
        mask: "all".into(),
        crosscheck: true,
        out_path: args.out.clone(),
    };
    if let Err(e) = config.validate() {
        return io.config_error(e);
    }
    if config.attack != AttackKind::Honest || config.trials != 1 {
        return io.config_error("run executes a single honest session; use `attack` or `sweep`");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let message = match &args.message {
        Some(text) => match parse_bits("--message", text, config.n) {
            Ok(m) => m,
            Err(e) => return io.config_error(e),
        },
        None => BitString::random(config.n, &mut rng),
    };

    let (session, report) = match run_honest(&message, &mut rng) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(io.stderr, "invariant violation: {e}");
            return ExitCode::Invariant;
        }
    };

    let s_a_g = session.board().global_signature().expect("announced");
    let alice = session.alice().expect("signed");
    let oracle = oracle_honest(&message, &alice.a_p, &session.charlie().c_p);
    let mut violations = Vec::new();
    if !(report.bob_accepts && report.charlie_accepts && report.blamed == Blame::None) {
        violations.push("honest session was not accepted");
    }
    let mut s_b = session.bob().s_b.clone();
    if args.inject_fault {
        s_b = s_b.flipped(&BitString::from_bools((0..config.n).map(|i| i == 0)));
    }
    if (s_a_g ^ &s_b) != session.charlie().c_p {
        violations.push("S_a^G xor S_b differs from c_p");
    }
    if oracle.as_ref().ok() != Some(&(s_a_g.clone(), s_b)) {
        violations.push("simulated outcome differs from the classical oracle");
    }

    let mut text = String::new();
    if args.timestamps {
        text.push_str(&format!("# generated_unix={}\n", unix_time()));
    }
    text.push_str(&session.transcript().export(args.include_private));
    if let Err(e) = io.emit(&config.out_path, text.as_bytes()) {
        return io.config_error(format!("cannot write {}: {e}", config.out_path));
    }

    let v3 = report.v3_bits.as_deref().map(render_pass).unwrap_or_default();
    let w = io.summary(&config.out_path);
    let _ = writeln!(
        w,
        "verdict n={} bob_accepts={} charlie_accepts={} blamed={} v1={} v2={} v3={}",
        config.n,
        report.bob_accepts,
        report.charlie_accepts,
        report.blamed,
        render_pass(&report.v1_bits),
        render_pass(&report.v2_bits),
        v3
    );
    if violations.is_empty() {
        ExitCode::Success
    } else {
        for v in violations {
            let _ = writeln!(io.stderr, "invariant violation: {v}");
        }
        ExitCode::Invariant
    }
}

/// Human-readable comparison of a measured rate with the predicted one.
pub fn summary_line(spec: &AttackSpec, stats: &TrialStats) -> String {
    let expected = spec.expected_rate();
    let mut line = format!(
        "{} n={} mask_weight={} trials={} rate={} wilson99=[{:.6},{:.6}]",
        stats.attack,
        stats.n,
        stats.mask_weight,
        stats.trials,
        stats.success_rate,
        stats.wilson_99_low,
        stats.wilson_99_high
    );
    match spec.kind {
        AttackKind::AmbiguousState | AttackKind::Masquerade => {
            let verdict = if stats.contains(expected) { "inside" } else { "OUTSIDE" };
            line.push_str(&format!(
                " bound=(1/2)^{}={} {verdict} interval",
                stats.mask_weight, expected
            ));
        }
        _ => line.push_str(&format!(" expected={expected}")),
    }
    for note in spec.kind.metadata() {
        line.push_str(&format!(" [{note}]"));
    }
    let triplet_only = spec.kind == AttackKind::BobForgeMessage && !spec.params.crosscheck;
    let attacker_won = spec.kind != AttackKind::Honest && stats.successes > 0;
    if triplet_only || (attacker_won && spec.kind.outside_analyzed_strategy()) {
        line = format!("WARN {line}");
    }
    if stats.unexpected_fail > 0 {
        line.push_str(&format!(" WARN unexpected_failures={}", stats.unexpected_fail));
    }
    line
}

fn run_spec(spec: &AttackSpec, trials: u64, seed: u64, threads: usize) -> Result<TrialStats, String> {
    monte_carlo_with_threads(spec, trials, seed, threads).map_err(|e| e.to_string())
}

pub fn cmd_attack(args: &AttackArgs, threads: usize, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode {
    let mut io = Io { stdout, stderr };
    let attack = match args.attack.parse::<AttackKind>() {
        Ok(AttackKind::Honest) => return io.config_error("attack needs a strategy other than honest"),
        Ok(k) => k,
        Err(e) => return io.config_error(e),
    };
    let config = RunConfig {
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        attack,
        mask: args.mask.clone(),
        crosscheck: args.crosscheck,
        out_path: args.out.clone(),
    };
    let substitute = match args.substitute.as_deref().map(|s| parse_bits("--substitute", s, config.n)) {
        Some(Err(e)) => return io.config_error(e),
        Some(Ok(b)) => Some(b),
        None => None,
    };
    let spec = match config.spec(substitute) {
        Ok(s) => s,
        Err(e) => return io.config_error(e),
    };
    let stats = match run_spec(&spec, config.trials, config.seed, threads) {
        Ok(s) => s,
        Err(e) => return io.config_error(e),
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &[CsvRow::from(&stats)]).expect("in-memory write");
    if let Err(e) = io.emit(&config.out_path, &buf) {
        return io.config_error(format!("cannot write {}: {e}", config.out_path));
    }
    let line = summary_line(&spec, &stats);
    let _ = writeln!(io.stderr, "{line}");
    if args.timestamps {
        let _ = writeln!(io.stderr, "generated_unix={}", unix_time());
    }
    ExitCode::Success
}

pub fn cmd_sweep(args: &SweepArgs, threads: usize, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode {
    let mut io = Io { stdout, stderr };
    if args.n_list.is_empty() {
        return io.config_error("--n-list is empty");
    }
    if args.attack_list.is_empty() {
        return io.config_error("--attack-list is empty");
    }
    if args.trials == 0 {
        return io.config_error("--trials must be at least 1");
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &n in &args.n_list {
        for name in &args.attack_list {
            let cell = name
                .parse::<AttackKind>()
                .map_err(|e| e.to_string())
                .and_then(|attack| {
                    RunConfig {
                        n,
                        trials: args.trials,
                        seed: args.seed,
                        attack,
                        mask: args.mask.clone(),
                        crosscheck: args.crosscheck,
                        out_path: args.out.clone(),
                    }
                    .spec(None)
                })
                .and_then(|spec| run_spec(&spec, args.trials, args.seed, threads).map(|s| (spec, s)));
            match cell {
                Ok((spec, stats)) => {
                    notes.push(summary_line(&spec, &stats));
                    rows.push(CsvRow::from(&stats));
                }
                Err(e) => notes.push(format!("skip n={n} attack={name}: {e}")),
            }
        }
    }
    for note in &notes {
        let _ = writeln!(io.stderr, "{note}");
    }
    if rows.is_empty() {
        let _ = writeln!(io.stderr, "error: no sweep cell produced a row");
        return ExitCode::SweepFailed;
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).expect("in-memory write");
    if let Err(e) = io.emit(&args.out, &buf) {
        return io.config_error(format!("cannot write {}: {e}", args.out));
    }
    if args.timestamps {
        let _ = writeln!(io.stderr, "generated_unix={}", unix_time());
    }
    ExitCode::Success
}

/// Parses `args` (including the program name) and dispatches.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    ExitCode::Success
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    ExitCode::Config
                }
            };
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return ExitCode::Config;
        }
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a, stdout, stderr),
        Command::Attack(a) => cmd_attack(a, threads, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, threads, stdout, stderr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (ExitCode, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(
            std::iter::once("qdsig").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn run_zero_positions_is_config_error() {
        assert_eq!(run(&["run", "--n", "0"]).0, ExitCode::Config);
        assert_eq!(run(&["run", "--n", "2", "--trials", "3"]).0, ExitCode::Config);
        assert_eq!(run(&["run", "--n", "2", "--message", "011"]).0, ExitCode::Config);
        assert_eq!(run(&["bogus"]).0, ExitCode::Config);
    }

    #[test]
    fn run_transcript_hides_private_records() {
        let (code, out, err) = run(&["run", "--n", "4", "--seed", "3"]);
        assert_eq!(code, ExitCode::Success, "{err}");
        assert!(out.lines().next().unwrap().starts_with("0|Init|System|session_start|n=4"));
        assert!(!out.contains("c_p=") && !out.contains("|a=") && !out.contains("|c=") && !out.contains("a_p="));
        assert!(err.contains("bob_accepts=true charlie_accepts=true blamed=None"));
        let (_, full, _) = run(&["run", "--n", "4", "--seed", "3", "--include-private"]);
        assert!(full.contains("c_p=") && full.contains("private=true"));
    }

    #[test]
    fn attack_rejects_unknown_and_honest() {
        assert_eq!(run(&["attack", "--attack", "nope", "--n", "2"]).0, ExitCode::Config);
        assert_eq!(run(&["attack", "--attack", "honest", "--n", "2"]).0, ExitCode::Config);
        assert_eq!(
            run(&["attack", "--attack", "naive-flip", "--n", "2", "--mask", "0x0"]).0,
            ExitCode::Config
        );
        assert_eq!(
            run(&["attack", "--attack", "naive-flip", "--n", "2", "--mask", "0x4"]).0,
            ExitCode::Config
        );
    }

    #[test]
    fn attack_writes_header_and_one_row() {
        let (code, out, err) = run(&["attack", "--attack", "naive-flip", "--n", "4", "--mask", "0x1", "--trials", "200"]);
        assert_eq!(code, ExitCode::Success, "{err}");
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let rows = read_csv(&out).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].rate, 0.0);
        assert_eq!(rows[0].v1_fail, 200);
        assert_eq!((rows[0].v2_fail, rows[0].v3_fail), (0, 0));
    }

    #[test]
    fn triplet_only_forgery_is_flagged() {
        let (code, out, err) = run(&[
            "attack", "--attack", "bob-forge-message", "--crosscheck", "false", "--n", "4", "--trials", "100",
        ]);
        assert_eq!(code, ExitCode::Success);
        assert_eq!(read_csv(&out).unwrap()[0].rate, 1.0);
        assert!(err.starts_with("WARN"), "{err}");
    }

    #[test]
    fn sweep_validation_and_partial_cells() {
        assert_eq!(run(&["sweep", "--attack-list", "honest"]).0, ExitCode::Config);
        assert_eq!(run(&["sweep", "--n-list", "1,2"]).0, ExitCode::Config);
        let (code, _, err) = run(&["sweep", "--n-list", "1", "--attack-list", "bogus", "--trials", "5"]);
        assert_eq!(code, ExitCode::SweepFailed, "{err}");
        let (code, out, err) = run(&[
            "sweep", "--n-list", "1,4", "--attack-list", "naive-flip", "--mask", "0x8", "--trials", "5",
        ]);
        assert_eq!(code, ExitCode::Success);
        assert!(err.contains("skip n=1"));
        assert_eq!(read_csv(&out).unwrap().len(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let row = CsvRow {
            attack: "masquerade".into(),
            n: 3,
            mask_weight: 3,
            trials: 10,
            successes: 1,
            rate: 0.1,
            wilson99_low: 0.001_234_567_890_123,
            wilson99_high: 0.6,
            v1_fail: 0,
            v2_fail: 9,
            v3_fail: 0,
            seed: u64::MAX,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), vec![row]);
    }
}
