//! The `pme` command line: construct, verify, classify and protocol runs.
//!
//! Exit codes: 0 pass, 1 verified failure, 2 usage, parse or I/O error.
//! Reports are JSON with a fixed field order; only `wall_time_ms` varies
//! between identical runs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructors::{circuit_psi, circuit_xi, dimerized_bell, ghz, haar_unitary, random_state};
use crate::error::{PmeError, Result};
use crate::families4::{classify_four_qubit, family_a, family_b, psi_zero, FamilyTag, Parameter};
use crate::matrix::ComplexMatrix;
use crate::planar::{verify_ame, verify_pme, Bipartition, Partition, PartitionCheck, VerificationMode};
use crate::protocols::{
    canonical_pair, extract_transfer_unitary, qss_decode, qss_encode, qss_security, teleport_setup,
};
use crate::statefile::{parse_matrices, read_state_file, write_state_file};
use crate::statevec::{fidelity, PureState};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pme", version, about = "Planar maximally entangled states")]
struct Cli {
    /// Tolerance for every numerical check.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a state and write it to a state file.
    Construct(ConstructArgs),
    /// Check the planar (connected windows) or absolute (all subsets) property.
    Verify(VerifyArgs),
    /// Sort a four-qubit state into the known PME families.
    Classify(ClassifyArgs),
    /// Run a protocol on a PME resource.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Ghz,
    BellDimer,
    FamilyA,
    FamilyB,
    PsiZero,
    CircuitPsi,
    CircuitXi,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    kind: Kind,
    /// Site count for ghz; number of Bell pairs for bell-dimer and circuits.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Seed for Haar-random unitaries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit unitaries instead of seeded ones.
    #[arg(long)]
    unitaries: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Pme,
    Ame,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Pme)]
    mode: Mode,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ProtocolCommand {
    /// Undo the transfer unitary of a connected half and compare with the
    /// canonical maximally entangled pair.
    TeleportSetup(TeleportArgs),
    /// Encode a secret, decode it on a player window and check security.
    Qss(QssArgs),
}

#[derive(Args, Debug)]
struct TeleportArgs {
    resource: PathBuf,
    /// Comma-separated sites of one connected half, in ring order.
    #[arg(long)]
    window: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QssArgs {
    resource: PathBuf,
    /// Comma-separated recovering players, in ring order.
    #[arg(long)]
    window: String,
    #[arg(long, default_value_t = 0)]
    distributor: usize,
    /// Seed for a Haar-random secret.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit secret as `re,im;re,im;...`.
    #[arg(long, conflicts_with = "seed")]
    secret: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments and runs one command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let outcome = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a, cli.tol),
        Command::Classify(a) => classify(a, cli.tol),
        Command::Protocol(ProtocolCommand::TeleportSetup(a)) => teleport(a, cli.tol),
        Command::Protocol(ProtocolCommand::Qss(a)) => qss(a, cli.tol),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(PmeError::Input(msg.into()))
}

fn emit<R: Serialize>(report: &R, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, text)?;
    }
    Ok(())
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn parse_sites(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .or_else(|_| usage(format!("bad site {t:?} in {text:?}")))
        })
        .collect()
}

fn parse_secret(text: &str) -> Result<Vec<Complex64>> {
    text.split(';')
        .map(|pair| {
            let mut it = pair.split(',').map(|x| x.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(re)), Some(Ok(im)), None) => Ok(Complex64::new(re, im)),
                _ => usage(format!("bad secret component {pair:?}")),
            }
        })
        .collect()
}

fn unitaries(args: &ConstructArgs, count: usize, d: usize) -> Result<Vec<ComplexMatrix>> {
    match &args.unitaries {
        Some(path) => {
            let ms = parse_matrices(&fs::read_to_string(path)?)?;
            if ms.len() != count {
                return usage(format!("expected {count} matrices in {}, found {}", path.display(), ms.len()));
            }
            Ok(ms)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            Ok((0..count).map(|_| haar_unitary(d, &mut rng)).collect())
        }
    }
}

fn construct(args: &ConstructArgs) -> Result<i32> {
    let d = args.d;
    let state = match args.kind {
        Kind::Ghz => ghz(args.n.unwrap_or(3), d)?,
        Kind::BellDimer => dimerized_bell(args.n.unwrap_or(2), d)?,
        Kind::FamilyA => {
            let u2 = unitaries(args, 1, 2)?.remove(0);
            family_a(args.theta, &u2)?
        }
        Kind::FamilyB => family_b(args.phi, args.alpha, args.beta, args.gamma, args.delta),
        Kind::PsiZero => psi_zero(args.beta),
        Kind::CircuitPsi | Kind::CircuitXi => {
            let n = args.n.unwrap_or(2);
            if n == 0 {
                return usage("--n must be at least 1");
            }
            let us = unitaries(args, n - 1, d)?;
            if matches!(args.kind, Kind::CircuitPsi) {
                circuit_psi(n, d, &us)?
            } else {
                circuit_xi(n, d, &us)?
            }
        }
    };
    write_state_file(&args.out, &state)?;
    println!(
        "wrote {}: n={} d={} norm={:.16e}",
        args.out.display(),
        state.num_sites(),
        state.local_dim(),
        state.norm_sqr().sqrt()
    );
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    input: String,
    mode: VerificationMode,
    n: usize,
    d: usize,
    tolerance: f64,
    overall_pass: bool,
    max_deviation: f64,
    checks: &'a [PartitionCheck],
    wall_time_ms: f64,
}

fn verify(args: &VerifyArgs, tol: f64) -> Result<i32> {
    let t = Instant::now();
    let state = read_state_file(&args.input)?;
    let report = match args.mode {
        Mode::Pme => verify_pme(&state, tol)?,
        Mode::Ame => verify_ame(&state, tol)?,
    };
    emit(
        &VerifyReport {
            command: "verify",
            input: args.input.display().to_string(),
            mode: report.mode,
            n: state.num_sites(),
            d: state.local_dim(),
            tolerance: tol,
            overall_pass: report.overall_pass,
            max_deviation: report.max_deviation(),
            checks: &report.checks,
            wall_time_ms: elapsed_ms(t),
        },
        args.out.as_deref(),
    )?;
    Ok(if report.overall_pass { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    command: &'static str,
    input: String,
    tolerance: f64,
    class: FamilyTag,
    parameters: &'a [Parameter],
    wall_time_ms: f64,
}

fn classify(args: &ClassifyArgs, tol: f64) -> Result<i32> {
    let t = Instant::now();
    let state = read_state_file(&args.input)?;
    let class = classify_four_qubit(&state, tol)?;
    emit(
        &ClassifyReport {
            command: "classify",
            input: args.input.display().to_string(),
            tolerance: tol,
            class: class.tag,
            parameters: &class.parameters,
            wall_time_ms: elapsed_ms(t),
        },
        args.out.as_deref(),
    )?;
    Ok(if class.tag.is_pme() { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct RejectedResource {
    command: &'static str,
    protocol: &'static str,
    resource: String,
    tolerance: f64,
    pme_pass: bool,
    failing_windows: Vec<PartitionCheck>,
    wall_time_ms: f64,
}

/// Loads a resource and runs the PME check; `Err(code)` when the protocol
/// must not start.
fn load_resource(path: &Path, protocol: &'static str, tol: f64, t: Instant) -> Result<std::result::Result<PureState, i32>> {
    let state = read_state_file(path)?;
    let report = verify_pme(&state, tol)?;
    if report.overall_pass {
        return Ok(Ok(state));
    }
    emit(
        &RejectedResource {
            command: "protocol",
            protocol,
            resource: path.display().to_string(),
            tolerance: tol,
            pme_pass: false,
            failing_windows: report.failures().cloned().collect(),
            wall_time_ms: elapsed_ms(t),
        },
        None,
    )?;
    eprintln!("error: resource {} is not planar maximally entangled", path.display());
    Ok(Err(EXIT_FAIL))
}

#[derive(Serialize)]
struct TeleportReport {
    command: &'static str,
    protocol: &'static str,
    resource: String,
    tolerance: f64,
    pme_pass: bool,
    window: Vec<usize>,
    complement: Vec<usize>,
    unitarity_deviation: f64,
    fidelity: f64,
    pass: bool,
    wall_time_ms: f64,
}

fn teleport(args: &TeleportArgs, tol: f64) -> Result<i32> {
    let t = Instant::now();
    let state = match load_resource(&args.resource, "teleport-setup", tol, t)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let n = state.num_sites();
    let p = Partition::from_arc(n, &parse_sites(&args.window)?)?;
    if !p.is_balanced() {
        return usage(format!("window must hold exactly half of the {n} sites"));
    }
    let tu = extract_transfer_unitary(&state, &p)?;
    let out = teleport_setup(&state, &p)?;
    let fid = fidelity(&out, &canonical_pair(n, state.local_dim(), &p)?)?;
    let pass = fid >= 1.0 - tol;
    emit(
        &TeleportReport {
            command: "protocol",
            protocol: "teleport-setup",
            resource: args.resource.display().to_string(),
            tolerance: tol,
            pme_pass: true,
            window: p.window().to_vec(),
            complement: p.complement().to_vec(),
            unitarity_deviation: tu.unitarity_deviation(),
            fidelity: fid,
            pass,
            wall_time_ms: elapsed_ms(t),
        },
        args.out.as_deref(),
    )?;
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct QssReport {
    command: &'static str,
    protocol: &'static str,
    resource: String,
    tolerance: f64,
    pme_pass: bool,
    distributor: usize,
    secret: Vec<[f64; 2]>,
    window: Vec<usize>,
    decoding_window: Vec<usize>,
    bob: usize,
    recovered: Vec<[f64; 2]>,
    recovery_fidelity: f64,
    decode_fidelity: f64,
    bob_purity: f64,
    security: Vec<PartitionCheck>,
    pass: bool,
    wall_time_ms: f64,
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn qss(args: &QssArgs, tol: f64) -> Result<i32> {
    let t = Instant::now();
    let state = match load_resource(&args.resource, "qss", tol, t)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let d = state.local_dim();
    let secret = match &args.secret {
        Some(text) => parse_secret(text)?,
        None => random_state(1, d, &mut ChaCha8Rng::seed_from_u64(args.seed))?.into_amplitudes(),
    };
    let window = parse_sites(&args.window)?;
    let shares = qss_encode(&state, args.distributor, &secret)?;
    let rec = qss_decode(&shares, &window)?;
    let got = PureState::new(1, d, rec.recovered.clone())?;
    let want = PureState::new(1, d, secret.clone())?;
    let recovery_fidelity = fidelity(&got, &want)?;
    let security = qss_security(&shares, tol)?;
    let pass = recovery_fidelity >= 1.0 - tol && security.iter().all(|c| c.pass);
    emit(
        &QssReport {
            command: "protocol",
            protocol: "qss",
            resource: args.resource.display().to_string(),
            tolerance: tol,
            pme_pass: true,
            distributor: args.distributor,
            secret: pairs(&secret),
            window,
            decoding_window: rec.decoding_window.clone(),
            bob: rec.bob,
            recovered: pairs(&rec.recovered),
            recovery_fidelity,
            decode_fidelity: rec.fidelity,
            bob_purity: rec.purity,
            security,
            pass,
            wall_time_ms: elapsed_ms(t),
        },
        args.out.as_deref(),
    )?;
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}
