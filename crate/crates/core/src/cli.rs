//! The `qmc` command-line front end.
//!
//! Reports are pretty-printed JSON with sorted keys and every float rounded
//! to 12 significant digits, so identical inputs give byte-identical output.
//! Exit codes: 0 success, 1 malformed input, 2 violated precondition (not
//! bistochastic, no strict limit), 3 numerical failure or failed check.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::catalog::{self, Source};
use crate::channel::{KrausSet, ValidationReport};
use crate::diagnostics::{run_diagnostics, Diagnostics};
use crate::error::{Error, ErrorKind, Result};
use crate::io;
use crate::limits::{self, cesaro_limit_with, classify_spectrum, evolve, strict_limit_with};
use crate::linalg::ComplexMatrix;
use crate::random;
use crate::spectral::{spectrum, Tolerances};
use crate::walks::{
    empirical_time_avg, walk_limit_distribution, walk_limit_via_channel, PositionDistribution,
};

/// Environment variable overriding the default relative rank tolerance.
pub const TOL_ENV: &str = "QMC_TOL";

#[derive(Debug, Parser)]
#[command(name = "qmc", version, about = "Spectral analysis and limits of bistochastic quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the trace-preserving and unital conditions.
    Validate { channel: PathBuf },
    /// Eigenvalues, peripheral spectrum and fixed-point basis.
    Spectrum {
        channel: PathBuf,
        /// Relative rank tolerance for kernel computations.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Limiting-behaviour category 1 to 4.
    Classify { channel: PathBuf },
    /// Strict limit of Φ^t ρ(0).
    Limit {
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Cesàro limit, optionally compared with the running average at a horizon.
    Cesaro {
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_name = "T")]
        empirical: Option<usize>,
    },
    /// Distance of ρ(t) to a reference state (default: the Cesàro limit), as CSV.
    Evolve {
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_name = "T")]
        steps: usize,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write the CSV here and print a JSON summary instead.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time-averaged position distribution of a coined walk.
    Walk {
        walk: PathBuf,
        #[arg(long, value_name = "T")]
        steps: usize,
        /// Also compute the exact long-time average and the L1 gap.
        #[arg(long)]
        limit: bool,
    },
    /// Emit a built-in channel as JSON.
    Catalog {
        name: String,
        /// Parameter override, e.g. `p=0.5`. Repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the structural diagnostics; exit 0 iff every channel passes.
    Check {
        channel: Option<PathBuf>,
        /// Also check every deterministic catalog channel.
        #[arg(long)]
        catalog: bool,
        /// Also check this many seeded random unitary mixtures.
        #[arg(long, value_name = "K", default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Run `qmc` with `args` (including the program name) and return the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Malformed => 1,
        ErrorKind::Precondition => 2,
        ErrorKind::Numerical => 3,
    }
}

fn tolerances() -> Result<Tolerances> {
    let tol = Tolerances::default();
    match std::env::var(TOL_ENV) {
        Ok(s) => {
            let rank: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{TOL_ENV}={s:?} is not a number")))?;
            positive(rank, TOL_ENV)?;
            Ok(tol.with_rank(rank))
        }
        Err(_) => Ok(tol),
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {x}")))
    }
}

fn positive_steps(t: usize) -> Result<usize> {
    if t == 0 {
        Err(Error::InvalidParameter("--steps must be at least 1".into()))
    } else {
        Ok(t)
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { channel } => {
            let k = io::read_channel(&channel)?;
            let r = k.report();
            emit(
                out,
                &json!({
                    "channel": k.label(),
                    "dim": k.dim(),
                    "kraus_count": k.operators().len(),
                    "validation": validation_json(r),
                }),
            )?;
            Ok(if r.bistochastic { 0 } else { 2 })
        }
        Command::Spectrum { channel, tol } => {
            let mut t = tolerances()?;
            if let Some(rank) = tol {
                t = t.with_rank(positive(rank, "--tol")?);
            }
            let k = io::read_channel(&channel)?;
            let sd = spectrum(&k, &t)?;
            emit(
                out,
                &json!({
                    "channel": k.label(),
                    "dim": k.dim(),
                    "superoperator_convention": crate::channel::Superoperator::CONVENTION,
                    "rank_tolerance": num(t.rank),
                    "eigenvalues": sd.eigenvalues.iter().map(|z| cnum(*z)).collect::<Vec<_>>(),
                    "peripheral": peripheral_json(sd.peripheral().map(|c| (c.value, c.multiplicity))),
                    "g1": sd.g1(),
                    "fixed_space_basis": sd.fixed_space_basis.iter().map(mat).collect::<Vec<_>>(),
                }),
            )?;
            Ok(0)
        }
        Command::Classify { channel } => {
            let k = io::read_channel(&channel)?;
            let class = classify_spectrum(spectrum(&k, &tolerances()?)?);
            let expected = catalog::expected_categories(k.label());
            let claimed = expected.iter().find(|e| e.source == Source::Literature).map(|e| e.category);
            let conflict = claimed
                .filter(|c| *c != class.category)
                .map(|c| format!("literature claims {c}, spectrum gives {}", class.category));
            if let Some(note) = &conflict {
                writeln!(err, "note: {}: {note}", k.label())?;
            }
            emit(
                out,
                &json!({
                    "channel": k.label(),
                    "category": class.category.number(),
                    "description": class.category.to_string(),
                    "strict_limit_exists": class.category.has_strict_limit(),
                    "evidence": {
                        "peripheral": peripheral_json(class.evidence.peripheral().map(|c| (c.value, c.multiplicity))),
                        "peripheral_count": class.peripheral_count,
                        "g1": class.g1,
                        "max_modulus": num(class.evidence.max_modulus()),
                    },
                    "expected": expected.iter().map(|e| json!({
                        "category": e.category.number(),
                        "source": e.source.to_string(),
                    })).collect::<Vec<_>>(),
                    "conflict": conflict,
                }),
            )?;
            Ok(0)
        }
        Command::Limit { channel, state } => {
            let k = io::read_channel(&channel)?;
            let rho = io::read_state(&state)?;
            let sd = spectrum(&k, &tolerances()?)?;
            let lim = strict_limit_with(&sd, &rho)?;
            emit(out, &json!({ "channel": k.label(), "strict_limit": mat(lim.matrix()) }))?;
            Ok(0)
        }
        Command::Cesaro {
            channel,
            state,
            empirical,
        } => {
            let k = io::read_channel(&channel)?;
            let rho = io::read_state(&state)?;
            let sd = spectrum(&k, &tolerances()?)?;
            let lim = cesaro_limit_with(&sd, &rho)?;
            let mut report = json!({ "channel": k.label(), "cesaro_limit": mat(lim.matrix()) });
            if let Some(t) = empirical {
                let avg = limits::empirical_cesaro(&k, &rho, positive_steps(t)?)?;
                report["empirical"] = json!({
                    "steps": t,
                    "average": mat(avg.matrix()),
                    "distance": num(avg.distance(&lim)),
                });
            }
            emit(out, &report)?;
            Ok(0)
        }
        Command::Evolve {
            channel,
            state,
            steps,
            reference,
            csv,
        } => {
            let k = io::read_channel(&channel)?;
            let rho = io::read_state(&state)?;
            let (reference, source) = match reference {
                Some(p) => (io::read_state(&p)?, "file"),
                None => (limits::cesaro_limit(&k, &rho, &tolerances()?)?, "cesaro_limit"),
            };
            let traj = evolve(&k, &rho, positive_steps(steps)?, Some(&reference))?;
            let d = traj.distances_to_limit.expect("a reference was given");
            match csv {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display())))?;
                    write_csv(file, &d)?;
                    emit(
                        out,
                        &json!({
                            "channel": k.label(),
                            "steps": d.len(),
                            "reference": source,
                            "final_distance": num(*d.last().expect("steps >= 1")),
                            "csv": path.display().to_string(),
                        }),
                    )?;
                }
                None => write_csv(&mut *out, &d)?,
            }
            Ok(0)
        }
        Command::Walk { walk, steps, limit } => {
            let (spec, alpha0) = io::read_walk(&walk)?;
            let emp = empirical_time_avg(&spec, &alpha0, positive_steps(steps)?)?;
            let mut report = json!({
                "nodes": spec.nodes(),
                "degree": spec.degree(),
                "decoherence_p": num(spec.decoherence_p),
                "steps": steps,
                "empirical": dist(&emp),
            });
            if limit {
                let (lim, method) = if spec.is_unitary() {
                    (walk_limit_distribution(&spec, &alpha0)?, "eigenphase_projection")
                } else {
                    (walk_limit_via_channel(&spec, &alpha0, &tolerances()?)?, "cesaro_projection")
                };
                report["limit"] = dist(&lim);
                report["limit_method"] = json!(method);
                report["l1_gap"] = num(lim.l1_distance(&emp));
            }
            emit(out, &report)?;
            Ok(0)
        }
        Command::Catalog { name, params, out: path } => {
            let params = parse_params(&params)?;
            let e = catalog::entry(&name, &params)?;
            if let Some((claimed, derived)) = e.conflict() {
                writeln!(err, "note: {}: literature claims {claimed}, spectrum gives {derived}", e.name)?;
            }
            let text = io::channel_to_json(&e.channel);
            match path {
                Some(p) => std::fs::write(&p, format!("{text}\n"))
                    .map_err(|err| Error::Format(format!("cannot write {}: {err}", p.display())))?,
                None => writeln!(out, "{text}")?,
            }
            Ok(0)
        }
        Command::Check {
            channel,
            catalog: with_catalog,
            random: count,
            seed,
        } => {
            let tol = tolerances()?;
            let mut channels: Vec<KrausSet> = Vec::new();
            if let Some(p) = &channel {
                channels.push(io::read_channel(p)?);
            }
            if with_catalog {
                channels.extend(catalog::standard_entries().into_iter().map(|e| e.channel));
            }
            for i in 0..count as u64 {
                channels.push(random::fixture_mixture(seed.wrapping_add(i))?);
            }
            if channels.is_empty() {
                return Err(Error::InvalidParameter(
                    "nothing to check: give a channel file, --catalog or --random K".into(),
                ));
            }
            let reports = channels
                .iter()
                .map(|k| run_diagnostics(k, &tol))
                .collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().all(Diagnostics::passed);
            emit(
                out,
                &json!({
                    "generator": "ChaCha8",
                    "seed": seed,
                    "random_count": count,
                    "rank_tolerance": num(tol.rank),
                    "channels": reports.iter().map(diagnostics_json).collect::<Vec<_>>(),
                    "passed": passed,
                }),
            )?;
            Ok(if passed { 0 } else { 3 })
        }
    }
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    raw.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got {s:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("parameter {k} has non-numeric value {v:?}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn write_csv<W: Write>(w: W, distances: &[f64]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
    wr.write_record(["t", "distance"]).map_err(io_err)?;
    for (i, d) in distances.iter().enumerate() {
        wr.write_record([(i + 1).to_string(), round_sig(*d).to_string()])
            .map_err(io_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// `x` rounded to 12 significant digits, with `−0` mapped to `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::Null
    }
}

fn cnum(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn mat(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|z| cnum(*z)).collect()))
            .collect(),
    )
}

fn dist(p: &PositionDistribution) -> Value {
    Value::Array(p.probabilities.iter().map(|x| num(*x)).collect())
}

fn peripheral_json(it: impl Iterator<Item = (Complex64, usize)>) -> Value {
    Value::Array(
        it.map(|(v, m)| json!({ "value": cnum(v), "multiplicity": m }))
            .collect(),
    )
}

fn validation_json(r: &ValidationReport) -> Value {
    json!({
        "trace_preserving": r.trace_preserving,
        "trace_preserving_residual": num(r.trace_preserving_residual),
        "unital": r.unital,
        "unital_residual": num(r.unital_residual),
        "bistochastic": r.bistochastic,
        "effective_count": r.effective_count,
        "tol": num(r.tol),
    })
}

fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "channel": d.label,
        "dim": d.dim,
        "category": d.category.number(),
        "passed": d.passed(),
        "peripheral": peripheral_json(d.peripheral.iter().copied()),
        "g1": d.g1,
        "norm": {
            "operator_norm": num(d.norm.operator_norm),
            "max_modulus": num(d.norm.max_modulus),
            "distance_to_one": num(d.norm.distance_to_one),
            "passed": d.norm.passed,
        },
        "jordan": d.jordan.iter().map(|j| json!({
            "lambda": cnum(j.lambda),
            "m": j.m,
            "g": j.g,
            "g2": j.g2,
            "passed": j.diagonalizable_at_lambda,
        })).collect::<Vec<_>>(),
        "orthogonality": {
            "max_overlap": num(d.orthogonality.max_overlap),
            "subspaces": d.orthogonality.entries.len(),
            "passed": d.orthogonality.passed,
        },
        "fixed_space": {
            "kernel_dim": d.fixed_space.kernel_dim,
            "commutant_dim": d.fixed_space.commutant_dim,
            "distance": num(d.fixed_space.distance),
            "passed": d.fixed_space.passed,
        },
        "intertwiners": d.intertwiners.iter().map(|c| json!({
            "lambda": cnum(c.lambda),
            "candidate_dim": c.candidate_dim,
            "numerical_dim": c.numerical_dim,
            "distance": num(c.distance),
            "agrees": c.agrees,
        })).collect::<Vec<_>>(),
        "identity_mixture": {
            "applies": d.identity_mixture.result.applies,
            "p": num(d.identity_mixture.result.p),
            "only_one_peripheral": d.identity_mixture.only_one_peripheral,
        },
    })
}
