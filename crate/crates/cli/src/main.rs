//! Command-line front end: load a model (file or built-in name), run a
//! pipeline, and emit a machine-readable or human-readable report.
//!
//! Exit codes: 0 pass, 1 verdict failure, 2 invalid model, 3 I/O or
//! usage error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use opm_core::axioms::{check_sharpness, homogeneity_map};
use opm_core::embedding::{embed_outcomes, is_minimizing, verify_shift_identity};
use opm_core::entropy::{measurement_entropy, mixing_entropy};
use opm_core::linrep::build_linear_rep;
use opm_core::model::{Model, StateVec};
use opm_core::pipeline::{verify_axioms, PipelineOptions};
use opm_core::symmetry::pipeline_inner_product;
use opm_core::tol::Tolerances;
use opm_core::zoo;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "opm",
    about = "Operational probabilistic models: validation, axiom verification, embeddings, entropy",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for Monte-Carlo corroboration (mandatory for commands that
    /// sample: verify-axioms and embed on analytic-group models).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance profile (default | strict | loose); the OPM_TOL_PROFILE
    /// environment variable sets the default.
    #[arg(long, global = true)]
    tol_profile: Option<String>,
    /// Override the normalization tolerance.
    #[arg(long, global = true)]
    tol_sum: Option<f64>,
    /// Override the zero/support tolerance.
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file or built-in model.
    Validate {
        /// Path to a model file, or a built-in name
        /// (classical:n, quantum:n, spin:d, square-bit).
        model: String,
    },
    /// Run the full verification pipeline.
    VerifyAxioms { model: String },
    /// Compute the orthonormal outcome embedding and its constants.
    Embed { model: String },
    /// Measurement and mixing entropy of a state.
    Entropy {
        model: String,
        /// State as comma-separated outcome=value pairs; unspecified
        /// outcomes are completed through test sums.
        #[arg(long)]
        state: String,
    },
    /// Construct an order-automorphism sending one interior vector to
    /// another (vectors in effect coordinates, comma-separated).
    HomogeneityMap {
        model: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Evaluate the invariant family member on operator coordinates.
    Lambda { n: usize, lambda: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match resolve_tolerances(&cli) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    match run(&cli, &tol) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn resolve_tolerances(cli: &Cli) -> Result<Tolerances, String> {
    let profile = cli
        .tol_profile
        .clone()
        .or_else(|| std::env::var("OPM_TOL_PROFILE").ok());
    let mut tol = match profile {
        None => Tolerances::default(),
        Some(name) => Tolerances::profile(&name)
            .ok_or_else(|| format!("unknown tolerance profile {name:?}"))?,
    };
    if let Some(s) = cli.tol_sum {
        tol.sum = s;
    }
    if let Some(z) = cli.tol_zero {
        tol.zero = z;
    }
    Ok(tol)
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    schema_version: u32,
    command: &'static str,
    model: String,
    seed: Option<u64>,
    tolerances: Tolerances,
    result: T,
}

fn emit<T: Serialize>(cli: &Cli, report: &Report<T>, text: String) {
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("serializable report")
        ),
        Format::Text => println!("{text}"),
    }
}

fn load_model(source: &str, tol: &Tolerances) -> Result<Model, (u8, String)> {
    if source == "square-bit" || source.contains(':') {
        return zoo::by_name(source, tol).map_err(|e| (2, e.to_string()));
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| (3, format!("cannot read {source}: {e}")))?;
    opm_core::modelfile::parse_model(&text, tol).map_err(|e| (2, e.to_string()))
}

fn run(cli: &Cli, tol: &Tolerances) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Validate { model } => {
            let loaded = load_model(model, tol);
            match loaded {
                Ok(m) => {
                    let report = Report {
                        schema_version: SCHEMA_VERSION,
                        command: "validate",
                        model: model.clone(),
                        seed: cli.seed,
                        tolerances: *tol,
                        result: json!({
                            "valid": true,
                            "outcomes": m.n_outcomes(),
                            "tests": m.space.tests.len(),
                            "rank": m.space.rank,
                            "pure_states": m.pure_states.len(),
                            "kind": m.kind,
                            "has_group": m.group.is_some(),
                        }),
                    };
                    let text = format!(
                        "valid: {} outcomes, {} tests (rank {:?}), {} pure states",
                        m.n_outcomes(),
                        m.space.tests.len(),
                        m.space.rank,
                        m.pure_states.len()
                    );
                    emit(cli, &report, text);
                    Ok(ExitCode::SUCCESS)
                }
                Err((code, msg)) => {
                    let report = Report {
                        schema_version: SCHEMA_VERSION,
                        command: "validate",
                        model: model.clone(),
                        seed: cli.seed,
                        tolerances: *tol,
                        result: json!({"valid": false, "error": msg}),
                    };
                    emit(cli, &report, format!("invalid: {msg}"));
                    Ok(ExitCode::from(code))
                }
            }
        }
        Command::VerifyAxioms { model } => {
            let m = match load_model(model, tol) {
                Ok(m) => m,
                Err((code, msg)) => {
                    eprintln!("error: {msg}");
                    return Ok(ExitCode::from(code));
                }
            };
            let seed = require_seed(cli, &m)?;
            let opts = PipelineOptions {
                seed,
                ..Default::default()
            };
            let report_body = verify_axioms(&m, tol, &opts).map_err(|e| e.to_string())?;
            let ok = report_body.certificate.is_some();
            let text = {
                let mut lines = Vec::new();
                for s in &report_body.stages {
                    lines.push(format!("{:<24} {:?}", s.stage, s.status));
                }
                lines.push(format!(
                    "certificate: {}",
                    if ok {
                        "symmetric cone (self-dual + homogeneous)"
                    } else {
                        "absent"
                    }
                ));
                lines.join("\n")
            };
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: "verify-axioms",
                model: model.clone(),
                seed: cli.seed,
                tolerances: *tol,
                result: report_body,
            };
            emit(cli, &report, text);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Embed { model } => {
            let m = match load_model(model, tol) {
                Ok(m) => m,
                Err((code, msg)) => {
                    eprintln!("error: {msg}");
                    return Ok(ExitCode::from(code));
                }
            };
            let seed = require_seed(cli, &m)?;
            let rep = build_linear_rep(&m, tol).map_err(|e| e.to_string())?;
            let ip = pipeline_inner_product(&m, &rep, tol, seed).map_err(|e| e.to_string())?;
            let emb = embed_outcomes(&m, &rep, &ip, tol).map_err(|e| e.to_string())?;
            let identity = verify_shift_identity(&emb, &rep, &ip);
            let min = is_minimizing(&m, &rep, &ip, &emb, tol);
            let result = json!({
                "m": emb.m,
                "r": emb.r,
                "s": emb.s,
                "s_q": emb.s_q,
                "c": emb.c,
                "n": emb.n,
                "scale": emb.scale,
                "unit_norm_sq": emb.unit_norm_sq,
                "shift_identity_residual": identity.max_residual,
                "minimizing": min.minimizing,
            });
            let text = format!(
                "m={} r={} s={} s_q={} c={} n={} scale={}\nshift identity residual {:.3e}; minimizing: {}",
                emb.m,
                emb.r,
                emb.s,
                emb.s_q,
                emb.c,
                emb.n,
                emb.scale,
                identity.max_residual,
                min.minimizing
            );
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: "embed",
                model: model.clone(),
                seed: cli.seed,
                tolerances: *tol,
                result,
            };
            emit(cli, &report, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Entropy { model, state } => {
            let m = match load_model(model, tol) {
                Ok(m) => m,
                Err((code, msg)) => {
                    eprintln!("error: {msg}");
                    return Ok(ExitCode::from(code));
                }
            };
            let alpha = parse_state(&m, state, tol)?;
            let h = measurement_entropy(&m, &alpha, tol).map_err(|e| e.to_string())?;
            let s = mixing_entropy(&m, &alpha, tol).map_err(|e| e.to_string())?;
            let gap = (h.h - s.s).abs();
            let mono = gap < tol.entropy;
            let result = json!({
                "measurement_entropy_bits": h.h,
                "argmin": h.argmin,
                "mixing_entropy_bits": s.s,
                "decomposition": {"support": s.support, "weights": s.weights, "exact": s.exact},
                "gap": gap,
                "monoentropic": mono,
            });
            let text = format!("H={} S={} monoentropic={}", h.h, s.s, mono);
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: "entropy",
                model: model.clone(),
                seed: cli.seed,
                tolerances: *tol,
                result,
            };
            emit(cli, &report, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::HomogeneityMap { model, a, b } => {
            let m = match load_model(model, tol) {
                Ok(m) => m,
                Err((code, msg)) => {
                    eprintln!("error: {msg}");
                    return Ok(ExitCode::from(code));
                }
            };
            let seed = require_seed(cli, &m)?;
            let rep = build_linear_rep(&m, tol).map_err(|e| e.to_string())?;
            let mut ip = pipeline_inner_product(&m, &rep, tol, seed).map_err(|e| e.to_string())?;
            let emb = embed_outcomes(&m, &rep, &ip, tol).map_err(|e| e.to_string())?;
            let min = is_minimizing(&m, &rep, &ip, &emb, tol);
            ip.flags.minimizing = Some(min.minimizing);
            let sharp = check_sharpness(&m, tol).map_err(|e| e.to_string())?;
            let av = parse_vector(a, rep.dim)?;
            let bv = parse_vector(b, rep.dim)?;
            match homogeneity_map(&m, &rep, &ip, &sharp, &av, &bv, tol) {
                Ok(hm) => {
                    let result = json!({
                        "constructed": true,
                        "residual": hm.residual,
                        "scalar": hm.scalar,
                        "filter_values": hm.filter_values,
                        "condition": hm.map.condition,
                        "certificate": hm.map.certificate,
                        "matrix": matrix_rows(&hm.map.matrix),
                    });
                    let text = format!(
                        "order-automorphism constructed: residual {:.3e}, scalar {}, condition {:.3e}",
                        hm.residual, hm.scalar, hm.map.condition
                    );
                    let report = Report {
                        schema_version: SCHEMA_VERSION,
                        command: "homogeneity-map",
                        model: model.clone(),
                        seed: cli.seed,
                        tolerances: *tol,
                        result,
                    };
                    emit(cli, &report, text);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    let report = Report {
                        schema_version: SCHEMA_VERSION,
                        command: "homogeneity-map",
                        model: model.clone(),
                        seed: cli.seed,
                        tolerances: *tol,
                        result: json!({"constructed": false, "error": e.to_string()}),
                    };
                    emit(cli, &report, format!("not constructed: {e}"));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Lambda { n, lambda } => {
            let v = zoo::lambda_inner_product(*n, *lambda).map_err(|e| e.to_string())?;
            let result = json!({
                "n": v.n,
                "lambda": v.lambda,
                "positive": v.positive,
                "minimizing": v.minimizing,
                "orthogonal_pair_value": v.orthogonal_pair_value,
                "equal_pair_value": zoo::lambda_pair_value(*n, *lambda, 1.0),
            });
            let text = if v.positive {
                format!(
                    "positive: orthogonal pair value {:.4} (minimizing: {})",
                    v.orthogonal_pair_value, v.minimizing
                )
            } else {
                format!(
                    "not positive: orthogonal pair value {:.4} at an orthogonal pair",
                    v.orthogonal_pair_value
                )
            };
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: "lambda",
                model: format!("operator:{n}"),
                seed: cli.seed,
                tolerances: *tol,
                result,
            };
            emit(cli, &report, text);
            Ok(if v.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// Monte-Carlo commands need an explicit seed on models whose checks
/// sample (analytic groups); finite models default to 0.
fn require_seed(cli: &Cli, model: &Model) -> Result<u64, String> {
    let analytic = model
        .group
        .as_ref()
        .map(|g| g.is_analytic())
        .unwrap_or(false);
    match (cli.seed, analytic) {
        (Some(s), _) => Ok(s),
        (None, false) => Ok(0),
        (None, true) => {
            Err("this model corroborates invariance by Haar sampling; pass --seed".to_string())
        }
    }
}

fn parse_state(model: &Model, text: &str, tol: &Tolerances) -> Result<StateVec, String> {
    let mut partial = Vec::new();
    for part in text.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad state entry {part:?} (expected outcome=value)"))?;
        let idx = model
            .space
            .outcome_index(name.trim())
            .map_err(|e| e.to_string())?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("bad number {value:?}"))?;
        partial.push((idx, v));
    }
    StateVec::complete_from_partial(&model.space, &partial, tol).map_err(|e| e.to_string())
}

fn parse_vector(text: &str, dim: usize) -> Result<nalgebra::DVector<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {s:?}"))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != dim {
        return Err(format!(
            "vector has {} entries, the effect space has dimension {dim}",
            values.len()
        ));
    }
    Ok(nalgebra::DVector::from_vec(values))
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
