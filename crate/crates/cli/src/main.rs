use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ltob_core::error::{Error, Result};
use ltob_core::exact_oracle::{self, DenseWindow, DEFAULT_EDGE_CAP};
use ltob_core::fusion_ring::{self, FusionRing, BUILTIN_RINGS};
use ltob_core::k_theory::{self, StationaryAfData};
use ltob_core::number::{Precision, Real};
use ltob_core::path_net::{PathNet, DEFAULT_CAP};
use ltob_core::toric_pauli::{
    boundary_algebra, boundary_channel, fusion_net_iso, pauli_reduce, reduction, BoundaryKind, Region, Window,
};
use ltob_core::type_classifier::{self, classify_type};

#[derive(Parser)]
#[command(name = "ltob", version, about = "Boundary algebras, boundary states and type classification")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Config {
    /// Decimal digits for non-exact arithmetic.
    #[arg(long, global = true, default_value_t = 50)]
    precision: u32,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Built-in ring name or path to a ring document.
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Input document (ring, operator) for commands that take one.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// Path-net level.
    #[arg(long, global = true)]
    level: Option<usize>,
    /// Interval size `n + 1` for boundary algebras.
    #[arg(long, global = true)]
    sites: Option<usize>,
    /// Enclosing region `Δ` as "rect x0 y0 x1 y1 [kinds]".
    #[arg(long, global = true)]
    window: Option<String>,
    /// Search bound for integer witnesses.
    #[arg(long, global = true)]
    bound: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a fusion ring.
    Ring {
        #[arg(value_enum, default_value_t = RingAction::Validate)]
        action: RingAction,
    },
    /// Classify the boundary factor type; without --ring, all built-ins.
    Classify,
    /// Evaluate states on a path-net operator, or run sweeps.
    State {
        #[arg(value_enum)]
        action: StateAction,
    },
    /// Toric Code reductions and boundary algebras.
    Toric {
        #[arg(value_enum)]
        action: ToricAction,
        /// Region `Λ` for `reduce`.
        #[arg(long)]
        lambda: Option<String>,
        /// Boundary kind for boundary-dim and iso-verify.
        #[arg(long, value_enum, default_value_t = Kind::Rough)]
        kind: Kind,
        /// Monomial for `reduce`, like "i^1 X@(3,4,e) Z@(2,2,n)".
        monomial: Option<String>,
    },
    /// Dimension groups of the stationary boundary AF algebras.
    K0 {
        #[arg(value_enum, default_value_t = K0Action::Report)]
        action: K0Action,
        /// Use the two-sided coarse matrix instead of the one-sided one.
        #[arg(long)]
        two_sided: bool,
        /// Integer vector for `pairing`, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RingAction {
    Validate,
    Dims,
    Pointed,
    Triples,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StateAction {
    Canonical,
    Markov,
    Unit,
    RegularQ,
    KmsCheck,
    TraceCheck,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ToricAction {
    Reduce,
    BoundaryDim,
    IsoVerify,
    LtoVerify,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Rough,
    Smooth,
}

impl From<Kind> for BoundaryKind {
    fn from(k: Kind) -> BoundaryKind {
        match k {
            Kind::Rough => BoundaryKind::Rough,
            Kind::Smooth => BoundaryKind::Smooth,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum K0Action {
    Sequence,
    Pairing,
    Infinitesimal,
    Uhf,
    Report,
}

/// Text for humans plus the JSON result.
struct Output {
    text: String,
    json: Value,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn precision(config: &Config) -> Result<Precision> {
    Precision::new(config.precision)
        .ok_or_else(|| Error::Invalid(format!("precision {} is outside 8..=10000 digits", config.precision)))
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_ring(config: &Config, allow_file: bool) -> Result<FusionRing> {
    let p = precision(config)?;
    let ring = match (&config.ring, &config.file) {
        (Some(name), _) if BUILTIN_RINGS.contains(&name.as_str()) => FusionRing::builtin(name)?,
        (Some(path), _) => {
            let path = PathBuf::from(path);
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            FusionRing::from_document(&read(&path)?)?.with_name(name)
        }
        (None, Some(path)) if allow_file => {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            FusionRing::from_document(&read(path)?)?.with_name(name)
        }
        _ => {
            return Err(Error::Invalid(format!(
                "no ring given; use --ring with one of {} or a file path",
                BUILTIN_RINGS.join(", ")
            )))
        }
    };
    ring.with_dimensions(p)
}

fn cmd_ring(config: &Config, action: RingAction) -> Result<Output> {
    let ring = load_ring(config, true)?;
    let digits = precision(config)?.digits();
    let dims = ring.dims()?;
    Ok(match action {
        RingAction::Validate => Output {
            text: format!("{}valid", fusion_ring::describe(&ring)),
            json: json!({ "ring": ring.name(), "valid": true, "simples": ring.simples(),
                          "document": serde_json::from_str::<Value>(&ring.to_document()).expect("document is JSON") }),
        },
        RingAction::Dims => {
            let values: Vec<String> = dims.values().iter().map(|d| d.to_decimal_string(digits)).collect();
            let global = fusion_ring::global_dimension(&ring)?.to_decimal_string(digits);
            let text = (0..ring.rank())
                .map(|a| format!("d({}) = {}", ring.label(a), values[a]))
                .chain(std::iter::once(format!("D = {global}")))
                .collect::<Vec<_>>()
                .join("\n");
            Output {
                text,
                json: json!({ "ring": ring.name(), "dims": values, "global_dimension": global,
                              "integral": dims.is_integral(), "weakly_integral": dims.is_weakly_integral() }),
            }
        }
        RingAction::Pointed => Output {
            text: format!("pointed={}", ring.is_pointed()),
            json: json!({ "ring": ring.name(), "pointed": ring.is_pointed() }),
        },
        RingAction::Triples => {
            let triples: Vec<[String; 3]> = ring
                .admissible_triples()
                .into_iter()
                .map(|(a, b, c)| [ring.label(a).to_string(), ring.label(b).to_string(), ring.label(c).to_string()])
                .collect();
            let text = triples.iter().map(|t| format!("{} ⊗ {} → {}", t[0], t[1], t[2])).collect::<Vec<_>>().join("\n");
            Output { text, json: json!({ "ring": ring.name(), "triples": triples }) }
        }
    })
}

fn cmd_classify(config: &Config) -> Result<Output> {
    let digits = precision(config)?.digits();
    let rings: Vec<FusionRing> = if config.ring.is_some() || config.file.is_some() {
        vec![load_ring(config, true)?]
    } else {
        let p = precision(config)?;
        BUILTIN_RINGS
            .iter()
            .map(|n| FusionRing::builtin(n)?.with_dimensions(p))
            .collect::<Result<_>>()?
    };
    let single = rings.len() == 1;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for ring in &rings {
        let label = classify_type(ring)?;
        lines.push(if single { label.to_string() } else { format!("{:<8} {label}", ring.name()) });
        reports.push(to_value(&type_classifier::type_report(ring, &label, digits)));
    }
    let json = if single { reports.remove(0) } else { Value::Array(reports) };
    Ok(Output { text: lines.join("\n"), json })
}

fn cmd_state(config: &Config, action: StateAction) -> Result<Output> {
    let ring = Arc::new(load_ring(config, false)?);
    let digits = precision(config)?.digits();
    let net = PathNet::regular(ring.clone())?;
    let level = config.level.unwrap_or(2);
    if level > DEFAULT_CAP.max(net.cap()) {
        return Err(Error::Resource(format!("level {level} exceeds the cap {}", net.cap())));
    }
    match action {
        StateAction::KmsCheck => {
            let d = net.kms_sweep(level, &Real::one())?;
            let s = d.to_decimal_string(digits);
            Ok(Output {
                text: format!("kms defect (beta=1, level {level}) = {s}"),
                json: json!({ "ring": ring.name(), "level": level, "beta": "1", "max_defect": s }),
            })
        }
        StateAction::TraceCheck => {
            let d = net.traciality_defect(level)?;
            let s = d.to_decimal_string(digits);
            Ok(Output {
                text: format!("traciality defect (level {level}) = {s}"),
                json: json!({ "ring": ring.name(), "level": level, "max_defect": s }),
            })
        }
        _ => {
            let op = match &config.file {
                Some(path) => net.operator_from_json(&read(path)?)?,
                None => net.identity(level)?,
            };
            let (name, v) = match action {
                StateAction::Canonical => ("canonical", net.canonical_state(&op)?),
                StateAction::Markov => ("markov", net.markov_trace(&op)?),
                StateAction::Unit => ("unit", net.unit_state(&op)?),
                _ => ("regular_q", net.regular_q_state(&op)?),
            };
            let (re, im) = (v.re.to_decimal_string(digits), v.im.to_decimal_string(digits));
            Ok(Output {
                text: format!("{name} = {v}"),
                json: json!({ "ring": ring.name(), "state": name, "level": op.level(), "re": re, "im": im }),
            })
        }
    }
}

fn parse_region(text: &Option<String>, what: &str) -> Result<Region> {
    let t = text.as_deref().ok_or_else(|| Error::Invalid(format!("{what} is required")))?;
    Region::parse(t)
}

/// Every admissible window pair under the edge cap, plus the ground-space
/// count of a small rough window.
fn oracle_suite(seed: u64) -> Result<Value> {
    let sweep = exact_oracle::verify_all_windows(DEFAULT_EDGE_CAP, seed)?;
    let ground = exact_oracle::ground_space(&DenseWindow::new(Region::parse("rect 0 0 1 1 rough")?, DEFAULT_EDGE_CAP)?)?;
    let passed = sweep.passed() && ground.ground_dim == 1 << (ground.dangling - 1);
    Ok(json!({ "passed": passed, "sweep": to_value(&sweep), "ground_space": to_value(&ground) }))
}

fn cmd_toric(config: &Config, action: ToricAction, lambda: &Option<String>, kind: Kind, monomial: &Option<String>) -> Result<Output> {
    match action {
        ToricAction::BoundaryDim => {
            let r = boundary_algebra(config.sites.unwrap_or(3), kind.into())?;
            Ok(Output { text: r.to_string(), json: to_value(&r) })
        }
        ToricAction::IsoVerify => {
            let r = fusion_net_iso(config.sites.unwrap_or(3), kind.into())?;
            let text = format!(
                "verified={} image={} ambient={} pauli_pairs={} path_net_pairs={} mismatches={}",
                r.verified(),
                r.image_dimension,
                r.ambient_dimension,
                r.pauli_pairs_checked,
                r.path_net_pairs_checked,
                r.pauli_mismatches + r.path_net_mismatches + r.markov_mismatches
            );
            Ok(Output { text, json: to_value(&r) })
        }
        ToricAction::Reduce => {
            let delta = parse_region(&config.window, "--window")?;
            let lambda = parse_region(lambda, "--lambda")?;
            let window = Window::new(delta);
            let text = monomial.as_deref().ok_or_else(|| Error::Invalid("a monomial is required".into()))?;
            let p = window.parse_monomial(text)?;
            let outcome = pauli_reduce(&p, &lambda, &delta, &window)?;
            let report = reduction::reduce_report(&p, &outcome, &window);
            let channel = boundary_channel(&[(ltob_core::number::Complex::one(), p)], &lambda, &delta, &window)?;
            let channel_text = match &channel {
                reduction::Channel::Scalar(c) => c.to_string(),
                reduction::Channel::Boundary(_, e) => e.to_string(),
            };
            let line = match &outcome {
                ltob_core::toric_pauli::ReduceOutcome::Reduced(r) => format!("reduced {r}; E(x) = {channel_text}"),
                ltob_core::toric_pauli::ReduceOutcome::NotCommuting(s) => format!("not commuting with {s}; E(x) = 0"),
            };
            let mut json = to_value(&report);
            json["channel"] = Value::String(channel_text);
            Ok(Output { text: line, json })
        }
        ToricAction::LtoVerify => {
            let suite = oracle_suite(config.seed)?;
            let sw = &suite["sweep"];
            let text = format!(
                "lto verification passed={} windows={} surrounded={} shared={} failures={}",
                suite["passed"],
                sw["windows"],
                sw["surrounded_pairs"],
                sw["shared_pairs"],
                sw["failures"].as_array().map_or(0, Vec::len)
            );
            Ok(Output { text, json: suite })
        }
    }
}

fn cmd_k0(config: &Config, action: K0Action, two_sided: bool, vector: &Option<String>) -> Result<Output> {
    let ring = load_ring(config, true)?;
    let digits = precision(config)?.digits();
    let data = if two_sided { StationaryAfData::two_sided(&ring)? } else { StationaryAfData::one_sided(&ring)? };
    let bound = config.bound.unwrap_or(2);
    match action {
        K0Action::Sequence => {
            let n = config.level.unwrap_or(5);
            let seq = k_theory::dimension_sequence(&data, n)?;
            let rows: Vec<Vec<String>> = seq.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect();
            let text = rows.iter().enumerate().map(|(i, r)| format!("{i}: [{}]", r.join(", "))).collect::<Vec<_>>().join("\n");
            Ok(Output { text, json: json!({ "ring": ring.name(), "sequence": rows }) })
        }
        K0Action::Pairing => {
            let text = vector.as_deref().ok_or_else(|| Error::Invalid("--vector is required".into()))?;
            let v: Vec<i64> = text
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))))
                .collect::<Result<_>>()?;
            let t = k_theory::trace_pairing(&data, &v)?.to_decimal_string(digits);
            Ok(Output { text: format!("tau·v = {t}"), json: json!({ "ring": ring.name(), "vector": v, "pairing": t }) })
        }
        K0Action::Infinitesimal => {
            let r = k_theory::find_infinitesimal(&data, bound)?;
            let text = match &r {
                k_theory::Infinitesimal::Witness { vector, certificate } => {
                    format!("witness {vector:?} ({})", to_value(certificate)["kind"].as_str().unwrap_or(""))
                }
                k_theory::Infinitesimal::None { steps } => format!("none (kernel killed in {steps} steps)"),
            };
            Ok(Output { text, json: to_value(&r) })
        }
        K0Action::Uhf => {
            let r = k_theory::uhf_report(&data);
            let text = match &r {
                k_theory::UhfReport::Uhf { name, q, .. } => format!("{name} (q={q} per level)"),
                k_theory::UhfReport::NotRankOne { rank } => format!("not rank-1 (rank {rank})"),
            };
            Ok(Output { text, json: to_value(&r) })
        }
        K0Action::Report => {
            let r = k_theory::k0_report(&data, bound, digits)?;
            let json = to_value(&r);
            Ok(Output { text: serde_json::to_string_pretty(&json).expect("json"), json })
        }
    }
}

fn run(cli: &Cli) -> Result<(&'static str, Output)> {
    let c = &cli.config;
    Ok(match &cli.command {
        Command::Ring { action } => ("ring", cmd_ring(c, *action)?),
        Command::Classify => ("classify", cmd_classify(c)?),
        Command::State { action } => ("state", cmd_state(c, *action)?),
        Command::Toric { action, lambda, kind, monomial } => ("toric", cmd_toric(c, *action, lambda, *kind, monomial)?),
        Command::K0 { action, two_sided, vector } => ("k0", cmd_k0(c, *action, *two_sided, vector)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((command, out)) => {
            if cli.config.json {
                let doc = json!({ "command": command, "config": to_value(&cli.config), "result": out.json });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
