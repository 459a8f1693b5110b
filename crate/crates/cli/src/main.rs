//! Command-line front-end for the exceptional-prime / certificate pipeline.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a certificate is
//! produced but a hypothesis failed (the file is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Signed;

use shimura_core::config::Config;
use shimura_core::exceptional::{bound_constants, run_exceptional, N1Mode};
use shimura_core::field::FieldCard;
use shimura_core::gate::certify;
use shimura_core::interval::Dyadic;
use shimura_core::quadratic::{build_card, class_group, hcf_containment_check};
use shimura_core::quaternion::{find_admissible_q, splits_over_field, validate_disc};
use shimura_core::schema::{self, ConfigEcho};
use shimura_core::weil::{enumerate_fr, weil_power_check, RootChoice};
use shimura_core::CoreError;

#[derive(Parser)]
#[command(
    name = "shimura",
    version,
    about = "Exceptional prime sets, effective bounds, and rational-point certificates \
             for Shimura curves of Gamma_0(p)-type"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Default)]
struct FieldSource {
    /// Build the card for Q(sqrt(D)) with squarefree D (e.g. --quadratic -5).
    #[arg(long, allow_hyphen_values = true)]
    quadratic: Option<String>,
    /// Load a field card file instead.
    #[arg(long)]
    card: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Bound constant A1 > 1 (decimal, default 40).
    #[arg(long)]
    a1: Option<String>,
    /// Override for the height lower-bound constant delta_k.
    #[arg(long)]
    delta_k: Option<String>,
    /// Factoring work budget in abstract units.
    #[arg(long)]
    factor_budget: Option<u64>,
    /// Precision escalation cap in bits.
    #[arg(long)]
    precision_cap: Option<u32>,
    /// Default X for bounded exceptional-prime listings.
    #[arg(long)]
    list_limit: Option<u64>,
    /// Print oversized integers in full instead of digest form.
    #[arg(long)]
    full_integers: bool,
    /// Write the JSON report here (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Field invariants: discriminant, class group, units, regulator.
    Invariants {
        #[command(flatten)]
        source: FieldSource,
        /// Also write the field card to this path.
        #[arg(long)]
        emit_card: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate the Weil numbers of n and flag rational 12th/24th powers.
    Weil {
        /// The positive integer n.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exceptional prime set: membership, bounded listing, or factoring.
    Exceptional {
        #[command(flatten)]
        source: FieldSource,
        /// Decide membership of this prime exactly.
        #[arg(long)]
        test_prime: Option<String>,
        /// List all exceptional primes up to X exactly.
        #[arg(long)]
        list_upto: Option<u64>,
        /// Factor every norm value within the work budget.
        #[arg(long)]
        factor: bool,
        #[command(flatten)]
        common: Common,
    },
    /// A-priori bound constants C1, C2 and C(k, 2|d_k|^(A1 h_k)).
    Bound {
        #[command(flatten)]
        source: FieldSource,
        #[command(flatten)]
        common: Common,
    },
    /// Quaternion discriminant analysis and the admissible-q search.
    Quaternion {
        /// Quaternion discriminant d (squarefree, even number of primes).
        #[arg(long)]
        disc: String,
        #[command(flatten)]
        source: FieldSource,
        /// Scan limit for the admissible prime q.
        #[arg(long)]
        search_limit: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Full applicability certificate for (k, B).
    Certify {
        #[command(flatten)]
        source: FieldSource,
        /// Quaternion discriminant d.
        #[arg(long)]
        disc: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(serde::Deserialize, Default)]
struct ConfigFileDefaults {
    a1: Option<String>,
    delta_k: Option<String>,
    factor_budget: Option<u64>,
    precision_start_bits: Option<u32>,
    precision_cap_bits: Option<u32>,
    enumeration_cap: Option<usize>,
    list_limit: Option<u64>,
    snew_search_limit: Option<u64>,
    q_search_limit: Option<u64>,
    oversize_digits: Option<usize>,
}

/// Assembles the effective configuration: built-in defaults, then the file
/// named by SHIMURA_CONFIG, then command-line overrides.
fn effective_config(common: &Common) -> Result<Config, CoreError> {
    let mut cfg = Config::default();
    if let Ok(path) = std::env::var("SHIMURA_CONFIG") {
        let text = std::fs::read_to_string(&path)?;
        let file: ConfigFileDefaults = serde_json::from_str(&text)?;
        if let Some(a1) = file.a1 {
            cfg.a1 = Config::parse_a1(&a1)?;
        }
        if let Some(d) = file.delta_k {
            cfg.delta_override = Some(parse_delta(&d)?);
        }
        if let Some(v) = file.factor_budget {
            cfg.factor_budget = v;
        }
        if let Some(v) = file.precision_start_bits {
            cfg.precision_start_bits = v;
        }
        if let Some(v) = file.precision_cap_bits {
            cfg.precision_cap_bits = v;
        }
        if let Some(v) = file.enumeration_cap {
            cfg.enumeration_cap = v;
        }
        if let Some(v) = file.list_limit {
            cfg.list_limit = v;
        }
        if let Some(v) = file.snew_search_limit {
            cfg.snew_search_limit = v;
        }
        if let Some(v) = file.q_search_limit {
            cfg.q_search_limit = v;
        }
        if let Some(v) = file.oversize_digits {
            cfg.oversize_digits = v;
        }
    }
    if let Some(a1) = &common.a1 {
        cfg.a1 = Config::parse_a1(a1)?;
    }
    if let Some(d) = &common.delta_k {
        cfg.delta_override = Some(parse_delta(d)?);
    }
    if let Some(v) = common.factor_budget {
        cfg.factor_budget = v;
    }
    if let Some(v) = common.precision_cap {
        cfg.precision_cap_bits = v;
    }
    if let Some(v) = common.list_limit {
        cfg.list_limit = v;
    }
    cfg.full_integers = common.full_integers;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_delta(s: &str) -> Result<Dyadic, CoreError> {
    let (d, _) = Dyadic::from_decimal_str(s, false)?;
    if !d.is_positive() {
        return Err(CoreError::CardValidation("delta_k must be positive".into()));
    }
    Ok(d)
}

fn parse_bigint_arg(s: &str) -> Result<BigInt, CoreError> {
    s.trim()
        .parse()
        .map_err(|_| CoreError::CardValidation(format!("not an integer: {s:?}")))
}

fn load_field(source: &FieldSource, cfg: &Config) -> Result<FieldCard, CoreError> {
    match (&source.quadratic, &source.card) {
        (Some(d), None) => build_card(&parse_bigint_arg(d)?, cfg),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let file: schema::CardFile = serde_json::from_str(&text)?;
            schema::card_from_file(&file)
        }
        (None, None) => Err(CoreError::CardValidation(
            "a field source is required: --quadratic D or --card PATH".into(),
        )),
        (Some(_), Some(_)) => Err(CoreError::CardValidation(
            "exactly one field source allowed: --quadratic or --card".into(),
        )),
    }
}

fn emit<T: serde::Serialize>(value: &T, output: &Option<PathBuf>) -> Result<(), CoreError> {
    let json = schema::to_json_string(value)?;
    match output {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CoreError> {
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    match cli.cmd {
        Command::Invariants { source, emit_card, common } => {
            let cfg = effective_config(&common)?;
            let card = load_field(&source, &cfg)?;
            let group = class_group(&card)?;
            let generators = group
                .generators(&card)?
                .into_iter()
                .map(|(idx, ord)| schema::GeneratorDto {
                    label: group.label(idx),
                    order: ord.to_string(),
                })
                .collect();
            let report = schema::InvariantsReportFile {
                schema: schema::INVARIANTS_SCHEMA.to_string(),
                config: ConfigEcho::of(&cfg),
                field: schema::FieldSummaryDto::of(&card),
                basis_symbols: card.basis_symbols.clone(),
                torsion_order: card.torsion_order,
                fundamental_units: card
                    .fundamental_units
                    .iter()
                    .map(|u| u.coords.iter().map(|c| c.to_string()).collect())
                    .collect(),
                class_group: schema::ClassGroupDto {
                    order: group.order().to_string(),
                    generators,
                },
                hcf_containment: hcf_containment_check(&card),
            };
            if let Some(path) = emit_card {
                let file = schema::card_to_file(&card);
                write_text(&path, &schema::to_json_string(&file)?)?;
            }
            emit(&report, &common.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Weil { n, common } => {
            let cfg = effective_config(&common)?;
            let n = parse_bigint_arg(&n)?;
            if !n.is_positive() {
                return Err(CoreError::CardValidation("n must be positive".into()));
            }
            let entries: Vec<schema::WeilEntryDto> = enumerate_fr(&n)
                .iter()
                .map(|w| {
                    let check = weil_power_check(w);
                    schema::WeilEntryDto {
                        a: w.a.to_string(),
                        n: w.n.to_string(),
                        root: match w.root_choice {
                            RootChoice::Upper => "upper".to_string(),
                            RootChoice::Lower => "lower".to_string(),
                        },
                        is_double_root: w.is_double_root(),
                        beta12: check.beta12.map(|v| v.to_string()),
                        beta24: check.beta24.map(|v| v.to_string()),
                    }
                })
                .collect();
            let report = schema::WeilReportFile {
                schema: schema::WEIL_SCHEMA.to_string(),
                config: ConfigEcho::of(&cfg),
                n: n.to_string(),
                count: entries.len(),
                entries,
            };
            emit(&report, &common.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exceptional { source, test_prime, list_upto, factor, common } => {
            let cfg = effective_config(&common)?;
            let card = load_field(&source, &cfg)?;
            let mode = match (&test_prime, list_upto, factor) {
                (Some(p), None, false) => N1Mode::Membership(parse_bigint_arg(p)?),
                (None, Some(x), false) => N1Mode::ListUpTo(x),
                (None, None, true) => N1Mode::BestEffortFactor,
                (None, None, false) => N1Mode::ListUpTo(cfg.list_limit),
                _ => {
                    return Err(CoreError::CardValidation(
                        "choose at most one of --test-prime, --list-upto, --factor".into(),
                    ))
                }
            };
            let report = run_exceptional(&card, &mode, &cfg)?;
            let file = schema::report_to_file(&report, &card, &cfg)?;
            emit(&file, &common.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { source, common } => {
            let cfg = effective_config(&common)?;
            let card = load_field(&source, &cfg)?;
            let constants = bound_constants(&card, &cfg)?;
            let report = schema::BoundReportFile {
                schema: schema::BOUND_SCHEMA.to_string(),
                config: ConfigEcho::of(&cfg),
                field: schema::FieldSummaryDto::of(&card),
                constants: schema::BoundConstantsDto::of(&constants, &cfg)?,
            };
            emit(&report, &common.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Quaternion { disc, source, search_limit, common } => {
            let cfg = effective_config(&common)?;
            let d = validate_disc(&parse_bigint_arg(&disc)?)?;
            let (dd, ram) = schema::quaternion_disc_dto(&d);
            let mut report = schema::QuaternionReportFile {
                schema: schema::QUATERNION_SCHEMA.to_string(),
                config: ConfigEcho::of(&cfg),
                discriminant: dd,
                ramified_primes: ram,
                field: None,
                splits_over_k: None,
                admissible_q: None,
            };
            if source.quadratic.is_some() || source.card.is_some() {
                let card = load_field(&source, &cfg)?;
                report.field = Some(schema::FieldSummaryDto::of(&card));
                report.splits_over_k = Some(splits_over_field(&d, &card)?);
                let limit = search_limit.unwrap_or(cfg.q_search_limit);
                let found = find_admissible_q(&d, &card, limit)?;
                report.admissible_q = Some(schema::AdmissibleQDto {
                    q: found.q.to_string(),
                    threshold: found.threshold.to_string(),
                    rejected: found
                        .rejected
                        .iter()
                        .map(|r| schema::RejectedQDto {
                            q: r.q.to_string(),
                            splits_in_k: r.splits_in_k,
                            quaternion_splits: r.quaternion_splits,
                        })
                        .collect(),
                });
            }
            emit(&report, &common.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { source, disc, common } => {
            let cfg = effective_config(&common)?;
            let card = load_field(&source, &cfg)?;
            let d = validate_disc(&parse_bigint_arg(&disc)?)?;
            let cert = certify(&card, &d, &cfg)?;
            let file = schema::certificate_to_file(&cert, &card, &cfg)?;
            match &common.output {
                Some(path) => {
                    write_text(path, &schema::to_json_string(&file)?)?;
                    println!("{cert}");
                }
                None => {
                    println!("{cert}");
                }
            }
            if cert.in_force() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}
