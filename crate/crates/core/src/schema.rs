//! Versioned JSON file formats: field cards, pipeline reports, and
//! certificates.
//!
//! Every arithmetic value serializes as a decimal string (never a float);
//! certified intervals serialize as exact midpoint/radius decimal strings of
//! dyadic numbers, so emitted files re-parse to identical values. Integers
//! above the configured digit threshold are replaced by their digit count,
//! leading/trailing digits, and a SHA-256 digest of the full decimal string
//! unless full output is forced.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::exceptional::{
    BoundConstants, CertifiedMagnitude, EntryFactorization, ExceptionalReport, ListedPrime,
    M2Entry, MembershipVerdict, N1Outcome, SplitPrimeDatum, UnresolvedCofactor,
};
use crate::field::{EmbeddingPlace, FieldCard, PlaceKind, RingElement, SubfieldSqrt};
use crate::gate::{Certificate, ExcludedPrime, HypothesisEntry, HypothesisStatus};
use crate::interval::{Dyadic, Interval};
use crate::quadratic::QuadIdeal;
use crate::quaternion::QuaternionDisc;
use crate::weil::RootChoice;
use crate::{CoreError, Result};

pub const CARD_SCHEMA: &str = "fieldcard/1";
pub const REPORT_SCHEMA: &str = "exceptional-report/1";
pub const CERTIFICATE_SCHEMA: &str = "certificate/1";
pub const WEIL_SCHEMA: &str = "weil-report/1";
pub const INVARIANTS_SCHEMA: &str = "invariants-report/1";
pub const BOUND_SCHEMA: &str = "bound-report/1";
pub const QUATERNION_SCHEMA: &str = "quaternion-report/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IntervalDto {
    pub mid: String,
    pub rad: String,
}

impl IntervalDto {
    pub fn of(i: &Interval) -> Self {
        let (mid, rad) = i.to_decimal_pair();
        IntervalDto { mid, rad }
    }

    pub fn parse(&self) -> Result<Interval> {
        Interval::from_decimal_pair(&self.mid, &self.rad)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: IntervalDto,
    pub im: IntervalDto,
}

/// An integer, possibly abbreviated when oversized.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntDto {
    Plain(String),
    Oversize {
        digits: u64,
        leading_digits: String,
        trailing_digits: String,
        sha256: String,
    },
}

impl IntDto {
    pub fn of(n: &BigInt, cfg: &Config) -> Self {
        let s = n.to_string();
        let digit_count = s.trim_start_matches('-').len();
        if cfg.full_integers || digit_count <= cfg.oversize_digits {
            return IntDto::Plain(s);
        }
        let mut hasher = Sha256::new();
        hasher.update(s.as_bytes());
        let body = s.trim_start_matches('-');
        let sign = if s.starts_with('-') { "-" } else { "" };
        IntDto::Oversize {
            digits: digit_count as u64,
            leading_digits: format!("{sign}{}", &body[..50.min(body.len())]),
            trailing_digits: body[body.len().saturating_sub(50)..].to_string(),
            sha256: hex_string(&hasher.finalize()),
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// The effective configuration echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub a1: String,
    pub delta_override: Option<String>,
    pub factor_budget: u64,
    pub precision_start_bits: u32,
    pub precision_cap_bits: u32,
    pub enumeration_cap: usize,
    pub list_limit: u64,
    pub snew_search_limit: u64,
    pub q_search_limit: u64,
    pub oversize_digits: usize,
    pub full_integers: bool,
}

impl ConfigEcho {
    pub fn of(cfg: &Config) -> Self {
        ConfigEcho {
            a1: ratio_string(&cfg.a1),
            delta_override: cfg.delta_override.as_ref().map(|d| d.to_decimal_string()),
            factor_budget: cfg.factor_budget,
            precision_start_bits: cfg.precision_start_bits,
            precision_cap_bits: cfg.precision_cap_bits,
            enumeration_cap: cfg.enumeration_cap,
            list_limit: cfg.list_limit,
            snew_search_limit: cfg.snew_search_limit,
            q_search_limit: cfg.q_search_limit,
            oversize_digits: cfg.oversize_digits,
            full_integers: cfg.full_integers,
        }
    }
}

fn ratio_string(r: &num_rational::Ratio<BigInt>) -> String {
    if r.denom().to_u64() == Some(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Field card files.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingDto {
    pub kind: String,
    pub basis_values: Vec<ComplexDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubfieldDto {
    pub disc: String,
    pub sqrt_coords: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CardFile {
    pub schema: String,
    pub degree: usize,
    pub discriminant: String,
    pub class_number: String,
    pub unit_rank: usize,
    pub regulator: IntervalDto,
    pub ramified_primes: Vec<String>,
    pub basis_symbols: Vec<String>,
    pub basis_denominator: String,
    pub multiplication_table: Vec<Vec<Vec<String>>>,
    pub galois_matrices: Vec<Vec<Vec<String>>>,
    pub embeddings: Vec<EmbeddingDto>,
    pub distinguished_embedding: usize,
    pub fundamental_units: Vec<Vec<String>>,
    pub torsion_order: u32,
    pub delta_k: String,
    pub is_galois_asserted: bool,
    pub hcf_free_asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quadratic_d: Option<String>,
    #[serde(default)]
    pub imag_quadratic_subfields: Vec<SubfieldDto>,
}

fn bigints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| CoreError::CardValidation(format!("bad integer: {s:?}")))
}

fn parse_bigints(v: &[String]) -> Result<Vec<BigInt>> {
    v.iter().map(|s| parse_bigint(s)).collect()
}

pub fn card_to_file(card: &FieldCard) -> CardFile {
    CardFile {
        schema: CARD_SCHEMA.to_string(),
        degree: card.degree,
        discriminant: card.discriminant.to_string(),
        class_number: card.class_number.to_string(),
        unit_rank: card.unit_rank,
        regulator: IntervalDto::of(&card.regulator),
        ramified_primes: bigints(&card.ramified_primes),
        basis_symbols: card.basis_symbols.clone(),
        basis_denominator: "1".to_string(),
        multiplication_table: card
            .mult_table
            .iter()
            .map(|row| row.iter().map(|c| bigints(c)).collect())
            .collect(),
        galois_matrices: card
            .galois_matrices
            .iter()
            .map(|m| m.iter().map(|r| bigints(r)).collect())
            .collect(),
        embeddings: card
            .embeddings
            .iter()
            .map(|p| EmbeddingDto {
                kind: match p.kind {
                    PlaceKind::Real => "real".to_string(),
                    PlaceKind::Complex => "complex".to_string(),
                },
                basis_values: p
                    .basis_values
                    .iter()
                    .map(|c| ComplexDto { re: IntervalDto::of(&c.re), im: IntervalDto::of(&c.im) })
                    .collect(),
            })
            .collect(),
        distinguished_embedding: card.distinguished_embedding,
        fundamental_units: card.fundamental_units.iter().map(|u| bigints(&u.coords)).collect(),
        torsion_order: card.torsion_order,
        delta_k: card.delta_k.to_decimal_string(),
        is_galois_asserted: card.is_galois_asserted,
        hcf_free_asserted: card.hcf_free_asserted,
        quadratic_d: card.quadratic_d.as_ref().map(|d| d.to_string()),
        imag_quadratic_subfields: card
            .imag_quadratic_subfields
            .iter()
            .map(|s| SubfieldDto {
                disc: s.disc.to_string(),
                sqrt_coords: bigints(&s.sqrt_coords.coords),
            })
            .collect(),
    }
}

pub fn card_from_file(file: &CardFile) -> Result<FieldCard> {
    if file.schema != CARD_SCHEMA {
        return Err(CoreError::CardValidation(format!(
            "unsupported card schema {:?} (expected {CARD_SCHEMA:?})",
            file.schema
        )));
    }
    if file.basis_denominator.trim() != "1" {
        return Err(CoreError::CardValidation(
            "this build only accepts basis denominator 1 (use the true integral basis)".into(),
        ));
    }
    let embeddings = file
        .embeddings
        .iter()
        .map(|e| {
            let kind = match e.kind.as_str() {
                "real" => PlaceKind::Real,
                "complex" => PlaceKind::Complex,
                other => {
                    return Err(CoreError::CardValidation(format!("bad place kind {other:?}")))
                }
            };
            let basis_values = e
                .basis_values
                .iter()
                .map(|c| {
                    Ok(crate::interval::ComplexInterval::new(c.re.parse()?, c.im.parse()?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EmbeddingPlace { kind, basis_values })
        })
        .collect::<Result<Vec<_>>>()?;
    let card = FieldCard {
        degree: file.degree,
        discriminant: parse_bigint(&file.discriminant)?,
        class_number: file
            .class_number
            .parse()
            .map_err(|_| CoreError::CardValidation("bad class number".into()))?,
        unit_rank: file.unit_rank,
        regulator: file.regulator.parse()?,
        ramified_primes: parse_bigints(&file.ramified_primes)?,
        basis_symbols: file.basis_symbols.clone(),
        mult_table: file
            .multiplication_table
            .iter()
            .map(|row| row.iter().map(|c| parse_bigints(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
        galois_matrices: file
            .galois_matrices
            .iter()
            .map(|m| m.iter().map(|r| parse_bigints(r)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
        embeddings,
        distinguished_embedding: file.distinguished_embedding,
        fundamental_units: file
            .fundamental_units
            .iter()
            .map(|u| Ok(RingElement::new(parse_bigints(u)?)))
            .collect::<Result<Vec<_>>>()?,
        torsion_order: file.torsion_order,
        delta_k: Dyadic::from_decimal_str(&file.delta_k, false)?.0,
        is_galois_asserted: file.is_galois_asserted,
        hcf_free_asserted: file.hcf_free_asserted,
        quadratic_d: file.quadratic_d.as_ref().map(|s| parse_bigint(s)).transpose()?,
        imag_quadratic_subfields: file
            .imag_quadratic_subfields
            .iter()
            .map(|s| {
                Ok(SubfieldSqrt {
                    disc: parse_bigint(&s.disc)?,
                    sqrt_coords: RingElement::new(parse_bigints(&s.sqrt_coords)?),
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    card.validate()?;
    Ok(card)
}

// ---------------------------------------------------------------------------
// Report files.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSummaryDto {
    pub degree: usize,
    pub discriminant: String,
    pub class_number: String,
    pub unit_rank: usize,
    pub regulator: IntervalDto,
    pub ramified_primes: Vec<String>,
    pub delta_k: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quadratic_d: Option<String>,
}

impl FieldSummaryDto {
    pub fn of(card: &FieldCard) -> Self {
        FieldSummaryDto {
            degree: card.degree,
            discriminant: card.discriminant.to_string(),
            class_number: card.class_number.to_string(),
            unit_rank: card.unit_rank,
            regulator: IntervalDto::of(&card.regulator),
            ramified_primes: bigints(&card.ramified_primes),
            delta_k: card.delta_k.to_decimal_string(),
            quadratic_d: card.quadratic_d.as_ref().map(|d| d.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealDto {
    pub a: String,
    pub b: String,
    pub c: String,
}

impl IdealDto {
    fn of(i: &QuadIdeal) -> Self {
        IdealDto { a: i.a.to_string(), b: i.b.to_string(), c: i.c.to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitPrimeDto {
    pub q: String,
    pub ideal: IdealDto,
    pub class_index: usize,
    pub class_label: String,
    pub generator: Vec<String>,
    pub norm_bound_ok: bool,
    pub height_bound_certified: bool,
}

impl SplitPrimeDto {
    fn of(d: &SplitPrimeDatum) -> Self {
        SplitPrimeDto {
            q: d.q.to_string(),
            ideal: IdealDto::of(&d.ideal),
            class_index: d.class_index,
            class_label: d.class_label.clone(),
            generator: bigints(&d.generator.coords),
            norm_bound_ok: d.norm_bound_ok,
            height_bound_certified: d.height_bound_certified,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationDto {
    pub complete: bool,
    pub factors: Vec<(String, u32)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cofactor: Option<IntDto>,
    pub cofactor_probable_prime: bool,
}

impl FactorizationDto {
    fn of(f: &EntryFactorization, cfg: &Config) -> Self {
        FactorizationDto {
            complete: f.complete,
            factors: f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
            cofactor: f
                .cofactor
                .as_ref()
                .map(|c| IntDto::of(&BigInt::from(c.clone()), cfg)),
            cofactor_probable_prime: f.cofactor_probable_prime,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct M2EntryDto {
    pub q: String,
    pub eps: Vec<u64>,
    pub weil_a: String,
    pub weil_n: String,
    pub root: String,
    pub beta_in_k: bool,
    pub multiplicity: u32,
    pub m: IntDto,
    /// Populated only when best-effort factoring ran.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factorization: Option<FactorizationDto>,
}

impl M2EntryDto {
    fn of(e: &M2Entry, fs: Option<&EntryFactorization>, cfg: &Config) -> Self {
        M2EntryDto {
            q: e.q.to_string(),
            eps: e.eps.0.clone(),
            weil_a: e.weil_a.to_string(),
            weil_n: e.weil_n.to_string(),
            root: match e.root_choice {
                RootChoice::Upper => "upper".to_string(),
                RootChoice::Lower => "lower".to_string(),
            },
            beta_in_k: e.beta_in_k,
            multiplicity: e.multiplicity,
            m: IntDto::of(&e.m, cfg),
            factorization: fs.map(|f| FactorizationDto::of(f, cfg)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ListedPrimeDto {
    pub p: String,
    pub in_n0: bool,
    pub in_t: bool,
    pub in_ram: bool,
}

impl ListedPrimeDto {
    fn of(lp: &ListedPrime) -> Self {
        ListedPrimeDto {
            p: lp.p.to_string(),
            in_n0: lp.in_n0,
            in_t: lp.in_t,
            in_ram: lp.in_ram,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum OutcomeDto {
    #[serde(rename = "membership")]
    Membership {
        p: String,
        is_member: bool,
        in_n0: bool,
        witness_entry: Option<usize>,
        in_t: bool,
        in_ram: bool,
    },
    #[serde(rename = "list")]
    List { limit: u64, primes: Vec<ListedPrimeDto> },
    #[serde(rename = "factored")]
    Factored {
        primes: Vec<ListedPrimeDto>,
        unresolved: Vec<UnresolvedDto>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnresolvedDto {
    pub entry_index: usize,
    pub cofactor: IntDto,
    pub probable_prime: bool,
}

impl OutcomeDto {
    fn of(o: &N1Outcome, cfg: &Config) -> Self {
        match o {
            N1Outcome::Membership(MembershipVerdict {
                p,
                is_member,
                in_n0,
                witness_entry,
                in_t,
                in_ram,
            }) => OutcomeDto::Membership {
                p: p.to_string(),
                is_member: *is_member,
                in_n0: *in_n0,
                witness_entry: *witness_entry,
                in_t: *in_t,
                in_ram: *in_ram,
            },
            N1Outcome::List { limit, primes } => OutcomeDto::List {
                limit: *limit,
                primes: primes.iter().map(ListedPrimeDto::of).collect(),
            },
            N1Outcome::Factored { primes, unresolved, .. } => OutcomeDto::Factored {
                primes: primes.iter().map(ListedPrimeDto::of).collect(),
                unresolved: unresolved
                    .iter()
                    .map(|u: &UnresolvedCofactor| UnresolvedDto {
                        entry_index: u.entry_index,
                        cofactor: IntDto::of(&BigInt::from(u.cofactor.clone()), cfg),
                        probable_prime: u.probable_prime,
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagnitudeDto {
    pub exact: bool,
    pub value: Option<IntDto>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enclosure: Option<IntervalDto>,
    pub log10: IntervalDto,
}

impl MagnitudeDto {
    fn of(m: &CertifiedMagnitude, log10: &Interval, cfg: &Config) -> Self {
        match m {
            CertifiedMagnitude::Exact(v) => MagnitudeDto {
                exact: true,
                value: Some(IntDto::of(v, cfg)),
                enclosure: None,
                log10: IntervalDto::of(log10),
            },
            CertifiedMagnitude::Enclosure(i) => MagnitudeDto {
                exact: false,
                value: None,
                enclosure: Some(IntervalDto::of(i)),
                log10: IntervalDto::of(log10),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundConstantsDto {
    pub a1: String,
    pub delta_k: String,
    pub c1: IntervalDto,
    pub c2: IntervalDto,
    pub c2_exactly_one: bool,
    pub a: MagnitudeDto,
    pub bound: MagnitudeDto,
}

impl BoundConstantsDto {
    pub fn of(b: &BoundConstants, cfg: &Config) -> Result<Self> {
        let a_log10 = b.a_value.log10(128)?;
        Ok(BoundConstantsDto {
            a1: ratio_string(&b.a1),
            delta_k: b.delta_k.to_decimal_string(),
            c1: IntervalDto::of(&b.c1),
            c2: IntervalDto::of(&b.c2),
            c2_exactly_one: b.c2_exactly_one,
            a: MagnitudeDto::of(&b.a_value, &a_log10, cfg),
            bound: MagnitudeDto::of(&b.bound, &b.bound_log10, cfg),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalReportFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub field: FieldSummaryDto,
    pub snew: Vec<SplitPrimeDto>,
    pub exponent_vectors: u64,
    pub triples_processed: u64,
    pub zero_norms_excluded: u64,
    pub entries: Vec<M2EntryDto>,
    pub embedding_bound_all_ok: bool,
    pub entry_bound_all_ok: bool,
    pub t_primes: Vec<String>,
    pub ram_primes: Vec<String>,
    pub n1_list: Vec<ListedPrimeDto>,
    pub n1_below_bound: bool,
    pub outcome: OutcomeDto,
    pub constants: BoundConstantsDto,
}

pub fn report_to_file(
    report: &ExceptionalReport,
    card: &FieldCard,
    cfg: &Config,
) -> Result<ExceptionalReportFile> {
    Ok(ExceptionalReportFile {
        schema: REPORT_SCHEMA.to_string(),
        config: ConfigEcho::of(cfg),
        field: FieldSummaryDto::of(card),
        snew: report.snew.iter().map(SplitPrimeDto::of).collect(),
        exponent_vectors: report.exponent_vectors,
        triples_processed: report.triples_processed,
        zero_norms_excluded: report.zero_norms_excluded,
        entries: {
            let statuses: Option<&Vec<EntryFactorization>> = match &report.outcome {
                N1Outcome::Factored { entry_factorizations, .. } => Some(entry_factorizations),
                _ => None,
            };
            report
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| M2EntryDto::of(e, statuses.map(|s| &s[i]), cfg))
                .collect()
        },
        embedding_bound_all_ok: report.embedding_bound_all_ok,
        entry_bound_all_ok: report.entry_bound_all_ok,
        t_primes: bigints(&report.t_primes),
        ram_primes: bigints(&report.ram_primes),
        n1_list: report.n1_list.iter().map(ListedPrimeDto::of).collect(),
        n1_below_bound: report.n1_below_bound,
        outcome: OutcomeDto::of(&report.outcome, cfg),
        constants: BoundConstantsDto::of(&report.constants, cfg)?,
    })
}

// ---------------------------------------------------------------------------
// Certificate files.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisDto {
    pub name: String,
    pub status: String,
    pub detail: String,
}

impl HypothesisDto {
    fn of(h: &HypothesisEntry) -> Self {
        HypothesisDto {
            name: h.name.clone(),
            status: match h.status {
                HypothesisStatus::Verified => "verified".to_string(),
                HypothesisStatus::Asserted => "asserted".to_string(),
                HypothesisStatus::Failed => "failed".to_string(),
            },
            detail: h.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcludedPrimeDto {
    pub p: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibleQDto {
    pub q: String,
    pub threshold: String,
    pub rejected: Vec<RejectedQDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectedQDto {
    pub q: String,
    pub splits_in_k: bool,
    pub quaternion_splits: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub field: FieldSummaryDto,
    pub quaternion_discriminant: String,
    pub quaternion_ramified: Vec<String>,
    pub hypotheses: Vec<HypothesisDto>,
    pub hypotheses_ok: bool,
    pub in_force: bool,
    pub admissible_q: Option<AdmissibleQDto>,
    pub splits_over_k: bool,
    pub conclusion: String,
    pub excluded_primes: Vec<ExcludedPrimeDto>,
    pub residual_statement: String,
    pub exceptional: ExceptionalReportFile,
    pub text: String,
}

pub fn certificate_to_file(
    cert: &Certificate,
    card: &FieldCard,
    cfg: &Config,
) -> Result<CertificateFile> {
    Ok(CertificateFile {
        schema: CERTIFICATE_SCHEMA.to_string(),
        config: ConfigEcho::of(cfg),
        field: FieldSummaryDto::of(card),
        quaternion_discriminant: cert.quaternion.d.to_string(),
        quaternion_ramified: bigints(&cert.quaternion.ramified_primes),
        hypotheses: cert.hypotheses.iter().map(HypothesisDto::of).collect(),
        hypotheses_ok: cert.hypotheses_ok,
        in_force: cert.in_force(),
        admissible_q: cert.admissible.as_ref().map(|a| AdmissibleQDto {
            q: a.q.to_string(),
            threshold: a.threshold.to_string(),
            rejected: a
                .rejected
                .iter()
                .map(|r| RejectedQDto {
                    q: r.q.to_string(),
                    splits_in_k: r.splits_in_k,
                    quaternion_splits: r.quaternion_splits,
                })
                .collect(),
        }),
        splits_over_k: cert.splits_over_k,
        conclusion: cert.conclusion.statement().to_string(),
        excluded_primes: cert
            .excluded
            .iter()
            .map(|e: &ExcludedPrime| ExcludedPrimeDto {
                p: e.p.to_string(),
                reason: e.reason.describe().to_string(),
            })
            .collect(),
        residual_statement: cert.residual_statement.clone(),
        exceptional: report_to_file(&cert.exceptional, card, cfg)?,
        text: cert.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Small report files for the remaining subcommands.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeilEntryDto {
    pub a: String,
    pub n: String,
    pub root: String,
    pub is_double_root: bool,
    pub beta12: Option<String>,
    pub beta24: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeilReportFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub n: String,
    pub count: usize,
    pub entries: Vec<WeilEntryDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassGroupDto {
    pub order: String,
    pub generators: Vec<GeneratorDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorDto {
    pub label: String,
    pub order: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantsReportFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub field: FieldSummaryDto,
    pub basis_symbols: Vec<String>,
    pub torsion_order: u32,
    pub fundamental_units: Vec<Vec<String>>,
    pub class_group: ClassGroupDto,
    pub hcf_containment: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReportFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub field: FieldSummaryDto,
    pub constants: BoundConstantsDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuaternionReportFile {
    pub schema: String,
    pub config: ConfigEcho,
    pub discriminant: String,
    pub ramified_primes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<FieldSummaryDto>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub splits_over_k: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub admissible_q: Option<AdmissibleQDto>,
}

pub fn quaternion_disc_dto(d: &QuaternionDisc) -> (String, Vec<String>) {
    (d.d.to_string(), bigints(&d.ramified_primes))
}

/// Serializes any of the report types with deterministic layout.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
