//! The applicability certificate: combines the field hypotheses, the
//! quaternion splitting analysis, the admissible-prime search, and the
//! exceptional prime set into one checkable verdict about rational points
//! on the Shimura curve of Γ₀(p)-type attached to (k, B).
//!
//! All hypothesis failures are collected and reported together rather than
//! failing fast; a certificate with a failed hypothesis is still written so
//! the caller can see every finding at once.

use std::fmt;

use num_bigint::BigInt;

use crate::arith;
use crate::config::Config;
use crate::exceptional::{run_exceptional, ExceptionalReport, N1Mode};
use crate::field::FieldCard;
use crate::quadratic::hcf_containment_check;
use crate::quaternion::{find_admissible_q, splits_over_field, AdmissibleQ, QuaternionDisc};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypothesisStatus {
    Verified,
    Asserted,
    Failed,
}

#[derive(Debug, Clone)]
pub struct HypothesisEntry {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

/// Which branch of the dichotomy applies to (k, B).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConclusionBranch {
    /// B ⊗ k is a matrix algebra: the curve has no k-rational points.
    NoRationalPoints,
    /// B ⊗ k is a division algebra: at most elliptic points of order 2 or 3.
    OnlyEllipticPoints,
}

impl ConclusionBranch {
    pub fn statement(&self) -> &'static str {
        match self {
            ConclusionBranch::NoRationalPoints => "M_0^B(p)(k) is empty",
            ConclusionBranch::OnlyEllipticPoints => {
                "M_0^B(p)(k) contains at most elliptic points of order 2 or 3"
            }
        }
    }
}

/// Why a specific prime is excluded from the conclusion. Each excluded
/// prime carries exactly one reason (the first that applies, in this order).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    AtMostFourQ,
    BelowEleven,
    Thirteen,
    DividesDisc,
    InExceptionalSet,
}

impl ExclusionReason {
    pub fn describe(&self) -> &'static str {
        match self {
            ExclusionReason::AtMostFourQ => "p <= 4q",
            ExclusionReason::BelowEleven => "p < 11",
            ExclusionReason::Thirteen => "p = 13",
            ExclusionReason::DividesDisc => "p divides d",
            ExclusionReason::InExceptionalSet => "p in N1(k)",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExcludedPrime {
    pub p: BigInt,
    pub reason: ExclusionReason,
}

/// The assembled certificate.
#[derive(Debug)]
pub struct Certificate {
    pub quaternion: QuaternionDisc,
    pub hypotheses: Vec<HypothesisEntry>,
    pub hypotheses_ok: bool,
    pub admissible: Option<AdmissibleQ>,
    pub splits_over_k: bool,
    pub conclusion: ConclusionBranch,
    /// Explicit finite exclusions: primes <= max(4q, 13), divisors of d,
    /// 13, and every exceptional prime found up to the list limit.
    pub excluded: Vec<ExcludedPrime>,
    pub exceptional: ExceptionalReport,
    /// The residual statement quantified over all remaining primes.
    pub residual_statement: String,
}

/// Runs every check and assembles the certificate. Hypothesis failures do
/// not abort the run; they are recorded and `hypotheses_ok` turns false.
pub fn certify(card: &FieldCard, disc: &QuaternionDisc, cfg: &Config) -> Result<Certificate> {
    card.validate()?;
    cfg.validate()?;
    let mut hypotheses = Vec::new();

    // Galois hypothesis: quadratic fields are Galois; otherwise trust the
    // card's assertion.
    if card.quadratic_d.is_some() {
        hypotheses.push(HypothesisEntry {
            name: "galois".into(),
            status: HypothesisStatus::Verified,
            detail: "quadratic fields are Galois over Q".into(),
        });
    } else if card.is_galois_asserted {
        hypotheses.push(HypothesisEntry {
            name: "galois".into(),
            status: HypothesisStatus::Asserted,
            detail: "card asserts k/Q Galois".into(),
        });
    } else {
        hypotheses.push(HypothesisEntry {
            name: "galois".into(),
            status: HypothesisStatus::Failed,
            detail: "card does not assert k/Q Galois".into(),
        });
    }

    // Hilbert-class-field freeness.
    if card.quadratic_d.is_some() {
        if hcf_containment_check(card) {
            hypotheses.push(HypothesisEntry {
                name: "hcf_free".into(),
                status: HypothesisStatus::Failed,
                detail: "k is imaginary quadratic with class number 1, hence equals its own \
                         Hilbert class field"
                    .into(),
            });
        } else {
            hypotheses.push(HypothesisEntry {
                name: "hcf_free".into(),
                status: HypothesisStatus::Verified,
                detail: "k contains the Hilbert class field of no imaginary quadratic field"
                    .into(),
            });
        }
    } else if card.hcf_free_asserted {
        hypotheses.push(HypothesisEntry {
            name: "hcf_free".into(),
            status: HypothesisStatus::Asserted,
            detail: "card asserts Hilbert-class-field freeness".into(),
        });
    } else {
        hypotheses.push(HypothesisEntry {
            name: "hcf_free".into(),
            status: HypothesisStatus::Failed,
            detail: "card does not assert Hilbert-class-field freeness".into(),
        });
    }

    // Admissible split prime q.
    let admissible = match find_admissible_q(disc, card, cfg.q_search_limit) {
        Ok(a) => {
            hypotheses.push(HypothesisEntry {
                name: "admissible_q".into(),
                status: HypothesisStatus::Verified,
                detail: format!(
                    "q = {} splits completely in k and B tensor Q(sqrt(-{})) is a division algebra",
                    a.q, a.q
                ),
            });
            Some(a)
        }
        Err(crate::CoreError::SearchExhausted { limit, .. }) => {
            hypotheses.push(HypothesisEntry {
                name: "admissible_q".into(),
                status: HypothesisStatus::Failed,
                detail: format!("no admissible q found below {limit}"),
            });
            None
        }
        Err(e) => return Err(e),
    };

    let splits_over_k = splits_over_field(disc, card)?;
    let conclusion = if splits_over_k {
        ConclusionBranch::NoRationalPoints
    } else {
        ConclusionBranch::OnlyEllipticPoints
    };

    let exceptional = run_exceptional(card, &N1Mode::ListUpTo(cfg.list_limit), cfg)?;

    let mut excluded = Vec::new();
    if let Some(a) = &admissible {
        let four_q = a.threshold.clone();
        let explicit_cap = four_q.clone().max(BigInt::from(13));
        let mut keys: Vec<BigInt> = Vec::new();
        for &p in arith::small_primes_to(10_000_000) {
            let pb = BigInt::from(p);
            if pb > explicit_cap {
                break;
            }
            keys.push(pb);
        }
        keys.extend(disc.ramified_primes.iter().cloned());
        for lp in &exceptional.n1_list {
            keys.push(lp.p.clone());
        }
        keys.sort();
        keys.dedup();
        for p in keys {
            let reason = if p <= four_q {
                ExclusionReason::AtMostFourQ
            } else if p < BigInt::from(11) {
                ExclusionReason::BelowEleven
            } else if p == BigInt::from(13) {
                ExclusionReason::Thirteen
            } else if divides(&p, &disc.d) {
                ExclusionReason::DividesDisc
            } else if exceptional.n1_list.iter().any(|lp| lp.p == p) {
                ExclusionReason::InExceptionalSet
            } else {
                continue;
            };
            excluded.push(ExcludedPrime { p, reason });
        }
    }

    let hypotheses_ok = hypotheses.iter().all(|h| h.status != HypothesisStatus::Failed);
    let residual_statement = match &admissible {
        Some(a) => format!(
            "For every prime p > {} with p not dividing {}, p != 13, and p outside N1(k) \
             (membership exactly decidable for any given p), {}.",
            a.threshold,
            disc.d,
            conclusion.statement()
        ),
        None => "No admissible q was found; the conclusion is not in force.".to_string(),
    };

    Ok(Certificate {
        quaternion: disc.clone(),
        hypotheses,
        hypotheses_ok,
        admissible,
        splits_over_k,
        conclusion,
        excluded,
        exceptional,
        residual_statement,
    })
}

fn divides(p: &BigInt, n: &BigInt) -> bool {
    use num_integer::Integer;
    use num_traits::Zero;
    n.mod_floor(p).is_zero()
}

impl Certificate {
    /// True when the certificate actually asserts its conclusion.
    pub fn in_force(&self) -> bool {
        self.hypotheses_ok && self.admissible.is_some()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Rational-point certificate for a Shimura curve of Gamma_0(p)-type")?;
        writeln!(f, "==================================================================")?;
        writeln!(
            f,
            "Quaternion algebra: indefinite, discriminant d = {} (ramified at {}).",
            self.quaternion.d,
            join(&self.quaternion.ramified_primes)
        )?;
        writeln!(f, "The ambient curve has no real points: M^B(R) is empty.")?;
        writeln!(f)?;
        writeln!(f, "Hypotheses:")?;
        for h in &self.hypotheses {
            let tag = match h.status {
                HypothesisStatus::Verified => "verified",
                HypothesisStatus::Asserted => "asserted",
                HypothesisStatus::Failed => "FAILED",
            };
            writeln!(f, "  [{tag:8}] {}: {}", h.name, h.detail)?;
        }
        if let Some(a) = &self.admissible {
            writeln!(f, "Admissible prime q = {} with threshold 4q = {}.", a.q, a.threshold)?;
            for r in &a.rejected {
                writeln!(
                    f,
                    "  (q = {} splits in k but B tensor Q(sqrt(-{})) is a matrix algebra)",
                    r.q, r.q
                )?;
            }
        }
        writeln!(
            f,
            "Splitting over k: B tensor k is {} algebra, so the conclusion branch is: {}.",
            if self.splits_over_k { "a matrix" } else { "a division" },
            self.conclusion.statement()
        )?;
        writeln!(f)?;
        writeln!(f, "Explicitly excluded primes (one reason each):")?;
        for e in &self.excluded {
            writeln!(f, "  {:>8}  ({})", e.p.to_string(), e.reason.describe())?;
        }
        writeln!(
            f,
            "Exceptional set beyond the list limit: decidable by exact divisibility \
             against {} stored norm values.",
            self.exceptional.entries.len()
        )?;
        let l10 = &self.exceptional.constants.bound_log10;
        writeln!(
            f,
            "A-priori bound: log10 C(k, 2|d_k|^(A1 h_k)) in [{:.6}, {:.6}].",
            l10.lo().to_f64(),
            l10.hi().to_f64()
        )?;
        writeln!(f)?;
        if self.in_force() {
            writeln!(f, "{}", self.residual_statement)?;
        } else {
            writeln!(f, "HYPOTHESIS FAILED: the conclusion is NOT asserted. Findings above.")?;
        }
        Ok(())
    }
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}
