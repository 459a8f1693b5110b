//! Local splitting analysis of the indefinite quaternion algebra B of
//! discriminant d: validity of d, splitting of B over Q(√-q) and over the
//! field of a card, and the search for the least admissible prime q.
//!
//! B itself is never constructed; every question here is local and depends
//! only on the set of ramified primes of B. A quadratic field F splits B
//! exactly when no prime ramified in B splits in F (the infinite place never
//! interferes since B is indefinite).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::field::FieldCard;
use crate::quadratic::{split_type, SplitType};
use crate::{CoreError, Result};

/// A valid indefinite quaternion discriminant: squarefree with an even
/// number of prime factors and greater than 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternionDisc {
    pub d: BigInt,
    pub ramified_primes: Vec<BigInt>,
}

/// Factors and validates a quaternion discriminant.
pub fn validate_disc(d: &BigInt) -> Result<QuaternionDisc> {
    if !d.is_positive() || d.is_one() {
        return Err(CoreError::InvalidDiscriminant(
            d.clone(),
            "must be a positive integer greater than 1".into(),
        ));
    }
    let fac = arith::factor_bounded(d, 2_000_000)?;
    if !fac.is_complete() && !fac.cofactor_is_probable_prime {
        return Err(CoreError::InvalidDiscriminant(
            d.clone(),
            "could not be fully factored".into(),
        ));
    }
    let mut primes: Vec<BigInt> =
        fac.known_factors.iter().map(|(p, _)| BigInt::from(p.clone())).collect();
    if !fac.is_complete() {
        primes.push(BigInt::from(fac.cofactor.clone()));
    }
    if fac.known_factors.iter().any(|(_, e)| *e > 1) {
        return Err(CoreError::InvalidDiscriminant(d.clone(), "not squarefree".into()));
    }
    if !primes.len().is_multiple_of(2) {
        return Err(CoreError::InvalidDiscriminant(
            d.clone(),
            format!("has an odd number of prime factors ({})", primes.len()),
        ));
    }
    primes.sort();
    Ok(QuaternionDisc { d: d.clone(), ramified_primes: primes })
}

/// Discriminant of the imaginary quadratic field Q(√-q): -q for q = 3 mod 4
/// and -4q otherwise.
pub fn imag_field_disc(q: &BigInt) -> BigInt {
    if q.mod_floor(&BigInt::from(4)).to_i32() == Some(3) {
        -q.clone()
    } else {
        q * -4
    }
}

/// Does the rational prime l split in the quadratic field of discriminant e?
fn splits_in(e: &BigInt, l: &BigInt) -> Result<bool> {
    if e.mod_floor(l).is_zero() {
        return Ok(false);
    }
    Ok(arith::kronecker(e, l)? == 1)
}

/// True exactly when B ⊗ Q(√-q) is a matrix algebra, i.e. when no prime
/// ramified in B splits in Q(√-q).
pub fn splits_imag_quadratic(disc: &QuaternionDisc, q: &BigInt) -> Result<bool> {
    let e = imag_field_disc(q);
    for l in &disc.ramified_primes {
        if splits_in(&e, l)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True exactly when B ⊗ k is a matrix algebra over k. For quadratic k this
/// holds iff no prime ramified in B splits in k (split primes have odd local
/// degree 1; inert and ramified primes have even local data).
pub fn splits_over_field(disc: &QuaternionDisc, card: &FieldCard) -> Result<bool> {
    if card.quadratic_d.is_none() {
        return Err(CoreError::Unsupported(
            "splitting over non-quadratic cards needs local degree data".into(),
        ));
    }
    for l in &disc.ramified_primes {
        if split_type(card, l)? == SplitType::Split {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A rejected candidate in the admissible-q scan, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedQ {
    pub q: BigInt,
    pub splits_in_k: bool,
    pub quaternion_splits: bool,
}

/// Result of the admissible-q search: the least prime q that splits
/// completely in k while B ⊗ Q(√-q) stays a division algebra, together with
/// the implied threshold 4q and a certificate that every smaller split
/// prime fails the quaternion condition.
#[derive(Debug, Clone)]
pub struct AdmissibleQ {
    pub q: BigInt,
    pub threshold: BigInt,
    pub rejected: Vec<RejectedQ>,
}

/// Least admissible q below the search limit.
pub fn find_admissible_q(
    disc: &QuaternionDisc,
    card: &FieldCard,
    search_limit: u64,
) -> Result<AdmissibleQ> {
    let limit = search_limit.min(10_000_000);
    let mut rejected = Vec::new();
    for &p in arith::small_primes_to(limit) {
        if p > limit {
            break;
        }
        let q = BigInt::from(p);
        let splits_in_k = split_type(card, &q)? == SplitType::Split;
        if !splits_in_k {
            continue;
        }
        let quaternion_splits = splits_imag_quadratic(disc, &q)?;
        if quaternion_splits {
            rejected.push(RejectedQ { q, splits_in_k, quaternion_splits });
            continue;
        }
        return Ok(AdmissibleQ { threshold: &q * 4, q, rejected });
    }
    Err(CoreError::SearchExhausted { what: "searching for an admissible split prime q".into(), limit })
}
