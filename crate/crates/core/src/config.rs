//! Pipeline configuration: bound constant A₁, height lower-bound policy,
//! work budgets, and precision caps. Every report echoes the effective
//! configuration so runs are reproducible from their outputs.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;

use crate::interval::Dyadic;
use crate::{CoreError, Result};

/// Effective configuration for a pipeline run.
#[derive(Debug, Clone)]
pub struct Config {
    /// The Chebotarev-type constant A₁ > 1 entering the split-prime bound
    /// N(q) ≤ 2|d_k|^(A₁ h_k). Effectively computable but with no published
    /// numeric value; 40 is a documented, literature-informed default.
    pub a1: Ratio<BigInt>,
    /// Override for the card's height lower-bound constant δ_k.
    pub delta_override: Option<Dyadic>,
    /// Abstract factoring work units (one trial-division candidate or one
    /// rho iteration each). The default lets 100-digit inputs finish trial
    /// division to 10^7 plus 10^6 rho iterations.
    pub factor_budget: u64,
    /// Starting precision for certified interval computations.
    pub precision_start_bits: u32,
    /// Hard cap for precision escalation.
    pub precision_cap_bits: u32,
    /// Maximal field degree for exponent-vector enumeration (5^n vectors).
    pub enumeration_cap: usize,
    /// Default X for bounded exceptional-prime listings.
    pub list_limit: u64,
    /// Scan limit for completely split primes when generating the class group.
    pub snew_search_limit: u64,
    /// Scan limit for the admissible prime q.
    pub q_search_limit: u64,
    /// Integers above this many decimal digits are reported as digest +
    /// leading/trailing digits unless full output is forced.
    pub oversize_digits: usize,
    /// Force full decimal output of oversized integers.
    pub full_integers: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            a1: Ratio::from_integer(BigInt::from(40)),
            delta_override: None,
            factor_budget: 2_000_000,
            precision_start_bits: 128,
            precision_cap_bits: 16_384,
            enumeration_cap: 12,
            list_limit: 1_000,
            snew_search_limit: 1_000_000,
            q_search_limit: 1_000_000,
            oversize_digits: 10_000,
            full_integers: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.a1 <= Ratio::one() {
            return Err(CoreError::CardValidation("A1 must exceed 1".into()));
        }
        if self.precision_start_bits < 32 || self.precision_cap_bits < self.precision_start_bits {
            return Err(CoreError::CardValidation(
                "precision must satisfy 32 <= start <= cap".into(),
            ));
        }
        Ok(())
    }

    /// Parses a decimal A₁ value such as "40" or "12.5" into an exact ratio.
    pub fn parse_a1(s: &str) -> Result<Ratio<BigInt>> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let digits = format!("{int_part}{frac_part}");
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(CoreError::CardValidation(format!("bad A1 value: {s:?}")));
        }
        let num: BigInt = digits.parse().unwrap();
        let den = BigInt::from(10u8).pow(frac_part.len() as u32);
        Ok(Ratio::new(num, den))
    }

    /// Escalating precision schedule from start to cap (doubling).
    pub fn precision_schedule(&self) -> impl Iterator<Item = u32> {
        let start = self.precision_start_bits;
        let cap = self.precision_cap_bits;
        std::iter::successors(Some(start), move |&b| {
            if b >= cap {
                None
            } else {
                Some((b * 2).min(cap))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_parses() {
        assert_eq!(Config::parse_a1("40").unwrap(), Ratio::from_integer(BigInt::from(40)));
        assert_eq!(
            Config::parse_a1("12.5").unwrap(),
            Ratio::new(BigInt::from(125), BigInt::from(10))
        );
        assert!(Config::parse_a1("x").is_err());
    }

    #[test]
    fn schedule_reaches_cap() {
        let cfg = Config { precision_start_bits: 64, precision_cap_bits: 300, ..Default::default() };
        let s: Vec<u32> = cfg.precision_schedule().collect();
        assert_eq!(s, vec![64, 128, 256, 300]);
    }
}
