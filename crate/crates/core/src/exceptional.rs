//! The exceptional prime set N₁ⁿᵉʷ(k) and the effective a-priori bound.
//!
//! Pipeline: pick a set S of completely split primes whose ideal classes
//! generate the class group, unit-reduce a generator α_q of q^{h_k} for each,
//! enumerate all group-ring exponent vectors ε with coefficients in
//! {0, 8, 12, 16, 24} and all Weil numbers β of N(q), and collect the exact
//! integers m = Norm(α_q^ε − β^{24 h_k}) ≠ 0. The set N₁ is then
//! N₀ ∪ T ∪ Ram(k), where N₀ holds the primes dividing some m, T holds the
//! rational primes under S together with {2, 3}, and Ram(k) is read off the
//! card. Membership queries stay exact (plain divisibility); complete
//! factorization is best-effort only.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::config::Config;
use crate::field::{FieldCard, RingElement};
use crate::interval::{Dyadic, Interval};
use crate::quadratic::{
    class_group, ideal_pow, prime_above, principal_generator, split_type, ClassGroup,
    PrincipalOutcome, QuadIdeal, SplitType,
};
use crate::weil::{beta_in_field, enumerate_fr, power_trace, RootChoice, WeilNumber};
use crate::{CoreError, Result};

/// Allowed group-ring exponent coefficients.
pub const EXPONENT_VALUES: [u64; 5] = [0, 8, 12, 16, 24];

/// One exponent vector σ ↦ a_σ with a_σ in {0, 8, 12, 16, 24}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector(pub Vec<u64>);

impl ExponentVector {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().all(|a| EXPONENT_VALUES.contains(a)) {
            Ok(())
        } else {
            Err(CoreError::Internal("exponent outside {0,8,12,16,24}".into()))
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

/// Streams all 5^degree exponent vectors in lexicographic order (first all
/// zeros, last all 24, leftmost Galois element most significant).
pub fn enumerate_exponents(degree: usize, cap: usize) -> Result<ExponentIter> {
    if degree > cap {
        let estimate = BigInt::from(5).pow(degree as u32).to_string();
        return Err(CoreError::EnumerationRefused { degree, estimate, cap });
    }
    Ok(ExponentIter { digits: vec![0; degree], done: degree == 0 })
}

pub struct ExponentIter {
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for ExponentIter {
    type Item = ExponentVector;

    fn next(&mut self) -> Option<ExponentVector> {
        if self.done {
            return None;
        }
        let out = ExponentVector(self.digits.iter().map(|&i| EXPONENT_VALUES[i]).collect());
        // Odometer increment, rightmost digit fastest.
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.digits[pos] + 1 < EXPONENT_VALUES.len() {
                self.digits[pos] += 1;
                for d in &mut self.digits[pos + 1..] {
                    *d = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A completely split prime chosen for S, with its unit-reduced generator
/// α_q of q^{h_k}.
#[derive(Debug, Clone)]
pub struct SplitPrimeDatum {
    pub q: BigInt,
    pub ideal: QuadIdeal,
    pub class_index: usize,
    pub class_label: String,
    /// α_q with α_q O_k = q^{h_k}, unit-reduced and sign-canonical.
    pub generator: RingElement,
    /// N(q) ≤ 2 |d_k|^(A₁ h_k), checked exactly for rational A₁.
    pub norm_bound_ok: bool,
    /// H(α_q) ≤ |Norm α_q|^(1/n) exp(C₁ R) certified (identity for r = 0).
    pub height_bound_certified: bool,
}

/// One value m = Norm(α_q^ε − β^{24 h_k}) ≠ 0.
#[derive(Debug, Clone)]
pub struct M2Entry {
    pub q: BigInt,
    pub eps: ExponentVector,
    pub weil_a: BigInt,
    pub weil_n: BigInt,
    pub root_choice: RootChoice,
    pub beta_in_k: bool,
    /// 2 when the entry stands for a conjugate pair outside k.
    pub multiplicity: u32,
    pub m: BigInt,
}

/// Certified magnitude: exact when every ingredient is exact, otherwise an
/// enclosing interval.
#[derive(Debug, Clone)]
pub enum CertifiedMagnitude {
    Exact(BigInt),
    Enclosure(Interval),
}

impl CertifiedMagnitude {
    /// True when p ≤ value is certain.
    pub fn certainly_at_least(&self, p: &BigInt) -> bool {
        match self {
            CertifiedMagnitude::Exact(v) => p <= v,
            CertifiedMagnitude::Enclosure(i) => Dyadic::from_int(p) <= *i.lo(),
        }
    }

    /// True when v ≤ value is certain.
    pub fn certainly_dominates(&self, v: &BigInt) -> bool {
        self.certainly_at_least(v)
    }

    pub fn log10(&self, bits: u32) -> Result<Interval> {
        match self {
            CertifiedMagnitude::Exact(v) => crate::interval::log10_int(v, bits),
            CertifiedMagnitude::Enclosure(i) => i.log10(bits),
        }
    }
}

/// The a-priori bound constants C₁(k), C₂(k), a = 2|d_k|^(A₁ h_k) and
/// C(k, a) = (a^{24 h_k} C₂ + a^{12 h_k})^(2 n_k).
#[derive(Debug, Clone)]
pub struct BoundConstants {
    pub a1: Ratio<BigInt>,
    pub delta_k: Dyadic,
    /// C₁ = r^(1+r) δ^(1-r) / 2 (exactly 0 for r = 0, 1/2 for r = 1).
    pub c1: Interval,
    /// C₂ = exp(24 n C₁ R); exactly 1 for r = 0.
    pub c2: Interval,
    pub c2_exactly_one: bool,
    pub a_value: CertifiedMagnitude,
    pub bound: CertifiedMagnitude,
    pub bound_log10: Interval,
}

/// C₁ and C₂ of the card.
fn c1_c2(card: &FieldCard, bits: u32) -> Result<(Interval, Interval, bool)> {
    let r = card.unit_rank as u64;
    let c1 = match r {
        0 => Interval::zero(),
        _ => {
            // r^(1+r) δ^(1-r) / 2: δ^(1-r) = 1/δ^(r-1).
            let rpow = Interval::from_i64(r as i64).pow_u64(1 + r, bits);
            let dpow = Interval::point(card.delta_k.clone()).pow_u64(r - 1, bits);
            let half = Interval::point(Dyadic::new(BigInt::one(), -1));
            rpow.div(&dpow, bits)?.mul(&half, bits)
        }
    };
    if card.unit_rank == 0 {
        return Ok((c1, Interval::one(), true));
    }
    let factor = Interval::from_i64(24 * card.degree as i64);
    let arg = factor.mul(&c1, bits).mul(&card.regulator, bits);
    Ok((c1, arg.exp(bits), false))
}

/// 2 |d_k|^(A₁ h_k) as a certified magnitude (exact for integral A₁ h_k).
fn a_of_card(card: &FieldCard, a1: &Ratio<BigInt>, bits: u32) -> Result<CertifiedMagnitude> {
    let h = BigInt::from(card.class_number);
    let exp_ratio = a1 * &h;
    let num = exp_ratio.numer();
    let den = exp_ratio.denom();
    let d_abs = card.discriminant.abs();
    let num_u = num
        .to_u32()
        .ok_or_else(|| CoreError::CardValidation("A1 h_k numerator too large".into()))?;
    if den.is_one() {
        return Ok(CertifiedMagnitude::Exact(d_abs.pow(num_u) * 2));
    }
    let den_u = den
        .to_u32()
        .ok_or_else(|| CoreError::CardValidation("A1 denominator too large".into()))?;
    let powed = Interval::from_int(&d_abs.pow(num_u));
    let rooted = powed.nth_root(den_u, bits)?;
    Ok(CertifiedMagnitude::Enclosure(rooted.mul(&Interval::from_i64(2), bits)))
}

/// C(k, a) = (a^{24 h} C₂ + a^{12 h})^(2 n) for a given certified a.
fn c_of_a(
    card: &FieldCard,
    a: &CertifiedMagnitude,
    c2: &Interval,
    c2_exactly_one: bool,
    bits: u32,
) -> Result<CertifiedMagnitude> {
    let h = card.class_number;
    let two_n = 2 * card.degree as u64;
    match (a, c2_exactly_one) {
        (CertifiedMagnitude::Exact(a), true) => {
            let a24 = a.pow((24 * h) as u32);
            let a12 = a.pow((12 * h) as u32);
            Ok(CertifiedMagnitude::Exact((a24 + a12).pow(two_n as u32)))
        }
        _ => {
            let ai = match a {
                CertifiedMagnitude::Exact(v) => Interval::from_int(v),
                CertifiedMagnitude::Enclosure(i) => i.clone(),
            };
            let a24 = ai.pow_u64(24 * h, bits).mul(c2, bits);
            let a12 = ai.pow_u64(12 * h, bits);
            Ok(CertifiedMagnitude::Enclosure(a24.add(&a12, bits).pow_u64(two_n, bits)))
        }
    }
}

/// All bound constants of the card, outward-rounded.
pub fn bound_constants(card: &FieldCard, cfg: &Config) -> Result<BoundConstants> {
    if cfg.a1 <= Ratio::one() {
        return Err(CoreError::CardValidation("A1 must exceed 1".into()));
    }
    let bits = 256;
    let (c1, c2, c2_one) = c1_c2(card, bits)?;
    let a_value = a_of_card(card, &cfg.a1, bits)?;
    let bound = c_of_a(card, &a_value, &c2, c2_one, bits)?;
    let bound_log10 = bound.log10(bits)?;
    Ok(BoundConstants {
        a1: cfg.a1.clone(),
        delta_k: cfg.delta_override.clone().unwrap_or_else(|| card.delta_k.clone()),
        c1,
        c2,
        c2_exactly_one: c2_one,
        a_value,
        bound,
        bound_log10,
    })
}

/// Multiplies γ by a unit so the returned associate satisfies the height
/// bound H ≤ |Norm|^(1/n) exp(C₁ R). For unit rank 0 the input is returned
/// unchanged (the bound is then an exact identity). For rank 1 the balancing
/// exponent is the rounded projection of the log-embedding gap onto the unit
/// line, refined by a ±1 search and certified with intervals.
pub fn reduce_generator(
    card: &FieldCard,
    gamma: &RingElement,
    cfg: &Config,
) -> Result<RingElement> {
    if gamma.is_zero() {
        return Err(CoreError::ZeroInput);
    }
    match card.unit_rank {
        0 => Ok(gamma.clone()),
        1 => reduce_generator_rank_one(card, gamma, cfg),
        r => Err(CoreError::Unsupported(format!(
            "unit reduction for unit rank {r} needs lattice data this build does not automate"
        ))),
    }
}

fn reduce_generator_rank_one(
    card: &FieldCard,
    gamma: &RingElement,
    cfg: &Config,
) -> Result<RingElement> {
    let u = card.fundamental_units[0].clone();
    let u_inv = unit_inverse(card, &u)?;
    // Balancing exponent t* = (log|τ₂γ| - log|τ₁γ|) / (2R).
    let mut t_round: Option<i64> = None;
    for bits in cfg.precision_schedule() {
        let places = card.embeddings_at(bits)?;
        let l1 = card.embed(gamma, &places[0], bits)?.re.abs();
        let l2 = card.embed(gamma, &places[1], bits)?.re.abs();
        if !l1.lo().is_positive() || !l2.lo().is_positive() {
            continue;
        }
        let gap = l2.ln(bits)?.sub(&l1.ln(bits)?, bits);
        let denom = card.regulator.mul(&Interval::from_i64(2), bits);
        let t = gap.div(&denom, bits)?;
        if t.radius() < Dyadic::new(BigInt::one(), -3) {
            t_round = t.midpoint().add(&Dyadic::new(BigInt::one(), -1)).to_f64().floor().to_i64_checked();
            break;
        }
    }
    let t0 = t_round.ok_or(CoreError::PrecisionExhausted {
        cap: cfg.precision_cap_bits,
        place: None,
    })?;
    // Candidates t0, t0-1, t0+1; keep the one with the least certified
    // height that meets the bound.
    let norm_abs = card.norm(gamma)?.abs();
    let mut best: Option<(Dyadic, RingElement)> = None;
    for t in [t0, t0 - 1, t0 + 1] {
        let cand = apply_unit_power(card, gamma, &u, &u_inv, t)?;
        if let Some(hu) = certify_height_bound(card, &cand, &norm_abs, cfg)? {
            let better = match &best {
                None => true,
                Some((cur, _)) => hu < *cur,
            };
            if better {
                best = Some((hu, cand));
            }
        }
    }
    let (_, reduced) = best.ok_or_else(|| {
        CoreError::ReductionUncertified(
            "no unit associate certified the height bound; delta_k may be inconsistent".into(),
        )
    })?;
    match card.sign_at_real_place(&reduced, card.distinguished_embedding, cfg)? {
        -1 => Ok(reduced.neg()),
        _ => Ok(reduced),
    }
}

trait ToI64Checked {
    fn to_i64_checked(self) -> Option<i64>;
}

impl ToI64Checked for f64 {
    fn to_i64_checked(self) -> Option<i64> {
        if self.is_finite() && self.abs() < 9e15 {
            Some(self as i64)
        } else {
            None
        }
    }
}

fn unit_inverse(card: &FieldCard, u: &RingElement) -> Result<RingElement> {
    // u^-1 = ± σ(u) for |N(u)| = 1 in a quadratic field.
    let conj = card.galois_apply(1, u)?;
    let n = card.norm(u)?;
    Ok(if n.is_negative() { conj.neg() } else { conj })
}

fn apply_unit_power(
    card: &FieldCard,
    gamma: &RingElement,
    u: &RingElement,
    u_inv: &RingElement,
    t: i64,
) -> Result<RingElement> {
    let base = if t >= 0 { u } else { u_inv };
    let p = card.ring_pow(base, t.unsigned_abs())?;
    card.ring_mul(gamma, &p)
}

/// Certifies H(x) ≤ |norm|^(1/n) exp(C₁ R); returns the certified height
/// upper endpoint on success, None when the bound cannot be certified at the
/// precision cap.
fn certify_height_bound(
    card: &FieldCard,
    x: &RingElement,
    norm_abs: &BigInt,
    cfg: &Config,
) -> Result<Option<Dyadic>> {
    for bits in cfg.precision_schedule() {
        let h = match card.height(x, 20, cfg) {
            Ok(h) => h,
            Err(CoreError::PrecisionExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (c1, _, _) = c1_c2(card, bits)?;
        let rhs = Interval::from_int(norm_abs)
            .nth_root(card.degree as u32, bits)?
            .mul(&c1.mul(&card.regulator, bits).exp(bits), bits);
        if *h.hi() <= *rhs.lo() {
            return Ok(Some(h.hi().clone()));
        }
        if *rhs.hi() < *h.lo() {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Exact check N(q) ≤ 2 |d_k|^(A₁ h_k) for rational A₁ = p/s:
/// q^s ≤ 2^s |d_k|^(p h).
fn norm_bound_check(card: &FieldCard, q: &BigInt, a1: &Ratio<BigInt>) -> Result<bool> {
    let h = BigInt::from(card.class_number);
    let e = a1 * &h;
    let p = e
        .numer()
        .to_u32()
        .ok_or_else(|| CoreError::CardValidation("A1 h_k numerator too large".into()))?;
    let s = e
        .denom()
        .to_u32()
        .ok_or_else(|| CoreError::CardValidation("A1 denominator too large".into()))?;
    let lhs = q.pow(s);
    let rhs = BigInt::from(2).pow(s) * card.discriminant.abs().pow(p);
    Ok(lhs <= rhs)
}

/// Greedy selection of completely split primes whose classes generate the
/// class group; the first split prime is always taken, later ones only when
/// they enlarge the generated subgroup. Each selected prime gets the
/// canonical ideal above it and a unit-reduced generator of its h-th power.
pub fn select_snew(
    card: &FieldCard,
    group: &ClassGroup,
    cfg: &Config,
) -> Result<Vec<SplitPrimeDatum>> {
    if card.quadratic_d.is_none() {
        return Err(CoreError::Unsupported(
            "split-prime selection requires a quadratic card in this build".into(),
        ));
    }
    let mut data: Vec<SplitPrimeDatum> = Vec::new();
    let mut gen_indices: Vec<usize> = Vec::new();
    let limit = cfg.snew_search_limit.min(10_000_000);
    for &p in arith::small_primes_to(limit.min(10_000_000)) {
        if p > limit {
            break;
        }
        let q = BigInt::from(p);
        if split_type(card, &q)? != SplitType::Split {
            continue;
        }
        let ideal = prime_above(card, &q)?;
        let class_index = group.class_of_ideal(card, &ideal)?;
        let enlarges = {
            let before = group.subgroup(card, &gen_indices)?.len();
            let mut with = gen_indices.clone();
            with.push(class_index);
            group.subgroup(card, &with)?.len() > before
        };
        if data.is_empty() || enlarges {
            let qh = ideal_pow(card, &ideal, card.class_number)?;
            let gamma = match principal_generator(card, &qh, cfg)? {
                PrincipalOutcome::Generator(g) => g,
                PrincipalOutcome::NonPrincipal => {
                    return Err(CoreError::Internal(
                        "q^h_k must be principal but no generator was found".into(),
                    ));
                }
            };
            let alpha = reduce_generator(card, &gamma, cfg)?;
            debug_assert_eq!(card.norm(&alpha)?.abs(), q.pow(card.class_number as u32));
            let height_ok = if card.unit_rank == 0 {
                // H(α)² = |N(α)| exactly at the single complex place.
                card.norm(&alpha)?.abs() == q.pow(card.class_number as u32)
            } else {
                certify_height_bound(card, &alpha, &card.norm(&alpha)?.abs(), cfg)?.is_some()
            };
            data.push(SplitPrimeDatum {
                q: q.clone(),
                class_label: group.label(class_index),
                class_index,
                ideal,
                generator: alpha,
                norm_bound_ok: norm_bound_check(card, &q, &cfg.a1)?,
                height_bound_certified: height_ok,
            });
            gen_indices.push(class_index);
        }
        if group.generates(card, &gen_indices)? {
            return Ok(data);
        }
    }
    Err(CoreError::SearchExhausted {
        what: format!(
            "collecting split primes generating the class group (found {} of order {})",
            gen_indices.len(),
            group.order()
        ),
        limit,
    })
}

/// m = Norm(α_q^ε − β^{24 h_k}) as an exact integer; None when the norm
/// vanishes (those triples are excluded from the set by definition).
///
/// When β lies outside k, the norm from k(β) to k of (γ − β^M) equals
/// γ² − s_M γ + n^M with s_M = β^M + β̄^M, so everything stays exact without
/// ever constructing k(β).
pub fn compute_m2_entry(
    card: &FieldCard,
    datum: &SplitPrimeDatum,
    eps: &ExponentVector,
    w: &WeilNumber,
    cfg: &Config,
) -> Result<Option<M2Entry>> {
    eps.validate()?;
    let m_exp = 24 * card.class_number;
    let gamma = card.group_ring_power(&datum.generator, eps.as_slice())?;
    let beta = beta_in_field(w, card, cfg)?;
    let (m, in_k) = match beta {
        Some(beta) => {
            let bm = card.ring_pow(&beta, m_exp)?;
            (card.norm(&gamma.sub(&bm))?, true)
        }
        None => {
            let s = power_trace(w, m_exp);
            let nm = w.n.pow(m_exp as u32);
            let e = card
                .ring_mul(&gamma, &gamma)?
                .sub(&gamma.scale(&s))
                .add(&RingElement::from_int(nm, card.degree));
            (card.norm(&e)?, false)
        }
    };
    if m.is_zero() {
        return Ok(None);
    }
    Ok(Some(M2Entry {
        q: datum.q.clone(),
        eps: eps.clone(),
        weil_a: w.a.clone(),
        weil_n: w.n.clone(),
        root_choice: w.root_choice,
        beta_in_k: in_k,
        multiplicity: 1,
        m,
    }))
}

/// How the exceptional set is materialized.
#[derive(Debug, Clone)]
pub enum N1Mode {
    /// Exact membership of one prime.
    Membership(BigInt),
    /// Exact listing of N₁ ∩ [2, X].
    ListUpTo(u64),
    /// Best-effort factorization of every entry.
    BestEffortFactor,
}

#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub p: BigInt,
    pub is_member: bool,
    pub in_n0: bool,
    /// Index into the entry list of the first witness.
    pub witness_entry: Option<usize>,
    pub in_t: bool,
    pub in_ram: bool,
}

#[derive(Debug, Clone)]
pub struct ListedPrime {
    pub p: BigInt,
    pub in_n0: bool,
    pub in_t: bool,
    pub in_ram: bool,
}

#[derive(Debug, Clone)]
pub struct UnresolvedCofactor {
    pub entry_index: usize,
    pub cofactor: BigUint,
    pub probable_prime: bool,
}

/// Per-entry factorization status from best-effort mode, index-aligned with
/// the entry list.
#[derive(Debug, Clone)]
pub struct EntryFactorization {
    pub complete: bool,
    pub factors: Vec<(BigUint, u32)>,
    pub cofactor: Option<BigUint>,
    pub cofactor_probable_prime: bool,
}

#[derive(Debug, Clone)]
pub enum N1Outcome {
    Membership(MembershipVerdict),
    List { limit: u64, primes: Vec<ListedPrime> },
    Factored {
        primes: Vec<ListedPrime>,
        entry_factorizations: Vec<EntryFactorization>,
        unresolved: Vec<UnresolvedCofactor>,
    },
}

/// T = {2, 3} ∪ {rational primes under S}.
pub fn t_primes(snew: &[SplitPrimeDatum]) -> Vec<BigInt> {
    let mut t: Vec<BigInt> = vec![BigInt::from(2), BigInt::from(3)];
    for d in snew {
        t.push(d.q.clone());
    }
    t.sort();
    t.dedup();
    t
}

/// Assembles the requested view of N₁ = N₀ ∪ T ∪ Ram from computed entries.
/// Membership and bounded listing are exact and never depend on factoring.
pub fn assemble_n1(
    card: &FieldCard,
    entries: &[M2Entry],
    snew: &[SplitPrimeDatum],
    mode: &N1Mode,
    cfg: &Config,
) -> Result<N1Outcome> {
    let t = t_primes(snew);
    let ram = &card.ramified_primes;
    match mode {
        N1Mode::Membership(p) => {
            let witness = entries.iter().position(|e| arith::divides_query(&e.m, &p.to_biguint().unwrap()));
            let in_t = t.contains(p);
            let in_ram = ram.contains(p);
            Ok(N1Outcome::Membership(MembershipVerdict {
                p: p.clone(),
                is_member: witness.is_some() || in_t || in_ram,
                in_n0: witness.is_some(),
                witness_entry: witness,
                in_t,
                in_ram,
            }))
        }
        N1Mode::ListUpTo(x) => {
            let primes = list_up_to(card, entries, &t, *x)?;
            Ok(N1Outcome::List { limit: *x, primes })
        }
        N1Mode::BestEffortFactor => {
            let mut primes_in_n0: Vec<BigInt> = Vec::new();
            let mut unresolved = Vec::new();
            let mut statuses = Vec::with_capacity(entries.len());
            for (idx, e) in entries.iter().enumerate() {
                let fac = arith::factor_bounded(&e.m, cfg.factor_budget)?;
                for (p, _) in &fac.known_factors {
                    primes_in_n0.push(BigInt::from(p.clone()));
                }
                let complete = fac.is_complete();
                if !complete {
                    unresolved.push(UnresolvedCofactor {
                        entry_index: idx,
                        probable_prime: fac.cofactor_is_probable_prime,
                        cofactor: fac.cofactor.clone(),
                    });
                }
                statuses.push(EntryFactorization {
                    complete,
                    factors: fac.known_factors.clone(),
                    cofactor: if complete { None } else { Some(fac.cofactor) },
                    cofactor_probable_prime: fac.cofactor_is_probable_prime,
                });
            }
            primes_in_n0.sort();
            primes_in_n0.dedup();
            let mut all: Vec<ListedPrime> = Vec::new();
            let mut keys: Vec<BigInt> = primes_in_n0.clone();
            keys.extend(t.iter().cloned());
            keys.extend(ram.iter().cloned());
            keys.sort();
            keys.dedup();
            for p in keys {
                all.push(ListedPrime {
                    in_n0: primes_in_n0.contains(&p),
                    in_t: t.contains(&p),
                    in_ram: ram.contains(&p),
                    p,
                });
            }
            Ok(N1Outcome::Factored { primes: all, entry_factorizations: statuses, unresolved })
        }
    }
}

fn list_up_to(
    card: &FieldCard,
    entries: &[M2Entry],
    t: &[BigInt],
    x: u64,
) -> Result<Vec<ListedPrime>> {
    if x > 10_000_000 {
        return Err(CoreError::Unsupported("listing beyond 10^7 is not supported".into()));
    }
    let mut out = Vec::new();
    for &p in arith::small_primes_to(x.max(2)) {
        if p > x {
            break;
        }
        let pb = BigInt::from(p);
        let in_n0 = entries.iter().any(|e| arith::divides_query(&e.m, &BigUint::from(p)));
        let in_t = t.contains(&pb);
        let in_ram = card.ramified_primes.contains(&pb);
        if in_n0 || in_t || in_ram {
            out.push(ListedPrime { p: pb, in_n0, in_t, in_ram });
        }
    }
    Ok(out)
}

/// The assembled exceptional data for one field.
#[derive(Debug, Clone)]
pub struct ExceptionalReport {
    pub snew: Vec<SplitPrimeDatum>,
    pub exponent_vectors: u64,
    /// Triples (q, ε, β) processed, counting both members of each conjugate
    /// pair outside k.
    pub triples_processed: u64,
    pub zero_norms_excluded: u64,
    pub entries: Vec<M2Entry>,
    /// |α_q^ε| at the distinguished embedding ≤ N(q)^{24h} C₂, all (q, ε).
    pub embedding_bound_all_ok: bool,
    /// |m| ≤ C(k, N(q)) for every entry.
    pub entry_bound_all_ok: bool,
    /// |m| ≤ C(k, 2|d_k|^(A₁ h_k)) for every entry (the global bound).
    pub entries_below_global_bound: bool,
    pub t_primes: Vec<BigInt>,
    pub ram_primes: Vec<BigInt>,
    /// N₁ ∩ [2, list_limit], always included for the report.
    pub n1_list: Vec<ListedPrime>,
    /// Every listed N₁ prime is ≤ the a-priori bound.
    pub n1_below_bound: bool,
    pub outcome: N1Outcome,
    pub constants: BoundConstants,
}

/// Runs the full pipeline for a quadratic card.
pub fn run_exceptional(card: &FieldCard, mode: &N1Mode, cfg: &Config) -> Result<ExceptionalReport> {
    cfg.validate()?;
    let group = class_group(card)?;
    let snew = select_snew(card, &group, cfg)?;
    let constants = bound_constants(card, cfg)?;
    let m_exp = 24 * card.class_number;

    let mut entries: Vec<M2Entry> = Vec::new();
    let mut triples = 0u64;
    let mut zeros = 0u64;
    let mut embedding_ok = true;
    let exponent_vectors = 5u64.pow(card.degree as u32);

    for datum in &snew {
        let fr = enumerate_fr(&datum.q);
        // Partition into members of k (processed per root) and conjugate
        // pairs outside k (processed once with multiplicity 2).
        let mut roots_in_k: Vec<WeilNumber> = Vec::new();
        let mut pairs: Vec<(WeilNumber, u32)> = Vec::new();
        for w in &fr {
            if beta_in_field(w, card, cfg)?.is_some() {
                roots_in_k.push(w.clone());
            } else if w.is_double_root() {
                pairs.push((w.clone(), 1));
            } else if w.root_choice == RootChoice::Upper {
                pairs.push((w.clone(), 2));
            }
        }
        for eps in enumerate_exponents(card.degree, cfg.enumeration_cap)? {
            // Embedding bound |α^ε| ≤ N(q)^{24h} C₂ at the distinguished
            // embedding, certified.
            let gamma = card.group_ring_power(&datum.generator, eps.as_slice())?;
            if !certify_embedding_bound(card, &gamma, &datum.q, m_exp, &constants, cfg)? {
                embedding_ok = false;
            }
            for w in &roots_in_k {
                triples += 1;
                match compute_m2_entry(card, datum, &eps, w, cfg)? {
                    Some(entry) => entries.push(entry),
                    None => zeros += 1,
                }
            }
            for (w, mult) in &pairs {
                triples += *mult as u64;
                match compute_m2_entry(card, datum, &eps, w, cfg)? {
                    Some(mut entry) => {
                        entry.multiplicity = *mult;
                        entries.push(entry);
                    }
                    None => zeros += *mult as u64,
                }
            }
        }
    }

    // |m| ≤ C(k, N(q)) per entry, and |m| ≤ C(k, a) globally.
    let mut entry_bound_ok = true;
    let mut global_bound_ok = true;
    let bits = 256;
    let (_, c2, c2_one) = c1_c2(card, bits)?;
    for e in &entries {
        let a_q = CertifiedMagnitude::Exact(e.weil_n.clone());
        let c_nq = c_of_a(card, &a_q, &c2, c2_one, bits)?;
        if !c_nq.certainly_dominates(&e.m.abs()) {
            entry_bound_ok = false;
        }
        if !constants.bound.certainly_dominates(&e.m.abs()) {
            global_bound_ok = false;
        }
    }

    let t = t_primes(&snew);
    let n1_list = list_up_to(card, &entries, &t, cfg.list_limit)?;
    let n1_below_bound = n1_list.iter().all(|lp| constants.bound.certainly_dominates(&lp.p));
    let outcome = assemble_n1(card, &entries, &snew, mode, cfg)?;

    Ok(ExceptionalReport {
        snew,
        exponent_vectors,
        triples_processed: triples,
        zero_norms_excluded: zeros,
        entries,
        embedding_bound_all_ok: embedding_ok,
        entry_bound_all_ok: entry_bound_ok,
        entries_below_global_bound: global_bound_ok,
        t_primes: t,
        ram_primes: card.ramified_primes.clone(),
        n1_list,
        n1_below_bound,
        outcome,
        constants,
    })
}

/// Certifies |τ(γ)| ≤ N(q)^{24 h} C₂ at the distinguished embedding. With
/// C₂ = 1 the right side is exact, so equality cases (γ rational) certify
/// through point intervals.
fn certify_embedding_bound(
    card: &FieldCard,
    gamma: &RingElement,
    q: &BigInt,
    m_exp: u64,
    constants: &BoundConstants,
    cfg: &Config,
) -> Result<bool> {
    let rhs_exact = q.pow(m_exp as u32);
    for bits in cfg.precision_schedule() {
        let places = card.embeddings_at(bits)?;
        let place = &places[card.distinguished_embedding];
        let tau = card.embed(gamma, place, bits)?;
        let abs = match place.kind {
            crate::field::PlaceKind::Real => tau.re.abs(),
            crate::field::PlaceKind::Complex => tau.abs(bits)?,
        };
        let rhs = if constants.c2_exactly_one {
            Interval::from_int(&rhs_exact)
        } else {
            Interval::from_int(&rhs_exact).mul(&constants.c2, bits)
        };
        if *abs.hi() <= *rhs.lo() {
            return Ok(true);
        }
        if *rhs.hi() < *abs.lo() {
            return Ok(false);
        }
    }
    Ok(false)
}
