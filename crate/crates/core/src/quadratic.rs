//! Automatic field cards for quadratic fields Q(√D): discriminant, class
//! group, fundamental unit, regulator, splitting behaviour, prime ideals,
//! principal generators, and the Hilbert-class-field containment check.
//!
//! Imaginary class groups are realised through reduced positive-definite
//! binary quadratic forms; real (indefinite) class groups through cycles of
//! reduced ideals under the continued-fraction reduction operator ρ, whose
//! orbits are exactly the wide ideal classes. Composition is carried out on
//! ideals in Hermite normal form and transported to forms through the usual
//! form-ideal dictionary, so a single exact multiplication engine backs both
//! cases. All canonical choices (square roots mod p, HNF, generator signs)
//! are deterministic, so repeated runs are bit-identical.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::config::Config;
use crate::field::{quadratic_embeddings, FieldCard, RingElement, SubfieldSqrt};
use crate::interval::{Dyadic, Interval};
use crate::{CoreError, Result};

/// A binary quadratic form a x² + b x y + c y² of discriminant b² - 4ac.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// Reduced positive-definite representative: |b| <= a <= c with b >= 0
    /// whenever |b| = a or a = c. Only valid for negative discriminants.
    pub fn reduce_definite(&self) -> QuadForm {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        let mut c = self.c.clone();
        debug_assert!(self.discriminant().is_negative());
        loop {
            if c < a {
                std::mem::swap(&mut a, &mut c);
                b = -b;
            }
            if b.abs() > a || (&b + &a).is_negative() && b.abs() == a {
                // Translate b into (-a, a].
                let two_a = &a * 2;
                let shifted = (&b + &a).mod_floor(&two_a) - &a;
                let k = (&b - &shifted) / &two_a;
                let new_c = &c - &k * (&b + &shifted).div_floor(&BigInt::from(2));
                b = shifted;
                c = new_c;
                continue;
            }
            if a == c && b.is_negative() {
                b = -b;
                continue;
            }
            if b.abs() == a && b.is_negative() {
                b = -b;
                continue;
            }
            break;
        }
        QuadForm { a, b, c }
    }

    pub fn is_reduced_definite(&self) -> bool {
        *self == self.reduce_definite()
    }
}

/// An integral ideal of O_k in column Hermite normal form over the integral
/// basis (1, ω̂): generated over Z by a·1 and b·1 + c·ω̂ with 0 <= b < a and
/// c dividing both a and b. The norm is a·c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadIdeal {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadIdeal {
    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    /// Content and primitive part: I = content * primitive.
    pub fn primitive(&self) -> (BigInt, QuadIdeal) {
        let content = self.c.clone();
        (
            content.clone(),
            QuadIdeal {
                a: &self.a / &content,
                b: &self.b / &content,
                c: BigInt::one(),
            },
        )
    }

    /// Exact membership test.
    pub fn contains(&self, x: &RingElement) -> bool {
        let (u, v) = (&x.coords[0], &x.coords[1]);
        if !v.mod_floor(&self.c).is_zero() {
            return false;
        }
        let t = v / &self.c;
        (u - &self.b * t).mod_floor(&self.a).is_zero()
    }
}

/// Splitting behaviour of a rational prime in a quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// Outcome of a principality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrincipalOutcome {
    Generator(RingElement),
    NonPrincipal,
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp);
        let tmp = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, tmp);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// HNF of the Z-module spanned by the given elements together with their
/// ω̂-multiples (so the result is an O_k-module).
pub fn ideal_from_generators(card: &FieldCard, gens: &[RingElement]) -> Result<QuadIdeal> {
    let mut items: Vec<(BigInt, BigInt)> = Vec::new();
    let omega = crate::field::basis_element(2, 1);
    for g in gens {
        items.push((g.coords[0].clone(), g.coords[1].clone()));
        let og = card.ring_mul(g, &omega)?;
        items.push((og.coords[0].clone(), og.coords[1].clone()));
    }
    items.retain(|(x, y)| !x.is_zero() || !y.is_zero());
    if items.is_empty() {
        return Err(CoreError::ZeroInput);
    }
    // Combine to a single vector carrying the gcd of the ω̂-components.
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut rationals: Vec<BigInt> = Vec::new();
    for (x, y) in items {
        if y.is_zero() {
            rationals.push(x);
            continue;
        }
        pivot = Some(match pivot {
            None => (x, y),
            Some((px, py)) => {
                let (g, u, v) = ext_gcd(&py, &y);
                let nx = &u * &px + &v * &x;
                // Reduce the other vector to ω̂-component 0.
                let rx = (&py / &g) * &x - (&y / &g) * &px;
                rationals.push(rx);
                (nx, g)
            }
        });
    }
    let (px, py) = pivot.ok_or_else(|| {
        CoreError::Internal("module closure produced no omega component".into())
    })?;
    let mut a = BigInt::zero();
    for r in rationals {
        a = a.gcd(&r);
    }
    if a.is_zero() {
        return Err(CoreError::Internal("ideal of rank < 2".into()));
    }
    let b = px.mod_floor(&a);
    let c = py.abs();
    debug_assert!(a.mod_floor(&c).is_zero() && b.mod_floor(&c).is_zero());
    Ok(QuadIdeal { a, b, c })
}

/// Principal ideal αO_k.
pub fn ideal_of_element(card: &FieldCard, alpha: &RingElement) -> Result<QuadIdeal> {
    ideal_from_generators(card, std::slice::from_ref(alpha))
}

/// Ideal product via HNF of the generator products.
pub fn ideal_mul(card: &FieldCard, i: &QuadIdeal, j: &QuadIdeal) -> Result<QuadIdeal> {
    let gi = [
        RingElement::new(vec![i.a.clone(), BigInt::zero()]),
        RingElement::new(vec![i.b.clone(), i.c.clone()]),
    ];
    let gj = [
        RingElement::new(vec![j.a.clone(), BigInt::zero()]),
        RingElement::new(vec![j.b.clone(), j.c.clone()]),
    ];
    let mut prods = Vec::with_capacity(4);
    for x in &gi {
        for y in &gj {
            prods.push(card.ring_mul(x, y)?);
        }
    }
    ideal_from_generators(card, &prods)
}

/// Ideal power by repeated multiplication.
pub fn ideal_pow(card: &FieldCard, i: &QuadIdeal, e: u64) -> Result<QuadIdeal> {
    let mut acc = QuadIdeal { a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() };
    for _ in 0..e {
        acc = ideal_mul(card, &acc, i)?;
    }
    Ok(acc)
}

/// Field discriminant of Q(√D) for squarefree D.
pub fn field_discriminant(d: &BigInt) -> BigInt {
    if d.mod_floor(&BigInt::from(4)).to_i32() == Some(1) {
        d.clone()
    } else {
        d * 4
    }
}

/// Splitting of p in the field: ramified iff p | d_k, otherwise split iff
/// the Kronecker symbol (d_k/p) is 1.
pub fn split_type(card: &FieldCard, p: &BigInt) -> Result<SplitType> {
    let disc = &card.discriminant;
    if disc.mod_floor(p).is_zero() {
        return Ok(SplitType::Ramified);
    }
    match arith::kronecker(disc, p)? {
        1 => Ok(SplitType::Split),
        _ => Ok(SplitType::Inert),
    }
}

/// The canonical degree-1 prime above a split or ramified p: the pair
/// (p, b) with the smallest nonnegative b satisfying b² = d_k mod 4p.
pub fn prime_above(card: &FieldCard, p: &BigInt) -> Result<QuadIdeal> {
    if split_type(card, p)? == SplitType::Inert {
        return Err(CoreError::InertPrime(p.clone()));
    }
    let delta = &card.discriminant;
    let four_p = p * 4;
    let target = delta.mod_floor(&four_p);
    let b = if p.to_u64() == Some(2) {
        (0..4u8)
            .map(BigInt::from)
            .find(|b| (b * b).mod_floor(&four_p) == target)
            .ok_or_else(|| CoreError::Internal("no square root of disc mod 8".into()))?
    } else {
        let pm = delta.mod_floor(p).to_biguint().unwrap();
        let r = arith::sqrt_mod_prime(&pm, &p.to_biguint().unwrap())
            .ok_or_else(|| CoreError::Internal("split prime without square root".into()))?;
        let r = BigInt::from(r);
        let mut candidates = vec![r.clone(), p - &r, &r + p, &four_p - &r - p];
        candidates.push((p - &r) + p);
        let mut best: Option<BigInt> = None;
        candidates.retain(|x| !x.is_negative() && x < &four_p);
        candidates.sort();
        for cand in candidates {
            if (&cand * &cand).mod_floor(&four_p) == target {
                best = Some(cand);
                break;
            }
        }
        best.ok_or_else(|| CoreError::Internal("no lift of square root mod 4p".into()))?
    };
    // Second generator (b + √Δ)/2 on the integral basis.
    let bcol: BigInt = if delta.is_odd() { (&b - 1i32) / 2i32 } else { &b / 2i32 };
    Ok(QuadIdeal { a: p.clone(), b: bcol.mod_floor(p), c: BigInt::one() })
}

/// Torsion units of the card (the full finite unit group when r_k = 0).
pub fn torsion_units(card: &FieldCard) -> Vec<RingElement> {
    let one = RingElement::one(2);
    match card.torsion_order {
        4 | 6 => {
            // The second basis element is i (D = -1) or a primitive sixth
            // root of unity (D = -3); take its powers and their negatives.
            let g = crate::field::basis_element(2, 1);
            let mut units = vec![one.clone()];
            let mut cur = one;
            for _ in 1..card.torsion_order {
                cur = card.ring_mul(&cur, &g).unwrap();
                units.push(cur.clone());
            }
            units
        }
        _ => vec![one.clone(), one.neg()],
    }
}

// ---------------------------------------------------------------------------
// Real quadratic machinery: ρ-reduction of ideal pairs and exact relative
// generators.

/// Exact element (x + y√Δ)/den of Q(√Δ), gcd-normalized with den > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QuadRat {
    x: BigInt,
    y: BigInt,
    den: BigInt,
}

impl QuadRat {
    fn new(x: BigInt, y: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut q = QuadRat { x, y, den };
        if q.den.is_negative() {
            q.x = -q.x;
            q.y = -q.y;
            q.den = -q.den;
        }
        let g = q.x.gcd(&q.y).gcd(&q.den);
        if g > BigInt::one() {
            q.x /= &g;
            q.y /= &g;
            q.den /= &g;
        }
        q
    }

    fn one() -> Self {
        QuadRat { x: BigInt::one(), y: BigInt::zero(), den: BigInt::one() }
    }

    fn mul(&self, rhs: &Self, delta: &BigInt) -> Self {
        QuadRat::new(
            &self.x * &rhs.x + &self.y * &rhs.y * delta,
            &self.x * &rhs.y + &self.y * &rhs.x,
            &self.den * &rhs.den,
        )
    }

    fn inv(&self, delta: &BigInt) -> Self {
        // 1/((x + y√Δ)/den) = den (x - y√Δ) / (x² - y²Δ)
        let nrm = &self.x * &self.x - &self.y * &self.y * delta;
        QuadRat::new(&self.den * &self.x, -(&self.den * &self.y), nrm)
    }

    fn neg(&self) -> Self {
        QuadRat { x: -&self.x, y: -&self.y, den: self.den.clone() }
    }

    /// Exact test: value > 1 at the embedding with √Δ > 0.
    fn gt_one_plus(&self, delta: &BigInt) -> bool {
        sign_x_plus_y_sqrt(&(&self.x - &self.den), &self.y, delta) > 0
    }

    /// Conversion to integral coordinates over the card basis; errors if the
    /// value is not in O_k.
    fn to_ring_element(&self, card: &FieldCard) -> Result<RingElement> {
        let delta_odd = card.discriminant.is_odd();
        let (num0, num1): (BigInt, BigInt) = if delta_odd {
            // √Δ = 2ω - 1
            (&self.x - &self.y, &self.y * 2)
        } else {
            // √Δ = 2√D = 2 ω̂
            (self.x.clone(), &self.y * 2)
        };
        let (q0, r0) = num0.div_rem(&self.den);
        let (q1, r1) = num1.div_rem(&self.den);
        if !r0.is_zero() || !r1.is_zero() {
            return Err(CoreError::Internal("relative generator is not integral".into()));
        }
        Ok(RingElement::new(vec![q0, q1]))
    }
}

/// Sign of x + y√Δ (Δ > 0 nonsquare), exactly.
fn sign_x_plus_y_sqrt(x: &BigInt, y: &BigInt, delta: &BigInt) -> i32 {
    let sx = x.sign_i32();
    let sy = y.sign_i32();
    if sy == 0 {
        return sx;
    }
    if sx == 0 || sx == sy {
        return sy;
    }
    // Opposite signs: compare x² with y²Δ.
    let x2 = x * x;
    let y2d = y * y * delta;
    match x2.cmp(&y2d) {
        std::cmp::Ordering::Greater => sx,
        std::cmp::Ordering::Less => sy,
        std::cmp::Ordering::Equal => 0,
    }
}

trait SignI32 {
    fn sign_i32(&self) -> i32;
}

impl SignI32 for BigInt {
    fn sign_i32(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// An ideal pair (a, b) standing for aZ + ((b+√Δ)/2)Z with a > 0 and b in
/// the canonical window (⌊√Δ⌋ - 2a, ⌊√Δ⌋].
pub(crate) type Pair = (BigInt, BigInt);

fn canonical_b(delta_isqrt: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    let two_a = a * 2;
    delta_isqrt - (delta_isqrt - b).mod_floor(&two_a)
}

fn pair_is_reduced(delta: &BigInt, delta_isqrt: &BigInt, pair: &Pair) -> bool {
    let (a, b) = pair;
    if !b.is_positive() {
        return false;
    }
    debug_assert!(b <= delta_isqrt);
    let t: BigInt = a * 2i32 - b;
    if !t.is_positive() {
        return true;
    }
    &t * &t < *delta
}

/// One ρ step: continued-fraction reduction of τ = (b+√Δ)/(2a). Returns the
/// next pair and the relative generator λ with I = λ I'.
fn rho_step(delta: &BigInt, delta_isqrt: &BigInt, pair: &Pair) -> (Pair, QuadRat) {
    let (a, b) = pair;
    let two_a = a * 2;
    let n = (b + delta_isqrt).div_floor(&two_a);
    let b1 = b - &two_a * &n;
    let c1: BigInt = (delta - &b1 * &b1) / (a * 4i32);
    debug_assert_eq!(&(delta - &b1 * &b1) % &(a * 4), BigInt::zero());
    let a_next = c1.abs();
    let b_next = canonical_b(delta_isqrt, &a_next, &-&b1);
    let lambda = QuadRat::new(b1, BigInt::one(), &a_next * 2);
    ((a_next, b_next), lambda)
}

/// Walks ρ until the pair is reduced, accumulating the relative generator.
fn reduce_pair(delta: &BigInt, delta_isqrt: &BigInt, start: Pair) -> Result<(Pair, QuadRat)> {
    let mut pair = (start.0.clone(), canonical_b(delta_isqrt, &start.0, &start.1));
    let mut gen = QuadRat::one();
    for _ in 0..10_000 {
        if pair_is_reduced(delta, delta_isqrt, &pair) {
            return Ok((pair, gen));
        }
        let (next, lambda) = rho_step(delta, delta_isqrt, &pair);
        gen = gen.mul(&lambda, delta);
        pair = next;
    }
    Err(CoreError::Internal("ideal reduction did not terminate".into()))
}

/// Pair representation of a primitive ideal (c = 1 required).
fn primitive_ideal_to_pair(card: &FieldCard, ideal: &QuadIdeal) -> Pair {
    debug_assert!(ideal.c.is_one());
    let b_raw = if card.discriminant.is_odd() { &ideal.b * 2 + 1 } else { &ideal.b * 2 };
    (ideal.a.clone(), b_raw)
}

fn pair_to_ideal(card: &FieldCard, pair: &Pair) -> QuadIdeal {
    let (a, b) = pair;
    let bcol: BigInt = if card.discriminant.is_odd() { (b - 1i32).div_floor(&BigInt::from(2)) } else { b.div_floor(&BigInt::from(2)) };
    QuadIdeal { a: a.clone(), b: bcol.mod_floor(a), c: BigInt::one() }
}

/// All reduced pairs of the (positive) discriminant, grouped into ρ-cycles.
fn reduced_cycles(delta: &BigInt) -> Result<Vec<Vec<Pair>>> {
    let isq = delta.sqrt();
    let mut all: Vec<Pair> = Vec::new();
    let mut a = BigInt::one();
    while a <= isq {
        let lo: BigInt = (&isq + 1i32) - &a * 2i32;
        let mut b = lo.max(BigInt::one());
        // Align b² = Δ mod 4a within the canonical window.
        while b <= isq {
            if (&b * &b - delta).mod_floor(&(&a * 4)).is_zero() {
                let pair = (a.clone(), b.clone());
                if pair_is_reduced(delta, &isq, &pair) {
                    all.push(pair);
                }
            }
            b += 1;
        }
        a += 1;
    }
    let mut seen: BTreeMap<(BigInt, BigInt), bool> = BTreeMap::new();
    let mut cycles = Vec::new();
    for start in &all {
        if seen.contains_key(start) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start.clone();
        loop {
            seen.insert(cur.clone(), true);
            cycle.push(cur.clone());
            let (next, _) = rho_step(delta, &isq, &cur);
            debug_assert!(pair_is_reduced(delta, &isq, &next));
            if next == *start {
                break;
            }
            if cycle.len() > 1_000_000 {
                return Err(CoreError::Internal("runaway reduction cycle".into()));
            }
            cur = next;
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Walks the principal cycle once and returns the fundamental unit (value
/// > 1 at the distinguished embedding) as exact coordinates.
fn fundamental_unit(delta: &BigInt) -> Result<QuadRat> {
    let isq = delta.sqrt();
    let parity_target = delta.mod_floor(&BigInt::from(2));
    let mut b0 = isq.clone();
    if b0.mod_floor(&BigInt::from(2)) != parity_target {
        b0 -= 1;
    }
    let start: Pair = (BigInt::one(), b0);
    debug_assert!(pair_is_reduced(delta, &isq, &start));
    let mut pair = start.clone();
    let mut acc = QuadRat::one();
    for _ in 0..10_000_000u64 {
        let (next, lambda) = rho_step(delta, &isq, &pair);
        acc = acc.mul(&lambda, delta);
        pair = next;
        if pair == start {
            // acc generates O_k = acc O_k, so acc is a unit.
            let candidates = [acc.clone(), acc.inv(delta), acc.neg(), acc.inv(delta).neg()];
            for c in candidates {
                if c.gt_one_plus(delta) {
                    return Ok(c);
                }
            }
            return Err(CoreError::Internal("no unit candidate exceeds 1".into()));
        }
    }
    Err(CoreError::Internal("principal cycle did not close".into()))
}

/// Imaginary case: Lagrange-Gauss reduction of the ideal lattice under the
/// positive-definite norm form; the shortest vector generates iff its norm
/// equals the ideal norm.
fn shortest_vector(card: &FieldCard, ideal: &QuadIdeal) -> Result<RingElement> {
    let mut v1 = RingElement::new(vec![ideal.a.clone(), BigInt::zero()]);
    let mut v2 = RingElement::new(vec![ideal.b.clone(), ideal.c.clone()]);
    let norm = |v: &RingElement| -> BigInt { card.norm(v).unwrap() };
    if norm(&v1) < norm(&v2) {
        std::mem::swap(&mut v1, &mut v2);
    }
    loop {
        // round(B(v1,v2)/N(v2)) with B the polarization of the norm form.
        let n2 = norm(&v2);
        let b: BigInt = (norm(&v1.add(&v2)) - norm(&v1) - &n2) / 2i32;
        let t: BigInt = (b * 2i32 + &n2).div_floor(&(&n2 * 2i32));
        let v1_new = v1.sub(&v2.scale(&t));
        v1 = v1_new;
        if norm(&v1) >= norm(&v2) {
            return Ok(v2);
        }
        std::mem::swap(&mut v1, &mut v2);
    }
}

/// Canonical associate: lexicographically largest coordinate vector among
/// the torsion-unit multiples (imaginary), or the sign with positive image
/// at the distinguished real embedding.
fn canonicalize_generator(card: &FieldCard, g: &RingElement, cfg: &Config) -> Result<RingElement> {
    if card.unit_rank == 0 {
        let mut best = g.clone();
        for u in torsion_units(card) {
            let cand = card.ring_mul(g, &u)?;
            if cand.coords > best.coords {
                best = cand;
            }
        }
        Ok(best)
    } else {
        match card.sign_at_real_place(g, card.distinguished_embedding, cfg)? {
            -1 => Ok(g.neg()),
            _ => Ok(g.clone()),
        }
    }
}

/// Principality test with generator recovery.
///
/// Imaginary case: shortest lattice vector. Real case: ρ-reduction walking
/// the cycle of reduced ideals; the ideal is principal iff the cycle
/// contains the unit ideal, and the product of the relative generators
/// recovers a generator exactly.
pub fn principal_generator(
    card: &FieldCard,
    ideal: &QuadIdeal,
    cfg: &Config,
) -> Result<PrincipalOutcome> {
    let (content, prim) = ideal.primitive();
    let delta = &card.discriminant;
    if delta.is_negative() {
        let v = shortest_vector(card, ideal)?;
        let nv = card.norm(&v)?.abs();
        if nv == ideal.norm() {
            let g = canonicalize_generator(card, &v, cfg)?;
            debug_assert_eq!(ideal_of_element(card, &g)?, *ideal);
            return Ok(PrincipalOutcome::Generator(g));
        }
        return Ok(PrincipalOutcome::NonPrincipal);
    }
    // Real case.
    let isq = delta.sqrt();
    let start_pair = primitive_ideal_to_pair(card, &prim);
    let (mut pair, mut acc) = reduce_pair(delta, &isq, start_pair)?;
    let first_reduced = pair.clone();
    let mut found: Option<QuadRat> = None;
    if pair.0.is_one() {
        found = Some(acc.clone());
    }
    if found.is_none() {
        loop {
            let (next, lambda) = rho_step(delta, &isq, &pair);
            acc = acc.mul(&lambda, delta);
            pair = next;
            if pair.0.is_one() {
                found = Some(acc.clone());
                break;
            }
            if pair == first_reduced {
                break;
            }
        }
    }
    match found {
        None => Ok(PrincipalOutcome::NonPrincipal),
        Some(lam) => {
            // prim = lam * O_k, so lam is a generator of the primitive part.
            let g = lam.to_ring_element(card)?;
            let g = RingElement::new(vec![&g.coords[0] * &content, &g.coords[1] * &content]);
            debug_assert_eq!(ideal_of_element(card, &g)?, *ideal);
            let g = canonicalize_generator(card, &g, cfg)?;
            Ok(PrincipalOutcome::Generator(g))
        }
    }
}

/// True iff k contains the Hilbert class field of some imaginary quadratic
/// field. For quadratic k this forces k itself to be imaginary with class
/// number 1.
pub fn hcf_containment_check(card: &FieldCard) -> bool {
    card.discriminant.is_negative() && card.class_number == 1
}

// ---------------------------------------------------------------------------
// Class groups.

enum ClassElems {
    /// Reduced positive-definite forms (imaginary case).
    Definite(Vec<QuadForm>),
    /// Canonical reduced pair per ρ-cycle plus a lookup over every reduced
    /// pair (real case).
    Indefinite { reps: Vec<Pair>, lookup: BTreeMap<Pair, usize> },
}

/// Explicit finite abelian class group with a deterministic element order.
pub struct ClassGroup {
    elems: ClassElems,
    identity: usize,
}

impl ClassGroup {
    pub fn order(&self) -> u64 {
        match &self.elems {
            ClassElems::Definite(v) => v.len() as u64,
            ClassElems::Indefinite { reps, .. } => reps.len() as u64,
        }
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Display label of a class element.
    pub fn label(&self, idx: usize) -> String {
        match &self.elems {
            ClassElems::Definite(v) => {
                let f = &v[idx];
                format!("({}, {}, {})", f.a, f.b, f.c)
            }
            ClassElems::Indefinite { reps, .. } => {
                let (a, b) = &reps[idx];
                format!("[{a}, ({b}+sqrt(D))/2]")
            }
        }
    }

    /// The reduced form representing a class (definite case only).
    pub fn form(&self, idx: usize) -> Option<&QuadForm> {
        match &self.elems {
            ClassElems::Definite(v) => v.get(idx),
            ClassElems::Indefinite { .. } => None,
        }
    }

    pub fn representative_ideal(&self, card: &FieldCard, idx: usize) -> QuadIdeal {
        match &self.elems {
            ClassElems::Definite(v) => {
                let f = &v[idx];
                let delta = &card.discriminant;
                let b = canonical_hnf_b(delta, &f.a, &f.b);
                QuadIdeal { a: f.a.clone(), b, c: BigInt::one() }
            }
            ClassElems::Indefinite { reps, .. } => pair_to_ideal(card, &reps[idx]),
        }
    }

    /// Index of the class of an ideal.
    pub fn class_of_ideal(&self, card: &FieldCard, ideal: &QuadIdeal) -> Result<usize> {
        let (_, prim) = ideal.primitive();
        match &self.elems {
            ClassElems::Definite(v) => {
                let delta = &card.discriminant;
                let b_raw = if delta.is_odd() { &prim.b * 2 + 1 } else { &prim.b * 2 };
                let c = (&b_raw * &b_raw - delta) / (&prim.a * 4);
                let f = QuadForm::new(prim.a.clone(), b_raw, c).reduce_definite();
                v.iter()
                    .position(|g| *g == f)
                    .ok_or_else(|| CoreError::Internal(format!("form {f:?} not in class list")))
            }
            ClassElems::Indefinite { lookup, .. } => {
                let delta = &card.discriminant;
                let isq = delta.sqrt();
                let start = primitive_ideal_to_pair(card, &prim);
                let (reduced, _) = reduce_pair(delta, &isq, start)?;
                lookup
                    .get(&reduced)
                    .copied()
                    .ok_or_else(|| CoreError::Internal("reduced pair not in cycle table".into()))
            }
        }
    }

    /// Index of the class of a form of the card's discriminant.
    pub fn class_of_form(&self, card: &FieldCard, f: &QuadForm) -> Result<usize> {
        if f.discriminant() != card.discriminant {
            return Err(CoreError::CardValidation("form discriminant mismatch".into()));
        }
        let a = f.a.abs();
        let b = canonical_hnf_b(&card.discriminant, &a, &f.b);
        let ideal = QuadIdeal { a, b, c: BigInt::one() };
        self.class_of_ideal(card, &ideal)
    }

    /// Composition (the group law), computed by ideal multiplication of the
    /// canonical representatives.
    pub fn compose(&self, card: &FieldCard, i: usize, j: usize) -> Result<usize> {
        let a = self.representative_ideal(card, i);
        let b = self.representative_ideal(card, j);
        self.class_of_ideal(card, &ideal_mul(card, &a, &b)?)
    }

    pub fn element_order(&self, card: &FieldCard, idx: usize) -> Result<u64> {
        let mut cur = idx;
        let mut n = 1u64;
        while cur != self.identity {
            cur = self.compose(card, cur, idx)?;
            n += 1;
            if n > self.order() {
                return Err(CoreError::Internal("element order exceeds group order".into()));
            }
        }
        Ok(n)
    }

    /// Subgroup generated by the given elements (closure under composition).
    pub fn subgroup(&self, card: &FieldCard, gens: &[usize]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.order() as usize];
        seen[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.compose(card, x, g)?;
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        Ok((0..self.order() as usize).filter(|&i| seen[i]).collect())
    }

    pub fn generates(&self, card: &FieldCard, gens: &[usize]) -> Result<bool> {
        Ok(self.subgroup(card, gens)?.len() as u64 == self.order())
    }

    /// Deterministic greedy generating set with element orders.
    pub fn generators(&self, card: &FieldCard) -> Result<Vec<(usize, u64)>> {
        let mut gens: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        let mut covered = self.subgroup(card, &gens)?;
        for idx in 0..self.order() as usize {
            if covered.len() as u64 == self.order() {
                break;
            }
            if covered.contains(&idx) {
                continue;
            }
            gens.push(idx);
            out.push((idx, self.element_order(card, idx)?));
            covered = self.subgroup(card, &gens)?;
        }
        Ok(out)
    }
}

fn canonical_hnf_b(delta: &BigInt, a: &BigInt, b_form: &BigInt) -> BigInt {
    let bcol: BigInt = if delta.is_odd() { (b_form - 1i32).div_floor(&BigInt::from(2)) } else { b_form.div_floor(&BigInt::from(2)) };
    bcol.mod_floor(a)
}

/// Enumerates all reduced primitive positive-definite forms of the given
/// negative discriminant.
pub fn reduced_definite_forms(delta: &BigInt) -> Vec<QuadForm> {
    debug_assert!(delta.is_negative());
    let abs = delta.abs();
    let bmax = (&abs / 3u8).sqrt();
    let mut out = Vec::new();
    let mut b = if delta.is_odd() { BigInt::one() } else { BigInt::zero() };
    while b <= bmax {
        let m4 = (&b * &b + &abs).div_floor(&BigInt::from(4));
        let mut a = b.clone().max(BigInt::one());
        while &a * &a <= m4 {
            if m4.mod_floor(&a).is_zero() {
                let c = &m4 / &a;
                if a.gcd(&b).gcd(&c).is_one() {
                    out.push(QuadForm::new(a.clone(), b.clone(), c.clone()));
                    if !b.is_zero() && b < a && a < c {
                        out.push(QuadForm::new(a.clone(), -b.clone(), c.clone()));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    out
}

/// Builds the explicit class group of a quadratic card.
pub fn class_group(card: &FieldCard) -> Result<ClassGroup> {
    let delta = &card.discriminant;
    if delta.is_negative() {
        let forms = reduced_definite_forms(delta);
        let principal = principal_form(delta);
        let identity = forms
            .iter()
            .position(|f| *f == principal)
            .ok_or_else(|| CoreError::Internal("principal form missing".into()))?;
        Ok(ClassGroup { elems: ClassElems::Definite(forms), identity })
    } else {
        let cycles = reduced_cycles(delta)?;
        let mut reps: Vec<Pair> = cycles.iter().map(|c| c.iter().min().unwrap().clone()).collect();
        reps.sort();
        let mut lookup = BTreeMap::new();
        for cycle in &cycles {
            let rep = cycle.iter().min().unwrap();
            let idx = reps.iter().position(|r| r == rep).unwrap();
            for pair in cycle {
                lookup.insert(pair.clone(), idx);
            }
        }
        // The principal cycle is the one containing a pair with a = 1.
        let identity = lookup
            .iter()
            .find(|((a, _), _)| a.is_one())
            .map(|(_, &idx)| idx)
            .ok_or_else(|| CoreError::Internal("no principal cycle".into()))?;
        Ok(ClassGroup { elems: ClassElems::Indefinite { reps, lookup }, identity })
    }
}

/// The principal reduced form of a negative discriminant.
pub fn principal_form(delta: &BigInt) -> QuadForm {
    let b = if delta.is_odd() { BigInt::one() } else { BigInt::zero() };
    let c = (&b * &b - delta).div_floor(&BigInt::from(4));
    QuadForm::new(BigInt::one(), b, c)
}

// ---------------------------------------------------------------------------
// Card construction.

/// Sharp height lower-bound constant for degree <= 2 (the degree-2 minimum
/// of the Mahler measure is the golden ratio), rounded down; Voutier's
/// explicit bound (1/4)(log log n / log n)³ for higher degree.
pub fn default_delta(degree: usize) -> Dyadic {
    if degree <= 2 {
        Dyadic::from_decimal_str("0.4812118250596034", false).unwrap().0
    } else {
        let n = Interval::from_i64(degree as i64);
        let ln_n = n.ln(96).unwrap();
        let ll = ln_n.ln(96).unwrap();
        let ratio = ll.div(&ln_n, 96).unwrap();
        let cube = ratio.pow_u64(3, 96);
        cube.mul(&Interval::point(Dyadic::new(BigInt::one(), -2)), 96).lo().clone()
    }
}

/// Builds a complete field card for Q(√D), D squarefree and not 0 or 1.
pub fn build_card(d: &BigInt, cfg: &Config) -> Result<FieldCard> {
    if d.is_zero() || d.is_one() {
        return Err(CoreError::InvalidQuadraticD(d.clone()));
    }
    let fac = arith::factor_bounded(d, cfg.factor_budget)?;
    if !fac.is_complete() && !fac.cofactor_is_probable_prime {
        return Err(CoreError::CardValidation(format!(
            "cannot verify that {d} is squarefree (incomplete factorization)"
        )));
    }
    if fac.known_factors.iter().any(|(_, e)| *e > 1) {
        return Err(CoreError::NotSquarefree(d.clone()));
    }
    let delta = field_discriminant(d);
    let one_mod_4 = delta.is_odd();

    // Integral basis and multiplication table.
    let (symbols, table) = if one_mod_4 {
        let t = (d - 1i32) / 4;
        (
            vec!["1".to_string(), format!("(1+sqrt({d}))/2")],
            vec![
                vec![ivec(1, 0), ivec(0, 1)],
                vec![ivec(0, 1), vec![t, BigInt::one()]],
            ],
        )
    } else {
        (
            vec!["1".to_string(), format!("sqrt({d})")],
            vec![
                vec![ivec(1, 0), ivec(0, 1)],
                vec![ivec(0, 1), vec![d.clone(), BigInt::zero()]],
            ],
        )
    };
    let galois = if one_mod_4 {
        vec![
            vec![ivec(1, 0), ivec(0, 1)],
            vec![ivec(1, 1), ivec(0, -1)],
        ]
    } else {
        vec![
            vec![ivec(1, 0), ivec(0, 1)],
            vec![ivec(1, 0), ivec(0, -1)],
        ]
    };

    let mut ram: Vec<BigInt> = {
        let dfac = arith::factor_bounded(&delta, cfg.factor_budget)?;
        let mut v: Vec<BigInt> =
            dfac.known_factors.iter().map(|(p, _)| BigInt::from(p.clone())).collect();
        if !dfac.is_complete() {
            v.push(BigInt::from(dfac.cofactor));
        }
        v
    };
    ram.sort();

    let embeddings = quadratic_embeddings(d, cfg.precision_start_bits)?;
    let delta_k = cfg.delta_override.clone().unwrap_or_else(|| default_delta(2));

    let mut card = FieldCard {
        degree: 2,
        discriminant: delta.clone(),
        class_number: 0,
        unit_rank: if d.is_positive() { 1 } else { 0 },
        regulator: Interval::one(),
        ramified_primes: ram,
        basis_symbols: symbols,
        mult_table: table,
        galois_matrices: galois,
        embeddings,
        distinguished_embedding: 0,
        fundamental_units: Vec::new(),
        torsion_order: torsion_order_for(d),
        delta_k,
        is_galois_asserted: true,
        hcf_free_asserted: true,
        quadratic_d: Some(d.clone()),
        imag_quadratic_subfields: Vec::new(),
    };

    if d.is_negative() {
        card.class_number = reduced_definite_forms(&delta).len() as u64;
        // √Δ as an element of O_k for imaginary-quadratic membership tests.
        let sqrt_coords = if one_mod_4 { ivec(-1, 2) } else { ivec(0, 2) };
        card.imag_quadratic_subfields = vec![SubfieldSqrt {
            disc: delta.clone(),
            sqrt_coords: RingElement::new(sqrt_coords),
        }];
    } else {
        card.class_number = reduced_cycles(&delta)?.len() as u64;
        let u = fundamental_unit(&delta)?;
        let u_el = u.to_ring_element(&card)?;
        card.fundamental_units = vec![u_el.clone()];
        card.regulator = regulator_of_unit(&card, &u_el, cfg)?;
    }
    card.hcf_free_asserted = !hcf_containment_check(&card);
    Ok(card)
}

fn ivec(a: i64, b: i64) -> Vec<BigInt> {
    vec![BigInt::from(a), BigInt::from(b)]
}

fn torsion_order_for(d: &BigInt) -> u32 {
    match d.to_i64() {
        Some(-1) => 4,
        Some(-3) => 6,
        _ => 2,
    }
}

/// Certified regulator: ln of the fundamental unit at the distinguished
/// embedding, escalated until the radius is below 2^-34 (< 10^-10).
fn regulator_of_unit(card: &FieldCard, u: &RingElement, cfg: &Config) -> Result<Interval> {
    let tol = Dyadic::new(BigInt::one(), -34);
    for bits in cfg.precision_schedule() {
        let places = card.embeddings_at(bits)?;
        let tau = card.embed(u, &places[card.distinguished_embedding], bits)?;
        if !tau.re.lo().is_positive() {
            continue;
        }
        let r = tau.re.ln(bits)?;
        if r.radius() <= tol {
            return Ok(r);
        }
    }
    Err(CoreError::PrecisionExhausted {
        cap: cfg.precision_cap_bits,
        place: Some(card.distinguished_embedding),
    })
}
