//! Exact arithmetic in the ring of integers O_k of a Galois number field
//! described by a field card, plus certified archimedean data (absolute
//! heights).
//!
//! A [`FieldCard`] carries everything externally certified about the field:
//! invariants (degree, discriminant, class number, unit rank, regulator),
//! an integral basis with its exact multiplication table, the Galois action
//! as integer matrices, interval embeddings for every archimedean place,
//! fundamental units, and the height lower-bound constant δ_k. This module
//! never computes class numbers or units itself; quadratic automation lives
//! in [`crate::quadratic`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::config::Config;
use crate::interval::{ComplexInterval, Dyadic, Interval};
use crate::{CoreError, Result};

/// An element of O_k as exact integer coordinates on the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub coords: Vec<BigInt>,
}

impl RingElement {
    pub fn new(coords: Vec<BigInt>) -> Self {
        RingElement { coords }
    }

    pub fn zero(n: usize) -> Self {
        RingElement { coords: vec![BigInt::zero(); n] }
    }

    /// The rational integer m as m * b_0 (b_0 is always 1).
    pub fn from_int(m: BigInt, n: usize) -> Self {
        let mut coords = vec![BigInt::zero(); n];
        coords[0] = m;
        RingElement { coords }
    }

    pub fn one(n: usize) -> Self {
        Self::from_int(BigInt::one(), n)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RingElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RingElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RingElement { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, m: &BigInt) -> Self {
        RingElement { coords: self.coords.iter().map(|a| a * m).collect() }
    }
}

/// Kind of archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaceKind {
    Real,
    Complex,
}

/// Interval approximations of every basis element at one archimedean place.
#[derive(Debug, Clone)]
pub struct EmbeddingPlace {
    pub kind: PlaceKind,
    pub basis_values: Vec<ComplexInterval>,
}

/// An imaginary quadratic subfield record: an element s of O_k with
/// s² equal to the subfield discriminant, enabling exact membership tests
/// for imaginary quadratic numbers.
#[derive(Debug, Clone)]
pub struct SubfieldSqrt {
    pub disc: BigInt,
    pub sqrt_coords: RingElement,
}

/// Complete arithmetic description of a Galois number field.
#[derive(Debug, Clone)]
pub struct FieldCard {
    pub degree: usize,
    pub discriminant: BigInt,
    pub class_number: u64,
    pub unit_rank: usize,
    pub regulator: Interval,
    pub ramified_primes: Vec<BigInt>,
    pub basis_symbols: Vec<String>,
    /// Coordinates of b_i * b_j on the basis: `mult_table[i][j][k]`.
    pub mult_table: Vec<Vec<Vec<BigInt>>>,
    /// Action of each Galois element as a matrix (column j = image of b_j).
    pub galois_matrices: Vec<Vec<Vec<BigInt>>>,
    pub embeddings: Vec<EmbeddingPlace>,
    /// Index of the fixed inclusion k ↪ C used for one-embedding bounds.
    pub distinguished_embedding: usize,
    pub fundamental_units: Vec<RingElement>,
    pub torsion_order: u32,
    /// Lower-bound constant: log H(α) ≥ δ_k / n_k for non-torsion α ≠ 0.
    pub delta_k: Dyadic,
    pub is_galois_asserted: bool,
    /// True when k contains no Hilbert class field of an imaginary
    /// quadratic field (verified for quadratic cards, asserted otherwise).
    pub hcf_free_asserted: bool,
    /// For cards of quadratic provenance: the squarefree D with k = Q(√D),
    /// letting embeddings be regenerated at arbitrary precision.
    pub quadratic_d: Option<BigInt>,
    pub imag_quadratic_subfields: Vec<SubfieldSqrt>,
}

impl FieldCard {
    fn check_len(&self, x: &RingElement) -> Result<()> {
        if x.coords.len() != self.degree {
            return Err(CoreError::DimensionMismatch {
                expected: self.degree,
                got: x.coords.len(),
            });
        }
        Ok(())
    }

    /// Product via the multiplication table; exact.
    #[allow(clippy::needless_range_loop)]
    pub fn ring_mul(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check_len(x)?;
        self.check_len(y)?;
        let n = self.degree;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coords[j].is_zero() {
                    continue;
                }
                let f = &x.coords[i] * &y.coords[j];
                for k in 0..n {
                    let t = &self.mult_table[i][j][k];
                    if !t.is_zero() {
                        out[k] += &f * t;
                    }
                }
            }
        }
        Ok(RingElement::new(out))
    }

    /// x^e by binary exponentiation; exact.
    pub fn ring_pow(&self, x: &RingElement, e: u64) -> Result<RingElement> {
        let mut acc = RingElement::one(self.degree);
        let mut base = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ring_mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.ring_mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Applies the Galois element with the given index (matrix-vector).
    pub fn galois_apply(&self, sigma: usize, x: &RingElement) -> Result<RingElement> {
        if sigma >= self.galois_matrices.len() {
            return Err(CoreError::GaloisIndexOutOfRange(sigma));
        }
        self.check_len(x)?;
        let m = &self.galois_matrices[sigma];
        let n = self.degree;
        let mut out = vec![BigInt::zero(); n];
        for (i, row) in m.iter().enumerate() {
            for (j, mij) in row.iter().enumerate() {
                if !mij.is_zero() {
                    out[i] += mij * &x.coords[j];
                }
            }
        }
        Ok(RingElement::new(out))
    }

    /// Field norm: determinant of the multiplication-by-x matrix; exact and
    /// multiplicative.
    #[allow(clippy::needless_range_loop)]
    pub fn norm(&self, x: &RingElement) -> Result<BigInt> {
        self.check_len(x)?;
        let n = self.degree;
        // Column j = coordinates of x * b_j.
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for j in 0..n {
            for i in 0..n {
                if x.coords[i].is_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = &self.mult_table[i][j][k];
                    if !t.is_zero() {
                        m[k][j] += &x.coords[i] * t;
                    }
                }
            }
        }
        Ok(det_bareiss(m))
    }

    /// ∏_σ σ(x)^{a_σ}, the group-ring exponent action, computed exactly by
    /// square-and-multiply per factor.
    pub fn group_ring_power(&self, x: &RingElement, exponents: &[u64]) -> Result<RingElement> {
        if exponents.len() != self.galois_matrices.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.galois_matrices.len(),
                got: exponents.len(),
            });
        }
        let mut acc = RingElement::one(self.degree);
        for (sigma, &a) in exponents.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let image = self.galois_apply(sigma, x)?;
            acc = self.ring_mul(&acc, &self.ring_pow(&image, a)?)?;
        }
        Ok(acc)
    }

    /// Embedding intervals of every basis element at every archimedean
    /// place, at the requested precision. Cards of quadratic provenance are
    /// regenerated exactly; stored embeddings are returned as-is (their
    /// stated radius is then the precision floor).
    pub fn embeddings_at(&self, bits: u32) -> Result<Vec<EmbeddingPlace>> {
        if let Some(d) = &self.quadratic_d {
            return quadratic_embeddings(d, bits);
        }
        Ok(self.embeddings.clone())
    }

    /// τ(x) at one place as a complex interval.
    pub fn embed(
        &self,
        x: &RingElement,
        place: &EmbeddingPlace,
        bits: u32,
    ) -> Result<ComplexInterval> {
        self.check_len(x)?;
        let mut acc = ComplexInterval::real(Interval::zero());
        for (c, b) in x.coords.iter().zip(&place.basis_values) {
            if !c.is_zero() {
                acc = acc.add(&b.scale_int(c, bits), bits);
            }
        }
        Ok(acc)
    }

    /// |τ(x)| at the place with the given index, with precision escalation
    /// until the relative radius is below 2^-tol_bits.
    pub fn abs_at_place(
        &self,
        x: &RingElement,
        place_idx: usize,
        tol_bits: u32,
        cfg: &Config,
    ) -> Result<Interval> {
        for bits in cfg.precision_schedule() {
            let places = self.embeddings_at(bits)?;
            let place = places
                .get(place_idx)
                .ok_or_else(|| CoreError::Internal(format!("no place {place_idx}")))?;
            let tau = self.embed(x, place, bits)?;
            let a = match place.kind {
                PlaceKind::Real => tau.re.abs(),
                PlaceKind::Complex => tau.abs(bits)?,
            };
            if rel_radius_ok(&a, tol_bits) {
                return Ok(a);
            }
        }
        Err(CoreError::PrecisionExhausted { cap: cfg.precision_cap_bits, place: Some(place_idx) })
    }

    /// Absolute height H(x) = (∏_v max(1, ‖x‖_v))^(1/n) as a certified
    /// interval. Only archimedean places contribute for algebraic integers;
    /// ‖x‖_v is |τx| at real places and |τx|² at complex places. Precision
    /// escalates until the relative radius is below 2^-tol_bits or the cap
    /// is reached.
    pub fn height(&self, x: &RingElement, tol_bits: u32, cfg: &Config) -> Result<Interval> {
        if x.is_zero() {
            return Err(CoreError::ZeroInput);
        }
        let mut undecided_place = None;
        for bits in cfg.precision_schedule() {
            let places = self.embeddings_at(bits)?;
            let mut prod = Interval::one();
            undecided_place = None;
            for (idx, place) in places.iter().enumerate() {
                let tau = self.embed(x, place, bits)?;
                let local = match place.kind {
                    PlaceKind::Real => tau.re.abs(),
                    PlaceKind::Complex => tau.abs_sq(bits),
                };
                if local.lo() < &Dyadic::one() && local.hi() > &Dyadic::one() {
                    undecided_place = Some(idx);
                }
                prod = prod.mul(&local.max_one(), bits);
            }
            let h = prod.nth_root(self.degree as u32, bits)?;
            if rel_radius_ok(&h, tol_bits) {
                return Ok(h);
            }
        }
        Err(CoreError::PrecisionExhausted {
            cap: cfg.precision_cap_bits,
            place: undecided_place,
        })
    }

    /// Sign of τ(x) at a real place, determined by escalation (exact inputs
    /// make the sign decidable unless x = 0).
    pub fn sign_at_real_place(
        &self,
        x: &RingElement,
        place_idx: usize,
        cfg: &Config,
    ) -> Result<i32> {
        if x.is_zero() {
            return Ok(0);
        }
        for bits in cfg.precision_schedule() {
            let places = self.embeddings_at(bits)?;
            let place = &places[place_idx];
            if place.kind != PlaceKind::Real {
                return Err(CoreError::Internal("sign query at a complex place".into()));
            }
            let tau = self.embed(x, place, bits)?;
            if tau.re.lo().is_positive() {
                return Ok(1);
            }
            if tau.re.hi().is_negative() {
                return Ok(-1);
            }
        }
        Err(CoreError::PrecisionExhausted { cap: cfg.precision_cap_bits, place: Some(place_idx) })
    }

    /// Structural validation: shapes, identity element, Galois matrices
    /// forming a group of ring automorphisms of the declared order, unit
    /// norms, and ramified primes matching the discriminant.
    pub fn validate(&self) -> Result<()> {
        let n = self.degree;
        if n == 0 {
            return Err(CoreError::CardValidation("degree must be positive".into()));
        }
        if self.basis_symbols.len() != n || self.mult_table.len() != n {
            return Err(CoreError::CardValidation("basis/table shape mismatch".into()));
        }
        for row in &self.mult_table {
            if row.len() != n || row.iter().any(|c| c.len() != n) {
                return Err(CoreError::CardValidation("multiplication table shape".into()));
            }
        }
        // b_0 must be the ring identity.
        for j in 0..n {
            for k in 0..n {
                let expect = if j == k { BigInt::one() } else { BigInt::zero() };
                if self.mult_table[0][j][k] != expect {
                    return Err(CoreError::CardValidation("b_0 is not the identity".into()));
                }
            }
        }
        // Archimedean shape: degree = r1 + 2 r2, unit rank = r1 + r2 - 1.
        let r1 = self.embeddings.iter().filter(|p| p.kind == PlaceKind::Real).count();
        let r2 = self.embeddings.iter().filter(|p| p.kind == PlaceKind::Complex).count();
        if r1 + 2 * r2 != n {
            return Err(CoreError::CardValidation(format!(
                "places give degree {} != {}",
                r1 + 2 * r2,
                n
            )));
        }
        if r1 + r2 == 0 || self.unit_rank != r1 + r2 - 1 {
            return Err(CoreError::CardValidation("unit rank inconsistent with places".into()));
        }
        if self.distinguished_embedding >= self.embeddings.len() {
            return Err(CoreError::CardValidation("distinguished embedding out of range".into()));
        }
        if self.fundamental_units.len() != self.unit_rank {
            return Err(CoreError::CardValidation("fundamental unit count".into()));
        }
        if self.galois_matrices.len() != n {
            return Err(CoreError::CardValidation("Galois group order must equal degree".into()));
        }
        if !is_identity_matrix(&self.galois_matrices[0]) {
            return Err(CoreError::CardValidation("first Galois element must be identity".into()));
        }
        for s in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let bi = basis_element(n, i);
                    let bj = basis_element(n, j);
                    let lhs = self.galois_apply(s, &self.ring_mul(&bi, &bj)?)?;
                    let rhs =
                        self.ring_mul(&self.galois_apply(s, &bi)?, &self.galois_apply(s, &bj)?)?;
                    if lhs != rhs {
                        return Err(CoreError::CardValidation(format!(
                            "Galois element {s} is not a ring automorphism"
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let prod = mat_mul(&self.galois_matrices[a], &self.galois_matrices[b]);
                if !self.galois_matrices.contains(&prod) {
                    return Err(CoreError::CardValidation("Galois matrices not closed".into()));
                }
            }
        }
        for u in &self.fundamental_units {
            let nu = self.norm(u)?;
            if nu.abs() != BigInt::one() {
                return Err(CoreError::CardValidation("fundamental unit has |norm| != 1".into()));
            }
        }
        // Ramified primes are exactly the prime divisors of the discriminant.
        let fac = arith::factor_bounded(&self.discriminant, 2_000_000)?;
        if !fac.is_complete() && !fac.cofactor_is_probable_prime {
            return Err(CoreError::CardValidation(
                "discriminant could not be factored to verify ramified primes".into(),
            ));
        }
        let mut disc_primes: Vec<BigInt> =
            fac.known_factors.iter().map(|(p, _)| BigInt::from(p.clone())).collect();
        if !fac.is_complete() {
            disc_primes.push(BigInt::from(fac.cofactor.clone()));
        }
        disc_primes.sort();
        let mut declared = self.ramified_primes.clone();
        declared.sort();
        if disc_primes != declared {
            return Err(CoreError::CardValidation(
                "ramified primes do not match the discriminant".into(),
            ));
        }
        if !self.delta_k.is_positive() {
            return Err(CoreError::CardValidation("delta_k must be positive".into()));
        }
        for sub in &self.imag_quadratic_subfields {
            let sq = self.ring_mul(&sub.sqrt_coords, &sub.sqrt_coords)?;
            if sq != RingElement::from_int(sub.disc.clone(), n) {
                return Err(CoreError::CardValidation(
                    "imaginary quadratic subfield square root is wrong".into(),
                ));
            }
        }
        Ok(())
    }
}

pub(crate) fn basis_element(n: usize, i: usize) -> RingElement {
    let mut coords = vec![BigInt::zero(); n];
    coords[i] = BigInt::one();
    RingElement::new(coords)
}

fn is_identity_matrix(m: &[Vec<BigInt>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| *v == if i == j { BigInt::one() } else { BigInt::zero() })
    })
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Fraction-free Gaussian elimination (Bareiss); exact integer determinant.
fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

fn rel_radius_ok(x: &Interval, tol_bits: u32) -> bool {
    let r = x.rel_radius();
    r.is_zero() || r <= Dyadic::new(BigInt::one(), -(tol_bits as i64))
}

/// Embeddings of the standard quadratic basis at the given precision:
/// (1, √D) for D ≡ 2, 3 mod 4 and (1, (1+√D)/2) for D ≡ 1 mod 4.
pub fn quadratic_embeddings(d: &BigInt, bits: u32) -> Result<Vec<EmbeddingPlace>> {
    let one = ComplexInterval::real(Interval::one());
    let sqrt_abs = Interval::from_int(&d.abs()).sqrt(bits)?;
    let one_mod_4 = d.mod_floor(&BigInt::from(4)).to_i32() == Some(1);
    let half = Interval::point(Dyadic::new(BigInt::one(), -1));
    if d.is_positive() {
        let make = |s: Interval| -> ComplexInterval {
            if one_mod_4 {
                ComplexInterval::real(Interval::one().add(&s, bits).mul(&half, bits))
            } else {
                ComplexInterval::real(s)
            }
        };
        Ok(vec![
            EmbeddingPlace { kind: PlaceKind::Real, basis_values: vec![one.clone(), make(sqrt_abs.clone())] },
            EmbeddingPlace { kind: PlaceKind::Real, basis_values: vec![one, make(sqrt_abs.neg())] },
        ])
    } else {
        let omega = if one_mod_4 {
            ComplexInterval::new(half.clone(), sqrt_abs.mul(&half, bits))
        } else {
            ComplexInterval::new(Interval::zero(), sqrt_abs)
        };
        Ok(vec![EmbeddingPlace { kind: PlaceKind::Complex, basis_values: vec![one, omega] }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::build_card;
    use proptest::prelude::*;

    fn el(a: i64, b: i64) -> RingElement {
        RingElement::new(vec![BigInt::from(a), BigInt::from(b)])
    }

    fn card_m5() -> FieldCard {
        build_card(&BigInt::from(-5), &Config::default()).unwrap()
    }

    #[test]
    fn ring_mul_examples() {
        let card = card_m5();
        assert_eq!(card.ring_mul(&el(1, 0), &el(1, 0)).unwrap(), el(1, 0));
        assert_eq!(card.ring_mul(&el(0, 1), &el(0, 1)).unwrap(), el(-5, 0));
        assert_eq!(card.ring_mul(&el(2, -1), &el(2, 1)).unwrap(), el(9, 0));
        assert!(card.ring_mul(&RingElement::new(vec![BigInt::one()]), &el(1, 0)).is_err());
    }

    #[test]
    fn galois_examples() {
        let card = card_m5();
        let x = el(2, -1);
        assert_eq!(card.galois_apply(0, &x).unwrap(), x);
        assert_eq!(card.galois_apply(1, &x).unwrap(), el(2, 1));
        let twice = card.galois_apply(1, &card.galois_apply(1, &x).unwrap()).unwrap();
        assert_eq!(twice, x);
        assert!(card.galois_apply(2, &x).is_err());
    }

    #[test]
    fn norm_examples() {
        let card = card_m5();
        assert_eq!(card.norm(&el(1, 0)).unwrap(), BigInt::one());
        assert_eq!(card.norm(&el(2, -1)).unwrap(), BigInt::from(9));
        assert_eq!(card.norm(&el(0, 1)).unwrap(), BigInt::from(5));
    }

    #[test]
    fn group_ring_power_examples() {
        let card = card_m5();
        let x = el(2, -1);
        assert_eq!(card.group_ring_power(&x, &[0, 0]).unwrap(), RingElement::one(2));
        assert_eq!(card.group_ring_power(&x, &[1, 0]).unwrap(), x);
        let all24 = card.group_ring_power(&x, &[24, 24]).unwrap();
        let nine24 = BigInt::from(9).pow(24);
        assert_eq!(all24, RingElement::new(vec![nine24, BigInt::zero()]));
    }

    #[test]
    fn height_examples() {
        let cfg = Config::default();
        let card = card_m5();
        // A torsion unit has height exactly 1.
        let h = card.height(&el(-1, 0), 44, &cfg).unwrap();
        assert!(h.contains_int(&BigInt::one()));
        assert!(h.radius().to_f64() < 1e-12);
        // H(√-5) = 5^(1/2).
        let h = card.height(&el(0, 1), 44, &cfg).unwrap();
        assert!((h.to_f64() - 5f64.sqrt()).abs() < 1e-10);
        // H(1 + √2) = (1 + √2)^(1/2) in Q(√2).
        let card2 = build_card(&BigInt::from(2), &Config::default()).unwrap();
        let h = card2.height(&el(1, 1), 44, &cfg).unwrap();
        assert!((h.to_f64() - (1.0 + 2f64.sqrt()).sqrt()).abs() < 1e-10);
        assert!((h.to_f64() - 1.55377397403004).abs() < 1e-8);
    }

    #[test]
    fn height_torsion_unit_invariance() {
        let cfg = Config::default();
        for d in [-1i64, -3, -5] {
            let card = build_card(&BigInt::from(d), &cfg).unwrap();
            let x = el(3, -2);
            let hx = card.height(&x, 44, &cfg).unwrap();
            for u in crate::quadratic::torsion_units(&card) {
                let ux = card.ring_mul(&u, &x).unwrap();
                let hux = card.height(&ux, 44, &cfg).unwrap();
                // Same real number: the certified intervals must overlap.
                assert!(
                    !(hx.certainly_lt(&hux) || hux.certainly_lt(&hx)),
                    "D = {d}, u = {u:?}"
                );
            }
        }
    }

    #[test]
    fn height_of_zero_rejected() {
        let card = card_m5();
        assert!(matches!(
            card.height(&RingElement::zero(2), 44, &Config::default()),
            Err(CoreError::ZeroInput)
        ));
    }

    #[test]
    fn validate_accepts_built_cards() {
        for d in [-5i64, -1, -3, 2, 5, -23] {
            let card = build_card(&BigInt::from(d), &Config::default()).unwrap();
            card.validate().unwrap_or_else(|e| panic!("D = {d}: {e}"));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn norm_multiplicative(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
            let card = card_m5();
            let x = el(a, b);
            let y = el(c, d);
            let nx = card.norm(&x).unwrap();
            let ny = card.norm(&y).unwrap();
            let nxy = card.norm(&card.ring_mul(&x, &y).unwrap()).unwrap();
            prop_assert_eq!(nxy, nx * ny);
        }

        #[test]
        fn norm_galois_invariant(a in -50i64..50, b in -50i64..50) {
            let card = card_m5();
            let x = el(a, b);
            let n0 = card.norm(&x).unwrap();
            let n1 = card.norm(&card.galois_apply(1, &x).unwrap()).unwrap();
            prop_assert_eq!(n0, n1);
        }

        #[test]
        fn embedding_product_contains_norm(a in -30i64..30, b in -30i64..30, d in prop::sample::select(vec![-5i64, -1, 2, 5, -23, 10])) {
            let cfg = Config::default();
            let card = build_card(&BigInt::from(d), &cfg).unwrap();
            let x = el(a, b);
            if !x.is_zero() {
                let n = card.norm(&x).unwrap();
                let bits = 192;
                let places = card.embeddings_at(bits).unwrap();
                let mut prod = Interval::one();
                for place in &places {
                    let tau = card.embed(&x, place, bits).unwrap();
                    let f = match place.kind {
                        PlaceKind::Real => tau.re,
                        PlaceKind::Complex => tau.abs_sq(bits),
                    };
                    prod = prod.mul(&f, bits);
                }
                prop_assert!(prod.contains_int(&n), "norm {} not in [{}, {}]", n, prod.lo().to_f64(), prod.hi().to_f64());
            }
        }

        #[test]
        fn height_power_identity(a in -9i64..9, b in -9i64..9, m in 1u32..4) {
            let cfg = Config::default();
            let card = card_m5();
            let x = el(a, b);
            if !x.is_zero() {
                let hx = card.height(&x, 40, &cfg).unwrap();
                let xm = card.ring_pow(&x, m as u64).unwrap();
                let hxm = card.height(&xm, 40, &cfg).unwrap();
                let hx_m = hx.pow_u64(m as u64, 256);
                // The two intervals bracket the same real number.
                prop_assert!(!(hxm.certainly_lt(&hx_m) || hx_m.certainly_lt(&hxm)));
            }
        }
    }
}
