//! Certified real interval arithmetic over dyadic numbers.
//!
//! A [`Dyadic`] is an exact value `mant * 2^exp`. An [`Interval`] is a pair
//! of dyadic endpoints; every operation rounds the lower endpoint down and
//! the upper endpoint up, so the true real result is always contained.
//! `exp` and `ln` carry explicit truncation-error bounds, which makes the
//! intervals certificates rather than estimates.
//!
//! Dyadic endpoints serialize to exact decimal strings (a dyadic with
//! nonnegative scale `m * 2^-t` equals `m * 5^t * 10^-t` exactly), so
//! emitted files re-parse to bit-identical values.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{CoreError, Result};

/// An exact dyadic rational `mant * 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
        } else if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz as usize;
                self.exp += tz as i64;
            }
        }
        self
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Dyadic::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &rhs.mant << (rhs.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }

    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Number of bits in the mantissa magnitude.
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// floor(log2 |x|) + 1 for x != 0: the magnitude exponent.
    fn mag_exp(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exp + self.mant.bits() as i64
    }

    /// Round toward -infinity keeping at most `bits` mantissa bits.
    pub fn round_down(&self, bits: u32) -> Self {
        self.round(bits, false)
    }

    /// Round toward +infinity keeping at most `bits` mantissa bits.
    pub fn round_up(&self, bits: u32) -> Self {
        self.round(bits, true)
    }

    fn round(&self, bits: u32, up: bool) -> Self {
        let nbits = self.mant.bits();
        if nbits <= bits as u64 {
            return self.clone();
        }
        let shift = (nbits - bits as u64) as usize;
        let d = BigInt::one() << shift;
        let q = if up {
            self.mant.div_ceil(&d)
        } else {
            self.mant.div_floor(&d)
        };
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// Exact decimal rendering. Always finite since the value is dyadic.
    pub fn to_decimal_string(&self) -> String {
        if self.mant.is_zero() {
            return "0".to_string();
        }
        if self.exp >= 0 {
            return (&self.mant << self.exp as usize).to_string();
        }
        let t = (-self.exp) as u32;
        let scaled = &self.mant * BigInt::from(5u8).pow(t);
        let neg = scaled.is_negative();
        let digits = scaled.magnitude().to_string();
        let (int_part, frac_part) = if digits.len() > t as usize {
            let split = digits.len() - t as usize;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", digits, width = t as usize))
        };
        let frac = frac_part.trim_end_matches('0');
        let sign = if neg { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }

    /// Parses a decimal string. Returns `(value, exact)`: when the decimal is
    /// not exactly dyadic-representable the value is rounded to 192 fraction
    /// bits in the requested direction and `exact` is false.
    pub fn from_decimal_str(s: &str, round_up: bool) -> Result<(Self, bool)> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i32, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(CoreError::CardValidation(format!("bad decimal: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(CoreError::CardValidation(format!("bad decimal: {s:?}")));
        }
        let t = frac_part.len() as u32;
        let mut num: BigInt = digits.parse().map_err(|_| CoreError::CardValidation(format!("bad decimal: {s:?}")))?;
        if sign < 0 {
            num = -num;
        }
        // value = num / 10^t = (num / 5^t) * 2^-t
        let five_t = BigInt::from(5u8).pow(t);
        let (q, r) = num.div_rem(&five_t);
        if r.is_zero() {
            return Ok((Dyadic::new(q, -(t as i64)), true));
        }
        // Inexact: round num * 2^192 / 10^t in the requested direction.
        let extra = 192usize;
        let scaled = num << extra;
        let den = BigInt::from(10u8).pow(t);
        let q = if round_up { scaled.div_ceil(&den) } else { scaled.div_floor(&den) };
        Ok((Dyadic::new(q, -(extra as i64)), false))
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        if bits == 0 {
            return 0.0;
        }
        if bits <= 52 {
            return self.mant.to_f64().unwrap() * 2f64.powi(self.exp.clamp(-2000, 2000) as i32);
        }
        let shift = (bits - 52) as usize;
        let m = (&self.mant >> shift).to_f64().unwrap();
        m * 2f64.powi((self.exp + shift as i64).clamp(-2000, 2000) as i32)
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7FF) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac + (1i64 << 52), biased - 1075)
        };
        Dyadic::new(BigInt::from(sign * mant), exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign | Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

/// A closed real interval with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Interval::point(Dyadic::one())
    }

    pub fn from_int(n: &BigInt) -> Self {
        Interval::point(Dyadic::from_int(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Interval::point(Dyadic::from_i64(n))
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    fn outward(self, bits: u32) -> Self {
        Interval {
            lo: self.lo.round_down(bits),
            hi: self.hi.round_up(bits),
        }
    }

    pub fn add(&self, rhs: &Self, bits: u32) -> Self {
        Interval::new(self.lo.add(&rhs.lo), self.hi.add(&rhs.hi)).outward(bits)
    }

    pub fn sub(&self, rhs: &Self, bits: u32) -> Self {
        self.add(&rhs.neg(), bits)
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, rhs: &Self, bits: u32) -> Self {
        let cands = [
            self.lo.mul(&rhs.lo),
            self.lo.mul(&rhs.hi),
            self.hi.mul(&rhs.lo),
            self.hi.mul(&rhs.hi),
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi).outward(bits)
    }

    /// Division; the divisor interval must have definite sign.
    pub fn div(&self, rhs: &Self, bits: u32) -> Result<Self> {
        if !(rhs.lo.is_positive() || rhs.hi.is_negative()) {
            return Err(CoreError::Internal("division by an interval containing 0".into()));
        }
        let cands = [
            div_dir(&self.lo, &rhs.lo, bits, false),
            div_dir(&self.lo, &rhs.hi, bits, false),
            div_dir(&self.hi, &rhs.lo, bits, false),
            div_dir(&self.hi, &rhs.hi, bits, false),
        ];
        let lo = cands.iter().min().unwrap().clone();
        let cands_up = [
            div_dir(&self.lo, &rhs.lo, bits, true),
            div_dir(&self.lo, &rhs.hi, bits, true),
            div_dir(&self.hi, &rhs.lo, bits, true),
            div_dir(&self.hi, &rhs.hi, bits, true),
        ];
        let hi = cands_up.iter().max().unwrap().clone();
        Ok(Interval::new(lo, hi))
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval::new(Dyadic::zero(), self.lo.abs().max(self.hi.abs()))
        }
    }

    /// max(1, x), the local height factor at one place.
    pub fn max_one(&self) -> Self {
        let one = Dyadic::one();
        Interval::new(self.lo.clone().max(one.clone()), self.hi.clone().max(one))
    }

    pub fn sq(&self, bits: u32) -> Self {
        let a = self.abs();
        Interval::new(a.lo.mul(&a.lo), a.hi.mul(&a.hi)).outward(bits)
    }

    /// Integer power by repeated squaring with outward rounding.
    pub fn pow_u64(&self, e: u64, bits: u32) -> Self {
        let mut acc = Interval::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, bits);
            }
            base = base.mul(&base, bits);
            e >>= 1;
        }
        acc
    }

    /// Square root; requires a nonnegative lower endpoint.
    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        self.nth_root(2, bits)
    }

    /// n-th root; requires a nonnegative lower endpoint.
    pub fn nth_root(&self, n: u32, bits: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(CoreError::Internal("nth_root of an interval below 0".into()));
        }
        Ok(Interval::new(
            root_dir(&self.lo, n, bits, false),
            root_dir(&self.hi, n, bits, true),
        ))
    }

    pub fn exp(&self, bits: u32) -> Self {
        Interval::new(exp_dir(&self.lo, bits, false), exp_dir(&self.hi, bits, true))
    }

    /// Natural logarithm; requires a strictly positive lower endpoint.
    pub fn ln(&self, bits: u32) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(CoreError::Internal("ln of an interval reaching 0".into()));
        }
        Ok(Interval::new(ln_dir(&self.lo, bits, false), ln_dir(&self.hi, bits, true)))
    }

    /// log base 10.
    pub fn log10(&self, bits: u32) -> Result<Self> {
        let l = self.ln(bits)?;
        let ln10 = Interval::new(
            ln_dir(&Dyadic::from_i64(10), bits, false),
            ln_dir(&Dyadic::from_i64(10), bits, true),
        );
        l.div(&ln10, bits)
    }

    pub fn radius(&self) -> Dyadic {
        self.hi.sub(&self.lo).round_up(64).shl(-1)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    /// Relative radius as a crude dyadic upper bound; zero-width gives 0,
    /// intervals containing 0 give an absolute radius instead.
    pub fn rel_radius(&self) -> Dyadic {
        let r = self.radius();
        let m = self.midpoint().abs();
        if m < Dyadic::one() {
            r
        } else {
            // r / m <= r * 2^(1 - mag_exp(m))
            r.shl(1 - m.mag_exp())
        }
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_int(&self, n: &BigInt) -> bool {
        self.contains_dyadic(&Dyadic::from_int(n))
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True only when every point of self is <= every point of rhs.
    pub fn certainly_le(&self, rhs: &Self) -> bool {
        self.hi <= rhs.lo
    }

    pub fn certainly_lt(&self, rhs: &Self) -> bool {
        self.hi < rhs.lo
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// Renders as exact decimal (midpoint, radius) strings after outward
    /// rounding to 192 mantissa bits.
    pub fn to_decimal_pair(&self) -> (String, String) {
        let slim = self.clone().outward(192);
        let mid = slim.midpoint();
        let rad = slim.hi.sub(&mid).max(mid.sub(&slim.lo));
        (mid.to_decimal_string(), rad.to_decimal_string())
    }

    /// Parses a (midpoint, radius) pair of decimal strings, outward-safe.
    pub fn from_decimal_pair(mid: &str, rad: &str) -> Result<Self> {
        let (mid_lo, exact) = Dyadic::from_decimal_str(mid, false)?;
        let (mid_hi, _) = Dyadic::from_decimal_str(mid, true)?;
        let (rad_hi, rad_exact) = Dyadic::from_decimal_str(rad, true)?;
        if rad_hi.is_negative() {
            return Err(CoreError::CardValidation("negative interval radius".into()));
        }
        let mut lo = mid_lo.sub(&rad_hi);
        let mut hi = mid_hi.add(&rad_hi);
        if !exact || !rad_exact {
            // Widen by one ulp at 192 bits for the inexact parse.
            lo = lo.round_down(192);
            hi = hi.round_up(192);
        }
        Ok(Interval::new(lo, hi))
    }
}

/// Directed division a / b at `bits` of precision (b != 0).
fn div_dir(a: &Dyadic, b: &Dyadic, bits: u32, up: bool) -> Dyadic {
    if a.is_zero() {
        return Dyadic::zero();
    }
    debug_assert!(!b.is_zero());
    // Scale the numerator so the quotient carries ~bits+8 significant bits:
    // bits(q) ~ bits(a.mant) + shift - bits(b.mant).
    let shift = (bits as u64 + 8 + b.mant.bits()).saturating_sub(a.mant.bits()) as usize;
    let num = &a.mant << shift;
    let q = if up {
        num.div_ceil(&b.mant)
    } else {
        num.div_floor(&b.mant)
    };
    Dyadic::new(q, a.exp - b.exp - shift as i64).round(bits, up)
}

/// Directed n-th root of a nonnegative dyadic.
fn root_dir(x: &Dyadic, n: u32, bits: u32, up: bool) -> Dyadic {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return Dyadic::zero();
    }
    // Shift so the scaled exponent is divisible by n and the root carries
    // enough bits: x = m * 2^e, pick t with (e - t) = n * s and m << t big.
    let want_bits = (bits as u64 + 4) * n as u64;
    let cur_bits = x.mant.bits();
    let mut t = want_bits.saturating_sub(cur_bits) as i64;
    let rem = (x.exp - t).rem_euclid(n as i64);
    t += rem;
    let s = (x.exp - t) / n as i64;
    let scaled = x.mant.clone() << t as usize;
    let r = scaled.nth_root(n);
    let r = if up {
        // r^n <= scaled < (r+1)^n, so (r+1) * 2^s is an upper bound.
        if r.clone().pow(n) == scaled {
            r
        } else {
            r + BigInt::one()
        }
    } else {
        r
    };
    Dyadic::new(r, s).round(bits, up)
}

/// Directed exp with explicit truncation bounds.
fn exp_dir(x: &Dyadic, bits: u32, up: bool) -> Dyadic {
    if x.is_zero() {
        return Dyadic::one();
    }
    if x.is_negative() {
        // exp(-z) = 1 / exp(z): invert with the opposite rounding.
        let inv = exp_dir(&x.neg(), bits + 8, !up);
        return div_dir(&Dyadic::one(), &inv, bits, up);
    }
    // Argument reduction: y = x / 2^s with y <= 1/2, exp(x) = exp(y)^(2^s).
    let s = (x.mag_exp() + 1).max(0) as u32;
    let p = bits as u64 + 2 * s as u64 + 64;
    let scale = BigInt::one() << p as usize;
    // y as a scaled integer, exact: y = mant * 2^(exp - s + p) * 2^-p.
    let yexp = x.exp - s as i64 + p as i64;
    let y_scaled = if yexp >= 0 {
        &x.mant << yexp as usize
    } else {
        // The mantissa has more precision than the working scale; round it
        // in the direction that keeps the final bound valid.
        let d = BigInt::one() << (-yexp) as usize;
        if up { x.mant.div_ceil(&d) } else { x.mant.div_floor(&d) }
    };
    // Taylor sum of exp(y), scaled by 2^p; directed term-by-term.
    let mut sum = scale.clone();
    let mut term = scale.clone();
    let mut k = BigInt::one();
    let mut steps = 0u64;
    loop {
        let num = &term * &y_scaled;
        let den = &k * &scale;
        term = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
        if term.is_zero() {
            break;
        }
        sum += &term;
        if term <= BigInt::one() && steps > 4 {
            break;
        }
        k += 1;
        steps += 1;
        if steps > p {
            break;
        }
    }
    if up {
        // Remaining tail is below the last term (ratio <= 1/2), plus one
        // ulp per performed floor/ceil step.
        sum += BigInt::from(steps + 4);
    }
    let mut e = Dyadic::new(sum, -(p as i64));
    // Undo the argument reduction by repeated squaring.
    for _ in 0..s {
        e = e.mul(&e).round(bits + 64, up);
    }
    e.round(bits, up)
}

/// Directed natural log via atanh series after mantissa normalization.
fn ln_dir(x: &Dyadic, bits: u32, up: bool) -> Dyadic {
    debug_assert!(x.is_positive());
    if *x == Dyadic::one() {
        return Dyadic::zero();
    }
    let p = bits as u64 + 96;
    let scale = BigInt::one() << p as usize;
    // x = m' * 2^j with m' in [1, 2).
    let j = x.mag_exp() - 1;
    let mbits = x.mant.bits();
    let m_scaled = if mbits as i64 - 1 <= p as i64 {
        &x.mant << (p as usize - (mbits as usize - 1))
    } else {
        let d = BigInt::one() << (mbits as usize - 1 - p as usize);
        if up { x.mant.div_ceil(&d) } else { x.mant.div_floor(&d) }
    };
    // t = (m' - 1) / (m' + 1) in [0, 1/3).
    let num = (&m_scaled - &scale) << p as usize;
    let den = &m_scaled + &scale;
    let t = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
    let atanh = atanh_scaled(&t, &scale, p, up);
    // ln x = 2 * atanh(t) + j * ln 2.
    let mut r = Dyadic::new(atanh, -(p as i64)).shl(1);
    if j != 0 {
        let ln2_up_needed = (j > 0) == up;
        let ln2 = ln2_scaled(p, ln2_up_needed);
        let jln2 = Dyadic::new(ln2 * BigInt::from(j), -(p as i64));
        r = r.add(&jln2);
    }
    r.round(bits, up)
}

/// Scaled atanh: computes round(atanh(t / 2^p) * 2^p) with directed bounds,
/// for 0 <= t <= 2^p / 3 + 1.
fn atanh_scaled(t: &BigInt, scale: &BigInt, p: u64, up: bool) -> BigInt {
    let t2_num = t * t;
    let mut power = t.clone();
    let mut sum = t.clone();
    let mut i = 1u64;
    let mut steps = 0u64;
    loop {
        let num = &power * &t2_num;
        let den = scale * scale;
        power = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
        if power.is_zero() {
            break;
        }
        i += 2;
        let term = if up {
            power.div_ceil(&BigInt::from(i))
        } else {
            power.div_floor(&BigInt::from(i))
        };
        sum += &term;
        if term <= BigInt::one() && steps > 4 {
            break;
        }
        steps += 1;
        if steps > p {
            break;
        }
    }
    if up {
        // Tail is geometric with ratio t^2 <= 1/9, plus ulp slack.
        sum += BigInt::from(steps + 4);
    }
    sum
}

/// Scaled ln 2 = 2 * atanh(1/3).
fn ln2_scaled(p: u64, up: bool) -> BigInt {
    let scale = BigInt::one() << p as usize;
    let three = BigInt::from(3u8);
    let t = if up { scale.div_ceil(&three) } else { scale.div_floor(&three) };
    atanh_scaled(&t, &scale, p, up) << 1
}

/// A rectangular complex interval (real and imaginary parts).
#[derive(Debug, Clone)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::zero() }
    }

    pub fn add(&self, rhs: &Self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.add(&rhs.re, bits),
            im: self.im.add(&rhs.im, bits),
        }
    }

    pub fn mul(&self, rhs: &Self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.mul(&rhs.re, bits).sub(&self.im.mul(&rhs.im, bits), bits),
            im: self.re.mul(&rhs.im, bits).add(&self.im.mul(&rhs.re, bits), bits),
        }
    }

    pub fn scale_int(&self, n: &BigInt, bits: u32) -> Self {
        let f = Interval::from_int(n);
        ComplexInterval {
            re: self.re.mul(&f, bits),
            im: self.im.mul(&f, bits),
        }
    }

    /// |z|^2 as an interval.
    pub fn abs_sq(&self, bits: u32) -> Interval {
        self.re.sq(bits).add(&self.im.sq(bits), bits)
    }

    /// |z| as an interval.
    pub fn abs(&self, bits: u32) -> Result<Interval> {
        self.abs_sq(bits).sqrt(bits)
    }
}

/// Certified interval for sqrt(n), n a nonnegative integer.
pub fn sqrt_int_interval(n: &BigInt, bits: u32) -> Result<Interval> {
    Interval::from_int(n).sqrt(bits)
}

/// Certified log10 of a positive big integer.
pub fn log10_int(n: &BigInt, bits: u32) -> Result<Interval> {
    Interval::from_int(n).outward(bits).log10(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn dyadic_basics() {
        assert_eq!(d(4, 0), d(1, 2));
        assert!(d(1, -1) < d(1, 0));
        assert!(d(-3, 0) < d(1, -10));
        assert_eq!(d(3, -1).add(&d(1, -1)), d(2, 0));
        assert_eq!(d(3, -1).mul(&d(5, 2)), d(15, 1));
        assert_eq!(d(7, -3).to_decimal_string(), "0.875");
        assert_eq!(d(-7, -3).to_decimal_string(), "-0.875");
        assert_eq!(d(5, 1).to_decimal_string(), "10");
    }

    #[test]
    fn dyadic_rounding() {
        let x = d(0b10110111, -4);
        assert!(x.round_down(4) <= x);
        assert!(x.round_up(4) >= x);
        assert!(x.round_down(4).mant_bits() <= 4);
    }

    #[test]
    fn decimal_round_trip_exact() {
        for (m, e) in [(123, -7), (-5, -1), (77, 3), (1, -30)] {
            let x = d(m, e);
            let s = x.to_decimal_string();
            let (back, exact) = Dyadic::from_decimal_str(&s, false).unwrap();
            assert!(exact, "{s}");
            assert_eq!(back, x);
        }
        let (lo, exact) = Dyadic::from_decimal_str("0.1", false).unwrap();
        let (hi, _) = Dyadic::from_decimal_str("0.1", true).unwrap();
        assert!(!exact);
        assert!(lo < hi);
        let tenth_lo = Dyadic::new(BigInt::one() << 192, 0);
        let _ = tenth_lo; // exact 1/10 is not dyadic; bracket it instead
        assert!(lo.mul(&Dyadic::from_i64(10)) < Dyadic::one());
        assert!(hi.mul(&Dyadic::from_i64(10)) > Dyadic::one());
    }

    #[test]
    fn interval_mul_signs() {
        let a = Interval::new(d(-3, 0), d(2, 0));
        let b = Interval::new(d(-1, 0), d(5, 0));
        let p = a.mul(&b, 64);
        assert!(p.contains_dyadic(&d(-15, 0)));
        assert!(p.contains_dyadic(&d(3, 0)));
        assert_eq!(*p.lo(), d(-15, 0));
        assert_eq!(*p.hi(), d(10, 0));
    }

    /// Containment check with one-ulp slack for the f64 reference value.
    fn assert_contains_f64(x: &Interval, v: f64) {
        let eps = Dyadic::from_f64((v.abs() * 1e-15).max(1e-300));
        let v = Dyadic::from_f64(v);
        assert!(
            *x.lo() <= v.add(&eps) && v.sub(&eps) <= *x.hi(),
            "interval [{}, {}] missed {}",
            x.lo().to_f64(),
            x.hi().to_f64(),
            v.to_f64()
        );
    }

    #[test]
    fn sqrt_certified() {
        let s = sqrt_int_interval(&BigInt::from(2), 128).unwrap();
        assert_contains_f64(&s, std::f64::consts::SQRT_2);
        assert!(s.radius().to_f64() < 1e-30);
        let nine = sqrt_int_interval(&BigInt::from(9), 64).unwrap();
        assert_eq!(*nine.lo(), d(3, 0));
        assert_eq!(*nine.hi(), d(3, 0));
    }

    #[test]
    fn nth_root_certified() {
        let x = Interval::from_int(&BigInt::from(5)).nth_root(4, 96).unwrap();
        assert_contains_f64(&x, 5f64.powf(0.25));
        assert!(x.radius().to_f64() < 1e-20);
    }

    #[test]
    fn exp_certified() {
        for (val, expect) in [
            (Dyadic::one(), std::f64::consts::E),
            (d(1, -1), 1.6487212707001282),
            (d(-1, 0), 0.36787944117144233),
            (d(5, 0), 148.4131591025766),
            (Dyadic::zero(), 1.0),
        ] {
            let e = Interval::point(val).exp(128);
            assert_contains_f64(&e, expect);
            assert!(e.radius().to_f64() < 1e-25, "radius {}", e.radius().to_f64());
        }
    }

    #[test]
    fn ln_certified() {
        for (val, expect) in [
            (d(2, 0), std::f64::consts::LN_2),
            (d(10, 0), std::f64::consts::LN_10),
            (d(3, -1), 0.4054651081081644),
        ] {
            let l = Interval::point(val).ln(128).unwrap();
            assert_contains_f64(&l, expect);
            assert!(l.radius().to_f64() < 1e-25);
        }
    }

    #[test]
    fn exp_ln_inverse() {
        for m in [3i64, 7, 100, 12345] {
            let x = Interval::point(d(m, -2));
            let back = x.ln(192).unwrap().exp(192);
            assert!(back.contains_dyadic(&d(m, -2)), "m = {m}");
            assert!(back.rel_radius().to_f64() < 1e-30, "m = {m}, rel {}", back.rel_radius().to_f64());
        }
    }

    #[test]
    fn log10_certified() {
        let l = log10_int(&BigInt::from(1000), 96).unwrap();
        assert!(l.contains_dyadic(&d(3, 0)));
        let big: BigInt = "9".repeat(30).parse().unwrap();
        let l = log10_int(&big, 96).unwrap();
        assert!(l.lo().to_f64() < 30.0 && l.hi().to_f64() > 29.999999);
    }

    #[test]
    fn interval_decimal_pair_round_trip() {
        let x = Interval::new(d(100003, -10), d(100007, -10));
        let (mid, rad) = x.to_decimal_pair();
        let back = Interval::from_decimal_pair(&mid, &rad).unwrap();
        assert!(back.contains(&x));
        let (mid2, rad2) = back.to_decimal_pair();
        assert_eq!(mid, mid2);
        assert_eq!(rad, rad2);
    }
}
