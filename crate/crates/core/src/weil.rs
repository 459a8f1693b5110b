//! Quadratic Weil numbers: complex roots β of x² + a x + n with |a| ≤ 2√n,
//! so |β| = √n. Stored symbolically as (a, n) with a root selector, never as
//! floats. Power sums β^m + β̄^m follow the Lucas-style recurrence
//! s_m = -a s_{m-1} - n s_{m-2}.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::config::Config;
use crate::field::{FieldCard, RingElement};
use crate::Result;

/// Which root of x² + a x + n is meant when the two differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    /// Positive imaginary part (or the larger real root).
    Upper,
    /// Negative imaginary part (or the smaller real root).
    Lower,
}

/// A quadratic Weil number β with β² + a β + n = 0 and a² ≤ 4n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilNumber {
    pub a: BigInt,
    pub n: BigInt,
    pub root_choice: RootChoice,
}

impl WeilNumber {
    pub fn new(a: BigInt, n: BigInt, root_choice: RootChoice) -> Self {
        debug_assert!(&a * &a <= &n * 4i32);
        WeilNumber { a, n, root_choice }
    }

    /// Discriminant a² - 4n of the minimal polynomial.
    pub fn poly_disc(&self) -> BigInt {
        &self.a * &self.a - &self.n * 4i32
    }

    pub fn is_double_root(&self) -> bool {
        self.poly_disc().is_zero()
    }

    /// The complex-conjugate root.
    pub fn conjugate(&self) -> WeilNumber {
        let choice = if self.is_double_root() {
            RootChoice::Upper
        } else {
            match self.root_choice {
                RootChoice::Upper => RootChoice::Lower,
                RootChoice::Lower => RootChoice::Upper,
            }
        };
        WeilNumber { a: self.a.clone(), n: self.n.clone(), root_choice: choice }
    }
}

/// All Weil numbers of n: every (a, root) with a² ≤ 4n, the double root
/// (when 4n is a square) emitted once.
pub fn enumerate_fr(n: &BigInt) -> Vec<WeilNumber> {
    assert!(n.is_positive());
    let bound = (n * 4i32).sqrt();
    let mut out = Vec::new();
    let mut a = -bound.clone();
    while a <= bound {
        let disc = &a * &a - n * 4i32;
        if disc.is_zero() {
            out.push(WeilNumber::new(a.clone(), n.clone(), RootChoice::Upper));
        } else {
            out.push(WeilNumber::new(a.clone(), n.clone(), RootChoice::Upper));
            out.push(WeilNumber::new(a.clone(), n.clone(), RootChoice::Lower));
        }
        a += 1;
    }
    out
}

/// Exact power sum s_m = β^m + β̄^m: s_0 = 2, s_1 = -a,
/// s_m = -a s_{m-1} - n s_{m-2}.
pub fn power_trace(w: &WeilNumber, m: u64) -> BigInt {
    let mut prev = BigInt::from(2);
    if m == 0 {
        return prev;
    }
    let mut cur = -w.a.clone();
    for _ in 1..m {
        let next = -&w.a * &cur - &w.n * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Rationality report for β^12 and β^24: β^m is rational exactly when
/// s_m² = 4 n^m, and then β^m = s_m / 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilPowerCheck {
    pub beta12: Option<BigInt>,
    pub beta24: Option<BigInt>,
}

pub fn weil_power_check(w: &WeilNumber) -> WeilPowerCheck {
    let rational_power = |m: u64| -> Option<BigInt> {
        let s = power_trace(w, m);
        let nm = w.n.pow(m as u32);
        if &s * &s == nm * 4i32 {
            Some(s / 2i32)
        } else {
            None
        }
    };
    WeilPowerCheck { beta12: rational_power(12), beta24: rational_power(24) }
}

/// Exact membership of β in the card's field. For a² < 4n the root is
/// imaginary quadratic with discriminant a² - 4n; it lies in k exactly when
/// some recorded imaginary quadratic subfield discriminant d₀ satisfies
/// (a² - 4n) d₀ = (rational square), and then β is reconstructed from the
/// recorded square root of d₀. Rational double roots are always in k.
pub fn beta_in_field(w: &WeilNumber, card: &FieldCard, _cfg: &Config) -> Result<Option<RingElement>> {
    let disc = w.poly_disc();
    if disc.is_zero() {
        // β = -a/2, integral since a² = 4n forces a even.
        let half = -&w.a / 2i32;
        return Ok(Some(RingElement::from_int(half, card.degree)));
    }
    if disc.is_positive() {
        // a² ≤ 4n keeps this unreachable for genuine Weil numbers.
        return Ok(None);
    }
    for sub in &card.imag_quadratic_subfields {
        let prod = &disc * &sub.disc;
        if prod.is_negative() {
            continue;
        }
        let root = prod.sqrt();
        if &root * &root != prod {
            continue;
        }
        // disc = d₀ f² with f = root/|d₀|; β = (-a ± f s)/2 where s² = d₀.
        let d0_abs = sub.disc.abs();
        if !(&root % &d0_abs).is_zero() {
            // disc/d₀ is a square of a non-integer rational; since disc and
            // d₀ are both ≡ 0,1 mod 4 discriminants this cannot give an
            // integral f, and β then has a different field.
            continue;
        }
        let f = &root / &d0_abs;
        let s = &sub.sqrt_coords;
        // Candidate (-a + f s)/2 for the upper root (s has positive
        // imaginary part at the distinguished embedding by construction).
        let sign = match w.root_choice {
            RootChoice::Upper => 1i32,
            RootChoice::Lower => -1i32,
        };
        let num = RingElement::from_int(-w.a.clone(), card.degree)
            .add(&s.scale(&(BigInt::from(sign) * &f)));
        if num.coords.iter().any(|c| c.is_odd()) {
            return Err(crate::CoreError::Internal(
                "Weil number reconstruction is not integral".into(),
            ));
        }
        let beta = RingElement::new(num.coords.iter().map(|c| c / 2i32).collect());
        // β² + aβ + n must vanish exactly.
        let mut check = card.ring_mul(&beta, &beta)?;
        check = check.add(&beta.scale(&w.a));
        check = check.add(&RingElement::from_int(w.n.clone(), card.degree));
        if !check.is_zero() {
            return Err(crate::CoreError::Internal("Weil root verification failed".into()));
        }
        return Ok(Some(beta));
    }
    Ok(None)
}

trait OddCheck {
    fn is_odd(&self) -> bool;
}

impl OddCheck for BigInt {
    fn is_odd(&self) -> bool {
        num_integer::Integer::is_odd(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{ComplexInterval, Interval};
    use crate::quadratic::build_card;

    fn w(a: i64, n: i64) -> WeilNumber {
        WeilNumber::new(BigInt::from(a), BigInt::from(n), RootChoice::Upper)
    }

    #[test]
    fn enumerate_fr_counts() {
        // n = 2: a in {-2..2}, all strict, 10 roots including 1+i at a=-2.
        let fr = enumerate_fr(&BigInt::from(2));
        assert_eq!(fr.len(), 10);
        assert!(fr.iter().any(|x| x.a == BigInt::from(-2)));
        // n = 1: a = ±2 give single (double) roots.
        let fr = enumerate_fr(&BigInt::from(1));
        assert_eq!(fr.len(), 8);
        assert_eq!(fr.iter().filter(|x| x.is_double_root()).count(), 2);
        // n = 5: 18 roots.
        assert_eq!(enumerate_fr(&BigInt::from(5)).len(), 18);
        // n = 3: 14 roots.
        assert_eq!(enumerate_fr(&BigInt::from(3)).len(), 14);
    }

    #[test]
    fn power_trace_examples() {
        // β = 1+i: β^12 = -64, so s_12 = -128.
        assert_eq!(power_trace(&w(-2, 2), 12), BigInt::from(-128));
        assert_eq!(power_trace(&w(-2, 2), 0), BigInt::from(2));
        // β = √3 e^(iπ/6): β^48 = 3^24.
        assert_eq!(power_trace(&w(-3, 3), 48), BigInt::from(3).pow(24) * 2);
    }

    #[test]
    fn weil_power_check_examples() {
        let c = weil_power_check(&w(-2, 2));
        assert_eq!(c.beta12, Some(BigInt::from(-64)));
        assert_eq!(c.beta24, Some(BigInt::from(4096)));

        // a = 0: β² = -q, so β^12 = (-q)^6 = +q^6.
        let c = weil_power_check(&w(0, 7));
        assert_eq!(c.beta12, Some(BigInt::from(7).pow(6)));
        assert_eq!(c.beta24, Some(BigInt::from(7).pow(12)));

        // Primitive sixth root of unity: β^12 = 1.
        let c = weil_power_check(&w(-1, 1));
        assert_eq!(c.beta12, Some(BigInt::from(1)));
        assert_eq!(c.beta24, Some(BigInt::from(1)));

        // Generic member of FR(3) has no rational 12th power.
        let c = weil_power_check(&w(-1, 3));
        assert_eq!(c.beta12, None);
    }

    #[test]
    fn beta_in_field_examples() {
        let cfg = Config::default();
        let qi = build_card(&BigInt::from(-1), &cfg).unwrap();
        // a = -4, n = 5: disc = -4, β = 2 ± i in Q(i).
        let upper = beta_in_field(&w(-4, 5), &qi, &cfg).unwrap().unwrap();
        assert_eq!(upper, RingElement::new(vec![BigInt::from(2), BigInt::from(1)]));
        let lower = beta_in_field(
            &WeilNumber::new(BigInt::from(-4), BigInt::from(5), RootChoice::Lower),
            &qi,
            &cfg,
        )
        .unwrap()
        .unwrap();
        assert_eq!(lower, RingElement::new(vec![BigInt::from(2), BigInt::from(-1)]));

        // √-3 is not in Q(√-5).
        let qm5 = build_card(&BigInt::from(-5), &cfg).unwrap();
        assert!(beta_in_field(&w(-3, 3), &qm5, &cfg).unwrap().is_none());

        // Imaginary β never lies in a real quadratic field.
        let q2 = build_card(&BigInt::from(2), &cfg).unwrap();
        assert!(beta_in_field(&w(-1, 3), &q2, &cfg).unwrap().is_none());

        // Rational double root lies in every field.
        let dbl = beta_in_field(&w(2, 1), &qi, &cfg).unwrap().unwrap();
        assert_eq!(dbl, RingElement::new(vec![BigInt::from(-1), BigInt::zero()]));
    }

    /// β as a complex interval from (a, n): β = (-a ± i√(4n - a²))/2.
    fn beta_interval(w: &WeilNumber, bits: u32) -> ComplexInterval {
        let disc = w.poly_disc();
        assert!(disc.is_negative());
        let half = Interval::point(crate::interval::Dyadic::new(BigInt::from(1), -1));
        let re = Interval::from_int(&-&w.a).mul(&half, bits);
        let im_abs = Interval::from_int(&-disc).sqrt(bits).unwrap().mul(&half, bits);
        let im = match w.root_choice {
            RootChoice::Upper => im_abs,
            RootChoice::Lower => im_abs.neg(),
        };
        ComplexInterval::new(re, im)
    }

    #[test]
    fn power_trace_matches_interval_evaluation() {
        let bits = 320;
        for n in 1i64..=50 {
            let bound = (4.0 * n as f64).sqrt() as i64;
            for a in -bound..=bound {
                if a * a >= 4 * n {
                    continue;
                }
                let wn = w(a, n);
                let b = beta_interval(&wn, bits);
                // β^M + conj(β)^M = 2 Re(β^M).
                for m in [7u64, 50, 200] {
                    let mut p = ComplexInterval::new(Interval::one(), Interval::zero());
                    for _ in 0..m {
                        p = p.mul(&b, bits);
                    }
                    let twice_re = p.re.mul(&Interval::from_i64(2), bits);
                    let s = power_trace(&wn, m);
                    assert!(
                        twice_re.contains_int(&s),
                        "a={a} n={n} m={m}: s={s} not in [{}, {}]",
                        twice_re.lo().to_f64(),
                        twice_re.hi().to_f64()
                    );
                }
            }
        }
    }

    #[test]
    fn conjugate_invariance() {
        for n in [2i64, 3, 5, 11] {
            for wn in enumerate_fr(&BigInt::from(n)) {
                let c = wn.conjugate();
                assert_eq!(power_trace(&wn, 24), power_trace(&c, 24));
                assert_eq!(wn.n, c.n);
                // β β̄ = n exactly: s_m² - (β^m - β̄^m)² = 4 n^m, checked via
                // the defining identity s_{2m} = s_m² - 2 n^m.
                let s12 = power_trace(&wn, 12);
                let s24 = power_trace(&wn, 24);
                assert_eq!(s24, &s12 * &s12 - BigInt::from(n).pow(12) * 2);
            }
        }
    }
}
