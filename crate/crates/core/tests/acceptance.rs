//! Acceptance suite: every criterion below prints one PASS line (the test
//! name carries the criterion number). Run with
//! `cargo test -p shimura-core --test acceptance -- --nocapture` to see the
//! lines; any failure fails the corresponding test.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use shimura_core::arith;
use shimura_core::config::Config;
use shimura_core::exceptional::{
    assemble_n1, enumerate_exponents, run_exceptional, N1Mode, N1Outcome,
};
use shimura_core::field::PlaceKind;
use shimura_core::gate::{certify, ConclusionBranch};
use shimura_core::interval::Interval;
use shimura_core::quadratic::{
    build_card, class_group, ideal_pow, prime_above, principal_generator, reduced_definite_forms,
    split_type, PrincipalOutcome, SplitType,
};
use shimura_core::quaternion::validate_disc;
use shimura_core::schema;
use shimura_core::weil::{enumerate_fr, weil_power_check};
use shimura_core::RingElement;

fn pass(criterion: u32, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS - {detail}");
}

fn el(a: i64, b: i64) -> RingElement {
    RingElement::new(vec![BigInt::from(a), BigInt::from(b)])
}

#[test]
fn criterion_1_weil_example() {
    let t0 = Instant::now();
    let fr = enumerate_fr(&BigInt::from(2));
    let target = fr
        .iter()
        .find(|w| w.a == BigInt::from(-2) && w.n == BigInt::from(2))
        .expect("(a = -2, n = 2) must be enumerated");
    let check = weil_power_check(target);
    assert_eq!(check.beta12, Some(BigInt::from(-64)));
    assert_eq!(check.beta24, Some(BigInt::from(4096)));
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, &format!("beta = 1+i has beta^12 = -64, beta^24 = 4096 ({elapsed:?})"));
}

/// Shared end-to-end run for criteria 2, 3, 5 and 9.
fn criterion_2_config() -> Config {
    Config { list_limit: 1000, ..Config::default() }
}

#[test]
fn criterion_2_end_to_end_q_sqrt_m5() {
    let t0 = Instant::now();
    let cfg = criterion_2_config();
    let card = build_card(&BigInt::from(-5), &cfg).unwrap();
    let disc = validate_disc(&BigInt::from(6)).unwrap();
    let cert = certify(&card, &disc, &cfg).unwrap();

    assert!(cert.in_force());
    let adm = cert.admissible.as_ref().unwrap();
    assert_eq!(adm.q, BigInt::from(7));
    assert_eq!(cert.conclusion, ConclusionBranch::OnlyEllipticPoints);

    let report = &cert.exceptional;
    assert_eq!(report.snew.len(), 1);
    assert_eq!(report.snew[0].q, BigInt::from(3));
    assert_eq!(
        report.snew[0].ideal,
        shimura_core::QuadIdeal { a: BigInt::from(3), b: BigInt::one(), c: BigInt::one() }
    );
    // α_q is an associate of 2 - √-5 (units of Q(√-5) are ±1).
    let alpha = &report.snew[0].generator;
    assert!(*alpha == el(2, -1) || *alpha == el(-2, 1));
    // 25 exponent vectors, |FR(3)| = 14 Weil numbers.
    assert_eq!(report.exponent_vectors, 25);
    assert_eq!(report.triples_processed, 25 * 14);

    // Exact membership.
    for p in [2u64, 3, 5, 7, 13] {
        let verdict = assemble_n1(
            &card,
            &report.entries,
            &report.snew,
            &N1Mode::Membership(BigInt::from(p)),
            &cfg,
        )
        .unwrap();
        match verdict {
            N1Outcome::Membership(v) => assert!(v.is_member, "p = {p} must be a member"),
            _ => unreachable!(),
        }
    }
    let verdict = assemble_n1(
        &card,
        &report.entries,
        &report.snew,
        &N1Mode::Membership(BigInt::from(1009)),
        &cfg,
    )
    .unwrap();
    let decided = match verdict {
        N1Outcome::Membership(v) => v.is_member,
        _ => unreachable!(),
    };

    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        2,
        &format!(
            "certificate q = 7, elliptic branch, S = {{(3, 1+sqrt(-5))}}, 350 triples, \
             members 2,3,5,7,13; membership(1009) = {decided} ({elapsed:?})"
        ),
    );
}

#[test]
fn criterion_3_entry_bound_exact() {
    let cfg = criterion_2_config();
    let card = build_card(&BigInt::from(-5), &cfg).unwrap();
    let report = run_exceptional(&card, &N1Mode::ListUpTo(1000), &cfg).unwrap();
    // C(k, 3) = (3^48 + 3^24)^4 exactly, since C_2 = 1 for unit rank 0.
    let c_k3 = (BigInt::from(3).pow(48) + BigInt::from(3).pow(24)).pow(4);
    let mut checked = 0u64;
    for e in &report.entries {
        assert!(e.m.abs() <= c_k3, "entry violates |m| <= C(k, 3): {:?}", e.eps);
        checked += 1;
    }
    assert!(checked > 0);
    assert!(report.entry_bound_all_ok);
    pass(3, &format!("all {checked} entries satisfy |m| <= (3^48 + 3^24)^4 exactly"));
}

#[test]
fn criterion_4_embedding_bound_with_equality() {
    let cfg = criterion_2_config();
    let card = build_card(&BigInt::from(-5), &cfg).unwrap();
    let group = class_group(&card).unwrap();
    let snew = shimura_core::exceptional::select_snew(&card, &group, &cfg).unwrap();
    let alpha = &snew[0].generator;
    let rhs = BigInt::from(3).pow(48); // N(q)^{24 h_k} with C_2 = 1
    let rhs_dyadic = shimura_core::Dyadic::from_int(&rhs);
    let mut count = 0;
    for eps in enumerate_exponents(2, 12).unwrap() {
        let gamma = card.group_ring_power(alpha, eps.as_slice()).unwrap();
        // Escalate until the certified upper end clears the bound (the
        // equality case needs enough bits for the intervals to collapse).
        let mut certified = None;
        for bits in cfg.precision_schedule() {
            let places = card.embeddings_at(bits).unwrap();
            let tau = card.embed(&gamma, &places[card.distinguished_embedding], bits).unwrap();
            let abs = tau.abs(bits).unwrap();
            if *abs.hi() <= rhs_dyadic {
                certified = Some(abs);
                break;
            }
        }
        let abs = certified
            .unwrap_or_else(|| panic!("|alpha^eps| exceeds 3^48 for eps {:?}", eps));
        if eps.as_slice() == [24, 24] {
            // Equality: the all-24 vector gives exactly 9^24 = 3^48.
            assert!(abs.contains_int(&rhs));
            let rel = abs.rel_radius().to_f64();
            assert!(rel < 1e-6, "relative radius {rel}");
        }
        count += 1;
    }
    assert_eq!(count, 25);
    pass(4, "all 25 certified |alpha^eps| <= 3^48; the all-24 vector attains equality");
}

#[test]
fn criterion_5_listed_primes_below_apriori_bound() {
    let cfg = Config { list_limit: 1_000_000, ..criterion_2_config() };
    let card = build_card(&BigInt::from(-5), &cfg).unwrap();
    let report = run_exceptional(&card, &N1Mode::ListUpTo(1_000_000), &cfg).unwrap();
    let primes = match &report.outcome {
        N1Outcome::List { primes, .. } => primes,
        _ => unreachable!(),
    };
    assert!(!primes.is_empty());
    for lp in primes {
        assert!(
            report.constants.bound.certainly_dominates(&lp.p),
            "{} exceeds the a-priori bound",
            lp.p
        );
    }
    let lo = report.constants.bound_log10.lo().to_f64();
    let hi = report.constants.bound_log10.hi().to_f64();
    assert!(lo > 1.9e4 && hi < 2.1e4, "log10 C = [{lo}, {hi}] outside the sanity window");
    pass(
        5,
        &format!(
            "{} exceptional primes up to 10^6, all below C; log10 C = {:.4}",
            primes.len(),
            lo
        ),
    );
}

/// Independent oracle: direct enumeration of reduced primitive forms with a
/// plain triple loop, no composition or cycle machinery.
fn brute_force_class_number(delta: i64) -> u64 {
    assert!(delta < 0);
    let mut count = 0u64;
    let abs = -delta;
    let a_max = ((abs as f64) / 3.0).sqrt() as i64 + 2;
    for a in 1..=a_max {
        for b in -a..=a {
            let num = b * b - delta;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            // Sign conventions: b >= 0 when |b| = a or a = c.
            if (b.abs() == a || a == c) && b < 0 {
                continue;
            }
            // Primitivity.
            let g = gcd3(a, b.abs(), c);
            if g != 1 {
                continue;
            }
            count += 1;
        }
    }
    count
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(x: i64, y: i64) -> i64 {
        if y == 0 {
            x.abs()
        } else {
            gcd(y, x % y)
        }
    }
    gcd(gcd(a, b), c)
}

#[test]
fn criterion_6_invariants_vs_brute_force() {
    let cfg = Config::default();
    for (d, expect_h) in [(-5i64, 2u64), (-23, 3), (-163, 1)] {
        let card = build_card(&BigInt::from(d), &cfg).unwrap();
        let delta = if d % 4 == -3 { d } else { 4 * d };
        let oracle = brute_force_class_number(delta);
        assert_eq!(oracle, expect_h, "oracle for D = {d}");
        assert_eq!(card.class_number, expect_h, "card for D = {d}");
        assert_eq!(reduced_definite_forms(&card.discriminant).len() as u64, expect_h);
    }
    // Regulators against the frozen high-precision values.
    for (d, frozen) in [(2i64, 0.881_373_587_019_543_f64), (5, 0.4812118250596035)] {
        let card = build_card(&BigInt::from(d), &cfg).unwrap();
        let r = &card.regulator;
        assert!(r.radius().to_f64() < 1e-9, "radius for D = {d}");
        assert!(
            (r.to_f64() - frozen).abs() < 1e-9,
            "R(Q(sqrt({d}))) = {} != {frozen}",
            r.to_f64()
        );
    }
    pass(6, "h(-5) = 2, h(-23) = 3, h(-163) = 1 vs brute force; regulators within 1e-9");
}

#[test]
fn criterion_7_height_bound_for_fifty_pairs() {
    let cfg = Config::default();
    let ds = [2i64, -2, 3, -3, 5, -5, -6, 7, -7, 10];
    let mut pairs = 0;
    for &d in &ds {
        let card = build_card(&BigInt::from(d), &cfg).unwrap();
        let h = card.class_number;
        let mut found = 0;
        let mut p = 2u64;
        while found < 5 {
            let pb = BigInt::from(p);
            if arith::is_prime_u64(p) && split_type(&card, &pb).unwrap() == SplitType::Split {
                let ideal = prime_above(&card, &pb).unwrap();
                let qh = ideal_pow(&card, &ideal, h).unwrap();
                let gamma = match principal_generator(&card, &qh, &cfg).unwrap() {
                    PrincipalOutcome::Generator(g) => g,
                    other => panic!("D = {d}, q = {p}: {other:?}"),
                };
                let alpha =
                    shimura_core::exceptional::reduce_generator(&card, &gamma, &cfg).unwrap();
                let norm_abs = card.norm(&alpha).unwrap().abs();
                assert_eq!(norm_abs, pb.pow(h as u32));
                let height = card.height(&alpha, 40, &cfg).unwrap();
                if card.unit_rank == 0 {
                    // The bound factor is exactly 1: H = |Norm|^(1/2) as an
                    // identity, cross-checked through the interval.
                    let sqrt_n = Interval::from_int(&norm_abs).sqrt(192).unwrap();
                    assert!(
                        !(height.certainly_lt(&sqrt_n) || sqrt_n.certainly_lt(&height)),
                        "D = {d}, q = {p}"
                    );
                } else {
                    // H <= |Norm|^(1/2) exp(C_1 R) with C_1 = 1/2, certified.
                    let bits = 192;
                    let half = Interval::point(shimura_core::Dyadic::new(BigInt::one(), -1));
                    let bound = Interval::from_int(&norm_abs)
                        .sqrt(bits)
                        .unwrap()
                        .mul(&card.regulator.mul(&half, bits).exp(bits), bits);
                    assert!(
                        *height.hi() <= *bound.lo(),
                        "D = {d}, q = {p}: H = {} vs bound {}",
                        height.hi().to_f64(),
                        bound.lo().to_f64()
                    );
                }
                found += 1;
                pairs += 1;
            }
            p += 1;
        }
    }
    assert_eq!(pairs, 50);
    pass(7, "50 (D, q) pairs satisfy the unit-reduced height bound with certified intervals");
}

#[test]
fn criterion_8_interval_oracle_for_entries_in_k() {
    let cfg = Config::default();
    let card = build_card(&BigInt::from(-1), &cfg).unwrap();
    let report = run_exceptional(&card, &N1Mode::ListUpTo(200), &cfg).unwrap();
    assert_eq!(report.snew[0].q, BigInt::from(5));

    // The engineered zero (ε = (24, 0), β = 2 + i) is excluded.
    assert!(report.zero_norms_excluded > 0);
    let alpha = &report.snew[0].generator;
    assert_eq!(*alpha, el(2, 1));
    for e in &report.entries {
        assert!(!e.m.is_zero());
    }

    // Ten sampled entries with β in k, recomputed by interval products over
    // all embeddings of k(β) = Q(i).
    let in_k: Vec<_> = report.entries.iter().filter(|e| e.beta_in_k).collect();
    assert!(in_k.len() >= 10, "only {} entries with beta in k", in_k.len());
    let step = in_k.len() / 10;
    let bits = 512;
    let places = card.embeddings_at(bits).unwrap();
    assert_eq!(places.len(), 1);
    assert_eq!(places[0].kind, PlaceKind::Complex);
    for e in in_k.iter().step_by(step.max(1)).take(10) {
        let gamma = card.group_ring_power(alpha, e.eps.as_slice()).unwrap();
        let w = shimura_core::WeilNumber::new(e.weil_a.clone(), e.weil_n.clone(), e.root_choice);
        let beta = shimura_core::weil::beta_in_field(&w, &card, &cfg).unwrap().unwrap();
        let bm = card.ring_pow(&beta, 24).unwrap();
        let diff = gamma.sub(&bm);
        // Norm = product over the two conjugate embeddings = |tau(diff)|^2.
        let tau = card.embed(&diff, &places[0], bits).unwrap();
        let prod = tau.abs_sq(bits);
        assert!(
            prod.contains_int(&e.m),
            "interval oracle missed m for eps {:?}: m = {}",
            e.eps,
            e.m
        );
    }
    pass(8, "10 sampled entries with beta in Q(i) match the embedding-product oracle; zero case excluded");
}

#[test]
fn criterion_9_byte_identical_reports() {
    let cfg = criterion_2_config();
    let run_once = || -> (String, String) {
        let card = build_card(&BigInt::from(-5), &cfg).unwrap();
        let disc = validate_disc(&BigInt::from(6)).unwrap();
        let report = run_exceptional(&card, &N1Mode::Membership(BigInt::from(7)), &cfg).unwrap();
        let report_json =
            schema::to_json_string(&schema::report_to_file(&report, &card, &cfg).unwrap())
                .unwrap();
        let cert = certify(&card, &disc, &cfg).unwrap();
        let cert_json =
            schema::to_json_string(&schema::certificate_to_file(&cert, &card, &cfg).unwrap())
                .unwrap();
        (report_json, cert_json)
    };
    let (r1, c1) = run_once();
    let (r2, c2) = run_once();
    assert_eq!(r1, r2, "exceptional reports differ between runs");
    assert_eq!(c1, c2, "certificates differ between runs");
    pass(9, &format!("two full runs produced byte-identical files ({} + {} bytes)", r1.len(), c1.len()));
}
