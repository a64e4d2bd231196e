//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p unitgroup --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unitgroup::abelian::AbelianGroup;
use unitgroup::arith::{factorize, gcd};
use unitgroup::classify::{
    classify_cyclic, classify_general, classify_torsion_free, ditor_cardinality, RuleSet, Status,
};
use unitgroup::density::{density_scan, enumerate_odd_realizable};
use unitgroup::gaussian::{gaussian_primes_over, GaussianInt};
use unitgroup::oracle::{an_verify, evaluate, exact_sequence_check, unit_group_finite};
use unitgroup::poly::{build_module_ring, finite_field, zmod, RingPresentation};
use unitgroup::witness::{
    h2_moduli, verify_certificate, witness_h2, witness_torsion_free, witness_z2_times_h,
};
use unitgroup::Config;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.pass = false;
    }
    o.detail = format!("{} [{:.2?}, limit {:?}]", o.detail, took, limit);
    o
}

fn grp(s: &str) -> AbelianGroup {
    s.parse().unwrap()
}

/// (Z/nZ)^* from the Chinese remainder theorem and the unit groups of Z/p^k.
fn crt_units(n: u64) -> AbelianGroup {
    let mut g = AbelianGroup::trivial();
    for (p, k) in factorize(n as u128) {
        let p = p as u128;
        let local = if p == 2 {
            match k {
                1 => AbelianGroup::trivial(),
                2 => AbelianGroup::cyclic(2).unwrap(),
                _ => AbelianGroup::cyclic(2).unwrap().direct_product(&AbelianGroup::cyclic(1 << (k - 2)).unwrap()),
            }
        } else {
            AbelianGroup::cyclic(p.pow(k - 1) * (p - 1)).unwrap()
        };
        g = g.direct_product(&local);
    }
    g
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut bad = Vec::new();
        for n in 2..=2000u64 {
            let r = build_module_ring(&zmod(n).unwrap()).unwrap();
            let rep = unit_group_finite(&r, 1 << 20).unwrap();
            if rep.structure != crt_units(n) {
                bad.push(n);
            }
        }
        outcome(bad.is_empty(), format!("Z/nZ for 2 <= n <= 2000, {} mismatches {:?}", bad.len(), &bad[..bad.len().min(5)]))
    })
}

/// Additive group of Z[i]/(a) from the 2x2 multiplication matrix: invariant
/// factors d1 = gcd of the entries, d2 = |det| / d1.
fn gaussian_quotient_by_matrix(a: GaussianInt) -> AbelianGroup {
    let (x, y) = (a.re, a.im);
    let entries = [x, y, -y, x];
    let d1 = entries.iter().fold(0u128, |acc, &e| gcd(acc, e.unsigned_abs()));
    let det = (x * x + y * y) as u128;
    let d2 = det / d1;
    AbelianGroup::cyclic(d1).unwrap().direct_product(&AbelianGroup::cyclic(d2).unwrap())
}

/// The table for Z[i]/(pi^h).
fn table_entry(p: u64, h: u32) -> AbelianGroup {
    let p = p as u128;
    match p % 4 {
        1 => AbelianGroup::cyclic(p.pow(h)).unwrap(),
        3 => AbelianGroup::cyclic(p.pow(h)).unwrap().direct_product(&AbelianGroup::cyclic(p.pow(h)).unwrap()),
        _ => {
            let k = h / 2;
            let hi = if h % 2 == 0 { k } else { k + 1 };
            AbelianGroup::cyclic(1 << hi).unwrap().direct_product(&AbelianGroup::cyclic(1 << k).unwrap())
        }
    }
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut checked = 0;
        let mut bad = Vec::new();
        for p in [2u64, 3, 5, 7, 11, 13] {
            for pi in gaussian_primes_over(p).unwrap() {
                for h in 1..=3u32 {
                    let a = pi.pow(h);
                    let got = a.quotient_additive_structure().unwrap();
                    checked += 1;
                    if got != gaussian_quotient_by_matrix(a)
                        || got != a.quotient_structure_by_snf().unwrap()
                        || got != table_entry(p, h)
                    {
                        bad.push(format!("({pi})^{h}"));
                    }
                }
            }
        }
        outcome(bad.is_empty(), format!("{checked} quotients Z[i]/(pi^h), mismatches {bad:?}"))
    })
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(300), || {
        let cfg = Config::default();
        let mut notes = Vec::new();
        let mut pass = true;
        for n in 0..=2u32 {
            let v = an_verify(n, &cfg).unwrap();
            let expected_order = 2 * 3u128.pow(n + 1);
            let expected = AbelianGroup::cyclic(2)
                .unwrap()
                .direct_product(&AbelianGroup::from_prime_powers(std::iter::repeat((3, 1)).take(n as usize + 1)).unwrap());
            let ok = v.report.unit_count == expected_order
                && v.report.structure == expected
                && v.three_part_upper <= 3u128.pow(n + 1)
                && v.three_part_lower == 3u128.pow(n + 1)
                && v.three_part_upper == v.three_part_lower;
            pass &= ok;
            notes.push(format!(
                "n={n}: |A^*|={} {} upper={} lower={}",
                v.report.unit_count, v.report.structure, v.three_part_upper, v.three_part_lower
            ));
        }
        outcome(pass, notes.join("; "))
    })
}

const NONSPLIT: &str = r#"{"base":"Zi","family":"EliminatedQuotient","params":{
    "generators":["x","y"],"substitutions":{"y":"x^2 - 1"},
    "relations":["x^2 - y - 1","(1+i)*y","y^3"],"nilradical":["y"],
    "quotient_units":["1","-1","i","-i","x","-x","i*x","-i*x"]}}"#;

fn criterion_4() -> Outcome {
    let cfg = Config::default();
    let p: RingPresentation = serde_json::from_str(NONSPLIT).unwrap();
    let rep = evaluate(&p, &cfg).unwrap();
    let exact = exact_sequence_check(&build_module_ring(&p).unwrap(), &cfg).unwrap();
    let pass = rep.unit_count == 32 && rep.structure == grp("C8 x C4") && exact;
    outcome(
        pass,
        format!(
            "oracle: |A^*| = {}, structure {}, |N| = {}, |(A/N)^*| = {}, exact sequence {} (expected 32, C8 x C4)",
            rep.unit_count, rep.structure, rep.nilradical_size, rep.quotient_unit_count, exact
        ),
    )
}

fn criterion_5() -> Outcome {
    let cfg = Config::default();
    let not_realizable: BTreeSet<u128> =
        [5, 9, 11, 13, 17, 19, 23, 25, 27, 29, 32, 33, 35, 37, 39, 41, 43, 44, 45, 47, 49].into_iter().collect();
    let mut bad = Vec::new();
    for n in (1..=50u128).chain([44, 100]) {
        let expected = if not_realizable.contains(&n) { Status::NotRealizable } else { Status::Realizable };
        if classify_cyclic(n).unwrap().status != expected {
            bad.push(n);
        }
    }
    let mut witnesses_ok = true;
    for n in [12u128, 24] {
        let v = classify_cyclic(n).unwrap();
        let w = v.witness.expect("witness");
        witnesses_ok &= verify_certificate(&w, &cfg).unwrap().matches;
    }
    let z13 = unit_group_finite(&build_module_ring(&zmod(13).unwrap()).unwrap(), 1 << 20).unwrap();
    let f9f4 = evaluate(&RingPresentation::product(vec![finite_field(9).unwrap(), finite_field(4).unwrap()]), &cfg).unwrap();
    witnesses_ok &= z13.structure == grp("C12") && f9f4.structure == grp("C24");
    outcome(
        bad.is_empty() && witnesses_ok,
        format!("disagreements {bad:?}; Z/13 units {}, F_9 x F_4 units {}", z13.structure, f9f4.structure),
    )
}

fn criterion_6() -> Outcome {
    let even_ok = (2..=10_000u128).step_by(2).all(|n| ditor_cardinality(n).unwrap().status == Status::Realizable);
    let odd: Vec<u64> = (1..=10_000u64)
        .step_by(2)
        .filter(|&n| ditor_cardinality(n as u128).unwrap().status == Status::Realizable)
        .collect();
    let enumerated = enumerate_odd_realizable(10_000);
    let samples = [(21, true), (105, true), (5, false)]
        .iter()
        .all(|&(n, yes)| (ditor_cardinality(n).unwrap().status == Status::Realizable) == yes);
    outcome(
        even_ok && odd == enumerated && samples,
        format!("even all realizable: {even_ok}; odd set size {} vs enumerated {}; 21/105/5: {samples}", odd.len(), enumerated.len()),
    )
}

fn criterion_7() -> Outcome {
    let cfg = Config::default();
    let mut predicate_ok = true;
    let mut verified = 0;
    let mut failed = Vec::new();
    for a in 0..=5u32 {
        for b in 0..=5u32 {
            for c in 0..=5u32 {
                let g = AbelianGroup::from_prime_powers(
                    std::iter::repeat((2, 1))
                        .take(a as usize)
                        .chain(std::iter::repeat((2, 2)).take(b as usize))
                        .chain(std::iter::repeat((3, 1)).take(c as usize)),
                )
                .unwrap();
                let expected = a + b >= 1 && (c == 0 || a >= 1);
                let v = classify_torsion_free(&g);
                predicate_ok &= (v.status == Status::Realizable) == expected;
                if expected && c <= 3 && a + 2 * b <= 6 {
                    let w = witness_torsion_free(a, b, c).unwrap();
                    if verify_certificate(&w, &cfg).map(|o| o.matches).unwrap_or(false) && w.claimed_group == g {
                        verified += 1;
                    } else {
                        failed.push((a, b, c));
                    }
                }
            }
        }
    }
    outcome(
        predicate_ok && failed.is_empty(),
        format!("predicate agreement {predicate_ok}; {verified} witnesses verified, failures {failed:?}"),
    )
}

fn criterion_8() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let pool: Vec<AbelianGroup> = (1..=100u128).flat_map(AbelianGroup::all_of_order).collect();
    let mut z2_fail = Vec::new();
    for _ in 0..200 {
        let h = pool.choose(&mut rng).unwrap();
        let c = witness_z2_times_h(h);
        let expected = AbelianGroup::cyclic(2).unwrap().direct_product(h);
        let out = verify_certificate(&c, &cfg).unwrap();
        if out.report.structure != expected || c.claimed_group != expected {
            z2_fail.push(h.to_string());
        }
    }
    let eligible: Vec<AbelianGroup> =
        (1..=400u128).flat_map(AbelianGroup::all_of_order).filter(|h| h2_moduli(h).is_some()).collect();
    let sample: Vec<&AbelianGroup> = eligible.choose_multiple(&mut rng, 50).collect();
    let mut h2_fail = Vec::new();
    for h in &sample {
        let c = witness_h2(h).unwrap();
        let expected = AbelianGroup::cyclic(4).unwrap().direct_product(h);
        let out = verify_certificate(&c, &cfg).unwrap();
        if out.report.structure != expected {
            h2_fail.push(h.to_string());
        }
    }
    outcome(
        z2_fail.is_empty() && h2_fail.is_empty() && sample.len() == 50,
        format!(
            "Z/2 x H: 200 sampled, failures {z2_fail:?}; Gaussian: {} sampled from {} eligible, failures {h2_fail:?}",
            sample.len(),
            eligible.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = Config::default();
    let rules = RuleSet::default();
    let a = classify_general(&grp("C4 x C11^2"), &rules, &cfg);
    let f2 = RuleSet::default().with("F2").unwrap();
    let g_b = grp("C4^2 x C11");
    let b = classify_general(&g_b, &f2, &cfg);
    let splittings: BTreeSet<_> = g_b.splittings().into_iter().collect();
    let covered: BTreeSet<String> = b.obstructions.iter().map(|o| o.detail.split(':').next().unwrap_or("").to_string()).collect();
    let b_ok = b.status == Status::NotRealizable && covered.len() == splittings.len();
    let c = classify_general(&grp("C4 x C16"), &rules, &cfg);
    let c_detail = match &c.witness {
        Some(w) => format!("{:?} via {}", c.status, w.presentation.family_name()),
        None => format!("{:?}", c.status),
    };
    outcome(
        a.status == Status::Realizable && b_ok && c.status == Status::Unknown,
        format!(
            "(a) C4 x C11^2: {:?}; (b) C4^2 x C11 with F2: {:?}, {} of {} splittings obstructed; (c) C4 x C16: {} (expected Unknown)",
            a.status,
            b.status,
            covered.len(),
            splittings.len(),
            c_detail
        ),
    )
}

fn criterion_10() -> Outcome {
    timed(Duration::from_secs(120), || {
        let cfg = Config::default();
        let rep = density_scan(1_000_000, &[1_000, 10_000, 100_000, 1_000_000], &cfg).unwrap();
        let last = rep.checkpoints.last().unwrap();
        let all: f64 = last.density_all.parse().unwrap();
        let odd: f64 = last.density_odd.parse().unwrap();
        let reduced: Vec<f64> = rep.checkpoints.iter().map(|c| c.density_reduced.parse().unwrap()).collect();
        let all_ok = (all - 0.5).abs() <= 2e-4;
        let odd_ok = odd < 1e-3;
        let decreasing = reduced.windows(2).all(|w| w[1] < w[0]);
        outcome(
            all_ok && odd_ok && decreasing,
            format!(
                "density_all {} (|d - 0.5| <= 2e-4: {all_ok}); density_odd {} (< 1e-3: {odd_ok}); density_reduced {:?} (decreasing: {decreasing})",
                last.density_all, last.density_odd, reduced
            ),
        )
    })
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Euler cross-check", criterion_1),
        ("2 Gaussian quotient table", criterion_2),
        ("3 A_n unit groups", criterion_3),
        ("4 non-split example", criterion_4),
        ("5 cyclic classification", criterion_5),
        ("6 cardinalities", criterion_6),
        ("7 torsion-free sweep", criterion_7),
        ("8 witness soundness", criterion_8),
        ("9 open-region examples", criterion_9),
        ("10 densities", criterion_10),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let o = f();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
