//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always print. The process
//! fails if any criterion fails, except for a failure listed in `KNOWN`,
//! which must then fail in exactly the recorded way.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use supercong::arith::{is_prime, primes_between, PrimePowerModulus};
use supercong::gk_ring::{gauss_sum_direct, gauss_sum_gk};
use supercong::hypergeom::{truncated_hypergeom, HypergeomSpec};
use supercong::point_count::{check_n_to_g, count_brute, count_charsum, count_koblitz, koblitz_listing, schoen_cp};
use supercong::qseries::{eta_core, modular_form_f};
use supercong::report::{Status, VerificationReport};
use supercong::verify::identities::listing_map;
use supercong::verify::{run_conjecture, run_identity_suite, run_theorem_equality, CoefficientTable, RunConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every report for `identity` passes, and there are exactly `expected` of them.
fn all_pass(reports: &[VerificationReport], identity: &str, expected: usize) -> Result<(), String> {
    let rows: Vec<_> = reports.iter().filter(|r| r.identity == identity).collect();
    if rows.len() != expected {
        return Err(format!("{identity}: {} reports, expected {expected}", rows.len()));
    }
    match rows.iter().find(|r| !r.passed()) {
        Some(r) => Err(format!("{identity}: p={} {} lhs={} rhs={}", r.prime, r.params, r.lhs, r.rhs)),
        None => Ok(()),
    }
}

fn primes_of(reports: &[VerificationReport], identity: &str) -> Vec<u64> {
    let mut ps: Vec<u64> = reports.iter().filter(|r| r.identity == identity).map(|r| r.prime).collect();
    ps.dedup();
    ps
}

fn odd_primes_except_five(hi: u64) -> Vec<u64> {
    primes_between(3, hi).into_iter().filter(|&p| p != 5).collect()
}

fn c1_conjecture() -> Outcome {
    let started = Instant::now();
    let reports = run_conjecture(&RunConfig::conjecture()).expect("valid default config");
    let elapsed = started.elapsed();
    let expected: Vec<u64> = primes_between(2, 199);
    let primes: Vec<u64> = reports.iter().map(|r| r.prime).collect();
    let bad: Vec<u64> = reports.iter().filter(|r| r.prime != 5 && !r.passed()).map(|r| r.prime).collect();
    let five_skipped = reports.iter().any(|r| r.prime == 5 && r.status == Status::Skip);
    let two = reports.iter().find(|r| r.prime == 2).map(|r| (r.modulus, r.lhs.to_string()));
    let pass = primes == expected
        && bad.is_empty()
        && five_skipped
        && two == Some((8, "1".into()))
        && elapsed < Duration::from_secs(60);
    outcome(pass, format!("{} primes <= 199, failing {bad:?}, {:.2}s", expected.len() - 1, elapsed.as_secs_f64()))
}

fn c2_theorem() -> Outcome {
    let started = Instant::now();
    let config = RunConfig::theorem();
    let reports = run_theorem_equality(&config).expect("valid default config");
    let elapsed = started.elapsed();
    let checked: Vec<&VerificationReport> = reports.iter().filter(|r| r.status != Status::Skip).collect();
    let primes: Vec<u64> = checked.iter().map(|r| r.prime).collect();
    let moduli_ok = checked.iter().all(|r| r.modulus == r.prime.pow(4));
    let bad: Vec<u64> = checked.iter().filter(|r| !r.passed()).map(|r| r.prime).collect();
    let pass = config.precision == 4
        && primes == odd_primes_except_five(97)
        && moduli_ok
        && bad.is_empty()
        && elapsed < Duration::from_secs(120);
    outcome(pass, format!("{} odd primes <= 97 mod p^4, failing {bad:?}, {:.2}s", primes.len(), elapsed.as_secs_f64()))
}

fn c3_point_counts() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [3u64, 7, 13] {
        let (b, c) = (count_brute(p, 1).unwrap().projective_count, count_charsum(p, 3).unwrap().projective_count);
        pass &= b == c;
        notes.push(format!("N_{p}={b}/{c}"));
    }
    for p in [11u64, 31] {
        let (b, k) = (count_brute(p, 1).unwrap().projective_count, count_koblitz(p, 1, 3).unwrap().projective_count);
        pass &= b == k;
        notes.push(format!("N_{p}={b}/{k}"));
    }
    let n2 = count_brute(2, 1).unwrap().projective_count;
    let c2 = CoefficientTable::build(2).unwrap().c(2).unwrap().clone();
    let cp = schoen_cp(2, n2).unwrap();
    pass &= n2 == 16 && cp == BigInt::one() && c2 == BigInt::one();
    notes.push(format!("N_2={n2}, c(2) from count {cp}, from expansion {c2}"));
    outcome(pass, notes.join(", "))
}

fn c4_count_identity() -> Outcome {
    let mut bad = Vec::new();
    let primes = odd_primes_except_five(101);
    for &p in &primes {
        let r = check_n_to_g(p, 3);
        let ok = match &r {
            Ok(r) => {
                let bound = 2 * (p.pow(3) + 25 * p.pow(2));
                r.passed() && r.modulus > bound
            }
            Err(_) => false,
        };
        if !ok {
            bad.push(p);
        }
    }
    outcome(bad.is_empty(), format!("{} odd primes <= 101, failing {bad:?}", primes.len()))
}

fn c5_gross_koblitz() -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for p in [3u64, 7, 11, 13] {
        let m = PrimePowerModulus::new(p, 3).unwrap();
        for j in 0..p - 1 {
            total += 1;
            if gauss_sum_direct(j, m).unwrap() != gauss_sum_gk(j, m).unwrap() {
                bad.push((p, j));
            }
        }
    }
    outcome(bad.is_empty(), format!("{total} Gauss sums, mismatches {bad:?}"))
}

fn c6_identities(reports: &[VerificationReport]) -> Outcome {
    let checks = [
        ("orthogonality-elements", 1 + 2 + 4 + 6 + 10 + 12),
        ("orthogonality-characters", 2 + 3 + 5 + 7 + 11 + 13),
        ("gauss-pair-product", 2 + 4 + 6 + 10 + 12),
        ("additive-expansion", 6),
        ("hasse-davenport", 2 * 10),
        ("jacobi-reduction", 24 + 124),
        ("jacobi-to-gauss", 124),
        ("jacobi-twisted-sum", 2 * 80),
        ("gauss-twisted-sum", 2 * 80),
        ("gamma-product-formula", 7 + 11 + 13),
    ];
    let mut errors: Vec<String> = checks.iter().filter_map(|&(id, n)| all_pass(reports, id, n).err()).collect();
    if primes_of(reports, "orthogonality-elements") != [2, 3, 5, 7, 11, 13] {
        errors.push("orthogonality primes".into());
    }
    if primes_of(reports, "jacobi-twisted-sum") != [11, 31] || primes_of(reports, "gauss-twisted-sum") != [11, 31] {
        errors.push("twisted-sum primes".into());
    }
    let total: usize = checks.iter().map(|c| c.1).sum();
    outcome(errors.is_empty(), if errors.is_empty() { format!("{total} checks") } else { errors.join("; ") })
}

fn c7_g_function(reports: &[VerificationReport]) -> Outcome {
    let mut errors = Vec::new();
    let series = odd_primes_except_five(97);
    if let Err(e) = all_pass(reports, "g-truncated-series-congruence", series.len()) {
        errors.push(e);
    }
    if primes_of(reports, "g-truncated-series-congruence") != series {
        errors.push("series congruence primes".into());
    }
    if reports.iter().filter(|r| r.identity == "g-truncated-series-congruence").any(|r| r.modulus != r.prime.pow(3)) {
        errors.push("series congruence not mod p^3".into());
    }
    for id in ["g-to-greene", "greene-to-coefficient"] {
        let quintic: Vec<&VerificationReport> =
            reports.iter().filter(|r| r.identity == id && (id != "g-to-greene" || !r.params.contains("1/2"))).collect();
        let primes: Vec<u64> = quintic.iter().map(|r| r.prime).collect();
        if primes != [11, 31] || !quintic.iter().all(|r| r.passed()) {
            errors.push(format!("{id}: {primes:?}"));
        }
    }
    outcome(
        errors.is_empty(),
        if errors.is_empty() { format!("{} primes, p = 11 and 31", series.len()) } else { errors.join("; ") },
    )
}

/// `∏_{n≥1} (1 - q^(s n))^e` by repeated multiplication.
fn naive_eta_power(s: usize, e: u64, order: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); order + 1];
    acc[0] = BigInt::one();
    for _ in 0..e {
        for n in 1..=order / s {
            let step = s * n;
            for i in (step..=order).rev() {
                let t = acc[i - step].clone();
                acc[i] -= t;
            }
        }
    }
    acc
}

fn naive_form(order: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(); order + 1];
    for (i, w) in (1u64..=5).zip([1, 5, 20, 25, 25]) {
        let mut prod = naive_eta_power(1, 5 - i, order);
        for (s, e) in [(5usize, 4u64), (25, i - 1)] {
            let other = naive_eta_power(s, e, order);
            let mut next = vec![BigInt::zero(); order + 1];
            for (a, x) in prod.iter().enumerate() {
                for (b, y) in other.iter().enumerate().take(order + 1 - a) {
                    next[a + b] += x * y;
                }
            }
            prod = next;
        }
        let shift = i as usize;
        for n in shift..=order {
            f[n] += &prod[n - shift] * BigInt::from(w);
        }
    }
    f
}

fn rational_quartic(p: u64) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for n in 0..p - 1 {
        for i in 1..=4 {
            term *= BigRational::new(BigInt::from(5 * n + i), BigInt::from(5));
        }
        term /= BigRational::from_integer(BigInt::from(n + 1).pow(4));
        sum += &term;
    }
    sum
}

fn reduce(q: &BigRational, m: u64) -> u64 {
    let m = BigInt::from(m);
    let inv = q.denom().extended_gcd(&m).x;
    let r = (q.numer() * inv).mod_floor(&m);
    r.try_into().unwrap()
}

/// The multiplicity listing as printed.
const PRINTED_W_STAR: [([u64; 5], usize); 12] = [
    ([1, 1, 1, 1, 1], 1),
    ([2, 2, 2, 2, 2], 1),
    ([3, 3, 3, 3, 3], 1),
    ([4, 4, 4, 4, 4], 1),
    ([1, 1, 1, 3, 4], 20),
    ([1, 2, 2, 2, 3], 20),
    ([2, 3, 3, 3, 4], 20),
    ([1, 2, 4, 4, 4], 20),
    ([1, 1, 2, 2, 4], 30),
    ([2, 2, 3, 3, 4], 30),
    ([1, 1, 2, 3, 3], 30),
    ([1, 3, 3, 4, 4], 30),
];

const PRINTED_CLASSES: [([u64; 5], usize); 6] = [
    ([0, 0, 0, 0, 0], 1),
    ([0, 1, 2, 3, 4], 24),
    ([0, 0, 0, 1, 4], 20),
    ([0, 0, 0, 2, 3], 20),
    ([0, 0, 1, 1, 3], 30),
    ([0, 0, 1, 2, 2], 30),
];

type Listing = BTreeMap<Vec<u64>, usize>;
type Entries = Vec<(Vec<u64>, usize)>;

fn listing_diff(generated: &Listing, printed: &Listing) -> (Entries, Entries) {
    let only = |a: &Listing, b: &Listing| {
        a.iter().filter(|(k, v)| b.get(*k) != Some(v)).map(|(k, v)| (k.clone(), *v)).collect()
    };
    (only(generated, printed), only(printed, generated))
}

fn c8_oracles() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let eta_ok = [1usize, 5, 25].iter().all(|&s| eta_core(s, 100).to_bigints() == naive_eta_power(s, 1, 100))
        && modular_form_f(100).unwrap().to_bigints() == naive_form(100);
    pass &= eta_ok;
    notes.push(format!("eta/f N=100 {}", if eta_ok { "match" } else { "MISMATCH" }));

    let series_primes: Vec<u64> = (2..=13).filter(|&p| is_prime(p) && p != 5).collect();
    let series_ok = series_primes.iter().all(|&p| {
        let m = PrimePowerModulus::new(p, 3).unwrap();
        let fast = truncated_hypergeom(&HypergeomSpec::quartic(5, 2, p - 1), m).unwrap().value();
        fast == reduce(&rational_quartic(p), m.m())
    });
    pass &= series_ok;
    notes.push(format!("series p in {series_primes:?} {}", if series_ok { "match" } else { "MISMATCH" }));

    let (w_star, classes) = koblitz_listing(5, 5);
    let sizes: Vec<usize> = {
        let mut by_mult: BTreeMap<usize, usize> = BTreeMap::new();
        for v in w_star.values() {
            *by_mult.entry(*v).or_default() += v;
        }
        by_mult.values().copied().collect()
    };
    let class_mults: Vec<usize> = listing_map(&PRINTED_CLASSES).values().copied().collect();
    let classes_ok = classes == listing_map(&PRINTED_CLASSES);
    let (extra, missing) = listing_diff(&w_star, &listing_map(&PRINTED_W_STAR));
    let w_ok = extra.is_empty() && missing.is_empty();
    pass &= classes_ok && w_ok && sizes == [4, 80, 120];
    notes.push(format!(
        "W* sizes {sizes:?}, classes {class_mults:?} {}, W* listing {}",
        if classes_ok { "match" } else { "MISMATCH" },
        if w_ok { "match".to_string() } else { format!("MISMATCH generated {extra:?} vs printed {missing:?}") }
    ));
    outcome(pass, notes.join("; "))
}

fn c9_determinism(serial: &[VerificationReport]) -> Outcome {
    let config = RunConfig { jobs: 8, ..RunConfig::identities() };
    let parallel = run_identity_suite(&config).expect("valid config");
    let strip = |rs: &[VerificationReport]| rs.iter().map(VerificationReport::without_timing).collect::<Vec<_>>();
    let a = strip(serial);
    let b = strip(&parallel);
    let bytes =
        |rs: &[VerificationReport]| rs.iter().map(|r| serde_json::to_string(r).unwrap()).collect::<Vec<_>>().join("\n");
    outcome(a == b && bytes(&a) == bytes(&b), format!("{} reports, jobs 1 vs 8", a.len()))
}

/// Failures that are expected, with the exact detail they must produce.
const KNOWN: [(usize, &str); 1] =
    [(8, "MISMATCH generated [([2, 2, 3, 4, 4], 30)] vs printed [([2, 2, 3, 3, 4], 30)]")];

fn main() -> ExitCode {
    let serial = run_identity_suite(&RunConfig::identities()).expect("valid config");
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "truncated 4F3 = c(p) mod p^3", c1_conjecture()),
        (2, "4G - s(p)p = c(p) mod p^4", c2_theorem()),
        (3, "point-count agreement", c3_point_counts()),
        (4, "N_p + 4G polynomial identity", c4_count_identity()),
        (5, "Gross-Koblitz vs direct Gauss sums", c5_gross_koblitz()),
        (6, "character-sum identity suite", c6_identities(&serial)),
        (7, "G-function congruence and Greene links", c7_g_function(&serial)),
        (8, "oracle equivalences", c8_oracles()),
        (9, "determinism across job counts", c9_determinism(&serial)),
    ];
    let mut ok = true;
    for (n, name, o) in &results {
        println!("criterion {n} ({name}): {} [{}]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            let known = KNOWN.iter().any(|&(k, detail)| k == *n && o.detail.contains(detail));
            if known {
                println!("criterion {n}: known failure, see README");
            }
            ok &= known;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("{passed}/{} criteria pass", results.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
