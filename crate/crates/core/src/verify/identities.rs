//! The fixed battery of identity checks, one report per (identity, prime, parameters).

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_traits::ToPrimitive;

use super::{odd_primes_except_five, require_prime, run_pool, settle, CoefficientTable, RunConfig};
use crate::arith::{teichmuller, PrimePowerModulus, RationalArg};
use crate::char_sums::{
    cor_gauss_tsum_with, jacobi_reduction_check, jacobi_to_gauss_check, lemma_jac_tsum, orthogonality_character,
    orthogonality_element, CharExponent,
};
use crate::error::{Error, Result};
use crate::gk_ring::{check_hasse_davenport_with, gauss_sum_direct, gauss_sum_gk, zeta_p, GKElement, GaussSums};
use crate::hypergeom::{check_greene_coefficient, check_prop_gtoghs, check_thm_4g2, GSpec};
use crate::padic_gamma::check_mult_formula;
use crate::point_count::{
    check_fifth_power_sum, check_n_to_g, count_brute, count_charsum, count_koblitz, koblitz_listing, schoen_cp,
};
use crate::report::{ReportValue, VerificationReport};

type Task = Box<dyn Fn(&CoefficientTable) -> Vec<VerificationReport> + Send + Sync>;

/// Expected `W*` (nonzero tuples) for the quintic, up to permutation, with multiplicities.
pub const EXPECTED_W_STAR: [([u64; 5], usize); 12] = [
    ([1, 1, 1, 1, 1], 1),
    ([2, 2, 2, 2, 2], 1),
    ([3, 3, 3, 3, 3], 1),
    ([4, 4, 4, 4, 4], 1),
    ([1, 1, 1, 3, 4], 20),
    ([1, 2, 2, 2, 3], 20),
    ([2, 3, 3, 3, 4], 20),
    ([1, 2, 4, 4, 4], 20),
    ([1, 1, 2, 2, 4], 30),
    ([2, 2, 3, 4, 4], 30),
    ([1, 1, 2, 3, 3], 30),
    ([1, 3, 3, 4, 4], 30),
];

/// Expected classes of `W` under shifts by `(1, …, 1)`, keyed by their smallest sorted form.
pub const EXPECTED_CLASSES: [([u64; 5], usize); 6] = [
    ([0, 0, 0, 0, 0], 1),
    ([0, 1, 2, 3, 4], 24),
    ([0, 0, 0, 1, 4], 20),
    ([0, 0, 0, 2, 3], 20),
    ([0, 0, 1, 1, 3], 30),
    ([0, 0, 1, 2, 2], 30),
];

/// Flattens a multiplicity map as `tuple…, count` in key order, for reporting.
pub fn flatten_listing(map: &BTreeMap<Vec<u64>, usize>) -> Vec<u64> {
    map.iter().flat_map(|(k, &v)| k.iter().copied().chain(std::iter::once(v as u64))).collect()
}

pub fn listing_map(entries: &[([u64; 5], usize)]) -> BTreeMap<Vec<u64>, usize> {
    entries.iter().map(|(k, v)| (k.to_vec(), *v)).collect()
}

fn md(p: u64, k: u32) -> Result<PrimePowerModulus> {
    PrimePowerModulus::new(p, k)
}

fn each<I, F>(identity: &'static str, p: u64, params: I, f: F) -> Vec<VerificationReport>
where
    I: IntoIterator<Item = String>,
    F: Fn(&str) -> Result<VerificationReport>,
{
    params.into_iter().map(|tag| settle(identity, p, tag.clone(), f(&tag))).collect()
}

/// Runs `body`, or emits a single failed report if its setup fails.
fn guarded(
    identity: &'static str,
    p: u64,
    body: impl FnOnce() -> Result<Vec<VerificationReport>>,
) -> Vec<VerificationReport> {
    body().unwrap_or_else(|e| vec![VerificationReport::errored(identity, p, "", &e)])
}

fn orthogonality(p: u64, k: u32) -> Vec<VerificationReport> {
    guarded("orthogonality-elements", p, || {
        let m = md(p, k)?;
        let n = p - 1;
        let mut out = Vec::new();
        for a in 0..n {
            let started = Instant::now();
            let lhs = orthogonality_element(CharExponent::new(a as i64, p), m);
            let rhs = if a == 0 { m.residue(n) } else { m.zero() };
            out.push(VerificationReport::compare(
                "orthogonality-elements",
                p,
                format!("chi=omega^{a}"),
                m.m(),
                lhs,
                rhs,
                started,
            ));
        }
        for x in 0..p {
            let started = Instant::now();
            let lhs = orthogonality_character(x, m);
            let rhs = if x == 1 { m.residue(n) } else { m.zero() };
            out.push(VerificationReport::compare(
                "orthogonality-characters",
                p,
                format!("x={x}"),
                m.m(),
                lhs,
                rhs,
                started,
            ));
        }
        Ok(out)
    })
}

fn gauss_pair_product(p: u64, k: u32) -> Vec<VerificationReport> {
    const ID: &str = "gauss-pair-product";
    guarded(ID, p, || {
        let sums = GaussSums::direct(md(p, k)?)?;
        let m = sums.modulus();
        Ok((0..(p - 1) as i64)
            .map(|a| {
                let started = Instant::now();
                let lhs = sums.get(a) * sums.get(-a);
                let rhs = if a == 0 {
                    GKElement::one(m)
                } else {
                    let sign = if a % 2 == 0 { m.one() } else { -m.one() };
                    GKElement::constant(sign * m.residue(p))
                };
                VerificationReport::compare(ID, p, format!("chi=omega^{a}"), m.m(), &lhs, &rhs, started)
            })
            .collect())
    })
}

/// `θ(x) = (1/(p-1)) Σ_χ g(χ̄) χ(x)` for `x ≠ 0`.
fn additive_expansion(p: u64, k: u32) -> Vec<VerificationReport> {
    const ID: &str = "additive-expansion";
    guarded(ID, p, || {
        let m = md(p, k)?;
        let sums = GaussSums::direct(m)?;
        let zeta = zeta_p(m)?;
        let inv = m.residue(p - 1).inv()?;
        let mut out = Vec::new();
        let mut theta = GKElement::one(m);
        for x in 1..p {
            let started = Instant::now();
            theta = &theta * &zeta;
            let w = teichmuller(x, m);
            let mut acc = GKElement::zero(m);
            for a in 0..p - 1 {
                acc = &acc + &sums.get(-(a as i64)).scale(w.pow(a));
            }
            let rhs = acc.scale(inv);
            out.push(VerificationReport::compare(ID, p, format!("x={x}"), m.m(), &theta, &rhs, started));
        }
        Ok(out)
    })
}

fn gross_koblitz(p: u64, k: u32) -> Vec<VerificationReport> {
    const ID: &str = "gross-koblitz";
    guarded(ID, p, || {
        let m = md(p, k)?;
        Ok(each(ID, p, (0..p - 1).map(|j| format!("j={j}")), |tag| {
            let started = Instant::now();
            let j: u64 = tag[2..].parse().expect("tag built above");
            let direct = gauss_sum_direct(j, m)?;
            let gk = gauss_sum_gk(j, m)?;
            Ok(VerificationReport::compare(ID, p, tag, m.m(), &direct, &gk, started))
        }))
    })
}

fn hasse_davenport(p: u64, mult: u64, k: u32) -> Vec<VerificationReport> {
    guarded("hasse-davenport", p, || {
        let sums = GaussSums::direct(md(p, k)?)?;
        Ok((0..(p - 1) as i64)
            .map(|j| {
                settle(
                    "hasse-davenport",
                    p,
                    format!("m={mult},psi=omega^{}", -j),
                    check_hasse_davenport_with(&sums, mult, j),
                )
            })
            .collect())
    })
}

/// Tuples of exponents `0..5` (of `ψ = ω^((p-1)/5)`) of the given length, not all zero.
fn order_five_tuples(len: u32) -> Vec<Vec<i64>> {
    (1..5i64.pow(len))
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let d = idx % 5;
                    idx /= 5;
                    d
                })
                .collect()
        })
        .collect()
}

fn to_chars(exps: &[i64], p: u64) -> Vec<CharExponent> {
    let t = ((p - 1) / 5) as i64;
    exps.iter().map(|&e| CharExponent::new(e * t, p)).collect()
}

fn jacobi_reduction(p: u64, k: u32) -> Vec<VerificationReport> {
    guarded("jacobi-reduction", p, || {
        let m = md(p, k)?;
        let tuples: Vec<Vec<i64>> = [3u32, 4]
            .iter()
            .flat_map(|&len| order_five_tuples(len))
            .filter(|t| t.iter().sum::<i64>() % 5 == 0)
            .collect();
        Ok(tuples
            .iter()
            .map(|t| {
                let chars = to_chars(t, p);
                settle("jacobi-reduction", p, format!("{t:?}"), jacobi_reduction_check(&chars, m))
            })
            .collect())
    })
}

fn jacobi_to_gauss(p: u64, k: u32) -> Vec<VerificationReport> {
    guarded("jacobi-to-gauss", p, || {
        let sums = GaussSums::direct(md(p, k + 1)?)?;
        Ok(order_five_tuples(3)
            .iter()
            .map(|t| settle("jacobi-to-gauss", p, format!("{t:?}"), jacobi_to_gauss_check(&to_chars(t, p), &sums)))
            .collect())
    })
}

fn admissible_triples() -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                if (a + c) % 5 != 0 && (b + c) % 5 != 0 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn twisted_jacobi_sum(p: u64, k: u32) -> Vec<VerificationReport> {
    const ID: &str = "jacobi-twisted-sum";
    guarded(ID, p, || {
        let m = md(p, k)?;
        let rhs = -m.residue(p - 1);
        Ok(admissible_triples()
            .into_iter()
            .map(|(a, b, c)| {
                let started = Instant::now();
                let tag = format!("a={a},b={b},c={c}");
                let r = lemma_jac_tsum(a, b, c, m)
                    .map(|lhs| VerificationReport::compare(ID, p, tag.clone(), m.m(), lhs, rhs, started));
                settle(ID, p, tag, r)
            })
            .collect())
    })
}

fn twisted_gauss_sum(p: u64, k: u32) -> Vec<VerificationReport> {
    const ID: &str = "gauss-twisted-sum";
    guarded(ID, p, || {
        let sums = GaussSums::direct(md(p, k)?)?;
        let m = sums.modulus();
        let rhs = -(m.residue(p) * m.residue(p - 1));
        Ok(admissible_triples()
            .into_iter()
            .map(|(a, b, c)| {
                let started = Instant::now();
                let tag = format!("a={a},b={b},c={c}");
                let r = cor_gauss_tsum_with(&sums, a, b, c)
                    .map(|lhs| VerificationReport::compare(ID, p, tag.clone(), m.m(), lhs, rhs, started));
                settle(ID, p, tag, r)
            })
            .collect())
    })
}

fn gamma_product(p: u64, k: u32) -> Vec<VerificationReport> {
    guarded("gamma-product-formula", p, || {
        let m = md(p, k)?;
        Ok((0..p as i64)
            .map(|r| {
                let x = RationalArg::new(r, p as i64 - 1);
                settle("gamma-product-formula", p, format!("m=5,x={x}"), check_mult_formula(5, x, m))
            })
            .collect())
    })
}

fn koblitz_listing_reports() -> Vec<VerificationReport> {
    let (w_star, classes) = koblitz_listing(5, 5);
    let started = Instant::now();
    let w = VerificationReport::compare(
        "koblitz-listing-w-star",
        0,
        "n=5,d=5",
        0,
        ReportValue::Vector(flatten_listing(&w_star)),
        ReportValue::Vector(flatten_listing(&listing_map(&EXPECTED_W_STAR))),
        started,
    )
    .with_note("expected listing uses (2,2,3,4,4); the tuple (2,2,3,3,4) has coordinate sum 14 and is not in W");
    let c = VerificationReport::compare(
        "koblitz-listing-classes",
        0,
        "n=5,d=5",
        0,
        ReportValue::Vector(flatten_listing(&classes)),
        ReportValue::Vector(flatten_listing(&listing_map(&EXPECTED_CLASSES))),
        Instant::now(),
    );
    vec![w, c]
}

fn count_agreement(identity: &'static str, p: u64, k: u32) -> VerificationReport {
    let started = Instant::now();
    let r = (|| {
        let brute = count_brute(p, 1)?.projective_count;
        let other = match identity {
            "count-brute-koblitz" => count_koblitz(p, 1, k)?,
            _ => count_charsum(p, k)?,
        }
        .projective_count;
        Ok(VerificationReport::compare(
            identity,
            p,
            "lambda=1",
            0,
            ReportValue::Int(brute),
            ReportValue::Int(other),
            started,
        ))
    })();
    settle(identity, p, "lambda=1", r)
}

fn to_signed(v: &num_bigint::BigInt) -> Result<ReportValue> {
    v.to_i64().map(ReportValue::signed).ok_or_else(|| Error::BadParameters(format!("{v} exceeds 64 bits")))
}

/// `c(p)` recovered from the brute-force count agrees with the q-expansion.
fn count_to_coefficient(p: u64, table: &CoefficientTable) -> VerificationReport {
    const ID: &str = "count-to-coefficient";
    let started = Instant::now();
    let r = (|| {
        require_prime(p)?;
        let n_p = count_brute(p, 1)?.projective_count;
        let lhs = to_signed(&schoen_cp(p, n_p)?)?;
        let rhs = to_signed(table.c(p as usize)?)?;
        Ok(VerificationReport::compare(ID, p, format!("N_p={n_p}"), 0, lhs, rhs, started))
    })();
    settle(ID, p, "", r)
}

/// Largest prime any suite item reads `c(p)` for.
const SUITE_ORDER: usize = 31;

pub fn run_identity_suite(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    if config.jobs == 0 {
        return Err(Error::BadParameters("at least one job is required".into()));
    }
    if config.order < SUITE_ORDER {
        return Err(Error::BadParameters(format!("the identity suite needs expansion order >= {SUITE_ORDER}")));
    }
    if config.precision < 2 {
        return Err(Error::BadParameters("the identity suite needs precision K >= 2".into()));
    }
    let k = config.precision;
    let (table, _) = config.coefficients(SUITE_ORDER)?;

    let mut tasks: Vec<Task> = Vec::new();
    let mut add = |t: Task| tasks.push(t);
    for p in [2u64, 3, 5, 7, 11, 13] {
        add(Box::new(move |_| orthogonality(p, k)));
    }
    for p in [3u64, 5, 7, 11, 13] {
        add(Box::new(move |_| gauss_pair_product(p, k)));
    }
    add(Box::new(move |_| additive_expansion(7, k)));
    for p in [3u64, 7, 11, 13] {
        add(Box::new(move |_| gross_koblitz(p, k)));
    }
    for mult in [2u64, 5] {
        add(Box::new(move |_| hasse_davenport(11, mult, k)));
    }
    add(Box::new(move |_| jacobi_reduction(11, k)));
    add(Box::new(move |_| jacobi_to_gauss(11, k)));
    for p in [11u64, 31] {
        add(Box::new(move |_| twisted_jacobi_sum(p, k)));
        add(Box::new(move |_| twisted_gauss_sum(p, k)));
    }
    for p in [7u64, 11, 13] {
        add(Box::new(move |_| gamma_product(p, k)));
    }
    for p in odd_primes_except_five(97) {
        add(Box::new(move |_| vec![settle("g-truncated-series-congruence", p, "d=5,r=2", check_thm_4g2(5, 2, p, 3))]));
    }
    let quartic = Arc::new(GSpec::quartic(5, 2)?);
    for p in [11u64, 31] {
        let spec = Arc::clone(&quartic);
        add(Box::new(move |_| vec![settle("g-to-greene", p, "", check_prop_gtoghs(&spec, p, k))]));
        add(Box::new(move |t| {
            let r = t.c(p as usize).and_then(|c| check_greene_coefficient(p, k, c));
            vec![settle("greene-to-coefficient", p, "", r)]
        }));
    }
    let halves = Arc::new(GSpec::new(vec![RationalArg::new(1, 2); 2])?);
    add(Box::new(move |_| vec![settle("g-to-greene", 11, "", check_prop_gtoghs(&halves, 11, k))]));
    add(Box::new(|_| koblitz_listing_reports()));
    for p in [3u64, 7, 13] {
        add(Box::new(move |_| vec![count_agreement("count-brute-charsum", p, k)]));
    }
    for p in [11u64, 31] {
        add(Box::new(move |_| vec![count_agreement("count-brute-koblitz", p, k)]));
    }
    for p in [2u64, 3, 7, 11, 13] {
        add(Box::new(move |t| vec![count_to_coefficient(p, t)]));
    }
    for p in odd_primes_except_five(101) {
        add(Box::new(move |_| vec![settle("count-to-g", p, "", check_n_to_g(p, k))]));
    }
    for p in [3u64, 7] {
        add(Box::new(move |_| vec![settle("fifth-power-sum", p, "", check_fifth_power_sum(p, k))]));
    }

    run_pool(config.jobs, tasks, |t| t(&table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_generators() {
        assert_eq!(order_five_tuples(3).len(), 124);
        assert_eq!(admissible_triples().len(), 80);
        let trivial_product = order_five_tuples(3).into_iter().filter(|t| t.iter().sum::<i64>() % 5 == 0).count();
        assert_eq!(trivial_product, 24);
    }

    #[test]
    fn listing_reports_pass() {
        assert!(koblitz_listing_reports().iter().all(VerificationReport::passed));
    }

    #[test]
    fn small_identity_groups() {
        for r in orthogonality(7, 3)
            .into_iter()
            .chain(gauss_pair_product(7, 3))
            .chain(additive_expansion(7, 3))
            .chain(gross_koblitz(7, 3))
        {
            assert!(r.passed(), "{r:?}");
        }
    }
}
