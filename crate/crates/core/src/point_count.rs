//! Points on the Dwork quintic `x_1^5 + … + x_5^5 - 5λ x_1⋯x_5 = 0` in `P^4(F_p)`.
//!
//! Three independent routes: direct enumeration, Koblitz's Gauss-sum formula
//! (for `p ≡ 1 mod 5`), and an additive-character expansion (for `p ≢ 1 mod 5`).
//! The Gauss-sum routes run in `R = Z_p[ζ_p] / p^K` and recover the integer
//! count from its residue, so the working precision must exceed the largest
//! possible count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, teichmuller, PrimePowerModulus, Residue};
use crate::error::{Error, Result};
use crate::gk_ring::{zeta_p, GKElement, GaussSums};
use crate::hypergeom::{n_plus_one_g, GSpec};
use crate::report::VerificationReport;

/// Largest prime accepted by [`count_brute`].
pub const BRUTE_FORCE_LIMIT: u64 = 151;
/// Largest prime for the Gauss-sum routes.
pub const RING_LIMIT: u64 = 31;

const DEGREE: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Koblitz,
    Charsum,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Brute => "brute",
            CountMethod::Koblitz => "koblitz",
            CountMethod::Charsum => "charsum",
        })
    }
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(CountMethod::Brute),
            "koblitz" => Ok(CountMethod::Koblitz),
            "charsum" => Ok(CountMethod::Charsum),
            other => Err(Error::BadParameters(format!("unknown count method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub p: u64,
    pub lambda: u64,
    pub projective_count: u64,
    pub method: CountMethod,
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `table[a·p + b] = #{x ∈ F_p : x^5 + a x + b = 0}`.
pub(crate) fn root_table(p: u64) -> Vec<u8> {
    let pu = p as usize;
    let mut table = vec![0u8; pu * pu];
    for x in 0..p {
        let x5 = (x * x % p) * (x * x % p) % p * x % p;
        for a in 0..p {
            let b = (p - (x5 + a * x) % p) % p;
            table[(a * p + b) as usize] += 1;
        }
    }
    table
}

/// Affine count `N^A` of the cone in `F_p^5`.
fn affine_count_brute(p: u64, lambda: u64) -> u64 {
    let table = root_table(p);
    let pu = p as usize;
    let fifth: Vec<u64> = (0..p).map(|x| (x * x % p) * (x * x % p) % p * x % p).collect();
    // The equation in x_5 reads x_5^5 + c·x_1x_2x_3x_4·x_5 + Σ_{i<5} x_i^5 = 0.
    let c = (p - DEGREE % p * (lambda % p) % p) % p;
    (0..p)
        .into_par_iter()
        .map(|x1| {
            let mut acc = 0u64;
            for x2 in 0..p {
                let p12 = c * x1 % p * x2 % p;
                let s12 = (fifth[x1 as usize] + fifth[x2 as usize]) % p;
                for x3 in 0..p {
                    let step = p12 * x3 % p;
                    let s123 = (s12 + fifth[x3 as usize]) % p;
                    let mut a = 0u64;
                    for &f4 in &fifth {
                        let mut b = s123 + f4;
                        if b >= p {
                            b -= p;
                        }
                        acc += table[a as usize * pu + b as usize] as u64;
                        a += step;
                        if a >= p {
                            a -= p;
                        }
                    }
                }
            }
            acc
        })
        .sum()
}

/// Counts by enumerating `x_1, …, x_4` and looking up the number of `x_5`.
pub fn count_brute(p: u64, lambda: u64) -> Result<CountResult> {
    require_prime(p)?;
    if p > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { p, limit: BRUTE_FORCE_LIMIT });
    }
    let affine = affine_count_brute(p, lambda);
    debug_assert_eq!((affine - 1) % (p - 1), 0);
    Ok(CountResult { p, lambda: lambda % p, projective_count: (affine - 1) / (p - 1), method: CountMethod::Brute })
}

/// `W = {w : 0 <= w_i < d, Σ w_i ≡ 0 (mod d)}`, its classes modulo shifts by
/// `(1, …, 1)`, and the character data for one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoblitzData {
    pub d: u64,
    pub w: Vec<Vec<u64>>,
    /// One representative per class, the lexicographically smallest tuple.
    pub classes: Vec<Vec<u64>>,
    pub t: u64,
    /// `T = ω^generator_exponent`.
    pub generator_exponent: i64,
}

fn shift(w: &[u64], k: u64, d: u64) -> Vec<u64> {
    w.iter().map(|&x| (x + k) % d).collect()
}

fn sorted(w: &[u64]) -> Vec<u64> {
    let mut v = w.to_vec();
    v.sort_unstable();
    v
}

/// All `n`-tuples over `[0, d)` with coordinate sum divisible by `d`.
pub fn exponent_tuples(n: usize, d: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|w| (0..d).map(move |x| [w.clone(), vec![x]].concat())).collect();
    }
    out.retain(|w| w.iter().sum::<u64>() % d == 0);
    out
}

/// Class representatives of `W/∼`: each tuple whose every shift is lexicographically larger.
pub fn class_representatives(w: &[Vec<u64>], d: u64) -> Vec<Vec<u64>> {
    w.iter().filter(|x| (1..d).all(|k| shift(x, k, d) > **x)).cloned().collect()
}

impl KoblitzData {
    pub fn new(p: u64, d: u64, n: usize, generator_exponent: i64) -> Result<Self> {
        if d < 2 || !(p - 1).is_multiple_of(d) {
            return Err(Error::OrderNotDividing { m: d, p_minus_one: p - 1 });
        }
        if num_integer::gcd(generator_exponent.rem_euclid((p - 1) as i64) as u64, p - 1) != 1 {
            return Err(Error::BadParameters(format!("ω^{generator_exponent} does not generate the character group")));
        }
        let w = exponent_tuples(n, d);
        let classes = class_representatives(&w, d);
        Ok(Self { d, w, classes, t: (p - 1) / d, generator_exponent })
    }
}

/// Multiplicities of `W*` (tuples without zero entries) up to permutation, and of
/// `W/∼` keyed by the smallest sorted form among a class's shifts.
pub fn koblitz_listing(n: usize, d: u64) -> (BTreeMap<Vec<u64>, usize>, BTreeMap<Vec<u64>, usize>) {
    let w = exponent_tuples(n, d);
    let mut w_star = BTreeMap::new();
    for x in w.iter().filter(|x| x.iter().all(|&v| v != 0)) {
        *w_star.entry(sorted(x)).or_insert(0) += 1;
    }
    let mut classes = BTreeMap::new();
    for rep in class_representatives(&w, d) {
        let key = (0..d).map(|k| sorted(&shift(&rep, k, d))).min().expect("d >= 1");
        *classes.entry(key).or_insert(0) += 1;
    }
    (w_star, classes)
}

/// Least `k` with `p^k` above every possible projective count in `P^4(F_p)`,
/// plus one digit for the final exact division by `p`.
fn working_precision(p: u64, requested: u32) -> Result<PrimePowerModulus> {
    let bound = (p.pow(5) - 1) / (p - 1);
    let mut k = 1u32;
    while p.pow(k) <= bound {
        k += 1;
    }
    PrimePowerModulus::new(p, requested.max(k + 1))
}

/// Reads off the integer `N` from `p·N` held in `R`.
fn recover_count(p_times_n: &GKElement, p: u64) -> Result<u64> {
    let n = p_times_n.div_p()?.to_residue()?;
    let bound = (p.pow(5) - 1) / (p - 1);
    if n.value() > bound {
        return Err(Error::NonIntegralResult(format!("count {} exceeds {bound}", n.value())));
    }
    Ok(n.value())
}

/// `p/g(χ)` for `χ = ω^a`: `χ(-1) g(χ̄)`, or `-p` for the trivial character.
fn p_over_gauss(sums: &GaussSums, a: i64) -> GKElement {
    let modulus = sums.modulus();
    let n = (modulus.p() - 1) as i64;
    if a.rem_euclid(n) == 0 {
        return GKElement::constant(-modulus.residue(modulus.p()));
    }
    let sign = if a.rem_euclid(2) == 0 { modulus.one() } else { -modulus.one() };
    sums.get(-a).scale(sign)
}

/// `ω(x)^a` with `ω(0)^a = 0` for every `a`.
fn omega_pow(x: u64, a: i64, modulus: PrimePowerModulus) -> Residue {
    let n = (modulus.p() - 1) as i64;
    teichmuller(x % modulus.p(), modulus).pow(a.rem_euclid(n) as u64)
}

pub fn count_koblitz(p: u64, lambda: u64, k: u32) -> Result<CountResult> {
    count_koblitz_with_generator(p, lambda, k, 1)
}

/// Koblitz's formula with `T = ω^generator_exponent`.
pub fn count_koblitz_with_generator(p: u64, lambda: u64, k: u32, generator_exponent: i64) -> Result<CountResult> {
    require_prime(p)?;
    if p % DEGREE != 1 {
        return Err(Error::NotOneModFive(p));
    }
    if p > RING_LIMIT {
        return Err(Error::TooLarge { p, limit: RING_LIMIT });
    }
    if lambda.is_multiple_of(p) {
        // The twisted sum vanishes identically at λ = 0 and the formula misses
        // the Fermat quintic's count; it is only valid for λ ≠ 0.
        return Err(Error::BadParameters("the Koblitz formula needs λ ≠ 0 in F_p".into()));
    }
    let modulus = working_precision(p, k)?;
    let data = KoblitzData::new(p, DEGREE, DEGREE as usize, generator_exponent)?;
    let sums = GaussSums::gross_koblitz(modulus)?;
    let n = (p - 1) as i64;
    let g = |a: i64| sums.get(a * generator_exponent);
    let t = data.t as i64;
    let d = data.d as i64;

    // p · Σ_w N_p(0, w)
    let mut fixed = GKElement::constant(modulus.residue(p * ((p.pow(4) - 1) / (p - 1))));
    for w in data.w.iter().filter(|w| w.iter().all(|&x| x != 0)) {
        let mut prod = GKElement::one(modulus);
        for &wi in w {
            prod = &prod * g(wi as i64 * t);
        }
        fixed = &fixed + &prod;
    }

    // p · Σ_[w] Σ_j ∏ g(T^(j + w_i t)) / g(T^(dj)) · T^(dj)(dλ)
    let arg = DEGREE * lambda % p;
    let mut twisted = GKElement::zero(modulus);
    for j in 0..n {
        let chi = omega_pow(arg, d * j * generator_exponent, modulus);
        let tail = p_over_gauss(&sums, d * j * generator_exponent).scale(chi);
        let mut inner = GKElement::zero(modulus);
        for w in &data.classes {
            let mut prod = GKElement::one(modulus);
            for &wi in w {
                prod = &prod * g(j + wi as i64 * t);
            }
            inner = &inner + &prod;
        }
        twisted = &twisted + &(&inner * &tail);
    }
    let inv = modulus.residue(p - 1).inv()?;
    let total = &fixed + &twisted.scale(inv);
    Ok(CountResult { p, lambda: lambda % p, projective_count: recover_count(&total, p)?, method: CountMethod::Koblitz })
}

/// The character-sum count at `λ = 1` for `p ≢ 1 (mod 5)`:
/// `p(p-1) N_p = p(p^4 - 1) + p + Σ_{e=1}^{p-2} g(T^-e)^5 g(T^5e) T^-5e(-5)`.
pub fn count_charsum(p: u64, k: u32) -> Result<CountResult> {
    require_prime(p)?;
    if p == 5 {
        return Err(Error::PIsFive);
    }
    if p % DEGREE == 1 {
        return Err(Error::IsOneModFive(p));
    }
    if p == 2 {
        return Err(Error::BadParameters("the character-sum count needs an odd prime".into()));
    }
    if p > RING_LIMIT {
        return Err(Error::TooLarge { p, limit: RING_LIMIT });
    }
    let modulus = working_precision(p, k)?;
    let sums = GaussSums::direct(modulus)?;
    let minus_five = (p - DEGREE % p) % p;
    let mut acc = GKElement::constant(modulus.residue(p * (p.pow(4) - 1) + p));
    for e in 1..(p - 1) as i64 {
        let chi = omega_pow(minus_five, -5 * e, modulus);
        let term = &sums.get(-e).pow(5) * sums.get(5 * e);
        acc = &acc + &term.scale(chi);
    }
    let inv = modulus.residue(p - 1).inv()?;
    Ok(CountResult { p, lambda: 1, projective_count: recover_count(&acc.scale(inv), p)?, method: CountMethod::Charsum })
}

/// `c(p)` from `N_p` at `λ = 1`.
pub fn schoen_cp(p: u64, n_p: u64) -> Result<BigInt> {
    if p == 5 {
        return Err(Error::PIsFive);
    }
    let p = BigInt::from(p);
    let base = &p * &p * &p + &p * &p + 1;
    let poly = match (&p % 5u32).try_into().unwrap_or(0u32) {
        1 => &p * &p * &p + 25u32 * &p * &p - 100u32 * &p + 1,
        4 => base,
        _ => base + 2u32 * &p,
    };
    Ok(poly - BigInt::from(n_p))
}

/// `N_p + ₄G(1/5, 2/5, 3/5, 4/5) = p³+25p²-99p+1` for `p ≡ 1 (mod 5)`, else `p³+p²+p+1`.
///
/// Checked modulo `p^K` with `K` raised until `p^K > 2(p³+25p²)`.
pub fn check_n_to_g(p: u64, k: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    require_prime(p)?;
    if p == 5 {
        return Err(Error::PIsFive);
    }
    if p == 2 {
        return Err(Error::BadParameters("the G function is defined for odd p only".into()));
    }
    let bound = 2 * (p.pow(3) + 25 * p * p);
    let mut kk = k.max(1);
    while p.pow(kk) <= bound {
        kk += 1;
    }
    let modulus = PrimePowerModulus::new(p, kk)?;
    let n_p = count_brute(p, 1)?.projective_count;
    let g = n_plus_one_g(&GSpec::quartic(5, 2)?, modulus)?;
    let lhs = modulus.residue(n_p % modulus.m()) + g;
    let poly = if p % 5 == 1 { p.pow(3) + 25 * p * p + 1 - 99 * p } else { p.pow(3) + p * p + p + 1 };
    let rhs = modulus.residue(poly % modulus.m());
    Ok(VerificationReport::compare("count-to-g", p, format!("N_p={n_p}"), modulus.m(), lhs, rhs, started))
}

/// `Σ_{y≠0} Σ_{x_i≠0} θ(y Σ x_i^5) = -(p-1)` in `R`, for `p ≢ 1 (mod 5)`.
pub fn check_fifth_power_sum(p: u64, k: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    require_prime(p)?;
    if p % DEGREE == 1 {
        return Err(Error::IsOneModFive(p));
    }
    let modulus = PrimePowerModulus::new(p, k)?;
    let zeta = zeta_p(modulus)?;
    let pu = p as usize;
    // hist[s] = #{x ∈ (F_p^*)^5 : Σ x_i^5 = s}
    let mut hist = vec![0u64; pu];
    hist[0] = 1;
    for _ in 0..5 {
        let mut next = vec![0u64; pu];
        for (s, &c) in hist.iter().enumerate() {
            for x in 1..p {
                let x5 = (x * x % p) * (x * x % p) % p * x % p;
                next[(s + x5 as usize) % pu] += c;
            }
        }
        hist = next;
    }
    let mut zeta_pows = vec![GKElement::one(modulus)];
    for i in 1..pu {
        let z = &zeta_pows[i - 1] * &zeta;
        zeta_pows.push(z);
    }
    let mut lhs = GKElement::zero(modulus);
    for y in 1..p {
        for (s, &c) in hist.iter().enumerate() {
            let e = (y as usize * s) % pu;
            lhs = &lhs + &zeta_pows[e].scale(modulus.residue(c % modulus.m()));
        }
    }
    let rhs = GKElement::constant(-modulus.residue(p - 1));
    Ok(VerificationReport::compare("fifth-power-sum", p, "", modulus.m(), &lhs, &rhs, started))
}
