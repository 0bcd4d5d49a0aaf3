//! Truncated hypergeometric series modulo `p^K`, the p-adic function `ₙ₊₁G`,
//! and the congruences tying them to Greene's finite-field series.

use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{floor_frac, is_prime, reduce_rational, PrimePowerModulus, RationalArg, Residue};
use crate::char_sums::{greene_hypergeom, CharExponent};
use crate::error::{Error, Result};
use crate::padic_gamma::gamma_p_batch;
use crate::report::VerificationReport;

/// `(a)_n = a(a+1)…(a+n-1)`, with `(a)_0 = 1`.
pub fn rising_factorial(a: RationalArg, n: u64, modulus: PrimePowerModulus) -> Result<Residue> {
    let base = reduce_rational(a, modulus)?;
    let mut acc = modulus.one();
    for i in 0..n {
        acc *= base + modulus.residue(i % modulus.m());
    }
    Ok(acc)
}

/// `ᵣFₛ(a_1…a_r; b_1…b_s | z)` truncated after the `q^m` term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeomSpec {
    pub upper: Vec<RationalArg>,
    pub lower: Vec<RationalArg>,
    pub z: RationalArg,
    pub truncation: u64,
}

impl HypergeomSpec {
    /// `₄F₃(1/d, r/d, 1-r/d, 1-1/d; 1, 1, 1 | 1)` truncated at `m`.
    pub fn quartic(d: i64, r: i64, truncation: u64) -> Self {
        Self {
            upper: vec![
                RationalArg::new(1, d),
                RationalArg::new(r, d),
                RationalArg::new(d - r, d),
                RationalArg::new(d - 1, d),
            ],
            lower: vec![RationalArg::integer(1); 3],
            z: RationalArg::integer(1),
            truncation,
        }
    }
}

fn valuation(mut n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Splits the nonzero rational `num/den` (with `p ∤ den`) into `(unit mod p^K, v_p)`.
fn split_unit(num: i128, den: u64, modulus: PrimePowerModulus) -> Result<(Residue, i64)> {
    let p = modulus.p();
    let v = valuation(num, p);
    let unit = num / (p as i128).pow(v);
    let unit = modulus.residue(unit.rem_euclid(modulus.m() as i128) as u64);
    let den_inv = modulus.residue(den % modulus.m()).inv()?;
    Ok((unit * den_inv, v as i64))
}

/// `Σ_{n=0}^{m} ∏(a_i)_n / (∏(b_j)_n n!) z^n` modulo `p^K`.
///
/// The running term is held as `unit · p^v` and updated by the ratio of
/// consecutive terms, so intermediate terms may be divisible by high powers of
/// `p` (or by `p^K`) without losing information. A term with `v < 0` is an error.
pub fn truncated_hypergeom(spec: &HypergeomSpec, modulus: PrimePowerModulus) -> Result<Residue> {
    let p = modulus.p();
    for b in &spec.lower {
        if b.is_integer() && b.num() <= 0 {
            return Err(Error::BadParameters(format!("lower parameter {b} is a non-positive integer")));
        }
    }
    for x in spec.upper.iter().chain(&spec.lower).chain(std::iter::once(&spec.z)) {
        if x.den() % p == 0 {
            return Err(Error::DenominatorDivisibleByP { den: x.den(), p });
        }
    }

    let k = modulus.k() as i64;
    let mut sum = modulus.one();
    let (mut unit, mut v) = (modulus.one(), 0i64);
    if spec.z.num() == 0 {
        return Ok(sum);
    }
    let (z_unit, z_v) = split_unit(spec.z.num() as i128, spec.z.den(), modulus)?;

    for n in 0..spec.truncation {
        let shift = |x: &RationalArg| x.num() as i128 + n as i128 * x.den() as i128;
        // A vanishing upper factor terminates the series.
        if spec.upper.iter().any(|a| shift(a) == 0) {
            break;
        }
        for a in &spec.upper {
            let (u, e) = split_unit(shift(a), a.den(), modulus)?;
            unit *= u;
            v += e;
        }
        for b in spec.lower.iter().map(|b| (shift(b), b.den())).chain(std::iter::once(((n + 1) as i128, 1))) {
            let (u, e) = split_unit(b.0, b.1, modulus)?;
            unit *= u.inv()?;
            v -= e;
        }
        unit *= z_unit;
        v += z_v;
        if v < 0 {
            return Err(Error::TermNotPIntegral { n: n + 1 });
        }
        if v < k {
            sum += unit * modulus.residue(p.pow(v as u32));
        }
    }
    Ok(sum)
}

/// Arguments `m_i/d_i` of `ₙ₊₁G`, each strictly between 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GSpec {
    fractions: Vec<RationalArg>,
}

impl GSpec {
    pub fn new(fractions: Vec<RationalArg>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::BadParameters("need at least one fraction".into()));
        }
        for x in &fractions {
            if x.num() <= 0 || x.num() as u64 >= x.den() {
                return Err(Error::BadParameters(format!("{x} is not strictly between 0 and 1")));
            }
        }
        Ok(Self { fractions })
    }

    /// `(1/d, r/d, 1-r/d, 1-1/d)`.
    pub fn quartic(d: i64, r: i64) -> Result<Self> {
        Self::new(vec![
            RationalArg::new(1, d),
            RationalArg::new(r, d),
            RationalArg::new(d - r, d),
            RationalArg::new(d - 1, d),
        ])
    }

    pub fn fractions(&self) -> &[RationalArg] {
        &self.fractions
    }
}

/// `ₙ₊₁G(m_1/d_1, …, m_{n+1}/d_{n+1})_p` modulo `p^K`, with `n+1` the number of fractions.
///
/// Every `Γ_p` value needed is gathered first and evaluated in one sweep.
pub fn n_plus_one_g(spec: &GSpec, modulus: PrimePowerModulus) -> Result<Residue> {
    let p = modulus.p();
    if p == 2 {
        return Err(Error::BadParameters("the G function is defined for odd p only".into()));
    }
    let fr = spec.fractions();
    let width = fr.len();
    let pm1 = (p - 1) as i64;

    // Layout: [Γ_p(m_i/d_i)]_i, then per j: Γ_p(j/(p-1)), [Γ_p(<m_i/d_i - j/(p-1)>)]_i.
    let mut args: Vec<RationalArg> = fr.to_vec();
    let mut floors = Vec::with_capacity((p - 1) as usize * width);
    for j in 0..pm1 {
        let t = RationalArg::new(j, pm1);
        args.push(t);
        for x in fr {
            let (fl, frac) = floor_frac(x.sub(&t));
            assert!(fl == 0 || fl == -1, "floor {fl} outside {{-1, 0}}");
            floors.push(fl);
            args.push(frac);
        }
    }
    let g = gamma_p_batch(&args, modulus)?;

    let denom = g[..width].iter().fold(modulus.one(), |a, &b| a * b).inv()?;
    let minus_p = -modulus.residue(p % modulus.m());
    let mut sum = modulus.zero();
    for j in 0..(p - 1) as usize {
        let base = j * (width + 1) + width;
        let lead = if j % 2 == 0 { g[base] } else { -g[base] };
        let mut term = lead.pow(width as u64) * denom;
        for i in 0..width {
            term *= g[base + 1 + i];
            if floors[j * width + i] == -1 {
                term *= minus_p;
            }
        }
        sum += term;
    }
    Ok(-sum * modulus.residue(p - 1).inv()?)
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

fn check_dr(d: i64, r: i64) -> Result<()> {
    if !(2..=d - 2).contains(&r) || gcd(r, d) != 1 {
        return Err(Error::ConditionsNotMet(format!("need 2 <= r <= d-2 and gcd(r, d) = 1, got d={d}, r={r}")));
    }
    Ok(())
}

/// `s(p) = Γ_p(1/d) Γ_p(r/d) Γ_p((d-r)/d) Γ_p((d-1)/d)`.
pub fn s_factor(d: i64, r: i64, modulus: PrimePowerModulus) -> Result<Residue> {
    check_dr(d, r)?;
    let args: Vec<RationalArg> = [1, r, d - r, d - 1].iter().map(|&m| RationalArg::new(m, d)).collect();
    Ok(gamma_p_batch(&args, modulus)?.into_iter().fold(modulus.one(), |a, b| a * b))
}

/// Whether the odd prime `p` satisfies `p ≡ ±1 (mod d)`, or `p ≡ ±r (mod d)` with `r² ≡ ±1 (mod d)`.
fn quartic_prime_condition(d: i64, r: i64, p: u64) -> bool {
    let pm = (p % d as u64) as i64;
    let pm_one = pm == 1 || pm == d - 1;
    let r2 = (r * r).rem_euclid(d);
    let r_square_unit = r2 == 1 || r2 == d - 1;
    pm_one || ((pm == r || pm == d - r) && r_square_unit)
}

/// `₄G(1/d, r/d, 1-r/d, 1-1/d) ≡ ₄F₃(…; 1,1,1 | 1)_{p-1} + s(p) p (mod p^K)`.
pub fn check_thm_4g2(d: i64, r: i64, p: u64, k: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    check_dr(d, r)?;
    if p == 2 || !is_prime(p) || (d as u64).is_multiple_of(p) || !quartic_prime_condition(d, r, p) {
        return Err(Error::ConditionsNotMet(format!("p={p} is not admissible for d={d}, r={r}")));
    }
    let modulus = PrimePowerModulus::new(p, k)?;
    let lhs = n_plus_one_g(&GSpec::quartic(d, r)?, modulus)?;
    let series = truncated_hypergeom(&HypergeomSpec::quartic(d, r, p - 1), modulus)?;
    let rhs = series + s_factor(d, r, modulus)? * modulus.residue(p);
    Ok(VerificationReport::compare(
        "g-truncated-series-congruence",
        p,
        format!("d={d},r={r}"),
        modulus.m(),
        lhs,
        rhs,
        started,
    ))
}

/// Upper characters `ρ_i^{m_i}` with `ρ_i = ω̄^{(p-1)/d_i}`, for `p ≡ 1 (mod d_i)`.
fn greene_upper(spec: &GSpec, p: u64) -> Result<Vec<CharExponent>> {
    spec.fractions()
        .iter()
        .map(|x| {
            if !(p - 1).is_multiple_of(x.den()) {
                return Err(Error::ConditionsNotMet(format!("p={p} is not 1 mod {}", x.den())));
            }
            Ok(CharExponent::new(-x.num() * ((p - 1) / x.den()) as i64, p))
        })
        .collect()
}

/// `p^{n+1} ₙ₊₁Fₙ(ρ_1^{m_1}, …; ε, …, ε | 1)` at precision `k`.
fn scaled_greene(spec: &GSpec, p: u64, k: u32) -> Result<Residue> {
    let upper = greene_upper(spec, p)?;
    let lower = vec![CharExponent::trivial(p); upper.len() - 1];
    greene_hypergeom(&upper, &lower, 1, PrimePowerModulus::new(p, k)?)
}

/// `ₙ₊₁G(m_1/d_1, …) = (-p)^n ₙ₊₁Fₙ(ρ_1^{m_1}, …; ε, …, ε | 1)` modulo `p^K`.
pub fn check_prop_gtoghs(spec: &GSpec, p: u64, k: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    let n = spec.fractions().len() as u64 - 1;
    let scaled = scaled_greene(spec, p, k + 1)?;
    let mut rhs = scaled.div_p()?;
    if n % 2 == 1 {
        rhs = -rhs;
    }
    let modulus = PrimePowerModulus::new(p, k)?;
    let lhs = n_plus_one_g(spec, modulus)?;
    let params: Vec<String> = spec.fractions().iter().map(ToString::to_string).collect();
    Ok(VerificationReport::compare(
        "g-to-greene",
        p,
        format!("args={}", params.join(";")),
        modulus.m(),
        lhs,
        rhs,
        started,
    ))
}

/// `-p³ ₄F₃(χ_5, χ_5², χ_5³, χ_5⁴; ε, ε, ε | 1) - p = c(p)` modulo `p^K`, for `p ≡ 1 (mod 5)`.
pub fn check_greene_coefficient(p: u64, k: u32, c_p: &BigInt) -> Result<VerificationReport> {
    let started = Instant::now();
    if p % 5 != 1 {
        return Err(Error::NotOneModFive(p));
    }
    // The character set {χ_5^i} is the same whichever generator is used.
    let spec = GSpec::quartic(5, 2)?;
    let p_cubed_f = scaled_greene(&spec, p, k + 1)?.div_p()?;
    let modulus = PrimePowerModulus::new(p, k)?;
    let lhs = -p_cubed_f - modulus.residue(p);
    let rhs = modulus.from_bigint(c_p);
    Ok(VerificationReport::compare("greene-to-coefficient", p, "", modulus.m(), lhs, rhs, started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_between;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn md(p: u64, k: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, k).unwrap()
    }

    fn big_rational(x: RationalArg) -> BigRational {
        BigRational::new(BigInt::from(x.num()), BigInt::from(x.den()))
    }

    // Oracle: sum the series in exact rationals. Returns the index of the first
    // term whose reduced denominator is divisible by p, if any.
    fn exact_series(spec: &HypergeomSpec, p: u64) -> std::result::Result<BigRational, u64> {
        let p = BigInt::from(p);
        let mut sum = BigRational::zero();
        for n in 0..=spec.truncation {
            let mut term = BigRational::one();
            for i in 0..n {
                let i = BigRational::from_integer(BigInt::from(i));
                for a in &spec.upper {
                    term *= big_rational(*a) + &i;
                }
                for b in &spec.lower {
                    term /= big_rational(*b) + &i;
                }
                term /= &i + BigRational::one();
                term *= big_rational(spec.z);
            }
            if (term.denom() % &p).is_zero() {
                return Err(n);
            }
            sum += term;
        }
        Ok(sum)
    }

    fn oracle(spec: &HypergeomSpec, m: PrimePowerModulus) -> Result<Residue> {
        match exact_series(spec, m.p()) {
            Ok(x) => Ok(reduce_exact(&x, m)),
            Err(n) => Err(Error::TermNotPIntegral { n }),
        }
    }

    fn reduce_exact(x: &BigRational, m: PrimePowerModulus) -> Residue {
        m.from_bigint(x.numer()) * m.from_bigint(x.denom()).inv().unwrap()
    }

    #[test]
    fn rising_factorial_examples() {
        let m = md(7, 3);
        assert_eq!(rising_factorial(RationalArg::new(3, 4), 0, m).unwrap(), m.one());
        let mut fact = 1u128;
        for n in 0..=20u64 {
            if n > 0 {
                fact *= n as u128;
            }
            let expected = m.residue((fact % m.m() as u128) as u64);
            assert_eq!(rising_factorial(RationalArg::integer(1), n, m).unwrap(), expected);
        }
        let fifth = rising_factorial(RationalArg::new(1, 5), 1, m).unwrap();
        assert_eq!(fifth * m.residue(5), m.one());
        assert!(matches!(rising_factorial(RationalArg::new(1, 7), 2, m), Err(Error::DenominatorDivisibleByP { .. })));
    }

    #[test]
    fn truncated_examples() {
        let spec = HypergeomSpec::quartic(5, 2, 0);
        assert_eq!(truncated_hypergeom(&spec, md(7, 3)).unwrap(), md(7, 3).one());
        let two = md(2, 3);
        let v = truncated_hypergeom(&HypergeomSpec::quartic(5, 2, 1), two).unwrap();
        assert_eq!(v.value(), 1);
    }

    #[test]
    fn truncated_matches_exact_rationals() {
        for p in primes_between(2, 13).into_iter().filter(|&p| p != 5) {
            for k in [1u32, 3, 4] {
                let m = md(p, k);
                for trunc in 0..p {
                    let spec = HypergeomSpec::quartic(5, 2, trunc);
                    assert_eq!(truncated_hypergeom(&spec, m), oracle(&spec, m), "p={p} K={k} m={trunc}");
                }
            }
        }
        // Nontrivial argument and lower parameters; some primes hit a bad term.
        let spec = HypergeomSpec {
            upper: vec![RationalArg::new(1, 2), RationalArg::new(-3, 4), RationalArg::new(2, 3)],
            lower: vec![RationalArg::new(5, 4), RationalArg::integer(2)],
            z: RationalArg::new(-7, 3),
            truncation: 12,
        };
        let mut errors = 0;
        for p in [7u64, 11, 13, 17, 19, 23] {
            let m = md(p, 4);
            let got = truncated_hypergeom(&spec, m);
            errors += got.is_err() as usize;
            assert_eq!(got, oracle(&spec, m), "p={p}");
        }
        assert!(errors > 0 && errors < 6);
    }

    #[test]
    fn truncated_terminating_and_errors() {
        // (-2)_n vanishes from n = 3 on, so the tail past the zero never matters.
        let spec = HypergeomSpec {
            upper: vec![RationalArg::integer(-2)],
            lower: vec![RationalArg::integer(1)],
            z: RationalArg::integer(1),
            truncation: 40,
        };
        let m = md(7, 3);
        assert_eq!(truncated_hypergeom(&spec, m), oracle(&spec, m));
        // Past n = p-1 the numerators still cancel the p in n! for a while.
        for trunc in [7u64, 13, 20, 60] {
            let long = HypergeomSpec::quartic(5, 2, trunc);
            assert_eq!(truncated_hypergeom(&long, m), oracle(&long, m), "m={trunc}");
        }
        let exp_series = HypergeomSpec { upper: vec![], lower: vec![], z: RationalArg::integer(1), truncation: 7 };
        assert_eq!(truncated_hypergeom(&exp_series, m), Err(Error::TermNotPIntegral { n: 7 }));
        assert_eq!(oracle(&exp_series, m), Err(Error::TermNotPIntegral { n: 7 }));
        let bad = HypergeomSpec { lower: vec![RationalArg::integer(0)], ..spec };
        assert!(matches!(truncated_hypergeom(&bad, m), Err(Error::BadParameters(_))));
    }

    #[test]
    fn s_factor_values() {
        for p in [3u64, 7, 11, 13, 17, 19, 29, 31] {
            let m = md(p, 3);
            let expected = if matches!(p % 5, 1 | 4) { m.one() } else { -m.one() };
            assert_eq!(s_factor(5, 2, m).unwrap(), expected, "p={p}");
        }
        assert!(matches!(s_factor(6, 2, md(7, 2)), Err(Error::ConditionsNotMet(_))));
    }

    #[test]
    fn g_is_symmetric() {
        let m = md(13, 3);
        let base = n_plus_one_g(&GSpec::quartic(5, 2).unwrap(), m).unwrap();
        let perms = [[4, 3, 2, 1], [2, 4, 1, 3], [3, 1, 4, 2]];
        for perm in perms {
            let spec = GSpec::new(perm.iter().map(|&i| RationalArg::new(i, 5)).collect()).unwrap();
            assert_eq!(n_plus_one_g(&spec, m).unwrap(), base);
        }
        let spec = GSpec::new(vec![RationalArg::new(1, 3), RationalArg::new(3, 4)]).unwrap();
        let swapped = GSpec::new(vec![RationalArg::new(3, 4), RationalArg::new(1, 3)]).unwrap();
        assert_eq!(n_plus_one_g(&spec, m).unwrap(), n_plus_one_g(&swapped, m).unwrap());
    }

    #[test]
    fn gspec_validation() {
        assert!(GSpec::new(vec![RationalArg::integer(1)]).is_err());
        assert!(GSpec::new(vec![RationalArg::new(-1, 3)]).is_err());
        assert!(GSpec::new(vec![]).is_err());
        assert!(n_plus_one_g(&GSpec::quartic(5, 2).unwrap(), md(2, 3)).is_err());
        assert!(matches!(
            n_plus_one_g(&GSpec::quartic(5, 2).unwrap(), md(5, 2)),
            Err(Error::DenominatorDivisibleByP { .. })
        ));
    }

    #[test]
    fn quartic_congruence_small_primes() {
        for p in [3u64, 7, 11, 13, 17, 19, 23] {
            let rep = check_thm_4g2(5, 2, p, 3).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        assert!(matches!(check_thm_4g2(6, 2, 7, 3), Err(Error::ConditionsNotMet(_))));
        assert!(matches!(check_thm_4g2(5, 2, 5, 3), Err(Error::ConditionsNotMet(_))));
        // d = 7, r = 2: r² = 4 is not ±1 mod 7, so only p ≡ ±1 (mod 7) qualify.
        assert!(check_thm_4g2(7, 2, 13, 3).unwrap().passed());
        assert!(matches!(check_thm_4g2(7, 2, 11, 3), Err(Error::ConditionsNotMet(_))));
    }

    #[test]
    fn g_matches_greene() {
        let rep = check_prop_gtoghs(&GSpec::quartic(5, 2).unwrap(), 11, 3).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let half = GSpec::new(vec![RationalArg::new(1, 2); 2]).unwrap();
        for p in [3u64, 7, 11, 13] {
            assert!(check_prop_gtoghs(&half, p, 3).unwrap().passed(), "p={p}");
        }
        let mixed = GSpec::new(vec![RationalArg::new(1, 3), RationalArg::new(1, 2), RationalArg::new(2, 3)]).unwrap();
        assert!(check_prop_gtoghs(&mixed, 13, 3).unwrap().passed());
        assert!(matches!(check_prop_gtoghs(&GSpec::quartic(5, 2).unwrap(), 13, 3), Err(Error::ConditionsNotMet(_))));
    }
}
