//! Multiplicative characters of `F_p^*` with values in `Z/p^K`.
//!
//! Every character is a power `ω^a` of the Teichmüller character and is
//! identified by its exponent `a mod (p-1)`. All characters, the trivial one
//! included, vanish at 0.

use std::ops::Mul;
use std::time::Instant;

use crate::arith::{primitive_root, teichmuller, PrimePowerModulus, Residue};
use crate::error::{Error, Result};
use crate::gk_ring::{GKElement, GaussSums};
use crate::report::VerificationReport;

/// The character `ω^a`, `0 <= a < p-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharExponent {
    a: u64,
    group_order: u64,
}

impl CharExponent {
    pub fn new(a: i64, p: u64) -> Self {
        let n = p - 1;
        Self { a: a.rem_euclid(n as i64) as u64, group_order: n }
    }

    pub fn trivial(p: u64) -> Self {
        Self::new(0, p)
    }

    pub fn exponent(&self) -> u64 {
        self.a
    }

    pub fn is_trivial(&self) -> bool {
        self.a == 0
    }

    pub fn conj(&self) -> Self {
        Self { a: (self.group_order - self.a) % self.group_order, group_order: self.group_order }
    }

    pub fn pow(&self, e: i64) -> Self {
        let n = self.group_order as i128;
        let a = (self.a as i128 * e as i128).rem_euclid(n) as u64;
        Self { a, group_order: self.group_order }
    }
}

impl Mul for CharExponent {
    type Output = CharExponent;
    fn mul(self, rhs: CharExponent) -> CharExponent {
        assert_eq!(self.group_order, rhs.group_order, "characters of different fields");
        CharExponent { a: (self.a + rhs.a) % self.group_order, group_order: self.group_order }
    }
}

/// Discrete-log backed lookup table: `χ(x)` for any exponent in `O(1)`.
#[derive(Clone, Debug)]
pub struct CharTable {
    modulus: PrimePowerModulus,
    log: Vec<u64>,
    generator_pows: Vec<u64>,
}

impl CharTable {
    pub fn new(modulus: PrimePowerModulus) -> Self {
        let p = modulus.p();
        let n = p - 1;
        let g = primitive_root(p);
        let omega_g = teichmuller(g, modulus);
        let mut log = vec![0u64; p as usize];
        let mut generator_pows = Vec::with_capacity(n as usize);
        let mut x = 1u64;
        let mut w = modulus.one();
        for e in 0..n {
            log[x as usize] = e;
            generator_pows.push(w.value());
            x = x * g % p;
            w *= omega_g;
        }
        Self { modulus, log, generator_pows }
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    /// Raw value of `ω(x)^a`; `x` is taken modulo `p`.
    #[inline]
    pub fn raw(&self, a: u64, x: u64) -> u64 {
        let p = self.p();
        let x = x % p;
        if x == 0 {
            return 0;
        }
        let n = p - 1;
        self.generator_pows[((a % n) * self.log[x as usize] % n) as usize]
    }

    pub fn value(&self, chi: CharExponent, x: u64) -> Residue {
        self.modulus.residue(self.raw(chi.a, x))
    }

    /// `χ(-1)`, always `±1`.
    pub fn at_minus_one(&self, chi: CharExponent) -> Residue {
        self.value(chi, self.p() - 1)
    }
}

pub fn char_value(a: CharExponent, x: u64, modulus: PrimePowerModulus) -> Residue {
    if x.is_multiple_of(modulus.p()) {
        return modulus.zero();
    }
    teichmuller(x, modulus).pow(a.a)
}

/// `Σ_{x ∈ F_p} χ(x)`.
pub fn orthogonality_element(a: CharExponent, modulus: PrimePowerModulus) -> Residue {
    let table = CharTable::new(modulus);
    (0..modulus.p()).fold(modulus.zero(), |acc, x| acc + table.value(a, x))
}

/// `Σ_χ χ(x)` over all `p-1` characters.
pub fn orthogonality_character(x: u64, modulus: PrimePowerModulus) -> Residue {
    let table = CharTable::new(modulus);
    let p = modulus.p();
    (0..p - 1).fold(modulus.zero(), |acc, a| acc + table.value(CharExponent::new(a as i64, p), x))
}

fn check_same_field(chars: &[CharExponent], p: u64) -> Result<()> {
    if chars.iter().any(|c| c.group_order != p - 1) {
        return Err(Error::BadParameters("character exponents belong to a different prime".into()));
    }
    Ok(())
}

/// Generalized Jacobi sum `Σ_{t_1+…+t_k=1} χ_1(t_1)…χ_k(t_k)`.
///
/// Iterates over `t_1..t_{k-1}` with `t_k` forced, so the cost is `O(p^(k-1))`;
/// callers keep `k <= 4` and `p <= 31`.
pub fn jacobi_sum(chars: &[CharExponent], modulus: PrimePowerModulus) -> Result<Residue> {
    let table = CharTable::new(modulus);
    jacobi_sum_with(&table, chars)
}

pub fn jacobi_sum_with(table: &CharTable, chars: &[CharExponent]) -> Result<Residue> {
    let modulus = table.modulus();
    let p = modulus.p();
    if chars.len() < 2 {
        return Err(Error::BadParameters("a Jacobi sum needs at least two characters".into()));
    }
    check_same_field(chars, p)?;
    let exps: Vec<u64> = chars.iter().map(|c| c.a).collect();

    fn rec(table: &CharTable, exps: &[u64], used: u64, prod: u64) -> u64 {
        let modulus = table.modulus();
        let p = modulus.p();
        if exps.len() == 1 {
            let last = (1 + p - used) % p;
            return modulus.mul(prod, table.raw(exps[0], last));
        }
        let mut acc = 0;
        for t in 1..p {
            let v = table.raw(exps[0], t);
            acc = modulus.add(acc, rec(table, &exps[1..], (used + t) % p, modulus.mul(prod, v)));
        }
        acc
    }

    Ok(modulus.residue(rec(table, &exps, 0, 1)))
}

/// Checks `J(χ_1,…,χ_k) = -χ_k(-1) J(χ_1,…,χ_{k-1})` when `∏χ_i` is trivial
/// but some `χ_i` is not.
pub fn jacobi_reduction_check(chars: &[CharExponent], modulus: PrimePowerModulus) -> Result<VerificationReport> {
    let started = Instant::now();
    let table = CharTable::new(modulus);
    let p = modulus.p();
    check_same_field(chars, p)?;
    if chars.len() < 3 {
        return Err(Error::BadParameters("reduction needs k >= 3".into()));
    }
    let product = chars.iter().fold(CharExponent::trivial(p), |acc, &c| acc * c);
    if !product.is_trivial() || chars.iter().all(CharExponent::is_trivial) {
        return Err(Error::BadParameters("product must be trivial with some factor non-trivial".into()));
    }
    let lhs = jacobi_sum_with(&table, chars)?;
    let (last, init) = chars.split_last().expect("k >= 3");
    let rhs = -(table.at_minus_one(*last) * jacobi_sum_with(&table, init)?);
    Ok(VerificationReport::compare("jacobi-reduction", p, exps_tag(chars), modulus.m(), lhs, rhs, started))
}

fn exps_tag(chars: &[CharExponent]) -> String {
    let parts: Vec<String> = chars.iter().map(|c| c.a.to_string()).collect();
    format!("omega^({})", parts.join(","))
}

/// Checks the Jacobi-to-Gauss relation in `R`, dividing exactly:
/// `J = ∏g(χ_i) / g(∏χ_i)` if the product is non-trivial, `J = -∏g(χ_i)/p` otherwise.
///
/// `sums` must be computed one digit above the precision of the comparison.
pub fn jacobi_to_gauss_check(chars: &[CharExponent], sums: &GaussSums) -> Result<VerificationReport> {
    let started = Instant::now();
    let high = sums.modulus();
    let p = high.p();
    check_same_field(chars, p)?;
    if chars.iter().all(CharExponent::is_trivial) {
        return Err(Error::BadParameters("all characters trivial".into()));
    }
    let low = high.with_precision(high.k() - 1)?;
    let table = CharTable::new(low);
    let jac = jacobi_sum_with(&table, chars)?;

    let numerator = chars.iter().fold(GKElement::one(high), |acc, c| &acc * sums.get(c.a as i64));
    let product = chars.iter().fold(CharExponent::trivial(p), |acc, &c| acc * c);
    let quotient = if product.is_trivial() {
        (-&numerator).div_p()?
    } else {
        // 1/g(χ) = χ(-1) g(χ̄) / p
        let sign = CharTable::new(high).at_minus_one(product);
        (&numerator * sums.get(product.conj().a as i64)).scale(sign).div_p()?
    };
    Ok(VerificationReport::compare(
        "jacobi-to-gauss",
        p,
        exps_tag(chars),
        low.m(),
        &GKElement::constant(jac),
        &quotient,
        started,
    ))
}

fn order_five_generator(p: u64) -> Result<u64> {
    if p % 5 != 1 {
        return Err(Error::NotOneModFive(p));
    }
    Ok((p - 1) / 5)
}

fn check_tsum_params(a: i64, b: i64, c: i64) -> Result<()> {
    if (a + c).rem_euclid(5) == 0 || (b + c).rem_euclid(5) == 0 {
        return Err(Error::BadParameters(format!("a+c and b+c must be nonzero mod 5 (a={a}, b={b}, c={c})")));
    }
    Ok(())
}

/// `Σ_χ χ(-1) J(χ̄ψ^a, χ̄ψ^b, χψ^c)` with `ψ = ω^((p-1)/5)`, by direct summation.
pub fn lemma_jac_tsum(a: i64, b: i64, c: i64, modulus: PrimePowerModulus) -> Result<Residue> {
    let p = modulus.p();
    let t = order_five_generator(p)? as i64;
    check_tsum_params(a, b, c)?;
    let table = CharTable::new(modulus);
    let mut acc = modulus.zero();
    for e in 0..(p - 1) as i64 {
        let chars =
            [CharExponent::new(-e + a * t, p), CharExponent::new(-e + b * t, p), CharExponent::new(e + c * t, p)];
        let sign = table.at_minus_one(CharExponent::new(e, p));
        acc += sign * jacobi_sum_with(&table, &chars)?;
    }
    Ok(acc)
}

/// `Σ_χ g(χ̄ψ^a) g(χ̄ψ^b) g(χψ^c) g(χψ̄^(a+b+c))`, evaluated in `R`.
pub fn cor_gauss_tsum(a: i64, b: i64, c: i64, modulus: PrimePowerModulus) -> Result<Residue> {
    let sums = GaussSums::direct(modulus)?;
    cor_gauss_tsum_with(&sums, a, b, c)
}

pub fn cor_gauss_tsum_with(sums: &GaussSums, a: i64, b: i64, c: i64) -> Result<Residue> {
    let modulus = sums.modulus();
    let p = modulus.p();
    let t = order_five_generator(p)? as i64;
    check_tsum_params(a, b, c)?;
    let mut acc = GKElement::zero(modulus);
    for e in 0..(p - 1) as i64 {
        let term =
            &(&(sums.get(-e + a * t) * sums.get(-e + b * t)) * sums.get(e + c * t)) * sums.get(e - (a + b + c) * t);
        acc = &acc + &term;
    }
    acc.to_residue()
}

/// `p · binom(A, B) = B(-1) Σ_x A(x) B̄(1-x)`.
pub fn greene_binom(a: CharExponent, b: CharExponent, modulus: PrimePowerModulus) -> Residue {
    greene_binom_with(&CharTable::new(modulus), a, b)
}

fn greene_binom_with(table: &CharTable, a: CharExponent, b: CharExponent) -> Residue {
    let modulus = table.modulus();
    let p = modulus.p();
    let b_bar = b.conj();
    let mut acc = 0u64;
    for x in 1..p {
        acc = modulus.add(acc, modulus.mul(table.raw(a.a, x), table.raw(b_bar.a, 1 + p - x)));
    }
    table.at_minus_one(b) * modulus.residue(acc)
}

/// `p^(n+1) · ₙ₊₁Fₙ(A_0,…,A_n; B_1,…,B_n | x)` for Greene's finite-field series.
///
/// The leading `p/(p-1)` is kept as is, so the result is always divisible by `p`.
pub fn greene_hypergeom(
    upper: &[CharExponent],
    lower: &[CharExponent],
    x: u64,
    modulus: PrimePowerModulus,
) -> Result<Residue> {
    let p = modulus.p();
    if upper.len() != lower.len() + 1 {
        return Err(Error::BadParameters(format!(
            "need n+1 upper and n lower characters, got {} and {}",
            upper.len(),
            lower.len()
        )));
    }
    check_same_field(upper, p)?;
    check_same_field(lower, p)?;
    let table = CharTable::new(modulus);
    let mut acc = modulus.zero();
    for e in 0..(p - 1) as i64 {
        let chi = CharExponent::new(e, p);
        let chi_x = table.value(chi, x);
        if chi_x.is_zero() {
            continue;
        }
        let mut term = greene_binom_with(&table, upper[0] * chi, chi);
        for (&a, &b) in upper[1..].iter().zip(lower) {
            term *= greene_binom_with(&table, a * chi, b * chi);
        }
        acc += term * chi_x;
    }
    let scale = modulus.residue(p) * modulus.residue(p - 1).inv()?;
    Ok(acc * scale)
}
