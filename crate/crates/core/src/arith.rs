//! Exact arithmetic in `Z/p^K`.
//!
//! Every p-adic quantity in the crate is carried as a residue modulo a prime
//! power. The modulus is an explicit value tag on each [`Residue`]; mixing
//! residues of different moduli panics in the operator impls and is reported
//! as [`Error::ModulusMismatch`] by the fallible entry points.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus we accept. Keeps `a + b` inside `u64` for reduced operands.
const MAX_MODULUS: u64 = 1 << 62;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Smallest generator of `F_p^*`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let n = p - 1;
    let mut factors = Vec::new();
    let mut rest = n;
    let mut f = 2;
    while f * f <= rest {
        if rest.is_multiple_of(f) {
            factors.push(f);
            while rest.is_multiple_of(f) {
                rest /= f;
            }
        }
        f += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, n / q, p) != 1)).expect("every prime field has a generator")
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The ring `Z/p^K` with `p` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    k: u32,
    m: u64,
}

impl PrimePowerModulus {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidModulus { p, k, reason: "precision must be at least 1" });
        }
        let mut m: u64 = 1;
        for _ in 0..k {
            m = m.checked_mul(p).filter(|&v| v <= MAX_MODULUS).ok_or(Error::InvalidModulus {
                p,
                k,
                reason: "p^k exceeds 2^62",
            })?;
        }
        Ok(Self { p, k, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The modulus `p^K` itself.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Same prime, different precision.
    pub fn with_precision(&self, k: u32) -> Result<Self> {
        Self::new(self.p, k)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.m)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.m)
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.m as i128) as u64
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.m)).to_u64().expect("reduced value fits the modulus")
    }

    /// Inverse of a raw canonical value, if it is a unit.
    pub fn inv_raw(&self, a: u64) -> Result<u64> {
        let (g, x, _) = ext_gcd(a as i128, self.m as i128);
        if g != 1 {
            return Err(Error::NonInvertible { value: a, p: self.p, k: self.k });
        }
        Ok(x.rem_euclid(self.m as i128) as u64)
    }

    pub fn residue(&self, value: u64) -> Residue {
        Residue { value: value % self.m, modulus: *self }
    }

    pub fn from_i64(&self, value: i64) -> Residue {
        Residue { value: self.reduce_i64(value), modulus: *self }
    }

    pub fn from_bigint(&self, value: &BigInt) -> Residue {
        Residue { value: self.reduce_bigint(value), modulus: *self }
    }

    pub fn zero(&self) -> Residue {
        self.residue(0)
    }

    pub fn one(&self) -> Residue {
        self.residue(1)
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// A class in `Z/p^K`, stored as its canonical representative in `[0, p^K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.modulus.p)
    }

    /// Representative in `(-p^K/2, p^K/2]`.
    pub fn signed(&self) -> i128 {
        let m = self.modulus.m as i128;
        let v = self.value as i128;
        if v > m / 2 {
            v - m
        } else {
            v
        }
    }

    pub fn pow(&self, exp: u64) -> Residue {
        Residue { value: self.modulus.pow(self.value, exp), modulus: self.modulus }
    }

    pub fn inv(&self) -> Result<Residue> {
        inv_mod(*self)
    }

    pub fn checked_add(&self, rhs: &Residue) -> Result<Residue> {
        self.same_modulus(rhs)?;
        Ok(*self + *rhs)
    }

    pub fn checked_mul(&self, rhs: &Residue) -> Result<Residue> {
        self.same_modulus(rhs)?;
        Ok(*self * *rhs)
    }

    fn same_modulus(&self, rhs: &Residue) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch);
        }
        Ok(())
    }

    /// Exact division by `p`; the quotient is only determined modulo `p^(K-1)`.
    pub fn div_p(&self) -> Result<Residue> {
        let p = self.modulus.p;
        if !self.value.is_multiple_of(p) {
            return Err(Error::NotExact(format!("{} by {}", self.value, p)));
        }
        let lower = self.modulus.with_precision(self.modulus.k - 1)?;
        Ok(lower.residue(self.value / p))
    }

    /// Image under the projection `Z/p^K -> Z/p^k` for `k <= K`.
    pub fn reduce_to(&self, k: u32) -> Result<Residue> {
        if k > self.modulus.k {
            return Err(Error::InvalidModulus { p: self.modulus.p, k, reason: "cannot raise precision of a residue" });
        }
        Ok(self.modulus.with_precision(k)?.residue(self.value))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.m)
    }
}

macro_rules! residue_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $raw:ident) => {
        impl $trait for Residue {
            type Output = Residue;
            fn $method(self, rhs: Residue) -> Residue {
                assert_eq!(self.modulus, rhs.modulus, "residue modulus mismatch");
                Residue { value: self.modulus.$raw(self.value, rhs.value), modulus: self.modulus }
            }
        }
        impl $assign_trait for Residue {
            fn $assign_method(&mut self, rhs: Residue) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

residue_binop!(Add, add, AddAssign, add_assign, add);
residue_binop!(Sub, sub, SubAssign, sub_assign, sub);
residue_binop!(Mul, mul, MulAssign, mul_assign, mul);

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalArg {
    num: i64,
    den: u64,
}

impl RationalArg {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Self { num: n, den: d as u64 }
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn add(&self, other: &RationalArg) -> RationalArg {
        let den = self.den as i64 * other.den as i64;
        RationalArg::new(self.num * other.den as i64 + other.num * self.den as i64, den)
    }

    pub fn sub(&self, other: &RationalArg) -> RationalArg {
        self.add(&RationalArg { num: -other.num, den: other.den })
    }

    pub fn add_int(&self, n: i64) -> RationalArg {
        RationalArg { num: self.num + n * self.den as i64, den: self.den }
    }

    pub fn one_minus(&self) -> RationalArg {
        RationalArg { num: self.den as i64 - self.num, den: self.den }
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }
}

impl fmt::Display for RationalArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn inv_mod(a: Residue) -> Result<Residue> {
    let value = a.modulus.inv_raw(a.value)?;
    Ok(Residue { value, modulus: a.modulus })
}

/// Image of a p-integral rational in `Z/p^K`.
pub fn reduce_rational(x: RationalArg, modulus: PrimePowerModulus) -> Result<Residue> {
    if x.den.is_multiple_of(modulus.p) {
        return Err(Error::DenominatorDivisibleByP { den: x.den, p: modulus.p });
    }
    let den_inv = modulus.inv_raw(x.den % modulus.m)?;
    Ok(modulus.residue(modulus.mul(modulus.reduce_i64(x.num), den_inv)))
}

/// Teichmüller representative `ω(x)`: the (p-1)-th root of unity congruent to
/// `x` modulo `p`, or 0 when `p | x`.
///
/// Computed as `x^(p^(K-1))`, i.e. `K-1` applications of the Frobenius power map.
pub fn teichmuller(x: u64, modulus: PrimePowerModulus) -> Residue {
    let p = modulus.p;
    let mut y = x % p;
    if y == 0 {
        return modulus.zero();
    }
    for _ in 1..modulus.k {
        y = modulus.pow(y, p);
    }
    modulus.residue(y)
}

/// `(⌊q⌋, ⟨q⟩)` with the floor taken toward negative infinity.
pub fn floor_frac(q: RationalArg) -> (i64, RationalArg) {
    let den = q.den as i64;
    let fl = q.num.div_euclid(den);
    (fl, RationalArg::new(q.num.rem_euclid(den), den))
}
