//! Truncated integer q-series: Dedekind eta factors, eta quotients and the
//! weight-4 level-25 form
//! `f = f_1 + 5f_2 + 20f_3 + 25f_4 + 25f_5`, `f_i = η^(5-i)(z) η^4(5z) η^(i-1)(25z)`.
//!
//! Coefficients are exact. Series start out as `i64` vectors and switch to
//! big integers the first time an operation would overflow.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Coeffs {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// `c_0 + c_1 q + … + c_N q^N`.
#[derive(Clone, Debug)]
pub struct IntSeries {
    coeffs: Coeffs,
}

impl PartialEq for IntSeries {
    fn eq(&self, other: &Self) -> bool {
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Small(a), Coeffs::Small(b)) => a == b,
            _ => self.to_bigints() == other.to_bigints(),
        }
    }
}

impl Eq for IntSeries {}

impl IntSeries {
    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least the constant term");
        Self { coeffs: Coeffs::Small(coeffs) }
    }

    pub fn from_bigints(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least the constant term");
        let small: Option<Vec<i64>> = coeffs.iter().map(ToPrimitive::to_i64).collect();
        match small {
            Some(v) => Self { coeffs: Coeffs::Small(v) },
            None => Self { coeffs: Coeffs::Big(coeffs) },
        }
    }

    pub fn one(order: usize) -> Self {
        let mut v = vec![0; order + 1];
        v[0] = 1;
        Self::from_coeffs(v)
    }

    /// Truncation bound `N`.
    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coeffs::Small(v) => v.len() - 1,
            Coeffs::Big(v) => v.len() - 1,
        }
    }

    /// Whether every coefficient still fits in 64 bits.
    pub fn is_small(&self) -> bool {
        matches!(self.coeffs, Coeffs::Small(_))
    }

    pub fn coeff(&self, n: usize) -> Result<BigInt> {
        if n > self.order() {
            return Err(Error::OutOfRange { index: n, order: self.order() });
        }
        Ok(match &self.coeffs {
            Coeffs::Small(v) => BigInt::from(v[n]),
            Coeffs::Big(v) => v[n].clone(),
        })
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        match &self.coeffs {
            Coeffs::Small(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
            Coeffs::Big(v) => v.clone(),
        }
    }

    /// `q^shift · self`, truncated at the same order.
    fn shifted(&self, shift: usize) -> Self {
        let n = self.order();
        let mut out = vec![BigInt::zero(); n + 1];
        let src = self.to_bigints();
        if shift <= n {
            out[shift..].clone_from_slice(&src[..=n - shift]);
        }
        Self::from_bigints(out)
    }

    /// `self + scale · other`.
    fn add_scaled(&self, other: &Self, scale: i64) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        if let (Coeffs::Small(a), Coeffs::Small(b)) = (&self.coeffs, &other.coeffs) {
            let small: Option<Vec<i64>> =
                a.iter().zip(b).map(|(&x, &y)| y.checked_mul(scale).and_then(|t| x.checked_add(t))).collect();
            if let Some(v) = small {
                return Ok(Self::from_coeffs(v));
            }
        }
        let s = BigInt::from(scale);
        let out = self.to_bigints().into_iter().zip(other.to_bigints()).map(|(x, y)| x + y * &s).collect();
        Ok(Self::from_bigints(out))
    }
}

/// `∏_{n≥1} (1 - q^(s n))` to order `N`, from Euler's pentagonal number theorem:
/// `Σ_k (-1)^k q^(s k(3k-1)/2)` over all integers `k`.
pub fn eta_core(s: usize, order: usize) -> IntSeries {
    assert!(s >= 1, "scale must be positive");
    let mut v = vec![0i64; order + 1];
    v[0] = 1;
    for k in 1.. {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let lo = s * k * (3 * k - 1) / 2;
        if lo > order {
            break;
        }
        v[lo] += sign;
        let hi = s * k * (3 * k + 1) / 2;
        if hi <= order {
            v[hi] += sign;
        }
    }
    IntSeries::from_coeffs(v)
}

/// Truncated Cauchy product.
pub fn series_mul(a: &IntSeries, b: &IntSeries) -> Result<IntSeries> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch(a.order(), b.order()));
    }
    let n = a.order();
    if let (Coeffs::Small(x), Coeffs::Small(y)) = (&a.coeffs, &b.coeffs) {
        if let Some(v) = mul_small(x, y, n) {
            return Ok(IntSeries::from_coeffs(v));
        }
    }
    let (x, y) = (a.to_bigints(), b.to_bigints());
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y[..=n - i].iter().enumerate() {
            if !yj.is_zero() {
                out[i + j] += xi * yj;
            }
        }
    }
    Ok(IntSeries::from_bigints(out))
}

fn mul_small(x: &[i64], y: &[i64], n: usize) -> Option<Vec<i64>> {
    let mut acc = vec![0i128; n + 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y[..=n - i].iter().enumerate() {
            if yj != 0 {
                let t = (xi as i128).checked_mul(yj as i128)?;
                acc[i + j] = acc[i + j].checked_add(t)?;
            }
        }
    }
    acc.into_iter().map(|c| i64::try_from(c).ok()).collect()
}

/// `a^e` by repeated squaring of truncated products.
pub fn series_pow(a: &IntSeries, mut e: u64) -> Result<IntSeries> {
    let mut base = a.clone();
    let mut acc = IntSeries::one(a.order());
    while e > 0 {
        if e & 1 == 1 {
            acc = series_mul(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = series_mul(&base, &base)?;
        }
    }
    Ok(acc)
}

/// `∏ η(s z)^e` as a list of `(s, e)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(usize, u64)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(usize, u64)>) -> Self {
        Self { factors }
    }

    /// `f_i = η^(5-i)(z) η^4(5z) η^(i-1)(25z)`, `1 <= i <= 5`.
    pub fn quintic_factor(i: u64) -> Self {
        assert!((1..=5).contains(&i), "f_i is defined for 1 <= i <= 5");
        Self::new(vec![(1, 5 - i), (5, 4), (25, i - 1)])
    }

    /// Leading power of `q`, `Σ s·e / 24`, if integral.
    pub fn offset(&self) -> Result<usize> {
        let total: u64 = self.factors.iter().map(|&(s, e)| s as u64 * e).sum();
        if !total.is_multiple_of(24) {
            return Err(Error::NonIntegralOffset { num: total });
        }
        Ok((total / 24) as usize)
    }
}

pub fn eta_quotient(spec: &EtaQuotientSpec, order: usize) -> Result<IntSeries> {
    let offset = spec.offset()?;
    let mut acc = IntSeries::one(order);
    for &(s, e) in &spec.factors {
        if e == 0 {
            continue;
        }
        acc = series_mul(&acc, &series_pow(&eta_core(s, order), e)?)?;
    }
    Ok(acc.shifted(offset))
}

const F_WEIGHTS: [i64; 5] = [1, 5, 20, 25, 25];

/// `f = Σ_n c(n) q^n` to order `N`.
pub fn modular_form_f(order: usize) -> Result<IntSeries> {
    if order < 1 {
        return Err(Error::BadParameters("expansion order must be at least 1".into()));
    }
    let mut f = IntSeries::from_coeffs(vec![0; order + 1]);
    for (i, &w) in (1..=5).zip(F_WEIGHTS.iter()) {
        let fi = eta_quotient(&EtaQuotientSpec::quintic_factor(i), order)?;
        f = f.add_scaled(&fi, w)?;
    }
    Ok(f)
}

/// `c(n)`.
pub fn coefficient(series: &IntSeries, n: usize) -> Result<BigInt> {
    series.coeff(n)
}
