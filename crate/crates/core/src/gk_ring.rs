//! Finite-precision arithmetic in `R = (Z/p^K)[π]/(π^(p-1) + p)`.
//!
//! `R` is `Z_p[ζ_p]` truncated at `p^K`: `π` is the root of `x^(p-1) + p`
//! with `π ≡ ζ_p - 1 (mod (ζ_p - 1)^2)`. We fix `π` as the generator and
//! recover `ζ_p` from it by Newton iteration, which pins the same branch.
//!
//! Elements are dense coefficient vectors over the basis `1, π, …, π^(p-2)`.
//! Reducing coefficients modulo `p^K` is reduction modulo the ideal
//! `(π^((p-1)K))`, so the representation is an honest quotient ring.
//! Division by `p` is exact only when every coefficient is divisible by `p`,
//! and the quotient is known only modulo `p^(K-1)`; [`GKElement::div_p`]
//! returns it at the lowered precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::time::Instant;

use crate::arith::{teichmuller, PrimePowerModulus, RationalArg, Residue};
use crate::error::{Error, Result};
use crate::padic_gamma::gamma_p_batch;
use crate::report::VerificationReport;

const MAX_NEWTON_STEPS: usize = 64;

fn require_odd(modulus: PrimePowerModulus) -> Result<()> {
    if modulus.p() == 2 {
        return Err(Error::BadParameters("the ring R is only built for odd p".into()));
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GKElement {
    coeffs: Vec<u64>,
    modulus: PrimePowerModulus,
}

impl fmt::Debug for GKElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GKElement({:?} mod {})", self.coeffs, self.modulus)
    }
}

impl GKElement {
    fn degree_bound(modulus: PrimePowerModulus) -> usize {
        (modulus.p() - 1) as usize
    }

    pub fn zero(modulus: PrimePowerModulus) -> Self {
        Self { coeffs: vec![0; Self::degree_bound(modulus)], modulus }
    }

    pub fn one(modulus: PrimePowerModulus) -> Self {
        Self::constant(modulus.one())
    }

    pub fn constant(c: Residue) -> Self {
        let mut e = Self::zero(c.modulus());
        e.coeffs[0] = c.value();
        e
    }

    /// `c · π^e`, folding `π^(p-1) = -p` for large exponents.
    pub fn monomial(c: Residue, e: u64) -> Self {
        let modulus = c.modulus();
        let n = modulus.p() - 1;
        let mut value = c.value();
        let minus_p = modulus.neg(modulus.p() % modulus.m());
        for _ in 0..e / n {
            value = modulus.mul(value, minus_p);
        }
        let mut out = Self::zero(modulus);
        out.coeffs[(e % n) as usize] = value;
        out
    }

    pub fn pi(modulus: PrimePowerModulus) -> Self {
        Self::monomial(modulus.one(), 1)
    }

    pub fn from_residues(coeffs: &[Residue]) -> Result<Self> {
        let modulus = coeffs.first().ok_or_else(|| Error::BadParameters("empty coefficient list".into()))?.modulus();
        if coeffs.len() != Self::degree_bound(modulus) {
            return Err(Error::BadParameters(format!("expected {} coefficients", modulus.p() - 1)));
        }
        if coeffs.iter().any(|c| c.modulus() != modulus) {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self { coeffs: coeffs.iter().map(Residue::value).collect(), modulus })
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn raw_coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Residue {
        self.modulus.residue(self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when the element lies in `Z/p^K`, i.e. only the constant term survives.
    pub fn is_integral_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn constant_term(&self) -> Residue {
        self.coeff(0)
    }

    /// The constant term, provided the element is integral-rational.
    pub fn to_residue(&self) -> Result<Residue> {
        if !self.is_integral_rational() {
            return Err(Error::NonIntegralResult(format!("{self:?}")));
        }
        Ok(self.constant_term())
    }

    fn same_modulus(&self, rhs: &Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, c: Residue) -> Self {
        assert_eq!(c.modulus(), self.modulus, "residue modulus mismatch");
        let m = self.modulus;
        Self { coeffs: self.coeffs.iter().map(|&a| m.mul(a, c.value())).collect(), modulus: m }
    }

    pub fn ring_add(&self, rhs: &Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        let m = self.modulus;
        Ok(Self { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| m.add(a, b)).collect(), modulus: m })
    }

    pub fn ring_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        let m = self.modulus;
        Ok(Self { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| m.sub(a, b)).collect(), modulus: m })
    }

    /// Schoolbook product folded by `π^(p-1) = -p`. Zero coefficients of
    /// `self` are skipped, so multiplying by a monomial costs `O(p)`.
    pub fn ring_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        let m = self.modulus;
        let n = self.coeffs.len();
        let mut acc = vec![0u64; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b != 0 {
                    acc[i + j] = m.add(acc[i + j], m.mul(a, b));
                }
            }
        }
        let p_mod = m.p() % m.m();
        for d in (n..2 * n - 1).rev() {
            let c = acc[d];
            if c != 0 {
                acc[d - n] = m.sub(acc[d - n], m.mul(p_mod, c));
            }
        }
        acc.truncate(n);
        Ok(Self { coeffs: acc, modulus: m })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Largest `v` with `π^v` dividing the element at working precision
    /// (`None` for zero).
    pub fn pi_valuation(&self) -> Option<u64> {
        let n = self.coeffs.len() as u64;
        let p = self.modulus.p();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let mut v = 0;
                let mut c = c;
                while c % p == 0 {
                    c /= p;
                    v += 1;
                }
                v * n + i as u64
            })
            .min()
    }

    /// Exact division by `p`. The result lives at precision `K - 1`.
    pub fn div_p(&self) -> Result<Self> {
        let p = self.modulus.p();
        if self.modulus.k() < 2 {
            return Err(Error::InvalidModulus { p, k: self.modulus.k(), reason: "no precision left to divide by p" });
        }
        if let Some(&c) = self.coeffs.iter().find(|&&c| c % p != 0) {
            return Err(Error::NotExact(format!("ring element with coefficient {c} by p = {p}")));
        }
        let lower = self.modulus.with_precision(self.modulus.k() - 1)?;
        Ok(Self { coeffs: self.coeffs.iter().map(|&c| c / p).collect(), modulus: lower })
    }

    /// Exact division by `π^v`, `0 <= v <= p-1`. Costs one digit of precision when `v > 0`.
    pub fn div_pi_pow(&self, v: u64) -> Result<Self> {
        let n = self.modulus.p() - 1;
        if v == 0 {
            return Ok(self.clone());
        }
        if v > n {
            return Err(Error::BadParameters(format!("π-power {v} exceeds p-1")));
        }
        // π^(-v) = -π^(p-1-v) / p
        let shifted = self.ring_mul(&Self::monomial(-self.modulus.one(), n - v))?;
        shifted.div_p()
    }

    /// Inverse of a unit (constant term prime to p), by Newton iteration.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let y0 = c0.inv()?;
        let mut y = Self::constant(y0);
        let two = Self::constant(self.modulus.residue(2));
        for _ in 0..MAX_NEWTON_STEPS {
            let next = &y * &(&two - &(self * &y));
            if next == y {
                return Ok(y);
            }
            y = next;
        }
        Err(Error::NoConvergence(MAX_NEWTON_STEPS))
    }

    /// Projection to a lower precision.
    pub fn at_precision(&self, k: u32) -> Result<Self> {
        if k > self.modulus.k() {
            return Err(Error::InvalidModulus {
                p: self.modulus.p(),
                k,
                reason: "cannot raise precision of a ring element",
            });
        }
        let lower = self.modulus.with_precision(k)?;
        Ok(Self { coeffs: self.coeffs.iter().map(|&c| c % lower.m()).collect(), modulus: lower })
    }
}

macro_rules! ring_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &GKElement {
            type Output = GKElement;
            fn $method(self, rhs: &GKElement) -> GKElement {
                self.$checked(rhs).expect("ring element modulus mismatch")
            }
        }
    };
}

ring_binop!(Add, add, ring_add);
ring_binop!(Sub, sub, ring_sub);
ring_binop!(Mul, mul, ring_mul);

impl Neg for &GKElement {
    type Output = GKElement;
    fn neg(self) -> GKElement {
        let m = self.modulus;
        GKElement { coeffs: self.coeffs.iter().map(|&c| m.neg(c)).collect(), modulus: m }
    }
}

/// `C(p, k) / p = C(p-1, k-1) / k` modulo `p^K`, for `1 <= k <= p-1`.
fn binomial_over_p(modulus: PrimePowerModulus) -> Vec<u64> {
    let p = modulus.p();
    let mut out = vec![0u64; p as usize];
    let mut choose = 1u64; // C(p-1, k-1)
    for k in 1..p {
        if k > 1 {
            let j = k - 1;
            choose = modulus.mul(modulus.mul(choose, p - j), modulus.inv_raw(j).expect("j < p"));
        }
        out[k as usize] = modulus.mul(choose, modulus.inv_raw(k).expect("k < p"));
    }
    out
}

/// The primitive p-th root of unity `ζ ∈ R` with `ζ ≡ 1 + π (mod π^2)`.
///
/// Writing `ζ = 1 + πw`, `Φ_p(1 + πw) = -p·F(w)` where
/// `F(w) = w^(p-1) - 1 - Σ_{k=2}^{p-1} (C(p,k)/p) (πw)^(k-1)`.
/// `F'(w)` is a unit, so Newton on `F` from `w = 1` converges π-adically.
pub fn zeta_p(modulus: PrimePowerModulus) -> Result<GKElement> {
    require_odd(modulus)?;
    let p = modulus.p();
    let coeffs = binomial_over_p(modulus);
    let pi = GKElement::pi(modulus);
    let one = GKElement::one(modulus);

    let mut w = one.clone();
    for _ in 0..MAX_NEWTON_STEPS {
        let u = &pi * &w;
        // Powers u^0 .. u^(p-2) and w^0 .. w^(p-1).
        let mut u_pows = Vec::with_capacity(p as usize);
        u_pows.push(one.clone());
        for i in 1..(p - 1) as usize {
            u_pows.push(&u_pows[i - 1] * &u);
        }
        let w_pm2 = w.pow(p - 2);
        let w_pm1 = &w_pm2 * &w;

        let mut f = &w_pm1 - &one;
        let mut df = w_pm2.scale(modulus.residue(p - 1));
        for k in 2..p as usize {
            let c = modulus.residue(coeffs[k]);
            f = &f - &u_pows[k - 1].scale(c);
            // d/dw (πw)^(k-1) = (k-1) π (πw)^(k-2)
            let term = (&pi * &u_pows[k - 2]).scale(c * modulus.residue(k as u64 - 1));
            df = &df - &term;
        }
        if f.is_zero() {
            return Ok(&one + &(&pi * &w));
        }
        let step = &f * &df.inverse()?;
        w = &w - &step;
    }
    Err(Error::NoConvergence(MAX_NEWTON_STEPS))
}

/// All Gauss sums `g(ω^a)`, `0 <= a < p-1`, indexed by the character exponent.
#[derive(Clone, Debug)]
pub struct GaussSums {
    modulus: PrimePowerModulus,
    sums: Vec<GKElement>,
}

impl GaussSums {
    /// Straight from the definition `g(χ) = Σ_x χ(x) ζ^x`.
    pub fn direct(modulus: PrimePowerModulus) -> Result<Self> {
        require_odd(modulus)?;
        let p = modulus.p();
        let n = p - 1;
        let zeta = zeta_p(modulus)?;
        let mut zeta_pows = Vec::with_capacity(p as usize);
        zeta_pows.push(GKElement::one(modulus));
        for x in 1..p as usize {
            zeta_pows.push(&zeta_pows[x - 1] * &zeta);
        }
        let omega: Vec<Residue> = (0..p).map(|x| teichmuller(x, modulus)).collect();
        let sums = (0..n)
            .map(|a| {
                let mut acc = GKElement::zero(modulus);
                for x in 1..p as usize {
                    acc = &acc + &zeta_pows[x].scale(omega[x].pow(a));
                }
                acc
            })
            .collect();
        Ok(Self { modulus, sums })
    }

    /// Via Gross–Koblitz: `g(ω^(-j)) = -π^j Γ_p(j/(p-1))`.
    pub fn gross_koblitz(modulus: PrimePowerModulus) -> Result<Self> {
        require_odd(modulus)?;
        let n = modulus.p() - 1;
        let args: Vec<RationalArg> = (0..n).map(|j| RationalArg::new(j as i64, n as i64)).collect();
        let gammas = gamma_p_batch(&args, modulus)?;
        let sums = (0..n)
            .map(|a| {
                let j = (n - a) % n;
                GKElement::monomial(-gammas[j as usize], j)
            })
            .collect();
        Ok(Self { modulus, sums })
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    /// `g(ω^a)` for any integer exponent `a`.
    pub fn get(&self, a: i64) -> &GKElement {
        let n = self.sums.len() as i64;
        &self.sums[a.rem_euclid(n) as usize]
    }
}

/// `g(ω̄^j) = Σ_{x≠0} ω(x)^(-j) ζ^x`.
pub fn gauss_sum_direct(j: u64, modulus: PrimePowerModulus) -> Result<GKElement> {
    require_odd(modulus)?;
    let p = modulus.p();
    let zeta = zeta_p(modulus)?;
    let n = p - 1;
    let mut acc = GKElement::zero(modulus);
    let mut zx = GKElement::one(modulus);
    for x in 1..p {
        zx = &zx * &zeta;
        let chi = teichmuller(x, modulus).pow((n - j % n) % n);
        acc = &acc + &zx.scale(chi);
    }
    Ok(acc)
}

/// `-Γ_p(j/(p-1)) π^j`.
pub fn gauss_sum_gk(j: u64, modulus: PrimePowerModulus) -> Result<GKElement> {
    require_odd(modulus)?;
    let n = modulus.p() - 1;
    if j >= n {
        return Err(Error::BadParameters(format!("j = {j} outside [0, p-2]")));
    }
    let gamma = gamma_p_batch(&[RationalArg::new(j as i64, n as i64)], modulus)?[0];
    Ok(GKElement::monomial(-gamma, j))
}

/// Hasse–Davenport product relation for `χ = ω^(-t)` of order `m`
/// (`t = (p-1)/m`) and `ψ = ω^(-psi_exponent)`:
/// `∏_{i<m} g(χ^i ψ) = g(ψ^m) ψ^(-m)(m) ∏_{0<i<m} g(χ^i)`.
pub fn check_hasse_davenport(m: u64, psi_exponent: i64, modulus: PrimePowerModulus) -> Result<VerificationReport> {
    let sums = GaussSums::direct(modulus)?;
    check_hasse_davenport_with(&sums, m, psi_exponent)
}

pub fn check_hasse_davenport_with(sums: &GaussSums, m: u64, psi_exponent: i64) -> Result<VerificationReport> {
    let started = Instant::now();
    let modulus = sums.modulus();
    let p = modulus.p();
    let n = p - 1;
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::OrderNotDividing { m, p_minus_one: n });
    }
    let t = (n / m) as i64;
    let j = psi_exponent;
    let mi = m as i64;

    let mut lhs = GKElement::one(modulus);
    for i in 0..mi {
        lhs = &lhs * sums.get(-(i * t + j));
    }
    // ψ^(-m)(m) = ω(m)^(jm)
    let twist = teichmuller(m % p, modulus).pow((j * mi).rem_euclid(n as i64) as u64);
    let mut rhs = sums.get(-(mi * j)).scale(twist);
    for i in 1..mi {
        rhs = &rhs * sums.get(-(i * t));
    }
    Ok(VerificationReport::compare(
        "hasse-davenport",
        p,
        format!("m={m},psi=omega^{}", -j),
        modulus.m(),
        &lhs,
        &rhs,
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u64, k: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, k).unwrap()
    }

    #[test]
    fn defining_relation() {
        for (p, k) in [(3u64, 2u32), (7, 3), (13, 4), (31, 5)] {
            let m = md(p, k);
            let pi = GKElement::pi(m);
            let lhs = &pi.pow(p - 1) + &GKElement::constant(m.residue(p));
            assert!(lhs.is_zero());
            let prod = &pi * &GKElement::monomial(m.one(), p - 2);
            assert_eq!(prod, GKElement::constant(-m.residue(p)));
        }
    }

    #[test]
    fn multiplication_examples() {
        let m = md(3, 2);
        let one_plus_pi = &GKElement::one(m) + &GKElement::pi(m);
        let sq = &one_plus_pi * &one_plus_pi;
        assert_eq!(sq.raw_coeffs(), &[7, 2]);
        let b = GKElement::from_residues(&[m.residue(4), m.residue(5)]).unwrap();
        assert_eq!(&GKElement::one(m) * &b, b);
    }

    #[test]
    fn mismatched_moduli_are_rejected() {
        let a = GKElement::one(md(7, 2));
        let b = GKElement::one(md(7, 3));
        assert_eq!(a.ring_mul(&b), Err(Error::ModulusMismatch));
        assert_eq!(a.ring_add(&b), Err(Error::ModulusMismatch));
    }

    #[test]
    fn zeta_is_a_primitive_root_of_unity() {
        for (p, k) in [(3u64, 2u32), (3, 5), (7, 3), (11, 3), (13, 4), (31, 5)] {
            let m = md(p, k);
            let z = zeta_p(m).unwrap();
            assert_eq!(z.pow(p), GKElement::one(m), "p={p}");
            let mut sum = GKElement::zero(m);
            let mut zx = GKElement::one(m);
            for _ in 0..p {
                sum = &sum + &zx;
                zx = &zx * &z;
            }
            assert!(sum.is_zero());
            // ζ - 1 - π is divisible by π^2.
            let diff = &(&z - &GKElement::one(m)) - &GKElement::pi(m);
            assert!(diff.pi_valuation().is_none_or(|v| v >= 2));
            assert_ne!(z, GKElement::one(m));
        }
    }

    #[test]
    fn zeta_matches_exhaustive_search_mod_9() {
        let m = md(3, 2);
        let one = GKElement::one(m);
        let pi = GKElement::pi(m);
        let mut found = Vec::new();
        for a in 0..9 {
            for b in 0..9 {
                let z = GKElement::from_residues(&[m.residue(a), m.residue(b)]).unwrap();
                let phi = &(&(&z * &z) + &z) + &one;
                let diff = &(&z - &one) - &pi;
                if phi.is_zero() && diff.pi_valuation().is_none_or(|v| v >= 2) {
                    found.push(z);
                }
            }
        }
        // Φ'(ζ) is not a unit, so roots modulo 9 are only pinned down modulo 3.
        let zeta = zeta_p(m).unwrap();
        assert!(found.contains(&zeta));
        assert_eq!(found.len(), 3);
        for z in &found {
            assert_eq!(z.at_precision(1).unwrap(), zeta.at_precision(1).unwrap());
        }
        // The Newton root is the projection of the high-precision root.
        assert_eq!(zeta_p(md(3, 6)).unwrap().at_precision(2).unwrap(), zeta);
    }

    #[test]
    fn trivial_gauss_sum() {
        for p in [3u64, 7, 11] {
            let m = md(p, 3);
            assert_eq!(gauss_sum_direct(0, m).unwrap(), GKElement::constant(-m.one()));
            assert_eq!(gauss_sum_gk(0, m).unwrap(), GKElement::constant(-m.one()));
        }
    }

    #[test]
    fn gross_koblitz_small() {
        let m = md(3, 3);
        let direct = gauss_sum_direct(1, m).unwrap();
        let half = crate::padic_gamma::gamma_p(RationalArg::new(1, 2), m).unwrap();
        assert_eq!(direct, GKElement::monomial(-half, 1));
        for p in [3u64, 7, 11, 13] {
            let m = md(p, 3);
            let direct = GaussSums::direct(m).unwrap();
            let gk = GaussSums::gross_koblitz(m).unwrap();
            for j in 0..p - 1 {
                let g = gauss_sum_direct(j, m).unwrap();
                assert_eq!(g, gauss_sum_gk(j, m).unwrap(), "p={p} j={j}");
                assert_eq!(&g, direct.get(-(j as i64)));
                assert_eq!(&g, gk.get(-(j as i64)));
            }
        }
    }

    #[test]
    fn gauss_pair_product() {
        for p in [3u64, 5, 7, 11, 13] {
            let m = md(p, 3);
            let sums = GaussSums::direct(m).unwrap();
            let g0 = sums.get(0);
            assert_eq!(g0 * g0, GKElement::one(m));
            for a in 1..(p - 1) as i64 {
                let prod = sums.get(a) * sums.get(-a);
                let sign = teichmuller(p - 1, m).pow(a as u64);
                assert_eq!(prod, GKElement::constant(sign * m.residue(p)), "p={p} a={a}");
            }
        }
    }

    #[test]
    fn hasse_davenport() {
        let m = md(11, 3);
        let sums = GaussSums::direct(m).unwrap();
        for j in 0..10 {
            assert!(check_hasse_davenport_with(&sums, 5, j).unwrap().passed());
            assert!(check_hasse_davenport_with(&sums, 2, j).unwrap().passed());
        }
        assert!(check_hasse_davenport(5, 0, m).unwrap().passed());
        assert!(matches!(
            check_hasse_davenport_with(&sums, 3, 1),
            Err(Error::OrderNotDividing { m: 3, p_minus_one: 10 })
        ));
    }

    #[test]
    fn division_helpers() {
        let m = md(7, 4);
        let pi = GKElement::pi(m);
        let x = pi.pow(9).scale(m.residue(3));
        let q = x.div_pi_pow(4).unwrap();
        assert_eq!(q.modulus().k(), 3);
        assert_eq!(q, pi.pow(5).scale(m.residue(3)).at_precision(3).unwrap());
        assert!(pi.div_pi_pow(2).is_err());
        assert!(GKElement::one(m).div_p().is_err());
        let unit = &GKElement::constant(m.residue(3)) + &pi.pow(2);
        assert_eq!(&unit * &unit.inverse().unwrap(), GKElement::one(m));
    }

    #[test]
    fn monomial_folding() {
        let m = md(5, 4);
        assert_eq!(GKElement::monomial(m.one(), 9), GKElement::pi(m).pow(9));
        assert_eq!(GKElement::monomial(m.one(), 4), GKElement::constant(-m.residue(5)));
    }

    #[test]
    fn even_prime_rejected() {
        assert!(zeta_p(md(2, 3)).is_err());
        assert!(GaussSums::direct(md(2, 3)).is_err());
    }
}
