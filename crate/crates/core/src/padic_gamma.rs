//! Morita's p-adic gamma function at p-integral rational arguments.
//!
//! `Γ_p(n) = (-1)^n ∏_{0<j<n, p∤j} j` on positive integers, extended to `Z_p`
//! by continuity. Since `Γ_p` is 1-Lipschitz for odd `p`, the value at `x`
//! modulo `p^K` equals the value at the unique integer lift `n ∈ [0, p^K)` of
//! `x`, so everything here reduces to prefix products over `[1, p^K)`.

use std::time::Instant;

use crate::arith::{reduce_rational, teichmuller, PrimePowerModulus, RationalArg, Residue};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

pub fn gamma_p_int(n: u64, modulus: PrimePowerModulus) -> Residue {
    let p = modulus.p();
    let mut acc = 1u64;
    for j in 1..n {
        if j % p != 0 {
            acc = modulus.mul(acc, j % modulus.m());
        }
    }
    let r = modulus.residue(acc);
    if n % 2 == 1 {
        -r
    } else {
        r
    }
}

fn lift(x: RationalArg, modulus: PrimePowerModulus) -> Result<u64> {
    Ok(reduce_rational(x, modulus)?.value())
}

pub fn gamma_p(x: RationalArg, modulus: PrimePowerModulus) -> Result<Residue> {
    Ok(gamma_p_int(lift(x, modulus)?, modulus))
}

/// Evaluates `Γ_p` at every argument with a single ascending sweep over the
/// integer lifts; cost is `O(max lift)` regardless of `xs.len()`.
pub fn gamma_p_batch(xs: &[RationalArg], modulus: PrimePowerModulus) -> Result<Vec<Residue>> {
    let lifts = xs.iter().map(|&x| lift(x, modulus)).collect::<Result<Vec<u64>>>()?;
    Ok(gamma_at_lifts(&lifts, modulus))
}

pub(crate) fn gamma_at_lifts(lifts: &[u64], modulus: PrimePowerModulus) -> Vec<Residue> {
    let mut order: Vec<usize> = (0..lifts.len()).collect();
    order.sort_unstable_by_key(|&i| lifts[i]);
    let sorted: Vec<u64> = order.iter().map(|&i| lifts[i]).collect();
    let prefixes = if modulus.m() % 2 == 1 {
        prefix_products_montgomery(&sorted, modulus)
    } else {
        prefix_products_plain(&sorted, modulus)
    };
    let mut out = vec![modulus.zero(); lifts.len()];
    for (&i, prefix) in order.iter().zip(prefixes) {
        let v = modulus.residue(prefix);
        out[i] = if lifts[i] % 2 == 1 { -v } else { v };
    }
    out
}

/// `∏_{0<j<n, p∤j} j mod p^K` for each `n` of the ascending list.
fn prefix_products_plain(sorted: &[u64], modulus: PrimePowerModulus) -> Vec<u64> {
    let p = modulus.p();
    let mut out = Vec::with_capacity(sorted.len());
    let mut prefix = 1 % modulus.m();
    let mut t = 1u64;
    for &n in sorted {
        while t < n {
            if !t.is_multiple_of(p) {
                prefix = modulus.mul(prefix, t);
            }
            t += 1;
        }
        out.push(prefix);
    }
    out
}

/// Montgomery arithmetic modulo an odd `m < 2^63`, with `R = 2^64`.
struct Montgomery {
    m: u64,
    m_neg_inv: u64,
    r_mod_m: u64,
}

impl Montgomery {
    fn new(m: u64) -> Self {
        debug_assert!(m % 2 == 1 && m < 1 << 63);
        // Newton iteration for m^(-1) mod 2^64; each step doubles the correct bits.
        let mut inv = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r_mod_m = ((1u128 << 64) % m as u128) as u64;
        Self { m, m_neg_inv: inv.wrapping_neg(), r_mod_m }
    }

    fn redc(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let u = lo.wrapping_mul(self.m_neg_inv);
        let um = u as u128 * self.m as u128;
        let carry = ((um as u64 as u128 + lo as u128) >> 64) as u64;
        let r = hi + (um >> 64) as u64 + carry;
        if r >= self.m {
            r - self.m
        } else {
            r
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
}

fn prefix_products_montgomery(sorted: &[u64], modulus: PrimePowerModulus) -> Vec<u64> {
    let p = modulus.p();
    let mont = Montgomery::new(modulus.m());
    let one = mont.r_mod_m;
    let r2 = ((one as u128 * one as u128) % modulus.m() as u128) as u64;
    let mut out = Vec::with_capacity(sorted.len());
    // Four interleaved accumulators in Montgomery form, so consecutive
    // multiplications do not wait on each other.
    let mut accs = [one; 4];
    let mut t = 1u64;
    for &n in sorted {
        while t < n {
            if t.is_multiple_of(p) {
                t += 1;
                continue;
            }
            let run_end = n.min((t / p + 1) * p);
            let x = mont.mul(t % modulus.m(), r2);
            multiply_run(&mont, &mut accs, x, run_end - t);
            t = run_end;
        }
        let prod = mont.mul(mont.mul(accs[0], accs[1]), mont.mul(accs[2], accs[3]));
        out.push(mont.redc(prod as u128));
    }
    out
}

/// Multiplies `x, x+1, …, x+len-1` (Montgomery form) into the accumulators.
fn multiply_run(mont: &Montgomery, accs: &mut [u64; 4], mut x: u64, len: u64) {
    let one = mont.r_mod_m;
    let two = mont.add(one, one);
    let three = mont.add(two, one);
    let four = mont.add(two, two);
    let [mut a0, mut a1, mut a2, mut a3] = *accs;
    for _ in 0..len / 4 {
        a0 = mont.mul(a0, x);
        a1 = mont.mul(a1, mont.add(x, one));
        a2 = mont.mul(a2, mont.add(x, two));
        a3 = mont.mul(a3, mont.add(x, three));
        x = mont.add(x, four);
    }
    for _ in 0..len % 4 {
        a0 = mont.mul(a0, x);
        x = mont.add(x, one);
    }
    *accs = [a0, a1, a2, a3];
}

/// Checks the multiplication formula
/// `∏_{h<m} Γ_p((x+h)/m) = ω(m)^e Γ_p(x) ∏_{0<h<m} Γ_p(h/m)` for `x = r/(p-1)`,
/// `0 <= r <= p-1`, where `e = (1-x)(1-p) = r - (p-1)` is taken modulo `p-1`.
///
/// Other arguments are rejected: the formula is only asserted on that range.
pub fn check_mult_formula(m: u64, x: RationalArg, modulus: PrimePowerModulus) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = modulus.p();
    if m == 0 || m.is_multiple_of(p) {
        return Err(Error::BadParameters(format!("multiplier m = {m} must be positive and prime to p")));
    }
    let scaled = x.num() as i128 * (p - 1) as i128;
    if scaled % x.den() as i128 != 0 {
        return Err(Error::BadParameters(format!("{x} is not of the form r/(p-1)")));
    }
    let r = scaled / x.den() as i128;
    if !(0..=(p - 1) as i128).contains(&r) {
        return Err(Error::BadParameters(format!("{x} lies outside [0, 1]")));
    }
    let r = r as u64;

    let mm = m as i64;
    let mut args: Vec<RationalArg> =
        (0..mm).map(|h| x.add_int(h)).map(|y| RationalArg::new(y.num(), y.den() as i64 * mm)).collect();
    args.push(x);
    args.extend((1..mm).map(|h| RationalArg::new(h, mm)));
    let g = gamma_p_batch(&args, modulus)?;
    let (lhs_terms, rest) = g.split_at(m as usize);
    let lhs = lhs_terms.iter().fold(modulus.one(), |acc, &v| acc * v);

    // ω(m) has order dividing p-1, so r - (p-1) ≡ r.
    let exponent = r % (p - 1);
    let omega_m = teichmuller(m % p, modulus).pow(exponent);
    let rhs = rest.iter().fold(omega_m, |acc, &v| acc * v);

    Ok(VerificationReport::compare("gamma-product-formula", p, format!("m={m},x={x}"), modulus.m(), lhs, rhs, started))
}
