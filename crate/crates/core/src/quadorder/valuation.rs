//! p-adic valuations, lifting the exponent, binomial valuations and
//! multiplicative orders.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::factor::factorize_u64;
use crate::error::{Error, Result};
use crate::field::is_prime_u64;

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// v_p(n) for n != 0.
pub fn vp(n: &BigInt, p: u64) -> Result<u64> {
    check_prime(p)?;
    vp_opt(n, p).ok_or(Error::ZeroValuation)
}

/// v_p(n) with `None` standing for +infinity (n = 0). `p` must be prime.
pub fn vp_opt(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut m = n.magnitude().clone();
    let bp = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn vp_u64(n: u64, p: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let (mut n, mut v) = (n, 0);
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Lifting the exponent: v_p(a^k - b^k) = v_p(a - b) + v_p(k), for
/// a ≡ b ≢ 0 (mod p), additionally a ≡ b (mod 4) when p = 2.
///
/// `a == b` is rejected since the left side is then infinite.
pub fn lte(p: u64, a: &BigInt, b: &BigInt, k: u64) -> Result<u64> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::Precondition("lte needs k >= 1".into()));
    }
    let bp = BigInt::from(p);
    let diff = a - b;
    if diff.is_zero() {
        return Err(Error::Precondition("lte needs a != b".into()));
    }
    if !diff.mod_floor(&bp).is_zero() {
        return Err(Error::Precondition(format!("{a} ≢ {b} (mod {p})")));
    }
    if a.mod_floor(&bp).is_zero() {
        return Err(Error::Precondition(format!("{p} divides {a}")));
    }
    if p == 2 && !diff.mod_floor(&BigInt::from(4)).is_zero() {
        return Err(Error::Precondition(format!("{a} ≢ {b} (mod 4)")));
    }
    Ok(vp_opt(&diff, p).unwrap() + vp_u64(k, p).unwrap())
}

/// v_p(binom(p^l * m, r)) = l - v_p(r) for p ∤ m and 0 < r <= p^l.
pub fn binom_valuation(p: u64, l: u32, m: u64, r: u64) -> Result<u64> {
    check_prime(p)?;
    if m == 0 || m.is_multiple_of(p) {
        return Err(Error::Precondition(format!("m = {m} must be positive and coprime to {p}")));
    }
    let pl = p
        .checked_pow(l)
        .ok_or_else(|| Error::Precondition("p^l overflows".into()))?;
    if r == 0 || r > pl {
        return Err(Error::Precondition(format!("r = {r} outside 1..={pl}")));
    }
    Ok(l as u64 - vp_u64(r, p).unwrap())
}

/// Least e >= 1 with a^e ≡ 1 (mod n).
pub fn mult_order(a: &BigInt, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Precondition(format!("modulus {n} must be >= 2")));
    }
    let bn = BigInt::from(n);
    let r = a.mod_floor(&bn).to_u64().unwrap();
    if r.gcd(&n) != 1 {
        return Err(Error::Precondition(format!("{a} is not a unit mod {n}")));
    }
    let phi: u64 = factorize_u64(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product();
    let pow = |e: u64| BigUint::from(r).modpow(&BigUint::from(e), &BigUint::from(n));
    let mut order = phi;
    for (q, _) in factorize_u64(phi) {
        while order.is_multiple_of(q) && pow(order / q).is_one() {
            order /= q;
        }
    }
    Ok(order)
}

/// v_p(n!) by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += n / pk;
        match pk.checked_mul(p) {
            Some(x) => pk = x,
            None => break,
        }
    }
    v
}
