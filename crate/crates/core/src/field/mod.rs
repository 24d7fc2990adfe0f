//! Finite field substrate: prime fields, extension fields built from a
//! deterministic irreducible search, and dense univariate polynomials.

mod ext;
mod poly;

pub use ext::{find_irreducible, is_irreducible, ExtensionField};
pub use poly::Poly;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Operations every field used by the curve layer provides.
///
/// Elements are canonical, so `==` on `Elem` is field equality.
pub trait Field: Clone + Debug {
    type Elem: Clone + Eq + Hash + Debug;

    fn characteristic(&self) -> u64;
    /// Extension degree over the prime subfield.
    fn degree(&self) -> usize;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// The `index`-th element in a fixed enumeration of the field,
    /// `0 <= index < size`.
    fn element(&self, index: u64) -> Self::Elem;

    fn size(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.degree() as u32)
    }

    /// Field size if it fits in a `u64`.
    fn size_u64(&self) -> Option<u64> {
        self.size().to_u64()
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// The absolute Frobenius `a -> a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, &BigUint::from(self.characteristic()))
    }
}

/// The prime field F_p for a prime p < 2^63. Curves additionally need p > 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 63 {
            return Err(Error::ModulusOutOfRange(p.to_string()));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Self { p })
    }

    pub fn from_biguint(p: &BigUint) -> Result<Self> {
        match p.to_u64() {
            Some(v) => Self::new(v),
            None => Err(Error::ModulusOutOfRange(p.to_string())),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_big(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    /// Signed representative in (-p/2, p/2].
    pub fn centered(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn pow_u64(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, self.p);
            }
            base = mul_mod(base, base, self.p);
            e >>= 1;
        }
        acc
    }

    /// Legendre symbol of a field element.
    pub fn legendre_elem(&self, a: u64) -> i8 {
        if a == 0 {
            return 0;
        }
        if self.pow_u64(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn degree(&self) -> usize {
        1
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd_i128(*a as i128, self.p as i128);
        debug_assert_eq!(g, 1);
        Some(x.rem_euclid(self.p as i128) as u64)
    }

    fn element(&self, index: u64) -> u64 {
        index % self.p
    }

    fn pow(&self, a: &u64, e: &BigUint) -> u64 {
        let r = e % (self.p - 1);
        if *a == 0 {
            return if e.is_zero() { 1 } else { 0 };
        }
        self.pow_u64(*a, r.to_u64().unwrap())
    }

    fn frobenius(&self, a: &u64) -> u64 {
        *a
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
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

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &sp in &SMALL {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, b, n);
            }
            b = mul_mod(b, b, n);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol (a / p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigUint) -> Result<i8> {
    let p_small = p.to_u64().ok_or_else(|| Error::ModulusOutOfRange(p.to_string()))?;
    if p_small == 2 || !is_prime_u64(p_small) {
        return Err(Error::NotPrime(format!("{p} (odd prime required)")));
    }
    let r = a.mod_floor(&BigInt::from(p_small));
    if r.is_zero() {
        return Ok(0);
    }
    let e = BigUint::from((p_small - 1) / 2);
    let v = r.magnitude().modpow(&e, p);
    Ok(if v.is_one() { 1 } else { -1 })
}

/// Lift a signed big integer into any field by reducing mod the characteristic.
pub fn embed_int<F: Field>(field: &F, n: &BigInt) -> F::Elem {
    let p = BigInt::from(field.characteristic());
    let r = n.mod_floor(&p);
    let r = if r.is_negative() { r + p } else { r };
    field.from_i64(r.to_i64().unwrap())
}
