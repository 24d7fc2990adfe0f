use std::fmt;

use num_bigint::BigUint;

use super::{mul_mod, Field, PrimeField};
use crate::error::{Error, Result};

/// Dense univariate polynomial over a prime field, ascending coefficients,
/// no trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    /// Build from ascending coefficients already reduced mod p.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(f: &PrimeField, coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| f.reduce_i64(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn add(&self, o: &Poly, f: &PrimeField) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &PrimeField) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &PrimeField) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: u64, f: &PrimeField) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| f.mul(a, &c)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &PrimeField) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let p = f.modulus();
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        // Accumulate in u128 and fold back before overflow can happen.
        let small = (p as u128) * (p as u128) * (self.coeffs.len().min(o.coeffs.len()) as u128)
            < u128::MAX / 2;
        if small {
            let mut acc = vec![0u128; out.len()];
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in o.coeffs.iter().enumerate() {
                    acc[i + j] += a as u128 * b as u128;
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = (a % p as u128) as u64;
            }
        } else {
            for (i, &a) in self.coeffs.iter().enumerate() {
                for (j, &b) in o.coeffs.iter().enumerate() {
                    out[i + j] = f.add(&out[i + j], &mul_mod(a, b, p));
                }
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn square(&self, f: &PrimeField) -> Poly {
        self.mul(self, f)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divmod(&self, d: &Poly, f: &PrimeField) -> Result<(Poly, Poly)> {
        let dl = d.leading().ok_or(Error::ZeroPolynomial)?;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = f.inv(&dl).unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(&r[i + dd], &inv);
            q[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(&r[i + j], &f.mul(&c, &dc));
            }
        }
        r.truncate(dd);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, d: &Poly, f: &PrimeField) -> Result<Poly> {
        Ok(self.divmod(d, f)?.1)
    }

    pub fn monic(&self, f: &PrimeField) -> Poly {
        match self.leading() {
            None | Some(1) => self.clone(),
            Some(l) => self.scale(f.inv(&l).unwrap(), f),
        }
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly, f: &PrimeField) -> Result<Poly> {
        self.mul(o, f).rem(m, f)
    }

    /// `self^e mod m` by square-and-multiply.
    pub fn powmod(&self, e: &BigUint, m: &Poly, f: &PrimeField) -> Result<Poly> {
        match m.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Ok(Poly::zero()),
            _ => {}
        }
        let base = self.rem(m, f)?;
        let mut acc = Poly::one();
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m, f)?;
            if e.bit(i) {
                acc = acc.mulmod(&base, m, f)?;
            }
        }
        Ok(acc)
    }

    /// Monic gcd. Both inputs zero is an error.
    pub fn gcd(&self, o: &Poly, f: &PrimeField) -> Result<Poly> {
        if self.is_zero() && o.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f)?;
            a = b;
            b = r;
        }
        Ok(a.monic(f))
    }

    /// Inverse of `self` modulo `m`. On failure returns the nontrivial
    /// monic gcd, which is a proper factor of `m` unless `self ≡ 0`.
    pub fn inv_mod(&self, m: &Poly, f: &PrimeField) -> std::result::Result<Poly, Poly> {
        let (mut r0, mut r1) = (m.clone(), self.rem(m, f).expect("nonzero modulus"));
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1, f).unwrap();
            let s = s0.sub(&q.mul(&s1, f), f);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() == Some(0) {
            let c = f.inv(&r0.coeffs[0]).unwrap();
            Ok(s0.scale(c, f).rem(m, f).unwrap())
        } else {
            Err(r0.monic(f))
        }
    }

    pub fn eval(&self, x: u64, f: &PrimeField) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, c| f.add(&f.mul(&acc, &x), c))
    }

    /// Evaluate at an element of any field of the same characteristic.
    pub fn eval_in<F: Field>(&self, field: &F, x: &F::Elem) -> F::Elem {
        self.coeffs.iter().rev().fold(field.zero(), |acc, &c| {
            field.add(&field.mul(&acc, x), &field.from_i64(c as i64))
        })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}*x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn powmod_examples() {
        let f = f5();
        let x2p1 = Poly::from_i64s(&f, &[1, 0, 1]);
        let x2p2 = Poly::from_i64s(&f, &[2, 0, 1]);
        assert_eq!(Poly::x().powmod(&1u32.into(), &x2p1, &f).unwrap(), Poly::x());
        assert_eq!(Poly::x().powmod(&4u32.into(), &x2p1, &f).unwrap(), Poly::one());
        // x^2 = 3, x^4 = 9 = 4, x^5 = 4x
        assert_eq!(
            Poly::x().powmod(&5u32.into(), &x2p2, &f).unwrap(),
            Poly::from_i64s(&f, &[0, 4])
        );
    }

    #[test]
    fn powmod_matches_repeated_multiplication() {
        let f = PrimeField::new(13).unwrap();
        let m = Poly::from_i64s(&f, &[3, 1, 0, 7, 1]);
        let base = Poly::from_i64s(&f, &[2, 5, 1]);
        let mut acc = Poly::one();
        for e in 0u32..40 {
            assert_eq!(base.powmod(&e.into(), &m, &f).unwrap(), acc);
            acc = acc.mul(&base, &f).rem(&m, &f).unwrap();
        }
    }

    #[test]
    fn powmod_rejects_zero_modulus() {
        let f = f5();
        assert_eq!(
            Poly::x().powmod(&3u32.into(), &Poly::zero(), &f),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn gcd_examples() {
        let f = f5();
        let x2m1 = Poly::from_i64s(&f, &[-1, 0, 1]);
        let xm1 = Poly::from_i64s(&f, &[-1, 1]);
        assert_eq!(x2m1.gcd(&xm1, &f).unwrap(), xm1);
        assert_eq!(
            Poly::x().gcd(&Poly::from_i64s(&f, &[1, 1]), &f).unwrap(),
            Poly::one()
        );
        let sq = Poly::from_i64s(&f, &[1, 2, 1]);
        assert_eq!(sq.gcd(&x2m1, &f).unwrap(), Poly::from_i64s(&f, &[1, 1]));
        assert_eq!(Poly::zero().gcd(&Poly::zero(), &f), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn inv_mod_reports_factor() {
        let f = f5();
        let m = Poly::from_i64s(&f, &[-1, 0, 1]); // (x-1)(x+1)
        let a = Poly::from_i64s(&f, &[-1, 1]);
        assert_eq!(a.inv_mod(&m, &f), Err(a.clone()));
        let b = Poly::from_i64s(&f, &[2, 1]);
        let inv = b.inv_mod(&m, &f).unwrap();
        assert!(inv.mulmod(&b, &m, &f).unwrap().is_one());
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::vec(0u64..101, 0..max_len)
    }

    proptest! {
        #[test]
        fn divmod_identity(a in arb_poly(20), b in arb_poly(10)) {
            let f = PrimeField::new(101).unwrap();
            let a = Poly::from_coeffs(a);
            let b = Poly::from_coeffs(b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.divmod(&b, &f).unwrap();
            prop_assert_eq!(q.mul(&b, &f).add(&r, &f), a);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }

        #[test]
        fn gcd_divides_both(a in arb_poly(12), b in arb_poly(12)) {
            let f = PrimeField::new(101).unwrap();
            let a = Poly::from_coeffs(a);
            let b = Poly::from_coeffs(b);
            prop_assume!(!(a.is_zero() && b.is_zero()));
            let g = a.gcd(&b, &f).unwrap();
            prop_assert_eq!(g.leading(), Some(1));
            prop_assert!(a.rem(&g, &f).unwrap().is_zero());
            prop_assert!(b.rem(&g, &f).unwrap().is_zero());
        }
    }
}
