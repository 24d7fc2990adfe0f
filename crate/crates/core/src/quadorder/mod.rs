//! Arithmetic in imaginary quadratic orders Z[δ] and the Frobenius
//! decomposition τ = a + bδ.
//!
//! δ is √m when m ≡ 2, 3 (mod 4) and (1 + √m)/2 when m ≡ 1 (mod 4), for the
//! square-free m < 0 with Q(τ) = Q(√m). Everything is exact: coordinates are
//! `BigInt`, so powers τ^k never overflow.

pub mod factor;
pub mod valuation;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use factor::{factorize, prime_power_base};

pub use valuation::{binom_valuation, lte, mult_order, vp, vp_opt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DeltaVariant {
    /// δ = √m
    Sqrt,
    /// δ = (1 + √m)/2
    Half,
}

impl fmt::Display for DeltaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaVariant::Sqrt => write!(f, "SQRT"),
            DeltaVariant::Half => write!(f, "HALF"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeltaKind {
    m: BigInt,
    variant: DeltaVariant,
}

impl DeltaKind {
    pub fn new(m: BigInt) -> Result<Self> {
        if !m.is_negative() {
            return Err(Error::Precondition(format!("m = {m} must be negative")));
        }
        if factorize(m.magnitude())?.iter().any(|(_, e)| *e > 1) {
            return Err(Error::Precondition(format!("m = {m} is not square-free")));
        }
        let variant = if m.mod_floor(&BigInt::from(4)) == BigInt::one() {
            DeltaVariant::Half
        } else {
            DeltaVariant::Sqrt
        };
        Ok(Self { m, variant })
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn variant(&self) -> DeltaVariant {
        self.variant
    }

    /// δ² = c0 + c1·δ.
    fn delta_square(&self) -> (BigInt, BigInt) {
        match self.variant {
            DeltaVariant::Sqrt => (self.m.clone(), BigInt::zero()),
            DeltaVariant::Half => ((&self.m - 1) / 4, BigInt::one()),
        }
    }
}

/// The element x + yδ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderElem {
    pub x: BigInt,
    pub y: BigInt,
    kind: DeltaKind,
}

impl OrderElem {
    pub fn new(x: BigInt, y: BigInt, kind: DeltaKind) -> Self {
        Self { x, y, kind }
    }

    pub fn one(kind: &DeltaKind) -> Self {
        Self::new(BigInt::one(), BigInt::zero(), kind.clone())
    }

    pub fn kind(&self) -> &DeltaKind {
        &self.kind
    }

    pub fn mul(&self, o: &OrderElem) -> OrderElem {
        debug_assert_eq!(self.kind, o.kind);
        let (c0, c1) = self.kind.delta_square();
        let yy = &self.y * &o.y;
        let x = &self.x * &o.x + &yy * c0;
        let y = &self.x * &o.y + &self.y * &o.x + yy * c1;
        OrderElem::new(x, y, self.kind.clone())
    }

    pub fn sub_int(&self, n: &BigInt) -> OrderElem {
        OrderElem::new(&self.x - n, self.y.clone(), self.kind.clone())
    }

    /// self^k by square-and-multiply; k = 0 gives 1.
    pub fn pow(&self, k: u64) -> OrderElem {
        let mut acc = OrderElem::one(&self.kind);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn norm(&self) -> BigInt {
        let (x, y, m) = (&self.x, &self.y, &self.kind.m);
        match self.kind.variant {
            DeltaVariant::Sqrt => x * x - m * y * y,
            DeltaVariant::Half => x * x + x * y + y * y * ((BigInt::one() - m) / 4),
        }
    }

    pub fn trace(&self) -> BigInt {
        match self.kind.variant {
            DeltaVariant::Sqrt => &self.x * 2,
            DeltaVariant::Half => &self.x * 2 + &self.y,
        }
    }
}

impl fmt::Display for OrderElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(f, "{} - {}δ", self.x, -&self.y)
        } else {
            write!(f, "{} + {}δ", self.x, self.y)
        }
    }
}

pub fn order_pow(e: &OrderElem, k: u64) -> OrderElem {
    e.pow(k)
}

/// n = c²·m with m square-free, for n < 0. Returns (m, c).
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigUint)> {
    if !n.is_negative() {
        return Err(Error::Precondition(format!("{n} must be negative")));
    }
    let mut m = BigUint::one();
    let mut c = BigUint::one();
    for (p, e) in factorize(n.magnitude())? {
        c *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
    }
    Ok((BigInt::from_biguint(Sign::Minus, m), c))
}

/// Frobenius τ of an ordinary curve over F_q: trace t, τ = a + bδ with b > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusData {
    q: BigUint,
    p: BigUint,
    t: BigInt,
    elem: OrderElem,
    disc: BigInt,
}

impl FrobeniusData {
    /// Wrap an already-computed τ (used for powers of a Frobenius, whose b
    /// is not sign-normalized).
    pub fn from_elem(q: BigUint, p: BigUint, elem: OrderElem) -> Result<Self> {
        if elem.norm() != BigInt::from(q.clone()) {
            return Err(Error::Precondition(format!("norm of {elem} is not {q}")));
        }
        let t = elem.trace();
        let disc = &t * &t - BigInt::from(q.clone()) * 4;
        Ok(Self { q, p, t, elem, disc })
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// The characteristic p of F_q.
    pub fn characteristic(&self) -> &BigUint {
        &self.p
    }

    pub fn t(&self) -> &BigInt {
        &self.t
    }

    pub fn elem(&self) -> &OrderElem {
        &self.elem
    }

    pub fn a(&self) -> &BigInt {
        &self.elem.x
    }

    pub fn b(&self) -> &BigInt {
        &self.elem.y
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn m(&self) -> &BigInt {
        self.elem.kind.m()
    }

    pub fn variant(&self) -> DeltaVariant {
        self.elem.kind.variant()
    }

    /// τ^k = a_k + b_k δ.
    pub fn power(&self, k: u64) -> OrderElem {
        self.elem.pow(k)
    }

    /// |E(F_{q^k})| = N(τ^k - 1) = q^k + 1 - tr(τ^k).
    pub fn point_count(&self, k: u64) -> BigInt {
        self.power(k).sub_int(&BigInt::one()).norm()
    }
}

/// Decompose the Frobenius of an ordinary curve from (q, t).
pub fn frobenius_from_trace(q: &BigUint, t: &BigInt) -> Result<FrobeniusData> {
    let (p, _) = prime_power_base(q)?;
    let qi = BigInt::from(q.clone());
    let disc: BigInt = t * t - &qi * 4;
    if !disc.is_negative() {
        return Err(Error::NotImaginary { q: q.to_string(), t: t.to_string() });
    }
    if t.mod_floor(&BigInt::from(p.clone())).is_zero() {
        return Err(Error::Supersingular { p: p.to_string(), t: t.to_string() });
    }
    let (m, c) = squarefree_decompose(&disc)?;
    let kind = DeltaKind::new(m)?;
    let c = BigInt::from(c);
    let (a, b) = match kind.variant() {
        DeltaVariant::Sqrt => (t / 2, c / 2),
        DeltaVariant::Half => ((t - &c) / 2, c),
    };
    let elem = OrderElem::new(a, b, kind);
    debug_assert_eq!(elem.norm(), qi);
    debug_assert_eq!(&elem.trace(), t);
    Ok(FrobeniusData { q: q.clone(), p, t: t.clone(), elem, disc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn frob(q: u64, t: i64) -> FrobeniusData {
        frobenius_from_trace(&BigUint::from(q), &bi(t)).unwrap()
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(&bi(-10816)).unwrap(), (bi(-1), BigUint::from(104u32)));
        assert_eq!(squarefree_decompose(&bi(-3724)).unwrap(), (bi(-19), BigUint::from(14u32)));
        assert_eq!(squarefree_decompose(&bi(-7)).unwrap(), (bi(-7), BigUint::one()));
        assert!(squarefree_decompose(&bi(0)).is_err());
        assert!(squarefree_decompose(&bi(12)).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let f = frob(3329, 50);
        assert_eq!((f.a(), f.b(), f.m(), f.variant()), (&bi(25), &bi(52), &bi(-1), DeltaVariant::Sqrt));
        let f = frob(3329, 104);
        assert_eq!((f.a(), f.b(), f.m(), f.variant()), (&bi(52), &bi(25), &bi(-1), DeltaVariant::Sqrt));
        let f = frob(1031, -20);
        assert_eq!((f.a(), f.b(), f.m(), f.variant()), (&bi(-17), &bi(14), &bi(-19), DeltaVariant::Half));
        assert_eq!(f.disc(), &bi(-3724));
    }

    #[test]
    fn frobenius_rejections() {
        let q = BigUint::from(3329u32);
        assert!(matches!(frobenius_from_trace(&q, &bi(0)), Err(Error::Supersingular { .. })));
        assert!(matches!(frobenius_from_trace(&q, &bi(3329)), Err(Error::NotImaginary { .. })));
        assert!(matches!(frobenius_from_trace(&q, &bi(116)), Err(Error::NotImaginary { .. })));
        assert!(matches!(
            frobenius_from_trace(&BigUint::from(12u32), &bi(1)),
            Err(Error::NotPrimePower(_))
        ));
        // q = 25: p = 5 divides t = 5
        assert!(matches!(
            frobenius_from_trace(&BigUint::from(25u32), &bi(5)),
            Err(Error::Supersingular { .. })
        ));
    }

    #[test]
    fn powers() {
        let f = frob(3329, 50);
        assert_eq!(f.power(1), f.elem().clone());
        let sq = f.power(2);
        assert_eq!((sq.x.clone(), sq.y.clone()), (bi(-2079), bi(2600)));
        let f = frob(1031, -20);
        let sq = f.power(2);
        assert_eq!((sq.x.clone(), sq.y.clone()), (bi(-691), bi(-280)));
        assert_eq!(f.power(0), OrderElem::one(f.elem().kind()));
    }

    #[test]
    fn norms_and_traces() {
        assert_eq!(frob(3329, 50).elem().norm(), bi(3329));
        let f = frob(1031, -20);
        assert_eq!(f.elem().norm(), bi(1031));
        assert_eq!(f.elem().trace(), bi(-20));
    }

    #[test]
    fn point_count_recurrence() {
        for (q, t) in [(3329u64, 50i64), (3329, 104), (1031, -20), (5, 2), (7, -1)] {
            let f = frob(q, t);
            let qi = bi(q as i64);
            for k in 1..=30u64 {
                let tk = f.power(k).trace();
                let want = num_traits::pow(qi.clone(), k as usize) + 1 - tk;
                assert_eq!(f.point_count(k), want, "q={q} t={t} k={k}");
            }
        }
    }

    #[test]
    fn ordinary_frobenius_is_primitive() {
        for q in [5u64, 7, 11, 13, 25, 27, 49, 101, 3329] {
            let bound = 2 * (q as f64).sqrt() as i64 + 1;
            for t in -bound..=bound {
                if let Ok(f) = frobenius_from_trace(&BigUint::from(q), &bi(t)) {
                    assert!(f.b().is_positive());
                    assert!(f.a().gcd(f.b()).is_one(), "q={q} t={t}");
                }
            }
        }
    }

    fn arb_elem() -> impl Strategy<Value = OrderElem> {
        (prop_oneof![Just(-1i64), Just(-2), Just(-3), Just(-19), Just(-7), Just(-5)], -500i64..500, -500i64..500)
            .prop_map(|(m, x, y)| OrderElem::new(bi(x), bi(y), DeltaKind::new(bi(m)).unwrap()))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(e in arb_elem(), x in -500i64..500, y in -500i64..500) {
            let f = OrderElem::new(bi(x), bi(y), e.kind().clone());
            prop_assert_eq!(e.mul(&f).norm(), e.norm() * f.norm());
        }

        #[test]
        fn pow_is_additive_in_exponent(e in arb_elem(), j in 0u64..20, k in 0u64..20) {
            prop_assert_eq!(e.pow(j + k), e.pow(j).mul(&e.pow(k)));
        }
    }
}
