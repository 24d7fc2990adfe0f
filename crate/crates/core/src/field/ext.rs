use num_bigint::BigUint;

use super::{mul_mod, Field, Poly, PrimeField};
use crate::error::{Error, Result};

/// F_{p^k} as F_p[x]/(f) for a monic irreducible f of degree k.
///
/// Elements are coefficient vectors of length exactly k (ascending), so
/// structural equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionField {
    base: PrimeField,
    modulus: Poly,
    k: usize,
}

impl ExtensionField {
    /// Extension of degree `k` using the first irreducible in search order.
    pub fn new(base: &PrimeField, k: usize) -> Result<Self> {
        let modulus = find_irreducible(base, k)?;
        Ok(Self { base: base.clone(), modulus, k })
    }

    pub fn with_modulus(base: &PrimeField, modulus: Poly) -> Result<Self> {
        let k = modulus
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Precondition("modulus must have degree >= 1".into()))?;
        if modulus.leading() != Some(1) {
            return Err(Error::Precondition("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, base) {
            return Err(Error::Precondition(format!("{modulus} is reducible")));
        }
        Ok(Self { base: base.clone(), modulus, k })
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Embed a base-field element.
    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[0] = a % self.base.modulus();
        v
    }

    pub fn to_poly(&self, a: &[u64]) -> Poly {
        Poly::from_coeffs(a.to_vec())
    }

    pub fn from_poly(&self, p: &Poly) -> Vec<u64> {
        let r = p.rem(&self.modulus, &self.base).expect("modulus is nonzero");
        let mut v = r.coeffs().to_vec();
        v.resize(self.k, 0);
        v
    }

    /// The class of x, a generator of the extension over F_p.
    pub fn generator(&self) -> Vec<u64> {
        self.from_poly(&Poly::x())
    }
}

impl Field for ExtensionField {
    type Elem = Vec<u64>;

    fn characteristic(&self) -> u64 {
        self.base.modulus()
    }

    fn degree(&self) -> usize {
        self.k
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }

    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }

    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.embed(self.base.reduce_i64(n))
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let p = self.base.modulus();
        let k = self.k;
        if k == 1 {
            return vec![mul_mod(a[0], b[0], p)];
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.base.add(&prod[i + j], &mul_mod(x, y, p));
            }
        }
        let m = self.modulus.coeffs();
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let t = mul_mod(c, m[j], p);
                prod[i - k + j] = self.base.sub(&prod[i - k + j], &t);
            }
        }
        prod.truncate(k);
        prod
    }

    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        let inv = self
            .to_poly(a)
            .inv_mod(&self.modulus, &self.base)
            .expect("irreducible modulus");
        Some(self.from_poly(&inv))
    }

    fn element(&self, mut index: u64) -> Vec<u64> {
        let p = self.base.modulus();
        let mut v = Vec::with_capacity(self.k);
        for _ in 0..self.k {
            v.push(index % p);
            index /= p;
        }
        v
    }
}

/// Irreducibility over F_p: no roots of any degree-i extension for
/// i <= deg/2, checked as gcd(x^{p^i} - x, f) = 1.
pub fn is_irreducible(f: &Poly, base: &PrimeField) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let p = BigUint::from(base.modulus());
    let mut xp = Poly::x();
    for _ in 1..=n / 2 {
        xp = xp.powmod(&p, f, base).expect("nonzero modulus");
        let g = xp.sub(&Poly::x(), base).gcd(f, base).expect("f nonzero");
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree `k` over F_p, enumerating
/// the non-leading coefficients as base-p digits of 0, 1, 2, ... (constant
/// term least significant).
pub fn find_irreducible(base: &PrimeField, k: usize) -> Result<Poly> {
    if k == 0 {
        return Err(Error::Precondition("extension degree must be >= 1".into()));
    }
    let p = base.modulus();
    if k == 1 {
        return Ok(Poly::x());
    }
    let mut digits = vec![0u64; k];
    loop {
        let mut c = digits.clone();
        c.push(1);
        let cand = Poly::from_coeffs(c);
        // Cheap root filter before the full test.
        if digits[0] != 0 && is_irreducible(&cand, base) {
            return Ok(cand);
        }
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            if i == k {
                unreachable!("irreducible polynomials exist in every degree");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_irreducibles() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(find_irreducible(&f5, 1).unwrap(), Poly::x());
        assert_eq!(find_irreducible(&f5, 2).unwrap(), Poly::from_i64s(&f5, &[2, 0, 1]));
    }

    #[test]
    fn unique_irreducible_quadratic_over_f2() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(find_irreducible(&f2, 2).unwrap(), Poly::from_i64s(&f2, &[1, 1, 1]));
    }

    #[test]
    fn irreducible_has_no_roots_and_passes_full_test() {
        for p in [5u64, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            for k in 2..=6 {
                let m = find_irreducible(&f, k).unwrap();
                assert_eq!(m.degree(), Some(k));
                assert!((0..p).all(|x| m.eval(x, &f) != 0));
                assert!(is_irreducible(&m, &f));
            }
        }
    }

    #[test]
    fn irreducibility_counts_match_necklace_formula() {
        // Number of monic irreducibles of degree 2 and 3 over F_p.
        for p in [5u64, 7] {
            let f = PrimeField::new(p).unwrap();
            for (k, want) in [(2usize, (p * p - p) / 2), (3, (p * p * p - p) / 3)] {
                let mut count = 0;
                for idx in 0..p.pow(k as u32) {
                    let mut c: Vec<u64> = (0..k).map(|i| idx / p.pow(i as u32) % p).collect();
                    c.push(1);
                    if is_irreducible(&Poly::from_coeffs(c), &f) {
                        count += 1;
                    }
                }
                assert_eq!(count, want, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn extension_field_axioms() {
        let f = PrimeField::new(7).unwrap();
        let e = ExtensionField::new(&f, 3).unwrap();
        let n = 343;
        for i in 1..n {
            let a = e.element(i);
            let inv = e.inv(&a).unwrap();
            assert_eq!(e.mul(&a, &inv), e.one());
            // a^(q-1) = 1
            assert_eq!(e.pow(&a, &BigUint::from(n - 1)), e.one());
        }
        assert_eq!(e.inv(&e.zero()), None);
    }

    #[test]
    fn with_modulus_rejects_reducible() {
        let f = PrimeField::new(5).unwrap();
        assert!(ExtensionField::with_modulus(&f, Poly::from_i64s(&f, &[1, 0, 1])).is_err());
        assert!(ExtensionField::with_modulus(&f, Poly::from_i64s(&f, &[2, 0, 1])).is_ok());
    }
}
