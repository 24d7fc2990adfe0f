//! Short Weierstrass curves y² = x³ + Ax + B in affine coordinates, point
//! counting over F_p, and the brute-force group-structure oracle.

use std::collections::{HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtensionField, Field, PrimeField};
use crate::quadorder::factor::{divisors, factorize_u64};

/// Largest field the enumeration oracle will walk by default.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point<E> {
    Infinity,
    Affine(E, E),
}

impl<E> Point<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve<F: Field> {
    field: F,
    a: F::Elem,
    b: F::Elem,
}

impl<F: Field> Curve<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem) -> Result<Self> {
        let p = field.characteristic();
        if p <= 3 {
            return Err(Error::ModulusOutOfRange(format!("{p} (curves need p > 3)")));
        }
        let a3 = field.mul(&field.square(&a), &a);
        let disc = field.add(
            &field.mul(&field.from_i64(4), &a3),
            &field.mul(&field.from_i64(27), &field.square(&b)),
        );
        if field.is_zero(&disc) {
            return Err(Error::Singular { p, a: format!("{a:?}"), b: format!("{b:?}") });
        }
        Ok(Self { field, a, b })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn a(&self) -> &F::Elem {
        &self.a
    }

    pub fn b(&self) -> &F::Elem {
        &self.b
    }

    /// x³ + Ax + B
    pub fn rhs(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let x2 = f.square(x);
        f.add(&f.mul(&f.add(&x2, &self.a), x), &self.b)
    }

    pub fn contains(&self, p: &Point<F::Elem>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.square(y) == self.rhs(x),
        }
    }

    pub fn neg(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), self.field.neg(y)),
        }
    }

    /// Group law. Both points must lie on the curve.
    pub fn add(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Result<Point<F::Elem>> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::NotOnCurve);
        }
        Ok(self.add_unchecked(p, q))
    }

    pub fn add_unchecked(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Point<F::Elem> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if f.is_zero(&f.add(y1, y2)) {
                return Point::Infinity;
            }
            // tangent: (3x² + A) / 2y
            let num = f.add(&f.mul(&f.from_i64(3), &f.square(x1)), &self.a);
            let den = f.add(y1, y1);
            f.mul(&num, &f.inv(&den).expect("y != 0"))
        } else {
            let num = f.sub(y2, y1);
            let den = f.sub(x2, x1);
            f.mul(&num, &f.inv(&den).expect("x1 != x2"))
        };
        let x3 = f.sub(&f.sub(&f.square(&lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        self.add_unchecked(p, p)
    }

    /// [n]P by double-and-add; negative n goes through -P.
    pub fn scalar_mul(&self, n: &BigInt, p: &Point<F::Elem>) -> Result<Point<F::Elem>> {
        if !self.contains(p) {
            return Err(Error::NotOnCurve);
        }
        let base = if n.is_negative() { self.neg(p) } else { p.clone() };
        Ok(self.mul_magnitude(n.magnitude(), &base))
    }

    pub fn mul_u64(&self, n: u64, p: &Point<F::Elem>) -> Point<F::Elem> {
        self.mul_magnitude(&BigUint::from(n), p)
    }

    fn mul_magnitude(&self, n: &BigUint, p: &Point<F::Elem>) -> Point<F::Elem> {
        let mut acc = Point::Infinity;
        for i in (0..n.bits()).rev() {
            acc = self.double(&acc);
            if n.bit(i) {
                acc = self.add_unchecked(&acc, p);
            }
        }
        acc
    }

    /// Coordinate-wise `c -> c^{p^j}`.
    pub fn frobenius_point(&self, pt: &Point<F::Elem>, j: u32) -> Point<F::Elem> {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let (mut x, mut y) = (x.clone(), y.clone());
                for _ in 0..j {
                    x = self.field.frobenius(&x);
                    y = self.field.frobenius(&y);
                }
                Point::Affine(x, y)
            }
        }
    }

    /// Every rational point, infinity first. Fails when the field is larger
    /// than `bound`.
    pub fn points(&self, bound: u64) -> Result<Vec<Point<F::Elem>>> {
        let f = &self.field;
        let size = match f.size_u64() {
            Some(s) if s <= bound => s,
            _ => return Err(Error::Capacity { size: f.size().to_string(), bound }),
        };
        let mut roots: HashMap<F::Elem, F::Elem> = HashMap::with_capacity(size as usize);
        for i in 0..size {
            let y = f.element(i);
            roots.entry(f.square(&y)).or_insert(y);
        }
        let mut out = vec![Point::Infinity];
        for i in 0..size {
            let x = f.element(i);
            let r = self.rhs(&x);
            if f.is_zero(&r) {
                out.push(Point::Affine(x, r));
            } else if let Some(y) = roots.get(&r) {
                out.push(Point::Affine(x.clone(), y.clone()));
                out.push(Point::Affine(x, f.neg(y)));
            }
        }
        Ok(out)
    }
}

impl Curve<PrimeField> {
    pub fn from_ints(p: u64, a: i64, b: i64) -> Result<Self> {
        let f = PrimeField::new(p)?;
        let (a, b) = (f.reduce_i64(a), f.reduce_i64(b));
        Self::new(f, a, b)
    }

    pub fn p(&self) -> u64 {
        self.field.modulus()
    }

    /// The same curve over an extension of its prime field.
    pub fn base_change(&self, ext: &ExtensionField) -> Curve<ExtensionField> {
        assert_eq!(ext.base(), &self.field);
        Curve { field: ext.clone(), a: ext.embed(self.a), b: ext.embed(self.b) }
    }

    /// Trace of Frobenius t = p + 1 - |E(F_p)|.
    pub fn trace(&self) -> BigInt {
        BigInt::from(self.p()) + 1 - BigInt::from(count_points(self))
    }
}

/// |E(F_p)| = p + 1 + Σ_x (x³ + Ax + B / p).
pub fn count_points(curve: &Curve<PrimeField>) -> u64 {
    let f = curve.field();
    let p = f.modulus();
    let s: i64 = (0..p).map(|x| f.legendre_elem(curve.rhs(&x)) as i64).sum();
    (p as i64 + 1 + s) as u64
}

/// Ordinary iff p ∤ t.
pub fn is_ordinary(curve: &Curve<PrimeField>) -> bool {
    !curve.trace().mod_floor(&BigInt::from(curve.p())).is_zero()
}

/// E(F) ≅ Z/n1 × Z/n2 with n1 | n2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupStructure {
    #[serde(with = "crate::decimal")]
    pub n1: BigUint,
    #[serde(with = "crate::decimal")]
    pub n2: BigUint,
}

impl GroupStructure {
    pub fn order(&self) -> BigUint {
        &self.n1 * &self.n2
    }

    pub fn is_cyclic(&self) -> bool {
        self.n1.is_one()
    }
}

impl std::fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z/{} x Z/{}", self.n1, self.n2)
    }
}

/// Group structure by exhaustive enumeration.
///
/// n1 is the largest n with #{P : nP = ∞} = n². Since that count is
/// multiplicative over coprime n, n1 is assembled one prime ℓ at a time:
/// the multiplication-by-ℓ map is tabulated once over all points and the
/// ℓ-power torsion counts are read off as depths below ∞ in that map.
pub fn group_structure_bruteforce<F: Field>(curve: &Curve<F>, bound: u64) -> Result<GroupStructure> {
    let points = curve.points(bound)?;
    Ok(structure_from_points(curve, &points))
}

pub(crate) fn structure_from_points<F: Field>(
    curve: &Curve<F>,
    points: &[Point<F::Elem>],
) -> GroupStructure {
    let n = points.len() as u64;
    let field_size = curve.field().size_u64().expect("enumerated field fits u64");
    let index: HashMap<&Point<F::Elem>, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let inf = index[&Point::Infinity];
    let candidate = n.gcd(&(field_size - 1));
    let mut n1 = 1u64;
    for (ell, _) in factorize_u64(candidate) {
        let vn = {
            let (mut m, mut v) = (n, 0u32);
            while m % ell == 0 {
                m /= ell;
                v += 1;
            }
            v
        };
        if vn < 2 {
            continue;
        }
        let image: Vec<usize> = points.iter().map(|p| index[&curve.mul_u64(ell, p)]).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
        for (i, &j) in image.iter().enumerate() {
            if i != inf {
                children[j].push(i);
            }
        }
        // BFS depth from ∞ = least e with ℓ^e P = ∞.
        let mut count_at_depth = vec![1u64];
        let mut queue = VecDeque::from([(inf, 0usize)]);
        while let Some((node, d)) = queue.pop_front() {
            for &c in &children[node] {
                if count_at_depth.len() <= d + 1 {
                    count_at_depth.push(0);
                }
                count_at_depth[d + 1] += 1;
                queue.push_back((c, d + 1));
            }
        }
        let mut torsion = 0u64;
        let mut e_best = 0u32;
        for (e, c) in count_at_depth.iter().enumerate() {
            torsion += c;
            if e as u32 > vn / 2 {
                break;
            }
            if torsion == ell.pow(2 * e as u32) {
                e_best = e as u32;
            }
        }
        n1 *= ell.pow(e_best);
    }
    GroupStructure { n1: BigUint::from(n1), n2: BigUint::from(n / n1) }
}

/// Reference version of the oracle straight from the definition: try the
/// divisors n of |E| in increasing order and count P with nP = ∞.
pub fn group_structure_by_divisors<F: Field>(curve: &Curve<F>, bound: u64) -> Result<GroupStructure> {
    let points = curve.points(bound)?;
    let n = BigUint::from(points.len());
    let mut n1 = BigUint::one();
    for d in divisors(&n)? {
        if &d * &d > n {
            break;
        }
        let dd = d.to_u64().unwrap();
        let killed = points.iter().filter(|p| curve.mul_u64(dd, p).is_infinity()).count();
        if BigUint::from(killed) == &d * &d {
            n1 = d;
        }
    }
    let n2 = &n / &n1;
    Ok(GroupStructure { n1, n2 })
}

/// Enumerate E(F_{p^k}) for a curve over F_p.
pub fn group_structure_over_extension(
    curve: &Curve<PrimeField>,
    k: usize,
    bound: u64,
) -> Result<GroupStructure> {
    let size = BigUint::from(curve.p()).pow(k as u32);
    if size > BigUint::from(bound) {
        return Err(Error::Capacity { size: size.to_string(), bound });
    }
    let ext = ExtensionField::new(curve.field(), k)?;
    group_structure_bruteforce(&curve.base_change(&ext), bound)
}
