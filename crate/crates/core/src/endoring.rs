//! Conductor of End(E) for an ordinary curve over a prime field.
//!
//! With τ = a + bδ, the order Z + (b/c)Zδ lies in End(E) iff (τ - a)/c is an
//! endomorphism, iff τ acts as the scalar a on E[c]. That last condition is
//! decided symbolically in F_p[x, y]/(ψ̃_c(x), y² - x³ - Ax - B) by comparing
//! (x^p, y^p) with the rational maps of [a mod c]. The conductor g then has
//! v_ℓ(g) = v_ℓ(b) - (largest i with the test passing at ℓ^i).

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::curve::{count_points, Curve, Point};
use crate::error::{Error, Result};
use crate::field::{ExtensionField, Field, Poly, PrimeField};
use crate::quadorder::factor::factorize;
use crate::quadorder::{frobenius_from_trace, mult_order, FrobeniusData};

/// ψ̃_0 .. ψ̃_{n_max} in x only.
///
/// Normalization: ψ̃_n = ψ_n for odd n and ψ̃_n = ψ_n / (2y) for even n, so
/// ψ̃_2 = 1 and ψ_2² = 4(x³ + Ax + B). With p ∤ n, ψ̃_n has degree
/// (n² - 1)/2 for odd n and (n² - 4)/2 for even n.
#[derive(Clone, Debug)]
pub struct DivisionPolySet {
    curve: Curve<PrimeField>,
    polys: Vec<Poly>,
}

impl DivisionPolySet {
    pub fn get(&self, n: usize) -> Option<&Poly> {
        self.polys.get(n)
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn curve(&self) -> &Curve<PrimeField> {
        &self.curve
    }
}

/// On-demand ψ̃_n, optionally reduced modulo a fixed polynomial. Only the
/// O(log n) indices the doubling recurrences touch get computed.
struct PsiCache<'a> {
    field: &'a PrimeField,
    cubic: Poly,
    /// 16 f², the factor (2y)⁴ that appears when odd and even indices mix.
    f2_16: Poly,
    modulus: Option<Poly>,
    memo: HashMap<usize, Poly>,
}

impl<'a> PsiCache<'a> {
    fn new(curve: &'a Curve<PrimeField>, modulus: Option<Poly>) -> Self {
        let field = curve.field();
        let (a, b) = (*curve.a(), *curve.b());
        let cubic = Poly::from_coeffs(vec![b, a, 0, 1]);
        let f2_16 = cubic.square(field).scale(16, field);
        let reduce = |p: Poly| match &modulus {
            Some(m) => p.rem(m, field).unwrap(),
            None => p,
        };
        let a2 = field.mul(&a, &a);
        let psi3 = Poly::from_coeffs(vec![
            field.neg(&a2),
            field.mul(&12, &b),
            field.mul(&6, &a),
            0,
            3,
        ]);
        // ψ_4 / (2y) = 2(x⁶ + 5Ax⁴ + 20Bx³ - 5A²x² - 4ABx - 8B² - A³)
        let psi4 = Poly::from_coeffs(vec![
            field.neg(&field.add(&field.mul(&8, &field.mul(&b, &b)), &field.mul(&a2, &a))),
            field.neg(&field.mul(&4, &field.mul(&a, &b))),
            field.neg(&field.mul(&5, &a2)),
            field.mul(&20, &b),
            field.mul(&5, &a),
            0,
            1,
        ])
        .scale(2, field);
        let mut memo = HashMap::new();
        memo.insert(0, Poly::zero());
        memo.insert(1, Poly::one());
        memo.insert(2, Poly::one());
        memo.insert(3, reduce(psi3));
        memo.insert(4, reduce(psi4));
        let f2_16 = reduce(f2_16);
        Self { field, cubic, f2_16, modulus, memo }
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let p = a.mul(b, self.field);
        match &self.modulus {
            Some(m) => p.rem(m, self.field).unwrap(),
            None => p,
        }
    }

    fn get(&mut self, n: usize) -> Poly {
        if let Some(p) = self.memo.get(&n) {
            return p.clone();
        }
        let m = n / 2;
        let f = self.field;
        let out = if n % 2 == 1 {
            // ψ_{2m+1} = ψ_{m+2}ψ_m³ - ψ_{m-1}ψ_{m+1}³, with (2y)⁴ = 16f² on
            // whichever product has the even indices.
            let (pm2, pm, pm1m, pm1p) = (self.get(m + 2), self.get(m), self.get(m - 1), self.get(m + 1));
            let left = self.mul(&pm2, &self.mul(&pm, &self.mul(&pm, &pm)));
            let right = self.mul(&pm1m, &self.mul(&pm1p, &self.mul(&pm1p, &pm1p)));
            if m.is_multiple_of(2) {
                self.mul(&self.f2_16, &left).sub(&right, f)
            } else {
                left.sub(&self.mul(&self.f2_16, &right), f)
            }
        } else {
            // ψ̃_{2m} = ψ̃_m (ψ̃_{m+2}ψ̃_{m-1}² - ψ̃_{m-2}ψ̃_{m+1}²)
            let (pm, pm2, pm1m, pm2m, pm1p) =
                (self.get(m), self.get(m + 2), self.get(m - 1), self.get(m - 2), self.get(m + 1));
            let inner = self
                .mul(&pm2, &self.mul(&pm1m, &pm1m))
                .sub(&self.mul(&pm2m, &self.mul(&pm1p, &pm1p)), f);
            self.mul(&pm, &inner)
        };
        self.memo.insert(n, out.clone());
        out
    }
}

/// ψ̃_0 .. ψ̃_{n_max} for a curve over F_p (p > 3).
pub fn division_polys(curve: &Curve<PrimeField>, n_max: usize) -> Result<DivisionPolySet> {
    if n_max < 2 {
        return Err(Error::Precondition("n_max must be >= 2".into()));
    }
    let mut cache = PsiCache::new(curve, None);
    let polys = (0..=n_max).map(|n| cache.get(n)).collect();
    Ok(DivisionPolySet { curve: curve.clone(), polys })
}

type Split<T> = std::result::Result<T, Poly>;

/// Run `check` on the modulus `h`; when it reports a proper factor of `h`
/// (a failed inversion), rerun on both factors. True only if true on every
/// piece.
pub(crate) fn with_splitting<F>(h: &Poly, field: &PrimeField, check: &F) -> bool
where
    F: Fn(&Poly) -> Split<bool>,
{
    match check(h) {
        Ok(v) => v,
        Err(g) => {
            if g.degree() == Some(0) || g.degree() >= h.degree() {
                // Not a proper factor: the denominator vanishes on the whole
                // component, so the maps are undefined there.
                return false;
            }
            let other = h.divmod(&g, field).unwrap().0.monic(field);
            with_splitting(&g, field, check) && with_splitting(&other, field, check)
        }
    }
}

/// [n](x, y) = (X(x), y·Y(x)) modulo h, for n >= 1, from
/// x - ψ_{n-1}ψ_{n+1}/ψ_n² and ψ_{2n}/(2ψ_n⁴) rewritten in ψ̃.
fn scalar_map(curve: &Curve<PrimeField>, n: usize, h: &Poly) -> Split<(Poly, Poly)> {
    let field = curve.field();
    let mut psi = PsiCache::new(curve, Some(h.clone()));
    let cubic = psi.cubic.rem(h, field).unwrap();
    let (pm1, pn, pp1, p2n) = (psi.get(n - 1), psi.get(n), psi.get(n + 1), psi.get(2 * n));
    let pn2 = psi.mul(&pn, &pn);
    let pn4 = psi.mul(&pn2, &pn2);
    let (x_num, x_den, y_den) = if n % 2 == 1 {
        let num = psi.mul(&cubic, &psi.mul(&pm1, &pp1)).scale(4, field);
        (num, pn2, pn4)
    } else {
        let den = psi.mul(&cubic, &pn2).scale(4, field);
        let y_den = psi.mul(&psi.mul(&cubic, &cubic), &pn4).scale(16, field);
        (psi.mul(&pm1, &pp1), den, y_den)
    };
    let x_inv = x_den.inv_mod(h, field)?;
    let y_inv = y_den.inv_mod(h, field)?;
    let x = Poly::x().rem(h, field).unwrap().sub(&psi.mul(&x_num, &x_inv), field);
    let y = psi.mul(&p2n, &y_inv);
    Ok((x, y))
}

/// Whether Frobenius acts as [a mod c] on E[c].
pub fn scalar_action_test(curve: &Curve<PrimeField>, frob: &FrobeniusData, c: u64) -> Result<bool> {
    check_frobenius_matches(curve, frob)?;
    if c == 0 {
        return Err(Error::Precondition("c must be positive".into()));
    }
    if !(frob.b() % BigInt::from(c)).is_zero() {
        return Err(Error::Precondition(format!("{c} does not divide b = {}", frob.b())));
    }
    if c == 1 {
        return Ok(true);
    }
    let field = curve.field();
    let q = BigUint::from(curve.p());
    let residue = frob.a().mod_floor(&BigInt::from(c)).to_u64().unwrap();
    if residue == 0 {
        return Ok(false);
    }
    let cubic = Poly::from_coeffs(vec![*curve.b(), *curve.a(), 0, 1]);
    if c == 2 {
        // E[2] = {∞} ∪ {(r, 0)}; [a] is the identity there (a odd), so the
        // test is that all of E[2] is rational: x^p ≡ x (mod x³ + Ax + B).
        let xq = Poly::x().powmod(&q, &cubic, field)?;
        return Ok(xq == Poly::x());
    }
    // For c >= 3 the points of exact order c generate E[c] and none of them
    // is 2-torsion, so ψ̃_c alone carries the test.
    let h = PsiCache::new(curve, None).get(c as usize).monic(field);
    let (n, negate) = if residue <= c / 2 { (residue, false) } else { (c - residue, true) };
    let half = (&q - 1u32) / 2u32;
    let check = |h: &Poly| -> Split<bool> {
        let xq = Poly::x().powmod(&q, h, field).unwrap();
        let yq = cubic.powmod(&half, h, field).unwrap();
        let (xn, yn) = scalar_map(curve, n as usize, h)?;
        let yn = if negate { yn.neg(field) } else { yn };
        Ok(xq == xn && yq == yn)
    };
    Ok(with_splitting(&h, field, &check))
}

fn check_frobenius_matches(curve: &Curve<PrimeField>, frob: &FrobeniusData) -> Result<()> {
    if frob.q() != &BigUint::from(curve.p()) {
        return Err(Error::Precondition(format!(
            "Frobenius data is for q = {}, curve is over F_{}",
            frob.q(),
            curve.p()
        )));
    }
    Ok(())
}

fn prime_powers_of_b(frob: &FrobeniusData) -> Result<Vec<(u64, u32)>> {
    factorize(frob.b().magnitude())?
        .into_iter()
        .map(|(p, e)| {
            p.to_u64()
                .map(|p| (p, e))
                .ok_or_else(|| Error::Precondition("prime factor of b exceeds 64 bits".into()))
        })
        .collect()
}

fn assemble(passed: &[(u64, u32, u32)]) -> BigUint {
    passed
        .iter()
        .map(|&(p, vb, i)| BigUint::from(p).pow(vb - i))
        .product()
}

/// The conductor g of End(E) ≅ Z + gZδ.
pub fn conductor(curve: &Curve<PrimeField>, frob: &FrobeniusData) -> Result<BigUint> {
    check_frobenius_matches(curve, frob)?;
    let mut passed = Vec::new();
    for (p, vb) in prime_powers_of_b(frob)? {
        let mut i = 0;
        while i < vb && scalar_action_test(curve, frob, p.pow(i + 1))? {
            i += 1;
        }
        debug_assert!(
            (i + 1..vb).all(|j| !scalar_action_test(curve, frob, p.pow(j + 1)).unwrap()),
            "scalar action test not monotone at {p}"
        );
        passed.push((p, vb, i));
    }
    Ok(assemble(&passed))
}

/// Conductor straight from a curve over F_p: counts points, decomposes the
/// Frobenius, then runs [`conductor`].
pub fn conductor_of(curve: &Curve<PrimeField>) -> Result<(FrobeniusData, BigUint)> {
    let frob = frobenius_of(curve)?;
    let g = conductor(curve, &frob)?;
    Ok((frob, g))
}

pub fn frobenius_of(curve: &Curve<PrimeField>) -> Result<FrobeniusData> {
    let n = count_points(curve);
    let p = curve.p();
    let t = BigInt::from(p) + 1 - BigInt::from(n);
    frobenius_from_trace(&BigUint::from(p), &t)
}

/// Pointwise version of [`scalar_action_test`]: with e the order of a mod c,
/// τ acts as a on E[c] iff all of E[c] is rational over F_{p^e} and every
/// point there satisfies τP = [a]P.
pub fn scalar_action_bruteforce(
    curve: &Curve<PrimeField>,
    frob: &FrobeniusData,
    c: u64,
    bound: u64,
) -> Result<bool> {
    check_frobenius_matches(curve, frob)?;
    if c == 1 {
        return Ok(true);
    }
    let residue = frob.a().mod_floor(&BigInt::from(c));
    let Ok(e) = mult_order(&residue, c) else {
        return Ok(false);
    };
    let size = BigUint::from(curve.p()).pow(e as u32);
    if size > BigUint::from(bound) {
        return Err(Error::Capacity { size: size.to_string(), bound });
    }
    let ext = ExtensionField::new(curve.field(), e as usize)?;
    let ce = curve.base_change(&ext);
    let torsion: Vec<Point<Vec<u64>>> = ce
        .points(bound)?
        .into_iter()
        .filter(|pt| ce.mul_u64(c, pt).is_infinity())
        .collect();
    if torsion.len() as u64 != c * c {
        return Ok(false);
    }
    let r = residue.to_u64().unwrap();
    Ok(torsion.iter().all(|pt| ce.frobenius_point(pt, 1) == ce.mul_u64(r, pt)))
}

/// Conductor by enumerating torsion points over explicit extension fields.
pub fn conductor_bruteforce(curve: &Curve<PrimeField>, frob: &FrobeniusData, bound: u64) -> Result<BigUint> {
    check_frobenius_matches(curve, frob)?;
    let mut passed = Vec::new();
    for (p, vb) in prime_powers_of_b(frob)? {
        let mut i = 0;
        while i < vb && scalar_action_bruteforce(curve, frob, p.pow(i + 1), bound)? {
            i += 1;
        }
        passed.push((p, vb, i));
    }
    Ok(assemble(&passed))
}

/// All test outcomes at p^1 .. p^{v_p(b)} for each p | b, without stopping
/// at the first failure.
pub fn conductor_profile(curve: &Curve<PrimeField>, frob: &FrobeniusData) -> Result<Vec<(u64, Vec<bool>)>> {
    prime_powers_of_b(frob)?
        .into_iter()
        .map(|(p, vb)| {
            let outcomes = (1..=vb)
                .map(|i| scalar_action_test(curve, frob, p.pow(i)))
                .collect::<Result<Vec<_>>>()?;
            Ok((p, outcomes))
        })
        .collect()
}
