//! When E(F_{q^k}) ≅ E'(F_{q^k}) for isogenous ordinary E, E'.
//!
//! Ground truth per k is gcd(a_k - 1, b_k/g) = gcd(a_k - 1, b_k/g'). The
//! closed form works prime by prime over P = {p : v_p(g) ≠ v_p(g')}: at each
//! such p the groups differ exactly when v_p(a_k - 1) > v_p(b_k) - s_p, and
//! that depends on k only through e_p | k and the parity of k.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::GroupStructure;
use crate::error::{Error, Result};
use crate::quadorder::factor::factorize;
use crate::quadorder::{mult_order, vp_opt, FrobeniusData, OrderElem};

/// Largest residue-set modulus a pattern may have.
pub const MAX_PATTERN_MODULUS: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonInput {
    frob: FrobeniusData,
    g: BigUint,
    g2: BigUint,
}

impl ComparisonInput {
    pub fn new(frob: FrobeniusData, g: BigUint, g2: BigUint) -> Result<Self> {
        check_conductor(&frob, &g)?;
        check_conductor(&frob, &g2)?;
        Ok(Self { frob, g, g2 })
    }

    pub fn frob(&self) -> &FrobeniusData {
        &self.frob
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn g2(&self) -> &BigUint {
        &self.g2
    }
}

fn check_conductor(frob: &FrobeniusData, g: &BigUint) -> Result<()> {
    if g.is_zero() || !(frob.b().magnitude() % g).is_zero() {
        return Err(Error::ConductorNotDividing { g: BigInt::from(g.clone()), b: frob.b().clone() });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PrimeCase {
    OddP,
    EvenGeneric,
    /// p = 2 with v_2(b) = 1: even k go through τ² instead.
    EvenNasty,
}

impl fmt::Display for PrimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimeCase::OddP => "ODD_P",
            PrimeCase::EvenGeneric => "EVEN_GENERIC",
            PrimeCase::EvenNasty => "EVEN_NASTY",
        })
    }
}

/// The τ² data used for even k in the nasty case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub a: BigInt,
    pub b: BigInt,
    pub e: u64,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeAnalysis {
    pub p: u64,
    pub s: u64,
    /// v_p(b)
    pub vb: u64,
    /// Order of a mod p (odd p) or mod 4 (p = 2).
    pub e: u64,
    /// v_p(a^e - 1) - v_p(e) > v_p(b) - s
    pub strict: bool,
    pub case: PrimeCase,
    pub reduced: Option<Reduced>,
}

/// Whether v_p(x^e - 1) - v_p(e) > v_p(y) - s, evaluated modulo a power of
/// p rather than by expanding x^e.
fn strict_flag(x: &BigInt, vy: u64, p: u64, e: u64, s: u64) -> bool {
    let target = vy - s + vp_opt(&BigInt::from(e), p).unwrap() + 1;
    let pt = BigUint::from(p).pow(target as u32);
    let base = x.mod_floor(&BigInt::from(pt.clone())).to_biguint().unwrap();
    base.modpow(&BigUint::from(e), &pt) == BigUint::one() % &pt
}

fn order_modulus(p: u64) -> u64 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// v_p(n) with p prime and n dividing the nonzero b.
fn v(n: &BigUint, p: u64) -> u64 {
    vp_opt(&BigInt::from(n.clone()), p).unwrap_or(0)
}

/// P with s_p, e_p, the strict flag and the case tag for each p.
pub fn prime_set(frob: &FrobeniusData, g: &BigUint, g2: &BigUint) -> Result<Vec<PrimeAnalysis>> {
    check_conductor(frob, g)?;
    check_conductor(frob, g2)?;
    let mut primes = BTreeSet::new();
    for n in [g, g2] {
        for (p, _) in factorize(n)? {
            primes.insert(
                p.to_u64()
                    .ok_or_else(|| Error::Precondition("conductor prime exceeds 64 bits".into()))?,
            );
        }
    }
    let a = frob.a();
    let b = frob.b();
    let mut out = Vec::new();
    for p in primes {
        let (vg, vg2) = (v(g, p), v(g2, p));
        if vg == vg2 {
            continue;
        }
        let s = vg.max(vg2);
        let vb = vp_opt(b, p).unwrap();
        let e = mult_order(a, order_modulus(p))?;
        let strict = strict_flag(a, vb, p, e, s);
        let (case, reduced) = if p != 2 {
            (PrimeCase::OddP, None)
        } else if vb == 1 {
            let sq = nasty_reduce(frob)?;
            let (ra, rb) = (sq.a().clone(), sq.b().clone());
            let re = mult_order(&ra, 4)?;
            let rstrict = strict_flag(&ra, vp_opt(&rb, 2).unwrap(), 2, re, s);
            (PrimeCase::EvenNasty, Some(Reduced { a: ra, b: rb, e: re, strict: rstrict }))
        } else {
            (PrimeCase::EvenGeneric, None)
        };
        out.push(PrimeAnalysis { p, s, vb, e, strict, case, reduced });
    }
    Ok(out)
}

/// τ² as Frobenius data over F_{q²}. The components are not sign-normalized.
pub fn nasty_reduce(frob: &FrobeniusData) -> Result<FrobeniusData> {
    if vp_opt(frob.b(), 2) != Some(1) {
        return Err(Error::Precondition(format!("v_2(b) must be 1, b = {}", frob.b())));
    }
    let q2 = frob.q() * frob.q();
    FrobeniusData::from_elem(q2, frob.characteristic().clone(), frob.power(2))
}

fn single_prime_not_iso(strict: bool, e: u64, vb: u64, s: u64, p: u64, k: u64) -> bool {
    (strict && k.is_multiple_of(e)) || (p == 2 && k % 2 == 1 && vb == s)
}

/// Whether the two groups differ at p over F_{q^k}, without computing τ^k.
pub fn not_iso_at_prime(pa: &PrimeAnalysis, k: u64) -> bool {
    match (&pa.reduced, k % 2) {
        (Some(r), 0) => {
            let vb = vp_opt(&r.b, 2).unwrap();
            single_prime_not_iso(r.strict, r.e, vb, pa.s, 2, k / 2)
        }
        _ => single_prime_not_iso(pa.strict, pa.e, pa.vb, pa.s, pa.p, k),
    }
}

pub fn gcd_criterion(frob: &FrobeniusData, g: &BigUint, g2: &BigUint, k: u64) -> Result<bool> {
    check_conductor(frob, g)?;
    check_conductor(frob, g2)?;
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let tk = frob.power(k);
    let x: BigInt = &tk.x - 1;
    let gcd_with = |g: &BigUint| x.gcd(&(&tk.y / BigInt::from(g.clone())));
    Ok(gcd_with(g) == gcd_with(g2))
}

/// v_p(x) ≤ v_p(y) - s_p for every (p, s_p), with v_p(0) = ∞.
pub fn valuation_condition(x: &BigInt, y: &BigInt, primes: &[(u64, u64)]) -> bool {
    primes.iter().all(|&(p, s)| match (vp_opt(x, p), vp_opt(y, p)) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(vx), Some(vy)) => vx + s <= vy,
    })
}

pub fn valuation_criterion(frob: &FrobeniusData, analyses: &[PrimeAnalysis], k: u64) -> bool {
    if analyses.is_empty() {
        return true;
    }
    let tk = frob.power(k);
    let primes: Vec<(u64, u64)> = analyses.iter().map(|pa| (pa.p, pa.s)).collect();
    valuation_condition(&(&tk.x - 1), &tk.y, &primes)
}

/// The set {k ≥ 1 : groups isomorphic} as residues modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoPattern {
    modulus: u64,
    allowed: Vec<u64>,
    per_prime: Vec<PrimeAnalysis>,
}

impl IsoPattern {
    pub fn all() -> Self {
        Self { modulus: 1, allowed: vec![0], per_prime: Vec::new() }
    }

    /// Reduce to the least period. Residue 0 stands for multiples of M.
    pub fn from_residues(modulus: u64, allowed: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let mut set: BTreeSet<u64> = allowed.into_iter().collect();
        if set.iter().any(|&r| r >= modulus) {
            return Err(Error::Precondition(format!("residue outside 0..{modulus}")));
        }
        let mut m = modulus;
        for d in divisors_u64(modulus) {
            if (0..modulus).all(|r| set.contains(&r) == set.contains(&(r % d))) {
                m = d;
                break;
            }
        }
        set.retain(|&r| r < m);
        Ok(Self { modulus: m, allowed: set.into_iter().collect(), per_prime: Vec::new() })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn allowed(&self) -> &[u64] {
        &self.allowed
    }

    pub fn per_prime(&self) -> &[PrimeAnalysis] {
        &self.per_prime
    }

    pub fn contains(&self, k: u64) -> bool {
        self.allowed.binary_search(&(k % self.modulus)).is_ok()
    }

    /// Same set of k, ignoring provenance.
    pub fn same_set(&self, other: &IsoPattern) -> bool {
        self.modulus == other.modulus && self.allowed == other.allowed
    }

    pub fn text(&self) -> String {
        render(self.modulus, &self.allowed)
    }
}

impl fmt::Display for IsoPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

fn divisors_u64(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let big: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&c| c * c != n).collect();
    out.extend(big);
    out
}

fn render(m: u64, allowed: &[u64]) -> String {
    if allowed.is_empty() {
        return "none".into();
    }
    if m == 1 {
        return "all k".into();
    }
    let target: BTreeSet<u64> = allowed.iter().copied().collect();
    let mut atoms: Vec<(String, BTreeSet<u64>)> = Vec::new();
    for d in divisors_u64(m).into_iter().skip(1) {
        let divisible: BTreeSet<u64> = (0..m).filter(|r| r % d == 0).collect();
        let coprime: BTreeSet<u64> = (0..m).filter(|r| r % d != 0).collect();
        let not_div = if d == 2 { "k odd".to_string() } else { format!("{d} ∤ k") };
        atoms.push((format!("{d} | k"), divisible));
        atoms.push((not_div, coprime));
    }
    atoms.retain(|(_, set)| target.is_subset(set));
    let n = atoms.len();
    for size in 1..=3.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut inter: BTreeSet<u64> = (0..m).collect();
            for &i in &idx {
                inter = inter.intersection(&atoms[i].1).copied().collect();
            }
            if inter == target {
                return idx.iter().map(|&i| atoms[i].0.as_str()).collect::<Vec<_>>().join(" and ");
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&i| idx[i] < n - size + i) else { break };
            idx[pos] += 1;
            for j in pos + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    let list = allowed.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
    format!("k ≡ {{{list}}} (mod {m})")
}

fn prime_modulus(pa: &PrimeAnalysis) -> u64 {
    match &pa.reduced {
        Some(r) => (2 * r.e).lcm(&pa.e.lcm(&2)),
        None => pa.e.lcm(&2),
    }
}

/// The full set of k with isomorphic groups.
pub fn iso_pattern(input: &ComparisonInput) -> Result<IsoPattern> {
    if input.g == input.g2 {
        return Ok(IsoPattern::all());
    }
    let primes = prime_set(&input.frob, &input.g, &input.g2)?;
    let mut modulus = 1u64;
    for pa in &primes {
        modulus = modulus.lcm(&prime_modulus(pa));
        if modulus > MAX_PATTERN_MODULUS {
            return Err(Error::Capacity { size: modulus.to_string(), bound: MAX_PATTERN_MODULUS });
        }
    }
    let allowed = (0..modulus).filter(|&r| {
        let k = if r == 0 { modulus } else { r };
        primes.iter().all(|pa| !not_iso_at_prime(pa, k))
    });
    let mut pattern = IsoPattern::from_residues(modulus, allowed)?;
    pattern.per_prime = primes;
    Ok(pattern)
}

pub fn pattern_eval(pattern: &IsoPattern, k: u64) -> bool {
    pattern.contains(k)
}

/// (gcd(a_k - 1, b_k/g), N_k / that gcd).
pub fn predicted_group_structure(frob: &FrobeniusData, g: &BigUint, k: u64) -> Result<GroupStructure> {
    check_conductor(frob, g)?;
    let tk: OrderElem = frob.power(k);
    let x: BigInt = &tk.x - 1;
    let n1 = x.gcd(&(&tk.y / BigInt::from(g.clone())));
    let n = tk.sub_int(&BigInt::one()).norm();
    let n2 = &n / &n1;
    Ok(GroupStructure { n1: n1.to_biguint().unwrap(), n2: n2.to_biguint().unwrap() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadorder::frobenius_from_trace;
    use crate::quadorder::factor::divisors;
    use proptest::prelude::*;

    fn frob(q: u64, t: i64) -> FrobeniusData {
        frobenius_from_trace(&BigUint::from(q), &BigInt::from(t)).unwrap()
    }

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn pattern(q: u64, t: i64, g: u64, g2: u64) -> IsoPattern {
        iso_pattern(&ComparisonInput::new(frob(q, t), u(g), u(g2)).unwrap()).unwrap()
    }

    #[test]
    fn gcd_criterion_examples() {
        let f = frob(3329, 50);
        assert!(!gcd_criterion(&f, &u(1), &u(52), 1).unwrap());
        assert!(gcd_criterion(&f, &u(26), &u(2), 1).unwrap());
        assert!(gcd_criterion(&f, &u(13), &u(13), 5).unwrap());
        assert!(gcd_criterion(&f, &u(3), &u(1), 1).is_err());
        assert!(gcd_criterion(&f, &u(0), &u(1), 1).is_err());
    }

    #[test]
    fn prime_set_examples() {
        let f = frob(3329, 50);
        let ps = prime_set(&f, &u(1), &u(52)).unwrap();
        assert_eq!(ps.iter().map(|pa| (pa.p, pa.s)).collect::<Vec<_>>(), vec![(2, 2), (13, 1)]);
        assert_eq!(ps[0].case, PrimeCase::EvenGeneric);
        assert_eq!(ps[1].e, 2);
        let ps = prime_set(&f, &u(26), &u(2)).unwrap();
        assert_eq!(ps.iter().map(|pa| (pa.p, pa.s)).collect::<Vec<_>>(), vec![(13, 1)]);
        assert!(prime_set(&f, &u(4), &u(4)).unwrap().is_empty());
        let ps = prime_set(&frob(1031, -20), &u(14), &u(1)).unwrap();
        assert_eq!(ps[0].case, PrimeCase::EvenNasty);
        assert_eq!((ps[0].e, ps[1].e), (2, 3));
    }

    #[test]
    fn valuation_criterion_examples() {
        let f = frob(3329, 104);
        let ps = prime_set(&f, &u(1), &u(25)).unwrap();
        assert!(!valuation_criterion(&f, &ps, 4));
        assert!(valuation_criterion(&f, &ps, 3));
        assert!(valuation_criterion(&f, &[], 4));
    }

    #[test]
    fn not_iso_examples() {
        let f = frob(3329, 50);
        let ps = prime_set(&f, &u(1), &u(52)).unwrap();
        for k in 1..=12 {
            assert!(not_iso_at_prime(&ps[0], k));
            assert_eq!(not_iso_at_prime(&ps[1], k), k % 2 == 0);
        }
        let f = frob(1031, -20);
        let ps = prime_set(&f, &u(2), &u(1)).unwrap();
        for k in 1..=12 {
            assert_eq!(not_iso_at_prime(&ps[0], k), k % 2 == 1);
        }
    }

    #[test]
    fn nasty_reduction() {
        let f = frob(1031, -20);
        let r = nasty_reduce(&f).unwrap();
        assert_eq!((r.a(), r.b()), (&BigInt::from(-691), &BigInt::from(-280)));
        assert_eq!(r.q(), &u(1031 * 1031));
        assert_eq!(r.elem().norm(), BigInt::from(1031u64 * 1031));
        assert!(vp_opt(r.b(), 2).unwrap() >= 2);
        assert!(nasty_reduce(&frob(3329, 50)).is_err());
    }

    #[test]
    fn pattern_examples() {
        let p = pattern(3329, 50, 26, 2);
        assert_eq!((p.modulus(), p.allowed()), (2, &[1][..]));
        assert_eq!(p.text(), "k odd");
        assert_eq!(pattern(3329, 50, 1, 52).text(), "none");
        let p = pattern(3329, 104, 1, 25);
        assert_eq!((p.modulus(), p.allowed()), (4, &[1, 2, 3][..]));
        assert_eq!(p.text(), "4 ∤ k");
        assert_eq!(pattern(3329, 104, 1, 5).text(), "all k");
        let p = pattern(1031, -20, 14, 1);
        assert_eq!((p.modulus(), p.allowed()), (6, &[2, 4][..]));
        assert_eq!(p.text(), "2 | k and 3 ∤ k");
        assert_eq!(pattern(1031, -20, 7, 1).text(), "3 ∤ k");
        assert_eq!(pattern(1031, -20, 7, 14).text(), "2 | k");
        assert_eq!(pattern(1031, -20, 2, 2).text(), "all k");
    }

    #[test]
    fn pattern_eval_examples() {
        let odd = IsoPattern::from_residues(2, [1]).unwrap();
        assert!(pattern_eval(&odd, 7));
        assert!(!pattern_eval(&odd, 8));
        let four = IsoPattern::from_residues(4, [1, 2, 3]).unwrap();
        assert!(!pattern_eval(&four, 8));
        assert!(pattern_eval(&four, 6));
        assert!((1..50).all(|k| pattern_eval(&IsoPattern::all(), k)));
    }

    #[test]
    fn residues_are_canonical() {
        let p = IsoPattern::from_residues(12, [1, 3, 5, 7, 9, 11]).unwrap();
        assert_eq!((p.modulus(), p.allowed()), (2, &[1][..]));
        let p = IsoPattern::from_residues(4, [0, 1, 2, 3]).unwrap();
        assert!(p.same_set(&IsoPattern::all()));
        let p = IsoPattern::from_residues(6, []).unwrap();
        assert_eq!((p.modulus(), p.text().as_str()), (1, "none"));
        assert!(IsoPattern::from_residues(3, [3]).is_err());
    }

    #[test]
    fn rendering() {
        let r = |m: u64, a: &[u64]| IsoPattern::from_residues(m, a.iter().copied()).unwrap().text();
        assert_eq!(r(2, &[0]), "2 | k");
        assert_eq!(r(3, &[0]), "3 | k");
        assert_eq!(r(6, &[1, 5]), "k odd and 3 ∤ k");
        assert_eq!(r(4, &[2]), "2 | k and 4 ∤ k");
        assert_eq!(r(8, &[1, 2]), "k ≡ {1, 2} (mod 8)");
        assert_eq!(r(5, &[1, 2]), "k ≡ {1, 2} (mod 5)");
    }

    #[test]
    fn predicted_structures() {
        let f = frob(3329, 50);
        let s = predicted_group_structure(&f, &u(1), 1).unwrap();
        assert_eq!((s.n1, s.n2), (u(4), u(820)));
        let f = frob(5, -3);
        assert_eq!((f.a(), f.b()), (&BigInt::from(-2), &BigInt::from(1)));
        let s = predicted_group_structure(&f, &u(1), 1).unwrap();
        assert_eq!((s.n1, s.n2), (u(1), u(9)));
    }

    /// Synthetic Frobenius data with a highly divisible b.
    fn fixtures() -> Vec<FrobeniusData> {
        let mut out = vec![frob(3329, 50), frob(3329, 104), frob(1031, -20)];
        for q in [101u64, 211, 1009, 4001, 7919, 65537] {
            let lim = (2.0 * (q as f64).sqrt()) as i64;
            let mut picked = 0;
            for t in (-lim..=lim).rev() {
                let Ok(f) = frobenius_from_trace(&u(q), &BigInt::from(t)) else { continue };
                if divisors(f.b().magnitude()).unwrap().len() >= 4 {
                    out.push(f);
                    picked += 1;
                    if picked == 4 {
                        break;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn criteria_agree_on_synthetic_classes() {
        for f in fixtures() {
            let ds = divisors(f.b().magnitude()).unwrap();
            for g in &ds {
                for g2 in &ds {
                    let input = ComparisonInput::new(f.clone(), g.clone(), g2.clone()).unwrap();
                    let pat = iso_pattern(&input).unwrap();
                    let ps = prime_set(&f, g, g2).unwrap();
                    let swapped = iso_pattern(&ComparisonInput::new(f.clone(), g2.clone(), g.clone()).unwrap()).unwrap();
                    assert!(pat.same_set(&swapped));
                    for k in 1..=40 {
                        let truth = gcd_criterion(&f, g, g2, k).unwrap();
                        assert_eq!(valuation_criterion(&f, &ps, k), truth, "q={} t={} g={g} g2={g2} k={k}", f.q(), f.t());
                        assert_eq!(pattern_eval(&pat, k), truth, "q={} t={} g={g} g2={g2} k={k}", f.q(), f.t());
                        assert_eq!(pattern_eval(&pat, k), pattern_eval(&pat, k + pat.modulus()));
                        for pa in &ps {
                            let direct = !valuation_criterion(&f, std::slice::from_ref(pa), k);
                            assert_eq!(not_iso_at_prime(pa, k), direct);
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn gcd_equality_matches_valuations(
            x in -5000i64..=5000, base in 1u64..=60, gi in 0usize..64, hi in 0usize..64, mult in 1u64..=30
        ) {
            let y = base * mult * 8;
            let ds = divisors(&u(y)).unwrap();
            let (g, h) = (&ds[gi % ds.len()], &ds[hi % ds.len()]);
            let (xb, yb) = (BigInt::from(x), BigInt::from(y));
            let lhs = xb.gcd(&(&yb / BigInt::from(g.clone()))) == xb.gcd(&(&yb / BigInt::from(h.clone())));
            let primes: Vec<(u64, u64)> = factorize(&u(y)).unwrap().into_iter()
                .map(|(p, _): (BigUint, u32)| p.to_u64().unwrap())
                .filter(|&p| v(g, p) != v(h, p))
                .map(|p| (p, v(g, p).max(v(h, p))))
                .collect();
            prop_assert_eq!(lhs, valuation_condition(&xb, &yb, &primes));
        }
    }
}
