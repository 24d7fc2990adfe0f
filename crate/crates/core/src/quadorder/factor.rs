//! Integer factorization for the small discriminants and conductors that
//! show up here: trial division up to 10^6, then Pollard rho (Brent).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::is_prime_u64;

pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first 13 prime bases. Deterministic below
/// 3.3 * 10^24, a strong probable-prime test above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    const M: u64 = 128;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..M.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += M;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: &BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return;
    }
    for c in 1.. {
        if let Some(d) = pollard_brent(n, c) {
            split_composite(&d, out);
            split_composite(&(n / &d), out);
            return;
        }
    }
}

/// Prime factorization with ascending primes. `n = 0` is an error.
pub fn factorize(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor zero".into()));
    }
    let mut rest = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND {
        let bd = BigUint::from(d);
        if &bd * &bd > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            e += 1;
        }
        if e > 0 {
            out.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let mut big = Vec::new();
        split_composite(&rest, &mut big);
        big.sort();
        for p in big {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    Ok(out)
}

pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigUint::from(n))
        .expect("nonzero")
        .into_iter()
        .map(|(p, e)| (p.to_u64().unwrap(), e))
        .collect()
}

/// Smallest prime factor and exponent when `q = p^n`, otherwise an error.
pub fn prime_power_base(q: &BigUint) -> Result<(BigUint, u32)> {
    if q <= &BigUint::one() {
        return Err(Error::NotPrimePower(q.to_string()));
    }
    let f = factorize(q)?;
    if f.len() != 1 {
        return Err(Error::NotPrimePower(q.to_string()));
    }
    Ok(f.into_iter().next().unwrap())
}

/// All positive divisors in ascending order.
pub fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = d.clone();
            for _ in 0..=e {
                next.push(pk.clone());
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn factors_small_numbers() {
        assert_eq!(factorize_u64(10816), vec![(2, 6), (13, 2)]);
        assert_eq!(factorize_u64(3724), vec![(2, 2), (7, 2), (19, 1)]);
        assert_eq!(factorize_u64(1), vec![]);
        assert!(factorize(&BigUint::zero()).is_err());
    }

    #[test]
    fn factors_past_trial_division() {
        // Two primes above the trial-division bound.
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let n = big(p) * big(q) * big(q);
        assert_eq!(
            factorize(&n).unwrap(),
            vec![(big(p), 1), (big(q), 2)]
        );
        let m = BigUint::from(18446744073709551557u64) * BigUint::from(4294967291u64);
        let f = factorize(&m).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.iter().map(|(p, _)| p.clone()).product::<BigUint>(), m);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_base(&big(3329)).unwrap(), (big(3329), 1));
        assert_eq!(prime_power_base(&big(1031 * 1031)).unwrap(), (big(1031), 2));
        assert_eq!(prime_power_base(&big(1024)).unwrap(), (big(2), 10));
        assert!(prime_power_base(&big(12)).is_err());
        assert!(prime_power_base(&big(1)).is_err());
    }

    #[test]
    fn divisor_lists() {
        let d: Vec<u64> = divisors(&big(52)).unwrap().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 4, 13, 26, 52]);
    }
}
