//! Integer factorization by trial division.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Prime → exponent. The empty map is the factorization of 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeFactorization {
    factors: BTreeMap<BigUint, u32>,
}

impl PrimeFactorization {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, p: &BigUint) -> u32 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    /// Primes in ascending order with their exponents.
    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, u32)> {
        self.factors.iter().map(|(p, &e)| (p, e))
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    /// Total number of prime factors counted with multiplicity.
    pub fn omega(&self) -> u64 {
        self.factors.values().map(|&e| u64::from(e)).sum()
    }

    pub fn product(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e))
    }

    fn push(&mut self, p: BigUint, e: u32) {
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (p, e) in self.iter() {
            if !first {
                f.write_str("·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn factorize_u64(m: u64) -> Result<PrimeFactorization> {
    factorize(&BigUint::from(m))
}

/// Exact factorization of `m ≥ 1`.
///
/// Small primes are divided out with big-integer arithmetic until the cofactor
/// fits in a machine word, after which the search continues natively.
pub fn factorize(m: &BigUint) -> Result<PrimeFactorization> {
    if m.is_zero() {
        return Err(Error::FactorizeZero);
    }
    let mut out = PrimeFactorization::one();
    let mut rest = m.clone();

    let mut p: u64 = 2;
    while rest.to_u128().is_none() {
        let big_p = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&big_p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        out.push(big_p, e);
        p = next_candidate(p);
        if BigUint::from(p) * BigUint::from(p) > rest {
            if !rest.is_one() {
                out.push(rest, 1);
            }
            return Ok(out);
        }
    }

    let mut rest = rest.to_u128().expect("fits");
    let mut p = u128::from(p);
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        out.push(BigUint::from(p), e);
        p = if p == 2 { 3 } else { p + 2 };
    }
    if rest > 1 {
        out.push(BigUint::from(rest), 1);
    }
    Ok(out)
}

fn next_candidate(p: u64) -> u64 {
    if p == 2 {
        3
    } else {
        p + 2
    }
}

/// Trial-division primality test.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(x) => is_prime_u64(x),
        None => factorize(n).map(|f| f.iter().count() == 1 && f.omega() == 1).unwrap_or(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(f: &PrimeFactorization) -> Vec<(u64, u32)> {
        f.iter().map(|(p, e)| (p.to_u64().unwrap(), e)).collect()
    }

    #[test]
    fn small_cases() {
        assert!(factorize_u64(1).unwrap().is_one());
        assert_eq!(pairs(&factorize_u64(12).unwrap()), vec![(2, 2), (3, 1)]);
        assert_eq!(
            pairs(&factorize_u64(9_699_690).unwrap()),
            vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1)]
        );
        assert!(matches!(factorize_u64(0), Err(Error::FactorizeZero)));
    }

    #[test]
    fn big_smooth_number() {
        let m = BigUint::from(2u32).pow(200) * BigUint::from(3u32).pow(50) * BigUint::from(1_000_003u32);
        let f = factorize(&m).unwrap();
        assert_eq!(f.exponent(&BigUint::from(2u32)), 200);
        assert_eq!(f.exponent(&BigUint::from(3u32)), 50);
        assert_eq!(f.exponent(&BigUint::from(1_000_003u32)), 1);
        assert_eq!(f.product(), m);
    }

    #[test]
    fn display() {
        assert_eq!(factorize_u64(360).unwrap().to_string(), "2^3·3^2·5");
        assert_eq!(factorize_u64(1).unwrap().to_string(), "1");
    }

    /// Smallest-prime-factor sieve; an independent route to the factorization.
    fn spf_sieve(limit: usize) -> Vec<u32> {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    }

    #[test]
    fn exhaustive_against_sieve_up_to_a_million() {
        const LIMIT: usize = 1_000_000;
        let spf = spf_sieve(LIMIT);
        for m in 1..=LIMIT {
            let mut expected = BTreeMap::new();
            let mut x = m;
            while x > 1 {
                *expected.entry(spf[x] as u64).or_insert(0u32) += 1;
                x /= spf[x] as usize;
            }
            let got = factorize_u64(m as u64).unwrap();
            let got: BTreeMap<u64, u32> = got.iter().map(|(p, e)| (p.to_u64().unwrap(), e)).collect();
            assert_eq!(got, expected, "m = {m}");
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
    }
}
