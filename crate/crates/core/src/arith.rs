//! Elementary number theory: divisor sums, Bernoulli numbers, binomials and
//! deterministic primality.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::series::ExactRational;

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `σ_power(n) = Σ_{d | n} d^power`.
pub fn sigma(power: u32, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::invalid("sigma requires n >= 1"));
    }
    Ok(divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(power))
        .sum())
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

static BERNOULLI: OnceLock<Mutex<Vec<ExactRational>>> = OnceLock::new();

/// Bernoulli number `B_k` with the convention `B_1 = -1/2`, from the
/// recurrence `Σ_{j=0}^{k} C(k+1, j) B_j = 0`.
pub fn bernoulli(k: usize) -> ExactRational {
    let table = BERNOULLI.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut b = table.lock().unwrap_or_else(|e| e.into_inner());
    while b.len() <= k {
        let m = b.len();
        let s: BigRational = b
            .iter()
            .enumerate()
            .map(|(j, bj)| bj * BigRational::from_integer(binomial(m as u64 + 1, j as u64)))
            .sum();
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    // Independent divisor-sum oracle: scan every candidate divisor.
    fn sigma_scan(power: u32, n: u64) -> BigInt {
        (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(power)).sum()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1, 6).unwrap(), BigInt::from(12));
        assert_eq!(sigma(3, 6).unwrap(), BigInt::from(252));
        for p in [2u64, 3, 5, 7, 97, 101] {
            assert_eq!(sigma(0, p).unwrap(), BigInt::from(2));
        }
        assert!(sigma(1, 0).is_err());
        for n in 1..=200 {
            for k in 0..6 {
                assert_eq!(sigma(k, n).unwrap(), sigma_scan(k, n));
            }
        }
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        for k in (3..40).step_by(2) {
            assert!(bernoulli(k).is_zero(), "B_{k}");
        }
    }

    #[test]
    fn primality_against_sieve() {
        let n = 2000;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=n {
            if sieve[i] {
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), p, "{i}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
