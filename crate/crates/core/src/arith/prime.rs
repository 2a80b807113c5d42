//! Small-prime table and deterministic Miller-Rabin.

use std::sync::OnceLock;

use super::montgomery::{Mont128, Mont64};
use crate::error::{Error, Result};

/// Default bound of the small-prime table.
pub const DEFAULT_SIEVE_LIMIT: u32 = 1 << 16;

/// Primes below a fixed limit, produced by an Eratosthenes sieve.
#[derive(Debug, Clone)]
pub struct SmallPrimes {
    limit: u32,
    primes: Vec<u32>,
}

impl SmallPrimes {
    pub fn new(limit: u32) -> Self {
        let limit = limit.max(3);
        let mut composite = vec![false; limit as usize];
        let mut primes = Vec::new();
        for i in 2..limit as usize {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < limit as usize {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        SmallPrimes { limit, primes }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.primes
    }

    /// Exact membership for `n < limit`.
    pub fn contains(&self, n: u64) -> Option<bool> {
        if n >= self.limit as u64 {
            return None;
        }
        Some(self.primes.binary_search(&(n as u32)).is_ok())
    }
}

/// The shared default table (primes below 2^16).
pub fn small_primes() -> &'static SmallPrimes {
    static TABLE: OnceLock<SmallPrimes> = OnceLock::new();
    TABLE.get_or_init(|| SmallPrimes::new(DEFAULT_SIEVE_LIMIT))
}

// Jim Sinclair's base set: deterministic for every n < 2^64.
const MR_BASES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

// The first 13 primes are a deterministic base set below 3.3 * 10^24.
const MR_BASES_128: [u128; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];
const MR_DETERMINISTIC_13: u128 = 3_317_044_064_679_887_385_961_981;

const TRIAL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Exact primality for every 64-bit integer.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &TRIAL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let mont = Mont64::new(n);
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES_64 {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality for 128-bit integers: exact below 3.3 * 10^24, strong-probable-prime
/// to 20 prime bases above that.
pub fn is_prime_wide(n: u128) -> bool {
    if n <= u64::MAX as u128 {
        return is_prime(n as u64);
    }
    if n & 1 == 0 {
        return false;
    }
    for &p in small_primes().as_slice().iter().take(64) {
        if n.is_multiple_of(p as u128) {
            return false;
        }
    }
    let bases: &[u128] = if n < MR_DETERMINISTIC_13 {
        &MR_BASES_128[..13]
    } else {
        &MR_BASES_128
    };
    let mont = Mont128::new(n);
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in bases {
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> Result<u64> {
    if n < 2 {
        return Ok(2);
    }
    let table = small_primes();
    if n + 1 < table.limit() as u64 {
        let primes = table.as_slice();
        let idx = primes.partition_point(|&p| p as u64 <= n);
        if let Some(&p) = primes.get(idx) {
            return Ok(p as u64);
        }
    }
    let mut c = if n.is_multiple_of(2) { n + 1 } else { n + 2 };
    loop {
        if is_prime(c) {
            return Ok(c);
        }
        c = c.checked_add(2).ok_or(Error::Overflow("next_prime"))?;
    }
}
