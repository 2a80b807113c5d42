//! Exhaustive reference for `s⁻¹({n})`, independent of the factoring code.
//!
//! Even preimages satisfy `m <= 2n`; an odd preimage `m > 1` is a square
//! whose root is a proper divisor, so `√m <= n - 1`.

use crate::error::{Error, Result};

pub const DEFAULT_ORACLE_CEILING: u64 = 20_000;

/// Tables of `s(m)` for even `m <= 2·ceiling` and `s(t²)` for odd `t < ceiling`.
#[derive(Debug, Clone)]
pub struct BruteForceOracle {
    ceiling: u64,
    even_sums: Vec<u64>,
    odd_square_sums: Vec<(u64, u64)>,
}

impl BruteForceOracle {
    pub fn new(ceiling: u64) -> Self {
        let top = 2 * ceiling as usize;
        let mut sums = vec![0u64; top + 1];
        for d in 1..=top / 2 {
            let mut multiple = 2 * d;
            while multiple <= top {
                sums[multiple] += d as u64;
                multiple += d;
            }
        }
        let odd_square_sums = (3..ceiling)
            .step_by(2)
            .map(|t| (t, trial_sigma_of_square(t) - t * t))
            .collect();
        BruteForceOracle { ceiling, even_sums: sums, odd_square_sums }
    }

    pub fn ceiling(&self) -> u64 {
        self.ceiling
    }

    /// Sorted `s⁻¹({n})` by exhaustive scan.
    pub fn preimages(&self, n: u64) -> Result<Vec<u128>> {
        if n == 0 || n % 2 == 1 || n > self.ceiling {
            return Err(Error::Domain(format!(
                "brute-force oracle needs an even n in [2, {}], got {n}",
                self.ceiling
            )));
        }
        let mut out: Vec<u128> = (2..=2 * n)
            .step_by(2)
            .filter(|&m| self.even_sums[m as usize] == n)
            .map(|m| m as u128)
            .collect();
        out.extend(
            self.odd_square_sums
                .iter()
                .take_while(|&&(t, _)| t < n)
                .filter(|&&(_, s)| s == n)
                .map(|&(t, _)| (t * t) as u128),
        );
        out.sort_unstable();
        Ok(out)
    }
}

/// `σ(t²)` by trial division of `t`.
fn trial_sigma_of_square(mut t: u64) -> u64 {
    let mut total = 1u64;
    let mut d = 2;
    while d * d <= t {
        if t.is_multiple_of(d) {
            let mut e = 0;
            while t.is_multiple_of(d) {
                t /= d;
                e += 1;
            }
            total *= (d.pow(2 * e + 1) - 1) / (d - 1);
        }
        d += 1;
    }
    if t > 1 {
        total *= 1 + t + t * t;
    }
    total
}

/// Brute-force `s⁻¹({n})` for even `n <= 20000`.
pub fn s_inverse_bruteforce(n: u64) -> Result<Vec<u128>> {
    if n > DEFAULT_ORACLE_CEILING {
        return Err(Error::Domain(format!(
            "brute-force oracle ceiling is {DEFAULT_ORACLE_CEILING}, got {n}"
        )));
    }
    BruteForceOracle::new(n.max(2)).preimages(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(s_inverse_bruteforce(28).unwrap(), vec![28]);
        assert_eq!(s_inverse_bruteforce(6).unwrap(), vec![6, 25]);
        assert_eq!(s_inverse_bruteforce(4).unwrap(), vec![9]);
        assert_eq!(s_inverse_bruteforce(16).unwrap(), vec![12, 26]);
        assert!(s_inverse_bruteforce(2).unwrap().is_empty());
    }

    #[test]
    fn guards() {
        assert!(s_inverse_bruteforce(20_002).is_err());
        assert!(s_inverse_bruteforce(7).is_err());
        assert!(s_inverse_bruteforce(0).is_err());
    }

    #[test]
    fn odd_square_sums() {
        assert_eq!(trial_sigma_of_square(3), 13);
        assert_eq!(trial_sigma_of_square(15), 13 * 31);
        assert_eq!(trial_sigma_of_square(9), 1 + 3 + 9 + 27 + 81);
    }
}
