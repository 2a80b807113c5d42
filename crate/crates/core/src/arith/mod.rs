//! Exact integer arithmetic: factorization, primality, divisor sums and
//! distinct-prime partitions of even numbers.

mod montgomery;
mod prime;
mod rho;

pub use prime::{is_prime, is_prime_wide, next_prime, small_primes, SmallPrimes, DEFAULT_SIEVE_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division stops at this prime unless configured otherwise.
pub const DEFAULT_TRIAL_LIMIT: u32 = 1 << 10;

/// Rho iterations per polynomial tried on a cofactor wider than 64 bits.
pub const DEFAULT_WIDE_RHO_ITERATIONS: u64 = 1 << 22;

const WIDE_RHO_POLYNOMIALS: u128 = 8;

/// Prime-power decomposition of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// The factored value.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// Builds a factorization from `(prime, exponent)` pairs, checking primality,
    /// ordering and that the product fits in 64 bits.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut n = 1u64;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("repeated prime {}", w[0].0)));
            }
        }
        for &(p, e) in &factors {
            if e == 0 || !is_prime(p) {
                return Err(Error::Domain(format!("invalid prime power {p}^{e}")));
            }
            for _ in 0..e {
                n = n.checked_mul(p).ok_or(Error::Overflow("factorization product"))?;
            }
        }
        Ok(Factorization { n, factors })
    }
}

/// Tunable effort for factoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorConfig {
    /// Largest prime used for trial division before switching to rho.
    pub trial_limit: u32,
    /// Rho iterations per polynomial for cofactors above 64 bits.
    pub wide_rho_iterations: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_limit: DEFAULT_TRIAL_LIMIT,
            wide_rho_iterations: DEFAULT_WIDE_RHO_ITERATIONS,
        }
    }
}

/// Factors `n` with the default configuration.
pub fn factor(n: u64) -> Result<Factorization> {
    factor_with(n, &FactorConfig::default())
}

/// Factors `n`. Every 64-bit input is factored completely.
pub fn factor_with(n: u64, config: &FactorConfig) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut factors = Vec::new();
    let mut rem = n;
    let twos = rem.trailing_zeros();
    if twos > 0 {
        factors.push((2, twos));
        rem >>= twos;
    }
    let mut exhausted = false;
    for &p in small_primes().as_slice().iter().skip(1) {
        if p > config.trial_limit {
            break;
        }
        let p = p as u64;
        if p * p > rem {
            exhausted = true;
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rem > 1 {
        if exhausted {
            factors.push((rem, 1));
        } else {
            let mut primes = Vec::new();
            split64(rem, &mut primes);
            primes.sort_unstable();
            for p in primes {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(Factorization { n, factors })
}

fn split64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let sqrt = isqrt(n);
    if sqrt * sqrt == n {
        split64(sqrt, out);
        split64(sqrt, out);
        return;
    }
    // Rho always splits an odd composite for some polynomial, so this
    // loop terminates; the budget only decides when to switch polynomial.
    let mut c = 1;
    loop {
        if let Some(d) = rho::rho64(n, c, 1 << 26) {
            split64(d, out);
            split64(n / d, out);
            return;
        }
        c += 1;
    }
}

/// Factors a 128-bit integer; gives up with [`Error::EffortExceeded`] when a
/// cofactor above 64 bits resists the configured rho budget.
pub fn factor_wide(n: u128, config: &FactorConfig) -> Result<Vec<(u128, u32)>> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    if n <= u64::MAX as u128 {
        let f = factor_with(n as u64, config)?;
        return Ok(f.factors.iter().map(|&(p, e)| (p as u128, e)).collect());
    }
    let mut rem = n;
    let mut primes: Vec<u128> = Vec::new();
    for &p in small_primes().as_slice() {
        if p > config.trial_limit || rem <= u64::MAX as u128 {
            break;
        }
        let p = p as u128;
        while rem.is_multiple_of(p) {
            rem /= p;
            primes.push(p);
        }
    }
    split128(rem, config, &mut primes)?;
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(factors)
}

fn split128(n: u128, config: &FactorConfig, out: &mut Vec<u128>) -> Result<()> {
    if n <= u64::MAX as u128 {
        let f = factor_with(n as u64, config)?;
        for &(p, e) in f.factors() {
            for _ in 0..e {
                out.push(p as u128);
            }
        }
        return Ok(());
    }
    if n & 1 == 0 {
        out.push(2);
        return split128(n >> 1, config, out);
    }
    if is_prime_wide(n) {
        out.push(n);
        return Ok(());
    }
    let sqrt = isqrt_wide(n);
    if sqrt * sqrt == n {
        split128(sqrt, config, out)?;
        return split128(sqrt, config, out);
    }
    for c in 1..=WIDE_RHO_POLYNOMIALS {
        if let Some(d) = rho::rho128(n, c, config.wide_rho_iterations) {
            split128(d, config, out)?;
            return split128(n / d, config, out);
        }
    }
    Err(Error::EffortExceeded { cofactor: n })
}

/// All positive divisors of a number given as prime powers, ascending.
pub fn divisors_wide(factors: &[(u128, u32)]) -> Vec<u128> {
    let mut divs = vec![1u128];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// `σ(n)` as a 128-bit value; `None` only if the product overflows 128 bits.
pub fn sigma_wide(f: &Factorization) -> Option<u128> {
    let mut total = 1u128;
    for &(p, e) in f.factors() {
        let p = p as u128;
        let mut term = 1u128;
        let mut pk = 1u128;
        for _ in 0..e {
            pk = pk.checked_mul(p)?;
            term = term.checked_add(pk)?;
        }
        total = total.checked_mul(term)?;
    }
    Some(total)
}

/// Sum of all divisors, `σ(n) = Π (p^{e+1} - 1)/(p - 1)`.
pub fn sigma(f: &Factorization) -> Result<u64> {
    sigma_wide(f)
        .and_then(|s| u64::try_from(s).ok())
        .ok_or(Error::Overflow("sigma"))
}

/// Sum of proper divisors, `s(n) = σ(n) - n`; `s(1) = 0`.
pub fn aliquot_sum(n: u64) -> Result<u64> {
    let wide = aliquot_sum_wide(n)?;
    u64::try_from(wide).map_err(|_| Error::Overflow("aliquot_sum"))
}

/// `s(n)` without the 64-bit restriction on the result.
pub fn aliquot_sum_wide(n: u64) -> Result<u128> {
    let f = factor(n)?;
    aliquot_sum_of(&f)
}

pub(crate) fn aliquot_sum_of(f: &Factorization) -> Result<u128> {
    let s = sigma_wide(f).ok_or(Error::Overflow("sigma"))?;
    Ok(s - f.n() as u128)
}

/// Number of prime factors counted with multiplicity.
pub fn omega_big(f: &Factorization) -> u32 {
    f.factors().iter().map(|&(_, e)| e).sum()
}

/// Number of distinct prime factors.
pub fn omega(f: &Factorization) -> u32 {
    f.factors().len() as u32
}

/// Distinct primes `p < q` with `p + q = n`, `p` minimal.
pub fn goldbach_partition(n: u64) -> Result<(u64, u64)> {
    if n % 2 == 1 || n < 8 {
        return Err(Error::Domain(format!(
            "distinct-prime partitions need an even n >= 8, got {n}"
        )));
    }
    // p = 2 would leave an even q > 2.
    let mut p = 3u64;
    while 2 * p < n {
        if is_prime(p) && is_prime(n - p) {
            return Ok((p, n - p));
        }
        p = next_prime(p)?;
    }
    Err(Error::Counterexample(n))
}

/// An odd `m = pq` (distinct odd primes) with `s(m) = n`, for odd `n >= 9`.
pub fn odd_witness(n: u64) -> Result<u64> {
    if n.is_multiple_of(2) || n < 9 {
        return Err(Error::Domain(format!("odd witnesses need an odd n >= 9, got {n}")));
    }
    let (p, q) = goldbach_partition(n - 1)?;
    p.checked_mul(q).ok_or(Error::Overflow("odd_witness"))
}

/// Result of checking distinct-prime partitions for every even number in a range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldbachReport {
    pub limit: u64,
    /// Largest minimal `p` seen, with the `n` that needed it.
    pub max_min_p: u64,
    pub max_min_p_at: u64,
}

/// Checks every even `n` in `[8, limit]`. A counterexample is reported as
/// [`Error::Counterexample`].
pub fn verify_goldbach(limit: u64) -> Result<GoldbachReport> {
    if limit < 8 {
        return Err(Error::Domain(format!("limit must be at least 8, got {limit}")));
    }
    let mut report = GoldbachReport { limit, max_min_p: 0, max_min_p_at: 0 };
    let mut n = 8;
    while n <= limit {
        let (p, _) = goldbach_partition(n)?;
        if p > report.max_min_p {
            report.max_min_p = p;
            report.max_min_p_at = n;
        }
        n += 2;
    }
    Ok(report)
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd64(a as u64, b as u64) as u128;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Binary gcd on 64-bit operands.
pub fn gcd64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

pub fn isqrt_wide(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}
