//! The inverse image `s⁻¹({n})` of an even number under the aliquot sum.
//!
//! Odd preimages are squares `a²p^{2k}` and are found by solving for the
//! largest prime `p` with `a` and `k` fixed. Even preimages `m = ab` are found
//! by recursing over the smooth part `a`, starting from `a = 2^k`, and
//! treating
//!
//! ```text
//! n = σ(a)·s(b) + s(a)·b
//! ```
//!
//! as a linear Diophantine equation in `(s(b), b)`. The recursion extends `a`
//! by powers of the next candidate least prime `p1` of `b` until the window
//! of admissible `(s(b), b)` lattice points is small enough to test directly,
//! or until `b` is forced to be a product of two primes.

mod bruteforce;
mod frame;

pub use bruteforce::{s_inverse_bruteforce, BruteForceOracle, DEFAULT_ORACLE_CEILING};
pub use frame::{RecursionFrame, Window};

use serde::{Deserialize, Serialize};

use crate::arith::{self, factor, is_prime, sigma_wide, Factorization};
use crate::error::{Error, Result};

/// Which branch of the search produced a preimage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Odd `m = a²p^{2k}`.
    OddSquare,
    /// `m = a·p` from the linear shortcut.
    BPrime,
    /// `m = a·p²` from the quadratic shortcut.
    BPrimeSquare,
    /// `m = a·p·q` from factoring `(au + nv)/g`.
    BSemiprime,
    /// `m = a·b` found by testing every lattice candidate in a small window.
    BaseEnumeration,
    /// `m = a·p1^k` with `k >= 3`, reached directly by the recursion.
    PrimePowerTail,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::OddSquare => "odd-square",
            Provenance::BPrime => "b-prime",
            Provenance::BPrimeSquare => "b-prime-square",
            Provenance::BSemiprime => "b-semiprime",
            Provenance::BaseEnumeration => "base-enumeration",
            Provenance::PrimePowerTail => "prime-power-tail",
        }
    }
}

/// A preimage together with the branch that found it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preimage {
    pub m: u128,
    pub provenance: Provenance,
}

/// The sorted set `{m : s(m) = n}` for an even `n`.
///
/// Odd preimages can be as large as `(n - 1)²`, so values are 128-bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseImage {
    pub n: u64,
    pub preimages: Vec<Preimage>,
}

impl InverseImage {
    pub fn values(&self) -> Vec<u128> {
        self.preimages.iter().map(|p| p.m).collect()
    }

    pub fn len(&self) -> usize {
        self.preimages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preimages.is_empty()
    }

    /// Even preimages; they never exceed `2n`.
    pub fn even(&self) -> impl Iterator<Item = u64> + '_ {
        self.preimages.iter().filter(|p| p.m % 2 == 0).map(|p| p.m as u64)
    }

    pub fn odd(&self) -> impl Iterator<Item = u128> + '_ {
        self.preimages.iter().filter(|p| p.m % 2 == 1).map(|p| p.m)
    }
}

/// A lattice window in which the recursion tested every candidate `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseCaseHit {
    pub a: u64,
    pub b: u64,
    pub s_b: u64,
    pub window: Window,
}

/// Collects preimages, plus the base-case windows when tracing.
#[derive(Debug, Default)]
pub(crate) struct Accumulator {
    pub found: Vec<Preimage>,
    pub trace: Option<Vec<BaseCaseHit>>,
}

impl Accumulator {
    fn push(&mut self, m: u128, provenance: Provenance) {
        self.found.push(Preimage { m, provenance });
    }
}

fn check_even_target(n: u64) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Domain(format!("s_inverse needs an even n >= 2, got {n}")));
    }
    Ok(())
}

/// Computes `s⁻¹({n})` for even `n`.
pub fn s_inverse(n: u64) -> Result<InverseImage> {
    run(n, false).map(|(image, _)| image)
}

/// Like [`s_inverse`], also returning every base-case hit with its window.
#[doc(hidden)]
pub fn s_inverse_traced(n: u64) -> Result<(InverseImage, Vec<BaseCaseHit>)> {
    run(n, true)
}

fn run(n: u64, trace: bool) -> Result<(InverseImage, Vec<BaseCaseHit>)> {
    check_even_target(n)?;
    let mut acc = Accumulator {
        found: Vec::new(),
        trace: trace.then(Vec::new),
    };
    for m in odd_preimages(n)? {
        acc.push(m, Provenance::OddSquare);
    }
    let mut k = 1;
    while k < 64 && (1u64 << k) < n {
        let a = 1u64 << k;
        let sigma_a = (1u128 << (k + 1)) - 1;
        let s_a = (1u128 << k) - 1;
        frame::recurse(n, a, sigma_a, s_a, 2, &mut acc)?;
        k += 1;
    }
    let mut preimages = acc.found;
    preimages.sort_unstable_by_key(|p| p.m);
    if let Some(w) = preimages.windows(2).find(|w| w[0].m == w[1].m) {
        return Err(Error::Internal(format!(
            "preimage {} of {n} found twice ({} and {})",
            w[0].m,
            w[0].provenance.as_str(),
            w[1].provenance.as_str()
        )));
    }
    Ok((InverseImage { n, preimages }, acc.trace.unwrap_or_default()))
}

/// All odd `m` with `s(m) = n`, ascending.
pub fn odd_preimages(n: u64) -> Result<Vec<u128>> {
    check_even_target(n)?;
    let target = n as u128;
    let mut out = Vec::new();
    let mut a = 1u64;
    // For a >= 3 the largest prime is at least 5, so n > σ(a²)·6 > 6a².
    while a == 1 || 6 * (a as u128) * (a as u128) <= target {
        let fa = factor(a)?;
        let q = fa.largest_prime().map_or(3, |p| p + 2);
        let a2 = Factorization::from_factors(fa.factors().iter().map(|&(p, e)| (p, 2 * e)).collect())?;
        let sigma_a2 = sigma_wide(&a2).ok_or(Error::Overflow("sigma(a^2)"))?;
        let s_a2 = sigma_a2 - a2.n() as u128;
        let limit = target / sigma_a2;
        let mut k = 1u32;
        while pow_le(q as u128, 2 * k - 1, limit) {
            let hi = iroot(limit, 2 * k - 1);
            if let Some(p) = solve_odd(target, s_a2, sigma_a2, k, q as u128, hi) {
                if p <= u64::MAX as u128 && is_prime(p as u64) && !a.is_multiple_of(p as u64) {
                    let m = (a2.n() as u128)
                        .checked_mul(p.checked_pow(2 * k).ok_or(Error::Overflow("odd preimage"))?)
                        .ok_or(Error::Overflow("odd preimage"))?;
                    out.push(m);
                }
            }
            k += 1;
        }
        a += 2;
    }
    out.sort_unstable();
    Ok(out)
}

/// `s(a²)p^{2k} + σ(a²)(1 + p + … + p^{2k-1})`, saturating.
fn odd_lhs(s_a2: u128, sigma_a2: u128, p: u128, k: u32) -> u128 {
    let mut geometric = 0u128;
    let mut pk = 1u128;
    for _ in 0..2 * k {
        geometric = geometric.saturating_add(pk);
        pk = pk.saturating_mul(p);
    }
    s_a2.saturating_mul(pk).saturating_add(sigma_a2.saturating_mul(geometric))
}

/// Binary search for integral `p` in `[lo, hi]` with `odd_lhs(p) = n`.
fn solve_odd(n: u128, s_a2: u128, sigma_a2: u128, k: u32, lo: u128, hi: u128) -> Option<u128> {
    let (mut lo, mut hi) = (lo, hi);
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match odd_lhs(s_a2, sigma_a2, mid, k).cmp(&n) {
            std::cmp::Ordering::Equal => return Some(mid),
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => {
                if mid == 0 {
                    return None;
                }
                hi = mid - 1;
            }
        }
    }
    None
}

/// `base^exp <= limit`, without overflow.
pub(crate) fn pow_le(base: u128, exp: u32, limit: u128) -> bool {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) if v <= limit => v,
            _ => return false,
        };
    }
    acc <= limit
}

/// Largest `r` with `r^exp <= n`.
pub(crate) fn iroot(n: u128, exp: u32) -> u128 {
    if exp == 1 {
        return n;
    }
    if exp == 2 {
        return arith::isqrt_wide(n);
    }
    let mut r = (n as f64).powf(1.0 / exp as f64) as u128;
    while r > 0 && !pow_le(r, exp, n) {
        r -= 1;
    }
    while pow_le(r + 1, exp, n) {
        r += 1;
    }
    r
}

/// Runs the even recursion for one seed `a` (even), returning the preimages
/// `m = ab` whose cofactor `b > 1` has every prime above `a`'s largest prime.
pub fn even_recursion(n: u64, a: u64) -> Result<Vec<Preimage>> {
    check_even_target(n)?;
    if a == 0 || a % 2 == 1 {
        return Err(Error::Domain(format!("recursion seed must be even, got {a}")));
    }
    let fa = factor(a)?;
    let sigma_a = sigma_wide(&fa).ok_or(Error::Overflow("sigma(a)"))?;
    let s_a = sigma_a - a as u128;
    let largest = fa.largest_prime().unwrap_or(2);
    let mut acc = Accumulator::default();
    frame::recurse(n, a, sigma_a, s_a, largest, &mut acc)?;
    acc.found.sort_unstable_by_key(|p| p.m);
    Ok(acc.found)
}

/// The semiprime cofactors `b = pq` for one frame, with `p < q` primes `>= p1`.
pub fn semiprime_shortcut(frame: &RecursionFrame, p1: u64) -> Result<Vec<u128>> {
    let mut acc = Accumulator::default();
    frame.semiprime(p1, &mut acc)?;
    let mut out: Vec<u128> = acc.found.into_iter().map(|p| p.m).collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(n: u64) -> Vec<u128> {
        s_inverse(n).unwrap().values()
    }

    #[test]
    fn examples() {
        assert_eq!(values(28), vec![28]);
        assert_eq!(values(2), Vec::<u128>::new());
        assert_eq!(values(16), vec![12, 26]);
        assert_eq!(values(6), vec![6, 25]);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(s_inverse(0), Err(Error::Domain(_))));
        assert!(matches!(s_inverse(5), Err(Error::Domain(_))));
        assert!(matches!(odd_preimages(7), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_branch_examples() {
        assert_eq!(odd_preimages(4).unwrap(), vec![9]);
        assert_eq!(odd_preimages(8).unwrap(), vec![49]);
        assert_eq!(odd_preimages(16).unwrap(), Vec::<u128>::new());
    }

    #[test]
    fn recursion_frame_examples() {
        let from_two: Vec<u128> = even_recursion(16, 2).unwrap().iter().map(|p| p.m).collect();
        assert_eq!(from_two, vec![26]);
        let from_four = even_recursion(16, 4).unwrap();
        assert_eq!(from_four.len(), 1);
        assert_eq!(from_four[0].m, 12);
        assert_eq!(from_four[0].provenance, Provenance::BPrime);
        assert!(even_recursion(2, 2).unwrap().is_empty());
    }

    #[test]
    fn provenance_tags() {
        let img = s_inverse(16).unwrap();
        assert!(img.preimages.iter().all(|p| p.provenance == Provenance::BPrime));
        let img = s_inverse(6).unwrap();
        assert_eq!(img.preimages[1], Preimage { m: 25, provenance: Provenance::OddSquare });
    }

    #[test]
    fn large_odd_preimage_exceeds_64_bits() {
        // 10^12 + 39 is prime, so (10^12 + 39)² maps to 10^12 + 40.
        let p = 1_000_000_000_039u64;
        assert!(is_prime(p));
        let img = odd_preimages(p + 1).unwrap();
        assert!(img.contains(&((p as u128) * (p as u128))));
    }

    #[test]
    fn iroot_and_pow_le() {
        assert_eq!(iroot(1000, 3), 10);
        assert_eq!(iroot(999, 3), 9);
        assert_eq!(iroot(u64::MAX as u128, 5), 7131);
        assert!(pow_le(3, 3, 27));
        assert!(!pow_le(3, 3, 26));
        assert!(!pow_le(u128::MAX, 2, u128::MAX));
    }
}
