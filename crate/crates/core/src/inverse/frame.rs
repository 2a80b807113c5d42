use crate::arith::{divisors_wide, factor, factor_wide, gcd, is_prime, next_prime, FactorConfig};
use crate::error::{Error, Result};

use super::{Accumulator, BaseCaseHit, Provenance};

/// State of one call of the even recursion: the smooth part `a` of `m = ab`
/// and a particular solution of `u·s(b) + v·b = n/g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionFrame {
    pub n: u64,
    pub a: u64,
    pub sigma_a: u128,
    pub s_a: u128,
    pub largest_prime_of_a: u64,
    pub g: u128,
    pub u: u128,
    pub v: u128,
    pub x0: i128,
    pub y0: i128,
}

/// Bounds on `(s(b), b)` once every prime of `b` is known to be `>= p1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub p1: u64,
    /// Smallest prime above `p1`.
    pub p1_next: u64,
    pub b1: u128,
    pub b2: u128,
    pub s1: u128,
    pub s2: u128,
    /// Upper bound on `Ω(b)`.
    pub k: u32,
    /// Lattice parameters `r` with `(x0 + rv, y0 - ru)` inside the window.
    pub r_lo: i128,
    pub r_hi: i128,
}

impl Window {
    pub fn count(&self) -> i128 {
        (self.r_hi - self.r_lo + 1).max(0)
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Inverse of `u` modulo `v` for coprime `u`, `v`.
fn mod_inverse(u: u128, v: u128) -> u128 {
    if v <= i64::MAX as u128 {
        let (mut old_r, mut r) = ((u % v) as i64, v as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        return old_s.rem_euclid(v as i64) as u128;
    }
    let (mut old_r, mut r) = (u as i128 % v as i128, v as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(v as i128) as u128
}

fn overflow(what: &'static str) -> Error {
    Error::Overflow(what)
}

impl RecursionFrame {
    /// Builds the frame for smooth part `a`; `None` when `gcd(σ(a), s(a))`
    /// does not divide `n`, in which case no `b` can work.
    pub fn new(n: u64, a: u64, sigma_a: u128, s_a: u128, largest_prime_of_a: u64) -> Result<Option<Self>> {
        let g = gcd(sigma_a, s_a);
        if !(n as u128).is_multiple_of(g) {
            return Ok(None);
        }
        let (u, v) = (sigma_a / g, s_a / g);
        let target = n as u128 / g;
        let x0 = if v == 1 {
            0
        } else {
            let inv = mod_inverse(u, v);
            (target % v).checked_mul(inv).ok_or(overflow("lattice solution"))? % v
        };
        let ux0 = u.checked_mul(x0).ok_or(overflow("lattice solution"))?;
        let y0 = (target as i128 - ux0 as i128) / v as i128;
        debug_assert_eq!((target as i128 - ux0 as i128) % v as i128, 0);
        Ok(Some(RecursionFrame {
            n,
            a,
            sigma_a,
            s_a,
            largest_prime_of_a,
            g,
            u,
            v,
            x0: x0 as i128,
            y0,
        }))
    }

    fn empty_window(&self, p1: u64, p1_next: u64, b1: u128, s1: u128) -> Window {
        Window { p1, p1_next, b1, b2: 0, s1, s2: 0, k: 0, r_lo: 1, r_hi: 0 }
    }

    /// The window `[s1, s2] × [b1, b2]` for candidate least prime `p1`.
    /// `b2` and `s2` are rounded up.
    pub fn window(&self, p1: u64) -> Result<Window> {
        let n = self.n as u128;
        let p1_next = next_prime(p1)?;
        let s1 = 1 + p1 as u128 + p1_next as u128;
        let b1 = p1 as u128 * p1_next as u128;
        let reserved = match self.sigma_a.checked_mul(s1) {
            Some(r) if r < n => r,
            _ => return Ok(self.empty_window(p1, p1_next, b1, s1)),
        };
        let b2 = (n - reserved).div_ceil(self.s_a);
        let mut k = 0u32;
        let mut pk = p1 as u128;
        while pk <= b2 {
            k += 1;
            pk = match pk.checked_mul(p1 as u128) {
                Some(v) => v,
                None => break,
            };
        }
        if k == 0 {
            return Ok(self.empty_window(p1, p1_next, b1, s1));
        }
        let k128 = k as u128;
        let denom = k128 * self.sigma_a + p1 as u128 * self.s_a;
        let s2 = (k128 * n).div_ceil(denom);

        let (u, v) = (self.u as i128, self.v as i128);
        let (s1i, s2i, b1i, b2i) = (s1 as i128, s2 as i128, b1 as i128, b2 as i128);
        let r_lo = div_ceil(s1i - self.x0, v).max(div_ceil(self.y0 - b2i, u));
        let r_hi = div_floor(s2i - self.x0, v).min(div_floor(self.y0 - b1i, u));
        Ok(Window { p1, p1_next, b1, b2, s1, s2, k, r_lo, r_hi })
    }

    /// `b = p` and `b = p²` for a prime `p` above `a`'s largest prime.
    pub(crate) fn shortcuts(&self, acc: &mut Accumulator) -> Result<()> {
        let n = self.n as u128;
        if n <= self.sigma_a {
            return Ok(());
        }
        let rest = n - self.sigma_a;
        // b = p: n = σ(a) + s(a)·p
        if rest.is_multiple_of(self.s_a) {
            let p = rest / self.s_a;
            if p > self.largest_prime_of_a as u128 && p <= u64::MAX as u128 && is_prime(p as u64) {
                acc.push(self.a as u128 * p, Provenance::BPrime);
            }
        }
        // b = p²: n = σ(a)·(1 + p) + s(a)·p², increasing in p
        let f = |p: u128| {
            self.s_a
                .saturating_mul(p.saturating_mul(p))
                .saturating_add(self.sigma_a.saturating_mul(p + 1))
        };
        let (mut lo, mut hi) = (self.largest_prime_of_a as u128 + 1, crate::arith::isqrt_wide(n) + 1);
        while lo <= hi {
            let mid = lo + (hi - lo) / 2;
            match f(mid).cmp(&n) {
                std::cmp::Ordering::Equal => {
                    if mid <= u64::MAX as u128 && is_prime(mid as u64) {
                        acc.push(self.a as u128 * mid * mid, Provenance::BPrimeSquare);
                    }
                    break;
                }
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid - 1,
            }
        }
        Ok(())
    }

    /// Tests every lattice candidate in the window.
    pub(crate) fn base_case(&self, w: &Window, acc: &mut Accumulator) -> Result<()> {
        for r in w.r_lo..=w.r_hi {
            let b = self.y0 - r * self.u as i128;
            let x = self.x0 + r * self.v as i128;
            debug_assert!(b >= w.b1 as i128 && b <= w.b2 as i128);
            let b = b as u64;
            if !smallest_prime_at_least(b, w.p1) {
                continue;
            }
            let fb = factor(b)?;
            if fb.smallest_prime().is_some_and(|p| p < w.p1) {
                continue;
            }
            // b = p and b = p² belong to the shortcuts.
            if let [(_, e)] = fb.factors() {
                if *e <= 2 {
                    continue;
                }
            }
            let s_b = crate::arith::aliquot_sum_of(&fb)?;
            if s_b as i128 == x {
                acc.push(self.a as u128 * b as u128, Provenance::BaseEnumeration);
                if let Some(trace) = acc.trace.as_mut() {
                    trace.push(BaseCaseHit { a: self.a, b, s_b: s_b as u64, window: *w });
                }
            }
        }
        Ok(())
    }

    /// `b = pq` with `p < q` primes `>= p1`, via the factorization of
    /// `N = (au + nv)/g = (vp + u)(vq + u)`.
    pub(crate) fn semiprime(&self, p1: u64, acc: &mut Accumulator) -> Result<()> {
        let (u, v) = (self.u, self.v);
        let numer = (self.a as u128)
            .checked_mul(u)
            .and_then(|au| (self.n as u128).checked_mul(v).and_then(|nv| au.checked_add(nv)))
            .ok_or(overflow("semiprime shortcut"))?;
        if numer % self.g != 0 {
            return Err(Error::Internal(format!(
                "(au + nv) = {numer} not divisible by g = {} for a = {}, n = {}",
                self.g, self.a, self.n
            )));
        }
        let big_n = numer / self.g;
        let factors = factor_wide(big_n, &FactorConfig::default())?;
        let target = u % v;
        for d in divisors_wide(&factors) {
            match d.checked_mul(d) {
                Some(sq) if sq < big_n => {}
                _ => break,
            }
            if d <= u || d % v != target {
                continue;
            }
            let e = big_n / d;
            if !(e - u).is_multiple_of(v) {
                continue;
            }
            let (p, q) = ((d - u) / v, (e - u) / v);
            if p < p1 as u128 || q > u64::MAX as u128 || !is_prime(p as u64) || !is_prime(q as u64) {
                continue;
            }
            let m = (self.a as u128)
                .checked_mul(p * q)
                .ok_or(overflow("semiprime shortcut"))?;
            acc.push(m, Provenance::BSemiprime);
        }
        Ok(())
    }

    /// `s(a·p^3) > n`, which leaves only `b` with at most two prime factors.
    fn cube_exceeds(&self, p1: u64) -> bool {
        let p = p1 as u128;
        let sigma_p3 = 1 + p + p * p + p * p * p;
        match (self.sigma_a.checked_mul(sigma_p3), (self.a as u128).checked_mul(p * p * p)) {
            (Some(sig), Some(t)) => sig - t > self.n as u128,
            _ => true,
        }
    }
}

/// Rejects `b` with a prime factor below `p1` among the cheap trial primes.
fn smallest_prime_at_least(b: u64, p1: u64) -> bool {
    for &p in crate::arith::small_primes().as_slice() {
        let p = p as u64;
        if p >= p1 || p > 97 {
            break;
        }
        if b.is_multiple_of(p) {
            return false;
        }
    }
    true
}

pub(crate) fn recurse(
    n: u64,
    a: u64,
    sigma_a: u128,
    s_a: u128,
    largest: u64,
    acc: &mut Accumulator,
) -> Result<()> {
    let Some(frame) = RecursionFrame::new(n, a, sigma_a, s_a, largest)? else {
        return Ok(());
    };
    frame.shortcuts(acc)?;
    let target = n as u128;
    let mut p1 = next_prime(largest)?;
    loop {
        let w = frame.window(p1)?;
        if w.count() < p1 as i128 {
            return frame.base_case(&w, acc);
        }
        if frame.cube_exceeds(p1) {
            return frame.semiprime(p1, acc);
        }
        let p = p1 as u128;
        let mut pk = 1u128;
        let mut sigma_pk = 1u128;
        for k in 1.. {
            pk *= p;
            sigma_pk += pk;
            let t = a as u128 * pk;
            // s(t) >= t/2, so t > 2n cannot map to n.
            if t > 2 * target {
                break;
            }
            let sigma_t = sigma_a * sigma_pk;
            let s_t = sigma_t - t;
            if s_t > target {
                break;
            }
            if s_t < target {
                recurse(n, t as u64, sigma_t, s_t, p1, acc)?;
            } else if k >= 3 {
                acc.push(t, Provenance::PrimePowerTail);
            }
        }
        p1 = w.p1_next;
    }
}
