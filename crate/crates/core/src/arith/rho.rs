//! Pollard rho, Brent's cycle-finding variant, batching gcds over
//! Montgomery products.

use super::montgomery::{Mont128, Mont64};

const BATCH: u64 = 128;

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Tries to split an odd composite `n` using the map `x -> x^2 + c`.
/// Returns a proper divisor, or `None` if the walk collapsed or the
/// iteration budget ran out.
pub fn rho64(n: u64, c: u64, max_iters: u64) -> Option<u64> {
    let mont = Mont64::new(n);
    let c = mont.to_mont(c);
    let f = |x: u64| mont.add(mont.mul(x, x), c);
    let mut y = mont.to_mont(2);
    let mut x = y;
    let mut ys = y;
    let mut q = mont.one();
    let mut g = 1;
    let mut r = 1u64;
    let mut iters = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let m = BATCH.min(r - k);
            for _ in 0..m {
                y = f(y);
                q = mont.mul(q, x.abs_diff(y));
            }
            g = gcd64(q, n);
            k += m;
        }
        iters += r;
        r *= 2;
        if g == 1 && iters > max_iters {
            return None;
        }
    }
    if g == n {
        // The batch overshot; replay it one step at a time.
        loop {
            ys = f(ys);
            g = gcd64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

pub fn rho128(n: u128, c: u128, max_iters: u64) -> Option<u128> {
    let mont = Mont128::new(n);
    let c = mont.to_mont(c);
    let f = |x: u128| mont.add(mont.mul(x, x), c);
    let mut y = mont.to_mont(2);
    let mut x = y;
    let mut ys = y;
    let mut q = mont.one();
    let mut g = 1;
    let mut r = 1u64;
    let mut iters = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let m = BATCH.min(r - k);
            for _ in 0..m {
                y = f(y);
                q = mont.mul(q, x.abs_diff(y));
            }
            g = gcd128(q, n);
            k += m;
        }
        iters += r;
        r *= 2;
        if g == 1 && iters > max_iters {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd128(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}
