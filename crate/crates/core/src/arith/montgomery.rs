//! Montgomery arithmetic modulo odd 64-bit and 128-bit integers.
//!
//! Residues are kept in `[0, n)`. The reduction subtracts the high half of
//! `m * n` rather than adding it, so every odd modulus of the full width is
//! supported without an extra carry bit.

#[derive(Clone, Copy, Debug)]
pub struct Mont64 {
    pub n: u64,
    ninv: u64,
    r2: u64,
}

impl Mont64 {
    pub fn new(n: u64) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        // Newton iteration doubles the number of correct low bits each step.
        let mut ninv = n;
        for _ in 0..5 {
            ninv = ninv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(ninv)));
        }
        let r = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r as u128 * r as u128) % n as u128) as u64;
        Mont64 { n, ninv, r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let mn_hi = ((m as u128 * self.n as u128) >> 64) as u64;
        let t_hi = (t >> 64) as u64;
        if t_hi >= mn_hi {
            t_hi - mn_hi
        } else {
            t_hi.wrapping_add(self.n).wrapping_sub(mn_hi)
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn to_mont(self, x: u64) -> u64 {
        self.mul(x % self.n, self.r2)
    }

    #[inline]
    #[cfg(test)]
    pub fn out_of_mont(self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }
}

/// Full 256-bit product of two `u128` values as `(high, low)`.
#[inline]
pub fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a0, a1) = (a & MASK, a >> 64);
    let (b0, b1) = (b & MASK, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// `a * b mod n` by shift-and-add; only used during setup.
fn mulmod_slow(mut a: u128, mut b: u128, n: u128) -> u128 {
    a %= n;
    b %= n;
    let mut result = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            result = addmod(result, a, n);
        }
        a = addmod(a, a, n);
        b >>= 1;
    }
    result
}

#[inline]
fn addmod(a: u128, b: u128, n: u128) -> u128 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Mont128 {
    pub n: u128,
    ninv: u128,
    r2: u128,
}

impl Mont128 {
    pub fn new(n: u128) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        let mut ninv = n;
        for _ in 0..6 {
            ninv = ninv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(ninv)));
        }
        let r = (u128::MAX % n + 1) % n;
        let r2 = mulmod_slow(r, r, n);
        Mont128 { n, ninv, r2 }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.ninv);
        let (mn_hi, _) = mul_wide(m, self.n);
        if hi >= mn_hi {
            hi - mn_hi
        } else {
            hi.wrapping_add(self.n).wrapping_sub(mn_hi)
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    pub fn to_mont(self, x: u128) -> u128 {
        self.mul(x % self.n, self.r2)
    }

    #[cfg(test)]
    pub fn out_of_mont(self, x: u128) -> u128 {
        self.redc(0, x)
    }

    pub fn one(&self) -> u128 {
        self.to_mont(1)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        addmod(a, b, self.n)
    }

    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut result = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }
}
