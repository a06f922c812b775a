//! Small exact-integer helpers shared by the lattice and spectrum code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Returns `(g, s, t)` with `s*a + t*b = g` and `g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// `n choose 2` for any integer `n`, i.e. `n(n-1)/2`.
pub fn choose2(n: &BigInt) -> BigInt {
    (n * (n - 1u32)) / 2u32
}

/// Reduces `a` into `[0, m)`; `m` must be positive.
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// `true` when `d` divides `a`. Zero divides only zero.
pub fn divides(d: &BigInt, a: &BigInt) -> bool {
    if d.is_zero() {
        a.is_zero()
    } else {
        (a % d).is_zero()
    }
}

/// Positive divisors of `n` in increasing order, or `None` when `n` does not fit in a `u64`.
pub fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n == 0 {
        return Some(Vec::new());
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Some(small)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn ext_gcd_bezout() {
        for (x, y) in [(12, 18), (-7, 3), (0, 5), (5, 0), (0, 0), (9, -21), (-4, -6)] {
            let (g, s, t) = ext_gcd(&b(x), &b(y));
            assert!(!g.is_negative());
            assert_eq!(&s * b(x) + &t * b(y), g);
            assert_eq!(g, b(x).gcd(&b(y)));
        }
    }

    #[test]
    fn choose2_negative() {
        assert_eq!(choose2(&b(-1)), b(1));
        assert_eq!(choose2(&b(4)), b(6));
        assert_eq!(choose2(&b(0)), b(0));
    }

    #[test]
    fn divisor_listing() {
        assert_eq!(divisors(&b(12)).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&b(1)).unwrap(), vec![1]);
        assert_eq!(divisors(&b(49)).unwrap(), vec![1, 7, 49]);
    }
}
