//! Binomial coefficients modulo a prime.
//!
//! `C(l, j) mod p` is never materialized as an integer: Lucas' theorem works
//! digit by digit in base `p`, and the Pascal oracle stays reduced mod `p`.

use crate::error::{Error, Result};
use crate::finite_field::is_prime;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidCharacteristic(p))
    }
}

/// `C(a, b) mod p` for single base-p digits `a, b < p`.
fn small_binom(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * mod_pow(den, p - 2, p) % p
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// `C(l, j) mod p` via Lucas' theorem; zero when `j > l`.
pub fn binom_mod_p(l: u64, j: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    Ok(lucas(l, j, p))
}

/// Lucas without the primality check, for callers that validated `p`.
#[inline]
pub(crate) fn lucas(mut l: u64, mut j: u64, p: u64) -> u64 {
    if j > l {
        return 0;
    }
    let mut acc = 1u64;
    while j > 0 {
        let (ld, jd) = (l % p, j % p);
        if jd > ld {
            return 0;
        }
        acc = acc * small_binom(ld, jd, p) % p;
        l /= p;
        j /= p;
    }
    acc
}

/// Whether `p` divides `C(l, j)` (`true` also when `j > l`).
#[inline]
pub(crate) fn vanishes(l: u64, j: u64, p: u64) -> bool {
    lucas(l, j, p) == 0
}

/// `C(l, j) mod p` by the additive recurrence `C(l,j) = C(l-1,j-1) + C(l-1,j)`.
///
/// Independent of Lucas; costs `O(l * j)`.
pub fn binom_pascal_oracle(l: u64, j: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    if j > l {
        return Ok(0);
    }
    let width = j as usize + 1;
    let mut row = vec![0u64; width];
    row[0] = 1;
    for n in 1..=l as usize {
        for c in (1..width.min(n + 1)).rev() {
            row[c] = (row[c] + row[c - 1]) % p;
        }
    }
    Ok(row[j as usize])
}

/// Rows `0..=max_l` of Pascal's triangle mod `p`, built by the same recurrence.
pub fn pascal_triangle_mod_p(max_l: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    check_prime(p)?;
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_l + 1);
    rows.push(vec![1]);
    for l in 1..=max_l {
        let prev = &rows[l - 1];
        let mut row = vec![1u64; l + 1];
        for j in 1..l {
            row[j] = (prev[j - 1] + prev[j]) % p;
        }
        rows.push(row);
    }
    Ok(rows)
}
