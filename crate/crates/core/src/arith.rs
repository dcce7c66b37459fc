//! Word-size modular arithmetic: primality, residue symbols, primitive roots
//! and discrete logarithms.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A Legendre or quartic residue symbol value in {-1, 0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueSymbol(i8);

impl ResidueSymbol {
    pub const ONE: ResidueSymbol = ResidueSymbol(1);
    pub const MINUS_ONE: ResidueSymbol = ResidueSymbol(-1);
    pub const ZERO: ResidueSymbol = ResidueSymbol(0);

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn from_sign(v: i64) -> ResidueSymbol {
        ResidueSymbol(v.signum() as i8)
    }
}

impl std::ops::Mul for ResidueSymbol {
    type Output = ResidueSymbol;
    fn mul(self, rhs: ResidueSymbol) -> ResidueSymbol {
        ResidueSymbol(self.0 * rhs.0)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn rem_euclid(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Modular inverse by the extended Euclidean algorithm, `None` if not coprime.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "primality needs n >= 2, got {n}"
        )));
    }
    Ok(is_prime_unchecked(n))
}

pub(crate) fn is_prime_unchecked(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn require_prime(l: u64) -> Result<()> {
    if is_prime_unchecked(l) {
        Ok(())
    } else {
        Err(Error::NotPrime(l))
    }
}

fn require_odd_prime(l: u64) -> Result<()> {
    require_prime(l)?;
    if l == 2 {
        return Err(Error::OutOfRange("an odd prime is required, got 2".into()));
    }
    Ok(())
}

/// Legendre symbol `(a / l)` for an odd prime `l`.
pub fn legendre(a: i128, l: u64) -> Result<ResidueSymbol> {
    require_odd_prime(l)?;
    Ok(legendre_unchecked(a, l))
}

pub(crate) fn legendre_unchecked(a: i128, l: u64) -> ResidueSymbol {
    let r = rem_euclid(a, l);
    if r == 0 {
        return ResidueSymbol::ZERO;
    }
    if pow_mod(r, (l - 1) / 2, l) == 1 {
        ResidueSymbol::ONE
    } else {
        ResidueSymbol::MINUS_ONE
    }
}

/// Quartic residue symbol `(z / l)_4` for `l = 2` or `l ≡ 1 (mod 4)`.
///
/// For odd `l` the argument must be a nonzero square mod `l`; for `l = 2`
/// it must satisfy `z ≡ 1 (mod 8)`.
pub fn quartic_symbol(z: i128, l: u64) -> Result<ResidueSymbol> {
    require_prime(l)?;
    if l == 2 {
        if z.rem_euclid(8) != 1 {
            return Err(Error::Precondition(format!(
                "quartic symbol at 2 needs z ≡ 1 mod 8, got {z}"
            )));
        }
        let k = (z - 1).div_euclid(8);
        return Ok(if k.rem_euclid(2) == 0 {
            ResidueSymbol::ONE
        } else {
            ResidueSymbol::MINUS_ONE
        });
    }
    if l % 4 != 1 {
        return Err(Error::Precondition(format!(
            "quartic symbol needs l ≡ 1 mod 4, got {l}"
        )));
    }
    if legendre_unchecked(z, l) != ResidueSymbol::ONE {
        return Err(Error::Precondition(format!(
            "{z} is not a nonzero square mod {l}"
        )));
    }
    let v = pow_mod(rem_euclid(z, l), (l - 1) / 4, l);
    Ok(if v == 1 {
        ResidueSymbol::ONE
    } else {
        ResidueSymbol::MINUS_ONE
    })
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_generator(g: u64, l: u64, factors: &[u64]) -> bool {
    g % l != 0 && factors.iter().all(|&q| pow_mod(g, (l - 1) / q, l) != 1)
}

/// Smallest positive primitive root modulo an odd prime.
pub fn primitive_root(l: u64) -> Result<u64> {
    require_odd_prime(l)?;
    let factors = distinct_prime_factors(l - 1);
    Ok((2..l).find(|&g| is_generator(g, l, &factors)).unwrap_or(1))
}

fn check_dlog_args(base: u64, target: i128, l: u64) -> Result<u64> {
    require_odd_prime(l)?;
    let t = rem_euclid(target, l);
    if t == 0 {
        return Err(Error::ZeroTarget(l));
    }
    if !is_generator(base % l, l, &distinct_prime_factors(l - 1)) {
        return Err(Error::NotGenerator { base, modulus: l });
    }
    Ok(t)
}

/// Discrete logarithm of `target` to a primitive root `base` modulo `l`,
/// in `[0, l-1)`. Uses a linear scan below 10^4 and baby-step giant-step above.
pub fn dlog(base: u64, target: i128, l: u64) -> Result<u64> {
    let t = check_dlog_args(base, target, l)?;
    Ok(if l < 10_000 {
        linear_scan(base % l, t, l)
    } else {
        bsgs(base % l, t, l)
    })
}

/// Linear-scan discrete log; same contract as [`dlog`].
pub fn dlog_linear(base: u64, target: i128, l: u64) -> Result<u64> {
    let t = check_dlog_args(base, target, l)?;
    Ok(linear_scan(base % l, t, l))
}

/// Baby-step giant-step discrete log; same contract as [`dlog`].
pub fn dlog_bsgs(base: u64, target: i128, l: u64) -> Result<u64> {
    let t = check_dlog_args(base, target, l)?;
    Ok(bsgs(base % l, t, l))
}

fn linear_scan(g: u64, t: u64, l: u64) -> u64 {
    let mut acc = 1u64;
    for x in 0..l - 1 {
        if acc == t {
            return x;
        }
        acc = mul_mod(acc, g, l);
    }
    unreachable!("generator must reach every unit")
}

fn bsgs(g: u64, t: u64, l: u64) -> u64 {
    let order = l - 1;
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = HashMap::with_capacity(m as usize);
    let mut e = 1u64;
    for j in 0..m {
        table.entry(e).or_insert(j);
        e = mul_mod(e, g, l);
    }
    // giant step multiplies by g^{-m}
    let factor = pow_mod(inv_mod(g, l).expect("unit"), m, l);
    let mut gamma = t;
    for i in 0..=m {
        if let Some(&j) = table.get(&gamma) {
            return (i * m + j) % order;
        }
        gamma = mul_mod(gamma, factor, l);
    }
    unreachable!("generator must reach every unit")
}

/// A square root of `a` modulo an odd prime (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: i128, l: u64) -> Option<u64> {
    let a = rem_euclid(a, l);
    if l == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (l - 1) / 2, l) != 1 {
        return None;
    }
    let s = (l - 1).trailing_zeros();
    let q = (l - 1) >> s;
    let mut z = 2u64;
    while pow_mod(z, (l - 1) / 2, l) != l - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, l);
    let mut t = pow_mod(a, q, l);
    let mut r = pow_mod(a, (q + 1) / 2, l);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, l);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), l);
        m = i;
        c = mul_mod(b, b, l);
        t = mul_mod(t, c, l);
        r = mul_mod(r, b, l);
    }
    Some(r)
}

/// Kronecker symbol `(D / n)` for a discriminant `D` and `n > 0`.
pub fn kronecker(d: i64, n: u64) -> i8 {
    let mut n = n;
    let mut result: i8 = 1;
    while n % 2 == 0 {
        n /= 2;
        let r = d.rem_euclid(8);
        match r {
            0 | 2 | 4 | 6 => return 0,
            1 | 7 => {}
            _ => result = -result,
        }
    }
    result * jacobi(d as i128, n)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i8 {
    if n == 1 {
        return 1;
    }
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Primes in `[lo, hi]` by a simple sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| sieve[k])
        .map(|k| k as u64)
        .collect()
}
