//! Fixed-precision p-adic integers and the cyclotomic discrete logarithm.

use crate::arith::require_prime;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Moduli are kept below this bound so that sums never overflow `u128`.
const MODULUS_CAP: u128 = 1 << 125;

/// Default number of p-adic digits.
pub const DEFAULT_PRECISION: u32 = 64;

/// Largest precision `N` with `p^N` below the internal modulus cap.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut m: u128 = 1;
    while m.checked_mul(p as u128).is_some_and(|v| v < MODULUS_CAP) {
        m *= p as u128;
        n += 1;
    }
    n
}

/// The default precision for `p`, lowered when `p^64` would not fit.
pub fn default_precision(p: u64) -> u32 {
    DEFAULT_PRECISION.min(max_precision(p).saturating_sub(2))
}

pub(crate) fn pow_u128(p: u64, n: u32) -> Result<u128> {
    let mut m: u128 = 1;
    for _ in 0..n {
        m = m
            .checked_mul(p as u128)
            .filter(|&v| v < MODULUS_CAP)
            .ok_or_else(|| Error::OutOfRange(format!("{p}^{n} exceeds the supported modulus")))?;
    }
    Ok(m)
}

pub(crate) fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let mut a = a % m;
    let mut b = b % m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}

/// An element of `Z_p / p^N Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    p: u64,
    value: u128,
    precision: u32,
}

impl PadicInt {
    pub fn new(p: u64, value: i128, precision: u32) -> Result<PadicInt> {
        require_prime(p)?;
        let m = pow_u128(p, precision)?;
        let v = if value >= 0 {
            (value as u128) % m
        } else {
            let r = value.unsigned_abs() % m;
            if r == 0 {
                0
            } else {
                m - r
            }
        };
        Ok(PadicInt {
            p,
            value: v,
            precision,
        })
    }

    pub fn zero(p: u64, precision: u32) -> Result<PadicInt> {
        PadicInt::new(p, 0, precision)
    }

    pub fn one(p: u64, precision: u32) -> Result<PadicInt> {
        PadicInt::new(p, 1, precision)
    }

    fn raw(p: u64, value: u128, precision: u32) -> PadicInt {
        PadicInt {
            p,
            value,
            precision,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Canonical representative in `[0, p^N)`.
    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn modulus(&self) -> u128 {
        pow_u128(self.p, self.precision).expect("validated at construction")
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn signed_value(&self) -> i128 {
        let m = self.modulus();
        if self.value > m / 2 {
            -((m - self.value) as i128)
        } else {
            self.value as i128
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// p-adic valuation, `None` for zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = self.value;
        while x % self.p as u128 == 0 {
            x /= self.p as u128;
            v += 1;
        }
        Some(v)
    }

    /// Reduction to a lower precision.
    pub fn reduce(&self, precision: u32) -> PadicInt {
        let n = precision.min(self.precision);
        let m = pow_u128(self.p, n).expect("smaller than an existing modulus");
        PadicInt::raw(self.p, self.value % m, n)
    }

    /// Residue modulo `p^k` for `k` up to the precision.
    pub fn residue(&self, k: u32) -> u128 {
        self.reduce(k).value
    }

    fn align(&self, other: &PadicInt) -> Result<(u128, u128, u32, u128)> {
        if self.p != other.p {
            return Err(Error::MixedPrimes(self.p, other.p));
        }
        let n = self.precision.min(other.precision);
        let m = pow_u128(self.p, n).expect("bounded by operands");
        Ok((self.value % m, other.value % m, n, m))
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        let (a, b, n, m) = self.align(other)?;
        Ok(PadicInt::raw(self.p, (a + b) % m, n))
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        let (a, b, n, m) = self.align(other)?;
        Ok(PadicInt::raw(self.p, (a + m - b) % m, n))
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        let (a, b, n, m) = self.align(other)?;
        Ok(PadicInt::raw(self.p, mul_mod_u128(a, b, m), n))
    }

    pub fn neg(&self) -> PadicInt {
        let m = self.modulus();
        PadicInt::raw(self.p, (m - self.value) % m, self.precision)
    }

    pub fn add_int(&self, k: i128) -> PadicInt {
        let other = PadicInt::new(self.p, k, self.precision).expect("same prime and precision");
        self.add(&other).expect("same prime")
    }

    pub fn mul_int(&self, k: i128) -> PadicInt {
        let other = PadicInt::new(self.p, k, self.precision).expect("same prime and precision");
        self.mul(&other).expect("same prime")
    }

    pub fn pow(&self, mut e: u64) -> PadicInt {
        let m = self.modulus();
        let mut base = self.value;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod_u128(acc, base, m);
            }
            base = mul_mod_u128(base, base, m);
            e >>= 1;
        }
        PadicInt::raw(self.p, acc, self.precision)
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<PadicInt> {
        if self.value % self.p as u128 == 0 {
            return Err(Error::Precondition(format!(
                "{} is not a unit mod {}",
                self.value, self.p
            )));
        }
        // Newton iteration x <- x(2 - a x), doubling the correct digits.
        let m = self.modulus();
        let mut x: u128 = crate::arith::inv_mod((self.value % self.p as u128) as u64, self.p)
            .expect("unit") as u128;
        let mut correct = 1u32;
        while correct < self.precision {
            let ax = mul_mod_u128(self.value, x, m);
            let two_minus = (2 + m - ax) % m;
            x = mul_mod_u128(x, two_minus, m);
            correct *= 2;
        }
        Ok(PadicInt::raw(self.p, x % m, self.precision))
    }

    /// Exact division by `p`; the precision drops by one.
    pub fn div_by_p(&self) -> Result<PadicInt> {
        if self.value % self.p as u128 != 0 {
            return Err(Error::Precondition(format!(
                "{} is not divisible by {}",
                self.value, self.p
            )));
        }
        if self.precision == 0 {
            return Err(Error::OutOfRange("precision exhausted".into()));
        }
        Ok(PadicInt::raw(
            self.p,
            self.value / self.p as u128,
            self.precision - 1,
        ))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.precision)
    }
}

/// Result of solving `ℓ = (1+p)^x` (p odd) or `ℓ = (-1)^s 5^x` (p = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicLog {
    pub sign_exp: u8,
    pub x: PadicInt,
}

/// Cyclotomic discrete logarithm of `ell` at precision `n`.
///
/// For odd `p` the congruence is solved mod `p^{n+1}` and requires
/// `ell ≡ 1 (mod p)`. For `p = 2` it is solved mod `2^{n+2}`.
/// Either way the exponent is exact mod `p^n`.
pub fn cyclotomic_dlog(ell: u64, p: u64, n: u32) -> Result<CyclotomicLog> {
    require_prime(p)?;
    if ell == p {
        return Err(Error::OutOfRange(format!("ℓ must differ from p = {p}")));
    }
    if ell % p == 0 {
        return Err(Error::OutOfRange(format!("{ell} is divisible by {p}")));
    }
    if p == 2 {
        let m = pow_u128(2, n + 2)?;
        let sign_exp = (((ell - 1) / 2) % 2) as u8;
        let target = if sign_exp == 1 {
            (m - (ell as u128 % m)) % m
        } else {
            ell as u128 % m
        };
        let x = solve_log(target, 5, 2, 2, n, m);
        return Ok(CyclotomicLog {
            sign_exp,
            x: PadicInt::raw(2, x, n),
        });
    }
    if ell % p != 1 {
        return Err(Error::NotOneUnit { ell, p });
    }
    let m = pow_u128(p, n + 1)?;
    let x = solve_log(ell as u128 % m, 1 + p as u128, p, 1, n, m);
    Ok(CyclotomicLog {
        sign_exp: 0,
        x: PadicInt::raw(p, x, n),
    })
}

/// Digit-by-digit solve of `g^x ≡ t (mod m)` where `g^{p^k} ≡ 1 + p^{k+shift}`
/// modulo `p^{k+shift+1}`.
fn solve_log(t: u128, g: u128, p: u64, shift: u32, n: u32, m: u128) -> u128 {
    let pp = p as u128;
    let mut x: u128 = 0;
    let mut pk: u128 = 1;
    // g_pow_pk = g^{p^k}, running = g^x
    let mut g_pow_pk = g % m;
    let mut running: u128 = 1 % m;
    for k in 0..n {
        // residual = t / g^x, which is ≡ 1 mod p^{k+shift}
        let inv_running = PadicInt::raw(p, running, n + shift)
            .inverse()
            .expect("1-unit")
            .value;
        let residual = mul_mod_u128(t, inv_running, m);
        let scale = pow_u128(p, k + shift).expect("below modulus");
        let digit = ((residual + m - 1) % m / scale) % pp;
        let step = PadicInt::raw(p, g_pow_pk, n + shift);
        running = mul_mod_u128(running, step.pow(digit as u64).value, m);
        x += digit * pk;
        pk *= pp;
        g_pow_pk = step.pow(p).value;
    }
    x
}
