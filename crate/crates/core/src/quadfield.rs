//! Imaginary quadratic fields `Q(√-d)`: class numbers, split primes,
//! generators of `𝔭^h`, and the Gold criterion for `Δ(T) = T`.
//!
//! Elements of `O_k` are written `a + bω` with `ω = √-d`, or
//! `ω = (1 + √-d)/2` when `-d ≡ 1 mod 4`.

use crate::arith::{self, require_prime};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Upper bound on `d` for class-number computations.
pub const MAX_D: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagQuadField {
    pub d: u64,
    pub disc: i64,
    pub class_number: u64,
}

fn is_squarefree(n: u64) -> bool {
    let mut q = 2u64;
    while q * q <= n {
        if n % (q * q) == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Fundamental discriminant of `Q(√-d)`.
pub fn discriminant(d: u64) -> Result<i64> {
    if d == 0 || d > MAX_D || !is_squarefree(d) {
        return Err(Error::OutOfRange(format!(
            "d = {d} must be squarefree in [1, {MAX_D}]"
        )));
    }
    let d = d as i64;
    Ok(if d % 4 == 3 { -d } else { -4 * d })
}

impl ImagQuadField {
    pub fn new(d: u64) -> Result<ImagQuadField> {
        let disc = discriminant(d)?;
        Ok(ImagQuadField {
            d,
            disc,
            class_number: class_number_disc(disc),
        })
    }

    /// `(trace, norm)` of `ω`.
    fn omega(&self) -> (i128, i128) {
        if self.disc % 4 == 0 {
            (0, self.d as i128)
        } else {
            (1, (1 + self.d as i128) / 4)
        }
    }

    /// Norm of `a + bω`.
    pub fn norm(&self, a: i128, b: i128) -> i128 {
        let (t, n) = self.omega();
        a * a + t * a * b + n * b * b
    }

    /// `a + bω` rendered as `(x + y√-d)/2^δ`.
    pub fn render(&self, a: i128, b: i128) -> String {
        if self.disc % 4 == 0 {
            format!("{a} + {b}√-{}", self.d)
        } else {
            format!("({} + {b}√-{})/2", 2 * a + b, self.d)
        }
    }
}

/// Number of reduced primitive forms `(a, b, c)` of discriminant `disc < 0`.
pub fn class_number_disc(disc: i64) -> u64 {
    let n = -disc;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b - disc;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a
                    && !(b < 0 && (a == c))
                    && arith::gcd(arith::gcd(a as u64, b.unsigned_abs()), c as u64) == 1
                {
                    h += 1;
                }
            }
            b += 1;
        }
        a += 1;
    }
    h
}

/// Class number of `Q(√-d)`.
pub fn class_number(d: u64) -> Result<u64> {
    Ok(class_number_disc(discriminant(d)?))
}

/// Whether an odd prime `p` splits in `Q(√-d)`; ramified primes are an error.
pub fn splits(p: u64, d: u64) -> Result<bool> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::Hypothesis("p must be odd".into()));
    }
    let disc = discriminant(d)?;
    match arith::kronecker(disc, p) {
        0 => Err(Error::Hypothesis(format!("{p} ramifies in Q(√-{d})"))),
        s => Ok(s == 1),
    }
}

/// Largest modulus `p^h` handled when searching for generators of `𝔭^h`.
const MAX_GENERATOR_MODULUS: i128 = 1 << 100;

fn big(x: i128) -> BigInt {
    BigInt::from(x)
}

fn small(x: &BigInt) -> i128 {
    x.to_i128().expect("reduced value fits in i128")
}

fn mul_mod(a: i128, b: i128, m: i128) -> i128 {
    small(&(big(a) * big(b)).mod_floor(&big(m)))
}

fn mod_pow(mut b: i128, mut e: u64, m: i128) -> i128 {
    let mut acc = 1i128.rem_euclid(m);
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn mod_inv(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// The two roots of the minimal polynomial of `ω` modulo `p^k`, lifted from
/// the roots mod p. Root `j` corresponds to the prime `𝔭_{j+1} = (p, ω - r_j)`.
fn omega_roots(field: &ImagQuadField, p: u64, k: u32) -> Result<[i128; 2]> {
    let (t, n) = field.omega();
    let s = arith::sqrt_mod(field.disc as i128, p)
        .ok_or_else(|| Error::Hypothesis(format!("{p} does not split")))? as i128;
    let pi = p as i128;
    let half = mod_inv(2, pi);
    let m = pi
        .checked_pow(k)
        .filter(|m| *m <= MAX_GENERATOR_MODULUS)
        .ok_or_else(|| Error::OutOfRange(format!("{p}^{k} is too large")))?;
    let mut roots = [0i128; 2];
    let mut r0 = [
        ((t + s) * half).rem_euclid(pi),
        ((t - s) * half).rem_euclid(pi),
    ];
    r0.sort_unstable();
    for (j, &r) in r0.iter().enumerate() {
        let mut x = r;
        for _ in 0..=k {
            let f = (mul_mod(x, x, m) - mul_mod(t, x, m) + n).rem_euclid(m);
            let fp = (2 * x - t).rem_euclid(m);
            x = (x - mul_mod(f, mod_inv(fp, m), m)).rem_euclid(m);
        }
        roots[j] = x;
    }
    Ok(roots)
}

/// Gauss reduction of the lattice `{a + bω : a + b·r ≡ 0 mod M}` for the
/// norm form; returns a shortest vector.
fn shortest_in_ideal(field: &ImagQuadField, m: i128, r: i128) -> (i128, i128) {
    let (t, n) = field.omega();
    let (t, n) = (big(t), big(n));
    // bilinear form of the norm: B(u, v) = u0 v0 + t(u0 v1 + u1 v0)/2 + n u1 v1, doubled
    let b2 = |u: &(BigInt, BigInt), v: &(BigInt, BigInt)| {
        BigInt::from(2) * &u.0 * &v.0
            + &t * (&u.0 * &v.1 + &u.1 * &v.0)
            + BigInt::from(2) * &n * &u.1 * &v.1
    };
    let mut u = (big(m), BigInt::zero());
    let mut v = (big((-r).rem_euclid(m) - m), BigInt::one());
    if b2(&u, &u) > b2(&v, &v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let uu = b2(&u, &u);
        let uv = b2(&u, &v);
        let q = (BigInt::from(2) * uv + &uu).div_floor(&(BigInt::from(2) * &uu));
        let w = (&v.0 - &q * &u.0, &v.1 - &q * &u.1);
        if b2(&w, &w) >= uu {
            return (small(&u.0), small(&u.1));
        }
        v = u;
        u = w;
    }
}

/// Generators of `𝔭1^h` and `𝔭2^h` for a split odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitGenerators {
    pub p: u64,
    pub field: ImagQuadField,
    /// `β_j = a + bω` with `β_j O_k = 𝔭_{j+1}^h`.
    pub beta: [(i128, i128); 2],
}

fn check_gold_hypotheses(p: u64, d: u64) -> Result<ImagQuadField> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::Hypothesis("p must be odd".into()));
    }
    if p == 3 && d == 3 {
        return Err(Error::Hypothesis("Q(√-3) is excluded for p = 3".into()));
    }
    let field = ImagQuadField::new(d)?;
    if !splits(p, d)? {
        return Err(Error::Hypothesis(format!("{p} is inert in Q(√-{d})")));
    }
    if field.class_number % p == 0 {
        return Err(Error::Hypothesis(format!(
            "class number {} of Q(√-{d}) is divisible by {p}",
            field.class_number
        )));
    }
    Ok(field)
}

/// Find `β` with `β O_k = 𝔭^h` for both primes over `p`.
pub fn split_generators(p: u64, d: u64) -> Result<SplitGenerators> {
    let field = check_gold_hypotheses(p, d)?;
    let h = field.class_number as u32;
    let m = (p as i128)
        .checked_pow(h)
        .filter(|m| *m <= MAX_GENERATOR_MODULUS)
        .ok_or_else(|| Error::OutOfRange(format!("{p}^{h} is too large")))?;
    let roots = omega_roots(&field, p, h)?;
    let mut beta = [(0, 0); 2];
    for j in 0..2 {
        let g = shortest_in_ideal(&field, m, roots[j]);
        if field.norm(g.0, g.1) != m {
            return Err(Error::SearchExhausted(format!(
                "no element of norm {p}^{h} in 𝔭{}^{h}",
                j + 1
            )));
        }
        beta[j] = g;
    }
    Ok(SplitGenerators { p, field, beta })
}

/// `β^{p-1} ≡ 1 (mod 𝔭'^{n+1})`, with `β` a generator of `𝔭^h` for the prime
/// `𝔭 = 𝔭_{from+1}` and `𝔭'` the other prime over p.
pub fn beta_power_is_one(
    g: &SplitGenerators,
    from: usize,
    beta: (i128, i128),
    n: u32,
) -> Result<bool> {
    let roots = omega_roots(&g.field, g.p, n + 1)?;
    let m = (g.p as i128).pow(n + 1); // bounded by omega_roots
    let s = roots[1 - from];
    let v = (beta.0 + beta.1 * s).rem_euclid(m);
    Ok(mod_pow(v, g.p - 1, m) == 1)
}

/// Whether `lk(𝔭1, 𝔭2) ≡ 0 (mod p^n)`.
pub fn split_linking_vanishes(p: u64, d: u64, n: u32) -> Result<bool> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let g = split_generators(p, d)?;
    beta_power_is_one(&g, 0, g.beta[0], n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldOutcome {
    /// `Δ(T) = T`; the group is `Z_p^2`.
    DeltaIsT,
    /// `λ ≥ 2`.
    LambdaAtLeastTwo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldVerdict {
    pub p: u64,
    pub d: u64,
    pub class_number: u64,
    pub beta: String,
    pub lk_vanishes: bool,
    pub outcome: GoldOutcome,
}

/// Decide `Δ(T) = T` from the vanishing of `lk(𝔭1, 𝔭2)` mod p.
pub fn gold_test(p: u64, d: u64) -> Result<GoldVerdict> {
    let g = split_generators(p, d)?;
    let lk_vanishes = beta_power_is_one(&g, 0, g.beta[0], 1)?;
    Ok(GoldVerdict {
        p,
        d,
        class_number: g.field.class_number,
        beta: g.field.render(g.beta[0].0, g.beta[0].1),
        lk_vanishes,
        outcome: if lk_vanishes {
            GoldOutcome::LambdaAtLeastTwo
        } else {
            GoldOutcome::DeltaIsT
        },
    })
}
