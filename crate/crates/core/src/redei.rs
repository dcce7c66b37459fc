//! Rédei symbols `[ℓa, ℓb, ℓi]` and mod 2 Milnor numbers `μ2(abi)`.
//!
//! When `ℓi ∈ {ℓa, ℓb}` the symbol is a quartic residue symbol. Otherwise the
//! dihedral Rédei field `F0(√(mγ))` is built from a primitive point on the
//! conic `x² = ℓa* y² + ℓb* z²`, where `F0 = Q(√ℓa*, √ℓb*)`, `γ = x + y√ℓa*`
//! and the twist `m ∈ {±1, ±2}` is the unique one leaving the extension
//! unramified above 2. The symbol is +1 iff `mγ` is a square in the
//! completion of `F0` at a prime above `ℓi`.

use crate::arith::{self, legendre_unchecked, quartic_symbol, require_prime, sqrt_mod};
use crate::error::{Error, Result};
use crate::linking::lk_parity;
use crate::local2::{self, Ring};
use serde::{Deserialize, Serialize};

/// `ℓ* = (-1)^{(ℓ-1)/2} ℓ` for odd ℓ, and `2* = 2`.
pub fn star(l: u64) -> i64 {
    if l == 2 || l % 4 == 1 {
        l as i64
    } else {
        -(l as i64)
    }
}

/// A triple of primes with the outcome of the hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedeiTriple {
    pub a: u64,
    pub b: u64,
    pub i: u64,
    pub hypotheses_ok: bool,
}

impl RedeiTriple {
    pub fn new(a: u64, b: u64, i: u64) -> Result<RedeiTriple> {
        let hypotheses_ok = redei_hypotheses(a, b, i)?;
        Ok(RedeiTriple {
            a,
            b,
            i,
            hypotheses_ok,
        })
    }
}

/// The mod 2 vanishing conditions under which `[ℓa, ℓb, ℓi]` is defined:
/// `lk(ℓa,ℓb) ≡ lk(ℓb,ℓa) ≡ 0` and, for `ℓi ∉ {ℓa, ℓb}`,
/// `lk(ℓi,ℓa) ≡ lk(ℓi,ℓb) ≡ 0 (mod 2)`.
pub fn redei_hypotheses(a: u64, b: u64, i: u64) -> Result<bool> {
    require_prime(a)?;
    require_prime(b)?;
    require_prime(i)?;
    if a == b {
        return Err(Error::OutOfRange(format!(
            "Rédei symbol needs ℓa ≠ ℓb, got {a} twice"
        )));
    }
    let pair = lk_parity(a, b) == 0 && lk_parity(b, a) == 0;
    if i == a || i == b {
        return Ok(pair);
    }
    Ok(pair && lk_parity(i, a) == 0 && lk_parity(i, b) == 0)
}

/// A primitive integral point on `x² = A y² + B z²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConicPoint {
    pub x: i128,
    pub y: i128,
    pub z: i128,
}

impl ConicPoint {
    pub fn satisfies(&self, a: i64, b: i64) -> bool {
        let (a, b) = (a as i128, b as i128);
        self.x
            .checked_mul(self.x)
            .zip(self.y.checked_mul(self.y).and_then(|v| v.checked_mul(a)))
            .zip(self.z.checked_mul(self.z).and_then(|v| v.checked_mul(b)))
            .and_then(|((x2, ay2), bz2)| ay2.checked_add(bz2).map(|r| x2 == r))
            .unwrap_or(false)
    }

    pub fn is_primitive(&self) -> bool {
        gcd_i(gcd_i(self.x, self.y), self.z) == 1
    }

    fn normalized(self) -> Option<ConicPoint> {
        let g = gcd_i(gcd_i(self.x, self.y), self.z);
        if g == 0 {
            return None;
        }
        let mut p = ConicPoint {
            x: self.x / g,
            y: self.y / g,
            z: self.z / g,
        };
        if p.x < 0 || (p.x == 0 && (p.y < 0 || (p.y == 0 && p.z < 0))) {
            p = ConicPoint {
                x: -p.x,
                y: -p.y,
                z: -p.z,
            };
        }
        Some(p)
    }
}

fn gcd_i(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128);
    (r * r == n as u128).then_some(r as i128)
}

/// Bound on `|y|`, `|z|` for the brute-force search.
pub const SEARCH_BOUND: i128 = 1_000_000;
const SEARCH_BUDGET: i128 = 50_000_000;

fn factor_small(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn squarefree_part(n: i128) -> (i128, i128) {
    let sign = if n < 0 { -1 } else { 1 };
    let mut core = 1i128;
    let mut root = 1i128;
    for (q, e) in factor_small(n.unsigned_abs()) {
        if e % 2 == 1 {
            core *= q as i128;
        }
        for _ in 0..e / 2 {
            root *= q as i128;
        }
    }
    (sign * core, root)
}

/// Legendre's criterion for `x² = A y² + B z²` with `A`, `B` squarefree and coprime.
fn locally_soluble(a: i128, b: i128) -> bool {
    if a < 0 && b < 0 {
        return false;
    }
    let sq_mod = |v: i128, n: i128| -> bool {
        factor_small(n.unsigned_abs())
            .into_iter()
            .all(|(q, _)| q == 2 || legendre_unchecked(v, q as u64).value() >= 0)
    };
    sq_mod(a, b) && sq_mod(b, a)
}

fn sqrt_mod_squarefree(a: i128, n: u128) -> Option<i128> {
    // CRT over the prime factors of a squarefree modulus.
    let mut r: i128 = 0;
    let mut m: i128 = 1;
    for (q, _) in factor_small(n) {
        let s = if q == 2 {
            a.rem_euclid(2)
        } else {
            sqrt_mod(a, q as u64)? as i128
        };
        let q = q as i128;
        // r' ≡ r mod m, r' ≡ s mod q
        let inv = arith::inv_mod((m % q) as u64, q as u64)? as i128;
        let k = ((s - r).rem_euclid(q) * inv).rem_euclid(q);
        r += m * k;
        m *= q;
    }
    Some(r)
}

/// Lagrange descent for `x² = A y² + B z²`.
fn descent(a: i128, b: i128, depth: u32) -> Option<(i128, i128, i128)> {
    if depth > 200 {
        return None;
    }
    if a == 1 {
        return Some((1, 1, 0));
    }
    if b == 1 {
        return Some((1, 0, 1));
    }
    if a.abs() > b.abs() {
        let (x, z, y) = descent(b, a, depth + 1)?;
        return Some((x, y, z));
    }
    if b == -1 {
        // |a| ≤ 1 and a ≠ 1: a ∈ {-1}; x² = -y² - z² has no nontrivial point.
        return None;
    }
    let n = b.unsigned_abs();
    let mut t = sqrt_mod_squarefree(a, n)?;
    if t > (n / 2) as i128 {
        t -= n as i128;
    }
    let q = (t * t - a) / b;
    if q == 0 {
        return None;
    }
    let (k, s) = squarefree_part(q);
    let (x1, y1, z1) = descent(a, k, depth + 1)?;
    let x = x1.checked_mul(t)?.checked_add(a.checked_mul(y1)?)?;
    let y = x1.checked_add(y1.checked_mul(t)?)?;
    let z = k.checked_mul(s)?.checked_mul(z1)?;
    Some((x, y, z))
}

fn box_search(a: i128, b: i128, want: usize) -> Option<Vec<ConicPoint>> {
    let ymax = (isqrt(b.unsigned_abs()) as i128 + 1).min(SEARCH_BOUND);
    let zmax = (isqrt(a.unsigned_abs()) as i128 + 1).min(SEARCH_BOUND);
    if (ymax + 1) * (zmax + 1) > SEARCH_BUDGET {
        return None;
    }
    let mut out = Vec::new();
    for y in 0..=ymax {
        for z in 0..=zmax {
            if y == 0 && z == 0 {
                continue;
            }
            if let Some(x) = exact_sqrt(a * y * y + b * z * z) {
                let p = ConicPoint { x, y, z };
                if p.is_primitive() {
                    out.push(p);
                    if out.len() >= want {
                        return Some(out);
                    }
                }
            }
        }
    }
    Some(out)
}

/// A primitive integral point on `x² = A y² + B z²`.
///
/// Tries a bounded box search first (a solution exists within
/// `|y| ≤ √|B|`, `|z| ≤ √|A|` when the conic is soluble), then Lagrange
/// descent. `Insoluble` means the conic has no rational point;
/// `SearchExhausted` means the search limits were hit.
pub fn conic_point(a: i64, b: i64) -> Result<ConicPoint> {
    let (a, b) = (a as i128, b as i128);
    if a == 0
        || b == 0
        || squarefree_part(a).1 != 1
        || squarefree_part(b).1 != 1
        || gcd_i(a, b) != 1
    {
        return Err(Error::OutOfRange(format!(
            "conic coefficients must be squarefree, coprime and nonzero: ({a}, {b})"
        )));
    }
    if !locally_soluble(a, b) {
        return Err(Error::Insoluble(format!("x² = {a}y² + {b}z²")));
    }
    if let Some(points) = box_search(a, b, 1) {
        if let Some(p) = points.first() {
            return Ok(*p);
        }
    }
    descent(a, b, 0)
        .and_then(|(x, y, z)| ConicPoint { x, y, z }.normalized())
        .filter(|p| p.satisfies(a as i64, b as i64))
        .ok_or_else(|| Error::SearchExhausted(format!("x² = {a}y² + {b}z²")))
}

/// Up to `count` distinct primitive points: box-search hits first, then
/// points from the rational parametrization through the first one.
pub fn conic_points(a: i64, b: i64, count: usize) -> Result<Vec<ConicPoint>> {
    let first = conic_point(a, b)?;
    let (ai, bi) = (a as i128, b as i128);
    let mut out = vec![first];
    if let Some(found) = box_search(ai, bi, count) {
        for p in found {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    let q = |u: i128, v: i128, w: i128| u * u - ai * v * v - bi * w * w;
    let bil = |p: &ConicPoint, u: i128, v: i128, w: i128| p.x * u - ai * p.y * v - bi * p.z * w;
    'outer: for u in 0..6i128 {
        for v in -3..=3i128 {
            for w in -3..=3i128 {
                if out.len() >= count {
                    break 'outer;
                }
                let qv = q(u, v, w);
                let bv = bil(&first, u, v, w);
                let cand = ConicPoint {
                    x: qv * first.x - 2 * bv * u,
                    y: qv * first.y - 2 * bv * v,
                    z: qv * first.z - 2 * bv * w,
                };
                if let Some(p) = cand.normalized() {
                    if p.satisfies(a, b) && !out.contains(&p) && p.x.abs() < (1i128 << 60) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out.truncate(count);
    Ok(out)
}

/// Which quadratic subfield carries the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subfield {
    /// `Q(√ℓa*)`, generator `x + y√ℓa*`.
    First,
    /// `Q(√ℓb*)`, generator `x + z√ℓb*`.
    Second,
}

/// The Rédei field of an ordered pair, given by a conic point and the
/// normalizing twists of the two generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedeiField {
    pub a: u64,
    pub b: u64,
    pub a_star: i64,
    pub b_star: i64,
    pub point: ConicPoint,
    pub twist_first: i64,
    pub twist_second: i64,
}

fn select_twist(d: i64, x: i128, y: i128, ring: Ring, allowed: &[i64]) -> Result<i64> {
    let mut ok = Vec::new();
    for &m in allowed {
        let mx = x.checked_mul(m as i128);
        let my = y.checked_mul(m as i128);
        let (Some(mx), Some(my)) = (mx, my) else {
            return Err(Error::Normalization("generator too large".into()));
        };
        let mut good = true;
        for sign in [1i128, -1] {
            if !local2::embed(d, mx, my, sign, ring).unramified_radicand(ring)? {
                good = false;
                break;
            }
        }
        if good {
            ok.push(m);
        }
    }
    match ok.as_slice() {
        [m] => Ok(*m),
        _ => Err(Error::Normalization(format!(
            "expected exactly one admissible twist of {x} + {y}√{d}, found {ok:?}"
        ))),
    }
}

impl RedeiField {
    /// Build the field for the ordered pair `(a, b)` from a given conic point.
    pub fn with_point(a: u64, b: u64, point: ConicPoint) -> Result<RedeiField> {
        let (a_star, b_star) = (star(a), star(b));
        if !point.satisfies(a_star, b_star) || !point.is_primitive() {
            return Err(Error::OutOfRange(format!(
                "{point:?} is not a primitive point of x² = {a_star}y² + {b_star}z²"
            )));
        }
        let ring = Ring::for_radicands(a_star, b_star);
        let allowed: &[i64] = if a == 2 || b == 2 {
            &[1, -1]
        } else {
            &[1, -1, 2, -2]
        };
        let twist_first = select_twist(a_star, point.x, point.y, ring, allowed)?;
        let twist_second = select_twist(b_star, point.x, point.z, ring, allowed)?;
        Ok(RedeiField {
            a,
            b,
            a_star,
            b_star,
            point,
            twist_first,
            twist_second,
        })
    }

    /// Build the field for the ordered pair `(a, b)` with the first conic point found.
    pub fn new(a: u64, b: u64) -> Result<RedeiField> {
        if !redei_hypotheses(a, b, a)? {
            return Err(Error::Hypothesis(format!(
                "lk({a},{b}) and lk({b},{a}) must both be even"
            )));
        }
        let point = conic_point(star(a), star(b))?;
        RedeiField::with_point(a, b, point)
    }

    /// The normalized generator `m(x + y√ℓa*)` as `(m·x, m·y)`.
    pub fn gamma(&self) -> (i128, i128) {
        let m = self.twist_first as i128;
        (m * self.point.x, m * self.point.y)
    }

    /// The symbol at `ℓi`, using the natural subfield and the `+` square root.
    pub fn symbol_at(&self, i: u64) -> Result<i8> {
        let sub = if i == self.a {
            Subfield::Second
        } else {
            Subfield::First
        };
        self.symbol_via(i, sub, 1)
    }

    /// The symbol at `ℓi` computed from the chosen subfield generator, with
    /// the square root of its radicand mod `ℓi` taken with sign `root_sign`.
    pub fn symbol_via(&self, i: u64, sub: Subfield, root_sign: i8) -> Result<i8> {
        let (d, g0, g1, m, own) = match sub {
            Subfield::First => (
                self.a_star,
                self.point.x,
                self.point.y,
                self.twist_first,
                self.a,
            ),
            Subfield::Second => (
                self.b_star,
                self.point.x,
                self.point.z,
                self.twist_second,
                self.b,
            ),
        };
        if i == own {
            return Err(Error::OutOfRange(format!(
                "{i} ramifies in the chosen subfield; evaluate through the other one"
            )));
        }
        if !redei_hypotheses(self.a, self.b, i)? {
            return Err(Error::Hypothesis(format!(
                "[{}, {}, {i}] violates the mod 2 vanishing conditions",
                self.a, self.b
            )));
        }
        let m = m as i128;
        let in_pair = i == self.a || i == self.b;
        if i == 2 {
            let sign = if root_sign >= 0 { 1 } else { -1 };
            let s = local2::sqrt_one_mod_eight(d as i128);
            let v = local2::from_int(m * g0)
                .wrapping_add(local2::from_int(sign * m * g1).wrapping_mul(s));
            let (val, unit) = local2::rational_split(v)?;
            // Inside the pair the local field at 2 is Q_2(√2), where 2 is a square.
            let square = unit == 1 && (in_pair || val % 2 == 0);
            return Ok(if square { 1 } else { -1 });
        }
        let r = sqrt_mod(d as i128, i)
            .ok_or_else(|| Error::Hypothesis(format!("{d} is not a square mod {i}")))?
            as i128;
        let r = if root_sign >= 0 { r } else { -r };
        let li = i as i128;
        let eval = |root: i128| (m * (g0.rem_euclid(li) + g1.rem_euclid(li) * root)).rem_euclid(li);
        let mut v = eval(r);
        if v == 0 {
            v = eval(-r);
        }
        if v == 0 {
            return Err(Error::Normalization(format!(
                "generator vanishes at both primes over {i}"
            )));
        }
        Ok(legendre_unchecked(v, i).value())
    }
}

/// The quartic-residue closed forms, available when `ℓi ∈ {ℓa, ℓb}`.
pub fn redei_closed_form(a: u64, b: u64, i: u64) -> Result<i8> {
    if i != a && i != b {
        return Err(Error::OutOfRange(format!("{i} is not one of {a}, {b}")));
    }
    if !redei_hypotheses(a, b, i)? {
        return Err(Error::Hypothesis(format!(
            "lk({a},{b}) and lk({b},{a}) must both be even"
        )));
    }
    let (p, q) = if i == a { (a, b) } else { (b, a) };
    let v = if p % 4 != 3 {
        quartic_symbol(star(q) as i128, p)?
    } else {
        quartic_symbol(star(p) as i128, q)?
    };
    Ok(v.value())
}

fn canonical_pair(a: u64, b: u64) -> (u64, u64) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The Rédei symbol `[ℓa, ℓb, ℓi]`.
pub fn redei_symbol(a: u64, b: u64, i: u64) -> Result<i8> {
    if !redei_hypotheses(a, b, i)? {
        return Err(Error::Hypothesis(format!(
            "[{a}, {b}, {i}] violates the mod 2 vanishing conditions"
        )));
    }
    if i == a || i == b {
        return redei_closed_form(a, b, i);
    }
    let (a, b) = canonical_pair(a, b);
    RedeiField::new(a, b)?.symbol_at(i)
}

/// The symbol by the conic method only, for the pair in the given order.
pub fn redei_symbol_conic(a: u64, b: u64, i: u64) -> Result<i8> {
    RedeiField::new(a, b)?.symbol_at(i)
}

/// The symbol with the sign flipped when `ℓi* < 0` and the normalized
/// generator `mγ` is not totally positive. Unlike [`redei_symbol`] this is
/// invariant under every permutation of the three primes.
pub fn redei_symbol_symmetric(a: u64, b: u64, i: u64) -> Result<i8> {
    let s = redei_symbol(a, b, i)?;
    if i == a || i == b || star(i) > 0 {
        return Ok(s);
    }
    let (x, y) = canonical_pair(a, b);
    let f = RedeiField::new(x, y)?;
    let totally_positive = f.a_star < 0 || f.b_star < 0 || f.gamma().0 > 0;
    Ok(if totally_positive { s } else { -s })
}

/// `μ2(abi)`: 0 when `[ℓa, ℓb, ℓi] = 1`, 1 when it is -1.
pub fn mu2(a: u64, b: u64, i: u64) -> Result<u8> {
    Ok(if redei_symbol(a, b, i)? == 1 { 0 } else { 1 })
}
