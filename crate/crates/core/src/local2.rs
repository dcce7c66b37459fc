//! Exact 2-adic arithmetic in Z_2, Z_2[ω] (ω² = ω + 1) and Z_2[θ] (θ² = 2),
//! truncated mod 2^K with K = 124 and computed with wrapping `u128` operations.

use crate::error::{Error, Result};

pub(crate) const K: u32 = 124;
const MASK: u128 = (1u128 << K) - 1;

/// The completion used for 2-adic tests in a biquadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ring {
    /// Z_2 itself (both radicands ≡ 1 mod 8).
    Rational,
    /// The unramified quadratic ring Z_2[ω].
    Omega,
    /// The ramified ring Z_2[θ], θ² = 2.
    Theta,
}

impl Ring {
    /// The ring in which `√A` and `√B` both live, for fundamental radicands
    /// `A, B ∈ {±ℓ, 2}` with each odd one ≡ 1 mod 4.
    pub(crate) fn for_radicands(a: i64, b: i64) -> Ring {
        if a == 2 || b == 2 {
            Ring::Theta
        } else if a.rem_euclid(8) == 5 || b.rem_euclid(8) == 5 {
            Ring::Omega
        } else {
            Ring::Rational
        }
    }
}

/// `c0 + c1·g` with `g` the ring generator, coefficients mod 2^K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Elem {
    pub c0: u128,
    pub c1: u128,
}

pub(crate) fn from_int(v: i128) -> u128 {
    (v as u128) & MASK
}

fn v2(n: u128) -> u32 {
    if n & MASK == 0 {
        K
    } else {
        n.trailing_zeros()
    }
}

impl Elem {
    pub(crate) fn new(c0: u128, c1: u128) -> Elem {
        Elem {
            c0: c0 & MASK,
            c1: c1 & MASK,
        }
    }

    #[cfg(test)]
    pub(crate) fn mul(self, o: Elem, ring: Ring) -> Elem {
        let (a0, a1, b0, b1) = (self.c0, self.c1, o.c0, o.c1);
        let w = |x: u128, y: u128| x.wrapping_mul(y);
        match ring {
            Ring::Rational => Elem::new(w(a0, b0), 0),
            Ring::Omega => Elem::new(
                w(a0, b0).wrapping_add(w(a1, b1)),
                w(a0, b1).wrapping_add(w(a1, b0)).wrapping_add(w(a1, b1)),
            ),
            Ring::Theta => Elem::new(
                w(a0, b0).wrapping_add(w(2, w(a1, b1))),
                w(a0, b1).wrapping_add(w(a1, b0)),
            ),
        }
    }

    /// Valuation normalized so that a uniformizer has valuation 1.
    pub(crate) fn valuation(self, ring: Ring) -> u32 {
        match ring {
            Ring::Theta => (2 * v2(self.c0)).min(2 * v2(self.c1) + 1),
            _ => v2(self.c0).min(v2(self.c1)),
        }
    }

    fn shift_right(self, k: u32) -> Elem {
        Elem::new(self.c0 >> k, self.c1 >> k)
    }

    /// Unit part after removing an even power of the uniformizer.
    /// Returns `None` when the valuation is odd or exceeds the working precision.
    fn even_unit_part(self, ring: Ring) -> Result<Option<Elem>> {
        let v = self.valuation(ring);
        let bits = if ring == Ring::Theta { v / 2 } else { v };
        if bits + 4 >= K {
            return Err(Error::Normalization("2-adic precision exhausted".into()));
        }
        if ring == Ring::Theta {
            if v % 2 == 1 {
                return Ok(None);
            }
            return Ok(Some(self.shift_right(v / 2)));
        }
        if v % 2 == 1 {
            return Ok(None);
        }
        Ok(Some(self.shift_right(v)))
    }

    /// True iff the quadratic extension generated by `√self` is unramified,
    /// i.e. `self` is a square times a unit congruent to a square mod 4.
    pub(crate) fn unramified_radicand(self, ring: Ring) -> Result<bool> {
        let Some(u) = self.even_unit_part(ring)? else {
            return Ok(false);
        };
        let r = (u.c0 % 4, u.c1 % 4);
        Ok(match ring {
            Ring::Rational => r == (1, 0),
            Ring::Omega => matches!(r, (1, 0) | (1, 1) | (2, 3)),
            Ring::Theta => matches!(r, (1, 0) | (3, 2)),
        })
    }
}

/// A square root of `d ≡ 1 (mod 8)` in Z_2, exact mod 2^{K-1}.
pub(crate) fn sqrt_one_mod_eight(d: i128) -> u128 {
    let d = from_int(d);
    debug_assert_eq!(d % 8, 1);
    let mut r: u128 = 1;
    for k in 3..K {
        let diff = r.wrapping_mul(r).wrapping_sub(d) & MASK;
        if (diff >> (k + 1)) << (k + 1) != diff {
            r = r.wrapping_add(1u128 << (k - 1));
        }
    }
    r & MASK
}

/// Embed `x + y√D` into the ring, with `√D ↦ sign·s` for a fixed root `s`.
///
/// Radicands: `D ≡ 1 mod 8` embeds into Z_2; `D = 2` maps to θ; `D ≡ 5 mod 8`
/// uses `√D = √5·√(D/5)` with `√5 = 2ω − 1`.
pub(crate) fn embed(d: i64, x: i128, y: i128, sign: i128, ring: Ring) -> Elem {
    if d == 2 {
        debug_assert_eq!(ring, Ring::Theta);
        return Elem::new(from_int(x), from_int(sign * y));
    }
    let dm = d.rem_euclid(8);
    if dm == 1 {
        let s = sqrt_one_mod_eight(d as i128);
        let ys = from_int(sign * y).wrapping_mul(s);
        return Elem::new(from_int(x).wrapping_add(ys), 0);
    }
    debug_assert_eq!(dm, 5);
    debug_assert_eq!(ring, Ring::Omega);
    // D/5 in Z_2: 5^{-1} ≡ 5 mod 8 so D·5^{-1} ≡ 1 mod 8.
    let inv5 = inverse_odd(5);
    let t = sqrt_one_mod_eight((from_int(d as i128).wrapping_mul(inv5) & MASK) as i128);
    let c = from_int(sign * y).wrapping_mul(t);
    Elem::new(from_int(x).wrapping_sub(c), c.wrapping_mul(2))
}

/// Inverse of an odd number mod 2^K.
pub(crate) fn inverse_odd(a: u128) -> u128 {
    let mut x: u128 = 1;
    for _ in 0..7 {
        x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
    }
    x & MASK
}

/// For a nonzero element of Z_2: `(valuation, unit part mod 8)`.
pub(crate) fn rational_split(v: u128) -> Result<(u32, u128)> {
    let k = v2(v);
    if k + 4 >= K {
        return Err(Error::Normalization("2-adic precision exhausted".into()));
    }
    Ok((k, (v >> k) % 8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_roots() {
        for d in [1i128, 17, 33, -7, -15, 113, 593, -23] {
            let r = sqrt_one_mod_eight(d);
            let diff = r.wrapping_mul(r).wrapping_sub(from_int(d)) & MASK;
            assert!(diff.trailing_zeros() >= K - 1, "d={d}");
        }
    }

    #[test]
    fn omega_embedding_squares_to_radicand() {
        for d in [5i64, -3, 13, 37, -11] {
            let e = embed(d, 0, 1, 1, Ring::Omega);
            let sq = e.mul(e, Ring::Omega);
            assert_eq!(sq, Elem::new(from_int(d as i128), 0), "d={d}");
        }
    }

    #[test]
    fn unramified_classes() {
        // Over Z_2: u unramified iff u ≡ 1 mod 4 (times an even power of 2).
        for (v, want) in [
            (1i128, true),
            (5, true),
            (3, false),
            (7, false),
            (2, false),
            (20, true),
            (12, false),
        ] {
            let e = Elem::new(from_int(v), 0);
            assert_eq!(
                e.unramified_radicand(Ring::Rational).unwrap(),
                want,
                "v={v}"
            );
        }
        // -3 is a square in Z_2[ω], so it is unramified there.
        let e = Elem::new(from_int(-3), 0);
        assert!(e.unramified_radicand(Ring::Omega).unwrap());
        assert!(!Elem::new(from_int(-1), 0)
            .unramified_radicand(Ring::Omega)
            .unwrap());
        // A genuine square in Z_2[θ].
        let s = Elem::new(3, 5).mul(Elem::new(3, 5), Ring::Theta);
        assert!(s.unramified_radicand(Ring::Theta).unwrap());
        assert!(!Elem::new(from_int(-1), 0)
            .unramified_radicand(Ring::Theta)
            .unwrap());
    }
}
