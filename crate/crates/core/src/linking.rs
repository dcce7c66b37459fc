//! Linking numbers of primes, the twisted linking number, and linking matrices.
//!
//! For `ℓ' ≠ p` the linking number is the discrete log of `ℓ^{-1}` to the
//! smallest primitive root mod `ℓ'`. For `ℓ' = p` it is the cyclotomic log.

use crate::arith::{self, require_prime};
use crate::error::{Error, Result};
use crate::padic::{cyclotomic_dlog, PadicInt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A linking number `lk(ℓ, ℓ')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LkValue {
    /// Target `ℓ' ≠ p`: an integer in `[0, ℓ'-1)` together with `ℓ' - 1`.
    Finite { value: u64, order: u64 },
    /// Target `ℓ' = p`: the exponent of `1+p` (or of `5`, with a sign, for p = 2).
    Cyclotomic { sign_exp: u8, x: PadicInt },
}

impl LkValue {
    pub fn zero() -> LkValue {
        LkValue::Finite { value: 0, order: 0 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LkValue::Finite { value, .. } => *value == 0,
            LkValue::Cyclotomic { x, .. } => x.is_zero(),
        }
    }

    /// Reduction mod `m`, defined when `m` divides the group order
    /// (finite targets) or is a power of `p` within precision (cyclotomic).
    pub fn reduce(&self, m: u64) -> Option<u64> {
        match self {
            LkValue::Finite { value, order } => {
                if *order == 0 {
                    Some(0)
                } else if order % m == 0 {
                    Some(value % m)
                } else {
                    None
                }
            }
            LkValue::Cyclotomic { x, .. } => {
                let p = x.prime();
                let mut k = 0;
                let mut q = 1u64;
                while q < m {
                    q *= p;
                    k += 1;
                }
                if q != m || k > x.precision() {
                    return None;
                }
                Some(x.residue(k) as u64)
            }
        }
    }

    pub fn mod_p(&self, p: u64) -> u64 {
        self.reduce(p).expect("lk target is ≡ 1 mod p")
    }

    pub fn mod_4(&self) -> Option<u64> {
        self.reduce(4)
    }

    /// The integer used as an exponent: the raw value, or the canonical
    /// representative of the p-adic exponent.
    pub fn exponent(&self) -> u128 {
        match self {
            LkValue::Finite { value, .. } => *value as u128,
            LkValue::Cyclotomic { x, .. } => x.value(),
        }
    }
}

impl std::fmt::Display for LkValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LkValue::Finite { value, .. } => write!(f, "{value}"),
            LkValue::Cyclotomic { sign_exp, x } => {
                write!(
                    f,
                    "{} (sign {sign_exp}, mod {}^{})",
                    x.value(),
                    x.prime(),
                    x.precision()
                )
            }
        }
    }
}

/// `lk(ℓ, ℓ')` with respect to `p` at p-adic precision `n`.
pub fn lk(l: u64, lp: u64, p: u64, n: u32) -> Result<LkValue> {
    require_prime(l)?;
    require_prime(lp)?;
    require_prime(p)?;
    if l == lp {
        return Ok(LkValue::zero());
    }
    if lp == p {
        let r = cyclotomic_dlog(l, p, n)?;
        return Ok(LkValue::Cyclotomic {
            sign_exp: r.sign_exp,
            x: r.x,
        });
    }
    if lp % p != 1 {
        return Err(Error::Hypothesis(format!("{lp} is not ≡ 1 mod {p}")));
    }
    let alpha = arith::primitive_root(lp)?;
    let inv = arith::inv_mod(l % lp, lp).ok_or(Error::ZeroTarget(lp))?;
    let value = arith::dlog(alpha, inv as i128, lp)?;
    Ok(LkValue::Finite {
        value,
        order: lp - 1,
    })
}

/// `lk(ℓ, ℓ') mod p` computed with minimal precision.
pub fn lk_mod(l: u64, lp: u64, p: u64) -> Result<u64> {
    Ok(lk(l, lp, p, 1)?.mod_p(p))
}

/// Parity of `lk(ℓ, ℓ')` for p = 2, read off from quadratic residuosity.
///
/// `lk(ℓ, ℓ')` is even iff `ℓ` is a square mod odd `ℓ'`; `lk(ℓ, 2)` is even
/// iff `(-1)^{(ℓ-1)/2} ℓ ≡ 1 (mod 8)`.
pub fn lk_parity(l: u64, lp: u64) -> u64 {
    if l == lp {
        return 0;
    }
    if lp == 2 {
        let star = if l % 4 == 1 { l as i128 } else { -(l as i128) };
        return if star.rem_euclid(8) == 1 { 0 } else { 1 };
    }
    if arith::legendre_unchecked(l as i128, lp).value() == 1 {
        0
    } else {
        1
    }
}

/// The twisted linking number `lk~(ℓi, ℓj)` mod p.
///
/// For p = 2 this is `lk(ℓi,ℓj) + [ℓj ≡ 3 mod 4]·lk(ℓi,q)`; for odd p it is
/// `lk(ℓi,ℓj) mod p` and `q` is ignored.
pub fn lk_tilde(li: u64, lj: u64, q: Option<u64>, p: u64) -> Result<u64> {
    if p != 2 {
        return lk_mod(li, lj, p);
    }
    let q = q.ok_or_else(|| Error::Hypothesis("p = 2 needs an auxiliary prime q".into()))?;
    if q % 4 != 3 {
        return Err(Error::Hypothesis(format!("q = {q} is not ≡ 3 mod 4")));
    }
    require_prime(q)?;
    let base = lk_mod(li, lj, 2)?;
    let twist = if lj % 4 == 3 { lk_mod(li, q, 2)? } else { 0 };
    Ok((base + twist) % 2)
}

/// Linking numbers among `p` and a set of primes, with `p` as index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingMatrix {
    pub p: u64,
    pub precision: u32,
    pub primes: Vec<u64>,
    pub entries: Vec<Vec<LkValue>>,
}

impl LinkingMatrix {
    pub fn size(&self) -> usize {
        self.primes.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &LkValue {
        &self.entries[i][j]
    }

    /// Entries reduced mod `m`, `None` where the reduction is undefined.
    pub fn reduced(&self, m: u64) -> Vec<Vec<Option<u64>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|v| v.reduce(m)).collect())
            .collect()
    }
}

/// Validate a ramification set: distinct primes, none equal to `p`, all ≡ 1 mod p.
pub fn check_ramification_set(s: &[u64], p: u64) -> Result<()> {
    require_prime(p)?;
    for (k, &l) in s.iter().enumerate() {
        require_prime(l)?;
        if l == p {
            return Err(Error::OutOfRange(format!(
                "p = {p} must not be listed in S"
            )));
        }
        if s[..k].contains(&l) {
            return Err(Error::OutOfRange(format!("{l} is listed twice")));
        }
        if l % p != 1 {
            return Err(Error::Hypothesis(format!("{l} is not ≡ 1 mod {p}")));
        }
    }
    Ok(())
}

/// The full linking matrix of `{p} ∪ S`, with `ℓ0 = p`.
pub fn linking_matrix(s: &[u64], p: u64, n: u32) -> Result<LinkingMatrix> {
    check_ramification_set(s, p)?;
    let mut primes = vec![p];
    primes.extend_from_slice(s);
    let entries = primes
        .par_iter()
        .map(|&li| {
            primes
                .iter()
                .map(|&lj| lk(li, lj, p, n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkingMatrix {
        p,
        precision: n,
        primes,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{legendre, pow_mod, primes_in};

    #[test]
    fn examples() {
        assert!(lk(7, 7, 2, 8).unwrap().is_zero());
        assert_eq!(lk(3, 5, 2, 8).unwrap().exponent(), 1);
        assert_eq!(lk(113, 593, 2, 8).unwrap().mod_4(), Some(0));
        assert!(matches!(lk(5, 11, 3, 4), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn finite_lk_is_log_of_inverse() {
        for lp in primes_in(3, 400) {
            let alpha = crate::arith::primitive_root(lp).unwrap();
            for l in primes_in(2, 200).into_iter().filter(|&l| l != lp) {
                let v = lk(l, lp, 2, 4).unwrap().exponent() as u64;
                assert_eq!(pow_mod(alpha, v, lp) * (l % lp) % lp, 1);
            }
        }
    }

    #[test]
    fn parity_matches_legendre_oracle() {
        for lp in primes_in(3, 300) {
            for l in primes_in(2, 300).into_iter().filter(|&l| l != lp) {
                let even = lk(l, lp, 2, 4).unwrap().mod_p(2) == 0;
                assert_eq!(even, legendre(l as i128, lp).unwrap().value() == 1);
                assert_eq!(lk_parity(l, lp), lk(l, lp, 2, 4).unwrap().mod_p(2));
            }
        }
        for l in primes_in(3, 500) {
            assert_eq!(lk_parity(l, 2), lk(l, 2, 2, 8).unwrap().mod_p(2), "l={l}");
        }
    }

    #[test]
    fn parity_reciprocity() {
        let ps: Vec<u64> = primes_in(3, 400)
            .into_iter()
            .filter(|l| l % 4 == 1)
            .collect();
        for &a in &ps {
            for &b in &ps {
                assert_eq!(lk_mod(a, b, 2).unwrap(), lk_mod(b, a, 2).unwrap());
            }
        }
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(
            lk_tilde(13, 73, None, 3).unwrap(),
            lk_mod(13, 73, 3).unwrap()
        );
        assert_eq!(
            lk_tilde(7, 13, Some(3), 2).unwrap(),
            lk_mod(7, 13, 2).unwrap()
        );
        let want = (lk_mod(17, 7, 2).unwrap() + lk_mod(17, 3, 2).unwrap()) % 2;
        assert_eq!(lk_tilde(17, 7, Some(3), 2).unwrap(), want);
        assert!(lk_tilde(17, 7, None, 2).is_err());
        assert!(lk_tilde(17, 7, Some(5), 2).is_err());
    }

    #[test]
    fn matrices() {
        let m = linking_matrix(&[113, 593], 2, 16).unwrap();
        assert_eq!(m.size(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j).mod_4(), Some(0), "({i},{j})");
            }
        }
        let m = linking_matrix(&[337, 593], 2, 16).unwrap();
        assert!(m.reduced(4).iter().flatten().all(|v| *v == Some(0)));
        let m = linking_matrix(&[], 2, 16).unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.get(0, 0).is_zero());
        assert!(linking_matrix(&[7, 5], 3, 4).is_err());
        assert!(linking_matrix(&[7, 7], 2, 4).is_err());
    }
}
