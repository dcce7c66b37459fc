//! Circular sets of primes, which give mild presentations.
//!
//! A bijection `σ: Z/(d+1) → {0..d}` certifies `{p} ∪ S*` as circular when
//! (1) for p = 2, `ℓ_σ(i) ≢ 3 mod 4` at even `i`; (2) `lk(ℓ_σ(i), ℓ_σ(j)) ≡ 0`
//! mod p for even `i, j`; (3) the forward and backward cycle products of the
//! twisted linking numbers differ mod p.

use crate::arith::require_prime;
use crate::error::{Error, Result};
use crate::linking::{check_ramification_set, lk_mod, lk_tilde};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `d` accepted by [`find_circular_order`].
pub const MAX_SEARCH_D: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: u8,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircularCertificate {
    pub p: u64,
    /// `ℓ0 = p, ℓ1, ..., ℓd`.
    pub primes: Vec<u64>,
    pub q: Option<u64>,
    pub sigma: Vec<usize>,
    pub checks: Vec<ConditionCheck>,
    /// `Π lk~(ℓ_σ(i), ℓ_σ(i+1)) mod p`.
    pub forward_product: u64,
    /// `Π lk~(ℓ_σ(i+1), ℓ_σ(i)) mod p`.
    pub backward_product: u64,
    pub accepted: bool,
}

impl CircularCertificate {
    /// The first failed condition, if any.
    pub fn failure(&self) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| !c.ok)
    }
}

/// Linking data of `{p} ∪ S*` reduced mod p, shared by every candidate σ.
struct Table {
    p: u64,
    primes: Vec<u64>,
    q: Option<u64>,
    lk: Vec<Vec<u64>>,
    tilde: Vec<Vec<u64>>,
}

impl Table {
    fn new(s: &[u64], p: u64, q: Option<u64>) -> Result<Table> {
        require_prime(p)?;
        let d = s.len();
        if d <= 1 || d % 2 == 0 {
            return Err(Error::Hypothesis(format!(
                "|S*| = {d} must be odd and greater than 1"
            )));
        }
        check_ramification_set(s, p)?;
        if p == 2 {
            let q =
                q.ok_or_else(|| Error::Hypothesis("p = 2 needs an auxiliary prime q".into()))?;
            require_prime(q)?;
            if q % 4 != 3 {
                return Err(Error::Hypothesis(format!("q = {q} is not ≡ 3 mod 4")));
            }
            if s.contains(&q) {
                return Err(Error::Hypothesis(format!("q = {q} must not lie in S*")));
            }
        } else if q.is_some() {
            return Err(Error::Hypothesis(format!(
                "q is only used for p = 2, got p = {p}"
            )));
        }
        let mut primes = vec![p];
        primes.extend_from_slice(s);
        let n = primes.len();
        let mut lk = vec![vec![0; n]; n];
        let mut tilde = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    lk[i][j] = lk_mod(primes[i], primes[j], p)?;
                    tilde[i][j] = lk_tilde(primes[i], primes[j], q, p)?;
                }
            }
        }
        Ok(Table {
            p,
            primes,
            q,
            lk,
            tilde,
        })
    }

    fn products(&self, sigma: &[usize]) -> (u64, u64) {
        let n = sigma.len();
        let mut fwd = 1;
        let mut bwd = 1;
        for i in 0..n {
            let (a, b) = (sigma[i], sigma[(i + 1) % n]);
            fwd = fwd * self.tilde[a][b] % self.p;
            bwd = bwd * self.tilde[b][a] % self.p;
        }
        (fwd, bwd)
    }

    fn accepts(&self, sigma: &[usize]) -> bool {
        let n = sigma.len();
        if self.p == 2 && (0..n).step_by(2).any(|i| self.primes[sigma[i]] % 4 == 3) {
            return false;
        }
        for i in (0..n).step_by(2) {
            for j in (0..n).step_by(2) {
                if self.lk[sigma[i]][sigma[j]] != 0 {
                    return false;
                }
            }
        }
        let (f, b) = self.products(sigma);
        f != b
    }

    fn certify(&self, sigma: &[usize]) -> CircularCertificate {
        let n = sigma.len();
        let mut checks = Vec::new();
        let bad1: Vec<usize> = if self.p == 2 {
            (0..n)
                .step_by(2)
                .filter(|&i| self.primes[sigma[i]] % 4 == 3)
                .collect()
        } else {
            Vec::new()
        };
        checks.push(ConditionCheck {
            condition: 1,
            ok: bad1.is_empty(),
            detail: match bad1.first() {
                None => "no prime ≡ 3 mod 4 at an even position".into(),
                Some(&i) => format!(
                    "ℓ = {} ≡ 3 mod 4 at even position {i}",
                    self.primes[sigma[i]]
                ),
            },
        });
        let mut bad2 = None;
        'outer: for i in (0..n).step_by(2) {
            for j in (0..n).step_by(2) {
                if self.lk[sigma[i]][sigma[j]] != 0 {
                    bad2 = Some((i, j));
                    break 'outer;
                }
            }
        }
        checks.push(ConditionCheck {
            condition: 2,
            ok: bad2.is_none(),
            detail: match bad2 {
                None => format!("all even-position linking numbers vanish mod {}", self.p),
                Some((i, j)) => format!(
                    "lk({}, {}) ≢ 0 mod {} at even positions ({i}, {j})",
                    self.primes[sigma[i]], self.primes[sigma[j]], self.p
                ),
            },
        });
        let (fwd, bwd) = self.products(sigma);
        checks.push(ConditionCheck {
            condition: 3,
            ok: fwd != bwd,
            detail: format!("cycle products {fwd} and {bwd} mod {}", self.p),
        });
        let accepted = checks.iter().all(|c| c.ok);
        CircularCertificate {
            p: self.p,
            primes: self.primes.clone(),
            q: self.q,
            sigma: sigma.to_vec(),
            checks,
            forward_product: fwd,
            backward_product: bwd,
            accepted,
        }
    }
}

/// Check whether `σ` makes `{p} ∪ S*` circular. Hypothesis violations are
/// errors; failing conditions give a certificate with `accepted = false`.
pub fn is_circular(
    s: &[u64],
    p: u64,
    q: Option<u64>,
    sigma: &[usize],
) -> Result<CircularCertificate> {
    let t = Table::new(s, p, q)?;
    let n = t.primes.len();
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(Error::OutOfRange(format!("σ must have {n} entries")));
    }
    for &v in sigma {
        if v >= n || seen[v] {
            return Err(Error::OutOfRange(format!(
                "σ is not a bijection onto 0..{}",
                n - 1
            )));
        }
        seen[v] = true;
    }
    Ok(t.certify(sigma))
}

/// The lexicographically first accepted `σ`, if any.
pub fn find_circular_order(
    s: &[u64],
    p: u64,
    q: Option<u64>,
) -> Result<Option<CircularCertificate>> {
    if s.len() > MAX_SEARCH_D {
        return Err(Error::OutOfRange(format!(
            "search is limited to |S*| ≤ {MAX_SEARCH_D}"
        )));
    }
    let t = Table::new(s, p, q)?;
    let n = t.primes.len();
    let found = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (0..n).filter(|&v| v != first).collect();
            loop {
                let mut sigma = vec![first];
                sigma.extend_from_slice(&rest);
                if t.accepts(&sigma) {
                    return Some(sigma);
                }
                if !next_permutation(&mut rest) {
                    return None;
                }
            }
        })
        .collect::<Vec<_>>();
    Ok(found.into_iter().flatten().next().map(|s| t.certify(&s)))
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
