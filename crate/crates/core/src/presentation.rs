//! Koch-type presentations of the Galois group of the maximal pro-p extension
//! of `Q^cyc` unramified outside `S`, and their reduction modulo the fourth
//! Zassenhaus step when p = 2.

use crate::arith::{self, require_prime};
use crate::error::{Error, Result};
use crate::linking::{linking_matrix, lk, lk_parity, LinkingMatrix, LkValue};
use crate::redei::mu2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The extra place in `S` that the p = 2 presentations require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "q", rename_all = "snake_case")]
pub enum AuxPlace {
    None,
    Infinity,
    /// An auxiliary prime `q ≡ 3 (mod 4)`.
    Q(u64),
}

/// A ramification set: finite primes `ℓ1..ℓd` plus an optional extra place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationSet {
    pub primes: Vec<u64>,
    pub aux: AuxPlace,
}

impl RamificationSet {
    pub fn new(primes: &[u64], aux: AuxPlace) -> RamificationSet {
        RamificationSet {
            primes: primes.to_vec(),
            aux,
        }
    }

    pub fn with_infinity(primes: &[u64]) -> RamificationSet {
        RamificationSet::new(primes, AuxPlace::Infinity)
    }

    /// Number of places, counting `∞` or `q`.
    pub fn len(&self) -> usize {
        self.primes.len() + usize::from(self.aux != AuxPlace::None)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Check that the set has one of the admissible shapes for `p`.
    pub fn validate(&self, p: u64) -> Result<()> {
        require_prime(p)?;
        crate::linking::check_ramification_set(&self.primes, p)?;
        match (p, self.aux) {
            (2, AuxPlace::None) => Err(Error::Hypothesis(
                "p = 2 needs ∞ or a prime q ≡ 3 mod 4 in S".into(),
            )),
            (2, AuxPlace::Q(q)) => {
                require_prime(q)?;
                if q % 4 != 3 {
                    return Err(Error::Hypothesis(format!("q = {q} is not ≡ 3 mod 4")));
                }
                if self.primes.contains(&q) {
                    return Err(Error::OutOfRange(format!("q = {q} is also listed in S")));
                }
                Ok(())
            }
            (2, AuxPlace::Infinity) => Ok(()),
            (_, AuxPlace::None) => Ok(()),
            (_, _) => Err(Error::Hypothesis(format!(
                "for p = {p}, S consists of finite primes only"
            ))),
        }
    }
}

impl fmt::Display for RamificationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        match self.aux {
            AuxPlace::None => {}
            AuxPlace::Infinity => parts.push("∞".into()),
            AuxPlace::Q(q) => parts.push(format!("q={q}")),
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The minimal presentation `<x0..xd | r0..rd>` as data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KochPresentation {
    pub p: u64,
    pub set: RamificationSet,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    /// Row `i` holds the exponents of `x0..xd` in `y_i` modulo `[F, F]`.
    pub frobenius_exponents: Vec<Vec<LkValue>>,
    /// True when the q-twisted exponents are in use.
    pub twisted: bool,
    pub linking: LinkingMatrix,
    pub generator_rank: usize,
}

impl KochPresentation {
    pub fn d(&self) -> usize {
        self.generators.len() - 1
    }

    /// Exponent matrix as plain integers.
    pub fn exponent_matrix(&self) -> Vec<Vec<u128>> {
        self.frobenius_exponents
            .iter()
            .map(|row| row.iter().map(LkValue::exponent).collect())
            .collect()
    }
}

/// `|S| + |P| + dim B̃_S/(Q^×)^p − dim E/E^p` in the cases where `B̃_S` is
/// trivial, with `P = {p}` and `E = {±1}`.
pub fn generator_rank(set: &RamificationSet, p: u64) -> Result<usize> {
    set.validate(p)?;
    let units = usize::from(p == 2);
    Ok(set.len() + 1 - units)
}

/// Build the presentation for an admissible `S` at p-adic precision `n`.
pub fn koch_presentation(set: &RamificationSet, p: u64, n: u32) -> Result<KochPresentation> {
    set.validate(p)?;
    let linking = linking_matrix(&set.primes, p, n)?;
    let primes = &linking.primes;
    let d = set.primes.len();
    let twisted_q = match set.aux {
        AuxPlace::Q(q) => Some(q),
        _ => None,
    };
    let mut rows = Vec::with_capacity(d + 1);
    for (i, &li) in primes.iter().enumerate() {
        let mut row = linking.entries[i].clone();
        if let Some(q) = twisted_q {
            let twist = lk(li, q, p, n)?.mod_p(2);
            for (j, &lj) in primes.iter().enumerate().skip(1) {
                // (ℓj-1)/2 · lk(ℓi,q) only matters through the parity of lk(ℓi,q)
                if let LkValue::Finite { value, .. } = row[j] {
                    let order = lj - 1;
                    row[j] = LkValue::Finite {
                        value: (value + (lj - 1) / 2 * twist) % order,
                        order,
                    };
                }
            }
        }
        rows.push(row);
    }
    let generators = (0..=d).map(|i| format!("x{i}")).collect();
    let relations = primes
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if i == 0 {
                "[x0^-1, y0^-1]".to_string()
            } else {
                format!("x{i}^{} [x{i}^-1, y{i}^-1]", l - 1)
            }
        })
        .collect();
    Ok(KochPresentation {
        p,
        set: set.clone(),
        generators,
        relations,
        frobenius_exponents: rows,
        twisted: twisted_q.is_some(),
        linking,
        generator_rank: generator_rank(set, p)?,
    })
}

/// The triple commutator `[x_a, x_b, x_c]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleCommutator {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl TripleCommutator {
    pub fn new(a: usize, b: usize, c: usize) -> TripleCommutator {
        TripleCommutator { a, b, c }
    }

    /// Equality modulo `F_(4)` for p = 2: swapping the inner pair inverts the
    /// commutator, and inverses agree modulo squares of `F_3`.
    pub fn eq_mod_f4(&self, o: &TripleCommutator) -> bool {
        self.c == o.c && ((self.a, self.b) == (o.a, o.b) || (self.a, self.b) == (o.b, o.a))
    }
}

impl fmt::Display for TripleCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[x{},x{},x{}]", self.a, self.b, self.c)
    }
}

/// The class of `r_i` modulo `F_(4)`, recorded through its Milnor exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationClass {
    pub i: usize,
    /// `(a, b, μ2(abi))` for `a < b`.
    pub triple: Vec<(usize, usize, u8)>,
    /// `(a, μ2(aia))` for `a < i`.
    pub aia: Vec<(usize, u8)>,
    /// `(b, μ2(ibb))` for `b > i`.
    pub ibb: Vec<(usize, u8)>,
}

impl RelationClass {
    /// The commutators that occur with exponent 1.
    pub fn factors(&self) -> Vec<TripleCommutator> {
        let i = self.i;
        let mut out = Vec::new();
        for &(a, b, e) in &self.triple {
            if e == 1 {
                out.push(TripleCommutator::new(a, b, i));
            }
        }
        for &(a, e) in &self.aia {
            if e == 1 {
                out.push(TripleCommutator::new(a, i, a));
            }
        }
        for &(b, e) in &self.ibb {
            if e == 1 {
                out.push(TripleCommutator::new(i, b, b));
            }
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.factors().is_empty()
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs = self.factors();
        if fs.is_empty() {
            return write!(f, "r{} ≡ 1", self.i);
        }
        let parts: Vec<String> = fs.iter().map(|c| c.to_string()).collect();
        write!(f, "r{} ≡ {}", self.i, parts.join(" "))
    }
}

/// Check the hypotheses of the mod `F_(4)` description: every `ℓi ≡ 1 mod 4`
/// and every linking number among `{2} ∪ S` even.
pub fn check_free4_hypotheses(primes: &[u64]) -> Result<()> {
    let mut all = vec![2u64];
    for &l in primes {
        require_prime(l)?;
        if l % 4 != 1 {
            return Err(Error::Hypothesis(format!("{l} is not ≡ 1 mod 4")));
        }
        if all.contains(&l) {
            return Err(Error::OutOfRange(format!("{l} is listed twice")));
        }
        all.push(l);
    }
    for &a in &all {
        for &b in &all {
            if a != b && lk_parity(a, b) != 0 {
                return Err(Error::Hypothesis(format!("lk({a}, {b}) is odd")));
            }
        }
    }
    Ok(())
}

/// The relation classes `r_i mod F_(4)` for `S = {ℓ1..ℓd, ∞}`, p = 2.
pub fn relations_mod_f4(primes: &[u64]) -> Result<Vec<RelationClass>> {
    check_free4_hypotheses(primes)?;
    let mut all = vec![2u64];
    all.extend_from_slice(primes);
    let n = all.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut triple = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    triple.push((a, b, mu2(all[a], all[b], all[i])?));
                }
            }
            let aia = (0..i)
                .map(|a| Ok((a, mu2(all[a], all[i], all[a])?)))
                .collect::<Result<Vec<_>>>()?;
            let ibb = (i + 1..n)
                .map(|b| Ok((b, mu2(all[i], all[b], all[b])?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RelationClass {
                i,
                triple,
                aia,
                ibb,
            })
        })
        .collect()
}

/// Largest upper bound accepted by [`borromean_scan`].
pub const SCAN_LIMIT: u64 = 100_000;

/// Triples `(2, ℓ1, ℓ2)` with `ℓ1 < ℓ2` in `[lo, hi]` that are Borromean
/// modulo 2: all linking numbers even, `μ2 = 1` on the three distinct
/// indices and `μ2 = 0` on every degenerate pattern.
pub fn borromean_scan(lo: u64, hi: u64) -> Result<Vec<[u64; 3]>> {
    if hi > SCAN_LIMIT {
        return Err(Error::OutOfRange(format!(
            "scan bound {hi} exceeds {SCAN_LIMIT}"
        )));
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    // lk(ℓ,2) and lk(2,ℓ) are both even exactly when ℓ ≡ 1 mod 8
    let cands: Vec<u64> = arith::primes_in(lo, hi)
        .into_iter()
        .filter(|l| l % 8 == 1)
        .collect();
    let mut pairs = Vec::new();
    for (k, &a) in cands.iter().enumerate() {
        for &b in &cands[k + 1..] {
            if lk_parity(a, b) == 0 {
                pairs.push((a, b));
            }
        }
    }
    let mut out: Vec<[u64; 3]> = pairs
        .par_iter()
        .filter_map(|&(a, b)| match is_borromean(a, b) {
            Ok(true) => Some([2, a, b]),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Whether `(2, a, b)` is a Borromean triple modulo 2.
pub fn is_borromean(a: u64, b: u64) -> Result<bool> {
    check_free4_hypotheses(&[a, b])?;
    let t = [2u64, a, b];
    for x in 0..3 {
        for y in 0..3 {
            if x != y && (mu2(t[x], t[y], t[x])? != 0 || mu2(t[x], t[y], t[y])? != 0) {
                return Ok(false);
            }
        }
    }
    for (x, y, z) in [(1, 2, 0), (0, 2, 1), (0, 1, 2)] {
        if mu2(t[x], t[y], t[z])? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}
