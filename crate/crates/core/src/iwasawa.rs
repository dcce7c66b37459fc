//! Approximations of the initial Fitting ideal of the Iwasawa module of
//! `K = Q(√D)`, `D = Π ℓi*`, over the cyclotomic Z_2-extension, computed by
//! Fox calculus from the Koch presentation with `S = {ℓ1..ℓd, ∞}`.
//!
//! The free group is generated by `w01, w02, w1, ..., w_{d-1}`, with the
//! convention `w_d = 1`. The depth-4 relators `ρ_{i,4}` are formal products of
//! kernel words raised to exponents built from a [`CoeffSet`].

use crate::arith::{legendre, quartic_symbol, require_prime};
use crate::error::{Error, Result};
use crate::fox::{
    fox_phi_kernel, lambda_det, w_id, w_word, KernelProduct, LambdaElem, Specialization, Word, W01,
    W02,
};
use crate::linking::{lk, lk_parity, LkValue};
use crate::padic::PadicInt;
use crate::redei::{mu2, redei_hypotheses, star};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Λ coefficient precision used by the pipeline.
pub const PIPELINE_BITS: u32 = 16;
/// Λ degree cap used by the pipeline.
pub const PIPELINE_DEGREE: usize = 6;
/// Default 2-adic precision of `c_{i0}`.
pub const COEFF_PRECISION: u32 = 32;
/// Precision of the pipeline: 2-adic precision `N` of the linking numbers,
/// and the coefficient bits `M` and degree cap `D` of Λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaParams {
    pub precision: u32,
    pub bits: u32,
    pub degree: usize,
}

impl Default for IwasawaParams {
    fn default() -> IwasawaParams {
        IwasawaParams {
            precision: COEFF_PRECISION,
            bits: PIPELINE_BITS,
            degree: PIPELINE_DEGREE,
        }
    }
}

impl IwasawaParams {
    /// Parameters for 2-adic precision `n`, with `M = min(16, n - 1)`.
    pub fn for_precision(n: u32) -> Result<IwasawaParams> {
        let p = IwasawaParams {
            precision: n,
            bits: PIPELINE_BITS.min(n.saturating_sub(1)),
            degree: PIPELINE_DEGREE,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(4..=62).contains(&self.precision) {
            return Err(Error::OutOfRange(format!(
                "2-adic precision {} must be in 4..=62",
                self.precision
            )));
        }
        if self.bits < 3 || self.bits >= self.precision {
            return Err(Error::OutOfRange(format!(
                "Λ coefficient bits {} must be at least 3 and below the precision {}",
                self.bits, self.precision
            )));
        }
        if !(3..=12).contains(&self.degree) {
            return Err(Error::OutOfRange(format!(
                "Λ degree cap {} must be in 3..=12",
                self.degree
            )));
        }
        Ok(())
    }
}

/// Largest number of unknown `c_{iab}` bits enumerated for determinacy.
pub const MAX_UNKNOWN_BITS: usize = 12;

/// Linking and Milnor data of `ℓ0 = 2, ℓ1, ..., ℓd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffSet {
    pub d: usize,
    /// `ℓ0 = 2, ℓ1, ..., ℓd`; empty for synthetic sets.
    pub primes: Vec<u64>,
    /// `c_{i0} = lk(ℓi, 2)` for `0 ≤ i ≤ d`.
    pub c0: Vec<PadicInt>,
    /// `c_{ij}` bits for `1 ≤ j ≤ d` (column 0 unused).
    pub c: Vec<Vec<u8>>,
    /// Lifts of `c_{iab}` for `a < b`, `None` where the Rédei symbol is undefined.
    ciab: Vec<Vec<Vec<Option<i64>>>>,
}

impl CoeffSet {
    /// A set with every coefficient zero.
    pub fn zero(d: usize) -> CoeffSet {
        let n = d + 1;
        CoeffSet {
            d,
            primes: Vec::new(),
            c0: vec![PadicInt::new(2, 0, COEFF_PRECISION).expect("2 is prime"); n],
            c: vec![vec![0; n]; n],
            ciab: vec![vec![vec![Some(0); n]; n]; n],
        }
    }

    fn check(&self, i: usize, a: usize, b: usize) -> Result<()> {
        if i > self.d || a >= b || b > self.d {
            return Err(Error::OutOfRange(format!(
                "c_({i},{a},{b}) needs i ≤ d and a < b ≤ d with d = {}",
                self.d
            )));
        }
        Ok(())
    }

    pub fn set_c0(&mut self, i: usize, v: i128) -> Result<()> {
        if i == 0 || i > self.d {
            return Err(Error::OutOfRange(format!("c_({i},0) is not free")));
        }
        self.c0[i] = PadicInt::new(2, v, COEFF_PRECISION)?;
        Ok(())
    }

    pub fn set_c(&mut self, i: usize, j: usize, bit: u8) -> Result<()> {
        if i > self.d || j == 0 || j > self.d || i == j || bit > 1 {
            return Err(Error::OutOfRange(format!(
                "c_({i},{j}) = {bit} is not settable"
            )));
        }
        self.c[i][j] = bit;
        Ok(())
    }

    pub fn set_ciab(&mut self, i: usize, a: usize, b: usize, v: Option<i64>) -> Result<()> {
        self.check(i, a, b)?;
        self.ciab[i][a][b] = v;
        Ok(())
    }

    pub fn ciab(&self, i: usize, a: usize, b: usize) -> Option<i64> {
        self.ciab[i][a][b]
    }

    /// The indices `(i, a, b)` whose Rédei symbols are undefined.
    pub fn unknown_bits(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.d {
            for a in 0..=self.d {
                for b in a + 1..=self.d {
                    if self.ciab[i][a][b].is_none() {
                        out.push((i, a, b));
                    }
                }
            }
        }
        out
    }

    /// `c_{i0}` as an integer lift.
    fn ci0(&self, i: usize) -> i128 {
        self.c0[i].value() as i128
    }

    /// `c_{ij}` for `j ≥ 0`, with `c_{i0}` the lift.
    fn cij(&self, i: usize, j: usize) -> i128 {
        if j == 0 {
            self.ci0(i)
        } else {
            self.c[i][j] as i128
        }
    }

    /// `c_{iab}` for `a < b`, unknown bits read as 0.
    fn cab(&self, i: usize, a: usize, b: usize) -> i128 {
        self.ciab[i][a][b].unwrap_or(0) as i128
    }
}

/// Fundamental discriminant `Π ℓi*` of the quadratic field.
pub fn discriminant(primes: &[u64]) -> Result<i128> {
    let mut dd: i128 = 1;
    for &l in primes {
        require_prime(l)?;
        if l == 2 {
            return Err(Error::Hypothesis(
                "even discriminants are outside the supported cases".into(),
            ));
        }
        dd *= star(l) as i128;
    }
    Ok(dd)
}

/// `ε = 1` if `D ≡ 1 mod 8`, `0` if `D ≡ 5 mod 8`.
pub fn epsilon(dd: i128) -> Result<u8> {
    match dd.rem_euclid(8) {
        1 => Ok(1),
        5 => Ok(0),
        r => Err(Error::Hypothesis(format!(
            "D ≡ {r} mod 8 is not a supported discriminant"
        ))),
    }
}

fn check_primes(primes: &[u64]) -> Result<()> {
    if primes.is_empty() {
        return Err(Error::OutOfRange("at least one prime is needed".into()));
    }
    for (k, &l) in primes.iter().enumerate() {
        require_prime(l)?;
        if l == 2 {
            return Err(Error::Hypothesis(
                "ℓi = 2 gives an even discriminant, which is not supported".into(),
            ));
        }
        if primes[..k].contains(&l) {
            return Err(Error::OutOfRange(format!("{l} is listed twice")));
        }
    }
    Ok(())
}

/// Populate a [`CoeffSet`] from linking numbers and Rédei symbols.
pub fn coeffs_from_primes(primes: &[u64], n: u32) -> Result<CoeffSet> {
    check_primes(primes)?;
    let d = primes.len();
    let mut all = vec![2u64];
    all.extend_from_slice(primes);
    let mut cs = CoeffSet::zero(d);
    cs.primes = all.clone();
    for i in 1..=d {
        cs.c0[i] = match lk(all[i], 2, 2, n)? {
            LkValue::Cyclotomic { x, .. } => x,
            LkValue::Finite { .. } => unreachable!("target 2 is cyclotomic"),
        };
    }
    for i in 0..=d {
        for j in 1..=d {
            cs.c[i][j] = lk_parity(all[i], all[j]) as u8;
        }
    }
    for i in 0..=d {
        for a in 0..=d {
            for b in a + 1..=d {
                cs.ciab[i][a][b] = if redei_hypotheses(all[a], all[b], all[i])? {
                    Some(mu2(all[a], all[b], all[i])? as i64)
                } else {
                    None
                };
            }
        }
    }
    Ok(cs)
}

fn w(i: usize, d: usize) -> Word {
    w_word(i, d)
}

fn w01() -> Word {
    Word::gen(W01)
}

fn w02() -> Word {
    Word::gen(W02)
}

/// `w01 w_j w02^{-1} w_j^{-1}`.
fn base_a(j: usize, d: usize) -> Word {
    w01()
        .mul(&w(j, d))
        .mul(&w02().inverse())
        .mul(&w(j, d).inverse())
}

/// `[w_j w02 w_j^{-1}, w01]`.
fn base_b(j: usize, d: usize) -> Word {
    let conj = w(j, d).mul(&w02()).mul(&w(j, d).inverse());
    Word::commutator(&conj, &w01())
}

/// `w02^{-1} w_a^{-1} w01 w_a`.
fn base_c(a: usize, d: usize) -> Word {
    w02()
        .inverse()
        .mul(&w(a, d).inverse())
        .mul(&w01())
        .mul(&w(a, d))
}

/// `[(w_a w_b^{-1})^2, w01]`.
fn base_d(a: usize, b: usize, d: usize) -> Word {
    Word::commutator(&base_e(a, b, d).pow(2), &w01())
}

/// `w_a w_b^{-1}`.
fn base_e(a: usize, b: usize, d: usize) -> Word {
    w(a, d).mul(&w(b, d).inverse())
}

fn tri(c: i128) -> i128 {
    c * (c - 1) / 2
}

/// The kernel product `ρ_{i,4}`.
pub fn build_rho(i: usize, cs: &CoeffSet, bits: u32) -> Result<KernelProduct> {
    let d = cs.d;
    if i > d {
        return Err(Error::OutOfRange(format!(
            "relation index {i} exceeds d = {d}"
        )));
    }
    let spec = Specialization::cyclotomic_pair();
    let z = |v: i128| PadicInt::new(2, v, bits);
    let mut kp = KernelProduct::new();
    if i == 0 {
        for j in 1..=d {
            kp.push(base_a(j, d), z(cs.cij(0, j))?, &spec)?;
            kp.push(base_b(j, d), z(cs.cab(0, 0, j))?, &spec)?;
        }
        for a in 1..=d {
            for b in a + 1..=d {
                kp.push(base_c(a, d), z(2 * cs.cij(0, a) * cs.cij(0, b))?, &spec)?;
                kp.push(base_d(a, b, d), z(cs.cab(0, a, b))?, &spec)?;
            }
        }
        return Ok(kp);
    }
    let ci0 = cs.ci0(i);
    for j in 1..=d {
        kp.push(base_e(i, j, d), z(2 * cs.cij(i, j))?, &spec)?;
        kp.push(base_c(i, d), z(2 * ci0 * cs.cij(i, j))?, &spec)?;
        kp.push(base_c(j, d), z(2 * cs.cab(i, 0, j))?, &spec)?;
    }
    kp.push(base_a(i, d), z(-ci0)?, &spec)?;
    kp.push(base_b(i, d), z(tri(ci0))?, &spec)?;
    for a in 1..=d {
        for b in a + 1..=d {
            kp.push(base_e(a, i, d), z(-4 * cs.cij(i, a) * cs.cij(i, b))?, &spec)?;
            kp.push(base_e(a, b, d), z(-4 * cs.cab(i, a, b))?, &spec)?;
        }
    }
    Ok(kp)
}

/// Row generators `w01, w1, ..., w_{d-1}`.
fn row_gens(d: usize) -> Vec<usize> {
    let mut rows = vec![W01];
    rows.extend((1..d).map(w_id));
    rows
}

/// The `d × (d+1)` matrix `Φ(∂ρ_{i,4}/∂w)`.
pub fn q_matrix(cs: &CoeffSet, bits: u32, degree: usize) -> Result<Vec<Vec<LambdaElem>>> {
    let spec = Specialization::cyclotomic_pair();
    let rhos = (0..=cs.d)
        .map(|i| build_rho(i, cs, bits))
        .collect::<Result<Vec<_>>>()?;
    row_gens(cs.d)
        .into_iter()
        .map(|g| {
            rhos.iter()
                .map(|r| fox_phi_kernel(r, g, &spec, bits, degree))
                .collect()
        })
        .collect()
}

/// The automorphism `w01 ↔ w02`, `w_i ↦ w_i^{-1}` of the free group.
pub fn tau(word: &Word) -> Word {
    let letters: Vec<(usize, i64)> = word
        .letters()
        .iter()
        .map(|&(g, e)| match g {
            W01 => (W02, e),
            W02 => (W01, e),
            _ => (g, -e),
        })
        .collect();
    Word::from_letters(&letters)
}

/// The `(d+1) × (d+2)` matrix with the extra row `w02` and the extra column
/// for the conjugate `ρ_0^τ`.
pub fn extended_q_matrix(cs: &CoeffSet, bits: u32, degree: usize) -> Result<Vec<Vec<LambdaElem>>> {
    let spec = Specialization::cyclotomic_pair();
    let mut rhos = (0..=cs.d)
        .map(|i| build_rho(i, cs, bits))
        .collect::<Result<Vec<_>>>()?;
    let mut conj = KernelProduct::new();
    for (base, z) in rhos[0].factors() {
        conj.push(tau(base), *z, &spec)?;
    }
    rhos.push(conj);
    let mut rows = row_gens(cs.d);
    rows.insert(1, W02);
    rows.into_iter()
        .map(|g| {
            rhos.iter()
                .map(|r| fox_phi_kernel(r, g, &spec, bits, degree))
                .collect()
        })
        .collect()
}

fn lam(cs: [i128; 3], bits: u32, degree: usize) -> LambdaElem {
    LambdaElem::from_coeffs(&cs, bits, degree)
}

/// The closed forms `q_{w,i}` modulo `(2,T)^3`.
pub fn q_closed(cs: &CoeffSet, bits: u32, degree: usize) -> Vec<Vec<LambdaElem>> {
    let d = cs.d;
    let c = |i: usize, j: usize| cs.cij(i, j);
    let cab = |i: usize, a: usize, b: usize| cs.cab(i, a, b);
    let mut out = Vec::new();
    for (row, _) in row_gens(d).iter().enumerate() {
        let mut line = Vec::new();
        for i in 0..=d {
            let mut v = [0i128; 3];
            if i == 0 && row == 0 {
                for j in 1..=d {
                    v[0] += c(0, j);
                    v[1] += cab(0, 0, j);
                }
                for a in 1..=d {
                    for b in a + 1..=d {
                        v[0] += 2 * c(0, a) * c(0, b);
                        v[1] += 2 * c(0, a) * c(0, b);
                    }
                }
            } else if i == 0 {
                let m = row;
                v[1] += c(0, m);
                v[2] += cab(0, 0, m);
                for b in m + 1..=d {
                    v[1] += 2 * (c(0, m) * c(0, b) + cab(0, m, b));
                }
                for a in 1..m {
                    v[1] += 2 * cab(0, a, m);
                }
            } else if row == 0 {
                let ci0 = c(i, 0);
                for j in 1..=d {
                    let k = 2 * (ci0 * c(i, j) + cab(i, 0, j));
                    v[0] += k;
                    v[1] += k;
                }
                v[0] -= ci0;
                v[1] += tri(ci0);
            } else if row == i {
                let ci0 = c(i, 0);
                for j in 1..=d {
                    v[0] += 2 * c(i, j);
                    v[1] += 2 * c(i, j) * ci0;
                }
                v[1] += 2 * cab(i, 0, i) - ci0;
                v[2] += tri(ci0);
                for a in 1..=d {
                    for b in a + 1..=d {
                        v[0] += 4 * c(i, a) * c(i, b);
                    }
                }
                for b in i + 1..=d {
                    v[0] += 4 * cab(i, i, b);
                }
                for a in 1..i {
                    v[0] += 4 * cab(i, a, i);
                }
            } else {
                let m = row;
                v[0] -= 2 * c(i, m);
                v[1] += 2 * cab(i, 0, m);
                for b in m + 1..=d {
                    v[0] += 4 * (c(i, m) * c(i, b) + cab(i, m, b));
                }
                for a in 1..m {
                    v[0] += 4 * cab(i, a, m);
                }
            }
            line.push(lam(v, bits, degree).reduce_mod_ideal(3));
        }
        out.push(line);
    }
    out
}

/// The `d × d` minors `Δ_k` on the cyclically consecutive columns
/// `k, k+1, ..., k+d-1` (mod d+1).
pub fn minors(q: &[Vec<LambdaElem>]) -> Result<Vec<LambdaElem>> {
    let d = q.len();
    if q.iter().any(|row| row.len() != d + 1) {
        return Err(Error::OutOfRange("expected a d × (d+1) matrix".into()));
    }
    (0..=d)
        .map(|k| {
            let sub: Vec<Vec<LambdaElem>> = q
                .iter()
                .map(|row| (0..d).map(|t| row[(k + t) % (d + 1)].clone()).collect())
                .collect();
            lambda_det(&sub)
        })
        .collect()
}

/// The closed forms of `Δ0, Δ1, Δ2` modulo `(2,T)^3` for `d = 2`.
pub fn delta_closed_d2(cs: &CoeffSet, bits: u32, degree: usize) -> Result<[LambdaElem; 3]> {
    if cs.d != 2 {
        return Err(Error::OutOfRange("the closed minors are for d = 2".into()));
    }
    let c = |i: usize, j: usize| cs.cij(i, j);
    let k = |i: usize, a: usize, b: usize| cs.cab(i, a, b);
    let (c01, c02, c10, c12, c20, c21) = (c(0, 1), c(0, 2), c(1, 0), c(1, 2), c(2, 0), c(2, 1));
    let (h10, h20) = (tri(c10), tri(c20));
    let d0 = [
        2 * c12 * (c01 + c02) + 4 * (c12 * c01 * c02 + k(1, 1, 2) * (c01 + c02)),
        -c10 * c02
            + 2 * (c12 * (c10 * c02 + k(0, 0, 1) + k(0, 0, 2))
                + c01 * k(1, 0, 2)
                + c02 * k(1, 0, 1)
                + c10 * k(0, 1, 2)),
        c10 * k(0, 0, 2) + c02 * h10,
    ];
    let d1 = [
        2 * (c12 * c20 + c21 * c10)
            + 4 * (c12 * c21 * (c10 + c20)
                + c21 * (k(1, 0, 1) + k(1, 0, 2))
                + c12 * (k(2, 0, 1) + k(2, 0, 2))
                + c10 * k(2, 1, 2)
                + c20 * k(1, 1, 2)),
        -c10 * c20
            + 2 * (c12 * h20
                + c21 * h10
                + c10 * c20 * (c12 + c21)
                + c10 * k(2, 0, 2)
                + c20 * k(1, 0, 1)),
        c10 * h20 + c20 * h10,
    ];
    let d2 = [
        2 * c21 * (c01 + c02) + 4 * (c21 * c01 * c02 + k(2, 1, 2) * (c01 + c02)),
        -c01 * c20
            + 2 * (c21 * (c01 * c20 + k(0, 0, 1) + k(0, 0, 2))
                + c01 * k(2, 0, 2)
                + c02 * k(2, 0, 1)
                + c20 * k(0, 1, 2)
                + c01 * c20 * c02),
        c20 * k(0, 0, 1) + c01 * h20,
    ];
    Ok([d0, d1, d2].map(|v| lam(v, bits, degree).reduce_mod_ideal(3)))
}

/// An element of `Λ/(2,T)^m` as coefficients `c_j mod 2^{m-j}`.
type Residue = Vec<u64>;

fn to_residue(x: &LambdaElem, m: u32) -> Residue {
    let r = x.reduce_mod_ideal(m);
    (0..m as usize).map(|j| r.coeff(j)).collect()
}

fn add_res(a: &Residue, b: &Residue, m: u32) -> Residue {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(j, (x, y))| (x + y) % (1u64 << (m as usize - j)))
        .collect()
}

fn shift_res(a: &Residue, k: usize, m: u32) -> Residue {
    let mut out = vec![0; a.len()];
    for j in 0..a.len() {
        if j + k < a.len() {
            out[j + k] = a[j] % (1u64 << (m as usize - j - k));
        }
    }
    out
}

/// All elements of the ideal generated by `gens` in `Λ/(2,T)^m`.
fn ideal_span(gens: &[Residue], m: u32) -> HashSet<Residue> {
    let mut steps: Vec<Residue> = Vec::new();
    for g in gens {
        for k in 0..m as usize {
            steps.push(shift_res(g, k, m));
        }
    }
    let zero = vec![0u64; m as usize];
    let mut seen: HashSet<Residue> = HashSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(x) = stack.pop() {
        for s in &steps {
            let y = add_res(&x, s, m);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Canonical generators of `(gens) + (2,T)^m`, as elements of `Λ/(2,T)^m`.
///
/// Candidates are taken in order of T-degree, then by coefficients from the
/// top degree down, and kept when they enlarge the span. An empty list means
/// the ideal is `(2,T)^m` itself.
pub fn ideal_mod(gens: &[LambdaElem], m: u32, bits: u32, degree: usize) -> Result<Vec<LambdaElem>> {
    if !(1..=4).contains(&m) {
        return Err(Error::OutOfRange(format!(
            "ideal modulus exponent {m} must be in 1..=4"
        )));
    }
    let res: Vec<Residue> = gens.iter().map(|g| to_residue(g, m)).collect();
    let full = ideal_span(&res, m);
    let mut cands: Vec<Residue> = full
        .iter()
        .filter(|r| r.iter().any(|&c| c != 0))
        .cloned()
        .collect();
    let key = |r: &Residue| {
        let top = r.iter().rposition(|&c| c != 0).unwrap_or(0);
        let rev: Vec<u64> = r.iter().rev().copied().collect();
        (top, rev)
    };
    cands.sort_by_key(key);
    let mut chosen: Vec<Residue> = Vec::new();
    let mut span = ideal_span(&chosen, m);
    for c in cands {
        if span.len() == full.len() {
            break;
        }
        if !span.contains(&c) {
            chosen.push(c);
            span = ideal_span(&chosen, m);
        }
    }
    Ok(chosen
        .iter()
        .map(|r| {
            let cs: Vec<i128> = r.iter().map(|&c| c as i128).collect();
            LambdaElem::from_coeffs(&cs, bits, degree)
        })
        .collect())
}

/// Render an ideal of `Λ/(2,T)^m` as a generator list.
pub fn render_ideal(gens: &[LambdaElem], m: u32) -> String {
    if gens.is_empty() {
        return format!("(2,T)^{m}");
    }
    let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Which auxiliary place the quadratic field is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "q", rename_all = "snake_case")]
pub enum Sigma {
    Infinity,
    Q(u64),
}

/// The depth-4 approximation of `E_0(X) + (2,T)^{3-ε}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaApprox {
    pub primes: Vec<u64>,
    pub discriminant: i128,
    pub epsilon: u8,
    pub modulus_exponent: u32,
    pub matrix: Vec<Vec<LambdaElem>>,
    /// `Δ_k` reduced mod `(2,T)^{3-ε}`.
    pub minors: Vec<LambdaElem>,
    /// Whether each minor is independent of the undefined `c_{iab}`.
    pub minor_determined: Vec<bool>,
    /// Canonical generators of the ideal modulo `(2,T)^{3-ε}`.
    pub ideal_generators: Vec<LambdaElem>,
    pub ideal_determined: bool,
    pub unknown_bits: Vec<(usize, usize, usize)>,
}

impl IwasawaApprox {
    pub fn ideal_string(&self) -> String {
        render_ideal(&self.ideal_generators, self.modulus_exponent)
    }
}

type Stage = (Vec<Vec<LambdaElem>>, Vec<LambdaElem>, Vec<LambdaElem>);

fn minors_and_ideal(cs: &CoeffSet, m: u32, prm: &IwasawaParams) -> Result<Stage> {
    let q = q_matrix(cs, prm.bits, prm.degree)?;
    let mins: Vec<LambdaElem> = minors(&q)?.iter().map(|x| x.reduce_mod_ideal(m)).collect();
    let ideal = ideal_mod(&mins, m, prm.bits, prm.degree)?;
    Ok((q, mins, ideal))
}

/// The approximation for a given coefficient set and `ε`.
pub fn fitting_from_coeffs(cs: &CoeffSet, eps: u8) -> Result<IwasawaApprox> {
    fitting_from_coeffs_with(cs, eps, &IwasawaParams::default())
}

/// [`fitting_from_coeffs`] at the given Λ precision.
pub fn fitting_from_coeffs_with(
    cs: &CoeffSet,
    eps: u8,
    prm: &IwasawaParams,
) -> Result<IwasawaApprox> {
    prm.validate()?;
    if eps > 1 {
        return Err(Error::OutOfRange("ε is 0 or 1".into()));
    }
    let m = 3 - eps as u32;
    let (matrix, mins, ideal) = minors_and_ideal(cs, m, prm)?;
    let unknown = cs.unknown_bits();
    let mut minor_determined = vec![true; mins.len()];
    let mut ideal_determined = true;
    if unknown.len() > MAX_UNKNOWN_BITS {
        minor_determined.iter_mut().for_each(|f| *f = false);
        ideal_determined = false;
    } else if !unknown.is_empty() {
        for mask in 1u32..(1 << unknown.len()) {
            let mut alt = cs.clone();
            for (k, &(i, a, b)) in unknown.iter().enumerate() {
                alt.ciab[i][a][b] = Some(((mask >> k) & 1) as i64);
            }
            let (_, am, ai) = minors_and_ideal(&alt, m, prm)?;
            for (k, x) in am.iter().enumerate() {
                if *x != mins[k] {
                    minor_determined[k] = false;
                }
            }
            if ai != ideal {
                ideal_determined = false;
            }
        }
    }
    Ok(IwasawaApprox {
        primes: cs.primes.iter().skip(1).copied().collect(),
        discriminant: 0,
        epsilon: eps,
        modulus_exponent: m,
        matrix,
        minors: mins,
        minor_determined,
        ideal_generators: ideal,
        ideal_determined,
        unknown_bits: unknown,
    })
}

/// The approximation of `E_0(X) + (2,T)^{3-ε}` for `K = Q(√D)`.
pub fn fitting_approx(primes: &[u64], sigma: Sigma) -> Result<IwasawaApprox> {
    fitting_approx_with(primes, sigma, &IwasawaParams::default())
}

/// [`fitting_approx`] at the given precision.
pub fn fitting_approx_with(
    primes: &[u64],
    sigma: Sigma,
    prm: &IwasawaParams,
) -> Result<IwasawaApprox> {
    prm.validate()?;
    if let Sigma::Q(q) = sigma {
        return Err(Error::NotImplemented(format!(
            "the Σ = {{{q}}} variant has no closed-form pipeline"
        )));
    }
    check_primes(primes)?;
    let dd = discriminant(primes)?;
    let eps = epsilon(dd)?;
    let cs = coeffs_from_primes(primes, prm.precision)?;
    let mut out = fitting_from_coeffs_with(&cs, eps, prm)?;
    out.discriminant = dd;
    Ok(out)
}

/// `Δ(T) ≡ T^2 + a1 T + a0 (mod 4T, 8)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaClass {
    pub l1: u64,
    pub l2: u64,
    /// 1 for `ℓ1 ≡ 9 (16), ℓ2 ≡ 3 (8)`; 2 for `ℓ1 ≡ 7 (16), ℓ2 ≡ 5 (8)`.
    pub case: u8,
    /// Linear coefficient mod 4.
    pub a1: u64,
    /// Constant term mod 8.
    pub a0: u64,
    /// The predicted congruence on the undefined Milnor coefficients.
    pub side_condition: String,
    /// Predicted `c012 + c201 mod 2` (case 1) or `c012 - c201 mod 2` (case 2).
    pub side_value: u8,
}

impl DeltaClass {
    pub fn as_lambda(&self, bits: u32, degree: usize) -> LambdaElem {
        LambdaElem::from_coeffs(&[self.a0 as i128, self.a1 as i128, 1], bits, degree)
    }

    /// Check the side condition on a coefficient set whose `c012`, `c201`
    /// are known; `None` when either is undefined.
    pub fn check_side(&self, cs: &CoeffSet) -> Option<bool> {
        let a = cs.ciab(0, 1, 2)?;
        let b = cs.ciab(2, 0, 1)?;
        let v = if self.case == 1 { a + b } else { a - b };
        Some(v.rem_euclid(2) as u8 == self.side_value)
    }
}

impl std::fmt::Display for DeltaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let e = self.as_lambda(16, 2);
        write!(f, "{e} (mod 4T, 8)")
    }
}

/// The class of the Iwasawa polynomial of `Q(√-ℓ1ℓ2)` modulo `(4T, 8)`.
pub fn delta_imag(l1: u64, l2: u64) -> Result<DeltaClass> {
    require_prime(l1)?;
    require_prime(l2)?;
    if l1 == l2 {
        return Err(Error::OutOfRange("the two primes must differ".into()));
    }
    let case = if l1 % 16 == 9 && l2 % 8 == 3 {
        1
    } else if l1 % 16 == 7 && l2 % 8 == 5 {
        2
    } else {
        return Err(Error::Hypothesis(format!(
            "need ℓ1 ≡ 9 mod 16, ℓ2 ≡ 3 mod 8 or ℓ1 ≡ 7 mod 16, ℓ2 ≡ 5 mod 8; got ({l1}, {l2})"
        )));
    };
    if legendre(l1 as i128, l2)?.value() != 1 {
        return Err(Error::Hypothesis(format!("({l1}/{l2}) = -1")));
    }
    if case == 1 {
        let s2 = quartic_symbol(2, l1)?.value();
        let s = quartic_symbol(l2 as i128, l1)?.value();
        let a1 = (1 + s2 as i64).rem_euclid(4) as u64;
        Ok(DeltaClass {
            l1,
            l2,
            case,
            a1,
            a0: (2 * (1 - s as i64)).rem_euclid(8) as u64,
            side_condition: "c012 + c201 ≡ (1 + (2/ℓ1)_4)/2 mod 2".into(),
            side_value: (a1 / 2) as u8,
        })
    } else {
        let s = quartic_symbol(-(l1 as i128), l2)?.value();
        Ok(DeltaClass {
            l1,
            l2,
            case,
            a1: 0,
            a0: (2 * (1 - s as i64)).rem_euclid(8) as u64,
            side_condition: "c012 ≡ c201 mod 2".into(),
            side_value: 0,
        })
    }
}

/// The structure of the Iwasawa module of `Q(√ℓ1ℓ2)` for
/// `ℓ1 ≡ 7 (16)`, `ℓ2 ≡ 3 (8)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealVerdict {
    pub l1: u64,
    pub l2: u64,
    pub fitting_ideal: String,
    pub module: String,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    pub prodihedral: bool,
    /// The ideal produced by the Fox pipeline modulo `(2,T)^3`.
    pub pipeline_ideal: String,
    pub pipeline_agrees: bool,
}

/// The two-relation presentation in the real quadratic case, cross-checked
/// against the Fox pipeline.
pub fn real_case(l1: u64, l2: u64) -> Result<RealVerdict> {
    require_prime(l1)?;
    require_prime(l2)?;
    if l1 % 16 != 7 || l2 % 8 != 3 {
        return Err(Error::Hypothesis(format!(
            "need ℓ1 ≡ 7 mod 16 and ℓ2 ≡ 3 mod 8; got ({l1}, {l2})"
        )));
    }
    let approx = fitting_approx(&[l1, l2], Sigma::Infinity)?;
    let expect = vec![
        LambdaElem::from_coeffs(&[2], PIPELINE_BITS, PIPELINE_DEGREE),
        LambdaElem::from_coeffs(&[0, 0, 1], PIPELINE_BITS, PIPELINE_DEGREE),
    ];
    Ok(RealVerdict {
        l1,
        l2,
        fitting_ideal: "(2, T^2)".into(),
        module: "Λ/(2, T^2)".into(),
        generators: vec!["w01".into(), "w1".into()],
        relations: vec!["w1^2".into(), "[w01, w1, w01]".into()],
        prodihedral: true,
        pipeline_ideal: approx.ideal_string(),
        pipeline_agrees: approx.ideal_determined && approx.ideal_generators == expect,
    })
}
