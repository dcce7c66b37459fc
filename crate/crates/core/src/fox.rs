//! Free-group words, truncated Magnus expansions, and Fox derivatives
//! specialized into a truncated Iwasawa algebra `Z_2[[T]]`.

use crate::error::{Error, Result};
use crate::padic::PadicInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A reduced word in a free group, as `(generator, nonzero exponent)` letters
/// with adjacent generators distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn gen(g: usize) -> Word {
        Word {
            letters: vec![(g, 1)],
        }
    }

    pub fn from_letters(letters: &[(usize, i64)]) -> Word {
        let mut w = Word::identity();
        for &(g, e) in letters {
            w.push(g, e);
        }
        w
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..n.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// `[u, v] = u^{-1} v^{-1} u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse().mul(&v.inverse()).mul(u).mul(v)
    }

    /// `[u, v, w] = [[u, v], w]`.
    pub fn triple_commutator(u: &Word, v: &Word, w: &Word) -> Word {
        Word::commutator(&Word::commutator(u, v), w)
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters.iter().filter(|l| l.0 == g).map(|l| l.1).sum()
    }

    pub fn len(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.1.unsigned_abs() as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    format!("x{g}")
                } else {
                    format!("x{g}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An element of `Z_2[[T]]` truncated to degree `≤ D` with coefficients mod `2^M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaElem {
    coeffs: Vec<u64>,
    bits: u32,
}

/// Default 2-adic precision of Λ coefficients.
pub const DEFAULT_LAMBDA_BITS: u32 = 16;
/// Default T-degree cap.
pub const DEFAULT_LAMBDA_DEGREE: usize = 8;

impl LambdaElem {
    fn mask(bits: u32) -> u64 {
        if bits >= 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        }
    }

    pub fn zero(bits: u32, degree: usize) -> LambdaElem {
        assert!(bits <= 63, "coefficient precision is capped at 63 bits");
        LambdaElem {
            coeffs: vec![0; degree + 1],
            bits,
        }
    }

    pub fn constant(c: i128, bits: u32, degree: usize) -> LambdaElem {
        let mut e = LambdaElem::zero(bits, degree);
        e.coeffs[0] = (c as u64) & Self::mask(bits);
        e
    }

    pub fn one(bits: u32, degree: usize) -> LambdaElem {
        LambdaElem::constant(1, bits, degree)
    }

    /// `T`.
    pub fn t(bits: u32, degree: usize) -> LambdaElem {
        LambdaElem::from_coeffs(&[0, 1], bits, degree)
    }

    /// Build from low-to-high coefficients, dropping terms above the degree cap.
    pub fn from_coeffs(cs: &[i128], bits: u32, degree: usize) -> LambdaElem {
        let mut e = LambdaElem::zero(bits, degree);
        for (j, &c) in cs.iter().enumerate().take(degree + 1) {
            e.coeffs[j] = (c as u64) & Self::mask(bits);
        }
        e
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> u64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    /// Coefficient `j` in the symmetric range `(-2^{M-1}, 2^{M-1}]`.
    pub fn signed_coeff(&self, j: usize) -> i64 {
        let c = self.coeff(j);
        let half = 1u64 << (self.bits - 1);
        if c > half {
            c as i64 - (1i64 << self.bits)
        } else {
            c as i64
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn compatible(&self, o: &LambdaElem) -> (u32, usize) {
        (self.bits.min(o.bits), self.degree_cap().min(o.degree_cap()))
    }

    pub fn add(&self, o: &LambdaElem) -> LambdaElem {
        let (bits, deg) = self.compatible(o);
        let m = Self::mask(bits);
        LambdaElem {
            coeffs: (0..=deg)
                .map(|j| self.coeffs[j].wrapping_add(o.coeffs[j]) & m)
                .collect(),
            bits,
        }
    }

    pub fn neg(&self) -> LambdaElem {
        let m = Self::mask(self.bits);
        LambdaElem {
            coeffs: self.coeffs.iter().map(|&c| c.wrapping_neg() & m).collect(),
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &LambdaElem) -> LambdaElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LambdaElem) -> LambdaElem {
        let (bits, deg) = self.compatible(o);
        let m = Self::mask(bits);
        let mut out = vec![0u64; deg + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(deg + 1) {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(deg + 1 - i) {
                out[i + j] = out[i + j].wrapping_add(a.wrapping_mul(b)) & m;
            }
        }
        LambdaElem { coeffs: out, bits }
    }

    pub fn scale(&self, k: i128) -> LambdaElem {
        self.mul(&LambdaElem::constant(k, self.bits, self.degree_cap()))
    }

    /// Multiply by a 2-adic scalar; the coefficient precision drops to the
    /// scalar's precision if that is lower.
    pub fn scale_padic(&self, z: &PadicInt) -> LambdaElem {
        let bits = self.bits.min(z.precision());
        let zc = (z.value() & Self::mask(bits) as u128) as i128;
        self.with_bits(bits).scale(zc)
    }

    pub fn with_bits(&self, bits: u32) -> LambdaElem {
        let bits = bits.min(self.bits);
        let m = Self::mask(bits);
        LambdaElem {
            coeffs: self.coeffs.iter().map(|&c| c & m).collect(),
            bits,
        }
    }

    /// Inverse of a unit (odd constant term) by Newton iteration.
    pub fn inverse(&self) -> Result<LambdaElem> {
        if self.coeffs[0] % 2 == 0 {
            return Err(Error::Precondition("Λ element is not a unit".into()));
        }
        let (bits, deg) = (self.bits, self.degree_cap());
        let two = LambdaElem::constant(2, bits, deg);
        let mut x = LambdaElem::one(bits, deg);
        for _ in 0..8 {
            x = x.mul(&two.sub(&self.mul(&x)));
        }
        Ok(x)
    }

    pub fn pow(&self, n: i64) -> Result<LambdaElem> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = LambdaElem::one(self.bits, self.degree_cap());
        let mut b = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// `(1+T)^k`.
    pub fn one_plus_t_pow(k: i64, bits: u32, degree: usize) -> LambdaElem {
        LambdaElem::from_coeffs(&[1, 1], bits, degree)
            .pow(k)
            .expect("1+T is a unit")
    }

    /// Canonical representative modulo `(2,T)^n`: coefficient `j` is reduced
    /// mod `2^{max(0, n-j)}`.
    pub fn reduce_mod_ideal(&self, n: u32) -> LambdaElem {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let k = n.saturating_sub(j as u32).min(self.bits);
                c & Self::mask(k)
            })
            .collect();
        LambdaElem {
            coeffs,
            bits: self.bits,
        }
    }

    /// Equality modulo `(2,T)^n`.
    pub fn eq_mod_ideal(&self, o: &LambdaElem, n: u32) -> bool {
        let (bits, deg) = self.compatible(o);
        assert!(
            n as usize <= deg + 1 && n <= bits,
            "truncation too coarse for (2,T)^{n}"
        );
        let a = self.with_bits(bits).reduce_mod_ideal(n);
        let b = o.with_bits(bits).reduce_mod_ideal(n);
        (0..=deg).all(|j| a.coeffs[j] == b.coeffs[j])
    }
}

impl fmt::Display for LambdaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(i64, usize)> = Vec::new();
        for j in (0..self.coeffs.len()).rev() {
            let c = self.signed_coeff(j);
            if c != 0 {
                terms.push((c, j));
            }
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, &(c, j)) in terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = match j {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{j}"),
            };
            if j == 0 {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}{mono}")?;
            }
        }
        Ok(())
    }
}

/// Which generators map to `1+T` under Φ; all others map to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    t_gens: Vec<usize>,
}

impl Specialization {
    pub fn new(t_gens: &[usize]) -> Specialization {
        Specialization {
            t_gens: t_gens.to_vec(),
        }
    }

    /// The specialization of the free group on `w01, w02, w1, ..., w_{d-1}`.
    pub fn cyclotomic_pair() -> Specialization {
        Specialization::new(&[W01, W02])
    }

    pub fn exponent(&self, g: usize) -> i64 {
        i64::from(self.t_gens.contains(&g))
    }

    /// Exponent of `1+T` in the image of a word.
    pub fn weight(&self, w: &Word) -> i64 {
        w.letters.iter().map(|&(g, e)| self.exponent(g) * e).sum()
    }

    pub fn image(&self, w: &Word, bits: u32, degree: usize) -> LambdaElem {
        LambdaElem::one_plus_t_pow(self.weight(w), bits, degree)
    }
}

/// Generator id of `w01`.
pub const W01: usize = 0;
/// Generator id of `w02`.
pub const W02: usize = 1;

/// Generator id of `w_i` for `1 ≤ i`.
pub fn w_id(i: usize) -> usize {
    i + 1
}

/// The word `w_i`, with the convention `w_d = 1`.
pub fn w_word(i: usize, d: usize) -> Word {
    if i == d {
        Word::identity()
    } else {
        Word::gen(w_id(i))
    }
}

/// `Φ(∂w/∂g)` computed with the Fox product rule.
pub fn fox_phi(w: &Word, g: usize, spec: &Specialization, bits: u32, degree: usize) -> LambdaElem {
    let mut acc = LambdaElem::zero(bits, degree);
    let mut prefix: i64 = 0;
    let sg = spec.exponent(g);
    for &(h, e) in &w.letters {
        if h == g {
            // ∂(g^e)/∂g = Σ_{k=0}^{e-1} g^k (e > 0), or -Σ_{k=1}^{|e|} g^{-k} (e < 0)
            let mut part = LambdaElem::zero(bits, degree);
            if e > 0 {
                for k in 0..e {
                    part = part.add(&LambdaElem::one_plus_t_pow(prefix + sg * k, bits, degree));
                }
            } else {
                for k in 1..=(-e) {
                    part = part.sub(&LambdaElem::one_plus_t_pow(prefix - sg * k, bits, degree));
                }
            }
            acc = acc.add(&part);
        }
        prefix += spec.exponent(h) * e;
    }
    acc
}

/// A formal product `Π base_k^{z_k}` of words with trivial image in the
/// Φ-quotient, raised to 2-adic exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KernelProduct {
    factors: Vec<(Word, PadicInt)>,
}

impl KernelProduct {
    pub fn new() -> KernelProduct {
        KernelProduct::default()
    }

    /// Append a factor; the base must have exponent sum zero over the
    /// generators sent to `1+T`.
    pub fn push(&mut self, base: Word, z: PadicInt, spec: &Specialization) -> Result<()> {
        if spec.weight(&base) != 0 {
            return Err(Error::Precondition(format!(
                "{base} does not lie in the kernel of the specialization"
            )));
        }
        self.factors.push((base, z));
        Ok(())
    }

    pub fn factors(&self) -> &[(Word, PadicInt)] {
        &self.factors
    }
}

/// `Σ z_k Φ(∂ base_k / ∂g)`, the derivative of a kernel product.
pub fn fox_phi_kernel(
    kp: &KernelProduct,
    g: usize,
    spec: &Specialization,
    bits: u32,
    degree: usize,
) -> Result<LambdaElem> {
    let mut acc = LambdaElem::zero(bits, degree);
    for (base, z) in &kp.factors {
        if spec.weight(base) != 0 {
            return Err(Error::Precondition(format!("{base} is not in the kernel")));
        }
        acc = acc.add(&fox_phi(base, g, spec, bits, degree).scale_padic(z));
    }
    Ok(acc)
}

/// Determinant by cofactor expansion.
pub fn lambda_det(m: &[Vec<LambdaElem>]) -> Result<LambdaElem> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::OutOfRange(
            "determinant of a non-square matrix".into(),
        ));
    }
    if n > 8 {
        return Err(Error::OutOfRange(format!("determinant size {n} exceeds 8")));
    }
    if n == 0 {
        return Ok(LambdaElem::one(DEFAULT_LAMBDA_BITS, DEFAULT_LAMBDA_DEGREE));
    }
    let cols: Vec<usize> = (0..n).collect();
    Ok(det_rec(m, 0, &cols))
}

fn det_rec(m: &[Vec<LambdaElem>], row: usize, cols: &[usize]) -> LambdaElem {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc: Option<LambdaElem> = None;
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = m[row][c].mul(&det_rec(m, row + 1, &rest));
        let term = if k % 2 == 1 { term.neg() } else { term };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap_or_else(|| {
        let e = &m[row][cols[0]];
        LambdaElem::zero(e.bits(), e.degree_cap())
    })
}

/// Truncated non-commutative power series in `X_0, X_1, ...` with
/// coefficients mod `modulus`, keeping monomials of length `≤ cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcSeries {
    terms: BTreeMap<Vec<usize>, u64>,
    modulus: u64,
    cap: usize,
}

/// Multi-index length cap for Magnus coefficients.
pub const MAGNUS_CAP: usize = 4;

fn binom_signed(e: i64, k: usize) -> i128 {
    // C(e, k) for any integer e
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for j in 0..k as i128 {
        num *= e as i128 - j;
        den *= j + 1;
    }
    num / den
}

impl NcSeries {
    pub fn one(modulus: u64, cap: usize) -> NcSeries {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), 1 % modulus);
        NcSeries {
            terms,
            modulus,
            cap,
        }
    }

    /// The Magnus image `(1 + X_g)^e`.
    pub fn letter(g: usize, e: i64, modulus: u64, cap: usize) -> NcSeries {
        let mut s = NcSeries::one(modulus, cap);
        for k in 1..=cap {
            let c = binom_signed(e, k).rem_euclid(modulus as i128) as u64;
            if c != 0 {
                s.terms.insert(vec![g; k], c);
            }
        }
        s
    }

    pub fn magnus(w: &Word, modulus: u64, cap: usize) -> NcSeries {
        let mut s = NcSeries::one(modulus, cap);
        for &(g, e) in w.letters() {
            s = s.mul(&NcSeries::letter(g, e, modulus, cap));
        }
        s
    }

    pub fn mul(&self, o: &NcSeries) -> NcSeries {
        let mut terms: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (i, &a) in &self.terms {
            for (j, &b) in &o.terms {
                if i.len() + j.len() > self.cap {
                    continue;
                }
                let mut k = i.clone();
                k.extend_from_slice(j);
                let v = terms.entry(k).or_insert(0);
                *v = ((*v as u128 + a as u128 * b as u128) % self.modulus as u128) as u64;
            }
        }
        terms.retain(|_, v| *v != 0);
        NcSeries {
            terms,
            modulus: self.modulus,
            cap: self.cap,
        }
    }

    pub fn coeff(&self, index: &[usize]) -> u64 {
        self.terms.get(index).copied().unwrap_or(0)
    }
}

/// The mod `p` Magnus coefficient `ε_{I,p}(w)`.
///
/// Only contiguous pieces of `I` can contribute, so the expansion is tracked
/// on the intervals of `I` rather than on all monomials.
pub fn magnus_coeff(w: &Word, index: &[usize], p: u64) -> Result<u64> {
    if index.len() > MAGNUS_CAP {
        return Err(Error::OutOfRange(format!(
            "multi-index length {} exceeds {MAGNUS_CAP}",
            index.len()
        )));
    }
    let n = index.len();
    // c[s][t] = coefficient of X_{I[s..t]} in the expansion of the prefix
    let mut c = vec![vec![0i128; n + 1]; n + 1];
    for (s, row) in c.iter_mut().enumerate() {
        row[s] = 1;
    }
    let pm = p as i128;
    for &(g, e) in w.letters() {
        let mut next = vec![vec![0i128; n + 1]; n + 1];
        for s in 0..=n {
            for t in s..=n {
                let mut v = 0i128;
                for u in s..=t {
                    if index[u..t].iter().all(|&x| x == g) {
                        v += c[s][u] * binom_signed(e, t - u);
                    }
                }
                next[s][t] = v.rem_euclid(pm);
            }
        }
        c = next;
    }
    Ok(c[0][n].rem_euclid(pm) as u64)
}
