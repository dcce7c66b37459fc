use primelink::arith::{
    dlog, jacobi, kronecker, legendre, pow_mod, primes_in, primitive_root, quartic_symbol, sqrt_mod,
};
use primelink::fox::{
    fox_phi, lambda_det, magnus_coeff, LambdaElem, NcSeries, Specialization, Word, MAGNUS_CAP, W01,
    W02,
};
use primelink::iwasawa::{extended_q_matrix, fitting_from_coeffs, ideal_mod, CoeffSet};
use primelink::linking::{lk, lk_mod, lk_parity, LkValue};
use primelink::padic::PadicInt;
use primelink::quadfield::{class_number, splits};
use primelink::redei::{redei_hypotheses, redei_symbol, redei_symbol_symmetric};
use proptest::prelude::*;
use std::sync::OnceLock;

const BITS: u32 = 16;
const DEG: usize = 8;

fn odd_primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_in(3, 2000))
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(odd_primes().to_vec())
}

fn word(gens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens, -3i64..=3), 0..max_len).prop_map(|ls| Word::from_letters(&ls))
}

fn lambda() -> impl Strategy<Value = LambdaElem> {
    prop::collection::vec(-1000i128..1000, 1..5)
        .prop_map(|cs| LambdaElem::from_coeffs(&cs, BITS, DEG))
}

fn coeff_set(d: usize) -> impl Strategy<Value = CoeffSet> {
    let n = d + 1;
    (
        prop::collection::vec(0i128..4096, d),
        prop::collection::vec(0u8..2, n * n),
        prop::collection::vec(0i64..2, n * n * n),
    )
        .prop_map(move |(c0, c, k)| {
            let mut cs = CoeffSet::zero(d);
            for i in 1..=d {
                cs.set_c0(i, c0[i - 1]).unwrap();
            }
            for i in 0..n {
                for j in 1..n {
                    if i != j {
                        cs.set_c(i, j, c[i * n + j]).unwrap();
                    }
                }
                for a in 0..n {
                    for b in a + 1..n {
                        cs.set_ciab(i, a, b, Some(k[(i * n + a) * n + b])).unwrap();
                    }
                }
            }
            cs
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn legendre_is_multiplicative(l in odd_prime(), a in -5000i128..5000, b in -5000i128..5000) {
        let lhs = legendre(a * b, l).unwrap().value();
        let rhs = legendre(a, l).unwrap().value() * legendre(b, l).unwrap().value();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_and_kronecker_agree_with_legendre(l in odd_prime(), a in -5000i64..5000) {
        let leg = legendre(a as i128, l).unwrap().value();
        prop_assert_eq!(jacobi(a as i128, l), leg);
        prop_assert_eq!(kronecker(a, l), leg);
    }

    #[test]
    fn quartic_squares_to_one(l in odd_prime(), a in 1i128..5000) {
        prop_assume!(l % 4 == 1);
        let z = a * a % l as i128;
        prop_assume!(z != 0);
        prop_assert_eq!(quartic_symbol(z, l).unwrap().value(), legendre(a, l).unwrap().value());
    }

    #[test]
    fn sqrt_mod_squares_back(l in odd_prime(), a in -5000i128..5000) {
        match sqrt_mod(a, l) {
            Some(r) => prop_assert_eq!(pow_mod(r, 2, l) as i128, a.rem_euclid(l as i128)),
            None => prop_assert_eq!(legendre(a, l).unwrap().value(), -1),
        }
    }

    #[test]
    fn dlog_inverts_pow(l in odd_prime(), k in 0u64..100_000) {
        let g = primitive_root(l).unwrap();
        let e = k % (l - 1);
        prop_assert_eq!(dlog(g, pow_mod(g, e, l) as i128, l).unwrap(), e);
    }

    #[test]
    fn padic_ring_laws(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in -10i128.pow(12)..10i128.pow(12), b in -10i128.pow(12)..10i128.pow(12)) {
        let n = 20;
        let x = PadicInt::new(p, a, n).unwrap();
        let y = PadicInt::new(p, b, n).unwrap();
        prop_assert_eq!(x.add(&y).unwrap(), PadicInt::new(p, a + b, n).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), PadicInt::new(p, a * b, n).unwrap());
        prop_assert_eq!(x.sub(&x).unwrap(), PadicInt::zero(p, n).unwrap());
        if a % p as i128 != 0 {
            prop_assert_eq!(x.mul(&x.inverse().unwrap()).unwrap(), PadicInt::one(p, n).unwrap());
        }
        let px = x.mul_int(p as i128);
        prop_assert_eq!(px.div_by_p().unwrap().reduce(n - 1), x.reduce(n - 1));
    }

    #[test]
    fn linking_parity_matches_lk(l in odd_prime(), lp in odd_prime()) {
        prop_assume!(l != lp);
        let v = lk(l, lp, 2, 8).unwrap();
        prop_assert_eq!(v.mod_p(2), lk_parity(l, lp));
        prop_assert_eq!(lk_mod(l, lp, 2).unwrap(), lk_parity(l, lp));
    }

    #[test]
    fn cyclotomic_linking_parity(l in odd_prime()) {
        match lk(l, 2, 2, 16).unwrap() {
            LkValue::Cyclotomic { x, .. } => prop_assert_eq!(x.residue(1) as u64, lk_parity(l, 2)),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn lambda_ring_laws(a in lambda(), b in lambda(), c in lambda()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn lambda_units_invert(a in lambda()) {
        prop_assume!(a.coeff(0) % 2 == 1);
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a.mul(&inv), LambdaElem::one(BITS, DEG));
    }

    #[test]
    fn word_group_laws(u in word(4, 8), v in word(4, 8), w in word(4, 8)) {
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        prop_assert_eq!(u.mul(&v).inverse(), v.inverse().mul(&u.inverse()));
    }

    #[test]
    fn fox_product_rule(u in word(4, 10), v in word(4, 10), g in 0usize..4) {
        let spec = Specialization::cyclotomic_pair();
        let lhs = fox_phi(&u.mul(&v), g, &spec, BITS, DEG);
        let rhs = fox_phi(&u, g, &spec, BITS, DEG)
            .add(&spec.image(&u, BITS, DEG).mul(&fox_phi(&v, g, &spec, BITS, DEG)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_inverse_rule(u in word(4, 10), g in 0usize..4) {
        let spec = Specialization::cyclotomic_pair();
        let lhs = fox_phi(&u.inverse(), g, &spec, BITS, DEG);
        let rhs = spec.image(&u.inverse(), BITS, DEG).mul(&fox_phi(&u, g, &spec, BITS, DEG)).neg();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_fundamental_formula(u in word(4, 12)) {
        let spec = Specialization::cyclotomic_pair();
        let t = LambdaElem::t(BITS, DEG);
        let lhs = fox_phi(&u, W01, &spec, BITS, DEG)
            .add(&fox_phi(&u, W02, &spec, BITS, DEG))
            .mul(&t);
        let rhs = spec.image(&u, BITS, DEG).sub(&LambdaElem::one(BITS, DEG));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_power_linearity(u in word(4, 6), n in -4i64..=4, g in 0usize..4) {
        // for words of weight zero the derivative of u^n is n times that of u
        let spec = Specialization::cyclotomic_pair();
        let zero_weight = u.mul(&Word::gen(W01).pow(-spec.weight(&u)));
        let lhs = fox_phi(&zero_weight.pow(n), g, &spec, BITS, DEG);
        let rhs = fox_phi(&zero_weight, g, &spec, BITS, DEG).scale(n as i128);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn magnus_interval_matches_series(u in word(3, 8), idx in prop::collection::vec(0usize..3, 1..=MAGNUS_CAP)) {
        let s = NcSeries::magnus(&u, 2, MAGNUS_CAP);
        prop_assert_eq!(magnus_coeff(&u, &idx, 2).unwrap(), s.coeff(&idx));
    }

    #[test]
    fn magnus_is_multiplicative(u in word(3, 6), v in word(3, 6), idx in prop::collection::vec(0usize..3, 1..=3)) {
        let m = 9;
        let lhs = NcSeries::magnus(&u.mul(&v), m, 3);
        let rhs = NcSeries::magnus(&u, m, 3).mul(&NcSeries::magnus(&v, m, 3));
        prop_assert_eq!(lhs.coeff(&idx), rhs.coeff(&idx));
    }

    #[test]
    fn commutator_exponent_sums_vanish(u in word(4, 6), v in word(4, 6), g in 0usize..4) {
        prop_assert_eq!(Word::commutator(&u, &v).exponent_sum(g), 0);
    }

    #[test]
    fn ideal_normal_form_is_canonical(a in lambda(), b in lambda(), k in -20i128..20, m in 1u32..=3) {
        let base = ideal_mod(&[a.clone(), b.clone()], m, BITS, DEG).unwrap();
        let swapped = ideal_mod(&[b.clone(), a.clone()], m, BITS, DEG).unwrap();
        let shifted = ideal_mod(&[a.clone(), b.add(&a.scale(k))], m, BITS, DEG).unwrap();
        let again = ideal_mod(&base, m, BITS, DEG).unwrap();
        prop_assert_eq!(&base, &swapped);
        prop_assert_eq!(&base, &shifted);
        prop_assert_eq!(&base, &again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conjugate_relator_negates(cs in (1usize..=3).prop_flat_map(coeff_set)) {
        let x = extended_q_matrix(&cs, BITS, 6).unwrap();
        let last = x[0].len() - 1;
        for i in 0..x[0].len() {
            prop_assert_eq!(&x[1][i], &x[0][i].neg());
        }
        for row in &x {
            prop_assert_eq!(&row[last], &row[0].neg());
        }
    }

    #[test]
    fn ideal_ignores_milnor_lifts(cs in (2usize..=3).prop_flat_map(coeff_set), pick in 0usize..64, eps in 0u8..2) {
        let unknown: Vec<(usize, usize, usize)> = {
            let d = cs.d;
            let mut v = Vec::new();
            for i in 0..=d { for a in 0..=d { for b in a + 1..=d { v.push((i, a, b)); } } }
            v
        };
        let (i, a, b) = unknown[pick % unknown.len()];
        let mut alt = cs.clone();
        alt.set_ciab(i, a, b, cs.ciab(i, a, b).map(|v| v + 2)).unwrap();
        let x = fitting_from_coeffs(&cs, eps).unwrap();
        let y = fitting_from_coeffs(&alt, eps).unwrap();
        prop_assert_eq!(x.minors, y.minors);
        prop_assert_eq!(x.ideal_generators, y.ideal_generators);
    }

    #[test]
    fn determinant_of_triangular(diag in prop::collection::vec(lambda(), 1..5)) {
        let n = diag.len();
        let m: Vec<Vec<LambdaElem>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i].clone() } else if j > i { LambdaElem::t(BITS, DEG) } else { LambdaElem::zero(BITS, DEG) }).collect())
            .collect();
        let want = diag.iter().fold(LambdaElem::one(BITS, DEG), |acc, x| acc.mul(x));
        prop_assert_eq!(lambda_det(&m).unwrap(), want);
    }

    #[test]
    fn class_number_and_splitting(d in 1u64..3000, p in prop::sample::select(vec![3u64, 5, 7, 11, 13])) {
        prop_assume!((2..).take_while(|k| k * k <= d).all(|k| d % (k * k) != 0));
        prop_assert!(class_number(d).unwrap() >= 1);
        let disc = primelink::quadfield::discriminant(d).unwrap();
        match splits(p, d) {
            Ok(s) => prop_assert_eq!(s, kronecker(disc, p) == 1),
            Err(_) => prop_assert_eq!(kronecker(disc, p), 0),
        }
    }
}

/// Ordered triples `a < b < c` on which all three rotations are defined.
fn admissible_triples() -> &'static [(u64, u64, u64)] {
    static T: OnceLock<Vec<(u64, u64, u64)>> = OnceLock::new();
    T.get_or_init(|| {
        let ps = primes_in(2, 700);
        let mut out = Vec::new();
        for (x, &a) in ps.iter().enumerate() {
            for (y, &b) in ps.iter().enumerate().skip(x + 1) {
                if !redei_hypotheses(a, b, a).unwrap() {
                    continue;
                }
                for &c in &ps[y + 1..] {
                    if redei_hypotheses(a, b, c).unwrap()
                        && redei_hypotheses(b, c, a).unwrap()
                        && redei_hypotheses(a, c, b).unwrap()
                    {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn redei_pair_symmetry(t in prop::sample::select(admissible_triples().to_vec()), k in 0usize..3) {
        let (a, b, i) = [(t.0, t.1, t.2), (t.1, t.2, t.0), (t.0, t.2, t.1)][k];
        prop_assert_eq!(redei_symbol(a, b, i).unwrap(), redei_symbol(b, a, i).unwrap());
    }

    #[test]
    fn redei_full_reciprocity(t in prop::sample::select(admissible_triples().to_vec())) {
        let (a, b, c) = t;
        let v = redei_symbol_symmetric(a, b, c).unwrap();
        prop_assert_eq!(redei_symbol_symmetric(b, c, a).unwrap(), v);
        prop_assert_eq!(redei_symbol_symmetric(c, a, b).unwrap(), v);
        prop_assert_eq!(redei_symbol_symmetric(b, a, c).unwrap(), v);
    }
}
