//! One PASS/FAIL line per acceptance criterion, each with a wall-clock limit.

use primelink::arith::{legendre, primes_in};
use primelink::fox::{fox_phi, w_id, LambdaElem, Specialization, Word, W01, W02};
use primelink::iwasawa::{
    coeffs_from_primes, delta_closed_d2, delta_imag, fitting_approx, fitting_from_coeffs, minors,
    q_matrix, real_case, CoeffSet, Sigma, PIPELINE_BITS, PIPELINE_DEGREE,
};
use primelink::linking::lk;
use primelink::mild::is_circular;
use primelink::presentation::{
    generator_rank, relations_mod_f4, RamificationSet, TripleCommutator,
};
use primelink::quadfield::{beta_power_is_one, split_generators};
use primelink::redei::{
    conic_points, mu2, redei_closed_form, redei_hypotheses, redei_symbol_conic, star, RedeiField,
    Subfield,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T>(r: primelink::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn borromean() -> Outcome {
    let all = [2u64, 113, 593];
    for &a in &all {
        for &b in &all {
            if a != b {
                let v = e2s(lk(a, b, 2, 16))?.reduce(4);
                ensure(v == Some(0), || format!("lk({a},{b}) mod 4 = {v:?}"))?;
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            for i in 0..3 {
                if a == b {
                    continue;
                }
                let want = u8::from(i != a && i != b);
                let got = e2s(mu2(all[a], all[b], all[i]))?;
                ensure(got == want, || {
                    format!("μ2({a}{b}{i}) = {got}, expected {want}")
                })?;
            }
        }
    }
    let rels = e2s(relations_mod_f4(&[113, 593]))?;
    let want = [
        TripleCommutator::new(1, 2, 0),
        TripleCommutator::new(2, 0, 1),
        TripleCommutator::new(0, 1, 2),
    ];
    let mut shown = Vec::new();
    for (r, w) in rels.iter().zip(want) {
        let f = r.factors();
        ensure(f.len() == 1 && f[0].eq_mod_f4(&w), || {
            format!("{r} instead of {w}")
        })?;
        shown.push(r.to_string());
    }
    Ok(shown.join(", "))
}

fn null_example() -> Outcome {
    let all = [2u64, 337, 593];
    for &a in &all {
        for &b in &all {
            if a != b {
                let v = e2s(lk(a, b, 2, 16))?.reduce(4);
                ensure(v == Some(0), || format!("lk({a},{b}) mod 4 = {v:?}"))?;
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            for i in 0..3 {
                if a != b {
                    let got = e2s(mu2(all[a], all[b], all[i]))?;
                    ensure(got == 0, || format!("μ2({a}{b}{i}) = {got}"))?;
                }
            }
        }
    }
    Ok("all μ2 vanish".into())
}

fn circular() -> Outcome {
    let c = e2s(is_circular(&[13, 73, 61], 3, None, &[0, 1, 2, 3]))?;
    ensure(c.accepted, || {
        format!("(13,73,61) rejected: {:?}", c.failure())
    })?;
    let c2 = e2s(is_circular(&[7, 17, 5], 2, Some(3), &[0, 1, 2, 3]))?;
    ensure(c2.accepted, || {
        format!("(7,17,5) rejected: {:?}", c2.failure())
    })?;
    Ok(format!(
        "products {}/{} mod 3 and {}/{} mod 2",
        c.forward_product, c.backward_product, c2.forward_product, c2.backward_product
    ))
}

fn case_one_pairs() -> Vec<(u64, u64)> {
    let mut out = vec![(73, 3), (89, 11)];
    for l1 in primes_in(3, 400).into_iter().filter(|l| l % 16 == 9) {
        for l2 in primes_in(3, 60).into_iter().filter(|l| l % 8 == 3) {
            if out.len() < 8
                && !out.contains(&(l1, l2))
                && legendre(l1 as i128, l2).unwrap().value() == 1
            {
                out.push((l1, l2));
            }
        }
    }
    out
}

fn with_bits(cs: &CoeffSet, unknown: &[(usize, usize, usize)], mask: u32) -> CoeffSet {
    let mut alt = cs.clone();
    for (k, &(i, a, b)) in unknown.iter().enumerate() {
        alt.set_ciab(i, a, b, Some(((mask >> k) & 1) as i64))
            .unwrap();
    }
    alt
}

fn coherence() -> Outcome {
    let (b, d) = (PIPELINE_BITS, PIPELINE_DEGREE);
    let pairs = case_one_pairs();
    ensure(pairs.len() >= 5, || format!("only {} pairs", pairs.len()))?;
    for &(l1, l2) in &pairs {
        let cs = e2s(coeffs_from_primes(&[l1, l2], 32))?;
        let unknown = cs.unknown_bits();
        for mask in 0..1u32 << unknown.len() {
            let alt = with_bits(&cs, &unknown, mask);
            let got = e2s(minors(&e2s(q_matrix(&alt, b, d))?))?;
            let want = e2s(delta_closed_d2(&alt, b, d))?;
            for k in 0..3 {
                ensure(got[k].eq_mod_ideal(&want[k], 3), || {
                    format!(
                        "({l1},{l2}) Δ{k}: pipeline {} vs closed {}",
                        got[k], want[k]
                    )
                })?;
            }
        }
        let dc = e2s(delta_imag(l1, l2))?;
        let ap = e2s(fitting_approx(&[l1, l2], Sigma::Infinity))?;
        ensure(ap.minor_determined[0], || {
            format!("({l1},{l2}) Δ0 depends on undefined symbols")
        })?;
        ensure(ap.minors[0].eq_mod_ideal(&dc.as_lambda(b, d), 3), || {
            format!("({l1},{l2}) Δ0 = {} but delta_imag = {dc}", ap.minors[0])
        })?;
    }
    let dc = e2s(delta_imag(73, 3))?;
    ensure(dc.to_string() == "T^2 + 2T + 4 (mod 4T, 8)", || {
        format!("(73,3) gives {dc}")
    })?;
    Ok(format!("{} pairs, (73,3): {dc}", pairs.len()))
}

fn real_quadratic() -> Outcome {
    for (a, b) in [(7, 3), (23, 11)] {
        let ap = e2s(fitting_approx(&[a, b], Sigma::Infinity))?;
        ensure(
            ap.ideal_determined && ap.ideal_string() == "(2, T^2)",
            || format!("({a},{b}) ideal {}", ap.ideal_string()),
        )?;
        let v = e2s(real_case(a, b))?;
        ensure(
            v.relations == ["w1^2", "[w01, w1, w01]"] && v.pipeline_agrees,
            || format!("{v:?}"),
        )?;
    }
    Ok("(2, T^2) with relations w1^2, [w01, w1, w01]".into())
}

fn redei_triples(rng: &mut StdRng, want: usize) -> Vec<(u64, u64, u64)> {
    let ps = primes_in(2, 2000);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < want && tries < 2_000_000 {
        tries += 1;
        let a = ps[rng.gen_range(0..ps.len())];
        let b = ps[rng.gen_range(0..ps.len())];
        let i = ps[rng.gen_range(0..ps.len())];
        if a == b || i == a || i == b || out.contains(&(a, b, i)) {
            continue;
        }
        if redei_hypotheses(a, b, i).unwrap() {
            out.push((a, b, i));
        }
    }
    out
}

fn redei_soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let triples = redei_triples(&mut rng, 220);
    ensure(triples.len() >= 200, || {
        format!("only {} admissible triples", triples.len())
    })?;
    let mut overlap = 0;
    for &(a, b, i) in &triples {
        let base = e2s(redei_symbol_conic(a, b, i))?;
        let f = e2s(RedeiField::new(a, b))?;
        for sign in [1i8, -1] {
            let v = e2s(f.symbol_via(i, Subfield::First, sign))?;
            ensure(v == base, || format!("[{a},{b},{i}] flips with root sign"))?;
        }
        for pt in e2s(conic_points(star(a), star(b), 3))? {
            let g = e2s(RedeiField::with_point(a, b, pt))?;
            let v = e2s(g.symbol_at(i))?;
            ensure(v == base, || {
                format!("[{a},{b},{i}] depends on the conic point {pt:?}")
            })?;
        }
        let swapped = e2s(redei_symbol_conic(b, a, i))?;
        ensure(swapped == base, || {
            format!("[{a},{b},{i}] is not symmetric in the pair")
        })?;
        if (a % 4 != 3 || b % 4 != 3) && redei_hypotheses(a, b, a).unwrap() {
            for j in [a, b] {
                let c = e2s(redei_closed_form(a, b, j))?;
                let v = e2s(f.symbol_at(j))?;
                ensure(c == v, || {
                    format!("[{a},{b},{j}]: conic {v}, closed form {c}")
                })?;
                overlap += 1;
            }
        }
    }
    Ok(format!(
        "{} triples, {overlap} overlap cases",
        triples.len()
    ))
}

fn phi(w: &Word, g: usize) -> LambdaElem {
    fox_phi(w, g, &Specialization::cyclotomic_pair(), 16, 8)
}

fn lam(cs: &[i128]) -> LambdaElem {
    LambdaElem::from_coeffs(cs, 16, 8)
}

fn random_word(rng: &mut StdRng) -> Word {
    let n = rng.gen_range(0..12);
    let letters: Vec<(usize, i64)> = (0..n)
        .map(|_| (rng.gen_range(0..4), rng.gen_range(-3..=3)))
        .collect();
    Word::from_letters(&letters)
}

fn fox_calculus() -> Outcome {
    let (w01, w02, w1, w2) = (
        Word::gen(W01),
        Word::gen(W02),
        Word::gen(w_id(1)),
        Word::gen(w_id(2)),
    );
    let r = w01.mul(&w1).mul(&w02.inverse()).mul(&w1.inverse());
    let exact = [(W01, lam(&[1])), (W02, lam(&[-1])), (w_id(1), lam(&[0, 1]))];
    for (g, want) in exact {
        ensure(phi(&r, g) == want, || {
            format!("w01 w1 w02^-1 w1^-1 at generator {g}: {}", phi(&r, g))
        })?;
    }
    let conj = w1.mul(&w02).mul(&w1.inverse());
    let c = Word::commutator(&conj, &w01);
    let h2 = w02.inverse().mul(&w1.inverse()).mul(&w01).mul(&w1).pow(2);
    let c2 = Word::commutator(&w1.mul(&w2.inverse()).pow(2), &w01);
    let cube = [
        (&c, W01, lam(&[0, 1])),
        (&c, W02, lam(&[0, -1])),
        (&c, w_id(1), lam(&[0, 0, 1])),
        (&h2, W01, lam(&[2, 2])),
        (&h2, W02, lam(&[-2, -2])),
        (&h2, w_id(1), lam(&[0, 2])),
        (&c2, w_id(1), lam(&[0, 2])),
        (&c2, w_id(2), lam(&[0, 2])),
        (&c2, W01, lam(&[0])),
        (&c2, W02, lam(&[0])),
    ];
    for (w, g, want) in cube {
        ensure(phi(w, g).eq_mod_ideal(&want, 3), || {
            format!("{w} at {g}: {}", phi(w, g))
        })?;
    }
    let spec = Specialization::cyclotomic_pair();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let (u, v) = (random_word(&mut rng), random_word(&mut rng));
        for g in 0..4 {
            let lhs = phi(&u.mul(&v), g);
            let rhs = phi(&u, g).add(&spec.image(&u, 16, 8).mul(&phi(&v, g)));
            ensure(lhs == rhs, || format!("product rule fails on {u} · {v}"))?;
        }
        let k = rng.gen_range(-4..=4i64);
        let z = u.mul(&w01.pow(-spec.weight(&u)));
        for g in 0..4 {
            ensure(phi(&z.pow(k), g) == phi(&z, g).scale(k as i128), || {
                format!("linearity fails on ({z})^{k}")
            })?;
        }
    }
    Ok("4 reference words, 1000 word pairs".into())
}

fn random_coeffs(rng: &mut StdRng, d: usize) -> CoeffSet {
    let mut cs = CoeffSet::zero(d);
    for i in 1..=d {
        cs.set_c0(i, rng.gen_range(0..1 << 16)).unwrap();
    }
    for i in 0..=d {
        for j in 1..=d {
            if i != j {
                cs.set_c(i, j, rng.gen_range(0..2)).unwrap();
            }
        }
        for a in 0..=d {
            for b in a + 1..=d {
                cs.set_ciab(i, a, b, Some(rng.gen_range(0..2))).unwrap();
            }
        }
    }
    cs
}

fn precision_honesty() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut checked = 0;
    for n in 0..50 {
        let d = 2 + n % 2;
        let cs = random_coeffs(&mut rng, d);
        let eps = rng.gen_range(0..2u8);
        let base = e2s(fitting_from_coeffs(&cs, eps))?;
        for i in 0..=d {
            for a in 0..=d {
                for b in a + 1..=d {
                    let mut alt = cs.clone();
                    alt.set_ciab(i, a, b, cs.ciab(i, a, b).map(|v| v + 2))
                        .unwrap();
                    let other = e2s(fitting_from_coeffs(&alt, eps))?;
                    ensure(other.ideal_generators == base.ideal_generators, || {
                        format!(
                            "set {n}: c_({i},{a},{b}) + 2 changes {} to {}",
                            base.ideal_string(),
                            other.ideal_string()
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("50 sets, {checked} perturbations"))
}

fn squarefree(n: u64) -> bool {
    (2..).take_while(|k| k * k <= n).all(|k| n % (k * k) != 0)
}

fn gold_suite() -> Outcome {
    let mut cases = 0;
    for d in (1..500).filter(|&d| squarefree(d)) {
        for p in [3u64, 5] {
            let g = match split_generators(p, d) {
                Ok(g) => g,
                Err(e) if e.is_hypothesis() => continue,
                Err(e) => return Err(format!("d={d} p={p}: {e}")),
            };
            let one = e2s(beta_power_is_one(&g, 0, g.beta[0], 1))?;
            let two = e2s(beta_power_is_one(&g, 1, g.beta[1], 1))?;
            ensure(one == two, || format!("d={d} p={p}: asymmetric"))?;
            for (j, beta) in g.beta.iter().enumerate() {
                let neg = (-beta.0, -beta.1);
                let v = e2s(beta_power_is_one(&g, j, neg, 1))?;
                ensure(v == one, || {
                    format!("d={d} p={p}: depends on the sign of β")
                })?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (d, p) cases"))
}

fn rank_metadata() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let ps = primes_in(3, 500);
    for _ in 0..20 {
        let k = rng.gen_range(1..6);
        let mut s: Vec<u64> = Vec::new();
        while s.len() < k {
            let l = ps[rng.gen_range(0..ps.len())];
            if !s.contains(&l) {
                s.push(l);
            }
        }
        let set = RamificationSet::with_infinity(&s);
        let r = e2s(generator_rank(&set, 2))?;
        ensure(r == set.len() && r == k + 1, || {
            format!("{set}: rank {r}, |S| = {}", set.len())
        })?;
    }
    Ok("20 sets".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("borromean reproduction", 5, borromean),
        ("null example", 5, null_example),
        ("circular certificates", 1, circular),
        ("pipeline and closed-form coherence", 10, coherence),
        ("real quadratic reproduction", 5, real_quadratic),
        ("redei engine soundness", 60, redei_soundness),
        ("fox calculus", 30, fox_calculus),
        ("precision honesty", 30, precision_honesty),
        ("gold criterion suite", 120, gold_suite),
        ("rank metadata", 1, rank_metadata),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let within = took <= Duration::from_secs(*limit);
        let (tag, detail) = match (&out, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "{tag} {:>2} {name} [{:.2}s / {limit}s] {detail}",
            n + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
