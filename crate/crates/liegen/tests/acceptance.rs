//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use liegen::algebra::{rat_int, Monomial, Polynomial, Rational};
use liegen::flow::{
    check_locally_nilpotent, integrate, v_flow_closed_form, FlowRequest, FlowStatus,
    NilpotencyVerdict,
};
use liegen::generator::CertStore;
use liegen::parse::{format_field, parse_field};
use liegen::vectorfield::{standard_generators, VectorField};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn mono(exps: Vec<u32>) -> Monomial {
    Monomial::from_exponents(exps)
}

fn mono_field(n: usize, dir: usize, m: Monomial) -> VectorField {
    VectorField::single(n, dir, Polynomial::monomial(m, Rational::one()))
}

fn rand_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: u32, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_deg)).collect();
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=9);
        p.add_term(mono(exps), liegen::rat(num, den));
    }
    p
}

fn rand_field(rng: &mut ChaCha8Rng, n: usize, max_deg: u32, max_terms: usize) -> VectorField {
    VectorField::from_coeffs((0..n).map(|_| rand_poly(rng, n, max_deg, max_terms)).collect())
}

/// All exponent vectors of length `n` with entries at most `cap`.
fn exponent_grid(n: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=cap).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out
}

#[test]
fn criterion_1_soundness_sweep() {
    let started = Instant::now();
    let mut checked = 0usize;
    for n in 1..=3usize {
        let mut store = CertStore::new(n);
        for exps in exponent_grid(n, 3) {
            for dir in 1..=n {
                let m = mono(exps.clone());
                let target = mono_field(n, dir, m.clone());
                let cert = store.field_certificate(&target);
                assert_eq!(cert.eval(), target, "n={n} target {m} d{dir}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 4 + 16 * 2 + 64 * 3);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "PASS criterion 1: generation sweep, {checked} monomial targets exact (n = 1..3, exponents <= 3) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_higher_degree_spot_check() {
    let started = Instant::now();
    // n = 2: every monomial of total degree <= 8, both directions.
    let mut store = CertStore::new(2);
    let mut count2 = 0usize;
    for e1 in 0..=8u32 {
        for e2 in 0..=(8 - e1) {
            for dir in 1..=2usize {
                let m = mono(vec![e1, e2]);
                let target = mono_field(2, dir, m.clone());
                let cert = store.field_certificate(&target);
                assert_eq!(cert.eval(), target, "target {m} d{dir}");
                count2 += 1;
            }
        }
    }
    assert_eq!(count2, 45 * 2);
    // n = 4: twenty seeded random monomials with exponents <= 3.
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c49_4547);
    let mut store4 = CertStore::new(4);
    for _ in 0..20 {
        let exps: Vec<u32> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
        let dir = rng.gen_range(1..=4usize);
        let m = mono(exps);
        let target = mono_field(4, dir, m.clone());
        let cert = store4.field_certificate(&target);
        assert_eq!(cert.eval(), target, "target {m} d{dir}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "PASS criterion 2: degree <= 8 sweep at n = 2 plus 20 random n = 4 targets exact in {elapsed:?}"
    );
}

#[test]
fn criterion_3_head_chain_constants() {
    // n = 2: five explicit brackets as the oracle.
    let (u, v) = standard_generators(2);
    let mut by_hand = v.clone();
    for _ in 0..5 {
        by_hand = u.bracket(&by_hand);
    }
    let expected = VectorField::single(
        2,
        1,
        Polynomial::monomial(mono(vec![0, 3]), rat_int(6720)),
    );
    assert_eq!(by_hand, expected);
    assert_eq!(u.ad_iter(&v, 5), expected);

    // n = 3: the head scalar is 12!/6 = 79833600.
    let (u3, v3) = standard_generators(3);
    let head = u3.ad_iter(&v3, 9);
    let expected3 = VectorField::single(
        3,
        2,
        Polynomial::monomial(mono(vec![0, 0, 3]), rat_int(79_833_600)),
    );
    assert_eq!(head, expected3);
    println!("PASS criterion 3: head-chain constants 6720 (n = 2) and 12!/6 = 79833600 (n = 3) exact");
}

#[test]
fn criterion_4_bracket_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb7ac_4e7);
    let cases = 200usize;

    for _ in 0..cases {
        let n = rng.gen_range(1..=4usize);
        let x = rand_field(&mut rng, n, 3, 3);
        let y = rand_field(&mut rng, n, 3, 3);
        assert_eq!(x.bracket(&y), y.bracket(&x).neg(), "antisymmetry");
    }

    for _ in 0..cases {
        let n = rng.gen_range(1..=4usize);
        let x = rand_field(&mut rng, n, 3, 3);
        let y = rand_field(&mut rng, n, 3, 3);
        let z = rand_field(&mut rng, n, 3, 3);
        let a = liegen::rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
        let b = liegen::rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
        let lhs = x.scale(&a).add(&y.scale(&b)).bracket(&z);
        let rhs = x.bracket(&z).scale(&a).add(&y.bracket(&z).scale(&b));
        assert_eq!(lhs, rhs, "bilinearity");
    }

    for _ in 0..cases {
        let n = rng.gen_range(1..=4usize);
        let x = rand_field(&mut rng, n, 3, 2);
        let y = rand_field(&mut rng, n, 3, 2);
        let z = rand_field(&mut rng, n, 3, 2);
        let jacobi = x
            .bracket(&y.bracket(&z))
            .add(&y.bracket(&z.bracket(&x)))
            .add(&z.bracket(&x.bracket(&y)));
        assert!(jacobi.is_zero(), "jacobi");
    }

    for _ in 0..cases {
        let n = rng.gen_range(1..=4usize);
        let x = rand_field(&mut rng, n, 3, 3);
        let y = rand_field(&mut rng, n, 3, 3);
        let f = rand_poly(&mut rng, n, 3, 3);
        let lhs = x.bracket(&y).apply(&f);
        let rhs = x.apply(&y.apply(&f)).sub(&y.apply(&x.apply(&f)));
        assert_eq!(lhs, rhs, "operator consistency");
    }

    println!("PASS criterion 4: antisymmetry, bilinearity, Jacobi, operator consistency on {cases} random instances each");
}

#[test]
fn criterion_5_flow_vs_closed_form() {
    let started = Instant::now();
    let (_, v) = standard_generators(2);

    let mut worst = 0.0f64;
    for k in 0..=24 {
        let t = k as f64 * 0.005;
        let req = FlowRequest::from_real_start(v.clone(), &[1.0, 1.0], t);
        let res = integrate(&req).unwrap();
        assert!(matches!(res.status, FlowStatus::Reached { .. }));
        let (_, z) = res.final_state();
        let (x, y) = v_flow_closed_form(t).unwrap();
        worst = worst.max((z[0].re - x).abs() / x).max((z[1].re - y).abs() / y);
    }
    assert!(worst < 1e-6, "worst relative error {worst}");

    let mut estimates = Vec::new();
    for blowup_norm in [1e6, 1e8, 1e10] {
        let mut req = FlowRequest::from_real_start(v.clone(), &[1.0, 1.0], 0.2);
        req.blowup_norm = blowup_norm;
        let res = integrate(&req).unwrap();
        match res.status {
            FlowStatus::BlowUp { t } => {
                assert!(
                    (t - 1.0 / 7.0).abs() < 1e-3,
                    "threshold {blowup_norm:e}: t* = {t}"
                );
                estimates.push(t);
            }
            other => panic!("threshold {blowup_norm:e}: expected blow-up, got {other:?}"),
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}");
    println!(
        "PASS criterion 5: trajectory matches closed form (worst rel err {worst:.2e}), blow-up at {:?} vs 1/7 in {elapsed:?}",
        estimates
    );
}

#[test]
fn criterion_6_translation_flow_and_nilpotency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf10f);
    for _ in 0..25 {
        let n = rng.gen_range(1..=3usize);
        let (u, _) = standard_generators(n);
        let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let t_max = rng.gen_range(0.0..=2.0);
        let req = FlowRequest::from_real_start(u, &start, t_max);
        let res = integrate(&req).unwrap();
        assert!(matches!(res.status, FlowStatus::Reached { .. }));
        let (_, z) = res.final_state();
        for i in 0..n {
            let expected = if i == n - 1 { start[i] + t_max } else { start[i] };
            assert!(
                (z[i].re - expected).abs() <= 1e-12 && z[i].im.abs() <= 1e-15,
                "slot {i}: {} vs {expected}",
                z[i].re
            );
        }
    }

    let (u2, v2) = standard_generators(2);
    match check_locally_nilpotent(&u2, 10) {
        NilpotencyVerdict::Nilpotent { bound } => {
            // re-verify symbolically with exact arithmetic
            for i in 1..=2 {
                let mut f = Polynomial::variable(2, i);
                for _ in 0..bound {
                    f = u2.apply(&f);
                }
                assert!(f.is_zero(), "W^{bound}(z{i}) must vanish");
            }
        }
        other => panic!("expected nilpotent for U, got {other:?}"),
    }
    let scaling = VectorField::single(1, 1, Polynomial::variable(1, 1));
    assert_eq!(
        check_locally_nilpotent(&scaling, 25),
        NilpotencyVerdict::NotNilpotent { witness: 1 }
    );
    assert_eq!(
        check_locally_nilpotent(&v2, 25),
        NilpotencyVerdict::Inconclusive
    );
    println!("PASS criterion 6: translation flow exact to machine precision; nilpotency verdicts sound");
}

#[test]
fn criterion_7_determinism_and_round_trip() {
    let build = |text: &str, n: usize| {
        let target = parse_field(text, n).unwrap();
        let mut store = CertStore::new(n);
        store.field_certificate(&target).to_json()
    };
    for (text, n) in [
        ("z1*z2 d1 + -1/2 z1^4 d2", 2),
        ("z1^2*z2*z3 d2", 3),
        ("d1", 1),
        ("0", 2),
    ] {
        assert_eq!(build(text, n), build(text, n), "{text}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0707);
    for case in 0..500 {
        let n = rng.gen_range(1..=4usize);
        let x = rand_field(&mut rng, n, 5, 4);
        let text = format_field(&x);
        let back = parse_field(&text, n).unwrap_or_else(|e| panic!("case {case}: {text:?}: {e}"));
        assert_eq!(back, x, "case {case}: {text:?}");
    }
    println!("PASS criterion 7: serialized certificates byte-identical; parse/format round trip on 500 random fields");
}

#[test]
fn criterion_8_certificate_scaling() {
    let mut store = CertStore::new(2);
    let mut counts = Vec::new();
    for d in 1..=20u32 {
        let cert = store.monomial_certificate(&mono(vec![d, 0]), 1);
        counts.push(cert.metrics().node_count as i64);
    }
    for w in counts.windows(2) {
        assert!(w[1] - w[0] <= 4, "increment {} in {counts:?}", w[1] - w[0]);
    }
    let last = counts[19] - counts[18];
    assert!(last <= 4);
    println!(
        "PASS criterion 8: node counts for z1^d d1 grow linearly (d = 1..20, per-step increment <= 4): {counts:?}"
    );
}
