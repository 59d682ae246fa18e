mod common;

use common::*;
use num_complex::Complex64;
use qpairs::charsum::{c_assemble, c_bruteforce, c_prime_power, closed_form_c, s_bruteforce, s_rational};
use qpairs::counting::{congruence_filter, exact_count, integer_box, weighted_count, zeros_in_box, CountConfig};
use qpairs::delta_kernel::{reconstruct_delta, DeltaKernel};
use qpairs::forms::validate_pair;
use qpairs::integrals::{make_weight, WeightFunction, WeightKind};
use qpairs::local_series::{enumerate_zero_count, local_density, HenselCounter};
use qpairs::{pairs, CharSumConfig, Method, QuadricPair, RealBox};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: Complex64, tol: f64) -> bool {
    (a - b.re).abs() <= tol * (1.0 + b.re.abs()) && b.im.abs() <= 1e-6 * (1.0 + b.re.abs())
}

#[test]
fn c_brute_matches_literal_triple_sum() {
    let cfg = CharSumConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs_list = vec![pairs::n2(), pairs::n3()];
    pairs_list.push(random_pair(&mut rng, 2));
    pairs_list.push(random_pair(&mut rng, 3));
    for pair in &pairs_list {
        let n = pair.n();
        for (q1, q2) in [(1, 1), (2, 1), (1, 3), (2, 3), (4, 2), (3, 3), (5, 2), (6, 1)] {
            for m in [vec![0; n], (0..n as i64).map(|i| i + 1).collect::<Vec<_>>()] {
                let lit = literal_c(pair, q1, q2, &m);
                let got = c_bruteforce(pair, q1, q2, &m, &cfg).unwrap();
                assert!(close(got.value, lit, 1e-8), "{q1} {q2} {m:?}: {} vs {lit}", got.value);
                let s_lit = literal_s(pair, q1, q2, &m);
                let s_got = s_bruteforce(pair, q1, q2, &m, &cfg).unwrap();
                assert!(close(s_got.value, s_lit, 1e-8), "S {q1} {q2} {m:?}");
            }
        }
    }
}

#[test]
fn identity_q2_three_gives_minus_six() {
    let pair = validate_pair(vec![vec![1, 0], vec![0, 2]], vec![vec![1, 0], vec![0, 1]]).unwrap();
    let cfg = CharSumConfig::default();
    assert!((c_bruteforce(&pair, 1, 3, &[0, 0], &cfg).unwrap().value + 6.0).abs() < 1e-9);
    assert!((literal_c(&pair, 1, 3, &[0, 0]).re + 6.0).abs() < 1e-9);
    let z = closed_form_c(&pair, 3, 1, &[0, 0]).unwrap();
    assert!((z.re + 6.0).abs() < 1e-9);
}

#[test]
fn trivial_moduli() {
    let cfg = CharSumConfig::default();
    let pair = pairs::n3();
    assert_eq!(c_bruteforce(&pair, 1, 1, &[4, -1, 7], &cfg).unwrap().value, 1.0);
    assert_eq!(s_bruteforce(&pair, 1, 1, &[4, -1, 7], &cfg).unwrap().value, 1.0);
    use num_rational::Rational64;
    let half = Rational64::new(1, 2);
    let one = Rational64::from_integer(1);
    let m = [one, one, one];
    assert_eq!(s_rational(&pair, half, one, &m, &cfg).unwrap().value, 0.0);
}

#[test]
fn hensel_zero_frequency_matches_literal() {
    let cfg = CharSumConfig::default();
    for pair in [pairs::n2(), pairs::n3()] {
        let zero = vec![0; pair.n()];
        for p in [3u64, 5, 7] {
            if !pair.is_good_prime(p) {
                continue;
            }
            for (r, l) in [(1, 0), (1, 1), (2, 0), (0, 2), (2, 1)] {
                if p.pow(r + l) > 50 {
                    continue;
                }
                let v = c_prime_power(&pair, p, r, l, &zero, &cfg).unwrap();
                let lit = literal_c(&pair, p.pow(r), p.pow(l), &zero);
                assert!(close(v.value, lit, 1e-8), "p={p} r={r} l={l}: {} ({:?}) vs {lit}", v.value, v.method);
            }
            let hc = HenselCounter::new(&pair, p);
            assert!((hc.c_zero(1, 1) - literal_c(&pair, p, p, &zero).re).abs() < 1e-6);
        }
    }
}

#[test]
fn closed_form_at_cube_of_prime() {
    let pair = pairs::n3();
    let cfg = CharSumConfig::default();
    for m in [[0i64, 0, 0], [1, 2, 0], [3, 0, 9]] {
        let z = closed_form_c(&pair, 3, 3, &m).unwrap();
        let lit = literal_c(&pair, 1, 27, &m);
        assert!((z - lit).norm() < 1e-6 * (1.0 + lit.norm()), "{m:?}: {z} vs {lit}");
        let v = c_prime_power(&pair, 3, 0, 3, &m, &cfg).unwrap();
        assert_eq!(v.method, Method::ClosedForm);
    }
}

#[test]
fn assembly_on_spec_moduli() {
    let cfg = CharSumConfig::default();
    let pair = pairs::n2();
    let m = [3, -2];
    let a = c_assemble(&pair, 6, 10, &m, &cfg).unwrap().value;
    let b = c_bruteforce(&pair, 6, 10, &m, &cfg).unwrap().value;
    assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn densities_match_literal_enumeration() {
    let cfg = CharSumConfig::default();
    for pair in [pairs::n2(), pairs::n3()] {
        for (p, k) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let lit = literal_zero_count(&pair, p, k);
            assert_eq!(enumerate_zero_count(&pair, p, k), lit as u128);
            let d = local_density(&pair, p, k, &cfg).unwrap();
            let expect = lit as f64 / (p as f64).powi(k as i32 * (pair.n() as i32 - 2));
            assert!((d.density - expect).abs() < 1e-12 * expect.max(1.0));
        }
    }
    // The lifted count agrees with enumeration where both are available.
    let pair = pairs::n3();
    let hc = HenselCounter::new(&pair, 5);
    assert_eq!(hc.count(3, 3, 3).to_string(), literal_zero_count(&pair, 5, 3).to_string());
}

#[test]
fn fast_count_matches_scan_n4() {
    let pair = pairs::n4();
    let bx = RealBox::cube(4, -1.0, 1.0);
    let cfg = CountConfig::default();
    let fast = exact_count(&pair, 10.0, &bx, &cfg).unwrap();
    let scan = scan_count(&pair, &integer_box(10.0, &bx));
    assert_eq!(fast, scan);
    assert!(fast > 1);
}

#[test]
fn fast_count_matches_scan_small_shipped() {
    let cfg = CountConfig::default();
    let cases: Vec<(QuadricPair, RealBox)> = vec![
        (pairs::n2(), RealBox::cube(2, -1.0, 1.0)),
        (pairs::n3(), RealBox::cube(3, -1.0, 1.0)),
        (pairs::n3(), RealBox::cube(3, 0.0, 1.0)),
        (pairs::n4(), pairs::n4_box()),
        (pairs::n4(), RealBox::new(vec![-1.0, 0.0, -0.5, 0.2], vec![1.0, 1.0, 0.5, 1.0]).unwrap()),
    ];
    for (pair, bx) in &cases {
        for b in [4.0, 7.0, 12.0] {
            let fast = exact_count(pair, b, bx, &cfg).unwrap();
            assert_eq!(fast, scan_count(pair, &integer_box(b, bx)), "n={} B={b}", pair.n());
        }
    }
    let zs = zeros_in_box(&pairs::n3(), 12.0, &RealBox::cube(3, -1.0, 1.0), &cfg).unwrap();
    assert!(zs.iter().all(|z| pairs::n3().q1.eval(z) == 0 && pairs::n3().q2.eval(z) == 0));
}

#[test]
fn fast_count_matches_scan_random_nondiagonal() {
    let cfg = CountConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..6 {
        let pair = random_pair(&mut rng, 3);
        let bx = RealBox::cube(3, -1.0, 1.0);
        assert_eq!(exact_count(&pair, 9.0, &bx, &cfg).unwrap(), scan_count(&pair, &integer_box(9.0, &bx)));
        let pair = random_pair(&mut rng, 4);
        let bx = RealBox::cube(4, -1.0, 1.0);
        assert_eq!(exact_count(&pair, 5.0, &bx, &cfg).unwrap(), scan_count(&pair, &integer_box(5.0, &bx)));
    }
}

#[test]
fn weighted_count_sandwich() {
    let cfg = CountConfig::default();
    let pair = pairs::n4();
    let bx = RealBox::cube(4, -1.0, 1.0);
    let sharp = WeightFunction::sharp(bx.clone());
    let b = 8.0;
    assert_eq!(weighted_count(&pair, b, &sharp, &cfg).unwrap(), exact_count(&pair, b, &bx, &cfg).unwrap() as f64);
    let w = WeightFunction { kind: WeightKind::SmoothBox, bx: bx.clone(), sharpness_h: 4.0 };
    let v = weighted_count(&pair, b, &w, &cfg).unwrap();
    let inner = exact_count(&pair, b, &bx.thicken(-0.25), &cfg).unwrap() as f64;
    let outer = exact_count(&pair, b, &bx.thicken(0.25), &cfg).unwrap() as f64;
    assert!(inner <= v && v <= outer, "{inner} {v} {outer}");
}

#[test]
fn weighted_count_n3_direct() {
    let cfg = CountConfig::default();
    let pair = pairs::n3();
    let w = pairs::n3_weight().unwrap();
    let sup = w.support();
    let mut direct = 0.0;
    let r = integer_box(12.0, &sup);
    for x in r[0].0..=r[0].1 {
        for y in r[1].0..=r[1].1 {
            for z in r[2].0..=r[2].1 {
                if x * x == y * y && x * x + y * y == 2 * z * z {
                    direct += w.eval(&[x as f64 / 12.0, y as f64 / 12.0, z as f64 / 12.0]);
                }
            }
        }
    }
    let got = weighted_count(&pair, 12.0, &w, &cfg).unwrap();
    assert!((got - direct).abs() < 1e-12 * direct, "{got} vs {direct}");
    assert!(direct > 0.0);
}

#[test]
fn congruence_filter_matches_scan() {
    let ibox = [(-5i64, 7), (0, 9), (-3, 3)];
    for pair in [pairs::n3(), {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        random_pair(&mut rng, 3)
    }] {
        for q in 1..=24u64 {
            let got = congruence_filter(&pair.q2.matrix, q, &ibox);
            let mut scan = Vec::new();
            for a in ibox[0].0..=ibox[0].1 {
                for b in ibox[1].0..=ibox[1].1 {
                    for c in ibox[2].0..=ibox[2].1 {
                        if pair.q2.eval(&[a, b, c]).rem_euclid(q as i128) == 0 {
                            scan.push(vec![a, b, c]);
                        }
                    }
                }
            }
            assert_eq!(got, scan, "q={q}");
        }
    }
}

#[test]
fn delta_identity_small_q() {
    let k = DeltaKernel::new(10.0).unwrap();
    for n in -30..=30i64 {
        let want = if n == 0 { 1.0 } else { 0.0 };
        assert!((reconstruct_delta(&k, n) - want).abs() < 1e-8, "n={n}");
    }
}

#[test]
fn smooth_weight_rejects_singular_support() {
    let pair = pairs::n3();
    let bx = RealBox::cube(3, 0.0, 1.0);
    assert!(make_weight(&pair, WeightKind::SmoothBox, bx, 2.0).is_err());
}

#[test]
fn diagonal_zero_frequency_matches_literal() {
    // exercises the square-orbit shortcut, including powers of 2 and mixed moduli
    let pair = QuadricPair::diagonal(&[1, 2, -3], &[1, -1, 2]).unwrap();
    let cfg = CharSumConfig::default();
    let zero = [0i64; 3];
    for (q1, q2) in [(8u64, 1u64), (16, 2), (9, 3), (27, 1), (5, 5), (12, 2), (25, 1)] {
        let c = c_bruteforce(&pair, q1, q2, &zero, &cfg).unwrap();
        assert!(close(c.value, literal_c(&pair, q1, q2, &zero), 1e-9), "C q=({q1},{q2})");
        let s = s_bruteforce(&pair, q1, q2, &zero, &cfg).unwrap();
        assert!(close(s.value, literal_s(&pair, q1, q2, &zero), 1e-9), "S q=({q1},{q2})");
    }
}
