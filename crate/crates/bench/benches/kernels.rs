use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qpairs::charsum::{c_assemble, c_bruteforce};
use qpairs::counting::{exact_count, nested_count};
use qpairs::delta_kernel::{h_eval, DeltaKernel};
use qpairs::pairs;
use qpairs_bench::{charsum_config, count_config, dense_ternary, n3_weight};

fn charsums(c: &mut Criterion) {
    let cfg = charsum_config();
    let dense = dense_ternary();
    let diag = pairs::n4();
    let mut g = c.benchmark_group("charsum");
    for (q1, q2) in [(6u64, 10u64), (9, 9), (12, 5)] {
        g.bench_with_input(BenchmarkId::new("brute_dense", format!("{q1}x{q2}")), &(q1, q2), |b, &(q1, q2)| {
            b.iter(|| c_bruteforce(&dense, q1, q2, black_box(&[1, -1, 2]), &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("brute_diagonal", format!("{q1}x{q2}")), &(q1, q2), |b, &(q1, q2)| {
            b.iter(|| c_bruteforce(&diag, q1, q2, black_box(&[1, -1, 2, 0]), &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("assemble_diagonal", format!("{q1}x{q2}")), &(q1, q2), |b, &(q1, q2)| {
            b.iter(|| c_assemble(&diag, q1, q2, black_box(&[1, -1, 2, 0]), &cfg).unwrap())
        });
    }
    g.finish();
}

fn kernel(c: &mut Criterion) {
    let k = DeltaKernel::new(20.0).unwrap();
    let xs: Vec<f64> = (1..=64).map(|i| i as f64 / 64.0).collect();
    c.bench_function("h_eval/64x64", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for &x in &xs {
                for &y in &xs {
                    s += h_eval(&k, x, 4.0 * y - 2.0);
                }
            }
            black_box(s)
        })
    });
}

fn counting(c: &mut Criterion) {
    let cfg = count_config();
    let mut g = c.benchmark_group("count");
    g.sample_size(10);
    let n4 = pairs::n4();
    for b in [20.0, 40.0] {
        g.bench_with_input(BenchmarkId::new("exact_n4", b), &b, |bch, &b| {
            bch.iter(|| exact_count(&n4, b, &pairs::n4_box(), &cfg).unwrap())
        });
    }
    let n3 = pairs::n3();
    let w = n3_weight().unwrap();
    for level in [1u8, 2] {
        g.bench_with_input(BenchmarkId::new("nested_n3_B12", level), &level, |bch, &level| {
            bch.iter(|| nested_count(&n3, 12.0, &w, level, &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, charsums, kernel, counting);
criterion_main!(benches);
