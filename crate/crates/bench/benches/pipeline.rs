use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use logicgrid_bench::{agent_reply, grade_pairs, puzzle, FIRST_OUTPUT, SECOND_OUTPUT};
use logicgrid_core::{compute_stats, decode_model, encode, extract_smt, parse_outcome};

fn parsing(c: &mut Criterion) {
    c.bench_function("parse_outcome/errors", |b| b.iter(|| parse_outcome(black_box(FIRST_OUTPUT))));
    c.bench_function("parse_outcome/model", |b| b.iter(|| parse_outcome(black_box(SECOND_OUTPUT))));
    let reply = agent_reply();
    c.bench_function("extract_smt", |b| b.iter(|| extract_smt(black_box(&reply))));
}

fn encoding(c: &mut Criterion) {
    for id in ["ostriches", "houses", "pets"] {
        let p = puzzle(id);
        c.bench_with_input(BenchmarkId::new("encode", id), &p, |b, p| b.iter(|| encode(black_box(p))));
    }
    let p = puzzle("ostriches");
    let outcome = parse_outcome(SECOND_OUTPUT);
    c.bench_function("decode_model/ostriches", |b| b.iter(|| decode_model(black_box(&outcome), &p)));
}

fn statistics(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_stats");
    for n in [10, 100, 1000] {
        let pairs = grade_pairs(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pairs, |b, p| b.iter(|| compute_stats(black_box(p))));
    }
    group.finish();
}

criterion_group!(benches, parsing, encoding, statistics);
criterion_main!(benches);
