use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dysintel::text_metrics::{normalize_hypothesis, score_ld, score_sm, GroundTruth};
use dysintel::{edit_distance, matching_chars, CharSeq};
use dysintel_bench::{decoder_stream, letters};

fn normalize(c: &mut Criterion) {
    let s = decoder_stream(400, 1);
    c.bench_function("normalize/400", |b| {
        b.iter(|| normalize_hypothesis(black_box(&s)))
    });
}

fn distances(c: &mut Criterion) {
    let a = letters(40, 2);
    let b2 = letters(40, 3);
    c.bench_function("edit_distance/40", |b| {
        b.iter(|| edit_distance(black_box(&a), black_box(&b2)))
    });
    c.bench_function("matching_chars/40", |b| {
        b.iter(|| matching_chars(black_box(&a), black_box(&b2)))
    });
}

fn scores(c: &mut Criterion) {
    let h = normalize_hypothesis(&decoder_stream(60, 4));
    let g = GroundTruth::new(CharSeq::new(letters(14, 5))).unwrap();
    c.bench_function("score_sm", |b| b.iter(|| score_sm(black_box(&h), &g)));
    c.bench_function("score_ld", |b| b.iter(|| score_ld(black_box(&h), &g)));
}

criterion_group!(benches, normalize, distances, scores);
criterion_main!(benches);
