use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use termcheck_core::{parse_program, parse_query, test_parallel, test_sequential, DetectorConfig, TestConfig};

const GROWING: &str = "
p([X|Y],N) :- size([X|Y]) < N, p([X,X|Y],N).
";

const APPEND: &str = "
append([],X,X).
append([X|Y],U,[X|Z]) :- append(Y,U,Z).
";

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("query-batch");
    let cases = [
        ("growing-lists", GROWING, (20..60).map(|n| format!("p([a],{n})")).collect::<Vec<_>>(), 64),
        (
            "append-splits",
            APPEND,
            (1..40)
                .map(|n| {
                    let items: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                    format!("append(A,B,[{}])", items.join(","))
                })
                .collect(),
            2,
        ),
    ];
    for (name, text, queries, depth) in cases {
        let program = parse_program(text).unwrap();
        let queries: Vec<_> = queries.iter().map(|q| parse_query(q).unwrap()).collect();
        let config =
            TestConfig { detector: DetectorConfig { depth, ..DetectorConfig::default() }, ..TestConfig::default() };
        group.bench_with_input(BenchmarkId::new("sequential", name), &queries, |b, qs| {
            b.iter(|| test_sequential(&program, qs, &config))
        });
        group.bench_with_input(BenchmarkId::new("parallel", name), &queries, |b, qs| {
            b.iter(|| test_parallel(&program, qs, &config))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
