use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use transpiece::decoding::{make_lexicon_model, RewardMode};
use transpiece::synth::{generate, SynthConfig};
use transpiece::{build_index, DecodeConfig, Execution, Pipeline};

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_pipeline(c: &mut Criterion) {
    let data = generate(&SynthConfig {
        train_size: 5000,
        test_size: 100,
        ..SynthConfig::default()
    });
    let index = build_index(&data.train);
    let model = make_lexicon_model(&data.lexicon, 0.3, 7);
    let pipeline = Pipeline::new(&data.train, &index, &model);
    let config = DecodeConfig::default();

    let mut group = c.benchmark_group("piece_tables");
    for m in [10, 100] {
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, &m| {
                b.iter(|| pipeline.piece_tables(&data.test_source, m, RewardMode::Similarity, exec))
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("translate_batch");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                pipeline
                    .translate_batch(&data.test_source, 10, &config, RewardMode::Similarity, exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
