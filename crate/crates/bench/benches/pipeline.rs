use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use yorum::corpus::generate_synthetic;
use yorum::harness::{apply_variant, ExperimentContext, PreparedVariant};
use yorum::models::train_model;
use yorum::spellkit::correct_sentence;
use yorum::textnorm::tokenize;
use yorum::{
    Corpus, CorrectorConfig, ExperimentConfig, KeyboardMatrix, Lexicon, ModelKind, ModelParams, Resources,
    SyntheticSpec, VariantId,
};

fn corpus(n_docs: usize, typo_rate: f64) -> Corpus {
    let spec = SyntheticSpec::with_default_vocab(n_docs, typo_rate, 7);
    generate_synthetic(&spec, &KeyboardMatrix::turkish_q()).unwrap().corpus
}

fn prepared(corpus: &Corpus) -> PreparedVariant {
    let config = ExperimentConfig {
        seed: 7,
        ..ExperimentConfig::default()
    };
    ExperimentContext::new(corpus, &config)
        .unwrap()
        .prepare(VariantId::Default, true)
        .unwrap()
}

fn correction(c: &mut Criterion) {
    let lexicon = Lexicon::turkish_default();
    let keyboard = KeyboardMatrix::turkish_q();
    let sentences: Vec<_> = corpus(50, 0.3).items().iter().map(|d| tokenize(d.text())).collect();
    for use_keyboard in [true, false] {
        let config = CorrectorConfig::with_keyboard(use_keyboard);
        c.bench_function(&format!("correct 50 docs (keyboard {use_keyboard})"), |b| {
            b.iter(|| {
                for s in &sentences {
                    black_box(correct_sentence(&lexicon, &keyboard, s, &config));
                }
            })
        });
    }
}

fn variants(c: &mut Criterion) {
    let resources = Resources::turkish_default();
    let corpus = corpus(200, 0.3);
    for variant in [VariantId::Default, VariantId::NoOperation] {
        c.bench_function(&format!("apply {variant} to 200 docs"), |b| {
            b.iter(|| black_box(apply_variant(&corpus, variant, &resources).unwrap()))
        });
    }
}

fn models(c: &mut Criterion) {
    let p = prepared(&corpus(400, 0.1));
    let mut params = ModelParams::default();
    params.gru.epochs = 1;
    let mut group = c.benchmark_group("train on 360 docs");
    group.sample_size(10);
    for kind in ModelKind::ALL {
        group.bench_function(kind.name(), |b| {
            b.iter(|| black_box(train_model(kind, &params, &p.train).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, correction, variants, models);
criterion_main!(benches);
