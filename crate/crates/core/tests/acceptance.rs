//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use yorum::corpus::{generate_synthetic, SyntheticCorpus};
use yorum::embed::{pair_loss, pair_loss_grad, SequenceEncoding};
use yorum::harness::{confusion, emit_report, metrics, mse, run_experiment, ConfusionMatrix, ExperimentRun};
use yorum::lemma::lemmatize_sentence;
use yorum::models::{
    train_gaussian_nb, train_knn, train_linreg, train_svm, GruConfig, GruNetwork, KnnParams, LinRegParams, NbParams,
    SvmParams,
};
use yorum::spellkit::{correct_sentence, correct_token};
use yorum::textnorm::turkish_lowercase;
use yorum::{
    CorrectorConfig, ExperimentConfig, FeatureSet, KeyboardMatrix, Label, LemmaLexicon, Lexicon, ModelKind,
    SyntheticSpec, Token, VariantId,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tokens(words: &[&str]) -> Vec<Token> {
    words
        .iter()
        .map(|w| Token::new(turkish_lowercase(w)).unwrap())
        .collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn synthetic(n_docs: usize, typo_rate: f64, seed: u64) -> SyntheticCorpus {
    generate_synthetic(
        &SyntheticSpec::with_default_vocab(n_docs, typo_rate, seed),
        &KeyboardMatrix::turkish_q(),
    )
    .unwrap()
}

fn golden_pairs() -> Outcome {
    let lex = LemmaLexicon::turkish_default();
    let cases = [
        (
            vec![
                "Yazılan",
                "notları",
                "dikkate",
                "almadığınız",
                "için",
                "size",
                "şöyle",
                "kötü",
                "bir",
                "puan",
                "verelim",
            ],
            vec![
                "yazmak", "not", "dikkat", "almamak", "için", "siz", "şöyle", "kötü", "bir", "puan", "vermek",
            ],
        ),
        (
            vec![
                "Tam",
                "bir",
                "buçuk",
                "saatte",
                "geldi",
                "Defalarca",
                "aramamıza",
                "rağmen",
                "telefonu",
                "asla",
                "açmadılar",
            ],
            vec![
                "tam",
                "bir",
                "buçuk",
                "saat",
                "gelmek",
                "defalarca",
                "aramak",
                "rağmen",
                "telefonu",
                "asla",
                "açmamak",
            ],
        ),
    ];
    let mut pairs = 0;
    let mut mismatches = 0;
    let mut count = |got: &[Token], want: &[Token]| {
        pairs += want.len();
        mismatches += got.len().abs_diff(want.len()) + got.iter().zip(want).filter(|(a, b)| a != b).count();
    };
    for (raw, lemmas) in &cases {
        count(&lemmatize_sentence(&lex, &tokens(raw)), &tokens(lemmas));
    }
    let lexicon = Lexicon::turkish_default();
    let keyboard = KeyboardMatrix::turkish_q();
    let raw = tokens(&["Sürekli", "icerik", "yanlis", "geliyor"]);
    let want = tokens(&["sürekli", "içerik", "yanlış", "geliyor"]);
    for use_keyboard in [true, false] {
        count(
            &correct_sentence(&lexicon, &keyboard, &raw, &CorrectorConfig::with_keyboard(use_keyboard)),
            &want,
        );
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches over {pairs} token pairs"),
    )
}

fn keyboard_fidelity() -> Outcome {
    let rows = "a z s w q\nb v g h n\nc x d f v\nç ş l k m\nd e r f c x s\ne w s d r\nf r t g v c d\ng t y h b v f\nğ p ş i ü\nh y u j n b g\nı u j k o\ni ü ğ ş\nj u ı k m n h\nk ı o l ö m j\nl o p ş ç ö k";
    let kb = KeyboardMatrix::turkish_q();
    let mut bad = Vec::new();
    for line in rows.lines() {
        let mut letters = line.split(' ').map(|s| s.chars().next().unwrap());
        let key = letters.next().unwrap();
        let want: Vec<char> = letters.collect();
        if kb.neighbors(key) != want.as_slice() {
            bad.push(key);
        }
    }
    let mut a: Vec<char> = kb.neighbors('a').to_vec();
    a.sort_unstable();
    let a_ok = a == ['q', 's', 'w', 'z'];
    outcome(
        bad.is_empty() && a_ok,
        format!("15 rows checked, mismatched keys {bad:?}; neighbors(a) = {a:?}"),
    )
}

fn keyboard_efficacy() -> Outcome {
    let synth = synthetic(2000, 1.0, 21);
    let kb = KeyboardMatrix::turkish_q();
    let lexicon = Lexicon::turkish_default();
    // Alignment oracle: every typo is one substitution by a neighbor of the intended key.
    let malformed = synth
        .typos
        .iter()
        .filter(|t| {
            let (o, ty): (Vec<char>, Vec<char>) = (t.original.chars().collect(), t.typed.chars().collect());
            let diffs: Vec<usize> = (0..o.len()).filter(|&i| o.get(i) != ty.get(i)).collect();
            o.len() != ty.len() || diffs.len() != 1 || !kb.is_adjacent(ty[diffs[0]], o[diffs[0]])
        })
        .count();
    if malformed > 0 || !synth.typos.iter().all(|t| lexicon.contains(&t.original)) {
        return outcome(
            false,
            format!("{malformed} typos are not single adjacent-key substitutions of lexicon words"),
        );
    }
    let rate = |use_keyboard: bool| {
        let config = CorrectorConfig::with_keyboard(use_keyboard);
        let mut memo: HashMap<&str, Token> = HashMap::new();
        let recovered = synth
            .typos
            .iter()
            .filter(|t| {
                let fixed = memo
                    .entry(&t.typed)
                    .or_insert_with(|| correct_token(&lexicon, &kb, &Token::new(t.typed.clone()).unwrap(), &config));
                fixed.as_str() == t.original
            })
            .count();
        recovered as f64 / synth.typos.len() as f64
    };
    let (with, without) = (rate(true), rate(false));
    let gap = (with - without) * 100.0;
    outcome(
        gap >= 5.0 && with >= 0.90,
        format!(
            "{} typos: recovery {:.2}% with keyboard, {:.2}% without ({gap:+.2} pp; need >= +5 pp and >= 90%)",
            synth.typos.len(),
            with * 100.0,
            without * 100.0
        ),
    )
}

fn metric_oracles() -> Outcome {
    let mut r = rng(77);
    let mut failures = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..200);
        let p: Vec<Label> = (0..n).map(|_| Label::from(r.random_bool(0.6))).collect();
        let t: Vec<Label> = (0..n).map(|_| Label::from(r.random_bool(0.4))).collect();
        let cm = confusion(&p, &t).unwrap();
        let (mut tp, mut tn, mut fp, mut fn_) = (0u64, 0u64, 0u64, 0u64);
        for (a, b) in p.iter().zip(&t) {
            match (a.as_u8(), b.as_u8()) {
                (1, 1) => tp += 1,
                (0, 0) => tn += 1,
                (1, 0) => fp += 1,
                _ => fn_ += 1,
            }
        }
        if cm != (ConfusionMatrix { tp, tn, fp, fn_ }) {
            failures += 1;
        }

        let cm = ConfusionMatrix {
            tp: r.random_range(0..500),
            tn: r.random_range(0..500),
            fp: r.random_range(0..500),
            fn_: r.random_range(1..500),
        };
        let m = metrics(&cm);
        let [tp, tn, fp, fn_] = [cm.tp, cm.tn, cm.fp, cm.fn_].map(|c| c as f64);
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = tp / (tp + fn_);
        let f = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        if !(close(m.accuracy, (tp + tn) / (tp + tn + fp + fn_))
            && close(m.precision, precision)
            && close(m.recall, recall)
            && close(m.f_measure, f))
        {
            failures += 1;
        }

        let n = r.random_range(1..300);
        let pred: Vec<f64> = (0..n).map(|_| r.random_range(-0.5..1.5)).collect();
        let truth: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(0..2u8))).collect();
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for (a, b) in pred.iter().zip(&truth) {
            let y = (a - b) * (a - b) - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        if !close(mse(&pred, &truth).unwrap(), sum / n as f64) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{failures} disagreements over 3 x 1000 random instances"),
    )
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

fn gradient_checks() -> Outcome {
    let h = 1e-5;
    let mut worst_gru: f64 = 0.0;
    let mut worst_sgns: f64 = 0.0;
    for seed in 0..5u64 {
        let mut r = rng(500 + seed);
        for bidirectional in [false, true] {
            let config = GruConfig {
                hidden: if seed % 2 == 0 { vec![3] } else { vec![2, 3] },
                bidirectional,
                seed,
                ..GruConfig::default()
            };
            let mut net = GruNetwork::init(3, &config).unwrap();
            for p in net.params_mut() {
                *p = r.random_range(-0.8..0.8);
            }
            let seqs: Vec<SequenceEncoding> = (0..3)
                .map(|i| {
                    let (len, real) = (5, 2 + i);
                    SequenceEncoding {
                        len,
                        dim: 3,
                        steps: (0..len * 3)
                            .map(|k| if k < real * 3 { r.random_range(-1.0..1.0) } else { 0.0 })
                            .collect(),
                        mask: (0..len).map(|t| t < real).collect(),
                    }
                })
                .collect();
            let batch: Vec<(&SequenceEncoding, f64)> = seqs.iter().zip([1.0, 0.0, 1.0]).collect();
            let (_, grad) = net.loss_and_grad(&batch).unwrap();
            for i in 0..grad.len() {
                let orig = net.params()[i];
                net.params_mut()[i] = orig + h;
                let up = net.loss_and_grad(&batch).unwrap().0;
                net.params_mut()[i] = orig - h;
                let down = net.loss_and_grad(&batch).unwrap().0;
                net.params_mut()[i] = orig;
                worst_gru = worst_gru.max(relative_error(grad[i], (up - down) / (2.0 * h)));
            }
        }

        let dim = 4;
        let mut vecs: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect();
        let loss = |v: &[Vec<f64>]| {
            let negs: Vec<&[f64]> = v[2..].iter().map(Vec::as_slice).collect();
            pair_loss(&v[0], &v[1], &negs)
        };
        let negs: Vec<&[f64]> = vecs[2..].iter().map(Vec::as_slice).collect();
        let g = pair_loss_grad(&vecs[0], &vecs[1], &negs);
        let analytic: Vec<Vec<f64>> = [g.center, g.positive].into_iter().chain(g.negatives).collect();
        for which in 0..vecs.len() {
            for k in 0..dim {
                let orig = vecs[which][k];
                vecs[which][k] = orig + h;
                let up = loss(&vecs);
                vecs[which][k] = orig - h;
                let down = loss(&vecs);
                vecs[which][k] = orig;
                worst_sgns = worst_sgns.max(relative_error(analytic[which][k], (up - down) / (2.0 * h)));
            }
        }
    }
    outcome(
        worst_gru < 1e-4 && worst_sgns < 1e-4,
        format!("max relative error: GRU {worst_gru:.2e}, SGNS pair loss {worst_sgns:.2e} (limit 1e-4)"),
    )
}

fn features(r: &mut ChaCha8Rng, n: usize, dim: usize) -> FeatureSet {
    let labels: Vec<Label> = (0..n).map(|i| Label::from(i % 2 == 0)).collect();
    let vectors = labels
        .iter()
        .map(|l| {
            (0..dim)
                .map(|_| r.random_range(-1.0..1.0) + if l.is_positive() { 0.4 } else { -0.4 })
                .collect()
        })
        .collect();
    FeatureSet::new(vectors, labels).unwrap()
}

fn classifier_oracles() -> Outcome {
    let mut r = rng(9);
    let mut notes = Vec::new();

    // k-NN against an exhaustive sorted scan.
    let f = features(&mut r, 60, 3);
    let knn = train_knn(&f, &KnnParams::default()).unwrap();
    let mut knn_bad = 0;
    for _ in 0..200 {
        let q: Vec<f64> = (0..3).map(|_| r.random_range(-1.5..1.5)).collect();
        let mut order: Vec<(f64, usize)> = f
            .vectors()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let votes = order[..7].iter().filter(|(_, i)| f.labels()[*i].is_positive()).count();
        if knn.predict(&q).unwrap() != Label::from(votes > 3) {
            knn_bad += 1;
        }
    }
    notes.push(format!("k-NN {knn_bad}/200 off"));

    // Gaussian NB against the closed form on tiny 1-D sets.
    let mut nb_worst: f64 = 0.0;
    for trial in 0..50 {
        let n = 2 + trial % 4;
        let xs: Vec<f64> = (0..=n).map(|_| r.random_range(-3.0..3.0)).collect();
        let mut labels: Vec<Label> = (0..=n).map(|i| Label::from(i % 2 == 0)).collect();
        labels[0] = Label::Positive;
        labels[1] = Label::Negative;
        let f = FeatureSet::new(xs.iter().map(|&x| vec![x]).collect(), labels.clone()).unwrap();
        let model = train_gaussian_nb(&f, &NbParams::default()).unwrap();
        let stats = |want: bool| {
            let v: Vec<f64> = xs
                .iter()
                .zip(&labels)
                .filter(|(_, l)| l.is_positive() == want)
                .map(|(x, _)| *x)
                .collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
            (m, var, v.len() as f64 / xs.len() as f64)
        };
        let all_m = xs.iter().sum::<f64>() / xs.len() as f64;
        let eps = 0.151 * xs.iter().map(|x| (x - all_m) * (x - all_m)).sum::<f64>() / xs.len() as f64;
        let q = r.random_range(-3.0..3.0);
        let density = |(m, var, prior): (f64, f64, f64)| {
            let v = var + eps;
            prior * (-(q - m) * (q - m) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
        };
        let (p1, p0) = (density(stats(true)), density(stats(false)));
        nb_worst = nb_worst.max((model.predict(&[q]).unwrap().1 - p1 / (p0 + p1)).abs());
    }
    notes.push(format!("NB max error {nb_worst:.1e}"));

    // Linear regression: gradient of the squared loss vanishes at the solution.
    let mut lr_worst: f64 = 0.0;
    for _ in 0..5 {
        let f = features(&mut r, 40, 4);
        let m = train_linreg(&f, &LinRegParams::default()).unwrap();
        let mut grad = [0.0; 5];
        for (v, y) in f.vectors().iter().zip(f.targets()) {
            let res = m.predict(v).unwrap() - y;
            for j in 0..4 {
                grad[j] += v[j] * res;
            }
            grad[4] += res;
        }
        lr_worst = lr_worst.max(grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    }
    notes.push(format!("linreg gradient norm {lr_worst:.1e}"));

    // SVM: KKT on random data (documented tolerance 10 x tol) and XOR.
    let params = SvmParams::default();
    let kkt_tol = 10.0 * params.tol;
    let f = features(&mut r, 80, 2);
    let svm = train_svm(&f, &params).unwrap();
    let mut kkt_bad = 0;
    for (v, l) in f.vectors().iter().zip(f.labels()) {
        let y = if l.is_positive() { 1.0 } else { -1.0 };
        let alpha: f64 = svm
            .support_vectors
            .iter()
            .zip(&svm.dual_coef)
            .filter(|(s, _)| *s == v)
            .map(|(_, a)| a.abs())
            .sum();
        let margin = y * svm.decision(v).unwrap();
        let ok = if alpha <= 0.0 {
            margin >= 1.0 - kkt_tol
        } else if alpha >= params.c - 1e-12 {
            margin <= 1.0 + kkt_tol
        } else {
            (margin - 1.0).abs() <= kkt_tol
        };
        kkt_bad += usize::from(!ok);
    }
    let xor = FeatureSet::new(
        vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0], vec![-1.0, 1.0]],
        vec![Label::Positive, Label::Positive, Label::Negative, Label::Negative],
    )
    .unwrap();
    let xsvm = train_svm(&xor, &params).unwrap();
    let xor_ok = xor
        .vectors()
        .iter()
        .zip(xor.labels())
        .all(|(v, l)| xsvm.predict(v).unwrap() == *l);
    notes.push(format!(
        "SVM KKT violations {kkt_bad}/80, XOR {}",
        if xor_ok { "separated" } else { "missed" }
    ));

    let pass = knn_bad == 0 && nb_worst <= 1e-9 && lr_worst < 1e-6 && kkt_bad == 0 && xor_ok;
    outcome(pass, notes.join("; "))
}

fn accuracy_of(run: &ExperimentRun, variant: VariantId, model: ModelKind) -> Option<f64> {
    run.rows
        .iter()
        .find(|r| r.variant == variant && r.model == model)
        .and_then(|r| r.accuracy)
}

fn separability() -> Outcome {
    let corpus = synthetic(2000, 0.0, 31).corpus;
    let config = ExperimentConfig {
        seed: 31,
        variants: vec![VariantId::Default],
        ..ExperimentConfig::default()
    };
    let run = run_experiment(&corpus, &config).unwrap();
    let mut pass = run.rows.len() == ModelKind::ALL.len();
    let mut notes = Vec::new();
    for row in &run.rows {
        match row.accuracy {
            Some(a) => {
                pass &= a >= 0.85;
                notes.push(format!("{} {:.1}%", row.model, a * 100.0));
            }
            None => {
                pass &= row.mse <= 0.15;
                notes.push(format!("{} mse {:.4}", row.model, row.mse));
            }
        }
    }
    for cell in run.manifest.cells.iter().filter(|c| c.error.is_some()) {
        notes.push(format!(
            "{} failed: {}",
            cell.model,
            cell.error.as_deref().unwrap_or_default()
        ));
    }
    outcome(pass, notes.join(", "))
}

fn ablation() -> Outcome {
    let seeds = [41u64, 42, 43, 44, 45];
    let models = [ModelKind::NaiveBayes, ModelKind::Gru];
    let mut sums: HashMap<(VariantId, ModelKind), f64> = HashMap::new();
    for &seed in &seeds {
        let corpus = synthetic(2000, 0.3, seed).corpus;
        let config = ExperimentConfig {
            seed,
            variants: vec![VariantId::Default, VariantId::NoOperation],
            models: models.to_vec(),
            ..ExperimentConfig::default()
        };
        let run = run_experiment(&corpus, &config).unwrap();
        for v in [VariantId::Default, VariantId::NoOperation] {
            for m in models {
                *sums.entry((v, m)).or_default() += accuracy_of(&run, v, m).unwrap_or(f64::NAN);
            }
        }
    }
    let mean = |v, m| sums[&(v, m)] / seeds.len() as f64;
    let mut pass = true;
    let mut notes = Vec::new();
    for m in models {
        let (d, n) = (mean(VariantId::Default, m), mean(VariantId::NoOperation, m));
        pass &= d >= n;
        notes.push(format!(
            "{m}: default {:.2}% vs no-operation {:.2}% (gap {:+.2} pp)",
            d * 100.0,
            n * 100.0,
            (d - n) * 100.0
        ));
    }
    outcome(pass, notes.join("; "))
}

fn determinism() -> Outcome {
    let corpus = synthetic(300, 0.2, 61).corpus;
    let mut config = ExperimentConfig {
        seed: 61,
        ..ExperimentConfig::default()
    };
    config.sgns.dim = 24;
    config.params.gru.epochs = 3;
    let a = run_experiment(&corpus, &config).unwrap();
    let b = run_experiment(&corpus, &config).unwrap();
    let rows_equal = a.rows.len() == b.rows.len() && a.rows.iter().zip(&b.rows).all(|(x, y)| x.same_scores(y));
    let reports_equal = emit_report(&a.rows).unwrap().text == emit_report(&b.rows).unwrap().text;
    outcome(
        rows_equal && reports_equal && a.manifest == b.manifest && a.rows.len() == 30,
        format!(
            "{} rows per run; rows equal {rows_equal}, reports equal {reports_equal}, manifests equal {}",
            a.rows.len(),
            a.manifest == b.manifest
        ),
    )
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        ("1 golden token pairs", Some(Duration::from_secs(1)), golden_pairs),
        (
            "2 keyboard matrix fidelity",
            Some(Duration::from_secs(1)),
            keyboard_fidelity,
        ),
        (
            "3 keyboard method efficacy",
            Some(Duration::from_secs(30)),
            keyboard_efficacy,
        ),
        ("4 metric oracle equivalence", None, metric_oracles),
        ("5 gradient correctness", Some(Duration::from_secs(60)), gradient_checks),
        ("6 classifier oracles", None, classifier_oracles),
        (
            "7 end-to-end separability",
            Some(Duration::from_secs(300)),
            separability,
        ),
        ("8 ablation direction", None, ablation),
        ("9 determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = result.pass && in_time;
        failed += usize::from(!pass);
        let budget_note = budget.map(|b| format!(", budget {}s", b.as_secs())).unwrap_or_default();
        println!(
            "{} criterion {name}: {} [{:.2}s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
