use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use transpiece::corpus::{
    dedup_corpus, length_filter, load_corpus_prefix, load_sentences, split_lines,
    write_corpus_prefix, ParallelCorpus, Sentence,
};
use transpiece::decoding::{
    beam_search, retrieve_piece_table, DecodeConfig, RewardMode, TranslationModel,
};
use transpiece::evaluation::{
    bucket_label, corpus_bleu, count_gamma, length_ratio, mean, per_sentence_similarity,
    range_label, similarity_histogram, split_half_by_similarity, OccurIndex, DEFAULT_GAMMAS,
    DEFAULT_GAMMA_EDGES,
};
use transpiece::par::{self, Execution};
use transpiece::pieces::{binarize_table, build_piece_table, PieceTable};
use transpiece::retrieval::{build_index, InvertedIndex, Retriever};
use transpiece::similarity::compute_match;
use transpiece::synth::{build_lexicon, generate, SynthConfig};

use crate::error::CliError;
use crate::model_spec::load_model;
use crate::{
    BenchArgs, DecodeArgs, EvalArgs, EvalMode, IndexArgs, PiecesArgs, PrepareArgs, SynthArgs,
};

fn load_with_index(
    corpus: &Path,
    index: Option<&Path>,
) -> Result<(ParallelCorpus, InvertedIndex), CliError> {
    let corpus = load_corpus_prefix(corpus)?;
    let index = match index {
        Some(path) => {
            let idx = InvertedIndex::load(path).map_err(|e| CliError::read(path, e))?;
            if idx.doc_count() != corpus.len() {
                return Err(CliError::input(format!(
                    "index {} covers {} sentences but the corpus has {}",
                    path.display(),
                    idx.doc_count(),
                    corpus.len()
                )));
            }
            idx
        }
        None => build_index(&corpus),
    };
    Ok((corpus, index))
}

/// Whitespace-tokenized lines; empty lines are kept as empty outputs.
fn read_token_lines(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    Ok(split_lines(&text)
        .into_iter()
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::write(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::write(path, e))
}

fn reward_mode(binary: bool) -> RewardMode {
    if binary {
        RewardMode::Binary
    } else {
        RewardMode::Similarity
    }
}

fn table_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("{i:06}.tsv"))
}

pub fn prepare(a: &PrepareArgs) -> Result<(), CliError> {
    let corpus = load_corpus_prefix(&a.corpus)?;
    let read = corpus.len();
    let deduped = dedup_corpus(corpus);
    let after_dedup = deduped.len();
    let filtered = length_filter(deduped, a.max_len);
    write_corpus_prefix(&filtered, &a.out).map_err(|e| CliError::write(&a.out, e))?;
    eprintln!(
        "read {read} pairs, {after_dedup} after dedup, {} after length filter (max {})",
        filtered.len(),
        a.max_len
    );
    Ok(())
}

pub fn index(a: &IndexArgs) -> Result<(), CliError> {
    let corpus = load_corpus_prefix(&a.corpus)?;
    let index = build_index(&corpus);
    index.save(&a.out).map_err(|e| CliError::write(&a.out, e))?;
    eprintln!(
        "indexed {} sentences, {} terms",
        index.doc_count(),
        index.term_count()
    );
    Ok(())
}

pub fn pieces(a: &PiecesArgs, exec: Execution) -> Result<(), CliError> {
    let (corpus, index) = load_with_index(&a.corpus.corpus, a.corpus.index.as_deref())?;
    let inputs = load_sentences(&a.input)?;
    let mode = reward_mode(a.binary_reward);
    let tables = par::map(&inputs, exec, |x| {
        retrieve_piece_table(&corpus, &index, x, a.m, mode)
    });
    create_dir(&a.out_dir)?;
    for (i, t) in tables.iter().enumerate() {
        write_text(&table_path(&a.out_dir, i), &t.to_tsv())?;
    }
    eprintln!(
        "wrote {} piece tables to {}",
        tables.len(),
        a.out_dir.display()
    );
    Ok(())
}

fn piece_tables_for(
    a: &DecodeArgs,
    inputs: &[Sentence],
    exec: Execution,
) -> Result<Vec<PieceTable>, CliError> {
    if a.baseline {
        return Ok(vec![PieceTable::empty(); inputs.len()]);
    }
    if let Some(dir) = &a.pieces_dir {
        return (0..inputs.len())
            .map(|i| {
                let path = table_path(dir, i);
                let table = PieceTable::load(&path).map_err(|e| CliError::read(&path, e))?;
                Ok(if a.binary_reward {
                    binarize_table(&table)
                } else {
                    table
                })
            })
            .collect();
    }
    let corpus_path = a.corpus.as_deref().ok_or_else(|| {
        CliError::input("--corpus is required unless --baseline or --pieces-dir is given")
    })?;
    let (corpus, index) = load_with_index(corpus_path, a.index.as_deref())?;
    let mode = reward_mode(a.binary_reward);
    Ok(par::map(inputs, exec, |x| {
        retrieve_piece_table(&corpus, &index, x, a.m, mode)
    }))
}

pub fn decode(a: &DecodeArgs, exec: Execution) -> Result<(), CliError> {
    let config = DecodeConfig {
        lambda: a.lambda,
        beam_size: a.beam_size,
        max_output_len: a.max_len,
    };
    config.validate()?;
    let model = load_model(&a.model, a.noise_eps, a.seed)?;
    let inputs = load_sentences(&a.input)?;
    let tables = piece_tables_for(a, &inputs, exec)?;
    let jobs: Vec<(&Sentence, &PieceTable)> = inputs.iter().zip(&tables).collect();
    let results = par::try_map(&jobs, exec, |(x, t)| beam_search(&model, x, t, &config))?;
    let mut out = String::new();
    for r in &results {
        out.push_str(&model.vocab().render(&r.best().tokens));
        out.push('\n');
    }
    match &a.output {
        Some(path) => write_text(path, &out),
        None => std::io::stdout()
            .write_all(out.as_bytes())
            .map_err(|e| CliError::runtime(format!("stdout: {e}"))),
    }
}

fn subset<T: Clone>(items: &[T], positions: &[usize]) -> Vec<T> {
    positions.iter().map(|&i| items[i].clone()).collect()
}

pub fn eval(a: &EvalArgs, exec: Execution) -> Result<(), CliError> {
    let hyps = read_token_lines(&a.hyp)?;
    let refs = read_token_lines(&a.reference)?;
    if let Some(i) = refs.iter().position(Vec::is_empty) {
        return Err(CliError::input(format!(
            "{}: line {}: empty reference",
            a.reference.display(),
            i + 1
        )));
    }
    let baseline = a
        .baseline_hyp
        .as_deref()
        .map(read_token_lines)
        .transpose()?;
    let mut report: Vec<(String, String)> = vec![("sentences".into(), hyps.len().to_string())];
    let bleu = corpus_bleu(&hyps, &refs)?;
    if let Some(b) = &baseline {
        // validates the baseline length as well
        corpus_bleu(b, &refs)?;
    }
    let needs_corpus = a.mode.iter().any(|m| *m != EvalMode::Bleu);
    let loaded = match (&a.corpus, needs_corpus) {
        (Some(p), true) => Some(load_with_index(p, a.index.as_deref())?),
        (None, true) => {
            return Err(CliError::input(
                "--corpus is required for similarity and count-gamma modes",
            ))
        }
        _ => None,
    };
    if let Some(dir) = &a.tsv_dir {
        create_dir(dir)?;
    }
    for mode in &a.mode {
        match mode {
            EvalMode::Bleu => {
                report.push(("bleu".into(), format!("{bleu:.2}")));
                report.push((
                    "length_ratio".into(),
                    format!("{:.4}", length_ratio(&hyps, &refs)?),
                ));
                if let Some(b) = &baseline {
                    let base = corpus_bleu(b, &refs)?;
                    report.push(("baseline_bleu".into(), format!("{base:.2}")));
                    report.push(("bleu_gain".into(), format!("{:.2}", bleu - base)));
                }
            }
            EvalMode::Similarity => {
                let (corpus, index) = loaded.as_ref().expect("corpus loaded");
                let src_path = a
                    .source
                    .as_deref()
                    .ok_or_else(|| CliError::input("--source is required for similarity mode"))?;
                let sources = load_sentences(src_path)?;
                if sources.len() != refs.len() {
                    return Err(CliError::input(format!(
                        "{} source sentences but {} references",
                        sources.len(),
                        refs.len()
                    )));
                }
                let sims = per_sentence_similarity(&sources, corpus, index, a.m, exec);
                report.push(("similarity_mean".into(), format!("{:.4}", mean(&sims))));
                let hist = similarity_histogram(&sims)?;
                for (b, (count, pct)) in hist.counts.iter().zip(hist.percents()).enumerate() {
                    report.push((
                        format!("similarity {}", bucket_label(b)),
                        format!("{count} ({pct:.1}%)"),
                    ));
                }
                if sims.len() >= 2 {
                    let (high, low) = split_half_by_similarity(&sims)?;
                    for (name, half) in [("high", &high), ("low", &low)] {
                        let h = corpus_bleu(&subset(&hyps, half), &subset(&refs, half))?;
                        report.push((format!("half_{name}_bleu"), format!("{h:.2}")));
                        if let Some(b) = &baseline {
                            let base = corpus_bleu(&subset(b, half), &subset(&refs, half))?;
                            report.push((format!("half_{name}_gain"), format!("{:.2}", h - base)));
                        }
                    }
                }
                if let Some(dir) = &a.tsv_dir {
                    write_text(&dir.join("histogram.tsv"), &hist.to_tsv())?;
                }
            }
            EvalMode::CountGamma => {
                let (corpus, _) = loaded.as_ref().expect("corpus loaded");
                let targets: Vec<&[transpiece::Token]> =
                    corpus.iter().map(|e| e.target.tokens()).collect();
                let occ = OccurIndex::build(&targets);
                let counts = count_gamma(&hyps, &refs, &occ)?;
                let base_counts = baseline
                    .as_ref()
                    .map(|b| count_gamma(b, &refs, &occ))
                    .transpose()?;
                for g in DEFAULT_GAMMAS {
                    report.push((format!("count_gamma {g}"), counts.exact(g).to_string()));
                }
                let ranged = counts.ranged(&DEFAULT_GAMMA_EDGES);
                let base_ranged = base_counts.as_ref().map(|c| c.ranged(&DEFAULT_GAMMA_EDGES));
                let mut tsv = String::from("gamma\tcount\n");
                for (i, count) in ranged.iter().enumerate() {
                    let label = range_label(&DEFAULT_GAMMA_EDGES, i);
                    report.push((format!("count_gamma_range {label}"), count.to_string()));
                    if let Some(br) = &base_ranged {
                        report.push((
                            format!("count_gamma_ratio {label}"),
                            format!("{:.3}", *count as f64 / br[i].max(1) as f64),
                        ));
                    }
                    tsv.push_str(&format!("{label}\t{count}\n"));
                }
                if let Some(dir) = &a.tsv_dir {
                    write_text(&dir.join("count_gamma.tsv"), &tsv)?;
                    let mut by_order = String::from("n\tgamma\tcount\n");
                    for ((n, g), c) in &counts.by_order {
                        by_order.push_str(&format!("{n}\t{g}\t{c}\n"));
                    }
                    write_text(&dir.join("count_gamma_by_order.tsv"), &by_order)?;
                }
            }
        }
    }
    let mut out = String::new();
    for (k, v) in report {
        out.push_str(&format!("{k}: {v}\n"));
    }
    print!("{out}");
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Result<(), CliError> {
    if a.repeats == 0 {
        return Err(CliError::input("--repeats must be at least 1"));
    }
    let (corpus, index) = load_with_index(&a.corpus.corpus, a.corpus.index.as_deref())?;
    let inputs = load_sentences(&a.input)?;
    if inputs.is_empty() {
        return Err(CliError::input("no input sentences"));
    }
    let model = a
        .model
        .as_deref()
        .map(|m| load_model(m, a.noise_eps, a.seed))
        .transpose()?;
    let config = DecodeConfig::default();
    let per_sentence = (inputs.len() * a.repeats) as f64;
    let mut out = String::from("stage\tM\tmean_seconds\n");
    for &m in &a.sweep {
        let (mut retrieval, mut collection, mut decoding) = (0.0, 0.0, 0.0);
        for _ in 0..a.repeats {
            for x in &inputs {
                let t = Instant::now();
                let candidates = index.search(x, m);
                retrieval += t.elapsed().as_secs_f64();

                let t = Instant::now();
                let matches: Vec<_> = candidates
                    .iter()
                    .filter_map(|c| corpus.get(c.example_id))
                    .map(|ex| compute_match(x, ex))
                    .collect();
                let table = build_piece_table(&matches);
                collection += t.elapsed().as_secs_f64();

                if let Some(model) = &model {
                    let t = Instant::now();
                    beam_search(model, x, &table, &config)?;
                    decoding += t.elapsed().as_secs_f64();
                }
            }
        }
        out.push_str(&format!(
            "retrieval\t{m}\t{:.9}\n",
            retrieval / per_sentence
        ));
        out.push_str(&format!("pieces\t{m}\t{:.9}\n", collection / per_sentence));
        if model.is_some() {
            out.push_str(&format!("decode\t{m}\t{:.9}\n", decoding / per_sentence));
        }
    }
    print!("{out}");
    Ok(())
}

fn sentence_lines(sentences: &[Sentence]) -> String {
    sentences.iter().map(|s| format!("{s}\n")).collect()
}

pub fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let mut config = SynthConfig::default();
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(n) = a.train_size {
        config.train_size = n;
    }
    if let Some(n) = a.test_size {
        config.test_size = n;
    }
    let data = generate(&config);
    create_dir(&a.out_dir)?;
    let train = a.out_dir.join("train");
    write_corpus_prefix(&data.train, &train).map_err(|e| CliError::write(&train, e))?;
    write_text(
        &a.out_dir.join("test.src"),
        &sentence_lines(&data.test_source),
    )?;
    write_text(
        &a.out_dir.join("test.ref"),
        &sentence_lines(&data.test_reference),
    )?;
    let lex_path = a.out_dir.join("lexicon.tsv");
    build_lexicon(&config)
        .save(&lex_path)
        .map_err(|e| CliError::write(&lex_path, e))?;
    eprintln!(
        "wrote {} training pairs and {} test sentences to {}",
        data.train.len(),
        data.test_source.len(),
        a.out_dir.display()
    );
    Ok(())
}
