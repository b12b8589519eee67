mod common;

use std::collections::HashSet;

use common::{concat_canonical, gold_sentences, test_lexicon};
use pertok::corpus::{
    corpus_stats, corrupt, emit_token_lines, gen_fixture, gen_fixture_with_truth, parse_token_lines,
    read_dependency_file, read_token_lines, write_dependency_file, write_token_lines, GoldCorpus,
};
use pertok::lexicon::Lexicon;
use pertok::normalize::canonical;
use pertok::tokenize::split_space;
use proptest::prelude::*;

fn corpus(sentences: Vec<Vec<String>>) -> GoldCorpus {
    GoldCorpus::from_sentences(sentences, "prop")
}

proptest! {
    #[test]
    fn corruption_conserves_characters(s in gold_sentences()) {
        let gold = corpus(s);
        for (sentence, line) in gold.sentence_slices().zip(corrupt(&gold)) {
            let pieces = split_space(&line);
            prop_assert_eq!(concat_canonical(sentence), concat_canonical(pieces.tokens()));
        }
    }

    #[test]
    fn corruption_only_over_splits(s in gold_sentences()) {
        let gold = corpus(s);
        for (sentence, line) in gold.sentence_slices().zip(corrupt(&gold)) {
            let pieces = split_space(&line);
            prop_assert!(pieces.len() >= sentence.len());
            // Every piece must lie inside one gold token: walk both in canonical characters.
            let mut gold_ends = Vec::new();
            let mut n = 0;
            for t in sentence {
                n += canonical(t).chars().count();
                gold_ends.push(n);
            }
            let mut pos = 0;
            for p in pieces.tokens() {
                let start = pos;
                pos += canonical(p).chars().count();
                let owner = gold_ends.iter().position(|&e| e > start).unwrap();
                prop_assert!(pos <= gold_ends[owner], "piece {p:?} spans two gold tokens");
            }
        }
    }

    #[test]
    fn token_lines_round_trip(s in gold_sentences()) {
        let gold = corpus(s);
        let mut buf = Vec::new();
        write_token_lines(&mut buf, gold.sentence_slices()).unwrap();
        let back = parse_token_lines(std::str::from_utf8(&buf).unwrap(), "buf");
        prop_assert_eq!(back.sentences, gold.sentences);
    }
}

#[test]
fn token_lines_file_round_trip_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.lines");
    let gold = GoldCorpus::from_sentences([vec!["a", "b"], vec!["c"]], "x");
    emit_token_lines(&path, gold.sentence_slices()).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "a\nb\n\nc\n");
    assert_eq!(read_token_lines(&path).unwrap().sentences, gold.sentences);

    let empty = GoldCorpus::from_sentences(Vec::<Vec<String>>::new(), "x");
    emit_token_lines(&path, empty.sentence_slices()).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"");
}

#[test]
fn dependency_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.conllu");
    let gold = gen_fixture(3, 40, &test_lexicon(), 0.4).unwrap();
    write_dependency_file(&gold, &path).unwrap();
    let back = read_dependency_file(&path, 2).unwrap();
    assert_eq!(back.sentences, gold.sentences);
}

#[test]
fn fixtures_are_deterministic() {
    let lex = Lexicon::starter();
    assert_eq!(gen_fixture(9, 30, &lex, 0.3).unwrap(), gen_fixture(9, 30, &lex, 0.3).unwrap());
    assert_ne!(gen_fixture(9, 30, &lex, 0.3).unwrap(), gen_fixture(10, 30, &lex, 0.3).unwrap());
}

#[test]
fn multipart_rate_is_near_requested() {
    for lex in [Lexicon::starter(), test_lexicon()] {
        let f = gen_fixture_with_truth(5, 400, &lex, 0.3).unwrap();
        // Count multi-part tokens from the corpus itself: a gold token is multi-part when its
        // corrupted form splits into more than one piece.
        let multipart = f
            .corpus
            .tokens()
            .filter(|t| split_space(&t.replace('\u{200C}', " ")).len() > 1)
            .count();
        let rate = multipart as f64 / f.corpus.n_tokens() as f64;
        assert!((0.25..=0.35).contains(&rate), "rate {rate}");
        assert_eq!(multipart, f.truth.n_multipart());
    }
    let plain = gen_fixture(5, 50, &Lexicon::starter(), 0.0).unwrap();
    assert!(plain.tokens().all(|t| !t.contains('\u{200C}')));
}

#[test]
fn stats_match_independent_count() {
    let f = gen_fixture_with_truth(11, 250, &Lexicon::starter(), 0.3).unwrap();
    let stats = corpus_stats(&f.corpus).unwrap();
    let t = &f.truth;
    assert_eq!(stats.n_sentences, t.n_sentences);
    assert_eq!(stats.n_tokens, t.n_tokens);
    assert_eq!(stats.max_token_len, t.max_token_len);
    assert!((stats.avg_token_len - t.total_chars as f64 / t.n_tokens as f64).abs() < 1e-12);
    assert!((stats.avg_sentence_len - t.n_tokens as f64 / t.n_sentences as f64).abs() < 1e-12);

    // Recount straight from the serialized gold file.
    let mut buf = Vec::new();
    write_token_lines(&mut buf, f.corpus.sentence_slices()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), stats.n_tokens);
    assert_eq!(lines.iter().collect::<HashSet<_>>().len(), stats.n_distinct_words);
    assert_eq!(text.split("\n\n").count(), stats.n_sentences);
    assert_eq!(t.n_single + t.n_multipart(), t.n_tokens);
}

#[test]
fn stats_reject_empty_corpus() {
    let empty = GoldCorpus::from_sentences(Vec::<Vec<String>>::new(), "x");
    assert!(corpus_stats(&empty).is_err());
}
