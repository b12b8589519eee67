//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so every line is
//! printed; exits non-zero when any criterion fails.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{resegment, test_lexicon};
use pertok::corpus::{corrupt, emit_token_lines, gen_fixture, GoldCorpus};
use pertok::eval::{
    accuracy_from, align, align_files, align_oracle, consistency_check, errors_fixed, metrics, AlignMode,
    AlignmentCounts, MetricsRow,
};
use pertok::lexicon::Lexicon;
use pertok::normalize::canonical;
use pertok::tokenize::{split_space, verb_join, Pipeline, PipelineSpec, StageId, TokenStream};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------------------------
// Per-thread allocation tracking, used to show the evaluator runs in bounded memory.

struct Tracking;

thread_local! {
    static LIVE: Cell<isize> = const { Cell::new(0) };
    static PEAK: Cell<isize> = const { Cell::new(0) };
}

fn track(delta: isize) {
    let _ = LIVE.try_with(|live| {
        let now = live.get() + delta;
        live.set(now);
        let _ = PEAK.try_with(|peak| peak.set(peak.get().max(now)));
    });
}

unsafe impl GlobalAlloc for Tracking {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            track(layout.size() as isize);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        track(-(layout.size() as isize));
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            track(new_size as isize - layout.size() as isize);
        }
        p
    }
}

#[global_allocator]
static ALLOC: Tracking = Tracking;

/// Runs `f` and returns its result with the peak number of bytes it held on this thread.
fn peak_bytes<R>(f: impl FnOnce() -> R) -> (R, usize) {
    let base = LIVE.with(Cell::get);
    PEAK.with(|p| p.set(base));
    let r = f();
    let peak = PEAK.with(Cell::get);
    (r, (peak - base).max(0) as usize)
}

// ---------------------------------------------------------------------------------------------

type Check = fn() -> Result<String, String>;

const PP_TOLERANCE: f64 = 0.01;
const EPS: f64 = 1e-9;

struct Row {
    name: &'static str,
    precision: f64,
    recall: f64,
    f1: f64,
    accuracy: f64,
}

const fn row(name: &'static str, precision: f64, recall: f64, f1: f64, accuracy: f64) -> Row {
    Row {
        name,
        precision,
        recall,
        f1,
        accuracy,
    }
}

/// Reference results (percentages) for single tokenizers and hybrids.
const REFERENCE_ROWS: [Row; 14] = [
    row("Stanza", 89.50, 100.0, 94.46, 89.50),
    row("Trankit", 89.51, 100.0, 94.47, 89.51),
    row("SetPer", 89.53, 100.0, 94.47, 89.53),
    row("Space Delimiter (Baseline)", 89.56, 100.0, 94.50, 89.56),
    row("Parsivar Without Normalization", 89.56, 100.0, 94.50, 89.56),
    row("Bound Morphemes", 91.64, 99.98, 95.63, 91.63),
    row("Hazm Without Normalization", 92.21, 99.99, 95.94, 92.20),
    row("FarsiVerb", 94.48, 99.92, 97.12, 94.40),
    row("Parsivar", 97.05, 98.23, 97.634, 95.38),
    row("Hazm", 97.57, 99.97, 98.75, 97.54),
    row("FarsiVerb + BM", 96.16, 99.89, 97.99, 96.06),
    row("Parsivar + FarsiVerb", 99.09, 98.63, 98.64, 97.30),
    row("Hazm + FarsiVerb", 97.79, 99.90, 98.84, 97.70),
    row("Hazm + BM", 97.85, 99.96, 98.89, 97.81),
];

const BASELINE_ERRORS: u64 = 41669;

/// Rows whose errors-fixed value is non-negative: (errors, published percentage).
const ERRORS_FIXED_ROWS: [(&str, u64, f64); 12] = [
    ("Space Delimiter (Baseline)", 41669, 0.00),
    ("Parsivar Without Normalization", 41669, 0.00),
    ("Bound Morphemes", 33161, 20.42),
    ("Hazm Without Normalization", 31080, 25.41),
    ("FarsiVerb", 22301, 46.48),
    ("Parsivar", 18122, 56.50),
    ("Hazm", 9787, 76.51),
    ("FarsiVerb + BM", 15683, 62.36),
    ("Parsivar + FarsiVerb", 10554, 74.63),
    ("Hazm + FarsiVerb", 9159, 78.01),
    ("Hazm + BM", 8715, 78.85),
    ("Hazm + BM + FarsiVerb", 8097, 80.56),
];

/// Rows printed with a negative errors-fixed value that the baseline-denominator formula does not
/// reproduce.
const NEGATIVE_ROWS: [(&str, u64, f64); 3] = [("Stanza", 41922, -0.06), ("Trankit", 41828, -0.03), ("SetPer", 41800, -0.03)];

/// Counts realising the given rates to well below 0.01 pp.
fn counts_for(precision: f64, recall: f64) -> AlignmentCounts {
    let tp = 100_000_000u64;
    AlignmentCounts {
        tp,
        fp: (tp as f64 * (1.0 - precision) / precision).round() as u64,
        fn_: (tp as f64 * (1.0 - recall) / recall).round() as u64,
        ..Default::default()
    }
}

fn c1_metric_arithmetic() -> Result<String, String> {
    let mut rows: Vec<&Row> = REFERENCE_ROWS.iter().collect();
    let last = row("Hazm + BM + FarsiVerb", 98.07, 99.89, 98.97, 97.96);
    rows.push(&last);
    let mut bad = Vec::new();
    for r in &rows {
        let (p, rc) = (r.precision / 100.0, r.recall / 100.0);
        let m = metrics(counts_for(p, rc), r.name, None);
        let f1 = 100.0 * m.f1;
        let implied = 100.0 * accuracy_from(p, rc);
        let published = MetricsRow {
            accuracy: r.accuracy / 100.0,
            precision: p,
            recall: rc,
            ..metrics(AlignmentCounts::default(), r.name, None)
        };
        let flagged = !consistency_check(&published).is_empty();
        if (f1 - r.f1).abs() > PP_TOLERANCE + EPS {
            bad.push(format!("{}: F1 {f1:.4} vs {:.2}", r.name, r.f1));
        }
        if (implied - r.accuracy).abs() > PP_TOLERANCE + EPS {
            bad.push(format!(
                "{}: accuracy {implied:.4} vs {:.2}{}",
                r.name,
                r.accuracy,
                if flagged { " (flagged by consistency_check)" } else { "" }
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} rows, F1 and accuracy within {PP_TOLERANCE} pp", rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn c2_errors_fixed() -> Result<String, String> {
    let mut bad = Vec::new();
    for (name, e, published) in ERRORS_FIXED_ROWS {
        let v = errors_fixed(BASELINE_ERRORS, e).map_err(|e| e.to_string())?;
        if (v - published).abs() > PP_TOLERANCE + EPS {
            bad.push(format!("{name}: {e} -> {v:.4} vs {published:.2}"));
        }
    }
    let mut known = Vec::new();
    for (name, e, published) in NEGATIVE_ROWS {
        let v = errors_fixed(BASELINE_ERRORS, e).map_err(|e| e.to_string())?;
        if v >= 0.0 || (v - published).abs() <= PP_TOLERANCE {
            bad.push(format!("{name}: negative-row deviation no longer present ({v:.4} vs {published:.2})"));
        } else {
            known.push(format!("{name} {v:.2} vs printed {published:.2}"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} non-negative rows within {PP_TOLERANCE} pp; known deviation: {}",
            ERRORS_FIXED_ROWS.len(),
            known.join(", ")
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn fixture_tokens(seed: u64, lex: &Lexicon, max_tokens: usize) -> Vec<String> {
    let n_sentences = 1 + (seed % 12) as usize;
    let rate = [0.2, 0.35, 0.5, 0.8][(seed % 4) as usize];
    let gold = gen_fixture(seed, n_sentences, lex, rate).expect("fixture");
    gold.tokens().take(max_tokens).map(str::to_string).collect()
}

fn c3_oracle_equivalence() -> Result<String, String> {
    let lexicons = [Lexicon::starter(), test_lexicon()];
    let hybrid = Pipeline::build(&PipelineSpec::from_name("full").unwrap()).unwrap();
    let (mut over, mut under, mut mixed) = (0, 0, 0);
    let cases = 600u64;
    for seed in 0..cases {
        let lex = &lexicons[(seed % 2) as usize];
        let gold = fixture_tokens(seed, lex, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let sys: Vec<String> = if seed % 5 == 0 {
            let text = gold.join(" ").replace('\u{200C}', " ");
            hybrid.run(&text).stream.tokens().to_vec()
        } else {
            let keep = rng.gen_range(0.3..=1.0);
            let split = rng.gen_range(0.0..0.4);
            resegment(&gold, keep, split, &mut rng)
        };
        let streaming = align(&gold, &sys, AlignMode::Strict).map_err(|e| format!("seed {seed}: {e}"))?;
        let oracle = align_oracle(&gold, &sys).map_err(|e| format!("seed {seed}: {e}"))?;
        if streaming != oracle {
            return Err(format!("seed {seed}: align {streaming:?} != oracle {oracle:?}"));
        }
        match (streaming.fp > 0, streaming.fn_ > 0) {
            (true, false) => over += 1,
            (false, true) => under += 1,
            (true, true) => mixed += 1,
            _ => {}
        }
    }
    if over == 0 || under == 0 || mixed == 0 {
        return Err(format!("coverage gap: over={over} under={under} mixed={mixed}"));
    }
    Ok(format!(
        "{cases} corpora equal (over-split only {over}, under-split only {under}, both {mixed})"
    ))
}

fn c4_baseline_recall() -> Result<String, String> {
    let lex = Lexicon::starter();
    let n = 120u64;
    for seed in 0..n {
        let rate = (seed % 6) as f64 * 0.1;
        let gold = gen_fixture(1000 + seed, 10 + (seed % 40) as usize, &lex, rate).map_err(|e| e.to_string())?;
        let sys: Vec<String> = corrupt(&gold).iter().flat_map(|l| split_space(l).tokens().to_vec()).collect();
        let gold_tokens: Vec<&str> = gold.tokens().collect();
        let c = align(&gold_tokens, &sys, AlignMode::Strict).map_err(|e| format!("seed {seed}: {e}"))?;
        let m = metrics(c, "split", None);
        if c.fn_ != 0 || m.recall != 1.0 || format!("{:.2}", 100.0 * m.recall) != "100.00" {
            return Err(format!("seed {seed}: fn={} recall={}", c.fn_, m.recall));
        }
    }
    Ok(format!("{n} fixtures, fn = 0 and recall = 100.00 exactly"))
}

const BUILT_IN: [StageId; 9] = [
    StageId::NormalizeChars,
    StageId::Clean,
    StageId::SentenceSplit,
    StageId::PunctuationSpace,
    StageId::RuleSpaceCorrection,
    StageId::Split,
    StageId::MultiwordJoin,
    StageId::BoundMorphemeFix,
    StageId::VerbJoin,
];

fn c5_resegmentation() -> Result<String, String> {
    let lex = Lexicon::starter();
    let pipelines: Vec<Pipeline> = BUILT_IN
        .iter()
        .map(|s| Pipeline::with_lexicon(&PipelineSpec::new([*s]).unwrap(), lex.clone()).unwrap())
        .collect();
    let noise = proptest::collection::vec(
        proptest::sample::select(vec!["", ".", "،", "؟", "12", "۳٫۵", "http://a.ir/x", "#تگ", "😀", "ي", "ك", "_"]),
        0..4,
    );
    let strategy = (any::<u64>(), 1usize..4, 0.0f64..=1.0, noise);
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = runner.run(&strategy, |(seed, n, rate, extra)| {
        let gold = gen_fixture(seed, n, &lex, rate).unwrap();
        let mut text = corrupt(&gold).join("\n");
        for (i, e) in extra.iter().enumerate() {
            let at = text.char_indices().nth(i * 7).map_or(text.len(), |(b, _)| b);
            text.insert_str(at, &format!(" {e}"));
        }
        let expected = canonical(&text.split_whitespace().collect::<String>());
        for (stage, p) in BUILT_IN.iter().zip(&pipelines) {
            let got: String = p.run(&text).stream.tokens().iter().map(|t| canonical(t)).collect();
            prop_assert_eq!(&got, &expected, "stage {}", stage);
        }
        Ok(())
    });
    match result {
        Ok(()) => Ok(format!("1000 fixture inputs x {} stages", BUILT_IN.len())),
        Err(e) => Err(e.to_string()),
    }
}

fn c6_worked_example() -> Result<String, String> {
    let lex = test_lexicon();
    let tokens = ["khast", "eh", "nemidosheh", "ast"];
    let out = verb_join(&TokenStream::from_tokens(tokens), &lex);
    if out.tokens() != ["khast_eh_nemidosheh_ast"] {
        return Err(format!("got {:?}", out.tokens()));
    }
    let sentence = "har rooz az anha poul khast eh nemidosheh ast .";
    let out = verb_join(&split_space(sentence), &lex);
    let expected = ["har", "rooz", "az", "anha", "poul", "khast_eh_nemidosheh_ast", "."];
    if out.tokens() != expected {
        return Err(format!("sentence gave {:?}", out.tokens()));
    }
    Ok("khast eh nemidosheh ast -> khast_eh_nemidosheh_ast".into())
}

fn score(gold: &GoldCorpus, pipeline: &Pipeline) -> MetricsRow {
    let input = corrupt(gold).join("\n");
    let out = pipeline.run(&input);
    let gold_tokens: Vec<&str> = gold.tokens().collect();
    let c = align(&gold_tokens, out.stream.tokens(), AlignMode::Strict).expect("stages only re-segment");
    metrics(c, "", None)
}

fn c7_improvement() -> Result<String, String> {
    let lex = Lexicon::starter();
    let split = Pipeline::with_lexicon(&PipelineSpec::baseline(), lex.clone()).unwrap();
    let hybrid =
        Pipeline::with_lexicon(&PipelineSpec::from_name("split+bound_morpheme_fix+verb_join").unwrap(), lex.clone())
            .unwrap();
    let mut summary = Vec::new();
    for rate in [0.2, 0.3, 0.5] {
        let (mut e0, mut e1) = (0, 0);
        for seed in 1..=5u64 {
            let gold = gen_fixture(seed, 200, &lex, rate).map_err(|e| e.to_string())?;
            let (a, b) = (score(&gold, &split), score(&gold, &hybrid));
            if b.counts.errors >= a.counts.errors || b.f1 <= a.f1 {
                return Err(format!(
                    "rate {rate} seed {seed}: errors {} -> {}, F1 {:.4} -> {:.4}",
                    a.counts.errors, b.counts.errors, a.f1, b.f1
                ));
            }
            e0 += a.counts.errors;
            e1 += b.counts.errors;
        }
        summary.push(format!("rate {rate}: errors {e0} -> {e1}"));
    }
    Ok(format!("15 fixtures, all strictly better ({})", summary.join(", ")))
}

const THROUGHPUT_TARGET: f64 = 50_000.0;
const TARGET_TOKENS: usize = 400_000;
const MEMORY_CEILING: usize = 256 * 1024;

fn c8_throughput() -> Result<String, String> {
    let lex = Lexicon::starter();
    let gold = gen_fixture(8, 25_000, &lex, 0.3).map_err(|e| e.to_string())?;
    if gold.n_tokens() < TARGET_TOKENS {
        return Err(format!("fixture has only {} tokens", gold.n_tokens()));
    }
    let input = corrupt(&gold).join("\n");
    let pipeline = Pipeline::with_lexicon(&PipelineSpec::from_name("full").unwrap(), lex).unwrap();
    let out = pipeline.run(&input);
    let rate = gold.n_tokens() as f64 / out.wall.as_secs_f64();

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, sentences: Vec<&[String]>| {
        let p = dir.path().join(name);
        emit_token_lines(&p, sentences).map(|_| p).map_err(|e| e.to_string())
    };
    let sys_sentences: Vec<&[String]> = out.stream.sentences().collect();
    let gold_sentences: Vec<&[String]> = gold.sentence_slices().collect();
    let tenth = gold_sentences.len() / 10;
    let gold_full = write("gold.lines", gold_sentences.clone())?;
    let sys_full = write("sys.lines", sys_sentences.clone())?;
    let gold_small = write("gold_small.lines", gold_sentences[..tenth].to_vec())?;
    let sys_small = write("sys_small.lines", sys_sentences[..tenth].to_vec())?;

    let (full, peak_full) = peak_bytes(|| align_files(&gold_full, &sys_full, AlignMode::Strict));
    let (small, peak_small) = peak_bytes(|| align_files(&gold_small, &sys_small, AlignMode::Strict));
    let full = full.map_err(|e| e.to_string())?;
    small.map_err(|e| e.to_string())?;

    let detail = format!(
        "{} tokens in {:.3}s = {:.0} tokens/s (target {:.0}); evaluator peak {} B on full corpus, {} B on a tenth (ceiling {} B); F1 {:.2}",
        gold.n_tokens(),
        out.wall.as_secs_f64(),
        rate,
        THROUGHPUT_TARGET,
        peak_full,
        peak_small,
        MEMORY_CEILING,
        100.0 * metrics(full, "", None).f1
    );
    if rate < THROUGHPUT_TARGET {
        return Err(detail);
    }
    if full.gold_tokens != gold.n_tokens() as u64 {
        return Err(format!("evaluator read {} gold tokens", full.gold_tokens));
    }
    if peak_full > MEMORY_CEILING || peak_full > 2 * peak_small + 16 * 1024 {
        return Err(detail);
    }
    Ok(detail)
}

fn run(id: &str, title: &str, check: Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed: Duration = start.elapsed();
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("[{tag}] {id} {title} ({:.2}s): {detail}", elapsed.as_secs_f64());
    ok
}

fn main() {
    let checks: [(&str, &str, Check); 8] = [
        ("C1", "metric arithmetic vs reference rows", c1_metric_arithmetic),
        ("C2", "errors-fixed arithmetic vs reference rows", c2_errors_fixed),
        ("C3", "streaming alignment equals oracle", c3_oracle_equivalence),
        ("C4", "split-only baseline has full recall", c4_baseline_recall),
        ("C5", "every stage only moves boundaries", c5_resegmentation),
        ("C6", "verb group worked example", c6_worked_example),
        ("C7", "bound morphemes + verb joining beat splitting", c7_improvement),
        ("C8", "throughput and streaming evaluation", c8_throughput),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(id, title, check)| !run(id, title, *check))
        .map(|(id, _, _)| *id)
        .collect();
    let _ = std::panic::take_hook();
    println!(
        "acceptance: {} passed, {} failed{}",
        checks.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
