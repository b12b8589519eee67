//! Gold token streams: reading dependency treebanks, building the corrupted evaluation input,
//! writing one-token-per-line files and generating synthetic fixtures.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{decode_lines, Lexicon};
use crate::normalize::ZWNJ;

/// Default 1-based column holding the token form.
pub const DEFAULT_TOKEN_COLUMN: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSentence {
    pub index: usize,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldCorpus {
    pub sentences: Vec<GoldSentence>,
    pub source_path: String,
}

impl GoldCorpus {
    /// Builds a corpus from token lists, dropping empty sentences and renumbering.
    pub fn from_sentences<I, S, T>(sentences: I, source_path: impl Into<String>) -> GoldCorpus
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let sentences = sentences
            .into_iter()
            .map(|s| s.into_iter().map(Into::into).collect::<Vec<String>>())
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(index, tokens)| GoldSentence { index, tokens })
            .collect();
        GoldCorpus {
            sentences,
            source_path: source_path.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn n_tokens(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn sentence_slices(&self) -> impl Iterator<Item = &[String]> {
        self.sentences.iter().map(|s| s.tokens.as_slice())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flat_map(|s| s.tokens.iter().map(String::as_str))
    }
}

/// Reads a tab-separated dependency file. See [`parse_dependency`].
pub fn read_dependency_file(path: &Path, token_column: usize) -> Result<GoldCorpus> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_dependency_bytes(&bytes, token_column, &path.display().to_string())
}

pub fn parse_dependency_bytes(bytes: &[u8], token_column: usize, source_name: &str) -> Result<GoldCorpus> {
    let lines = decode_lines(bytes, source_name)?;
    parse_lines(lines, token_column, source_name)
}

/// Parses CoNLL-style text: one token per tab-separated row, blank lines between sentences,
/// `#` comment lines ignored. `token_column` is 1-based.
///
/// Multiword range rows (`3-4`) and empty nodes (`5.1`) are skipped. Spaces inside a token cell
/// are turned into ZWNJ so every gold token stays a single line in token-line files.
pub fn parse_dependency(text: &str, token_column: usize, source_name: &str) -> Result<GoldCorpus> {
    let lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .collect();
    parse_lines(lines, token_column, source_name)
}

fn parse_lines(lines: Vec<(usize, &str)>, token_column: usize, source_name: &str) -> Result<GoldCorpus> {
    if token_column == 0 {
        return Err(Error::Config("token column is 1-based".into()));
    }
    let mut sentences: Vec<Vec<String>> = Vec::new();
    let mut current = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < token_column {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected at least {token_column} tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols.len() > 1 && is_range_or_empty_node(cols[0]) {
            continue;
        }
        let cell = cols[token_column - 1].trim_matches(|c: char| c.is_whitespace());
        if cell.is_empty() {
            return Err(Error::parse(source_name, line_no, "empty token"));
        }
        current.push(cell.split_whitespace().collect::<Vec<_>>().join(&ZWNJ.to_string()));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(GoldCorpus::from_sentences(sentences, source_name))
}

fn is_range_or_empty_node(id: &str) -> bool {
    let mut parts = id.splitn(2, ['-', '.']);
    let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
        return false;
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    digits(a) && digits(b)
}

/// Writes a minimal ten-column dependency file that [`read_dependency_file`] reads back.
pub fn write_dependency_file(corpus: &GoldCorpus, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> io::Result<()> {
        for sentence in &corpus.sentences {
            writeln!(w, "# sent_id = {}", sentence.index + 1)?;
            for (i, token) in sentence.tokens.iter().enumerate() {
                writeln!(w, "{}\t{}\t_\t_\t_\t_\t_\t_\t_\t_", i + 1, token)?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// The evaluation input: every sentence's tokens joined by single spaces, with every half-space
/// replaced by a full space.
pub fn corrupt(gold: &GoldCorpus) -> Vec<String> {
    gold.sentences.iter().map(|s| corrupt_sentence(&s.tokens)).collect()
}

pub fn corrupt_sentence(tokens: &[String]) -> String {
    tokens.join(" ").replace(ZWNJ, " ")
}

/// One token per line, a blank line between sentences, trailing newline. Empty sentences are
/// skipped, so an empty input produces no bytes.
pub fn write_token_lines<'a, W, I>(mut w: W, sentences: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a [String]>,
{
    let mut first = true;
    for sentence in sentences {
        if sentence.is_empty() {
            continue;
        }
        if !first {
            w.write_all(b"\n")?;
        }
        first = false;
        for token in sentence {
            w.write_all(token.as_bytes())?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()
}

pub fn emit_token_lines<'a, I>(path: &Path, sentences: I) -> Result<()>
where
    I: IntoIterator<Item = &'a [String]>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_token_lines(BufWriter::new(file), sentences).map_err(|e| Error::io(path, e))
}

/// Parses a token-line file back into sentences. Whitespace-only lines separate sentences.
pub fn parse_token_lines(text: &str, source_name: &str) -> GoldCorpus {
    let mut sentences: Vec<Vec<String>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !sentences.last().expect("non-empty").is_empty() {
                sentences.push(Vec::new());
            }
        } else {
            sentences.last_mut().expect("non-empty").push(line.to_string());
        }
    }
    GoldCorpus::from_sentences(sentences, source_name)
}

pub fn read_token_lines(path: &Path) -> Result<GoldCorpus> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        Error::Encoding {
            source_name: name.clone(),
            line,
        }
    })?;
    Ok(parse_token_lines(text, &name))
}

/// Table-1 style corpus statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_sentences: usize,
    pub avg_sentence_len: f64,
    pub n_distinct_words: usize,
    pub n_tokens: usize,
    /// In code points.
    pub max_token_len: usize,
    /// In code points.
    pub avg_token_len: f64,
}

pub fn corpus_stats(gold: &GoldCorpus) -> Result<CorpusStats> {
    let n_tokens = gold.n_tokens();
    if gold.sentences.is_empty() || n_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut distinct = HashSet::new();
    let mut max_len = 0;
    let mut total_len = 0;
    for token in gold.tokens() {
        let len = token.chars().count();
        max_len = max_len.max(len);
        total_len += len;
        distinct.insert(token);
    }
    Ok(CorpusStats {
        n_sentences: gold.sentences.len(),
        avg_sentence_len: n_tokens as f64 / gold.sentences.len() as f64,
        n_distinct_words: distinct.len(),
        n_tokens,
        max_token_len: max_len,
        avg_token_len: total_len as f64 / n_tokens as f64,
    })
}

impl CorpusStats {
    /// Rows in the order of the published dataset table.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Number of Sentences", self.n_sentences.to_string()),
            ("Average Sentence Length", format!("{:.2}", self.avg_sentence_len)),
            ("Number of Distinct Words", self.n_distinct_words.to_string()),
            ("Number of Tokens", self.n_tokens.to_string()),
            ("Max Token Length", self.max_token_len.to_string()),
            ("Average Token Length", format!("{:.2}", self.avg_token_len)),
        ]
    }
}

/// What the fixture generator put into a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureTruth {
    pub n_sentences: usize,
    pub n_tokens: usize,
    pub n_single: usize,
    pub n_affixed: usize,
    pub n_verb_groups: usize,
    pub n_multiwords: usize,
    /// Total code points over all gold tokens.
    pub total_chars: usize,
    pub max_token_len: usize,
}

impl FixtureTruth {
    pub fn n_multipart(&self) -> usize {
        self.n_affixed + self.n_verb_groups + self.n_multiwords
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub corpus: GoldCorpus,
    pub truth: FixtureTruth,
}

const MIN_SENTENCE_LEN: usize = 8;
const MAX_SENTENCE_LEN: usize = 25;

const LETTERS: [char; 32] = [
    'ا', 'ب', 'پ', 'ت', 'ث', 'ج', 'چ', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'ژ', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع',
    'غ', 'ف', 'ق', 'ک', 'گ', 'ل', 'م', 'ن', 'و', 'ه', 'ی',
];

/// Deterministic synthetic gold corpus. See [`gen_fixture_with_truth`].
pub fn gen_fixture(seed: u64, n_sentences: usize, lexicon: &Lexicon, multiword_rate: f64) -> Result<GoldCorpus> {
    gen_fixture_with_truth(seed, n_sentences, lexicon, multiword_rate).map(|f| f.corpus)
}

/// Generates `n_sentences` sentences of 8 to 25 tokens. Each token is multi-part with probability
/// `multiword_rate`: a prefix or suffix glued to a word, a verb group built from the lexicon's
/// stems, verb prefixes and auxiliaries, or a multiword entry. Parts are joined with ZWNJ.
///
/// Plain words are random letter strings that collide with no lexicon entry, so the tokenizer
/// stages only ever act on the multi-part material.
pub fn gen_fixture_with_truth(seed: u64, n_sentences: usize, lexicon: &Lexicon, multiword_rate: f64) -> Result<Fixture> {
    if !(0.0..=1.0).contains(&multiword_rate) {
        return Err(Error::Config(format!("multiword rate {multiword_rate} outside [0, 1]")));
    }
    let gen = Generator::new(lexicon);
    if multiword_rate > 0.0 && gen.kinds().is_empty() {
        return Err(Error::Config(
            "lexicon has no affixes, verb stems or multiwords to build multi-part tokens from".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = FixtureTruth {
        n_sentences,
        ..Default::default()
    };
    let kinds = gen.kinds();
    let mut sentences = Vec::with_capacity(n_sentences);
    for _ in 0..n_sentences {
        let len = rng.gen_range(MIN_SENTENCE_LEN..=MAX_SENTENCE_LEN);
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            let token = if multiword_rate > 0.0 && rng.gen_bool(multiword_rate) {
                let kind = *kinds.choose(&mut rng).expect("checked above");
                match kind {
                    Kind::Affixed => truth.n_affixed += 1,
                    Kind::VerbGroup => truth.n_verb_groups += 1,
                    Kind::Multiword => truth.n_multiwords += 1,
                }
                gen.multipart(kind, &mut rng)
            } else {
                truth.n_single += 1;
                gen.word(&mut rng)
            };
            let chars = token.chars().count();
            truth.total_chars += chars;
            truth.max_token_len = truth.max_token_len.max(chars);
            tokens.push(token);
        }
        truth.n_tokens += tokens.len();
        sentences.push(tokens);
    }
    Ok(Fixture {
        corpus: GoldCorpus::from_sentences(sentences, format!("fixture:seed={seed}")),
        truth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Affixed,
    VerbGroup,
    Multiword,
}

struct Generator<'a> {
    lexicon: &'a Lexicon,
    prefixes: Vec<&'a str>,
    suffixes: Vec<&'a str>,
    stems: Vec<&'a str>,
    endings: Vec<&'a str>,
    verb_prefixes: Vec<&'a str>,
    auxiliaries: Vec<&'a str>,
    multiwords: Vec<&'a [String]>,
    taken: HashSet<&'a str>,
}

impl<'a> Generator<'a> {
    fn new(lexicon: &'a Lexicon) -> Self {
        let affix = |s: &str| lexicon.prefixes.contains(s) || lexicon.suffixes.contains(s);
        // Verb material that doubles as an affix would be re-attached by the affix stage.
        let verbal = |set: &'a std::collections::BTreeSet<String>| -> Vec<&'a str> {
            set.iter().map(String::as_str).filter(|s| !affix(s)).collect()
        };
        let mut stems = verbal(&lexicon.past_stems);
        stems.extend(verbal(&lexicon.present_stems));
        stems.sort_unstable();
        stems.dedup();
        let taken = lexicon
            .multiwords
            .iter()
            .flatten()
            .map(String::as_str)
            .collect();
        Generator {
            lexicon,
            prefixes: lexicon.prefixes.iter().map(String::as_str).filter(|p| !lexicon.suffixes.contains(*p)).collect(),
            suffixes: lexicon.suffixes.iter().map(String::as_str).collect(),
            stems,
            endings: lexicon.verb_endings.iter().map(String::as_str).collect(),
            verb_prefixes: verbal(&lexicon.verb_prefixes),
            auxiliaries: verbal(&lexicon.auxiliaries),
            multiwords: lexicon.multiwords.iter().filter(|m| m.len() >= 2).map(Vec::as_slice).collect(),
            taken,
        }
    }

    fn kinds(&self) -> Vec<Kind> {
        let mut kinds = Vec::new();
        if !self.prefixes.is_empty() || !self.suffixes.is_empty() {
            kinds.push(Kind::Affixed);
        }
        if !self.stems.is_empty() && (!self.auxiliaries.is_empty() || !self.verb_prefixes.is_empty()) {
            kinds.push(Kind::VerbGroup);
        }
        if !self.multiwords.is_empty() {
            kinds.push(Kind::Multiword);
        }
        kinds
    }

    fn word(&self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let len = rng.gen_range(2..=7);
            let word: String = (0..len).map(|_| *LETTERS.choose(rng).expect("letters")).collect();
            if !self.lexicon.contains_any(&word)
                && !self.lexicon.is_verb_form(&word)
                && !self.taken.contains(word.as_str())
            {
                return word;
            }
        }
    }

    fn multipart(&self, kind: Kind, rng: &mut ChaCha8Rng) -> String {
        let parts: Vec<String> = match kind {
            Kind::Affixed => {
                let use_prefix = match (self.prefixes.is_empty(), self.suffixes.is_empty()) {
                    (false, false) => rng.gen_bool(0.5),
                    (false, true) => true,
                    _ => false,
                };
                if use_prefix {
                    vec![self.prefixes.choose(rng).expect("prefix").to_string(), self.word(rng)]
                } else {
                    vec![self.word(rng), self.suffixes.choose(rng).expect("suffix").to_string()]
                }
            }
            Kind::VerbGroup => {
                let mut parts = Vec::new();
                if !self.verb_prefixes.is_empty() && (self.auxiliaries.is_empty() || rng.gen_bool(0.5)) {
                    parts.push(self.verb_prefixes.choose(rng).expect("verb prefix").to_string());
                }
                let mut stem = self.stems.choose(rng).expect("stem").to_string();
                if !self.endings.is_empty() && rng.gen_bool(0.3) {
                    stem.push_str(self.endings.choose(rng).expect("ending"));
                }
                parts.push(stem);
                if !self.auxiliaries.is_empty() {
                    let min_aux = usize::from(parts.len() < 2);
                    for _ in 0..rng.gen_range(min_aux..=2) {
                        parts.push(self.auxiliaries.choose(rng).expect("aux").to_string());
                    }
                }
                parts
            }
            Kind::Multiword => self.multiwords.choose(rng).expect("multiword").to_vec(),
        };
        parts.join(&ZWNJ.to_string())
    }
}

/// Writes `gold.lines` (token lines) and `input.txt` (one corrupted sentence per line) into
/// `out_dir`, returning both paths.
pub fn write_evaluation_pair(gold: &GoldCorpus, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let gold_path = out_dir.join("gold.lines");
    emit_token_lines(&gold_path, gold.sentence_slices())?;
    let input_path = out_dir.join("input.txt");
    let mut text = String::new();
    for line in corrupt(gold) {
        text.push_str(&line);
        text.push('\n');
    }
    fs::write(&input_path, text).map_err(|e| Error::io(&input_path, e))?;
    Ok((gold_path, input_path))
}
