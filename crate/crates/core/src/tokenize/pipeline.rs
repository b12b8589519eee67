//! Pipeline specifications and their execution.
//!
//! A spec file is a list of `key = value` lines. `stage` may repeat and gives the ordered stage
//! list, each stage optionally followed by `option=value` words:
//!
//! ```text
//! # cleaning + bound morphemes + verb groups
//! lexicon_dir = lexicon
//! url = placeholder:URL
//! stage = normalize_chars
//! stage = clean
//! stage = punctuation_space
//! stage = rule_space_correction rules=space_rules.tsv
//! stage = split
//! stage = bound_morpheme_fix
//! stage = verb_join
//! ```
//!
//! Text-level stages always run before the whitespace split and stream-level stages after it;
//! within each phase the listed order is kept.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{load_lexicon, Lexicon};
use crate::normalize::{clean_text, normalize_chars, CharMap, CleanPolicy, SpanAction, SpanKind};

use super::join::{bound_morpheme_sentence, verb_join_sentence, MultiwordIndex};
use super::rules::{rule_space_correction, SpaceRules};
use super::text::{punctuation_space, split_tokens, SentenceSplitter};
use super::TokenStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageId {
    NormalizeChars,
    Clean,
    SentenceSplit,
    PunctuationSpace,
    RuleSpaceCorrection,
    Split,
    MultiwordJoin,
    BoundMorphemeFix,
    VerbJoin,
    /// Reserved for learned space correction. Only usable by scoring that tool's output files.
    LearnedSpaceCorrection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StagePhase {
    Text,
    Split,
    Stream,
}

impl StageId {
    pub const ALL: [StageId; 10] = [
        StageId::NormalizeChars,
        StageId::Clean,
        StageId::SentenceSplit,
        StageId::PunctuationSpace,
        StageId::RuleSpaceCorrection,
        StageId::Split,
        StageId::MultiwordJoin,
        StageId::BoundMorphemeFix,
        StageId::VerbJoin,
        StageId::LearnedSpaceCorrection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StageId::NormalizeChars => "normalize_chars",
            StageId::Clean => "clean",
            StageId::SentenceSplit => "sentence_split",
            StageId::PunctuationSpace => "punctuation_space",
            StageId::RuleSpaceCorrection => "rule_space_correction",
            StageId::Split => "split",
            StageId::MultiwordJoin => "multiword_join",
            StageId::BoundMorphemeFix => "bound_morpheme_fix",
            StageId::VerbJoin => "verb_join",
            StageId::LearnedSpaceCorrection => "learned_space_correction",
        }
    }

    pub fn phase(self) -> StagePhase {
        match self {
            StageId::NormalizeChars
            | StageId::Clean
            | StageId::SentenceSplit
            | StageId::PunctuationSpace
            | StageId::RuleSpaceCorrection
            | StageId::LearnedSpaceCorrection => StagePhase::Text,
            StageId::Split => StagePhase::Split,
            StageId::MultiwordJoin | StageId::BoundMorphemeFix | StageId::VerbJoin => StagePhase::Stream,
        }
    }

    fn allowed_options(self) -> &'static [&'static str] {
        match self {
            StageId::NormalizeChars => &["charmap"],
            StageId::RuleSpaceCorrection => &["rules"],
            StageId::SentenceSplit => &["abbreviations"],
            _ => &[],
        }
    }
}

impl FromStr for StageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "bm" | "bound_morphemes" => Some(StageId::BoundMorphemeFix),
            "whitespace" => Some(StageId::Split),
            _ => None,
        };
        alias
            .or_else(|| StageId::ALL.into_iter().find(|id| id.name() == s))
            .ok_or_else(|| {
                let known: Vec<_> = StageId::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!("unknown stage `{s}` (known: {})", known.join(", ")))
            })
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub id: StageId,
    pub options: BTreeMap<String, String>,
}

impl StageSpec {
    pub fn new(id: StageId) -> Self {
        StageSpec {
            id,
            options: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub stages: Vec<StageSpec>,
    /// `None` selects the bundled starter lexicon.
    pub lexicon_dir: Option<PathBuf>,
    pub clean_policy: CleanPolicy,
}

impl PipelineSpec {
    pub fn new(stages: impl IntoIterator<Item = StageId>) -> Result<Self> {
        let spec = PipelineSpec {
            stages: stages.into_iter().map(StageSpec::new).collect(),
            lexicon_dir: None,
            clean_policy: CleanPolicy::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `split` alone.
    pub fn baseline() -> Self {
        PipelineSpec::new([StageId::Split]).expect("valid")
    }

    /// Named presets, or an inline `stage+stage+...` list.
    pub fn from_name(name: &str) -> Result<Self> {
        use StageId::*;
        let stages: Vec<StageId> = match name {
            "baseline" => vec![Split],
            "cleaning" => vec![NormalizeChars, Clean, PunctuationSpace, RuleSpaceCorrection, Split],
            "rules" => vec![NormalizeChars, RuleSpaceCorrection, Split, MultiwordJoin],
            "separators" => vec![SentenceSplit, PunctuationSpace, Split],
            "full" => vec![
                NormalizeChars,
                Clean,
                PunctuationSpace,
                RuleSpaceCorrection,
                Split,
                MultiwordJoin,
                BoundMorphemeFix,
                VerbJoin,
            ],
            _ => name
                .split('+')
                .map(|s| s.trim().parse())
                .collect::<Result<_>>()?,
        };
        PipelineSpec::new(stages)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = Vec::new();
        for stage in &self.stages {
            if seen.contains(&stage.id) {
                return Err(Error::Config(format!("stage `{}` listed more than once", stage.id)));
            }
            seen.push(stage.id);
            for key in stage.options.keys() {
                if !stage.id.allowed_options().contains(&key.as_str()) {
                    return Err(Error::Config(format!("stage `{}` has no option `{key}`", stage.id)));
                }
            }
        }
        self.clean_policy.validate()
    }

    /// Parses the `key = value` format shown in the module docs. Paths are kept as written.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut spec = PipelineSpec {
            stages: Vec::new(),
            lexicon_dir: None,
            clean_policy: CleanPolicy::default(),
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::parse(source_name, line_no, m);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "stage" => {
                    let mut words = value.split_whitespace();
                    let id: StageId = words
                        .next()
                        .ok_or_else(|| err("missing stage id".into()))?
                        .parse()
                        .map_err(|e: Error| err(e.to_string()))?;
                    let mut stage = StageSpec::new(id);
                    for word in words {
                        let (k, v) = word
                            .split_once('=')
                            .ok_or_else(|| err(format!("stage option `{word}` is not `key=value`")))?;
                        stage.options.insert(k.to_string(), v.to_string());
                    }
                    spec.stages.push(stage);
                }
                "lexicon_dir" => spec.lexicon_dir = Some(PathBuf::from(value)),
                _ => {
                    let kind = SpanKind::ALL
                        .into_iter()
                        .find(|k| k.name() == key)
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    *spec.clean_policy.action_mut(kind) = SpanAction::parse(value).map_err(|e| err(e.to_string()))?;
                }
            }
        }
        spec.validate().map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{source_name}: {m}")),
            other => other,
        })?;
        Ok(spec)
    }

    /// Reads a spec file, resolving relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = PipelineSpec::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        if let Some(dir) = &spec.lexicon_dir {
            spec.lexicon_dir = Some(resolve(dir));
        }
        for stage in &mut spec.stages {
            for value in stage.options.values_mut() {
                *value = resolve(Path::new(value.as_str())).display().to_string();
            }
        }
        Ok(spec)
    }

    pub fn stage_ids(&self) -> Vec<StageId> {
        self.stages.iter().map(|s| s.id).collect()
    }

    /// Stage ids in execution order.
    pub fn execution_order(&self) -> Vec<StageId> {
        let mut order: Vec<StageId> = self
            .stages
            .iter()
            .filter(|s| s.id.phase() == StagePhase::Text)
            .map(|s| s.id)
            .collect();
        order.push(StageId::Split);
        order.extend(
            self.stages
                .iter()
                .filter(|s| s.id.phase() == StagePhase::Stream)
                .map(|s| s.id),
        );
        order
    }
}

impl fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(dir) = &self.lexicon_dir {
            writeln!(f, "lexicon_dir = {}", dir.display())?;
        }
        for kind in SpanKind::ALL {
            let action = self.clean_policy.action(kind);
            if *action != SpanAction::Keep {
                writeln!(f, "{} = {action}", kind.name())?;
            }
        }
        for stage in &self.stages {
            write!(f, "stage = {}", stage.id)?;
            for (k, v) in &stage.options {
                write!(f, " {k}={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Per-stage accumulated time, in execution order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub stages: Vec<(StageId, Duration)>,
}

impl StageTimings {
    fn zeroed(order: &[StageId]) -> Self {
        StageTimings {
            stages: order.iter().map(|id| (*id, Duration::ZERO)).collect(),
        }
    }

    fn merge(mut self, other: StageTimings) -> Self {
        for ((_, a), (_, b)) in self.stages.iter_mut().zip(other.stages) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> Duration {
        self.stages.iter().map(|(_, d)| *d).sum()
    }

    pub fn get(&self, id: StageId) -> Option<Duration> {
        self.stages.iter().find(|(s, _)| *s == id).map(|(_, d)| *d)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub stream: TokenStream,
    pub timings: StageTimings,
    pub wall: Duration,
}

enum Stage {
    Normalize(CharMap),
    Clean(CleanPolicy),
    Sentences(SentenceSplitter),
    Punctuation,
    Rules(SpaceRules),
    Split,
    Multiword(MultiwordIndex),
    BoundMorpheme,
    Verb,
}

/// A spec with every resource loaded, ready to run.
pub struct Pipeline {
    spec: PipelineSpec,
    lexicon: Lexicon,
    order: Vec<StageId>,
    stages: Vec<Stage>,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline").field("order", &self.order).finish_non_exhaustive()
    }
}

impl Pipeline {
    /// Loads the lexicon named by the spec (or the starter lexicon) and every stage resource.
    pub fn build(spec: &PipelineSpec) -> Result<Self> {
        let lexicon = match &spec.lexicon_dir {
            Some(dir) => load_lexicon(dir)?,
            None => Lexicon::starter(),
        };
        Pipeline::with_lexicon(spec, lexicon)
    }

    pub fn with_lexicon(spec: &PipelineSpec, lexicon: Lexicon) -> Result<Self> {
        spec.validate()?;
        let order = spec.execution_order();
        let mut stages = Vec::with_capacity(order.len());
        for id in &order {
            let options = spec
                .stages
                .iter()
                .find(|s| s.id == *id)
                .map(|s| s.options.clone())
                .unwrap_or_default();
            let read = |key: &str| -> Result<Option<String>> {
                options
                    .get(key)
                    .map(|p| fs::read_to_string(p).map_err(|e| Error::io(p, e)))
                    .transpose()
            };
            let stage = match id {
                StageId::NormalizeChars => Stage::Normalize(match read("charmap")? {
                    Some(text) => CharMap::parse(&text, &options["charmap"])?,
                    None => CharMap::persian().clone(),
                }),
                StageId::Clean => Stage::Clean(spec.clean_policy.clone()),
                StageId::SentenceSplit => Stage::Sentences(match read("abbreviations")? {
                    Some(text) => SentenceSplitter::new(text.split_whitespace().map(str::to_string)),
                    None => SentenceSplitter::default(),
                }),
                StageId::PunctuationSpace => Stage::Punctuation,
                StageId::RuleSpaceCorrection => Stage::Rules(match read("rules")? {
                    Some(text) => SpaceRules::parse(&text, &options["rules"])?,
                    None => SpaceRules::persian(),
                }),
                StageId::Split => Stage::Split,
                StageId::MultiwordJoin => Stage::Multiword(MultiwordIndex::new(&lexicon)),
                StageId::BoundMorphemeFix => Stage::BoundMorpheme,
                StageId::VerbJoin => Stage::Verb,
                StageId::LearnedSpaceCorrection => {
                    return Err(Error::Config(
                        "learned_space_correction has no built-in implementation; score that tool's token-line output instead"
                            .into(),
                    ))
                }
            };
            stages.push(stage);
        }
        Ok(Pipeline {
            spec: spec.clone(),
            lexicon,
            order,
            stages,
        })
    }

    pub fn spec(&self) -> &PipelineSpec {
        &self.spec
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Stage ids in the order they run.
    pub fn order(&self) -> &[StageId] {
        &self.order
    }

    /// Tokenizes one input line, which may yield several sentences when `sentence_split` is on.
    fn run_line(&self, line: &str, timings: &mut StageTimings) -> Vec<Vec<String>> {
        let mut texts = vec![line.to_string()];
        let mut sentences: Vec<Vec<String>> = Vec::new();
        for (k, stage) in self.stages.iter().enumerate() {
            let start = Instant::now();
            match stage {
                Stage::Normalize(map) => texts.iter_mut().for_each(|t| *t = normalize_chars(t, map)),
                Stage::Clean(policy) => texts.iter_mut().for_each(|t| *t = clean_text(t, policy)),
                Stage::Sentences(splitter) => texts = texts.iter().flat_map(|t| splitter.split(t)).collect(),
                Stage::Punctuation => texts.iter_mut().for_each(|t| *t = punctuation_space(t)),
                Stage::Rules(rules) => texts.iter_mut().for_each(|t| *t = rule_space_correction(t, rules)),
                Stage::Split => sentences = texts.iter().map(|t| split_tokens(t)).collect(),
                Stage::Multiword(index) => sentences.iter_mut().for_each(|s| *s = index.join_sentence(s)),
                Stage::BoundMorpheme => sentences
                    .iter_mut()
                    .for_each(|s| *s = bound_morpheme_sentence(&self.lexicon, s)),
                Stage::Verb => sentences
                    .iter_mut()
                    .for_each(|s| *s = verb_join_sentence(&self.lexicon, s)),
            }
            timings.stages[k].1 += start.elapsed();
        }
        sentences
    }

    /// Tokenizes `text`, treating every non-blank line as one sentence.
    pub fn run(&self, text: &str) -> PipelineOutput {
        let wall = Instant::now();
        let mut timings = StageTimings::zeroed(&self.order);
        let mut stream = TokenStream::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            for sentence in self.run_line(line, &mut timings) {
                stream.push_sentence(sentence);
            }
        }
        PipelineOutput {
            stream,
            timings,
            wall: wall.elapsed(),
        }
    }

    /// Same output as [`Pipeline::run`], lines processed in parallel. Stage timings are summed
    /// over worker threads and may exceed the wall-clock time.
    pub fn run_parallel(&self, text: &str) -> PipelineOutput {
        let wall = Instant::now();
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let (per_line, timings) = lines
            .par_iter()
            .map(|line| {
                let mut t = StageTimings::zeroed(&self.order);
                let sentences = self.run_line(line, &mut t);
                (vec![sentences], t)
            })
            .reduce(
                || (Vec::new(), StageTimings::zeroed(&self.order)),
                |(mut a, ta), (b, tb)| {
                    a.extend(b);
                    (a, ta.merge(tb))
                },
            );
        let mut stream = TokenStream::default();
        for sentence in per_line.into_iter().flatten() {
            stream.push_sentence(sentence);
        }
        PipelineOutput {
            stream,
            timings,
            wall: wall.elapsed(),
        }
    }
}

/// Builds the pipeline for `spec` and runs it over `text`.
pub fn run_pipeline(spec: &PipelineSpec, text: &str) -> Result<PipelineOutput> {
    Ok(Pipeline::build(spec)?.run(text))
}
