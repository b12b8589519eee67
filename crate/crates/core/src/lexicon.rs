//! Linguistic resources for the tokenizer stages.
//!
//! A lexicon directory holds one file per resource, one entry per line, `#` comments:
//!
//! | file | contents |
//! |------|----------|
//! | `past_stems.txt` | past tense verb stems |
//! | `present_stems.txt` | present tense verb stems |
//! | `auxiliaries.txt` | auxiliary/copula forms following a stem |
//! | `verb_prefixes.txt` | separate prefixes preceding a stem (imperfective, negation) |
//! | `verb_endings.txt` | person endings or participle markers, attached or separate |
//! | `prefixes.txt` | word prefixes joined to the following token |
//! | `suffixes.txt` | plural/possessive signs joined to the preceding token |
//! | `multiwords.txt` | multiword units, parts separated by single spaces |
//!
//! A missing file leaves the corresponding set empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{is_joiner, normalize_chars, CharMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    PastStems,
    PresentStems,
    Auxiliaries,
    VerbPrefixes,
    VerbEndings,
    Prefixes,
    Suffixes,
    Multiwords,
}

impl Resource {
    pub const ALL: [Resource; 8] = [
        Resource::PastStems,
        Resource::PresentStems,
        Resource::Auxiliaries,
        Resource::VerbPrefixes,
        Resource::VerbEndings,
        Resource::Prefixes,
        Resource::Suffixes,
        Resource::Multiwords,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Resource::PastStems => "past_stems.txt",
            Resource::PresentStems => "present_stems.txt",
            Resource::Auxiliaries => "auxiliaries.txt",
            Resource::VerbPrefixes => "verb_prefixes.txt",
            Resource::VerbEndings => "verb_endings.txt",
            Resource::Prefixes => "prefixes.txt",
            Resource::Suffixes => "suffixes.txt",
            Resource::Multiwords => "multiwords.txt",
        }
    }

    fn starter_data(self) -> &'static str {
        match self {
            Resource::PastStems => include_str!("../data/lexicon/past_stems.txt"),
            Resource::PresentStems => include_str!("../data/lexicon/present_stems.txt"),
            Resource::Auxiliaries => include_str!("../data/lexicon/auxiliaries.txt"),
            Resource::VerbPrefixes => include_str!("../data/lexicon/verb_prefixes.txt"),
            Resource::VerbEndings => include_str!("../data/lexicon/verb_endings.txt"),
            Resource::Prefixes => include_str!("../data/lexicon/prefixes.txt"),
            Resource::Suffixes => include_str!("../data/lexicon/suffixes.txt"),
            Resource::Multiwords => include_str!("../data/lexicon/multiwords.txt"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub past_stems: BTreeSet<String>,
    pub present_stems: BTreeSet<String>,
    pub auxiliaries: BTreeSet<String>,
    pub verb_prefixes: BTreeSet<String>,
    pub verb_endings: BTreeSet<String>,
    pub prefixes: BTreeSet<String>,
    pub suffixes: BTreeSet<String>,
    pub multiwords: BTreeSet<Vec<String>>,
}

impl Lexicon {
    /// The small lexicon bundled with the crate.
    pub fn starter() -> Lexicon {
        let mut lex = Lexicon::default();
        for res in Resource::ALL {
            lex.ingest(res, res.starter_data());
        }
        lex
    }

    /// Builds a lexicon from in-memory word lists. Multiword entries are given space-separated.
    /// Entries are trimmed and normalized the same way [`load_lexicon`] does.
    pub fn from_lists(lists: &[(Resource, &[&str])]) -> Lexicon {
        let mut lex = Lexicon::default();
        for (res, entries) in lists {
            let text = entries.join("\n");
            lex.ingest(*res, &text);
        }
        lex
    }

    pub fn set(&self, res: Resource) -> Option<&BTreeSet<String>> {
        match res {
            Resource::PastStems => Some(&self.past_stems),
            Resource::PresentStems => Some(&self.present_stems),
            Resource::Auxiliaries => Some(&self.auxiliaries),
            Resource::VerbPrefixes => Some(&self.verb_prefixes),
            Resource::VerbEndings => Some(&self.verb_endings),
            Resource::Prefixes => Some(&self.prefixes),
            Resource::Suffixes => Some(&self.suffixes),
            Resource::Multiwords => None,
        }
    }

    fn set_mut(&mut self, res: Resource) -> Option<&mut BTreeSet<String>> {
        match res {
            Resource::PastStems => Some(&mut self.past_stems),
            Resource::PresentStems => Some(&mut self.present_stems),
            Resource::Auxiliaries => Some(&mut self.auxiliaries),
            Resource::VerbPrefixes => Some(&mut self.verb_prefixes),
            Resource::VerbEndings => Some(&mut self.verb_endings),
            Resource::Prefixes => Some(&mut self.prefixes),
            Resource::Suffixes => Some(&mut self.suffixes),
            Resource::Multiwords => None,
        }
    }

    pub fn is_stem(&self, token: &str) -> bool {
        self.past_stems.contains(token) || self.present_stems.contains(token)
    }

    /// A stem, optionally carrying an attached verb ending.
    pub fn is_verb_form(&self, token: &str) -> bool {
        if self.is_stem(token) {
            return true;
        }
        self.verb_endings.iter().any(|ending| {
            token
                .strip_suffix(ending.as_str())
                .is_some_and(|stem| !stem.is_empty() && self.is_stem(stem))
        })
    }

    /// Every single-token entry across all sets.
    pub fn contains_any(&self, token: &str) -> bool {
        Resource::ALL
            .iter()
            .filter_map(|r| self.set(*r))
            .any(|s| s.contains(token))
    }

    pub fn counts(&self) -> BTreeMap<Resource, usize> {
        Resource::ALL
            .iter()
            .map(|r| {
                let n = match self.set(*r) {
                    Some(s) => s.len(),
                    None => self.multiwords.len(),
                };
                (*r, n)
            })
            .collect()
    }

    fn ingest(&mut self, res: Resource, text: &str) {
        for (_, entry) in entries(text.lines().enumerate().map(|(i, l)| (i + 1, l))) {
            self.insert(res, &entry, &mut Vec::new());
        }
    }

    fn insert(&mut self, res: Resource, entry: &str, dups: &mut Vec<(Resource, String)>) {
        let entry = normalize_chars(entry, CharMap::persian());
        let fresh = match self.set_mut(res) {
            Some(set) => set.insert(entry.clone()),
            None => {
                let parts: Vec<String> = entry.split(' ').filter(|p| !p.is_empty()).map(str::to_string).collect();
                self.multiwords.insert(parts)
            }
        };
        if !fresh {
            dups.push((res, entry));
        }
    }

    /// Writes every resource file into `dir`. Loading the directory again yields an equal lexicon.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for res in Resource::ALL {
            let mut out = String::new();
            match self.set(res) {
                Some(set) => {
                    for entry in set {
                        out.push_str(entry);
                        out.push('\n');
                    }
                }
                None => {
                    for parts in &self.multiwords {
                        out.push_str(&parts.join(" "));
                        out.push('\n');
                    }
                }
            }
            let path = dir.join(res.file_name());
            fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Trimmed, non-comment lines.
fn entries<'a>(lines: impl Iterator<Item = (usize, &'a str)> + 'a) -> impl Iterator<Item = (usize, String)> + 'a {
    lines.filter_map(|(n, raw)| {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        (!line.is_empty()).then(|| (n, line.to_string()))
    })
}

/// Loads every resource file found in `dir`; see the module docs for file names.
pub fn load_lexicon(dir: &Path) -> Result<Lexicon> {
    load_lexicon_with_report(dir).map(|(lex, _)| lex)
}

/// Like [`load_lexicon`], also reporting duplicates and invariant violations.
pub fn load_lexicon_with_report(dir: &Path) -> Result<(Lexicon, LexiconReport)> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(ErrorKind::NotFound, "lexicon directory not found"),
        ));
    }
    let mut lex = Lexicon::default();
    let mut dups = Vec::new();
    for res in Resource::ALL {
        let path = dir.join(res.file_name());
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => continue,
            Err(e) => return Err(Error::io(&path, e)),
        };
        let name = path.display().to_string();
        let lines = decode_lines(&bytes, &name)?;
        for (_, entry) in entries(lines.iter().map(|(n, l)| (*n, *l))) {
            lex.insert(res, &entry, &mut dups);
        }
    }
    let mut report = validate_lexicon(&lex);
    report.duplicates = dups;
    Ok((lex, report))
}

/// Splits raw bytes into lines, failing on the first line that is not UTF-8.
pub(crate) fn decode_lines<'a>(bytes: &'a [u8], source_name: &str) -> Result<Vec<(usize, &'a str)>> {
    bytes
        .split(|b| *b == b'\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            std::str::from_utf8(raw)
                .map(|s| (i + 1, s))
                .map_err(|_| Error::Encoding {
                    source_name: source_name.to_string(),
                    line: i + 1,
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub resource: Resource,
    pub entry: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconReport {
    pub counts: BTreeMap<Resource, usize>,
    pub duplicates: Vec<(Resource, String)>,
    pub violations: Vec<Violation>,
    /// Entries listed both as prefix and as suffix. They attach as suffixes first.
    pub ambiguous_affixes: Vec<String>,
}

impl LexiconReport {
    /// No duplicates, violations or ambiguities. Counts are informational.
    pub fn is_clean(&self) -> bool {
        self.duplicates.is_empty() && self.violations.is_empty() && self.ambiguous_affixes.is_empty()
    }
}

pub fn validate_lexicon(lex: &Lexicon) -> LexiconReport {
    let mut report = LexiconReport {
        counts: lex.counts(),
        ..Default::default()
    };
    let mut flag = |resource, entry: &str, reason: &str| {
        report.violations.push(Violation {
            resource,
            entry: entry.to_string(),
            reason: reason.to_string(),
        })
    };
    for res in Resource::ALL {
        if let Some(set) = lex.set(res) {
            for entry in set {
                if entry.is_empty() {
                    flag(res, entry, "empty entry");
                } else if entry.chars().any(|c| is_joiner(c) || c.is_whitespace()) {
                    flag(res, entry, "contains a joiner or whitespace");
                } else if normalize_chars(entry, CharMap::persian()) != *entry {
                    flag(res, entry, "not in normalized form");
                }
            }
        }
    }
    for parts in &lex.multiwords {
        let shown = parts.join(" ");
        if parts.len() < 2 {
            flag(Resource::Multiwords, &shown, "multiword entry needs at least two parts");
        }
        if parts.iter().any(|p| p.is_empty() || p.chars().any(|c| is_joiner(c) || c.is_whitespace())) {
            flag(Resource::Multiwords, &shown, "multiword part is empty or contains a joiner");
        }
    }
    report.ambiguous_affixes = lex.prefixes.intersection(&lex.suffixes).cloned().collect();
    report
}
