//! Regex-based space correction.
//!
//! A rule may only re-segment. This is checked when a rule is loaded: outside its top-level
//! capture groups a pattern may match nothing but joiners (space, ZWNJ, underscore) and
//! zero-width assertions, and the replacement must reproduce every top-level group, in order,
//! separated by joiner literals only.

use std::fmt;

use regex::Regex;
use regex_syntax::hir::{Class, Hir, HirKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::is_joiner;

const DEFAULT_RULES: &str = include_str!("../../data/space_rules.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceRule {
    pub pattern: String,
    /// `$1`/`${name}` group references, joiner characters and `\x{HHHH}` escapes.
    pub replacement: String,
    pub description: String,
}

impl SpaceRule {
    pub fn new(pattern: impl Into<String>, replacement: impl Into<String>, description: impl Into<String>) -> Self {
        SpaceRule {
            pattern: pattern.into(),
            replacement: replacement.into(),
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: SpaceRule,
    regex: Regex,
    template: String,
}

/// An ordered, validated list of [`SpaceRule`]s.
#[derive(Debug, Clone, Default)]
pub struct SpaceRules {
    rules: Vec<CompiledRule>,
}

impl SpaceRules {
    pub fn new(rules: impl IntoIterator<Item = SpaceRule>) -> Result<Self> {
        let rules = rules.into_iter().map(compile).collect::<Result<_>>()?;
        Ok(SpaceRules { rules })
    }

    /// The bundled Persian rules.
    pub fn persian() -> Self {
        SpaceRules::parse(DEFAULT_RULES, "space_rules.tsv").expect("bundled rules are valid")
    }

    /// Parses `PATTERN<TAB>REPLACEMENT<TAB>DESCRIPTION` lines. Lines starting with `#` and blank
    /// lines are skipped; the description is optional.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.splitn(3, '\t');
            let (Some(pattern), Some(replacement)) = (fields.next(), fields.next()) else {
                return Err(Error::parse(source_name, line_no, "expected PATTERN<TAB>REPLACEMENT[<TAB>DESCRIPTION]"));
            };
            let rule = SpaceRule::new(pattern, replacement, fields.next().unwrap_or(""));
            let compiled = compile(rule).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{source_name}:{line_no}: {m}")),
                other => other,
            })?;
            rules.push(compiled);
        }
        Ok(SpaceRules { rules })
    }

    pub fn rules(&self) -> impl Iterator<Item = &SpaceRule> {
        self.rules.iter().map(|r| &r.rule)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl fmt::Display for SpaceRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rules() {
            writeln!(f, "{}\t{}\t{}", r.pattern, r.replacement, r.description)?;
        }
        Ok(())
    }
}

/// Applies every rule in order, each replacing all non-overlapping matches left to right.
pub fn rule_space_correction(text: &str, rules: &SpaceRules) -> String {
    let mut current = text.to_string();
    for rule in &rules.rules {
        if let std::borrow::Cow::Owned(s) = rule.regex.replace_all(&current, rule.template.as_str()) {
            current = s;
        }
    }
    current
}

enum Piece {
    Group(String),
    Literal(char),
}

fn compile(rule: SpaceRule) -> Result<CompiledRule> {
    let bad = |m: String| Error::Config(format!("rule `{}`: {m}", rule.pattern));
    let hir = regex_syntax::Parser::new()
        .parse(&rule.pattern)
        .map_err(|e| bad(format!("invalid pattern: {e}")))?;
    let regex = Regex::new(&rule.pattern).map_err(|e| bad(format!("invalid pattern: {e}")))?;

    let items: Vec<&Hir> = match hir.kind() {
        HirKind::Concat(items) => items.iter().collect(),
        _ => vec![&hir],
    };
    let mut groups: Vec<(u32, Option<String>)> = Vec::new();
    for item in items {
        match item.kind() {
            HirKind::Capture(cap) => groups.push((cap.index, cap.name.as_deref().map(str::to_string))),
            _ if matches_only_joiners(item) => {}
            _ => {
                return Err(bad(
                    "pattern matches non-joiner text outside a top-level capture group".to_string(),
                ))
            }
        }
    }

    let pieces = parse_replacement(&rule.replacement).map_err(bad)?;
    let mut referenced = Vec::new();
    let mut template = String::new();
    for piece in pieces {
        match piece {
            Piece::Literal(c) if is_joiner(c) => template.push(c),
            Piece::Literal(c) => {
                return Err(bad(format!("replacement inserts non-joiner character {c:?}")));
            }
            Piece::Group(name) => {
                let index = match name.parse::<u32>() {
                    Ok(i) => i,
                    Err(_) => groups
                        .iter()
                        .find(|(_, n)| n.as_deref() == Some(name.as_str()))
                        .map(|(i, _)| *i)
                        .ok_or_else(|| bad(format!("replacement references unknown group `{name}`")))?,
                };
                referenced.push(index);
                template.push_str(&format!("${{{index}}}"));
            }
        }
    }
    let expected: Vec<u32> = groups.iter().map(|(i, _)| *i).collect();
    if referenced != expected {
        return Err(bad(format!(
            "replacement must reproduce top-level groups {expected:?} in order, got {referenced:?}"
        )));
    }
    Ok(CompiledRule { rule, regex, template })
}

fn matches_only_joiners(hir: &Hir) -> bool {
    match hir.kind() {
        HirKind::Empty | HirKind::Look(_) => true,
        HirKind::Literal(lit) => std::str::from_utf8(&lit.0).is_ok_and(|s| s.chars().all(is_joiner)),
        HirKind::Class(Class::Unicode(cls)) => cls
            .ranges()
            .iter()
            .all(|r| (r.start()..=r.end()).all(is_joiner)),
        HirKind::Class(Class::Bytes(cls)) => cls
            .ranges()
            .iter()
            .all(|r| (r.start()..=r.end()).all(|b| is_joiner(b as char))),
        HirKind::Repetition(rep) => matches_only_joiners(&rep.sub),
        HirKind::Concat(subs) | HirKind::Alternation(subs) => subs.iter().all(matches_only_joiners),
        HirKind::Capture(_) => false,
    }
}

fn parse_replacement(s: &str) -> std::result::Result<Vec<Piece>, String> {
    let mut pieces = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '$' => match chars.peek() {
                Some('$') => {
                    chars.next();
                    pieces.push(Piece::Literal('$'));
                }
                Some('{') => {
                    chars.next();
                    let name: String = chars.by_ref().take_while(|c| *c != '}').collect();
                    if name.is_empty() {
                        return Err("empty group reference".into());
                    }
                    pieces.push(Piece::Group(name));
                }
                _ => {
                    let mut name = String::new();
                    while let Some(n) = chars.peek().filter(|n| n.is_ascii_alphanumeric() || **n == '_') {
                        name.push(*n);
                        chars.next();
                    }
                    if name.is_empty() {
                        return Err("dangling `$` in replacement".into());
                    }
                    pieces.push(Piece::Group(name));
                }
            },
            '\\' if chars.peek() == Some(&'x') => {
                chars.next();
                if chars.next() != Some('{') {
                    return Err("expected `\\x{HHHH}` escape".into());
                }
                let hex: String = chars.by_ref().take_while(|c| *c != '}').collect();
                let decoded = u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| format!("invalid escape `\\x{{{hex}}}`"))?;
                pieces.push(Piece::Literal(decoded));
            }
            other => pieces.push(Piece::Literal(other)),
        }
    }
    Ok(pieces)
}
