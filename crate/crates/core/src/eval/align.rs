use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::canonical;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    /// A hard divergence (the two sides stop spelling the same text) is an error.
    #[default]
    Strict,
    /// Drop the diverging lines, count them as one false positive and one false negative, and
    /// carry on with the next lines.
    Lenient,
}

impl std::str::FromStr for AlignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(AlignMode::Strict),
            "lenient" => Ok(AlignMode::Lenient),
            _ => Err(Error::Config(format!("unknown alignment mode `{s}`"))),
        }
    }
}

/// Counters produced by [`align`].
///
/// `tn` is always zero: token boundaries have no true-negative unit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub errors: u64,
    pub gold_tokens: u64,
    pub sys_tokens: u64,
    pub tn: u64,
}

impl std::ops::Add for AlignmentCounts {
    type Output = AlignmentCounts;

    fn add(self, o: AlignmentCounts) -> AlignmentCounts {
        AlignmentCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            errors: self.errors + o.errors,
            gold_tokens: self.gold_tokens + o.gold_tokens,
            sys_tokens: self.sys_tokens + o.sys_tokens,
            tn: self.tn + o.tn,
        }
    }
}

impl std::iter::Sum for AlignmentCounts {
    fn sum<I: Iterator<Item = AlignmentCounts>>(iter: I) -> Self {
        iter.fold(AlignmentCounts::default(), |a, b| a + b)
    }
}

/// What the aligner decided, reported to the callback of [`align_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignEvent {
    /// One gold line equal to one system line.
    Match { gold_line: usize, sys_line: usize },
    /// A mismatch region closed: gold lines `gold.0..=gold.1` spell the same text as system lines
    /// `sys.0..=sys.1`.
    Region { gold: (usize, usize), sys: (usize, usize) },
    /// Lenient mode only: the sides stopped spelling the same text and were resynchronised.
    Diverged { gold_line: usize, sys_line: usize },
    /// Lenient mode only: lines left over on one side after the other ended.
    Trailing { gold_lines: u64, sys_lines: u64 },
}

struct Line {
    number: usize,
    canon: String,
}

/// Yields canonical non-blank lines with their 1-based physical line numbers.
struct Lines<I> {
    inner: I,
    number: usize,
    count: u64,
}

impl<I, S> Lines<I>
where
    I: Iterator<Item = Result<S>>,
    S: AsRef<str>,
{
    fn new(inner: I) -> Self {
        Lines { inner, number: 0, count: 0 }
    }

    fn next_line(&mut self) -> Result<Option<Line>> {
        for item in self.inner.by_ref() {
            let raw = item?;
            self.number += 1;
            let raw = raw.as_ref();
            if raw.trim().is_empty() {
                continue;
            }
            self.count += 1;
            return Ok(Some(Line {
                number: self.number,
                canon: canonical(raw),
            }));
        }
        Ok(None)
    }

    fn drain(&mut self) -> Result<u64> {
        let mut n = 0;
        while self.next_line()?.is_some() {
            n += 1;
        }
        Ok(n)
    }
}

fn excerpt(s: &str) -> String {
    const MAX: usize = 40;
    if s.chars().count() <= MAX {
        s.to_string()
    } else {
        let cut: String = s.chars().take(MAX).collect();
        format!("{cut}…")
    }
}

/// Aligns gold token lines against system token lines. Blank lines are ignored on both sides and
/// lines are compared in canonical (joiner-insensitive) form.
///
/// Equal lines count as a true positive. On a mismatch one error is counted for the region, and
/// the side whose accumulated text is a proper prefix of the other's keeps reading lines: every
/// extra system line is a false positive (over-split), every extra gold line a false negative
/// (under-split). The region closes when both accumulations are equal.
pub fn align<G, S, GS, SS>(gold: G, sys: S, mode: AlignMode) -> Result<AlignmentCounts>
where
    G: IntoIterator<Item = GS>,
    S: IntoIterator<Item = SS>,
    GS: AsRef<str>,
    SS: AsRef<str>,
{
    align_with(
        gold.into_iter().map(Ok),
        sys.into_iter().map(Ok),
        mode,
        |_| {},
    )
}

/// Streams two token-line files through [`align`] without loading them.
pub fn align_files(gold: &Path, sys: &Path, mode: AlignMode) -> Result<AlignmentCounts> {
    let open = |p: &Path| -> Result<_> {
        let file = File::open(p).map_err(|e| Error::io(p, e))?;
        let path = p.to_path_buf();
        Ok(BufReader::new(file).lines().map(move |l| l.map_err(|e| Error::io(&path, e))))
    };
    align_with(open(gold)?, open(sys)?, mode, |_| {})
}

/// The general form of [`align`]: fallible line sources and an event callback.
pub fn align_with<G, S, GS, SS, F>(gold: G, sys: S, mode: AlignMode, mut on_event: F) -> Result<AlignmentCounts>
where
    G: Iterator<Item = Result<GS>>,
    S: Iterator<Item = Result<SS>>,
    GS: AsRef<str>,
    SS: AsRef<str>,
    F: FnMut(AlignEvent),
{
    let mut gold = Lines::new(gold);
    let mut sys = Lines::new(sys);
    let mut c = AlignmentCounts::default();
    let strict = mode == AlignMode::Strict;

    'outer: loop {
        let (g, s) = match (gold.next_line()?, sys.next_line()?) {
            (None, None) => break,
            (Some(g), None) => {
                if strict {
                    return Err(Error::Divergence {
                        gold_line: g.number,
                        sys_line: sys.number,
                        detail: "system output ended while gold lines remain".into(),
                    });
                }
                let rest = 1 + gold.drain()?;
                c.fn_ += rest;
                c.errors += 1;
                on_event(AlignEvent::Trailing { gold_lines: rest, sys_lines: 0 });
                break;
            }
            (None, Some(s)) => {
                if strict {
                    return Err(Error::Divergence {
                        gold_line: gold.number,
                        sys_line: s.number,
                        detail: "gold ended while system lines remain".into(),
                    });
                }
                let rest = 1 + sys.drain()?;
                c.fp += rest;
                c.errors += 1;
                on_event(AlignEvent::Trailing { gold_lines: 0, sys_lines: rest });
                break;
            }
            (Some(g), Some(s)) => (g, s),
        };
        if g.canon == s.canon {
            c.tp += 1;
            on_event(AlignEvent::Match {
                gold_line: g.number,
                sys_line: s.number,
            });
            continue;
        }

        c.errors += 1;
        let (first_gold, first_sys) = (g.number, s.number);
        let (mut last_gold, mut last_sys) = (g.number, s.number);
        let mut acc_gold = g.canon;
        let mut acc_sys = s.canon;
        while acc_gold != acc_sys {
            if acc_gold.len() > acc_sys.len() && acc_gold.starts_with(&acc_sys) {
                match sys.next_line()? {
                    Some(line) => {
                        c.fp += 1;
                        last_sys = line.number;
                        acc_sys.push_str(&line.canon);
                    }
                    None if strict => {
                        return Err(Error::Divergence {
                            gold_line: last_gold,
                            sys_line: last_sys,
                            detail: format!("system output ended inside a region (missing `{}`)", excerpt(&acc_gold[acc_sys.len()..])),
                        });
                    }
                    None => {
                        let rest = gold.drain()?;
                        c.fn_ += rest;
                        on_event(AlignEvent::Trailing { gold_lines: rest, sys_lines: 0 });
                        break 'outer;
                    }
                }
            } else if acc_sys.len() > acc_gold.len() && acc_sys.starts_with(&acc_gold) {
                match gold.next_line()? {
                    Some(line) => {
                        c.fn_ += 1;
                        last_gold = line.number;
                        acc_gold.push_str(&line.canon);
                    }
                    None if strict => {
                        return Err(Error::Divergence {
                            gold_line: last_gold,
                            sys_line: last_sys,
                            detail: format!("gold ended inside a region (extra `{}`)", excerpt(&acc_sys[acc_gold.len()..])),
                        });
                    }
                    None => {
                        let rest = sys.drain()?;
                        c.fp += rest;
                        on_event(AlignEvent::Trailing { gold_lines: 0, sys_lines: rest });
                        break 'outer;
                    }
                }
            } else if strict {
                return Err(Error::Divergence {
                    gold_line: last_gold,
                    sys_line: last_sys,
                    detail: format!("gold `{}` vs system `{}`", excerpt(&acc_gold), excerpt(&acc_sys)),
                });
            } else {
                c.fp += 1;
                c.fn_ += 1;
                on_event(AlignEvent::Diverged {
                    gold_line: last_gold,
                    sys_line: last_sys,
                });
                continue 'outer;
            }
        }
        on_event(AlignEvent::Region {
            gold: (first_gold, last_gold),
            sys: (first_sys, last_sys),
        });
    }

    c.gold_tokens = gold.count;
    c.sys_tokens = sys.count;
    Ok(c)
}
