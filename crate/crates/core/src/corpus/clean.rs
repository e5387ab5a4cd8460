use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use super::CorpusRecord;
use crate::error::{Error, IoContext, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
pub const DEFAULT_DNA_PATTERN: &str = "^[acgtu]{8,}$";
const VOWELS: &str = "aeiouy";

/// Rule-based token and record filters.
#[derive(Debug, Clone)]
pub struct CleaningRules {
    pub stopwords: BTreeSet<String>,
    pub min_token_len: usize,
    /// Tokens matching this (after lower-casing) are treated as nucleotide
    /// sequences and removed.
    pub dna_pattern: Regex,
    /// Tokens with no vowel (`aeiouy`) are nonsense.
    pub require_vowel: bool,
    /// Tokens with a character repeated this many times in a row are nonsense.
    pub max_repeat: usize,
    /// Tokens with this many consecutive consonants are nonsense.
    pub max_consonant_run: usize,
    /// Bodies whose letters are more than this fraction non-ASCII are dropped.
    pub non_english_threshold: f64,
    /// When > 0, words seen only in capitalized form and in fewer than this
    /// many documents are removed as probable names.
    pub name_df_floor: usize,
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self {
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            min_token_len: 3,
            dna_pattern: Regex::new(DEFAULT_DNA_PATTERN).expect("valid default pattern"),
            require_vowel: true,
            max_repeat: 4,
            max_consonant_run: 6,
            non_english_threshold: 0.5,
            name_df_floor: 0,
        }
    }
}

/// Key-value (TOML) form of [`CleaningRules`]. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleaningRulesFile {
    /// Replaces the built-in list. Relative to the config file.
    pub stopwords_file: Option<String>,
    #[serde(default)]
    pub extra_stopwords: Vec<String>,
    pub min_token_len: Option<usize>,
    pub dna_pattern: Option<String>,
    pub require_vowel: Option<bool>,
    pub max_repeat: Option<usize>,
    pub max_consonant_run: Option<usize>,
    pub non_english_threshold: Option<f64>,
    pub name_df_floor: Option<usize>,
}

impl CleaningRulesFile {
    pub fn into_rules(self, base_dir: &Path) -> Result<CleaningRules> {
        let mut rules = CleaningRules::default();
        if let Some(p) = &self.stopwords_file {
            rules.stopwords = CleaningRules::read_stopwords(&base_dir.join(p))?;
        }
        rules
            .stopwords
            .extend(self.extra_stopwords.iter().map(|w| w.trim().to_lowercase()));
        if let Some(v) = self.min_token_len {
            rules.min_token_len = v;
        }
        if let Some(v) = &self.dna_pattern {
            rules.dna_pattern = Regex::new(v)?;
        }
        if let Some(v) = self.require_vowel {
            rules.require_vowel = v;
        }
        if let Some(v) = self.max_repeat {
            rules.max_repeat = v;
        }
        if let Some(v) = self.max_consonant_run {
            rules.max_consonant_run = v;
        }
        if let Some(v) = self.non_english_threshold {
            rules.non_english_threshold = v;
        }
        if let Some(v) = self.name_df_floor {
            rules.name_df_floor = v;
        }
        rules.validate()?;
        Ok(rules)
    }
}

impl CleaningRules {
    pub fn validate(&self) -> Result<()> {
        if self.min_token_len == 0 {
            return Err(Error::InvalidArgument("min_token_len must be at least 1".into()));
        }
        if self.max_repeat < 2 || self.max_consonant_run < 2 {
            return Err(Error::InvalidArgument(
                "max_repeat and max_consonant_run must be at least 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.non_english_threshold) {
            return Err(Error::InvalidArgument("non_english_threshold outside [0, 1]".into()));
        }
        if let Some(w) = self.stopwords.iter().find(|w| w.to_lowercase() != **w) {
            return Err(Error::InvalidArgument(format!("stopword {w:?} is not lower-case")));
        }
        Ok(())
    }

    /// Loads rules from a TOML key-value file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).at(path)?;
        let file: CleaningRulesFile = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        file.into_rules(path.parent().unwrap_or(Path::new(".")))
    }

    /// One word per line; blank lines and `#` comments ignored.
    pub fn read_stopwords(path: &Path) -> Result<BTreeSet<String>> {
        Ok(parse_stopwords(&fs::read_to_string(path).at(path)?))
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn is_dna(&self, token: &str) -> bool {
        self.dna_pattern.is_match(token)
    }

    pub fn is_nonsense(&self, token: &str) -> bool {
        if self.require_vowel && !token.chars().any(|c| VOWELS.contains(c)) {
            return true;
        }
        let mut run_char = None;
        let mut run = 0;
        let mut consonants = 0;
        for c in token.chars() {
            if Some(c) == run_char {
                run += 1;
            } else {
                run_char = Some(c);
                run = 1;
            }
            if run >= self.max_repeat {
                return true;
            }
            if c.is_ascii_alphabetic() && !VOWELS.contains(c) {
                consonants += 1;
                if consonants >= self.max_consonant_run {
                    return true;
                }
            } else {
                consonants = 0;
            }
        }
        false
    }

    /// Whether a lower-cased token survives every token filter.
    pub fn keep_token(&self, token: &str) -> bool {
        token.chars().count() >= self.min_token_len
            && !self.is_stopword(token)
            && !self.is_dna(token)
            && !self.is_nonsense(token)
    }
}

fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Lower-cases and replaces every non-letter with a space, then collapses
/// whitespace. `"COVID-19 & Vaccines 2021!"` becomes `"covid vaccines"`.
pub fn clean_label(s: &str) -> String {
    let mapped: String = s
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphabetic() { c } else { ' ' })
        .collect();
    normalize_ws(&mapped)
}

pub(crate) fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fraction of alphabetic characters that are not ASCII letters; 1 when
/// there are no letters at all.
fn non_ascii_letter_fraction(body: &str) -> f64 {
    let (mut letters, mut foreign) = (0usize, 0usize);
    for c in body.chars().filter(|c| c.is_alphabetic()) {
        letters += 1;
        if !c.is_ascii_alphabetic() {
            foreign += 1;
        }
    }
    if letters == 0 {
        1.0
    } else {
        foreign as f64 / letters as f64
    }
}

/// Drops bodiless and non-English records and normalizes title, journal and
/// author. Order is preserved.
pub fn clean_and_filter(records: &[CorpusRecord], rules: &CleaningRules) -> Vec<CorpusRecord> {
    records
        .iter()
        .filter(|r| !r.body.trim().is_empty())
        .filter(|r| non_ascii_letter_fraction(&r.body) <= rules.non_english_threshold)
        .map(|r| CorpusRecord {
            first_author: normalize_ws(&r.first_author),
            title: clean_label(&r.title),
            journal: clean_label(&r.journal),
            r#abstract: r.r#abstract.clone(),
            body: r.body.clone(),
        })
        .collect()
}

/// Keeps the first record per non-empty title and per non-empty abstract.
pub fn dedup(records: &[CorpusRecord]) -> Vec<CorpusRecord> {
    let mut titles = HashSet::new();
    let mut abstracts = HashSet::new();
    let mut out = Vec::new();
    for r in records {
        let title = (!r.title.is_empty()).then(|| r.title.clone());
        let abs = normalize_ws(&r.r#abstract.to_lowercase());
        let abs = (!abs.is_empty()).then_some(abs);
        if title.as_ref().is_some_and(|t| titles.contains(t))
            || abs.as_ref().is_some_and(|a| abstracts.contains(a))
        {
            continue;
        }
        titles.extend(title);
        abstracts.extend(abs);
        out.push(r.clone());
    }
    out
}

/// Maximal runs of letters, in original case.
pub(crate) fn raw_tokens(body: &str) -> impl Iterator<Item = &str> {
    body.split(|c: char| !c.is_alphabetic()).filter(|t| !t.is_empty())
}

/// Lower-cased alphabetic tokens that pass the stopword, length, DNA and
/// nonsense filters.
pub fn tokenize(body: &str, rules: &CleaningRules) -> Vec<String> {
    raw_tokens(body)
        .map(str::to_lowercase)
        .filter(|t| rules.keep_token(t))
        .collect()
}
