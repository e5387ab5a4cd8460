//! Article corpus ingestion: loading, cleaning, deduplication, tokenization
//! and aggregation into the author × document × journal × word tensor.
//!
//! Input is a delimited table with a header row. Recognized columns:
//!
//! | column         | required | meaning                                         |
//! |----------------|----------|-------------------------------------------------|
//! | `title`        | yes      | article title                                   |
//! | `first_author` | yes      | first author, used verbatim                     |
//! | `journal`      | yes      | journal name (may be empty)                     |
//! | `abstract`     | no       | abstract text, used for deduplication           |
//! | `body`         | one of   | full text inline                                |
//! | `body_path`    | one of   | path to a UTF-8 file holding the full text,     |
//! |                |          | relative to the table's directory               |
//!
//! Other columns are ignored.

mod clean;
mod counts;

use std::fs::{self, File};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

pub use clean::{
    clean_and_filter, clean_label, dedup, tokenize, CleaningRules, CleaningRulesFile, DEFAULT_DNA_PATTERN,
};
pub use counts::{build_counts, counts_to_tensor, QuadCounts, UNKNOWN_AUTHOR, UNKNOWN_JOURNAL};

use crate::error::{Error, IoContext, Result};

pub const MODE_NAMES: [&str; 4] = ["author", "document", "journal", "word"];
pub const AUTHOR_MODE: usize = 0;
pub const DOCUMENT_MODE: usize = 1;
pub const JOURNAL_MODE: usize = 2;
pub const WORD_MODE: usize = 3;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusRecord {
    pub first_author: String,
    pub title: String,
    pub journal: String,
    pub r#abstract: String,
    pub body: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Csv,
    Tsv,
}

impl CorpusFormat {
    fn delimiter(self) -> u8 {
        match self {
            CorpusFormat::Csv => b',',
            CorpusFormat::Tsv => b'\t',
        }
    }

    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("tab") => CorpusFormat::Tsv,
            _ => CorpusFormat::Csv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(CorpusFormat::Csv),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::InvalidArgument(format!("unknown corpus format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub records: Vec<CorpusRecord>,
    /// Rows that could not be parsed.
    pub skipped_rows: usize,
    /// Rows whose `body_path` could not be read.
    pub unreadable_bodies: usize,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LoadedCorpus> {
    let file = File::open(path).at(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_corpus_from_reader(file, format, base)
}

/// Reads a corpus table from any stream; `body_path` entries resolve against
/// `base_dir`.
pub fn load_corpus_from_reader<R: Read>(
    mut reader: R,
    format: CorpusFormat,
    base_dir: &Path,
) -> Result<LoadedCorpus> {
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw).at(base_dir)?;
    if raw.iter().all(u8::is_ascii_whitespace) {
        return Ok(LoadedCorpus::default());
    }

    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(true)
        .from_reader(raw.as_slice());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let missing = |name: &str| Error::InvalidArgument(format!("corpus table has no `{name}` column"));
    let title = col("title").ok_or_else(|| missing("title"))?;
    let author = col("first_author").ok_or_else(|| missing("first_author"))?;
    let journal = col("journal").ok_or_else(|| missing("journal"))?;
    let abstract_col = col("abstract");
    let body = col("body");
    let body_path = col("body_path");
    if body.is_none() && body_path.is_none() {
        return Err(missing("body` or `body_path"));
    }

    let mut out = LoadedCorpus::default();
    for (row, rec) in rdr.records().enumerate() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                log::warn!("corpus row {}: skipped: {e}", row + 2);
                out.skipped_rows += 1;
                continue;
            }
        };
        let field = |i: Option<usize>| i.and_then(|i| rec.get(i)).unwrap_or("").to_string();
        let mut text = field(body);
        if text.trim().is_empty() {
            let rel = field(body_path);
            if !rel.trim().is_empty() {
                match fs::read_to_string(base_dir.join(rel.trim())) {
                    Ok(s) => text = s,
                    Err(e) => {
                        log::debug!("corpus row {}: body {rel:?} unreadable: {e}", row + 2);
                        out.unreadable_bodies += 1;
                    }
                }
            }
        }
        out.records.push(CorpusRecord {
            first_author: field(Some(author)),
            title: field(Some(title)),
            journal: field(Some(journal)),
            r#abstract: field(abstract_col),
            body: text,
        });
    }
    if out.skipped_rows > 0 {
        log::warn!("{} malformed corpus rows skipped", out.skipped_rows);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source() {
        let c = load_corpus_from_reader("".as_bytes(), CorpusFormat::Csv, Path::new(".")).unwrap();
        assert!(c.records.is_empty());
    }

    #[test]
    fn missing_body_yields_empty_record() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b1.txt"), "virus transmission study").unwrap();
        let table = "title,abstract,first_author,journal,body,body_path\n\
                     A,abs a,Smith J,J1,inline body text,\n\
                     B,abs b,Doe A,J2,,b1.txt\n\
                     C,abs c,Roe B,J3,,missing.txt\n";
        let c = load_corpus_from_reader(table.as_bytes(), CorpusFormat::Csv, dir.path()).unwrap();
        assert_eq!(c.records.len(), 3);
        assert_eq!(c.records[0].body, "inline body text");
        assert_eq!(c.records[1].body, "virus transmission study");
        assert_eq!(c.records[2].body, "");
        assert_eq!(c.unreadable_bodies, 1);
    }

    #[test]
    fn malformed_rows_are_counted() {
        let table = "title,first_author,journal,body\nA,X,J,text\nB,Y\nC,Z,J,more\n";
        let c = load_corpus_from_reader(table.as_bytes(), CorpusFormat::Csv, Path::new(".")).unwrap();
        assert_eq!(c.records.len(), 2);
        assert_eq!(c.skipped_rows, 1);
    }

    #[test]
    fn tsv_and_missing_columns() {
        let table = "title\tfirst_author\tjournal\tbody\nA\tX\tJ\ttext\n";
        let c = load_corpus_from_reader(table.as_bytes(), CorpusFormat::Tsv, Path::new(".")).unwrap();
        assert_eq!(c.records[0].journal, "J");
        let bad = "title,journal,body\nA,J,t\n";
        assert!(load_corpus_from_reader(bad.as_bytes(), CorpusFormat::Csv, Path::new(".")).is_err());
        let bad = "title,first_author,journal\nA,X,J\n";
        assert!(load_corpus_from_reader(bad.as_bytes(), CorpusFormat::Csv, Path::new(".")).is_err());
    }

    #[test]
    fn unreadable_source_is_hard_error() {
        assert!(load_corpus(Path::new("/nonexistent/corpus.csv"), CorpusFormat::Csv).is_err());
    }
}
