//! Cleaning, deduplicating and counting the bundled toy corpus, then
//! printing what ends up in the tensor.
//!
//!     cargo run --example ingest_corpus [path/to/corpus.csv]

use std::path::PathBuf;

use tensor_topics::corpus::{
    build_counts, clean_and_filter, dedup, load_corpus, CleaningRules, CorpusFormat, MODE_NAMES, WORD_MODE,
};

fn main() -> tensor_topics::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.csv"));
    let rules = CleaningRules::default();

    let loaded = load_corpus(&path, CorpusFormat::from_path(&path))?;
    let cleaned = clean_and_filter(&loaded.records, &rules);
    let records = dedup(&cleaned);
    println!(
        "{} rows loaded, {} after cleaning, {} after dedup",
        loaded.records.len(),
        cleaned.len(),
        records.len()
    );

    let counts = build_counts(&records, &rules);
    let labeled = counts.to_labeled()?;
    let t = &labeled.tensor;
    println!(
        "tensor {:?} ({}), nnz {}, {} tokens",
        t.shape(),
        MODE_NAMES.join(" × "),
        t.nnz(),
        counts.total_tokens()
    );

    let words = &labeled.axes[WORD_MODE];
    let mut totals = vec![0u64; words.len()];
    for (k, n) in &counts.counts {
        totals[k[WORD_MODE]] += n;
    }
    let mut order: Vec<usize> = (0..totals.len()).collect();
    order.sort_by_key(|&w| std::cmp::Reverse(totals[w]));
    println!("most frequent words:");
    for &w in order.iter().take(10) {
        println!("  {:>4}  {}", totals[w], words.label(w).unwrap_or("?"));
    }
    Ok(())
}
