//! Running CP-ALS at several ranks, pooling the components and keeping the
//! distinct, cross-rank-stable ones.
//!
//!     cargo run --release --example ensemble_selection

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensor_topics::cp_als::AlsOptions;
use tensor_topics::ensemble::{decompose_ensemble, select, SelectionConfig, Strategy};
use tensor_topics::sparse_tensor::SparseTensor;

/// Three disjoint blocks, one per "topic", plus a little background noise.
fn block_tensor(rng: &mut ChaCha8Rng) -> tensor_topics::Result<SparseTensor> {
    let shape = [9, 30, 6, 36];
    let mut entries = Vec::new();
    for topic in 0..3 {
        for _ in 0..400 {
            let c = [
                topic * 3 + rng.gen_range(0..3),
                topic * 10 + rng.gen_range(0..10),
                topic * 2 + rng.gen_range(0..2),
                topic * 12 + rng.gen_range(0..12),
            ];
            entries.push((c, 1.0));
        }
    }
    for _ in 0..60 {
        let c = shape.map(|n| rng.gen_range(0..n));
        entries.push((c, 0.2));
    }
    SparseTensor::from_entries(entries, &shape)
}

fn main() -> tensor_topics::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = block_tensor(&mut rng)?;
    let opts = AlsOptions {
        seed: 11,
        ..AlsOptions::default()
    };
    for strategy in [Strategy::StableThenDedup, Strategy::GreedyDedup] {
        let cfg = SelectionConfig {
            ranks: vec![2, 3, 4, 6],
            threshold: 0.35,
            strategy,
        };
        let pool = decompose_ensemble(&t, &cfg, &opts)?;
        let sel = select(&pool, &cfg, 3)?;
        println!("{strategy}: kept {} of {} pooled components", sel.kept.len(), pool.len());
        for (k, &i) in sel.details.iter().zip(&sel.kept) {
            let words = &pool[i].factor_slices[3];
            let top = (0..words.len()).max_by(|&a, &b| words[a].total_cmp(&words[b])).unwrap_or(0);
            let partners: Vec<String> = k.stability_partners.iter().map(|(id, _)| id.to_string()).collect();
            println!(
                "  {} λ={:8.3}  heaviest word {top:2} (topic {})  partners [{}]",
                k.id,
                k.weight,
                top / 12,
                partners.join(" ")
            );
        }
    }
    Ok(())
}
