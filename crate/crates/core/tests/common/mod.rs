//! Dense reference implementations and synthetic data builders shared by the
//! integration tests. Nothing here calls into the kernels it checks.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensor_topics::corpus::CorpusRecord;
use tensor_topics::cp_als::KruskalModel;
use tensor_topics::ensemble::Component;
use tensor_topics::linalg::Matrix;
use tensor_topics::sparse_tensor::SparseTensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-major dense array with its shape.
pub struct Dense {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(shape: &[usize]) -> Self {
        Dense {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn linear(&self, coord: &[usize]) -> usize {
        coord.iter().zip(&self.shape).fold(0, |acc, (&c, &e)| acc * e + c)
    }

    pub fn coord(&self, mut lin: usize) -> Vec<usize> {
        let mut c = vec![0; self.shape.len()];
        for k in (0..self.shape.len()).rev() {
            c[k] = lin % self.shape[k];
            lin /= self.shape[k];
        }
        c
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_sparse(&self) -> SparseTensor {
        let entries: Vec<(Vec<usize>, f64)> = (0..self.data.len())
            .filter(|&i| self.data[i] != 0.0)
            .map(|i| (self.coord(i), self.data[i]))
            .collect();
        SparseTensor::from_entries(entries, &self.shape).unwrap()
    }
}

pub fn densify(t: &SparseTensor) -> Dense {
    let mut d = Dense::zeros(t.shape());
    for (c, v) in t.iter() {
        let i = d.linear(c);
        d.data[i] += v;
    }
    d
}

pub fn densify_model(m: &KruskalModel) -> Dense {
    let shape = m.shape();
    let mut d = Dense::zeros(&shape);
    for i in 0..d.data.len() {
        let c = d.coord(i);
        let mut total = 0.0;
        for r in 0..m.rank() {
            let mut p = m.weights[r];
            for (k, &ck) in c.iter().enumerate() {
                p *= m.factors[k][(ck, r)];
            }
            total += p;
        }
        d.data[i] = total;
    }
    d
}

/// Column-wise Kronecker product, first operand varying slowest.
fn kron_columns(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols());
    for r in 0..a.cols() {
        for i in 0..a.rows() {
            for j in 0..b.rows() {
                out[(i * b.rows() + j, r)] = a[(i, r)] * b[(j, r)];
            }
        }
    }
    out
}

/// MTTKRP as the mode-`n` unfolding (remaining modes in increasing order,
/// last fastest) times the matching Khatri–Rao product.
pub fn mttkrp_dense(x: &Dense, factors: &[Matrix], n: usize) -> Matrix {
    let others: Vec<usize> = (0..x.shape.len()).filter(|&k| k != n).collect();
    let rank = factors[others[0]].cols();
    let mut kr = factors[*others.last().unwrap()].clone();
    for &k in others.iter().rev().skip(1) {
        kr = kron_columns(&factors[k], &kr);
    }
    let cols: usize = others.iter().map(|&k| x.shape[k]).product();
    // Unfold.
    let mut unfolded = Matrix::zeros(x.shape[n], cols);
    for lin in 0..x.data.len() {
        let c = x.coord(lin);
        let j = others.iter().fold(0, |acc, &k| acc * x.shape[k] + c[k]);
        unfolded[(c[n], j)] = x.data[lin];
    }
    let mut out = Matrix::zeros(x.shape[n], rank);
    for i in 0..x.shape[n] {
        for r in 0..rank {
            out[(i, r)] = (0..cols).map(|j| unfolded[(i, j)] * kr[(j, r)]).sum();
        }
    }
    out
}

pub fn fit_dense(x: &Dense, m: &KruskalModel) -> f64 {
    let md = densify_model(m);
    let resid: f64 = x
        .data
        .iter()
        .zip(&md.data)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    1.0 - resid / x.norm()
}

/// Random sparse tensor with roughly `density` of cells filled by values in
/// (0.1, 2). At least one nonzero is always present.
pub fn random_sparse(shape: &[usize], density: f64, rng: &mut ChaCha8Rng) -> SparseTensor {
    let total: usize = shape.iter().product();
    let mut d = Dense::zeros(shape);
    for i in 0..total {
        if rng.gen::<f64>() < density {
            d.data[i] = rng.gen_range(0.1..2.0);
        }
    }
    if d.data.iter().all(|&v| v == 0.0) {
        let i = rng.gen_range(0..total);
        d.data[i] = 1.0;
    }
    d.to_sparse()
}

pub fn random_factors(shape: &[usize], rank: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<Matrix> {
    shape
        .iter()
        .map(|&rows| Matrix::from_fn(rows, rank, |_, _| rng.gen_range(lo..hi)))
        .collect()
}

pub fn random_model(shape: &[usize], rank: usize, rng: &mut ChaCha8Rng) -> KruskalModel {
    let weights = (0..rank).map(|_| rng.gen_range(0.5..3.0)).collect();
    KruskalModel::new(weights, random_factors(shape, rank, -1.0, 1.0, rng)).unwrap()
}

/// Dense tensor synthesized from a model, stored as COO.
pub fn tensor_from_model(m: &KruskalModel) -> SparseTensor {
    densify_model(m).to_sparse()
}

/// A corpus with three planted topics. Each topic has its own vocabulary,
/// authors and journals; documents draw only from their topic. Every topic
/// has a lead author and a lead journal carrying most of its documents, so
/// that the topic is close to rank one in those modes.
pub struct PlantedCorpus {
    pub records: Vec<CorpusRecord>,
    pub vocab: Vec<Vec<String>>,
    pub journals: Vec<Vec<String>>,
    pub authors: Vec<Vec<String>>,
}

pub fn planted_corpus(seed: u64) -> PlantedCorpus {
    const VOCAB: [&[&str]; 3] = [
        &[
            "asthma", "pollution", "particulate", "ozone", "airway", "wheezing", "emissions", "traffic",
            "inhalation", "smog", "nitrogen", "exposure",
        ],
        &[
            "vaccine", "antibody", "booster", "adjuvant", "placebo", "efficacy", "immunogenicity", "dose",
            "neutralizing", "seroconversion", "trial", "injection",
        ],
        &[
            "anxiety", "depression", "loneliness", "burnout", "insomnia", "wellbeing", "resilience", "coping",
            "stress", "isolation", "survey", "mood",
        ],
    ];
    let journals: Vec<Vec<String>> = vec![
        vec!["environmental research".into(), "atmospheric health".into()],
        vec!["vaccine".into(), "immunology letters".into()],
        vec!["psychiatry research".into(), "mental health review".into()],
    ];
    let authors: Vec<Vec<String>> = (0..3)
        .map(|t| (0..4).map(|a| format!("Author T{t}-{a}")).collect())
        .collect();
    let mut rng = rng(seed);
    let mut records = Vec::new();
    let names = ["alpha", "beta", "gamma"];
    for doc in 0..45 {
        let t = doc % 3;
        let vocab = VOCAB[t];
        // Skewed word frequencies so each topic has a clear keyword profile.
        let body: Vec<&str> = (0..40)
            .map(|_| {
                let u: f64 = rng.gen();
                vocab[((u * u) * vocab.len() as f64) as usize]
            })
            .collect();
        records.push(CorpusRecord {
            first_author: authors[t][pick(&mut rng, &[0.7, 0.1, 0.1, 0.1])].clone(),
            title: format!("{} report {}", names[t], ordinal(doc)),
            journal: journals[t][pick(&mut rng, &[0.8, 0.2])].clone(),
            r#abstract: format!("abstract {} {}", names[t], ordinal(doc)),
            body: body.join(" "),
        });
    }
    PlantedCorpus {
        records,
        vocab: VOCAB.iter().map(|v| v.iter().map(|s| s.to_string()).collect()).collect(),
        journals,
        authors,
    }
}

fn pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let mut u: f64 = rng.gen();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Spelled-out index so that titles survive digit stripping.
pub fn ordinal(mut n: usize) -> String {
    const D: [&str; 10] = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"];
    let mut parts = Vec::new();
    loop {
        parts.push(D[n % 10]);
        n /= 10;
        if n == 0 {
            break;
        }
    }
    parts.reverse();
    parts.join(" ")
}

/// Writes records as a corpus CSV.
pub fn write_corpus_csv(path: &std::path::Path, records: &[CorpusRecord]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["title", "abstract", "first_author", "journal", "body"]).unwrap();
    for r in records {
        w.write_record([&r.title, &r.r#abstract, &r.first_author, &r.journal, &r.body])
            .unwrap();
    }
    w.flush().unwrap();
}

/// A two-mode component whose second slice is `words`.
pub fn component(rank: usize, index: usize, weight: f64, words: Vec<f64>) -> Component {
    Component {
        origin_rank: rank,
        index_in_model: index,
        weight,
        factor_slices: vec![vec![1.0], words],
    }
}

fn unit(len: usize, hot: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; len];
    for &h in hot {
        v[h] = 1.0 / hot.len() as f64;
    }
    v
}

/// Topic A (words 0..3) in ranks 2, 3, 4; topic B (words 4..7) in ranks
/// 3, 4; five noise components on private words, one per rank slot.
pub fn planted_pool() -> Vec<Component> {
    let n = 20;
    let mut a_variant = unit(n, &[0, 1, 2]);
    a_variant[3] = 0.1;
    vec![
        component(2, 0, 5.0, unit(n, &[0, 1, 2])),
        component(3, 0, 4.0, a_variant),
        component(4, 1, 3.5, unit(n, &[0, 1, 2])),
        component(3, 1, 3.0, unit(n, &[4, 5, 6])),
        component(4, 0, 6.0, unit(n, &[4, 5, 6, 7])),
        component(2, 1, 9.0, unit(n, &[8, 9])),
        component(3, 2, 8.0, unit(n, &[10, 11])),
        component(4, 2, 7.0, unit(n, &[12, 13])),
        component(4, 3, 1.0, unit(n, &[14, 15])),
        component(4, 4, 0.5, unit(n, &[16, 17, 18, 19])),
    ]
}
