//! Text format for Kruskal models.
//!
//! ```text
//! # tensor-topics kruskal model
//! format_version 1
//! order 4
//! rank 2
//! shape 3 4 2 9
//! axes ../tensor
//! weights 1.5 0.25
//! factor 0
//! 0.5 0.125
//! ...            (shape[0] rows of `rank` values)
//! factor 1
//! ...
//! ```
//!
//! `axes` names the tensor directory whose axis files label the rows,
//! relative to the model file; `-` when there is none. Values use the
//! shortest round-trip decimal form, so reading back is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::KruskalModel;
use crate::error::{Error, IoContext, Result};
use crate::linalg::Matrix;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "# tensor-topics kruskal model";

pub fn to_string(model: &KruskalModel, axes_ref: Option<&str>) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "format_version {FORMAT_VERSION}").unwrap();
    writeln!(s, "order {}", model.order()).unwrap();
    writeln!(s, "rank {}", model.rank()).unwrap();
    writeln!(s, "shape {}", join(model.shape().iter())).unwrap();
    writeln!(s, "axes {}", axes_ref.unwrap_or("-")).unwrap();
    writeln!(s, "weights {}", join(model.weights.iter())).unwrap();
    for (d, f) in model.factors.iter().enumerate() {
        writeln!(s, "factor {d}").unwrap();
        for i in 0..f.rows() {
            writeln!(s, "{}", join(f.row(i).iter())).unwrap();
        }
    }
    s
}

pub fn write(path: &Path, model: &KruskalModel, axes_ref: Option<&str>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).at(parent)?;
    }
    fs::write(path, to_string(model, axes_ref)).at(path)
}

/// Reads a model and its optional axis reference.
pub fn read(path: &Path) -> Result<(KruskalModel, Option<String>)> {
    let text = fs::read_to_string(path).at(path)?;
    parse(&text).map_err(|(line, message)| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    })
}

type ParseError = (usize, String);

struct Cursor<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| (0, format!("unexpected end of file, expected {what}")))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (n, line) = self.next(key)?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((n, v)),
            _ => Err((n, format!("expected `{key}`"))),
        }
    }
}

fn parse(text: &str) -> Result<(KruskalModel, Option<String>), ParseError> {
    let mut cur = Cursor {
        lines: text.lines().enumerate(),
    };
    let (n, magic) = cur.next("header")?;
    if magic != MAGIC {
        return Err((n, "not a model file".into()));
    }
    let (n, v) = cur.field("format_version")?;
    if v.trim() != FORMAT_VERSION.to_string() {
        return Err((n, format!("unsupported format_version {v}")));
    }
    let (n, v) = cur.field("order")?;
    let order: usize = v.trim().parse().map_err(|_| (n, "bad order".to_string()))?;
    let (n, v) = cur.field("rank")?;
    let rank: usize = v.trim().parse().map_err(|_| (n, "bad rank".to_string()))?;
    let (n, v) = cur.field("shape")?;
    let shape: Vec<usize> = parse_list(v).ok_or((n, "bad shape".to_string()))?;
    if shape.len() != order {
        return Err((n, format!("shape has {} extents, order is {order}", shape.len())));
    }
    let (_, v) = cur.field("axes")?;
    let axes = match v.trim() {
        "-" => None,
        other => Some(other.to_string()),
    };
    let (n, v) = cur.field("weights")?;
    let weights: Vec<f64> = parse_list(v).ok_or((n, "bad weights".to_string()))?;
    if weights.len() != rank {
        return Err((n, format!("{} weights, rank is {rank}", weights.len())));
    }

    let mut factors = Vec::with_capacity(order);
    for (d, &rows) in shape.iter().enumerate() {
        let (n, v) = cur.field("factor")?;
        if v.trim() != d.to_string() {
            return Err((n, format!("expected factor {d}")));
        }
        let mut data = Vec::with_capacity(rows * rank);
        for _ in 0..rows {
            let (n, line) = cur.next("factor row")?;
            let row: Vec<f64> = parse_list(line).ok_or((n, "bad factor row".to_string()))?;
            if row.len() != rank {
                return Err((n, format!("row has {} values, rank is {rank}", row.len())));
            }
            data.extend(row);
        }
        factors.push(Matrix::from_vec(rows, rank, data).expect("sized above"));
    }
    let model = KruskalModel::new(weights, factors).map_err(|e| (0, e.to_string()))?;
    Ok((model, axes))
}

fn join<T: std::fmt::Display>(xs: impl Iterator<Item = T>) -> String {
    xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split_whitespace().map(|p| p.parse().ok()).collect()
}
