//! Text serialization of labeled tensors.
//!
//! A tensor directory holds `tensor.tns` plus one `axis-<mode>.txt` per mode:
//!
//! ```text
//! # tensor-topics sparse tensor
//! format_version 1
//! order 4
//! shape 3 4 2 9
//! modes author document journal word
//! nnz 12
//! 0 0 0 0 0.6931471805599453
//! ...
//! ```
//!
//! Coordinates are zero-based. Values use the shortest round-trip decimal
//! form. Each axis file lists one label per line, in index order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{AxisMap, SparseTensor};
use crate::error::{Error, IoContext, Result};

pub const TENSOR_FILE: &str = "tensor.tns";
pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "# tensor-topics sparse tensor";

/// A tensor together with the names and labels of its modes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTensor {
    pub tensor: SparseTensor,
    pub mode_names: Vec<String>,
    pub axes: Vec<AxisMap>,
}

impl LabeledTensor {
    pub fn new(tensor: SparseTensor, mode_names: Vec<String>, axes: Vec<AxisMap>) -> Result<Self> {
        let lt = Self {
            tensor,
            mode_names,
            axes,
        };
        lt.validate()?;
        Ok(lt)
    }

    fn validate(&self) -> Result<()> {
        let order = self.tensor.order();
        if self.mode_names.len() != order || self.axes.len() != order {
            return Err(Error::ShapeMismatch(format!(
                "tensor order {order} but {} mode names and {} axes",
                self.mode_names.len(),
                self.axes.len()
            )));
        }
        for (k, (axis, &extent)) in self.axes.iter().zip(self.tensor.shape()).enumerate() {
            if axis.len() != extent {
                return Err(Error::ShapeMismatch(format!(
                    "mode {k} ({}) has extent {extent} but {} labels",
                    self.mode_names[k],
                    axis.len()
                )));
            }
        }
        for name in &self.mode_names {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidArgument(format!("bad mode name {name:?}")));
            }
        }
        Ok(())
    }

    pub fn axis_path(dir: &Path, mode_name: &str) -> PathBuf {
        dir.join(format!("axis-{mode_name}.txt"))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        self.validate()?;
        fs::create_dir_all(dir).at(dir)?;

        let t = &self.tensor;
        let mut out = String::with_capacity(32 * t.nnz() + 128);
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
        writeln!(out, "order {}", t.order()).unwrap();
        writeln!(out, "shape {}", join(t.shape())).unwrap();
        writeln!(out, "modes {}", self.mode_names.join(" ")).unwrap();
        writeln!(out, "nnz {}", t.nnz()).unwrap();
        for (c, v) in t.iter() {
            writeln!(out, "{} {v}", join(c)).unwrap();
        }
        let path = dir.join(TENSOR_FILE);
        fs::write(&path, out).at(&path)?;

        for (name, axis) in self.mode_names.iter().zip(&self.axes) {
            let mut s = String::new();
            for label in axis.labels() {
                if label.contains('\n') || label.contains('\r') {
                    return Err(Error::InvalidArgument(format!(
                        "label {label:?} in mode {name} contains a line break"
                    )));
                }
                s.push_str(label);
                s.push('\n');
            }
            let path = Self::axis_path(dir, name);
            fs::write(&path, s).at(&path)?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(TENSOR_FILE);
        let text = fs::read_to_string(&path).at(&path)?;
        let fail = |line: usize, message: String| Error::Format {
            path: path.clone(),
            line,
            message,
        };

        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| fail(0, format!("missing {key} line")))?;
            if key == "#" {
                return if line == MAGIC {
                    Ok((n, String::new()))
                } else {
                    Err(fail(n, "not a tensor file".into()))
                };
            }
            match line.split_once(' ') {
                Some((k, rest)) if k == key => Ok((n, rest.to_string())),
                _ if line == key => Ok((n, String::new())),
                _ => Err(fail(n, format!("expected `{key}`"))),
            }
        };
        header("#")?;
        let (n, version) = header("format_version")?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(fail(n, format!("unsupported format_version {version}")));
        }
        let (n, order) = header("order")?;
        let order: usize = order.trim().parse().map_err(|_| fail(n, "bad order".into()))?;
        let (n, shape) = header("shape")?;
        let shape: Vec<usize> = parse_list(&shape).ok_or_else(|| fail(n, "bad shape".into()))?;
        if shape.len() != order {
            return Err(fail(n, format!("shape has {} extents, order is {order}", shape.len())));
        }
        let (n, modes) = header("modes")?;
        let mode_names: Vec<String> = modes.split_whitespace().map(str::to_string).collect();
        if mode_names.len() != order {
            return Err(fail(n, format!("{} mode names, order is {order}", mode_names.len())));
        }
        let (n, nnz) = header("nnz")?;
        let nnz: usize = nnz.trim().parse().map_err(|_| fail(n, "bad nnz".into()))?;

        let mut entries = Vec::with_capacity(nnz);
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coord: Option<Vec<usize>> =
                parts.by_ref().take(order).map(|p| p.parse().ok()).collect();
            let coord = coord.ok_or_else(|| fail(n, "bad coordinate".into()))?;
            let value: f64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| fail(n, "bad value".into()))?;
            if coord.len() != order || parts.next().is_some() {
                return Err(fail(n, "wrong number of fields".into()));
            }
            entries.push((coord, value));
        }
        if entries.len() != nnz {
            return Err(fail(0, format!("header says nnz {nnz}, found {}", entries.len())));
        }
        let tensor = SparseTensor::from_entries(entries, &shape)?;

        let mut axes = Vec::with_capacity(order);
        for name in &mode_names {
            let path = Self::axis_path(dir, name);
            let text = fs::read_to_string(&path).at(&path)?;
            axes.push(AxisMap::from_labels(text.lines())?);
        }
        Self::new(tensor, mode_names, axes)
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    s.split_whitespace().map(|p| p.parse().ok()).collect()
}
