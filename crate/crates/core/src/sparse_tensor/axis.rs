use std::collections::HashMap;

use crate::error::{Error, Result};

/// Bidirectional label ↔ index mapping for one tensor mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxisMap {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl AxisMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a map from an ordered label list. Duplicate labels are rejected.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut map = Self::new();
        for label in labels {
            let label = label.into();
            if map.index.contains_key(&label) {
                return Err(Error::InvalidArgument(format!("duplicate axis label {label:?}")));
            }
            map.intern(label);
        }
        Ok(map)
    }

    /// Returns the index of `label`, appending it if unseen.
    pub fn intern(&mut self, label: impl Into<String>) -> usize {
        let label = label.into();
        if let Some(&i) = self.index.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        i
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.get(i).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
