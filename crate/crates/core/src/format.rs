//! JSON instance files.
//!
//! Single objective: `{"n": 3, "label": "MC01", "entries": [[i, j, v], ...]}`
//! with 0-based `i <= j`. An entry `(i, j, v)` with `i < j` adds `v·xᵢxⱼ` to the
//! objective, a diagonal entry adds `v·xᵢ`. Duplicate coordinates are summed.
//!
//! Multi objective: `{"n": 3, "objectives": [<single>, ...]}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{MultiObjectiveSet, QuboInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default)]
    pub label: String,
    pub entries: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiObjectiveFile {
    pub n: usize,
    pub objectives: Vec<InstanceFile>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<QuboInstance> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut summed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, v) in &self.entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { i, j, n });
            }
            if i > j {
                return Err(Error::LowerTriangleEntry { i, j });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { i, j });
            }
            *summed.entry((i, j)).or_insert(0.0) += v;
        }
        let mut q = QuboInstance::zeros(n, self.label.clone())?;
        for ((i, j), v) in summed {
            q.add_term(i, j, v);
        }
        Ok(q)
    }

    /// Upper-triangular entries with zeros omitted.
    pub fn from_instance(q: &QuboInstance) -> Self {
        let n = q.n();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = if i == j { q.get(i, i) } else { q.get(i, j) + q.get(j, i) };
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { n, label: q.label().to_string(), entries }
    }
}

impl MultiObjectiveFile {
    pub fn to_set(&self) -> Result<MultiObjectiveSet> {
        let objectives = self
            .objectives
            .iter()
            .enumerate()
            .map(|(index, o)| {
                if o.n != self.n {
                    return Err(Error::MixedSizes { index, expected: self.n, found: o.n });
                }
                o.to_instance()
            })
            .collect::<Result<Vec<_>>>()?;
        MultiObjectiveSet::new(objectives)
    }

    pub fn from_set(set: &MultiObjectiveSet) -> Self {
        Self { n: set.n(), objectives: set.objectives().iter().map(InstanceFile::from_instance).collect() }
    }
}

pub fn parse_instance(text: &str) -> Result<QuboInstance> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance()
}

pub fn parse_multi(text: &str) -> Result<MultiObjectiveSet> {
    serde_json::from_str::<MultiObjectiveFile>(text)?.to_set()
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<QuboInstance> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn read_multi(path: impl AsRef<Path>) -> Result<MultiObjectiveSet> {
    parse_multi(&fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, q: &QuboInstance) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&InstanceFile::from_instance(q))? + "\n")?;
    Ok(())
}

pub fn write_multi(path: impl AsRef<Path>, set: &MultiObjectiveSet) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&MultiObjectiveFile::from_set(set))? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_diagonal_entries_are_split() {
        let q = parse_instance(r#"{"n": 2, "label": "t", "entries": [[0, 1, 3.0], [0, 0, -1.0]]}"#).unwrap();
        assert_eq!(q.rows(), vec![vec![-1.0, 1.5], vec![1.5, 0.0]]);
        assert_eq!(q.label(), "t");
    }

    #[test]
    fn duplicates_are_summed() {
        let q = parse_instance(r#"{"n": 2, "entries": [[0, 1, 1.0], [0, 1, 1.0], [1, 1, 2], [1, 1, 0.5]]}"#).unwrap();
        assert_eq!(q.rows(), vec![vec![0.0, 1.0], vec![1.0, 2.5]]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            parse_instance(r#"{"n": 2, "entries": [[1, 0, 1.0]]}"#),
            Err(Error::LowerTriangleEntry { i: 1, j: 0 })
        ));
        assert!(matches!(
            parse_instance(r#"{"n": 2, "entries": [[0, 2, 1.0]]}"#),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(parse_instance(r#"{"n": 2, "entries": [[0, 1]]"#), Err(Error::Json(_))));
        assert!(matches!(parse_instance(r#"{"n": 0, "entries": []}"#), Err(Error::Empty)));
    }

    #[test]
    fn multi_file_checks_sizes() {
        let text = r#"{"n": 2, "objectives": [
            {"n": 2, "label": "a", "entries": [[0, 0, 1.0]]},
            {"n": 3, "label": "b", "entries": []}]}"#;
        assert!(matches!(parse_multi(text), Err(Error::MixedSizes { index: 1, .. })));
    }

    #[test]
    fn instance_file_round_trip() {
        let q = parse_instance(r#"{"n": 3, "label": "x", "entries": [[0, 1, 3.0], [0, 0, -1.0], [1, 2, 0.25]]}"#).unwrap();
        let back = InstanceFile::from_instance(&q).to_instance().unwrap();
        assert_eq!(q, back);
    }
}
