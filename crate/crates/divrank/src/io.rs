//! JSON / JSONL file formats.
//!
//! A corpus is a JSONL file with one item per line,
//! `{"id": 7, "embedding": [...], "tokens": [...], "group": "d2", "category": "fashion"}`,
//! where `group` is a label of the accompanying spec file or `null`. The spec
//! file is `{"dimension_name": "...", "groups": [...], "ordinal": true}`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use divrank_core::{Corpus, DiversitySpec, Item, ItemId};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub id: u64,
    pub embedding: Vec<f64>,
    #[serde(default)]
    pub tokens: Vec<String>,
    pub group: Option<String>,
    #[serde(default)]
    pub category: String,
}

impl ItemRecord {
    pub fn from_item(item: &Item, spec: &DiversitySpec) -> Self {
        Self {
            id: item.id.0,
            embedding: item.embedding.clone(),
            tokens: item.tokens.iter().cloned().collect(),
            group: item.group.and_then(|g| spec.label(g)).map(str::to_owned),
            category: item.category.clone(),
        }
    }

    pub fn into_item(self, spec: &DiversitySpec) -> Result<Item> {
        let group = match &self.group {
            None => None,
            Some(label) => Some(spec.group(label).ok_or_else(|| {
                Error::config(format!("item {}: unknown group label {label:?}", self.id))
            })?),
        };
        Ok(Item {
            id: ItemId(self.id),
            embedding: self.embedding,
            tokens: self.tokens.into_iter().collect::<BTreeSet<_>>(),
            group,
            category: self.category,
        })
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_owned(),
        line: 0,
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(|source| Error::Json {
        path: path.to_owned(),
        line: 0,
        source,
    })?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_spec(path: &Path) -> Result<DiversitySpec> {
    let spec: DiversitySpec = read_json(path)?;
    spec.validate()?;
    Ok(spec)
}

/// Reads a JSONL corpus; every embedding must share one dimension.
pub fn read_corpus(path: &Path, spec: DiversitySpec) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ItemRecord = serde_json::from_str(&line).map_err(|source| Error::Json {
            path: path.to_owned(),
            line: n + 1,
            source,
        })?;
        items.push(record.into_item(&spec)?);
    }
    let dim = items
        .first()
        .map(|it| it.embedding.len())
        .ok_or_else(|| Error::config(format!("{}: corpus is empty", path.display())))?;
    Ok(Corpus::new(spec, dim, items)?)
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in corpus {
        let record = ItemRecord::from_item(item, corpus.spec());
        serde_json::to_writer(&mut out, &record).map_err(|source| Error::Json {
            path: path.to_owned(),
            line: 0,
            source,
        })?;
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}
