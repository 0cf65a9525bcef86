//! Labeled corpora: tokenized documents with a hate label and a group label.
//!
//! The on-disk form is JSON Lines, one document per line:
//! `{"tokens": [...], "hate": "HS"|"NON_HS", "group": "<string>"}`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HateLabel {
    #[serde(rename = "HS")]
    Hs,
    #[serde(rename = "NON_HS")]
    NonHs,
}

impl HateLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            HateLabel::Hs => "HS",
            HateLabel::NonHs => "NON_HS",
        }
    }
}

impl std::str::FromStr for HateLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HS" => Ok(HateLabel::Hs),
            "NON_HS" => Ok(HateLabel::NonHs),
            other => Err(Error::InvalidParameter(format!(
                "unknown hate label '{other}' (expected HS or NON_HS)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub tokens: Vec<String>,
    #[serde(rename = "hate")]
    pub hate_label: HateLabel,
    #[serde(rename = "group")]
    pub group_label: String,
}

#[derive(Debug, Clone, Default)]
pub struct LabeledCorpus {
    pub documents: Vec<LabeledDocument>,
}

/// Which label axis an estimation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Hate,
    Group,
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hate" => Ok(Axis::Hate),
            "group" => Ok(Axis::Group),
            other => Err(Error::InvalidParameter(format!(
                "unknown axis '{other}' (expected hate or group)"
            ))),
        }
    }
}

/// Group labels treated as out of scope on the group axis.
pub fn is_neutral_group(label: &str) -> bool {
    label.eq_ignore_ascii_case("neutral") || label.eq_ignore_ascii_case("other")
}

impl LabeledCorpus {
    pub fn new(documents: Vec<LabeledDocument>) -> Result<Self> {
        for (i, doc) in documents.iter().enumerate() {
            if doc.tokens.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "document {i} has no tokens"
                )));
            }
            if doc.group_label.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "document {i} has an empty group label"
                )));
            }
        }
        Ok(Self { documents })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// The label of a document on the chosen axis; `None` when the document
    /// is out of scope (neutral/other group labels on the group axis).
    pub fn axis_label(doc: &LabeledDocument, axis: Axis) -> Option<&str> {
        match axis {
            Axis::Hate => Some(doc.hate_label.as_str()),
            Axis::Group => {
                if is_neutral_group(&doc.group_label) {
                    None
                } else {
                    Some(doc.group_label.as_str())
                }
            }
        }
    }

    pub fn from_jsonl_reader<R: Read>(reader: R) -> Result<Self> {
        let mut documents = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            documents.push(serde_json::from_str(&line)?);
        }
        Self::new(documents)
    }

    pub fn from_jsonl_file(path: &Path) -> Result<Self> {
        Self::from_jsonl_reader(std::fs::File::open(path)?)
    }

    pub fn to_jsonl_writer<W: Write>(&self, mut writer: W) -> Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut writer, doc)?;
            writeln!(writer)?;
        }
        Ok(())
    }
}
