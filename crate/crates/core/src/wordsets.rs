//! Target/attribute word set quads.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four word sets behind every bias metric: two target sets and two
/// attribute sets. Entries may be multi-word expressions (space-separated)
/// and are lowercased on construction; the sets must be pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuad", into = "RawQuad")]
pub struct WordSetQuad {
    pub t1: Vec<String>,
    pub t2: Vec<String>,
    pub a1: Vec<String>,
    pub a2: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawQuad {
    t1: Vec<String>,
    t2: Vec<String>,
    a1: Vec<String>,
    a2: Vec<String>,
}

impl TryFrom<RawQuad> for WordSetQuad {
    type Error = Error;
    fn try_from(raw: RawQuad) -> Result<Self> {
        WordSetQuad::new(raw.t1, raw.t2, raw.a1, raw.a2)
    }
}

impl From<WordSetQuad> for RawQuad {
    fn from(q: WordSetQuad) -> Self {
        RawQuad {
            t1: q.t1,
            t2: q.t2,
            a1: q.a1,
            a2: q.a2,
        }
    }
}

impl WordSetQuad {
    pub fn new(t1: Vec<String>, t2: Vec<String>, a1: Vec<String>, a2: Vec<String>) -> Result<Self> {
        let lower = |set: Vec<String>| -> Vec<String> {
            set.into_iter().map(|w| w.to_lowercase()).collect()
        };
        let quad = Self {
            t1: lower(t1),
            t2: lower(t2),
            a1: lower(a1),
            a2: lower(a2),
        };
        quad.validate()?;
        Ok(quad)
    }

    fn validate(&self) -> Result<()> {
        let mut seen: HashSet<&str> = HashSet::new();
        for (name, set) in self.named_sets() {
            if set.is_empty() {
                return Err(Error::EmptyWordSet(name.to_string()));
            }
            for word in set {
                if !seen.insert(word) {
                    return Err(Error::WordSetOverlap {
                        word: word.clone(),
                        set: name.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn named_sets(&self) -> [(&'static str, &Vec<String>); 4] {
        [
            ("t1", &self.t1),
            ("t2", &self.t2),
            ("a1", &self.a1),
            ("a2", &self.a2),
        ]
    }

    /// All entries of all four sets.
    pub fn all_words(&self) -> impl Iterator<Item = &String> {
        self.t1
            .iter()
            .chain(&self.t2)
            .chain(&self.a1)
            .chain(&self.a2)
    }

    /// Swap the two target sets (metric antisymmetry checks use this).
    pub fn swap_targets(&self) -> Self {
        Self {
            t1: self.t2.clone(),
            t2: self.t1.clone(),
            a1: self.a1.clone(),
            a2: self.a2.clone(),
        }
    }

    /// Swap the two attribute sets.
    pub fn swap_attributes(&self) -> Self {
        Self {
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            a1: self.a2.clone(),
            a2: self.a1.clone(),
        }
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_reader(std::fs::File::open(path)?)
    }

    pub fn to_json_writer<W: Write>(&self, writer: W) -> Result<()> {
        Ok(serde_json::to_writer_pretty(writer, self)?)
    }
}
