//! Word-set expansion through an auxiliary embedding.

use std::collections::HashSet;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::wordsets::WordSetQuad;

/// Append to each set the k nearest auxiliary-embedding neighbors of each of
/// its original entries, skipping neighbors already present anywhere in the
/// quad (including neighbors added earlier in the scan). Scan order is t1,
/// t2, a1, a2, each in list order; seed entries missing from the auxiliary
/// vocabulary are skipped with a warning.
pub fn expand_word_sets(quad: &WordSetQuad, aux: &Embedding, k: usize) -> Result<WordSetQuad> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut sets: [Vec<String>; 4] = [
        quad.t1.clone(),
        quad.t2.clone(),
        quad.a1.clone(),
        quad.a2.clone(),
    ];
    let mut union: HashSet<String> = quad.all_words().cloned().collect();

    let originals = [&quad.t1, &quad.t2, &quad.a1, &quad.a2];
    for (set, originals) in sets.iter_mut().zip(originals) {
        for word in originals {
            if !aux.contains_expression(word) {
                log::warn!("expansion seed '{word}' not in auxiliary vocabulary; skipped");
                continue;
            }
            let query = aux.vector_of(word)?;
            let word_lower = word.to_lowercase();
            let neighbors = aux.neighbors_of_vector(&query, k, |lower| *lower == word_lower);
            for neighbor in neighbors {
                let neighbor = neighbor.to_lowercase();
                if union.insert(neighbor.clone()) {
                    set.push(neighbor);
                }
            }
        }
    }

    let [t1, t2, a1, a2] = sets;
    WordSetQuad::new(t1, t2, a1, a2)
}
