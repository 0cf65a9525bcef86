//! Static word embeddings: loading, saving, cosine geometry and
//! nearest-neighbor search.
//!
//! The on-disk format is the word2vec text format: a `"<count> <dim>"` header
//! line followed by one `"<word> <v1> ... <vd>"` line per word. All lookups
//! are case-insensitive (vocabularies from lowercased corpora are the norm);
//! the stored words keep their original spelling so that save/load round-trips
//! are exact.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::wordsets::WordSetQuad;

/// An immutable set of word vectors with a fixed dimension.
#[derive(Debug, Clone)]
pub struct Embedding {
    words: Vec<String>,
    /// Lowercased forms, parallel to `words`.
    lower_words: Vec<String>,
    /// Row-major storage, one `dim`-length row per word.
    vectors: Vec<f64>,
    dim: usize,
    /// Lowercased word -> row index.
    index: HashMap<String, usize>,
}

impl Embedding {
    /// Build an embedding from parallel word/vector lists.
    pub fn new(words: Vec<String>, vectors: Vec<Vec<f64>>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if words.len() != vectors.len() {
            return Err(Error::LengthMismatch {
                left: words.len(),
                right: vectors.len(),
            });
        }
        let mut flat = Vec::with_capacity(words.len() * dim);
        let mut lower_words = Vec::with_capacity(words.len());
        let mut index = HashMap::with_capacity(words.len());
        for (i, (word, row)) in words.iter().zip(&vectors).enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    word: word.clone(),
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue(word.clone()));
            }
            let lower = word.to_lowercase();
            if index.insert(lower.clone(), i).is_some() {
                return Err(Error::DuplicateWord(word.clone()));
            }
            lower_words.push(lower);
            flat.extend_from_slice(row);
        }
        Ok(Self {
            words,
            lower_words,
            vectors: flat,
            dim,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Words in insertion order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(&word.to_lowercase())
    }

    /// True when every space-separated token of `expression` is in the vocabulary.
    pub fn contains_expression(&self, expression: &str) -> bool {
        !expression.is_empty() && expression.split(' ').all(|t| self.contains(t))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    fn row_of(&self, word: &str) -> Option<&[f64]> {
        self.index.get(&word.to_lowercase()).map(|&i| self.row(i))
    }

    /// Replace the vector at row `i`; the new vector must have the right
    /// dimension.
    pub fn set_row(&mut self, i: usize, v: &[f64]) {
        assert_eq!(
            v.len(),
            self.dim,
            "replacement vector has the wrong dimension"
        );
        self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(v);
    }

    pub(crate) fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(&word.to_lowercase()).copied()
    }

    /// Resolve an expression to a vector: a single in-vocabulary token maps to
    /// its vector, a multi-token expression to the arithmetic mean of the
    /// token vectors. Tokens are separated by single spaces.
    pub fn vector_of(&self, expression: &str) -> Result<Vec<f64>> {
        if expression.is_empty() {
            return Err(Error::EmptyExpression);
        }
        let mut acc = vec![0.0; self.dim];
        let mut n = 0usize;
        for token in expression.split(' ') {
            let row = self
                .row_of(token)
                .ok_or_else(|| Error::OutOfVocabulary(token.to_string()))?;
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
            n += 1;
        }
        if n > 1 {
            let inv = 1.0 / n as f64;
            for a in &mut acc {
                *a *= inv;
            }
        }
        Ok(acc)
    }

    /// Cosine similarity of two expressions resolved via [`vector_of`].
    ///
    /// [`vector_of`]: Embedding::vector_of
    pub fn cosine(&self, x: &str, y: &str) -> Result<f64> {
        let vx = self.vector_of(x)?;
        let vy = self.vector_of(y)?;
        let nx = norm(&vx);
        let ny = norm(&vy);
        if nx == 0.0 {
            return Err(Error::ZeroNorm(x.to_string()));
        }
        if ny == 0.0 {
            return Err(Error::ZeroNorm(y.to_string()));
        }
        Ok(dot(&vx, &vy) / (nx * ny))
    }

    /// Up to `k` vocabulary words closest to `word` by cosine, best first.
    ///
    /// The query word and everything in `exclude` are left out, as are
    /// zero-norm vectors (their cosine is undefined). Ties are broken by
    /// vocabulary insertion order.
    pub fn nearest_neighbors(
        &self,
        word: &str,
        k: usize,
        exclude: &HashSet<String>,
    ) -> Result<Vec<String>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let query = self
            .row_of(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?
            .to_vec();
        let query_lower = word.to_lowercase();
        let exclude: HashSet<String> = exclude.iter().map(|w| w.to_lowercase()).collect();
        Ok(self.neighbors_of_vector(&query, k, |lower| {
            *lower == query_lower || exclude.contains(lower)
        }))
    }

    /// Nearest vocabulary words to an arbitrary query vector. `skip` receives
    /// each candidate's lowercased form.
    pub(crate) fn neighbors_of_vector<F>(&self, query: &[f64], k: usize, skip: F) -> Vec<String>
    where
        F: Fn(&String) -> bool,
    {
        let qn = norm(query);
        if qn == 0.0 {
            return Vec::new();
        }
        let mut scored: Vec<(usize, f64)> = Vec::new();
        for i in 0..self.words.len() {
            if skip(&self.lower_words[i]) {
                continue;
            }
            let row = self.row(i);
            let rn = norm(row);
            if rn == 0.0 {
                continue;
            }
            scored.push((i, dot(query, row) / (qn * rn)));
        }
        // Stable sort keeps insertion order among cosine ties.
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        scored
            .into_iter()
            .take(k)
            .map(|(i, _)| self.words[i].clone())
            .collect()
    }

    /// Rescale every vector to unit norm, leaving zero vectors untouched.
    pub(crate) fn normalize_all(&mut self) {
        for i in 0..self.words.len() {
            let n = norm(self.row(i));
            if n > 0.0 {
                let start = i * self.dim;
                for v in &mut self.vectors[start..start + self.dim] {
                    *v /= n;
                }
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean norm of a raw vector.
pub fn norm_of(a: &[f64]) -> f64 {
    norm(a)
}

pub fn cosine_of(a: &[f64], b: &[f64]) -> Result<f64> {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm("<vector>".into()));
    }
    Ok(dot(a, b) / (na * nb))
}

/// Parse the word2vec text format.
pub fn load_embedding<R: Read>(source: R) -> Result<Embedding> {
    let mut reader = BufReader::new(source);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let mut parts = header.split_whitespace();
    let count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedHeader(header.trim().to_string()))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedHeader(header.trim().to_string()))?;
    if parts.next().is_some() || dim == 0 {
        return Err(Error::MalformedHeader(header.trim().to_string()));
    }

    let mut words = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for line in reader.lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let word = fields.next().unwrap_or_default().to_string();
        let mut row = Vec::with_capacity(dim);
        for field in fields {
            if field.is_empty() {
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| Error::NonFiniteValue(word.clone()))?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(word.clone()));
            }
            row.push(v);
        }
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                word,
                expected: dim,
                found: row.len(),
            });
        }
        words.push(word);
        vectors.push(row);
    }
    if words.len() != count {
        return Err(Error::RowCount {
            expected: count,
            found: words.len(),
        });
    }
    Embedding::new(words, vectors, dim)
}

/// Write the word2vec text format. Floats are rendered with Rust's shortest
/// round-trip formatting, so `load(save(e))` reproduces every vector exactly.
pub fn save_embedding<W: Write + ?Sized>(e: &Embedding, sink: &mut W) -> Result<()> {
    writeln!(sink, "{} {}", e.len(), e.dim())?;
    for (i, word) in e.words().iter().enumerate() {
        sink.write_all(word.as_bytes())?;
        for v in e.row(i) {
            write!(sink, " {}", v)?;
        }
        writeln!(sink)?;
    }
    Ok(())
}

pub fn load_embedding_file(path: &std::path::Path) -> Result<Embedding> {
    load_embedding(std::fs::File::open(path)?)
}

/// Drop out-of-vocabulary target words and rebalance the other target set.
///
/// Each target set first loses its OOV entries; the set that lost fewer then
/// loses enough uniformly sampled (seeded) entries to restore `|t1| = |t2|`.
/// Attribute sets must be fully in-vocabulary and are never touched.
pub fn prune_weat_targets(quad: &WordSetQuad, e: &Embedding, seed: u64) -> Result<WordSetQuad> {
    for a in quad.a1.iter().chain(&quad.a2) {
        if !e.contains_expression(a) {
            return Err(Error::OovAttribute(a.clone()));
        }
    }
    let keep_oov = |set: &[String]| -> Vec<String> {
        set.iter()
            .filter(|w| e.contains_expression(w))
            .cloned()
            .collect()
    };
    let mut t1 = keep_oov(&quad.t1);
    let mut t2 = keep_oov(&quad.t2);
    let lost1 = quad.t1.len() - t1.len();
    let lost2 = quad.t2.len() - t2.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if lost1 > lost2 {
        remove_random(&mut t2, lost1 - lost2, &mut rng);
    } else if lost2 > lost1 {
        remove_random(&mut t1, lost2 - lost1, &mut rng);
    }
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::EmptyWordSet("target set emptied by pruning".into()));
    }
    WordSetQuad::new(t1, t2, quad.a1.clone(), quad.a2.clone())
}

fn remove_random(set: &mut Vec<String>, count: usize, rng: &mut ChaCha8Rng) {
    let count = count.min(set.len());
    let mut doomed = rand::seq::index::sample(rng, set.len(), count).into_vec();
    doomed.sort_unstable_by(|a, b| b.cmp(a));
    for i in doomed {
        set.remove(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn small() -> Embedding {
        Embedding::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            2,
        )
        .unwrap()
    }

    fn random_embedding(n: usize, dim: usize, seed: u64) -> Embedding {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = (0..n).map(|i| format!("w{i}")).collect();
        let vectors = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        Embedding::new(words, vectors, dim).unwrap()
    }

    #[test]
    fn load_basic() {
        let e = load_embedding("2 3\na 1 0 0\nb 0 1 0\n".as_bytes()).unwrap();
        assert_eq!(e.words(), &["a", "b"]);
        assert_eq!(e.dim(), 3);
        assert_eq!(e.row(0), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn load_rejects_dimension_mismatch() {
        let err = load_embedding("2 3\na 1 0\nb 0 1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn load_rejects_bad_header() {
        assert!(matches!(
            load_embedding("banana\n".as_bytes()).unwrap_err(),
            Error::MalformedHeader(_)
        ));
        assert!(matches!(
            load_embedding("2 0\n".as_bytes()).unwrap_err(),
            Error::MalformedHeader(_)
        ));
    }

    #[test]
    fn load_rejects_duplicates_and_nonfinite() {
        assert!(matches!(
            load_embedding("2 1\na 1\nA 2\n".as_bytes()).unwrap_err(),
            Error::DuplicateWord(_)
        ));
        assert!(matches!(
            load_embedding("1 1\na NaN\n".as_bytes()).unwrap_err(),
            Error::NonFiniteValue(_)
        ));
    }

    #[test]
    fn load_rejects_row_count_mismatch() {
        assert!(matches!(
            load_embedding("3 1\na 1\nb 2\n".as_bytes()).unwrap_err(),
            Error::RowCount { .. }
        ));
    }

    #[test]
    fn save_round_trip_is_exact() {
        let e = random_embedding(50, 10, 42);
        let mut buf = Vec::new();
        save_embedding(&e, &mut buf).unwrap();
        let back = load_embedding(buf.as_slice()).unwrap();
        assert_eq!(back.words(), e.words());
        for i in 0..e.len() {
            assert_eq!(back.row(i), e.row(i), "row {i} not bit-exact");
        }
    }

    #[test]
    fn save_renders_the_expected_text() {
        let e = Embedding::new(vec!["a".into()], vec![vec![1.0, 0.0]], 2).unwrap();
        let mut buf = Vec::new();
        save_embedding(&e, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 2\na 1 0\n");
    }

    #[test]
    fn save_empty_embedding() {
        let e = Embedding::new(vec![], vec![], 4).unwrap();
        let mut buf = Vec::new();
        save_embedding(&e, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 4\n");
    }

    #[test]
    fn load_tolerates_crlf_line_endings() {
        let e = load_embedding("2 2\r\na 1 0\r\nb 0 1\r\n".as_bytes()).unwrap();
        assert_eq!(e.words(), &["a", "b"]);
        assert_eq!(e.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn vector_of_single_and_mean() {
        let e = small();
        assert_eq!(e.vector_of("a").unwrap(), vec![1.0, 0.0]);
        assert_eq!(e.vector_of("a b").unwrap(), vec![0.5, 0.5]);
        match e.vector_of("a z").unwrap_err() {
            Error::OutOfVocabulary(w) => assert_eq!(w, "z"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lookup_is_case_insensitive() {
        let e = small();
        assert!(e.contains("A"));
        assert_eq!(e.vector_of("A").unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn cosine_basics() {
        let e = small();
        assert!((e.cosine("a", "a").unwrap() - 1.0).abs() < 1e-12);
        assert!(e.cosine("a", "b").unwrap().abs() < 1e-12);
        assert!((e.cosine("c", "a").unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn cosine_zero_norm_is_an_error() {
        let e = Embedding::new(
            vec!["a".into(), "z".into()],
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            2,
        )
        .unwrap();
        assert!(matches!(
            e.cosine("a", "z").unwrap_err(),
            Error::ZeroNorm(_)
        ));
    }

    #[test]
    fn cosine_is_symmetric_and_scale_invariant() {
        let e = random_embedding(40, 8, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let i = rng.gen_range(0..e.len());
            let j = rng.gen_range(0..e.len());
            let (wi, wj) = (&e.words()[i], &e.words()[j]);
            let ab = e.cosine(wi, wj).unwrap();
            let ba = e.cosine(wj, wi).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
        // scaling one stored vector by a positive factor changes nothing
        let mut scaled = e.clone();
        let row: Vec<f64> = scaled.row(3).iter().map(|v| v * 17.5).collect();
        scaled.set_row(3, &row);
        let w3 = e.words()[3].clone();
        for j in 0..e.len() {
            let wj = e.words()[j].clone();
            if norm(e.row(j)) == 0.0 {
                continue;
            }
            let before = e.cosine(&w3, &wj).unwrap();
            let after = scaled.cosine(&w3, &wj).unwrap();
            assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbors_match_full_sort_oracle() {
        let e = random_embedding(100, 10, 3);
        let query = "w17";
        let k = 12;
        let got = e.nearest_neighbors(query, k, &HashSet::new()).unwrap();

        // independent oracle: full sort over all cosines
        let qv = e.vector_of(query).unwrap();
        let mut all: Vec<(usize, f64)> = (0..e.len())
            .filter(|&i| e.words()[i] != query)
            .map(|i| {
                let r = e.row(i);
                (i, dot(&qv, r) / (norm(&qv) * norm(r)))
            })
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let expect: Vec<String> = all[..k]
            .iter()
            .map(|&(i, _)| e.words()[i].clone())
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn neighbors_respect_exclusions() {
        let e = small();
        let mut exclude = HashSet::new();
        exclude.insert("c".to_string());
        let got = e.nearest_neighbors("a", 5, &exclude).unwrap();
        assert_eq!(got, vec!["b".to_string()]);

        let all: HashSet<String> = e.words().iter().cloned().collect();
        assert!(e.nearest_neighbors("a", 5, &all).unwrap().is_empty());
    }

    #[test]
    fn neighbor_ties_break_by_insertion_order() {
        let e = Embedding::new(
            vec!["q".into(), "x".into(), "y".into(), "z".into()],
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 2.0],
                vec![0.0, 3.0],
            ],
            2,
        )
        .unwrap();
        // x, y, z are all at cosine 0 from q
        let got = e.nearest_neighbors("q", 3, &HashSet::new()).unwrap();
        assert_eq!(got, vec!["x".to_string(), "y".into(), "z".into()]);
    }

    fn quad() -> WordSetQuad {
        WordSetQuad::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["d".into(), "e".into(), "f".into()],
            vec!["g".into()],
            vec!["h".into()],
        )
        .unwrap()
    }

    fn quad_embedding(words: &[&str]) -> Embedding {
        let vectors = (0..words.len())
            .map(|i| vec![i as f64 + 1.0, 1.0])
            .collect();
        Embedding::new(words.iter().map(|s| s.to_string()).collect(), vectors, 2).unwrap()
    }

    #[test]
    fn prune_identity_when_all_present() {
        let e = quad_embedding(&["a", "b", "c", "d", "e", "f", "g", "h"]);
        let out = prune_weat_targets(&quad(), &e, 0).unwrap();
        assert_eq!(out.t1, quad().t1);
        assert_eq!(out.t2, quad().t2);
    }

    #[test]
    fn prune_balances_sizes_and_is_deterministic() {
        // 'c' is missing, so t2 must lose exactly one word
        let e = quad_embedding(&["a", "b", "d", "e", "f", "g", "h"]);
        let out = prune_weat_targets(&quad(), &e, 9).unwrap();
        assert_eq!(out.t1, vec!["a".to_string(), "b".into()]);
        assert_eq!(out.t2.len(), 2);
        let again = prune_weat_targets(&quad(), &e, 9).unwrap();
        assert_eq!(out.t2, again.t2);
        // a different seed may pick a different word but sizes still match
        let other = prune_weat_targets(&quad(), &e, 1).unwrap();
        assert_eq!(other.t1.len(), other.t2.len());
    }

    #[test]
    fn prune_errors() {
        // attribute word missing
        let e = quad_embedding(&["a", "b", "c", "d", "e", "f", "g"]);
        assert!(matches!(
            prune_weat_targets(&quad(), &e, 0).unwrap_err(),
            Error::OovAttribute(_)
        ));
        // every t1 word missing empties the set
        let e = quad_embedding(&["d", "e", "f", "g", "h"]);
        assert!(matches!(
            prune_weat_targets(&quad(), &e, 0).unwrap_err(),
            Error::EmptyWordSet(_)
        ));
    }
}
