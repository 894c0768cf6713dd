//! Word vectors in the textual word2vec format and max-pooled cosine similarity.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Case-folded word to vector lookup. All vectors share one dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (String, Vec<f32>)>,
    ) -> Result<EmbeddingTable, EmbeddingError> {
        let mut table = EmbeddingTable::default();
        for (i, (word, v)) in pairs.into_iter().enumerate() {
            table.insert(i + 1, word, v)?;
        }
        Ok(table)
    }

    fn insert(&mut self, line: usize, word: String, v: Vec<f32>) -> Result<(), EmbeddingError> {
        if v.is_empty() {
            return Err(EmbeddingError::Malformed {
                line,
                message: format!("`{word}` has no components"),
            });
        }
        if self.vectors.is_empty() && self.dim == 0 {
            self.dim = v.len();
        } else if v.len() != self.dim {
            return Err(EmbeddingError::Malformed {
                line,
                message: format!("`{word}` has dimension {}, expected {}", v.len(), self.dim),
            });
        }
        // first occurrence wins
        self.vectors.entry(word.to_lowercase()).or_insert(v);
        Ok(())
    }

    /// Reads `word v1 ... vd` lines. A leading `count dim` header is accepted
    /// and its dimension enforced.
    pub fn load(path: &Path) -> Result<EmbeddingTable, EmbeddingError> {
        let file = File::open(path).map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read(BufReader::new(file)).map_err(|e| match e {
            EmbeddingError::Io { source, .. } => EmbeddingError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn read(reader: impl BufRead) -> Result<EmbeddingTable, EmbeddingError> {
        let mut table = EmbeddingTable::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| EmbeddingError::Io {
                path: PathBuf::new(),
                source,
            })?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();
            if i == 0 && rest.len() == 1 {
                if let (Ok(_), Ok(dim)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                    table.dim = dim;
                    continue;
                }
            }
            let v = rest
                .iter()
                .map(|x| x.parse::<f32>())
                .collect::<Result<Vec<f32>, _>>()
                .map_err(|e| EmbeddingError::Malformed {
                    line: i + 1,
                    message: format!("`{word}`: {e}"),
                })?;
            table.insert(i + 1, word.to_string(), v)?;
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.vectors.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    /// Largest cosine over all pairs of in-vocabulary tokens, or `None` when
    /// either side has no known token.
    pub fn max_cosine<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> Option<f64> {
        let a: Vec<&[f32]> = a.iter().filter_map(|w| self.get(w.as_ref())).collect();
        let b: Vec<&[f32]> = b.iter().filter_map(|w| self.get(w.as_ref())).collect();
        a.iter()
            .flat_map(|x| b.iter().map(move |y| cosine(x, y)))
            .fold(None, |best: Option<f64>, c| Some(best.map_or(c, |b| b.max(c))))
    }
}

/// Cosine similarity; zero vectors have similarity 0 with everything.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (*x as f64, *y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_with_and_without_header() {
        let t = EmbeddingTable::read("2 3\nMarry 1 0 0\nspouse 0.9 0.1 0\n".as_bytes()).unwrap();
        assert_eq!((t.len(), t.dim()), (2, 3));
        assert!(t.get("marry").is_some());
        let t = EmbeddingTable::read("a 1 2\nb 3 4\n".as_bytes()).unwrap();
        assert_eq!(t.dim(), 2);
        assert!(EmbeddingTable::read("a 1 2\nb 3\n".as_bytes()).is_err());
        assert!(EmbeddingTable::read("2 3\na 1 2\n".as_bytes()).is_err());
        assert!(EmbeddingTable::read("a 1 x\n".as_bytes()).is_err());
    }

    #[test]
    fn max_pool() {
        let t = EmbeddingTable::read("a 1 0\nb 0 1\nc 1 1\n".as_bytes()).unwrap();
        assert_eq!(t.max_cosine(&["a"], &["a"]), Some(1.0));
        let m = t.max_cosine(&["a", "zzz"], &["b", "c"]).unwrap();
        assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(t.max_cosine(&["zzz"], &["a"]), None);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }
}
