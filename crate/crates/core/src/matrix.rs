//! Dense square matrices indexed by task.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Row-major `n x n` matrix. Serializes as a list of rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone + Default> SquareMatrix<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }
}

impl<T> SquareMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Entries in row-major order together with their coordinates.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &T)> + '_ {
        let n = self.n;
        self.data.iter().enumerate().map(move |(k, v)| ((k / n, k % n), v))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> SquareMatrix<U> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks(self.n.max(1)).take(self.n)
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(
            i < self.n && j < self.n,
            "index ({i}, {j}) out of range for {0}x{0}",
            self.n
        );
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(
            i < self.n && j < self.n,
            "index ({i}, {j}) out of range for {0}x{0}",
            self.n
        );
        &mut self.data[i * self.n + j]
    }
}

impl<T: Serialize> Serialize for SquareMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.rows())
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for SquareMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix is not square"));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let m = SquareMatrix::from_fn(3, |i, j| (i * 3 + j) as u64);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[0,1,2],[3,4,5],[6,7,8]]");
        let back: SquareMatrix<u64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(serde_json::from_str::<SquareMatrix<u64>>("[[1,2],[3]]").is_err());
    }
}
