//! Arc, self-loop and two-cycle dependency measures.

use serde::{Deserialize, Serialize};

use crate::matrix::SquareMatrix;
use crate::relations::RelationCounts;

/// `d` scores arcs, `s` self-loops and `l` two-cycles. The diagonals of `d`
/// and `l` are zero and unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyMeasures {
    pub n: usize,
    pub d: SquareMatrix<f64>,
    pub s: Vec<f64>,
    pub l: SquareMatrix<f64>,
}

pub fn dependency_measures(counts: &RelationCounts) -> DependencyMeasures {
    let n = counts.n;
    let d = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let (ab, ba) = (counts.direct[(i, j)], counts.direct[(j, i)]);
        (ab as f64 - ba as f64) / ((ab + ba + 1) as f64)
    });
    let s = (0..n)
        .map(|i| {
            let aa = counts.direct[(i, i)];
            aa as f64 / (aa + 1) as f64
        })
        .collect();
    let l = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let r = counts.repeat2[(i, j)] + counts.repeat2[(j, i)];
        r as f64 / (r + 1) as f64
    });
    DependencyMeasures { n, d, s, l }
}

impl DependencyMeasures {
    /// Measures given directly, e.g. for synthetic solver instances.
    pub fn from_parts(d: SquareMatrix<f64>, s: Vec<f64>, l: SquareMatrix<f64>) -> Self {
        let n = s.len();
        assert!(d.dim() == n && l.dim() == n, "measure dimensions differ");
        Self { n, d, s, l }
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|(_, v)| v.is_finite())
            && self.l.iter().all(|(_, v)| v.is_finite())
            && self.s.iter().all(|v| v.is_finite())
    }
}
