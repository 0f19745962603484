//! Compressed sparse row matrices with the handful of operations the
//! projections need: chained products, row sums and row scaling.

use rayon::prelude::*;

/// Row-major sparse matrix. Column indices inside a row are strictly
/// increasing and every stored value is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from per-row entry lists. Entries are sorted by
    /// column, duplicates are summed and non-positive values dropped.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut last: Option<u32> = None;
            for (c, v) in row {
                assert!((c as usize) < cols, "column {c} out of range for {cols} columns");
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = CsrMatrix {
            rows: n,
            cols,
            indptr,
            indices,
            values,
        };
        m.prune();
        m
    }

    /// Reassembles a matrix from its raw parts, validating structure.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<u32>,
        values: Vec<f64>,
    ) -> Option<Self> {
        if indptr.len() != rows + 1
            || indptr[0] != 0
            || *indptr.last()? != indices.len()
            || indices.len() != values.len()
            || indptr.windows(2).any(|w| w[0] > w[1])
        {
            return None;
        }
        for r in 0..rows {
            let row = &indices[indptr[r]..indptr[r + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c as usize >= cols) {
                return None;
            }
        }
        Some(CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    fn prune(&mut self) {
        if self.values.iter().all(|&v| v > 0.0) {
            return;
        }
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        indptr.push(0);
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] > 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and weights of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn row_len(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        self.row(r).1.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row_sum(r)).collect()
    }

    /// Iterates `(row, col, value)` over the stored entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c as usize, v))
        })
    }

    /// Sparse product `self × rhs` (row-wise Gustavson with a dense
    /// accumulator). Panics on mismatched inner dimensions.
    pub fn matmul(&self, rhs: &CsrMatrix) -> CsrMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions differ: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let cols = rhs.cols;
        let rows: Vec<Vec<(u32, f64)>> = (0..self.rows)
            .into_par_iter()
            .map_init(
                || (vec![0.0f64; cols], vec![false; cols], Vec::<u32>::new()),
                |(acc, seen, touched), r| {
                    let (lc, lv) = self.row(r);
                    for (&k, &a) in lc.iter().zip(lv) {
                        let (rc, rv) = rhs.row(k as usize);
                        for (&c, &b) in rc.iter().zip(rv) {
                            let ci = c as usize;
                            if !seen[ci] {
                                seen[ci] = true;
                                touched.push(c);
                            }
                            acc[ci] += a * b;
                        }
                    }
                    touched.sort_unstable();
                    let out = touched
                        .iter()
                        .filter_map(|&c| {
                            let ci = c as usize;
                            let v = acc[ci];
                            acc[ci] = 0.0;
                            seen[ci] = false;
                            (v > 0.0).then_some((c, v))
                        })
                        .collect();
                    touched.clear();
                    out
                },
            )
            .collect();
        CsrMatrix::from_rows(cols, rows)
    }

    /// Multiplies row `r` by `factors[r]`.
    pub fn scale_rows(&mut self, factors: &[f64]) {
        assert_eq!(factors.len(), self.rows);
        for (r, &f) in factors.iter().enumerate() {
            for v in &mut self.values[self.indptr[r]..self.indptr[r + 1]] {
                *v *= f;
            }
        }
        self.prune();
    }
}
