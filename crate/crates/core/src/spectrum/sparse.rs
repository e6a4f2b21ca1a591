//! Compressed sparse row matrices, reverse Cuthill–McKee ordering and a
//! skyline (envelope) Cholesky factorization.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square sparse matrix in CSR form with sorted column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. The result depends only on the multiset of
    /// triplets' order within each `(row, col)` group, which the caller fixes.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside a {n}×{n} matrix");
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `self · X` for a dense block `X` with `dim` rows.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            let col = x.column(c);
            for i in 0..self.n {
                out[(i, c)] = self.row(i).map(|(j, v)| v * col[j]).sum();
            }
        }
        out
    }

    /// `a·self + b·other` on the union pattern.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, a * v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, b * v)));
        }
        Self::from_triplets(self.n, t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// `P A Pᵀ` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = Vec::with_capacity(self.nnz());
        for (new_i, &old_i) in perm.iter().enumerate() {
            t.extend(self.row(old_i).map(|(j, v)| (new_i, inv[j], v)));
        }
        Self::from_triplets(self.n, t)
    }

    /// Lower-triangular envelope width summed over rows.
    pub fn profile(&self) -> usize {
        (0..self.n).map(|i| self.row(i).next().map_or(0, |(j, _)| i.saturating_sub(j))).sum()
    }
}

/// Reverse Cuthill–McKee ordering of the symmetric pattern, as `perm[new] =
/// old`. Each connected component starts from a pseudo-peripheral vertex.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let neighbors = |i: usize| a.row(i).map(|(j, _)| j).filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| neighbors(i).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_last = |start: usize, placed: &[bool]| -> (usize, usize) {
        let mut level = vec![usize::MAX; n];
        level[start] = 0;
        let mut q = VecDeque::from([start]);
        let mut last = start;
        while let Some(v) = q.pop_front() {
            if level[v] > level[last] || (level[v] == level[last] && degree[v] < degree[last]) {
                last = v;
            }
            for w in neighbors(v) {
                if !placed[w] && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    q.push_back(w);
                }
            }
        }
        (last, level[last])
    };

    while order.len() < n {
        let seed = (0..n).filter(|&i| !placed[i]).min_by_key(|&i| (degree[i], i)).expect("unplaced vertex remains");
        let (mut start, mut ecc) = bfs_last(seed, &placed);
        for _ in 0..4 {
            let (far, e) = bfs_last(start, &placed);
            if e <= ecc {
                break;
            }
            start = far;
            ecc = e;
        }
        let first = order.len();
        placed[start] = true;
        order.push(start);
        let mut head = first;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = neighbors(v).filter(|&w| !placed[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                placed[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

/// Row-oriented envelope Cholesky factor `A = L Lᵀ` of a symmetric positive
/// definite matrix.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    n: usize,
    /// First stored column of each row.
    first: Vec<usize>,
    /// Offset of row `i`'s entries `L[i][first[i]..=i]`.
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let mut first = vec![0; n];
        let mut start = vec![0; n + 1];
        for i in 0..n {
            first[i] = a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(i).filter(|&(j, _)| j <= i) {
                data[start[i] + j - first[i]] = v;
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let ri = &data[start[i] + k0 - fi..start[i] + j - fi];
                let rj = &data[start[j] + k0 - fj..start[j] + j - fj];
                s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    data[start[i] + j - fi] = s / data[start[j] + j - fj];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::Solver(format!("matrix is not positive definite (pivot {s:e} at row {i})")));
                    }
                    data[start[i] + i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self { n, first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&x[fi..i]).map(|(l, y)| l * y).sum();
            x[i] = (x[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, vec![(1, 0, 1.0), (0, 0, 2.0), (1, 0, 0.5), (0, 1, 3.0)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 0), 1.5);
        assert_eq!(a.get(1, 1), 0.0);
        let mut y = [0.0; 2];
        a.mul_vec(&[1.0, 1.0], &mut y);
        assert_eq!(y, [5.0, 1.5]);
    }

    #[test]
    fn cholesky_solves_random_spd_system() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n = 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + rng.gen::<f64>()));
            for _ in 0..2 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v = rng.gen_range(-0.5..0.5);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        assert!(a.asymmetry() == 0.0);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&x_true, &mut b);
        let chol = SkylineCholesky::factor(&a).unwrap();
        chol.solve_in_place(&mut b);
        for (x, y) in b.iter().zip(&x_true) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(SkylineCholesky::factor(&a), Err(Error::Solver(_))));
    }

    #[test]
    fn rcm_is_a_permutation_and_shrinks_profile() {
        // A path numbered in a scrambled order has a large profile.
        let n = 200;
        let scramble: Vec<usize> = (0..n).map(|i| (i * 73) % n).collect();
        let lap = laplacian_1d(n);
        let a = lap.permuted(&scramble);
        let perm = reverse_cuthill_mckee(&a);
        let mut seen = perm.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let b = a.permuted(&perm);
        assert!(b.profile() < a.profile());
        assert_eq!(b.profile(), n - 1);
    }

    #[test]
    fn rcm_handles_disconnected_patterns() {
        let a = CsrMatrix::from_triplets(4, vec![(0, 0, 1.0), (1, 1, 1.0), (2, 3, 1.0), (3, 2, 1.0), (2, 2, 1.0), (3, 3, 1.0)]);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2, 3]);
    }
}
