//! Lowest eigenpairs of the pencil `K u = μ M u` with `K` symmetric positive
//! semidefinite and `M` symmetric positive definite.
//!
//! Small problems are solved densely. Larger ones use a restarted block
//! Krylov method on the shift-inverted operator `(K + M)⁻¹ M` (shift
//! `σ = −1`, below the spectrum), with an envelope Cholesky factorization in
//! reverse Cuthill–McKee order and Rayleigh–Ritz extraction from `VᵀKV`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sparse::{reverse_cuthill_mckee, CsrMatrix, SkylineCholesky};
use crate::error::{Error, Result};

/// Problems up to this dimension are solved with a dense factorization.
pub const DENSE_LIMIT: usize = 600;
/// Required `‖Ku − μMu‖ / (‖Mu‖ max(1, μ))` for every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Extra block columns beyond the number of wanted pairs.
pub const BLOCK_PADDING: usize = 5;
/// Krylov blocks generated per restart cycle (besides the start block).
const KRYLOV_STEPS: usize = 3;
const MAX_CYCLES: usize = 200;
const SEED: u64 = 0x5eed_1e55;

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors, one per column.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    /// Restart cycles used (0 for the dense path).
    pub cycles: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dense,
    Krylov,
}

/// The `m_lowest` smallest eigenpairs.
pub fn solve_eigs(k: &CsrMatrix, m: &CsrMatrix, m_lowest: usize) -> Result<Eigenpairs> {
    solve_eigs_with(k, m, m_lowest, Method::Auto)
}

pub fn solve_eigs_with(k: &CsrMatrix, m: &CsrMatrix, m_lowest: usize, method: Method) -> Result<Eigenpairs> {
    let n = k.dim();
    if m.dim() != n {
        return Err(Error::Precondition(format!("K is {n}×{n} but M is {0}×{0}", m.dim())));
    }
    if m_lowest == 0 || 2 * m_lowest > n {
        return Err(Error::Precondition(format!(
            "can compute between 1 and dim/2 = {} eigenpairs, asked for {m_lowest}",
            n / 2
        )));
    }
    let pairs = match method {
        Method::Dense => dense(k, m, m_lowest)?,
        Method::Krylov => krylov(k, m, m_lowest)?,
        Method::Auto if n <= DENSE_LIMIT => dense(k, m, m_lowest)?,
        Method::Auto => krylov(k, m, m_lowest)?,
    };
    if let Some((i, r)) = pairs.residuals.iter().enumerate().find(|(_, &r)| !(r <= RESIDUAL_TOL)) {
        return Err(Error::Solver(format!(
            "eigenpair {} (μ = {}) has relative residual {r:e} > {RESIDUAL_TOL:e}",
            i + 1,
            pairs.values[i]
        )));
    }
    Ok(pairs)
}

fn residuals(k: &CsrMatrix, m: &CsrMatrix, values: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
    let ku = k.mul_dense(vectors);
    let mu = m.mul_dense(vectors);
    values
        .iter()
        .enumerate()
        .map(|(i, &lam)| (ku.column(i) - mu.column(i) * lam).norm() / (mu.column(i).norm() * lam.abs().max(1.0)))
        .collect()
}

fn dense(k: &CsrMatrix, m: &CsrMatrix, m_lowest: usize) -> Result<Eigenpairs> {
    let kd = k.to_dense();
    let md = m.to_dense();
    let chol = md
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Solver("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let x = l
        .solve_lower_triangular(&kd)
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order[..m_lowest].iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(k.dim(), m_lowest, |r, c| eig.eigenvectors[(r, order[c])]);
    let vectors = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let residuals = residuals(k, m, &values, &vectors);
    Ok(Eigenpairs { values, vectors, residuals, cycles: 0 })
}

/// Applies `M` to every column of `x`, in parallel.
fn mass_apply(m: &CsrMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.dim();
    let mut out = DMatrix::zeros(n, x.ncols());
    out.as_mut_slice().par_chunks_mut(n).zip(x.as_slice().par_chunks(n)).for_each(|(y, xc)| m.mul_vec(xc, y));
    out
}

/// Applies `(K + M)⁻¹ M` to every column of `x`, in parallel.
fn shift_invert_apply(chol: &SkylineCholesky, m: &CsrMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = mass_apply(m, x);
    let n = m.dim();
    y.as_mut_slice().par_chunks_mut(n).for_each(|col| chol.solve_in_place(col));
    y
}

/// `M`-orthonormalizes the columns of `x` against the first `used` columns of
/// `v` (whose `M`-images are in `mv`) and among themselves, dropping columns
/// that become numerically dependent. Returns the surviving block and its
/// `M`-image.
fn orthonormalize(
    m: &CsrMatrix,
    v: &DMatrix<f64>,
    mv: &DMatrix<f64>,
    used: usize,
    mut x: DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let norms0: Vec<f64> = {
        let mx = mass_apply(m, &x);
        (0..x.ncols()).map(|j| x.column(j).dot(&mx.column(j)).max(0.0).sqrt()).collect()
    };
    if used > 0 {
        let vb = v.columns(0, used);
        let mvb = mv.columns(0, used);
        for _ in 0..2 {
            let coeffs = mvb.tr_mul(&x);
            x -= vb * coeffs;
        }
    }
    let mut mx = mass_apply(m, &x);
    let mut keep = Vec::with_capacity(x.ncols());
    for (j, &norm0) in norms0.iter().enumerate() {
        for _ in 0..2 {
            for &i in &keep {
                let c: f64 = mx.column(i).dot(&x.column(j));
                let (xi, mxi) = (x.column(i).clone_owned(), mx.column(i).clone_owned());
                x.column_mut(j).axpy(-c, &xi, 1.0);
                mx.column_mut(j).axpy(-c, &mxi, 1.0);
            }
        }
        let norm = x.column(j).dot(&mx.column(j)).max(0.0).sqrt();
        if norm > 1e-10 * norm0 && norm > 0.0 {
            x.column_mut(j).scale_mut(1.0 / norm);
            mx.column_mut(j).scale_mut(1.0 / norm);
            keep.push(j);
        }
    }
    let xs = x.select_columns(&keep);
    // Recompute the M-image exactly to shed the drift of the updates.
    let mxs = mass_apply(m, &xs);
    (xs, mxs)
}

fn krylov(k: &CsrMatrix, m: &CsrMatrix, m_lowest: usize) -> Result<Eigenpairs> {
    let n = k.dim();
    let perm = reverse_cuthill_mckee(&k.linear_combination(1.0, m, 1.0));
    let kp = k.permuted(&perm);
    let mp = m.permuted(&perm);
    let chol = SkylineCholesky::factor(&kp.linear_combination(1.0, &mp, 1.0))?;

    let block = (m_lowest + BLOCK_PADDING).min(n / 2).max(m_lowest);
    let cap = (block * (KRYLOV_STEPS + 1)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut start = DMatrix::from_fn(n, block, |_, _| rng.gen_range(-1.0..1.0));

    let mut last_residuals = Vec::new();
    for cycle in 1..=MAX_CYCLES {
        let mut v = DMatrix::zeros(n, cap);
        let mut mv = DMatrix::zeros(n, cap);
        let mut used = 0;
        let mut x = start.clone();
        for step in 0..=KRYLOV_STEPS {
            if step > 0 {
                x = shift_invert_apply(&chol, &mp, &x);
            }
            let room = cap - used;
            if room == 0 {
                break;
            }
            let (q, mq) = orthonormalize(&mp, &v, &mv, used, x);
            let take = q.ncols().min(room);
            if take == 0 {
                break;
            }
            v.columns_mut(used, take).copy_from(&q.columns(0, take));
            mv.columns_mut(used, take).copy_from(&mq.columns(0, take));
            used += take;
            x = q.columns(0, take).clone_owned();
        }
        if used < m_lowest {
            return Err(Error::Solver(format!("Krylov space collapsed to {used} < {m_lowest} vectors")));
        }
        let vb = v.columns(0, used).clone_owned();
        let kv = kp.mul_dense(&vb);
        let h = vb.tr_mul(&kv);
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..used).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let keep = block.min(used);
        let y = DMatrix::from_fn(used, keep, |r, c| eig.eigenvectors[(r, order[c])]);
        let ritz = &vb * &y;
        let values: Vec<f64> = order[..keep].iter().map(|&i| eig.eigenvalues[i]).collect();

        let wanted = ritz.columns(0, m_lowest).clone_owned();
        let res = residuals(&kp, &mp, &values[..m_lowest], &wanted);
        if res.iter().all(|&r| r <= RESIDUAL_TOL) {
            let mut vectors = DMatrix::zeros(n, m_lowest);
            for (new, &old) in perm.iter().enumerate() {
                for c in 0..m_lowest {
                    vectors[(old, c)] = wanted[(new, c)];
                }
            }
            let values = values[..m_lowest].to_vec();
            let residuals = residuals(k, m, &values, &vectors);
            return Ok(Eigenpairs { values, vectors, residuals, cycles: cycle });
        }
        last_residuals = res;
        start = ritz;
    }
    let worst = last_residuals.iter().copied().fold(0.0, f64::max);
    Err(Error::Solver(format!(
        "block Krylov did not converge in {MAX_CYCLES} cycles (worst residual {worst:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolygon;
    use crate::spectrum::assembly::assemble;
    use crate::spectrum::mesh::mesh_polygon;

    fn diag(v: &[f64]) -> CsrMatrix {
        CsrMatrix::from_triplets(v.len(), v.iter().enumerate().map(|(i, &x)| (i, i, x)).collect())
    }

    #[test]
    fn diagonal_pencil() {
        let n = 40;
        let kd: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        let md: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
        let mut expected: Vec<f64> = kd.iter().zip(&md).map(|(a, b)| a / b).collect();
        expected.sort_by(f64::total_cmp);
        for method in [Method::Dense, Method::Krylov] {
            let e = solve_eigs_with(&diag(&kd), &diag(&md), 6, method).unwrap();
            for (a, b) in e.values.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10 * b, "{method:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_too_many_pairs() {
        let d = diag(&[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(solve_eigs(&d, &d, 3), Err(Error::Precondition(_))));
        assert!(matches!(solve_eigs(&d, &d, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn krylov_matches_dense_on_a_mesh() {
        let p = ConvexPolygon::hexagon(1.0).unwrap();
        let mesh = mesh_polygon(&p, 0.12).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        assert!(k.dim() <= DENSE_LIMIT);
        let d = solve_eigs_with(&k, &m, 20, Method::Dense).unwrap();
        let s = solve_eigs_with(&k, &m, 20, Method::Krylov).unwrap();
        for (a, b) in d.values.iter().zip(&s.values) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
        assert!(s.residuals.iter().all(|&r| r <= RESIDUAL_TOL));
    }

    #[test]
    fn eigenvectors_are_mass_orthonormal_and_zero_mode_is_constant() {
        let p = ConvexPolygon::rectangle(1.0, 1.0).unwrap();
        let mesh = mesh_polygon(&p, 0.04).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let e = solve_eigs(&k, &m, 12).unwrap();
        assert!(e.cycles > 0);
        let g = e.vectors.tr_mul(&m.mul_dense(&e.vectors));
        for i in 0..12 {
            for j in 0..12 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - target).abs() <= 1e-8, "({i},{j}) = {}", g[(i, j)]);
            }
        }
        assert!(e.values[0].abs() <= 1e-8);
        let u0 = e.vectors.column(0);
        let mean = u0.mean();
        let sd = (u0.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / u0.len() as f64).sqrt();
        assert!(sd / mean.abs() <= 1e-6, "coefficient of variation {}", sd / mean.abs());
    }
}
