//! Locally optimal block preconditioned conjugate gradient for the lowest
//! eigenpairs of a large real symmetric operator given only as a mat-vec.

use nalgebra::DMatrix;

pub struct Lobpcg {
    pub tol: f64,
    pub max_iter: usize,
}

pub struct EigenResult {
    pub values: Vec<f64>,
    /// Orthonormal columns.
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
}

/// Orthonormalizes the columns of `s` (and maps `as_` alongside) by the
/// symmetric Gram eigen-decomposition, dropping near-dependent directions.
fn svqb(s: &DMatrix<f64>, as_: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let g = s.transpose() * s;
    let d: Vec<f64> = (0..g.nrows()).map(|i| g[(i, i)].max(f64::MIN_POSITIVE).sqrt().recip()).collect();
    let dm = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
    let gs = &dm * &g * &dm;
    let eig = gs.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > 1e-12 * top).collect();
    let mut m = DMatrix::zeros(g.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let scale = eig.eigenvalues[i].sqrt().recip();
        for r in 0..g.nrows() {
            m[(r, c)] = eig.eigenvectors[(r, i)] * scale;
        }
    }
    let m = dm * m;
    (s * &m, as_ * &m)
}

impl Lobpcg {
    /// Lowest `k` eigenpairs starting from the block `x0` (at least `k` columns).
    pub fn solve<A, T>(&self, apply: A, precond: T, x0: DMatrix<f64>, k: usize) -> EigenResult
    where
        A: Fn(&DMatrix<f64>) -> DMatrix<f64>,
        T: Fn(&DMatrix<f64>) -> DMatrix<f64>,
    {
        let m = x0.ncols();
        assert!(m >= k && k > 0);
        let ax0 = apply(&x0);
        let (q, aq) = svqb(&x0, &ax0);
        let (mut x, mut ax, mut lambda) = rayleigh_ritz(&q, &aq, m);
        let mut p: Option<(DMatrix<f64>, DMatrix<f64>)> = None;
        let mut residuals = vec![f64::INFINITY; k];

        for iter in 0..self.max_iter {
            let mut r = &ax - &x * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone()));
            for j in 0..k {
                residuals[j] = r.column(j).norm();
            }
            if residuals.iter().all(|&v| v < self.tol) {
                return EigenResult { values: lambda[..k].to_vec(), vectors: x.columns(0, k).into_owned(), iterations: iter, residuals };
            }
            // project the search directions off the current block, keeping
            // only columns that have not converged
            let xtr = x.transpose() * &r;
            r -= &x * xtr;
            let active: Vec<usize> = (0..m).filter(|&j| j >= k || residuals[j] >= self.tol).collect();
            let r = r.select_columns(&active);
            let w = precond(&r);
            let aw = apply(&w);

            let (s, as_) = match &p {
                Some((pp, ap)) => (hcat(&[&x, &w, pp]), hcat(&[&ax, &aw, ap])),
                None => (hcat(&[&x, &w]), hcat(&[&ax, &aw])),
            };
            let (q, aq) = svqb(&s, &as_);
            let (q, aq) = svqb(&q, &aq);
            let (xn, axn, ln) = rayleigh_ritz(&q, &aq, m);
            let overlap = x.transpose() * &xn;
            let pn = &xn - &x * &overlap;
            // recomputed rather than updated: pn is small near convergence
            let apn = apply(&pn);
            p = Some((pn, apn));
            x = xn;
            ax = axn;
            lambda = ln;
        }
        EigenResult { values: lambda[..k].to_vec(), vectors: x.columns(0, k).into_owned(), iterations: self.max_iter, residuals }
    }
}

fn hcat(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let n = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(n, cols);
    let mut c = 0;
    for b in blocks {
        out.columns_mut(c, b.ncols()).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Ritz pairs of the operator on the orthonormal basis `q` (with `aq = A q`).
fn rayleigh_ritz(q: &DMatrix<f64>, aq: &DMatrix<f64>, m: usize) -> (DMatrix<f64>, DMatrix<f64>, Vec<f64>) {
    let h = q.transpose() * aq;
    let h = (&h + h.transpose()) * 0.5;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let m = m.min(order.len());
    let mut c = DMatrix::zeros(q.ncols(), m);
    for (j, &i) in order.iter().take(m).enumerate() {
        c.set_column(j, &eig.eigenvectors.column(i));
    }
    let vals = order.iter().take(m).map(|&i| eig.eigenvalues[i]).collect();
    (q * &c, aq * &c, vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let n = 400;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sqrt()).collect();
        let apply = |x: &DMatrix<f64>| {
            let mut y = x.clone();
            for (i, mut row) in y.row_iter_mut().enumerate() {
                row *= diag[i];
            }
            y
        };
        let x0 = DMatrix::from_fn(n, 5, |i, j| ((i * 7 + j * 13) % 11) as f64 - 5.0 + (i == j) as u8 as f64);
        let res = Lobpcg { tol: 1e-10, max_iter: 500 }.solve(apply, |r| r.clone(), x0, 3);
        for (j, v) in res.values.iter().enumerate() {
            assert!((v - (j as f64 + 1.0).sqrt()).abs() < 1e-12, "{v}");
        }
    }
}
