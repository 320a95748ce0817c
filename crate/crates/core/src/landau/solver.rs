use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::operator::MagneticOperator;
use super::LandauError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `M = L L^H` for a Hermitian positive definite band matrix. Row `i` of
/// `L` is stored as `L[i][i - d]`, and column `i` as `L[i + d][i]`, for
/// `d = 0..=bandwidth`.
pub(crate) struct BandCholesky {
    n: usize,
    bw: usize,
    rows: Vec<Complex64>,
    cols: Vec<Complex64>,
}

impl BandCholesky {
    pub(crate) fn factor(op: &MagneticOperator) -> Result<Self, LandauError> {
        let n = op.dim();
        let bw = op.bandwidth();
        let w = bw + 1;
        let mut l = vec![ZERO; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = op.entry(i, j);
                // Columns of L shared by rows i and j.
                let k0 = lo.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)].conj();
                }
                if i == j {
                    if !(s.re > 0.0) {
                        return Err(LandauError::NotPositiveDefinite { row: i });
                    }
                    l[i * w] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    l[i * w + (i - j)] = s / l[j * w].re;
                }
            }
        }
        let mut cols = vec![ZERO; n * w];
        for i in 0..n {
            for d in 0..w.min(n - i) {
                cols[i * w + d] = l[(i + d) * w + d];
            }
        }
        Ok(Self { n, bw, rows: l, cols })
    }

    /// Solves `M X = B` for the `nrhs` columns of `x`, stored row-major
    /// (`x[i * nrhs + c]`), in place.
    pub(crate) fn solve_many(&self, x: &mut [Complex64], nrhs: usize) {
        let (n, w) = (self.n, self.bw + 1);
        for i in 0..n {
            let row = &self.rows[i * w..(i + 1) * w];
            let (done, rest) = x.split_at_mut(i * nrhs);
            let xi = &mut rest[..nrhs];
            for k in i.saturating_sub(self.bw)..i {
                let l = row[i - k];
                for (a, b) in xi.iter_mut().zip(&done[k * nrhs..(k + 1) * nrhs]) {
                    *a -= l * b;
                }
            }
            let d = 1.0 / row[0].re;
            xi.iter_mut().for_each(|a| *a *= d);
        }
        for i in (0..n).rev() {
            let col = &self.cols[i * w..(i + 1) * w];
            let hi = n.min(i + w);
            let (head, tail) = x.split_at_mut((i + 1) * nrhs);
            let xi = &mut head[i * nrhs..];
            for k in i + 1..hi {
                let l = col[k - i].conj();
                for (a, b) in xi.iter_mut().zip(&tail[(k - i - 1) * nrhs..(k - i) * nrhs]) {
                    *a -= l * b;
                }
            }
            let d = 1.0 / col[0].re;
            xi.iter_mut().for_each(|a| *a *= d);
        }
    }

    /// Solves `M x = b` in place.
    #[cfg(test)]
    pub(crate) fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, w) = (self.n, self.bw + 1);
        for i in 0..n {
            let row = &self.rows[i * w..(i + 1) * w];
            let lo = i.saturating_sub(self.bw);
            let mut s = b[i];
            for (k, bk) in b[lo..i].iter().enumerate() {
                s -= row[i - lo - k] * bk;
            }
            b[i] = s / row[0].re;
        }
        for i in (0..n).rev() {
            let col = &self.cols[i * w..(i + 1) * w];
            let hi = n.min(i + w);
            let mut s = b[i];
            for (d, bk) in b[i + 1..hi].iter().enumerate() {
                s -= col[d + 1].conj() * bk;
            }
            b[i] = s / col[0].re;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenOptions {
    /// Residual `|M y - theta y|` required of every returned unit vector.
    pub tol: f64,
    /// Block size; 0 selects `k + max(k / 8, 8)`. Convergence is fast only
    /// when it exceeds the size of any near-degenerate cluster at the
    /// bottom of the spectrum.
    pub block: usize,
    /// Krylov blocks per restart cycle.
    pub blocks_per_cycle: usize,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            block: 0,
            blocks_per_cycle: 3,
            max_restarts: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    pub restarts: usize,
}

impl EigenResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// Complex `n x m` matrix held as real and imaginary parts, so products go
/// through the real gemm kernels.
#[derive(Clone)]
struct Split {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl Split {
    fn zeros(n: usize, m: usize) -> Self {
        Self {
            re: DMatrix::zeros(n, m),
            im: DMatrix::zeros(n, m),
        }
    }

    fn ncols(&self) -> usize {
        self.re.ncols()
    }

    fn column(&self, j: usize) -> Vec<Complex64> {
        self.re.column(j).iter().zip(self.im.column(j).iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, z) in v.iter().enumerate() {
            self.re[(i, j)] = z.re;
            self.im[(i, j)] = z.im;
        }
    }

    fn column_norm(&self, j: usize) -> f64 {
        (self.re.column(j).norm_squared() + self.im.column(j).norm_squared()).sqrt()
    }

    /// `self^H other`.
    fn ad_mul(&self, other: &Split) -> (DMatrix<f64>, DMatrix<f64>) {
        // Explicit transposes route the products through the gemm kernel.
        let (rt, it) = (self.re.transpose(), self.im.transpose());
        let re = &rt * &other.re + &it * &other.im;
        let im = &rt * &other.im - &it * &other.re;
        (re, im)
    }

    /// `self * (cr + i ci)`.
    fn mul(&self, cr: &DMatrix<f64>, ci: &DMatrix<f64>) -> Split {
        Split {
            re: &self.re * cr - &self.im * ci,
            im: &self.re * ci + &self.im * cr,
        }
    }

    fn select(&self, cols: &[usize]) -> Split {
        Split {
            re: self.re.select_columns(cols),
            im: self.im.select_columns(cols),
        }
    }

    fn hcat(&self, other: &Split) -> Split {
        let n = self.re.nrows();
        let (a, b) = (self.ncols(), other.ncols());
        let mut out = Split::zeros(n, a + b);
        out.re.columns_mut(0, a).copy_from(&self.re);
        out.im.columns_mut(0, a).copy_from(&self.im);
        out.re.columns_mut(a, b).copy_from(&other.re);
        out.im.columns_mut(a, b).copy_from(&other.im);
        out
    }
}

/// Orthonormalizes the columns of `w` against `basis` (block classical
/// Gram-Schmidt, two passes) and among themselves (SVQB: eigenvectors of the
/// scaled Gram matrix). Numerically dependent directions are dropped.
fn orthonormalize_block(basis: Option<&Split>, mut w: Split) -> Split {
    let start: Vec<f64> = (0..w.ncols()).map(|j| w.column_norm(j)).collect();
    let project = |w: &mut Split| {
        if let Some(q) = basis {
            let (cr, ci) = q.ad_mul(w);
            let proj = q.mul(&cr, &ci);
            w.re -= proj.re;
            w.im -= proj.im;
        }
    };
    project(&mut w);
    project(&mut w);
    let alive: Vec<usize> = (0..w.ncols())
        .filter(|&j| start[j] > 0.0 && w.column_norm(j) > 1e-10 * start[j])
        .collect();
    let mut w = svqb(w.select(&alive));
    project(&mut w);
    svqb(w)
}

fn svqb(w: Split) -> Split {
    let m = w.ncols();
    if m == 0 {
        return w;
    }
    let (gr, gi) = w.ad_mul(&w);
    let d: Vec<f64> = (0..m).map(|j| 1.0 / gr[(j, j)].max(f64::MIN_POSITIVE).sqrt()).collect();
    let g = DMatrix::from_fn(m, m, |i, j| {
        0.5 * d[i] * d[j] * (Complex64::new(gr[(i, j)], gi[(i, j)]) + Complex64::new(gr[(j, i)], -gi[(j, i)]))
    });
    let eig = g.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let kept: Vec<usize> = (0..m).filter(|&c| eig.eigenvalues[c] > 1e-14 * top).collect();
    let cr = DMatrix::from_fn(m, kept.len(), |i, c| d[i] * eig.eigenvectors[(i, kept[c])].re / eig.eigenvalues[kept[c]].sqrt());
    let ci = DMatrix::from_fn(m, kept.len(), |i, c| d[i] * eig.eigenvectors[(i, kept[c])].im / eig.eigenvalues[kept[c]].sqrt());
    w.mul(&cr, &ci)
}

fn solve_block(chol: &BandCholesky, b: &Split) -> Split {
    let (n, m) = (b.re.nrows(), b.ncols());
    let mut x = vec![ZERO; n * m];
    for c in 0..m {
        for i in 0..n {
            x[i * m + c] = Complex64::new(b.re[(i, c)], b.im[(i, c)]);
        }
    }
    chol.solve_many(&mut x, m);
    let mut out = Split::zeros(n, m);
    for c in 0..m {
        for i in 0..n {
            out.re[(i, c)] = x[i * m + c].re;
            out.im[(i, c)] = x[i * m + c].im;
        }
    }
    out
}

fn map_columns(x: &Split, f: impl Fn(&mut Vec<Complex64>) + Sync) -> Split {
    let cols: Vec<Vec<Complex64>> = (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let mut v = x.column(j);
            f(&mut v);
            v
        })
        .collect();
    let mut out = Split::zeros(x.re.nrows(), x.ncols());
    for (j, v) in cols.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Lowest `k` eigenpairs of the positive definite operator by restarted
/// block Lanczos on `M^{-1}` (banded Cholesky solves) with full
/// reorthogonalization; Ritz pairs are extracted with `M` itself.
pub fn lowest_eigenpairs(
    op: &MagneticOperator,
    k: usize,
    opts: &EigenOptions,
) -> Result<(EigenResult, Vec<DVector<Complex64>>), LandauError> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(LandauError::Parameter(format!("need 1 <= k <= {n}, got {k}")));
    }
    let chol = BandCholesky::factor(op)?;
    let p = if opts.block == 0 { k + (k / 8).max(8) } else { opts.block.max(k) }.min(n);
    let max_dim = (p * opts.blocks_per_cycle.max(2)).min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(0x4c61_6e64_6175);
    let mut start = Split::zeros(n, p);
    start.re.iter_mut().chain(start.im.iter_mut()).for_each(|x| *x = rng.random::<f64>() - 0.5);
    let mut block = orthonormalize_block(None, start);

    let mut restarts = 0;
    loop {
        let mut basis = block.clone();
        let mut frontier = block.clone();
        while basis.ncols() < max_dim && frontier.ncols() > 0 {
            let images = solve_block(&chol, &frontier);
            let mut fresh = orthonormalize_block(Some(&basis), images);
            let room = max_dim - basis.ncols();
            if fresh.ncols() > room {
                fresh = fresh.select(&(0..room).collect::<Vec<_>>());
            }
            basis = basis.hcat(&fresh);
            frontier = fresh;
        }

        let m = basis.ncols();
        let images = map_columns(&basis, |v| *v = op.apply(v));
        let (tr, ti) = basis.ad_mul(&images);
        let t = DMatrix::from_fn(m, m, |i, j| {
            0.5 * (Complex64::new(tr[(i, j)], ti[(i, j)]) + Complex64::new(tr[(j, i)], -ti[(j, i)]))
        });
        let eig = t.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let keep = p.min(m);
        let sr = DMatrix::from_fn(m, keep, |i, c| eig.eigenvectors[(i, order[c])].re);
        let si = DMatrix::from_fn(m, keep, |i, c| eig.eigenvectors[(i, order[c])].im);
        let ritz = basis.mul(&sr, &si);
        let mritz = images.mul(&sr, &si);
        let values: Vec<f64> = order.iter().take(keep).map(|&c| eig.eigenvalues[c]).collect();
        let residuals: Vec<f64> = (0..keep)
            .map(|c| {
                let th = values[c];
                let rr = mritz.re.column(c) - ritz.re.column(c) * th;
                let ri = mritz.im.column(c) - ritz.im.column(c) * th;
                (rr.norm_squared() + ri.norm_squared()).sqrt() / ritz.column_norm(c)
            })
            .collect();

        let converged: Vec<bool> = residuals.iter().take(k).map(|&r| r <= opts.tol).collect();
        if converged.iter().all(|&c| c) || restarts >= opts.max_restarts {
            let vectors = (0..k).map(|c| DVector::from_vec(ritz.column(c))).collect();
            return Ok((
                EigenResult {
                    values: values[..k].to_vec(),
                    residuals: residuals[..k].to_vec(),
                    converged,
                    restarts,
                },
                vectors,
            ));
        }
        restarts += 1;
        block = orthonormalize_block(None, ritz);
    }
}

pub fn lowest_eigenvalues(op: &MagneticOperator, k: usize, tol: f64) -> Result<EigenResult, LandauError> {
    let opts = EigenOptions {
        tol,
        ..EigenOptions::default()
    };
    Ok(lowest_eigenpairs(op, k, &opts)?.0)
}

/// All eigenvalues from the dense matrix, ascending.
pub fn dense_eigenvalues(op: &MagneticOperator) -> Vec<f64> {
    let mut v: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
