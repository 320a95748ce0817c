//! Symmetric tridiagonal eigenvalue kernel.
//!
//! Eigenvalues come from the implicit QL algorithm with Wilkinson-type
//! shifts; eigenvectors, when needed, from inverse iteration on the
//! pivoted tridiagonal factorization. Both the Golub-Welsch zeros and the
//! finite-difference SUSY spectra run through here.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TridiagError {
    #[error("off-diagonal has length {off}, expected {expected}")]
    Shape { off: usize, expected: usize },
    #[error("QL iteration did not converge for eigenvalue index {index}")]
    NoConvergence { index: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
}

/// A real symmetric tridiagonal matrix: `diag` has length n and `off[i]`
/// couples rows i and i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, TridiagError> {
        let expected = diag.len().saturating_sub(1);
        if off.len() != expected {
            return Err(TridiagError::Shape {
                off: off.len(),
                expected,
            });
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(TridiagError::NonFinite);
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Leading principal `n x n` block.
    pub fn leading(&self, n: usize) -> Self {
        let n = n.min(self.dim());
        Self {
            diag: self.diag[..n].to_vec(),
            off: self.off[..n.saturating_sub(1)].to_vec(),
        }
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, TridiagError> {
        let mut d = self.diag.clone();
        ql_implicit(&mut d, &self.off)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// `y = T x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Unit-norm eigenvector for an (already accurate) eigenvalue, by inverse
    /// iteration. The sign is fixed so that the first entry of largest
    /// magnitude is positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let shift = lambda + 64.0 * f64::EPSILON * scale;
        let lu = PivotedTridiagLu::factor(&self.diag, &self.off, shift);

        // Deterministic, non-symmetric start so no parity sector is missed.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        for _ in 0..4 {
            v = lu.solve(&v);
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            v.iter_mut().for_each(|a| *a /= norm);
        }
        let pivot = v
            .iter()
            .copied()
            .fold(0.0_f64, |m, a| if a.abs() > m.abs() { a } else { m });
        if pivot < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
        v
    }
}

/// Implicit QL with shifts on a symmetric tridiagonal matrix. On return `d`
/// holds the (unsorted) eigenvalues.
fn ql_implicit(d: &mut [f64], off: &[f64]) -> Result<(), TridiagError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(TridiagError::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// LU with partial pivoting of `T - shift I` (two superdiagonals of fill).
struct PivotedTridiagLu {
    // Row i of U: u0[i] on the diagonal, u1[i], u2[i] to its right.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64) -> Self {
        let n = diag.len();
        let tiny = f64::EPSILON * f64::EPSILON;
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];

        // Current working row i: (a, b, c) at columns i, i+1, i+2.
        let mut a = diag[0] - shift;
        let mut b = if n > 1 { off[0] } else { 0.0 };
        let mut c = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if a.abs() < tiny { tiny } else { a };
                break;
            }
            // Next row restricted to columns i, i+1, i+2.
            let na = off[i];
            let nb = diag[i + 1] - shift;
            let nc = if i + 2 < n { off[i + 1] } else { 0.0 };
            if na.abs() > a.abs() {
                swapped[i] = true;
                u0[i] = na;
                u1[i] = nb;
                u2[i] = nc;
                let m = a / na;
                mult[i] = m;
                a = b - m * nb;
                b = c - m * nc;
            } else {
                let piv = if a.abs() < tiny { tiny } else { a };
                u0[i] = piv;
                u1[i] = b;
                u2[i] = c;
                let m = na / piv;
                mult[i] = m;
                a = nb - m * b;
                b = nc - m * c;
            }
            c = 0.0;
        }
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.u0[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sturm-sequence count of eigenvalues strictly below `x`.
    fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0_f64;
        for i in 0..t.dim() {
            let e2 = if i == 0 { 0.0 } else { t.off[i - 1].powi(2) };
            q = t.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect(t: &SymTridiagonal, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(t, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn one_by_one_and_empty() {
        let t = SymTridiagonal::new(vec![3.5], vec![]).unwrap();
        assert_eq!(t.eigenvalues().unwrap(), vec![3.5]);
        let e = SymTridiagonal::new(vec![], vec![]).unwrap();
        assert!(e.eigenvalues().unwrap().is_empty());
    }

    #[test]
    fn shape_is_checked() {
        assert!(matches!(
            SymTridiagonal::new(vec![1.0, 2.0], vec![]),
            Err(TridiagError::Shape { .. })
        ));
    }

    #[test]
    fn discrete_laplacian_closed_form() {
        let n = 40;
        let eig = laplacian(n).eigenvalues().unwrap();
        for (k, lam) in eig.iter().enumerate() {
            let theta = (k as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0);
            let exact = 2.0 - 2.0 * theta.cos();
            assert!((lam - exact).abs() < 1e-13, "k={k}: {lam} vs {exact}");
        }
    }

    #[test]
    fn agrees_with_sturm_bisection() {
        let diag: Vec<f64> = (0..25).map(|i| ((i * 7 % 11) as f64) - 3.0).collect();
        let off: Vec<f64> = (0..24).map(|i| 0.3 + ((i * 5 % 7) as f64) * 0.2).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let eig = t.eigenvalues().unwrap();
        for (k, lam) in eig.iter().enumerate() {
            let b = bisect(&t, k, -50.0, 50.0);
            assert!((lam - b).abs() < 1e-12, "k={k}: {lam} vs {b}");
        }
    }

    #[test]
    fn inverse_iteration_gives_eigenvectors() {
        let t = laplacian(30);
        let eig = t.eigenvalues().unwrap();
        for &lam in eig.iter().take(5) {
            let v = t.eigenvector(lam);
            let tv = t.apply(&v);
            let res: f64 = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10, "residual {res}");
        }
    }

    #[test]
    fn leading_block_is_principal_submatrix() {
        let t = laplacian(10).leading(3);
        assert_eq!(t.diag(), &[2.0, 2.0, 2.0]);
        assert_eq!(t.off(), &[-1.0, -1.0]);
    }
}
