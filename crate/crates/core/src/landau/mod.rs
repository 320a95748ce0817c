//! Magnetic Schrödinger operator `-((d_x + iBy)^2 + (d_y - iBx)^2)` on a
//! Dirichlet square, its low spectrum, and Landau-level clustering.
//!
//! The covariant derivatives have commutator `[D_x, D_y] = -2iB`, so the
//! continuum levels are `2B (2l + 1)`; the code measures the spacing rather
//! than assuming it.

mod cluster;
mod operator;
mod solver;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::orthopoly::{self, PolynomialSpec};

pub use cluster::{cluster_analysis, cluster_analysis_with, flat_clusters, gap_law, Cluster, ClusterOptions, GapLaw};
pub use operator::{build_magnetic_operator, Discretization, MagneticGrid, MagneticOperator};
pub use solver::{dense_eigenvalues, lowest_eigenpairs, lowest_eigenvalues, EigenOptions, EigenResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandauError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("operator is not positive definite (pivot {row})")]
    NotPositiveDefinite { row: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub grid: MagneticGrid,
    pub discretization: Discretization,
    pub eigen: EigenResult,
    pub clusters: Vec<Cluster>,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }
}

pub fn compute_spectrum(
    grid: &MagneticGrid,
    discretization: Discretization,
    k: usize,
    eigen: &EigenOptions,
    clusters: &ClusterOptions,
) -> Result<SpectrumResult, LandauError> {
    let grid = grid.validated()?;
    let op = MagneticOperator::new(&grid, discretization, (0.0, 0.0));
    let mut opts = *eigen;
    if opts.block == 0 {
        opts.block = (k + (k / 8).max(8)).max(lowest_level_degeneracy(&grid).ceil() as usize);
    }
    let (eigen, _) = lowest_eigenpairs(&op, k, &opts)?;
    let mut sorted = eigen.values.clone();
    sorted.sort_by(f64::total_cmp);
    let clusters = cluster_analysis_with(&sorted, clusters)?;
    Ok(SpectrumResult {
        grid,
        discretization,
        eigen,
        clusters,
    })
}

/// Continuum states per Landau level in the box, `2B * area / (2 pi)`.
/// The automatic block size of [`compute_spectrum`] covers it, so the
/// near-degenerate lowest level does not stall the eigensolver.
pub fn lowest_level_degeneracy(grid: &MagneticGrid) -> f64 {
    grid.field * grid.area() / PI
}

/// Lowest `count` eigenvalues `pi^2 (m^2 + n^2) / (2L)^2` of the continuum
/// Dirichlet Laplacian on `[-L, L]^2`.
pub fn dirichlet_laplacian_eigenvalues(half_width: f64, count: usize) -> Vec<f64> {
    let side = 2.0 * half_width;
    let m_max = (count as f64).sqrt().ceil() as usize + 2;
    let mut v: Vec<f64> = (1..=m_max)
        .flat_map(|m| (1..=m_max).map(move |n| PI * PI * (m * m + n * n) as f64 / (side * side)))
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

/// `(2^n n!)^{-1/2} sqrt(omega) exp(-omega^2 |z|^2) H_n(omega |z|)`.
pub fn complex_hermite_eval(n: usize, omega: f64, z: Complex64) -> Result<f64, LandauError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(LandauError::Parameter(format!("omega must be positive, got {omega}")));
    }
    let r = z.norm();
    let log_norm = -0.5 * (n as f64 * 2f64.ln() + (1..=n).map(|k| (k as f64).ln()).sum::<f64>());
    let h = orthopoly::evaluate(&PolynomialSpec::hermite(n), omega * r);
    Ok(log_norm.exp() * omega.sqrt() * (-omega * omega * r * r).exp() * h)
}

/// Discrete `A f = d_zbar f + omega z f` applied to `f = exp(-omega |z|^2)`
/// with central differences on `points x points` nodes of
/// `[-R, R]^2`, `R = 6 / sqrt(omega)` (`R = 6` for `omega = 0`).
/// Returns the L2 norm of the result over the interior nodes.
pub fn ground_annihilation_check(omega: f64, points: usize) -> Result<f64, LandauError> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(LandauError::Parameter(format!("omega must be non-negative, got {omega}")));
    }
    if points < 5 {
        return Err(LandauError::Parameter(format!("need at least 5 points, got {points}")));
    }
    let half = if omega > 0.0 { 6.0 / omega.sqrt() } else { 6.0 };
    let h = 2.0 * half / (points - 1) as f64;
    let coord = |i: usize| -half + i as f64 * h;
    let f = |i: usize, j: usize| (-omega * (coord(i).powi(2) + coord(j).powi(2))).exp();
    let mut sum = 0.0;
    for j in 1..points - 1 {
        for i in 1..points - 1 {
            let dx = (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
            let dy = (f(i, j + 1) - f(i, j - 1)) / (2.0 * h);
            let z = Complex64::new(coord(i), coord(j));
            let r = 0.5 * Complex64::new(dx, dy) + omega * z * f(i, j);
            sum += r.norm_sqr();
        }
    }
    Ok((h * h * sum).sqrt())
}

/// Residuals at `points` and at half the spacing, with `log2` of their
/// ratio.
pub fn ground_annihilation_order(omega: f64, points: usize) -> Result<(f64, f64, f64), LandauError> {
    let coarse = ground_annihilation_check(omega, points)?;
    let fine = ground_annihilation_check(omega, 2 * points - 1)?;
    Ok((coarse, fine, (coarse / fine).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert!(MagneticGrid::new(0.0, 32, 1.0).is_err());
        assert!(MagneticGrid::new(1.0, 31, 1.0).is_err());
        assert!(MagneticGrid::new(1.0, 32, -1.0).is_err());
        let g = MagneticGrid::new(8.0, 96, 1.0).unwrap();
        assert!((g.coord(0) + 8.0 - g.spacing()).abs() < 1e-14);
        assert!((g.coord(95) - 8.0 + g.spacing()).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_five_point_laplacian() {
        let g = MagneticGrid::new(2.0, 32, 0.0).unwrap();
        let op = build_magnetic_operator(&g);
        let h2 = g.spacing().powi(2);
        for r in [0, 5, 33, 500, 1023] {
            assert_eq!(op.entry(r, r), c(4.0 / h2, 0.0));
            if r + 1 < g.dim() && (r + 1) % 32 != 0 {
                assert_eq!(op.entry(r, r + 1), c(-1.0 / h2, 0.0));
            }
        }
        assert_eq!(op.entry(31, 32), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_by_construction() {
        for d in [Discretization::Peierls, Discretization::Naive] {
            let op = MagneticOperator::new(&MagneticGrid::new(3.0, 40, 1.3).unwrap(), d, (0.4, -0.2));
            assert_eq!(op.hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn band_solver_matches_dense_spectrum() {
        let g = MagneticGrid::new(3.0, 32, 1.0).unwrap();
        let op = build_magnetic_operator(&g);
        let dense = dense_eigenvalues(&op);
        let res = lowest_eigenvalues(&op, 12, 1e-9).unwrap();
        assert!(res.all_converged(), "{res:?}");
        for (a, b) in res.values.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn gauge_origin_does_not_change_spectrum() {
        let g = MagneticGrid::new(3.0, 32, 1.0).unwrap();
        let a = dense_eigenvalues(&MagneticOperator::new(&g, Discretization::Peierls, (0.0, 0.0)));
        let b = dense_eigenvalues(&MagneticOperator::new(&g, Discretization::Peierls, (0.7, -1.1)));
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn naive_and_peierls_agree_at_low_energy() {
        let g = MagneticGrid::new(3.0, 48, 1.0).unwrap();
        let a = lowest_eigenvalues(&MagneticOperator::new(&g, Discretization::Peierls, (0.0, 0.0)), 4, 1e-8).unwrap();
        let b = lowest_eigenvalues(&MagneticOperator::new(&g, Discretization::Naive, (0.0, 0.0)), 4, 1e-8).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 0.05 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn lowest_eigenvalue_is_positive() {
        let g = MagneticGrid::new(4.0, 32, 1.0).unwrap();
        let res = lowest_eigenvalues(&build_magnetic_operator(&g), 1, 1e-8).unwrap();
        assert!(res.values[0] > 0.0);
    }

    #[test]
    fn zero_field_matches_dirichlet_box() {
        let g = MagneticGrid::new(2.0, 48, 0.0).unwrap();
        let res = lowest_eigenvalues(&build_magnetic_operator(&g), 10, 1e-8).unwrap();
        let exact = dirichlet_laplacian_eigenvalues(2.0, 10);
        for (a, b) in res.values.iter().zip(&exact) {
            assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn cluster_examples() {
        let cl = cluster_analysis(&[1.0, 1.01, 3.0, 3.02], 5.0).unwrap();
        assert_eq!(cl.len(), 2);
        assert!((cl[0].center - 1.005).abs() < 1e-12 && (cl[1].center - 3.01).abs() < 1e-12);
        assert_eq!(cluster_analysis(&[2.0; 6], 5.0).unwrap().len(), 1);
        assert_eq!(cluster_analysis(&[4.2], 5.0).unwrap()[0].multiplicity, 1);
        assert!(cluster_analysis(&[2.0, 1.0], 5.0).is_err());
    }

    #[test]
    fn gap_law_on_ideal_levels() {
        let eigs: Vec<f64> = [2.0, 6.0, 10.0].iter().flat_map(|&c| [c - 1e-3, c, c + 1e-3]).collect();
        let flat = flat_clusters(&cluster_analysis(&eigs, 5.0).unwrap(), 3);
        let law = gap_law(&flat, 3, 1.0);
        assert!(law.max_relative_error.unwrap() < 1e-12);
        assert!((law.spacing_over_field.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermite_examples() {
        assert!((complex_hermite_eval(0, 1.0, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let v = complex_hermite_eval(1, 1.0, c(1.0, 0.0)).unwrap();
        assert!((v - 2f64.sqrt() / 1f64.exp()).abs() < 1e-15);
        let base = complex_hermite_eval(3, 1.3, c(0.8, 0.0)).unwrap();
        for a in 0..8 {
            let z = Complex64::from_polar(0.8, a as f64 * PI / 4.0);
            assert!((complex_hermite_eval(3, 1.3, z).unwrap() - base).abs() < 1e-14);
        }
        assert!(complex_hermite_eval(1, 0.0, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn annihilation_converges_at_second_order() {
        assert_eq!(ground_annihilation_check(0.0, 33).unwrap(), 0.0);
        for omega in [1.0, 2.0] {
            let (coarse, fine, slope) = ground_annihilation_order(omega, 65).unwrap();
            assert!(fine < coarse);
            assert!((slope - 2.0).abs() < 0.1, "omega {omega}: slope {slope}");
        }
    }
}
