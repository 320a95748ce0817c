//! Factorized partner Hamiltonians `H+ = A^dag A`, `H- = A A^dag` with
//! `A = d/dx + W`, discretized by three-point differences on a uniform grid
//! with Dirichlet walls.

use serde::Serialize;
use thiserror::Error;

use crate::superpotential::Superpotential;
use crate::tridiag::{SymTridiagonal, TridiagError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SusyError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid node x = {x} lies outside the domain of {w}")]
    Domain { x: f64, w: String },
    #[error("exp(-int W) is not normalizable on the grid (wall/peak ratio {ratio:e})")]
    NonNormalizable { ratio: f64 },
    #[error("requested {k} eigenvalues but the grid has only {interior} interior nodes")]
    TooManyEigenvalues { k: usize, interior: usize },
    #[error("potential has {got} samples, grid has {expected} nodes")]
    Shape { got: usize, expected: usize },
    #[error(transparent)]
    Eigen(#[from] TridiagError),
}

/// Uniform grid `x_i = x_min + i h`, `i = 0..points`, walls at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self, SusyError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(SusyError::Grid(format!("need finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if points < Self::MIN_POINTS {
            return Err(SusyError::Grid(format!("need at least {} points, got {points}", Self::MIN_POINTS)));
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    fn check_domain(&self, w: &Superpotential) -> Result<(), SusyError> {
        let d = w.domain();
        for x in [self.x_min, self.x_max] {
            if !d.contains(x) {
                return Err(SusyError::Domain { x, w: w.name() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartnerPotentials {
    pub nodes: Vec<f64>,
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub factorization_energy: f64,
}

/// `V+- = W^2 -+ W' + E` on every grid node.
pub fn partner_potentials(w: &Superpotential, energy: f64, grid: &GridSpec) -> Result<PartnerPotentials, SusyError> {
    grid.check_domain(w)?;
    let nodes = grid.nodes();
    let (v_plus, v_minus) = nodes
        .iter()
        .map(|&x| {
            let (wv, dw) = (w.value(x), w.derivative(x));
            (wv * wv - dw + energy, wv * wv + dw + energy)
        })
        .unzip();
    Ok(PartnerPotentials {
        nodes,
        v_plus,
        v_minus,
        factorization_energy: energy,
    })
}

/// Wall-to-peak ratio above which `exp(-int W)` counts as not normalizable
/// on the grid.
pub const NORMALIZABILITY_RATIO: f64 = 1e-8;

/// Zero mode `psi0 ~ exp(-int W)` of `A`, normalized so that
/// `h * sum psi0^2 = 1`.
pub fn ground_state(w: &Superpotential, grid: &GridSpec) -> Result<Vec<f64>, SusyError> {
    grid.check_domain(w)?;
    let nodes = grid.nodes();
    let h = grid.spacing();
    let potential: Vec<f64> = if w.has_antiderivative() {
        nodes.iter().map(|&x| w.antiderivative(x).expect("checked")).collect()
    } else {
        // Cumulative trapezoid of W.
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(nodes.len());
        for (i, &x) in nodes.iter().enumerate() {
            if i > 0 {
                acc += 0.5 * h * (w.value(nodes[i - 1]) + w.value(x));
            }
            out.push(acc);
        }
        out
    };
    let u_min = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let mut psi: Vec<f64> = potential.iter().map(|u| (-(u - u_min)).exp()).collect();

    let wall = psi[0].max(psi[psi.len() - 1]);
    if !(wall <= NORMALIZABILITY_RATIO) {
        return Err(SusyError::NonNormalizable { ratio: wall });
    }
    let norm = (h * psi.iter().map(|p| p * p).sum::<f64>()).sqrt();
    psi.iter_mut().for_each(|p| *p /= norm);
    Ok(psi)
}

/// L2 norm of the discrete `A psi0 = psi0' + W psi0` (central differences)
/// over the interior nodes.
pub fn annihilation_residual(w: &Superpotential, grid: &GridSpec) -> Result<f64, SusyError> {
    let psi = ground_state(w, grid)?;
    let h = grid.spacing();
    let sum: f64 = (1..grid.points - 1)
        .map(|i| {
            let d = (psi[i + 1] - psi[i - 1]) / (2.0 * h);
            (d + w.value(grid.node(i)) * psi[i]).powi(2)
        })
        .sum();
    Ok((h * sum).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceOrder {
    pub coarse: f64,
    pub fine: f64,
    /// `log2(coarse / fine)`; 2 for a second-order scheme.
    pub slope: f64,
}

/// Annihilation residual on `grid` and on the grid with half the spacing.
pub fn annihilation_order(w: &Superpotential, grid: &GridSpec) -> Result<ConvergenceOrder, SusyError> {
    let coarse = annihilation_residual(w, grid)?;
    let fine = annihilation_residual(w, &grid.refined())?;
    Ok(ConvergenceOrder {
        coarse,
        fine,
        slope: (coarse / fine).log2(),
    })
}

fn operator(v: &[f64], grid: &GridSpec) -> Result<SymTridiagonal, SusyError> {
    if v.len() != grid.points {
        return Err(SusyError::Shape {
            got: v.len(),
            expected: grid.points,
        });
    }
    let h2 = grid.spacing().powi(2);
    let interior = grid.points - 2;
    let diag = (1..=interior).map(|i| 2.0 / h2 + v[i]).collect();
    let off = vec![-1.0 / h2; interior - 1];
    Ok(SymTridiagonal::new(diag, off)?)
}

/// Lowest `k` eigenvalues (ascending) of `-d^2/dx^2 + V` with Dirichlet
/// walls, `V` sampled on every grid node.
pub fn spectrum(v: &[f64], grid: &GridSpec, k: usize) -> Result<Vec<f64>, SusyError> {
    let op = operator(v, grid)?;
    if k > op.dim() {
        return Err(SusyError::TooManyEigenvalues { k, interior: op.dim() });
    }
    let mut eig = op.eigenvalues()?;
    eig.truncate(k);
    Ok(eig)
}

/// Lowest `k` eigenpairs; eigenvectors are sampled on the full grid (zero at
/// the walls) with unit discrete L2 norm.
pub fn eigenpairs(v: &[f64], grid: &GridSpec, k: usize) -> Result<Vec<(f64, Vec<f64>)>, SusyError> {
    let op = operator(v, grid)?;
    let values = spectrum(v, grid, k)?;
    let scale = grid.spacing().sqrt();
    Ok(values
        .into_iter()
        .map(|lam| {
            let inner = op.eigenvector(lam);
            let mut full = Vec::with_capacity(grid.points);
            full.push(0.0);
            full.extend(inner.iter().map(|a| a / scale));
            full.push(0.0);
            (lam, full)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    /// Lowest `k + 1` levels of `H+ = -d^2 + V+ - E`.
    pub h_plus: Vec<f64>,
    /// Lowest `k` levels of `H- = -d^2 + V- - E`.
    pub h_minus: Vec<f64>,
    /// `|eig_m(H-) - eig_{m+1}(H+)|` for `m < k`.
    pub mismatches: Vec<f64>,
    pub max_mismatch: Option<f64>,
}

impl DegeneracyReport {
    pub fn ground_energy(&self) -> Option<f64> {
        self.h_plus.first().copied()
    }
}

/// Compares the partner spectra: `H-` should reproduce `H+` with its ground
/// level removed.
pub fn degeneracy_check(w: &Superpotential, energy: f64, grid: &GridSpec, k: usize) -> Result<DegeneracyReport, SusyError> {
    if k == 0 {
        return Ok(DegeneracyReport {
            h_plus: Vec::new(),
            h_minus: Vec::new(),
            mismatches: Vec::new(),
            max_mismatch: None,
        });
    }
    ground_state(w, grid)?;
    let pp = partner_potentials(w, energy, grid)?;
    let h_plus: Vec<f64> = spectrum(&pp.v_plus, grid, k + 1)?.into_iter().map(|e| e - energy).collect();
    let h_minus: Vec<f64> = spectrum(&pp.v_minus, grid, k)?.into_iter().map(|e| e - energy).collect();
    let mismatches: Vec<f64> = h_minus.iter().zip(&h_plus[1..]).map(|(a, b)| (a - b).abs()).collect();
    let max_mismatch = mismatches.iter().copied().reduce(f64::max);
    Ok(DegeneracyReport {
        h_plus,
        h_minus,
        mismatches,
        max_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_grid() -> GridSpec {
        GridSpec::new(-8.0, 8.0, 2048).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 1.0, 100).is_err());
        assert!(GridSpec::new(0.0, 1.0, 15).is_err());
        let g = GridSpec::new(0.0, 1.0, 16).unwrap();
        assert_abs_diff_eq!(g.spacing(), 1.0 / 15.0);
        assert_eq!(g.nodes().last().copied(), Some(1.0));
        assert_eq!(g.refined().points(), 31);
    }

    #[test]
    fn harmonic_partners() {
        let g = GridSpec::new(-3.0, 3.0, 61).unwrap();
        let pp = partner_potentials(&Superpotential::Harmonic, 0.0, &g).unwrap();
        for (i, &x) in pp.nodes.iter().enumerate() {
            assert_abs_diff_eq!(pp.v_plus[i], x * x - 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(pp.v_minus[i], x * x + 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_superpotential_partners_coincide() {
        let g = GridSpec::new(-3.0, 3.0, 32).unwrap();
        let pp = partner_potentials(&Superpotential::constant(1.5), 0.0, &g).unwrap();
        assert!(pp.v_plus.iter().all(|&v| (v - 2.25).abs() < 1e-15));
        assert_eq!(pp.v_plus, pp.v_minus);
    }

    #[test]
    fn coulomb_partner_value() {
        // r = 2 is node 10 of [1, 3] with 21 points.
        let g = GridSpec::new(1.0, 3.0, 21).unwrap();
        let pp = partner_potentials(&Superpotential::Coulomb { l: 0 }, 0.0, &g).unwrap();
        assert_abs_diff_eq!(pp.nodes[10], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.v_plus[10], -0.25, epsilon = 1e-14);
    }

    #[test]
    fn coulomb_grid_must_avoid_origin() {
        let g = GridSpec::new(0.0, 3.0, 21).unwrap();
        assert!(matches!(
            partner_potentials(&Superpotential::Coulomb { l: 0 }, 0.0, &g),
            Err(SusyError::Domain { .. })
        ));
    }

    #[test]
    fn pointwise_partner_identities() {
        let ws = [
            (Superpotential::Harmonic, GridSpec::new(-5.0, 5.0, 101).unwrap()),
            (Superpotential::Coulomb { l: 1 }, GridSpec::new(0.5, 20.0, 200).unwrap()),
            (Superpotential::jacobi(1.5, 2.0).unwrap(), GridSpec::new(-0.95, 0.95, 64).unwrap()),
        ];
        for (w, g) in ws {
            let e = 0.3;
            let pp = partner_potentials(&w, e, &g).unwrap();
            for (i, &x) in pp.nodes.iter().enumerate() {
                let wv = w.value(x);
                let sum = pp.v_plus[i] + pp.v_minus[i];
                let diff = pp.v_plus[i] - pp.v_minus[i];
                assert!((sum - 2.0 * (wv * wv + e)).abs() <= 1e-12 * sum.abs().max(1.0));
                assert!((diff + 2.0 * w.derivative(x)).abs() <= 1e-12 * diff.abs().max(1.0));
            }
        }
    }

    #[test]
    fn harmonic_ground_state_is_gaussian() {
        let g = default_grid();
        let psi = ground_state(&Superpotential::Harmonic, &g).unwrap();
        let c = psi[g.points() / 2] / (-0.5 * g.node(g.points() / 2).powi(2)).exp();
        for (i, &x) in g.nodes().iter().enumerate().step_by(97) {
            assert!((psi[i] - c * (-0.5 * x * x).exp()).abs() < 1e-12);
        }
        assert!(psi[0] < 1e-12 && psi[g.points() - 1] < 1e-12);
    }

    #[test]
    fn constant_superpotential_is_not_normalizable() {
        let g = default_grid();
        assert!(matches!(
            ground_state(&Superpotential::constant(0.0), &g),
            Err(SusyError::NonNormalizable { .. })
        ));
        assert!(ground_state(&Superpotential::constant(2.0), &g).is_err());
    }

    #[test]
    fn annihilation_residual_is_small() {
        let r = annihilation_residual(&Superpotential::Harmonic, &default_grid()).unwrap();
        assert!(r < 1e-3, "{r}");
    }

    #[test]
    fn annihilation_is_second_order() {
        let order = annihilation_order(&Superpotential::Harmonic, &GridSpec::new(-8.0, 8.0, 513).unwrap()).unwrap();
        assert!((order.slope - 2.0).abs() < 0.2, "{order:?}");
    }

    #[test]
    fn oscillator_partner_spectra() {
        let g = default_grid();
        let pp = partner_potentials(&Superpotential::Harmonic, 0.0, &g).unwrap();
        let plus = spectrum(&pp.v_plus, &g, 4).unwrap();
        for (m, e) in plus.iter().enumerate() {
            assert!((e - 2.0 * m as f64).abs() < 1e-3, "H+ level {m}: {e}");
        }
        let minus = spectrum(&pp.v_minus, &g, 3).unwrap();
        for (m, e) in minus.iter().enumerate() {
            assert!((e - 2.0 * (m + 1) as f64).abs() < 1e-3, "H- level {m}: {e}");
        }
    }

    #[test]
    fn symmetric_potential_eigenfunctions_alternate_parity() {
        let g = GridSpec::new(-8.0, 8.0, 801).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
        let pairs = eigenpairs(&v, &g, 6).unwrap();
        let n = g.points();
        for (m, (_, psi)) in pairs.iter().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let err = (0..n).map(|i| (psi[i] - sign * psi[n - 1 - i]).abs()).fold(0.0, f64::max);
            assert!(err < 1e-8, "level {m}: parity defect {err}");
            // m nodes for the m-th level.
            let significant: Vec<f64> = psi.iter().copied().filter(|p| p.abs() > 1e-10).collect();
            let crossings = significant.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(crossings, m, "level {m}");
        }
    }

    #[test]
    fn degeneracy_examples() {
        let g = default_grid();
        let rep = degeneracy_check(&Superpotential::Harmonic, 0.0, &g, 4).unwrap();
        assert!(rep.max_mismatch.unwrap() < 1e-3);
        assert!(rep.ground_energy().unwrap().abs() < 1e-4);
        let empty = degeneracy_check(&Superpotential::Harmonic, 0.0, &g, 0).unwrap();
        assert!(empty.mismatches.is_empty() && empty.max_mismatch.is_none());
    }

    #[test]
    fn factorization_energy_cancels_in_levels() {
        let g = GridSpec::new(-8.0, 8.0, 1024).unwrap();
        let a = degeneracy_check(&Superpotential::Harmonic, 0.0, &g, 3).unwrap();
        let b = degeneracy_check(&Superpotential::Harmonic, 1.25, &g, 3).unwrap();
        for (x, y) in a.h_plus.iter().zip(&b.h_plus) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn too_many_eigenvalues() {
        let g = GridSpec::new(0.0, 1.0, 16).unwrap();
        assert!(matches!(
            spectrum(&vec![0.0; 16], &g, 15),
            Err(SusyError::TooManyEigenvalues { k: 15, interior: 14 })
        ));
        assert!(matches!(spectrum(&vec![0.0; 3], &g, 1), Err(SusyError::Shape { .. })));
    }
}
