//! Stationary Kirchhoff (Stieltjes) equilibria on the real line.
//!
//! Unit charges at `x_1 < ... < x_n` in an external field `W` are in
//! equilibrium when
//!
//! ```text
//! r_k = sum_{j != k} 1/(x_k - x_j) - W(x_k) = 0    for every k.
//! ```
//!
//! The solver is a damped Newton iteration with the analytic Jacobian. The
//! electrostatic energy `E = -sum_{j<k} ln|x_j - x_k| + sum_k U(x_k)` with
//! `U' = W` has gradient `-r`; for the classical families it is strictly
//! convex, so every accepted step is required to not increase it.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::orthopoly::{PolynomialSpec, OrthoError};
use crate::superpotential::{Superpotential, SuperpotentialError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("charges {i} and {j} coincide at x = {x}")]
    Coincident { i: usize, j: usize, x: f64 },
    #[error("charge {index} at x = {x} is outside the domain of W")]
    OutOfDomain { index: usize, x: f64 },
    #[error("{0} has no classical orthogonal-polynomial oracle")]
    NoOracle(String),
    #[error("{0} has no closed-form antiderivative; energy unavailable")]
    NoAntiderivative(String),
    #[error("invalid solver input: {0}")]
    Input(String),
    #[error(transparent)]
    Superpotential(#[from] SuperpotentialError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
}

fn validate(positions: &[f64], w: &Superpotential) -> Result<(), EquilibriumError> {
    let domain = w.domain();
    for (index, &x) in positions.iter().enumerate() {
        if !x.is_finite() || !domain.contains(x) {
            return Err(EquilibriumError::OutOfDomain { index, x });
        }
    }
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] == positions[j] {
                return Err(EquilibriumError::Coincident {
                    i,
                    j,
                    x: positions[i],
                });
            }
        }
    }
    Ok(())
}

/// `r_k = sum_{j != k} 1/(x_k - x_j) - W(x_k)`
pub fn residual(positions: &[f64], w: &Superpotential) -> Result<Vec<f64>, EquilibriumError> {
    validate(positions, w)?;
    Ok(residual_unchecked(positions, w))
}

fn residual_unchecked(positions: &[f64], w: &Superpotential) -> Vec<f64> {
    positions
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let pair: f64 = positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| 1.0 / (xk - xj))
                .sum();
            pair - w.value(xk)
        })
        .collect()
}

/// Analytic Jacobian of [`residual`]. Symmetric: `J_kj = 1/(x_k - x_j)^2`.
pub fn jacobian(positions: &[f64], w: &Superpotential) -> Result<DMatrix<f64>, EquilibriumError> {
    validate(positions, w)?;
    Ok(jacobian_unchecked(positions, w))
}

fn jacobian_unchecked(positions: &[f64], w: &Superpotential) -> DMatrix<f64> {
    let n = positions.len();
    let mut jac = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut diag = -w.derivative(positions[k]);
        for j in 0..n {
            if j != k {
                let c = 1.0 / (positions[k] - positions[j]).powi(2);
                jac[(k, j)] = c;
                diag -= c;
            }
        }
        jac[(k, k)] = diag;
    }
    jac
}

/// `E = -sum_{j<k} ln|x_j - x_k| + sum_k U(x_k)`.
pub fn electrostatic_energy(positions: &[f64], w: &Superpotential) -> Result<f64, EquilibriumError> {
    validate(positions, w)?;
    energy_unchecked(positions, w).ok_or_else(|| EquilibriumError::NoAntiderivative(w.name()))
}

fn energy_unchecked(positions: &[f64], w: &Superpotential) -> Option<f64> {
    let mut e = 0.0;
    for (k, &xk) in positions.iter().enumerate() {
        e += w.antiderivative(xk)?;
        for &xj in &positions[k + 1..] {
            e -= (xk - xj).abs().ln();
        }
    }
    Some(e)
}

/// Classical polynomial whose zeros are the equilibrium of `n` charges.
pub fn oracle_mapping(w: &Superpotential, n: usize) -> Result<PolynomialSpec, EquilibriumError> {
    match *w {
        Superpotential::Harmonic => Ok(PolynomialSpec::hermite(n)),
        Superpotential::Coulomb { l } => Ok(PolynomialSpec::laguerre(2.0 * l as f64 + 1.0, n)?),
        Superpotential::Jacobi { p, q } => Ok(PolynomialSpec::jacobi(2.0 * p - 1.0, 2.0 * q - 1.0, n)?),
        Superpotential::Custom(_) => Err(EquilibriumError::NoOracle(w.name())),
    }
}

/// Equally spaced interior starting points in the central region of the
/// domain where the equilibrium lives.
pub fn auto_init(w: &Superpotential, n: usize) -> Vec<f64> {
    let (a, b) = match *w {
        Superpotential::Harmonic => {
            let c = (2.0 * n as f64 + 1.0).sqrt();
            (-c, c)
        }
        Superpotential::Coulomb { l } => {
            let alpha = 2.0 * l as f64 + 1.0;
            (1.0, 4.0 * n as f64 + 2.0 * (alpha + 1.0))
        }
        Superpotential::Jacobi { .. } => (-1.0, 1.0),
        Superpotential::Custom(ref c) => {
            let d = c.domain;
            let span = (2.0 * n as f64 + 1.0).sqrt();
            match (d.lower.is_finite(), d.upper.is_finite()) {
                (true, true) => (d.lower, d.upper),
                (true, false) => (d.lower + 1.0, d.lower + 1.0 + 4.0 * n as f64 + 4.0),
                (false, true) => (d.upper - 1.0 - 4.0 * n as f64 - 4.0, d.upper - 1.0),
                (false, false) => (-span, span),
            }
        }
    };
    (0..n)
        .map(|k| a + (b - a) * (k as f64 + 1.0) / (n as f64 + 1.0))
        .collect()
}

#[derive(Debug, Clone)]
pub enum Init {
    Auto,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Target max-norm of the residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Smallest line-search fraction tried before declaring a stall.
    pub min_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iterations: 200,
            min_step: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonStep {
    pub residual_norm: f64,
    pub energy: Option<f64>,
    pub step_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumResult {
    pub positions: Vec<f64>,
    /// Max-norm of the residual at `positions`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// One entry per accepted step, starting with the initial iterate.
    pub history: Vec<NewtonStep>,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

fn admissible(x: &[f64], w: &Superpotential) -> bool {
    let d = w.domain();
    x.iter().all(|&v| v.is_finite() && d.contains(v)) && x.windows(2).all(|p| p[0] < p[1])
}

/// Damped Newton for the stationary Kirchhoff equations.
///
/// Steps are halved until the trial point is inside the domain, keeps the
/// charges strictly ordered, satisfies an Armijo decrease of `|r|^2` and
/// (when `W` has an antiderivative) does not increase the energy. Failure to
/// converge returns the best iterate with `converged = false`.
pub fn solve_equilibrium(
    w: &Superpotential,
    n: usize,
    init: &Init,
    opts: &SolverOptions,
) -> Result<EquilibriumResult, EquilibriumError> {
    if n == 0 {
        return Err(EquilibriumError::Input("n must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(EquilibriumError::Input(format!("tol must be positive, got {}", opts.tol)));
    }
    let mut x = match init {
        Init::Auto => auto_init(w, n),
        Init::Given(v) => {
            if v.len() != n {
                return Err(EquilibriumError::Input(format!(
                    "initial guess has {} points, expected {n}",
                    v.len()
                )));
            }
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v
        }
    };
    validate(&x, w)?;

    let mut r = residual_unchecked(&x, w);
    let mut energy = energy_unchecked(&x, w);
    let mut rn = max_norm(&r);
    let mut history = vec![NewtonStep {
        residual_norm: rn,
        energy,
        step_fraction: 0.0,
    }];
    let mut iterations = 0;

    while rn > opts.tol && iterations < opts.max_iterations {
        let jac = jacobian_unchecked(&x, w);
        let rhs = -DVector::from_column_slice(&r);
        let Some(delta) = jac.lu().solve(&rhs) else {
            break;
        };
        let phi = sum_sq(&r);
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= opts.min_step {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
            if admissible(&trial, w) {
                let rt = residual_unchecked(&trial, w);
                let et = energy_unchecked(&trial, w);
                let descent = sum_sq(&rt) <= (1.0 - 1e-4 * lambda) * phi;
                let energy_ok = match (energy, et) {
                    (Some(e0), Some(e1)) => e1 <= e0 + 1e-13 * e0.abs().max(1.0),
                    _ => true,
                };
                if descent && energy_ok {
                    accepted = Some((trial, rt, et));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xt, rt, et)) = accepted else {
            break;
        };
        x = xt;
        r = rt;
        energy = et;
        rn = max_norm(&r);
        iterations += 1;
        history.push(NewtonStep {
            residual_norm: rn,
            energy,
            step_fraction: lambda,
        });
    }

    Ok(EquilibriumResult {
        positions: x,
        residual_norm: rn,
        iterations,
        converged: rn <= opts.tol,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly;
    use crate::superpotential::{CustomSuperpotential, Domain};
    use approx::assert_abs_diff_eq;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn residual_examples() {
        assert_eq!(residual(&[0.0], &Superpotential::Harmonic).unwrap(), vec![0.0]);
        let r = residual(&[-SQRT_HALF, SQRT_HALF], &Superpotential::Harmonic).unwrap();
        assert!(max_norm(&r) < 1e-15);
        let r = residual(&[2.0], &Superpotential::Coulomb { l: 0 }).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn residual_errors() {
        assert!(matches!(
            residual(&[1.0, 1.0], &Superpotential::Harmonic),
            Err(EquilibriumError::Coincident { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            residual(&[-0.5], &Superpotential::Coulomb { l: 0 }),
            Err(EquilibriumError::OutOfDomain { index: 0, .. })
        ));
        let jw = Superpotential::jacobi(1.0, 1.0).unwrap();
        assert!(residual(&[0.0, 1.0], &jw).is_err());
    }

    #[test]
    fn jacobian_single_charge() {
        let j = jacobian(&[0.3], &Superpotential::Harmonic).unwrap();
        assert_eq!(j[(0, 0)], -1.0);
    }

    fn fd_jacobian(x: &[f64], w: &Superpotential) -> DMatrix<f64> {
        let n = x.len();
        let h = 1e-6;
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let rp = residual(&xp, w).unwrap();
            let rm = residual(&xm, w).unwrap();
            for k in 0..n {
                out[(k, j)] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let cases = [
            (Superpotential::Harmonic, vec![-SQRT_HALF, SQRT_HALF]),
            (Superpotential::jacobi(1.0, 1.0).unwrap(), vec![-0.6, 0.1, 0.5]),
            (Superpotential::Coulomb { l: 1 }, vec![0.8, 2.5, 4.0, 7.5]),
        ];
        for (w, x) in cases {
            let a = jacobian(&x, &w).unwrap();
            let f = fd_jacobian(&x, &w);
            for (p, q) in a.iter().zip(f.iter()) {
                assert!((p - q).abs() <= 1e-6 * p.abs().max(1.0), "{}: {p} vs {q}", w.name());
            }
            assert_eq!(a, a.transpose());
        }
    }

    #[test]
    fn oracle_mapping_examples() {
        assert_eq!(
            oracle_mapping(&Superpotential::Harmonic, 5).unwrap(),
            PolynomialSpec::hermite(5)
        );
        assert_eq!(
            oracle_mapping(&Superpotential::Coulomb { l: 0 }, 1).unwrap(),
            PolynomialSpec::laguerre(1.0, 1).unwrap()
        );
        assert_eq!(
            oracle_mapping(&Superpotential::jacobi(1.0, 1.0).unwrap(), 3).unwrap(),
            PolynomialSpec::jacobi(1.0, 1.0, 3).unwrap()
        );
        assert!(matches!(
            oracle_mapping(&Superpotential::constant(1.0), 3),
            Err(EquilibriumError::NoOracle(_))
        ));
    }

    #[test]
    fn energy_examples() {
        let e = electrostatic_energy(&[0.4], &Superpotential::Harmonic).unwrap();
        assert_abs_diff_eq!(e, 0.08, epsilon = 1e-15);
        let eq = electrostatic_energy(&[-SQRT_HALF, SQRT_HALF], &Superpotential::Harmonic).unwrap();
        let off = electrostatic_energy(&[-1.0, 1.0], &Superpotential::Harmonic).unwrap();
        assert!(eq < off);
    }

    #[test]
    fn energy_gradient_is_minus_residual() {
        let x = [-1.3, -0.2, 0.45, 1.7];
        let w = Superpotential::Harmonic;
        let r = residual(&x, &w).unwrap();
        let h = 1e-6;
        for k in 0..x.len() {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let g = (electrostatic_energy(&xp, &w).unwrap() - electrostatic_energy(&xm, &w).unwrap()) / (2.0 * h);
            assert!((g + r[k]).abs() < 1e-6, "k={k}: {g} vs {}", -r[k]);
        }
    }

    #[test]
    fn solves_closed_forms() {
        let opts = SolverOptions::default();
        let res = solve_equilibrium(&Superpotential::Harmonic, 2, &Init::Auto, &opts).unwrap();
        assert!(res.converged);
        assert_abs_diff_eq!(res.positions[0], -SQRT_HALF, epsilon = 1e-10);
        assert_abs_diff_eq!(res.positions[1], SQRT_HALF, epsilon = 1e-10);

        let res = solve_equilibrium(&Superpotential::Coulomb { l: 0 }, 1, &Init::Auto, &opts).unwrap();
        assert!(res.converged);
        assert_abs_diff_eq!(res.positions[0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn harmonic_ten_matches_hermite_zeros() {
        let res = solve_equilibrium(&Superpotential::Harmonic, 10, &Init::Auto, &SolverOptions::default()).unwrap();
        let oracle = orthopoly::zeros(&PolynomialSpec::hermite(10)).unwrap().zeros;
        assert!(res.converged);
        for (a, b) in res.positions.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_never_increases_along_accepted_steps() {
        let w = Superpotential::jacobi(1.5, 2.0).unwrap();
        let res = solve_equilibrium(&w, 12, &Init::Auto, &SolverOptions::default()).unwrap();
        assert!(res.converged);
        for pair in res.history.windows(2) {
            let (e0, e1) = (pair[0].energy.unwrap(), pair[1].energy.unwrap());
            assert!(e1 <= e0 + 1e-13 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn unreachable_tolerance_reports_non_convergence() {
        let opts = SolverOptions {
            tol: 1e-30,
            max_iterations: 50,
            ..SolverOptions::default()
        };
        let res = solve_equilibrium(&Superpotential::Harmonic, 6, &Init::Auto, &opts).unwrap();
        assert!(!res.converged);
        assert!(res.residual_norm < 1e-12, "best iterate is still returned");
    }

    #[test]
    fn custom_superpotential_without_oracle_still_solves() {
        // W(x) = 2x: equilibria are Hermite zeros scaled by 1/sqrt(2).
        let w = Superpotential::Custom(CustomSuperpotential::new(
            "2x",
            Domain::REAL_LINE,
            |x| 2.0 * x,
            |_| 2.0,
        ));
        let res = solve_equilibrium(&w, 5, &Init::Auto, &SolverOptions::default()).unwrap();
        let oracle = orthopoly::zeros(&PolynomialSpec::hermite(5)).unwrap().zeros;
        assert!(res.converged);
        for (a, b) in res.positions.iter().zip(&oracle) {
            assert!((a - b * SQRT_HALF).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_inputs() {
        let opts = SolverOptions::default();
        assert!(solve_equilibrium(&Superpotential::Harmonic, 0, &Init::Auto, &opts).is_err());
        assert!(solve_equilibrium(&Superpotential::Harmonic, 2, &Init::Given(vec![0.0]), &opts).is_err());
        let bad = SolverOptions { tol: 0.0, ..opts };
        assert!(solve_equilibrium(&Superpotential::Harmonic, 2, &Init::Auto, &bad).is_err());
    }
}
