//! Laughlin log-amplitude
//!
//! ```text
//! L(z) = n sum_{i<j} log(z_i - z_j) - sum_i |z_i|^2 / (4 l_B^2)
//! ```
//!
//! its Wirtinger derivatives, the quasihole Berry connection, and planar
//! equilibria `dL/dz_j = 0`.
//!
//! The Berry connection is tied to the amplitude by
//! `A_j = -(i nu / 2) dL'/d eta_j`, where `L'` is the log-amplitude with
//! exponent 1 and magnetic length `l_B / sqrt(2)`
//! (see [`LaughlinParams::quasihole_kernel`]).

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orthopoly::{self, PolynomialSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaughlinError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("configuration has {got} points, parameters expect {expected}")]
    Size { got: usize, expected: usize },
    #[error("points {i} and {j} coincide")]
    Coincident { i: usize, j: usize },
    #[error("index {j} out of range for {n} points")]
    Index { j: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaughlinParams {
    n: usize,
    n_exp: u32,
    l_b: f64,
}

impl LaughlinParams {
    pub fn new(n: usize, n_exp: u32, l_b: f64) -> Result<Self, LaughlinError> {
        if n == 0 {
            return Err(LaughlinError::Parameter("particle count must be at least 1".into()));
        }
        if n_exp % 2 == 0 {
            return Err(LaughlinError::Parameter(format!("exponent must be odd and positive, got {n_exp}")));
        }
        if !(l_b.is_finite() && l_b > 0.0) {
            return Err(LaughlinError::Parameter(format!("magnetic length must be positive, got {l_b}")));
        }
        Ok(Self { n, n_exp, l_b })
    }

    /// Rechecks invariants after deserialization.
    pub fn validated(self) -> Result<Self, LaughlinError> {
        Self::new(self.n, self.n_exp, self.l_b)
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> u32 {
        self.n_exp
    }

    pub fn magnetic_length(&self) -> f64 {
        self.l_b
    }

    /// Filling fraction `1 / n_exp`.
    pub fn nu(&self) -> f64 {
        1.0 / self.n_exp as f64
    }

    /// Amplitude parameters whose `eta`-derivative, times `-(i nu / 2)`,
    /// is the Berry connection: exponent 1, magnetic length `l_B / sqrt(2)`.
    pub fn quasihole_kernel(&self) -> Self {
        Self {
            n: self.n,
            n_exp: 1,
            l_b: self.l_b / SQRT_2,
        }
    }

    fn gaussian(&self) -> f64 {
        1.0 / (4.0 * self.l_b * self.l_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Electrons,
    Quasiholes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarConfig {
    pub points: Vec<Complex64>,
    pub role: Role,
}

impl PlanarConfig {
    pub fn electrons(points: Vec<Complex64>) -> Self {
        Self {
            points,
            role: Role::Electrons,
        }
    }

    pub fn quasiholes(points: Vec<Complex64>) -> Self {
        Self {
            points,
            role: Role::Quasiholes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First coincident pair, if any.
    pub fn coincident_pair(&self) -> Option<(usize, usize)> {
        let p = &self.points;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] == p[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn min_separation(&self) -> f64 {
        min_separation(&self.points)
    }

    fn check(&self, params: &LaughlinParams) -> Result<(), LaughlinError> {
        if self.len() != params.n {
            return Err(LaughlinError::Size {
                got: self.len(),
                expected: params.n,
            });
        }
        match self.coincident_pair() {
            Some((i, j)) => Err(LaughlinError::Coincident { i, j }),
            None => Ok(()),
        }
    }
}

fn min_separation(p: &[Complex64]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            d = d.min((p[i] - p[j]).norm());
        }
    }
    d
}

/// Value of the log-amplitude; a coincident pair sends the amplitude to zero
/// and the log to `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogAmplitude {
    Finite { value: Complex64 },
    NegativeInfinity { i: usize, j: usize },
}

impl LogAmplitude {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            LogAmplitude::Finite { value } => Some(value),
            LogAmplitude::NegativeInfinity { .. } => None,
        }
    }
}

/// Principal branch per pair; the amplitude itself is never exponentiated.
pub fn log_amplitude(params: &LaughlinParams, cfg: &PlanarConfig) -> Result<LogAmplitude, LaughlinError> {
    match cfg.check(params) {
        Err(LaughlinError::Coincident { i, j }) => return Ok(LogAmplitude::NegativeInfinity { i, j }),
        other => other?,
    }
    Ok(LogAmplitude::Finite {
        value: log_amplitude_unchecked(params, &cfg.points),
    })
}

fn log_amplitude_unchecked(params: &LaughlinParams, z: &[Complex64]) -> Complex64 {
    let mut jastrow = Complex64::new(0.0, 0.0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            jastrow += (z[i] - z[j]).ln();
        }
    }
    let gauss: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    params.n_exp as f64 * jastrow - params.gaussian() * gauss
}

fn wirtinger_unchecked(params: &LaughlinParams, z: &[Complex64], j: usize) -> Complex64 {
    let pair: Complex64 = z.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, zi)| 1.0 / (z[j] - zi)).sum();
    params.n_exp as f64 * pair - params.gaussian() * z[j].conj()
}

/// `dL/dz_j = sum_{i != j} n/(z_j - z_i) - conj(z_j)/(4 l_B^2)` for every `j`.
pub fn stationary_residual(params: &LaughlinParams, cfg: &PlanarConfig) -> Result<Vec<Complex64>, LaughlinError> {
    cfg.check(params)?;
    Ok((0..cfg.len()).map(|j| wirtinger_unchecked(params, &cfg.points, j)).collect())
}

/// `conj(dL/dz_j) = sum_{i != j} n/(conj z_j - conj z_i) - z_j/(4 l_B^2)`,
/// evaluated from the conjugated points.
pub fn adjoint_residual(params: &LaughlinParams, cfg: &PlanarConfig) -> Result<Vec<Complex64>, LaughlinError> {
    cfg.check(params)?;
    let zb: Vec<Complex64> = cfg.points.iter().map(|z| z.conj()).collect();
    let g = params.gaussian();
    Ok((0..zb.len())
        .map(|j| {
            let pair: Complex64 = zb.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, w)| 1.0 / (zb[j] - w)).sum();
            params.n_exp as f64 * pair - g * cfg.points[j]
        })
        .collect())
}

/// `A_j = -(i nu/2) sum_{k != j} 1/(eta_j - eta_k) + i nu conj(eta_j)/(4 l_B^2)`.
pub fn berry_connection(params: &LaughlinParams, cfg: &PlanarConfig, j: usize) -> Result<Complex64, LaughlinError> {
    cfg.check(params)?;
    if j >= cfg.len() {
        return Err(LaughlinError::Index { j, n: cfg.len() });
    }
    let eta = &cfg.points;
    let nu = params.nu();
    let pair: Complex64 = eta.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, e)| 1.0 / (eta[j] - e)).sum();
    Ok(-0.5 * I * nu * pair + I * nu * params.gaussian() * eta[j].conj())
}

/// Wirtinger derivative `d/dz_j = (d/dx_j - i d/dy_j)/2` of the
/// log-amplitude by five-point central differences of step `h`, with branch
/// jumps of the imaginary part removed.
pub fn numerical_derivative(params: &LaughlinParams, cfg: &PlanarConfig, j: usize, h: f64) -> Result<Complex64, LaughlinError> {
    cfg.check(params)?;
    if j >= cfg.len() {
        return Err(LaughlinError::Index { j, n: cfg.len() });
    }
    let base = log_amplitude_unchecked(params, &cfg.points);
    let mut z = cfg.points.clone();
    let mut partial = |dir: Complex64| {
        let mut sample = |s: f64| {
            z[j] = cfg.points[j] + s * h * dir;
            let d = log_amplitude_unchecked(params, &z) - base;
            Complex64::new(d.re, d.im - TAU * (d.im / TAU).round())
        };
        let (p1, m1, p2, m2) = (sample(1.0), sample(-1.0), sample(2.0), sample(-2.0));
        (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h)
    };
    let dx = partial(Complex64::new(1.0, 0.0));
    let dy = partial(I);
    Ok(0.5 * (dx - I * dy))
}

/// Numerical Berry connection: `-(i nu/2)` times the numerical derivative of
/// the quasihole-kernel amplitude.
pub fn numerical_berry_connection(params: &LaughlinParams, cfg: &PlanarConfig, j: usize, h: f64) -> Result<Complex64, LaughlinError> {
    let d = numerical_derivative(&params.quasihole_kernel(), cfg, j, h)?;
    Ok(-0.5 * I * params.nu() * d)
}

/// `N` points uniform in the disk of radius `radius`, pairwise at least
/// `min_sep` apart (rejection sampling).
pub fn random_config<R: Rng>(rng: &mut R, n: usize, radius: f64, min_sep: f64) -> PlanarConfig {
    let mut points: Vec<Complex64> = Vec::with_capacity(n);
    while points.len() < n {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = TAU * rng.random::<f64>();
        let z = Complex64::from_polar(r, theta);
        if points.iter().all(|p| (p - z).norm() >= min_sep) {
            points.push(z);
        }
    }
    PlanarConfig::electrons(points)
}

/// Equilibrium radius of the regular `N`-gon: `R^2 = 2 n (N - 1) l_B^2`.
pub fn polygon_radius(params: &LaughlinParams) -> f64 {
    params.l_b * (2.0 * params.n_exp as f64 * (params.n as f64 - 1.0)).sqrt()
}

/// Regular `N`-gon at the equilibrium radius, first vertex on the positive
/// real axis.
pub fn polygon_equilibrium(params: &LaughlinParams) -> PlanarConfig {
    let r = polygon_radius(params);
    let n = params.n;
    PlanarConfig::electrons((0..n).map(|k| Complex64::from_polar(r, TAU * k as f64 / n as f64)).collect())
}

/// `2 l_B sqrt(n) h_k` with `h_k` the Hermite zeros.
pub fn collinear_equilibrium(params: &LaughlinParams) -> Result<PlanarConfig, LaughlinError> {
    let zs = orthopoly::zeros(&PolynomialSpec::hermite(params.n))
        .map_err(|e| LaughlinError::Parameter(e.to_string()))?;
    let c = 2.0 * params.l_b * (params.n_exp as f64).sqrt();
    Ok(PlanarConfig::electrons(zs.zeros.iter().map(|&h| Complex64::new(c * h, 0.0)).collect()))
}

/// Each point displaced by up to `fraction` of its nearest-neighbour
/// distance in a uniformly random direction.
pub fn perturb<R: Rng>(rng: &mut R, cfg: &PlanarConfig, fraction: f64) -> PlanarConfig {
    let p = &cfg.points;
    let points = p
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let nearest = p
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, w)| (z - w).norm())
                .fold(f64::INFINITY, f64::min);
            let scale = if nearest.is_finite() { nearest } else { z.norm().max(1.0) };
            let r = fraction * scale * rng.random::<f64>();
            z + Complex64::from_polar(r, TAU * rng.random::<f64>())
        })
        .collect();
    PlanarConfig { points, role: cfg.role }
}

/// Rotates about the origin so that point `anchor` lies on the positive real
/// axis.
pub fn gauge_fix(points: &[Complex64], anchor: usize) -> Vec<Complex64> {
    let a = points[anchor];
    if a.norm() == 0.0 {
        return points.to_vec();
    }
    let phase = a.conj() / a.norm();
    points.iter().map(|z| z * phase).collect()
}

/// Max pointwise distance after gauge-fixing both configurations on the
/// point of `reference` farthest from the origin.
pub fn gauge_fixed_deviation(found: &[Complex64], reference: &[Complex64]) -> f64 {
    assert_eq!(found.len(), reference.len());
    if reference.is_empty() {
        return 0.0;
    }
    let anchor = (0..reference.len())
        .max_by(|&a, &b| reference[a].norm().total_cmp(&reference[b].norm()))
        .expect("non-empty");
    let (f, r) = (gauge_fix(found, anchor), gauge_fix(reference, anchor));
    f.iter().zip(&r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarReport {
    pub iterations: usize,
    pub converged: bool,
    /// `max_j |dL/dz_j|` at the returned configuration.
    pub residual_max: f64,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarSolution {
    pub config: PlanarConfig,
    pub report: PlanarReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarOptions {
    pub max_iterations: usize,
    pub min_step: f64,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            min_step: 1e-10,
        }
    }
}

fn residual_vector(params: &LaughlinParams, z: &[Complex64]) -> DVector<f64> {
    let mut f = DVector::zeros(2 * z.len());
    for j in 0..z.len() {
        let r = wirtinger_unchecked(params, z, j);
        f[2 * j] = r.re;
        f[2 * j + 1] = r.im;
    }
    f
}

/// Real `2N x 2N` Jacobian of `(Re F_j, Im F_j)` in `(x_k, y_k)`.
fn real_jacobian(params: &LaughlinParams, z: &[Complex64]) -> DMatrix<f64> {
    let n = z.len();
    let g = params.gaussian();
    let s = params.n_exp as f64;
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        let mut diag = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k == j {
                continue;
            }
            // Holomorphic part: dF_j/dz_k = n/(z_j - z_k)^2.
            let d = s / (z[j] - z[k]).powi(2);
            diag -= d;
            set_block(&mut jac, j, k, d, d * I);
        }
        set_block(&mut jac, j, j, diag - g, (diag + g) * I);
    }
    jac
}

fn set_block(jac: &mut DMatrix<f64>, j: usize, k: usize, dx: Complex64, dy: Complex64) {
    jac[(2 * j, 2 * k)] = dx.re;
    jac[(2 * j + 1, 2 * k)] = dx.im;
    jac[(2 * j, 2 * k + 1)] = dy.re;
    jac[(2 * j + 1, 2 * k + 1)] = dy.im;
}

fn max_component(f: &DVector<f64>) -> f64 {
    (0..f.len() / 2).map(|j| f[2 * j].hypot(f[2 * j + 1])).fold(0.0, f64::max)
}

pub fn solve_planar_equilibrium(
    params: &LaughlinParams,
    init: &PlanarConfig,
    tol: f64,
) -> Result<PlanarSolution, LaughlinError> {
    solve_planar_equilibrium_with(params, init, tol, &PlanarOptions::default())
}

/// Damped Newton in the `2N` real coordinates. The global rotation leaves
/// the residual orbit invariant, so each step is the minimum-norm
/// least-squares solution (SVD) of the rank-deficient linear system.
pub fn solve_planar_equilibrium_with(
    params: &LaughlinParams,
    init: &PlanarConfig,
    tol: f64,
    opts: &PlanarOptions,
) -> Result<PlanarSolution, LaughlinError> {
    init.check(params)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LaughlinError::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut z = init.points.clone();
    let mut f = residual_vector(params, &z);
    let mut phi = f.norm_squared();
    let mut history = vec![max_component(&f)];
    let mut iterations = 0;

    while max_component(&f) >= tol && iterations < opts.max_iterations {
        let jac = real_jacobian(params, &z);
        let svd = jac.svd(true, true);
        let cutoff = 1e-10 * svd.singular_values.max();
        let step = match svd.solve(&(-&f), cutoff) {
            Ok(s) => s,
            Err(_) => break,
        };
        let sep = min_separation(&z);
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= opts.min_step {
            let trial: Vec<Complex64> = z
                .iter()
                .enumerate()
                .map(|(k, w)| w + lambda * Complex64::new(step[2 * k], step[2 * k + 1]))
                .collect();
            if min_separation(&trial) > 0.1 * sep {
                let ft = residual_vector(params, &trial);
                let pt = ft.norm_squared();
                if pt.is_finite() && pt <= (1.0 - 1e-4 * lambda) * phi {
                    accepted = Some((trial, ft, pt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, ft, pt)) = accepted else { break };
        z = trial;
        f = ft;
        phi = pt;
        iterations += 1;
        history.push(max_component(&f));
    }

    let residual_max = max_component(&f);
    Ok(PlanarSolution {
        config: PlanarConfig { points: z, role: init.role },
        report: PlanarReport {
            iterations,
            converged: residual_max < tol,
            residual_max,
            history,
        },
    })
}

/// Residual 2-norm at `e^{i theta} cfg` for `count` equally spaced angles.
pub fn rotation_orbit_norms(params: &LaughlinParams, cfg: &PlanarConfig, count: usize) -> Result<Vec<f64>, LaughlinError> {
    cfg.check(params)?;
    Ok((0..count)
        .map(|a| {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * a as f64 / count as f64);
            let z: Vec<Complex64> = cfg.points.iter().map(|w| w * phase).collect();
            residual_vector(params, &z).norm()
        })
        .collect())
}
