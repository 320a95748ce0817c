//! Zeros of polynomial solutions of the free Schrödinger equation
//! `i psi_t = Gamma psi_xx` move as point vortices:
//!
//! ```text
//! dx_i/dt = 2 i Gamma sum_{j != i} 1/(x_i - x_j)  [+ background]
//! ```
//!
//! Integration uses the Dormand-Prince 5(4) pair with PI step control, or a
//! fixed-step RK4 for reproducibility runs. Encounters closer than the
//! collision epsilon halt the run with a report.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::superpotential::Superpotential;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum VortexError {
    #[error("vortices {i} and {j} coincide (singular configuration)")]
    Singular { i: usize, j: usize },
    #[error("collision at t = {t}: vortices {i} and {j} within {distance:e}")]
    Collision {
        t: f64,
        i: usize,
        j: usize,
        distance: f64,
        /// Trajectory up to the last accepted step.
        trajectory: Box<TrajectoryRecord>,
    },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
    #[error("background superpotential {0} has no complex continuation")]
    RealOnlyBackground(String),
    #[error("invalid input: {0}")]
    Input(String),
}

#[derive(Debug, Clone)]
pub enum BackgroundFlow {
    None,
    /// Adds `-i Omega conj(z_i)`.
    ConjugateLinear { omega: f64 },
    /// Adds `i W(x_i)` with `W` continued to complex arguments.
    Custom(Superpotential),
}

#[derive(Debug, Clone)]
pub struct VortexState {
    positions: Vec<Complex64>,
    gamma: f64,
    background: BackgroundFlow,
    // +1 forward, -1 for the time-reversed field.
    orientation: f64,
}

impl VortexState {
    pub fn new(positions: Vec<Complex64>, gamma: f64, background: BackgroundFlow) -> Result<Self, VortexError> {
        if positions.is_empty() {
            return Err(VortexError::Input("at least one vortex is required".into()));
        }
        if !gamma.is_finite() || positions.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VortexError::Input("non-finite position or circulation".into()));
        }
        if let BackgroundFlow::Custom(w @ Superpotential::Custom(c)) = &background {
            if !c.has_complex() {
                return Err(VortexError::RealOnlyBackground(w.name()));
            }
        }
        if let Some((i, j)) = first_coincident(&positions) {
            return Err(VortexError::Singular { i, j });
        }
        Ok(Self {
            positions,
            gamma,
            background,
            orientation: 1.0,
        })
    }

    pub fn free(positions: Vec<Complex64>, gamma: f64) -> Result<Self, VortexError> {
        Self::new(positions, gamma, BackgroundFlow::None)
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn background(&self) -> &BackgroundFlow {
        &self.background
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Same configuration with the velocity field negated.
    pub fn time_reversed(&self) -> Self {
        Self {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    pub fn with_positions(&self, positions: Vec<Complex64>) -> Result<Self, VortexError> {
        let mut s = Self::new(positions, self.gamma, self.background.clone())?;
        s.orientation = self.orientation;
        Ok(s)
    }
}

fn first_coincident(z: &[Complex64]) -> Option<(usize, usize)> {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if z[i] == z[j] {
                return Some((i, j));
            }
        }
    }
    None
}

fn min_pair_distance(z: &[Complex64]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

fn field_into(state: &VortexState, z: &[Complex64], out: &mut [Complex64]) -> Result<(), VortexError> {
    let coeff = 2.0 * state.gamma * I;
    for i in 0..z.len() {
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..z.len() {
            if j != i {
                let d = z[i] - z[j];
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(VortexError::Singular { i: i.min(j), j: i.max(j) });
                }
                sum += d.inv();
            }
        }
        let mut v = coeff * sum;
        match &state.background {
            BackgroundFlow::None => {}
            BackgroundFlow::ConjugateLinear { omega } => v -= I * *omega * z[i].conj(),
            BackgroundFlow::Custom(w) => {
                let wz = w
                    .value_complex(z[i])
                    .ok_or_else(|| VortexError::RealOnlyBackground(w.name()))?;
                v += I * wz;
            }
        }
        out[i] = state.orientation * v;
    }
    Ok(())
}

/// Velocity of every vortex in `state`.
pub fn velocity_field(state: &VortexState) -> Result<Vec<Complex64>, VortexError> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    field_into(state, &state.positions, &mut out)?;
    Ok(out)
}

/// `prod_k (x - x_k)`, accumulated left to right.
pub fn polynomial_from_zeros(positions: &[Complex64], x: Complex64) -> Complex64 {
    positions.iter().fold(Complex64::new(1.0, 0.0), |acc, &xk| acc * (x - xk))
}

#[derive(Debug, Clone, Serialize)]
pub struct Sample {
    pub t: f64,
    pub positions: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    /// Initial state followed by every accepted step.
    pub samples: Vec<Sample>,
    pub step_sizes: Vec<f64>,
    pub rejected_steps: usize,
    pub min_distance: f64,
}

impl TrajectoryRecord {
    fn start(z: &[Complex64]) -> Self {
        Self {
            samples: vec![Sample {
                t: 0.0,
                positions: z.to_vec(),
            }],
            step_sizes: Vec::new(),
            rejected_steps: 0,
            min_distance: min_pair_distance(z).0,
        }
    }

    fn push(&mut self, t: f64, h: f64, z: &[Complex64]) {
        self.samples.push(Sample {
            t,
            positions: z.to_vec(),
        });
        self.step_sizes.push(h);
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive Dormand-Prince 5(4).
    DormandPrince,
    /// Classical RK4 with the given number of equal steps.
    FixedRk4 { steps: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Bound on the max-abs local error per step (adaptive method).
    pub tol: f64,
    pub collision_epsilon: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl IntegratorOptions {
    pub fn adaptive(tol: f64) -> Self {
        Self {
            tol,
            collision_epsilon: 1e-8,
            max_steps: 1_000_000,
            method: Method::DormandPrince,
        }
    }

    pub fn fixed_rk4(steps: usize) -> Self {
        Self {
            method: Method::FixedRk4 { steps },
            ..Self::adaptive(1e-10)
        }
    }
}

/// Adaptive integration of the vortex field up to `t_final` with local error
/// per step at most `tol`.
pub fn evolve(state: &VortexState, t_final: f64, tol: f64) -> Result<TrajectoryRecord, VortexError> {
    evolve_with(state, t_final, &IntegratorOptions::adaptive(tol))
}

pub fn evolve_with(
    state: &VortexState,
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<TrajectoryRecord, VortexError> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(VortexError::Input(format!("t_final must be positive, got {t_final}")));
    }
    if !(opts.tol > 0.0) || !(opts.collision_epsilon >= 0.0) {
        return Err(VortexError::Input("tol must be positive and epsilon non-negative".into()));
    }
    match opts.method {
        Method::DormandPrince => dopri(state, t_final, opts),
        Method::FixedRk4 { steps } => rk4(state, t_final, steps, opts),
    }
}

fn check_collision(
    traj: &TrajectoryRecord,
    t: f64,
    z: &[Complex64],
    eps: f64,
) -> Result<f64, VortexError> {
    let (d, i, j) = min_pair_distance(z);
    if d < eps {
        return Err(VortexError::Collision {
            t,
            i,
            j,
            distance: d,
            trajectory: Box::new(traj.clone()),
        });
    }
    Ok(d)
}

fn axpy(out: &mut [Complex64], base: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += *c * k[i];
        }
        *o = base[i] + h * acc;
    }
}

fn rk4(state: &VortexState, t_final: f64, steps: usize, opts: &IntegratorOptions) -> Result<TrajectoryRecord, VortexError> {
    if steps == 0 {
        return Err(VortexError::Input("RK4 needs at least one step".into()));
    }
    let n = state.len();
    let zero = Complex64::new(0.0, 0.0);
    let h = t_final / steps as f64;
    let mut z = state.positions.clone();
    let mut traj = TrajectoryRecord::start(&z);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    for s in 0..steps {
        field_into(state, &z, &mut k1)?;
        axpy(&mut tmp, &z, 0.5 * h, &[(1.0, &k1)]);
        field_into(state, &tmp, &mut k2)?;
        axpy(&mut tmp, &z, 0.5 * h, &[(1.0, &k2)]);
        field_into(state, &tmp, &mut k3)?;
        axpy(&mut tmp, &z, h, &[(1.0, &k3)]);
        field_into(state, &tmp, &mut k4)?;
        let next = z.clone();
        axpy(&mut z, &next, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
        let t = if s + 1 == steps { t_final } else { (s + 1) as f64 * h };
        let d = check_collision(&traj, t, &z, opts.collision_epsilon)?;
        traj.min_distance = traj.min_distance.min(d);
        traj.push(t, h, &z);
    }
    Ok(traj)
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// PI controller exponents and safety limits.
const ALPHA: f64 = 0.17;
const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn dopri(state: &VortexState, t_final: f64, opts: &IntegratorOptions) -> Result<TrajectoryRecord, VortexError> {
    let n = state.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut z = state.positions.clone();
    let mut traj = TrajectoryRecord::start(&z);
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![zero; n]);
    let mut stage = vec![zero; n];
    let mut z_new = vec![zero; n];

    field_into(state, &z, &mut k[0])?;
    let vmax = k[0].iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let length = if n > 1 { traj.min_distance } else { 1.0 };
    let mut h = if vmax > 0.0 {
        (0.5 * opts.tol.powf(0.2) * length / vmax).min(t_final)
    } else {
        t_final
    };
    let h_min = 1e-14 * t_final.max(1.0);
    let mut t = 0.0;
    let mut err_old = 1e-4_f64;
    let mut steps = 0;

    while t < t_final {
        if steps >= opts.max_steps {
            return Err(VortexError::MaxSteps {
                t,
                max_steps: opts.max_steps,
            });
        }
        steps += 1;
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }

        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        let mut ok = true;
        for (s, row) in rows.iter().enumerate() {
            {
                let terms: Vec<(f64, &[Complex64])> =
                    row.iter().enumerate().map(|(j, &a)| (a, k[j].as_slice())).collect();
                axpy(&mut stage, &z, h, &terms);
            }
            if let Err(e) = field_into(state, &stage, &mut k[s + 1]) {
                // Stage landed on a singular point; treat as a rejected step.
                if matches!(e, VortexError::Singular { .. }) {
                    ok = false;
                    break;
                }
                return Err(e);
            }
        }
        let err = if ok {
            {
                let terms: Vec<(f64, &[Complex64])> =
                    B[..6].iter().enumerate().map(|(j, &b)| (b, k[j].as_slice())).collect();
                axpy(&mut z_new, &z, h, &terms);
            }
            match field_into(state, &z_new, &mut k[6]) {
                Ok(()) => {
                    let mut e_max = 0.0_f64;
                    for i in 0..n {
                        let mut e = zero;
                        for (j, &ej) in E.iter().enumerate() {
                            e += ej * k[j][i];
                        }
                        e_max = e_max.max((h * e).norm());
                    }
                    e_max / opts.tol
                }
                Err(VortexError::Singular { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            }
        } else {
            f64::INFINITY
        };

        if err <= 1.0 && err.is_finite() {
            t = if last { t_final } else { t + h };
            std::mem::swap(&mut z, &mut z_new);
            let d = if n > 1 {
                check_collision(&traj, t, &z, opts.collision_epsilon)?
            } else {
                f64::INFINITY
            };
            traj.min_distance = traj.min_distance.min(d);
            traj.push(t, h, &z);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);

            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-ALPHA) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
            };
            err_old = err.max(1e-4);
            h *= fac;
        } else {
            traj.rejected_steps += 1;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ALPHA)).clamp(FAC_MIN, 1.0)
            } else {
                FAC_MIN
            };
            h *= fac;
        }
        if h < h_min && t < t_final {
            return Err(VortexError::StepUnderflow { t, h });
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub gamma: f64,
    /// `max_t |M1(t) - M1(0)|` with `M1 = sum x_i`.
    pub m1_drift: f64,
    /// `max_t |M2(t) - M2(0) - 2 i Gamma n (n - 1) t|` with `M2 = sum x_i^2`.
    pub m2_deviation: f64,
    /// Per-sample `(t, M1 drift, M2 law deviation)`.
    pub series: Vec<(f64, f64, f64)>,
}

/// Conserved first moment and exact second-moment law of background-free
/// evolution.
pub fn moment_report(traj: &TrajectoryRecord, gamma: f64) -> MomentReport {
    let first = &traj.samples[0];
    let n = first.positions.len();
    let m1 = |z: &[Complex64]| z.iter().sum::<Complex64>();
    let m2 = |z: &[Complex64]| z.iter().map(|x| x * x).sum::<Complex64>();
    let m1_0 = m1(&first.positions);
    let m2_0 = m2(&first.positions);
    let rate = 2.0 * I * gamma * (n * n.saturating_sub(1)) as f64;
    let series: Vec<(f64, f64, f64)> = traj
        .samples
        .iter()
        .map(|s| {
            let d1 = (m1(&s.positions) - m1_0).norm();
            let d2 = (m2(&s.positions) - m2_0 - rate * s.t).norm();
            (s.t, d1, d2)
        })
        .collect();
    MomentReport {
        n,
        gamma,
        m1_drift: series.iter().fold(0.0, |m, s| m.max(s.1)),
        m2_deviation: series.iter().fold(0.0, |m, s| m.max(s.2)),
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Closed-form pair trajectory `+-sqrt(a0^2 + 2 i Gamma t)`, with the
    /// branch of the right-hand vortex continued from `+a0`.
    fn pair_closed_form(a0: f64, gamma: f64, t: f64) -> Complex64 {
        (c(a0 * a0, 0.0) + 2.0 * I * gamma * t).sqrt()
    }

    #[test]
    fn single_vortex_is_at_rest() {
        let s = VortexState::free(vec![c(0.3, -1.2)], 0.7).unwrap();
        assert_eq!(velocity_field(&s).unwrap(), vec![c(0.0, 0.0)]);
        let traj = evolve(&s, 2.0, 1e-10).unwrap();
        assert!(traj.samples.iter().all(|x| x.positions[0] == c(0.3, -1.2)));
        assert_eq!(traj.last().t, 2.0);
    }

    #[test]
    fn pair_velocity_closed_form() {
        let (a, g) = (1.5, 0.8);
        let s = VortexState::free(vec![c(-a, 0.0), c(a, 0.0)], g).unwrap();
        let v = velocity_field(&s).unwrap();
        assert!((v[0] - c(0.0, -g / a)).norm() < 1e-15);
        assert!((v[1] - c(0.0, g / a)).norm() < 1e-15);
    }

    #[test]
    fn coincident_positions_are_singular() {
        assert!(matches!(
            VortexState::free(vec![c(0.0, 0.0), c(0.0, 0.0)], 1.0),
            Err(VortexError::Singular { i: 0, j: 1 })
        ));
    }

    #[test]
    fn pair_trajectory_matches_closed_form() {
        let (a0, g) = (1.0, -0.5);
        let s = VortexState::free(vec![c(-a0, 0.0), c(a0, 0.0)], g).unwrap();
        let traj = evolve(&s, 1.0, 1e-10).unwrap();
        for sample in &traj.samples {
            let x = pair_closed_form(a0, g, sample.t);
            assert!((sample.positions[1] - x).norm() < 1e-8);
            assert!((sample.positions[0] + x).norm() < 1e-8);
        }
    }

    #[test]
    fn symmetric_triple_keeps_zero_centroid() {
        let s = VortexState::free(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 0.5).unwrap();
        let traj = evolve(&s, 0.5, 1e-10).unwrap();
        for sample in &traj.samples {
            assert!(sample.positions.iter().sum::<Complex64>().norm() < 1e-12);
        }
    }

    #[test]
    fn moment_laws_small_cases() {
        let s = VortexState::free(vec![c(5.0, 0.0)], 1.0).unwrap();
        let r = moment_report(&evolve(&s, 1.0, 1e-10).unwrap(), 1.0);
        assert_eq!(r.m2_deviation, 0.0);

        let s = VortexState::free(vec![c(-1.0, 0.2), c(0.7, -0.1)], -0.5).unwrap();
        let traj = evolve(&s, 1.0, 1e-10).unwrap();
        let r = moment_report(&traj, -0.5);
        assert!(r.m1_drift < 10.0 * 1e-10);
        assert!(r.m2_deviation < 1e-8);
    }

    #[test]
    fn time_reversal_returns_to_start() {
        let start = vec![c(-1.1, 0.3), c(0.2, 0.9), c(1.3, -0.4), c(0.1, -1.2)];
        let s = VortexState::free(start.clone(), 0.5).unwrap();
        let tol = 1e-10;
        let fwd = evolve(&s, 0.4, tol).unwrap();
        let back_state = s.time_reversed().with_positions(fwd.last().positions.clone()).unwrap();
        let back = evolve(&back_state, 0.4, tol).unwrap();
        for (a, b) in back.last().positions.iter().zip(&start) {
            assert!((a - b).norm() < 100.0 * tol, "{a} vs {b}");
        }
    }

    #[test]
    fn rk4_agrees_with_adaptive() {
        let s = VortexState::free(vec![c(-1.0, 0.0), c(1.0, 0.0)], -0.5).unwrap();
        let traj = evolve_with(&s, 1.0, &IntegratorOptions::fixed_rk4(400)).unwrap();
        assert_eq!(traj.samples.len(), 401);
        let x = pair_closed_form(1.0, -0.5, 1.0);
        assert!((traj.last().positions[1] - x).norm() < 1e-9);
    }

    #[test]
    fn collision_halts_with_report() {
        // A free pair never meets (a^2 = a0^2 + 2 i Gamma t has no zero for
        // real Gamma), so use a contracting background: i W(z) = -z.
        let w = Superpotential::Custom(
            crate::superpotential::CustomSuperpotential::new(
                "contracting",
                crate::superpotential::Domain::REAL_LINE,
                |_| 0.0,
                |_| 0.0,
            )
            .with_complex(|z| I * z),
        );
        let s = VortexState::new(vec![c(-0.5, 0.0), c(0.5, 0.0)], 0.0, BackgroundFlow::Custom(w)).unwrap();
        let opts = IntegratorOptions {
            collision_epsilon: 1e-3,
            ..IntegratorOptions::adaptive(1e-10)
        };
        match evolve_with(&s, 20.0, &opts) {
            Err(VortexError::Collision { i, j, trajectory, .. }) => {
                assert_eq!((i, j), (0, 1));
                assert!(trajectory.samples.len() > 1);
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_linear_background_term() {
        let s = VortexState::new(vec![c(1.0, 2.0)], 1.0, BackgroundFlow::ConjugateLinear { omega: 0.5 }).unwrap();
        let v = velocity_field(&s).unwrap();
        assert!((v[0] - (-I * 0.5 * c(1.0, -2.0))).norm() < 1e-15);
    }

    #[test]
    fn harmonic_background_adds_i_w() {
        let s = VortexState::new(vec![c(0.5, 0.0)], 1.0, BackgroundFlow::Custom(Superpotential::Harmonic)).unwrap();
        let v = velocity_field(&s).unwrap();
        assert!((v[0] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_from_zeros_examples() {
        assert_eq!(polynomial_from_zeros(&[], c(3.0, 1.0)), c(1.0, 0.0));
        assert_eq!(polynomial_from_zeros(&[c(1.0, 0.0), c(-1.0, 0.0)], c(0.0, 0.0)), c(-1.0, 0.0));
        // Monic H_3 / 8 = x^3 - 3x/2; zeros of H_3 are 0, +-sqrt(3/2).
        let r = 1.5_f64.sqrt();
        let zs = [c(-r, 0.0), c(0.0, 0.0), c(r, 0.0)];
        let v = polynomial_from_zeros(&zs, c(2.0, 0.0));
        assert!((v - c(8.0 - 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bad_inputs() {
        assert!(VortexState::free(vec![], 1.0).is_err());
        let s = VortexState::free(vec![c(0.0, 0.0)], 1.0).unwrap();
        assert!(evolve(&s, 0.0, 1e-8).is_err());
        assert!(evolve(&s, 1.0, 0.0).is_err());
    }
}
