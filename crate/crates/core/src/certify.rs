//! End-to-end acceptance criteria A1-A8.
//!
//! Every criterion is deterministic given the seed; reports carry measured
//! values and bounds but no timings, so two runs serialize to identical
//! bytes.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::landau::{self, ClusterOptions, Discretization, EigenOptions, MagneticGrid};
use crate::laughlin::{self, LaughlinParams, PlanarConfig};
use crate::orthopoly;
use crate::stieltjes::{self, Init, SolverOptions};
use crate::superpotential::Superpotential;
use crate::susy::{self, GridSpec};
use crate::vortex::{self, VortexState};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::A1,
        CriterionId::A2,
        CriterionId::A3,
        CriterionId::A4,
        CriterionId::A5,
        CriterionId::A6,
        CriterionId::A7,
        CriterionId::A8,
    ];

    pub fn title(self) -> &'static str {
        match self {
            CriterionId::A1 => "Stieltjes equilibria equal classical zeros",
            CriterionId::A2 => "two-vortex closed form",
            CriterionId::A3 => "moment laws",
            CriterionId::A4 => "SUSY partner degeneracy",
            CriterionId::A5 => "Laughlin derivative identity",
            CriterionId::A6 => "planar equilibria",
            CriterionId::A7 => "Landau clustering",
            CriterionId::A8 => "determinism",
        }
    }

    /// Wall-clock budget in seconds; A8 has none.
    pub fn runtime_budget(self) -> Option<f64> {
        match self {
            CriterionId::A1 => Some(30.0),
            CriterionId::A2 => Some(1.0),
            CriterionId::A3 => Some(10.0),
            CriterionId::A4 => Some(5.0),
            CriterionId::A5 => Some(2.0),
            CriterionId::A6 => Some(10.0),
            CriterionId::A7 => Some(60.0),
            CriterionId::A8 => None,
        }
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub criteria: Vec<CriterionId>,
    pub seed: u64,
    /// Replaces the numeric tolerances of a criterion.
    pub tolerances: BTreeMap<CriterionId, f64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            criteria: CriterionId::ALL.to_vec(),
            seed: DEFAULT_SEED,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Bound {
    Below(f64),
    AtLeast(f64),
    /// Recorded, not gated.
    Reported,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    /// `None` when the quantity could not be measured.
    pub value: Option<f64>,
    pub bound: Bound,
    pub passed: bool,
}

impl Measurement {
    fn new(name: &str, value: Option<f64>, bound: Bound) -> Self {
        let passed = match (bound, value) {
            (Bound::Reported, _) => true,
            (_, None) => false,
            (Bound::Below(b), Some(v)) => v < b,
            (Bound::AtLeast(b), Some(v)) => v >= b,
        };
        Self {
            name: name.into(),
            value: value.filter(|v| v.is_finite()),
            bound,
            passed: passed && value.is_none_or(|v| !v.is_nan()),
        }
    }

    fn below(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, Some(value), Bound::Below(bound))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: CriterionId,
    pub title: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn new(id: CriterionId, measurements: Vec<Measurement>, notes: Vec<String>) -> Self {
        Self {
            id,
            title: id.title().into(),
            passed: measurements.iter().all(|m| m.passed),
            measurements,
            notes,
        }
    }

    /// One-line `PASS`/`FAIL` summary.
    pub fn summary_line(&self) -> String {
        let items: Vec<String> = self
            .measurements
            .iter()
            .map(|m| {
                let v = m.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
                match m.bound {
                    Bound::Below(b) => format!("{}={v} (<{b:e})", m.name),
                    Bound::AtLeast(b) => format!("{}={v} (>={b})", m.name),
                    Bound::Reported => format!("{}={v}", m.name),
                }
            })
            .collect();
        format!(
            "{} {} [{}] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            items.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Runs one criterion other than A8.
pub fn run_criterion(id: CriterionId, cfg: &CertifyConfig) -> CriterionReport {
    let tol = cfg.tolerances.get(&id).copied();
    match id {
        CriterionId::A1 => a1(tol),
        CriterionId::A2 => a2(tol),
        CriterionId::A3 => a3(tol),
        CriterionId::A4 => a4(tol),
        CriterionId::A5 => a5(tol, cfg.seed),
        CriterionId::A6 => a6(tol, cfg.seed),
        CriterionId::A7 => a7(tol),
        CriterionId::A8 => determinism(&[], cfg),
    }
}

/// Runs the selected criteria on `jobs` threads; results keep the input
/// order. A8 reruns the other selected criteria single-threaded and
/// compares the serialized reports byte for byte.
pub fn certify_all(cfg: &CertifyConfig, jobs: usize) -> CertifyReport {
    let mut ids: Vec<CriterionId> = cfg.criteria.clone();
    ids.sort();
    ids.dedup();
    let main: Vec<CriterionId> = ids.iter().copied().filter(|&i| i != CriterionId::A8).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let mut reports: Vec<CriterionReport> =
        pool.install(|| main.par_iter().map(|&id| run_criterion(id, cfg)).collect());
    if ids.contains(&CriterionId::A8) {
        reports.push(determinism(&reports, cfg));
    }
    CertifyReport {
        seed: cfg.seed,
        passed: reports.iter().all(|r| r.passed),
        criteria: reports,
    }
}

/// A8 given the first-pass reports of the other criteria.
pub fn determinism(first: &[CriterionReport], cfg: &CertifyConfig) -> CriterionReport {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let second: Vec<CriterionReport> = pool.install(|| first.iter().map(|r| run_criterion(r.id, cfg)).collect());
    let a = serde_json::to_vec(first).expect("serializable");
    let b = serde_json::to_vec(&second).expect("serializable");
    let differing = first.iter().zip(&second).filter(|(x, y)| x != y).count();
    CriterionReport::new(
        CriterionId::A8,
        vec![
            Measurement::new("compared_criteria", Some(first.len() as f64), Bound::Reported),
            Measurement::below("differing_criteria", differing as f64, 1.0),
            Measurement::below("byte_mismatch", if a == b { 0.0 } else { 1.0 }, 1.0),
        ],
        Vec::new(),
    )
}

fn a1_families() -> Vec<Superpotential> {
    let mut ws = vec![Superpotential::Harmonic];
    ws.extend((0..3).map(|l| Superpotential::Coulomb { l }));
    for p in [1.0, 1.5, 2.0] {
        for q in [1.0, 1.5, 2.0] {
            ws.push(Superpotential::jacobi(p, q).expect("positive charges"));
        }
    }
    ws
}

fn a1(tol: Option<f64>) -> CriterionReport {
    let bound = tol.unwrap_or(1e-9);
    let opts = SolverOptions::default();
    let (mut residual, mut deviation, mut failures) = (0.0f64, 0.0f64, 0usize);
    let mut notes = Vec::new();
    for w in a1_families() {
        for n in 1..=50 {
            let zeros = stieltjes::oracle_mapping(&w, n)
                .ok()
                .and_then(|spec| orthopoly::zeros(&spec).ok())
                .map(|z| z.zeros);
            let Some(zeros) = zeros else {
                failures += 1;
                notes.push(format!("{} n={n}: no oracle zeros", w.name()));
                continue;
            };
            match stieltjes::residual(&zeros, &w) {
                Ok(r) => residual = residual.max(r.iter().fold(0.0, |m: f64, v| m.max(v.abs()))),
                Err(e) => {
                    failures += 1;
                    notes.push(format!("{} n={n}: {e}", w.name()));
                }
            }
            match stieltjes::solve_equilibrium(&w, n, &Init::Auto, &opts) {
                Ok(res) if res.converged => {
                    let dev = res.positions.iter().zip(&zeros).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    deviation = deviation.max(dev);
                }
                Ok(res) => {
                    failures += 1;
                    notes.push(format!("{} n={n}: not converged (residual {:e})", w.name(), res.residual_norm));
                }
                Err(e) => {
                    failures += 1;
                    notes.push(format!("{} n={n}: {e}", w.name()));
                }
            }
        }
    }
    CriterionReport::new(
        CriterionId::A1,
        vec![
            Measurement::below("max_oracle_residual", residual, bound),
            Measurement::below("max_solver_deviation", deviation, bound),
            Measurement::below("failed_runs", failures as f64, 1.0),
        ],
        notes,
    )
}

fn a2(tol: Option<f64>) -> CriterionReport {
    let bound = tol.unwrap_or(1e-8);
    let (gamma, a0) = (-0.5, 1.0);
    let run = || -> Result<f64, vortex::VortexError> {
        let state = VortexState::free(vec![Complex64::new(a0, 0.0), Complex64::new(-a0, 0.0)], gamma)?;
        let traj = vortex::evolve(&state, 1.0, 1e-10)?;
        Ok(traj
            .samples
            .iter()
            .map(|s| {
                let exact = (Complex64::new(a0 * a0, 0.0) + 2.0 * Complex64::i() * gamma * s.t).sqrt();
                (s.positions[0] - exact).norm().max((s.positions[1] + exact).norm())
            })
            .fold(0.0, f64::max))
    };
    let (value, notes) = match run() {
        Ok(v) => (Some(v), Vec::new()),
        Err(e) => (None, vec![e.to_string()]),
    };
    CriterionReport::new(
        CriterionId::A2,
        vec![Measurement::new("max_error", value, Bound::Below(bound))],
        notes,
    )
}

/// Collision-free starting configuration with `n` vortices.
fn a3_initial(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let r = 1.5 + 0.25 * (1.7 * k as f64).sin();
            let theta = TAU * k as f64 / n as f64 + 0.3 * (k as f64).cos();
            Complex64::from_polar(r, theta)
        })
        .collect()
}

fn a3(tol: Option<f64>) -> CriterionReport {
    let (b1, b2) = tol.map_or((1e-8, 1e-7), |t| (t, t));
    let gamma = -0.5;
    let (mut m1, mut m2) = (Some(0.0f64), Some(0.0f64));
    let mut notes = Vec::new();
    for n in [3, 5, 8] {
        let res = VortexState::free(a3_initial(n), gamma).and_then(|s| vortex::evolve(&s, 0.5, 1e-10));
        match res {
            Ok(traj) => {
                let rep = vortex::moment_report(&traj, gamma);
                m1 = m1.map(|m| m.max(rep.m1_drift));
                m2 = m2.map(|m| m.max(rep.m2_deviation));
            }
            Err(e) => {
                notes.push(format!("n={n}: {e}"));
                m1 = None;
                m2 = None;
            }
        }
    }
    CriterionReport::new(
        CriterionId::A3,
        vec![
            Measurement::new("max_m1_drift", m1, Bound::Below(b1)),
            Measurement::new("max_m2_deviation", m2, Bound::Below(b2)),
        ],
        notes,
    )
}

fn a4(tol: Option<f64>) -> CriterionReport {
    let (b_mis, b_ground, b_slope) = tol.map_or((1e-3, 1e-4, 0.2), |t| (t, t, t));
    let w = Superpotential::Harmonic;
    let grid = GridSpec::new(-8.0, 8.0, 2048).expect("valid grid");
    let mut notes = Vec::new();
    let (mismatch, ground) = match susy::degeneracy_check(&w, 0.0, &grid, 4) {
        Ok(rep) => (rep.max_mismatch, rep.ground_energy().map(f64::abs)),
        Err(e) => {
            notes.push(e.to_string());
            (None, None)
        }
    };
    let order = match susy::annihilation_order(&w, &grid) {
        Ok(o) => Some(o),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    CriterionReport::new(
        CriterionId::A4,
        vec![
            Measurement::new("max_partner_mismatch", mismatch, Bound::Below(b_mis)),
            Measurement::new("abs_ground_energy", ground, Bound::Below(b_ground)),
            Measurement::new("annihilation_slope", order.map(|o| o.slope), Bound::Reported),
            Measurement::new("slope_deviation_from_2", order.map(|o| (o.slope - 2.0).abs()), Bound::Below(b_slope)),
        ],
        notes,
    )
}

fn a5(tol: Option<f64>, seed: u64) -> CriterionReport {
    let bound = tol.unwrap_or(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut res_err, mut berry_err) = (0.0f64, 0.0f64);
    let mut notes = Vec::new();
    for _ in 0..20 {
        let n = rng.random_range(1..=8usize);
        let n_exp = [1, 3, 5][rng.random_range(0..3usize)];
        let l_b = rng.random_range(0.5..2.0);
        let params = LaughlinParams::new(n, n_exp, l_b).expect("valid parameters");
        let cfg = laughlin::random_config(&mut rng, n, 3.0, 0.5);
        let qh = PlanarConfig::quasiholes(cfg.points.clone());
        let check = || -> Result<(f64, f64), laughlin::LaughlinError> {
            let analytic = laughlin::stationary_residual(&params, &cfg)?;
            let (mut r, mut b) = (0.0f64, 0.0f64);
            for (j, a) in analytic.iter().enumerate() {
                r = r.max((a - laughlin::numerical_derivative(&params, &cfg, j, 2e-4)?).norm());
                let exact = laughlin::berry_connection(&params, &qh, j)?;
                b = b.max((exact - laughlin::numerical_berry_connection(&params, &qh, j, 2e-4)?).norm());
            }
            Ok((r, b))
        };
        match check() {
            Ok((r, b)) => {
                res_err = res_err.max(r);
                berry_err = berry_err.max(b);
            }
            Err(e) => {
                notes.push(e.to_string());
                res_err = f64::NAN;
            }
        }
    }
    CriterionReport::new(
        CriterionId::A5,
        vec![
            Measurement::new("max_residual_vs_numerical", Some(res_err), Bound::Below(bound)),
            Measurement::new("max_berry_vs_numerical", Some(berry_err), Bound::Below(bound)),
        ],
        notes,
    )
}

fn a6(tol: Option<f64>, seed: u64) -> CriterionReport {
    let (b_radius, b_line, b_recover) = tol.map_or((1e-10, 1e-9, 1e-8), |t| (t, t, t));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();
    let (mut radius_err, mut poly_res, mut line_res) = (0.0f64, 0.0f64, 0.0f64);
    let (mut poly_dev, mut line_dev, mut failures) = (0.0f64, 0.0f64, 0usize);
    let newton_tol = 1e-12;

    for n_exp in [1, 3] {
        for n in 2..=12 {
            let p = LaughlinParams::new(n, n_exp, 1.0).expect("valid parameters");
            let poly = laughlin::polygon_equilibrium(&p);
            if let Ok(r) = laughlin::stationary_residual(&p, &poly) {
                poly_res = poly_res.max(r.iter().fold(0.0, |m: f64, z| m.max(z.norm())));
            }
            let start = laughlin::perturb(&mut rng, &poly, 0.05);
            match laughlin::solve_planar_equilibrium(&p, &start, newton_tol) {
                Ok(sol) if sol.report.converged => {
                    let pts = &sol.config.points;
                    let r2 = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
                    let law = 2.0 * (n as f64 - 1.0);
                    radius_err = radius_err.max((r2 / (p.magnetic_length().powi(2) * n_exp as f64) - law).abs());
                    let dev = laughlin::gauge_fixed_deviation(pts, &poly.points);
                    if dev >= b_recover {
                        notes.push(format!(
                            "polygon N={n} n={n_exp}: gauge-fixed deviation {dev:e} after {} iterations",
                            sol.report.iterations
                        ));
                    }
                    poly_dev = poly_dev.max(dev);
                }
                Ok(sol) => {
                    failures += 1;
                    notes.push(format!("polygon N={n} n={n_exp}: residual {:e}", sol.report.residual_max));
                }
                Err(e) => {
                    failures += 1;
                    notes.push(format!("polygon N={n} n={n_exp}: {e}"));
                }
            }
        }
    }
    for n in 1..=20 {
        let p = LaughlinParams::new(n, 3, 1.0).expect("valid parameters");
        let Ok(line) = laughlin::collinear_equilibrium(&p) else {
            failures += 1;
            continue;
        };
        if let Ok(r) = laughlin::stationary_residual(&p, &line) {
            line_res = line_res.max(r.iter().fold(0.0, |m: f64, z| m.max(z.norm())));
        }
        if n < 2 {
            continue;
        }
        let start = laughlin::perturb(&mut rng, &line, 0.05);
        match laughlin::solve_planar_equilibrium(&p, &start, newton_tol) {
            Ok(sol) if sol.report.converged => {
                let dev = laughlin::gauge_fixed_deviation(&sol.config.points, &line.points);
                if dev >= b_recover {
                    notes.push(format!("collinear N={n}: gauge-fixed deviation {dev:e}"));
                }
                line_dev = line_dev.max(dev);
            }
            Ok(sol) => {
                failures += 1;
                notes.push(format!("collinear N={n}: residual {:e}", sol.report.residual_max));
            }
            Err(e) => {
                failures += 1;
                notes.push(format!("collinear N={n}: {e}"));
            }
        }
    }
    CriterionReport::new(
        CriterionId::A6,
        vec![
            Measurement::below("max_radius_law_error", radius_err, b_radius),
            Measurement::below("max_polygon_residual", poly_res, b_radius),
            Measurement::below("max_collinear_residual", line_res, b_line),
            Measurement::below("max_polygon_recovery_deviation", poly_dev, b_recover),
            Measurement::below("max_collinear_recovery_deviation", line_dev, b_recover),
            Measurement::below("failed_newton_runs", failures as f64, 1.0),
        ],
        notes,
    )
}

/// Clusters with fewer members are edge states between levels.
pub const FLAT_CLUSTER_MIN_MULTIPLICITY: usize = 3;

fn a7(tol: Option<f64>) -> CriterionReport {
    let (b_gap, b_dirichlet) = tol.map_or((0.05, 0.01), |t| (t, t));
    let eigen = EigenOptions::default();
    let clusters = ClusterOptions::default();
    let mut notes = Vec::new();
    let mut measurements = Vec::new();

    let grid = MagneticGrid::new(8.0, 96, 1.0).expect("valid grid");
    match landau::compute_spectrum(&grid, Discretization::Peierls, 20, &eigen, &clusters) {
        Ok(res) => {
            let flat = landau::flat_clusters(&res.clusters, FLAT_CLUSTER_MIN_MULTIPLICITY);
            let law = landau::gap_law(&flat, 3, grid.field);
            let worst_residual = res.eigen.residuals.iter().copied().fold(0.0, f64::max);
            measurements.push(Measurement::below("eigen_max_residual", worst_residual, eigen.tol * (1.0 + 1e-12)));
            measurements.push(Measurement::new("lowest_eigenvalue", res.eigen.values.first().copied(), Bound::Reported));
            measurements.push(Measurement::new("flat_cluster_count", Some(flat.len() as f64), Bound::AtLeast(2.0)));
            measurements.push(Measurement::new(
                "lowest_level_degeneracy_estimate",
                Some(landau::lowest_level_degeneracy(&grid)),
                Bound::Reported,
            ));
            measurements.push(Measurement::new("gap_law_max_relative_error", law.max_relative_error, Bound::Below(b_gap)));
            measurements.push(Measurement::new("spacing_over_field", law.spacing_over_field, Bound::Reported));
            for c in &res.clusters {
                notes.push(format!("cluster center {:.10} multiplicity {}", c.center, c.multiplicity));
            }
        }
        Err(e) => {
            notes.push(format!("B=1: {e}"));
            measurements.push(Measurement::new("flat_cluster_count", None, Bound::AtLeast(2.0)));
        }
    }

    let zero = MagneticGrid::new(8.0, 96, 0.0).expect("valid grid");
    let exact = landau::dirichlet_laplacian_eigenvalues(zero.half_width, 20);
    let dirichlet = landau::compute_spectrum(&zero, Discretization::Peierls, 20, &eigen, &clusters)
        .map(|res| {
            res.eigen
                .values
                .iter()
                .zip(&exact)
                .map(|(a, b)| ((a - b) / b).abs())
                .fold(0.0, f64::max)
        })
        .map_err(|e| notes.push(format!("B=0: {e}")))
        .ok();
    measurements.push(Measurement::new("zero_field_max_relative_error", dirichlet, Bound::Below(b_dirichlet)));
    CriterionReport::new(CriterionId::A7, measurements, notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurement_bounds() {
        assert!(Measurement::below("x", 0.5, 1.0).passed);
        assert!(!Measurement::below("x", 1.0, 1.0).passed);
        assert!(!Measurement::new("x", None, Bound::Below(1.0)).passed);
        assert!(Measurement::new("x", None, Bound::Reported).passed);
        assert!(!Measurement::new("x", Some(f64::NAN), Bound::Below(1.0)).passed);
        assert!(Measurement::new("x", Some(2.0), Bound::AtLeast(2.0)).passed);
    }

    #[test]
    fn config_is_strict() {
        let cfg: CertifyConfig = serde_json::from_str(r#"{"criteria":["A2"],"tolerances":{"A2":1e-15}}"#).unwrap();
        assert_eq!(cfg.criteria, vec![CriterionId::A2]);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert!(serde_json::from_str::<CertifyConfig>(r#"{"criterion":["A2"]}"#).is_err());
        assert!(serde_json::from_str::<CertifyConfig>(r#"{"criteria":["A9"]}"#).is_err());
    }

    #[test]
    fn empty_selection_passes_vacuously() {
        let cfg = CertifyConfig {
            criteria: Vec::new(),
            ..CertifyConfig::default()
        };
        let rep = certify_all(&cfg, 1);
        assert!(rep.passed && rep.criteria.is_empty());
    }

    #[test]
    fn tightened_tolerance_fails_with_value() {
        let mut cfg = CertifyConfig {
            criteria: vec![CriterionId::A2],
            ..CertifyConfig::default()
        };
        cfg.tolerances.insert(CriterionId::A2, 1e-15);
        let rep = certify_all(&cfg, 1);
        assert!(!rep.passed);
        let m = &rep.criteria[0].measurements[0];
        assert!(m.value.unwrap() > 0.0 && !m.passed);
    }
}
