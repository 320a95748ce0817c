use std::collections::BTreeMap;

use kirchhoff::certify::{self, Bound, CertifyConfig, CriterionId};
use kirchhoff::landau::{self, ClusterOptions, Discretization, EigenOptions, MagneticGrid};
use kirchhoff::laughlin::{self, LaughlinParams};
use kirchhoff::orthopoly::{self, PolynomialSpec};
use kirchhoff::stieltjes::{self, Init, SolverOptions};
use kirchhoff::superpotential::{Superpotential, SuperpotentialConfig};
use kirchhoff::susy::{self, GridSpec};
use kirchhoff::vortex::{self, BackgroundFlow, TrajectoryRecord, VortexError, VortexState};
use kirchhoff::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{self, Overrides, RunConfig};
use crate::output::{self, num, opt, Table};
use crate::{CliError, DiscretizationArg, FamilyArg, ShapeArg, WArg, WArgs};

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn apply_w(cfg: &mut SuperpotentialConfig, args: &WArgs) -> Result<(), CliError> {
    if let Some(kind) = args.w {
        *cfg = match kind {
            WArg::Harmonic => SuperpotentialConfig::Harmonic,
            WArg::Coulomb => SuperpotentialConfig::Coulomb { l: 0 },
            WArg::Jacobi => SuperpotentialConfig::Jacobi { p: 1.0, q: 1.0 },
        };
    }
    match cfg {
        SuperpotentialConfig::Coulomb { l } => set(l, args.l),
        SuperpotentialConfig::Jacobi { p, q } => {
            set(p, args.p);
            set(q, args.q);
        }
        SuperpotentialConfig::Harmonic => {}
    }
    let stray = match cfg {
        SuperpotentialConfig::Harmonic => args.l.is_some() || args.p.is_some() || args.q.is_some(),
        SuperpotentialConfig::Coulomb { .. } => args.p.is_some() || args.q.is_some(),
        SuperpotentialConfig::Jacobi { .. } => args.l.is_some(),
    };
    if stray {
        return Err(invalid("--l applies to coulomb, --p/--q to jacobi"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Hermite,
    Laguerre,
    Jacobi,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolyZerosParams {
    pub family: FamilyName,
    pub degree: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for PolyZerosParams {
    fn default() -> Self {
        Self {
            family: FamilyName::Hermite,
            degree: 10,
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

pub fn poly_zeros(
    over: &Overrides,
    family: Option<FamilyArg>,
    degree: Option<usize>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<(), CliError> {
    let mut run: RunConfig<PolyZerosParams> = config::load("poly-zeros", over)?;
    let p = &mut run.params;
    set(
        &mut p.family,
        family.map(|f| match f {
            FamilyArg::Hermite => FamilyName::Hermite,
            FamilyArg::Laguerre => FamilyName::Laguerre,
            FamilyArg::Jacobi => FamilyName::Jacobi,
        }),
    );
    set(&mut p.degree, degree);
    set(&mut p.alpha, alpha);
    set(&mut p.beta, beta);

    let spec = match p.family {
        FamilyName::Hermite => Ok(PolynomialSpec::hermite(p.degree)),
        FamilyName::Laguerre => PolynomialSpec::laguerre(p.alpha, p.degree),
        FamilyName::Jacobi => PolynomialSpec::jacobi(p.alpha, p.beta, p.degree),
    }
    .map_err(invalid)?;
    let zeros = orthopoly::zeros(&spec).map_err(invalid)?;
    let mut table = Table::new(&["index", "zero", "ode_residual"]);
    for (i, &x) in zeros.zeros.iter().enumerate() {
        table.row(&[i.to_string(), num(x), num(orthopoly::ode_residual(&spec, x))]);
    }
    table.write(&run, "zeros.csv")?;
    println!("{} zeros written to {}", zeros.zeros.len(), run.out.join("zeros.csv").display());
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveParams {
    /// Initial positions as `[re, im]` pairs.
    pub positions: Vec<[f64; 2]>,
    pub gamma: f64,
    pub t_final: f64,
    pub tol: f64,
    /// Strength of the conjugate-linear background; 0 is free evolution.
    pub omega: f64,
}

impl Default for EvolveParams {
    fn default() -> Self {
        Self {
            positions: vec![[1.0, 0.0], [-1.0, 0.0]],
            gamma: -0.5,
            t_final: 1.0,
            tol: 1e-10,
            omega: 0.0,
        }
    }
}

fn trajectory_table(traj: &TrajectoryRecord) -> Table {
    let mut table = Table::new(&["t", "index", "re", "im"]);
    for s in &traj.samples {
        for (i, z) in s.positions.iter().enumerate() {
            table.row(&[num(s.t), i.to_string(), num(z.re), num(z.im)]);
        }
    }
    table
}

pub fn evolve(over: &Overrides, gamma: Option<f64>, t_final: Option<f64>, tol: Option<f64>) -> Result<(), CliError> {
    let mut run: RunConfig<EvolveParams> = config::load("evolve", over)?;
    let p = &mut run.params;
    set(&mut p.gamma, gamma);
    set(&mut p.t_final, t_final);
    set(&mut p.tol, tol);
    let p = &run.params;

    let z: Vec<Complex64> = p.positions.iter().map(|&[a, b]| Complex64::new(a, b)).collect();
    let background = if p.omega == 0.0 {
        BackgroundFlow::None
    } else {
        BackgroundFlow::ConjugateLinear { omega: p.omega }
    };
    let state = VortexState::new(z, p.gamma, background).map_err(invalid)?;
    let traj = match vortex::evolve(&state, p.t_final, p.tol) {
        Ok(t) => t,
        Err(VortexError::Collision { trajectory, t, i, j, distance }) => {
            trajectory_table(&trajectory).write(&run, "trajectory.csv")?;
            return Err(CliError::NonConvergence(format!(
                "vortices {i} and {j} within {distance:e} at t = {t}"
            )));
        }
        Err(e @ (VortexError::StepUnderflow { .. } | VortexError::MaxSteps { .. })) => {
            return Err(CliError::NonConvergence(e.to_string()))
        }
        Err(e) => return Err(invalid(e)),
    };
    trajectory_table(&traj).write(&run, "trajectory.csv")?;
    if p.omega == 0.0 {
        let rep = vortex::moment_report(&traj, p.gamma);
        let mut table = Table::new(&["t", "m1_drift", "m2_deviation"]);
        for &(t, a, b) in &rep.series {
            table.row(&[num(t), num(a), num(b)]);
        }
        table.write(&run, "moments.csv")?;
        println!("m1 drift {:e}, m2 law deviation {:e}", rep.m1_drift, rep.m2_deviation);
    }
    println!("{} accepted steps, {} rejected", traj.step_sizes.len(), traj.rejected_steps);
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibrateParams {
    pub w: SuperpotentialConfig,
    pub n: usize,
    pub tol: f64,
}

impl Default for EquilibrateParams {
    fn default() -> Self {
        Self {
            w: SuperpotentialConfig::Harmonic,
            n: 10,
            tol: SolverOptions::default().tol,
        }
    }
}

pub fn equilibrate(over: &Overrides, w_args: &WArgs, n: Option<usize>, tol: Option<f64>) -> Result<(), CliError> {
    let mut run: RunConfig<EquilibrateParams> = config::load("equilibrate", over)?;
    apply_w(&mut run.params.w, w_args)?;
    set(&mut run.params.n, n);
    set(&mut run.params.tol, tol);
    let p = &run.params;

    let w = Superpotential::try_from(p.w).map_err(invalid)?;
    let opts = SolverOptions {
        tol: p.tol,
        ..SolverOptions::default()
    };
    let res = stieltjes::solve_equilibrium(&w, p.n, &Init::Auto, &opts).map_err(invalid)?;
    let spec = stieltjes::oracle_mapping(&w, p.n).map_err(invalid)?;
    let oracle = orthopoly::zeros(&spec).map_err(invalid)?.zeros;
    let residual = stieltjes::residual(&res.positions, &w).map_err(invalid)?;

    let mut table = Table::new(&["index", "position", "oracle_zero", "oracle_deviation", "residual"]);
    let mut worst = 0.0f64;
    for (i, (&x, &o)) in res.positions.iter().zip(&oracle).enumerate() {
        worst = worst.max((x - o).abs());
        table.row(&[i.to_string(), num(x), num(o), num((x - o).abs()), num(residual[i])]);
    }
    table.write(&run, "equilibrium.csv")?;
    let mut summary = Table::new(&["n", "converged", "iterations", "residual_norm", "max_oracle_deviation"]);
    summary.row(&[
        p.n.to_string(),
        res.converged.to_string(),
        res.iterations.to_string(),
        num(res.residual_norm),
        num(worst),
    ]);
    summary.write(&run, "summary.csv")?;
    println!("max oracle deviation {worst:e}, residual {:e}", res.residual_norm);
    if !res.converged {
        return Err(CliError::NonConvergence(format!("residual {:e} after {} iterations", res.residual_norm, res.iterations)));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SusyParams {
    pub w: SuperpotentialConfig,
    pub energy: f64,
    /// Box; defaults depend on `w`.
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub points: usize,
    pub levels: usize,
}

impl Default for SusyParams {
    fn default() -> Self {
        Self {
            w: SuperpotentialConfig::Harmonic,
            energy: 0.0,
            x_min: None,
            x_max: None,
            points: 2048,
            levels: 4,
        }
    }
}

fn default_box(w: &SuperpotentialConfig) -> (f64, f64) {
    match w {
        SuperpotentialConfig::Harmonic => (-8.0, 8.0),
        SuperpotentialConfig::Coulomb { .. } => (0.01, 60.0),
        SuperpotentialConfig::Jacobi { .. } => (-0.999, 0.999),
    }
}

pub fn susy_check(
    over: &Overrides,
    w_args: &WArgs,
    energy: Option<f64>,
    points: Option<usize>,
    levels: Option<usize>,
) -> Result<(), CliError> {
    let mut run: RunConfig<SusyParams> = config::load("susy-check", over)?;
    apply_w(&mut run.params.w, w_args)?;
    set(&mut run.params.energy, energy);
    set(&mut run.params.points, points);
    set(&mut run.params.levels, levels);
    let p = &run.params;

    let w = Superpotential::try_from(p.w).map_err(invalid)?;
    let (lo, hi) = default_box(&p.w);
    let grid = GridSpec::new(p.x_min.unwrap_or(lo), p.x_max.unwrap_or(hi), p.points).map_err(invalid)?;
    let pot = susy::partner_potentials(&w, p.energy, &grid).map_err(invalid)?;
    let mut table = Table::new(&["x", "v_plus", "v_minus"]);
    for (i, &x) in pot.nodes.iter().enumerate() {
        table.row(&[num(x), num(pot.v_plus[i]), num(pot.v_minus[i])]);
    }
    table.write(&run, "potentials.csv")?;

    let rep = susy::degeneracy_check(&w, p.energy, &grid, p.levels).map_err(invalid)?;
    let mut spectrum = Table::new(&["level", "h_plus", "h_minus", "mismatch"]);
    for (m, &e) in rep.h_plus.iter().enumerate() {
        // H- level m pairs with H+ level m + 1.
        let (minus, mis) = match m.checked_sub(1) {
            Some(k) => (num(rep.h_minus[k]), num(rep.mismatches[k])),
            None => (String::new(), String::new()),
        };
        spectrum.row(&[m.to_string(), num(e), minus, mis]);
    }
    spectrum.write(&run, "spectrum.csv")?;

    let order = susy::annihilation_order(&w, &grid).map_err(invalid)?;
    let mut summary = Table::new(&["ground_energy", "max_mismatch", "annihilation_coarse", "annihilation_fine", "annihilation_slope"]);
    summary.row(&[opt(rep.ground_energy()), opt(rep.max_mismatch), num(order.coarse), num(order.fine), num(order.slope)]);
    summary.write(&run, "summary.csv")?;
    println!(
        "ground {}, max mismatch {}, annihilation slope {:.4}",
        opt(rep.ground_energy()),
        opt(rep.max_mismatch),
        order.slope
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Polygon,
    Collinear,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaughlinRunParams {
    pub shape: Shape,
    pub n: usize,
    pub n_exp: u32,
    pub l_b: f64,
    /// Start displacement as a fraction of the nearest-neighbour distance.
    pub perturbation: f64,
    pub tol: f64,
}

impl Default for LaughlinRunParams {
    fn default() -> Self {
        Self {
            shape: Shape::Polygon,
            n: 6,
            n_exp: 3,
            l_b: 1.0,
            perturbation: 0.05,
            tol: 1e-12,
        }
    }
}

pub fn laughlin(
    over: &Overrides,
    shape: Option<ShapeArg>,
    n: Option<usize>,
    n_exp: Option<u32>,
    l_b: Option<f64>,
    perturbation: Option<f64>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let mut run: RunConfig<LaughlinRunParams> = config::load("laughlin", over)?;
    let p = &mut run.params;
    set(
        &mut p.shape,
        shape.map(|s| match s {
            ShapeArg::Polygon => Shape::Polygon,
            ShapeArg::Collinear => Shape::Collinear,
        }),
    );
    set(&mut p.n, n);
    set(&mut p.n_exp, n_exp);
    set(&mut p.l_b, l_b);
    set(&mut p.perturbation, perturbation);
    set(&mut p.tol, tol);
    let p = &run.params;
    if !(p.perturbation >= 0.0 && p.perturbation < 0.5) {
        return Err(invalid(format!("perturbation must lie in [0, 0.5), got {}", p.perturbation)));
    }

    let params = LaughlinParams::new(p.n, p.n_exp, p.l_b).map_err(invalid)?;
    let oracle = match p.shape {
        Shape::Polygon => laughlin::polygon_equilibrium(&params),
        Shape::Collinear => laughlin::collinear_equilibrium(&params).map_err(invalid)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let start = laughlin::perturb(&mut rng, &oracle, p.perturbation);
    let sol = laughlin::solve_planar_equilibrium(&params, &start, p.tol).map_err(invalid)?;
    let pts = &sol.config.points;
    let residual = laughlin::stationary_residual(&params, &sol.config).map_err(invalid)?;

    let mut table = Table::new(&["index", "re", "im", "oracle_re", "oracle_im", "residual_abs"]);
    for (i, (z, o)) in pts.iter().zip(&oracle.points).enumerate() {
        table.row(&[i.to_string(), num(z.re), num(z.im), num(o.re), num(o.im), num(residual[i].norm())]);
    }
    table.write(&run, "equilibrium.csv")?;

    let deviation = laughlin::gauge_fixed_deviation(pts, &oracle.points);
    let radius_law = match p.shape {
        Shape::Polygon if p.n >= 2 => {
            let r2 = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / p.n as f64;
            Some(r2 / (p.l_b * p.l_b * p.n_exp as f64) / (2.0 * (p.n as f64 - 1.0)))
        }
        _ => None,
    };
    let mut summary = Table::new(&["converged", "iterations", "residual_max", "gauge_fixed_deviation", "radius_law_ratio"]);
    summary.row(&[
        sol.report.converged.to_string(),
        sol.report.iterations.to_string(),
        num(sol.report.residual_max),
        num(deviation),
        opt(radius_law),
    ]);
    summary.write(&run, "summary.csv")?;
    println!("residual {:e}, gauge-fixed deviation {deviation:e}", sol.report.residual_max);
    if !sol.report.converged {
        return Err(CliError::NonConvergence(format!("residual {:e}", sol.report.residual_max)));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandauParams {
    pub half_width: f64,
    pub points: usize,
    pub field: f64,
    pub k: usize,
    pub discretization: Discretization,
    pub tol: f64,
    pub gap_factor: f64,
    pub min_multiplicity: usize,
    pub levels: usize,
}

impl Default for LandauParams {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            points: 96,
            field: 1.0,
            k: 20,
            discretization: Discretization::Peierls,
            tol: EigenOptions::default().tol,
            gap_factor: ClusterOptions::default().gap_factor,
            min_multiplicity: certify::FLAT_CLUSTER_MIN_MULTIPLICITY,
            levels: 3,
        }
    }
}

pub fn landau_spectrum(
    over: &Overrides,
    half_width: Option<f64>,
    points: Option<usize>,
    field: Option<f64>,
    k: Option<usize>,
    disc: Option<DiscretizationArg>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let mut run: RunConfig<LandauParams> = config::load("landau-spectrum", over)?;
    let p = &mut run.params;
    set(&mut p.half_width, half_width);
    set(&mut p.points, points);
    set(&mut p.field, field);
    set(&mut p.k, k);
    set(
        &mut p.discretization,
        disc.map(|d| match d {
            DiscretizationArg::Peierls => Discretization::Peierls,
            DiscretizationArg::Naive => Discretization::Naive,
        }),
    );
    set(&mut p.tol, tol);
    let p = &run.params;

    let grid = MagneticGrid::new(p.half_width, p.points, p.field).map_err(invalid)?;
    let eigen = EigenOptions {
        tol: p.tol,
        ..EigenOptions::default()
    };
    let clusters = ClusterOptions {
        gap_factor: p.gap_factor,
        ..ClusterOptions::default()
    };
    let res = pool(run.jobs)?
        .install(|| landau::compute_spectrum(&grid, p.discretization, p.k, &eigen, &clusters))
        .map_err(invalid)?;

    let mut table = Table::new(&["index", "eigenvalue", "residual"]);
    for (i, (&e, &r)) in res.eigen.values.iter().zip(&res.eigen.residuals).enumerate() {
        table.row(&[i.to_string(), num(e), num(r)]);
    }
    table.write(&run, "eigenvalues.csv")?;
    let mut ctable = Table::new(&["index", "center", "multiplicity", "min", "max", "flat"]);
    for (i, c) in res.clusters.iter().enumerate() {
        ctable.row(&[
            i.to_string(),
            num(c.center),
            c.multiplicity.to_string(),
            num(c.min),
            num(c.max),
            (c.multiplicity >= p.min_multiplicity).to_string(),
        ]);
    }
    ctable.write(&run, "clusters.csv")?;

    let flat = landau::flat_clusters(&res.clusters, p.min_multiplicity);
    let law = landau::gap_law(&flat, p.levels, p.field);
    let mut summary = Table::new(&[
        "converged",
        "restarts",
        "cluster_count",
        "flat_cluster_count",
        "lowest_level_degeneracy",
        "gap_law_max_relative_error",
        "spacing_over_field",
    ]);
    summary.row(&[
        res.eigen.all_converged().to_string(),
        res.eigen.restarts.to_string(),
        res.clusters.len().to_string(),
        flat.len().to_string(),
        num(landau::lowest_level_degeneracy(&grid)),
        opt(law.max_relative_error),
        opt(law.spacing_over_field),
    ]);
    summary.write(&run, "summary.csv")?;
    println!(
        "{} eigenvalues, {} clusters ({} flat), spacing/B {}",
        res.eigen.values.len(),
        res.clusters.len(),
        flat.len(),
        opt(law.spacing_over_field)
    );
    if !res.eigen.all_converged() {
        return Err(CliError::NonConvergence("eigenpair residuals above tolerance".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyParams {
    pub criteria: Vec<CriterionId>,
    pub tolerances: BTreeMap<CriterionId, f64>,
}

impl Default for CertifyParams {
    fn default() -> Self {
        Self {
            criteria: CriterionId::ALL.to_vec(),
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Serialize)]
struct CertifyDocument<'a> {
    tool: &'static str,
    version: &'static str,
    config_sha256: String,
    seed: u64,
    report: &'a certify::CertifyReport,
}

pub fn certify_all(over: &Overrides, criteria: Option<Vec<String>>, tol: Option<f64>) -> Result<(), CliError> {
    let mut run: RunConfig<CertifyParams> = config::load("certify-all", over)?;
    if let Some(list) = criteria {
        run.params.criteria = list
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| serde_json::from_value(serde_json::Value::String(s.trim().to_uppercase())).map_err(|_| invalid(format!("unknown criterion `{s}`"))))
            .collect::<Result<_, _>>()?;
    }
    if let Some(t) = tol {
        for &id in &run.params.criteria {
            run.params.tolerances.insert(id, t);
        }
    }
    let cfg = CertifyConfig {
        criteria: run.params.criteria.clone(),
        seed: run.seed,
        tolerances: run.params.tolerances.clone(),
    };
    let report = certify::certify_all(&cfg, run.jobs);

    let doc = CertifyDocument {
        tool: "kirchhoff",
        version: output::VERSION,
        config_sha256: run.hash(),
        seed: run.seed,
        report: &report,
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("report serializes");
    json.push('\n');
    output::write_file(&run.out, "certify.json", &json)?;

    let mut table = Table::new(&["criterion", "passed", "measurement", "value", "bound_kind", "bound"]);
    for c in &report.criteria {
        println!("{}", c.summary_line());
        for m in &c.measurements {
            let (kind, bound) = match m.bound {
                Bound::Below(b) => ("below", num(b)),
                Bound::AtLeast(b) => ("at_least", num(b)),
                Bound::Reported => ("reported", String::new()),
            };
            table.row(&[c.id.to_string(), m.passed.to_string(), m.name.clone(), opt(m.value), kind.into(), bound]);
        }
    }
    table.write(&run, "certify.csv")?;
    if report.passed {
        println!("all {} selected criteria passed", report.criteria.len());
        Ok(())
    } else {
        let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
        Err(CliError::Failed(format!("criteria {} failed", failed.join(", "))))
    }
}
