use kirchhoff::landau::{cluster_analysis, Discretization, MagneticGrid, MagneticOperator};
use kirchhoff::laughlin::{self, LaughlinParams, PlanarConfig};
use kirchhoff::orthopoly::{self, Family, PolynomialSpec};
use kirchhoff::stieltjes;
use kirchhoff::superpotential::Superpotential;
use kirchhoff::susy::{self, GridSpec};
use kirchhoff::vortex::{self, VortexState};
use kirchhoff::Complex64;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Hermite),
        (-0.9f64..4.0).prop_map(|alpha| Family::AssociatedLaguerre { alpha }),
        (-0.9f64..4.0, -0.9f64..4.0).prop_map(|(alpha, beta)| Family::Jacobi { alpha, beta }),
    ]
}

fn superpotential() -> impl Strategy<Value = Superpotential> {
    prop_oneof![
        Just(Superpotential::Harmonic),
        (0u32..4).prop_map(|l| Superpotential::Coulomb { l }),
        (0.2f64..3.0, 0.2f64..3.0).prop_map(|(p, q)| Superpotential::jacobi(p, q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeros_interlace_and_bracket_sign_changes(family in family(), degree in 2usize..=50) {
        let spec = PolynomialSpec::new(family, degree).unwrap();
        let lower = PolynomialSpec::new(family, degree - 1).unwrap();
        let z = orthopoly::zeros(&spec).unwrap().zeros;
        let w = orthopoly::zeros(&lower).unwrap().zeros;
        prop_assert_eq!(z.len(), degree);
        for k in 0..w.len() {
            prop_assert!(z[k] < w[k] && w[k] < z[k + 1]);
        }
        for k in 0..degree {
            let left = if k == 0 { z[0] - 1e-3 } else { 0.5 * (z[k - 1] + z[k]) };
            let right = if k + 1 == degree { z[k] + 1e-3 } else { 0.5 * (z[k] + z[k + 1]) };
            let (a, b) = (orthopoly::evaluate(&spec, left), orthopoly::evaluate(&spec, right));
            prop_assert!(a * b < 0.0, "no sign change around zero {}", k);
        }
    }

    #[test]
    fn stieltjes_jacobian_matches_differences(w in superpotential(), n in 1usize..=12, shift in -0.2f64..0.2) {
        let mut x = stieltjes::auto_init(&w, n);
        let gap = if n > 1 { x[1] - x[0] } else { 0.1 };
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += shift * gap * ((i as f64) * 0.7).sin();
        }
        let jac = stieltjes::jacobian(&x, &w).unwrap();
        for c in 0..n {
            let h = 1e-6 * gap.max(1e-3);
            let (mut a, mut b) = (x.clone(), x.clone());
            a[c] += h;
            b[c] -= h;
            let (fa, fb) = (stieltjes::residual(&a, &w).unwrap(), stieltjes::residual(&b, &w).unwrap());
            for r in 0..n {
                let fd = (fa[r] - fb[r]) / (2.0 * h);
                prop_assert!((fd - jac[(r, c)]).abs() <= 1e-6 * jac[(r, c)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn first_moment_conserved_and_time_reversible(
        pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..=6),
        gamma in prop_oneof![-1.0f64..-0.2, 0.2f64..1.0],
    ) {
        let z: Vec<Complex64> = pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        for i in 0..z.len() {
            for j in 0..i {
                prop_assume!((z[i] - z[j]).norm() > 0.5);
            }
        }
        let tol = 1e-10;
        let state = VortexState::free(z.clone(), gamma).unwrap();
        let Ok(fwd) = vortex::evolve(&state, 0.1, tol) else { return Ok(()) };
        prop_assert!(vortex::moment_report(&fwd, gamma).m1_drift < 1e-8);
        let back_state = state.with_positions(fwd.last().positions.clone()).unwrap().time_reversed();
        let back = vortex::evolve(&back_state, 0.1, tol).unwrap();
        for (a, b) in back.last().positions.iter().zip(&z) {
            prop_assert!((a - b).norm() < 100.0 * tol);
        }
    }

    #[test]
    fn partner_potentials_satisfy_pointwise_identities(w in superpotential(), e in -2.0f64..2.0, points in 64usize..400) {
        let d = w.domain();
        let (lo, hi) = match w {
            Superpotential::Harmonic => (-6.0, 6.0),
            Superpotential::Coulomb { .. } => (0.05, 40.0),
            _ => (-0.98, 0.98),
        };
        prop_assert!(d.contains(lo) && d.contains(hi));
        let grid = GridSpec::new(lo, hi, points).unwrap();
        let p = susy::partner_potentials(&w, e, &grid).unwrap();
        for (i, &x) in p.nodes.iter().enumerate() {
            let (wv, wd) = (w.value(x), w.derivative(x));
            let scale = 1.0 + wv * wv + wd.abs();
            prop_assert!((p.v_plus[i] + p.v_minus[i] - 2.0 * (wv * wv + e)).abs() < 1e-12 * scale);
            prop_assert!((p.v_plus[i] - p.v_minus[i] + 2.0 * wd).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn polygon_residual_invariant_under_rotation(n in 2usize..=12, n_exp in prop_oneof![Just(1u32), Just(3), Just(5)], l_b in 0.5f64..2.0) {
        let p = LaughlinParams::new(n, n_exp, l_b).unwrap();
        let norms = laughlin::rotation_orbit_norms(&p, &laughlin::polygon_equilibrium(&p), 8).unwrap();
        let scale = (n as f64).sqrt() / l_b;
        for r in norms {
            prop_assert!(r < 1e-12 * scale * n as f64);
        }
    }

    #[test]
    fn laughlin_derivatives_match_numerics(seed in any::<u64>(), n in 1usize..=8) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = LaughlinParams::new(n, 3, 1.0).unwrap();
        let cfg = laughlin::random_config(&mut rng, n, 3.0, 0.5);
        let analytic = laughlin::stationary_residual(&p, &cfg).unwrap();
        let qh = PlanarConfig::quasiholes(cfg.points.clone());
        for j in 0..n {
            let num = laughlin::numerical_derivative(&p, &cfg, j, 2e-4).unwrap();
            prop_assert!((analytic[j] - num).norm() < 1e-8);
            let b = laughlin::berry_connection(&p, &qh, j).unwrap();
            let bn = laughlin::numerical_berry_connection(&p, &qh, j, 2e-4).unwrap();
            prop_assert!((b - bn).norm() < 1e-8);
        }
    }

    #[test]
    fn magnetic_operator_hermitian(
        points in 32usize..40,
        half_width in 1.0f64..8.0,
        field in 0.0f64..3.0,
        x0 in -2.0f64..2.0,
        y0 in -2.0f64..2.0,
        naive in any::<bool>(),
    ) {
        let grid = MagneticGrid::new(half_width, points, field).unwrap();
        let disc = if naive { Discretization::Naive } else { Discretization::Peierls };
        let op = MagneticOperator::new(&grid, disc, (x0, y0));
        prop_assert_eq!(op.hermiticity_defect(), 0.0);
    }

    #[test]
    fn clusters_partition_ascending_input(mut eigs in prop::collection::vec(-10.0f64..10.0, 0..60), factor in 1.0f64..10.0) {
        eigs.sort_by(f64::total_cmp);
        let clusters = cluster_analysis(&eigs, factor).unwrap();
        prop_assert_eq!(clusters.iter().map(|c| c.multiplicity).sum::<usize>(), eigs.len());
        for pair in clusters.windows(2) {
            prop_assert!(pair[0].max < pair[1].min);
        }
        for c in &clusters {
            prop_assert!(c.min <= c.center && c.center <= c.max);
        }
    }
}
