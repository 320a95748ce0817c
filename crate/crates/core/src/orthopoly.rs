//! Classical orthogonal polynomials: Hermite (physicists'), associated
//! Laguerre and Jacobi.
//!
//! Values and derivatives come from the three-term recurrences; zeros are
//! the eigenvalues of the symmetric tridiagonal Jacobi matrix built from the
//! monic recurrence coefficients (Golub-Welsch), never from root polishing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tridiag::{SymTridiagonal, TridiagError};

/// Degrees up to which recurrence coefficients are tabulated by default.
pub const DEFAULT_RECURRENCE_CAP: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrthoError {
    #[error("parameter {name} = {value} must be finite and > -1")]
    Parameter { name: &'static str, value: f64 },
    #[error("degree {degree} exceeds tabulated cap {cap}")]
    AboveCap { degree: usize, cap: usize },
    #[error(transparent)]
    Eigen(#[from] TridiagError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Hermite,
    AssociatedLaguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

impl Family {
    fn validate(&self) -> Result<(), OrthoError> {
        let check = |name, value: f64| {
            if value.is_finite() && value > -1.0 {
                Ok(())
            } else {
                Err(OrthoError::Parameter { name, value })
            }
        };
        match *self {
            Family::Hermite => Ok(()),
            Family::AssociatedLaguerre { alpha } => check("alpha", alpha),
            Family::Jacobi { alpha, beta } => {
                check("alpha", alpha)?;
                check("beta", beta)
            }
        }
    }

    /// Interval on which the zeros live and the weight is defined.
    pub fn natural_domain(&self) -> (f64, f64) {
        match self {
            Family::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
            Family::AssociatedLaguerre { .. } => (0.0, f64::INFINITY),
            Family::Jacobi { .. } => (-1.0, 1.0),
        }
    }
}

/// A validated (family, degree) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    family: Family,
    degree: usize,
}

impl PolynomialSpec {
    pub fn new(family: Family, degree: usize) -> Result<Self, OrthoError> {
        family.validate()?;
        Ok(Self { family, degree })
    }

    pub fn hermite(degree: usize) -> Self {
        Self {
            family: Family::Hermite,
            degree,
        }
    }

    pub fn laguerre(alpha: f64, degree: usize) -> Result<Self, OrthoError> {
        Self::new(Family::AssociatedLaguerre { alpha }, degree)
    }

    pub fn jacobi(alpha: f64, beta: f64, degree: usize) -> Result<Self, OrthoError> {
        Self::new(Family::Jacobi { alpha, beta }, degree)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Zeros of a polynomial in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub degree: usize,
}

impl ZeroSet {
    /// A degree-0 polynomial is a nonzero constant and has no zeros. This is
    /// reported as a distinct state rather than an error.
    pub fn is_constant_polynomial(&self) -> bool {
        self.degree == 0
    }
}

/// `p_n(x)` in standard normalization: `H_n`, `L_n^(alpha)` or
/// `P_n^(alpha, beta)`.
pub fn evaluate(spec: &PolynomialSpec, x: f64) -> f64 {
    eval_family(spec.family, spec.degree, x)
}

fn eval_family(family: Family, n: usize, x: f64) -> f64 {
    match family {
        Family::Hermite => {
            let (mut prev, mut cur) = (0.0, 1.0);
            for k in 0..n {
                let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
        Family::AssociatedLaguerre { alpha } => {
            let (mut prev, mut cur) = (0.0, 1.0);
            for k in 0..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
        Family::Jacobi { alpha, beta } => {
            if n == 0 {
                return 1.0;
            }
            let ab = alpha + beta;
            let mut prev = 1.0;
            let mut cur = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
            for k in 1..n {
                let kf = k as f64;
                let s = 2.0 * kf + ab;
                let a1 = 2.0 * (kf + 1.0) * (kf + ab + 1.0) * s;
                let a2 = (s + 1.0) * (alpha * alpha - beta * beta);
                let a3 = s * (s + 1.0) * (s + 2.0);
                let a4 = 2.0 * (kf + alpha) * (kf + beta) * (s + 2.0);
                let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `(p, p', p'')` at `x`, with the derivatives obtained from the
/// differentiation identities of each family (each derivative is again a
/// member of the family at lower degree).
pub fn evaluate_with_derivatives(spec: &PolynomialSpec, x: f64) -> (f64, f64, f64) {
    let n = spec.degree;
    let p = evaluate(spec, x);
    if n == 0 {
        return (p, 0.0, 0.0);
    }
    let nf = n as f64;
    match spec.family {
        Family::Hermite => {
            let d1 = 2.0 * nf * eval_family(Family::Hermite, n - 1, x);
            let d2 = if n >= 2 {
                4.0 * nf * (nf - 1.0) * eval_family(Family::Hermite, n - 2, x)
            } else {
                0.0
            };
            (p, d1, d2)
        }
        Family::AssociatedLaguerre { alpha } => {
            let d1 = -eval_family(Family::AssociatedLaguerre { alpha: alpha + 1.0 }, n - 1, x);
            let d2 = if n >= 2 {
                eval_family(Family::AssociatedLaguerre { alpha: alpha + 2.0 }, n - 2, x)
            } else {
                0.0
            };
            (p, d1, d2)
        }
        Family::Jacobi { alpha, beta } => {
            let c = nf + alpha + beta + 1.0;
            let d1 = 0.5
                * c
                * eval_family(
                    Family::Jacobi {
                        alpha: alpha + 1.0,
                        beta: beta + 1.0,
                    },
                    n - 1,
                    x,
                );
            let d2 = if n >= 2 {
                0.25 * c
                    * (c + 1.0)
                    * eval_family(
                        Family::Jacobi {
                            alpha: alpha + 2.0,
                            beta: beta + 2.0,
                        },
                        n - 2,
                        x,
                    )
            } else {
                0.0
            };
            (p, d1, d2)
        }
    }
}

/// The three terms of the family's second-order ODE at `x`, in the order
/// (second-derivative term, first-derivative term, eigenvalue term):
///
/// * Hermite: `f'' - 2x f' + 2n f`
/// * Laguerre: `x f'' + (alpha + 1 - x) f' + n f`
/// * Jacobi: `(1 - x^2) f'' + (beta - alpha - (alpha + beta + 2) x) f' + n (n + alpha + beta + 1) f`
pub fn ode_terms(spec: &PolynomialSpec, x: f64) -> [f64; 3] {
    let (f, d1, d2) = evaluate_with_derivatives(spec, x);
    let n = spec.degree as f64;
    match spec.family {
        Family::Hermite => [d2, -2.0 * x * d1, 2.0 * n * f],
        Family::AssociatedLaguerre { alpha } => [x * d2, (alpha + 1.0 - x) * d1, n * f],
        Family::Jacobi { alpha, beta } => [
            (1.0 - x * x) * d2,
            (beta - alpha - (alpha + beta + 2.0) * x) * d1,
            n * (n + alpha + beta + 1.0) * f,
        ],
    }
}

/// Residual of the family's standard ODE at `x`; zero for an exact solution.
pub fn ode_residual(spec: &PolynomialSpec, x: f64) -> f64 {
    ode_terms(spec, x).iter().sum()
}

/// Tabulated recurrence coefficients of the orthonormal (Jacobi-matrix)
/// form, valid for every degree up to `cap`. The degree-n Jacobi matrix is
/// the leading n x n block.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    family: Family,
    matrix: SymTridiagonal,
}

impl RecurrenceTable {
    pub fn new(family: Family, cap: usize) -> Result<Self, OrthoError> {
        family.validate()?;
        let diag: Vec<f64> = (0..cap).map(|k| diagonal_coefficient(family, k)).collect();
        let off: Vec<f64> = (1..cap).map(|k| off_diagonal_coefficient(family, k)).collect();
        Ok(Self {
            family,
            matrix: SymTridiagonal::new(diag, off)?,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn cap(&self) -> usize {
        self.matrix.dim()
    }

    /// Jacobi matrix whose eigenvalues are the zeros of `p_degree`.
    pub fn jacobi_matrix(&self, degree: usize) -> Result<SymTridiagonal, OrthoError> {
        if degree > self.cap() {
            return Err(OrthoError::AboveCap {
                degree,
                cap: self.cap(),
            });
        }
        Ok(self.matrix.leading(degree))
    }

    pub fn zeros(&self, degree: usize) -> Result<ZeroSet, OrthoError> {
        if degree == 0 {
            return Ok(ZeroSet {
                zeros: Vec::new(),
                degree,
            });
        }
        let zeros = self.jacobi_matrix(degree)?.eigenvalues()?;
        Ok(ZeroSet { zeros, degree })
    }
}

fn diagonal_coefficient(family: Family, k: usize) -> f64 {
    let kf = k as f64;
    match family {
        Family::Hermite => 0.0,
        Family::AssociatedLaguerre { alpha } => 2.0 * kf + alpha + 1.0,
        Family::Jacobi { alpha, beta } => {
            let ab = alpha + beta;
            if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let s = 2.0 * kf + ab;
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            }
        }
    }
}

/// Coupling between rows k-1 and k (k >= 1).
fn off_diagonal_coefficient(family: Family, k: usize) -> f64 {
    let kf = k as f64;
    match family {
        Family::Hermite => (0.5 * kf).sqrt(),
        Family::AssociatedLaguerre { alpha } => (kf * (kf + alpha)).sqrt(),
        Family::Jacobi { alpha, beta } => {
            let ab = alpha + beta;
            let s = 2.0 * kf + ab;
            let sq = if k == 1 {
                // (k + a + b) / (2k + a + b - 1) is 1 at k = 1; cancel it
                // explicitly so a + b = -1 stays well defined.
                4.0 * (1.0 + alpha) * (1.0 + beta) / (s * s * (s + 1.0))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                    / (s * s * (s + 1.0) * (s - 1.0))
            };
            sq.sqrt()
        }
    }
}

/// Zeros of `spec` from the eigenvalues of its Jacobi matrix.
pub fn zeros(spec: &PolynomialSpec) -> Result<ZeroSet, OrthoError> {
    RecurrenceTable::new(spec.family, DEFAULT_RECURRENCE_CAP.max(spec.degree))?.zeros(spec.degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degree_zero_is_one() {
        assert_eq!(evaluate(&PolynomialSpec::hermite(0), 3.7), 1.0);
        let lag = PolynomialSpec::laguerre(0.5, 0).unwrap();
        assert_eq!(evaluate(&lag, -2.0), 1.0);
    }

    #[test]
    fn low_degree_closed_forms() {
        assert_abs_diff_eq!(evaluate(&PolynomialSpec::hermite(2), 0.0), -2.0);
        let l1 = PolynomialSpec::laguerre(1.0, 1).unwrap();
        assert_abs_diff_eq!(evaluate(&l1, 2.0), 0.0);
        // P_2 Legendre = (3x^2 - 1)/2
        let p2 = PolynomialSpec::jacobi(0.0, 0.0, 2).unwrap();
        assert_abs_diff_eq!(evaluate(&p2, 0.3), 0.5 * (3.0 * 0.09 - 1.0), epsilon = 1e-15);
        // P_1^(a,b) = (a+1) + (a+b+2)(x-1)/2
        let p1 = PolynomialSpec::jacobi(1.0, 2.0, 1).unwrap();
        assert_abs_diff_eq!(evaluate(&p1, 0.5), 2.0 + 2.5 * (-0.5), epsilon = 1e-15);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(PolynomialSpec::laguerre(-1.0, 3).is_err());
        assert!(PolynomialSpec::jacobi(0.0, -1.5, 3).is_err());
        assert!(PolynomialSpec::jacobi(f64::NAN, 0.0, 3).is_err());
    }

    #[test]
    fn closed_form_zeros() {
        assert_eq!(zeros(&PolynomialSpec::hermite(1)).unwrap().zeros, vec![0.0]);
        let h2 = zeros(&PolynomialSpec::hermite(2)).unwrap().zeros;
        let r = 0.5_f64.sqrt();
        assert_abs_diff_eq!(h2[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(h2[1], r, epsilon = 1e-15);
        let p2 = zeros(&PolynomialSpec::jacobi(0.0, 0.0, 2).unwrap()).unwrap().zeros;
        let r3 = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(p2[0], -r3, epsilon = 1e-15);
        assert_abs_diff_eq!(p2[1], r3, epsilon = 1e-15);
        let l1 = zeros(&PolynomialSpec::laguerre(1.0, 1).unwrap()).unwrap().zeros;
        assert_abs_diff_eq!(l1[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn degree_zero_zero_set_is_flagged() {
        let z = zeros(&PolynomialSpec::hermite(0)).unwrap();
        assert!(z.is_constant_polynomial());
        assert!(z.zeros.is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let table = RecurrenceTable::new(Family::Hermite, 8).unwrap();
        assert!(matches!(table.zeros(9), Err(OrthoError::AboveCap { .. })));
        assert_eq!(table.zeros(8).unwrap().zeros.len(), 8);
    }

    #[test]
    fn ode_residual_examples() {
        assert!(ode_residual(&PolynomialSpec::hermite(3), 0.4).abs() < 1e-12);
        let l1 = PolynomialSpec::laguerre(1.0, 1).unwrap();
        assert!(ode_residual(&l1, 5.0).abs() < 1e-14);
        let j4 = PolynomialSpec::jacobi(1.0, 2.0, 4).unwrap();
        let terms = ode_terms(&j4, -0.3);
        let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        assert!(ode_residual(&j4, -0.3).abs() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn derivative_identities_match_finite_differences() {
        let specs = [
            PolynomialSpec::hermite(7),
            PolynomialSpec::laguerre(1.5, 6).unwrap(),
            PolynomialSpec::jacobi(0.5, 2.0, 5).unwrap(),
        ];
        let h = 1e-5;
        for spec in &specs {
            let x = 0.37;
            let (_, d1, d2) = evaluate_with_derivatives(spec, x);
            let fd1 = (evaluate(spec, x + h) - evaluate(spec, x - h)) / (2.0 * h);
            let fd2 = (evaluate(spec, x + h) - 2.0 * evaluate(spec, x) + evaluate(spec, x - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "{spec:?}");
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "{spec:?}");
        }
    }
}
