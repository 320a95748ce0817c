use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LandauError;

/// Uniform grid of `points x points` interior nodes on `[-L, L]^2` with
/// Dirichlet walls on the boundary; spacing `h = 2L / (points + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagneticGrid {
    pub half_width: f64,
    pub points: usize,
    pub field: f64,
}

impl MagneticGrid {
    pub const MIN_POINTS: usize = 32;

    pub fn new(half_width: f64, points: usize, field: f64) -> Result<Self, LandauError> {
        Self {
            half_width,
            points,
            field,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, LandauError> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(LandauError::Parameter(format!("half width must be positive, got {}", self.half_width)));
        }
        if self.points < Self::MIN_POINTS {
            return Err(LandauError::Parameter(format!(
                "need at least {} points per side, got {}",
                Self::MIN_POINTS,
                self.points
            )));
        }
        if !(self.field.is_finite() && self.field >= 0.0) {
            return Err(LandauError::Parameter(format!("field must be non-negative, got {}", self.field)));
        }
        Ok(self)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points + 1) as f64
    }

    pub fn dim(&self) -> usize {
        self.points * self.points
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_width
    }

    /// Coordinate of interior index `i` (0-based).
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i + 1) as f64 * self.spacing()
    }

    /// Row-major node index, `x` fastest.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.points + ix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// Phase factors on the grid links.
    #[default]
    Peierls,
    /// Central differences of the expanded operator.
    Naive,
}

/// Discrete `-((d_x + i B (y - y0))^2 + (d_y - i B (x - x0))^2)`.
///
/// Stored as a diagonal plus the east and north couplings of every node;
/// west and south couplings are their conjugates, so the matrix is
/// Hermitian exactly.
#[derive(Debug, Clone)]
pub struct MagneticOperator {
    grid: MagneticGrid,
    discretization: Discretization,
    gauge_origin: (f64, f64),
    diag: Vec<f64>,
    east: Vec<Complex64>,
    north: Vec<Complex64>,
}

pub fn build_magnetic_operator(grid: &MagneticGrid) -> MagneticOperator {
    MagneticOperator::new(grid, Discretization::Peierls, (0.0, 0.0))
}

impl MagneticOperator {
    pub fn new(grid: &MagneticGrid, discretization: Discretization, gauge_origin: (f64, f64)) -> Self {
        let p = grid.points;
        let h = grid.spacing();
        let h2 = h * h;
        let b = grid.field;
        let (x0, y0) = gauge_origin;
        let n = grid.dim();
        let mut diag = vec![4.0 / h2; n];
        let mut east = vec![Complex64::new(0.0, 0.0); n];
        let mut north = vec![Complex64::new(0.0, 0.0); n];
        for iy in 0..p {
            let y = grid.coord(iy) - y0;
            for ix in 0..p {
                let x = grid.coord(ix) - x0;
                let k = grid.index(ix, iy);
                match discretization {
                    Discretization::Peierls => {
                        if ix + 1 < p {
                            east[k] = -Complex64::from_polar(1.0, b * y * h) / h2;
                        }
                        if iy + 1 < p {
                            north[k] = -Complex64::from_polar(1.0, -b * x * h) / h2;
                        }
                    }
                    Discretization::Naive => {
                        diag[k] += b * b * (x * x + y * y);
                        if ix + 1 < p {
                            east[k] = Complex64::new(-1.0 / h2, -b * y / h);
                        }
                        if iy + 1 < p {
                            north[k] = Complex64::new(-1.0 / h2, b * x / h);
                        }
                    }
                }
            }
        }
        Self {
            grid: *grid,
            discretization,
            gauge_origin,
            diag,
            east,
            north,
        }
    }

    pub fn grid(&self) -> &MagneticGrid {
        &self.grid
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization
    }

    pub fn gauge_origin(&self) -> (f64, f64) {
        self.gauge_origin
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Half bandwidth in the row-major ordering.
    pub fn bandwidth(&self) -> usize {
        self.grid.points
    }

    /// Entry `M[row][col]`; zero outside the five-point stencil.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let p = self.grid.points;
        if row == col {
            Complex64::new(self.diag[row], 0.0)
        } else if col == row + 1 && col % p != 0 {
            self.east[row]
        } else if row == col + 1 && row % p != 0 {
            self.east[col].conj()
        } else if col == row + p {
            self.north[row]
        } else if row == col + p {
            self.north[col].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `y = M x`.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let p = self.grid.points;
        for iy in 0..p {
            for ix in 0..p {
                let k = iy * p + ix;
                let mut acc = x[k] * self.diag[k];
                if ix + 1 < p {
                    acc += self.east[k] * x[k + 1];
                }
                if ix > 0 {
                    acc += self.east[k - 1].conj() * x[k - 1];
                }
                if iy + 1 < p {
                    acc += self.north[k] * x[k + p];
                }
                if iy > 0 {
                    acc += self.north[k - p].conj() * x[k - p];
                }
                y[k] = acc;
            }
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// `max |M[r][c] - conj(M[c][r])|` over the stencil entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let p = self.grid.points;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in [r.wrapping_sub(p), r.wrapping_sub(1), r, r + 1, r + p] {
                if c < n {
                    worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
                }
            }
        }
        worst
    }

    /// Dense copy, for small-grid cross-checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.dim();
        let p = self.grid.points;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for r in 0..n {
            for c in [r.wrapping_sub(p), r.wrapping_sub(1), r, r + 1, r + p] {
                if c < n {
                    m[(r, c)] = self.entry(r, c);
                }
            }
        }
        m
    }
}
