//! Background flows / superpotentials `W`.
//!
//! The same `W` plays three roles: external field in the stationary
//! Kirchhoff (Stieltjes) problem, background drift in the zero dynamics, and
//! the SUSY superpotential in `A = d/dx + W`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperpotentialError {
    #[error("invalid superpotential parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("x = {x} lies outside the open domain ({lower}, {upper})")]
    OutOfDomain { x: f64, lower: f64, upper: f64 },
}

/// Open interval `(lower, upper)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: f64,
    pub upper: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    pub fn check(&self, x: f64) -> Result<(), SuperpotentialError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(SuperpotentialError::OutOfDomain {
                x,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// User-supplied `W` with its analytic derivative.
#[derive(Clone)]
pub struct CustomSuperpotential {
    pub name: String,
    pub domain: Domain,
    value: RealFn,
    derivative: RealFn,
    antiderivative: Option<RealFn>,
    complex_value: Option<ComplexFn>,
}

impl CustomSuperpotential {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            antiderivative: None,
            complex_value: None,
        }
    }

    /// Closed-form `U` with `U' = W`; enables the electrostatic energy and an
    /// exact ground state.
    pub fn with_antiderivative(mut self, u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(u));
        self
    }

    pub fn has_complex(&self) -> bool {
        self.complex_value.is_some()
    }

    /// Continuation of `W` to complex arguments, needed as a vortex
    /// background flow.
    pub fn with_complex(
        mut self,
        w: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.complex_value = Some(Arc::new(w));
        self
    }
}

impl fmt::Debug for CustomSuperpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSuperpotential")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("antiderivative", &self.antiderivative.is_some())
            .field("complex", &self.complex_value.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Superpotential {
    /// `W(x) = x`
    Harmonic,
    /// `W(r) = 1/2 - (l + 1)/r` on `r > 0`
    Coulomb { l: u32 },
    /// `W(x) = p/(1 - x) - q/(1 + x)` on `(-1, 1)`: repulsive charges `p`
    /// at +1 and `q` at -1.
    Jacobi { p: f64, q: f64 },
    Custom(CustomSuperpotential),
}

impl Superpotential {
    pub fn jacobi(p: f64, q: f64) -> Result<Self, SuperpotentialError> {
        for (name, value) in [("p", p), ("q", q)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SuperpotentialError::Parameter { name, value });
            }
        }
        Ok(Superpotential::Jacobi { p, q })
    }

    /// `W(x) = c` on the whole line.
    pub fn constant(c: f64) -> Self {
        Superpotential::Custom(
            CustomSuperpotential::new(format!("constant({c})"), Domain::REAL_LINE, move |_| c, |_| 0.0)
                .with_antiderivative(move |x| c * x)
                .with_complex(move |_| Complex64::new(c, 0.0)),
        )
    }

    pub fn name(&self) -> String {
        match self {
            Superpotential::Harmonic => "harmonic".into(),
            Superpotential::Coulomb { l } => format!("coulomb(l={l})"),
            Superpotential::Jacobi { p, q } => format!("jacobi(p={p},q={q})"),
            Superpotential::Custom(c) => c.name.clone(),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Superpotential::Harmonic => Domain::REAL_LINE,
            Superpotential::Coulomb { .. } => Domain {
                lower: 0.0,
                upper: f64::INFINITY,
            },
            Superpotential::Jacobi { .. } => Domain {
                lower: -1.0,
                upper: 1.0,
            },
            Superpotential::Custom(c) => c.domain,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Superpotential::Harmonic => x,
            Superpotential::Coulomb { l } => 0.5 - (*l as f64 + 1.0) / x,
            Superpotential::Jacobi { p, q } => p / (1.0 - x) - q / (1.0 + x),
            Superpotential::Custom(c) => (c.value)(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Superpotential::Harmonic => 1.0,
            Superpotential::Coulomb { l } => (*l as f64 + 1.0) / (x * x),
            Superpotential::Jacobi { p, q } => p / (1.0 - x).powi(2) + q / (1.0 + x).powi(2),
            Superpotential::Custom(c) => (c.derivative)(x),
        }
    }

    /// `U(x)` with `U' = W`, if known in closed form.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        match self {
            Superpotential::Harmonic => Some(0.5 * x * x),
            Superpotential::Coulomb { l } => Some(0.5 * x - (*l as f64 + 1.0) * x.ln()),
            Superpotential::Jacobi { p, q } => Some(-p * (1.0 - x).ln() - q * (1.0 + x).ln()),
            Superpotential::Custom(c) => c.antiderivative.as_ref().map(|u| u(x)),
        }
    }

    pub fn has_antiderivative(&self) -> bool {
        match self {
            Superpotential::Custom(c) => c.antiderivative.is_some(),
            _ => true,
        }
    }

    /// Rational continuation of `W` to the complex plane.
    pub fn value_complex(&self, z: Complex64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Superpotential::Harmonic => Some(z),
            Superpotential::Coulomb { l } => Some(0.5 - (*l as f64 + 1.0) / z),
            Superpotential::Jacobi { p, q } => Some(*p / (one - z) - *q / (one + z)),
            Superpotential::Custom(c) => c.complex_value.as_ref().map(|w| w(z)),
        }
    }
}

/// Serializable description of the non-custom superpotentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuperpotentialConfig {
    Harmonic,
    Coulomb { l: u32 },
    Jacobi { p: f64, q: f64 },
}

impl TryFrom<SuperpotentialConfig> for Superpotential {
    type Error = SuperpotentialError;

    fn try_from(cfg: SuperpotentialConfig) -> Result<Self, Self::Error> {
        match cfg {
            SuperpotentialConfig::Harmonic => Ok(Superpotential::Harmonic),
            SuperpotentialConfig::Coulomb { l } => Ok(Superpotential::Coulomb { l }),
            SuperpotentialConfig::Jacobi { p, q } => Superpotential::jacobi(p, q),
        }
    }
}
