//! Physical and scale constants shared by the solvers.

use crate::error::{PolarError, Result};

/// Relative slack accepted when validating `lambda * p_lambda = h`.
pub const LAMBDA_PAIR_TOLERANCE: f64 = 1e-12;

/// Physical constants (hbar, m, c) plus optional scale constants used by
/// specific checks: a length `lambda` paired with a momentum `p_lambda`
/// (their product must equal Planck's constant `h`), a separation
/// constant `sep_c` with dimension mass/time, a separation energy
/// `sep_e`, and an integration constant `static_a` for the static
/// telegraph profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    pub lambda: Option<f64>,
    pub p_lambda: Option<f64>,
    pub sep_e: Option<f64>,
    pub sep_c: Option<f64>,
    pub static_a: Option<f64>,
}

impl Constants {
    pub fn new(hbar: f64, m: f64, c: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("m", m), ("c", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PolarError::InvalidConstant(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Self {
            hbar,
            m,
            c,
            lambda: None,
            p_lambda: None,
            sep_e: None,
            sep_c: None,
            static_a: None,
        })
    }

    /// Natural units: hbar = m = c = 1.
    pub fn natural() -> Self {
        Self::new(1.0, 1.0, 1.0).expect("positive constants")
    }

    /// Massless limit (`m = 0` exactly) for the wave-equation cases:
    /// chiral transport, the d'Alembert limits of the Klein-Gordon and
    /// telegraph equations. Checks that divide by the mass reject these
    /// constants instead of producing infinities.
    pub fn massless(hbar: f64, c: f64) -> Result<Self> {
        let mut k = Self::new(hbar, 1.0, c)?;
        k.m = 0.0;
        Ok(k)
    }

    /// Planck constant `h = 2 pi hbar`.
    pub fn h(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }

    /// Attach the length/momentum scale pair, enforcing
    /// `lambda * p_lambda = h` to relative accuracy
    /// [`LAMBDA_PAIR_TOLERANCE`].
    pub fn with_lambda_pair(mut self, lambda: f64, p_lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && p_lambda > 0.0) {
            return Err(PolarError::InvalidConstant(
                "lambda and p_lambda must be positive".into(),
            ));
        }
        let h = self.h();
        if ((lambda * p_lambda - h) / h).abs() > LAMBDA_PAIR_TOLERANCE {
            return Err(PolarError::InvalidConstant(format!(
                "lambda * p_lambda = {} must equal h = {}",
                lambda * p_lambda,
                h
            )));
        }
        self.lambda = Some(lambda);
        self.p_lambda = Some(p_lambda);
        Ok(self)
    }

    /// Attach `lambda` and derive the paired momentum `p_lambda = h / lambda`.
    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        let h = self.h();
        self.with_lambda_pair(lambda, h / lambda)
    }

    /// The scale pair, or an error for checks that require it.
    pub fn lambda_pair(&self) -> Result<(f64, f64)> {
        match (self.lambda, self.p_lambda) {
            (Some(l), Some(p)) => Ok((l, p)),
            _ => Err(PolarError::InvalidConstant(
                "this check requires the lambda / p_lambda scale pair".into(),
            )),
        }
    }
}
