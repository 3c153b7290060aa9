//! Real and complex node fields on a uniform grid, plus CSV round trips.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{PolarError, Result};
use crate::grid::Grid1D;
use crate::stencil;

/// Real-valued field: one finite value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField1D {
    grid: Grid1D,
    values: Vec<f64>,
}

impl RealField1D {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PolarError::InvalidField(format!(
                "value count {} does not match grid node count {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PolarError::InvalidField("non-finite value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid1D, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![value; n])
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First spatial derivative (second-order stencils, see [`crate::stencil`]).
    pub fn d1(&self) -> RealField1D {
        RealField1D {
            grid: self.grid.clone(),
            values: stencil::d1(&self.values, self.grid.dx()),
        }
    }

    /// Second spatial derivative (second-order stencils).
    pub fn d2(&self) -> RealField1D {
        RealField1D {
            grid: self.grid.clone(),
            values: stencil::d2(&self.values, self.grid.dx()),
        }
    }

    /// Pointwise map with the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField1D {
        RealField1D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip(&self, other: &RealField1D, f: impl Fn(f64, f64) -> f64) -> RealField1D {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        RealField1D {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Field sampled on every other node (grid spacing doubled).
    pub fn coarsen(&self) -> Option<RealField1D> {
        let grid = self.grid.coarsen()?;
        let values = self.values.iter().copied().step_by(2).collect();
        Some(RealField1D { grid, values })
    }

    /// Trapezoid cumulative integral, zero at the left edge.
    pub fn cumulative_integral(&self) -> RealField1D {
        let dx = self.grid.dx();
        let mut out = Vec::with_capacity(self.values.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dx;
            out.push(acc);
        }
        RealField1D { grid: self.grid.clone(), values: out }
    }

    /// Trapezoid integral over the whole grid.
    pub fn integral(&self) -> f64 {
        let dx = self.grid.dx();
        let n = self.values.len();
        let mut acc = 0.5 * (self.values[0] + self.values[n - 1]);
        for &v in &self.values[1..n - 1] {
            acc += v;
        }
        acc * dx
    }

    /// CSV dump with header `x,value`, 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.grid.x(i), v)?;
        }
        Ok(())
    }

    /// Read a field written by [`RealField1D::write_csv`].
    pub fn read_csv(r: &mut impl BufRead) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if lineno == 0 {
                if line != "x,value" {
                    return Err(PolarError::InvalidField(format!(
                        "expected header 'x,value', got '{line}'"
                    )));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let x = parse_float(parts.next(), lineno)?;
            let v = parse_float(parts.next(), lineno)?;
            xs.push(x);
            vs.push(v);
        }
        let grid = grid_from_nodes(&xs)?;
        RealField1D::new(grid, vs)
    }
}

/// Complex-valued field: one finite complex value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField1D {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PolarError::InvalidField(format!(
                "value count {} does not match grid node count {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(PolarError::InvalidField("non-finite value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Real part as a field.
    pub fn re(&self) -> RealField1D {
        RealField1D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }

    /// Imaginary part as a field.
    pub fn im(&self) -> RealField1D {
        RealField1D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.im).collect(),
        }
    }

    /// Discrete squared norm `sum |psi|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// CSV dump with header `x,re,im`, 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "x,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", self.grid.x(i), v.re, v.im)?;
        }
        Ok(())
    }

    /// Read a field written by [`ComplexField1D::write_csv`].
    pub fn read_csv(r: &mut impl BufRead) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if lineno == 0 {
                if line != "x,re,im" {
                    return Err(PolarError::InvalidField(format!(
                        "expected header 'x,re,im', got '{line}'"
                    )));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let x = parse_float(parts.next(), lineno)?;
            let re = parse_float(parts.next(), lineno)?;
            let im = parse_float(parts.next(), lineno)?;
            xs.push(x);
            vs.push(Complex64::new(re, im));
        }
        let grid = grid_from_nodes(&xs)?;
        ComplexField1D::new(grid, vs)
    }
}

/// Real field where some nodes are flagged as untrusted (for example
/// quotients evaluated where the denominator amplitude underflows).
/// Flagged nodes carry a placeholder of zero and are excluded from norms.
#[derive(Debug, Clone)]
pub struct FlaggedField1D {
    grid: Grid1D,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl FlaggedField1D {
    pub fn new(grid: Grid1D, values: Vec<f64>, valid: Vec<bool>) -> Self {
        assert_eq!(values.len(), grid.len());
        assert_eq!(valid.len(), grid.len());
        Self { grid, values, valid }
    }

    /// Wrap a fully trusted field.
    pub fn trusted(field: RealField1D) -> Self {
        let valid = vec![true; field.len()];
        Self { grid: field.grid, values: field.values, valid }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn value_at(&self, i: usize) -> Option<f64> {
        self.valid[i].then(|| self.values[i])
    }

    pub fn flagged_fraction(&self) -> f64 {
        let bad = self.valid.iter().filter(|v| !**v).count();
        bad as f64 / self.valid.len() as f64
    }
}

fn parse_float(part: Option<&str>, lineno: usize) -> Result<f64> {
    part.and_then(|p| p.trim().parse::<f64>().ok())
        .ok_or_else(|| PolarError::InvalidField(format!("bad number on line {}", lineno + 1)))
}

fn grid_from_nodes(xs: &[f64]) -> Result<Grid1D> {
    if xs.len() < 3 {
        return Err(PolarError::InvalidGrid(format!(
            "need at least 3 nodes, got {}",
            xs.len()
        )));
    }
    Grid1D::new(xs[0], xs[xs.len() - 1], xs.len())
}
