//! Time-dependent Schrödinger solver and the split-equation checks.
//!
//! Substituting `psi = R exp(iS/hbar)` into the Schrödinger equation and
//! separating real and imaginary parts yields the quantum Hamilton-Jacobi
//! equation for `S` (with the quantum potential term) and the continuity
//! equation for `R`. This module advances `psi` with Crank-Nicolson and
//! evaluates both split equations, the quantum and spin potentials, the
//! spin force in its two algebraic forms, the quadratic separation
//! profile, and the spin-density rates.

use num_complex::Complex64;

use crate::constants::Constants;
use crate::error::{PolarError, Result};
use crate::field::{ComplexField1D, FlaggedField1D, RealField1D};
use crate::grid::Grid1D;
use crate::polar::{self, PolarPair, NODE_MASK_RELATIVE};
use crate::report::ResidualReport;

/// External potential evaluated at the grid nodes.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Free,
    Harmonic { omega: f64 },
    Tabulated(RealField1D),
}

impl PotentialSpec {
    pub fn harmonic(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(PolarError::InvalidConstant(format!(
                "harmonic frequency must be positive, got {omega}"
            )));
        }
        Ok(Self::Harmonic { omega })
    }

    /// Potential values on `grid`. A tabulated potential must live on the
    /// same grid.
    pub fn eval_on(&self, grid: &Grid1D, m: f64) -> Result<Vec<f64>> {
        match self {
            Self::Free => Ok(vec![0.0; grid.len()]),
            Self::Harmonic { omega } => Ok(grid
                .nodes()
                .iter()
                .map(|&x| 0.5 * m * omega * omega * x * x)
                .collect()),
            Self::Tabulated(f) => {
                if f.grid() != grid {
                    return Err(PolarError::InvalidField(
                        "tabulated potential grid does not match".into(),
                    ));
                }
                Ok(f.values().to_vec())
            }
        }
    }
}

/// Solution snapshots at uniform time steps, `t_k = k * dt`.
#[derive(Debug, Clone)]
pub struct WaveHistory {
    grid: Grid1D,
    dt: f64,
    snapshots: Vec<ComplexField1D>,
}

impl WaveHistory {
    pub fn new(dt: f64, snapshots: Vec<ComplexField1D>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PolarError::InvalidConstant(format!(
                "dt must be positive, got {dt}"
            )));
        }
        let grid = snapshots
            .first()
            .ok_or_else(|| PolarError::InvalidField("history needs snapshots".into()))?
            .grid()
            .clone();
        if snapshots.iter().any(|s| s.grid() != &grid) {
            return Err(PolarError::InvalidField(
                "snapshots live on different grids".into(),
            ));
        }
        Ok(Self { grid, dt, snapshots })
    }

    /// Sample an analytic solution `f(x, t)` on `levels` time levels.
    /// Useful for injecting exact solutions into the residual checks.
    pub fn from_fn(
        grid: Grid1D,
        dt: f64,
        levels: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let snapshots = (0..levels)
            .map(|k| {
                let t = k as f64 * dt;
                ComplexField1D::from_fn(grid.clone(), |x| f(x, t))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dt, snapshots)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, k: usize) -> &ComplexField1D {
        &self.snapshots[k]
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Decomposed polar snapshots at `t_index - 1, t_index, t_index + 1`
    /// with the action aligned in time node by node, so centered time
    /// differences of `S` do not alias across phase windings.
    pub fn polar_triplet(&self, hbar: f64, t_index: usize) -> Result<[PolarPair; 3]> {
        if t_index == 0 || t_index + 1 >= self.snapshots.len() {
            return Err(PolarError::Config(format!(
                "t_index {t_index} needs one neighbor on each side (history length {})",
                self.snapshots.len()
            )));
        }
        Ok(polar::aligned_triplet(
            [
                &self.snapshots[t_index - 1],
                &self.snapshots[t_index],
                &self.snapshots[t_index + 1],
            ],
            hbar,
        ))
    }
}

/// Crank-Nicolson step of `i hbar psi_t = -(hbar^2/2m) psi_xx + V psi`
/// with homogeneous Dirichlet boundaries. The scheme is unitary in the
/// discrete norm, so `sum |psi|^2 dx` is conserved up to rounding.
pub fn solve_tdse(
    psi0: &ComplexField1D,
    potential: &PotentialSpec,
    consts: &Constants,
    dt: f64,
    n_steps: usize,
) -> Result<WaveHistory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PolarError::Config(format!("dt must be positive, got {dt}")));
    }
    let grid = psi0.grid().clone();
    let n = grid.len();
    let v = potential.eval_on(&grid, consts.m)?;
    let k = consts.hbar * consts.hbar / (2.0 * consts.m * grid.dx() * grid.dx());
    let sigma = dt / (2.0 * consts.hbar);

    // Dirichlet: the edge values are pinned to zero throughout.
    let mut current = psi0.values().to_vec();
    current[0] = Complex64::ZERO;
    current[n - 1] = Complex64::ZERO;

    let off = Complex64::new(0.0, -sigma * k);
    let diag: Vec<Complex64> = (1..n - 1)
        .map(|j| Complex64::new(1.0, sigma * (2.0 * k + v[j])))
        .collect();

    let mut snapshots = Vec::with_capacity(n_steps + 1);
    snapshots.push(ComplexField1D::new(grid.clone(), current.clone())?);

    let mut rhs = vec![Complex64::ZERO; n - 2];
    let mut scratch_c = vec![Complex64::ZERO; n - 2];
    let mut scratch_d = vec![Complex64::ZERO; n - 2];
    for step in 0..n_steps {
        for j in 1..n - 1 {
            let coupling = Complex64::new(0.0, sigma * k) * (current[j - 1] + current[j + 1]);
            let center = Complex64::new(1.0, -sigma * (2.0 * k + v[j])) * current[j];
            rhs[j - 1] = center + coupling;
        }
        thomas_solve(&diag, off, &rhs, &mut scratch_c, &mut scratch_d).map_err(|detail| {
            PolarError::SolverDiverged { step, detail }
        })?;
        current[1..n - 1].copy_from_slice(&scratch_d);
        snapshots.push(ComplexField1D::new(grid.clone(), current.clone())?);
    }
    WaveHistory::new(dt, snapshots)
}

/// Tridiagonal solve with constant off-diagonal; writes the solution into
/// `d_out`. Fails on a vanishing pivot.
fn thomas_solve(
    diag: &[Complex64],
    off: Complex64,
    rhs: &[Complex64],
    c_out: &mut [Complex64],
    d_out: &mut [Complex64],
) -> std::result::Result<(), String> {
    let n = diag.len();
    let mut beta = diag[0];
    if beta.norm() == 0.0 {
        return Err("zero pivot at row 0".into());
    }
    c_out[0] = off / beta;
    d_out[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - off * c_out[i - 1];
        if beta.norm() == 0.0 {
            return Err(format!("zero pivot at row {i}"));
        }
        c_out[i] = off / beta;
        d_out[i] = (rhs[i] - off * d_out[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = d_out[i + 1];
        d_out[i] -= c_out[i] * next;
    }
    Ok(())
}

/// Residuals of the two split Schrödinger equations on decomposed
/// snapshots: the Hamilton-Jacobi balance
/// `S_t + (grad S)^2/2m + V - (hbar^2/2m) lap R / R`
/// and the continuity balance
/// `R_t + (R lap S + 2 grad R . grad S) / 2m`.
#[derive(Debug, Clone)]
pub struct MadelungResiduals {
    pub hj: FlaggedField1D,
    pub continuity: FlaggedField1D,
    pub hj_report: ResidualReport,
    pub continuity_report: ResidualReport,
    pub masked_fraction: f64,
    /// Set when more than 20% of nodes are masked.
    pub untrusted: bool,
}

pub fn madelung_residuals(
    hist: &WaveHistory,
    potential: &PotentialSpec,
    consts: &Constants,
    t_index: usize,
) -> Result<MadelungResiduals> {
    let [prev, curr, next] = hist.polar_triplet(consts.hbar, t_index)?;
    let v = potential.eval_on(hist.grid(), consts.m)?;
    let dt = hist.dt();
    let m = consts.m;
    let hbar = consts.hbar;
    let n = hist.grid().len();

    let mask: Vec<bool> = (0..n)
        .map(|i| prev.mask()[i] || curr.mask()[i] || next.mask()[i])
        .collect();

    let s_t: Vec<f64> = (0..n)
        .map(|i| (next.s().values()[i] - prev.s().values()[i]) / (2.0 * dt))
        .collect();
    let r_t: Vec<f64> = (0..n)
        .map(|i| (next.r().values()[i] - prev.r().values()[i]) / (2.0 * dt))
        .collect();

    let ds = curr.s().d1();
    let d2s = curr.s().d2();
    let dr = curr.r().d1();
    let d2r = curr.r().d2();
    let r = curr.r().values();

    let mut hj_vals = vec![0.0; n];
    let mut cont_vals = vec![0.0; n];
    for i in 0..n {
        if !mask[i] {
            let quantum = -(hbar * hbar / (2.0 * m)) * d2r.values()[i] / r[i];
            hj_vals[i] =
                s_t[i] + ds.values()[i] * ds.values()[i] / (2.0 * m) + v[i] + quantum;
            cont_vals[i] = r_t[i]
                + (r[i] * d2s.values()[i] + 2.0 * dr.values()[i] * ds.values()[i]) / (2.0 * m);
        }
    }
    let valid: Vec<bool> = mask.iter().map(|m| !m).collect();
    let hj = FlaggedField1D::new(hist.grid().clone(), hj_vals, valid.clone());
    let continuity = FlaggedField1D::new(hist.grid().clone(), cont_vals, valid);
    let hj_report = ResidualReport::from_residual("hamilton-jacobi balance", &hj);
    let continuity_report = ResidualReport::from_residual("continuity balance", &continuity);
    let masked_fraction = hj.flagged_fraction();
    Ok(MadelungResiduals {
        untrusted: masked_fraction > 0.2,
        hj,
        continuity,
        hj_report,
        continuity_report,
        masked_fraction,
    })
}

/// Quantum potential `V_Q = -(hbar^2/2m) lap R / R`.
///
/// Nodes where the amplitude underflows are flagged rather than divided
/// through. Scale invariant under `R -> beta R` by construction.
pub fn quantum_potential(r: &RealField1D, consts: &Constants) -> FlaggedField1D {
    let d2r = r.d2();
    let eps = NODE_MASK_RELATIVE * r.max_abs();
    let n = r.len();
    let mut values = vec![0.0; n];
    let mut valid = vec![true; n];
    let coeff = -consts.hbar * consts.hbar / (2.0 * consts.m);
    for i in 0..n {
        if r.values()[i].abs() < eps || r.values()[i] == 0.0 {
            valid[i] = false;
        } else {
            values[i] = coeff * d2r.values()[i] / r.values()[i];
        }
    }
    FlaggedField1D::new(r.grid().clone(), values, valid)
}

/// Spin potential `V_S = -S lap S / m`: the phase-curvature analogue of
/// the quantum potential. Scales quadratically under `S -> beta S`.
pub fn spin_potential(s: &RealField1D, consts: &Constants) -> RealField1D {
    let d2s = s.d2();
    let m = consts.m;
    s.zip(&d2s, move |si, d2si| -si * d2si / m)
}

/// The spin force in its two algebraically equal forms.
#[derive(Debug, Clone)]
pub struct SpinForce {
    /// `S lap v + (lap S) v` with `v = grad S / m`.
    pub direct: RealField1D,
    /// `-grad V_S`.
    pub gradient: RealField1D,
}

pub fn spin_force(s: &RealField1D, consts: &Constants) -> SpinForce {
    let m = consts.m;
    let v = s.d1().map(move |p| p / m);
    let d2v = v.d2();
    let d2s = s.d2();
    let direct = s
        .zip(&d2v, |si, d2vi| si * d2vi)
        .zip(&d2s.zip(&v, |a, b| a * b), |x, y| x + y);
    let gradient = spin_potential(s, consts).d1().map(|g| -g);
    SpinForce { direct, gradient }
}

/// Quadratic action profile `S(x) = 2mE/C + (C/4) x^2` solving the
/// separated phase equation `S lap S / m - (grad S)^2 / 2m = E` in one
/// dimension. `C` carries dimension mass/time and must be nonzero.
pub fn separation_solution(e: f64, c_sep: f64, m: f64, grid: &Grid1D) -> Result<RealField1D> {
    if c_sep == 0.0 || !c_sep.is_finite() {
        return Err(PolarError::InvalidConstant(format!(
            "separation constant must be nonzero and finite, got {c_sep}"
        )));
    }
    RealField1D::from_fn(grid.clone(), |x| 2.0 * m * e / c_sep + 0.25 * c_sep * x * x)
}

/// Residual of the stationary amplitude equation
/// `-(hbar^2/2m) lap R + V R = -E R` (total energy `-E`), reported as
/// `-(hbar^2/2m) lap R + V R + E R`.
pub fn stationary_r_residual(
    r: &RealField1D,
    potential: &PotentialSpec,
    e: f64,
    consts: &Constants,
) -> Result<ResidualReport> {
    let v = potential.eval_on(r.grid(), consts.m)?;
    let d2r = r.d2();
    let coeff = -consts.hbar * consts.hbar / (2.0 * consts.m);
    let n = r.len();
    let values: Vec<f64> = (0..n)
        .map(|i| coeff * d2r.values()[i] + (v[i] + e) * r.values()[i])
        .collect();
    let field = FlaggedField1D::new(r.grid().clone(), values, vec![true; n]);
    Ok(ResidualReport::from_residual(
        "stationary amplitude equation",
        &field,
    ))
}

/// Rates and balances of the spin density `R^2 S`.
#[derive(Debug, Clone)]
pub struct SpinDensityReport {
    /// Centered time rate of the expectation `<S> = sum R^2 S dx`.
    pub d_expectation_dt: f64,
    /// Expectation at the center snapshot.
    pub expectation: f64,
    /// Pointwise density balance combining both split equations:
    /// `d(R^2 S)/dt + R^2 (grad S)^2/2m + R^2 V - (hbar^2/2m) R lap R
    ///  + R^2 S lap S / m + 2 R S (grad R . grad S)/m`.
    pub balance: FlaggedField1D,
    pub balance_report: ResidualReport,
    /// Transport form assuming the spin is conserved:
    /// `d(R^2 S)/dt + 2 R S (grad S . grad R)/m + R^2 (grad S)^2/m`.
    /// Reported, never asserted: it vanishes only for conserved spin.
    pub transport_imbalance: FlaggedField1D,
    pub transport_report: ResidualReport,
    pub masked_fraction: f64,
    pub untrusted: bool,
}

pub fn spin_density_rate(
    hist: &WaveHistory,
    potential: &PotentialSpec,
    consts: &Constants,
    t_index: usize,
) -> Result<SpinDensityReport> {
    let [prev, curr, next] = hist.polar_triplet(consts.hbar, t_index)?;
    let v = potential.eval_on(hist.grid(), consts.m)?;
    let dt = hist.dt();
    let m = consts.m;
    let hbar = consts.hbar;
    let n = hist.grid().len();
    let dx = hist.grid().dx();

    let weighted = |p: &PolarPair| -> Vec<f64> {
        (0..n)
            .map(|i| p.r().values()[i] * p.r().values()[i] * p.s().values()[i])
            .collect()
    };
    let w_prev = weighted(&prev);
    let w_curr = weighted(&curr);
    let w_next = weighted(&next);

    let expect = |w: &[f64]| w.iter().sum::<f64>() * dx;
    let d_expectation_dt = (expect(&w_next) - expect(&w_prev)) / (2.0 * dt);

    let mask: Vec<bool> = (0..n)
        .map(|i| prev.mask()[i] || curr.mask()[i] || next.mask()[i])
        .collect();
    let ds = curr.s().d1();
    let d2s = curr.s().d2();
    let dr = curr.r().d1();
    let d2r = curr.r().d2();
    let r = curr.r().values();
    let s = curr.s().values();

    let mut balance_vals = vec![0.0; n];
    let mut transport_vals = vec![0.0; n];
    for i in 0..n {
        if mask[i] {
            continue;
        }
        let w_t = (w_next[i] - w_prev[i]) / (2.0 * dt);
        let grad_s_sq = ds.values()[i] * ds.values()[i];
        balance_vals[i] = w_t
            + r[i] * r[i] * grad_s_sq / (2.0 * m)
            + r[i] * r[i] * v[i]
            - (hbar * hbar / (2.0 * m)) * r[i] * d2r.values()[i]
            + r[i] * r[i] * s[i] * d2s.values()[i] / m
            + 2.0 * r[i] * s[i] * dr.values()[i] * ds.values()[i] / m;
        transport_vals[i] = w_t
            + 2.0 * r[i] * s[i] * ds.values()[i] * dr.values()[i] / m
            + r[i] * r[i] * grad_s_sq / m;
    }
    let valid: Vec<bool> = mask.iter().map(|m| !m).collect();
    let balance = FlaggedField1D::new(hist.grid().clone(), balance_vals, valid.clone());
    let transport_imbalance = FlaggedField1D::new(hist.grid().clone(), transport_vals, valid);
    let balance_report = ResidualReport::from_residual("spin density balance", &balance);
    let transport_report =
        ResidualReport::from_residual("spin density transport form", &transport_imbalance);
    let masked_fraction = balance.flagged_fraction();
    Ok(SpinDensityReport {
        d_expectation_dt,
        expectation: expect(&w_curr),
        balance,
        balance_report,
        transport_imbalance,
        transport_report,
        untrusted: masked_fraction > 0.2,
        masked_fraction,
    })
}

/// Hamiltonian of the separated free system, `3 p^2 / 2m + E`: the usual
/// kinetic term plus an equal-size internal term contributed by the two
/// subfields, shifted by the separation energy.
pub fn separated_hamiltonian(p: f64, e: f64, m: f64) -> f64 {
    p * p / (2.0 * m) + p * p / m + e
}
