//! Canonical flows treating the amplitude and the action as generalized
//! coordinates.
//!
//! With momenta `p_S = grad S` and `p_R = hbar grad R`, and the scale
//! pair `lambda * p_lambda = h` making the coordinates dimensionally
//! uniform, the closed subsystem `(R, S, p_S)` evolves linearly:
//! `dR/dt = p_S / (lambda m)`, `dS/dt = p_lambda p_S / m`, and `p_S` is
//! constant whenever the external potential does not depend on `S`.
//! Eliminating time gives `dS/dR = lambda p_lambda = h`, i.e. `S = h R`
//! up to a constant — the relation the trajectory checks certify.
//! The rate of `p_R` depends on spatial field profiles that the ODE
//! state does not carry, so it is exposed only as a pointwise
//! diagnostic on supplied `(R, S)` fields.

use crate::constants::Constants;
use crate::error::{PolarError, Result};
use crate::field::{FlaggedField1D, RealField1D};
use crate::polar::NODE_MASK_RELATIVE;
use crate::report::ResidualReport;

/// Point of a canonical trajectory. `p_r` is carried along unchanged by
/// the reduced flow (its rate is a field diagnostic, not part of the
/// closed ODE).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub p_r: f64,
    pub p_s: f64,
}

impl CanonicalState {
    pub fn new(t: f64, r: f64, s: f64, p_r: f64, p_s: f64) -> Result<Self> {
        for (name, v) in [("t", t), ("r", r), ("s", s), ("p_r", p_r), ("p_s", p_s)] {
            if !v.is_finite() {
                return Err(PolarError::InvalidConstant(format!("{name} must be finite")));
            }
        }
        Ok(Self { t, r, s, p_r, p_s })
    }

    /// Length-dimension coordinate `lambda * R`.
    pub fn r_scaled(&self, lambda: f64) -> f64 {
        lambda * self.r
    }

    /// Length-dimension coordinate `S / p_lambda`.
    pub fn s_scaled(&self, p_lambda: f64) -> f64 {
        self.s / p_lambda
    }
}

/// Uniformly sampled canonical trajectory.
#[derive(Debug, Clone)]
pub struct CanonicalTrajectory {
    states: Vec<CanonicalState>,
    dt: f64,
}

impl CanonicalTrajectory {
    /// Build from precomputed states with uniform, strictly increasing
    /// time stamps.
    pub fn from_states(states: Vec<CanonicalState>, dt: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(PolarError::InvalidConstant("empty trajectory".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PolarError::InvalidConstant(format!(
                "dt must be positive, got {dt}"
            )));
        }
        for w in states.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(PolarError::InvalidConstant(
                    "time stamps must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { states, dt })
    }

    pub fn states(&self) -> &[CanonicalState] {
        &self.states
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn first(&self) -> &CanonicalState {
        self.states.first().expect("non-empty")
    }

    pub fn last(&self) -> &CanonicalState {
        self.states.last().expect("non-empty")
    }

    /// Largest relative drift of `p_S` from its initial value.
    pub fn p_s_drift(&self) -> f64 {
        let p0 = self.first().p_s;
        let scale = p0.abs().max(f64::MIN_POSITIVE);
        self.states
            .iter()
            .map(|st| (st.p_s - p0).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// Least-squares slope of `S` against `R` along the trajectory.
    /// Returns `None` when `R` does not move.
    pub fn slope_ds_dr(&self) -> Option<f64> {
        let n = self.states.len() as f64;
        let mean_r = self.states.iter().map(|s| s.r).sum::<f64>() / n;
        let mean_s = self.states.iter().map(|s| s.s).sum::<f64>() / n;
        let mut cov = 0.0;
        let mut var = 0.0;
        for st in &self.states {
            cov += (st.r - mean_r) * (st.s - mean_s);
            var += (st.r - mean_r) * (st.r - mean_r);
        }
        (var > 0.0).then(|| cov / var)
    }

    /// CSV dump with header `t,R,S,pR,pS`.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        writeln!(w, "t,R,S,pR,pS")?;
        for st in &self.states {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                st.t, st.r, st.s, st.p_r, st.p_s
            )?;
        }
        Ok(())
    }
}

/// Potential dependence accepted by the reduced flow. Only the cases
/// that close the `(R, S, p_S)` subsystem are integrable here: no
/// potential, or a potential depending on the amplitude alone (then
/// `dV/dS = 0` exactly).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialDependence {
    None,
    AmplitudeOnly,
    /// A potential coupling to the action would feed unknown field
    /// profiles back into the flow; rejected.
    ActionDependent,
}

/// Symplectic-Euler integration of the reduced canonical system.
///
/// The momentum update runs first; for the supported potential kinds it
/// is exactly zero, so `p_S` is carried bitwise and the coordinate flow
/// is linear.
pub fn integrate_reduced(
    state0: CanonicalState,
    consts: &Constants,
    dependence: PotentialDependence,
    dt: f64,
    n_steps: usize,
) -> Result<CanonicalTrajectory> {
    if dependence == PotentialDependence::ActionDependent {
        return Err(PolarError::UnsupportedSystem(
            "potentials coupling to the action do not close the reduced system".into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PolarError::Config(format!("dt must be positive, got {dt}")));
    }
    let (lambda, p_lambda) = consts.lambda_pair()?;
    let m = consts.m;

    let mut states = Vec::with_capacity(n_steps + 1);
    let mut st = state0;
    states.push(st);
    for k in 1..=n_steps {
        // momentum first: dp_S/dt = -p_lambda dV/dS = 0 for both kinds
        let p_s = st.p_s;
        st.r += dt * p_s / (lambda * m);
        st.s += dt * p_lambda * p_s / m;
        st.t = state0.t + k as f64 * dt;
        st.p_s = p_s;
        states.push(st);
    }
    Ok(CanonicalTrajectory { states, dt })
}

/// Reduced action Hamiltonian `H_S = p_S^2 / 2m + V` (the amplitude
/// curvature term drops for the closed cases). Finite-differencing this
/// in `p_S` must reproduce the integrated rate `dS/dt / p_lambda`.
pub fn reduced_action_hamiltonian(p_s: f64, m: f64, v: f64) -> f64 {
    p_s * p_s / (2.0 * m) + v
}

/// Quantization bookkeeping for constant amplitude: winding the phase
/// circle an integer number of times leaves the state unchanged, so the
/// admissible actions are the integer multiples of `hbar`. Reports how
/// the `S = h R` value sits among them; asserts nothing.
#[derive(Debug, Clone)]
pub struct WindingReport {
    /// `S` from the linear relation, `h * R`.
    pub s_from_relation: f64,
    /// Admissible actions `n * hbar` for `|n| <= n_max`.
    pub admissible: Vec<f64>,
    /// Integer `n` whose `n * hbar` lies closest to `h * R`.
    pub nearest_n: i64,
    /// Distance from `h * R` to that nearest level.
    pub gap: f64,
}

pub fn winding_report(r: f64, consts: &Constants, n_max: i64) -> WindingReport {
    let s = consts.h() * r;
    let admissible = (-n_max..=n_max).map(|n| n as f64 * consts.hbar).collect();
    let nearest_n = (s / consts.hbar).round() as i64;
    let gap = (s - nearest_n as f64 * consts.hbar).abs();
    WindingReport { s_from_relation: s, admissible, nearest_n, gap }
}

/// Pointwise rate of the amplitude momentum on supplied field profiles:
/// `dp_R/dt = (hbar / (2 m lambda S)) ((grad S)^2 - div(S grad S))`.
/// Nodes where `S` underflows are flagged. Diagnostic only — the value
/// is never fed back into the reduced flow.
pub fn p_r_rate_diagnostic(
    _r: &RealField1D,
    s: &RealField1D,
    consts: &Constants,
) -> Result<FlaggedField1D> {
    let (lambda, _) = consts.lambda_pair()?;
    let m = consts.m;
    let hbar = consts.hbar;
    let ds = s.d1();
    let flux_div = s.zip(&ds, |a, b| a * b).d1();
    let eps = NODE_MASK_RELATIVE * s.max_abs();
    let n = s.len();
    let mut values = vec![0.0; n];
    let mut valid = vec![true; n];
    for i in 0..n {
        let si = s.values()[i];
        if si.abs() < eps || si == 0.0 {
            valid[i] = false;
        } else {
            let p = ds.values()[i];
            values[i] = hbar / (2.0 * m * si * lambda) * (p * p - flux_div.values()[i]);
        }
    }
    Ok(FlaggedField1D::new(s.grid().clone(), values, valid))
}

/// Residuals of the split with an action-dependent potential: the
/// amplitude then obeys a Helmholtz equation
/// `lap R + (2 m E_S / hbar^2) R = 0`, and the energy balance reads
/// `E_S = p_S^2/2m + V_T` with total potential
/// `V_T = -(V + S lap S / m)`.
#[derive(Debug, Clone)]
pub struct ActionSplitReport {
    pub helmholtz: ResidualReport,
    pub energy_balance: ResidualReport,
}

pub fn spin_split_residuals(
    r: &RealField1D,
    s: &RealField1D,
    v_of_s: &RealField1D,
    e_s: f64,
    consts: &Constants,
) -> ActionSplitReport {
    let m = consts.m;
    let hbar = consts.hbar;
    let coeff = 2.0 * m * e_s / (hbar * hbar);
    let helmholtz_field = r.d2().zip(r, move |lap, ri| lap + coeff * ri);
    let helmholtz = ResidualReport::from_residual(
        "amplitude helmholtz equation",
        &FlaggedField1D::trusted(helmholtz_field),
    );

    let ds = s.d1();
    let d2s = s.d2();
    let n = s.len();
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let v_t = -(v_of_s.values()[i] + s.values()[i] * d2s.values()[i] / m);
            e_s - ds.values()[i] * ds.values()[i] / (2.0 * m) - v_t
        })
        .collect();
    let energy_field = FlaggedField1D::new(s.grid().clone(), values, vec![true; n]);
    let energy_balance = ResidualReport::from_residual("action energy balance", &energy_field);
    ActionSplitReport { helmholtz, energy_balance }
}
