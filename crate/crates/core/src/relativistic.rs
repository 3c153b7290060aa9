//! Klein-Gordon and telegraph (damped wave) equations with their polar
//! splits.
//!
//! Both equations are second order in time and are advanced by a
//! three-level leapfrog with periodic boundaries; the telegraph damping
//! term is time-centered so the scheme stays second-order accurate and
//! explicit. The polar checks evaluate the amplitude and phase
//! equations obtained from `psi = R exp(iS/hbar)`, the light-cone phase
//! property, the effective subfield mass-squared expressions, the
//! hyperbola constraint on the phase gradients, and the static profile
//! obtained by integrating the time-independent amplitude equation.

use num_complex::Complex64;

use crate::constants::Constants;
use crate::error::{PolarError, Result};
use crate::field::{ComplexField1D, FlaggedField1D, RealField1D};
use crate::grid::Grid1D;
use crate::polar::{self, NODE_MASK_RELATIVE};
use crate::report::{convergence_order, ResidualReport};

/// Which second-order wave equation a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    KleinGordon,
    Telegraph,
}

impl WaveKind {
    fn damping(self, consts: &Constants) -> f64 {
        match self {
            Self::KleinGordon => 0.0,
            Self::Telegraph => 2.0 * consts.m / consts.hbar,
        }
    }
}

/// Snapshots of a second-order-in-time evolution (at least three levels,
/// so centered second time differences exist).
#[derive(Debug, Clone)]
pub struct SecondOrderHistory {
    grid: Grid1D,
    dt: f64,
    snapshots: Vec<ComplexField1D>,
}

impl SecondOrderHistory {
    pub fn new(dt: f64, snapshots: Vec<ComplexField1D>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PolarError::InvalidConstant(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if snapshots.len() < 3 {
            return Err(PolarError::InvalidField(
                "second-order history needs at least 3 levels".into(),
            ));
        }
        let grid = snapshots[0].grid().clone();
        if snapshots.iter().any(|s| s.grid() != &grid) {
            return Err(PolarError::InvalidField(
                "snapshots live on different grids".into(),
            ));
        }
        Ok(Self { grid, dt, snapshots })
    }

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
}

fn check_cfl(grid: &Grid1D, consts: &Constants, dt: f64) -> Result<()> {
    let limit = grid.dx() / consts.c;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PolarError::Config(format!("dt must be positive, got {dt}")));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(PolarError::Config(format!(
            "time step {dt} violates the stability limit dx/c = {limit}"
        )));
    }
    Ok(())
}

fn periodic_lap(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = values.len();
    let dx2 = dx * dx;
    (0..n)
        .map(|i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            (next - 2.0 * values[i] + prev) / dx2
        })
        .collect()
}

/// Leapfrog for the Klein-Gordon equation
/// `phi_tt / c^2 - phi_xx + (m c / hbar)^2 phi = 0`, periodic
/// boundaries, second-order Taylor start from `(phi0, phi_dot0)`.
pub fn solve_kg(
    phi0: &ComplexField1D,
    phi_dot0: &ComplexField1D,
    consts: &Constants,
    dt: f64,
    n_steps: usize,
) -> Result<SecondOrderHistory> {
    solve_second_order(phi0, phi_dot0, consts, dt, n_steps, WaveKind::KleinGordon)
}

/// Time-centered leapfrog for the telegraph equation
/// `psi_tt / c^2 - psi_xx + (2m/hbar) psi_t + (m c / hbar)^2 psi = 0`.
/// The damping term uses `(psi^{n+1} - psi^{n-1}) / 2 dt`, keeping the
/// update explicit and second-order accurate.
pub fn solve_telegraph(
    psi0: &ComplexField1D,
    psi_dot0: &ComplexField1D,
    consts: &Constants,
    dt: f64,
    n_steps: usize,
) -> Result<SecondOrderHistory> {
    solve_second_order(psi0, psi_dot0, consts, dt, n_steps, WaveKind::Telegraph)
}

fn solve_second_order(
    f0: &ComplexField1D,
    f_dot0: &ComplexField1D,
    consts: &Constants,
    dt: f64,
    n_steps: usize,
    kind: WaveKind,
) -> Result<SecondOrderHistory> {
    let grid = f0.grid().clone();
    if f_dot0.grid() != &grid {
        return Err(PolarError::InvalidField(
            "initial rate lives on a different grid".into(),
        ));
    }
    check_cfl(&grid, consts, dt)?;
    let n = grid.len();
    let c2 = consts.c * consts.c;
    let mu = consts.m * consts.c / consts.hbar;
    let gamma = kind.damping(consts); // 2m/hbar for telegraph, else 0

    let prev = f0.values().to_vec();
    // second-order start: f^1 = f^0 + dt f_dot + dt^2/2 f_ddot with
    // f_ddot from the equation itself
    let lap0 = periodic_lap(&prev, grid.dx());
    let mut first = vec![Complex64::ZERO; n];
    for i in 0..n {
        let f_ddot = c2 * (lap0[i] - mu * mu * prev[i] - gamma * f_dot0.values()[i]);
        first[i] = prev[i] + dt * f_dot0.values()[i] + 0.5 * dt * dt * f_ddot;
    }

    let mut snapshots = Vec::with_capacity(n_steps.max(1) + 1);
    snapshots.push(ComplexField1D::new(grid.clone(), prev.clone())?);
    snapshots.push(ComplexField1D::new(grid.clone(), first.clone())?);

    // (1/(c^2 dt^2) + gamma/(2 dt)) f^{n+1} =
    //   2 f^n / (c^2 dt^2) - (1/(c^2 dt^2) - gamma/(2 dt)) f^{n-1}
    //   + lap f^n - mu^2 f^n
    let a = 1.0 / (c2 * dt * dt) + gamma / (2.0 * dt);
    let b = 1.0 / (c2 * dt * dt) - gamma / (2.0 * dt);
    let two_over = 2.0 / (c2 * dt * dt);

    let mut older = prev;
    let mut current = first;
    for _ in 1..n_steps {
        let lap = periodic_lap(&current, grid.dx());
        let mut next = vec![Complex64::ZERO; n];
        for i in 0..n {
            next[i] = (two_over * current[i] - b * older[i] + lap[i] - mu * mu * current[i]) / a;
        }
        older = std::mem::replace(&mut current, next);
        snapshots.push(ComplexField1D::new(grid.clone(), current.clone())?);
    }
    SecondOrderHistory::new(dt, snapshots)
}

/// Discrete energy of the Klein-Gordon leapfrog at the half step between
/// levels `k` and `k+1`. The scheme conserves this functional exactly,
/// so its drift is pure rounding.
pub fn kg_discrete_energy(hist: &SecondOrderHistory, consts: &Constants, k: usize) -> f64 {
    let a = hist.snapshot(k).values();
    let b = hist.snapshot(k + 1).values();
    let n = a.len();
    let dx = hist.grid().dx();
    let dt = hist.dt();
    let c2 = consts.c * consts.c;
    let mu = consts.m * consts.c / consts.hbar;
    let mut sum = 0.0;
    for i in 0..n {
        let rate = (b[i] - a[i]) / dt;
        let da = (a[(i + 1) % n] - a[i]) / dx;
        let db = (b[(i + 1) % n] - b[i]) / dx;
        sum += rate.norm_sqr() / (2.0 * c2);
        sum += 0.5 * (db * da.conj()).re;
        sum += 0.5 * mu * mu * (b[i] * a[i].conj()).re;
    }
    sum * dx
}

/// Amplitude and phase residuals of a polar-decomposed second-order
/// history, plus the light-cone gauge `|S_t| - c |S_x|`.
#[derive(Debug, Clone)]
pub struct WavePolarReport {
    /// Amplitude equation residual:
    /// `R_tt/c^2 - R_xx + damping R_t + (mu^2 + S_x^2/hbar^2 - S_t^2/(c hbar)^2) R`.
    pub amplitude: FlaggedField1D,
    pub amplitude_report: ResidualReport,
    /// Phase equation residual:
    /// `S_tt/c^2 - S_xx + damping S_t + (2/R)(R_t S_t / c^2 - R_x S_x)`.
    pub phase: FlaggedField1D,
    pub phase_report: ResidualReport,
    /// `|S_t| - c |S_x|` pointwise; zero on light-cone phases.
    pub light_cone: FlaggedField1D,
    pub light_cone_report: ResidualReport,
}

/// Polar fields and their centered time derivatives at one time index.
#[derive(Debug, Clone)]
pub struct PolarDerivatives {
    pub r: RealField1D,
    pub s: RealField1D,
    pub r_dot: RealField1D,
    pub s_dot: RealField1D,
    pub r_ddot: RealField1D,
    pub s_ddot: RealField1D,
    /// False where any of the three snapshots masks the node.
    pub trusted: Vec<bool>,
}

pub fn polar_time_derivatives(
    hist: &SecondOrderHistory,
    hbar: f64,
    t_index: usize,
) -> Result<PolarDerivatives> {
    if t_index == 0 || t_index + 1 >= hist.len() {
        return Err(PolarError::Config(format!(
            "t_index {t_index} needs one neighbor on each side"
        )));
    }
    let triplet = polar::aligned_triplet(
        [
            hist.snapshot(t_index - 1),
            hist.snapshot(t_index),
            hist.snapshot(t_index + 1),
        ],
        hbar,
    );
    let [prev, curr, next] = triplet;
    let dt = hist.dt();
    let n = hist.grid().len();
    let centered =
        |a: &RealField1D, b: &RealField1D| a.zip(b, move |p, q| (q - p) / (2.0 * dt));
    let second = |p: &RealField1D, c: &RealField1D, nx: &RealField1D| {
        let dt2 = dt * dt;
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            vals.push((nx.values()[i] - 2.0 * c.values()[i] + p.values()[i]) / dt2);
        }
        RealField1D::new(c.grid().clone(), vals).expect("finite")
    };
    let trusted: Vec<bool> = (0..n)
        .map(|i| !(prev.mask()[i] || curr.mask()[i] || next.mask()[i]))
        .collect();
    Ok(PolarDerivatives {
        r_dot: centered(prev.r(), next.r()),
        s_dot: centered(prev.s(), next.s()),
        r_ddot: second(prev.r(), curr.r(), next.r()),
        s_ddot: second(prev.s(), curr.s(), next.s()),
        r: curr.r().clone(),
        s: curr.s().clone(),
        trusted,
    })
}

/// Evaluate the polar residuals of the Klein-Gordon equation.
pub fn kg_polar_residuals(
    hist: &SecondOrderHistory,
    consts: &Constants,
    t_index: usize,
) -> Result<WavePolarReport> {
    wave_polar_residuals(hist, consts, t_index, WaveKind::KleinGordon)
}

/// Evaluate the polar residuals of the telegraph equation (damping
/// terms included).
pub fn telegraph_polar_residuals(
    hist: &SecondOrderHistory,
    consts: &Constants,
    t_index: usize,
) -> Result<WavePolarReport> {
    wave_polar_residuals(hist, consts, t_index, WaveKind::Telegraph)
}

fn wave_polar_residuals(
    hist: &SecondOrderHistory,
    consts: &Constants,
    t_index: usize,
    kind: WaveKind,
) -> Result<WavePolarReport> {
    let d = polar_time_derivatives(hist, consts.hbar, t_index)?;
    let n = hist.grid().len();
    let c = consts.c;
    let c2 = c * c;
    let hbar = consts.hbar;
    let mu = consts.m * c / hbar;
    let gamma = kind.damping(consts);

    let r_x = d.r.d1();
    let r_xx = d.r.d2();
    let s_x = d.s.d1();
    let s_xx = d.s.d2();

    let mut amp = vec![0.0; n];
    let mut phase = vec![0.0; n];
    let mut cone = vec![0.0; n];
    for i in 0..n {
        if !d.trusted[i] {
            continue;
        }
        let (r, rd, rdd) = (d.r.values()[i], d.r_dot.values()[i], d.r_ddot.values()[i]);
        let (sd, sdd) = (d.s_dot.values()[i], d.s_ddot.values()[i]);
        amp[i] = rdd / c2 - r_xx.values()[i]
            + gamma * rd
            + (mu * mu + s_x.values()[i] * s_x.values()[i] / (hbar * hbar)
                - sd * sd / (c2 * hbar * hbar))
                * r;
        phase[i] = sdd / c2 - s_xx.values()[i]
            + gamma * sd
            + if r != 0.0 {
                (2.0 / r) * (rd * sd / c2 - r_x.values()[i] * s_x.values()[i])
            } else {
                0.0
            };
        cone[i] = sd.abs() - c * s_x.values()[i].abs();
    }
    let grid = hist.grid().clone();
    let amplitude = FlaggedField1D::new(grid.clone(), amp, d.trusted.clone());
    let phase = FlaggedField1D::new(grid.clone(), phase, d.trusted.clone());
    let light_cone = FlaggedField1D::new(grid, cone, d.trusted);
    let label = match kind {
        WaveKind::KleinGordon => "klein-gordon",
        WaveKind::Telegraph => "telegraph",
    };
    Ok(WavePolarReport {
        amplitude_report: ResidualReport::from_residual(
            format!("{label} amplitude equation"),
            &amplitude,
        ),
        phase_report: ResidualReport::from_residual(format!("{label} phase equation"), &phase),
        light_cone_report: ResidualReport::from_residual(
            format!("{label} light-cone gauge"),
            &light_cone,
        ),
        amplitude,
        phase,
        light_cone,
    })
}

/// Effective mass-squared fields of the two subfields. `M_R^2` depends
/// only on the phase gradients; `M_S^2` divides by `R S` and is flagged
/// where either underflows. Negative values are reported as-is.
#[derive(Debug, Clone)]
pub struct MassReport {
    pub m_r_sq: RealField1D,
    pub m_s_sq: FlaggedField1D,
    pub kind: WaveKind,
}

pub fn effective_masses(
    r: &RealField1D,
    s: &RealField1D,
    r_dot: &RealField1D,
    s_dot: &RealField1D,
    consts: &Constants,
    kind: WaveKind,
) -> MassReport {
    let c = consts.c;
    let c2 = c * c;
    let hbar = consts.hbar;
    let s_x = s.d1();
    let r_x = r.d1();
    let n = r.len();

    let m_r_sq = RealField1D::new(
        r.grid().clone(),
        (0..n)
            .map(|i| {
                consts.m * consts.m + s_x.values()[i] * s_x.values()[i] / c2
                    - s_dot.values()[i] * s_dot.values()[i] / (c2 * c2)
            })
            .collect(),
    )
    .expect("finite");

    let r_eps = NODE_MASK_RELATIVE * r.max_abs();
    let s_eps = NODE_MASK_RELATIVE * s.max_abs();
    let mut vals = vec![0.0; n];
    let mut valid = vec![true; n];
    for i in 0..n {
        let (ri, si) = (r.values()[i], s.values()[i]);
        if ri.abs() <= r_eps || si.abs() <= s_eps || ri == 0.0 || si == 0.0 {
            valid[i] = false;
        } else {
            vals[i] = (2.0 * hbar * hbar / c2)
                * (r_dot.values()[i] * s_dot.values()[i] / (c2 * ri * si)
                    - r_x.values()[i] * s_x.values()[i] / (ri * si));
        }
    }
    MassReport {
        m_r_sq,
        m_s_sq: FlaggedField1D::new(r.grid().clone(), vals, valid),
        kind,
    }
}

/// The hyperbola constraint `S_t^2/(m c^2)^2 - S_x^2/(m c)^2`, which
/// equals one wherever the amplitude solves the pure telegraph equation.
/// Undefined for massless constants.
pub fn hyperbola_constraint(
    s_dot: &RealField1D,
    s_prime: &RealField1D,
    consts: &Constants,
) -> Result<RealField1D> {
    if consts.m == 0.0 {
        return Err(PolarError::InvalidConstant(
            "the hyperbola constraint divides by the mass; undefined for m = 0".into(),
        ));
    }
    let mc2 = consts.m * consts.c * consts.c;
    let mc = consts.m * consts.c;
    Ok(s_dot.zip(s_prime, move |sd, sp| {
        (sd / mc2) * (sd / mc2) - (sp / mc) * (sp / mc)
    }))
}

/// Static profile of the telegraph split: integrating
/// `hbar^2 c^2 R'' = m^2 c^4 R + c^2 A^2 / R^3` by RK4 from
/// `(R0, R0')` at the left edge, with `S' = A R^{-2}` and `S` by
/// cumulative trapezoid. The quantum potential of the profile must
/// equal `-m c^2/2 - A^2/(2 m R^4)`.
#[derive(Debug, Clone)]
pub struct StaticProfile {
    pub r: RealField1D,
    pub s: RealField1D,
    pub s_prime: RealField1D,
    /// Stencil quantum potential against the closed form; order from one
    /// coarsening when the grid allows it.
    pub quantum_potential_report: ResidualReport,
    /// Same comparison with the curvature taken from the equation's own
    /// right-hand side: pure algebra, vanishes to rounding.
    pub quantum_potential_exact_gap: f64,
    /// Max pointwise `|R^2 S' - A|`.
    pub first_integral_drift: f64,
}

pub fn static_special_case(
    r0: f64,
    r0_prime: f64,
    a: f64,
    consts: &Constants,
    grid: &Grid1D,
    substeps: usize,
) -> Result<StaticProfile> {
    if !(r0 > 0.0) {
        return Err(PolarError::InvalidConstant(format!(
            "initial amplitude must be positive, got {r0}"
        )));
    }
    if !a.is_finite() {
        return Err(PolarError::InvalidConstant("A must be finite".into()));
    }
    let substeps = substeps.max(1);
    let kappa = consts.m * consts.c / consts.hbar;
    let a_sq_over_h2 = a * a / (consts.hbar * consts.hbar);
    let rhs = |r: f64| kappa * kappa * r + a_sq_over_h2 / (r * r * r);

    let n = grid.len();
    let h = grid.dx() / substeps as f64;
    let mut r_vals = Vec::with_capacity(n);
    let mut y = (r0, r0_prime);
    r_vals.push(y.0);
    for node in 1..n {
        for sub in 0..substeps {
            let (r, v) = y;
            if r <= 0.0 {
                return Err(PolarError::DomainExit {
                    x: grid.x(node - 1) + sub as f64 * h,
                    detail: "amplitude reached zero during integration".into(),
                });
            }
            let k1 = (v, rhs(r));
            let k2 = (v + 0.5 * h * k1.1, rhs(r + 0.5 * h * k1.0));
            let k3 = (v + 0.5 * h * k2.1, rhs(r + 0.5 * h * k2.0));
            let k4 = (v + h * k3.1, rhs(r + h * k3.0));
            y = (
                r + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                v + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
        }
        if !(y.0 > 0.0) {
            return Err(PolarError::DomainExit {
                x: grid.x(node),
                detail: "amplitude reached zero during integration".into(),
            });
        }
        r_vals.push(y.0);
    }
    let r = RealField1D::new(grid.clone(), r_vals)?;
    let s_prime = r.map(move |ri| a / (ri * ri));
    let s = s_prime.cumulative_integral();

    let mc2 = consts.m * consts.c * consts.c;
    let closed_form = |ri: f64| -0.5 * mc2 - a * a / (2.0 * consts.m * ri.powi(4));
    let vq_gap_field = |field: &RealField1D| -> FlaggedField1D {
        let d2r = field.d2();
        let coeff = -consts.hbar * consts.hbar / (2.0 * consts.m);
        let vals: Vec<f64> = (0..field.len())
            .map(|i| coeff * d2r.values()[i] / field.values()[i] - closed_form(field.values()[i]))
            .collect();
        FlaggedField1D::new(field.grid().clone(), vals, vec![true; field.len()])
    };
    let fine = vq_gap_field(&r);
    let fine_report =
        ResidualReport::from_residual("quantum potential of the static profile", &fine);
    let order = r.coarsen().map(|rc| {
        let coarse = ResidualReport::from_residual("coarse", &vq_gap_field(&rc));
        convergence_order(coarse.max_norm, fine_report.max_norm)
    });
    let quantum_potential_report = fine_report.with_order(order.flatten());

    // algebraic route: curvature from the integrated equation itself
    let mut exact_gap = 0.0_f64;
    let coeff = -consts.hbar * consts.hbar / (2.0 * consts.m);
    for i in 0..n {
        let ri = r.values()[i];
        let vq = coeff * rhs(ri) / ri;
        exact_gap = exact_gap.max((vq - closed_form(ri)).abs());
    }
    let first_integral_drift = (0..n)
        .map(|i| (r.values()[i] * r.values()[i] * s_prime.values()[i] - a).abs())
        .fold(0.0_f64, f64::max);

    Ok(StaticProfile {
        r,
        s,
        s_prime,
        quantum_potential_report,
        quantum_potential_exact_gap: exact_gap,
        first_integral_drift,
    })
}

/// Residuals of the real governing equation on the Cartesian components
/// `U = Re psi`, `W = Im psi`, evaluated at every interior time level;
/// the reported norms are the worst over those levels. Both components
/// satisfy the same linear equation the complex field does.
#[derive(Debug, Clone)]
pub struct SubfieldReport {
    pub u_report: ResidualReport,
    pub w_report: ResidualReport,
}

pub fn subfield_check(
    hist: &SecondOrderHistory,
    consts: &Constants,
    kind: WaveKind,
) -> Result<SubfieldReport> {
    if hist.len() < 3 {
        return Err(PolarError::Config("need at least 3 snapshots".into()));
    }
    let c2 = consts.c * consts.c;
    let mu = consts.m * consts.c / consts.hbar;
    let gamma = kind.damping(consts);
    let dt = hist.dt();
    let n = hist.grid().len();

    let mut worst_u: Option<ResidualReport> = None;
    let mut worst_w: Option<ResidualReport> = None;
    for k in 1..hist.len() - 1 {
        for (component, worst) in [
            (ComplexField1D::re as fn(&ComplexField1D) -> RealField1D, &mut worst_u),
            (ComplexField1D::im, &mut worst_w),
        ] {
            let prev = component(hist.snapshot(k - 1));
            let curr = component(hist.snapshot(k));
            let next = component(hist.snapshot(k + 1));
            let lap = curr.d2();
            let vals: Vec<f64> = (0..n)
                .map(|i| {
                    let tt =
                        (next.values()[i] - 2.0 * curr.values()[i] + prev.values()[i]) / (dt * dt);
                    let td = (next.values()[i] - prev.values()[i]) / (2.0 * dt);
                    tt / c2 - lap.values()[i] + gamma * td + mu * mu * curr.values()[i]
                })
                .collect();
            let field = FlaggedField1D::new(hist.grid().clone(), vals, vec![true; n]);
            let rep = ResidualReport::from_residual("subfield residual", &field);
            if worst.as_ref().is_none_or(|w| rep.max_norm > w.max_norm) {
                *worst = Some(rep);
            }
        }
    }
    Ok(SubfieldReport {
        u_report: worst_u.expect("at least one interior level"),
        w_report: worst_w.expect("at least one interior level"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn natural() -> Constants {
        Constants::natural()
    }

    fn periodic_grid(n: usize) -> Grid1D {
        Grid1D::periodic(0.0, 2.0 * PI, n).unwrap()
    }

    #[test]
    fn cfl_violation_is_a_configuration_error() {
        let g = periodic_grid(64);
        let z = ComplexField1D::from_fn(g.clone(), |_| Complex64::ZERO).unwrap();
        let err = solve_kg(&z, &z, &natural(), 2.0 * g.dx(), 4);
        assert!(matches!(err, Err(PolarError::Config(_))));
    }

    #[test]
    fn kg_plane_wave_phase_error_is_small_at_t_one() {
        // omega^2 = c^2 k^2 + m^2 c^4 / hbar^2
        let consts = natural();
        let n = 512;
        let g = periodic_grid(n);
        let k = 2.0;
        let omega = (k * k + 1.0_f64).sqrt();
        let phi0 = ComplexField1D::from_fn(g.clone(), |x| Complex64::from_polar(1.0, k * x)).unwrap();
        // d/dt e^{i(kx - omega t)} at t = 0 is -i omega e^{ikx}
        let phi_dot0 = ComplexField1D::from_fn(g.clone(), |x| {
            Complex64::from_polar(omega, k * x - 0.5 * PI)
        })
        .unwrap();
        let dt = 0.5 * g.dx();
        let steps = (1.0 / dt).round() as usize;
        let t = steps as f64 * dt;
        let hist = solve_kg(&phi0, &phi_dot0, &consts, dt, steps).unwrap();
        let last = hist.snapshot(steps);
        let mut phase_err = 0.0_f64;
        for i in 0..n {
            let exact = Complex64::from_polar(1.0, k * g.x(i) - omega * t);
            let gap = (last.values()[i] * exact.conj()).arg().abs();
            phase_err = phase_err.max(gap);
        }
        assert!(phase_err <= 1e-4, "phase error {phase_err}");
    }

    #[test]
    fn massless_pulse_obeys_dalembert_exactly_at_the_magic_step() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let n = 128;
        let g = periodic_grid(n);
        let f = |x: f64| (x.cos()).exp();
        let phi0 = ComplexField1D::from_fn(g.clone(), |x| Complex64::new(f(x), 0.0)).unwrap();
        let zero = ComplexField1D::from_fn(g.clone(), |_| Complex64::ZERO).unwrap();
        let dt = g.dx(); // c = 1
        let steps = 48;
        let hist = solve_kg(&phi0, &zero, &consts, dt, steps).unwrap();
        let t = steps as f64 * dt;
        let last = hist.snapshot(steps);
        for i in 0..n {
            let x = g.x(i);
            let exact = 0.5 * (f(x - t) + f(x + t));
            assert!(
                (last.values()[i].re - exact).abs() < 1e-11,
                "node {i}: {} vs {exact}",
                last.values()[i].re
            );
            assert!(last.values()[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn kg_discrete_energy_is_conserved_over_ten_thousand_steps() {
        let consts = natural();
        let g = periodic_grid(128);
        let phi0 = ComplexField1D::from_fn(g.clone(), |x| {
            Complex64::new((x.cos()).exp() - 1.0, 0.3 * (2.0 * x).sin())
        })
        .unwrap();
        let phi_dot0 =
            ComplexField1D::from_fn(g.clone(), |x| Complex64::new(0.2 * x.sin(), 0.0)).unwrap();
        let dt = 0.5 * g.dx();
        let hist = solve_kg(&phi0, &phi_dot0, &consts, dt, 10_000).unwrap();
        let e0 = kg_discrete_energy(&hist, &consts, 0);
        let e1 = kg_discrete_energy(&hist, &consts, hist.len() - 2);
        assert!(
            ((e1 - e0) / e0).abs() <= 1e-8,
            "energy drift {}",
            ((e1 - e0) / e0).abs()
        );
    }

    #[test]
    fn kg_plane_wave_polar_residuals_vanish_on_dispersion() {
        // injection: R = 1, S = px - Et with E^2 = c^2 p^2 + m^2 c^4
        let consts = natural();
        let g = periodic_grid(256);
        let p = 2.0;
        let e = (p * p + 1.0_f64).sqrt();
        let hist = SecondOrderHistory::from_fn(g, 1e-3, 3, |x, t| {
            Complex64::from_polar(1.0, p * x - e * t)
        })
        .unwrap();
        let rep = kg_polar_residuals(&hist, &consts, 1).unwrap();
        assert!(rep.amplitude_report.max_norm <= 1e-6, "{}", rep.amplitude_report.max_norm);
        assert!(rep.phase_report.max_norm <= 1e-6);
        // off dispersion the amplitude residual reports the gap exactly
        let bad_e = e + 0.1;
        let hist_bad = SecondOrderHistory::from_fn(periodic_grid(256), 1e-3, 3, |x, t| {
            Complex64::from_polar(1.0, p * x - bad_e * t)
        })
        .unwrap();
        let rep_bad = kg_polar_residuals(&hist_bad, &consts, 1).unwrap();
        let expected = (1.0 + p * p - bad_e * bad_e).abs(); // (m^2 c^2 + p^2 - E^2/c^2)/hbar^2
        assert_relative_eq!(rep_bad.amplitude_report.max_norm, expected, max_relative = 1e-6);
    }

    #[test]
    fn massless_light_cone_solution_is_exact() {
        // dt of order 1e-2 keeps the 1/dt^2 rounding amplification in the
        // second time difference of the (linear, hence stencil-exact)
        // action below the assertion level
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = periodic_grid(128);
        let k = 3.0;
        let hist = SecondOrderHistory::from_fn(g, 1e-2, 3, |x, t| {
            Complex64::from_polar(1.0, k * (x - t))
        })
        .unwrap();
        let rep = kg_polar_residuals(&hist, &consts, 1).unwrap();
        assert!(rep.amplitude_report.max_norm < 1e-9);
        assert!(rep.phase_report.max_norm < 1e-9);
        assert!(rep.light_cone_report.max_norm < 1e-9, "S_t = c S_x holds exactly");
    }

    #[test]
    fn constant_fields_have_zero_residuals_when_massless() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = periodic_grid(32);
        let hist =
            SecondOrderHistory::from_fn(g, 1e-3, 3, |_, _| Complex64::new(0.7, 0.4)).unwrap();
        let rep = kg_polar_residuals(&hist, &consts, 1).unwrap();
        assert_eq!(rep.amplitude_report.max_norm, 0.0);
        assert_eq!(rep.phase_report.max_norm, 0.0);
        let rep = telegraph_polar_residuals(&hist, &consts, 1).unwrap();
        assert_eq!(rep.amplitude_report.max_norm, 0.0);
        assert_eq!(rep.phase_report.max_norm, 0.0);
    }

    #[test]
    fn effective_masses_on_the_dispersion_family() {
        let consts = natural();
        let g = periodic_grid(128);
        let p = 2.0;
        let e = (p * p + 1.0_f64).sqrt();
        let r = RealField1D::constant(g.clone(), 1.0).unwrap();
        let s = RealField1D::from_fn(g.clone(), |x| p * x).unwrap();
        let r_dot = RealField1D::zeros(g.clone());
        let s_dot = RealField1D::constant(g, -e).unwrap();
        let rep = effective_masses(&r, &s, &r_dot, &s_dot, &consts, WaveKind::KleinGordon);
        // M_R^2 = m^2 + p^2/c^2 - E^2/c^4 = 0 on the dispersion shell
        for v in rep.m_r_sq.values() {
            assert!(v.abs() <= 1e-10, "M_R^2 {v}");
        }
        // constant amplitude: M_S^2 = 0
        for i in 0..rep.m_s_sq.values().len() {
            if let Some(v) = rep.m_s_sq.value_at(i) {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn effective_mass_of_light_cone_phase_vanishes_with_zero_mass() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = periodic_grid(64);
        let k = 2.0;
        let r = RealField1D::from_fn(g.clone(), |x| 1.0 + 0.1 * x.sin()).unwrap();
        let s = RealField1D::from_fn(g.clone(), |x| k * x).unwrap();
        let r_dot = RealField1D::zeros(g.clone());
        let s_dot = RealField1D::constant(g, -k).unwrap(); // S_t = -c S_x... sign does not matter, squared
        let rep = effective_masses(&r, &s, &r_dot, &s_dot, &consts, WaveKind::KleinGordon);
        for i in 1..rep.m_r_sq.len() - 1 {
            assert!(rep.m_r_sq.values()[i].abs() < 1e-12);
        }
    }

    #[test]
    fn telegraph_decay_mode_matches_the_exponential() {
        // psi = e^{-m c^2 t / hbar}, spatially uniform: exact solution.
        let consts = natural();
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let one = ComplexField1D::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
        let rate0 =
            ComplexField1D::from_fn(g.clone(), |_| Complex64::new(-1.0, 0.0)).unwrap(); // -mc^2/hbar
        let dt = 1e-4;
        let steps = 10_000; // t = 1 = hbar / m c^2
        let hist = solve_telegraph(&one, &rate0, &consts, dt, steps).unwrap();
        let expected = (-1.0_f64).exp();
        let got = hist.snapshot(steps).values()[3].re;
        assert!(
            ((got - expected) / expected).abs() <= 1e-6,
            "relative error {}",
            ((got - expected) / expected).abs()
        );
    }

    #[test]
    fn telegraph_decay_mode_converges_at_second_order_in_dt() {
        let consts = natural();
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let one = ComplexField1D::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
        let err = |dt: f64| {
            let steps = (1.0 / dt).round() as usize;
            let rate0 =
                ComplexField1D::from_fn(g.clone(), |_| Complex64::new(-1.0, 0.0)).unwrap();
            let hist = solve_telegraph(&one, &rate0, &consts, dt, steps).unwrap();
            let expected = (-(steps as f64 * dt)).exp();
            (hist.snapshot(steps).values()[3].re - expected).abs()
        };
        let order = (err(2e-4) / err(1e-4)).log2();
        assert!(order >= 1.8, "order {order}");
    }

    #[test]
    fn massless_telegraph_reduces_to_the_wave_equation() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = periodic_grid(96);
        let f = |x: f64| (x.cos()).exp();
        let psi0 = ComplexField1D::from_fn(g.clone(), |x| Complex64::new(f(x), 0.0)).unwrap();
        let zero = ComplexField1D::from_fn(g.clone(), |_| Complex64::ZERO).unwrap();
        let dt = g.dx();
        let steps = 24;
        let hist = solve_telegraph(&psi0, &zero, &consts, dt, steps).unwrap();
        let t = steps as f64 * dt;
        for i in 0..g.len() {
            let x = g.x(i);
            let exact = 0.5 * (f(x - t) + f(x + t));
            assert!((hist.snapshot(steps).values()[i].re - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn telegraph_polar_residuals_on_the_analytic_decay_mode() {
        let consts = natural();
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let dt = 1e-4;
        let hist = SecondOrderHistory::from_fn(g, dt, 3, |_, t| Complex64::new((-t).exp(), 0.0))
            .unwrap();
        let rep = telegraph_polar_residuals(&hist, &consts, 1).unwrap();
        assert!(rep.amplitude_report.max_norm <= 1e-8, "{}", rep.amplitude_report.max_norm);
        assert!(rep.phase_report.max_norm <= 1e-8);
    }

    #[test]
    fn telegraph_light_cone_phase_on_massless_solution() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = periodic_grid(64);
        let k = 1.0;
        let hist = SecondOrderHistory::from_fn(g, 1e-2, 3, |x, t| {
            Complex64::from_polar(1.0, k * (x - t))
        })
        .unwrap();
        let rep = telegraph_polar_residuals(&hist, &consts, 1).unwrap();
        assert!(rep.amplitude_report.max_norm < 1e-9);
        assert!(rep.phase_report.max_norm < 1e-9);
        assert!(rep.light_cone_report.max_norm < 1e-9);
    }

    #[test]
    fn hyperbola_constraint_on_the_boost_family() {
        let consts = natural();
        let g = Grid1D::new(-2.0, 2.0, 65).unwrap();
        for v_over_c in [0.0, 0.3, 0.6, 0.9] {
            let v = v_over_c * consts.c;
            let gamma = 1.0 / (1.0 - v_over_c * v_over_c).sqrt();
            let mc2 = consts.m * consts.c * consts.c;
            // S = -gamma m c^2 (t - v x / c^2): S_t = -gamma m c^2,
            // S_x = gamma m v
            let s_dot = RealField1D::constant(g.clone(), -gamma * mc2).unwrap();
            let s_prime = RealField1D::constant(g.clone(), gamma * consts.m * v).unwrap();
            let h = hyperbola_constraint(&s_dot, &s_prime, &consts).unwrap();
            for val in h.values() {
                assert!((val - 1.0).abs() <= 1e-12, "v/c {v_over_c}: {val}");
            }
        }
    }

    #[test]
    fn hyperbola_constraint_flags_static_phase() {
        let consts = natural();
        let g = Grid1D::new(-1.0, 1.0, 33).unwrap();
        let p = 0.8;
        let s_dot = RealField1D::zeros(g.clone());
        let s_prime = RealField1D::constant(g, p).unwrap();
        let h = hyperbola_constraint(&s_dot, &s_prime, &consts).unwrap();
        let expected = -p * p / (consts.m * consts.m * consts.c * consts.c);
        for val in h.values() {
            assert_relative_eq!(*val, expected, max_relative = 1e-12);
            assert!(*val < 1.0, "static phases violate the constraint");
        }
    }

    #[test]
    fn hyperbola_constraint_needs_mass() {
        let consts = Constants::massless(1.0, 1.0).unwrap();
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let z = RealField1D::zeros(g);
        assert!(hyperbola_constraint(&z, &z.clone(), &consts).is_err());
    }

    #[test]
    fn static_profile_with_zero_a_is_the_exponential() {
        // R'' = (mc/hbar)^2 R with R0 = 1, R0' = mc/hbar: R = e^{mcx/hbar}.
        let consts = natural();
        let g = Grid1D::new(0.0, 3.0, 1025).unwrap();
        let prof = static_special_case(1.0, 1.0, 0.0, &consts, &g, 8).unwrap();
        for i in 0..g.len() {
            let exact = g.x(i).exp();
            assert!(
                ((prof.r.values()[i] - exact) / exact).abs() <= 1e-10,
                "node {i}: rel err {}",
                ((prof.r.values()[i] - exact) / exact).abs()
            );
        }
        // quantum potential equals -m c^2 / 2 exactly through the
        // equation's own curvature
        assert!(prof.quantum_potential_exact_gap <= 1e-10);
        // and at second order through the stencil route
        let order = prof.quantum_potential_report.order.expect("odd grid");
        assert!(order >= 1.8, "order {order}");
        // A = 0 freezes the phase
        assert_eq!(prof.s_prime.max_abs(), 0.0);
        assert_eq!(prof.s.max_abs(), 0.0);
    }

    #[test]
    fn static_profile_keeps_the_first_integral() {
        let consts = natural();
        let g = Grid1D::new(0.0, 3.0, 1025).unwrap();
        let a = 0.3;
        let prof = static_special_case(1.0, 1.0, a, &consts, &g, 8).unwrap();
        assert!(prof.first_integral_drift <= 1e-12, "drift {}", prof.first_integral_drift);
        assert!(prof.quantum_potential_exact_gap <= 1e-12);
        let order = prof.quantum_potential_report.order.expect("odd grid");
        assert!(order >= 1.8, "order {order}");
        // the action grows monotonically for positive A
        assert!(prof.s.values().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn static_profile_reports_domain_exit() {
        let consts = natural();
        let g = Grid1D::new(0.0, 3.0, 257).unwrap();
        let err = static_special_case(0.1, -1.0, 0.0, &consts, &g, 4);
        assert!(matches!(err, Err(PolarError::DomainExit { .. })));
    }

    #[test]
    fn subfields_of_solver_output_satisfy_the_real_equation() {
        let consts = natural();
        let g = periodic_grid(64);
        let psi0 = ComplexField1D::from_fn(g.clone(), |x| {
            Complex64::new((x.cos()).exp(), 0.2 * x.sin())
        })
        .unwrap();
        let rate0 = ComplexField1D::from_fn(g.clone(), |_| Complex64::ZERO).unwrap();
        let dt = 0.5 * g.dx();
        let kg = solve_kg(&psi0, &rate0, &consts, dt, 8).unwrap();
        let rep = subfield_check(&kg, &consts, WaveKind::KleinGordon).unwrap();
        // the solver satisfies the same interior stencils; only rounding remains
        assert!(rep.u_report.max_norm < 1e-9, "{}", rep.u_report.max_norm);
        assert!(rep.w_report.max_norm < 1e-9);
        let tg = solve_telegraph(&psi0, &rate0, &consts, dt, 8).unwrap();
        let rep = subfield_check(&tg, &consts, WaveKind::Telegraph).unwrap();
        assert!(rep.u_report.max_norm < 1e-9);
        assert!(rep.w_report.max_norm < 1e-9);
    }

    #[test]
    fn subfields_of_the_decay_mode_are_exact() {
        let consts = natural();
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let hist = SecondOrderHistory::from_fn(g, 1e-4, 5, |_, t| {
            Complex64::new((-t).exp(), 0.0)
        })
        .unwrap();
        let rep = subfield_check(&hist, &consts, WaveKind::Telegraph).unwrap();
        assert!(rep.u_report.max_norm <= 1e-8);
        assert_eq!(rep.w_report.max_norm, 0.0);
    }

    #[test]
    fn plane_wave_subfields_converge_at_second_order() {
        let consts = natural();
        let p = 2.0;
        let e = (p * p + 1.0_f64).sqrt();
        let norm = |n: usize, dt: f64| {
            let g = periodic_grid(n);
            let hist = SecondOrderHistory::from_fn(g, dt, 3, |x, t| {
                Complex64::from_polar(1.0, p * x - e * t)
            })
            .unwrap();
            let rep = subfield_check(&hist, &consts, WaveKind::KleinGordon).unwrap();
            rep.u_report.max_norm.max(rep.w_report.max_norm)
        };
        let order = (norm(128, 2e-3) / norm(256, 1e-3)).log2();
        assert!(order >= 1.8, "order {order}");
    }
}
