//! Acceptance suite: one test per criterion, each printing a verdict
//! line (run with `--nocapture` to see them). Tolerances are pinned
//! here; nothing is deferred to later calibration. Measured convergence
//! orders certify "second order" with the suite-wide convention of 0.2
//! slack below the nominal order (threshold 1.8).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use polarlab::canonical::{integrate_reduced, CanonicalState, PotentialDependence};
use polarlab::dirac::{
    dirac_canonical_flow, dirac_spin_density_rate, dirac_transport_residuals, solve_dirac,
    DiracHistory, SpinorField1D,
};
use polarlab::field::{ComplexField1D, RealField1D};
use polarlab::grid::Grid1D;
use polarlab::relativistic::{
    effective_masses, hyperbola_constraint, kg_polar_residuals, polar_time_derivatives,
    solve_telegraph, static_special_case, telegraph_polar_residuals, SecondOrderHistory, WaveKind,
};
use polarlab::schrodinger::{
    madelung_residuals, quantum_potential, separation_solution, spin_force, spin_potential,
    PotentialSpec, WaveHistory,
};
use polarlab::Constants;

const MIN_ORDER: f64 = 1.8;
const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn a01_separation_profile_solves_the_phase_equation() {
    let (e, c_sep, m) = (1.0, 2.0, 1.0);
    let grid = Grid1D::new(-5.0, 5.0, 1024).unwrap();
    let s = separation_solution(e, c_sep, m, &grid).unwrap();

    let mut analytic = 0.0_f64;
    for i in 0..grid.len() {
        let x = grid.x(i);
        let residual = s.values()[i] * (0.5 * c_sep) / m
            - (0.5 * c_sep * x) * (0.5 * c_sep * x) / (2.0 * m)
            - e;
        analytic = analytic.max(residual.abs());
    }
    let ds = s.d1();
    let d2s = s.d2();
    let mut stencil = 0.0_f64;
    for i in 1..grid.len() - 1 {
        let residual =
            s.values()[i] * d2s.values()[i] / m - ds.values()[i] * ds.values()[i] / (2.0 * m) - e;
        stencil = stencil.max(residual.abs());
    }
    verdict(
        "01 separation identity",
        analytic <= 1e-12 && stencil <= 1e-6,
        &format!("analytic residual {analytic:.2e} (<= 1e-12), stencil residual {stencil:.2e} (<= 1e-6)"),
    );
}

#[test]
fn a02_spin_potential_and_force_profiles() {
    let consts = Constants::natural();
    let (e, c_sep) = (1.0, 2.0);
    let m = consts.m;
    let grid = Grid1D::new(-5.0, 5.0, 1024).unwrap();
    let s = separation_solution(e, c_sep, m, &grid).unwrap();
    let vs = spin_potential(&s, &consts);
    let force = spin_force(&s, &consts);

    let mut vs_gap = 0.0_f64;
    let mut force_gap = 0.0_f64;
    for i in 1..grid.len() - 1 {
        let x = grid.x(i);
        vs_gap = vs_gap.max((vs.values()[i] + e + c_sep * c_sep / (8.0 * m) * x * x).abs());
        let expect = c_sep * c_sep / (4.0 * m) * x;
        force_gap = force_gap.max((force.direct.values()[i] - expect).abs());
        force_gap = force_gap.max((force.gradient.values()[i] - expect).abs());
    }

    let route_gap = |n: usize| {
        let g = Grid1D::new(-5.0, 5.0, n).unwrap();
        let s = RealField1D::from_fn(g, |x| (1.3 * x).sin() + 0.1 * x * x).unwrap();
        let f = spin_force(&s, &consts);
        let diff = f.direct.zip(&f.gradient, |a, b| a - b);
        (2..n - 2).map(|i| diff.values()[i].abs()).fold(0.0_f64, f64::max)
    };
    let order = (route_gap(501) / route_gap(1001)).log2();

    verdict(
        "02 spin potential and force",
        vs_gap <= 1e-6 && force_gap <= 1e-6 && order >= MIN_ORDER,
        &format!(
            "V_S gap {vs_gap:.2e} (<= 1e-6), force gap {force_gap:.2e} (<= 1e-6), route order {order:.3} (>= {MIN_ORDER})"
        ),
    );
}

#[test]
fn a03_scale_laws_are_algebraic() {
    let consts = Constants::natural();
    let grid = Grid1D::new(-2.0, 2.0, 17).unwrap();
    let r = RealField1D::from_fn(grid.clone(), |x| (1.0 + x * x).recip()).unwrap();
    let s = RealField1D::from_fn(grid, |x| (1.1 * x).sin() + 0.2 * x * x).unwrap();
    let vq = quantum_potential(&r, &consts);
    let vs = spin_potential(&s, &consts);
    let vq_scale = vq.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let vs_scale = vs.max_abs();

    let mut worst = 0.0_f64;
    for beta in [0.5, 2.0, 3.7] {
        let vq_b = quantum_potential(&r.map(|v| beta * v), &consts);
        let vs_b = spin_potential(&s.map(|v| beta * v), &consts);
        for i in 0..vq.values().len() {
            worst = worst.max((vq_b.values()[i] - vq.values()[i]).abs() / vq_scale);
            worst = worst
                .max((vs_b.values()[i] - beta * beta * vs.values()[i]).abs() / (beta * beta * vs_scale));
        }
    }
    verdict(
        "03 scale laws",
        worst <= 1e-14,
        &format!("worst relative gap {worst:.2e} (<= 1e-14) over beta in {{0.5, 2, 3.7}}"),
    );
}

#[test]
fn a04_canonical_relations() {
    let consts = Constants::natural().with_lambda(1.0).unwrap();
    let h = consts.h();
    let st0 = CanonicalState::new(0.0, 0.2, 0.1, 0.0, 2.0).unwrap();
    let traj =
        integrate_reduced(st0, &consts, PotentialDependence::AmplitudeOnly, 1e-3, 10_000).unwrap();
    let ds = traj.last().s - traj.first().s;
    let dr = traj.last().r - traj.first().r;
    let relation = ((ds - h * dr) / ds).abs();

    let flow = dirac_canonical_flow(1.3, &consts, 1e-3, 10_000).unwrap();
    let slope = flow.slope_ds_dr().unwrap();
    let slope_gap = ((slope - 2.0 * h) / (2.0 * h)).abs();

    verdict(
        "04 canonical relations",
        relation <= 1e-10 && slope_gap <= 1e-10,
        &format!("|dS - h dR|/|dS| = {relation:.2e} (<= 1e-10), dirac slope gap {slope_gap:.2e} (<= 1e-10)"),
    );
}

#[test]
fn a05_madelung_residual_convergence() {
    let consts = Constants::natural();

    // plane wave: stencil-exact family, residuals at the rounding floor
    let plane = |n: usize, dt: f64| {
        let k = 2.0;
        let omega = consts.hbar * k * k / (2.0 * consts.m);
        let grid = Grid1D::new(-5.0, 5.0, n).unwrap();
        let hist =
            WaveHistory::from_fn(grid, dt, 3, |x, t| Complex64::from_polar(1.0, k * x - omega * t))
                .unwrap();
        let res = madelung_residuals(&hist, &PotentialSpec::Free, &consts, 1).unwrap();
        (res.hj_report.max_norm, res.continuity_report.max_norm)
    };
    let (hj_pc, cont_pc) = plane(201, 2e-3);
    let (hj_pf, cont_pf) = plane(401, 1e-3);
    let floor = 1e-10;
    let plane_ok = |coarse: f64, fine: f64| {
        (coarse <= floor && fine <= floor) || (coarse / fine).log2() >= MIN_ORDER
    };

    // harmonic ground state: genuine stencil error in the quantum term
    let harmonic = |n: usize, dt: f64| {
        let grid = Grid1D::new(-8.0, 8.0, n).unwrap();
        let hist = WaveHistory::from_fn(grid, dt, 3, |x, t| {
            Complex64::from_polar((-0.5 * x * x).exp(), -0.5 * t)
        })
        .unwrap();
        let pot = PotentialSpec::harmonic(1.0).unwrap();
        let res = madelung_residuals(&hist, &pot, &consts, 1).unwrap();
        (res.hj_report.max_norm, res.continuity_report.max_norm)
    };
    let (hj_hc, cont_hc) = harmonic(512, 2e-3);
    let (hj_hf, cont_hf) = harmonic(1024, 1e-3);
    let hj_order = (hj_hc / hj_hf).log2();
    let cont_ok = plane_ok(cont_hc, cont_hf);

    verdict(
        "05 split-equation convergence",
        plane_ok(hj_pc, hj_pf) && plane_ok(cont_pc, cont_pf) && hj_order >= MIN_ORDER && cont_ok,
        &format!(
            "plane wave residuals at floor ({:.1e}, {:.1e}); harmonic energy-balance order {hj_order:.3} (>= {MIN_ORDER}), continuity at floor or order 2",
            hj_pc.max(hj_pf),
            cont_pc.max(cont_pf)
        ),
    );
}

#[test]
fn a06_dirac_transport_and_spin_density() {
    // massless packet, injected with dt decoupled from dx
    let massless = Constants::massless(1.0, 1.0).unwrap();
    let injected = |n: usize, dt: f64| {
        let g = Grid1D::periodic(0.0, 2.0 * std::f64::consts::PI, n).unwrap();
        let hist = DiracHistory::from_fn(g, dt, 3, |x, t| {
            let xi = x - t;
            let chi = Complex64::from_polar((xi.cos()).exp(), 0.5 * xi.sin());
            (chi * SQRT_HALF, chi * SQRT_HALF)
        })
        .unwrap();
        let rep = dirac_transport_residuals(&hist, &massless, 1).unwrap();
        (
            rep.plus_advective_r.report.max_norm,
            rep.plus_advective_s.report.max_norm,
        )
    };
    let (r_c, s_c) = injected(128, 2e-2);
    let (r_f, s_f) = injected(256, 1e-2);
    let order_r = (r_c / r_f).log2();
    let order_s = (s_c / s_f).log2();

    // rest-frame massive eigenstate
    let consts = Constants::natural();
    let g = Grid1D::periodic(0.0, 2.0 * std::f64::consts::PI, 64).unwrap();
    let psi0 =
        SpinorField1D::from_fn(g.clone(), |_| (Complex64::new(0.8, 0.0), Complex64::ZERO)).unwrap();
    let hist = solve_dirac(&psi0, &consts, g.dx(), 8).unwrap();
    let rep = dirac_transport_residuals(&hist, &consts, 4).unwrap();
    let phase_rate = rep.upper_phase_rate.report.max_norm;
    let density = dirac_spin_density_rate(&hist, &consts).unwrap();

    verdict(
        "06 dirac transport",
        order_r >= MIN_ORDER
            && order_s >= MIN_ORDER
            && phase_rate <= 1e-8
            && density.max_rel_gap <= 1e-6,
        &format!(
            "chiral orders ({order_r:.3}, {order_s:.3}) (>= {MIN_ORDER}), rest phase-rate residual {phase_rate:.2e} (<= 1e-8), spin-density gap {:.2e} (<= 1e-6)",
            density.max_rel_gap
        ),
    );
}

#[test]
fn a07_kg_dispersion_certification() {
    let consts = Constants::natural();
    let g = Grid1D::periodic(0.0, 2.0 * std::f64::consts::PI, 256).unwrap();
    let p = 2.0;
    let e = (p * p + 1.0_f64).sqrt();
    let hist = SecondOrderHistory::from_fn(g, 1e-3, 3, |x, t| {
        Complex64::from_polar(1.0, p * x - e * t)
    })
    .unwrap();
    let rep = kg_polar_residuals(&hist, &consts, 1).unwrap();
    let d = polar_time_derivatives(&hist, consts.hbar, 1).unwrap();
    let masses = effective_masses(&d.r, &d.s, &d.r_dot, &d.s_dot, &consts, WaveKind::KleinGordon);
    let m_r = masses.m_r_sq.values()[1..masses.m_r_sq.len() - 1]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    verdict(
        "07 kg dispersion",
        rep.amplitude_report.max_norm <= 1e-6 && m_r <= 1e-10,
        &format!(
            "amplitude-equation residual {:.2e} (<= 1e-6), M_R^2 {m_r:.2e} (<= 1e-10)",
            rep.amplitude_report.max_norm
        ),
    );
}

#[test]
fn a08_telegraph_decay_mode() {
    let consts = Constants::natural();
    let g = Grid1D::new(0.0, 1.0, 8).unwrap();
    let one = ComplexField1D::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
    let rate0 = ComplexField1D::from_fn(g.clone(), |_| Complex64::new(-1.0, 0.0)).unwrap();
    let dt = 1e-4;
    let steps = 10_000; // t = 1 = hbar / (m c^2)
    let hist = solve_telegraph(&one, &rate0, &consts, dt, steps).unwrap();
    let expected = (-1.0_f64).exp();
    let solver_err = ((hist.snapshot(steps).values()[3].re - expected) / expected).abs();

    let injected =
        SecondOrderHistory::from_fn(g, dt, 3, |_, t| Complex64::new((-t).exp(), 0.0)).unwrap();
    let rep = telegraph_polar_residuals(&injected, &consts, 1).unwrap();
    let residual = rep.amplitude_report.max_norm.max(rep.phase_report.max_norm);

    verdict(
        "08 telegraph decay",
        solver_err <= 1e-6 && residual <= 1e-8,
        &format!("solver error {solver_err:.2e} (<= 1e-6), analytic-mode residuals {residual:.2e} (<= 1e-8)"),
    );
}

#[test]
fn a09_hyperbola_constraint_on_boosts() {
    let consts = Constants::natural();
    let g = Grid1D::new(-2.0, 2.0, 65).unwrap();
    let mut worst = 0.0_f64;
    for v_over_c in [0.0_f64, 0.3, 0.6, 0.9] {
        let gamma = 1.0 / (1.0 - v_over_c * v_over_c).sqrt();
        let s_dot = RealField1D::constant(g.clone(), -gamma).unwrap(); // m c^2 = 1
        let s_prime = RealField1D::constant(g.clone(), gamma * v_over_c).unwrap();
        let h = hyperbola_constraint(&s_dot, &s_prime, &consts).unwrap();
        for v in h.values() {
            worst = worst.max((v - 1.0).abs());
        }
    }
    verdict(
        "09 hyperbola constraint",
        worst <= 1e-12,
        &format!("worst |constraint - 1| = {worst:.2e} (<= 1e-12) for v/c in {{0, 0.3, 0.6, 0.9}}"),
    );
}

#[test]
fn a10_static_profile_and_quantum_potential() {
    let consts = Constants::natural();
    let g = Grid1D::new(0.0, 3.0, 1025).unwrap();

    let coupled = static_special_case(1.0, 1.0, 0.3, &consts, &g, 8).unwrap();
    let order = coupled.quantum_potential_report.order.unwrap_or(f64::NAN);

    let exponential = static_special_case(1.0, 1.0, 0.0, &consts, &g, 8).unwrap();
    let mut exp_gap = 0.0_f64;
    for i in 0..g.len() {
        let exact = g.x(i).exp();
        exp_gap = exp_gap.max(((exponential.r.values()[i] - exact) / exact).abs());
    }

    verdict(
        "10 static profile",
        coupled.first_integral_drift <= 1e-12
            && order >= MIN_ORDER
            && exponential.quantum_potential_exact_gap <= 1e-10
            && exp_gap <= 1e-10,
        &format!(
            "R^2 S' drift {:.2e} (<= 1e-12), V_Q stencil order {order:.3} (>= {MIN_ORDER}), exponential-case V_Q gap {:.2e} and amplitude gap {exp_gap:.2e} (<= 1e-10)",
            coupled.first_integral_drift, exponential.quantum_potential_exact_gap
        ),
    );
}

#[test]
fn a11_bundled_suite_contract() {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let bin = env!("CARGO_BIN_EXE_polarlab");
    let out_a = temp_dir("suite-a");
    let out_b = temp_dir("suite-b");

    let start = Instant::now();
    let status = Command::new(bin)
        .args(["suite"])
        .arg(&scenarios)
        .args(["--out"])
        .arg(&out_a)
        .status()
        .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let all_pass = status.code() == Some(0);

    // deterministic re-run
    let status_b = Command::new(bin)
        .args(["suite"])
        .arg(&scenarios)
        .args(["--out"])
        .arg(&out_b)
        .status()
        .unwrap();
    assert_eq!(status_b.code(), Some(0));
    let strip = |p: &Path| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("wall_time_s"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let deterministic = strip(&out_a.join("suite.json")) == strip(&out_b.join("suite.json"));

    // induced failure: globally tightened tolerances must flip the exit
    // status to 1 and name at least one failing check
    let out_c = temp_dir("suite-c");
    let induced = Command::new(bin)
        .args(["suite"])
        .arg(&scenarios)
        .args(["--out"])
        .arg(&out_c)
        .args(["--tol-scale", "1e-9"])
        .output()
        .unwrap();
    let induced_ok = induced.status.code() == Some(1)
        && String::from_utf8_lossy(&induced.stdout).contains("failed:");

    verdict(
        "11 suite contract",
        all_pass && elapsed < 60.0 && deterministic && induced_ok,
        &format!(
            "all scenarios pass: {all_pass}, wall time {elapsed:.2}s (< 60s), deterministic: {deterministic}, induced failure honored: {induced_ok}"
        ),
    );
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir =
        std::env::temp_dir().join(format!("polarlab-acceptance-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}
