//! Second-order finite-difference stencils on uniform grids.
//!
//! Interior nodes use centered differences; the two edge nodes use
//! one-sided stencils of the same order, so every stencil here is exact
//! on polynomials up to degree two. Periodic variants back the
//! wave-equation solvers.

/// First derivative. Centered in the interior, one-sided at both edges.
pub fn d1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "stencils need at least 3 nodes");
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    out
}

/// Second derivative. Three-point centered in the interior; four-point
/// one-sided at the edges (three-point fallback when only 3 nodes exist,
/// still exact for quadratics).
pub fn d2(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "stencils need at least 3 nodes");
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    if n >= 4 {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2;
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / dx2;
    } else {
        out[0] = (f[0] - 2.0 * f[1] + f[2]) / dx2;
        out[n - 1] = out[0];
    }
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / dx2;
    }
    out
}

/// Centered first derivative with periodic wrap-around at the edges.
pub fn periodic_d1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3);
    (0..n)
        .map(|i| {
            let prev = f[(i + n - 1) % n];
            let next = f[(i + 1) % n];
            (next - prev) / (2.0 * dx)
        })
        .collect()
}

/// Centered second derivative with periodic wrap-around at the edges.
pub fn periodic_d2(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3);
    let dx2 = dx * dx;
    (0..n)
        .map(|i| {
            let prev = f[(i + n - 1) % n];
            let next = f[(i + 1) % n];
            (next - 2.0 * f[i] + prev) / dx2
        })
        .collect()
}
