//! Polar form of complex fields: `psi = R exp(i S / hbar)`.
//!
//! The amplitude `R = |psi|` is always well defined; the phase is not
//! where the amplitude underflows, so nodes with `R < 1e-10 * max R` are
//! masked and their `S` is interpolated from the neighbors rather than
//! trusted. Within each unmasked run the phase is unwrapped left to
//! right, removing jumps larger than pi, because every downstream check
//! differentiates `S` and needs it continuous.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::field::{ComplexField1D, RealField1D};
use crate::grid::Grid1D;

/// Relative amplitude threshold below which a node's phase is masked.
pub const NODE_MASK_RELATIVE: f64 = 1e-10;

/// Amplitude/action pair with the per-node trust mask.
#[derive(Debug, Clone)]
pub struct PolarPair {
    r: RealField1D,
    s: RealField1D,
    mask: Vec<bool>,
}

impl PolarPair {
    /// Build from amplitude and action fields; `mask[i]` marks nodes
    /// whose phase is not trusted. The amplitude must be non-negative.
    pub fn new(r: RealField1D, s: RealField1D, mask: Vec<bool>) -> Self {
        assert_eq!(r.grid(), s.grid(), "R and S live on different grids");
        assert_eq!(mask.len(), r.len());
        assert!(r.values().iter().all(|&v| v >= 0.0), "amplitude must be >= 0");
        Self { r, s, mask }
    }

    /// Fully trusted pair (no masked nodes).
    pub fn trusted(r: RealField1D, s: RealField1D) -> Self {
        let mask = vec![false; r.len()];
        Self::new(r, s, mask)
    }

    pub fn grid(&self) -> &Grid1D {
        self.r.grid()
    }

    pub fn r(&self) -> &RealField1D {
        &self.r
    }

    pub fn s(&self) -> &RealField1D {
        &self.s
    }

    /// True where the phase is untrusted (amplitude underflow).
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn masked_fraction(&self) -> f64 {
        let bad = self.mask.iter().filter(|m| **m).count();
        bad as f64 / self.mask.len() as f64
    }

    /// Indices of the maximal unmasked runs, as half-open ranges.
    pub fn unmasked_runs(&self) -> Vec<std::ops::Range<usize>> {
        runs_of_false(&self.mask)
    }
}

/// Decompose `psi` into `(R, S)` with `R = |psi|` and `S = hbar * arg(psi)`
/// unwrapped along each unmasked run. Masked nodes get `S` linearly
/// interpolated between the neighboring runs (or copied from the nearest
/// run at the edges); an all-masked field gets `S = 0` everywhere.
pub fn decompose(psi: &ComplexField1D, hbar: f64) -> PolarPair {
    let n = psi.len();
    let r_vals: Vec<f64> = psi.values().iter().map(|z| z.norm()).collect();
    let r_max = r_vals.iter().fold(0.0_f64, |m, v| m.max(*v));
    let eps = NODE_MASK_RELATIVE * r_max;
    let mask: Vec<bool> = r_vals.iter().map(|&r| r < eps || r == 0.0).collect();

    let mut s_vals = vec![0.0; n];
    for run in runs_of_false(&mask) {
        let mut prev = psi.values()[run.start].arg();
        s_vals[run.start] = hbar * prev;
        let tail = run.start + 1..run.end;
        for (value, z) in s_vals[tail.clone()].iter_mut().zip(&psi.values()[tail]) {
            let raw = z.arg();
            // shift by the 2*pi multiple that keeps |step| <= pi
            let unwrapped = raw + 2.0 * PI * ((prev - raw) / (2.0 * PI)).round();
            *value = hbar * unwrapped;
            prev = unwrapped;
        }
    }
    fill_masked_by_interpolation(&mut s_vals, &mask);

    let grid = psi.grid().clone();
    let r = RealField1D::new(grid.clone(), r_vals).expect("norms are finite");
    let s = RealField1D::new(grid, s_vals).expect("finite phases");
    PolarPair { r, s, mask }
}

/// Rebuild the complex field `R exp(i S / hbar)`.
pub fn recompose(pair: &PolarPair, hbar: f64) -> ComplexField1D {
    let values: Vec<Complex64> = pair
        .r
        .values()
        .iter()
        .zip(pair.s.values())
        .map(|(&r, &s)| Complex64::from_polar(r, s / hbar))
        .collect();
    ComplexField1D::new(pair.grid().clone(), values).expect("finite")
}

/// Cartesian split `psi = U + iW` with `U = R cos(S/hbar)`,
/// `W = R sin(S/hbar)`, plus the two reconstruction identities evaluated
/// pointwise: `U^2 + W^2 = R^2` and `S = hbar atan2(W, U)` modulo
/// `2 pi hbar`.
#[derive(Debug, Clone)]
pub struct CartesianSplit {
    pub u: RealField1D,
    pub w: RealField1D,
    /// Max pointwise `|U^2 + W^2 - R^2|`.
    pub amplitude_identity_max: f64,
    /// Max pointwise distance of `S - hbar atan2(W,U)` from `2 pi hbar Z`,
    /// over unmasked nodes.
    pub phase_identity_max: f64,
}

pub fn split_uw(pair: &PolarPair, hbar: f64) -> CartesianSplit {
    let u = pair
        .r
        .zip(&pair.s, |r, s| r * (s / hbar).cos());
    let w = pair
        .r
        .zip(&pair.s, |r, s| r * (s / hbar).sin());
    let two_pi_h = 2.0 * PI * hbar;
    let mut amp_max = 0.0_f64;
    let mut phase_max = 0.0_f64;
    for i in 0..pair.r.len() {
        let (ui, wi, ri, si) = (u.values()[i], w.values()[i], pair.r.values()[i], pair.s.values()[i]);
        amp_max = amp_max.max((ui * ui + wi * wi - ri * ri).abs());
        if !pair.mask[i] && ri > 0.0 {
            let back = hbar * wi.atan2(ui);
            let gap = si - back;
            let wrapped = gap - two_pi_h * (gap / two_pi_h).round();
            phase_max = phase_max.max(wrapped.abs());
        }
    }
    CartesianSplit {
        u,
        w,
        amplitude_identity_max: amp_max,
        phase_identity_max: phase_max,
    }
}

/// Shift `s` node by node onto the branch closest to `reference`,
/// adding integer multiples of `2 pi hbar`. Used to keep the action
/// continuous in time across decomposed snapshots.
pub fn align_phase_to(reference: &RealField1D, s: &RealField1D, hbar: f64) -> RealField1D {
    let two_pi_h = 2.0 * PI * hbar;
    reference.zip(s, |r, v| v + two_pi_h * ((r - v) / two_pi_h).round())
}

/// Decompose three consecutive snapshots and align the outer actions to
/// the middle one, so centered time differences of `S` see a continuous
/// branch. Returns `[previous, current, next]`.
pub fn aligned_triplet(fields: [&ComplexField1D; 3], hbar: f64) -> [PolarPair; 3] {
    let prev = decompose(fields[0], hbar);
    let curr = decompose(fields[1], hbar);
    let next = decompose(fields[2], hbar);
    let prev_s = align_phase_to(curr.s(), prev.s(), hbar);
    let next_s = align_phase_to(curr.s(), next.s(), hbar);
    [
        PolarPair::new(prev.r().clone(), prev_s, prev.mask().to_vec()),
        curr.clone(),
        PolarPair::new(next.r().clone(), next_s, next.mask().to_vec()),
    ]
}

fn runs_of_false(mask: &[bool]) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(s..mask.len());
    }
    runs
}

fn fill_masked_by_interpolation(values: &mut [f64], mask: &[bool]) {
    let n = values.len();
    let mut i = 0;
    while i < n {
        if !mask[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && mask[i] {
            i += 1;
        }
        let run_end = i; // exclusive
        let left = run_start.checked_sub(1).filter(|&j| !mask[j]);
        let right = (run_end < n).then_some(run_end);
        match (left, right) {
            (Some(l), Some(r)) => {
                let span = (r - l) as f64;
                for j in run_start..run_end {
                    let t = (j - l) as f64 / span;
                    values[j] = values[l] * (1.0 - t) + values[r] * t;
                }
            }
            (Some(l), None) => {
                for j in run_start..run_end {
                    values[j] = values[l];
                }
            }
            (None, Some(r)) => {
                for j in run_start..run_end {
                    values[j] = values[r];
                }
            }
            (None, None) => {
                // all-masked field: leave the zero placeholder
            }
        }
    }
}
