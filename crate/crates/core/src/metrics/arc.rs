use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{DqsError, Result};
use crate::quantum::{unitarity_defect, CMatrix, STATE_TOL};

/// Eigenvalue phases of a unitary, each in `(−π, π]`.
pub fn eigenphases(u: &CMatrix) -> Result<Vec<f64>> {
    let deviation = unitarity_defect(u);
    if !(deviation <= STATE_TOL) {
        return Err(DqsError::NotUnitary { deviation });
    }
    // A unitary is normal, so its complex Schur form is diagonal.
    let (_, t) = nalgebra::Schur::new(u.clone()).unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)].arg()).collect())
}

/// Length of the shortest arc of the unit circle containing every
/// eigenvalue of `u`: `2π` minus the largest gap between sorted phases.
pub fn delta_arc(u: &CMatrix) -> Result<f64> {
    let mut phases = eigenphases(u)?;
    phases.sort_by(f64::total_cmp);
    let mut largest_gap = phases[0] + TAU - phases[phases.len() - 1];
    for w in phases.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    Ok((TAU - largest_gap).clamp(0.0, TAU))
}

/// `min_v F(|v⟩, (U⊗1)|v⟩) = cos²(min{δ(U)/2, π/2})`.
pub fn acin_min_fidelity(u: &CMatrix) -> Result<f64> {
    let half = (delta_arc(u)? / 2.0).min(FRAC_PI_2);
    Ok(half.cos().powi(2))
}

/// `|sin(min{δ/2, π/2})|`, the two-way distinguishability term for a given
/// encoding unitary.
pub fn two_way_sine_term(u: &CMatrix) -> Result<f64> {
    let half = (delta_arc(u)? / 2.0).min(FRAC_PI_2);
    Ok(half.sin().abs())
}
