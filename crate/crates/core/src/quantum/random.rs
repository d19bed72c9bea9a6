//! Haar and Hilbert–Schmidt random sampling.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, DensityMatrix, PureState};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with the diagonal phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Density matrix drawn from the Hilbert–Schmidt measure (full rank).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_raw(m * c(1.0 / tr, 0.0))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v: CVector = ginibre(dim, 1, rng).column(0).into_owned();
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}
