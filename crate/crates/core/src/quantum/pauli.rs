//! Ordinary and logical ("bold") Pauli operators, the phase-encoding
//! unitary and the probe states built from them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::pauli_matrix;
use super::{c, outer, CMatrix, CVector, Observable, PureState, I, NORM_TOL, ONE, ZERO};
use crate::error::{DqsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    fn from_index(k: usize) -> Axis {
        Axis::ALL[k % 3]
    }

    pub fn matrix(self) -> CMatrix {
        pauli_matrix(self.index() + 1)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Axis {
    type Err = DqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(DqsError::InvalidConfig(format!("unknown axis `{other}`"))),
        }
    }
}

/// One of `±X, ±Y, ±Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedAxis {
    pub axis: Axis,
    pub negative: bool,
}

impl SignedAxis {
    pub const ALL: [SignedAxis; 6] = [
        SignedAxis::plus(Axis::X),
        SignedAxis::minus(Axis::X),
        SignedAxis::plus(Axis::Y),
        SignedAxis::minus(Axis::Y),
        SignedAxis::plus(Axis::Z),
        SignedAxis::minus(Axis::Z),
    ];

    pub const fn plus(axis: Axis) -> Self {
        Self { axis, negative: false }
    }

    pub const fn minus(axis: Axis) -> Self {
        Self { axis, negative: true }
    }

    pub fn sign(self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for SignedAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.axis)
    }
}

impl FromStr for SignedAxis {
    type Err = DqsError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        Ok(SignedAxis { axis: rest.parse()?, negative })
    }
}

impl Serialize for SignedAxis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignedAxis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(|0⟩ ± i|1⟩)/√2`
fn circular(sign: f64) -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(h, 0.0), c(0.0, sign * h)])
}

/// Unit eigenvectors of the 2×2 Pauli matrix with the given index
/// (0 → σx, 1 → σy, 2 → σz) for eigenvalue +1 and −1.
fn sigma_eigenvectors(k: usize) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        0 => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        1 => [[c(h, 0.0), c(0.0, h)], [c(h, 0.0), c(0.0, -h)]],
        _ => [[ONE, ZERO], [ZERO, ONE]],
    }
}

/// 2×2 Pauli observable in the computational basis.
pub fn pauli(axis: Axis) -> Observable {
    let k = axis.index();
    let [plus, minus] = sigma_eigenvectors(k);
    let proj = |v: [Complex64; 2]| outer(&CVector::from_vec(v.to_vec()));
    Observable::from_spectral(vec![-1.0, 1.0], vec![proj(minus), proj(plus)])
        .expect("Pauli spectral data is valid")
}

/// Two orthonormal `n`-qubit vectors spanning the logical qubit, plus the
/// assignment of logical axes to Pauli matrices in pole coordinates.
///
/// `diagonal` names the logical axis whose operator is
/// `|pole0⟩⟨pole0| − |pole1⟩⟨pole1|`; the other two follow cyclically so the
/// logical operators always satisfy `X̄Ȳ = iZ̄` on the support.
#[derive(Debug, Clone)]
pub struct LogicalFrame {
    n: usize,
    pole0: PureState,
    pole1: PureState,
    diagonal: Axis,
}

impl LogicalFrame {
    pub fn new(n: usize, pole0: PureState, pole1: PureState, diagonal: Axis) -> Result<Self> {
        let dim = 1usize << n;
        if n == 0 || pole0.dim() != dim || pole1.dim() != dim {
            return Err(DqsError::DimensionMismatch { expected: dim, actual: pole0.dim().max(pole1.dim()) });
        }
        let overlap = pole0.inner(&pole1).norm();
        if overlap > NORM_TOL {
            return Err(DqsError::InvalidState(format!("frame poles overlap by {overlap:.3e}")));
        }
        Ok(Self { n, pole0, pole1, diagonal })
    }

    /// Poles `|0…0⟩`, `|1…1⟩` with Z̄ diagonal.
    pub fn computational(n: usize) -> Self {
        let dim = 1usize << n;
        Self::new(n, PureState::basis(dim, 0), PureState::basis(dim, dim - 1), Axis::Z)
            .expect("computational frame is valid")
    }

    /// Poles `|R⟩^{⊗n}`, `|L⟩^{⊗n}` with Ȳ diagonal. The encoding unitary
    /// preserves this logical subspace and acts on it as a rotation about Ȳ.
    pub fn phase_aligned(n: usize) -> Self {
        let power = |v: CVector| {
            let mut acc = CVector::from_element(1, ONE);
            for _ in 0..n {
                acc = acc.kronecker(&v);
            }
            PureState::new(acc).expect("tensor power of unit vectors is normalised")
        };
        Self::new(n, power(circular(1.0)), power(circular(-1.0)), Axis::Y).expect("phase frame is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn poles(&self) -> (&PureState, &PureState) {
        (&self.pole0, &self.pole1)
    }

    /// Index of the Pauli matrix (0 → σx, 1 → σy, 2 → σz, in pole
    /// coordinates) that represents the logical axis.
    fn sigma_index(&self, axis: Axis) -> usize {
        let shift = (2 + 3 - self.diagonal.index()) % 3;
        (axis.index() + shift) % 3
    }

    fn embed(&self, a0: Complex64, a1: Complex64) -> CVector {
        self.pole0.amplitudes() * a0 + self.pole1.amplitudes() * a1
    }

    /// Projector onto `span{pole0, pole1}`.
    pub fn support_projector(&self) -> CMatrix {
        outer(self.pole0.amplitudes()) + outer(self.pole1.amplitudes())
    }

    /// The logical Pauli matrix, zero off the logical subspace.
    pub fn bold_matrix(&self, axis: Axis) -> CMatrix {
        let sigma = Axis::from_index(self.sigma_index(axis)).matrix();
        let p = [self.pole0.amplitudes(), self.pole1.amplitudes()];
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..2 {
            for j in 0..2 {
                if sigma[(i, j)] != ZERO {
                    m += p[i] * p[j].adjoint() * sigma[(i, j)];
                }
            }
        }
        m
    }

    /// The `+1` eigenvector of the signed logical Pauli.
    pub fn eigenvector(&self, label: SignedAxis) -> PureState {
        let vecs = sigma_eigenvectors(self.sigma_index(label.axis));
        let [a0, a1] = if label.negative { vecs[1] } else { vecs[0] };
        PureState::new(self.embed(a0, a1)).expect("pole combination is normalised")
    }
}

/// Logical Pauli observable: eigenvalues `±1` on the logical subspace and
/// `0` on its orthogonal complement (present only when `n > 1`).
pub fn bold_pauli(frame: &LogicalFrame, axis: Axis) -> Observable {
    let plus = outer(frame.eigenvector(SignedAxis::plus(axis)).amplitudes());
    let minus = outer(frame.eigenvector(SignedAxis::minus(axis)).amplitudes());
    let d = frame.dim();
    let mut values = vec![-1.0, 1.0];
    let mut projectors = vec![minus, plus];
    if d > 2 {
        values.push(0.0);
        projectors.push(CMatrix::identity(d, d) - frame.support_projector());
    }
    Observable::from_spectral(values, projectors).expect("logical spectral data is valid")
}

/// `(e^{iφY})^{⊗n}`
pub fn encoding_unitary(n: usize, phi: f64) -> CMatrix {
    let single = CMatrix::identity(2, 2) * c(phi.cos(), 0.0) + Axis::Y.matrix() * (I * phi.sin());
    let mut u = CMatrix::from_element(1, 1, ONE);
    for _ in 0..n {
        u = u.kronecker(&single);
    }
    u
}

/// The `n`-qubit probe `|P̄,+⟩`.
pub fn mub_probe(frame: &LogicalFrame, label: SignedAxis) -> PureState {
    frame.eigenvector(label)
}

/// Joint `+1` eigenstate of `X⊗Z̄`, `Z⊗X̄` and `Y⊗Ȳ` in the phase-aligned
/// frame, on one reference qubit followed by the `n`-qubit probe.
pub fn resource_state(n: usize) -> PureState {
    resource_state_in(&LogicalFrame::phase_aligned(n))
}

/// Joint `+1` eigenstate of the three check stabilizers for any frame.
pub fn resource_state_in(frame: &LogicalFrame) -> PureState {
    let stabilizers = [(Axis::X, Axis::Z), (Axis::Z, Axis::X), (Axis::Y, Axis::Y)]
        .map(|(a, b)| a.matrix().kronecker(&frame.bold_matrix(b)));
    let d = 2 * frame.dim();
    let id = CMatrix::identity(d, d);
    let projector = stabilizers
        .iter()
        .fold(id.clone(), |acc, s| acc * (&id + s) * c(0.5, 0.0));
    // Any vector inside reference ⊗ logical subspace has nonzero overlap with
    // either of these two seeds.
    let seeds = [
        CVector::from_vec(vec![ONE, ZERO]).kronecker(frame.pole0.amplitudes()),
        CVector::from_vec(vec![ZERO, ONE]).kronecker(frame.pole1.amplitudes()),
        CVector::from_vec(vec![ONE, ZERO]).kronecker(frame.pole1.amplitudes()),
    ];
    let v = seeds
        .iter()
        .map(|s| &projector * s)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("seeds are nonempty");
    let psi = PureState::normalized(super::fix_phase(v)).expect("stabilizer state exists");
    debug_assert!(stabilizers.iter().all(|s| (s * psi.amplitudes() - psi.amplitudes()).norm() < 1e-10));
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{expectation, max_abs_diff, partial_trace, DensityMatrix};

    fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs_diff(a, b) < tol
    }

    #[test]
    fn pauli_y_has_r_as_plus_eigenvector() {
        let r = circular(1.0);
        let y = pauli(Axis::Y);
        let yr = y.matrix() * &r;
        assert!((yr - r).norm() < 1e-15);
        // and Y = |R⟩⟨R| − |L⟩⟨L|
        let ym = outer(&circular(1.0)) - outer(&circular(-1.0));
        assert!(approx_eq(&ym, y.matrix(), 1e-15));
    }

    #[test]
    fn pauli_commutator() {
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        let comm = x.matrix() * y.matrix() - y.matrix() * x.matrix();
        assert!(approx_eq(&comm, &(z.matrix() * c(0.0, 2.0)), 1e-15));
    }

    #[test]
    fn computational_frame_reduces_to_paulis_for_one_qubit() {
        let frame = LogicalFrame::computational(1);
        for axis in Axis::ALL {
            assert!(approx_eq(bold_pauli(&frame, axis).matrix(), &axis.matrix(), 1e-15), "{axis}");
        }
    }

    #[test]
    fn phase_frame_reduces_to_paulis_for_one_qubit() {
        let frame = LogicalFrame::phase_aligned(1);
        for axis in Axis::ALL {
            assert!(approx_eq(bold_pauli(&frame, axis).matrix(), &axis.matrix(), 1e-15), "{axis}");
        }
    }

    #[test]
    fn two_qubit_bold_z_spectrum() {
        for frame in [LogicalFrame::computational(2), LogicalFrame::phase_aligned(2)] {
            let z = bold_pauli(&frame, Axis::Z);
            assert_eq!(z.eigenvalues(), &[-1.0, 0.0, 1.0]);
            assert_eq!(z.multiplicities(), vec![1, 2, 1]);
        }
    }

    #[test]
    fn bold_x_flips_poles() {
        let frame = LogicalFrame::computational(3);
        let x = bold_pauli(&frame, Axis::X);
        let (p0, p1) = frame.poles();
        let amp = p0.amplitudes().dotc(&(x.matrix() * p1.amplitudes()));
        assert!((amp - ONE).norm() < 1e-15);
    }

    #[test]
    fn phase_frame_diagonal_axis_is_y() {
        for n in 1..=3 {
            let frame = LogicalFrame::phase_aligned(n);
            let (p0, p1) = frame.poles();
            let expected = outer(p0.amplitudes()) - outer(p1.amplitudes());
            assert!(approx_eq(&frame.bold_matrix(Axis::Y), &expected, 1e-14));
        }
    }

    #[test]
    fn logical_algebra_on_support() {
        for n in 1..=3 {
            for frame in [LogicalFrame::computational(n), LogicalFrame::phase_aligned(n)] {
                let (x, y, z) = (frame.bold_matrix(Axis::X), frame.bold_matrix(Axis::Y), frame.bold_matrix(Axis::Z));
                let support = frame.support_projector();
                for m in [&x, &y, &z] {
                    assert!(approx_eq(&(m * m), &support, 1e-13));
                }
                assert!(approx_eq(&(&x * &y), &(&z * I), 1e-13));
                assert!(approx_eq(&(&x * &z + &z * &x), &CMatrix::zeros(frame.dim(), frame.dim()), 1e-13));
            }
        }
    }

    #[test]
    fn mub_probes_match_pole_combinations() {
        let frame = LogicalFrame::computational(2);
        let (p0, p1) = frame.poles();
        assert_eq!(mub_probe(&frame, SignedAxis::plus(Axis::Z)).amplitudes(), p0.amplitudes());
        assert_eq!(mub_probe(&frame, SignedAxis::minus(Axis::Z)).amplitudes(), p1.amplitudes());
        let plus = (p0.amplitudes() + p1.amplitudes()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!((mub_probe(&frame, SignedAxis::plus(Axis::X)).amplitudes() - plus).norm() < 1e-15);
        for label in SignedAxis::ALL {
            let obs = bold_pauli(&frame, label.axis);
            let rho = mub_probe(&frame, label).to_density();
            assert!((expectation(&obs, &rho).unwrap() - label.sign()).abs() < 1e-14);
        }
    }

    #[test]
    fn encoding_is_identity_at_zero_and_minus_identity_at_pi() {
        assert!(approx_eq(&encoding_unitary(3, 0.0), &CMatrix::identity(8, 8), 1e-15));
        let u = encoding_unitary(1, std::f64::consts::PI);
        assert!(approx_eq(&u, &(-CMatrix::identity(2, 2)), 1e-15));
    }

    #[test]
    fn encoding_eigenvalue_on_rr() {
        // oracle: matrix exponential via eigen-decomposition of the generator
        let phi = 0.3;
        let y = Axis::Y.matrix();
        let gen = y.kronecker(&CMatrix::identity(2, 2)) + CMatrix::identity(2, 2).kronecker(&y);
        let (vals, vecs) = crate::quantum::hermitian_eigen(&gen);
        let mut exp = CMatrix::zeros(4, 4);
        for (l, v) in vals.iter().zip(vecs.iter()) {
            exp += outer(v) * Complex64::from_polar(1.0, phi * l);
        }
        let u = encoding_unitary(2, phi);
        assert!(approx_eq(&u, &exp, 1e-13));
        let rr = circular(1.0).kronecker(&circular(1.0));
        let eig = rr.dotc(&(&u * &rr));
        assert!((eig - Complex64::from_polar(1.0, 0.6)).norm() < 1e-14);
    }

    #[test]
    fn encoding_preserves_phase_frame_support() {
        for n in 1..=4 {
            let frame = LogicalFrame::phase_aligned(n);
            let p = frame.support_projector();
            let u = encoding_unitary(n, 0.37);
            assert!(approx_eq(&(&u * &p), &(&p * &u), 1e-12));
        }
    }

    #[test]
    fn resource_state_one_qubit_matches_closed_form() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
        let minus = CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
        let expected = (CVector::from_vec(vec![ONE, ZERO]).kronecker(&plus)
            + CVector::from_vec(vec![ZERO, ONE]).kronecker(&minus))
            * c(h, 0.0);
        let psi = resource_state(1);
        assert!((psi.amplitudes() - expected).norm() < 1e-14);
    }

    #[test]
    fn resource_state_is_stabilized_and_locally_mixed() {
        for n in 1..=3 {
            let frame = LogicalFrame::phase_aligned(n);
            let psi = resource_state_in(&frame);
            let rho = psi.to_density();
            let mut product = 1.0;
            for (a, b) in [(Axis::X, Axis::Z), (Axis::Z, Axis::X), (Axis::Y, Axis::Y)] {
                let s = Observable::from_matrix(a.matrix().kronecker(&frame.bold_matrix(b))).unwrap();
                let e = expectation(&s, &rho).unwrap();
                assert!((e - 1.0).abs() < 1e-12, "n={n} {a}{b}: {e}");
                product *= e;
            }
            assert!((product - 1.0).abs() < 1e-12);
            let reduced = partial_trace(rho.matrix(), &[2, frame.dim()], &[0]);
            assert!(approx_eq(&reduced, DensityMatrix::maximally_mixed(2).matrix(), 1e-13));
        }
    }

    #[test]
    fn stabilizer_product_identity() {
        // (X⊗Z̄)(Z⊗X̄) = Y⊗Ȳ on reference ⊗ logical support
        for n in 1..=2 {
            let frame = LogicalFrame::phase_aligned(n);
            let s1 = Axis::X.matrix().kronecker(&frame.bold_matrix(Axis::Z));
            let s2 = Axis::Z.matrix().kronecker(&frame.bold_matrix(Axis::X));
            let s3 = Axis::Y.matrix().kronecker(&frame.bold_matrix(Axis::Y));
            assert!(approx_eq(&(&s1 * &s2), &s3, 1e-13));
        }
    }

    #[test]
    fn signed_axis_round_trips_through_text() {
        for label in SignedAxis::ALL {
            assert_eq!(label.to_string().parse::<SignedAxis>().unwrap(), label);
        }
        assert!("+W".parse::<SignedAxis>().is_err());
    }
}
