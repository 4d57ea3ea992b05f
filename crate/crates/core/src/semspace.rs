//! Keyword geometry inside one document's HAL space.
//!
//! Two keyword vectors `w_a`, `w_b` span a plane. Gram-Schmidt gives an
//! orthonormal pair for each keyword inside that plane, the document vector
//! is projected onto the plane and normalized to a state `phi`, and the
//! correlation `r` is the expectation of the product of two Pauli-type
//! operators, one built in each keyword's basis.
//!
//! With the `Oriented` convention and the x axis, `r = cos 2θ = 2cs² - 1`
//! whatever the document vector is; `GsRaw` flips the sign.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hal::{document_vector, word_vector, HalMatrix};

/// `|cos θ|` at or above `1 - PARALLEL_TOLERANCE` counts as parallel.
pub const PARALLEL_TOLERANCE: f64 = 1e-12;

/// How the perpendicular of the second keyword is oriented.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Both perpendiculars are the +90° rotation of their keyword vector.
    #[default]
    Oriented,
    /// `u_b⊥` from plain Gram-Schmidt of `w_a` against `u_b`.
    GsRaw,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Oriented => "oriented",
            Orientation::GsRaw => "gs-raw",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oriented" => Ok(Orientation::Oriented),
            "gs-raw" | "gs_raw" => Ok(Orientation::GsRaw),
            other => Err(Error::InvalidConfig(format!(
                "unknown orientation `{other}` (expected oriented or gs-raw)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Axis {
    #[default]
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidConfig(format!(
                "unknown axis `{other}` (expected x, y or z)"
            ))),
        }
    }
}

/// Which keyword's basis an operator is built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `s·a + t·b`
fn combine(s: f64, a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| s * x + t * y).collect()
}

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Range(format!(
            "vector lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

pub fn cosine(a: impl AsRef<[f64]>, b: impl AsRef<[f64]>) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    check_len(a, b)?;
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot(a, b) / (na * nb))
}

/// Two orthonormal pairs spanning `span{w_a, w_b}`.
///
/// Full-space vectors are kept for reconstruction checks; every operator
/// works in plane coordinates, where `u_a = (1, 0)` and `u_a⊥ = (0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBasis {
    pub u_a: Vec<f64>,
    pub u_aperp: Vec<f64>,
    pub u_b: Vec<f64>,
    pub u_bperp: Vec<f64>,
    pub orientation: Orientation,
    /// Angle between `w_a` and `w_b`, in `(0, π)`.
    pub theta: f64,
}

impl PlaneBasis {
    /// Coordinates of `v`'s projection in the `(u_a, u_a⊥)` frame.
    pub fn plane_coords(&self, v: &[f64]) -> [f64; 2] {
        [dot(&self.u_a, v), dot(&self.u_aperp, v)]
    }

    /// Plane coordinates of `(u, u⊥)` for the chosen keyword.
    pub fn frame(&self, side: Side) -> ([f64; 2], [f64; 2]) {
        match side {
            Side::A => ([1.0, 0.0], [0.0, 1.0]),
            Side::B => (
                self.plane_coords(&self.u_b),
                self.plane_coords(&self.u_bperp),
            ),
        }
    }

    /// Norm of the part of `v` lying outside the plane.
    pub fn residual_outside_plane(&self, v: &[f64]) -> f64 {
        let [x, y] = self.plane_coords(v);
        norm(&combine(
            1.0,
            v,
            -1.0,
            &combine(x, &self.u_a, y, &self.u_aperp),
        ))
    }

    /// Lifts plane coordinates back into the full space.
    pub fn lift(&self, coords: [f64; 2]) -> Vec<f64> {
        combine(coords[0], &self.u_a, coords[1], &self.u_aperp)
    }
}

pub fn plane_basis(
    w_a: impl AsRef<[f64]>,
    w_b: impl AsRef<[f64]>,
    orientation: Orientation,
) -> Result<PlaneBasis> {
    let (w_a, w_b) = (w_a.as_ref(), w_b.as_ref());
    let cos = cosine(w_a, w_b)?;
    if cos.abs() >= 1.0 - PARALLEL_TOLERANCE {
        return Err(Error::DegeneratePair { cosine: cos });
    }

    let u_a = scaled(w_a, 1.0 / norm(w_a));
    let residual = combine(1.0, w_b, -dot(&u_a, w_b), &u_a);
    let residual_norm = norm(&residual);
    if residual_norm <= PARALLEL_TOLERANCE * norm(w_b) {
        return Err(Error::DegeneratePair { cosine: cos });
    }
    let u_aperp = scaled(&residual, 1.0 / residual_norm);

    // (c, s) are the plane coordinates of w_b's direction; s > 0 by construction.
    let (c, s) = (dot(&u_a, w_b), dot(&u_aperp, w_b));
    let r = c.hypot(s);
    let (c, s) = (c / r, s / r);
    let u_b = combine(c, &u_a, s, &u_aperp);
    let u_bperp = match orientation {
        Orientation::Oriented => combine(-s, &u_a, c, &u_aperp),
        Orientation::GsRaw => {
            let v = combine(1.0, w_a, -dot(&u_b, w_a), &u_b);
            let n = norm(&v);
            scaled(&v, 1.0 / n)
        }
    };

    Ok(PlaneBasis {
        u_a,
        u_aperp,
        u_b,
        u_bperp,
        orientation,
        theta: s.atan2(c),
    })
}

/// The normalized document state in both keyword frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedState {
    pub alpha: f64,
    pub alpha_perp: f64,
    pub beta: f64,
    pub beta_perp: f64,
    /// Plane coordinates in the `(u_a, u_a⊥)` frame.
    pub phi: [f64; 2],
}

impl ProjectedState {
    /// `α·u_a + α⊥·u_a⊥` in the full space.
    pub fn reconstruct_from_a(&self, basis: &PlaneBasis) -> Vec<f64> {
        combine(self.alpha, &basis.u_a, self.alpha_perp, &basis.u_aperp)
    }

    /// `β·u_b + β⊥·u_b⊥` in the full space.
    pub fn reconstruct_from_b(&self, basis: &PlaneBasis) -> Vec<f64> {
        combine(self.beta, &basis.u_b, self.beta_perp, &basis.u_bperp)
    }
}

pub fn project_state(psi: impl AsRef<[f64]>, basis: &PlaneBasis) -> Result<ProjectedState> {
    let psi = psi.as_ref();
    check_len(psi, &basis.u_a)?;
    let [x, y] = basis.plane_coords(psi);
    let n = x.hypot(y);
    if n == 0.0 || n <= PARALLEL_TOLERANCE * norm(psi) {
        return Err(Error::ZeroProjection);
    }
    let phi = [x / n, y / n];
    let (b, bperp) = basis.frame(Side::B);
    Ok(ProjectedState {
        alpha: phi[0],
        alpha_perp: phi[1],
        beta: b[0] * phi[0] + b[1] * phi[1],
        beta_perp: bperp[0] * phi[0] + bperp[1] * phi[1],
        phi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorMatrix {
    Real([[f64; 2]; 2]),
    Complex([[Complex64; 2]; 2]),
}

impl OperatorMatrix {
    pub fn to_complex(self) -> [[Complex64; 2]; 2] {
        match self {
            OperatorMatrix::Real(m) => m.map(|row| row.map(|x| Complex64::new(x, 0.0))),
            OperatorMatrix::Complex(m) => m,
        }
    }
}

fn mat_mul_real(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_mul_complex(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// A Pauli matrix rewritten in one keyword's `{u, u⊥}` basis, expressed in
/// plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliOperator {
    pub axis: Axis,
    pub side: Side,
    pub matrix: OperatorMatrix,
}

impl PauliOperator {
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = self.matrix.to_complex();
        (0..2).all(|i| (0..2).all(|j| (m[i][j] - m[j][i].conj()).norm() <= tol))
    }

    /// `M² = I` within `tol`.
    pub fn is_involution(&self, tol: f64) -> bool {
        let m = self.matrix.to_complex();
        let sq = mat_mul_complex(&m, &m);
        (0..2).all(|i| {
            (0..2).all(|j| {
                let expected = if i == j { 1.0 } else { 0.0 };
                (sq[i][j] - Complex64::new(expected, 0.0)).norm() <= tol
            })
        })
    }

    /// Applies a real operator to plane coordinates. `None` for axis y.
    pub fn apply(&self, v: [f64; 2]) -> Option<[f64; 2]> {
        match self.matrix {
            OperatorMatrix::Real(m) => Some([
                m[0][0] * v[0] + m[0][1] * v[1],
                m[1][0] * v[0] + m[1][1] * v[1],
            ]),
            OperatorMatrix::Complex(_) => None,
        }
    }
}

/// x: `|u⟩⟨u⊥| + |u⊥⟩⟨u|`, z: `|u⟩⟨u| - |u⊥⟩⟨u⊥|`, y: `-i|u⟩⟨u⊥| + i|u⊥⟩⟨u|`.
pub fn pauli_operator(axis: Axis, side: Side, basis: &PlaneBasis) -> PauliOperator {
    let (u, p) = basis.frame(side);
    let outer = |a: [f64; 2], b: [f64; 2]| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
    let (up, pu, uu, pp) = (outer(u, p), outer(p, u), outer(u, u), outer(p, p));
    let combine2 = |a: [[f64; 2]; 2], sa: f64, b: [[f64; 2]; 2], sb: f64| {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = sa * a[i][j] + sb * b[i][j];
            }
        }
        out
    };
    let matrix = match axis {
        Axis::X => OperatorMatrix::Real(combine2(up, 1.0, pu, 1.0)),
        Axis::Z => OperatorMatrix::Real(combine2(uu, 1.0, pp, -1.0)),
        Axis::Y => {
            let imag = combine2(up, -1.0, pu, 1.0);
            OperatorMatrix::Complex(imag.map(|row| row.map(|x| Complex64::new(0.0, x))))
        }
    };
    PauliOperator { axis, side, matrix }
}

/// Born rule: `Re ⟨φ| A B |φ⟩` with `φ` the real plane state.
pub fn born_expectation(state: &ProjectedState, op_a: &PauliOperator, op_b: &PauliOperator) -> f64 {
    let phi = state.phi;
    match (op_a.matrix, op_b.matrix) {
        (OperatorMatrix::Real(a), OperatorMatrix::Real(b)) => {
            let m = mat_mul_real(&a, &b);
            (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| phi[i] * m[i][j] * phi[j])
                .sum()
        }
        (a, b) => {
            let m = mat_mul_complex(&a.to_complex(), &b.to_complex());
            (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| (m[i][j] * phi[i] * phi[j]).re)
                .sum()
        }
    }
}

/// Everything computed for a non-degenerate keyword pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGeometry {
    pub cosine: f64,
    pub basis: PlaneBasis,
    pub state: ProjectedState,
}

impl PairGeometry {
    pub fn new(
        w_a: impl AsRef<[f64]>,
        w_b: impl AsRef<[f64]>,
        psi: impl AsRef<[f64]>,
        orientation: Orientation,
    ) -> Result<Self> {
        let cosine = cosine(&w_a, &w_b)?;
        let basis = plane_basis(&w_a, &w_b, orientation)?;
        let state = project_state(psi, &basis)?;
        Ok(PairGeometry {
            cosine,
            basis,
            state,
        })
    }

    pub fn correlation(&self, axis: Axis) -> f64 {
        let op_a = pauli_operator(axis, Side::A, &self.basis);
        let op_b = pauli_operator(axis, Side::B, &self.basis);
        born_expectation(&self.state, &op_a, &op_b)
    }
}

/// Geometry of a keyword pair taken straight from a HAL matrix.
pub fn pair_geometry(
    m: &HalMatrix,
    stem_a: &str,
    stem_b: &str,
    orientation: Orientation,
) -> Result<PairGeometry> {
    let w_a = word_vector(m, stem_a)?;
    let w_b = word_vector(m, stem_b)?;
    let psi = document_vector(m)?;
    PairGeometry::new(&w_a, &w_b, &psi, orientation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub doc_id: String,
    pub stem_a: String,
    pub stem_b: String,
    pub window: usize,
    pub cosine: f64,
    pub r: f64,
    pub axis: Axis,
    pub orientation: Orientation,
    /// Parallel keyword vectors; reported as `cosine = r = 1`.
    pub degenerate: bool,
}

pub fn correlate(
    m: &HalMatrix,
    stem_a: &str,
    stem_b: &str,
    axis: Axis,
    orientation: Orientation,
) -> Result<CorrelationResult> {
    let (cosine, r, degenerate) = match pair_geometry(m, stem_a, stem_b, orientation) {
        Ok(geometry) => (geometry.cosine, geometry.correlation(axis), false),
        Err(Error::DegeneratePair { .. }) => (1.0, 1.0, true),
        Err(e) => return Err(e),
    };
    Ok(CorrelationResult {
        doc_id: m.doc_id().unwrap_or_default().to_string(),
        stem_a: stem_a.to_string(),
        stem_b: stem_b.to_string(),
        window: m.window(),
        cosine,
        r,
        axis,
        orientation,
        degenerate,
    })
}
