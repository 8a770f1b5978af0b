//! Dense vector primitives: angles, rank-one complements, the perspective
//! projection and the normalized ascent step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on ‖u − ⟨u,w⟩w‖ below which two directions count as parallel.
pub const PARALLEL_TOL: f64 = 1e-9;
/// Smallest |⟨w,x⟩| accepted by the perspective projection.
pub const DIVISION_TOL: f64 = 1e-12;
/// Allowed deviation from unit norm.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate direction (norm {0:e})")]
    DegenerateDirection(f64),
    #[error("inner product {0:e} too close to zero for perspective projection")]
    DivisionNearZero(f64),
    #[error("dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(a: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= a;
    }
}

/// Removes the component of `x` along the unit vector `u` in place.
pub fn remove_component(x: &mut [f64], u: &[f64]) {
    let c = dot(x, u);
    axpy(-c, u, x);
}

/// A direction on the unit sphere of R^d, d ≥ 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes `v`. Fails on zero-ish input or d < 2.
    pub fn normalize(mut v: Vec<f64>) -> Result<Self, GeometryError> {
        if v.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(v.len()));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = norm(&v);
        if n < DIVISION_TOL {
            return Err(GeometryError::DegenerateDirection(n));
        }
        scale(1.0 / n, &mut v);
        Ok(Self(v))
    }

    /// Accepts `v` only if it is already unit within [`UNIT_TOL`].
    pub fn from_unit(v: Vec<f64>) -> Result<Self, GeometryError> {
        if v.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(v.len()));
        }
        let n = norm(&v);
        if !n.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit(n));
        }
        Ok(Self(v))
    }

    /// The i-th standard basis vector of R^d.
    pub fn basis(d: usize, i: usize) -> Result<Self, GeometryError> {
        if d < 2 {
            return Err(GeometryError::DimensionTooSmall(d));
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = GeometryError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::from_unit(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The slab {x : lo ≤ ⟨normal, x⟩ ≤ hi}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub normal: UnitVector,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(normal: UnitVector, lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if !(lo > 0.0 && lo < hi) {
            return Err(GeometryError::DegenerateDirection(hi - lo));
        }
        Ok(Self { normal, lo, hi })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let m = self.normal.dot(x);
        m >= self.lo && m <= self.hi
    }
}

/// Angle in [0, π] between two unit vectors.
pub fn angle(u: &UnitVector, v: &UnitVector) -> f64 {
    dot(u.as_slice(), v.as_slice()).clamp(-1.0, 1.0).acos()
}

/// The normalized component of `u` orthogonal to `w`.
pub fn orth_component(u: &UnitVector, w: &UnitVector) -> Result<UnitVector, GeometryError> {
    if u.dim() != w.dim() {
        return Err(GeometryError::DimensionMismatch(u.dim(), w.dim()));
    }
    let mut r = u.as_slice().to_vec();
    remove_component(&mut r, w.as_slice());
    let n = norm(&r);
    if n < PARALLEL_TOL {
        return Err(GeometryError::DegenerateDirection(n));
    }
    scale(1.0 / n, &mut r);
    // one more pass keeps ⟨r, w⟩ at round-off level when u is nearly parallel
    remove_component(&mut r, w.as_slice());
    UnitVector::normalize(r)
}

/// proj_{w⊥}(x / ⟨w,x⟩).
pub fn perspective_projection(x: &[f64], w: &UnitVector) -> Result<Vec<f64>, GeometryError> {
    if x.len() != w.dim() {
        return Err(GeometryError::DimensionMismatch(x.len(), w.dim()));
    }
    let m = w.dot(x);
    if m.abs() < DIVISION_TOL {
        return Err(GeometryError::DivisionNearZero(m));
    }
    let mut z: Vec<f64> = x.iter().map(|c| c / m).collect();
    remove_component(&mut z, w.as_slice());
    Ok(z)
}

/// (v + step·g) / ‖v + step·g‖.
pub fn normalized_update(v: &UnitVector, g: &[f64], step: f64) -> Result<UnitVector, GeometryError> {
    if g.len() != v.dim() {
        return Err(GeometryError::DimensionMismatch(g.len(), v.dim()));
    }
    let mut r = v.as_slice().to_vec();
    axpy(step, g, &mut r);
    let n = norm(&r);
    if n < DIVISION_TOL {
        return Err(GeometryError::DegenerateDirection(n));
    }
    scale(1.0 / n, &mut r);
    Ok(UnitVector(r))
}

/// Completes `w` to an orthonormal basis and returns the d−1 vectors spanning w⊥.
pub fn complement_basis(w: &UnitVector) -> Vec<Vec<f64>> {
    let d = w.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut order: Vec<usize> = (0..d).collect();
    // start from the axes least aligned with w for numerical stability
    order.sort_by(|&a, &b| w.as_slice()[a].abs().total_cmp(&w.as_slice()[b].abs()));
    for i in order {
        if basis.len() == d - 1 {
            break;
        }
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        remove_component(&mut e, w.as_slice());
        for b in &basis {
            remove_component(&mut e, b);
        }
        let n = norm(&e);
        if n > 1e-6 {
            scale(1.0 / n, &mut e);
            basis.push(e);
        }
    }
    basis
}
