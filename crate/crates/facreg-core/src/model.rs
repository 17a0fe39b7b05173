//! Domain types for façade components and layouts, plus the invertible
//! mapping between decomposed geometric parameters and 4x4 transforms.
//!
//! The canonical (untransformed) component is a 1x1 rectangle centered at
//! the origin in the XZ plane: width along +X, height along +Z, outward
//! normal +Y. A component's transform is
//! `Translate(p.x, p.y, z) * Rotate(n) * Scale(w, 1, h)`, where `Rotate(n)`
//! takes +Y to the component normal with zero roll (the width axis stays
//! horizontal, the up axis projects onto world +Z). Depth is never scaled.

use nalgebra::{Matrix3, Matrix4, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// Decomposed geometric parameters of one façade component.
///
/// `lambda` (horizontal angle) and `theta` (elevation angle) are redundant
/// encodings of the unit normal `n` and are kept consistent with it:
/// `n = (cos θ cos λ, cos θ sin λ, sin θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeomParams {
    /// Horizontal coordinates in meters.
    pub p: Vector2<f64>,
    /// Relative elevation in meters above the building base.
    pub z: f64,
    /// Width in meters, > 0.
    pub w: f64,
    /// Height in meters, > 0.
    pub h: f64,
    /// Unit façade-plane normal.
    pub n: Vector3<f64>,
    /// Horizontal angle of `n` in (-pi, pi].
    pub lambda: f64,
    /// Elevation angle of `n` in [-pi/2, pi/2].
    pub theta: f64,
}

impl GeomParams {
    /// Builds params from position, elevation, sizes and normal; the angles
    /// are derived from the normal.
    pub fn new(p: Vector2<f64>, z: f64, w: f64, h: f64, n: Vector3<f64>) -> Result<Self> {
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidSize(format!("w={w}, h={h} (both must be > 0)")));
        }
        let (lambda, theta) = derive_angles(&n)?;
        Ok(GeomParams { p, z, w, h, n, lambda, theta })
    }
}

/// Component category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Window,
    Door,
    Balcony,
}

impl std::fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentKind::Window => write!(f, "window"),
            ComponentKind::Door => write!(f, "door"),
            ComponentKind::Balcony => write!(f, "balcony"),
        }
    }
}

/// One detected façade component.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Unique id within a layout.
    pub id: String,
    pub kind: ComponentKind,
    /// Opaque name of a library model; never interpreted here.
    pub instance_ref: String,
    pub params: GeomParams,
}

/// A 4x4 spatial transform, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub m: Matrix4<f64>,
}

impl Transform {
    pub fn identity() -> Self {
        Transform { m: Matrix4::identity() }
    }

    /// Rows of the matrix, outermost index first.
    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.m[(r, c)];
            }
        }
        out
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Matrix4::zeros();
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        Transform { m }
    }
}

/// A whole building layout: components plus the base elevation that the
/// per-component `z` values are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub building_id: String,
    /// Absolute elevation of z = 0, in meters.
    pub base_elevation: f64,
    pub components: Vec<Component>,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }
}

/// Horizontal and elevation angles of a unit normal.
///
/// `lambda = atan2(n.y, n.x)`, `theta = asin(n.z)`. At the poles
/// (`n = ±Z`) lambda is degenerate and fixed to 0.
pub fn derive_angles(n: &Vector3<f64>) -> Result<(f64, f64)> {
    let norm = n.norm();
    if norm < TOL {
        return Err(Error::InvalidNormal("zero-length vector".into()));
    }
    if (norm - 1.0).abs() > TOL {
        return Err(Error::InvalidNormal(format!("norm {norm} differs from 1 beyond 1e-9")));
    }
    let lambda = if n.x == 0.0 && n.y == 0.0 { 0.0 } else { n.y.atan2(n.x) };
    let theta = n.z.clamp(-1.0, 1.0).asin();
    Ok((lambda, theta))
}

/// Reconstructs the unit normal from its angles.
pub fn normal_from_angles(lambda: f64, theta: f64) -> Vector3<f64> {
    Vector3::new(theta.cos() * lambda.cos(), theta.cos() * lambda.sin(), theta.sin())
}

/// Rotation taking the canonical +Y normal to `n` with zero roll:
/// `Rz(lambda - pi/2) * Rx(theta)`.
fn rotation_from_angles(lambda: f64, theta: f64) -> Matrix3<f64> {
    let a = lambda - std::f64::consts::FRAC_PI_2;
    let (sa, ca) = a.sin_cos();
    let (st, ct) = theta.sin_cos();
    let rz = Matrix3::new(ca, -sa, 0.0, sa, ca, 0.0, 0.0, 0.0, 1.0);
    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, ct, -st, 0.0, st, ct);
    rz * rx
}

/// In-plane axes of a component: (width axis, height axis).
///
/// The width axis is horizontal; the height axis projects onto +Z.
pub fn plane_axes(lambda: f64, theta: f64) -> (Vector3<f64>, Vector3<f64>) {
    let r = rotation_from_angles(lambda, theta);
    (r.column(0).into(), r.column(2).into())
}

/// Builds the 4x4 transform `Translate(p, z) * Rotate(n) * Scale(w, 1, h)`.
pub fn params_to_transform(params: &GeomParams) -> Result<Transform> {
    if params.w <= 0.0 || params.h <= 0.0 {
        return Err(Error::InvalidSize(format!(
            "w={}, h={} (both must be > 0)",
            params.w, params.h
        )));
    }
    let (lambda, theta) = derive_angles(&params.n)?;
    let r = rotation_from_angles(lambda, theta);
    let mut m = Matrix4::identity();
    for row in 0..3 {
        m[(row, 0)] = r[(row, 0)] * params.w;
        m[(row, 1)] = r[(row, 1)];
        m[(row, 2)] = r[(row, 2)] * params.h;
    }
    m[(0, 3)] = params.p.x;
    m[(1, 3)] = params.p.y;
    m[(2, 3)] = params.z;
    Ok(Transform { m })
}

/// Recovers the decomposed parameters from a transform.
///
/// Inverse of [`params_to_transform`] on its image; rejects matrices whose
/// linear block does not split into a proper rotation times `diag(w, 1, h)`.
pub fn transform_to_params(t: &Transform) -> Result<GeomParams> {
    let m = &t.m;
    for c in 0..4 {
        let expected = if c == 3 { 1.0 } else { 0.0 };
        if (m[(3, c)] - expected).abs() > TOL {
            return Err(Error::InvalidTransform("bottom row is not (0, 0, 0, 1)".into()));
        }
    }
    let col_u = Vector3::new(m[(0, 0)], m[(1, 0)], m[(2, 0)]);
    let col_n = Vector3::new(m[(0, 1)], m[(1, 1)], m[(2, 1)]);
    let col_v = Vector3::new(m[(0, 2)], m[(1, 2)], m[(2, 2)]);

    let w = col_u.norm();
    let h = col_v.norm();
    if w <= TOL || h <= TOL {
        return Err(Error::InvalidTransform("degenerate scale column".into()));
    }
    // Depth is never scaled, so the normal column must be unit.
    if (col_n.norm() - 1.0).abs() > TOL {
        return Err(Error::InvalidTransform(format!(
            "normal column has norm {} (depth scale must be 1)",
            col_n.norm()
        )));
    }
    let u = col_u / w;
    let v = col_v / h;
    let ortho = [u.dot(&col_n), u.dot(&v), col_n.dot(&v)];
    if ortho.iter().any(|d| d.abs() > TOL) {
        return Err(Error::InvalidTransform(
            "rotation block is not orthonormal after scale removal".into(),
        ));
    }
    if (u.cross(&col_n).dot(&v) - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidTransform("rotation block is not a proper rotation".into()));
    }

    let p = Vector2::new(m[(0, 3)], m[(1, 3)]);
    let z = m[(2, 3)];
    GeomParams::new(p, z, w, h, col_n)
}

/// One invariant violation found by [`validate_layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Component id, when the violation is tied to a component.
    pub component: Option<String>,
    pub field: &'static str,
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyLayout,
    DuplicateId,
    InvalidSize,
    InvalidNormal,
    AngleInconsistency,
}

/// Result of checking a layout against all type invariants.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every invariant violation in the layout; empty iff valid.
pub fn validate_layout(layout: &Layout) -> ValidationReport {
    let mut report = ValidationReport::default();
    if layout.components.is_empty() {
        report.violations.push(Violation {
            component: None,
            field: "components",
            kind: ViolationKind::EmptyLayout,
            message: "layout must contain at least one component".into(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for comp in &layout.components {
        if !seen.insert(comp.id.clone()) {
            report.violations.push(Violation {
                component: Some(comp.id.clone()),
                field: "id",
                kind: ViolationKind::DuplicateId,
                message: format!("id `{}` appears more than once", comp.id),
            });
        }
        let gp = &comp.params;
        if gp.w <= 0.0 {
            report.violations.push(Violation {
                component: Some(comp.id.clone()),
                field: "w",
                kind: ViolationKind::InvalidSize,
                message: format!("w = {} must be > 0", gp.w),
            });
        }
        if gp.h <= 0.0 {
            report.violations.push(Violation {
                component: Some(comp.id.clone()),
                field: "h",
                kind: ViolationKind::InvalidSize,
                message: format!("h = {} must be > 0", gp.h),
            });
        }
        if (gp.n.norm() - 1.0).abs() > TOL {
            report.violations.push(Violation {
                component: Some(comp.id.clone()),
                field: "normal",
                kind: ViolationKind::InvalidNormal,
                message: format!("norm {} differs from 1 beyond 1e-9", gp.n.norm()),
            });
            continue; // angle checks are meaningless without a unit normal
        }
        let rebuilt = normal_from_angles(gp.lambda, gp.theta);
        if (rebuilt - gp.n).norm() > TOL {
            report.violations.push(Violation {
                component: Some(comp.id.clone()),
                field: "lambda/theta",
                kind: ViolationKind::AngleInconsistency,
                message: format!(
                    "angles ({}, {}) rebuild a normal {:?} away from n",
                    gp.lambda,
                    gp.theta,
                    (rebuilt - gp.n).norm()
                ),
            });
        }
    }
    report
}
