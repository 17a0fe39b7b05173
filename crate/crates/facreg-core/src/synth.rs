//! Synthetic ground-truth layouts: perfectly regular multi-façade grids.
//!
//! These provide known-truth inputs for robustness experiments: category
//! counts, overlaps and field values are all exact by construction.

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Component, ComponentKind, GeomParams, Layout};

/// Grid parameters for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub floors: u32,
    pub columns: u32,
    /// Building sides carrying components, 1..=4.
    pub facades: u32,
    /// Horizontal distance between neighboring columns, > width.
    pub spacing: f64,
    /// Vertical distance between floors, > height.
    pub floor_height: f64,
    pub width: f64,
    pub height: f64,
    /// Fraction of ground-floor slots holding doors.
    pub door_frac: f64,
    /// Fraction of slots holding balconies.
    pub balcony_frac: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            floors: 3,
            columns: 4,
            facades: 2,
            spacing: 3.0,
            floor_height: 3.0,
            width: 1.2,
            height: 1.4,
            door_frac: 0.3,
            balcony_frac: 0.15,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.floors < 1 || self.columns < 1 {
            return fail(format!("floors={}, columns={} must be >= 1", self.floors, self.columns));
        }
        if !(1..=4).contains(&self.facades) {
            return fail(format!("facades={} must be in 1..=4", self.facades));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return fail(format!("width={}, height={} must be > 0", self.width, self.height));
        }
        if self.spacing <= self.width {
            return fail(format!("spacing={} must exceed width={}", self.spacing, self.width));
        }
        if self.floor_height <= self.height {
            return fail(format!(
                "floor_height={} must exceed height={}",
                self.floor_height, self.height
            ));
        }
        let (d, b) = (self.door_frac, self.balcony_frac);
        if !(0.0..=1.0).contains(&d) || !(0.0..=1.0).contains(&b) || d + b > 1.0 {
            return fail(format!("kind mix door={d}, balcony={b} must be proportions summing <= 1"));
        }
        Ok(())
    }
}

/// Outward normals of the four building sides: front, back, right, left.
const FACADE_NORMALS: [(f64, f64, f64); 4] =
    [(0.0, -1.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)];

fn instance_ref(kind: ComponentKind) -> &'static str {
    match kind {
        ComponentKind::Window => "lib/window_a",
        ComponentKind::Door => "lib/door_a",
        ComponentKind::Balcony => "lib/balcony_a",
    }
}

/// Builds a perfectly regular grid layout: `floors x columns` components on
/// each of `facades` sides, doors only on the ground floor, fixed-seed
/// deterministic kind assignment.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Layout> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Footprint half-extent; the extra margin keeps corner components of
    // adjacent façades farther apart than the in-façade spacing.
    let half = spec.columns as f64 * spec.spacing / 2.0 + 1.5 * spec.spacing;
    let offset = |c: u32| (c as f64 - (spec.columns as f64 - 1.0) / 2.0) * spec.spacing;

    let mut components = Vec::new();
    for facade in 0..spec.facades {
        let (nx, ny, nz) = FACADE_NORMALS[facade as usize];
        let normal = Vector3::new(nx, ny, nz);
        for floor in 0..spec.floors {
            let z = floor as f64 * spec.floor_height + spec.height / 2.0;
            for col in 0..spec.columns {
                let t = offset(col);
                let p = match facade {
                    0 => Vector2::new(t, -half),
                    1 => Vector2::new(t, half),
                    2 => Vector2::new(half, t),
                    _ => Vector2::new(-half, t),
                };
                let roll: f64 = rng.gen();
                let kind = if floor == 0 {
                    if roll < spec.door_frac {
                        ComponentKind::Door
                    } else if roll < spec.door_frac + spec.balcony_frac {
                        ComponentKind::Balcony
                    } else {
                        ComponentKind::Window
                    }
                } else if roll < spec.balcony_frac {
                    ComponentKind::Balcony
                } else {
                    ComponentKind::Window
                };
                components.push(Component {
                    id: format!("f{facade}_r{floor}_c{col}"),
                    kind,
                    instance_ref: instance_ref(kind).into(),
                    params: GeomParams::new(p, z, spec.width, spec.height, normal)?,
                });
            }
        }
    }

    Ok(Layout {
        building_id: format!(
            "synthetic-{}x{}x{}-s{}",
            spec.floors, spec.columns, spec.facades, spec.seed
        ),
        base_elevation: 0.0,
        components,
    })
}
