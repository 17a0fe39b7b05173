//! Layout file serialization.
//!
//! Layouts travel as UTF-8 JSON with a fixed schema:
//!
//! ```json
//! {
//!   "building_id": "b12",
//!   "base_elevation": 431.2,
//!   "components": [
//!     { "id": "w0", "kind": "window", "instance_ref": "lib/window_a",
//!       "p": [1.5, -9.0], "z": 4.2, "w": 1.2, "h": 1.4,
//!       "normal": [0.0, -1.0, 0.0] }
//!   ]
//! }
//! ```
//!
//! Unknown fields are rejected with an error naming the field. The angles
//! lambda and theta are always derived from the normal on load, never
//! serialized. Saving then loading a file reproduces it byte for byte.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{validate_layout, Component, ComponentKind, GeomParams, Layout};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    building_id: String,
    base_elevation: f64,
    components: Vec<ComponentFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    id: String,
    kind: ComponentKind,
    instance_ref: String,
    p: [f64; 2],
    z: f64,
    w: f64,
    h: f64,
    normal: [f64; 3],
}

fn to_file(layout: &Layout) -> LayoutFile {
    LayoutFile {
        building_id: layout.building_id.clone(),
        base_elevation: layout.base_elevation,
        components: layout
            .components
            .iter()
            .map(|c| ComponentFile {
                id: c.id.clone(),
                kind: c.kind,
                instance_ref: c.instance_ref.clone(),
                p: [c.params.p.x, c.params.p.y],
                z: c.params.z,
                w: c.params.w,
                h: c.params.h,
                normal: [c.params.n.x, c.params.n.y, c.params.n.z],
            })
            .collect(),
    }
}

fn from_file(file: LayoutFile) -> Result<Layout> {
    let components = file
        .components
        .into_iter()
        .map(|c| {
            let params = GeomParams::new(
                Vector2::new(c.p[0], c.p[1]),
                c.z,
                c.w,
                c.h,
                Vector3::new(c.normal[0], c.normal[1], c.normal[2]),
            )
            .map_err(|e| Error::Parse(format!("component `{}`: {e}", c.id)))?;
            Ok(Component { id: c.id, kind: c.kind, instance_ref: c.instance_ref, params })
        })
        .collect::<Result<Vec<_>>>()?;
    let layout =
        Layout { building_id: file.building_id, base_elevation: file.base_elevation, components };
    let report = validate_layout(&layout);
    if let Some(v) = report.violations.first() {
        return Err(Error::Parse(match &v.component {
            Some(id) => format!("component `{id}`, field `{}`: {}", v.field, v.message),
            None => format!("field `{}`: {}", v.field, v.message),
        }));
    }
    Ok(layout)
}

/// Serializes a layout to canonical pretty-printed JSON.
pub fn layout_to_json(layout: &Layout) -> String {
    let mut text = serde_json::to_string_pretty(&to_file(layout)).expect("layout serializes");
    text.push('\n');
    text
}

/// Parses and validates a layout from JSON text.
pub fn layout_from_json(text: &str) -> Result<Layout> {
    let file: LayoutFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_file(file)
}

pub fn save_layout(layout: &Layout, path: &Path) -> Result<()> {
    std::fs::write(path, layout_to_json(layout))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_layout(path: &Path) -> Result<Layout> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    layout_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
