//! Flat-kernel mean-shift baseline.
//!
//! Each attribute is clustered independently: every component's value is
//! moved to the mode its mean-shift iteration converges to, with a flat
//! kernel of bandwidth `factor * delta` (delta as in the attribute
//! spaces). No joint constraints are applied, so distinct components may
//! end up on identical positions; that is the point of the comparison.

use nalgebra::{Vector2, Vector3};

use crate::attrspace::{adjacency_delta, dist_angular, dist_p, dist_scalar};
use crate::error::Result;
use crate::model::{Component, GeomParams, Layout};

const MAX_ITERS: usize = 200;
const TOL: f64 = 1e-12;

/// Default bandwidth factor, matching the clustering threshold 2*delta.
pub const DEFAULT_BANDWIDTH_FACTOR: f64 = 2.0;

fn mode_scalar(start: f64, values: &[f64], bandwidth: f64) -> f64 {
    let mut x = start;
    for _ in 0..MAX_ITERS {
        let within: Vec<f64> =
            values.iter().copied().filter(|v| dist_scalar(*v, x) <= bandwidth).collect();
        let mean = within.iter().sum::<f64>() / within.len() as f64;
        if (mean - x).abs() < TOL {
            return mean;
        }
        x = mean;
    }
    x
}

fn mode_p(start: Vector2<f64>, values: &[Vector2<f64>], bandwidth: f64) -> Vector2<f64> {
    let mut x = start;
    for _ in 0..MAX_ITERS {
        let within: Vec<Vector2<f64>> =
            values.iter().copied().filter(|v| dist_p(v, &x) <= bandwidth).collect();
        let mean = within.iter().fold(Vector2::zeros(), |a, v| a + v) / within.len() as f64;
        if (mean - x).norm() < TOL {
            return mean;
        }
        x = mean;
    }
    x
}

fn mode_normal(start: Vector3<f64>, values: &[Vector3<f64>], bandwidth: f64) -> Vector3<f64> {
    let mut x = start;
    for _ in 0..MAX_ITERS {
        let within: Vec<Vector3<f64>> =
            values.iter().copied().filter(|v| dist_angular(v, &x) <= bandwidth).collect();
        let sum = within.iter().fold(Vector3::zeros(), |a, v| a + v);
        if sum.norm() < 1e-12 {
            return x; // antipodal window, stay put
        }
        let mean = sum / sum.norm();
        if dist_angular(&mean, &x) < TOL {
            return mean;
        }
        x = mean;
    }
    x
}

/// Replaces every component's attribute values by their mean-shift modes.
/// Bandwidth per attribute: `bandwidth_factor` times the attribute's
/// adaptive threshold.
pub fn meanshift_baseline(layout: &Layout, bandwidth_factor: f64) -> Result<Layout> {
    let ps: Vec<Vector2<f64>> = layout.components.iter().map(|c| c.params.p).collect();
    let zs: Vec<f64> = layout.components.iter().map(|c| c.params.z).collect();
    let ws: Vec<f64> = layout.components.iter().map(|c| c.params.w).collect();
    let hs: Vec<f64> = layout.components.iter().map(|c| c.params.h).collect();
    let ns: Vec<Vector3<f64>> = layout.components.iter().map(|c| c.params.n).collect();

    let bw_p = bandwidth_factor * adjacency_delta(&ps, dist_p);
    let bw_z = bandwidth_factor * adjacency_delta(&zs, |a, b| dist_scalar(*a, *b));
    let bw_w = bandwidth_factor * adjacency_delta(&ws, |a, b| dist_scalar(*a, *b));
    let bw_h = bandwidth_factor * adjacency_delta(&hs, |a, b| dist_scalar(*a, *b));
    let bw_n = bandwidth_factor * adjacency_delta(&ns, |a, b| dist_angular(a, b));

    let components = layout
        .components
        .iter()
        .map(|c| {
            let gp = &c.params;
            let params = GeomParams::new(
                mode_p(gp.p, &ps, bw_p),
                mode_scalar(gp.z, &zs, bw_z),
                mode_scalar(gp.w, &ws, bw_w),
                mode_scalar(gp.h, &hs, bw_h),
                mode_normal(gp.n, &ns, bw_n),
            )?;
            Ok(Component {
                id: c.id.clone(),
                kind: c.kind,
                instance_ref: c.instance_ref.clone(),
                params,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Layout {
        building_id: layout.building_id.clone(),
        base_elevation: layout.base_elevation,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::category_stats;
    use crate::model::ComponentKind;
    use approx::assert_relative_eq;

    fn comp_z(id: &str, x: f64, z: f64) -> Component {
        Component {
            id: id.into(),
            kind: ComponentKind::Window,
            instance_ref: "lib/w".into(),
            params: GeomParams::new(
                Vector2::new(x, 0.0),
                z,
                1.0,
                1.0,
                Vector3::new(0.0, -1.0, 0.0),
            )
            .unwrap(),
        }
    }

    fn layout_of(components: Vec<Component>) -> Layout {
        Layout { building_id: "t".into(), base_elevation: 0.0, components }
    }

    #[test]
    fn identical_values_unchanged() {
        let layout = layout_of(vec![comp_z("a", 0.0, 2.0), comp_z("b", 3.0, 2.0)]);
        let out = meanshift_baseline(&layout, 2.0).unwrap();
        for c in &out.components {
            assert_relative_eq!(c.params.z, 2.0);
            assert_relative_eq!(c.params.w, 1.0);
        }
    }

    #[test]
    fn separated_groups_snap_to_group_means() {
        // z groups {0.0, 0.1} and {6.0, 6.1}: the gap dwarfs the bandwidth,
        // so each group converges onto its own mean.
        let layout = layout_of(vec![
            comp_z("a", 0.0, 0.0),
            comp_z("b", 3.0, 0.1),
            comp_z("c", 6.0, 6.0),
            comp_z("d", 9.0, 6.1),
        ]);
        let out = meanshift_baseline(&layout, 2.0).unwrap();
        assert_relative_eq!(out.components[0].params.z, 0.05, epsilon = 1e-9);
        assert_relative_eq!(out.components[1].params.z, 0.05, epsilon = 1e-9);
        assert_relative_eq!(out.components[2].params.z, 6.05, epsilon = 1e-9);
        assert_relative_eq!(out.components[3].params.z, 6.05, epsilon = 1e-9);
    }

    #[test]
    fn values_within_one_bandwidth_converge_together() {
        let layout =
            layout_of(vec![comp_z("a", 0.0, 0.0), comp_z("b", 3.0, 0.5), comp_z("c", 6.0, 1.0)]);
        // Bandwidth factor large enough that every window spans all values.
        let out = meanshift_baseline(&layout, 4.0).unwrap();
        for c in &out.components {
            assert_relative_eq!(c.params.z, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn category_count_never_grows() {
        let layout = layout_of(vec![
            comp_z("a", 0.0, 0.0),
            comp_z("b", 3.0, 0.05),
            comp_z("c", 6.0, 3.0),
            comp_z("d", 9.0, 3.1),
        ]);
        let before = category_stats(&layout).unwrap();
        let out = meanshift_baseline(&layout, 2.0).unwrap();
        let after = category_stats(&out).unwrap();
        assert!(after.z <= before.z);
        assert!(after.p <= before.p);
    }
}
