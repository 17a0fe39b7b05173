//! Layout evaluation: area-based precision/recall/F against ground truth,
//! category statistics, and the Gaussian-noise robustness protocol.
//!
//! Intersection areas are computed by projecting one oriented rectangle
//! onto the plane of the other (along the latter's normal) and clipping
//! the projected quad against it with Sutherland-Hodgman.

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attrspace::build_model_spaces;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::model::{plane_axes, Component, GeomParams, Layout};
use crate::regularize::{regularize, CategoryCounts, RunReport};

/// Projection is considered meaningless when the two rectangle normals
/// diverge by more than this angle.
pub const MAX_PROJECTION_ANGLE: f64 = std::f64::consts::FRAC_PI_3;

/// An oriented rectangle in world space.
#[derive(Debug, Clone)]
pub struct Rect3 {
    pub center: Vector3<f64>,
    /// Unit width axis.
    pub u: Vector3<f64>,
    /// Unit height axis.
    pub v: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub w: f64,
    pub h: f64,
}

/// World-space rectangle of a component (absolute elevation).
pub fn component_rect(c: &Component, base_elevation: f64) -> Rect3 {
    let gp = &c.params;
    let (u, v) = plane_axes(gp.lambda, gp.theta);
    Rect3 {
        center: Vector3::new(gp.p.x, gp.p.y, base_elevation + gp.z),
        u,
        v,
        normal: gp.n,
        w: gp.w,
        h: gp.h,
    }
}

/// Clips a polygon against the half-plane `keep(point) >= 0` given by one
/// rectangle edge; standard Sutherland-Hodgman step.
fn clip_halfplane(poly: &[Vector2<f64>], keep: impl Fn(&Vector2<f64>) -> f64) -> Vec<Vector2<f64>> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let ds = keep(&s);
        let de = keep(&e);
        let cross = |out: &mut Vec<Vector2<f64>>| {
            let t = ds / (ds - de);
            out.push(s + (e - s) * t);
        };
        match (ds >= 0.0, de >= 0.0) {
            (true, true) => out.push(e),
            (true, false) => cross(&mut out),
            (false, true) => {
                cross(&mut out);
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

fn shoelace_area(poly: &[Vector2<f64>]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += a.x * b.y - b.x * a.y;
    }
    acc.abs() / 2.0
}

/// Area of rectangle `a` projected (along `b`'s normal) onto `b` and
/// clipped against it, in square meters. Returns 0 when the normals
/// diverge beyond [`MAX_PROJECTION_ANGLE`].
pub fn rect_intersection_area(a: &Rect3, b: &Rect3) -> Result<f64> {
    if a.w <= 0.0 || a.h <= 0.0 || b.w <= 0.0 || b.h <= 0.0 {
        return Err(Error::InvalidSize("degenerate rectangle".into()));
    }
    let angle = a.normal.dot(&b.normal).clamp(-1.0, 1.0).acos();
    if angle > MAX_PROJECTION_ANGLE {
        return Ok(0.0);
    }
    // In-plane coordinates of a's corners in b's frame; projection along
    // b's normal leaves these coordinates untouched.
    let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(sx, sy)| {
        let q = a.center + a.u * (sx * a.w / 2.0) + a.v * (sy * a.h / 2.0);
        let d = q - b.center;
        Vector2::new(d.dot(&b.u), d.dot(&b.v))
    });
    let (hw, hh) = (b.w / 2.0, b.h / 2.0);
    let mut poly = corners.to_vec();
    for f in [
        Box::new(move |p: &Vector2<f64>| hw - p.x) as Box<dyn Fn(&Vector2<f64>) -> f64>,
        Box::new(move |p: &Vector2<f64>| p.x + hw),
        Box::new(move |p: &Vector2<f64>| hh - p.y),
        Box::new(move |p: &Vector2<f64>| p.y + hh),
    ] {
        poly = clip_halfplane(&poly, f);
        if poly.is_empty() {
            return Ok(0.0);
        }
    }
    Ok(shoelace_area(&poly))
}

/// Intersection, own and truth areas of one evaluated component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub id: String,
    pub intersection: f64,
    pub own_area: f64,
    pub truth_area: f64,
}

/// Area-based precision/recall/F of a layout against ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub per_component_overlap: Vec<OverlapEntry>,
    /// Layout ids with no counterpart in the truth layout.
    pub unmatched: Vec<String>,
}

/// Scores `layout` against `truth`, pairing components by id. Layout ids
/// missing from the truth are listed and contribute zero intersection.
pub fn prf(layout: &Layout, truth: &Layout) -> Result<EvalReport> {
    let mut overlaps = Vec::with_capacity(layout.len());
    let mut unmatched = Vec::new();
    let mut inter_sum = 0.0;
    let mut own_sum = 0.0;
    for comp in &layout.components {
        let rect = component_rect(comp, layout.base_elevation);
        let own_area = comp.params.w * comp.params.h;
        own_sum += own_area;
        match truth.component(&comp.id) {
            Some(t) => {
                let trect = component_rect(t, truth.base_elevation);
                let inter = rect_intersection_area(&rect, &trect)?;
                inter_sum += inter;
                overlaps.push(OverlapEntry {
                    id: comp.id.clone(),
                    intersection: inter,
                    own_area,
                    truth_area: t.params.w * t.params.h,
                });
            }
            None => {
                unmatched.push(comp.id.clone());
                overlaps.push(OverlapEntry {
                    id: comp.id.clone(),
                    intersection: 0.0,
                    own_area,
                    truth_area: 0.0,
                });
            }
        }
    }
    let truth_sum: f64 = truth.components.iter().map(|c| c.params.w * c.params.h).sum();
    let precision = if own_sum > 0.0 { inter_sum / own_sum } else { 0.0 };
    let recall = if truth_sum > 0.0 { inter_sum / truth_sum } else { 0.0 };
    let f_score =
        if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(EvalReport { precision, recall, f_score, per_component_overlap: overlaps, unmatched })
}

/// Gaussian-noise specification for [`perturb`].
///
/// `base_sigma` is 0.005 times the shortest rectangle edge of the truth
/// layout; the applied standard deviation is `level * base_sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub base_sigma: f64,
    /// Noise level multiplier; 0 is allowed and means "no noise".
    pub level: u32,
    pub seed: u64,
}

/// Shortest rectangle edge over all components, in meters.
pub fn shortest_edge(layout: &Layout) -> f64 {
    layout
        .components
        .iter()
        .map(|c| c.params.w.min(c.params.h))
        .fold(f64::INFINITY, f64::min)
}

impl NoiseSpec {
    pub fn for_layout(truth: &Layout, level: u32, seed: u64) -> Self {
        NoiseSpec { base_sigma: 0.005 * shortest_edge(truth), level, seed }
    }

    pub fn sigma(&self) -> f64 {
        self.level as f64 * self.base_sigma
    }
}

/// Adds zero-mean Gaussian noise (std `level * base_sigma`) to position,
/// elevation and sizes, and tilts each normal by a Gaussian angle about a
/// random in-plane axis. Deterministic in the seed; sizes stay above 5% of
/// the shortest truth edge.
pub fn perturb(truth: &Layout, spec: &NoiseSpec) -> Layout {
    let sigma = spec.sigma();
    if sigma == 0.0 {
        return truth.clone();
    }
    let e = shortest_edge(truth);
    let min_size = 0.05 * e;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let field = Normal::new(0.0, sigma).expect("positive sigma");
    let tilt = Normal::new(0.0, sigma / e).expect("positive sigma");

    let components = truth
        .components
        .iter()
        .map(|c| {
            let gp = &c.params;
            let p = Vector2::new(gp.p.x + field.sample(&mut rng), gp.p.y + field.sample(&mut rng));
            let z = gp.z + field.sample(&mut rng);
            let w = (gp.w + field.sample(&mut rng)).max(min_size);
            let h = (gp.h + field.sample(&mut rng)).max(min_size);
            let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let alpha: f64 = tilt.sample(&mut rng);
            let (u, v) = plane_axes(gp.lambda, gp.theta);
            let axis = u * phi.cos() + v * phi.sin();
            // Rodrigues rotation; axis is orthogonal to the normal.
            let n = (gp.n * alpha.cos() + axis.cross(&gp.n) * alpha.sin()).normalize();
            Component {
                id: c.id.clone(),
                kind: c.kind,
                instance_ref: c.instance_ref.clone(),
                params: GeomParams::new(p, z, w, h, n).expect("perturbed params stay valid"),
            }
        })
        .collect();
    Layout {
        building_id: truth.building_id.clone(),
        base_elevation: truth.base_elevation,
        components,
    }
}

/// Candidate counts of the layout's clustered attribute spaces, in
/// (P, Z, O, W, H) order.
pub fn category_stats(layout: &Layout) -> Result<CategoryCounts> {
    Ok(CategoryCounts::from_spaces(&build_model_spaces(layout)?))
}

/// Precision/recall/F triple of one scored layout.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrfSummary {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

impl From<&EvalReport> for PrfSummary {
    fn from(r: &EvalReport) -> Self {
        PrfSummary { precision: r.precision, recall: r.recall, f_score: r.f_score }
    }
}

/// Successful regularization of one sweep cell.
#[derive(Debug, Clone)]
pub struct SweepSuccess {
    pub reg: PrfSummary,
    pub report: RunReport,
    pub layout: Layout,
}

/// One (level, seed) cell of a robustness sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub level: u32,
    pub seed: u64,
    pub init: PrfSummary,
    /// Regularization outcome; failures keep their message and the sweep
    /// continues.
    pub outcome: std::result::Result<Box<SweepSuccess>, String>,
}

/// Runs the noise-regularize-score protocol over every (level, seed) pair,
/// in parallel; rows come back sorted by (level, seed).
pub fn robustness_sweep(
    truth: &Layout,
    levels: &[u32],
    seeds: &[u64],
    config: &Config,
) -> Result<Vec<SweepCell>> {
    let mut pairs: Vec<(u32, u64)> = Vec::new();
    for &level in levels {
        for &seed in seeds {
            pairs.push((level, seed));
        }
    }
    let mut cells: Vec<SweepCell> = pairs
        .par_iter()
        .map(|&(level, seed)| {
            let spec = NoiseSpec::for_layout(truth, level, seed);
            let noisy = perturb(truth, &spec);
            let init = PrfSummary::from(&prf(&noisy, truth).expect("ids match truth"));
            let outcome = regularize(&noisy, config)
                .and_then(|(layout, report)| {
                    let reg = PrfSummary::from(&prf(&layout, truth)?);
                    Ok(Box::new(SweepSuccess { reg, report, layout }))
                })
                .map_err(|e| e.to_string());
            SweepCell { level, seed, init, outcome }
        })
        .collect();
    cells.sort_by_key(|c| (c.level, c.seed));
    Ok(cells)
}

/// Renders sweep cells as CSV with the fixed header
/// `level,seed,p_init,r_init,f_init,p_reg,r_reg,f_reg`.
/// Failed cells report NaN metrics.
pub fn sweep_to_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("level,seed,p_init,r_init,f_init,p_reg,r_reg,f_reg\n");
    for c in cells {
        let reg = match &c.outcome {
            Ok(s) => s.reg,
            Err(_) => PrfSummary { precision: f64::NAN, recall: f64::NAN, f_score: f64::NAN },
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.level,
            c.seed,
            c.init.precision,
            c.init.recall,
            c.init.f_score,
            reg.precision,
            reg.recall,
            reg.f_score
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ComponentKind;
    use crate::synth::{generate_synthetic, SyntheticSpec};
    use approx::assert_relative_eq;

    fn comp(id: &str, p: (f64, f64), z: f64, w: f64, h: f64, n: (f64, f64, f64)) -> Component {
        Component {
            id: id.into(),
            kind: ComponentKind::Window,
            instance_ref: "lib/w".into(),
            params: GeomParams::new(
                Vector2::new(p.0, p.1),
                z,
                w,
                h,
                Vector3::new(n.0, n.1, n.2).normalize(),
            )
            .unwrap(),
        }
    }

    fn layout_of(components: Vec<Component>) -> Layout {
        Layout { building_id: "t".into(), base_elevation: 0.0, components }
    }

    fn rect(c: &Component) -> Rect3 {
        component_rect(c, 0.0)
    }

    #[test]
    fn identical_rectangles_full_area() {
        let a = comp("a", (1.0, 2.0), 3.0, 1.2, 1.4, (0.0, -1.0, 0.0));
        let area = rect_intersection_area(&rect(&a), &rect(&a)).unwrap();
        assert_relative_eq!(area, 1.2 * 1.4, epsilon = 1e-12);
    }

    #[test]
    fn half_shifted_rectangles() {
        let a = comp("a", (0.0, 0.0), 0.0, 2.0, 1.0, (0.0, -1.0, 0.0));
        let b = comp("b", (1.0, 0.0), 0.0, 2.0, 1.0, (0.0, -1.0, 0.0));
        let area = rect_intersection_area(&rect(&a), &rect(&b)).unwrap();
        assert_relative_eq!(area, 1.0, epsilon = 1e-12); // (w/2) * h
    }

    #[test]
    fn quarter_shifted_unit_squares() {
        // Unit squares shifted by (0.25, 0.25) in-plane overlap on 0.75^2.
        let a = comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0));
        let b = comp("b", (0.25, 0.0), 0.25, 1.0, 1.0, (0.0, -1.0, 0.0));
        let area = rect_intersection_area(&rect(&a), &rect(&b)).unwrap();
        assert_relative_eq!(area, 0.5625, epsilon = 1e-12);
    }

    #[test]
    fn divergent_normals_score_zero() {
        let a = comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0));
        let b = comp("b", (0.0, 0.0), 0.0, 1.0, 1.0, (1.0, 0.0, 0.0));
        assert_eq!(rect_intersection_area(&rect(&a), &rect(&b)).unwrap(), 0.0);
    }

    #[test]
    fn intersection_bounded_and_symmetric_for_coplanar() {
        let a = comp("a", (0.3, 0.0), 0.1, 1.7, 0.9, (0.0, -1.0, 0.0));
        let b = comp("b", (0.0, 0.0), 0.0, 1.1, 1.3, (0.0, -1.0, 0.0));
        let ab = rect_intersection_area(&rect(&a), &rect(&b)).unwrap();
        let ba = rect_intersection_area(&rect(&b), &rect(&a)).unwrap();
        assert_relative_eq!(ab, ba, epsilon = 1e-9);
        assert!(ab <= (1.7f64 * 0.9).min(1.1 * 1.3) + 1e-12);
    }

    #[test]
    fn prf_identity_and_disjoint() {
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
            comp("b", (3.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
        ]);
        let r = prf(&layout, &layout).unwrap();
        assert_relative_eq!(r.precision, 1.0);
        assert_relative_eq!(r.recall, 1.0);
        assert_relative_eq!(r.f_score, 1.0);

        let far = layout_of(vec![
            comp("a", (100.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
            comp("b", (103.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
        ]);
        let r = prf(&far, &layout).unwrap();
        assert_eq!((r.precision, r.recall, r.f_score), (0.0, 0.0, 0.0));
    }

    #[test]
    fn prf_symmetric_half_overlap() {
        let truth = layout_of(vec![comp("a", (0.0, 0.0), 0.0, 2.0, 1.0, (0.0, -1.0, 0.0))]);
        let layout = layout_of(vec![comp("a", (1.0, 0.0), 0.0, 2.0, 1.0, (0.0, -1.0, 0.0))]);
        let r = prf(&layout, &truth).unwrap();
        assert_relative_eq!(r.precision, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.recall, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.f_score, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn prf_lists_unmatched_components() {
        let truth = layout_of(vec![comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0))]);
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
            comp("ghost", (5.0, 0.0), 0.0, 1.0, 1.0, (0.0, -1.0, 0.0)),
        ]);
        let r = prf(&layout, &truth).unwrap();
        assert_eq!(r.unmatched, vec!["ghost".to_string()]);
        assert_relative_eq!(r.precision, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.recall, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn perturb_zero_sigma_is_identity() {
        let truth = generate_synthetic(&SyntheticSpec::default()).unwrap();
        let spec = NoiseSpec::for_layout(&truth, 0, 42);
        assert_eq!(perturb(&truth, &spec), truth);
    }

    #[test]
    fn perturb_deterministic() {
        let truth = generate_synthetic(&SyntheticSpec::default()).unwrap();
        let spec = NoiseSpec::for_layout(&truth, 5, 42);
        assert_eq!(perturb(&truth, &spec), perturb(&truth, &spec));
        let other = NoiseSpec::for_layout(&truth, 5, 43);
        assert_ne!(perturb(&truth, &spec), perturb(&truth, &other));
    }

    #[test]
    fn perturb_field_std_matches_spec() {
        // 10^4 independent draws of one component's z offset: the sample
        // standard deviation must sit within 5% of 5 * base_sigma.
        let truth = layout_of(vec![comp("a", (0.0, 0.0), 5.0, 1.0, 1.0, (0.0, -1.0, 0.0))]);
        let spec0 = NoiseSpec::for_layout(&truth, 5, 0);
        let sigma = spec0.sigma();
        let n = 10_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for seed in 0..n {
            let noisy = perturb(&truth, &NoiseSpec { seed: seed as u64, ..spec0 });
            let d = noisy.components[0].params.z - 5.0;
            sum += d;
            sumsq += d * d;
        }
        let mean = sum / n as f64;
        let std = (sumsq / n as f64 - mean * mean).sqrt();
        assert!((std - sigma).abs() / sigma < 0.05, "std {std} vs sigma {sigma}");
    }

    #[test]
    fn category_stats_on_grid_and_single() {
        let grid = generate_synthetic(&SyntheticSpec {
            floors: 4,
            columns: 3,
            facades: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(category_stats(&grid).unwrap().as_tuple(), (3, 4, 1, 1, 1));

        let single = layout_of(vec![comp("a", (0.0, 0.0), 1.0, 1.0, 1.0, (0.0, -1.0, 0.0))]);
        assert_eq!(category_stats(&single).unwrap().as_tuple(), (1, 1, 1, 1, 1));
    }

    #[test]
    fn sweep_zero_level_recovers_truth() {
        let truth = generate_synthetic(&SyntheticSpec {
            floors: 2,
            columns: 2,
            facades: 1,
            ..Default::default()
        })
        .unwrap();
        let cells = robustness_sweep(&truth, &[0], &[7], &Config::default()).unwrap();
        assert_eq!(cells.len(), 1);
        let cell = &cells[0];
        assert!((cell.init.f_score - 1.0).abs() < 1e-9);
        let success = cell.outcome.as_ref().unwrap();
        assert!((success.reg.f_score - 1.0).abs() < 1e-9, "f = {}", success.reg.f_score);
    }

    #[test]
    fn sweep_csv_shape() {
        let truth = generate_synthetic(&SyntheticSpec {
            floors: 2,
            columns: 2,
            facades: 1,
            ..Default::default()
        })
        .unwrap();
        let cells = robustness_sweep(&truth, &[0, 1], &[0, 1], &Config::default()).unwrap();
        let csv = sweep_to_csv(&cells);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "level,seed,p_init,r_init,f_init,p_reg,r_reg,f_reg");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[4].starts_with("1,1,"));
        for cell in &cells {
            let s = cell.outcome.as_ref().unwrap();
            for v in [s.reg.precision, s.reg.recall, s.reg.f_score, cell.init.f_score] {
                assert!((0.0..=1.0 + 1e-9).contains(&v));
            }
        }
    }
}
