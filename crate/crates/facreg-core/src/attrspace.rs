//! Clustered attribute spaces for position, elevation, orientation, width
//! and height.
//!
//! Each attribute's initial values are grouped by single-linkage
//! agglomeration with a link distance of twice the adaptive threshold
//! `delta` (the mean nearest-neighbor distance of the values). Each
//! cluster's mean becomes one candidate value; per-component candidate
//! supports are then restricted to the pruning radius.

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::logic::prune_support;
use crate::model::{derive_angles, Layout};

/// Smallest allowed adaptive threshold; keeps degenerate (coincident or
/// single-value) attributes processable.
pub const DELTA_FLOOR: f64 = 1e-6;

/// Default pruning radius as a multiple of the clustering threshold.
pub const DEFAULT_PRUNE_FACTOR: f64 = 5.0;

/// Which geometric attribute a space describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrKind {
    P,
    Z,
    W,
    H,
    O,
}

impl AttrKind {
    pub const ALL: [AttrKind; 5] = [AttrKind::P, AttrKind::Z, AttrKind::W, AttrKind::H, AttrKind::O];

    pub fn name(self) -> &'static str {
        match self {
            AttrKind::P => "p",
            AttrKind::Z => "z",
            AttrKind::W => "w",
            AttrKind::H => "h",
            AttrKind::O => "o",
        }
    }
}

/// One orientation candidate: a unit normal with its derived angles.
#[derive(Debug, Clone, PartialEq)]
pub struct Orientation {
    pub normal: Vector3<f64>,
    pub lambda: f64,
    pub theta: f64,
}

impl Orientation {
    pub fn from_normal(normal: Vector3<f64>) -> Result<Self> {
        let (lambda, theta) = derive_angles(&normal)?;
        Ok(Orientation { normal, lambda, theta })
    }
}

/// Candidate values for one attribute plus the per-component supports.
#[derive(Debug, Clone)]
pub struct AttributeSpace<T> {
    pub kind: AttrKind,
    /// Cluster representatives, sorted (ascending scalars, lexicographic
    /// positions, (lambda, theta) order for orientations).
    pub candidates: Vec<T>,
    /// Adaptive threshold the clustering ran with.
    pub delta: f64,
    /// For each component, the candidate indices within the pruning radius.
    pub member_map: Vec<Vec<usize>>,
}

impl<T> AttributeSpace<T> {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// The five clustered spaces of one layout.
#[derive(Debug, Clone)]
pub struct ModelSpaces {
    pub p: AttributeSpace<Vector2<f64>>,
    pub z: AttributeSpace<f64>,
    pub w: AttributeSpace<f64>,
    pub h: AttributeSpace<f64>,
    pub o: AttributeSpace<Orientation>,
}

impl ModelSpaces {
    /// Candidate counts in Table-style order (|P|, |Z|, |O|, |W|, |H|).
    pub fn counts(&self) -> (usize, usize, usize, usize, usize) {
        (self.p.len(), self.z.len(), self.o.len(), self.w.len(), self.h.len())
    }

    pub fn num_components(&self) -> usize {
        self.p.member_map.len()
    }
}

/// Distance between two horizontal positions.
pub fn dist_p(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a - b).norm()
}

/// Distance between two scalars.
pub fn dist_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// Angular distance between two unit normals, in radians.
pub fn dist_angular(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Circular distance between two angles in (-pi, pi].
pub fn dist_circular(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % std::f64::consts::TAU;
    d.min(std::f64::consts::TAU - d)
}

/// Mean distance from each value to its nearest other value, floored at
/// [`DELTA_FLOOR`]. Fewer than two values also return the floor.
pub fn adjacency_delta<T>(values: &[T], metric: impl Fn(&T, &T) -> f64) -> f64 {
    if values.len() < 2 {
        return DELTA_FLOOR;
    }
    let mut sum = 0.0;
    for (i, a) in values.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (j, b) in values.iter().enumerate() {
            if i != j {
                nearest = nearest.min(metric(a, b));
            }
        }
        sum += nearest;
    }
    (sum / values.len() as f64).max(DELTA_FLOOR)
}

/// Single-linkage clustering: values at distance <= 2*delta are linked and
/// connected groups form clusters. Returns, per input index, the cluster id
/// in first-seen order.
pub(crate) fn link_clusters<T>(values: &[T], metric: impl Fn(&T, &T) -> f64, delta: f64) -> Vec<usize> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if metric(&values[i], &values[j]) <= 2.0 * delta {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut roots = std::collections::HashMap::new();
    let mut out = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let next = roots.len();
        out[i] = *roots.entry(r).or_insert(next);
    }
    out
}

/// Groups values into clusters and returns (candidates, cluster-of-value),
/// with candidates produced by `mean` over each cluster's members and
/// sorted by `key`.
fn cluster_generic<T: Clone>(
    values: &[T],
    metric: impl Fn(&T, &T) -> f64,
    mean: impl Fn(&[&T]) -> T,
    key: impl Fn(&T, &T) -> std::cmp::Ordering,
    delta: f64,
) -> Result<(Vec<T>, Vec<usize>)> {
    if values.is_empty() {
        return Err(Error::EmptyAttribute);
    }
    let labels = link_clusters(values, &metric, delta);
    let num = labels.iter().max().unwrap() + 1;
    let mut members: Vec<Vec<&T>> = vec![Vec::new(); num];
    for (v, &l) in values.iter().zip(&labels) {
        members[l].push(v);
    }
    let mut candidates: Vec<(usize, T)> =
        members.iter().enumerate().map(|(l, m)| (l, mean(m))).collect();
    candidates.sort_by(|a, b| key(&a.1, &b.1));
    // Remap cluster labels to sorted candidate order.
    let mut remap = vec![0usize; num];
    for (new, (old, _)) in candidates.iter().enumerate() {
        remap[*old] = new;
    }
    let assignment = labels.iter().map(|&l| remap[l]).collect();
    Ok((candidates.into_iter().map(|(_, c)| c).collect(), assignment))
}

fn mean_scalar(members: &[&f64]) -> f64 {
    members.iter().copied().sum::<f64>() / members.len() as f64
}

fn mean_p(members: &[&Vector2<f64>]) -> Vector2<f64> {
    let sum: Vector2<f64> = members.iter().fold(Vector2::zeros(), |acc, v| acc + **v);
    sum / members.len() as f64
}

fn mean_orientation(members: &[&Orientation]) -> Orientation {
    let sum: Vector3<f64> = members.iter().fold(Vector3::zeros(), |acc, o| acc + o.normal);
    let normal = if sum.norm() < 1e-12 {
        members[0].normal // antipodal degenerate cluster; keep the first member
    } else {
        sum / sum.norm()
    };
    Orientation::from_normal(normal).expect("renormalized mean is unit")
}

fn total_cmp_pair(a: (f64, f64), b: (f64, f64)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Clusters scalar attribute values with threshold `2*delta`.
pub fn cluster_scalars(values: &[f64], delta: f64) -> Result<Vec<f64>> {
    cluster_generic(values, |a, b| dist_scalar(*a, *b), mean_scalar, f64::total_cmp, delta)
        .map(|(c, _)| c)
}

/// Clusters 2-D positions with threshold `2*delta`.
pub fn cluster_positions(values: &[Vector2<f64>], delta: f64) -> Result<Vec<Vector2<f64>>> {
    cluster_generic(
        values,
        dist_p,
        mean_p,
        |a, b| total_cmp_pair((a.x, a.y), (b.x, b.y)),
        delta,
    )
    .map(|(c, _)| c)
}

/// Clusters orientations by angular distance on the normals; the cluster
/// mean is the renormalized mean normal with rederived angles.
pub fn cluster_orientations(values: &[Orientation], delta: f64) -> Result<Vec<Orientation>> {
    cluster_generic(
        values,
        |a, b| dist_angular(&a.normal, &b.normal),
        mean_orientation,
        |a, b| total_cmp_pair((a.lambda, a.theta), (b.lambda, b.theta)),
        delta,
    )
    .map(|(c, _)| c)
}

fn build_space<T: Clone>(
    kind: AttrKind,
    values: &[T],
    metric: impl Fn(&T, &T) -> f64 + Copy,
    mean: impl Fn(&[&T]) -> T,
    key: impl Fn(&T, &T) -> std::cmp::Ordering,
    prune_factor: f64,
) -> Result<AttributeSpace<T>> {
    let delta = adjacency_delta(values, metric);
    let (candidates, _) = cluster_generic(values, metric, mean, key, delta)?;
    let member_map = values
        .iter()
        .map(|v| {
            let residuals: Vec<f64> = candidates.iter().map(|c| metric(v, c)).collect();
            prune_support(&residuals, delta, prune_factor)
        })
        .collect();
    Ok(AttributeSpace { kind, candidates, delta, member_map })
}

/// Builds all five attribute spaces from a layout with the default pruning
/// radius of five thresholds.
pub fn build_model_spaces(layout: &Layout) -> Result<ModelSpaces> {
    build_model_spaces_with(layout, DEFAULT_PRUNE_FACTOR)
}

/// Builds the attribute spaces with an explicit pruning radius factor.
/// A factor of `f64::INFINITY` keeps every candidate in every support.
pub fn build_model_spaces_with(layout: &Layout, prune_factor: f64) -> Result<ModelSpaces> {
    let ps: Vec<Vector2<f64>> = layout.components.iter().map(|c| c.params.p).collect();
    let zs: Vec<f64> = layout.components.iter().map(|c| c.params.z).collect();
    let ws: Vec<f64> = layout.components.iter().map(|c| c.params.w).collect();
    let hs: Vec<f64> = layout.components.iter().map(|c| c.params.h).collect();
    let os: Vec<Orientation> = layout
        .components
        .iter()
        .map(|c| Orientation {
            normal: c.params.n,
            lambda: c.params.lambda,
            theta: c.params.theta,
        })
        .collect();

    Ok(ModelSpaces {
        p: build_space(
            AttrKind::P,
            &ps,
            |a, b| dist_p(a, b),
            mean_p,
            |a, b| total_cmp_pair((a.x, a.y), (b.x, b.y)),
            prune_factor,
        )?,
        z: build_space(
            AttrKind::Z,
            &zs,
            |a, b| dist_scalar(*a, *b),
            mean_scalar,
            f64::total_cmp,
            prune_factor,
        )?,
        w: build_space(
            AttrKind::W,
            &ws,
            |a, b| dist_scalar(*a, *b),
            mean_scalar,
            f64::total_cmp,
            prune_factor,
        )?,
        h: build_space(
            AttrKind::H,
            &hs,
            |a, b| dist_scalar(*a, *b),
            mean_scalar,
            f64::total_cmp,
            prune_factor,
        )?,
        o: build_space(
            AttrKind::O,
            &os,
            |a, b| dist_angular(&a.normal, &b.normal),
            mean_orientation,
            |a, b| total_cmp_pair((a.lambda, a.theta), (b.lambda, b.theta)),
            prune_factor,
        )?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Component, ComponentKind, GeomParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn adjacency_delta_hand_computed() {
        // Nearest-neighbor distances of {0, 1, 3} are {1, 1, 2}.
        let d = adjacency_delta(&[0.0, 1.0, 3.0], |a, b| dist_scalar(*a, *b));
        assert_relative_eq!(d, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn adjacency_delta_floors_for_coincident_and_singleton() {
        assert_eq!(adjacency_delta(&[5.0, 5.0, 5.0], |a, b| dist_scalar(*a, *b)), DELTA_FLOOR);
        assert_eq!(adjacency_delta(&[7.0], |a, b| dist_scalar(*a, *b)), DELTA_FLOOR);
    }

    #[test]
    fn adjacency_delta_orthogonal_normals() {
        let a = Vector3::new(1.0, 0.0, 0.0);
        let b = Vector3::new(0.0, 1.0, 0.0);
        let d = adjacency_delta(&[a, b], |x, y| dist_angular(x, y));
        assert_relative_eq!(d, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn scalar_clustering_splits_on_gaps() {
        // Threshold 0.2 links {0.0, 0.1} and {5.0, 5.05} but not across.
        let c = cluster_scalars(&[0.0, 0.1, 5.0, 5.05], 0.1).unwrap();
        assert_eq!(c.len(), 2);
        assert_relative_eq!(c[0], 0.05, epsilon = 1e-12);
        assert_relative_eq!(c[1], 5.025, epsilon = 1e-12);
    }

    #[test]
    fn singleton_clusters_unchanged() {
        let c = cluster_scalars(&[7.0], 12.0).unwrap();
        assert_eq!(c, vec![7.0]);
    }

    #[test]
    fn close_normals_merge_to_renormalized_mean() {
        let a = Orientation::from_normal(Vector3::new(1.0, 0.0, 0.0)).unwrap();
        let raw = Vector3::new(0.999, 0.0447, 0.0);
        let b = Orientation::from_normal(raw / raw.norm()).unwrap();
        assert!(dist_angular(&a.normal, &b.normal) < 0.2);
        let c = cluster_orientations(&[a.clone(), b.clone()], 0.1).unwrap();
        assert_eq!(c.len(), 1);
        let mean = (a.normal + b.normal).normalize();
        assert_relative_eq!(c[0].normal, mean, epsilon = 1e-12);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(cluster_scalars(&[], 1.0), Err(Error::EmptyAttribute)));
    }

    fn grid_layout(positions: &[(f64, f64)], z: f64) -> Layout {
        let comps = positions
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Component {
                id: format!("c{i}"),
                kind: ComponentKind::Window,
                instance_ref: "lib/w".into(),
                params: GeomParams::new(
                    Vector2::new(x, y),
                    z,
                    1.0,
                    1.0,
                    Vector3::new(0.0, 1.0, 0.0),
                )
                .unwrap(),
            })
            .collect();
        Layout { building_id: "t".into(), base_elevation: 0.0, components: comps }
    }

    #[test]
    fn identical_attribute_values_collapse() {
        // Two components differing only in p. Every duplicated attribute
        // collapses to one candidate; the two p values sit one
        // nearest-neighbor distance apart, which single linkage at 2*delta
        // also merges.
        let layout = grid_layout(&[(0.0, 0.0), (4.0, 0.0)], 1.0);
        let spaces = build_model_spaces(&layout).unwrap();
        assert_eq!(spaces.z.len(), 1);
        assert_eq!(spaces.w.len(), 1);
        assert_eq!(spaces.h.len(), 1);
        assert_eq!(spaces.o.len(), 1);
        assert_eq!(spaces.p.len(), 1);
    }

    #[test]
    fn repeated_positions_keep_columns_apart() {
        // Two columns, two floors: each p value appears twice, so the
        // adaptive threshold floors out and the columns stay distinct.
        let layout = grid_layout(&[(0.0, 0.0), (0.0, 0.0), (4.0, 0.0), (4.0, 0.0)], 1.0);
        let spaces = build_model_spaces(&layout).unwrap();
        assert_eq!(spaces.p.len(), 2);
        assert!(spaces.p.member_map.iter().all(|m| !m.is_empty()));
    }

    #[test]
    fn single_component_layout() {
        let layout = grid_layout(&[(1.0, 2.0)], 3.0);
        let spaces = build_model_spaces(&layout).unwrap();
        assert_eq!(spaces.counts(), (1, 1, 1, 1, 1));
        assert_eq!(spaces.p.member_map, vec![vec![0]]);
    }

    proptest! {
        /// Separation: candidate pairs farther than 2*delta; idempotence:
        /// reclustering the candidates returns them unchanged; coverage:
        /// candidate count bounded by the value count.
        #[test]
        fn cluster_invariants(values in proptest::collection::vec(-100.0..100.0f64, 1..40),
                              delta in 0.01..5.0f64) {
            let cands = cluster_scalars(&values, delta).unwrap();
            prop_assert!(!cands.is_empty());
            prop_assert!(cands.len() <= values.len());
            for i in 0..cands.len() {
                for j in (i + 1)..cands.len() {
                    prop_assert!(dist_scalar(cands[i], cands[j]) > 2.0 * delta);
                }
            }
            let again = cluster_scalars(&cands, delta).unwrap();
            prop_assert_eq!(again.len(), cands.len());
            for (a, b) in again.iter().zip(&cands) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            // Every value reaches some cluster within single-linkage range.
            for v in &values {
                prop_assert!(cands.iter().any(|c| dist_scalar(*v, *c) <= 2.0 * delta * values.len() as f64));
            }
        }
    }
}
