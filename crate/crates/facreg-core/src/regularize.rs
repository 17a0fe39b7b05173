//! Assembly of the full regularization program and the pipeline driving it.
//!
//! The program minimizes a data term (per-component distance to the chosen
//! candidate, per attribute) plus a weighted category-count term (the
//! `enum` operator per attribute) subject to:
//!
//! * **C1** — every component picks exactly one candidate per attribute.
//! * **C2** — no two components share both their position category and
//!   their elevation category (`s_p + s_z <= 1` over the `same` vars).
//! * **C3** — the normal and its two angles always come from one
//!   orientation candidate; holds by construction since orientation is a
//!   single selection vector over (n, lambda, theta) triples.
//! * **R1/R2** — components sharing an elevation category share a
//!   theta class, and components sharing a position category share a
//!   lambda class (`s_z <= s_thetaclass`, `s_p <= s_lambdaclass`).
//!
//! Classes group orientation candidates whose theta (resp. lambda) values
//! cluster together; the per-candidate class ids are precomputed lookup
//! tables carried in the [`VarMap`].

use serde::{Deserialize, Serialize};

use crate::attrspace::{
    build_model_spaces_with, dist_angular, dist_circular, dist_p, dist_scalar, link_clusters,
    AttrKind, ModelSpaces,
};
use crate::bip::{solve_bb, BipModel, Solution, SolveStatus};
use crate::config::{AttrValues, Config, WeightMode, Weights};
use crate::error::{Error, Result};
use crate::logic::{enum_expr, or_any, same, LinearConstraint, Relation, SelectionVector, Var};
use crate::model::{validate_layout, Component, GeomParams, Layout};

/// Per-component, per-candidate distances from the initial attribute values.
#[derive(Debug, Clone)]
pub struct Residuals {
    pub p: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub o: Vec<Vec<f64>>,
}

impl Residuals {
    pub fn row(&self, kind: AttrKind, component: usize) -> &[f64] {
        match kind {
            AttrKind::P => &self.p[component],
            AttrKind::Z => &self.z[component],
            AttrKind::W => &self.w[component],
            AttrKind::H => &self.h[component],
            AttrKind::O => &self.o[component],
        }
    }
}

/// Distances from each component's initial values to every candidate.
pub fn compute_residuals(layout: &Layout, spaces: &ModelSpaces) -> Result<Residuals> {
    if spaces.num_components() != layout.len() {
        return Err(Error::SpaceMismatch(format!(
            "spaces built for {} components, layout has {}",
            spaces.num_components(),
            layout.len()
        )));
    }
    let mut res = Residuals {
        p: Vec::with_capacity(layout.len()),
        z: Vec::with_capacity(layout.len()),
        w: Vec::with_capacity(layout.len()),
        h: Vec::with_capacity(layout.len()),
        o: Vec::with_capacity(layout.len()),
    };
    for comp in &layout.components {
        let gp = &comp.params;
        res.p.push(spaces.p.candidates.iter().map(|c| dist_p(&gp.p, c)).collect());
        res.z.push(spaces.z.candidates.iter().map(|c| dist_scalar(gp.z, *c)).collect());
        res.w.push(spaces.w.candidates.iter().map(|c| dist_scalar(gp.w, *c)).collect());
        res.h.push(spaces.h.candidates.iter().map(|c| dist_scalar(gp.h, *c)).collect());
        res.o
            .push(spaces.o.candidates.iter().map(|c| dist_angular(&gp.n, &c.normal)).collect());
    }
    Ok(res)
}

/// Resolves the omega weights: manual values pass through, auto mode uses
/// the mean nearest-candidate residual per attribute, floored at 1e-6.
pub fn resolve_weights(weights: &Weights, residuals: &Residuals) -> AttrValues {
    match weights.mode {
        WeightMode::Manual => weights.omega,
        WeightMode::Auto => {
            let mean_min = |rows: &Vec<Vec<f64>>| -> f64 {
                let sum: f64 = rows
                    .iter()
                    .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
                    .sum();
                (sum / rows.len() as f64).max(1e-6)
            };
            AttrValues {
                p: mean_min(&residuals.p),
                z: mean_min(&residuals.z),
                w: mean_min(&residuals.w),
                h: mean_min(&residuals.h),
                o: mean_min(&residuals.o),
            }
        }
    }
}

/// Selection vectors of one component, one per attribute.
#[derive(Debug, Clone)]
pub struct ComponentVars {
    pub p: SelectionVector,
    pub z: SelectionVector,
    pub w: SelectionVector,
    pub h: SelectionVector,
    pub o: SelectionVector,
}

impl ComponentVars {
    pub fn get(&self, kind: AttrKind) -> &SelectionVector {
        match kind {
            AttrKind::P => &self.p,
            AttrKind::Z => &self.z,
            AttrKind::W => &self.w,
            AttrKind::H => &self.h,
            AttrKind::O => &self.o,
        }
    }
}

/// Variable registry of one assembled program.
#[derive(Debug, Clone)]
pub struct VarMap {
    pub components: Vec<ComponentVars>,
    /// Theta class id per orientation candidate.
    pub theta_class: Vec<usize>,
    /// Lambda class id per orientation candidate.
    pub lambda_class: Vec<usize>,
    /// Per pair (i, j), i < j in row order: the (same_p, same_z) vars.
    pub pair_same: Vec<(usize, usize, Var, Var)>,
}

/// Candidate indices selected for one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSelection {
    pub p: usize,
    pub z: usize,
    pub w: usize,
    pub h: usize,
    pub o: usize,
}

impl ComponentSelection {
    pub fn get(&self, kind: AttrKind) -> usize {
        match kind {
            AttrKind::P => self.p,
            AttrKind::Z => self.z,
            AttrKind::W => self.w,
            AttrKind::H => self.h,
            AttrKind::O => self.o,
        }
    }
}

/// Groups orientation-candidate angle values into classes: single linkage
/// at twice the orientation space's threshold, so two candidates share a
/// theta (resp. lambda) class exactly when their angles differ by no more
/// than the noise scale the orientation clustering ran at.
pub fn orientation_classes(
    thetas: &[f64],
    lambdas: &[f64],
    o_delta: f64,
) -> (Vec<usize>, Vec<usize>) {
    let theta_class = link_clusters(thetas, |a, b| dist_scalar(*a, *b), o_delta);
    let lambda_class = link_clusters(lambdas, |a, b| dist_circular(*a, *b), o_delta);
    (theta_class, lambda_class)
}

fn build_selection(
    model: &mut BipModel,
    kind: AttrKind,
    component: usize,
    num_candidates: usize,
    support: &[usize],
) -> SelectionVector {
    let singleton = support.len() == 1;
    let vars: Vec<Var> = (0..num_candidates)
        .map(|j| {
            if !support.contains(&j) {
                model.constant(false)
            } else if singleton {
                model.constant(true)
            } else {
                model.fresh_var()
            }
        })
        .collect();
    if !singleton {
        model.add_constraint(LinearConstraint::new(
            support.iter().map(|&j| (1, vars[j])).collect(),
            Relation::Eq,
            1,
        ));
    }
    SelectionVector { attribute: kind, component, vars, support: support.to_vec() }
}

/// Class indicator vector: one variable per class, OR of the component's
/// orientation variables falling in that class.
fn build_class_selection(
    model: &mut BipModel,
    o_sel: &SelectionVector,
    class_of: &[usize],
    num_classes: usize,
) -> Result<SelectionVector> {
    let mut vars = Vec::with_capacity(num_classes);
    let mut support = Vec::new();
    for class in 0..num_classes {
        let members: Vec<Var> = o_sel
            .support
            .iter()
            .filter(|&&j| class_of[j] == class)
            .map(|&j| o_sel.vars[j])
            .collect();
        if members.is_empty() {
            vars.push(model.constant(false));
        } else {
            support.push(class);
            vars.push(or_any(&members, model)?);
        }
    }
    Ok(SelectionVector { attribute: AttrKind::O, component: o_sel.component, vars, support })
}

/// Assembles the binary program for a layout over its model spaces.
pub fn build_bip(
    layout: &Layout,
    spaces: &ModelSpaces,
    residuals: &Residuals,
    config: &Config,
) -> Result<(BipModel, VarMap)> {
    let n = layout.len();
    if spaces.num_components() != n {
        return Err(Error::SpaceMismatch(format!(
            "spaces built for {} components, layout has {n}",
            spaces.num_components()
        )));
    }
    let omega = resolve_weights(&config.weights, residuals);
    let mut model = BipModel::new();

    // Selection vectors and C1.
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        components.push(ComponentVars {
            p: build_selection(&mut model, AttrKind::P, i, spaces.p.len(), &spaces.p.member_map[i]),
            z: build_selection(&mut model, AttrKind::Z, i, spaces.z.len(), &spaces.z.member_map[i]),
            w: build_selection(&mut model, AttrKind::W, i, spaces.w.len(), &spaces.w.member_map[i]),
            h: build_selection(&mut model, AttrKind::H, i, spaces.h.len(), &spaces.h.member_map[i]),
            o: build_selection(&mut model, AttrKind::O, i, spaces.o.len(), &spaces.o.member_map[i]),
        });
    }

    // Data term: residual-weighted selection costs over the supports.
    for kind in AttrKind::ALL {
        let scale = config.data_scale.get(kind);
        for (i, comp) in components.iter().enumerate() {
            let sel = comp.get(kind);
            let row = residuals.row(kind, i);
            for &j in &sel.support {
                model.add_objective_term(scale * row[j], sel.vars[j]);
            }
        }
    }

    // Regularization term: omega-weighted category counts.
    for kind in AttrKind::ALL {
        let w = omega.get(kind);
        let refs: Vec<&SelectionVector> = components.iter().map(|c| c.get(kind)).collect();
        let expr = enum_expr(&refs, &mut model)?;
        for (c, y) in expr.terms {
            model.add_objective_term(w * c, y);
        }
    }

    // Orientation classes for R1/R2.
    let thetas: Vec<f64> = spaces.o.candidates.iter().map(|c| c.theta).collect();
    let lambdas: Vec<f64> = spaces.o.candidates.iter().map(|c| c.lambda).collect();
    let (theta_class, lambda_class) = orientation_classes(&thetas, &lambdas, spaces.o.delta);
    let num_theta = theta_class.iter().max().map_or(0, |m| m + 1);
    let num_lambda = lambda_class.iter().max().map_or(0, |m| m + 1);

    let mut theta_sel: Vec<Option<SelectionVector>> = vec![None; n];
    let mut lambda_sel: Vec<Option<SelectionVector>> = vec![None; n];

    // Pairwise constraints: C2, R1, R2.
    let mut pair_same = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let s_p = same(&components[i].p, &components[j].p, &mut model)?;
            let s_z = same(&components[i].z, &components[j].z, &mut model)?;
            pair_same.push((i, j, s_p, s_z));

            // C2: cannot share both the position and the elevation category.
            if model.fixed_value(s_p) != Some(false) && model.fixed_value(s_z) != Some(false) {
                model.add_constraint(LinearConstraint::new(
                    vec![(1, s_p), (1, s_z)],
                    Relation::Le,
                    1,
                ));
            }

            // R1: same elevation category implies same theta class.
            if model.fixed_value(s_z) != Some(false) {
                for k in [i, j] {
                    if theta_sel[k].is_none() {
                        theta_sel[k] = Some(build_class_selection(
                            &mut model,
                            &components[k].o,
                            &theta_class,
                            num_theta,
                        )?);
                    }
                }
                let s_tc = same(
                    theta_sel[i].as_ref().unwrap(),
                    theta_sel[j].as_ref().unwrap(),
                    &mut model,
                )?;
                if model.fixed_value(s_tc) != Some(true) {
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, s_z), (-1, s_tc)],
                        Relation::Le,
                        0,
                    ));
                }
            }

            // R2: same position category implies same lambda class.
            if model.fixed_value(s_p) != Some(false) {
                for k in [i, j] {
                    if lambda_sel[k].is_none() {
                        lambda_sel[k] = Some(build_class_selection(
                            &mut model,
                            &components[k].o,
                            &lambda_class,
                            num_lambda,
                        )?);
                    }
                }
                let s_lc = same(
                    lambda_sel[i].as_ref().unwrap(),
                    lambda_sel[j].as_ref().unwrap(),
                    &mut model,
                )?;
                if model.fixed_value(s_lc) != Some(true) {
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, s_p), (-1, s_lc)],
                        Relation::Le,
                        0,
                    ));
                }
            }
        }
    }

    Ok((model, VarMap { components, theta_class, lambda_class, pair_same }))
}

/// Candidate indices chosen by a solved assignment.
pub fn extract_selections(solution: &Solution, varmap: &VarMap) -> Result<Vec<ComponentSelection>> {
    let assignment = solution
        .assignment
        .as_ref()
        .ok_or_else(|| Error::NoSolution("solution carries no assignment".into()))?;
    let pick = |sel: &SelectionVector| -> Result<usize> {
        let chosen: Vec<usize> = sel
            .support
            .iter()
            .copied()
            .filter(|&j| assignment[sel.vars[j].index()])
            .collect();
        match chosen.as_slice() {
            [j] => Ok(*j),
            _ => Err(Error::NoSolution(format!(
                "component {} selects {} candidates for {}",
                sel.component,
                chosen.len(),
                sel.attribute.name()
            ))),
        }
    };
    varmap
        .components
        .iter()
        .map(|c| {
            Ok(ComponentSelection {
                p: pick(&c.p)?,
                z: pick(&c.z)?,
                w: pick(&c.w)?,
                h: pick(&c.h)?,
                o: pick(&c.o)?,
            })
        })
        .collect()
}

/// Writes the selected candidate values back into a layout.
pub fn decode(
    solution: &Solution,
    varmap: &VarMap,
    spaces: &ModelSpaces,
    layout: &Layout,
) -> Result<Layout> {
    let selections = extract_selections(solution, varmap)?;
    decode_selections(&selections, spaces, layout)
}

fn decode_selections(
    selections: &[ComponentSelection],
    spaces: &ModelSpaces,
    layout: &Layout,
) -> Result<Layout> {
    let components = layout
        .components
        .iter()
        .zip(selections)
        .map(|(comp, sel)| {
            let o = &spaces.o.candidates[sel.o];
            let params = GeomParams::new(
                spaces.p.candidates[sel.p],
                spaces.z.candidates[sel.z],
                spaces.w.candidates[sel.w],
                spaces.h.candidates[sel.h],
                o.normal,
            )?;
            Ok(Component {
                id: comp.id.clone(),
                kind: comp.kind,
                instance_ref: comp.instance_ref.clone(),
                params,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = Layout {
        building_id: layout.building_id.clone(),
        base_elevation: layout.base_elevation,
        components,
    };
    let report = validate_layout(&out);
    if !report.is_valid() {
        return Err(Error::NoSolution(format!(
            "decoded layout violates invariants: {:?}",
            report.violations[0]
        )));
    }
    Ok(out)
}

/// Candidate counts per attribute, in (P, Z, O, W, H) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub p: usize,
    pub z: usize,
    pub o: usize,
    pub w: usize,
    pub h: usize,
}

impl CategoryCounts {
    pub fn from_spaces(spaces: &ModelSpaces) -> Self {
        let (p, z, o, w, h) = spaces.counts();
        CategoryCounts { p, z, o, w, h }
    }

    fn from_selections(selections: &[ComponentSelection]) -> Self {
        let distinct = |kind: AttrKind| -> usize {
            let mut seen: Vec<usize> = selections.iter().map(|s| s.get(kind)).collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        };
        CategoryCounts {
            p: distinct(AttrKind::P),
            z: distinct(AttrKind::Z),
            o: distinct(AttrKind::O),
            w: distinct(AttrKind::W),
            h: distinct(AttrKind::H),
        }
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize) {
        (self.p, self.z, self.o, self.w, self.h)
    }
}

/// Everything worth keeping from one regularization run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub status: String,
    pub objective_value: f64,
    pub nodes: u64,
    pub wall_ms: f64,
    /// Free variables of the solved model (after pruning).
    pub free_vars: usize,
    /// Selection variables the model would hold without pruning.
    pub unpruned_selection_vars: usize,
    pub categories_before: CategoryCounts,
    pub categories_after: CategoryCounts,
    pub selections: Vec<ComponentSelection>,
    pub theta_class: Vec<usize>,
    pub lambda_class: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Full pipeline: cluster, assemble, solve, decode.
pub fn regularize(layout: &Layout, config: &Config) -> Result<(Layout, RunReport)> {
    let validation = validate_layout(layout);
    if !validation.is_valid() {
        return Err(Error::Parse(format!(
            "input layout is invalid: {}",
            validation.violations[0].message
        )));
    }
    let spaces = build_model_spaces_with(layout, config.pruning.prune_radius_factor)?;
    let residuals = compute_residuals(layout, &spaces)?;
    let (model, varmap) = build_bip(layout, &spaces, &residuals, config)?;
    let solution = solve_bb(&model, &config.solver);

    let mut warnings = Vec::new();
    match solution.status {
        SolveStatus::Optimal => {}
        SolveStatus::TimedOut if solution.assignment.is_some() => {
            warnings.push(format!(
                "solver hit the {}s time limit; decoding the best incumbent",
                config.solver.time_limit_s
            ));
        }
        SolveStatus::TimedOut => {
            return Err(Error::NoSolution("time limit expired before any incumbent".into()))
        }
        SolveStatus::Infeasible => return Err(Error::NoSolution("program is infeasible".into())),
    }

    let selections = extract_selections(&solution, &varmap)?;
    let decoded = decode_selections(&selections, &spaces, layout)?;
    let (sp, sz, so, sw, sh) = spaces.counts();
    let report = RunReport {
        status: solution.status.to_string(),
        objective_value: solution.objective_value,
        nodes: solution.stats.nodes,
        wall_ms: solution.stats.wall_ms,
        free_vars: solution.stats.free_vars,
        unpruned_selection_vars: layout.len() * (sp + sz + so + sw + sh),
        categories_before: CategoryCounts::from_spaces(&spaces),
        categories_after: CategoryCounts::from_selections(&selections),
        selections,
        theta_class: varmap.theta_class.clone(),
        lambda_class: varmap.lambda_class.clone(),
        warnings,
    };
    Ok((decoded, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attrspace::{build_model_spaces, AttributeSpace, Orientation};
    use crate::bip::{check_feasible, solve_exhaustive};
    use crate::model::ComponentKind;
    use approx::assert_relative_eq;
    use nalgebra::{Vector2, Vector3};

    fn comp(id: &str, p: (f64, f64), z: f64, w: f64, h: f64, n: (f64, f64, f64)) -> Component {
        let n = Vector3::new(n.0, n.1, n.2).normalize();
        Component {
            id: id.into(),
            kind: ComponentKind::Window,
            instance_ref: "lib/w".into(),
            params: GeomParams::new(Vector2::new(p.0, p.1), z, w, h, n).unwrap(),
        }
    }

    fn layout_of(components: Vec<Component>) -> Layout {
        Layout { building_id: "t".into(), base_elevation: 0.0, components }
    }

    fn scalar_space(
        kind: AttrKind,
        candidates: Vec<f64>,
        supports: Vec<Vec<usize>>,
    ) -> AttributeSpace<f64> {
        AttributeSpace { kind, candidates, delta: 0.1, member_map: supports }
    }

    /// Hand-assembled spaces for two components; width and height collapse
    /// to one candidate so tests can focus on p, z and orientation.
    fn two_component_spaces(
        p_cands: Vec<Vector2<f64>>,
        p_supports: Vec<Vec<usize>>,
        z_cands: Vec<f64>,
        z_supports: Vec<Vec<usize>>,
        o_cands: Vec<Orientation>,
        o_supports: Vec<Vec<usize>>,
    ) -> ModelSpaces {
        ModelSpaces {
            p: AttributeSpace {
                kind: AttrKind::P,
                candidates: p_cands,
                delta: 0.1,
                member_map: p_supports,
            },
            z: scalar_space(AttrKind::Z, z_cands, z_supports),
            w: scalar_space(AttrKind::W, vec![1.0], vec![vec![0], vec![0]]),
            h: scalar_space(AttrKind::H, vec![1.0], vec![vec![0], vec![0]]),
            o: AttributeSpace {
                kind: AttrKind::O,
                candidates: o_cands,
                delta: 0.1,
                member_map: o_supports,
            },
        }
    }

    #[test]
    fn residual_examples() {
        let layout = layout_of(vec![comp("a", (1.0, 1.0), 3.0, 1.0, 1.0, (0.0, 1.0, 0.0))]);
        let spaces = ModelSpaces {
            p: AttributeSpace {
                kind: AttrKind::P,
                candidates: vec![Vector2::new(0.0, 0.0), Vector2::new(1.0, 2.0)],
                delta: 0.1,
                member_map: vec![vec![0, 1]],
            },
            z: scalar_space(AttrKind::Z, vec![3.0, 6.0], vec![vec![0, 1]]),
            w: scalar_space(AttrKind::W, vec![1.0], vec![vec![0]]),
            h: scalar_space(AttrKind::H, vec![1.0], vec![vec![0]]),
            o: AttributeSpace {
                kind: AttrKind::O,
                candidates: vec![Orientation::from_normal(Vector3::y()).unwrap()],
                delta: 0.1,
                member_map: vec![vec![0]],
            },
        };
        let res = compute_residuals(&layout, &spaces).unwrap();
        assert_relative_eq!(res.z[0][0], 0.0);
        assert_relative_eq!(res.z[0][1], 3.0);
        assert_relative_eq!(res.p[0][0], 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(res.p[0][1], 1.0);
        assert_relative_eq!(res.o[0][0], 0.0);
    }

    #[test]
    fn space_mismatch_detected() {
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("b", (3.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0)),
        ]);
        let spaces = build_model_spaces(&layout).unwrap();
        let smaller = layout_of(vec![comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0))]);
        assert!(matches!(compute_residuals(&smaller, &spaces), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn single_component_snaps_to_candidates() {
        let layout = layout_of(vec![comp("a", (1.5, 0.0), 2.0, 1.2, 1.4, (0.0, 1.0, 0.0))]);
        let (out, report) = regularize(&layout, &Config::default()).unwrap();
        assert_eq!(report.status, "optimal");
        assert_eq!(report.nodes, 0); // everything folds to constants
        // Single candidate per attribute: the layout is unchanged up to
        // candidate snapping, and the objective is the omega floor times
        // the five category counts.
        assert_relative_eq!(out.components[0].params.p.x, 1.5, epsilon = 1e-12);
        assert_relative_eq!(report.objective_value, 5e-6, epsilon = 1e-12);
        assert_eq!(report.categories_after.as_tuple(), (1, 1, 1, 1, 1));
    }

    #[test]
    fn c2_keeps_coincident_components_apart() {
        // Two components with identical initial (p, z); two position
        // candidates are reachable, one elevation candidate.
        let o = Orientation::from_normal(Vector3::y()).unwrap();
        let spaces = two_component_spaces(
            vec![Vector2::new(0.0, 0.0), Vector2::new(2.0, 0.0)],
            vec![vec![0, 1], vec![0, 1]],
            vec![0.0],
            vec![vec![0], vec![0]],
            vec![o],
            vec![vec![0], vec![0]],
        );
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("b", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0)),
        ]);
        let residuals = compute_residuals(&layout, &spaces).unwrap();
        let (model, varmap) = build_bip(&layout, &spaces, &residuals, &Config::default()).unwrap();

        // The optimum must split the components across position candidates.
        let sol = solve_exhaustive(&model).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let sels = extract_selections(&sol, &varmap).unwrap();
        assert_ne!(sels[0].p, sels[1].p);

        // Forcing both onto candidate 0 makes the program infeasible.
        let mut pinned = model.clone();
        for comp in &varmap.components {
            pinned.fix_var(comp.p.vars[0], true);
            pinned.fix_var(comp.p.vars[1], false);
        }
        assert_eq!(solve_exhaustive(&pinned).unwrap().status, SolveStatus::Infeasible);

        // The coincident assignment, obtained by flipping the second
        // component onto the first one's choices, fails check_feasible.
        let mut coincident = sol.assignment.clone().unwrap();
        coincident[varmap.components[1].p.vars[sels[0].p].index()] = true;
        coincident[varmap.components[1].p.vars[sels[1].p].index()] = false;
        let report = check_feasible(&model, &coincident).unwrap();
        assert!(!report.feasible);
        assert!(!report.violated.is_empty());
    }

    #[test]
    fn r1_prefers_unifying_theta_over_splitting_elevation() {
        // Two components share the only elevation cluster; their
        // orientation candidates differ in theta class. R1 forces a common
        // theta class, so the optimum pays the smaller orientation residual
        // rather than the (much larger) elevation split.
        let o0 = Orientation::from_normal(Vector3::new(0.0, 1.0, 0.0)).unwrap();
        let tilt = Vector3::new(0.0, (0.25f64).cos(), (0.25f64).sin());
        let o1 = Orientation::from_normal(tilt.normalize()).unwrap();
        let spaces = two_component_spaces(
            vec![Vector2::new(0.0, 0.0), Vector2::new(3.0, 0.0)],
            vec![vec![0], vec![1]],
            vec![0.0, 3.0],
            vec![vec![0, 1], vec![0, 1]],
            vec![o0, o1],
            vec![vec![0, 1], vec![0, 1]],
        );
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.0, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("b", (3.0, 0.0), 0.0, 1.0, 1.0, (0.0, 0.25f64.cos(), 0.25f64.sin())),
        ]);
        let residuals = compute_residuals(&layout, &spaces).unwrap();
        let mut config = Config::default();
        config.weights = Weights::manual(AttrValues::uniform(0.0));
        let (model, varmap) = build_bip(&layout, &spaces, &residuals, &config).unwrap();

        // Theta classes must separate the two candidates for R1 to bind.
        assert_ne!(varmap.theta_class[0], varmap.theta_class[1]);

        let oracle = solve_exhaustive(&model).unwrap();
        assert_eq!(oracle.status, SolveStatus::Optimal);
        let sol = solve_bb(&model, &crate::config::SolverConfig::default());
        assert_eq!(sol.objective_value, oracle.objective_value);

        let sels = extract_selections(&oracle, &varmap).unwrap();
        // Shared elevation candidate, shared theta class.
        assert_eq!(sels[0].z, sels[1].z);
        assert_eq!(varmap.theta_class[sels[0].o], varmap.theta_class[sels[1].o]);
        // The cheap repair is orientation (0.25 rad), not elevation (3 m).
        assert!(oracle.objective_value < 0.5);
    }

    #[test]
    fn decode_is_identity_on_candidate_aligned_layouts() {
        // A 2x2 grid with duplicated values everywhere and zero noise.
        let mut comps = Vec::new();
        for (fx, x) in [(0, 0.0), (1, 3.0)] {
            for (fz, z) in [(0, 1.0), (1, 4.0)] {
                comps.push(comp(&format!("c{fx}{fz}"), (x, 0.0), z, 1.0, 1.5, (0.0, -1.0, 0.0)));
            }
        }
        let layout = layout_of(comps);
        let mut config = Config::default();
        config.weights = Weights::manual(AttrValues::uniform(0.0));
        let (out, report) = regularize(&layout, &config).unwrap();
        assert_eq!(report.status, "optimal");
        for (a, b) in layout.components.iter().zip(&out.components) {
            assert_relative_eq!(a.params.p, b.params.p, epsilon = 1e-12);
            assert_relative_eq!(a.params.z, b.params.z, epsilon = 1e-12);
            assert_relative_eq!(a.params.w, b.params.w, epsilon = 1e-12);
            assert_relative_eq!(a.params.h, b.params.h, epsilon = 1e-12);
            assert_relative_eq!(a.params.n, b.params.n, epsilon = 1e-12);
        }
        assert_eq!(report.categories_after.as_tuple(), (2, 2, 1, 1, 1));
    }

    #[test]
    fn selected_candidate_written_exactly() {
        let layout = layout_of(vec![
            comp("a", (0.0, 0.0), 0.9, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("b", (4.0, 0.0), 1.1, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("c", (0.0, 0.0), 3.9, 1.0, 1.0, (0.0, 1.0, 0.0)),
            comp("d", (4.0, 0.0), 4.1, 1.0, 1.0, (0.0, 1.0, 0.0)),
        ]);
        let (out, report) = regularize(&layout, &Config::default()).unwrap();
        let spaces = build_model_spaces(&layout).unwrap();
        for (k, sel) in report.selections.iter().enumerate() {
            assert_eq!(out.components[k].params.z, spaces.z.candidates[sel.z]);
        }
    }
}
