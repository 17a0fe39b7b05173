// scratch probe for solver scale
use facreg_core::config::{AttrValues, Config, Weights};
use facreg_core::eval::{perturb, prf, NoiseSpec};
use facreg_core::regularize::regularize;
use facreg_core::synth::{generate_synthetic, SyntheticSpec};
use std::time::Instant;

fn main() {
    // Criterion 7 family: 3 floors x 4 columns x 2 facades.
    let truth = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let config = Config::default();
    for level in [1u32, 4, 8] {
        let t0 = Instant::now();
        let mut fi = 0.0;
        let mut fr = 0.0;
        let mut nodes = 0u64;
        let mut free = 0usize;
        for seed in 0..3u64 {
            let noisy = perturb(&truth, &NoiseSpec::for_layout(&truth, level, seed));
            fi += prf(&noisy, &truth).unwrap().f_score;
            let (reg, report) = regularize(&noisy, &config).unwrap();
            fr += prf(&reg, &truth).unwrap().f_score;
            nodes += report.nodes;
            free = free.max(report.free_vars);
        }
        println!(
            "level {level}: f_init {:.4} f_reg {:.4} nodes {} free {} in {:?}",
            fi / 3.0, fr / 3.0, nodes, free, t0.elapsed()
        );
    }

    // Criterion 4 shape: <=12 components, pruning off.
    let spec = SyntheticSpec { floors: 3, columns: 4, facades: 1, seed: 3, ..Default::default() };
    let truth = generate_synthetic(&spec).unwrap();
    let noisy = perturb(&truth, &NoiseSpec::for_layout(&truth, 3, 11));
    let mut unpruned = Config::default();
    unpruned.pruning.prune_radius_factor = f64::INFINITY;
    unpruned.solver.time_limit_s = 60.0;
    let t0 = Instant::now();
    let (_, report) = regularize(&noisy, &unpruned).unwrap();
    println!(
        "unpruned 12-comp: status {} obj {:.6} nodes {} free {} in {:?}",
        report.status, report.objective_value, report.nodes, report.free_vars, t0.elapsed()
    );
    let t0 = Instant::now();
    let (_, rp) = regularize(&noisy, &Config::default()).unwrap();
    println!(
        "pruned   12-comp: status {} obj {:.6} nodes {} free {} in {:?}",
        rp.status, rp.objective_value, rp.nodes, rp.free_vars, t0.elapsed()
    );

    // Manual-omega sweep flavor.
    let mut manual = Config::default();
    manual.weights = Weights::manual(AttrValues::uniform(0.1));
    let truth = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let t0 = Instant::now();
    let noisy = perturb(&truth, &NoiseSpec::for_layout(&truth, 6, 5));
    let (reg, report) = regularize(&noisy, &manual).unwrap();
    println!(
        "manual omega level 6: f_reg {:.4} after {:?} nodes {} free {} in {:?}",
        prf(&reg, &truth).unwrap().f_score,
        report.categories_after,
        report.nodes,
        report.free_vars,
        t0.elapsed()
    );
}
