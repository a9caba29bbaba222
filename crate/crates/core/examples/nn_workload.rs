//! Deep-NN workloads of increasing depth and a custom graph from JSON.

use strix::archsim::{simulate_workload, ArchConfig};
use strix::sched::{build_nn_workload, WorkloadGraph};
use strix::tfhe::ParamSet;

fn main() -> strix::Result<()> {
    let p = ParamSet::I.params();
    let arch = ArchConfig::default();
    for depth in [20, 50, 100] {
        let w = simulate_workload(&build_nn_workload(depth)?, &p, &arch)?;
        println!("NN-{depth:<3} {:>5} PBS  {:.4} s", w.pbs_count, w.total_time_s);
    }
    let diamond = WorkloadGraph::from_json(
        r#"{"nodes": [
            {"name": "in", "kind": "linear", "count": 64},
            {"name": "left", "kind": "nonlinear", "count": 64, "deps": [0]},
            {"name": "right", "kind": "nonlinear", "count": 64, "deps": [0]},
            {"name": "join", "kind": "nonlinear", "count": 64, "deps": [1, 2]}
        ]}"#,
    )?;
    let w = simulate_workload(&diamond, &p, &arch)?;
    for l in &w.levels {
        println!("diamond level {}: {} PBS, {:.3} ms", l.level, l.pbs, l.time_s * 1e3);
    }
    Ok(())
}
