//! Simulated PBS throughput and latency of the default accelerator for every
//! parameter set, with folding on and off.

use strix::archsim::{simulate_pbs_stream, ArchConfig};
use strix::sched::plan_epochs;
use strix::tfhe::ParamSet;

fn main() -> strix::Result<()> {
    for folding in [true, false] {
        let arch = ArchConfig {
            folding,
            ..ArchConfig::default()
        };
        println!("folding {}", if folding { "on" } else { "off" });
        for set in ParamSet::ALL {
            let p = set.params();
            let num_ct = plan_epochs(1, &arch, &p)?.device_batch;
            let r = simulate_pbs_stream(&p, &arch, num_ct)?;
            println!(
                "  set {:>3}: II {:>4} cycles  {:>9.1} PBS/s  {:.4} ms",
                set,
                r.initiation_interval_cycles,
                r.pbs_throughput_per_s,
                r.pbs_latency_s * 1e3
            );
        }
    }
    Ok(())
}
