//! TvLP/CLP sweep on set IV with and without a 300 GB/s cap.

use strix::archsim::{sweep_tvlp_clp, ArchConfig, DEFAULT_SWEEP_PAIRS};
use strix::tfhe::ParamSet;

fn main() -> strix::Result<()> {
    let p = ParamSet::IV.params();
    let arch = ArchConfig::default();
    for cap in [Some(300e9), None] {
        println!("cap {:?}", cap.map(|c| c / 1e9));
        for r in sweep_tvlp_clp(&p, &arch, &DEFAULT_SWEEP_PAIRS, cap)? {
            println!(
                "  ({:>2}, {:>2}) {:>7.1} PBS/s  {:.3} ms  required {:.1} GB/s",
                r.tvlp,
                r.clp,
                r.pbs_throughput_per_s,
                r.pbs_latency_s * 1e3,
                r.required_bandwidth_bytes_per_s / 1e9
            );
        }
    }
    Ok(())
}
