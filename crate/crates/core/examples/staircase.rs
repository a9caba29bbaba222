//! Blind-rotation time against ciphertext count: flat within a device batch,
//! one more full pass for every batch started.

use strix::archsim::{simulate_pbs_stream, ArchConfig};
use strix::tfhe::ParamSet;

fn main() -> strix::Result<()> {
    let p = ParamSet::I.params();
    let arch = ArchConfig::default();
    for num_ct in [1, 320, 640, 641, 960, 1280, 1281, 1920, 1921] {
        let r = simulate_pbs_stream(&p, &arch, num_ct)?;
        println!(
            "{num_ct:>5} ct  {} fragments  BR {:.3} ms  total {:.3} ms",
            r.fragments,
            r.pbs_time_s * 1e3,
            r.total_time_s * 1e3
        );
    }
    Ok(())
}
