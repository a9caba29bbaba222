//! Unit utilization and the first iterations of the per-unit trace for set I
//! with three ciphertexts per core, written as CSV to stdout.

use strix::archsim::{simulate_pbs_stream, ArchConfig, Unit};
use strix::report::write_rows;
use strix::tfhe::ParamSet;

fn main() -> strix::Result<()> {
    let arch = ArchConfig {
        core_batch: Some(3),
        ..ArchConfig::default()
    };
    let r = simulate_pbs_stream(&ParamSet::I.params(), &arch, 24)?;
    for u in Unit::ALL {
        eprintln!("{:>11}: {:.3}", u.name(), r.utilization.get(u));
    }
    eprintln!("{:>11}: {:.3}", "hbm", r.hbm_utilization);
    let rows: Vec<_> = r.trace_rows().into_iter().filter(|t| t.iteration < 2).collect();
    write_rows(std::io::stdout().lock(), rows)
}
