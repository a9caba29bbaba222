//! Command-line front end. The binary is a thin wrapper over [`main_with`].
//!
//! Exit codes: 0 when every check passes, 1 when a tolerance check fails,
//! 2 on a configuration or runtime error (a failure record is still written).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::archsim::{
    reference, required_bandwidth, simulate_pbs_stream, simulate_workload, sweep_tvlp_clp, ArchConfig,
    DEFAULT_SWEEP_PAIRS,
};
use crate::error::{Error, Result};
use crate::report::{Check, MicrobenchRow, NnRow, Report, Rows, SelftestRow, Status};
use crate::sched::{build_nn_workload, plan_epochs, WorkloadGraph};
use crate::tfhe::{keygen, KeyCodec, ParamSet, TfheParams};
use crate::trials;

pub const OUT_DIR_ENV: &str = "STRIX_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "strix", version, about = "TFHE bootstrapping engine and accelerator model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameter set I..IV or a JSON parameter file.
    #[arg(long, global = true)]
    pub param_set: Option<String>,

    /// JSON architecture config; unspecified fields keep their defaults.
    #[arg(long, global = true)]
    pub arch_config: Option<PathBuf>,

    /// Ciphertexts per run (model commands).
    #[arg(long, global = true)]
    pub num_ct: Option<usize>,

    /// RNG seed for functional commands; a fresh one is drawn and recorded
    /// when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Report file; `-` for stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Directory for `<command>.<format>` when --out is not given.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true, value_enum)]
    pub folding: Option<Toggle>,

    /// Total HBM bandwidth in GB/s.
    #[arg(long, global = true)]
    pub bandwidth_cap: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Functional invariants: transform oracle, decomposition bound, key
    /// serialization, bootstrapping and NAND.
    Selftest {
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Simulated PBS throughput and latency per parameter set.
    Microbench {
        /// Emit the per-iteration unit trace of the first epoch instead.
        #[arg(long)]
        trace: bool,
    },
    /// TvLP/CLP trade-off at a constant lane budget.
    Sweep {
        /// Pairs as TVLP:CLP, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Option<Vec<(usize, usize)>>,
        /// Ignore the bandwidth cap.
        #[arg(long)]
        uncapped: bool,
    },
    /// Deep-NN workload times.
    Nn {
        #[arg(long, value_delimiter = ',', default_values_t = reference::NN_DEPTHS)]
        depths: Vec<usize>,
        /// Simulate a JSON workload graph instead of the built-in network.
        #[arg(long)]
        workload: Option<PathBuf>,
    },
    /// Encrypted NAND truth table.
    Gates {
        #[arg(long, default_value_t = 250)]
        trials: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Selftest { .. } => "selftest",
            Command::Microbench { .. } => "microbench",
            Command::Sweep { .. } => "sweep",
            Command::Nn { .. } => "nn",
            Command::Gates { .. } => "gates",
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (t, c) = s.split_once(':').ok_or_else(|| format!("expected TVLP:CLP, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(t)?, parse(c)?))
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let name = cli.command.name();
    let report = run(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Report::failure(name, &e)
    });
    for c in &report.checks {
        eprintln!("{}", c.line());
    }
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: writing report: {e}");
        return 2;
    }
    match report.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Error => 2,
    }
}

fn destination(cli: &Cli) -> Option<PathBuf> {
    match (&cli.out, &cli.out_dir) {
        (Some(p), _) if p.as_os_str() == "-" => None,
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{}", cli.command.name(), cli.format.extension()))),
        (None, None) => None,
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    match destination(cli) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&path)?);
            write_report(cli.format, report, &mut w)?;
            w.flush()?;
            eprintln!("report written to {}", path.display());
        }
        None => write_report(cli.format, report, &mut io::stdout().lock())?,
    }
    Ok(())
}

fn write_report<W: Write>(format: Format, report: &Report, w: &mut W) -> Result<()> {
    match format {
        Format::Json => w.write_all(report.to_json().as_bytes())?,
        Format::Csv => report.write_csv(w)?,
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Report> {
    let mut report = match &cli.command {
        Command::Selftest { trials } => selftest(cli, *trials)?,
        Command::Microbench { trace } => microbench(cli, *trace)?,
        Command::Sweep { pairs, uncapped } => sweep(cli, pairs.as_deref(), *uncapped)?,
        Command::Nn { depths, workload } => nn(cli, depths, workload.as_deref())?,
        Command::Gates { trials } => gates(cli, *trials)?,
    };
    if report.param_set.is_none() {
        report.param_set = cli.param_set.clone();
    }
    Ok(report)
}

fn arch(cli: &Cli) -> Result<(ArchConfig, bool)> {
    let mut a = match &cli.arch_config {
        Some(p) => ArchConfig::load(p)?,
        None => ArchConfig::default(),
    };
    if let Some(t) = cli.folding {
        a.folding = t == Toggle::On;
    }
    if let Some(cap) = cli.bandwidth_cap {
        if !(cap > 0.0) {
            return Err(Error::InvalidParameter("--bandwidth-cap must be positive".into()));
        }
        a.hbm_bytes_per_s = cap * 1e9;
    }
    a.validate()?;
    let is_default = a == ArchConfig::default();
    Ok((a, is_default))
}

/// Requested parameter sets and, for each, its index among the built-in
/// sets when it is one.
fn param_sets(cli: &Cli, default: &[ParamSet]) -> Result<Vec<(TfheParams, Option<usize>)>> {
    match &cli.param_set {
        Some(s) => {
            let builtin = s.parse::<ParamSet>().ok();
            let p = TfheParams::resolve(s)?;
            Ok(vec![(p, builtin.and_then(|b| ParamSet::ALL.iter().position(|&x| x == b)))])
        }
        None => Ok(default
            .iter()
            .map(|&s| (s.params(), ParamSet::ALL.iter().position(|&x| x == s)))
            .collect()),
    }
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(|| rand::rng().random())
}

fn functional_params(cli: &Cli) -> Result<TfheParams> {
    let (p, _) = param_sets(cli, &[ParamSet::I])?.remove(0);
    if p.log2_q > 32 {
        return Err(Error::InvalidParameter(
            "functional commands support log2_q <= 32; larger sets are model-only".into(),
        ));
    }
    Ok(p)
}

fn selftest(cli: &Cli, n: usize) -> Result<Report> {
    let params = functional_params(cli)?;
    let seed = seed(cli);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut record = |name: String, o: trials::Outcome, checks: &mut Vec<Check>| {
        checks.push(Check::absolute(format!("{name} failures"), o.failures as f64, 0.0, 0.0));
        rows.push(SelftestRow {
            name,
            trials: o.trials,
            failures: o.failures,
        });
    };
    for (i, degree) in [8usize, 64, 1024].into_iter().enumerate() {
        let o = trials::fft_oracle(degree, params.base_b_log2(), n, seed.wrapping_add(i as u64))?;
        record(format!("fft_oracle_n{degree}"), o, &mut checks);
    }
    let o = trials::decomposition_bound(&params, n * 1000, seed.wrapping_add(3))?;
    record("decomposition_bound".into(), o, &mut checks);

    let (client, server) = keygen(&params, seed.wrapping_add(4))?;
    let codec_failures = usize::from(
        crate::tfhe::BootstrappingKey::from_bytes(&server.bsk.to_bytes())?.ggsw != server.bsk.ggsw,
    ) + usize::from(crate::tfhe::KeyswitchKey::from_bytes(&server.ksk.to_bytes())? != server.ksk);
    record(
        "key_codec_roundtrip".into(),
        trials::Outcome {
            trials: 2,
            failures: codec_failures,
        },
        &mut checks,
    );

    let o = trials::pbs_identity(&client, &server, 2, n, seed.wrapping_add(5))?;
    record("pbs_identity".into(), o, &mut checks);
    let gates = trials::nand_truth_table(&client, &server, n.div_ceil(8).max(1), seed.wrapping_add(6))?;
    let trials_total = gates.iter().map(|g| g.trials).sum();
    let wrong = gates.iter().map(|g| g.trials - g.correct).sum();
    record(
        "nand_truth_table".into(),
        trials::Outcome {
            trials: trials_total,
            failures: wrong,
        },
        &mut checks,
    );

    let mut r = Report::new("selftest", Rows::Selftest(rows), checks);
    r.seed = Some(seed);
    r.param_set = Some(params.label());
    Ok(r)
}

fn gates(cli: &Cli, n: usize) -> Result<Report> {
    if n == 0 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }
    let params = functional_params(cli)?;
    let seed = seed(cli);
    let (client, server) = keygen(&params, seed)?;
    let rows = trials::nand_truth_table(&client, &server, n, seed.wrapping_add(1))?;
    let checks = rows
        .iter()
        .map(|g| {
            Check::at_least(
                format!("nand({}, {}) accuracy", u8::from(g.a), u8::from(g.b)),
                g.correct as f64 / g.trials as f64,
                1.0,
            )
        })
        .collect();
    let mut r = Report::new("gates", Rows::Gates(rows), checks);
    r.seed = Some(seed);
    r.param_set = Some(params.label());
    Ok(r)
}

fn microbench(cli: &Cli, trace: bool) -> Result<Report> {
    let (arch, default_arch) = arch(cli)?;
    let sets = param_sets(cli, &ParamSet::ALL)?;
    if trace && sets.len() != 1 {
        return Err(Error::InvalidParameter("--trace needs a single --param-set".into()));
    }
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut trace_rows = Vec::new();
    for (params, builtin) in &sets {
        // one full device batch unless told otherwise
        let num_ct = match cli.num_ct {
            Some(n) => n,
            None => plan_epochs(1, &arch, params)?.device_batch,
        };
        let r = simulate_pbs_stream(params, &arch, num_ct)?;
        if let (Some(i), true, None) = (builtin, default_arch, cli.num_ct) {
            checks.push(Check::relative(
                format!("set {} throughput", r.param_set),
                r.pbs_throughput_per_s,
                reference::MICROBENCH_THROUGHPUT[*i],
                reference::MICROBENCH_THROUGHPUT_TOL,
            ));
            checks.push(Check::relative(
                format!("set {} latency", r.param_set),
                r.pbs_latency_s,
                reference::MICROBENCH_LATENCY_S[*i],
                reference::MICROBENCH_LATENCY_TOL,
            ));
        }
        eprintln!(
            "set {:>4}: {:>9.1} PBS/s  latency {:.4} ms  ({} ct, {} epochs)",
            r.param_set,
            r.pbs_throughput_per_s,
            r.pbs_latency_s * 1e3,
            num_ct,
            r.epochs
        );
        if trace {
            trace_rows = r.trace_rows();
        }
        rows.push(MicrobenchRow {
            param_set: r.param_set.clone(),
            num_ct,
            epochs: r.epochs,
            pbs_throughput_per_s: r.pbs_throughput_per_s,
            pbs_latency_ms: r.pbs_latency_s * 1e3,
            pbs_time_s: r.pbs_time_s,
            total_time_s: r.total_time_s,
            hbm_utilization: r.hbm_utilization,
            required_bandwidth_gb_per_s: r.required_bandwidth_bytes_per_s / 1e9,
        });
    }
    let rows = if trace {
        Rows::Trace(trace_rows)
    } else {
        Rows::Microbench(rows)
    };
    Ok(Report::new("microbench", rows, checks))
}

fn sweep(cli: &Cli, pairs: Option<&[(usize, usize)]>, uncapped: bool) -> Result<Report> {
    let (arch, default_arch) = arch(cli)?;
    let (params, builtin) = param_sets(cli, &[ParamSet::IV])?.remove(0);
    let pairs = pairs.unwrap_or(&DEFAULT_SWEEP_PAIRS);
    let cap = (!uncapped).then_some(arch.hbm_bytes_per_s);
    let rows = sweep_tvlp_clp(&params, &arch, pairs, cap)?;
    let mut checks = Vec::new();
    if builtin == Some(3) && default_arch && !uncapped && pairs == DEFAULT_SWEEP_PAIRS {
        for (r, &target) in rows.iter().zip(&reference::SWEEP_THROUGHPUT) {
            checks.push(Check::relative(
                format!("({}, {}) throughput", r.tvlp, r.clp),
                r.pbs_throughput_per_s,
                target,
                reference::SWEEP_THROUGHPUT_TOL,
            ));
        }
        checks.push(Check::relative(
            "(8, 4) required bandwidth",
            required_bandwidth(&params, &arch)?,
            reference::SWEEP_REQUIRED_BANDWIDTH,
            reference::SWEEP_BANDWIDTH_TOL,
        ));
    }
    for r in &rows {
        eprintln!(
            "TvLP {:>2} CLP {:>2}: {:>7.1} PBS/s  latency {:.3} ms  bsk demand {:.1} GB/s{}",
            r.tvlp,
            r.clp,
            r.pbs_throughput_per_s,
            r.pbs_latency_s * 1e3,
            r.bsk_demand_bytes_per_s / 1e9,
            if r.memory_bound { "  (memory bound)" } else { "" }
        );
    }
    let mut r = Report::new("sweep", Rows::Sweep(rows), checks);
    r.param_set = Some(params.label());
    Ok(r)
}

fn nn(cli: &Cli, depths: &[usize], workload: Option<&Path>) -> Result<Report> {
    let (arch, _) = arch(cli)?;
    let (params, _) = param_sets(cli, &[ParamSet::I])?.remove(0);
    let models: Vec<(String, WorkloadGraph)> = match workload {
        Some(path) => vec![(path.display().to_string(), WorkloadGraph::load(path)?)],
        None => depths
            .iter()
            .map(|&d| Ok((format!("NN-{d}"), build_nn_workload(d)?)))
            .collect::<Result<_>>()?,
    };
    let mut rows = Vec::with_capacity(models.len());
    for (model, graph) in &models {
        let w = simulate_workload(graph, &params, &arch)?;
        eprintln!("{model}: {} PBS in {} levels, {:.4} s", w.pbs_count, w.levels.len(), w.total_time_s);
        rows.push(NnRow {
            model: model.clone(),
            pbs_count: w.pbs_count,
            levels: w.levels.len(),
            time_s: w.total_time_s,
        });
    }
    let mut checks = Vec::new();
    if workload.is_none() && depths == reference::NN_DEPTHS {
        for (r, &want) in rows.iter().zip(&reference::NN_PBS_COUNTS) {
            checks.push(Check::absolute(format!("{} pbs count", r.model), r.pbs_count as f64, want as f64, 0.0));
        }
    }
    // time increments must follow PBS-count increments
    for w in rows.windows(3) {
        let dc = (w[1].pbs_count as f64 - w[0].pbs_count as f64) / (w[2].pbs_count as f64 - w[1].pbs_count as f64);
        let dt = (w[1].time_s - w[0].time_s) / (w[2].time_s - w[1].time_s);
        if dc.is_finite() && dc > 0.0 {
            checks.push(Check::relative(
                format!("{}..{} linearity", w[0].model, w[2].model),
                dt,
                dc,
                0.01,
            ));
        }
    }
    let mut r = Report::new("nn", Rows::Nn(rows), checks);
    r.param_set = Some(params.label());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "strix",
            "sweep",
            "--param-set",
            "IV",
            "--pairs",
            "8:4,4:8",
            "--format",
            "csv",
            "--folding",
            "off",
            "--bandwidth-cap",
            "150",
        ])
        .unwrap();
        assert_eq!(cli.format, Format::Csv);
        assert_eq!(cli.folding, Some(Toggle::Off));
        match cli.command {
            Command::Sweep { pairs, uncapped } => {
                assert_eq!(pairs.unwrap(), vec![(8, 4), (4, 8)]);
                assert!(!uncapped);
            }
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(["strix", "sweep", "--pairs", "8x4"]).is_err());
    }

    #[test]
    fn model_commands_pass_on_defaults() {
        for args in [&["strix", "microbench"][..], &["strix", "sweep"], &["strix", "nn"]] {
            let cli = Cli::try_parse_from(args).unwrap();
            let r = run(&cli).unwrap();
            assert_eq!(r.status, Status::Pass, "{args:?}: {:?}", r.checks);
            assert!(!r.checks.is_empty());
        }
    }

    #[test]
    fn bad_config_is_an_error() {
        let cli = Cli::try_parse_from(["strix", "microbench", "--param-set", "V"]).unwrap();
        assert!(run(&cli).is_err());
        let cli = Cli::try_parse_from(["strix", "gates", "--param-set", "IV"]).unwrap();
        assert!(run(&cli).is_err());
    }
}
