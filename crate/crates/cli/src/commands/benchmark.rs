use std::fmt::Write as _;

use rgm::benchmark::{aggregate, aggregate_csv, replicate_csv, run_benchmark, BenchmarkConfig};
use rgm::mcmc::InstrumentMode;
use rgm::parallel::Execution;
use rgm::simulation::Case;

use super::{capped_jobs, to_value, RunConfig};
use crate::error::CliResult;
use crate::output::{Inputs, Output};
use crate::BenchmarkArgs;

pub fn run(args: BenchmarkArgs) -> CliResult<()> {
    let mut inputs = Inputs::default();
    let mut cfg = BenchmarkConfig::new(args.case, args.p, args.n, args.replicates, args.seed);
    if let Some(path) = &args.config {
        let run = RunConfig::load(Some(path), &mut inputs)?;
        cfg.iterations = run.iterations;
        cfg.burn_in = run.burn_in;
        cfg.thin = run.thin;
        cfg.thresholds = run.thresholds;
        cfg.hyper = run.hyper;
    }
    cfg.hyper.instrument_mode = match args.mode {
        Some(m) => m.into(),
        None if args.case == Case::III => InstrumentMode::Selection,
        None => InstrumentMode::FixedMap,
    };
    cfg.iterations = args.iterations.unwrap_or(cfg.iterations);
    cfg.burn_in = args.burn_in.unwrap_or(cfg.burn_in);
    cfg.thin = args.thin.unwrap_or(cfg.thin);
    cfg.baselines = args.baselines.clone();
    cfg.t = args.t;
    let jobs = capped_jobs(args.jobs)?;

    let results = run_benchmark(&cfg, Execution::from_jobs(jobs))?;
    let mut out = Output::dir(&args.out)?;
    out.write_json("config.json", &cfg)?;
    out.write("aggregate.csv", aggregate_csv(&aggregate(&results)))?;
    out.write("replicates.csv", replicate_csv(&results))?;
    let mut seeds = String::from("replicate,seed\n");
    for r in &results {
        writeln!(seeds, "{},{}", r.replicate, r.seed).expect("write to String");
    }
    out.write("seeds.csv", seeds)?;
    out.write_json("results.json", &results)?;
    // The job count changes scheduling only, so it stays out of the config
    // snapshot that determinism checks compare.
    out.finish("benchmark", Some(cfg.seed), to_value(&cfg), inputs)
}
