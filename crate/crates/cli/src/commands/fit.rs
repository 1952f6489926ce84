use std::fmt::Write as _;

use log::warn;
use rgm::mcmc::{run_chain, AcceptanceRates, Chain, InstrumentMode, Sample};
use rgm::model::Mask;
use rgm::summary::summarize;
use serde::Serialize;

use super::{read_mask, read_stats, to_value, RunConfig, SampleFormat};
use crate::error::{CliError, CliResult};
use crate::output::{Inputs, Output};
use crate::FitArgs;

#[derive(Serialize)]
struct Diagnostics {
    iterations: usize,
    retained: usize,
    acceptance: AcceptanceRates,
    max_cache_drift: f64,
}

pub fn run(args: FitArgs) -> CliResult<()> {
    let mut inputs = Inputs::default();
    let mut cfg = RunConfig::load(args.config.as_deref(), &mut inputs)?;
    if let Some(mode) = args.mode {
        cfg.hyper.instrument_mode = mode.into();
    }
    let stats = read_stats(&args.stats, &mut inputs)?;
    let support = match (cfg.hyper.instrument_mode, &args.b_support) {
        (InstrumentMode::FixedMap, None) => {
            return Err(CliError::Usage("the fixed-map variant needs --b-support".into()));
        }
        (InstrumentMode::FixedMap, Some(path)) => Some(read_mask(path, &mut inputs)?),
        (InstrumentMode::Selection, Some(_)) => {
            warn!("--b-support is ignored when instruments are selected");
            None
        }
        (InstrumentMode::Selection, None) => None,
    };
    let mcmc = cfg.mcmc(support);
    mcmc.validate(&stats.dims)?;
    let chain = run_chain(&stats, &mcmc)?;
    let summary = summarize(&chain, cfg.thresholds)?;

    let mut out = Output::dir(&args.out)?;
    out.write_json("config.json", &cfg)?;
    out.write_json("summary.json", &summary)?;
    out.write_json(
        "diagnostics.json",
        &Diagnostics {
            iterations: mcmc.iterations,
            retained: chain.samples.len(),
            acceptance: chain.acceptance,
            max_cache_drift: chain.max_cache_drift,
        },
    )?;
    let mut trace = String::from("iteration,log_lik\n");
    for (i, v) in chain.log_lik_trace.iter().enumerate() {
        writeln!(trace, "{i},{v}").expect("write to String");
    }
    out.write("trace.csv", trace)?;
    let columns = sample_columns(&chain);
    match cfg.sample_format {
        SampleFormat::Csv => {
            let mut text = columns.join(",");
            text.push('\n');
            for s in &chain.samples {
                let row: Vec<String> = sample_row(s, chain.fixed_b_support.as_ref())
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            out.write("samples.csv", text)?;
        }
        SampleFormat::Binary => {
            let mut bytes = Vec::with_capacity(chain.samples.len() * columns.len() * 8);
            for s in &chain.samples {
                for v in sample_row(s, chain.fixed_b_support.as_ref()) {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
            }
            out.write("samples.bin", bytes)?;
            out.write("samples.columns", columns.join("\n") + "\n")?;
        }
    }
    out.finish("fit", Some(cfg.seed), to_value(&cfg), inputs)
}

/// Off-diagonal `A`, free entries of `B` (all of them when selecting), `C`,
/// and the upper triangle of `Σ*`, with 1-based indices.
fn sample_columns(chain: &Chain) -> Vec<String> {
    let d = chain.dims;
    let mut cols = vec!["iteration".to_string(), "log_lik".to_string()];
    for j in 0..d.p {
        for h in 0..d.p {
            if j != h {
                cols.push(format!("a_{}_{}", j + 1, h + 1));
            }
        }
    }
    for j in 0..d.p {
        for h in 0..d.k {
            if b_free(chain.fixed_b_support.as_ref(), j, h) {
                cols.push(format!("b_{}_{}", j + 1, h + 1));
            }
        }
    }
    for j in 0..d.p {
        for h in 0..d.l {
            cols.push(format!("c_{}_{}", j + 1, h + 1));
        }
    }
    for j in 0..d.p {
        for h in j..d.p {
            cols.push(format!("sigma_{}_{}", j + 1, h + 1));
        }
    }
    cols
}

fn b_free(support: Option<&Mask>, j: usize, h: usize) -> bool {
    support.is_none_or(|m| m[(j, h)])
}

fn sample_row(s: &Sample, support: Option<&Mask>) -> Vec<f64> {
    let p = s.a.nrows();
    let mut row = vec![s.iteration as f64, s.log_lik];
    for j in 0..p {
        for h in 0..p {
            if j != h {
                row.push(s.a[(j, h)]);
            }
        }
    }
    for j in 0..p {
        for h in 0..s.b.ncols() {
            if b_free(support, j, h) {
                row.push(s.b[(j, h)]);
            }
        }
    }
    for j in 0..p {
        for h in 0..s.c.ncols() {
            row.push(s.c[(j, h)]);
        }
    }
    for j in 0..p {
        for h in j..p {
            row.push(s.sigma_star[(j, h)]);
        }
    }
    row
}
