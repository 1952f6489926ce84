//! Replicated simulation studies and their summary tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, Method};
use crate::error::{Result, RgmError};
use crate::evaluate::{evaluate_baseline, evaluate_fit, BASELINE_ALPHA};
use crate::mcmc::{run_chain, Hyperparameters, InstrumentMode, McmcConfig};
use crate::metrics::{EvaluationReport, StructureReport};
use crate::model::compute_sufficient_stats;
use crate::parallel::{map_indexed, Execution};
use crate::seed::{derive, stream, Stream};
use crate::simulation::{gen_data, gen_truth, Case, CaseSpec};
use crate::summary::{summarize, Thresholds};

/// Name under which the Bayesian fit appears in result tables.
pub fn fit_label(mode: InstrumentMode) -> &'static str {
    match mode {
        InstrumentMode::FixedMap => "rgm",
        InstrumentMode::Selection => "rgm-plus",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub case: Case,
    pub p: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    #[serde(default)]
    pub hyper: Hyperparameters,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub baselines: Vec<Method>,
    /// Confounders per replicate; `None` means `ceil(p / 2)`.
    #[serde(default)]
    pub t: Option<usize>,
}

impl BenchmarkConfig {
    /// Defaults for a case: fixed instrument map for I and II, selection for
    /// III.
    pub fn new(case: Case, p: usize, n: usize, replicates: usize, seed: u64) -> Self {
        let hyper = Hyperparameters {
            instrument_mode: if case == Case::III {
                InstrumentMode::Selection
            } else {
                InstrumentMode::FixedMap
            },
            ..Default::default()
        };
        BenchmarkConfig {
            case,
            p,
            n,
            replicates,
            seed,
            iterations: 20_000,
            burn_in: 5_000,
            thin: 10,
            hyper,
            thresholds: Thresholds::default(),
            baselines: Vec::new(),
            t: None,
        }
    }

    pub fn replicate_seed(&self, r: usize) -> u64 {
        derive(self.seed, r as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    pub reports: Vec<MethodReport>,
    pub acceptance_a: Option<f64>,
    pub acceptance_b: Option<f64>,
}

/// One self-contained replicate: truth, data, fit, and baselines.
pub fn run_replicate(cfg: &BenchmarkConfig, r: usize) -> Result<ReplicateResult> {
    let seed = cfg.replicate_seed(r);
    let spec = CaseSpec {
        t: cfg.t,
        ..CaseSpec::new(cfg.case, cfg.p, seed)
    };
    let truth = gen_truth(&spec)?;
    let data = gen_data(&truth, cfg.n, seed)?;
    let stats = compute_sufficient_stats(&data)?;
    let mcmc = McmcConfig {
        iterations: cfg.iterations,
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        seed: stream(seed, Stream::Chain),
        hyper: cfg.hyper.clone(),
        fixed_b_support: match cfg.hyper.instrument_mode {
            // Pleiotropic instruments cannot be mapped to one trait, so a
            // fixed map uses the baseline assignment in the shared case.
            InstrumentMode::FixedMap if cfg.case == Case::III => Some(truth.baseline_map.clone()),
            InstrumentMode::FixedMap => Some(truth.b_support.clone()),
            InstrumentMode::Selection => None,
        },
        ..Default::default()
    };
    let chain = run_chain(&stats, &mcmc)?;
    let summary = summarize(&chain, cfg.thresholds)?;
    let mut reports = vec![MethodReport {
        method: fit_label(cfg.hyper.instrument_mode).to_string(),
        report: evaluate_fit(&summary, &truth)?,
    }];
    for &m in &cfg.baselines {
        let res = run_baseline(
            m,
            &stats,
            Some(&data),
            &truth.baseline_map,
            stream(seed, Stream::Baseline),
        )?;
        reports.push(MethodReport {
            method: m.name().to_string(),
            report: evaluate_baseline(&res, &truth, BASELINE_ALPHA)?,
        });
    }
    Ok(ReplicateResult {
        replicate: r,
        seed,
        reports,
        acceptance_a: chain.acceptance.a,
        acceptance_b: chain.acceptance.b,
    })
}

pub fn run_benchmark(cfg: &BenchmarkConfig, exec: Execution) -> Result<Vec<ReplicateResult>> {
    if cfg.replicates == 0 {
        return Err(RgmError::InvalidConfig("replicates must be >= 1".into()));
    }
    map_indexed(cfg.replicates, exec, |r| run_replicate(cfg, r))
        .into_iter()
        .collect()
}

fn push_structure(out: &mut Vec<(String, f64)>, prefix: &str, s: &StructureReport) {
    if let Some(auc) = s.auc {
        out.push((format!("{prefix}_auc"), auc));
    }
    out.push((format!("{prefix}_tpr"), s.tpr));
    out.push((format!("{prefix}_fdr"), s.fdr));
    out.push((format!("{prefix}_mcc"), s.mcc));
}

/// Flat `(metric, value)` list of a report.
pub fn metric_values(r: &EvaluationReport) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    push_structure(&mut out, "graph", &r.graph);
    out.push(("effect_max_abs_dev".into(), r.effects.max_abs));
    out.push(("effect_mean_abs_dev".into(), r.effects.mean_abs));
    out.push(("effect_mean_sq_dev".into(), r.effects.mean_sq));
    if let Some(c) = &r.confounding {
        push_structure(&mut out, "confounding", c);
    }
    if let Some(i) = &r.instrument_selection {
        push_structure(&mut out, "instrument", i);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub metric: String,
    /// Replicates that reported this metric.
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single replicate.
    pub sd: f64,
}

/// Mean and standard deviation per method and metric, in method order of
/// appearance and then metric order of appearance.
pub fn aggregate(results: &[ReplicateResult]) -> Vec<AggregateRow> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut values: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for rep in results {
        for mr in &rep.reports {
            for (metric, v) in metric_values(&mr.report) {
                let key = (mr.method.clone(), metric);
                if !values.contains_key(&key) {
                    order.push(key.clone());
                }
                values.entry(key).or_default().push(v);
            }
        }
    }
    order
        .into_iter()
        .map(|key| {
            let v = &values[&key];
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let sd = if v.len() > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            AggregateRow {
                method: key.0,
                metric: key.1,
                count: v.len(),
                mean,
                sd,
            }
        })
        .collect()
}

/// `method,metric,count,mean,sd` with shortest round-trip floats.
pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("method,metric,count,mean,sd\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.method, r.metric, r.count, r.mean, r.sd).expect("write to String");
    }
    out
}

/// One line per replicate and metric.
pub fn replicate_csv(results: &[ReplicateResult]) -> String {
    let mut out = String::from("replicate,seed,method,metric,value\n");
    for rep in results {
        for mr in &rep.reports {
            for (metric, v) in metric_values(&mr.report) {
                writeln!(out, "{},{},{},{},{}", rep.replicate, rep.seed, mr.method, metric, v)
                    .expect("write to String");
            }
        }
    }
    out
}

/// Lookup of an aggregated value.
pub fn find<'a>(rows: &'a [AggregateRow], method: &str, metric: &str) -> Option<&'a AggregateRow> {
    rows.iter().find(|r| r.method == method && r.metric == metric)
}
