//! Scoring fits and baselines against a simulation truth.

use crate::baselines::BaselineResult;
use crate::error::Result;
use crate::mcmc::InstrumentMode;
use crate::metrics::{confounding_report, deviation_metrics, graph_report, instrument_report, EvaluationReport};
use crate::model::Matrix;
use crate::simulation::{total_effects, SimulationTruth};
use crate::summary::FitSummary;

/// Significance level for baseline edge calls.
pub const BASELINE_ALPHA: f64 = 0.05;

fn at_least(m: &Matrix, t: f64) -> crate::model::Mask {
    m.map(|v| v >= t)
}

/// Graph from `pip_A`, effect deviations of the sparsified `A`, confounding
/// from `pip_Z`, and instrument selection from `pip_B` when it was sampled.
pub fn evaluate_fit(summary: &FitSummary, truth: &SimulationTruth) -> Result<EvaluationReport> {
    let t = summary.thresholds;
    let graph = graph_report(&summary.pip_a, &at_least(&summary.pip_a, t.a), &truth.graph_truth)?;
    let effects = deviation_metrics(&summary.sparse_a, &truth.a_true)?;
    let confounding = Some(confounding_report(
        &summary.pip_z,
        &at_least(&summary.pip_z, t.z),
        &truth.confounding_truth,
    )?);
    let instrument_selection = match summary.mode {
        InstrumentMode::Selection => Some(instrument_report(
            &summary.pip_b,
            &at_least(&summary.pip_b, t.b),
            &truth.b_support,
        )?),
        InstrumentMode::FixedMap => None,
    };
    Ok(EvaluationReport {
        graph,
        effects,
        confounding,
        instrument_selection,
    })
}

/// Graph from `|t|` scores with calls at `p < alpha`; effects against the
/// total effects implied by the true `A`.
pub fn evaluate_baseline(result: &BaselineResult, truth: &SimulationTruth, alpha: f64) -> Result<EvaluationReport> {
    let graph = graph_report(&result.score, &result.calls(alpha), &truth.graph_truth)?;
    let effects = deviation_metrics(&result.effect, &total_effects(&truth.a_true)?)?;
    Ok(EvaluationReport {
        graph,
        effects,
        confounding: None,
        instrument_selection: None,
    })
}
