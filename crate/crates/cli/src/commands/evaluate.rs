use rgm::evaluate::evaluate_fit;
use rgm::summary::FitSummary;

use super::{read_json, read_truth};
use crate::error::CliResult;
use crate::output::{Inputs, Output};
use crate::EvaluateArgs;

pub fn run(args: EvaluateArgs) -> CliResult<()> {
    let mut inputs = Inputs::default();
    let summary: FitSummary = read_json(&args.fit.join("summary.json"), &mut inputs)?;
    let truth = read_truth(&args.truth, &mut inputs)?;
    let report = evaluate_fit(&summary, &truth)?;
    let (mut out, name) = Output::file(&args.out)?;
    out.write_json(&name, &report)?;
    let config = serde_json::json!({
        "fit": args.fit.display().to_string(),
        "truth": args.truth.display().to_string(),
    });
    out.finish("evaluate", None, config, inputs)
}
