use rgm::baselines::{run_baseline, Method};
use rgm::io::rows;
use rgm::model::Matrix;
use serde::Serialize;

use super::{read_data, read_mask, read_stats};
use crate::error::CliResult;
use crate::output::{Inputs, Output};
use crate::BaselineArgs;

/// Entry `(j, h)` is the estimated effect of trait `h` on trait `j`.
#[derive(Serialize)]
struct BaselineOutput {
    method: Method,
    #[serde(with = "rows")]
    effect: Matrix,
    #[serde(with = "rows")]
    se: Matrix,
    #[serde(with = "rows")]
    score: Matrix,
    #[serde(with = "rows")]
    pvalue: Matrix,
}

pub fn run(args: BaselineArgs) -> CliResult<()> {
    let mut inputs = Inputs::default();
    let stats = read_stats(&args.data.join("stats.json"), &mut inputs)?;
    let map_path = args.map.clone().unwrap_or_else(|| args.data.join("baseline_map.csv"));
    let map = read_mask(&map_path, &mut inputs)?;
    let data = match args.method {
        Method::Tsls => Some(read_data(&args.data, &mut inputs)?),
        _ => None,
    };
    let res = run_baseline(args.method, &stats, data.as_ref(), &map, args.seed)?;
    let (mut out, name) = Output::file(&args.out)?;
    out.write_json(
        &name,
        &BaselineOutput {
            method: res.method,
            effect: res.effect,
            se: res.se,
            score: res.score,
            pvalue: res.pvalue,
        },
    )?;
    let config = serde_json::json!({
        "data": args.data.display().to_string(),
        "method": args.method,
        "map": map_path.display().to_string(),
    });
    out.finish("baseline", Some(args.seed), config, inputs)
}
