use rgm::io::{mask_to_csv, matrix_to_csv, stats_to_json};
use rgm::model::compute_sufficient_stats;
use rgm::simulation::{gen_data, gen_truth, CaseSpec};

use super::{to_value, TruthInfo};
use crate::error::CliResult;
use crate::output::{Inputs, Output};
use crate::SimulateArgs;

pub fn run(args: SimulateArgs) -> CliResult<()> {
    let spec = CaseSpec {
        t: args.t,
        ..CaseSpec::new(args.case, args.p, args.seed)
    };
    let truth = gen_truth(&spec)?;
    let data = gen_data(&truth, args.n, args.seed)?;
    let stats = compute_sufficient_stats(&data)?;

    let mut out = Output::dir(&args.out)?;
    let info = TruthInfo {
        case: truth.case,
        p: truth.p(),
        k: truth.k(),
        t: truth.d.ncols(),
        n: args.n,
        seed: args.seed,
    };
    out.write_json("truth.json", &info)?;
    for (name, m) in [
        ("A_true", &truth.a_true),
        ("B_true", &truth.b_true),
        ("D", &truth.d),
        ("Sigma_noise", &truth.sigma_noise),
        ("Y", &data.y),
        ("X", &data.x),
        ("U", &data.u),
    ] {
        out.write(&format!("{name}.csv"), matrix_to_csv(m, name))?;
    }
    for (name, m) in [
        ("B_support", &truth.b_support),
        ("baseline_map", &truth.baseline_map),
        ("graph_truth", &truth.graph_truth),
        ("confounding_truth", &truth.confounding_truth),
    ] {
        out.write(&format!("{name}.csv"), mask_to_csv(m, name))?;
    }
    out.write("stats.json", stats_to_json(&stats))?;
    out.finish("simulate", Some(args.seed), to_value(&args), Inputs::default())
}
