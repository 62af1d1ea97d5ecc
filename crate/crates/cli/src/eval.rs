use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use parkscan_core::eval::{accuracy_from_counts, evaluate, mean_accuracy, parse_manifest, parse_truth, EvalResult};

use crate::exit::{self, CliResult, Code};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Batch manifest (JSON lines).
    #[arg(long, requires = "truth")]
    manifest: Option<PathBuf>,
    /// Truth file of `<image_id> <bit_string>` lines.
    #[arg(long, requires = "manifest")]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    slots_per_test: usize,
    /// Score from raw `TESTS:CORRECT` counts instead of files. Repeatable;
    /// the mean accuracy is printed when given more than once.
    #[arg(long, value_name = "TESTS:CORRECT", conflicts_with_all = ["manifest", "truth"])]
    counts: Vec<String>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

pub fn run(args: Args) -> CliResult<()> {
    let results = if let (Some(manifest), Some(truth)) = (&args.manifest, &args.truth) {
        let read = |p: &PathBuf| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
        let manifest = parse_manifest(&read(manifest).code(exit::DECODE)?).code(exit::DECODE)?;
        let truth = parse_truth(&read(truth).code(exit::DECODE)?).code(exit::DECODE)?;
        vec![evaluate(&manifest, &truth, args.slots_per_test).code(exit::DECODE)?]
    } else if !args.counts.is_empty() {
        args.counts
            .iter()
            .map(|c| {
                let (t, k) = parse_counts(c)?;
                Ok(accuracy_from_counts(t, k, args.slots_per_test)?)
            })
            .collect::<anyhow::Result<Vec<_>>>()
            .code(exit::DECODE)?
    } else {
        return Err(anyhow!("give --manifest and --truth, or --counts")).code(exit::DECODE);
    };

    let mean = (results.len() > 1).then(|| mean_accuracy(&results)).flatten();
    if args.json {
        let value = serde_json::json!({ "results": results, "mean_accuracy_pct": mean });
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        for r in &results {
            println!("{}", describe(r));
        }
        if let Some(m) = mean {
            println!("mean accuracy {m:.2}%");
        }
    }
    Ok(())
}

fn parse_counts(s: &str) -> anyhow::Result<(usize, usize)> {
    let Some((t, k)) = s.split_once(':') else {
        bail!("counts {s:?} must look like TESTS:CORRECT");
    };
    Ok((t.trim().parse()?, k.trim().parse()?))
}

fn describe(r: &EvalResult) -> String {
    format!(
        "tests {} correct {} false {} accuracy {:.2}% slot accuracy {:.2}%",
        r.tests_performed, r.correct_detections, r.false_detections, r.accuracy_pct, r.slot_accuracy_pct
    )
}
