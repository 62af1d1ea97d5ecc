use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use parkscan_core::eval::format_truth;
use parkscan_core::netpbm;
use parkscan_core::synth::{generate, SynthParams};

use crate::exit::{self, CliResult, Code};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Seed of the first scene; scene i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    count: u64,
    /// Lot config JSON; only its slot count is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator parameters as JSON; missing fields take defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Number of small noise specks per scene.
    #[arg(long)]
    speckles: Option<usize>,
    /// Number of vertical pillars per scene.
    #[arg(long)]
    pillars: Option<usize>,
    /// Probability that a slot holds a car.
    #[arg(long)]
    occupancy: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub const TRUTH: &str = "truth.txt";

pub fn run(args: Args) -> CliResult<()> {
    let mut p = match &args.params {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .code(exit::CONFIG)?;
            serde_json::from_str::<SynthParams>(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .code(exit::CONFIG)?
        }
        None => SynthParams::default(),
    };
    if args.config.is_some() || std::env::var_os(crate::config::ENV_VAR).is_some() {
        p.slot_count = crate::config::load(args.config.as_deref())?.slot_count();
    }
    p.speckles = args.speckles.unwrap_or(p.speckles);
    p.pillars = args.pillars.unwrap_or(p.pillars);
    p.occupancy_prob = args.occupancy.unwrap_or(p.occupancy_prob);
    p.validate().code(exit::CONFIG)?;

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .code(exit::WRITE)?;
    let mut rows = Vec::new();
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i);
        let scene = generate(&p, seed).code(exit::CONFIG)?;
        let id = format!("scene_{seed:06}");
        let path = args.out.join(format!("{id}.ppm"));
        fs::write(&path, netpbm::encode_ppm(&scene.image))
            .with_context(|| format!("writing {}", path.display()))
            .code(exit::WRITE)?;
        rows.push((id, scene.truth));
    }
    let truth = args.out.join(TRUTH);
    fs::write(&truth, format_truth(&rows))
        .with_context(|| format!("writing {}", truth.display()))
        .code(exit::WRITE)?;
    println!("{} scenes written to {}", rows.len(), args.out.display());
    Ok(())
}
