use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use parkscan_core::{detect_with_stages, netpbm, LotConfig};

use crate::exit::{self, CliResult, Code};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Input image (PPM or PGM).
    image: PathBuf,
    /// Lot config JSON; falls back to $PARKSCAN_CONFIG, then defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write the six intermediate stage images.
    #[arg(long)]
    dump_stages: bool,
}

pub fn run(args: Args) -> CliResult<()> {
    let cfg = crate::config::load(args.config.as_deref())?;
    let id = image_id(&args.image)?;
    let bits = detect_file(&cfg, &args.image, &id, &args.out, args.dump_stages)?;
    println!("{bits}");
    Ok(())
}

/// File stem used to name an image's outputs.
pub fn image_id(path: &Path) -> CliResult<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .ok_or_else(|| anyhow!("cannot derive an image id from {}", path.display()))
        .code(exit::DECODE)
}

/// Runs the pipeline on one file and writes `<id>_annotated.ppm` and
/// `<id>_slots.txt`. Returns the bit string.
pub fn detect_file(cfg: &LotConfig, image: &Path, id: &str, out: &Path, dump_stages: bool) -> CliResult<String> {
    let img = netpbm::decode_image(image).code(exit::DECODE)?;
    let det = detect_with_stages(&img, &cfg.detector, cfg.canny())
        .with_context(|| format!("detecting {}", image.display()))
        .code(exit::RUNTIME)?;

    let write = |name: String, bytes: &[u8]| -> CliResult<()> {
        let path = out.join(name);
        fs::write(&path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .code(exit::WRITE)
    };
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .code(exit::WRITE)?;
    if dump_stages {
        for (suffix, stage) in det.stages.named() {
            write(format!("{id}_{suffix}.pgm"), &netpbm::encode_pgm(&stage))?;
        }
    }
    let report = det.report;
    write(format!("{id}_annotated.ppm"), &netpbm::encode_ppm(&report.annotated))?;
    write(format!("{id}_slots.txt"), format!("{}\n", report.bit_string).as_bytes())?;
    log::info!("{id}: {} ({:?})", report.bit_string, report.module);
    Ok(report.bit_string)
}
