use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use parkscan_core::eval::{format_manifest, ManifestEntry};
use rayon::prelude::*;

use crate::detect::{detect_file, image_id};
use crate::exit::{self, CliResult, Code};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Directory of input images.
    dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    dump_stages: bool,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

pub const MANIFEST: &str = "manifest.jsonl";

pub fn run(args: Args) -> CliResult<()> {
    let cfg = crate::config::load(args.config.as_deref())?;
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .with_context(|| format!("reading {}", args.dir.display()))
        .code(exit::DECODE)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .filter(|e| !e.file_name().to_string_lossy().starts_with('.'))
        .map(|e| e.path())
        .collect();
    files.sort();

    // ids come from file stems, so a.ppm and a.pgm would collide
    let mut seen = HashSet::new();
    let jobs: Vec<(PathBuf, Result<String, String>)> = files
        .into_iter()
        .map(|f| {
            let id = image_id(&f).map_err(|e| e.to_string()).and_then(|id| {
                if seen.insert(id.clone()) {
                    Ok(id)
                } else {
                    Err(format!("duplicate image id {id:?}"))
                }
            });
            (f, id)
        })
        .collect();

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .code(exit::WRITE)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .code(exit::RUNTIME)?;
    let entries: Vec<ManifestEntry> = pool.install(|| {
        jobs.par_iter()
            .map(|(path, id)| {
                let fallback = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
                let outcome = id
                    .clone()
                    .and_then(|id| detect_file(&cfg, path, &id, &args.out, args.dump_stages).map(|b| (id, b)).map_err(|e| e.to_string()));
                let (image_id, bit_string, error) = match outcome {
                    Ok((id, bits)) => (id, Some(bits), None),
                    Err(e) => {
                        log::warn!("{}: {e}", path.display());
                        (id.clone().unwrap_or(fallback), None, Some(e))
                    }
                };
                ManifestEntry {
                    image_id,
                    bit_string,
                    error,
                    timestamp: unix_secs().to_string(),
                }
            })
            .collect()
    });

    let manifest = args.out.join(MANIFEST);
    fs::write(&manifest, format_manifest(&entries))
        .with_context(|| format!("writing {}", manifest.display()))
        .code(exit::WRITE)?;
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    println!("{} images, {} detected, {failed} failed", entries.len(), entries.len() - failed);
    Ok(())
}

fn unix_secs() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}
