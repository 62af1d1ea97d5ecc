use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use parkscan_sync::{sync_cycle, ObjectKind, PipelineDetector, SyncError, SyncState};

use crate::exit::{self, CliResult, Code};
use crate::store::{self, ServiceClient};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Local store directory or `http://` store URL.
    #[arg(long)]
    store: String,
    /// Bearer token for an HTTP store.
    #[arg(long, env = "PARKSCAN_STORE_TOKEN", hide_env_values = true)]
    store_token: Option<String>,
    /// Processed-id state file. Defaults to `sync_state.tsv` inside a local
    /// store, or in the working directory for an HTTP store.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Upload these files as source images before syncing.
    #[arg(long = "import", value_name = "FILE")]
    imports: Vec<PathBuf>,
    /// Keep polling instead of running one cycle.
    #[arg(long)]
    watch: bool,
    /// Seconds between polls with --watch.
    #[arg(long, default_value_t = 5.0)]
    interval: f64,
    /// Slot service base URL to forward each result to.
    #[arg(long)]
    service: Option<String>,
    /// Lot id on the slot service; defaults to the config's lot id.
    #[arg(long)]
    lot: Option<String>,
    #[arg(long, env = "PARKSCAN_INGEST_TOKEN", hide_env_values = true)]
    service_token: Option<String>,
}

pub fn run(args: Args) -> CliResult<()> {
    let cfg = crate::config::load(args.config.as_deref())?;
    let store = store::open(&args.store, args.store_token.clone()).code(exit::RUNTIME)?;
    for path in &args.imports {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .with_context(|| format!("bad file name {}", path.display()))
            .code(exit::DECODE)?;
        let bytes = std::fs::read(path)
            .with_context(|| format!("reading {}", path.display()))
            .code(exit::DECODE)?;
        let id = store.put(ObjectKind::SourceImage, name, &bytes).code(exit::RUNTIME)?;
        log::info!("imported {} as {id}", path.display());
    }

    let state_path = args.state.clone().unwrap_or_else(|| store::default_state(&args.store));
    let mut state = SyncState::open(&state_path)
        .with_context(|| format!("opening {}", state_path.display()))
        .code(exit::WRITE)?;
    let service = args
        .service
        .as_deref()
        .map(|url| ServiceClient::new(url, args.lot.as_deref().unwrap_or(&cfg.lot_id), args.service_token.clone()));
    let detector = PipelineDetector::new(cfg);
    let interval = Duration::from_secs_f64(args.interval.max(0.1));

    loop {
        match sync_cycle(store.as_ref(), &detector, &mut state) {
            Ok(report) => {
                for p in &report.published {
                    println!("{}\t{}", p.source_id, p.bit_string);
                    if let Some(svc) = &service {
                        if let Err(e) = svc.forward(p) {
                            log::error!("forwarding {}: {e:#}", p.source_id);
                        }
                    }
                }
                for (id, why) in &report.failed {
                    log::warn!("{id} left pending: {why}");
                }
                log::info!(
                    "cycle: {} published, {} failed, {} already processed",
                    report.published.len(),
                    report.failed.len(),
                    report.already_processed
                );
            }
            Err(e) if args.watch && e.is_retryable() => log::warn!("{e}; retrying"),
            Err(e @ SyncError::State(_)) => return Err(e).code(exit::WRITE),
            Err(e) => return Err(e).code(exit::RUNTIME),
        }
        if !args.watch {
            return Ok(());
        }
        std::thread::sleep(interval);
    }
}
