use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use parkscan_core::LotConfig;
use parkscan_service::{ApiOptions, ServiceError, SlotService};
use parkscan_sync::{sync_cycle, ObjectStore, PipelineDetector, SyncState};

use crate::exit::{self, CliResult, Code};
use crate::store;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    /// Where reservation ledgers and the latest reports are kept.
    #[arg(long, default_value = "parkscan-data")]
    data_dir: PathBuf,
    /// Lot config JSON. Repeat for several lots.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Static web bundle served at `/`.
    #[arg(long, default_value = "web-ui/dist")]
    static_dir: PathBuf,
    /// Bearer token required to post reports and images.
    #[arg(long, env = "PARKSCAN_INGEST_TOKEN", hide_env_values = true)]
    ingest_token: Option<String>,
    /// Skip fsync after each write. Faster, but a crash can lose the last
    /// acknowledged reservations.
    #[arg(long)]
    no_fsync: bool,
    /// Poll this store (directory or URL) and feed results into the first lot.
    #[arg(long)]
    watch_store: Option<String>,
    #[arg(long, env = "PARKSCAN_STORE_TOKEN", hide_env_values = true)]
    store_token: Option<String>,
    /// Processed-id state file for --watch-store.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Seconds between store polls.
    #[arg(long, default_value_t = 5.0)]
    interval: f64,
}

pub fn run(args: Args) -> CliResult<()> {
    let configs: Vec<LotConfig> = if args.config.is_empty() {
        vec![crate::config::load(None)?]
    } else {
        args.config
            .iter()
            .map(|p| crate::config::load(Some(p)))
            .collect::<CliResult<_>>()?
    };
    let first = configs[0].clone();
    let service = SlotService::open(configs, &args.data_dir, !args.no_fsync).map_err(|e| {
        let code = if matches!(e, ServiceError::Config(_)) { exit::CONFIG } else { exit::WRITE };
        crate::exit::CliError::new(code, anyhow::Error::new(e).context(format!("opening {}", args.data_dir.display())))
    })?;
    let service = Arc::new(service);

    if let Some(location) = &args.watch_store {
        let store = store::open(location, args.store_token.clone()).code(exit::RUNTIME)?;
        let state_path = args.state.clone().unwrap_or_else(|| store::default_state(location));
        let state = SyncState::open(&state_path)
            .with_context(|| format!("opening {}", state_path.display()))
            .code(exit::WRITE)?;
        let interval = Duration::from_secs_f64(args.interval.max(0.1));
        let service = service.clone();
        std::thread::spawn(move || watch(store, state, first, service, interval));
    }

    let options = ApiOptions {
        static_dir: Some(args.static_dir),
        ingest_token: args.ingest_token,
    };
    let addr = SocketAddr::new(args.bind, args.port);
    let rt = tokio::runtime::Runtime::new().code(exit::RUNTIME)?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))
            .code(exit::RUNTIME)?;
        let local = listener.local_addr().code(exit::RUNTIME)?;
        println!("listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        parkscan_service::serve_until(listener, service, options, shutdown)
            .await
            .code(exit::RUNTIME)
    })
}

/// Runs sync cycles forever, ingesting each published result.
fn watch(store: Arc<dyn ObjectStore>, mut state: SyncState, cfg: LotConfig, service: Arc<SlotService>, interval: Duration) {
    let lot = cfg.lot_id.clone();
    let detector = PipelineDetector::new(cfg);
    loop {
        match sync_cycle(store.as_ref(), &detector, &mut state) {
            Ok(report) => {
                for p in report.published {
                    if let Err(e) = service.ingest_report(&lot, &p.bit_string) {
                        log::error!("{}: {e}", p.source_id);
                        continue;
                    }
                    if let Err(e) = service.set_annotated(&lot, p.annotated) {
                        log::error!("{}: {e}", p.source_id);
                    }
                    log::info!("{} -> {}", p.source_id, p.bit_string);
                }
                for (id, why) in report.failed {
                    log::warn!("{id} left pending: {why}");
                }
            }
            Err(e) => log::warn!("sync: {e}"),
        }
        std::thread::sleep(interval);
    }
}
