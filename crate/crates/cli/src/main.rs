use std::io::Write as _;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pedforge_core::gateway::{HttpProvider, HttpProviderConfig};
use pedforge_core::{
    parse_sentence, validate_pseudocode, Gateway, ProjectStore, PseudocodeCheck, Register, RetryPolicy, SlotKind,
    Workbench,
};

#[derive(Parser)]
#[command(
    name = "pedforge",
    version,
    about = "Controlled-sentence workbench for educational game design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Port to listen on; 0 picks a free one.
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "PEDFORGE_DATA_DIR", default_value = "pedforge-data")]
        data_dir: PathBuf,
        /// Use the deterministic offline provider with this seed.
        #[arg(long, value_name = "SEED")]
        mock_llm: Option<u64>,
    },
    /// Parse one controlled sentence and print its slots.
    Parse {
        text: String,
        #[arg(long, value_enum, default_value_t = RegisterArg::Game)]
        register: RegisterArg,
    },
    /// Check a pseudocode file against the sentence it was expanded from.
    ValidatePseudocode {
        file: PathBuf,
        /// Game-register source sentence.
        #[arg(long)]
        sentence: String,
    },
    /// Print an artifact's content from a stored project.
    Export {
        #[arg(long, env = "PEDFORGE_DATA_DIR", default_value = "pedforge-data")]
        data_dir: PathBuf,
        project: String,
        artifact: String,
        /// Write to this file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the provenance chain of a reference such as `artifact:a3`.
    Trace {
        #[arg(long, env = "PEDFORGE_DATA_DIR", default_value = "pedforge-data")]
        data_dir: PathBuf,
        project: String,
        reference: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegisterArg {
    Teaching,
    Game,
}

impl From<RegisterArg> for Register {
    fn from(r: RegisterArg) -> Self {
        match r {
            RegisterArg::Teaching => Register::Teaching,
            RegisterArg::Game => Register::Game,
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Serve {
            bind,
            port,
            data_dir,
            mock_llm,
        } => {
            let gateway = match mock_llm {
                Some(seed) => Gateway::mock(seed),
                None => {
                    let config = HttpProviderConfig::from_env()
                        .map_err(anyhow::Error::msg)
                        .context("no provider configured (pass --mock-llm <SEED> to run offline)")?;
                    Gateway::new(Arc::new(HttpProvider::new(config)), RetryPolicy::default())
                }
            };
            let store = ProjectStore::open(&data_dir)
                .with_context(|| format!("cannot open data directory {}", data_dir.display()))?;
            let addr: SocketAddr = format!("{bind}:{port}")
                .parse()
                .with_context(|| format!("invalid bind address {bind}:{port}"))?;
            serve(addr, Workbench::new(store, gateway))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Parse { text, register } => match parse_sentence(&text, register.into()) {
            Ok(s) => {
                println!("register: {}", s.register());
                for kind in SlotKind::ALL {
                    println!("{kind}: {}", s.slot(kind));
                }
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(ExitCode::FAILURE)
            }
        },
        Command::ValidatePseudocode { file, sentence } => {
            let source = parse_sentence(&sentence, Register::Game).context("invalid --sentence")?;
            let content = std::fs::read_to_string(&file).with_context(|| format!("cannot read {}", file.display()))?;
            match validate_pseudocode(&content, &source) {
                PseudocodeCheck::Pass => {
                    println!("ok");
                    Ok(ExitCode::SUCCESS)
                }
                PseudocodeCheck::Fail(reasons) => {
                    for r in reasons {
                        eprintln!("{r}");
                    }
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Export {
            data_dir,
            project,
            artifact,
            output,
        } => {
            let (p, _) = ProjectStore::open(&data_dir)?.load(&project)?;
            let Some(a) = p.state.artifact(&artifact) else {
                bail!("project {project} has no artifact {artifact}");
            };
            match output {
                Some(path) => {
                    std::fs::write(&path, &a.content).with_context(|| format!("cannot write {}", path.display()))?
                }
                None => std::io::stdout().write_all(a.content.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace {
            data_dir,
            project,
            reference,
        } => {
            let (p, _) = ProjectStore::open(&data_dir)?.load(&project)?;
            let chain = pedforge_core::store::trace(&p, &reference)?;
            for link in &chain.links {
                println!(
                    "{:>4}  {:<26} {:<12} {}",
                    link.event.sequence,
                    link.event.change.action(),
                    link.reference,
                    link.event.timestamp
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn serve(addr: SocketAddr, workbench: Workbench) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        let local = listener.local_addr()?;
        tracing::info!(provider = workbench.gateway().provider_name(), "serving");
        println!("listening on http://{local}");
        std::io::stdout().flush()?;
        let router = pedforge_api::app(Arc::new(workbench));
        pedforge_api::serve(listener, router, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        Ok(())
    })
}
