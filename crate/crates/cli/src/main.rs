//! `preplay`: pre-play negotiation analyses from the command line.
//!
//! Every analysis goes through the HTTP service. Without `--server` an
//! embedded instance is started on a loopback port for the one command.

mod render;

use std::io::Read;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use preplay_api::*;
use preplay_client::{Client, ClientError};
use preplay_core::generate::{seed_from_env, GameShape};
use preplay_core::png::OutcomeScope;
use preplay_core::solution::SolutionConcept;
use preplay_core::transcript::Transcript;
use preplay_service::{serve, AppState, Defaults};
use tokio::net::TcpListener;

#[derive(Parser, Debug)]
#[command(name = "preplay", version, about = "Pre-play negotiation in two-player normal form games")]
struct Cli {
    /// Base URL of a running service; an embedded one is used otherwise.
    #[arg(long, global = true)]
    server: Option<String>,
    /// Print the JSON report instead of the human one.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elimination trace, equilibria, values and classification of a game.
    Solve {
        game: PathBuf,
        #[arg(long, default_value = "nash")]
        concept: SolutionConcept,
    },
    /// Apply offers in order and report each intermediate game.
    Transform {
        game: PathBuf,
        /// An offer such as `Row -> Col : 2 / C`; repeatable.
        #[arg(long = "offer", required = true)]
        offers: Vec<String>,
        #[arg(long, default_value = "nash")]
        concept: SolutionConcept,
    },
    /// The proposer's best single unconditional offer.
    BestOffer {
        game: PathBuf,
        #[arg(long)]
        proposer: String,
        #[arg(long, default_value = "nash")]
        concept: SolutionConcept,
    },
    /// Run the iterated best-offer procedure or a strategy-driven negotiation.
    Negotiate {
        game: PathBuf,
        #[arg(long, value_enum, default_value = "ira")]
        mode: ModeArg,
        #[command(flatten)]
        rules: RuleArgs,
        /// Two strategies, Row's first: spe, greedy, passive, stationary[:share].
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
    },
    /// Equilibrium split of the maximal total under alternating offers.
    Bargain {
        game: PathBuf,
        #[arg(long = "deltaA")]
        delta_a: String,
        #[arg(long = "deltaB")]
        delta_b: Option<String>,
        /// The first proposer, who discounts by deltaA.
        #[arg(long)]
        first: Option<String>,
    },
    /// One-deviation check of a strategy pair on a truncated move grid.
    VerifySpe {
        game: PathBuf,
        #[command(flatten)]
        rules: RuleArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        strategies: Vec<String>,
        #[arg(long, default_value = "1/4")]
        step: String,
        #[arg(long, value_enum, default_value = "all")]
        outcomes: ScopeArg,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        max_deviations: Option<usize>,
        #[arg(long)]
        playout_depth: Option<usize>,
    },
    /// Re-execute a saved transcript.
    Replay { transcript: PathBuf },
    /// Generate random games (seeded by --seed or PREPLAY_SEED).
    Gen {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 2)]
        cols: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        min: i64,
        #[arg(long, default_value_t = 9, allow_negative_numbers = true)]
        max: i64,
        #[arg(long, default_value_t = 1)]
        denominator: i64,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Game used by sessions created without one.
        #[arg(long)]
        game: Option<PathBuf>,
        #[command(flatten)]
        rules: RuleArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Ira,
    Png,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScopeArg {
    All,
    Maximal,
}

#[derive(Args, Debug, Default)]
struct RuleArgs {
    #[arg(long, default_value = "nash")]
    concept: SolutionConcept,
    /// Player to move first.
    #[arg(long)]
    first: Option<String>,
    #[arg(long)]
    time_valuable: bool,
    /// Common discount factor (needs --time-valuable).
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    delta_row: Option<String>,
    #[arg(long)]
    delta_col: Option<String>,
    #[arg(long, conflicts_with = "no_conditional")]
    conditional: bool,
    #[arg(long)]
    no_conditional: bool,
    #[arg(long)]
    allow_withdrawals: bool,
    #[arg(long)]
    allow_opt_out: bool,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl RuleArgs {
    fn rules(&self) -> Rules {
        Rules {
            concept: self.concept,
            first: self.first.clone(),
            time_valuable: self.time_valuable,
            delta: self.delta.clone(),
            delta_row: self.delta_row.clone(),
            delta_col: self.delta_col.clone(),
            allow_conditional: match (self.conditional, self.no_conditional) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
            allow_withdrawals: self.allow_withdrawals,
            allow_opt_out: self.allow_opt_out,
            max_depth: self.max_depth,
        }
    }
}

enum Failure {
    Input(String),
    Client(ClientError),
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        Failure::Client(e)
    }
}

impl Failure {
    fn exit(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Client(e) => match e.kind() {
                Some(ErrorKind::Analysis) => ExitCode::from(3),
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(1),
            },
        }
    }

    fn report(&self) {
        match self {
            Failure::Input(m) => eprintln!("error: {m}"),
            Failure::Client(ClientError::Api { error, .. }) => {
                eprintln!("error: {}", error.error);
                if let Some(moves) = &error.legal_moves {
                    eprintln!("legal moves: {}", moves.join(", "));
                }
            }
            Failure::Client(e) => eprintln!("error: {e}"),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn choices(names: &[String]) -> Result<[StrategyChoice; 2], Failure> {
    match names {
        [a, b] => Ok([StrategyChoice::Named(a.clone()), StrategyChoice::Named(b.clone())]),
        _ => Err(Failure::Input(format!("--strategies takes two names, got {}", names.len()))),
    }
}

fn print<T: serde::Serialize>(json: bool, report: &T, human: impl FnOnce(&T) -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    } else {
        print!("{}", human(report));
    }
}

async fn embedded() -> Result<Client, Failure> {
    let listener = TcpListener::bind("127.0.0.1:0")
        .await
        .map_err(|e| Failure::Input(format!("cannot start the embedded service: {e}")))?;
    let addr = listener.local_addr().map_err(|e| Failure::Input(e.to_string()))?;
    tokio::spawn(serve(listener, AppState::new(Defaults::default())));
    Ok(Client::new(format!("http://{addr}")))
}

async fn run(cli: Cli) -> Result<(), Failure> {
    let json = cli.json;
    if let Command::Serve { host, port, game, rules } = &cli.command {
        let game = game.as_ref().map(read_input).transpose()?;
        let addr: SocketAddr = format!("{host}:{port}")
            .parse()
            .map_err(|e| Failure::Input(format!("bad address: {e}")))?;
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::Input(format!("cannot bind {addr}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(|e| Failure::Input(e.to_string()))?);
        let state = AppState::new(Defaults { game, rules: rules.rules() });
        tokio::select! {
            r = serve(listener, state) => r.map_err(|e| Failure::Input(e.to_string()))?,
            _ = tokio::signal::ctrl_c() => {}
        }
        return Ok(());
    }
    let client = match &cli.server {
        Some(url) => Client::new(url.clone()),
        None => embedded().await?,
    };
    match cli.command {
        Command::Solve { game, concept } => {
            let r = client.solve(&SolveRequest { game: read_input(&game)?, concept }).await?;
            print(json, &r, render::solve);
        }
        Command::Transform { game, offers, concept } => {
            let r = client
                .transform(&TransformRequest { game: read_input(&game)?, offers, concept })
                .await?;
            print(json, &r, render::transform);
        }
        Command::BestOffer { game, proposer, concept } => {
            let r = client
                .best_offer(&BestOfferRequest { game: read_input(&game)?, proposer, concept })
                .await?;
            print(json, &r, render::best_offer);
        }
        Command::Negotiate { game, mode, rules, strategies } => {
            let req = NegotiateRequest {
                game: read_input(&game)?,
                mode: match mode {
                    ModeArg::Ira => Mode::Ira,
                    ModeArg::Png => Mode::Png,
                },
                rules: rules.rules(),
                strategies: strategies.as_deref().map(choices).transpose()?,
            };
            let r = client.negotiate(&req).await?;
            print(json, &r, render::negotiate);
        }
        Command::Bargain { game, delta_a, delta_b, first } => {
            let req = BargainRequest {
                game: read_input(&game)?,
                delta_b: delta_b.unwrap_or_else(|| delta_a.clone()),
                delta_a,
                first,
            };
            let r = client.bargain(&req).await?;
            print(json, &r, render::bargain);
        }
        Command::VerifySpe { game, rules, strategies, step, outcomes, depth, max_deviations, playout_depth } => {
            let req = VerifyRequest {
                game: read_input(&game)?,
                rules: rules.rules(),
                strategies: choices(&strategies)?,
                step: Some(step),
                outcomes: match outcomes {
                    ScopeArg::All => OutcomeScope::All,
                    ScopeArg::Maximal => OutcomeScope::Maximal,
                },
                depth,
                max_deviations,
                playout_depth,
            };
            let r = client.verify_spe(&req).await?;
            print(json, &r, render::verify);
        }
        Command::Replay { transcript } => {
            let text = read_input(&transcript)?;
            let t = Transcript::from_json(&text)
                .map_err(|e| Failure::Input(format!("{}: not a transcript: {e}", transcript.display())))?;
            let r = client.replay(&ReplayRequest { transcript: t }).await?;
            print(json, &r, render::replay);
        }
        Command::Gen { seed, count, rows, cols, min, max, denominator } => {
            let seed = match seed {
                Some(s) => s,
                None => seed_from_env().map_err(Failure::Input)?,
            };
            let shape = GameShape { rows, cols, min, max, denominator };
            let r = client.generate(&GenRequest { seed: Some(seed), count, shape }).await?;
            print(json, &r, render::generated);
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            f.exit()
        }
    }
}
