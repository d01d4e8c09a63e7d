//! `supergrade` command-line front end.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args as ClapArgs, Parser, Subcommand, ValueEnum};
use supergrade::catalog::{Args, Role};
use supergrade::classify::scenario::DEFAULT_SEED;
use supergrade::superalg::Kind;

use commands::{Limits, ListFilter, Outcome};
use report::{verdict_line, ColorMode, Command, Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] supergrade::Error),
    #[error("{0}")]
    Usage(String),
    #[error("dimension {dim} exceeds --max-dim {max}")]
    TooLarge { dim: usize, max: usize },
}

#[derive(Parser, Debug)]
#[command(name = "supergrade", version, about = "Lie and Leibniz superalgebras from structure constants")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Refuse inputs whose total dimension exceeds this.
    #[arg(long, global = true, default_value_t = 24)]
    max_dim: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Identity suite, annihilator and nilindex (algebra files), or weight,
    /// cocycle and square checks (cochain files).
    Check {
        path: PathBuf,
        #[arg(long, conflicts_with = "require_leibniz")]
        require_lie: bool,
        #[arg(long)]
        require_leibniz: bool,
    },
    /// Natural layers and gradedness.
    Gr { path: PathBuf },
    /// Natural-gradedness verdict with isomorphism witness.
    Natgrade { path: PathBuf },
    #[command(subcommand)]
    Catalog(CatalogCmd),
    #[command(subcommand)]
    Classify(ClassifyCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Lie,
    Leibniz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RoleArg {
    Model,
    Law,
    Cochain,
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List {
        #[arg(long)]
        kind: Option<KindArg>,
        #[arg(long)]
        role: Option<RoleArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        group: Option<String>,
    },
    /// Emits the algebra (or cochain) JSON.
    Show(ShowArgs),
}

#[derive(ClapArgs, Debug)]
struct ShowArgs {
    id: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Parameter value, `name=value`; repeatable.
    #[arg(long = "set")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum ClassifyCmd {
    List,
    Run { id: String },
}

fn kind(k: KindArg) -> Kind {
    match k {
        KindArg::Lie => Kind::Lie,
        KindArg::Leibniz => Kind::Leibniz,
    }
}

fn dispatch(cli: &Cli) -> Result<(String, Outcome), CliError> {
    let limits = Limits { max_dim: cli.max_dim };
    Ok(match &cli.cmd {
        Cmd::Check {
            path,
            require_lie,
            require_leibniz,
        } => {
            let req = match (require_lie, require_leibniz) {
                (true, _) => Some(Kind::Lie),
                (_, true) => Some(Kind::Leibniz),
                _ => None,
            };
            ("check".into(), commands::check(path, req, &limits)?)
        }
        Cmd::Gr { path } => ("gr".into(), commands::gr(path, &limits)?),
        Cmd::Natgrade { path } => ("natgrade".into(), commands::natgrade(path, &limits)?),
        Cmd::Catalog(CatalogCmd::List {
            kind: k,
            role,
            n,
            m,
            group,
        }) => {
            let f = ListFilter {
                kind: k.map(kind),
                role: role.map(|r| match r {
                    RoleArg::Model => Role::Model,
                    RoleArg::Law => Role::Law,
                    RoleArg::Cochain => Role::Cochain,
                }),
                n: *n,
                m: *m,
                group: group.clone(),
            };
            ("catalog list".into(), commands::catalog_list(f))
        }
        Cmd::Catalog(CatalogCmd::Show(s)) => {
            let args = Args {
                n: s.n,
                m: s.m,
                k: s.k,
                s: s.s,
                values: commands::parse_sets(&s.set)?,
            };
            ("catalog show".into(), commands::catalog_show(&s.id, args, &limits)?)
        }
        Cmd::Classify(ClassifyCmd::List) => ("classify list".into(), commands::classify_list()),
        Cmd::Classify(ClassifyCmd::Run { id }) => ("classify run".into(), commands::classify_run(id, cli.seed)?),
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let color = match ColorMode::from_env() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let result = dispatch(&cli);
    let elapsed = start.elapsed();
    let name = |r: &Result<(String, Outcome), CliError>| match r {
        Ok((n, _)) => n.clone(),
        Err(_) => argv.get(1).cloned().unwrap_or_default(),
    };
    let command = Command {
        name: name(&result),
        argv: argv.iter().skip(1).cloned().collect(),
    };
    let (verdict, details, human, raw) = match result {
        Ok((_, o)) => (o.verdict, o.details, o.human, o.raw),
        Err(e) => {
            let msg = e.to_string();
            (Verdict::Error, serde_json::json!({ "error": msg }), format!("error: {msg}\n"), false)
        }
    };
    let mut text = String::new();
    if cli.json {
        let report = Report::new(command, verdict, details, elapsed);
        text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    } else if verdict == Verdict::Error {
        eprint!("{human}");
    } else {
        text.push_str(&human);
        if !text.ends_with('\n') {
            text.push('\n');
        }
        if !raw {
            text.push_str(&verdict_line(verdict, color));
            text.push('\n');
        }
    }
    // a closed pipe is not an error for a batch tool
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(verdict.exit_code() as u8)
}
