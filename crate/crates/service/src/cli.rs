//! `ginaz` command line: train, rewrite, serve, eval.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ginaz::corpus::{load_bundle, parse_corpus, save_bundle};
use ginaz::eval::evaluate;
use ginaz::generate::RuleTable;
use ginaz::translate::MtBackend;
use ginaz::{Engine, Gender, ModelBundle};

use crate::api::{handle_request, RewriteRequest};
use crate::server::{serve, AppState, ServerOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ginaz", version, about = "Speaker and listener gender rewriting for Arabic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model bundle from a corpus and a rule table.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rewrite text for the selected speaker and listener genders.
    Rewrite(RewriteArgs),
    /// Serve the HTTP API and, optionally, the browser UI.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        #[arg(long)]
        cors_origin: Option<String>,
    },
    /// Score a model against a corpus file; prints metric, split, value.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RewriteArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Comma separated, from m and f.
    #[arg(long, value_delimiter = ',', value_parser = parse_gender)]
    pub speaker: Vec<Gender>,
    #[arg(long, value_delimiter = ',', value_parser = parse_gender)]
    pub listener: Vec<Gender>,
    #[arg(long, conflicts_with = "stdin")]
    pub text: Option<String>,
    #[arg(long)]
    pub stdin: bool,
    /// Print the API response instead of plain text.
    #[arg(long)]
    pub json: bool,
}

fn parse_gender(s: &str) -> Result<Gender, String> {
    match s {
        "m" => Ok(Gender::M),
        "f" => Ok(Gender::F),
        _ => Err(format!("expected m or f, got {s:?}")),
    }
}

fn load_engine(model: &Path) -> anyhow::Result<Engine> {
    let bundle = load_bundle(model).with_context(|| format!("loading model bundle {}", model.display()))?;
    Ok(Engine::new(bundle))
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_DATA
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> anyhow::Result<()> {
    match command {
        Command::Train { corpus, rules, out: dir } => {
            let tuples = parse_corpus(&corpus).with_context(|| format!("reading corpus {}", corpus.display()))?;
            let table = std::fs::read_to_string(&rules).with_context(|| format!("reading {}", rules.display()))?;
            let table = RuleTable::parse(&table).with_context(|| format!("parsing {}", rules.display()))?;
            let bundle = ModelBundle::train(&tuples, table)?;
            save_bundle(&bundle, &dir).with_context(|| format!("writing bundle to {}", dir.display()))?;
            writeln!(out, "trained on {} tuples; model {} written to {}", tuples.len(), bundle.fingerprint(), dir.display())?;
        }
        Command::Rewrite(args) => rewrite(args, out)?,
        Command::Serve { model, port, host, static_dir, cors_origin } => {
            let state = AppState::new(load_engine(&model)?, MtBackend::from_env());
            let options = ServerOptions { static_dir, cors_origin };
            tokio::runtime::Runtime::new()?.block_on(serve(state, options, SocketAddr::new(host, port)))?;
        }
        Command::Eval { model, test } => {
            let engine = load_engine(&model)?;
            let tuples = parse_corpus(&test).with_context(|| format!("reading test corpus {}", test.display()))?;
            let split = test.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "test".into());
            for (metric, value) in evaluate(&engine, &tuples).metrics() {
                writeln!(out, "{metric}\t{split}\t{value:.6}")?;
            }
        }
    }
    Ok(())
}

fn rewrite(args: RewriteArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let engine = load_engine(&args.model)?;
    let text = match args.text {
        Some(t) => t,
        None if args.stdin => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            buf
        }
        None => anyhow::bail!("no input: pass --text or --stdin"),
    };
    let code = |g: &Gender| g.to_string().to_lowercase();
    let request = RewriteRequest {
        text,
        speaker: args.speaker.iter().map(code).collect(),
        listener: args.listener.iter().map(code).collect(),
    };
    let response = handle_request(&engine, &MtBackend::from_env(), &request)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string(&response)?)?;
        return Ok(());
    }
    for sentence in &response.sentences {
        let marked: Vec<String> = sentence
            .tokens
            .iter()
            .map(|t| match (&t.gender, &t.dual) {
                (Some(g), Some(d)) => format!("{}/{}{}+{}{}", t.surface, t.person, g.to_uppercase(), d.person, d.gender.to_uppercase()),
                (Some(g), None) => format!("{}/{}{}", t.surface, t.person, g.to_uppercase()),
                _ => t.surface.clone(),
            })
            .collect();
        writeln!(out, "identified\t{}", marked.join(" "))?;
        for v in &sentence.variants {
            let show = |g: &Option<String>| g.clone().unwrap_or_else(|| "-".into());
            writeln!(out, "speaker={} listener={}\t{}", show(&v.speaker), show(&v.listener), v.text.trim_end())?;
        }
    }
    Ok(())
}
