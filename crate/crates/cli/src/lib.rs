//! Configuration, command dispatch and CSV output for the `lpcocycle` tool.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::io::{ErrorKind, Write};

use anyhow::bail;

use cli::{Cli, Command, Flags};
use commands::{Context, Outcome};
use config::RunConfig;
use lpcocycle::space::ModelSpec;

/// Defaults, then the config file, then flags and environment.
pub fn resolve_config(flags: &Flags) -> anyhow::Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &flags.model {
        cfg.model = ModelSpec::parse_short(m)?;
    }
    if let Some(s) = &flags.subgroup {
        cfg.subgroup = Some(s.clone());
    }
    if let Some(x) = flags.epsilon0 {
        cfg.epsilon0 = x;
    }
    if let Some(x) = flags.depth {
        cfg.depth = Some(x);
    }
    if let Some(x) = &flags.element {
        cfg.element = Some(x.clone());
    }
    if let Some(x) = flags.p {
        cfg.p = Some(x);
    }
    if let Some(x) = &flags.powers {
        cfg.powers = x.clone();
    }
    if let Some(x) = flags.radius {
        cfg.radius = Some(x);
    }
    if let Some(x) = &flags.out {
        cfg.out = x.clone();
    }
    if let Some(x) = flags.threads {
        cfg.threads = Some(x);
    }
    if let Some(x) = flags.seed {
        cfg.seed = x;
    }
    if let Some(x) = &flags.cache_dir {
        cfg.cache_dir = Some(x.clone());
    }
    cfg.timings |= flags.timings;
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(command: Command, ctx: &Context) -> anyhow::Result<Outcome> {
    match command {
        Command::SpaceInfo => commands::space_info(ctx),
        Command::Delta => commands::delta(ctx),
        Command::Growth => commands::growth(ctx),
        Command::CriticalExponent => commands::critical(ctx),
        Command::PsMeasure => commands::ps(ctx),
        Command::RnCheck => commands::rn_check(ctx),
        Command::BmInvariance => commands::bm_invariance(ctx),
        Command::Classify => commands::classify(ctx),
        Command::CocycleNorm => commands::cocycle_norm(ctx),
        Command::GrowthExperiment => commands::growth_exp(ctx),
        Command::ConeLambda => commands::cone_lambda(ctx),
        Command::VerifyAll => verify::run(&ctx.cfg),
    }
}

/// Runs one command, writes its tables under `out` and echoes them to
/// stdout. Returns whether every check the command ran passed.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = resolve_config(&cli.flags)?;
    if cli.flags.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(true);
    }
    let Some(command) = cli.command else {
        bail!("no command given; see `lpcocycle --help`");
    };
    if let Some(n) = cfg.threads {
        // a pool that already exists is fine: only one command runs per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let ctx = Context::new(cfg)?;
    let outcome =
        execute(command, &ctx).map_err(|e| e.context(format!("{} failed", command.name())))?;
    let mut stdout = std::io::stdout().lock();
    for t in &outcome.tables {
        t.write(&ctx.cfg.out, &ctx.hash)?;
        match stdout.write_all(t.render(&ctx.hash).as_bytes()) {
            // a closed reader (`| head`) is not an error; the files are written
            Err(e) if e.kind() == ErrorKind::BrokenPipe => {}
            r => r?,
        }
    }
    Ok(outcome.passed)
}
