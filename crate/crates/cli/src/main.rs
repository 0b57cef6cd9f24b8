use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use twinforge::config::{parse_value, RunConfig, Value};
use twinforge::suite::{run_suite, Command};

/// Digital-twin experiments: accuracy, query-bench, train, resources, sync.
///
/// Any config key can be overridden with `--key value` (or `--key=value`),
/// e.g. `--sim.n_junctions 40 --agent.lr 0.06 --agent.lr 0.6`.
/// Precedence: defaults < --config file < --key flags < --seed/--out.
#[derive(Debug, Parser)]
#[command(name = "twinforge", version)]
struct Cli {
    /// accuracy | query-bench | train | resources | sync
    command: Command,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config overrides as `--key value` pairs.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

/// Splits `--key value` / `--key=value` tokens. `--config`, `--seed` and
/// `--out` are also accepted here, after the first override.
fn split_overrides(cli: &mut Cli) -> Result<Vec<(String, Value)>> {
    let mut pairs = Vec::new();
    let mut it = std::mem::take(&mut cli.overrides).into_iter();
    while let Some(tok) = it.next() {
        let Some(flag) = tok.strip_prefix("--") else { bail!("expected --key, got {tok:?}") };
        let (key, raw) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().with_context(|| format!("--{flag} needs a value"))?;
                (flag.to_string(), v)
            }
        };
        match key.as_str() {
            "config" => cli.config = Some(raw.into()),
            "seed" => cli.seed = Some(raw.parse().with_context(|| format!("--seed {raw:?}"))?),
            "out" => cli.out = Some(raw.into()),
            _ => pairs.push((key, parse_value(&raw))),
        }
    }
    Ok(pairs)
}

fn run(mut cli: Cli) -> Result<()> {
    let pairs = split_overrides(&mut cli)?;
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.merge_file(path)?;
    }
    cfg.apply_pairs(&pairs)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    let outcome = run_suite(cli.command, &cfg).with_context(|| format!("{} failed", cli.command))?;
    print!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
