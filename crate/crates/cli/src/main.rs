//! `diffnev`: classify Clunie-type difference equations, list the benchmark
//! families and run the numerical verification drivers.
//!
//! Exit codes: 0 when every hard assertion holds, 1 on operational errors
//! (bad input, bad configuration, numerical failure), 2 when the input is
//! mathematically rejected or an assertion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_config_file, RunConfig};
use render::Format;

#[derive(Parser)]
#[command(name = "diffnev", version, about = "Degree calculus and Nevanlinna checks for difference equations")]
struct Cli {
    /// `key = value` file layered between defaults and flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// text, json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the resolved configuration and stop.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Seed for randomly generated models.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Grid {
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Degree profile, admissibility and verdict of one equation.
    Classify {
        /// Equation text, e.g. "w*w(z+1) = w^2 + {1}".
        equation: Option<String>,
        /// Read the equation from a file instead.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// All admissible families for P (the benchmark by default).
    Enumerate {
        #[arg(long)]
        poly: Option<String>,
    },
    /// The families left after the exclusion rules (benchmark P only).
    Reduce {
        #[arg(long)]
        poly: Option<String>,
    },
    /// Shift inequalities for N and T on a geometric grid.
    ShiftCheck {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[command(flatten)]
        grid: Grid,
    },
    /// The logarithmic difference bound and its exceptional set.
    LogdiffCheck {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        grid: Grid,
    },
    /// Growth lemma scans over [1, r_max].
    GrowthScan {
        /// power:RHO, exproot:ALPHA[,BETA], exp or log.
        #[arg(long)]
        growth: Option<String>,
        /// 2.1, 2.2 or finite.
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        grid: Grid,
    },
    /// The lacunary canonical product and its proximity table.
    ProductExample {
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Pole orders forced along z0 + n.
    Polechain {
        #[arg(long)]
        k0: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        degree: Option<u64>,
        /// Comma-separated offsets to skip.
        #[arg(long)]
        blacklist: Option<String>,
    },
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn grid_flags(g: &Grid) -> Vec<(&'static str, Option<String>)> {
    vec![("r_min", s(&g.r_min)), ("r_max", s(&g.r_max)), ("ratio", s(&g.ratio))]
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Enumerate { .. } => "enumerate",
            Command::Reduce { .. } => "reduce",
            Command::ShiftCheck { .. } => "shift-check",
            Command::LogdiffCheck { .. } => "logdiff-check",
            Command::GrowthScan { .. } => "growth-scan",
            Command::ProductExample { .. } => "product-example",
            Command::Polechain { .. } => "polechain",
        }
    }

    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::Classify { equation, file } => {
                vec![("equation", equation.clone()), ("file", file.as_ref().map(|p| p.display().to_string()))]
            }
            Command::Enumerate { poly } | Command::Reduce { poly } => vec![("poly", poly.clone())],
            Command::ShiftCheck { model, c, grid } => {
                let mut v = vec![("model", model.clone()), ("c", c.clone())];
                v.extend(grid_flags(grid));
                v
            }
            Command::LogdiffCheck { model, c, delta, eps, threshold, grid } => {
                let mut v = vec![
                    ("model", model.clone()),
                    ("c", c.clone()),
                    ("delta", s(delta)),
                    ("eps", s(eps)),
                    ("threshold", s(threshold)),
                ];
                v.extend(grid_flags(grid));
                v
            }
            Command::GrowthScan { growth, lemma, delta, eps, h, k, threshold, tol, grid } => {
                let mut v = vec![
                    ("growth", growth.clone()),
                    ("lemma", lemma.clone()),
                    ("delta", s(delta)),
                    ("eps", s(eps)),
                    ("h", s(h)),
                    ("k", s(k)),
                    ("threshold", s(threshold)),
                    ("tol", s(tol)),
                ];
                v.extend(grid_flags(grid));
                v
            }
            Command::ProductExample { levels, n1, c } => vec![("levels", s(levels)), ("n1", s(n1)), ("c", c.clone())],
            Command::Polechain { k0, steps, degree, blacklist } => vec![
                ("k0", s(k0)),
                ("steps", s(steps)),
                ("degree", s(degree)),
                ("blacklist", blacklist.clone()),
            ],
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let file = match &cli.config {
        Some(p) => parse_config_file(p).map_err(|e| e.to_string())?,
        None => BTreeMap::new(),
    };
    let name = cli.command.name();
    let mut defaults = vec![("format", "text"), ("seed", "0"), ("out", "")];
    defaults.extend_from_slice(commands::defaults(name));
    let mut flags = cli.command.flags();
    let format_flag = if cli.json { Some("json".to_string()) } else { cli.format.clone() };
    flags.push(("format", format_flag));
    flags.push(("seed", s(&cli.seed)));
    flags.push(("out", cli.out.as_ref().map(|p| p.display().to_string())));
    let cfg = RunConfig::layer(name, &defaults, &file, flags);
    cfg.validate().map_err(|e| e.to_string())?;
    let format = Format::parse(cfg.str("format"))?;

    if cli.dry_run {
        let text = match format {
            Format::Json => serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n",
            _ => cfg.to_text(),
        };
        emit(&cfg, &text)?;
        return Ok(0);
    }

    let outcome = commands::execute(&cfg)?;
    let text = outcome.report.render(format)?;
    emit(&cfg, &text)?;
    if let Some(why) = &outcome.rejection {
        eprintln!("rejected: {why}");
        return Ok(2);
    }
    Ok(0)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match cfg.opt("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
