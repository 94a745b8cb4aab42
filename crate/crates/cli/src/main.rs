use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use toeplitz_core::experiment::{self, ExperimentConfig};
use toeplitz_core::measures::{an_matrix, partition_masses, symbol_masses};
use toeplitz_core::toeplitz::density_sequence;
use toeplitz_core::verify::{default_grid, run_check, run_suite, CheckSpec};
use toeplitz_core::{DomainTower, Fraction, GroupElement, ToeplitzFamily};

#[derive(Parser, Debug)]
#[command(name = "toeplitz", version, about = "Toeplitz subshifts over residually finite groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Window level W.
    #[arg(long, global = true)]
    window: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    #[command(subcommand)]
    Tower(TowerCmd),
    #[command(subcommand)]
    Toeplitz(ToeplitzCmd),
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// Run one lemma check, or `all` for the default grid.
    Verify(VerifyArgs),
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand, Debug)]
enum TowerCmd {
    /// Build the tower; writes tower.json under --out, else prints it.
    Build,
    /// Validate a tower dump (or the tower built from the config).
    Validate {
        #[arg(long)]
        tower: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ToeplitzCmd {
    /// η(g) and its level for each element.
    Eval { elements: Vec<String> },
    /// η on a finite set, as a pattern.
    Window { elements: Vec<String> },
    /// Density table as CSV.
    Density,
}

#[derive(Subcommand, Debug)]
enum MeasuresCmd {
    /// μₘ([i]) for m = 1..=depth.
    Masses,
    /// μₘ(C_{n,i}) with window --window (default W = m).
    Partition {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// The level matrix Aₙ.
    Matrix {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check name, or `all`.
    check: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    gamma: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ReportCmd {
    /// Write the full artifact bundle.
    Run,
    /// Tab-separated plot data from a bundle.
    Plot {
        #[arg(long)]
        series: String,
        /// Bundle directory; defaults to --out.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

fn load_config(g: &Global) -> Result<ExperimentConfig> {
    let path = g.config.as_ref().ok_or_else(|| anyhow!("--config is required"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(d) = g.depth {
        cfg.depth = d;
    }
    if let Some(w) = g.window {
        cfg.windows = vec![w];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn family(g: &Global) -> Result<ToeplitzFamily> {
    Ok(load_config(g)?.build_family()?)
}

fn print(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn elements(f: &ToeplitzFamily, raw: &[String]) -> Result<Vec<GroupElement>> {
    raw.iter()
        .map(|s| f.chain().parse_element(s).map_err(Into::into))
        .collect()
}

fn need(v: Option<usize>, name: &str, check: &str) -> Result<usize> {
    v.ok_or_else(|| anyhow!("{check} needs --{name}"))
}

fn check_spec(f: &ToeplitzFamily, a: &VerifyArgs, window: Option<usize>) -> Result<CheckSpec> {
    let c = a.check.as_str();
    let w = || need(window, "window", c);
    Ok(match c {
        "good_gamma" => CheckSpec::GoodGamma {
            n: need(a.n, "n", c)?,
            m: need(a.m, "m", c)?,
        },
        "good_patches" => CheckSpec::GoodPatches {
            n: need(a.n, "n", c)?,
            m: need(a.m, "m", c)?,
        },
        "jset_recursion" => CheckSpec::JsetRecursion { i: need(a.i, "i", c)? },
        "constancy" => CheckSpec::Constancy {
            i: need(a.i, "i", c)?,
            gamma: f.chain().parse_element(a.gamma.as_deref().ok_or_else(|| anyhow!("constancy needs --gamma"))?)?,
        },
        "rel_partition" => CheckSpec::RelPartition {
            n: need(a.n, "n", c)?,
            m: need(a.m, "m", c)?,
            w: w()?,
        },
        "uy_equality" => CheckSpec::UyEquality {
            i: need(a.i, "i", c)?,
            k: need(a.k, "k", c)?,
            m: need(a.m, "m", c)?,
            w: w()?,
        },
        "z_chain" => CheckSpec::ZChain {
            i: need(a.i, "i", c)?,
            k: need(a.k, "k", c)?,
            m: need(a.m, "m", c)?,
            w: w()?,
        },
        "z_mass_trend" => CheckSpec::ZMassTrend { i: need(a.i, "i", c)? },
        other => bail!("unknown check '{other}', expected all or one of {}", CheckSpec::NAMES.join(", ")),
    })
}

/// Ok(true) iff every requested check passed.
fn dispatch(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.command {
        Command::Tower(TowerCmd::Build) => {
            let tower = load_config(g)?.build_tower()?;
            let text = tower.to_json()?;
            match &g.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(experiment::TOWER_FILE);
                    std::fs::write(&path, text + "\n")?;
                    print(&json!({"file": path, "sizes": tower.sizes()}))?;
                }
                None => println!("{text}"),
            }
        }
        Command::Tower(TowerCmd::Validate { tower }) => {
            let tower = match tower {
                Some(path) => DomainTower::from_json(&std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?)?,
                None => load_config(g)?.build_tower()?,
            };
            let report = tower.validate();
            print(&report)?;
            return Ok(report.passed);
        }
        Command::Toeplitz(ToeplitzCmd::Eval { elements: raw }) => {
            let f = family(g)?;
            let rows: Vec<Value> = elements(&f, &raw)?
                .into_iter()
                .map(|e| {
                    let cell = f.eval(&e)?;
                    Ok(json!({"element": e, "symbol": cell.symbol, "level": cell.level}))
                })
                .collect::<Result<_>>()?;
            print(&rows)?;
        }
        Command::Toeplitz(ToeplitzCmd::Window { elements: raw }) => {
            let f = family(g)?;
            let pattern = f.window(&elements(&f, &raw)?)?;
            let rows: Vec<Value> = pattern.into_iter().map(|(e, s)| json!([e, s])).collect();
            print(&rows)?;
        }
        Command::Toeplitz(ToeplitzCmd::Density) => {
            let f = family(g)?;
            print(&density_sequence::<Fraction>(&f)?)?;
        }
        Command::Measures(MeasuresCmd::Masses) => {
            let f = family(g)?;
            let rows = (1..=f.depth())
                .map(|m| symbol_masses::<Fraction>(&f, m))
                .collect::<toeplitz_core::Result<Vec<_>>>()?;
            print(&rows)?;
            return Ok(rows.iter().all(|r| r.agree && r.sums_to_one));
        }
        Command::Measures(MeasuresCmd::Partition { m, n }) => {
            let f = family(g)?;
            print(&partition_masses::<Fraction>(&f, m, n, g.window.unwrap_or(m))?)?;
        }
        Command::Measures(MeasuresCmd::Matrix { n }) => {
            let f = family(g)?;
            let a = an_matrix::<Fraction>(&f, n)?;
            print(&a)?;
            return Ok(a.determinant_holds);
        }
        Command::Verify(args) => {
            let cfg = load_config(g)?;
            let f = cfg.build_family()?;
            if args.check == "all" {
                let grid = default_grid(&f, &cfg.checks, cfg.orbit_limit)?;
                let suite = run_suite(&f, &grid)?;
                print(&suite)?;
                return Ok(suite.passed);
            }
            let spec = check_spec(&f, &args, g.window)?;
            let report = run_check(&f, &spec)?;
            print(&report)?;
            return Ok(report.passed());
        }
        Command::Report(ReportCmd::Run) => {
            let cfg = load_config(g)?;
            let bundle = experiment::run(&cfg, g.out.as_deref())?;
            print(&bundle)?;
            return Ok(bundle.checks_passed);
        }
        Command::Report(ReportCmd::Plot { series, bundle }) => {
            let dir: &Path = bundle
                .as_deref()
                .or(g.out.as_deref())
                .ok_or_else(|| anyhow!("report plot needs --bundle or --out"))?;
            print!("{}", experiment::plot_data(dir, &series)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
