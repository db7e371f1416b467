//! Batch front end: `yamabe verify | construct | levelset`.
//!
//! Exit codes: 0 when every check passes (or the run is informational), 1 when
//! a check fails, 2 for usage and configuration errors.

pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::soliton::MParam;
pub use config::{RunConfig, Suite};
pub use report::{Mode, Report};
pub use run::{load_profile, run_construct, run_levelset, run_verify, sample_points};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "yamabe",
    version,
    about = "Check and construct quasi Yamabe gradient solitons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run check suites over sampled points of an instance.
    Verify(VerifyArgs),
    /// Integrate a rotationally symmetric profile and check it.
    Construct(ConstructArgs),
    /// Level-surface geometry of an instance or a profile CSV.
    Levelset(LevelsetArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// TOML run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// number of sample points
    #[arg(long)]
    pub samples: Option<usize>,
    /// seed for sampling and for seeded catalog entries
    #[arg(long)]
    pub seed: Option<u64>,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct InstanceArgs {
    /// built-in instance name
    #[arg(long)]
    pub catalog: Option<String>,
    /// potential expression replacing the catalog default
    #[arg(long = "f")]
    pub potential: Option<String>,
    /// the constant m: a nonzero number or "inf"
    #[arg(long)]
    pub m: Option<MParam>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// f''(0) for WARP entries
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub h_r: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// suites to run (repeat or comma-separate)
    #[arg(long, value_enum, value_delimiter = ',')]
    pub suite: Vec<Suite>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<MParam>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub h_r: Option<f64>,
    /// export the profile as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LevelsetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// read a profile CSV written by `construct` (with --n, --m, --rho)
    #[arg(long)]
    pub from_profile: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// number of level surfaces
    #[arg(long)]
    pub levels: Option<usize>,
    /// points sampled per level surface
    #[arg(long)]
    pub per_level: Option<usize>,
}

fn base_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.samples {
        cfg.sampling.count = s;
    }
    if let Some(s) = common.seed {
        cfg.sampling.seed = s;
        cfg.instance.seed = Some(s);
    }
    if let Some(o) = &common.output {
        cfg.output.report = Some(o.clone());
    }
    Ok(cfg)
}

fn apply_instance(cfg: &mut RunConfig, a: &InstanceArgs) {
    let i = &mut cfg.instance;
    if let Some(c) = &a.catalog {
        i.catalog = Some(c.clone());
    }
    i.potential = a.potential.clone().or(i.potential.take());
    i.m = a.m.or(i.m);
    i.rho = a.rho.or(i.rho);
    i.q = a.q.or(i.q);
    i.r_max = a.r_max.or(i.r_max);
    i.h_r = a.h_r.or(i.h_r);
}

fn execute(cli: Cli) -> Result<(Report, RunConfig)> {
    match cli.command {
        Command::Verify(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_instance(&mut cfg, &a.instance);
            if !a.suite.is_empty() {
                cfg.verify.suites = a.suite.clone();
            }
            let inst = cfg.instance.build(cfg.sampling.margin)?;
            let rep = run_verify(&inst, &cfg.verify.suites.clone(), &cfg)?;
            Ok((rep, cfg))
        }
        Command::Construct(a) => {
            let mut cfg = base_config(&a.common)?;
            let c = &mut cfg.construct;
            c.n = a.n.unwrap_or(c.n);
            c.m = a.m.unwrap_or(c.m);
            c.rho = a.rho.unwrap_or(c.rho);
            c.q = a.q.unwrap_or(c.q);
            c.r_max = a.r_max.unwrap_or(c.r_max);
            c.h_r = a.h_r.unwrap_or(c.h_r);
            if a.csv.is_some() {
                c.csv = a.csv.clone();
            }
            let (rep, _) = run_construct(&cfg)?;
            Ok((rep, cfg))
        }
        Command::Levelset(a) => {
            let mut cfg = base_config(&a.common)?;
            let lc = &mut cfg.levelset;
            lc.levels = a.levels.unwrap_or(lc.levels);
            lc.per_level = a.per_level.unwrap_or(lc.per_level);
            if a.from_profile.is_some() {
                lc.from_profile = a.from_profile.clone();
            }
            let inst = match cfg.levelset.from_profile.clone() {
                Some(path) => {
                    if a.instance.catalog.is_some() || cfg.instance.catalog.is_some() {
                        return Err(crate::error::Error::InvalidParameter(
                            "--from-profile and --catalog are exclusive".into(),
                        ));
                    }
                    let lc = &mut cfg.levelset;
                    lc.n = a.n.unwrap_or(lc.n);
                    lc.m = a.instance.m.unwrap_or(lc.m);
                    lc.rho = a.instance.rho.unwrap_or(lc.rho);
                    let pr = load_profile(&path, lc.n, lc.m, lc.rho)?;
                    crate::construct::profile::profile_to_instance(&pr)?
                }
                None => {
                    apply_instance(&mut cfg, &a.instance);
                    cfg.instance.build(cfg.sampling.margin)?
                }
            };
            let rep = run_levelset(&inst, &cfg)?;
            Ok((rep, cfg))
        }
    }
}

/// Parse `args`, run, write the report; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
        }
    };
    match execute(cli) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Ok((rep, cfg)) => {
            let json = rep.to_json();
            match &cfg.output.report {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_CONFIG;
                    }
                }
                None => {
                    // a closed pipe (e.g. `| head`) is not an error of the run
                    let _ = writeln!(std::io::stdout(), "{json}");
                }
            }
            rep.exit_code()
        }
    }
}
