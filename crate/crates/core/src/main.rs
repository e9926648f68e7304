use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use convex_leaves::cli;
use convex_leaves::config::RunConfig;

/// Leaves of properly convex foliated projective structures: build surface
/// group representations, extract and compare leaves, scan eigenvalue
/// spectra and limit-cone directions, and fit boundary exponents.
#[derive(Parser)]
#[command(name = "convex-leaves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON config file; omitted fields take defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// representation file (overrides config)
    #[arg(long)]
    rep: Option<PathBuf>,
    /// maximum word length for tables and scans (overrides config)
    #[arg(long)]
    max_len: Option<usize>,
    /// boundary samples per leaf (overrides config)
    #[arg(long)]
    samples: Option<usize>,
    /// output directory (overrides config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// random seed (overrides config)
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, convex_leaves::GeomError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(rep) = &self.rep {
            cfg.rep_path = rep.clone();
        }
        if let Some(n) = self.max_len {
            cfg.max_word_len = n;
        }
        if let Some(n) = self.samples {
            cfg.leaf_samples = n;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a representation file (the octagon lift, optionally bent)
    BuildRep {
        /// "fuchsian" or "bent"
        #[arg(long, default_value = "fuchsian")]
        kind: String,
        /// bending magnitude
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// bending direction in the Cartan coordinates, comma separated
        #[arg(long, default_value = "1,0,0,-1", value_parser = parse_direction)]
        direction: Direction,
        /// output path
        #[arg(long, default_value = "rep.json")]
        out: PathBuf,
    },
    /// Extract normalized leaves, pairwise Hausdorff matrix, flag export
    Leaves(ConfigArgs),
    /// Per-word spectra, constraint residuals, cone directions
    Spectra(ConfigArgs),
    /// Exact and fitted boundary exponents for one word
    ModelFit {
        #[command(flatten)]
        config: ConfigArgs,
        /// word over a,b,c,d (uppercase = inverse)
        #[arg(long)]
        word: String,
    },
    /// Contracting-iteration demo against the invariant conic
    BenzecriDemo {
        #[command(flatten)]
        config: ConfigArgs,
        /// number of iteration steps
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Clone)]
struct Direction([f64; 4]);

fn parse_direction(s: &str) -> Result<Direction, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("direction needs 4 comma-separated components".into());
    }
    let mut d = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        d[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component '{p}': {e}"))?;
    }
    Ok(Direction(d))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildRep {
            kind,
            eps,
            direction,
            out,
        } => cli::cmd_build_rep(
            &kind,
            eps,
            &direction.0,
            &out,
            &convex_leaves::config::Tolerances::default(),
        ),
        Command::Leaves(args) => args.resolve().and_then(|cfg| cli::cmd_leaves(&cfg)),
        Command::Spectra(args) => args.resolve().and_then(|cfg| cli::cmd_spectra(&cfg)),
        Command::ModelFit { config, word } => config
            .resolve()
            .and_then(|cfg| cli::cmd_model_fit(&cfg, &word)),
        Command::BenzecriDemo { config, steps } => config
            .resolve()
            .and_then(|cfg| cli::cmd_benzecri_demo(&cfg, steps)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
