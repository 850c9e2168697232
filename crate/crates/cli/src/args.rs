use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gabopt::generate::SignalKind;

#[derive(Parser, Debug)]
#[command(name = "gabopt", version, about = "Adaptive Gabor windows and lattices")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; each command reads the ones it needs.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Signal length.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Lattice in normal form `a,b,s`.
    #[arg(long, global = true, value_parser = parse_triple)]
    pub lattice: Option<(usize, usize, usize)>,
    /// Concentration exponent.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Target redundancy for adapted lattices.
    #[arg(long, global = true)]
    pub redundancy: Option<f64>,
    /// Time-frequency box `tmin,tmax,fmin,fmax` in samples and bins.
    #[arg(long, global = true, value_parser = parse_region)]
    pub region: Option<[usize; 4]>,
    /// JSON or TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Noise seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted (images require a path).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Analysis window: a file or a chirped Gaussian.
#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Window samples (CSV); overrides `--sigma`/`--chirp`.
    #[arg(long)]
    pub window: Option<PathBuf>,
    /// Gaussian width parameter.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Gaussian chirp rate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub chirp: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic signal (CSV).
    Gen(GenArgs),
    /// Gabor coefficients (CSV plus a JSON header next to `--out`).
    Dgt {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Optimize the analysis window for a signal.
    OptimizeWindow(OptimizeArgs),
    /// Adapted lattice of a chirped Gaussian (or of a fitted window).
    AdaptLattice {
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Alternate window optimization and lattice adaptation.
    Alternate {
        #[arg(long)]
        input: PathBuf,
        /// Per-round table (CSV).
        #[arg(long)]
        rounds: Option<PathBuf>,
        /// Window of the final round (CSV).
        #[arg(long)]
        window_out: Option<PathBuf>,
    },
    /// Reconstruct and center the part of a signal inside `--region`.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Keep only the central `N/factor` frequency bins.
        #[arg(long)]
        reduce: Option<usize>,
        /// Skip TF centering.
        #[arg(long)]
        no_center: bool,
    },
    /// Concentration metrics, frame bounds and the boundary check (JSON).
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Per-column maximum modulus m(t) (CSV).
        #[arg(long)]
        track: Option<PathBuf>,
    },
    /// Spectrogram image (PGM, or PNG by extension).
    Render {
        /// Signal to analyze.
        #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
        input: Option<PathBuf>,
        /// Coefficient CSV written by `dgt`.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 60.0)]
        range_db: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Quadchirp,
    Multitone,
    GaussAtom,
    ChirpedGauss,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Signal kind; ignored when `--config` provides a full specification.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, default_value_t = 0.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f1: f64,
    /// Multitone carrier frequencies in radians per sample.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub tones: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub chirp: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub t0: i64,
    /// Frequency bin of a chirped Gaussian.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub bin: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
}

impl GenArgs {
    pub fn kind(&self, kind: Kind) -> SignalKind {
        match kind {
            Kind::Quadchirp => SignalKind::Quadchirp { f0: self.f0, f1: self.f1 },
            Kind::Multitone => SignalKind::Multitone { a: self.tones.clone(), b: self.b, c: self.c, theta: self.theta },
            Kind::GaussAtom => SignalKind::GaussAtom { sigma: self.sigma, s: self.chirp },
            Kind::ChirpedGauss => SignalKind::ChirpedGauss { sigma: self.sigma, s: self.chirp, t0: self.t0, f0: self.bin },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Nonparam,
    Param,
    Reg,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub input: PathBuf,
    /// Starting window (CSV) for `nonparam` and `reg`.
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// Parametric starting points `sigma,s`; several give a multistart.
    #[arg(long = "from", value_parser = parse_pair, allow_negative_numbers = true)]
    pub from: Vec<(f64, f64)>,
    /// Reference window `h` for `reg` (CSV); the round Gaussian by default.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Iteration trace (CSV).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

fn numbers<T: std::str::FromStr>(text: &str, count: usize, what: &str) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(format!("expected {what}"));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| format!("`{p}` is not a valid number in {what}")))
        .collect()
}

fn parse_triple(text: &str) -> Result<(usize, usize, usize), String> {
    let v = numbers::<usize>(text, 3, "a,b,s")?;
    Ok((v[0], v[1], v[2]))
}

fn parse_region(text: &str) -> Result<[usize; 4], String> {
    let v = numbers::<usize>(text, 4, "tmin,tmax,fmin,fmax")?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let v = numbers::<f64>(text, 2, "sigma,s")?;
    Ok((v[0], v[1]))
}
