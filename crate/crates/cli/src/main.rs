//! `pentropy`: permutation entropy tools and a synthetic modulation lab.
//!
//! Exit status: 0 on success, 1 on a domain error (bad data, infeasible
//! parameters), 2 on a usage error (unknown flag, unparseable value).
//! Thread count follows `RAYON_NUM_THREADS` when set.

mod commands;
mod series;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pentropy::classify::Method;
use pentropy::features::FeatureKind;
use pentropy::synth::Scheme;
use pentropy::windowing::CeilingMode;

#[derive(Debug, Parser)]
#[command(name = "pentropy", version, about = "Permutation entropy analysis and a synthetic RF modulation lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Standardize {
    /// on for raw and spectrogram features, off for mspe
    Auto,
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SeriesInput {
    /// Series file (one sample per line or comma-separated), `-` for stdin
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordinal pattern of a short sequence and its lexicographic rank
    Pattern {
        /// Comma-separated values, e.g. 1.2,3.1,-4.9
        #[arg(long, allow_hyphen_values = true, conflicts_with = "input", required_unless_present = "input")]
        values: Option<String>,
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Permutation entropy (bits) and normalized entropy at one (n, tau)
    Pe {
        #[command(flatten)]
        series: SeriesInput,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        /// Also print the pattern histogram
        #[arg(long)]
        histogram: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Multi-scale permutation entropy matrix (rows n, columns tau)
    Mspe {
        #[command(flatten)]
        series: SeriesInput,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,15,20,30,40,50")]
        delays: Vec<usize>,
        /// Report H / log2(n!) instead of H in bits
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Normalized permutation entropy over sliding windows
    Profile {
        #[command(flatten)]
        series: SeriesInput,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        /// Window length in samples
        #[arg(long)]
        k: usize,
        /// Overlap proportion in [0, 1)
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = CeilingMode::Figure)]
        ceiling: CeilingMode,
        #[command(flatten)]
        out: Output,
    },
    /// Classify (n, tau) cells as near-uniform (NPE >= 1 - eps) or structured
    Scan {
        #[command(flatten)]
        series: SeriesInput,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,15,20,30,40,50")]
        delays: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a labelled synthetic dataset
    Synth {
        #[arg(long, value_delimiter = ',', default_value = "ook,bpsk,qpsk,fsk2,am")]
        schemes: Vec<Scheme>,
        #[arg(long, default_value_t = 200)]
        per_class: usize,
        /// Samples per signal
        #[arg(long, default_value_t = 2048)]
        t: usize,
        /// SNR in dB, or `clean` for no noise
        #[arg(long, default_value = "25", allow_hyphen_values = true)]
        snr: String,
        #[arg(long)]
        seed: u64,
        /// Binary dataset file
        #[arg(long, short)]
        output: PathBuf,
        /// Also write a CSV export (label, then samples)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// BPSK modulate, optionally add noise, demodulate
    Modem {
        /// Payload as a 0/1 string, e.g. 10110
        #[arg(long, conflicts_with = "random_bits", required_unless_present = "random_bits")]
        bits: Option<String>,
        /// Draw this many random payload bits (needs --seed)
        #[arg(long, requires = "seed")]
        random_bits: Option<usize>,
        #[arg(long, default_value_t = 16)]
        samples_per_symbol: usize,
        #[arg(long, default_value_t = 2.0)]
        cycles_per_symbol: f64,
        /// Add white Gaussian noise at this SNR in dB (needs --seed)
        #[arg(long, requires = "seed", allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the transmitted waveform, one sample per line
        #[arg(long)]
        waveform: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Extract a feature matrix from a dataset file
    Features {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = FeatureKind::Mspe)]
        kind: FeatureKind,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,15,20,30,40,50")]
        delays: Vec<usize>,
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Train/test split a dataset and report the confusion matrix
    Classify {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = FeatureKind::Mspe)]
        kind: FeatureKind,
        /// centroid, knn, or knnK (e.g. knn5)
        #[arg(long, default_value_t = Method::Centroid)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Standardize::Auto)]
        standardize: Standardize,
        #[arg(long, default_value_t = 0.3)]
        test_fraction: f64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Accuracy versus SNR for several feature kinds
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "ook,bpsk,qpsk,fsk2,am")]
        schemes: Vec<Scheme>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-10,-5,0,5,10,15,20,25")]
        snrs: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "mspe,raw,spectrogram")]
        kinds: Vec<FeatureKind>,
        #[arg(long, default_value_t = 200)]
        per_class: usize,
        #[arg(long, default_value_t = 2048)]
        t: usize,
        #[arg(long, default_value_t = Method::Centroid)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Standardize::Auto)]
        standardize: Standardize,
        #[arg(long, default_value_t = 0.3)]
        test_fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
