use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use pentropy::classify::{
    default_standardize, evaluate, snr_sweep, write_sweep_csv, SweepConfig,
};
use pentropy::dataset_io::{read_dataset, write_dataset, write_dataset_csv};
use pentropy::entropy::{distribution, mspe, normalized_pe, permutation_entropy, scan, MspeMatrix};
use pentropy::features::{extract_dataset, FeatureKind, MspeGrid};
use pentropy::ordinal::pattern;
use pentropy::synth::{
    awgn, bpsk_demodulate, make_dataset, modulate, DatasetConfig, ModemConfig, Scheme,
};
use pentropy::windowing::{pe_profile, window_starts, WindowSpec};
use pentropy::FORMAT_TAG;
use serde_json::json;

use crate::series::{format_series, parse_series, read_series};
use crate::{Command, Format, Output, Standardize};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(pentropy::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<pentropy::Error> for CliError {
    fn from(e: pentropy::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Domain(e.into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(out: &Output, text: &str) -> CliResult {
    write_text(out.output.as_deref(), text)
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| pentropy::Error::Io(format!("{}: {e}", p.display())))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| pentropy::Error::Io(format!("{}: {e}", path.display())).into())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| pentropy::Error::Io(format!("{}: {e}", path.display())).into())
}

fn parse_snr(s: &str) -> CliResult<Option<f64>> {
    if s.eq_ignore_ascii_case("clean") {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(usage(format!("--snr: '{s}' is neither a number nor 'clean'"))),
    }
}

fn standardize_for(choice: Standardize, kind: FeatureKind) -> bool {
    match choice {
        Standardize::Auto => default_standardize(kind),
        Standardize::On => true,
        Standardize::Off => false,
    }
}

fn check_positive(name: &str, v: usize) -> CliResult {
    if v == 0 {
        return Err(usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn matrix_csv(m: &MspeMatrix<f64>) -> String {
    let mut s = String::from("n\\tau");
    for tau in m.delays() {
        let _ = write!(s, ",{tau}");
    }
    s.push('\n');
    for (r, n) in m.dims().iter().enumerate() {
        let _ = write!(s, "{n}");
        for v in m.row(r) {
            let _ = write!(s, ",{v:.6}");
        }
        s.push('\n');
    }
    s
}

pub fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Pattern { values, input, out } => {
            let x = match (values, input) {
                (Some(v), _) => parse_series(&v)?,
                (None, Some(p)) => read_series(&p)?,
                (None, None) => return Err(usage("give --values or --input")),
            };
            let p = pattern(&x)?;
            let rank = p.lex_rank()?;
            let text = match out.format {
                Format::Csv => format!("pattern,rank\n{p},{rank}\n"),
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "pattern": p.symbols(),
                    "rank": rank,
                })),
            };
            emit(&out, &text)
        }
        Command::Pe {
            series,
            n,
            tau,
            histogram,
            out,
        } => {
            check_positive("n", n)?;
            check_positive("tau", tau)?;
            let x = read_series(&series.input)?;
            let d = distribution(&x, n, tau)?;
            let h: f64 = permutation_entropy(&d);
            let nh: Option<f64> = if n >= 2 { Some(normalized_pe(&d)?) } else { None };
            let hist: Vec<(String, u64)> = d
                .histogram()
                .into_iter()
                .map(|(p, c)| (p.to_string(), c))
                .collect();
            let text = match out.format {
                Format::Csv => {
                    let mut s = format!(
                        "n,tau,total,H,h\n{n},{tau},{},{h:.6},{}\n",
                        d.total(),
                        nh.map_or(String::new(), |v| format!("{v:.6}"))
                    );
                    if histogram {
                        s.push_str("\npattern,count\n");
                        for (p, c) in &hist {
                            let _ = writeln!(s, "{p},{c}");
                        }
                    }
                    s
                }
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "n": n,
                    "tau": tau,
                    "total": d.total(),
                    "H": h,
                    "h": nh,
                    "histogram": if histogram { Some(&hist) } else { None },
                })),
            };
            emit(&out, &text)
        }
        Command::Mspe {
            series,
            dims,
            delays,
            normalized,
            out,
        } => {
            let x = read_series(&series.input)?;
            let m: MspeMatrix<f64> = mspe(&x, &dims, &delays, normalized)?;
            let text = match out.format {
                Format::Csv => matrix_csv(&m),
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "dims": m.dims(),
                    "delays": m.delays(),
                    "normalized": normalized,
                    "values": (0..m.dims().len()).map(|r| m.row(r).to_vec()).collect::<Vec<_>>(),
                })),
            };
            emit(&out, &text)
        }
        Command::Profile {
            series,
            n,
            tau,
            k,
            alpha,
            ceiling,
            out,
        } => {
            check_positive("tau", tau)?;
            let spec = WindowSpec::new(k, alpha, ceiling)?;
            let x = read_series(&series.input)?;
            let starts = window_starts(x.len(), &spec)?;
            let profile: Vec<f64> = pe_profile(&x, n, tau, &spec)?;
            let text = match out.format {
                Format::Csv => {
                    let mut s = String::from("window,start,npe\n");
                    for (i, (st, h)) in starts.iter().zip(&profile).enumerate() {
                        let _ = writeln!(s, "{},{st},{h:.6}", i + 1);
                    }
                    s
                }
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "n": n,
                    "tau": tau,
                    "k": k,
                    "alpha": alpha,
                    "ceiling": ceiling.to_string(),
                    "step": spec.step(),
                    "starts": starts,
                    "profile": profile,
                })),
            };
            emit(&out, &text)
        }
        Command::Scan {
            series,
            dims,
            delays,
            eps,
            out,
        } => {
            let x = read_series(&series.input)?;
            let s = scan::<f64, f64>(&x, &dims, &delays, eps)?;
            let text = match out.format {
                Format::Csv => {
                    let mut t = String::from("n,tau,npe,near_uniform,argmin\n");
                    for (r, &n) in dims.iter().enumerate() {
                        for (c, &tau) in delays.iter().enumerate() {
                            let _ = writeln!(
                                t,
                                "{n},{tau},{:.6},{},{}",
                                s.matrix.get(r, c),
                                s.near_uniform.contains(&(n, tau)),
                                s.argmin == (n, tau)
                            );
                        }
                    }
                    t
                }
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "eps": eps,
                    "near_uniform": s.near_uniform,
                    "structured": s.structured,
                    "argmin": s.argmin,
                    "min_value": s.min_value,
                })),
            };
            emit(&out, &text)
        }
        Command::Synth {
            schemes,
            per_class,
            t,
            snr,
            seed,
            output,
            csv,
        } => {
            let snr = parse_snr(&snr)?;
            let mut cfg = DatasetConfig::new(per_class, snr, seed);
            cfg.t = t;
            let ds = make_dataset(&schemes, &cfg)?;
            write_dataset(create(&output)?, &ds)?;
            if let Some(p) = csv {
                write_dataset_csv(create(&p)?, &ds)?;
            }
            eprintln!(
                "wrote {} signals x {} samples to {}",
                ds.len(),
                ds.t,
                output.display()
            );
            Ok(())
        }
        Command::Modem {
            bits,
            random_bits,
            samples_per_symbol,
            cycles_per_symbol,
            snr,
            seed,
            waveform,
            out,
        } => {
            let payload: Vec<u8> = match (bits, random_bits) {
                (Some(b), _) => b
                    .chars()
                    .filter(|c| !c.is_whitespace() && *c != ',')
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(usage(format!("--bits: '{other}' is not 0 or 1"))),
                    })
                    .collect::<CliResult<_>>()?,
                (None, Some(count)) => pentropy::synth::random_bits(count, seed.unwrap_or_default()),
                (None, None) => return Err(usage("give --bits or --random-bits")),
            };
            let cfg = ModemConfig::new(Scheme::Bpsk)
                .with_samples_per_symbol(samples_per_symbol)
                .with_cycles_per_symbol(cycles_per_symbol);
            let tx = modulate(&payload, &cfg)?;
            if let Some(p) = waveform {
                write_text(Some(&p), &format_series(&tx))?;
            }
            let rx = match snr {
                Some(db) => awgn(&tx, db, seed.unwrap_or_default())?,
                None => tx,
            };
            let decoded = bpsk_demodulate(&rx, &cfg)?;
            let errors = decoded.iter().zip(&payload).filter(|(a, b)| a != b).count();
            let bitstr = |b: &[u8]| b.iter().map(|v| char::from(b'0' + v)).collect::<String>();
            let text = match out.format {
                Format::Csv => format!(
                    "sent,received,bit_errors\n{},{},{errors}\n",
                    bitstr(&payload),
                    bitstr(&decoded)
                ),
                Format::Json => to_json(&json!({
                    "spec_version": FORMAT_TAG,
                    "sent": bitstr(&payload),
                    "received": bitstr(&decoded),
                    "bit_errors": errors,
                    "snr_db": snr,
                })),
            };
            emit(&out, &text)
        }
        Command::Features {
            dataset,
            kind,
            dims,
            delays,
            normalized,
            out,
        } => {
            let grid = MspeGrid::new(dims, delays, normalized)?;
            let ds = read_dataset(open(&dataset)?)?;
            let fs = extract_dataset(&ds, kind, &grid)?;
            match out.format {
                Format::Csv => match &out.output {
                    Some(p) => fs.write_csv(create(p)?)?,
                    None => fs.write_csv(io::stdout().lock())?,
                },
                Format::Json => {
                    let mut s = fs.to_json()?;
                    s.push('\n');
                    emit(&out, &s)?;
                }
            }
            Ok(())
        }
        Command::Classify {
            dataset,
            kind,
            method,
            standardize,
            test_fraction,
            seed,
            out,
        } => {
            let ds = read_dataset(open(&dataset)?)?;
            let fs = extract_dataset(&ds, kind, &MspeGrid::default())?;
            let cm = evaluate(&fs, method, standardize_for(standardize, kind), test_fraction, seed)?;
            let text = match out.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    cm.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
                Format::Json => {
                    let mut s = cm.to_json()?;
                    s.push('\n');
                    s
                }
            };
            emit(&out, &text)?;
            eprintln!("accuracy {:.4} ({}/{})", cm.accuracy(), cm.trace(), cm.total());
            Ok(())
        }
        Command::Sweep {
            schemes,
            snrs,
            kinds,
            per_class,
            t,
            method,
            standardize,
            test_fraction,
            seed,
            output,
        } => {
            let mut cfg = SweepConfig::new(schemes, snrs, kinds, seed);
            cfg.per_class = per_class;
            cfg.t = t;
            cfg.method = method;
            cfg.test_fraction = test_fraction;
            cfg.standardize = match standardize {
                Standardize::Auto => None,
                Standardize::On => Some(true),
                Standardize::Off => Some(false),
            };
            let rows = snr_sweep(&cfg)?;
            match output {
                Some(p) => write_sweep_csv(create(&p)?, &rows)?,
                None => write_sweep_csv(io::stdout().lock(), &rows)?,
            }
            Ok(())
        }
    }
}
