//! Synthetic modulated signals, a coherent BPSK demodulator and AWGN at a
//! calibrated SNR.
//!
//! Carriers are sines evaluated on the global sample index, so a symbol of
//! `samples_per_symbol` samples holds `carrier_cycles_per_symbol` cycles.
//! Frequencies are in cycles per sample (sample rate = 1).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PRNG behind every randomized routine in this crate.
pub type SignalRng = ChaCha8Rng;

pub const DEFAULT_SIGNAL_LEN: usize = 2048;
pub const DEFAULT_SAMPLES_PER_SYMBOL: usize = 16;
pub const DEFAULT_CARRIER_CYCLES_PER_SYMBOL: f64 = 2.0;
/// Largest random carrier frequency offset, as a fraction of the sample rate.
pub const DEFAULT_MAX_FREQ_OFFSET: f64 = 0.002;
pub const MIN_DATASET_SIGNAL_LEN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ook,
    Bpsk,
    Qpsk,
    Fsk2,
    Am,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Ook,
        Scheme::Bpsk,
        Scheme::Qpsk,
        Scheme::Fsk2,
        Scheme::Am,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ook => "ook",
            Scheme::Bpsk => "bpsk",
            Scheme::Qpsk => "qpsk",
            Scheme::Fsk2 => "fsk2",
            Scheme::Am => "am",
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Qpsk => 2,
            _ => 1,
        }
    }

    /// Parses a comma-separated scheme list such as `ook,bpsk,qpsk`.
    pub fn parse_list(s: &str) -> Result<Vec<Scheme>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ook" => Ok(Scheme::Ook),
            "bpsk" | "psk" => Ok(Scheme::Bpsk),
            "qpsk" => Ok(Scheme::Qpsk),
            "fsk2" | "fsk" => Ok(Scheme::Fsk2),
            "am" => Ok(Scheme::Am),
            other => Err(Error::Config(format!("unknown modulation scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModemConfig {
    pub scheme: Scheme,
    pub carrier_cycles_per_symbol: f64,
    pub samples_per_symbol: usize,
    /// Carrier phase in radians.
    pub phase_offset: f64,
    /// Carrier frequency offset in cycles per sample.
    pub freq_offset: f64,
}

impl ModemConfig {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            carrier_cycles_per_symbol: DEFAULT_CARRIER_CYCLES_PER_SYMBOL,
            samples_per_symbol: DEFAULT_SAMPLES_PER_SYMBOL,
            phase_offset: 0.0,
            freq_offset: 0.0,
        }
    }

    pub fn with_samples_per_symbol(mut self, sps: usize) -> Self {
        self.samples_per_symbol = sps;
        self
    }

    pub fn with_cycles_per_symbol(mut self, cycles: f64) -> Self {
        self.carrier_cycles_per_symbol = cycles;
        self
    }

    pub fn with_offsets(mut self, phase: f64, freq: f64) -> Self {
        self.phase_offset = phase;
        self.freq_offset = freq;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_symbol < 4 {
            return Err(Error::Config(format!(
                "samples per symbol must be >= 4, got {}",
                self.samples_per_symbol
            )));
        }
        if !(self.carrier_cycles_per_symbol.is_finite() && self.carrier_cycles_per_symbol > 0.0) {
            return Err(Error::Config(format!(
                "carrier cycles per symbol must be positive, got {}",
                self.carrier_cycles_per_symbol
            )));
        }
        if !(self.phase_offset.is_finite() && self.freq_offset.is_finite()) {
            return Err(Error::Config("offsets must be finite".into()));
        }
        Ok(())
    }

    /// Carrier frequency in cycles per sample, offset included.
    pub fn carrier_freq(&self) -> f64 {
        self.carrier_cycles_per_symbol / self.samples_per_symbol as f64 + self.freq_offset
    }

    fn carrier(&self, i: usize) -> f64 {
        (TAU * self.carrier_freq() * i as f64 + self.phase_offset).sin()
    }
}

/// Deterministic two-tone message used by the AM modulator, in [-1, 1].
fn am_message(i: usize) -> f64 {
    let i = i as f64;
    0.6 * (TAU * i / 512.0).sin() + 0.4 * (TAU * 3.0 * i / 512.0 + 0.7).sin()
}

const AM_MODULATION_INDEX: f64 = 0.5;

/// Maps a bit sequence onto a real passband waveform.
///
/// Output length is `symbols · samples_per_symbol`, where QPSK packs two bits
/// per symbol. AM ignores bit values: its message is a fixed two-tone signal
/// and the bits only set the duration.
pub fn modulate(bits: &[u8], cfg: &ModemConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if bits.is_empty() {
        return Err(Error::domain("cannot modulate an empty bit sequence"));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::domain(format!("bit value {b} is not 0 or 1")));
    }
    let sps = cfg.samples_per_symbol;
    let out = match cfg.scheme {
        Scheme::Bpsk => expand(bits, sps, |b, i| {
            if b == 1 {
                cfg.carrier(i)
            } else {
                -cfg.carrier(i)
            }
        }),
        Scheme::Ook => expand(bits, sps, |b, i| if b == 1 { cfg.carrier(i) } else { 0.0 }),
        Scheme::Qpsk => {
            if !bits.len().is_multiple_of(2) {
                return Err(Error::domain(format!(
                    "QPSK needs an even number of bits, got {}",
                    bits.len()
                )));
            }
            let symbols: Vec<u8> = bits
                .chunks(2)
                .map(|p| match (p[0], p[1]) {
                    (0, 0) => 0,
                    (0, 1) => 1,
                    (1, 1) => 2,
                    _ => 3,
                })
                .collect();
            let f = cfg.carrier_freq();
            expand(&symbols, sps, |s, i| {
                let theta = PI / 4.0 + PI / 2.0 * s as f64;
                (TAU * f * i as f64 + cfg.phase_offset + theta).sin()
            })
        }
        Scheme::Fsk2 => {
            // tones sit one cycle per symbol apart; phase is continuous
            let base = cfg.carrier_freq();
            let shift = 1.0 / sps as f64;
            let mut phase = cfg.phase_offset;
            let mut out = Vec::with_capacity(bits.len() * sps);
            for &b in bits {
                let step = TAU * (base + shift * b as f64);
                for _ in 0..sps {
                    out.push(phase.sin());
                    phase = (phase + step) % TAU;
                }
            }
            out
        }
        Scheme::Am => (0..bits.len() * sps)
            .map(|i| (1.0 + AM_MODULATION_INDEX * am_message(i)) * cfg.carrier(i))
            .collect(),
    };
    Ok(out)
}

fn expand(symbols: &[u8], sps: usize, f: impl Fn(u8, usize) -> f64) -> Vec<f64> {
    symbols
        .iter()
        .enumerate()
        .flat_map(|(j, &s)| (j * sps..(j + 1) * sps).map(move |i| (s, i)))
        .map(|(s, i)| f(s, i))
        .collect()
}

/// Coherent BPSK receiver: per symbol, correlate with the reference carrier.
/// A correlation of exactly zero decodes as bit 1.
pub fn bpsk_demodulate(y: &[f64], cfg: &ModemConfig) -> Result<Vec<u8>> {
    cfg.validate()?;
    let sps = cfg.samples_per_symbol;
    if !y.len().is_multiple_of(sps) {
        return Err(Error::Framing {
            len: y.len(),
            samples_per_symbol: sps,
        });
    }
    Ok(y
        .chunks(sps)
        .enumerate()
        .map(|(j, chunk)| {
            let corr: f64 = chunk
                .iter()
                .enumerate()
                .map(|(k, &v)| v * cfg.carrier(j * sps + k))
                .sum();
            u8::from(corr >= 0.0)
        })
        .collect())
}

pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// `20·log10(rms(clean) / rms(noise))`.
pub fn measured_snr_db(clean: &[f64], noise: &[f64]) -> f64 {
    20.0 * (rms(clean) / rms(noise)).log10()
}

/// Gaussian noise scaled so that `rms(noise) = rms(x)·10^(−snr_db/20)` exactly.
pub fn awgn_noise(x: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    if !snr_db.is_finite() {
        return Err(Error::domain(format!("SNR {snr_db} dB is not finite")));
    }
    let signal_rms = rms(x);
    if signal_rms == 0.0 || !signal_rms.is_finite() {
        return Err(Error::domain(
            "SNR undefined for a signal with zero (or non-finite) RMS",
        ));
    }
    let mut rng = SignalRng::seed_from_u64(seed);
    let mut noise: Vec<f64> = (0..x.len()).map(|_| rng.sample(StandardNormal)).collect();
    let target = signal_rms * 10f64.powf(-snr_db / 20.0);
    let scale = target / rms(&noise);
    noise.iter_mut().for_each(|w| *w *= scale);
    Ok(noise)
}

/// `x + w` with `w` from [`awgn_noise`].
pub fn awgn(x: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    let noise = awgn_noise(x, snr_db, seed)?;
    Ok(x.iter().zip(&noise).map(|(s, w)| s + w).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSignal {
    pub samples: Vec<f64>,
    /// Index into the dataset's scheme list.
    pub label: usize,
    /// `None` for a noiseless signal.
    pub snr_db: Option<f64>,
    /// Seed the signal was generated from.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub t: usize,
    pub schemes: Vec<Scheme>,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub signals: Vec<LabeledSignal>,
}

impl Dataset {
    pub fn label_names(&self) -> Vec<String> {
        self.schemes.iter().map(|s| s.name().to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub t: usize,
    pub per_class: usize,
    /// `None` generates noiseless signals.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub samples_per_symbol: usize,
    pub carrier_cycles_per_symbol: f64,
    pub max_freq_offset: f64,
}

impl DatasetConfig {
    pub fn new(per_class: usize, snr_db: Option<f64>, seed: u64) -> Self {
        Self {
            t: DEFAULT_SIGNAL_LEN,
            per_class,
            snr_db,
            seed,
            samples_per_symbol: DEFAULT_SAMPLES_PER_SYMBOL,
            carrier_cycles_per_symbol: DEFAULT_CARRIER_CYCLES_PER_SYMBOL,
            max_freq_offset: DEFAULT_MAX_FREQ_OFFSET,
        }
    }

    pub fn with_len(mut self, t: usize) -> Self {
        self.t = t;
        self
    }
}

/// `count` uniform random bits drawn from a [`SignalRng`] seeded with `seed`.
pub fn random_bits(count: usize, seed: u64) -> Vec<u8> {
    let mut rng = SignalRng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0..=1u8)).collect()
}

/// Generates one signal of class `label`; the clean waveform depends only on
/// `signal_seed`, so datasets that differ only in SNR share their payloads.
pub fn generate_signal(scheme: Scheme, label: usize, cfg: &DatasetConfig, signal_seed: u64) -> Result<LabeledSignal> {
    let mut rng = SignalRng::seed_from_u64(signal_seed);
    let sps = cfg.samples_per_symbol;
    let symbols = cfg.t.div_ceil(sps);
    let bits: Vec<u8> = (0..symbols * scheme.bits_per_symbol())
        .map(|_| rng.random_range(0..=1u8))
        .collect();
    let phase = rng.random_range(0.0..TAU);
    let fmax = cfg.max_freq_offset;
    let freq = if fmax > 0.0 {
        rng.random_range(-fmax..=fmax)
    } else {
        0.0
    };
    let noise_seed: u64 = rng.random();
    let modem = ModemConfig {
        scheme,
        carrier_cycles_per_symbol: cfg.carrier_cycles_per_symbol,
        samples_per_symbol: sps,
        phase_offset: phase,
        freq_offset: freq,
    };
    let mut samples = modulate(&bits, &modem)?;
    samples.truncate(cfg.t);
    if let Some(snr) = cfg.snr_db {
        samples = awgn(&samples, snr, noise_seed)?;
    }
    Ok(LabeledSignal {
        samples,
        label,
        snr_db: cfg.snr_db,
        seed: signal_seed,
    })
}

/// `per_class` signals for every scheme, class-major. Signal `i` is seeded with
/// `seed ^ i`, so generation order does not affect the result.
pub fn make_dataset(schemes: &[Scheme], cfg: &DatasetConfig) -> Result<Dataset> {
    if schemes.is_empty() {
        return Err(Error::Config("scheme list is empty".into()));
    }
    if cfg.per_class == 0 {
        return Err(Error::Config("per_class must be at least 1".into()));
    }
    if cfg.t < MIN_DATASET_SIGNAL_LEN {
        return Err(Error::Config(format!(
            "signal length {} below minimum {MIN_DATASET_SIGNAL_LEN}",
            cfg.t
        )));
    }
    if !(cfg.max_freq_offset.is_finite() && cfg.max_freq_offset >= 0.0) {
        return Err(Error::Config("max frequency offset must be >= 0".into()));
    }
    let mut sorted = schemes.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != schemes.len() {
        return Err(Error::Config("scheme list has duplicates".into()));
    }
    let total = schemes.len() * cfg.per_class;
    let signals = (0..total)
        .into_par_iter()
        .map(|i| {
            let label = i / cfg.per_class;
            generate_signal(schemes[label], label, cfg, cfg.seed ^ i as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        t: cfg.t,
        schemes: schemes.to_vec(),
        snr_db: cfg.snr_db,
        seed: cfg.seed,
        signals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpsk() -> ModemConfig {
        ModemConfig::new(Scheme::Bpsk)
    }

    #[test]
    fn bpsk_zero_bit_negates_carrier() {
        let y = modulate(&[1, 0], &bpsk()).unwrap();
        assert_eq!(y.len(), 32);
        for i in 0..16 {
            assert!((y[16 + i] + y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn ook_off_symbol_is_silent() {
        let y = modulate(&[0], &ModemConfig::new(Scheme::Ook)).unwrap();
        assert_eq!(y, vec![0.0; 16]);
    }

    #[test]
    fn bpsk_sign_at_quarter_cycle() {
        let y = modulate(&[1, 0, 1, 1, 0], &bpsk()).unwrap();
        assert_eq!(y.len(), 80);
        // 2 cycles in 16 samples: carrier period 8, first peak at sample 2
        let signs: Vec<bool> = (0..5).map(|j| y[j * 16 + 2] > 0.0).collect();
        assert_eq!(signs, vec![true, false, true, true, false]);
        for j in 0..5 {
            assert!((y[j * 16 + 2].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qpsk_length_and_parity() {
        let cfg = ModemConfig::new(Scheme::Qpsk);
        assert_eq!(modulate(&[0, 1, 1, 0], &cfg).unwrap().len(), 32);
        assert!(modulate(&[0, 1, 1], &cfg).is_err());
    }

    #[test]
    fn modulate_rejects_bad_input() {
        assert!(modulate(&[], &bpsk()).is_err());
        assert!(modulate(&[2], &bpsk()).is_err());
        assert!(modulate(&[1], &bpsk().with_samples_per_symbol(3)).is_err());
    }

    #[test]
    fn demodulate_round_trip_and_framing() {
        let bits = [1, 0, 0, 1, 1, 1, 0];
        let y = modulate(&bits, &bpsk()).unwrap();
        assert_eq!(bpsk_demodulate(&y, &bpsk()).unwrap(), bits);
        assert_eq!(
            bpsk_demodulate(&y[..20], &bpsk()),
            Err(Error::Framing {
                len: 20,
                samples_per_symbol: 16
            })
        );
    }

    #[test]
    fn demodulate_zero_signal_ties_to_one() {
        assert_eq!(bpsk_demodulate(&[0.0; 48], &bpsk()).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn awgn_ratio_at_zero_and_twenty_db() {
        let x = modulate(&[1; 128], &bpsk()).unwrap();
        for (snr, ratio) in [(0.0, 1.0), (20.0, 0.1)] {
            let w = awgn_noise(&x, snr, 3).unwrap();
            let r = rms(&w) / rms(&x);
            assert!((r - ratio).abs() <= 0.02 * ratio, "snr {snr}: {r}");
        }
    }

    #[test]
    fn awgn_is_deterministic_and_rejects_silence() {
        let x = modulate(&[1, 0, 1, 1], &bpsk()).unwrap();
        assert_eq!(awgn(&x, 5.0, 11).unwrap(), awgn(&x, 5.0, 11).unwrap());
        assert_ne!(awgn(&x, 5.0, 11).unwrap(), awgn(&x, 5.0, 12).unwrap());
        assert!(awgn(&[0.0; 16], 5.0, 1).is_err());
        assert!(awgn(&x, f64::NAN, 1).is_err());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!(
            Scheme::parse_list("ook,bpsk,qpsk,fsk2,am").unwrap(),
            Scheme::ALL.to_vec()
        );
        assert!(matches!("qam64".parse::<Scheme>(), Err(Error::Config(_))));
    }

    #[test]
    fn dataset_rejects_bad_config() {
        let cfg = DatasetConfig::new(2, Some(10.0), 1);
        assert!(make_dataset(&[], &cfg).is_err());
        assert!(make_dataset(&[Scheme::Am, Scheme::Am], &cfg).is_err());
        assert!(make_dataset(&[Scheme::Am], &DatasetConfig::new(0, None, 1)).is_err());
        assert!(make_dataset(&[Scheme::Am], &cfg.with_len(100)).is_err());
    }

    #[test]
    fn dataset_labels_and_lengths() {
        let cfg = DatasetConfig::new(3, Some(10.0), 42).with_len(300);
        let ds = make_dataset(&Scheme::ALL, &cfg).unwrap();
        assert_eq!(ds.len(), 15);
        for (i, s) in ds.signals.iter().enumerate() {
            assert_eq!(s.label, i / 3);
            assert_eq!(s.samples.len(), 300);
            assert_eq!(s.seed, 42 ^ i as u64);
        }
    }
}
