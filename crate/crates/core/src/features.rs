//! Fixed-length feature vectors: multi-window MSPE, raw samples and
//! multi-resolution spectrograms.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::entropy::{grid_min_length, mspe, validate_grid};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synth::Dataset;
use crate::windowing::WindowSpec;
use crate::FORMAT_TAG;

pub const DEFAULT_DIMS: [usize; 5] = [3, 4, 5, 6, 7];
pub const DEFAULT_DELAYS: [usize; 8] = [1, 5, 10, 15, 20, 30, 40, 50];
/// Full signal, two halves, four quarters.
pub const MSPE_WINDOW_COUNT: usize = 7;
pub const MSPE_FEATURE_LEN: usize = MSPE_WINDOW_COUNT * DEFAULT_DIMS.len() * DEFAULT_DELAYS.len();

pub const SPECTROGRAM_INPUT_LEN: usize = 2048;
/// `(window length, window count)` for each spectrogram resolution.
pub const SPECTROGRAM_CONFIGS: [(usize, usize); 3] = [(256, 8), (128, 16), (64, 32)];
pub const SPECTROGRAM_FEATURE_LEN: usize = 8 * 129 + 16 * 65 + 32 * 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Mspe,
    Raw,
    Spectrogram,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Mspe, FeatureKind::Raw, FeatureKind::Spectrogram];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Mspe => "mspe",
            FeatureKind::Raw => "raw",
            FeatureKind::Spectrogram => "spectrogram",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<FeatureKind>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mspe" => Ok(FeatureKind::Mspe),
            "raw" => Ok(FeatureKind::Raw),
            "spectrogram" | "spec" => Ok(FeatureKind::Spectrogram),
            other => Err(Error::Config(format!("unknown feature kind '{other}'"))),
        }
    }
}

/// `(n, τ)` grid for MSPE features and whether cells are normalized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MspeGrid {
    pub dims: Vec<usize>,
    pub delays: Vec<usize>,
    pub normalized: bool,
}

impl Default for MspeGrid {
    fn default() -> Self {
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            delays: DEFAULT_DELAYS.to_vec(),
            normalized: false,
        }
    }
}

impl MspeGrid {
    pub fn new(dims: Vec<usize>, delays: Vec<usize>, normalized: bool) -> Result<Self> {
        validate_grid(&dims, &delays, if normalized { 2 } else { 1 })?;
        Ok(Self {
            dims,
            delays,
            normalized,
        })
    }

    pub fn cells(&self) -> usize {
        self.dims.len() * self.delays.len()
    }

    pub fn feature_len(&self) -> usize {
        MSPE_WINDOW_COUNT * self.cells()
    }

    /// Shortest signal whose quarter windows cover every grid cell.
    pub fn min_signal_len(&self) -> usize {
        4 * grid_min_length(&self.dims, &self.delays)
    }

    /// `(window, n, τ)` for the feature at flat position `index`;
    /// window 0 is the full signal, 1–2 the halves, 3–6 the quarters.
    pub fn locate(&self, index: usize) -> Option<(usize, usize, usize)> {
        if index >= self.feature_len() {
            return None;
        }
        let window = index / self.cells();
        let cell = index % self.cells();
        let n = self.dims[cell / self.delays.len()];
        let tau = self.delays[cell % self.delays.len()];
        Some((window, n, tau))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub signal_id: Option<usize>,
    pub params: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub kind: FeatureKind,
    pub values: Vec<T>,
    pub provenance: Provenance,
}

impl<T> FeatureVector<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_signal_id(mut self, id: usize) -> Self {
        self.provenance.signal_id = Some(id);
        self
    }
}

/// MSPE matrices of the full signal, its halves and its quarters, each
/// flattened row-major and concatenated in that window order.
pub fn mspe_features<T: Scalar>(x: &[T], grid: &MspeGrid) -> Result<FeatureVector<T>> {
    validate_grid(&grid.dims, &grid.delays, if grid.normalized { 2 } else { 1 })?;
    if !x.len().is_multiple_of(4) {
        return Err(Error::domain(format!(
            "signal length {} is not divisible by 4",
            x.len()
        )));
    }
    let required = grid.min_signal_len();
    if x.len() < required {
        return Err(Error::SignalTooShort {
            required,
            actual: x.len(),
        });
    }
    let mut values = Vec::with_capacity(grid.feature_len());
    for parts in [1, 2, 4] {
        let spec = WindowSpec::disjoint(x.len() / parts)?;
        for w in spec.windows(x)? {
            let m = mspe::<T, T>(w, &grid.dims, &grid.delays, grid.normalized)?;
            values.extend_from_slice(m.as_flat());
        }
    }
    Ok(FeatureVector {
        kind: FeatureKind::Mspe,
        values,
        provenance: Provenance {
            signal_id: None,
            params: format!(
                "dims={:?} delays={:?} normalized={}",
                grid.dims, grid.delays, grid.normalized
            ),
        },
    })
}

pub fn raw_features<T: Scalar>(x: &[T]) -> FeatureVector<T> {
    FeatureVector {
        kind: FeatureKind::Raw,
        values: x.to_vec(),
        provenance: Provenance {
            signal_id: None,
            params: format!("t={}", x.len()),
        },
    }
}

/// Reusable FFT plans for the three spectrogram resolutions.
pub struct Spectrogram {
    plans: Vec<(usize, usize, Arc<dyn Fft<f64>>)>,
}

impl Default for Spectrogram {
    fn default() -> Self {
        Self::new()
    }
}

impl Spectrogram {
    pub fn new() -> Self {
        let mut planner = FftPlanner::new();
        let plans = SPECTROGRAM_CONFIGS
            .iter()
            .map(|&(len, count)| (len, count, planner.plan_fft_forward(len)))
            .collect();
        Self { plans }
    }

    /// One-sided magnitude spectra (bins `0..=L/2`) of rectangular,
    /// non-overlapping windows, window-major, resolutions concatenated.
    pub fn features<T: Scalar>(&self, x: &[T]) -> Result<FeatureVector<T>> {
        if x.len() != SPECTROGRAM_INPUT_LEN {
            return Err(Error::domain(format!(
                "spectrogram features need exactly {SPECTROGRAM_INPUT_LEN} samples, got {}",
                x.len()
            )));
        }
        let mut values = Vec::with_capacity(SPECTROGRAM_FEATURE_LEN);
        for (len, count, fft) in &self.plans {
            for w in 0..*count {
                let mut buf: Vec<Complex<f64>> = x[w * len..(w + 1) * len]
                    .iter()
                    .map(|v| Complex::new(v.to_f64_lossy(), 0.0))
                    .collect();
                fft.process(&mut buf);
                values.extend(buf[..=len / 2].iter().map(|c| T::of(c.norm())));
            }
        }
        Ok(FeatureVector {
            kind: FeatureKind::Spectrogram,
            values,
            provenance: Provenance {
                signal_id: None,
                params: "windows=256x8,128x16,64x32 rectangular one-sided magnitude".into(),
            },
        })
    }
}

pub fn spectrogram_features<T: Scalar>(x: &[T]) -> Result<FeatureVector<T>> {
    Spectrogram::new().features(x)
}

/// Extracts one kind of feature for every signal of a dataset, in dataset order.
pub fn extract_dataset(ds: &Dataset, kind: FeatureKind, grid: &MspeGrid) -> Result<FeatureSet> {
    let spectrogram = Spectrogram::new();
    let rows = ds
        .signals
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let fv = match kind {
                FeatureKind::Mspe => mspe_features(&s.samples, grid)?,
                FeatureKind::Raw => raw_features(&s.samples),
                FeatureKind::Spectrogram => spectrogram.features(&s.samples)?,
            };
            Ok((s.label, fv.with_signal_id(i)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureSet {
        kind,
        grid: (kind == FeatureKind::Mspe).then(|| grid.clone()),
        label_names: ds.label_names(),
        rows,
    })
}

/// Labelled feature matrix ready for classification or export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub kind: FeatureKind,
    pub grid: Option<MspeGrid>,
    pub label_names: Vec<String>,
    pub rows: Vec<(usize, FeatureVector<f64>)>,
}

#[derive(Serialize)]
struct FeatureSetJson<'a> {
    spec_version: &'static str,
    kind: FeatureKind,
    grid: Option<&'a MspeGrid>,
    windows: Vec<String>,
    dimension: usize,
    labels: &'a [String],
    rows: Vec<FeatureRowJson<'a>>,
}

#[derive(Serialize)]
struct FeatureRowJson<'a> {
    label: &'a str,
    values: &'a [f64],
}

impl FeatureSet {
    pub fn dimension(&self) -> usize {
        self.rows.first().map_or(0, |(_, f)| f.len())
    }

    fn window_description(&self) -> Vec<String> {
        match self.kind {
            FeatureKind::Mspe => vec!["full".into(), "halves".into(), "quarters".into()],
            FeatureKind::Raw => vec![],
            FeatureKind::Spectrogram => SPECTROGRAM_CONFIGS
                .iter()
                .map(|(len, count)| format!("{count}x{len}"))
                .collect(),
        }
    }

    /// Header `label,f_0,…,f_{d−1}` then one row per item.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "label")?;
        for i in 0..self.dimension() {
            write!(w, ",f_{i}")?;
        }
        writeln!(w)?;
        for (label, fv) in &self.rows {
            write!(w, "{}", self.label_names[*label])?;
            for v in &fv.values {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = FeatureSetJson {
            spec_version: FORMAT_TAG,
            kind: self.kind,
            grid: self.grid.as_ref(),
            windows: self.window_description(),
            dimension: self.dimension(),
            labels: &self.label_names,
            rows: self
                .rows
                .iter()
                .map(|(l, f)| FeatureRowJson {
                    label: &self.label_names[*l],
                    values: &f.values,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))
    }
}
