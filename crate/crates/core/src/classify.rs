//! Train/test splitting, nearest-centroid and k-NN classifiers, confusion
//! matrices and accuracy-versus-SNR sweeps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_dataset, FeatureKind, FeatureSet, MspeGrid};
use crate::scalar::Scalar;
use crate::synth::{make_dataset, DatasetConfig, Scheme, SignalRng, DEFAULT_SIGNAL_LEN};
use crate::FORMAT_TAG;

pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

/// A feature vector with its class index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example<T> {
    pub label: usize,
    pub features: Vec<T>,
}

impl<T> Example<T> {
    pub fn new(label: usize, features: Vec<T>) -> Self {
        Self { label, features }
    }
}

pub trait Labeled {
    fn label(&self) -> usize;
}

impl<T> Labeled for Example<T> {
    fn label(&self) -> usize {
        self.label
    }
}

impl Labeled for crate::synth::LabeledSignal {
    fn label(&self) -> usize {
        self.label
    }
}

impl FeatureSet {
    pub fn examples(&self) -> Vec<Example<f64>> {
        self.rows
            .iter()
            .map(|(l, f)| Example::new(*l, f.values.clone()))
            .collect()
    }
}

/// Stratified split. Each class contributes `floor(fraction · size)` test
/// items, clamped to `1..=size−1`; membership is drawn per class with a seeded
/// shuffle and both halves keep the input order.
pub fn split<S: Labeled + Clone>(items: &[S], test_fraction: f64, seed: u64) -> Result<(Vec<S>, Vec<S>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let classes = items.iter().map(Labeled::label).max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, it) in items.iter().enumerate() {
        members[it.label()].push(i);
    }
    let mut rng = SignalRng::seed_from_u64(seed);
    let mut is_test = vec![false; items.len()];
    for (class, idx) in members.iter_mut().enumerate() {
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(Error::Config(format!(
                "class {class} has {} item(s); need at least 2 to split",
                idx.len()
            )));
        }
        let n_test = ((test_fraction * idx.len() as f64).floor() as usize).clamp(1, idx.len() - 1);
        idx.shuffle(&mut rng);
        for &i in &idx[..n_test] {
            is_test[i] = true;
        }
    }
    let (test, train): (Vec<_>, Vec<_>) = items
        .iter()
        .zip(&is_test)
        .partition(|(_, &t)| t);
    Ok((
        train.into_iter().map(|(s, _)| s.clone()).collect(),
        test.into_iter().map(|(s, _)| s.clone()).collect(),
    ))
}

/// Per-feature z-scoring fit on training data; zero spread maps to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(train: &[Example<T>]) -> Result<Self> {
        let dim = check_dims(train, None)?;
        let n = T::of(train.len() as f64);
        let mut mean = vec![T::zero(); dim];
        for ex in train {
            for (m, &v) in mean.iter_mut().zip(&ex.features) {
                *m = *m + v;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / n);
        let mut var = vec![T::zero(); dim];
        for ex in train {
            for ((s, &v), &m) in var.iter_mut().zip(&ex.features).zip(&mean) {
                *s = *s + (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > T::zero() && sd.is_finite() {
                    sd
                } else {
                    T::one()
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, features: &[T]) -> Vec<T> {
        features
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    pub fn apply_all(&self, items: &[Example<T>]) -> Vec<Example<T>> {
        items
            .iter()
            .map(|e| Example::new(e.label, self.apply(&e.features)))
            .collect()
    }
}

fn check_dims<T>(items: &[Example<T>], expected: Option<usize>) -> Result<usize> {
    let dim = match expected.or_else(|| items.first().map(|e| e.features.len())) {
        Some(d) => d,
        None => return Err(Error::Config("no examples".into())),
    };
    for e in items {
        if e.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: e.features.len(),
            });
        }
    }
    Ok(dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Centroid,
    Knn(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Centroid => f.write_str("centroid"),
            Method::Knn(k) => write!(f, "knn{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `centroid`, `knn` (k = 1) or `knnK` / `knn:K`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        if s == "centroid" {
            return Ok(Method::Centroid);
        }
        if let Some(rest) = s.strip_prefix("knn") {
            let rest = rest.trim_start_matches([':', '=']);
            if rest.is_empty() {
                return Ok(Method::Knn(1));
            }
            return rest
                .parse()
                .map(Method::Knn)
                .map_err(|_| Error::Config(format!("bad k in method '{s}'")));
        }
        Err(Error::Config(format!("unknown method '{s}'")))
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(T::zero(), |acc, v| acc + v)
}

/// A fitted classifier over `classes` labels.
#[derive(Debug, Clone)]
pub enum Model<T> {
    Centroid { centroids: Vec<Vec<T>> },
    Knn { k: usize, train: Vec<Example<T>>, classes: usize },
}

impl<T: Scalar> Model<T> {
    pub fn fit(train: &[Example<T>], classes: usize, method: Method) -> Result<Self> {
        let dim = check_dims(train, None)?;
        let mut per_class = vec![0usize; classes];
        for e in train {
            if e.label >= classes {
                return Err(Error::Config(format!(
                    "label {} outside {classes} classes",
                    e.label
                )));
            }
            per_class[e.label] += 1;
        }
        if let Some(c) = per_class.iter().position(|&n| n == 0) {
            return Err(Error::Config(format!("class {c} has no training items")));
        }
        match method {
            Method::Centroid => {
                let mut centroids = vec![vec![T::zero(); dim]; classes];
                for e in train {
                    for (c, &v) in centroids[e.label].iter_mut().zip(&e.features) {
                        *c = *c + v;
                    }
                }
                for (c, &n) in centroids.iter_mut().zip(&per_class) {
                    let n = T::of(n as f64);
                    c.iter_mut().for_each(|v| *v = *v / n);
                }
                Ok(Model::Centroid { centroids })
            }
            Method::Knn(k) => {
                if k == 0 || k > train.len() {
                    return Err(Error::Config(format!(
                        "k = {k} must be in 1..={}",
                        train.len()
                    )));
                }
                Ok(Model::Knn {
                    k,
                    train: train.to_vec(),
                    classes,
                })
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Model::Centroid { centroids } => centroids[0].len(),
            Model::Knn { train, .. } => train[0].features.len(),
        }
    }

    /// Nearest centroid (ties → smaller class), or majority vote of the `k`
    /// nearest training items (distance ties → earlier training item, vote
    /// ties → smaller class).
    pub fn predict_one(&self, x: &[T]) -> usize {
        match self {
            Model::Centroid { centroids } => {
                let mut best = 0;
                let mut best_d = sq_dist(x, &centroids[0]);
                for (c, centroid) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(x, centroid);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            }
            Model::Knn { k, train, classes } => {
                let mut dists: Vec<(T, usize)> = train
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (sq_dist(x, &e.features), i))
                    .collect();
                dists.sort_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.1.cmp(&b.1))
                });
                let mut votes = vec![0usize; *classes];
                for &(_, i) in &dists[..*k] {
                    votes[train[i].label] += 1;
                }
                let mut best = 0;
                for c in 1..*classes {
                    if votes[c] > votes[best] {
                        best = c;
                    }
                }
                best
            }
        }
    }

    pub fn predict(&self, items: &[Example<T>]) -> Result<Vec<usize>> {
        check_dims(items, Some(self.dim()))?;
        Ok(items
            .par_iter()
            .map(|e| self.predict_one(&e.features))
            .collect())
    }
}

/// Rows are true labels, columns predicted labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let c = labels.len();
        Self {
            labels,
            counts: vec![vec![0; c]; c],
        }
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.trace() as f64 / total as f64
        }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// Header is `true\predicted` followed by the labels.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "true\\predicted")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (l, row) in self.labels.iter().zip(&self.counts) {
            write!(w, "{l}")?;
            for c in row {
                write!(w, ",{c}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            spec_version: &'static str,
            labels: &'a [String],
            counts: &'a [Vec<u64>],
            total: u64,
            accuracy: f64,
        }
        serde_json::to_string_pretty(&Doc {
            spec_version: FORMAT_TAG,
            labels: &self.labels,
            counts: &self.counts,
            total: self.total(),
            accuracy: self.accuracy(),
        })
        .map_err(|e| Error::Format(e.to_string()))
    }
}

/// Fits on `train` (standardizing with train statistics when asked) and
/// tabulates predictions on `test`.
pub fn fit_predict<T: Scalar>(
    train: &[Example<T>],
    test: &[Example<T>],
    labels: &[String],
    method: Method,
    standardize: bool,
) -> Result<ConfusionMatrix> {
    let dim = check_dims(train, None)?;
    check_dims(test, Some(dim))?;
    let (train, test) = if standardize {
        let s = Standardizer::fit(train)?;
        (s.apply_all(train), s.apply_all(test))
    } else {
        (train.to_vec(), test.to_vec())
    };
    let model = Model::fit(&train, labels.len(), method)?;
    let predicted = model.predict(&test)?;
    let mut cm = ConfusionMatrix::new(labels.to_vec());
    for (e, p) in test.iter().zip(predicted) {
        if e.label >= labels.len() {
            return Err(Error::Config(format!("test label {} out of range", e.label)));
        }
        cm.record(e.label, p);
    }
    Ok(cm)
}

/// Standardization is on for raw and spectrogram features, off for MSPE.
pub fn default_standardize(kind: FeatureKind) -> bool {
    !matches!(kind, FeatureKind::Mspe)
}

/// Splits a feature set, fits and evaluates.
pub fn evaluate(
    features: &FeatureSet,
    method: Method,
    standardize: bool,
    test_fraction: f64,
    seed: u64,
) -> Result<ConfusionMatrix> {
    let (train, test) = split(&features.examples(), test_fraction, seed)?;
    fit_predict(&train, &test, &features.label_names, method, standardize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schemes: Vec<Scheme>,
    pub snrs: Vec<f64>,
    pub per_class: usize,
    pub kinds: Vec<FeatureKind>,
    pub method: Method,
    /// `None` uses [`default_standardize`] per kind.
    pub standardize: Option<bool>,
    pub test_fraction: f64,
    pub t: usize,
    pub grid: MspeGrid,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(schemes: Vec<Scheme>, snrs: Vec<f64>, kinds: Vec<FeatureKind>, seed: u64) -> Self {
        Self {
            schemes,
            snrs,
            per_class: 200,
            kinds,
            method: Method::Centroid,
            standardize: None,
            test_fraction: DEFAULT_TEST_FRACTION,
            t: DEFAULT_SIGNAL_LEN,
            grid: MspeGrid::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub kind: FeatureKind,
    pub accuracy: f64,
    pub seed: u64,
}

/// Seed of the dataset generated for the `index`-th SNR of a sweep.
pub fn sweep_dataset_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer keeps per-SNR datasets decorrelated
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One dataset per SNR, shared by every feature kind at that SNR; rows are
/// SNR-major in the configured order.
pub fn snr_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.snrs.is_empty() {
        return Err(Error::Config("SNR list is empty".into()));
    }
    if cfg.kinds.is_empty() {
        return Err(Error::Config("feature kind list is empty".into()));
    }
    let mut rows = Vec::with_capacity(cfg.snrs.len() * cfg.kinds.len());
    for (i, &snr) in cfg.snrs.iter().enumerate() {
        let mut dcfg = DatasetConfig::new(cfg.per_class, Some(snr), sweep_dataset_seed(cfg.seed, i));
        dcfg.t = cfg.t;
        let ds = make_dataset(&cfg.schemes, &dcfg)?;
        for &kind in &cfg.kinds {
            let fs = extract_dataset(&ds, kind, &cfg.grid)?;
            let standardize = cfg.standardize.unwrap_or_else(|| default_standardize(kind));
            let cm = evaluate(&fs, cfg.method, standardize, cfg.test_fraction, cfg.seed)?;
            rows.push(SweepRow {
                snr_db: snr,
                kind,
                accuracy: cm.accuracy(),
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "snr,kind,accuracy,seed")?;
    for r in rows {
        writeln!(w, "{},{},{:.6},{}", r.snr_db, r.kind, r.accuracy, r.seed)?;
    }
    w.flush()?;
    Ok(())
}
