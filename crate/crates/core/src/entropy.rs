//! Permutation distributions and the entropies derived from them.
//!
//! All logarithms are base 2. Entropy sums are accumulated in `f64` whatever
//! the sample type, then converted to the caller's scalar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{
    embedding_count, ensure_finite, factorial, factorial_table, lex_unrank, window_code,
    OrdinalPattern, MAX_DIMENSION,
};
use crate::scalar::Scalar;

/// Dimensions up to this value keep a dense count array (`7! = 5040` cells).
pub const DENSE_MAX_DIMENSION: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
enum Counts {
    Dense(Vec<u64>),
    /// 0-based lex index -> count, zero counts omitted.
    Sparse(BTreeMap<u64, u64>),
}

/// Pattern counts over all `n!` lexicographic ranks for one `(n, τ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDistribution {
    n: usize,
    tau: usize,
    counts: Counts,
    total: u64,
}

impl PatternDistribution {
    fn empty(n: usize, tau: usize) -> Self {
        let counts = if n <= DENSE_MAX_DIMENSION {
            Counts::Dense(vec![0; factorial(n) as usize])
        } else {
            Counts::Sparse(BTreeMap::new())
        };
        Self {
            n,
            tau,
            counts,
            total: 0,
        }
    }

    fn bump(&mut self, code: u64) {
        match &mut self.counts {
            Counts::Dense(v) => v[code as usize] += 1,
            Counts::Sparse(m) => *m.entry(code).or_insert(0) += 1,
        }
        self.total += 1;
    }

    /// Builds a distribution from a dense count array indexed by lex rank − 1.
    pub fn from_counts(n: usize, tau: usize, counts: &[u64]) -> Result<Self> {
        check_dimension(n)?;
        let expected = factorial(n) as usize;
        if counts.len() != expected {
            return Err(Error::domain(format!(
                "expected {expected} counts for n={n}, got {}",
                counts.len()
            )));
        }
        let mut d = Self::empty(n, tau);
        for (code, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            match &mut d.counts {
                Counts::Dense(v) => v[code] = c,
                Counts::Sparse(m) => {
                    m.insert(code as u64, c);
                }
            }
            d.total += c;
        }
        if d.total == 0 {
            return Err(Error::domain("distribution has no observations"));
        }
        Ok(d)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn delay(&self) -> usize {
        self.tau
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.counts, Counts::Sparse(_))
    }

    /// Count for the 1-based lexicographic `rank`.
    pub fn count(&self, rank: u64) -> u64 {
        if rank == 0 {
            return 0;
        }
        match &self.counts {
            Counts::Dense(v) => v.get(rank as usize - 1).copied().unwrap_or(0),
            Counts::Sparse(m) => m.get(&(rank - 1)).copied().unwrap_or(0),
        }
    }

    /// Dense counts over all `n!` ranks in lexicographic order.
    pub fn counts(&self) -> Vec<u64> {
        match &self.counts {
            Counts::Dense(v) => v.clone(),
            Counts::Sparse(m) => {
                let mut v = vec![0; factorial(self.n) as usize];
                for (&code, &c) in m {
                    v[code as usize] = c;
                }
                v
            }
        }
    }

    /// `(rank, count)` for every pattern that occurs, ranks 1-based and ascending.
    pub fn occupied(&self) -> Vec<(u64, u64)> {
        match &self.counts {
            Counts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i as u64 + 1, c))
                .collect(),
            Counts::Sparse(m) => m.iter().map(|(&k, &c)| (k + 1, c)).collect(),
        }
    }

    /// Occurring patterns with their counts, for labelled histograms.
    pub fn histogram(&self) -> Vec<(OrdinalPattern, u64)> {
        self.occupied()
            .into_iter()
            .map(|(r, c)| (lex_unrank(r, self.n).expect("rank within n!"), c))
            .collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total as f64;
        self.counts().iter().map(|&c| c as f64 / total).collect()
    }

    pub fn is_uniform(&self) -> bool {
        let patterns = factorial(self.n);
        if !self.total.is_multiple_of(patterns) {
            return false;
        }
        let each = self.total / patterns;
        let occupied = self.occupied();
        occupied.len() as u64 == patterns && occupied.iter().all(|&(_, c)| c == each)
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::domain(format!(
            "dimension {n} outside 1..={MAX_DIMENSION}"
        )));
    }
    Ok(())
}

fn check_delay(tau: usize) -> Result<()> {
    if tau == 0 {
        return Err(Error::domain("delay must be at least 1"));
    }
    Ok(())
}

/// Counts the pattern of every delayed subsequence `A^k_{n,τ}(x)`.
pub fn distribution<T: Scalar>(x: &[T], n: usize, tau: usize) -> Result<PatternDistribution> {
    check_dimension(n)?;
    check_delay(tau)?;
    let windows = embedding_count(x.len(), n, tau)?;
    ensure_finite(x)?;
    Ok(count_patterns(x, n, tau, windows))
}

fn count_patterns<T: Scalar>(x: &[T], n: usize, tau: usize, windows: usize) -> PatternDistribution {
    let f = factorial_table(n);
    let mut d = PatternDistribution::empty(n, tau);
    for start in 0..windows {
        d.bump(window_code(x, start, n, tau, &f));
    }
    d
}

fn entropy_bits(d: &PatternDistribution) -> f64 {
    let total = d.total as f64;
    d.occupied()
        .iter()
        .map(|&(_, c)| {
            let p = c as f64 / total;
            p * (total / c as f64).log2()
        })
        .sum()
}

/// `log2(n!)`, the entropy of the uniform distribution over `n!` patterns.
pub fn max_entropy(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

/// Shannon entropy of the pattern distribution in bits (`0·log 0 = 0`).
pub fn permutation_entropy<F: Scalar>(d: &PatternDistribution) -> F {
    F::of(entropy_bits(d))
}

/// Permutation entropy divided by `log2(n!)`; requires `n >= 2`.
pub fn normalized_pe<F: Scalar>(d: &PatternDistribution) -> Result<F> {
    if d.n < 2 {
        return Err(Error::domain(
            "normalized entropy undefined for n = 1 (log2 1! = 0)",
        ));
    }
    let h = entropy_bits(d) / max_entropy(d.n);
    Ok(F::of(h.clamp(0.0, 1.0)))
}

/// Entropy of `x` at one `(n, τ)`, raw or normalized.
pub fn entropy_at<F: Scalar, T: Scalar>(x: &[T], n: usize, tau: usize, normalized: bool) -> Result<F> {
    let d = distribution(x, n, tau)?;
    if normalized {
        normalized_pe(&d)
    } else {
        Ok(permutation_entropy(&d))
    }
}

/// Entropy values over a dimension × delay grid, stored row-major
/// (rows = dimensions, columns = delays).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspeMatrix<F> {
    dims: Vec<usize>,
    delays: Vec<usize>,
    values: Vec<F>,
    normalized: bool,
}

impl<F: Scalar> MspeMatrix<F> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.dims.len(), self.delays.len())
    }

    /// Cell at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> F {
        self.values[row * self.delays.len() + col]
    }

    /// Cell for a specific `(n, τ)` if present in the grid.
    pub fn at(&self, n: usize, tau: usize) -> Option<F> {
        let r = self.dims.iter().position(|&d| d == n)?;
        let c = self.delays.iter().position(|&d| d == tau)?;
        Some(self.get(r, c))
    }

    pub fn row(&self, row: usize) -> &[F] {
        let w = self.delays.len();
        &self.values[row * w..(row + 1) * w]
    }

    /// Row-major flattening: `n`-major, `τ` within each row.
    pub fn as_flat(&self) -> &[F] {
        &self.values
    }

    pub fn into_flat(self) -> Vec<F> {
        self.values
    }
}

/// Validates an `(n, τ)` grid. `min_dim` is 2 when normalized entropies are requested.
pub fn validate_grid(dims: &[usize], delays: &[usize], min_dim: usize) -> Result<()> {
    if dims.is_empty() || delays.is_empty() {
        return Err(Error::domain("dimension and delay lists must be non-empty"));
    }
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("dimensions must be strictly increasing"));
    }
    if delays.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("delays must be strictly increasing"));
    }
    for &n in dims {
        check_dimension(n)?;
        if n < min_dim {
            return Err(Error::domain(format!(
                "dimension {n} below minimum {min_dim} for normalized entropy"
            )));
        }
    }
    check_delay(delays[0])
}

/// Minimum series length for which every cell of the grid is defined.
pub fn grid_min_length(dims: &[usize], delays: &[usize]) -> usize {
    let n = dims.iter().copied().max().unwrap_or(1);
    let tau = delays.iter().copied().max().unwrap_or(1);
    (n.saturating_sub(1)) * tau + 1
}

fn check_grid_feasible(len: usize, dims: &[usize], delays: &[usize]) -> Result<()> {
    for &n in dims {
        for &tau in delays {
            let required = (n - 1) * tau + 1;
            if len < required {
                return Err(Error::InfeasibleCell {
                    n,
                    tau,
                    required,
                    actual: len,
                });
            }
        }
    }
    Ok(())
}

/// Multi-scale permutation entropy matrix of `x`.
pub fn mspe<F: Scalar, T: Scalar>(
    x: &[T],
    dims: &[usize],
    delays: &[usize],
    normalized: bool,
) -> Result<MspeMatrix<F>> {
    validate_grid(dims, delays, if normalized { 2 } else { 1 })?;
    check_grid_feasible(x.len(), dims, delays)?;
    ensure_finite(x)?;
    let mut values = Vec::with_capacity(dims.len() * delays.len());
    for &n in dims {
        for &tau in delays {
            let windows = x.len() - (n - 1) * tau;
            let d = count_patterns(x, n, tau, windows);
            let h = entropy_bits(&d);
            values.push(F::of(if normalized {
                (h / max_entropy(n)).clamp(0.0, 1.0)
            } else {
                h
            }));
        }
    }
    Ok(MspeMatrix {
        dims: dims.to_vec(),
        delays: delays.to_vec(),
        values,
        normalized,
    })
}

/// Grid cells split by whether their normalized entropy reaches `1 − ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult<F> {
    /// Pairs `(n, τ)` with normalized entropy `>= 1 − ε`.
    pub near_uniform: Vec<(usize, usize)>,
    /// Pairs with normalized entropy `< 1 − ε`.
    pub structured: Vec<(usize, usize)>,
    /// Minimizing pair and its value; ties go to the smallest `n`, then `τ`.
    pub argmin: (usize, usize),
    pub min_value: F,
    pub matrix: MspeMatrix<F>,
}

pub fn scan<F: Scalar, T: Scalar>(
    x: &[T],
    dims: &[usize],
    delays: &[usize],
    eps: f64,
) -> Result<ScanResult<F>> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain(format!("epsilon {eps} must be finite and >= 0")));
    }
    let matrix: MspeMatrix<F> = mspe(x, dims, delays, true)?;
    let threshold = 1.0 - eps;
    let mut near_uniform = Vec::new();
    let mut structured = Vec::new();
    let mut argmin = (dims[0], delays[0]);
    let mut min_value = matrix.get(0, 0);
    // dims and delays are strictly increasing, so row-major order visits
    // smaller n first and smaller τ first within a row
    for (r, &n) in dims.iter().enumerate() {
        for (c, &tau) in delays.iter().enumerate() {
            let h = matrix.get(r, c);
            if h.to_f64_lossy() >= threshold {
                near_uniform.push((n, tau));
            } else {
                structured.push((n, tau));
            }
            if h < min_value {
                min_value = h;
                argmin = (n, tau);
            }
        }
    }
    Ok(ScanResult {
        near_uniform,
        structured,
        argmin,
        min_value,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SERIES: [f64; 7] = [4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0];

    #[test]
    fn distribution_of_short_series() {
        let d = distribution(&SERIES, 3, 1).unwrap();
        assert_eq!(d.counts(), vec![2, 0, 1, 2, 0, 0]);
        assert_eq!(d.total(), 5);
    }

    #[test]
    fn distribution_of_ramp() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let d = distribution(&x, 3, 1).unwrap();
        assert_eq!(d.counts(), vec![8, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn nine_samples_give_five_patterns() {
        let x = [0.1, 0.5, -0.2, 0.9, 0.3, 0.4, 0.8, -0.1, 0.0];
        assert_eq!(distribution(&x, 3, 2).unwrap().total(), 5);
    }

    #[test]
    fn too_short_reports_minimum() {
        assert_eq!(
            distribution(&[1.0, 2.0, 3.0], 3, 2),
            Err(Error::SignalTooShort {
                required: 5,
                actual: 3
            })
        );
        assert!(distribution(&[1.0, 2.0], 0, 1).is_err());
        assert!(distribution(&[1.0, 2.0], 1, 0).is_err());
        assert!(distribution(&[1.0, f64::NAN, 2.0], 2, 1).is_err());
    }

    #[test]
    fn worked_example_entropy() {
        let d = PatternDistribution::from_counts(3, 2, &[1, 0, 1, 2, 1, 0]).unwrap();
        let h: f64 = permutation_entropy(&d);
        assert_abs_diff_eq!(h, 1.922, epsilon = 1e-3);
        let nh: f64 = normalized_pe(&d).unwrap();
        assert_abs_diff_eq!(nh, 0.744, epsilon = 1e-3);
    }

    #[test]
    fn uniform_and_degenerate() {
        let u = PatternDistribution::from_counts(3, 1, &[3; 6]).unwrap();
        assert_abs_diff_eq!(permutation_entropy::<f64>(&u), 6f64.log2(), epsilon = 1e-12);
        assert_eq!(normalized_pe::<f64>(&u).unwrap(), 1.0);
        assert!(u.is_uniform());
        let single = PatternDistribution::from_counts(3, 1, &[0, 0, 9, 0, 0, 0]).unwrap();
        assert_eq!(permutation_entropy::<f64>(&single), 0.0);
        assert!(!single.is_uniform());
    }

    #[test]
    fn normalized_requires_n_at_least_two() {
        let d = PatternDistribution::from_counts(1, 1, &[4]).unwrap();
        assert!(matches!(normalized_pe::<f64>(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn mspe_short_series_value() {
        let m: MspeMatrix<f64> = mspe(&SERIES, &[3], &[1], false).unwrap();
        let expect = -2.0 * 0.4 * 0.4f64.log2() - 0.2 * 0.2f64.log2();
        assert_abs_diff_eq!(m.get(0, 0), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(0, 0), 1.522, epsilon = 1e-3);
    }

    #[test]
    fn mspe_layout_rows_are_dimensions() {
        let x = [0.1, 0.5, -0.2, 0.9, 0.3, 0.4, 0.8, -0.1, 0.0];
        let m: MspeMatrix<f64> = mspe(&x, &[2, 3], &[1, 2], false).unwrap();
        assert_eq!(m.shape(), (2, 2));
        let h32: f64 = permutation_entropy(&distribution(&x, 3, 2).unwrap());
        assert_eq!(m.get(1, 1), h32);
        assert_eq!(m.at(3, 2), Some(h32));
        let h21: f64 = permutation_entropy(&distribution(&x, 2, 1).unwrap());
        assert_eq!(m.get(0, 0), h21);
    }

    #[test]
    fn mspe_monotone_is_zero() {
        let x: Vec<f64> = (1..=100).map(f64::from).collect();
        let m: MspeMatrix<f64> = mspe(&x, &[2, 3], &[1, 2], false).unwrap();
        assert!(m.as_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mspe_names_infeasible_cell() {
        let x = [1.0; 6];
        let err = mspe::<f64, f64>(&x, &[2, 3], &[1, 3], false).unwrap_err();
        assert_eq!(
            err,
            Error::InfeasibleCell {
                n: 3,
                tau: 3,
                required: 7,
                actual: 6
            }
        );
        assert!(mspe::<f64, f64>(&x, &[3, 2], &[1], false).is_err());
        assert!(mspe::<f64, f64>(&x, &[], &[1], false).is_err());
        assert!(mspe::<f64, f64>(&x, &[1, 2], &[1], true).is_err());
    }

    #[test]
    fn scan_on_monotone() {
        let x: Vec<f64> = (0..50).map(f64::from).collect();
        let s: ScanResult<f64> = scan(&x, &[2, 3, 4], &[1, 2], 0.01).unwrap();
        assert!(s.near_uniform.is_empty());
        assert_eq!(s.structured.len(), 6);
        assert_eq!(s.argmin, (2, 1));
        assert_eq!(s.min_value, 0.0);
    }

    #[test]
    fn scan_on_sinusoid_is_structured() {
        let x: Vec<f64> = (0..2048)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / 32.0).sin())
            .collect();
        let s: ScanResult<f64> = scan(&x, &[3], &[1], 0.01).unwrap();
        assert_eq!(s.structured, vec![(3, 1)]);
        // only the two monotone runs and the four turning patterns can appear
        let d = distribution(&x, 3, 1).unwrap();
        assert!(d.occupied().len() <= 6);
        assert!(s.min_value < 0.99);
    }

    #[test]
    fn sparse_counts_for_large_dimension() {
        let x: Vec<f64> = (0..40).map(|i| ((i * 7919) % 31) as f64).collect();
        let d = distribution(&x, 8, 1).unwrap();
        assert!(d.is_sparse());
        assert_eq!(d.total(), 33);
        assert_eq!(d.counts().iter().sum::<u64>(), 33);
        assert_eq!(d.counts().len(), 40320);
        let dense = distribution(&x, 7, 1).unwrap();
        assert!(!dense.is_sparse());
    }

    #[test]
    fn histogram_labels() {
        let d = distribution(&SERIES, 3, 1).unwrap();
        let labels: Vec<(String, u64)> = d
            .histogram()
            .into_iter()
            .map(|(p, c)| (p.to_string(), c))
            .collect();
        assert_eq!(
            labels,
            vec![("123".into(), 2), ("213".into(), 1), ("231".into(), 2)]
        );
    }

    #[test]
    fn f32_output() {
        let d = PatternDistribution::from_counts(3, 2, &[1, 0, 1, 2, 1, 0]).unwrap();
        let h: f32 = permutation_entropy(&d);
        assert!((h - 1.922).abs() < 1e-3);
    }
}
