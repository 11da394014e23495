//! Overlapping windows and permutation entropy profiles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::{distribution, normalized_pe};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the window step `(1 − α)·k` is rounded up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CeilingMode {
    /// Ordinary ceiling: `k = 5, α = 0.4` gives step 3 (windows overlap by two).
    #[default]
    Figure,
    /// Smallest integer strictly greater than the input: an integral step
    /// `m` becomes `m + 1`, so `k = 5, α = 0.4` gives step 4.
    StrictFootnote,
}

impl fmt::Display for CeilingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CeilingMode::Figure => "figure",
            CeilingMode::StrictFootnote => "strict-footnote",
        })
    }
}

impl FromStr for CeilingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure" => Ok(CeilingMode::Figure),
            "strict-footnote" | "strict" => Ok(CeilingMode::StrictFootnote),
            other => Err(Error::Config(format!(
                "unknown ceiling mode '{other}' (expected figure or strict-footnote)"
            ))),
        }
    }
}

// (1 - α)k computed in floating point can land a hair off an integer
const INTEGRAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    len: usize,
    overlap: f64,
    ceiling: CeilingMode,
}

impl WindowSpec {
    pub fn new(len: usize, overlap: f64, ceiling: CeilingMode) -> Result<Self> {
        if len == 0 {
            return Err(Error::domain("window length must be at least 1"));
        }
        if !(0.0..1.0).contains(&overlap) {
            return Err(Error::domain(format!(
                "overlap proportion {overlap} outside [0, 1)"
            )));
        }
        Ok(Self {
            len,
            overlap,
            ceiling,
        })
    }

    /// Non-overlapping tiling with windows of length `len`.
    pub fn disjoint(len: usize) -> Result<Self> {
        Self::new(len, 0.0, CeilingMode::Figure)
    }

    /// Window length in samples.
    pub fn window_len(&self) -> usize {
        self.len
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn ceiling(&self) -> CeilingMode {
        self.ceiling
    }

    /// Distance between consecutive window starts, never below 1.
    pub fn step(&self) -> usize {
        let raw = (1.0 - self.overlap) * self.len as f64;
        let nearest = raw.round();
        let integral = (raw - nearest).abs() < INTEGRAL_TOLERANCE;
        let step = match (self.ceiling, integral) {
            (CeilingMode::Figure, true) => nearest,
            (CeilingMode::StrictFootnote, true) => nearest + 1.0,
            (_, false) => raw.ceil(),
        };
        (step as usize).max(1)
    }

    /// 0-based offsets of every full window in a series of length `t`.
    pub fn offsets(&self, t: usize) -> Result<Vec<usize>> {
        if self.len > t {
            return Err(Error::WindowExceedsSeries {
                window: self.len,
                series: t,
            });
        }
        let last = t - self.len;
        Ok((0..=last).step_by(self.step()).collect())
    }

    /// Iterator over the full windows of `x`.
    pub fn windows<'a, T>(&self, x: &'a [T]) -> Result<impl Iterator<Item = &'a [T]> + 'a> {
        let len = self.len;
        Ok(self
            .offsets(x.len())?
            .into_iter()
            .map(move |s| &x[s..s + len]))
    }
}

/// Window start indices `s_1, …, s_ℓ`, **1-based**, for a series of length `t`.
pub fn window_starts(t: usize, spec: &WindowSpec) -> Result<Vec<usize>> {
    Ok(spec.offsets(t)?.into_iter().map(|s| s + 1).collect())
}

/// Normalized permutation entropy of each window, in window order.
pub fn pe_profile<F: Scalar, T: Scalar>(
    x: &[T],
    n: usize,
    tau: usize,
    spec: &WindowSpec,
) -> Result<Vec<F>> {
    if n < 2 {
        return Err(Error::domain(
            "profile uses normalized entropy, which needs n >= 2",
        ));
    }
    if tau == 0 {
        return Err(Error::domain("delay must be at least 1"));
    }
    let required = (n - 1) * tau + 1;
    if spec.window_len() < required {
        return Err(Error::WindowTooShort {
            window: spec.window_len(),
            n,
            tau,
            required,
        });
    }
    spec.windows(x)?
        .map(|w| normalized_pe(&distribution(w, n, tau)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_windows_match_figure() {
        let spec = WindowSpec::new(5, 0.4, CeilingMode::Figure).unwrap();
        assert_eq!(spec.step(), 3);
        assert_eq!(window_starts(14, &spec).unwrap(), vec![1, 4, 7, 10]);
    }

    #[test]
    fn strict_footnote_ceiling() {
        let spec = WindowSpec::new(5, 0.4, CeilingMode::StrictFootnote).unwrap();
        assert_eq!(spec.step(), 4);
        assert_eq!(window_starts(14, &spec).unwrap(), vec![1, 5, 9]);
    }

    #[test]
    fn disjoint_tiling() {
        let spec = WindowSpec::disjoint(4).unwrap();
        assert_eq!(window_starts(12, &spec).unwrap(), vec![1, 5, 9]);
        assert_eq!(window_starts(14, &spec).unwrap(), vec![1, 5, 9]);
    }

    #[test]
    fn non_integral_step_rounds_up_in_both_modes() {
        for mode in [CeilingMode::Figure, CeilingMode::StrictFootnote] {
            let spec = WindowSpec::new(5, 0.5, mode).unwrap();
            assert_eq!(spec.step(), 3);
        }
    }

    #[test]
    fn step_never_stalls() {
        let spec = WindowSpec::new(10, 0.999, CeilingMode::Figure).unwrap();
        assert_eq!(spec.step(), 1);
        let spec = WindowSpec::new(1, 0.0, CeilingMode::Figure).unwrap();
        assert_eq!(window_starts(3, &spec).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn invalid_specs() {
        assert!(WindowSpec::new(0, 0.0, CeilingMode::Figure).is_err());
        assert!(WindowSpec::new(5, 1.0, CeilingMode::Figure).is_err());
        assert!(WindowSpec::new(5, -0.1, CeilingMode::Figure).is_err());
        let spec = WindowSpec::disjoint(20).unwrap();
        assert_eq!(
            window_starts(10, &spec),
            Err(Error::WindowExceedsSeries {
                window: 20,
                series: 10
            })
        );
    }

    #[test]
    fn profile_window_too_short() {
        let x: Vec<f64> = (0..100).map(f64::from).collect();
        let spec = WindowSpec::disjoint(5).unwrap();
        assert_eq!(
            pe_profile::<f64, f64>(&x, 3, 3, &spec),
            Err(Error::WindowTooShort {
                window: 5,
                n: 3,
                tau: 3,
                required: 7
            })
        );
    }

    #[test]
    fn ramp_profile_is_zero() {
        let x: Vec<f64> = (0..200).map(f64::from).collect();
        let spec = WindowSpec::new(40, 0.25, CeilingMode::Figure).unwrap();
        let p: Vec<f64> = pe_profile(&x, 3, 2, &spec).unwrap();
        assert_eq!(p.len(), window_starts(200, &spec).unwrap().len());
        assert!(p.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn ceiling_mode_parses() {
        assert_eq!("figure".parse::<CeilingMode>().unwrap(), CeilingMode::Figure);
        assert_eq!(
            "strict-footnote".parse::<CeilingMode>().unwrap(),
            CeilingMode::StrictFootnote
        );
        assert!("round".parse::<CeilingMode>().is_err());
    }
}
