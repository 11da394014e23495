//! Ordinal patterns and their lexicographic ranking.
//!
//! A pattern is stored as a rank sequence: `symbols[i]` is the rank (1-based)
//! of `x[i]` among the entries of `x`. Equal values are ranked in order of
//! appearance, so `(5, 5, 1)` has pattern `231`.
//!
//! Lexicographic ranks are 1-based (`1..=n!`) to line up with the usual
//! enumeration `π_1, …, π_{n!}`; everything else in this module indexes from 0
//! unless stated otherwise.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported pattern dimension for ranking; `12!` fits easily in a `u64`.
pub const MAX_DIMENSION: usize = 12;

/// `n!` for `n <= 20`.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrdinalPattern {
    symbols: Vec<usize>,
}

impl OrdinalPattern {
    /// Validates that `symbols` is a permutation of `1..=n`.
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        let n = symbols.len();
        if n == 0 {
            return Err(Error::domain("empty permutation"));
        }
        let mut seen = vec![false; n];
        for &s in &symbols {
            if s == 0 || s > n {
                return Err(Error::domain(format!(
                    "symbol {s} out of range 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[s - 1], true) {
                return Err(Error::domain(format!("duplicate symbol {s}")));
            }
        }
        Ok(Self { symbols })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            symbols: (1..=n).collect(),
        }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// 1-based position in the lexicographic enumeration of permutations of `1..=n`.
    pub fn lex_rank(&self) -> Result<u64> {
        lex_rank(&self.symbols)
    }

    /// 0-based indices that sort the originating series ascending.
    pub fn sorting_indices(&self) -> Vec<usize> {
        let mut order = vec![0; self.symbols.len()];
        for (i, &s) in self.symbols.iter().enumerate() {
            order[s - 1] = i;
        }
        order
    }
}

impl fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.symbols.len() > 9 { "," } else { "" };
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

fn check_finite<T: Scalar>(x: &[T]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::domain(format!(
            "non-finite sample {} at index {i}",
            x[i]
        ))),
        None => Ok(()),
    }
}

pub(crate) fn ensure_finite<T: Scalar>(x: &[T]) -> Result<()> {
    check_finite(x)
}

/// Rank sequence of `x`, ties broken by first occurrence.
pub fn pattern<T: Scalar>(x: &[T]) -> Result<OrdinalPattern> {
    if x.is_empty() {
        return Err(Error::domain("cannot take the pattern of an empty sequence"));
    }
    check_finite(x)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    // stable sort keeps equal values in order of appearance
    order.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap_or(Ordering::Equal));
    let mut symbols = vec![0; x.len()];
    for (rank, &i) in order.iter().enumerate() {
        symbols[i] = rank + 1;
    }
    Ok(OrdinalPattern { symbols })
}

/// Lehmer-code rank of a permutation of `1..=n`, 1-based.
pub fn lex_rank(symbols: &[usize]) -> Result<u64> {
    let p = OrdinalPattern::new(symbols.to_vec())?;
    let n = p.len();
    if n > MAX_DIMENSION {
        return Err(Error::domain(format!(
            "dimension {n} exceeds maximum {MAX_DIMENSION}"
        )));
    }
    let mut rank = 0u64;
    for i in 0..n {
        let smaller_after = symbols[i + 1..]
            .iter()
            .filter(|&&s| s < symbols[i])
            .count() as u64;
        rank += smaller_after * factorial(n - 1 - i);
    }
    Ok(rank + 1)
}

/// Inverse of [`lex_rank`]: the `rank`-th (1-based) permutation of `1..=n`.
pub fn lex_unrank(rank: u64, n: usize) -> Result<OrdinalPattern> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::domain(format!(
            "dimension {n} outside 1..={MAX_DIMENSION}"
        )));
    }
    let total = factorial(n);
    if rank == 0 || rank > total {
        return Err(Error::domain(format!("rank {rank} outside 1..={total}")));
    }
    let mut remaining: Vec<usize> = (1..=n).collect();
    let mut r = rank - 1;
    let mut symbols = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        let digit = (r / f) as usize;
        r %= f;
        symbols.push(remaining.remove(digit));
    }
    Ok(OrdinalPattern { symbols })
}

/// Number of start positions for a delayed embedding, or the minimum length if
/// the series is too short.
pub(crate) fn embedding_count(len: usize, n: usize, tau: usize) -> Result<usize> {
    let required = (n - 1) * tau + 1;
    if len < required {
        return Err(Error::SignalTooShort {
            required,
            actual: len,
        });
    }
    Ok(len - required + 1)
}

/// `(x_k, x_{k+τ}, …, x_{k+(n−1)τ})` with `k` **1-based**.
pub fn delayed_subsequence<T: Scalar>(x: &[T], k: usize, n: usize, tau: usize) -> Result<Vec<T>> {
    if n == 0 || tau == 0 {
        return Err(Error::domain("dimension and delay must be at least 1"));
    }
    let count = embedding_count(x.len(), n, tau)?;
    if k == 0 || k > count {
        return Err(Error::SignalTooShort {
            required: (k.max(1) - 1) + (n - 1) * tau + 1,
            actual: x.len(),
        });
    }
    Ok((0..n).map(|j| x[k - 1 + j * tau]).collect())
}

/// 0-based lexicographic index of the pattern of `x[start], x[start+τ], …`.
///
/// Equivalent to `lex_rank(pattern(sub)) - 1` without allocating: under the
/// first-occurrence tie rule a later entry ranks below an earlier one exactly
/// when it is strictly smaller.
#[inline]
pub(crate) fn window_code<T: PartialOrd + Copy>(
    x: &[T],
    start: usize,
    n: usize,
    tau: usize,
    factorials: &[u64],
) -> u64 {
    let mut code = 0u64;
    for i in 0..n {
        let xi = x[start + i * tau];
        let mut smaller = 0u64;
        for j in i + 1..n {
            if x[start + j * tau] < xi {
                smaller += 1;
            }
        }
        code += smaller * factorials[n - 1 - i];
    }
    code
}

pub(crate) fn factorial_table(n: usize) -> Vec<u64> {
    (0..=n).map(factorial).collect()
}
