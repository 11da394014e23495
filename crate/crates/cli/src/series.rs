//! Plain-text series files: one sample per line, or comma-separated on a
//! single line. Blank lines and `#` comments are skipped.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use pentropy::{Error, Result};

pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| {
                Error::Format(format!("line {}: '{tok}' is not a number", lineno + 1))
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

/// Reads a series from `path`, or standard input when `path` is `-`.
pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
    };
    parse_series(&text)
}

pub fn format_series(x: &[f64]) -> String {
    let mut s = String::with_capacity(x.len() * 12);
    for v in x {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_layouts_parse() {
        assert_eq!(parse_series("1\n2.5\n-3\n").unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(parse_series("1, 2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(parse_series("# header\n\n4e-1\n").unwrap(), vec![0.4]);
    }

    #[test]
    fn round_trip() {
        let x = vec![0.1, -2.0, 1e-300, 2.718281828459045e10];
        assert_eq!(parse_series(&format_series(&x)).unwrap(), x);
        let joined: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        assert_eq!(parse_series(&joined.join(",")).unwrap(), x);
    }

    #[test]
    fn bad_token_names_line() {
        let err = parse_series("1\n2\nabc\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}
