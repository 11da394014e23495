//! On-disk dataset formats.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes  b"PEDS"
//! version      u16      1
//! t            u32      samples per signal
//! n_schemes    u16
//!   name_len   u8       } repeated n_schemes times
//!   name       utf-8    }
//! snr_flag     u8       0 = clean, 1 = snr_db follows
//! snr_db       f64      present only when snr_flag = 1
//! seed         u64
//! count        u32      number of records
//!   label      u16      } repeated count times
//!   seed       u64      }
//!   samples    t × f64  }
//! ```
//!
//! The CSV export has no header; each row is the scheme name followed by the
//! `t` samples.

use std::io::{BufRead, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::synth::{Dataset, LabeledSignal, Scheme};

pub const MAGIC: &[u8; 4] = b"PEDS";
pub const FORMAT_VERSION: u16 = 1;

pub fn write_dataset<W: Write>(mut w: W, ds: &Dataset) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u16::<LittleEndian>(FORMAT_VERSION)?;
    w.write_u32::<LittleEndian>(to_u32(ds.t, "signal length")?)?;
    w.write_u16::<LittleEndian>(ds.schemes.len() as u16)?;
    for s in &ds.schemes {
        let name = s.name().as_bytes();
        w.write_u8(name.len() as u8)?;
        w.write_all(name)?;
    }
    match ds.snr_db {
        Some(snr) => {
            w.write_u8(1)?;
            w.write_f64::<LittleEndian>(snr)?;
        }
        None => w.write_u8(0)?,
    }
    w.write_u64::<LittleEndian>(ds.seed)?;
    w.write_u32::<LittleEndian>(to_u32(ds.signals.len(), "record count")?)?;
    for sig in &ds.signals {
        if sig.samples.len() != ds.t {
            return Err(Error::Format(format!(
                "record has {} samples, header says {}",
                sig.samples.len(),
                ds.t
            )));
        }
        w.write_u16::<LittleEndian>(sig.label as u16)?;
        w.write_u64::<LittleEndian>(sig.seed)?;
        for &v in &sig.samples {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit in u32")))
}

pub fn read_dataset<R: Read>(mut r: R) -> Result<Dataset> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a dataset file (bad magic)".into()));
    }
    let version = r.read_u16::<LittleEndian>()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let t = r.read_u32::<LittleEndian>()? as usize;
    let n_schemes = r.read_u16::<LittleEndian>()? as usize;
    let mut schemes = Vec::with_capacity(n_schemes);
    for _ in 0..n_schemes {
        let len = r.read_u8()? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        let name = String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))?;
        schemes.push(name.parse::<Scheme>()?);
    }
    let snr_db = match r.read_u8()? {
        0 => None,
        1 => Some(r.read_f64::<LittleEndian>()?),
        f => return Err(Error::Format(format!("bad SNR flag {f}"))),
    };
    let seed = r.read_u64::<LittleEndian>()?;
    let count = r.read_u32::<LittleEndian>()? as usize;
    let mut signals = Vec::with_capacity(count);
    for _ in 0..count {
        let label = r.read_u16::<LittleEndian>()? as usize;
        if label >= schemes.len() {
            return Err(Error::Format(format!("label {label} out of range")));
        }
        let sig_seed = r.read_u64::<LittleEndian>()?;
        let mut samples = vec![0f64; t];
        r.read_f64_into::<LittleEndian>(&mut samples)?;
        signals.push(LabeledSignal {
            samples,
            label,
            snr_db,
            seed: sig_seed,
        });
    }
    Ok(Dataset {
        t,
        schemes,
        snr_db,
        seed,
        signals,
    })
}

pub fn write_dataset_csv<W: Write>(mut w: W, ds: &Dataset) -> Result<()> {
    for sig in &ds.signals {
        write!(w, "{}", ds.schemes[sig.label])?;
        for v in &sig.samples {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// `(scheme, samples)` rows from the CSV export.
pub fn read_dataset_csv<R: BufRead>(r: R) -> Result<Vec<(Scheme, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let scheme: Scheme = fields.next().unwrap_or_default().trim().parse()?;
        let samples = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| {
                    Error::Format(format!("line {}: bad sample '{f}': {e}", lineno + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((scheme, samples));
    }
    Ok(rows)
}
