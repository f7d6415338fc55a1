use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gevrey_flow::dynamics::SimOutput;
use gevrey_flow::stochastic::BrownianPath;
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Writes `t, W, <one column per norm>` at the snapshot times.
pub fn write_series_csv(path: &Path, out: &SimOutput, brownian: &BrownianPath) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| CliError::Io { path: path.display().to_string(), source: e.into() };
    let mut header = vec!["t".to_string(), "W".to_string()];
    header.extend(out.series.iter().map(|s| s.label.clone()));
    w.write_record(&header).map_err(csv_err)?;
    for (i, snap) in out.snapshots.iter().enumerate() {
        let mut row = vec![snap.t.to_string(), brownian.value_at(snap.t)?.to_string()];
        for s in &out.series {
            row.push(s.values.get(i).map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// One record of a binary field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRecord {
    pub d: u32,
    pub cutoff: u32,
    pub t: f64,
    /// Brownian value `W(t)`.
    pub w: f64,
    /// Coefficients in row-major mode order.
    pub coeffs: Vec<Complex64>,
}

impl FieldRecord {
    fn mode_count(d: u32, cutoff: u32) -> usize {
        (2 * cutoff as usize + 1).pow(d)
    }

    /// Little-endian: `d: u32, K: u32, t: f64, W: f64`, then `re, im` as `f64` per mode.
    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        out.write_all(&self.d.to_le_bytes())?;
        out.write_all(&self.cutoff.to_le_bytes())?;
        out.write_all(&self.t.to_le_bytes())?;
        out.write_all(&self.w.to_le_bytes())?;
        for c in &self.coeffs {
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Parses a concatenation of records.
pub fn read_field_dump(bytes: &[u8]) -> Result<Vec<FieldRecord>, String> {
    fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Result<&'a [u8], String> {
        if bytes.len() < n {
            return Err(format!("truncated record: need {n} bytes, {} left", bytes.len()));
        }
        let (head, tail) = bytes.split_at(n);
        *bytes = tail;
        Ok(head)
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());
    let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    let mut rest = bytes;
    let mut records = Vec::new();
    while !rest.is_empty() {
        let d = u32_at(take(&mut rest, 4)?);
        let cutoff = u32_at(take(&mut rest, 4)?);
        if !(d == 1 || d == 2) {
            return Err(format!("bad dimension {d}"));
        }
        let t = f64_at(take(&mut rest, 8)?);
        let w = f64_at(take(&mut rest, 8)?);
        let n = FieldRecord::mode_count(d, cutoff);
        let body = take(&mut rest, 16 * n)?;
        let coeffs = body.chunks_exact(16).map(|c| Complex64::new(f64_at(&c[..8]), f64_at(&c[8..]))).collect();
        records.push(FieldRecord { d, cutoff, t, w, coeffs });
    }
    Ok(records)
}

/// Dumps every `stride`-th snapshot of a run.
pub fn write_field_dump(path: &Path, out: &SimOutput, brownian: &BrownianPath, stride: usize) -> Result<usize, CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut count = 0;
    for snap in out.snapshots.iter().step_by(stride.max(1)) {
        let lat = snap.rho.lattice();
        let rec = FieldRecord {
            d: lat.dim() as u32,
            cutoff: lat.cutoff() as u32,
            t: snap.t,
            w: brownian.value_at(snap.t)?,
            coeffs: snap.rho.coeffs().to_vec(),
        };
        rec.write_to(&mut w).map_err(io_err(path))?;
        count += 1;
    }
    w.flush().map_err(io_err(path))?;
    Ok(count)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}
