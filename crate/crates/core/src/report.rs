//! Plot-ready CSV emitters and their parsers.
//!
//! Every float is written with 17 significant digits, so re-parsing a file
//! reproduces the in-memory values bit for bit.

use crate::diagnostics::FrontTrace;
use crate::error::{Error, Result};
use crate::selfsim::Slope;
use crate::solver1d::Trajectory;
use std::io::{BufRead, Write};

/// Shortest representation that still round-trips: 17 significant digits.
pub fn format_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: bad float {token:?}: {e}")))
}

/// Snapshot table `t,x,v`: one row per cell per recorded time.
pub fn write_snapshots_csv<W: Write>(out: &mut W, traj: &Trajectory) -> Result<()> {
    writeln!(out, "t,x,v")?;
    let xs = traj.grid.cell_centers();
    for snap in &traj.snapshots {
        for (x, v) in xs.iter().zip(&snap.values) {
            writeln!(
                out,
                "{},{},{}",
                format_full(snap.t),
                format_full(*x),
                format_full(*v)
            )?;
        }
    }
    Ok(())
}

/// Parse rows of a `t,x,v` table back into (t, x, v) triples.
pub fn read_snapshots_csv<R: BufRead>(input: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != "t,x,v" {
                return Err(Error::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut next = || {
            fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing field", idx + 1)))
        };
        let t = parse_f64(next()?, idx + 1)?;
        let x = parse_f64(next()?, idx + 1)?;
        let v = parse_f64(next()?, idx + 1)?;
        rows.push((t, x, v));
    }
    Ok(rows)
}

/// Front trace table `t,x_front`.
pub fn write_front_csv<W: Write>(out: &mut W, trace: &FrontTrace) -> Result<()> {
    writeln!(out, "t,x_front")?;
    for (t, x) in trace.times.iter().zip(&trace.x_front) {
        writeln!(out, "{},{}", format_full(*t), format_full(*x))?;
    }
    Ok(())
}

/// Parse a `t,x_front` table back into a [`FrontTrace`] (threshold unknown to
/// the file format; the caller records it separately).
pub fn read_front_csv<R: BufRead>(input: R, threshold: f64) -> Result<FrontTrace> {
    let mut times = Vec::new();
    let mut x_front = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != "t,x_front" {
                return Err(Error::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t = parse_f64(
            fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing t", idx + 1)))?,
            idx + 1,
        )?;
        let x = parse_f64(
            fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing x_front", idx + 1)))?,
            idx + 1,
        )?;
        times.push(t);
        x_front.push(x);
    }
    Ok(FrontTrace {
        times,
        x_front,
        threshold,
    })
}

/// Profile table `xi,f,fprime`. A singular front slope is written as a
/// signed infinity (`-inf` at xi = 1, `inf` at xi = -1), which Rust's float
/// parser reads back.
pub fn write_profile_csv<W: Write>(out: &mut W, rows: &[(f64, f64, Slope)]) -> Result<()> {
    writeln!(out, "xi,f,fprime")?;
    for (xi, f, slope) in rows {
        let fp = match slope {
            Slope::Finite(v) => format_full(*v),
            Slope::SingularAtFront => {
                if *xi >= 0.0 {
                    "-inf".to_string()
                } else {
                    "inf".to_string()
                }
            }
        };
        writeln!(out, "{},{},{}", format_full(*xi), format_full(*f), fp)?;
    }
    Ok(())
}

/// Log-log front table ready for plotting: the detected front, its base-10
/// logs, the fitted line and the theoretical line of slope `nu` fitted to
/// the same window.
pub fn write_front_loglog_csv<W: Write>(
    out: &mut W,
    trace: &FrontTrace,
    fitted_slope: f64,
    fitted_intercept: f64,
    nu: f64,
    nu_intercept: f64,
) -> Result<()> {
    writeln!(
        out,
        "t,x_front,log10_t,log10_x_front,log10_fit,log10_theory"
    )?;
    let ln10 = std::f64::consts::LN_10;
    for (&t, &x) in trace.times.iter().zip(&trace.x_front) {
        if !(t > 0.0 && x > 0.0) {
            continue;
        }
        let log_t = t.ln();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_full(t),
            format_full(x),
            format_full(log_t / ln10),
            format_full(x.ln() / ln10),
            format_full((fitted_intercept + fitted_slope * log_t) / ln10),
            format_full((nu_intercept + nu * log_t) / ln10),
        )?;
    }
    Ok(())
}
