//! Snapshot (binary and CSV), trajectory and moment exports.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::analysis::{Fwhm, MomentRecord};
use crate::bohm::{TrajectoryBundle, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::propagator::{SpatialGrid, WaveField};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"BUPS";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Shortest round-trip decimal, `nan` for NaN.
pub(crate) fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Little-endian BUPS snapshot: header then N (re, im) pairs.
pub fn write_snapshot<W: Write>(out: &mut W, field: &WaveField) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(32 + 16 * grid.count());
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.count() as u64).to_le_bytes());
    buf.extend_from_slice(&grid.length().to_le_bytes());
    buf.extend_from_slice(&field.time().to_le_bytes());
    for z in field.amplitudes() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(input: &mut R) -> Result<WaveField> {
    let mut header = [0u8; 32];
    input.read_exact(&mut header)?;
    if &header[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::Format("missing BUPS magic".into()));
    }
    let word = |r: std::ops::Range<usize>| -> [u8; 8] { header[r].try_into().unwrap() };
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let n = u64::from_le_bytes(word(8..16));
    let length = f64::from_le_bytes(word(16..24));
    let time = f64::from_le_bytes(word(24..32));
    let n = usize::try_from(n).map_err(|_| Error::Format("sample count overflows".into()))?;
    let grid = Arc::new(SpatialGrid::new(length, n)?);
    let mut body = vec![0u8; 16 * n];
    input.read_exact(&mut body)?;
    let amplitudes = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(WaveField::new(grid, time, amplitudes))
}

/// `x,re,im,density`
pub fn field_csv(field: &WaveField) -> String {
    let mut s = String::from("x,re,im,density\n");
    for (x, z) in field.grid().coords().iter().zip(field.amplitudes()) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(*x),
            num(z.re),
            num(z.im),
            num(z.norm_sqr())
        );
    }
    s
}

/// `t,x_1,...,x_M`, one row per stored time.
pub fn trajectories_csv(bundle: &TrajectoryBundle) -> String {
    let mut s = String::from("t");
    for i in 1..=bundle.len() {
        let _ = write!(s, ",x_{i}");
    }
    s.push('\n');
    for (k, t) in bundle.times.iter().enumerate() {
        s.push_str(&num(*t));
        for p in &bundle.positions {
            s.push(',');
            s.push_str(&num(p[k]));
        }
        s.push('\n');
    }
    s
}

/// `trajectory,first_flag_time,flag_type`; trajectories are numbered from 1
/// to match the columns of the trajectory CSV.
pub fn flags_csv(bundle: &TrajectoryBundle) -> String {
    let mut s = String::from("trajectory,first_flag_time,flag_type\n");
    for (i, f) in bundle.flags.iter().enumerate() {
        let (time, kind) = match f.status() {
            TrajectoryStatus::Ok => (f64::NAN, "ok"),
            TrajectoryStatus::NodeRegularized => {
                (f.first_node_time.unwrap_or(f64::NAN), "node-regularized")
            }
            TrajectoryStatus::LeftDomain => (
                f.first_node_time
                    .into_iter()
                    .chain(f.left_domain_time)
                    .fold(f64::INFINITY, f64::min),
                "left-domain",
            ),
        };
        let _ = writeln!(s, "{},{},{}", i + 1, num(time), kind);
    }
    s
}

pub const MOMENTS_HEADER: &str =
    "t,norm,mean,second_moment,peak_density,peak_position,x_minus,x_plus,fwhm";

pub fn moments_row(m: &MomentRecord, w: Option<Fwhm>) -> String {
    let (lo, hi, width) = w.map_or((f64::NAN, f64::NAN, f64::NAN), |f| {
        (f.x_minus, f.x_plus, f.width())
    });
    [
        m.time,
        m.norm,
        m.mean,
        m.second_moment,
        m.peak_density,
        m.peak_position,
        lo,
        hi,
        width,
    ]
    .iter()
    .map(|v| num(*v))
    .collect::<Vec<_>>()
    .join(",")
}

pub fn moments_csv(records: &[MomentRecord], widths: &[Option<Fwhm>]) -> String {
    let mut s = format!("{MOMENTS_HEADER}\n");
    for (m, w) in records.iter().zip(widths) {
        s.push_str(&moments_row(m, *w));
        s.push('\n');
    }
    s
}
