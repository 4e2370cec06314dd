//! CSV emission and parsing. Floats use the shortest representation that
//! parses back to the same value.

use std::path::Path;

use super::record::{PairedDifference, StepLog, TransientRecord};
use crate::error::{Error, Result};
use crate::model::StateVector;
use crate::solver::Device;

pub const TRANSIENT_HEADER: [&str; 2] = ["t_s", "J_A_per_m2"];
pub const FIELDS_HEADER: [&str; 6] = ["x_m", "phi_V", "n_per_m3", "p_per_m3", "X_per_m3", "E_V_per_m"];
pub const RUNLOG_HEADER: [&str; 6] = ["step", "t", "dt", "order", "newton_iters", "damping_min"];

fn io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn f(v: f64) -> String {
    format!("{v:e}")
}

fn write_rows(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns of a numeric CSV file and its header.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let header: Vec<String> = r.headers().map_err(io)?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(io)?;
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("{}: row {}: `{field}` is not a number", path.display(), line + 1)))?;
            cols[k].push(v);
        }
    }
    Ok((header, cols))
}

fn expect_header(path: &Path, got: &[String], want: &[&str]) -> Result<()> {
    if got.iter().map(String::as_str).ne(want.iter().copied()) {
        return Err(Error::Parse(format!("{}: unexpected header {:?}", path.display(), got)));
    }
    Ok(())
}

pub fn write_transient(path: &Path, t: &[f64], j: &[f64]) -> Result<()> {
    let header: Vec<String> = TRANSIENT_HEADER.iter().map(|s| s.to_string()).collect();
    write_rows(path, &header, t.iter().zip(j).map(|(t, j)| vec![f(*t), f(*j)]))
}

pub fn read_transient(path: &Path) -> Result<TransientRecord> {
    let (header, mut cols) = read_columns(path)?;
    expect_header(path, &header, &TRANSIENT_HEADER)?;
    let j = cols.pop().expect("two columns");
    let t = cols.pop().expect("two columns");
    Ok(TransientRecord {
        t,
        j,
        ..Default::default()
    })
}

/// Signed nodal field `-phi'` (central inside, one-sided at the ends).
pub fn signed_field(device: &Device, phi: &[f64]) -> Vec<f64> {
    let x = device.mesh.nodes();
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            -(phi[b] - phi[a]) / (x[b] - x[a])
        })
        .collect()
}

pub fn write_fields(path: &Path, device: &Device, s: &StateVector) -> Result<()> {
    let e = signed_field(device, &s.phi);
    let header: Vec<String> = FIELDS_HEADER.iter().map(|s| s.to_string()).collect();
    let x = device.mesh.nodes();
    write_rows(
        path,
        &header,
        (0..x.len()).map(|i| vec![f(x[i]), f(s.phi[i]), f(s.n[i]), f(s.p[i]), f(s.x[i]), f(e[i])]),
    )
}

/// Nodes and state from a fields file; the last column is the field.
pub fn read_fields(path: &Path) -> Result<(Vec<f64>, StateVector, Vec<f64>)> {
    let (header, cols) = read_columns(path)?;
    expect_header(path, &header, &FIELDS_HEADER)?;
    let s = StateVector {
        phi: cols[1].clone(),
        n: cols[2].clone(),
        p: cols[3].clone(),
        x: cols[4].clone(),
        t: f64::NAN,
    };
    Ok((cols[0].clone(), s, cols[5].clone()))
}

pub fn write_runlog(path: &Path, log: &[StepLog]) -> Result<()> {
    let header: Vec<String> = RUNLOG_HEADER.iter().map(|s| s.to_string()).collect();
    write_rows(
        path,
        &header,
        log.iter().map(|l| {
            vec![
                l.step.to_string(),
                f(l.t),
                f(l.dt),
                l.order.to_string(),
                l.newton_iterations.to_string(),
                f(l.damping_min),
            ]
        }),
    )
}

pub fn write_paired(path: &Path, d: &PairedDifference, labels: [&str; 2]) -> Result<()> {
    let header = vec![
        "t_s".to_string(),
        format!("J_{}_A_per_m2", labels[0]),
        format!("J_{}_A_per_m2", labels[1]),
        "diff_A_per_m2".to_string(),
    ];
    write_rows(
        path,
        &header,
        (0..d.t.len()).map(|k| vec![f(d.t[k]), f(d.a[k]), f(d.b[k]), f(d.diff[k])]),
    )
}

/// One row of `sweep.csv`. Failed runs carry NaN results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub j_inf: f64,
    pub t10: f64,
    pub t50: f64,
    pub t90: f64,
    pub error: Option<String>,
}

pub fn write_sweep(path: &Path, names: &[&str], rows: &[SweepRow]) -> Result<()> {
    let mut header: Vec<String> = names.iter().map(|n| format!("param_{n}")).collect();
    header.extend(["J_inf", "t10", "t50", "t90"].map(String::from));
    write_rows(
        path,
        &header,
        rows.iter().map(|r| {
            let mut v: Vec<String> = r.params.iter().map(|p| f(*p)).collect();
            v.extend([r.j_inf, r.t10, r.t50, r.t90].map(f));
            v
        }),
    )
}

pub fn read_sweep(path: &Path) -> Result<(Vec<String>, Vec<SweepRow>)> {
    let (header, cols) = read_columns(path)?;
    let np = header.len().checked_sub(4).ok_or_else(|| Error::Parse("sweep file needs 4 result columns".into()))?;
    expect_header(path, &header[np..], &["J_inf", "t10", "t50", "t90"])?;
    let names = header[..np]
        .iter()
        .map(|h| h.strip_prefix("param_").map(str::to_string).ok_or_else(|| Error::Parse(format!("bad column `{h}`"))))
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..cols.first().map_or(0, Vec::len))
        .map(|k| SweepRow {
            params: (0..np).map(|c| cols[c][k]).collect(),
            j_inf: cols[np][k],
            t10: cols[np + 1][k],
            t50: cols[np + 2][k],
            t90: cols[np + 3][k],
            error: None,
        })
        .collect();
    Ok((names, rows))
}
