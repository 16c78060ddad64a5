//! CSV tables, atomic file output, content hashes and error norms.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Tag written into every sidecar file.
pub const SCHEMA_VERSION: &str = "pcburgers-run/1";

/// Formats like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Numeric table with a one-line header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    /// Row-major values.
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format_g17(*v));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty CSV".to_string()))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut table = Table::new(columns);
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("CSV row {}: '{v}': {e}", i + 1)))
                })
                .collect::<Result<_>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::Config(format!(
                    "CSV row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    table.columns.len()
                )));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// SHA-256 of `blob <len>\0<contents>`, hex encoded.
pub fn content_hash(contents: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", contents.len()).as_bytes());
    h.update(contents);
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Error norms of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnNorms {
    pub column: String,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Trapezoidal weights; repeated abscissae get zero-width intervals.
fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = 0.5 * (x[i] - x[i - 1]).abs();
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

/// Linear interpolation of `(xs, ys)` at `x`; `xs` must be nondecreasing.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|v| *v <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    if x1 == x0 {
        return ys[j];
    }
    let s = (x - x0) / (x1 - x0);
    ys[j - 1] + s * (ys[j] - ys[j - 1])
}

/// L1, L2 and max-norm differences of every column the two tables share.
///
/// Integrals use the trapezoidal rule on the `x` column of `run`. Without
/// `interpolate` both tables must sample the same points; with it, `reference`
/// is linearly interpolated onto the abscissae of `run`.
pub fn compare(
    run: &Table,
    reference: &Table,
    interpolate_reference: bool,
) -> Result<Vec<ColumnNorms>> {
    let xa = run
        .column("x")
        .ok_or_else(|| Error::Config("first table has no x column".to_string()))?;
    let xb = reference
        .column("x")
        .ok_or_else(|| Error::Config("second table has no x column".to_string()))?;
    let same_grid = xa.len() == xb.len()
        && xa
            .iter()
            .zip(&xb)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    if !same_grid && !interpolate_reference {
        return Err(Error::Shape(format!(
            "grids differ ({} vs {} points); request interpolation to compare",
            xa.len(),
            xb.len()
        )));
    }
    if !same_grid && xb.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Shape("reference x column is not sorted".to_string()));
    }
    let w = trapezoid_weights(&xa);
    let mut out = Vec::new();
    for (ci, name) in run.columns.iter().enumerate() {
        if name == "x" {
            continue;
        }
        let Some(cj) = reference.column_index(name) else {
            continue;
        };
        let yb: Vec<f64> = reference.rows.iter().map(|r| r[cj]).collect();
        let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
        for (i, row) in run.rows.iter().enumerate() {
            let other = if same_grid {
                yb[i]
            } else {
                interpolate(&xb, &yb, xa[i])
            };
            let d = (row[ci] - other).abs();
            l1 += w[i] * d;
            l2 += w[i] * d * d;
            linf = linf.max(d);
        }
        out.push(ColumnNorms {
            column: name.clone(),
            l1,
            l2: l2.sqrt(),
            linf,
        });
    }
    Ok(out)
}

pub fn norms_table(norms: &[ColumnNorms]) -> String {
    let mut s = String::from("column,l1,l2,linf\n");
    for n in norms {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            n.column,
            format_g17(n.l1),
            format_g17(n.l2),
            format_g17(n.linf)
        );
    }
    s
}

/// Gnuplot script plotting expectation and variance of the given snapshots.
pub fn gnuplot_script(title: &str, snapshots: &[(String, f64)], reference: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 1200,500");
    let _ = writeln!(s, "set output '{title}.png'");
    let _ = writeln!(s, "set multiplot layout 1,2 title '{title}'");
    for col in ["E", "Var"] {
        let _ = writeln!(s, "set title '{col}(u)'");
        let mut parts: Vec<String> = snapshots
            .iter()
            .map(|(file, t)| {
                format!("'{file}' using (column('x')):(column('{col}')) with lines title 't = {t}'")
            })
            .collect();
        if let Some(r) = reference {
            parts.push(format!(
                "'{r}' using (column('x')):(column('{col}')) with lines dt 2 title 'reference'"
            ));
        }
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}
