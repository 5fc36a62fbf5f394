//! Result rows, CSV serialization and gnuplot scripts.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use wlmvdr_core::analysis::GainReport;
use wlmvdr_core::{from_db, to_db};

use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 11] = [
    "sweep_value",
    "source",
    "G_dB",
    "GI_dB",
    "GQ_dB",
    "lambda_I",
    "lambda_Q",
    "SINR_MVDR_dB",
    "SINR_Capon_dB",
    "trials",
    "snapshots",
];

/// Origin of a row. The declaration order is the CSV sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    TheoryExact,
    TheoryApprox,
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TheoryExact => "theory-exact",
            Self::TheoryApprox => "theory-approx",
            Self::Simulated => "simulated",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory-exact" => Ok(Self::TheoryExact),
            "theory-approx" => Ok(Self::TheoryApprox),
            "simulated" => Ok(Self::Simulated),
            _ => Err(CliError::Config(format!("unknown row source {s:?}"))),
        }
    }
}

/// One line of output. Gains and SINRs are held linear and converted to dB
/// on emission; `None` leaves the cell empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub source: Source,
    pub g: f64,
    pub g_i: Option<f64>,
    pub g_q: Option<f64>,
    pub lambda_i: f64,
    pub lambda_q: f64,
    pub sinr_mvdr: f64,
    pub sinr_capon: f64,
    pub trials: Option<usize>,
    pub snapshots: Option<usize>,
}

impl ResultRow {
    pub fn from_report(sweep_value: f64, source: Source, r: &GainReport) -> Self {
        Self {
            sweep_value,
            source,
            g: r.g,
            g_i: r.g_i,
            g_q: r.g_q,
            lambda_i: r.lambda_i,
            lambda_q: r.lambda_q,
            sinr_mvdr: r.sinr_mvdr,
            sinr_capon: r.sinr_capon,
            trials: None,
            snapshots: None,
        }
    }

    pub fn g_db(&self) -> f64 {
        to_db(self.g)
    }

    pub fn g_i_db(&self) -> Option<f64> {
        self.g_i.map(to_db)
    }

    pub fn g_q_db(&self) -> Option<f64> {
        self.g_q.map(to_db)
    }

    pub fn sinr_mvdr_db(&self) -> f64 {
        to_db(self.sinr_mvdr)
    }

    pub fn sinr_capon_db(&self) -> f64 {
        to_db(self.sinr_capon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    PlotScript,
}

/// Sorts by `(sweep_value, source)`.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value).then(a.source.cmp(&b.source)));
}

/// Twelve significant digits, printed in the shortest form that reparses to
/// the rounded value.
fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float reparses");
    rounded.to_string()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(row: &ResultRow) -> [String; 11] {
    [
        num(row.sweep_value),
        row.source.to_string(),
        num(row.g_db()),
        opt(row.g_i_db().map(num)),
        opt(row.g_q_db().map(num)),
        num(row.lambda_i),
        num(row.lambda_q),
        num(row.sinr_mvdr_db()),
        num(row.sinr_capon_db()),
        opt(row.trials),
        opt(row.snapshots),
    ]
}

/// Writes rows, sorted, under the canonical header.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &sorted {
        w.write_record(record(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

fn parse_field<T: FromStr>(field: &str, name: &str) -> Result<T> {
    field.parse().map_err(|_| CliError::Config(format!("bad {name} value {field:?}")))
}

fn parse_opt<T: FromStr>(field: &str, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_field(field, name).map(Some)
    }
}

/// Parses CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> { parse_field(&rec[i], CSV_HEADER[i]) };
        let db = |i: usize| -> Result<Option<f64>> { Ok(parse_opt::<f64>(&rec[i], CSV_HEADER[i])?.map(from_db)) };
        rows.push(ResultRow {
            sweep_value: f(0)?,
            source: rec[1].parse()?,
            g: from_db(f(2)?),
            g_i: db(3)?,
            g_q: db(4)?,
            lambda_i: f(5)?,
            lambda_q: f(6)?,
            sinr_mvdr: from_db(f(7)?),
            sinr_capon: from_db(f(8)?),
            trials: parse_opt(&rec[9], "trials")?,
            snapshots: parse_opt(&rec[10], "snapshots")?,
        });
    }
    Ok(rows)
}

/// A gnuplot script plotting the gain columns of `csv_path` per source.
pub fn plot_script(csv_path: &Path, title: &str) -> String {
    let csv = csv_path.display().to_string().replace('\'', "''");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "''")));
    s.push_str("set xlabel 'sweep value'\nset ylabel 'gain (dB)'\nset key outside right\nset grid\n");
    s.push_str(&format!("data = '{csv}'\n"));
    s.push_str("pick(src, col) = (strcol(2) eq src) ? column(col) : NaN\n");
    let mut curves = Vec::new();
    for (col, label) in [(3, "G"), (4, "G_I"), (5, "G_Q")] {
        for (src, style) in [("theory-exact", "lines"), ("theory-approx", "lines dt 2"), ("simulated", "points")] {
            curves.push(format!("data every ::1 using 1:(pick('{src}', {col})) with {style} title '{label} {src}'"));
        }
    }
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}

/// Writes rows as CSV, or a plot script next to a CSV of the same stem.
pub fn emit(rows: &[ResultRow], path: &Path, format: Format) -> Result<()> {
    let io = |source| CliError::Io { path: path.to_owned(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    }
    match format {
        Format::Csv => {
            let file = std::fs::File::create(path).map_err(io)?;
            write_csv(rows, std::io::BufWriter::new(file))
        }
        Format::PlotScript => {
            let csv_path = path.with_extension("csv");
            emit(rows, &csv_path, Format::Csv)?;
            let title = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = csv_path.file_name().map(Path::new).unwrap_or(&csv_path);
            std::fs::write(path, plot_script(name, &title)).map_err(io)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: f64, source: Source) -> ResultRow {
        ResultRow {
            sweep_value: x,
            source,
            g: 1.234_567_890_123_4,
            g_i: Some(2.0),
            g_q: None,
            lambda_i: 1.1,
            lambda_q: 0.9,
            sinr_mvdr: 3.0,
            sinr_capon: 2.5,
            trials: (source == Source::Simulated).then_some(10),
            snapshots: (source == Source::Simulated).then_some(20_000),
        }
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(csv_string(&[]).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn rows_sorted_by_value_then_source() {
        let rows = [row(0.5, Source::Simulated), row(0.5, Source::TheoryExact), row(0.2, Source::TheoryApprox)];
        let back = read_csv(csv_string(&rows).unwrap().as_bytes()).unwrap();
        let keys: Vec<_> = back.iter().map(|r| (r.sweep_value, r.source)).collect();
        assert_eq!(keys, [(0.2, Source::TheoryApprox), (0.5, Source::TheoryExact), (0.5, Source::Simulated)]);
    }

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(num(0.1 + 0.2), "0.3");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-0.0), "-0");
        assert_eq!(num(12345.0), "12345");
    }

    #[test]
    fn empty_cells_round_trip() {
        let text = csv_string(&[row(1.0, Source::TheoryExact)]).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",,"));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0].g_q, None);
        assert_eq!(back[0].trials, None);
    }

    #[test]
    fn script_references_csv() {
        let s = plot_script(Path::new("fig2a.csv"), "fig2a");
        assert!(s.contains("data = 'fig2a.csv'"));
        assert!(s.contains("strcol(2)"));
    }
}
