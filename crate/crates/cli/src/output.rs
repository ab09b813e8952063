//! Deterministic table and record emission: CSV with C-style %.12e floats
//! and `#`-prefixed metadata lines, a minimal JSON writer with fixed key
//! order, and optional gnuplot script emission.

use std::io::Write;

use crate::CliError;

/// C-style `%.12e`: twelve fractional digits, sign-and-two-digit exponent.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let raw = format!("{x:.12e}");
    let (mantissa, exp) = raw.split_once('e').expect("exponential form");
    let e: i32 = exp.parse().expect("exponent");
    format!("{mantissa}e{}{:02}", if e < 0 { "-" } else { "+" }, e.abs())
}

/// A CSV table: metadata comments, a header row, and %.12e data rows.
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn write(&self, out: &mut dyn Write) -> Result<(), CliError> {
        for m in &self.meta {
            writeln!(out, "# {m}").map_err(io_err)?;
        }
        writeln!(out, "{}", self.header.join(",")).map_err(io_err)?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_e12(x)).collect();
            writeln!(out, "{}", cells.join(",")).map_err(io_err)?;
        }
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Minimal JSON value with deterministic serialization (keys in insertion
/// order, floats in %.12e with full round-trip for integers).
pub enum Json {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn write(&self, out: &mut dyn Write) -> Result<(), CliError> {
        self.write_indent(out, 0)?;
        writeln!(out).map_err(io_err)
    }

    fn write_indent(&self, out: &mut dyn Write, level: usize) -> Result<(), CliError> {
        let pad = "  ".repeat(level);
        match self {
            Json::Num(x) => write!(out, "{}", fmt_e12(*x)).map_err(io_err),
            Json::Int(v) => write!(out, "{v}").map_err(io_err),
            Json::Bool(b) => write!(out, "{b}").map_err(io_err),
            Json::Str(s) => write!(out, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
                .map_err(io_err),
            Json::Arr(items) => {
                if items.is_empty() {
                    return write!(out, "[]").map_err(io_err);
                }
                writeln!(out, "[").map_err(io_err)?;
                for (i, item) in items.iter().enumerate() {
                    write!(out, "{pad}  ").map_err(io_err)?;
                    item.write_indent(out, level + 1)?;
                    writeln!(out, "{}", if i + 1 < items.len() { "," } else { "" })
                        .map_err(io_err)?;
                }
                write!(out, "{pad}]").map_err(io_err)
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    return write!(out, "{{}}").map_err(io_err);
                }
                writeln!(out, "{{").map_err(io_err)?;
                for (i, (k, v)) in fields.iter().enumerate() {
                    write!(out, "{pad}  \"{k}\": ").map_err(io_err)?;
                    v.write_indent(out, level + 1)?;
                    writeln!(out, "{}", if i + 1 < fields.len() { "," } else { "" })
                        .map_err(io_err)?;
                }
                write!(out, "{pad}}}").map_err(io_err)
            }
        }
    }
}

/// Emits a gnuplot script plotting the named CSV columns against the first.
pub fn write_plot_script(
    path: &str,
    csv_path: &str,
    title: &str,
    columns: &[(usize, &str)],
    log_x: bool,
) -> Result<(), CliError> {
    let mut body = String::new();
    body.push_str("set datafile separator ','\n");
    body.push_str(&format!("set title '{title}'\n"));
    if log_x {
        body.push_str("set logscale x\n");
    }
    body.push_str("set key left bottom\n");
    let plots: Vec<String> = columns
        .iter()
        .map(|(col, name)| format!("'{csv_path}' using 1:{col} with lines title '{name}'"))
        .collect();
    body.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}
