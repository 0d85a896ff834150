use serde::Serialize;
use serde_json::Value;

use foliate::{Error, C64};

/// One entry of the error log.
#[derive(Clone, Debug, Serialize)]
pub struct LoggedError {
    /// Which input produced the error, e.g. `seed 5` or the file path.
    pub source: String,
    pub code: String,
    pub message: String,
    /// The field is degenerate (non-isolated or degenerate singularities and the like).
    pub degenerate: bool,
    /// The input was refused: degenerate, malformed or out of range.
    pub rejected: bool,
}

impl LoggedError {
    pub fn new(source: &str, e: &Error) -> LoggedError {
        LoggedError {
            source: source.to_string(),
            code: e.code().to_string(),
            message: e.to_string(),
            degenerate: e.is_degenerate_input(),
            rejected: e.is_degenerate_input()
                || matches!(e, Error::ParseError { .. } | Error::DimensionMismatch(_) | Error::InvalidInput(_)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: CommandEcho,
    /// SHA-256 of the input file, or of the generator description for random input.
    pub input_digest: String,
    pub results: Vec<Value>,
    pub errors: Vec<LoggedError>,
    /// Checks that ran but did not meet their tolerance.
    pub failed_checks: usize,
    pub wall_time: f64,
}

/// Flat table for `--csv`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 17 significant digits, enough to recover the exact double.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Real and imaginary columns.
pub fn cnum(z: C64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["x,y".into(), "plain".into()]);
        assert_eq!(t.render(), "a,b\n\"x,y\",plain\n");
    }
}
