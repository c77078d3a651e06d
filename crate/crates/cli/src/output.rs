//! Deterministic CSV/JSON serialization.
//!
//! Floats use the shortest representation that parses back to the same
//! value, CSV rows end in `\n`.

use crate::args::Format;
use crate::{CliError, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Rows in the requested format; `Text` is rejected here.
pub fn encode<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
        Format::Text => Err(CliError::Validation(
            "text output is only available for `table`".into(),
        )),
    }
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Left-aligned text table with a header rule.
pub fn render_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        parts.join("  ").trim_end().to_owned() + "\n"
    };
    let mut s = line(&mut header.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    s += &(rule.join("  ") + "\n");
    for row in rows {
        s += &line(&mut row.iter().map(String::as_str));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        y: Option<f64>,
    }

    #[test]
    fn csv_is_shortest_round_trip() {
        let rows = [
            Row { x: 0.1, y: None },
            Row {
                x: 1.0 / 3.0,
                y: Some(1e-300),
            },
        ];
        let text = String::from_utf8(to_csv(&rows).unwrap()).unwrap();
        assert_eq!(text, "x,y\n0.1,\n0.3333333333333333,1e-300\n");
        for line in text.lines().skip(1) {
            let v: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert!(v == 0.1 || v == 1.0 / 3.0);
        }
    }

    #[test]
    fn text_table_aligns() {
        let t = render_text(&["a", "bbb"], &[vec!["long".into(), "x".into()]]);
        assert_eq!(t, "a     bbb\n----  ---\nlong  x\n");
    }
}
