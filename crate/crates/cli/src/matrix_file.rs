//! Target matrices for `compile-check`.
//!
//! One row per line, entries separated by whitespace or commas. Entries are
//! real (`0.5`) or complex (`0.5-0.5i`, `1i`). `#` starts a comment.

use std::path::Path;

use quadgate::{Complex64, ComplexMatrix};

use crate::CliError;

fn bad(path: &Path, line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::io(path, format!("line {line}: {message}"))
}

pub fn parse(text: &str, path: &Path) -> Result<ComplexMatrix, CliError> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let code = line.split('#').next().unwrap_or("");
        let entries: Vec<&str> = code
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if entries.is_empty() {
            continue;
        }
        let row = entries
            .iter()
            .map(|e| {
                e.parse::<Complex64>()
                    .map_err(|_| bad(path, k + 1, format!("cannot read `{e}` as a number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n < 2 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::io(
            path,
            format!("expected a square matrix, got {n} rows"),
        ));
    }
    Ok(ComplexMatrix::from_rows(&rows))
}

pub fn read(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_complex_rows() {
        let m = parse("# swap\n0, 1i\n1 0\n", Path::new("m.txt")).unwrap();
        assert_eq!(m.get(0, 1), Complex64::new(0.0, 1.0));
        assert_eq!(m.get(1, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_ragged() {
        assert!(parse("1 0\n0\n", Path::new("m.txt")).is_err());
        assert!(parse("1 x\n0 1\n", Path::new("m.txt")).is_err());
    }
}
