//! Linearized tables: cells joined by `" | "`, rows by `" & "`, with `|`,
//! `&` and `\` escaped by a backslash.

use thiserror::Error;

use crate::table::DataTable;

pub const CELL_SEP: &str = " | ";
pub const ROW_SEP: &str = " & ";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlattenError {
    #[error("text ends inside an escape sequence")]
    DanglingEscape,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
}

pub fn escape_cell(cell: &str) -> String {
    let mut out = String::with_capacity(cell.len());
    for c in cell.chars() {
        if matches!(c, '\\' | '|' | '&') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Joins pre-rendered rows with the flattening separators.
pub fn flatten_rows(rows: &[Vec<String>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|c| escape_cell(c)).collect::<Vec<_>>().join(CELL_SEP))
        .collect::<Vec<_>>()
        .join(ROW_SEP)
}

/// Header row then data rows; numbers keep at most two decimals.
pub fn flatten_table(table: &DataTable) -> String {
    flatten_rows(&table.to_text_grid())
}

/// Inverse of [`flatten_rows`]. Rows must all have the header's width.
pub fn unflatten(text: &str) -> Result<Vec<Vec<String>>, FlattenError> {
    let chars: Vec<char> = text.chars().collect();
    let mut rows = vec![Vec::new()];
    let mut cell = String::new();
    let mut i = 0;
    let at = |i: usize, sep: char| i + 2 < chars.len() && chars[i] == ' ' && chars[i + 1] == sep && chars[i + 2] == ' ';
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            let next = chars.get(i + 1).ok_or(FlattenError::DanglingEscape)?;
            cell.push(*next);
            i += 2;
        } else if at(i, '|') {
            rows.last_mut().expect("non-empty").push(std::mem::take(&mut cell));
            i += 3;
        } else if at(i, '&') {
            rows.last_mut().expect("non-empty").push(std::mem::take(&mut cell));
            rows.push(Vec::new());
            i += 3;
        } else {
            cell.push(c);
            i += 1;
        }
    }
    rows.last_mut().expect("non-empty").push(cell);
    let expected = rows[0].len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != expected {
            return Err(FlattenError::Ragged {
                row,
                expected,
                found: r.len(),
            });
        }
    }
    Ok(rows)
}
