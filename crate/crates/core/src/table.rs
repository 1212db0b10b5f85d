//! Text form of bipartite coefficient tables.
//!
//! One text row per `(x, a)`, one column per `(y, b)`. Column groups for
//! different `y` are separated by `|`, and the row groups for different `x`
//! by a line of dashes:
//!
//! ```text
//! 1 0 | 1 0
//! 0 1 | 0 1
//! ----------
//! 1 0 | 0 1
//! 0 1 | 1 0
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Without any
//! delimiters the table is read as a two-input table.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{BellExpression, Error, Result, Scenario};

struct Parsed {
    rows: Vec<Vec<f64>>,
    exact: Option<Vec<Vec<i64>>>,
    /// Row count of every block, in order.
    blocks: Vec<usize>,
    /// Column count of every group, taken from the first row.
    groups: Vec<usize>,
    saw_bars: bool,
}

fn table_err(line: usize, message: impl Into<String>) -> Error {
    Error::Table {
        line,
        message: message.into(),
    }
}

fn parse_cell(cell: &str, line: usize) -> Result<(f64, Option<i64>)> {
    let int = cell.parse::<i64>().ok();
    let v: f64 = match int {
        Some(i) => i as f64,
        None => cell
            .parse()
            .map_err(|_| table_err(line, format!("not a number: {cell:?}")))?,
    };
    if !v.is_finite() {
        return Err(table_err(line, format!("non-finite value: {cell:?}")));
    }
    Ok((v, int))
}

fn is_separator(line: &str) -> bool {
    line.contains("---")
        && line
            .chars()
            .all(|c| matches!(c, '-' | '+' | '|' | ' ' | '\t'))
}

fn scan(text: &str) -> Result<Parsed> {
    let mut rows = Vec::new();
    let mut exact: Vec<Vec<i64>> = Vec::new();
    let mut all_int = true;
    let mut blocks = Vec::new();
    let mut current = 0usize;
    let mut groups: Vec<usize> = Vec::new();
    let mut saw_bars = false;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        last_line = line_no;
        if is_separator(line) {
            if current == 0 {
                return Err(table_err(line_no, "empty block"));
            }
            blocks.push(current);
            current = 0;
            continue;
        }
        let inner = line.strip_prefix('|').unwrap_or(line);
        let inner = inner.strip_suffix('|').unwrap_or(inner);
        let mut row = Vec::new();
        let mut row_exact = Vec::new();
        let mut row_groups = Vec::new();
        for group in inner.split('|') {
            let mut count = 0;
            for cell in group.split_whitespace() {
                let (v, int) = parse_cell(cell, line_no)?;
                row.push(v);
                match int {
                    Some(k) => row_exact.push(k),
                    None => all_int = false,
                }
                count += 1;
            }
            if count == 0 {
                return Err(table_err(line_no, "empty column group"));
            }
            row_groups.push(count);
        }
        saw_bars |= row_groups.len() > 1;
        if rows.is_empty() {
            groups = row_groups;
        } else if row_groups != groups {
            return Err(table_err(
                line_no,
                format!("ragged row: column groups {row_groups:?}, expected {groups:?}"),
            ));
        }
        rows.push(row);
        exact.push(row_exact);
        current += 1;
    }
    if current > 0 {
        blocks.push(current);
    } else if !blocks.is_empty() {
        return Err(table_err(last_line, "trailing separator"));
    }
    if rows.is_empty() {
        return Err(table_err(0, "no table rows"));
    }
    Ok(Parsed {
        rows,
        exact: all_int.then_some(exact),
        blocks,
        groups,
        saw_bars,
    })
}

fn infer_scenario(p: &Parsed) -> Result<Scenario> {
    let n_rows = p.rows.len();
    let n_cols = p.rows[0].len();
    let (m_a, n_a) = if p.blocks.len() > 1 {
        if p.blocks.iter().any(|&b| b != p.blocks[0]) {
            return Err(table_err(
                0,
                format!("blocks of unequal height {:?}", p.blocks),
            ));
        }
        (p.blocks.len(), p.blocks[0])
    } else if n_rows % 2 == 0 {
        (2, n_rows / 2)
    } else {
        return Err(table_err(
            0,
            format!("{n_rows} rows cannot be split into two blocks"),
        ));
    };
    let (m_b, n_b) = if p.saw_bars {
        if p.groups.iter().any(|&g| g != p.groups[0]) {
            return Err(table_err(
                0,
                format!("column groups of unequal width {:?}", p.groups),
            ));
        }
        (p.groups.len(), p.groups[0])
    } else if n_cols % 2 == 0 {
        (2, n_cols / 2)
    } else {
        return Err(table_err(
            0,
            format!("{n_cols} columns cannot be split into two groups"),
        ));
    };
    Scenario::bipartite(m_a, m_b, n_a, n_b)
}

fn build(scenario: Scenario, p: Parsed) -> Result<BellExpression> {
    match &p.exact {
        Some(ex) => {
            let rows: Vec<&[i64]> = ex.iter().map(|r| r.as_slice()).collect();
            BellExpression::from_int_table_rows(scenario, &rows)
        }
        None => {
            let rows: Vec<&[f64]> = p.rows.iter().map(|r| r.as_slice()).collect();
            BellExpression::from_table_rows(scenario, &rows)
        }
    }
}

/// Parses a table, inferring the scenario from its delimiters.
pub fn parse_table(text: &str) -> Result<BellExpression> {
    let p = scan(text)?;
    let s = infer_scenario(&p)?;
    build(s, p)
}

/// Parses a table for a known bipartite scenario; delimiters are optional but
/// must agree with the scenario when present.
pub fn parse_table_as(text: &str, scenario: &Scenario) -> Result<BellExpression> {
    if scenario.parties() != 2 {
        return Err(Error::UnsupportedScenario {
            required: "bipartite",
        });
    }
    let p = scan(text)?;
    let (m_a, m_b) = (scenario.inputs()[0], scenario.inputs()[1]);
    let (n_a, n_b) = (scenario.outputs()[0], scenario.outputs()[1]);
    if p.rows.len() != m_a * n_a {
        return Err(table_err(
            0,
            format!("expected {} rows, found {}", m_a * n_a, p.rows.len()),
        ));
    }
    if p.rows[0].len() != m_b * n_b {
        return Err(table_err(
            0,
            format!("expected {} columns, found {}", m_b * n_b, p.rows[0].len()),
        ));
    }
    if p.blocks.len() > 1 && p.blocks.iter().any(|&b| b != n_a) {
        return Err(table_err(
            0,
            format!("block heights {:?} do not match n_A = {n_a}", p.blocks),
        ));
    }
    if p.saw_bars && p.groups.iter().any(|&g| g != n_b) {
        return Err(table_err(
            0,
            format!("column groups {:?} do not match n_B = {n_b}", p.groups),
        ));
    }
    build(scenario.clone(), p)
}

/// Shortest decimal that reads back to the same value; `-0` prints as `0`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Renders a bipartite expression in the block layout.
pub fn format_table(expr: &BellExpression) -> Result<String> {
    let s = expr.scenario();
    let (n_rows, n_cols) = expr.table_shape()?;
    let n_a = s.outputs()[0];
    let n_b = s.outputs()[1];
    let cells: Vec<Vec<String>> = (0..n_rows)
        .map(|r| {
            (0..n_cols)
                .map(|c| format_value(expr.table_entry(r, c)))
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);

    let mut lines = Vec::with_capacity(n_rows + s.inputs()[0]);
    for (r, row) in cells.iter().enumerate() {
        if r > 0 && r % n_a == 0 {
            lines.push(String::new());
        }
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str(if c % n_b == 0 { " | " } else { " " });
            }
            line.push_str(&format!("{cell:>width$}"));
        }
        lines.push(line);
    }
    let rule = "-".repeat(lines.iter().map(|l| l.len()).max().unwrap_or(3).max(3));
    let mut out = String::new();
    for l in lines {
        out.push_str(if l.is_empty() { &rule } else { &l });
        out.push('\n');
    }
    Ok(out)
}
