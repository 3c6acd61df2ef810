//! Result tables and their CSV form.

use std::fmt::Write as _;
use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(s) => parse_number(s),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Seventeen significant digits, so every f64 round-trips.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric view of a column (NaN for text that is not a number).
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[k].as_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    /// Text view of a column.
    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| cell_text(&r[k])).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", quote(&cell_text(cell)));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// Reads what [`ResultTable::to_csv`] writes; every cell comes back as
    /// text.
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut records = split_records(text)?.into_iter();
        let columns = records.next().ok_or("empty CSV")?;
        let mut table = Self::new(columns);
        for (i, rec) in records.enumerate() {
            if rec.len() != table.columns.len() {
                return Err(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    rec.len(),
                    table.columns.len()
                ));
            }
            table.rows.push(rec.into_iter().map(Cell::Text).collect());
        }
        Ok(table)
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_records(text: &str) -> Result<Vec<Vec<String>>, String> {
    let mut records = Vec::new();
    let mut record = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    field.push('"');
                }
                '"' => quoted = false,
                _ => field.push(c),
            }
            continue;
        }
        match c {
            '"' => quoted = true,
            ',' => record.push(std::mem::take(&mut field)),
            '\n' => {
                record.push(std::mem::take(&mut field));
                records.push(std::mem::take(&mut record));
            }
            _ => field.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if !field.is_empty() || !record.is_empty() {
        record.push(field);
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(format_float(f64::NAN), "nan");
        for v in [std::f64::consts::PI, 1e-300, -7.123456789012345e42] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut t = ResultTable::new(vec!["lambda".into(), "phase".into(), "error".into()]);
        t.push(vec![4.5.into(), "NP+SP".into(), "".into()]);
        t.push(vec![
            7.0.into(),
            "SP".into(),
            "bad, \"quoted\" value".into(),
        ]);
        t.push(vec![f64::NAN.into(), 3usize.into(), true.into()]);
        let csv = t.to_csv();
        let back = ResultTable::from_csv(&csv).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.texts("error").unwrap()[1], "bad, \"quoted\" value");
        assert_eq!(back.numbers("lambda").unwrap()[1], 7.0);
        assert!(back.numbers("lambda").unwrap()[2].is_nan());
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn ragged_csv_is_rejected() {
        assert!(ResultTable::from_csv("a,b\n1\n").is_err());
        assert!(ResultTable::from_csv("a\n\"open\n").is_err());
    }
}
