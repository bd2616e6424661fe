//! CSV tables with numbers written as 17 significant digits, so that
//! reading a table back and writing it again reproduces the same bytes.

use std::io::{Read, Write};

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format_num(*v),
            Cell::Int(i) => i.to_string(),
        }
    }

    fn parse(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            if i.to_string() == s {
                return Cell::Int(i);
            }
        }
        match s.parse::<f64>() {
            Ok(v) if format_num(v) == s => Cell::Num(v),
            _ => Cell::Text(s.to_string()),
        }
    }
}

pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of column `name` in rows whose `curve` cell equals
    /// `label`.
    pub fn series(&self, label: &str, name: &str) -> Vec<f64> {
        let (Some(c), Some(k)) = (self.column("curve"), self.column(name)) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| matches!(&r[c], Cell::Text(s) if s == label))
            .filter_map(|r| r[k].as_f64())
            .collect()
    }

    pub fn write<W: Write>(&self, w: W) -> CliResult<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn read<R: Read>(r: R) -> CliResult<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header = rd.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Table { header, rows })
    }
}
