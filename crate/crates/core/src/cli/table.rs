use serde_json::{json, Value};

use crate::dynamics::{Parameter, PhaseState, Trajectory};
use crate::invariants::DiagnosticsReport;
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Rows of named columns, written as CSV or JSON.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// 17 significant digits, enough to read back the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => out.push_str(&format_float(*v)),
                    Cell::Text(s) => out.push_str(s),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with `null` for empty cells.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Num(v) => json!(v),
                        Cell::Text(s) => json!(s),
                        Cell::Empty => Value::Null,
                    })
                    .collect()
            })
            .collect();
        json!({ "columns": self.header, "rows": rows })
    }

    /// Parses CSV written by [`Table::to_csv`]; every non-empty cell must be a number.
    pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Config("empty CSV".into()))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != header.len() {
                return Err(Error::Config(format!(
                    "CSV line {}: {} cells, header has {}",
                    n + 2,
                    cells.len(),
                    header.len()
                )));
            }
            let row = cells
                .iter()
                .zip(&header)
                .map(|(c, h)| {
                    let c = c.trim();
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|e| Error::Config(format!("CSV line {}, column {h}: {e}", n + 2)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok((header, rows))
    }
}

/// Header `param,t,sigma,x1..xd,p1..pd,H,Htilde,L,A1..Ad,F`.
pub fn trajectory_header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = ["param", "t", "sigma"].iter().map(|s| s.to_string()).collect();
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.extend((1..=dim).map(|i| format!("p{i}")));
    h.extend(["H", "Htilde", "L"].iter().map(|s| s.to_string()));
    h.extend((1..=dim).map(|i| format!("A{i}")));
    h.push("F".into());
    h
}

/// One row per sample. `L` is the planar component in 2-D and `|L|` in 3-D.
pub fn trajectory_table(traj: &Trajectory, report: &DiagnosticsReport) -> Table {
    let dim = traj.first().dim();
    let mut table = Table::new(trajectory_header(dim));
    for ((s, param), v) in traj.samples.iter().zip(&traj.param).zip(&report.samples) {
        let mut row: Vec<Cell> = vec![(*param).into(), s.t.into(), s.sigma.into()];
        row.extend(s.x.iter().map(|&c| Cell::Num(c)));
        row.extend(s.p.iter().map(|&c| Cell::Num(c)));
        row.push(v.h.into());
        row.push(v.h_tilde.into());
        let l = if v.l.len() == 1 { v.l[0] } else { v.l.iter().map(|c| c * c).sum::<f64>().sqrt() };
        row.push(l.into());
        match &v.a {
            Some(a) => row.extend(a.iter().map(|&c| Cell::Num(c))),
            None => row.extend((0..dim).map(|_| Cell::Empty)),
        }
        row.push(v.f.into());
        table.push(row);
    }
    table
}

/// A trajectory read back from CSV, with the optional columns it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrajectory {
    pub trajectory: Trajectory,
    /// `Htilde` was present.
    pub jacobi: bool,
    /// `F` was present.
    pub moser: bool,
}

/// Reads a trajectory written with [`trajectory_table`]; derived columns are
/// ignored apart from noting which were filled in.
pub fn read_trajectory_csv(text: &str, parameter: Parameter) -> Result<CsvTrajectory> {
    let (header, rows) = Table::parse_numeric_csv(text)?;
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("CSV lacks column {name}")))
    };
    let dim = header.iter().filter(|h| h.starts_with('x')).count();
    if header != trajectory_header(dim) {
        return Err(Error::Config(format!("unexpected trajectory header: {}", header.join(","))));
    }
    let (cp, ct, cs, ch, cf) = (col("param")?, col("t")?, col("sigma")?, col("Htilde")?, col("F")?);
    let (cx, cpm) = (col("x1")?, col("p1")?);
    let mut samples = Vec::with_capacity(rows.len());
    let mut param = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let required = |c: usize| row[c].ok_or_else(|| Error::Config(format!("CSV row {}: empty {}", i + 1, header[c])));
        let x = (0..dim).map(|k| required(cx + k)).collect::<Result<Vec<_>>>()?;
        let p = (0..dim).map(|k| required(cpm + k)).collect::<Result<Vec<_>>>()?;
        let s = PhaseState::from_vectors(Vector::from_vec(x), Vector::from_vec(p))?.with_clocks(row[ct], row[cs]);
        samples.push(s);
        param.push(required(cp)?);
    }
    let jacobi = rows.iter().any(|r| r[ch].is_some());
    let moser = rows.iter().any(|r| r[cf].is_some());
    Ok(CsvTrajectory { trajectory: Trajectory::from_samples(samples, param, parameter)?, jacobi, moser })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn header_layout() {
        assert_eq!(
            trajectory_header(2).join(","),
            "param,t,sigma,x1,x2,p1,p2,H,Htilde,L,A1,A2,F"
        );
    }

    #[test]
    fn empty_cells_parse_as_none() {
        let (h, rows) = Table::parse_numeric_csv("a,b\n1.5,\n,2\n").unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows, vec![vec![Some(1.5), None], vec![None, Some(2.0)]]);
        assert!(Table::parse_numeric_csv("a,b\n1,x\n").is_err());
    }
}
