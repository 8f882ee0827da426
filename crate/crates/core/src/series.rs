//! Integer series behind the plots, as CSV tables.
//!
//! CSV output has a header row, LF line endings, and an empty cell wherever
//! the value is an infinite valuation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::padic::{nu2_u64, s2};
use crate::sequences::cohen_valuations;
use crate::stirling::{de_wannemacker_gap_with, ModStirlingEngine, Precision};
use crate::valuation::Valuation;

/// Rows of integer cells; `None` prints as an empty field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Option<i64>>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Option<i64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn cell(v: Valuation) -> Option<i64> {
    v.finite()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// `nu_2(S(n, k))`
    Stirling { k: u32 },
    /// `nu_2(n!)`
    Factorial,
    /// `nu_2(n)`
    Int,
    /// `nu_2(L_k(n))`
    Cohen { k: u32 },
}

/// `n,value` for `n_min <= n <= n_max`.
pub fn val_series(series: Series, n_min: u64, n_max: u64, precision: Precision) -> Result<Table> {
    if n_min > n_max {
        return Err(invalid(format!("empty range {n_min}..={n_max}")));
    }
    let mut t = Table::new(vec!["n", "value"]);
    match series {
        Series::Stirling { k } => {
            let engine = ModStirlingEngine::with_precision(k, precision);
            for n in n_min..=n_max {
                t.push(vec![Some(n as i64), cell(engine.valuation_result(n)?)]);
            }
        }
        Series::Factorial => {
            for n in n_min..=n_max {
                t.push(vec![Some(n as i64), Some((n - s2(n)) as i64)]);
            }
        }
        Series::Int => {
            for n in n_min..=n_max {
                t.push(vec![Some(n as i64), cell(nu2_u64(n))]);
            }
        }
        Series::Cohen { k } => {
            if n_min == 0 {
                return Err(invalid("L_k(n) needs n >= 1"));
            }
            if n_max > 1 << 14 {
                return Err(invalid("n above 16384 is too expensive for exact sums"));
            }
            let vals = cohen_valuations(k, n_max)?;
            for n in n_min..=n_max {
                t.push(vec![Some(n as i64), cell(vals[n as usize - 1])]);
            }
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// `n,value`: `nu_2(n)` for `1 <= n <= n_max`.
    ValN,
    /// `n,value`: `nu_2(n!)` for `1 <= n <= n_max`.
    ValFactorial,
    /// `m,s2`: `s_2(m) = m - nu_2(m!)` for `1 <= m <= n_max`.
    ErrFactorial,
    /// `m,value,error`: `nu_2(L_k(m))` and `nu_2(L_k(m)) - m`.
    Cohen,
    /// `n,value`: `nu_2(S(n, k))` for `k <= n <= n_max`.
    StirlingK,
    /// `n,gap`: `nu_2(S(n,k)) - s_2(k) + s_2(n)` for `k <= n <= n_max`.
    WannemackerDiff,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::ValN,
        Figure::ValFactorial,
        Figure::ErrFactorial,
        Figure::Cohen,
        Figure::StirlingK,
        Figure::WannemackerDiff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::ValN => "val-n",
            Figure::ValFactorial => "val-factorial",
            Figure::ErrFactorial => "err-factorial",
            Figure::Cohen => "cohen",
            Figure::StirlingK => "stirling-k",
            Figure::WannemackerDiff => "wannemacker-diff",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown figure {s:?}")))
    }
}

/// `k` is used by `cohen` (default 1), `stirling-k` and `wannemacker-diff`.
pub fn figure_table(fig: Figure, k: Option<u32>, n_max: u64, precision: Precision) -> Result<Table> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    let need_k = || k.filter(|&k| k >= 1).ok_or_else(|| invalid(format!("figure {fig} needs --k >= 1")));
    match fig {
        Figure::ValN => val_series(Series::Int, 1, n_max, precision),
        Figure::ValFactorial => val_series(Series::Factorial, 1, n_max, precision),
        Figure::ErrFactorial => {
            let mut t = Table::new(vec!["m", "s2"]);
            for m in 1..=n_max {
                t.push(vec![Some(m as i64), Some(s2(m) as i64)]);
            }
            Ok(t)
        }
        Figure::Cohen => {
            let base = val_series(Series::Cohen { k: k.unwrap_or(1) }, 1, n_max, precision)?;
            let mut t = Table::new(vec!["m", "value", "error"]);
            for row in base.rows {
                let m = row[0].expect("index");
                t.push(vec![Some(m), row[1], row[1].map(|v| v - m)]);
            }
            Ok(t)
        }
        Figure::StirlingK => {
            let k = need_k()?;
            if n_max < k as u64 {
                return Err(invalid("n_max must be at least k"));
            }
            val_series(Series::Stirling { k }, k as u64, n_max, precision)
        }
        Figure::WannemackerDiff => {
            let k = need_k()?;
            if n_max < k as u64 {
                return Err(invalid("n_max must be at least k"));
            }
            let engine = ModStirlingEngine::with_precision(k, precision);
            let mut t = Table::new(vec!["n", "gap"]);
            for n in k as u64..=n_max {
                t.push(vec![Some(n as i64), Some(de_wannemacker_gap_with(&engine, n)?)]);
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: &Table, n: i64) -> Vec<Option<i64>> {
        t.rows.iter().find(|r| r[0] == Some(n)).cloned().unwrap()
    }

    #[test]
    fn series_values() {
        let p = Precision::default();
        let t = val_series(Series::Stirling { k: 5 }, 1, 40, p).unwrap();
        assert_eq!(row(&t, 28), vec![Some(28), Some(6)]);
        assert_eq!(row(&t, 3), vec![Some(3), None]);
        let t = val_series(Series::Factorial, 10, 10, p).unwrap();
        assert_eq!(t.rows, vec![vec![Some(10), Some(8)]]);
        let t = val_series(Series::Int, 0, 8, p).unwrap();
        assert_eq!(row(&t, 0), vec![Some(0), None]);
        assert_eq!(row(&t, 8), vec![Some(8), Some(3)]);
        let t = val_series(Series::Cohen { k: 1 }, 16, 16, p).unwrap();
        assert_eq!(t.rows, vec![vec![Some(16), Some(22)]]);
        assert!(val_series(Series::Int, 5, 4, p).is_err());
    }

    #[test]
    fn csv_shape() {
        let t = val_series(Series::Stirling { k: 5 }, 3, 6, Precision::default()).unwrap();
        assert_eq!(t.to_csv_string(), "n,value\n3,\n4,\n5,0\n6,0\n");
    }

    #[test]
    fn figures() {
        let p = Precision::default();
        let t = figure_table(Figure::WannemackerDiff, Some(101), 500, p).unwrap();
        assert_eq!(t.rows.len(), 400);
        assert!(t.rows.iter().all(|r| r[1].unwrap() >= 0));
        let t = figure_table(Figure::ErrFactorial, None, 64, p).unwrap();
        assert_eq!(t.header, vec!["m", "s2"]);
        assert_eq!(t.rows.len(), 64);
        assert_eq!(row(&t, 63), vec![Some(63), Some(6)]);
        let t = figure_table(Figure::Cohen, None, 20, p).unwrap();
        assert_eq!(row(&t, 16), vec![Some(16), Some(22), Some(6)]);
        assert!(figure_table(Figure::StirlingK, None, 10, p).is_err());
        assert_eq!("stirling-k".parse::<Figure>().unwrap(), Figure::StirlingK);
        assert!("nope".parse::<Figure>().is_err());
    }
}
