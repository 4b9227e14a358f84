//! Decay of the cube sum along `λ`.

use std::io;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{cube_sum, CubeConfig, CubeError, CubeQuery, Engine, Frequency};
use crate::numsys::NumerationSystem;
use crate::report::Num;

pub const CSV_HEADER: [&str; 7] = ["lambda", "G_lambda", "re", "im", "modulus", "c_emp_theta", "c_emp_htheta"];

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub lambda: usize,
    pub g_lambda: BigUint,
    pub value: Complex64,
    pub modulus: f64,
    /// `−ln|S| / (ln G_λ · ‖θ‖²)`.
    pub c_emp_theta: Option<f64>,
    /// `−ln|S| / (ln G_λ · ‖hθ‖²)`.
    pub c_emp_htheta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub s: usize,
    pub theta: Frequency,
    pub h: u64,
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `−ln|S|` against `ln G_λ`.
    pub slope: Option<f64>,
    pub slope_theta: Option<f64>,
    pub slope_htheta: Option<f64>,
}

fn rate(modulus: f64, log_g: f64, norm: f64) -> Option<f64> {
    (norm > 0.0 && modulus > 0.0 && log_g > 0.0).then(|| -modulus.ln() / (log_g * norm * norm))
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row per `λ ∈ lambda_min..=lambda_max`. `h` defaults to the system's
/// savings constant.
#[allow(clippy::too_many_arguments)]
pub fn decay_scan(
    system: &NumerationSystem,
    s: usize,
    theta: Frequency,
    lambda_min: usize,
    lambda_max: usize,
    h: Option<u64>,
    engine: Engine,
    config: &CubeConfig,
) -> Result<DecayTable, CubeError> {
    assert!(lambda_min >= 1, "lambda_min must be at least 1");
    let h = h.unwrap_or_else(|| system.savings_constant());
    let norm = theta.norm();
    let h_norm = theta.scale(h as i64).norm();
    let mut rows = Vec::new();
    for lambda in lambda_min..=lambda_max {
        let v = cube_sum(&CubeQuery::new(system, s, lambda, theta), engine, config)?;
        let g_lambda = system.term(lambda);
        let log_g = g_lambda.to_f64().unwrap().ln();
        rows.push(DecayRow {
            lambda,
            c_emp_theta: rate(v.modulus, log_g, norm),
            c_emp_htheta: rate(v.modulus, log_g, h_norm),
            g_lambda,
            value: v.value,
            modulus: v.modulus,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.modulus > 0.0)
        .map(|r| (r.g_lambda.to_f64().unwrap().ln(), -r.modulus.ln()))
        .collect();
    let slope = least_squares_slope(&points);
    let per = |n: f64| slope.filter(|_| n > 0.0).map(|k| k / (n * n));
    Ok(DecayTable {
        s,
        theta,
        h,
        slope_theta: per(norm),
        slope_htheta: per(h_norm),
        slope,
        rows,
    })
}

fn field(x: Option<f64>) -> String {
    x.map(|v| Num(v).to_string()).unwrap_or_default()
}

impl DecayTable {
    /// Rows as CSV; undefined rates are empty fields.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.lambda.to_string(),
                r.g_lambda.to_string(),
                Num(r.value.re).to_string(),
                Num(r.value.im).to_string(),
                Num(r.modulus).to_string(),
                field(r.c_emp_theta),
                field(r.c_emp_htheta),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses rows written by [`DecayTable::write_csv`].
    pub fn read_csv_rows<R: io::Read>(input: R) -> Result<Vec<DecayRow>, String> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| e.to_string())?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(format!("unexpected header {header:?}"));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let num = |i: usize| rec[i].parse::<f64>().map_err(|e| format!("column {}: {e}", CSV_HEADER[i]));
            let opt = |i: usize| if rec[i].is_empty() { Ok(None) } else { num(i).map(Some) };
            rows.push(DecayRow {
                lambda: rec[0].parse().map_err(|e| format!("lambda: {e}"))?,
                g_lambda: rec[1].parse().map_err(|e| format!("G_lambda: {e}"))?,
                value: Complex64::new(num(2)?, num(3)?),
                modulus: num(4)?,
                c_emp_theta: opt(5)?,
                c_emp_htheta: opt(6)?,
            });
        }
        Ok(rows)
    }
}
