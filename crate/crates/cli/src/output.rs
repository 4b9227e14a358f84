use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use rdigits::cubesum::DecayTable;
use rdigits::{Num, Report};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key,value` rows; decay scans use their own columns.
    Csv,
    /// One `key = value` per line.
    Keyvalue,
}

pub struct Sink {
    out: Box<dyn Write>,
    format: Format,
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format) -> Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { out, format })
    }

    pub fn report(&mut self, report: &Report) -> Result<()> {
        match self.format {
            Format::Keyvalue => write!(self.out, "{report}")?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.out);
                w.write_record(["key", "value"])?;
                for (k, v) in report.entries() {
                    w.write_record([k, v])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn decay(&mut self, table: &DecayTable) -> Result<()> {
        let opt = |x: Option<f64>| x.map(|v| Num(v).to_string()).unwrap_or_default();
        match self.format {
            Format::Csv => {
                table.write_csv(&mut self.out)?;
                eprintln!(
                    "slope = {}; per ‖θ‖² = {}; per ‖hθ‖² = {}",
                    opt(table.slope),
                    opt(table.slope_theta),
                    opt(table.slope_htheta)
                );
            }
            Format::Keyvalue => {
                let mut r = Report::new()
                    .with("s", table.s)
                    .with("theta", table.theta)
                    .with("h", table.h)
                    .with("rows", table.rows.len());
                for row in &table.rows {
                    r.push(
                        format!("lambda_{}", row.lambda),
                        format!(
                            "{},{},{},{},{},{}",
                            row.g_lambda,
                            Num(row.value.re),
                            Num(row.value.im),
                            Num(row.modulus),
                            opt(row.c_emp_theta),
                            opt(row.c_emp_htheta)
                        ),
                    );
                }
                r.push("slope", opt(table.slope));
                r.push("slope_theta", opt(table.slope_theta));
                r.push("slope_htheta", opt(table.slope_htheta));
                self.report(&r)?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
