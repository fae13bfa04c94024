//! Report rows and their CSV / JSON / plot-data emission.

use crate::config::Config;
use crate::CliError;
use asfam::Q;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;

/// Float with 12 significant digits, shortest form.
pub fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let s = format!("{:.*}", (11 - e).max(0) as usize, x);
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (m, exp) = s.split_once('e').unwrap();
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

/// Rational as "num/den" (or "num" when integral).
pub fn fmt_q(x: Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub family: String,
    pub d: String,
    pub param: String,
    pub statistic: String,
    pub empirical: String,
    pub predicted: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotPoint {
    pub x: String,
    pub y: String,
    pub y_pred: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// Header name of the parameter column: "k" or "K".
    pub param_name: String,
    pub config: serde_json::Value,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub plot: Vec<PlotPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
    pub failures: u64,
}

impl Report {
    pub fn new(command: &str, param_name: &str, cfg: &Config) -> Report {
        Report {
            command: command.to_string(),
            param_name: param_name.to_string(),
            config: serde_json::from_str(&cfg.echo_json()).unwrap(),
            rows: vec![],
            plot: vec![],
            detail: None,
            failures: 0,
        }
    }

    pub fn row(&mut self, family: &str, d: u32, param: impl ToString, stat: &str, emp: String, pred: String, res: String) {
        self.rows.push(Row {
            family: family.to_string(),
            d: d.to_string(),
            param: param.to_string(),
            statistic: stat.to_string(),
            empirical: emp,
            predicted: pred,
            residual: res,
        });
    }

    pub fn point(&mut self, x: String, y: String, y_pred: String) {
        self.plot.push(PlotPoint { x, y, y_pred });
    }

    fn header(&self) -> String {
        format!(
            "# asfam {} {} config={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            serde_json::to_string(&self.config).unwrap()
        )
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let cols = ["family", "d", &self.param_name, "statistic", "empirical", "predicted", "residual"];
        w.write_record(cols).map_err(CliError::csv)?;
        for r in &self.rows {
            w.write_record([&r.family, &r.d, &r.param, &r.statistic, &r.empirical, &r.predicted, &r.residual])
                .map_err(CliError::csv)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Other(e.to_string()))?).unwrap();
        Ok(self.header() + &body)
    }

    pub fn plot_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "y", "y_pred"]).map_err(CliError::csv)?;
        for p in &self.plot {
            w.write_record([&p.x, &p.y, &p.y_pred]).map_err(CliError::csv)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Other(e.to_string()))?).unwrap();
        Ok(self.header() + &body)
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap() + "\n"
    }

    /// Write `<command>.csv` or `<command>.json` plus `<command>.plotdata.csv`.
    pub fn emit(&self, cfg: &Config, format: Format) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(&cfg.out_dir).map_err(CliError::io)?;
        let mut written = Vec::new();
        let main = match format {
            Format::Csv => (cfg.out_path(&format!("{}.csv", self.command)), self.csv()?),
            Format::Json => (cfg.out_path(&format!("{}.json", self.command)), self.json()),
        };
        fs::write(&main.0, main.1).map_err(CliError::io)?;
        written.push(main.0);
        if !self.plot.is_empty() {
            let p = cfg.out_path(&format!("{}.plotdata.csv", self.command));
            fs::write(&p, self.plot_csv()?).map_err(CliError::io)?;
            written.push(p);
        }
        Ok(written)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f(0.25), "0.25");
        assert_eq!(fmt_f(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_f(-2.0), "-2");
        assert_eq!(fmt_f(123456.789), "123456.789");
        assert_eq!(fmt_f(1e-7), "1e-7");
        assert_eq!(fmt_f(2.5e13), "2.5e13");
        assert_eq!(fmt_f(std::f64::consts::PI * 1e5), "314159.265359");
        assert_eq!(fmt_f(-1e-20), "-1e-20");
    }

    #[test]
    fn rational_format() {
        assert_eq!(fmt_q(Q::new(71, 2)), "71/2");
        assert_eq!(fmt_q(Q::new(-6, 3)), "-2");
    }
}
