//! Check results, curve rows and the files a run writes.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// One asserted property.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One row of `curve.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub series: String,
    pub x: f64,
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub samples: u64,
}

/// Everything a suite or experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub name: String,
    pub checks: Vec<Check>,
    pub curve: Vec<CurveRow>,
    pub fits: Map<String, Value>,
    pub meta: Map<String, Value>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn row(&mut self, series: &str, x: f64, estimate: f64, ci_halfwidth: f64, samples: u64) {
        self.curve.push(CurveRow {
            series: series.to_string(),
            x,
            estimate,
            ci_halfwidth,
            samples,
        });
    }

    pub fn fit(&mut self, key: &str, v: impl Serialize) {
        self.fits.insert(
            key.to_string(),
            serde_json::to_value(v).expect("serializable"),
        );
    }

    pub fn meta(&mut self, key: &str, v: impl Serialize) {
        self.meta.insert(
            key.to_string(),
            serde_json::to_value(v).expect("serializable"),
        );
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Appends another report's content under its own name.
    pub fn absorb(&mut self, other: Report) {
        let tag = other.name.clone();
        for mut c in other.checks {
            c.name = format!("{tag}/{}", c.name);
            self.checks.push(c);
        }
        for mut r in other.curve {
            r.series = format!("{tag}/{}", r.series);
            self.curve.push(r);
        }
        self.fits.insert(tag.clone(), Value::Object(other.fits));
        if !other.meta.is_empty() {
            self.meta.insert(tag, Value::Object(other.meta));
        }
    }

    /// Writes `curve.csv`, `meta.json` and `fit.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("curve.csv"))?;
        if self.curve.is_empty() {
            w.write_record(["series", "x", "estimate", "ci_halfwidth", "samples"])?;
        }
        for r in &self.curve {
            w.serialize(r)?;
        }
        w.flush()?;
        let mut meta = self.meta.clone();
        meta.insert("name".into(), Value::String(self.name.clone()));
        meta.insert("ci_method".into(), Value::String("clopper-pearson".into()));
        meta.insert(
            "version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        meta.insert("build".into(), Value::String(env!("PERCLAB_BUILD").into()));
        fs::write(
            dir.join("meta.json"),
            serde_json::to_string_pretty(&meta)? + "\n",
        )?;
        let fit = serde_json::json!({
            "passed": self.passed(),
            "checks": self.checks,
            "fits": self.fits,
        });
        fs::write(
            dir.join("fit.json"),
            serde_json::to_string_pretty(&fit)? + "\n",
        )?;
        Ok(())
    }
}
