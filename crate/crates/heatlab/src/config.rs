//! Run configuration: built-in defaults, then an optional `key=value` file,
//! then command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use heatlab_core::nonlinearity::{NonlinearitySpec, WeightSpec};
use heatlab_core::radial_field::{DataSide, Domain, ProblemSpec};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub dimension: usize,
    pub r: f64,
    pub rho: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub a: f64,
    pub f: String,
    pub h: String,
    pub side: String,
    pub domain: String,
    #[serde(rename = "A")]
    pub amplification: f64,
    pub tol: f64,
    pub max_iter: usize,
    #[serde(rename = "grid_M")]
    pub grid_m: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub steps: usize,
    pub method: String,
    pub blowup_cap: f64,
    pub rho_list: Vec<f64>,
    pub taus: Vec<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub perturbation: f64,
    pub cases: usize,
    pub seed: u64,
    pub only: Vec<String>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dimension: 3,
            r: 1.0,
            rho: 0.5,
            k: 1.0,
            a: 1.0,
            f: "power:q=3".into(),
            h: "one".into(),
            side: "upper".into(),
            domain: "whole".into(),
            amplification: 2.0,
            tol: 1e-6,
            max_iter: 200,
            grid_m: 512,
            horizon: 1.0,
            steps: 200,
            method: "monotone".into(),
            blowup_cap: 1e8,
            rho_list: vec![0.25, 0.5, 0.75, 1.25, 1.5, 1.75],
            taus: (0..=8).map(|k| 1e-6 * 10f64.powf(0.5 * k as f64)).collect(),
            c0: None,
            c1: None,
            perturbation: 0.01,
            cases: 50,
            seed: 7,
            only: Vec::new(),
            out: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let v = value.trim();
    let parsed = match v {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => v.parse::<f64>(),
    };
    parsed.map_err(|_| CliError::Invalid(format!("{key}: expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value.trim().parse().map_err(|_| {
        CliError::Invalid(format!(
            "{key}: expected a non-negative integer, got '{value}'"
        ))
    })
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn list_text(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Set one key. Keys match the flag names without the leading dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key.trim() {
            "N" => self.dimension = parse_usize(key, value)?,
            "r" => self.r = parse_f64(key, value)?,
            "rho" => self.rho = parse_f64(key, value)?,
            "K" => self.k = parse_f64(key, value)?,
            "a" => self.a = parse_f64(key, value)?,
            "f" => self.f = value.to_string(),
            "h" => self.h = value.to_string(),
            "side" => self.side = value.to_string(),
            "domain" => self.domain = value.to_string(),
            "A" => self.amplification = parse_f64(key, value)?,
            "tol" => self.tol = parse_f64(key, value)?,
            "max_iter" | "max-iter" => self.max_iter = parse_usize(key, value)?,
            "grid_M" | "grid-M" => self.grid_m = parse_usize(key, value)?,
            "T" => self.horizon = parse_f64(key, value)?,
            "steps" => self.steps = parse_usize(key, value)?,
            "method" => self.method = value.to_string(),
            "blowup_cap" | "blowup-cap" => self.blowup_cap = parse_f64(key, value)?,
            "rho_list" | "rho-list" => self.rho_list = parse_list(key, value)?,
            "taus" => self.taus = parse_list(key, value)?,
            "c0" => self.c0 = Some(parse_f64(key, value)?),
            "c1" => self.c1 = Some(parse_f64(key, value)?),
            "perturbation" => self.perturbation = parse_f64(key, value)?,
            "cases" => self.cases = parse_usize(key, value)?,
            "seed" => {
                self.seed = value.parse().map_err(|_| {
                    CliError::Invalid(format!("seed: expected an integer, got '{value}'"))
                })?
            }
            "only" => {
                self.only = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Invalid(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Apply a config file: one `key=value` per line, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Invalid(format!("config line {}: expected key=value", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| CliError::Invalid(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        self.apply_text(&text)
    }

    /// The resolved configuration in config-file syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        line("N", self.dimension.to_string());
        line("r", self.r.to_string());
        line("rho", self.rho.to_string());
        line("K", self.k.to_string());
        line("a", self.a.to_string());
        line("f", self.f.clone());
        line("h", self.h.clone());
        line("side", self.side.clone());
        line("domain", self.domain.clone());
        line("A", self.amplification.to_string());
        line("tol", self.tol.to_string());
        line("max_iter", self.max_iter.to_string());
        line("grid_M", self.grid_m.to_string());
        line("T", self.horizon.to_string());
        line("steps", self.steps.to_string());
        line("method", self.method.clone());
        line("blowup_cap", self.blowup_cap.to_string());
        line("rho_list", list_text(&self.rho_list));
        line("taus", list_text(&self.taus));
        if let Some(c0) = self.c0 {
            line("c0", c0.to_string());
        }
        if let Some(c1) = self.c1 {
            line("c1", c1.to_string());
        }
        line("perturbation", self.perturbation.to_string());
        line("cases", self.cases.to_string());
        line("seed", self.seed.to_string());
        if !self.only.is_empty() {
            line("only", self.only.join(","));
        }
        if let Some(out) = &self.out {
            line("out", out.display().to_string());
        }
        out
    }

    pub fn side(&self) -> Result<DataSide, CliError> {
        match self.side.as_str() {
            "upper" => Ok(DataSide::Upper),
            "lower" => Ok(DataSide::Lower),
            other => Err(CliError::Invalid(format!(
                "side: expected 'upper' or 'lower', got '{other}'"
            ))),
        }
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        let text = self.domain.as_str();
        if text == "whole" || text == "R^N" {
            return Ok(Domain::WholeSpace);
        }
        let radius = text.strip_prefix("ball:R=").ok_or_else(|| {
            CliError::Invalid(format!(
                "domain: expected 'whole' or 'ball:R=<radius>', got '{text}'"
            ))
        })?;
        Ok(Domain::DirichletBall {
            radius: parse_f64("domain", radius)?,
        })
    }

    /// The problem at the configured `rho`.
    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        self.spec_at(self.rho)
    }

    pub fn spec_at(&self, rho: f64) -> Result<ProblemSpec, CliError> {
        let spec = ProblemSpec {
            dimension: self.dimension,
            r: self.r,
            rho,
            k: self.k,
            a: self.a,
            domain: self.domain()?,
            nonlinearity: NonlinearitySpec::parse(&self.f)?,
            weight: WeightSpec::parse(&self.h)?,
            side: self.side()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# comment\nrho = 1.5  # trailing\n\nf=exp:alpha=1\nrho_list=0.5, 1\n")
            .unwrap();
        assert_eq!(cfg.rho, 1.5);
        assert_eq!(cfg.f, "exp:alpha=1");
        assert_eq!(cfg.rho_list, vec![0.5, 1.0]);
        let mut again = RunConfig::default();
        again.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_text("rho").is_err());
        assert!(cfg.apply_text("colour=blue").is_err());
        assert!(cfg.apply_text("N=three").is_err());
        cfg.set("side", "middle").unwrap();
        assert!(cfg.spec().is_err());
    }

    #[test]
    fn spec_from_defaults() {
        let spec = RunConfig::default().spec().unwrap();
        assert_eq!(spec.dimension, 3);
        assert_eq!(spec.domain, Domain::WholeSpace);
        let mut cfg = RunConfig::default();
        cfg.set("domain", "ball:R=4").unwrap();
        assert_eq!(
            cfg.spec().unwrap().domain,
            Domain::DirichletBall { radius: 4.0 }
        );
    }
}
