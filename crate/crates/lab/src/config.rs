use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cesaro_core::funcspace::Grading;
use cesaro_core::Complex64;

use crate::error::LabError;

pub const OUT_ENV: &str = "CESARO_LAB_OUT";

/// Run parameters. Precedence is defaults, then the config file, then flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Graded panels toward each endpoint.
    pub panels: usize,
    pub interior_panels: usize,
    pub nodes_per_panel: usize,
    pub ratio: f64,
    /// Half width of the line grid.
    pub line_width: f64,
    /// Points of the line grid, a power of two.
    pub fft_size: usize,
    /// Tolerance for residual-type checks.
    pub tol: f64,
    pub t_list: Vec<f64>,
    pub lambda_list: Vec<Complex64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let g = Grading::default();
        ExperimentConfig {
            panels: g.graded_per_side,
            interior_panels: g.interior_panels,
            nodes_per_panel: g.nodes_per_panel,
            ratio: g.ratio,
            line_width: 40.0,
            fft_size: 1 << 14,
            tol: 1e-6,
            t_list: vec![0.5, 1.0, 2.0],
            lambda_list: vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.1),
                Complex64::new(3.0, 0.0),
                Complex64::new(1.0, 2.0),
                Complex64::new(-1.0, 0.0),
            ],
            out: None,
            seed: cesaro_core::suite::DEFAULT_SEED,
        }
    }
}

impl ExperimentConfig {
    pub fn grading(&self) -> Grading {
        Grading {
            graded_per_side: self.panels,
            interior_panels: self.interior_panels,
            nodes_per_panel: self.nodes_per_panel,
            ratio: self.ratio,
            ..Grading::default()
        }
    }

    /// Sets one `key = value` entry; keys match the long flag names with
    /// dashes or underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "panels" => self.panels = parse(value)?,
            "interior-panels" => self.interior_panels = parse(value)?,
            "nodes-per-panel" => self.nodes_per_panel = parse(value)?,
            "ratio" => self.ratio = parse(value)?,
            "line-width" => self.line_width = parse(value)?,
            "fft-size" => self.fft_size = parse(value)?,
            "tol" => self.tol = parse(value)?,
            "t" => self.t_list = parse_list(value, parse)?,
            "lambda" => self.lambda_list = parse_list(value, parse_complex)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies a file of `key = value` lines; blank lines and `#` comments
    /// are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), LabError> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
            self.set(key, value).map_err(|e| LabError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.panels == 0 || self.interior_panels == 0 || self.nodes_per_panel == 0 {
            return bad("panel counts and nodes per panel must be positive".into());
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return bad(format!("grading ratio {} must lie in (0, 1)", self.ratio));
        }
        if !(self.line_width > 0.0 && self.line_width.is_finite()) {
            return bad(format!("line width {} must be positive", self.line_width));
        }
        if self.fft_size < 16 || !self.fft_size.is_power_of_two() {
            return bad(format!("fft size {} must be a power of two >= 16", self.fft_size));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tolerance {} must lie in (0, 1)", self.tol));
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("t list must be nonempty and positive".into());
        }
        if self.lambda_list.is_empty() || self.lambda_list.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
            return bad("lambda list must be nonempty and finite".into());
        }
        Ok(())
    }

    /// Output directory: the configured one, else `$CESARO_LAB_OUT`, else
    /// `lab-out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("lab-out"))
    }
}

fn parse<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').map(|p| item(p.trim())).collect()
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || format!("cannot parse complex number `{s}`");
    let Some(body) = s.strip_suffix('i') else {
        return parse::<f64>(&s).map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse::<f64>(&body[..k]).map_err(|_| err())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse::<f64>(other).map_err(|_| err())?,
    };
    Ok(Complex64::new(re, im))
}
