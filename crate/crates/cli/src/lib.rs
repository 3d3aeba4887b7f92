//! Scenario engine: each registered scenario reproduces one construction or
//! comparison end to end with seeded determinism, emits named metrics with
//! registered tolerances, and reports pass/fail.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use gtomo::dist::EmpiricalCdf;
use gtomo::error::{GtomoError, Result};

pub mod scenarios;

/// Parameter bundle shared by every scenario; unused entries are ignored by
/// scenarios that do not need them.
#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub eps: f64,
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    pub harmonic_degree: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            eps: 0.1,
            n: 3,
            k: 2,
            samples: 100_000,
            grid: 4096,
            seed: 7,
            harmonic_degree: 24,
        }
    }
}

/// Optional overrides collected from flags and config files.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub harmonic_degree: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, mut p: Params) -> Params {
        if let Some(v) = self.eps {
            p.eps = v;
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.k {
            p.k = v;
        }
        if let Some(v) = self.samples {
            p.samples = v;
        }
        if let Some(v) = self.grid {
            p.grid = v;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = self.harmonic_degree {
            p.harmonic_degree = v;
        }
        p
    }

    /// Merges `other` on top of `self` (later wins).
    pub fn merged(&self, other: &Overrides) -> Overrides {
        Overrides {
            eps: other.eps.or(self.eps),
            n: other.n.or(self.n),
            k: other.k.or(self.k),
            samples: other.samples.or(self.samples),
            grid: other.grid.or(self.grid),
            seed: other.seed.or(self.seed),
            harmonic_degree: other.harmonic_degree.or(self.harmonic_degree),
        }
    }

    /// Parses a `key=value` configuration file (blank lines and `#`
    /// comments allowed).
    pub fn from_config_file(path: &Path) -> Result<Overrides> {
        let text = fs::read_to_string(path)?;
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                GtomoError::Parse(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let value = value.trim();
            let bad = |e: String| GtomoError::Parse(format!("config line {}: {e}", lineno + 1));
            match key.trim() {
                "eps" => o.eps = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "n" => o.n = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "k" => o.k = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "samples" => o.samples = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "grid" => o.grid = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "seed" => o.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "harmonic_degree" | "harmonic-degree" => {
                    o.harmonic_degree = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                other => {
                    return Err(GtomoError::Parse(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(o)
    }
}

/// Direction of a metric comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    /// Pass when value < threshold.
    Below,
    /// Pass when value > threshold.
    Above,
}

/// One tolerance check against a named metric.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub cmp: Cmp,
    pub pass: bool,
}

/// Metric and check accumulator used by scenario bodies.
#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn check_below(&mut self, name: &str, value: f64, threshold: f64) {
        self.metric(name, value);
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold,
            cmp: Cmp::Below,
            pass: value < threshold,
        });
    }

    pub fn check_above(&mut self, name: &str, value: f64, threshold: f64) {
        self.metric(name, value);
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold,
            cmp: Cmp::Above,
            pass: value > threshold,
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// File sink for scenario artifacts; inactive when no output directory is
/// configured.
pub struct Artifacts {
    dir: Option<PathBuf>,
    scenario: String,
    files: Vec<String>,
}

impl Artifacts {
    fn new(dir: Option<&Path>, scenario: &str) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Artifacts {
            dir: dir.map(|d| d.to_path_buf()),
            scenario: scenario.to_string(),
            files: Vec::new(),
        })
    }

    /// Writes a survival curve as two-column plain text (t, survival).
    pub fn survival_curve(&mut self, tag: &str, cdf: &EmpiricalCdf) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}_{}_survival.txt", self.scenario, tag));
            let mut buf = Vec::new();
            cdf.write_survival_curve(&mut buf)?;
            fs::write(&path, buf)?;
            self.files.push(path.display().to_string());
        }
        Ok(())
    }

    /// Writes a CDF in the CSV interchange format.
    pub fn cdf_csv(&mut self, tag: &str, cdf: &EmpiricalCdf) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}_{}.csv", self.scenario, tag));
            let mut buf = Vec::new();
            cdf.write_csv(&mut buf)?;
            fs::write(&path, buf)?;
            self.files.push(path.display().to_string());
        }
        Ok(())
    }

    /// Writes arbitrary text.
    pub fn text(&mut self, tag: &str, ext: &str, content: &str) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}_{}.{}", self.scenario, tag, ext));
            fs::write(&path, content)?;
            self.files.push(path.display().to_string());
        }
        Ok(())
    }
}

/// A registered scenario.
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: Params,
    pub run: fn(&Params, &mut Artifacts) -> Result<Outcome>,
}

/// Full record of one scenario run.
#[derive(Debug, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub description: String,
    pub params: Params,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub verdict: String,
    pub files: Vec<String>,
    pub runtime_seconds: f64,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization")
    }

    /// CSV rendering: one `scenario,kind,name,value` row per metric and
    /// check, then the verdict.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,kind,name,value\n");
        for (name, value) in &self.metrics {
            let _ = writeln!(out, "{},metric,{},{}", self.scenario, name, value);
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},check,{},{}",
                self.scenario,
                c.name,
                if c.pass { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(out, "{},verdict,,{}", self.scenario, self.verdict);
        out
    }
}

/// All registered scenarios in presentation order.
pub fn registry() -> Vec<Scenario> {
    scenarios::registry()
}

pub fn find_scenario(name: &str) -> Result<Scenario> {
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| {
            let names: Vec<&str> = registry().iter().map(|s| s.name).collect();
            GtomoError::InvalidParameter(format!(
                "unknown scenario '{name}'; registered: {}",
                names.join(", ")
            ))
        })
}

/// Runs one scenario with overrides applied to its defaults.
pub fn run_scenario(
    name: &str,
    overrides: &Overrides,
    out_dir: Option<&Path>,
) -> Result<ScenarioResult> {
    let scenario = find_scenario(name)?;
    let params = overrides.apply(scenario.defaults.clone());
    let mut artifacts = Artifacts::new(out_dir, name)?;
    let start = Instant::now();
    let outcome = (scenario.run)(&params, &mut artifacts)?;
    let runtime = start.elapsed().as_secs_f64();
    Ok(ScenarioResult {
        scenario: scenario.name.to_string(),
        description: scenario.description.to_string(),
        params,
        verdict: if outcome.pass() { "pass" } else { "fail" }.to_string(),
        metrics: outcome.metrics,
        checks: outcome.checks,
        files: artifacts.files,
        runtime_seconds: runtime,
    })
}

/// Deterministic per-scenario seed derived from a master seed (FNV-1a over
/// the name).
pub fn derive_seed(master: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ master;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}
