//! Flat key = value configuration documents with dotted section keys.
//!
//! Unknown keys are hard errors; omitted keys fall back to defaults
//! (hbar = 1, epsilon = 1e-3, 64-point quadrature, unit masses and box).

use std::collections::BTreeMap;

use billiard_core::{BoxSpec, QuadConfig, QuantumNumbers, Shape, ThetaParams};
use num_complex::Complex64;

use crate::CliError;

/// Every key a config document may contain.
const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "shape",
    "output",
    "box.m1",
    "box.m2",
    "box.d",
    "box.hbar",
    "box.a",
    "box.b",
    "state.qn",
    "state.coeffs",
    "time.start",
    "time.end",
    "time.steps",
    "theta.n_max",
    "theta.tol",
    "theta.epsilon",
    "quad.order",
    "quad.refine_tol",
    "grid.nx",
    "grid.ny",
    "greens.samples",
    "greens.n_cut",
    "greens.seed",
    "greens.time_max",
    "domain.family",
    "domain.impenetrable",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Eigen,
    Evolve,
    Covariance,
    GreensCheck,
    Domain,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Eigen => "eigen",
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::Covariance => "covariance",
            ScenarioKind::GreensCheck => "greens-check",
            ScenarioKind::Domain => "domain",
        }
    }

    /// Default output file stem.
    pub fn stem(self) -> &'static str {
        match self {
            ScenarioKind::Eigen => "eigen",
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::Covariance => "covariance",
            ScenarioKind::GreensCheck => "greens_check",
            ScenarioKind::Domain => "domain",
        }
    }
}

/// Uniform sample times: `steps` samples from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + k as f64 * h).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainFamily {
    Com,
    Shape,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensConfig {
    pub samples: usize,
    pub n_cut: u32,
    pub seed: u64,
    pub time_max: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub spec: BoxSpec,
    pub shape: Shape,
    pub qn: Vec<QuantumNumbers>,
    pub coeffs: Vec<Complex64>,
    pub time: TimeGrid,
    pub theta: ThetaParams,
    pub quad: QuadConfig,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub greens: GreensConfig,
    pub domain_family: DomainFamily,
    pub impenetrable: bool,
    pub output: Option<String>,
}

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse {
                    line: line_no,
                    msg: format!("expected `key = value`, got {line:?}"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Parse {
                    line: line_no,
                    msg: format!("unknown key {key:?}"),
                });
            }
            if entries.insert(key.clone(), (line_no, value)).is_some() {
                return Err(CliError::Parse {
                    line: line_no,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }
        Ok(RawConfig { entries })
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((line, value)) => value.parse().map_err(|_| CliError::Parse {
                line: *line,
                msg: format!("cannot parse {key} value {value:?}"),
            }),
        }
    }

    fn get_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|_| CliError::Parse {
                line: *line,
                msg: format!("cannot parse {key} value {value:?}"),
            }),
        }
    }
}

fn parse_shape(name: &str, line: usize) -> Result<Shape, CliError> {
    Shape::ALL
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| CliError::Parse {
            line,
            msg: format!(
                "unknown shape {name:?}; expected one of {}",
                Shape::ALL
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        })
}

/// Parse `n1,n2; n1,n2; ...` into quantum-number pairs.
fn parse_qn_list(value: &str, line: usize) -> Result<Vec<QuantumNumbers>, CliError> {
    let mut out = Vec::new();
    for part in value.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((a, b)) = part.split_once(',') else {
            return Err(CliError::Parse {
                line,
                msg: format!("quantum numbers need the form `n1,n2`, got {part:?}"),
            });
        };
        let parse = |s: &str| {
            s.trim().parse::<u32>().map_err(|_| CliError::Parse {
                line,
                msg: format!("cannot parse quantum number {s:?}"),
            })
        };
        out.push(QuantumNumbers::new(parse(a)?, parse(b)?)?);
    }
    if out.is_empty() {
        return Err(CliError::Parse {
            line,
            msg: "state.qn lists no modes".into(),
        });
    }
    Ok(out)
}

/// Parse `re,im; re,im; ...` into complex coefficients.
fn parse_coeff_list(value: &str, line: usize) -> Result<Vec<Complex64>, CliError> {
    let mut out = Vec::new();
    for part in value.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((re, im)) = part.split_once(',') else {
            return Err(CliError::Parse {
                line,
                msg: format!("coefficients need the form `re,im`, got {part:?}"),
            });
        };
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| CliError::Parse {
                line,
                msg: format!("cannot parse coefficient component {s:?}"),
            })
        };
        out.push(Complex64::new(parse(re)?, parse(im)?));
    }
    Ok(out)
}

pub fn parse_config(text: &str, scenario: ScenarioKind) -> Result<RunConfig, CliError> {
    let raw = RawConfig::parse(text)?;

    if let Some((line, value)) = raw.raw("scenario") {
        if value != scenario.name() {
            return Err(CliError::Parse {
                line: *line,
                msg: format!(
                    "config names scenario {value:?} but the command line selected {:?}",
                    scenario.name()
                ),
            });
        }
    }

    let spec = BoxSpec::new(
        raw.get("box.m1", 1.0)?,
        raw.get("box.m2", 1.0)?,
        raw.get("box.d", 1.0)?,
    )?
    .with_hbar(raw.get("box.hbar", 1.0)?)?
    .with_scales(raw.get("box.a", 1.0)?, raw.get("box.b", 1.0)?)?;

    let shape = match raw.raw("shape") {
        None => Shape::TwoParticleBox,
        Some((line, value)) => parse_shape(value, *line)?,
    };

    let qn = match raw.raw("state.qn") {
        None => vec![QuantumNumbers::new(1, 1)?],
        Some((line, value)) => parse_qn_list(value, *line)?,
    };
    let coeffs = match raw.raw("state.coeffs") {
        None => vec![Complex64::new(1.0, 0.0); qn.len()],
        Some((line, value)) => {
            let coeffs = parse_coeff_list(value, *line)?;
            if coeffs.len() != qn.len() {
                return Err(CliError::Validation(format!(
                    "state.coeffs lists {} entries for {} modes",
                    coeffs.len(),
                    qn.len()
                )));
            }
            coeffs
        }
    };

    let start = raw.get("time.start", 0.0)?;
    let time = TimeGrid {
        start,
        end: raw.get("time.end", start)?,
        steps: raw.get("time.steps", 1_usize)?,
    };
    if !(time.start.is_finite() && time.end.is_finite()) {
        return Err(CliError::Validation(format!(
            "time grid must be finite, got [{}, {}]",
            time.start, time.end
        )));
    }
    if time.steps == 0 {
        return Err(CliError::Validation("time.steps must be >= 1".into()));
    }
    if time.end < time.start {
        return Err(CliError::Validation(format!(
            "time grid must be monotone: time.end = {} < time.start = {}",
            time.end, time.start
        )));
    }

    let theta = ThetaParams {
        n_max: raw.get("theta.n_max", 256_usize)?,
        tol: raw.get("theta.tol", 1e-14)?,
        epsilon: raw.get("theta.epsilon", 1e-3)?,
    };
    theta.validate()?;

    let quad = QuadConfig {
        order: raw.get("quad.order", 64_usize)?,
        refine_tol: raw.get_opt("quad.refine_tol")?,
    };
    if quad.order == 0 {
        return Err(CliError::Validation("quad.order must be >= 1".into()));
    }
    if let Some(tol) = quad.refine_tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Validation(format!(
                "quad.refine_tol must be positive, got {tol}"
            )));
        }
    }

    let grid_nx = raw.get("grid.nx", 129_usize)?;
    let grid_ny = raw.get("grid.ny", 129_usize)?;
    if grid_nx < 2 || grid_ny < 2 {
        return Err(CliError::Validation(format!(
            "grid needs at least 2 nodes per axis, got {grid_nx} x {grid_ny}"
        )));
    }

    let greens = GreensConfig {
        samples: raw.get("greens.samples", 100_usize)?,
        n_cut: raw.get("greens.n_cut", 110_u32)?,
        seed: raw.get("greens.seed", 1_u64)?,
        time_max: raw.get("greens.time_max", 1.0)?,
    };
    if greens.samples == 0 {
        return Err(CliError::Validation("greens.samples must be >= 1".into()));
    }
    if greens.n_cut == 0 {
        return Err(CliError::Validation("greens.n_cut must be >= 1".into()));
    }
    if !(greens.time_max > 0.0 && greens.time_max.is_finite()) {
        return Err(CliError::Validation(format!(
            "greens.time_max must be positive, got {}",
            greens.time_max
        )));
    }

    let domain_family = match raw.raw("domain.family") {
        None => DomainFamily::Com,
        Some((_, v)) if v == "com" => DomainFamily::Com,
        Some((_, v)) if v == "shape" => DomainFamily::Shape,
        Some((line, v)) => {
            return Err(CliError::Parse {
                line: *line,
                msg: format!("domain.family must be `com` or `shape`, got {v:?}"),
            })
        }
    };
    let impenetrable = raw.get("domain.impenetrable", false)?;

    let output = match raw.raw("output") {
        None => None,
        Some((line, value)) => {
            if value.is_empty() || value.contains('/') || value.contains('\\') {
                return Err(CliError::Parse {
                    line: *line,
                    msg: format!("output must be a bare file stem, got {value:?}"),
                });
            }
            Some(value.clone())
        }
    };

    Ok(RunConfig {
        scenario,
        spec,
        shape,
        qn,
        coeffs,
        time,
        theta,
        quad,
        grid_nx,
        grid_ny,
        greens,
        domain_family,
        impenetrable,
        output,
    })
}

impl RunConfig {
    pub fn stem(&self) -> &str {
        self.output.as_deref().unwrap_or(self.scenario.stem())
    }
}
