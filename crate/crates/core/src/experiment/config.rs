use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::assembly::CouplingMode;
use crate::error::{Error, Result};
use crate::geometry::SurfaceProfile;
use crate::solver::{PreconditionerKind, SolverOptions};
use crate::source::DEFAULT_WINDOW;

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Constant { height: f64 },
    Sine { mean: f64, amplitude: f64, frequency: f64 },
}

impl SurfaceSpec {
    pub fn profile(&self) -> Result<SurfaceProfile> {
        match *self {
            SurfaceSpec::Constant { height } => SurfaceProfile::constant(height),
            SurfaceSpec::Sine { mean, amplitude, frequency } => SurfaceProfile::sine(mean, amplitude, frequency),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub k: f64,
    pub surface: SurfaceSpec,
    pub source: [f64; 2],
    pub lambda: f64,
    /// Top of the computational cell, H.
    pub top: f64,
    /// Top of the flattening band, H₀.
    pub big_h0: f64,
    pub h0: f64,
    pub h: f64,
    pub n: usize,
    /// DtN mode cutoff; `None` selects min(nx/2, 60).
    pub j_dtn: Option<usize>,
    pub n_bc: usize,
    pub solver: SolverOptions,
    pub coupling: CouplingMode,
    pub memory_budget_mb: usize,
    pub output: Option<PathBuf>,
}

/// Reference setups 1–4: k ∈ {1, 6} crossed with (flat ζ = 1.1, source
/// (0.5, 0.4)) and (ζ = 1 + 0.1 sin 2.4t, source (π, 0.2)); Λ = 2π, H = 3,
/// H₀ = 2.95, h₀ = 1; h = 0.16 and N = 10 unless overridden.
pub fn preset(which: usize) -> Result<ExperimentConfig> {
    let (k, rough) = match which {
        1 => (1.0, false),
        2 => (6.0, false),
        3 => (1.0, true),
        4 => (6.0, true),
        _ => return Err(Error::Parameter(format!("no preset example{which}; choose 1-4"))),
    };
    let (surface, source) = if rough {
        (SurfaceSpec::Sine { mean: 1.0, amplitude: 0.1, frequency: 2.4 }, [PI, 0.2])
    } else {
        (SurfaceSpec::Constant { height: 1.1 }, [0.5, 0.4])
    };
    Ok(ExperimentConfig {
        k,
        surface,
        source,
        lambda: 2.0 * PI,
        top: 3.0,
        big_h0: 2.95,
        h0: 1.0,
        h: 0.16,
        n: 10,
        j_dtn: None,
        n_bc: DEFAULT_WINDOW,
        solver: SolverOptions::default(),
        coupling: CouplingMode::Auto,
        memory_budget_mb: 4096,
        output: None,
    })
}

const KEYS: &[&str] = &[
    "preset",
    "k",
    "surface",
    "surface.height",
    "surface.mean",
    "surface.amplitude",
    "surface.frequency",
    "source",
    "lambda",
    "H",
    "H0",
    "h0",
    "h",
    "N",
    "J_dtn",
    "N_bc",
    "tol",
    "restart",
    "maxit",
    "preconditioner",
    "coupling",
    "memory_budget_mb",
    "output",
];

/// Parses a number, allowing `pi` and `<x>*pi`.
fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if s == "pi" {
        return Some(PI);
    }
    if let Some(f) = s.strip_suffix("*pi") {
        return f.trim().parse::<f64>().ok().map(|v| v * PI);
    }
    s.parse().ok()
}

/// Parses `key = value` lines; `#` starts a comment. A `preset` line seeds
/// every field; other keys override it. Without a preset, `k`, `surface`,
/// `source`, `h` and `N` are required and the geometry defaults to
/// Λ = 2π, H = 3, H₀ = 2.95, h₀ = 1.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config { line: line_no, msg: format!("expected `key = value`, got `{line}`") })?;
        let key = key.trim();
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| Error::Config { line: line_no, msg: format!("unknown key `{key}`") })?;
        if entries.insert(known, (line_no, value.trim())).is_some() {
            return Err(Error::Config { line: line_no, msg: format!("duplicate key `{key}`") });
        }
    }
    let err = |line: usize, msg: String| Error::Config { line, msg };
    let num = |key: &str| -> Result<Option<f64>> {
        match entries.get(key) {
            None => Ok(None),
            Some(&(line, v)) => parse_number(v).map(Some).ok_or_else(|| err(line, format!("`{key}` expects a number, got `{v}`"))),
        }
    };
    let int = |key: &str| -> Result<Option<usize>> {
        match entries.get(key) {
            None => Ok(None),
            Some(&(line, v)) => v.parse().map(Some).map_err(|_| err(line, format!("`{key}` expects a nonnegative integer, got `{v}`"))),
        }
    };

    let mut cfg = match entries.get("preset") {
        Some(&(line, v)) => {
            let which = v
                .strip_prefix("example")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| err(line, format!("unknown preset `{v}`; use example1..example4")))?;
            preset(which).map_err(|e| err(line, e.to_string()))?
        }
        None => {
            for key in ["k", "surface", "source", "h", "N"] {
                if !entries.contains_key(key) {
                    return Err(err(0, format!("missing required key `{key}`")));
                }
            }
            preset(1)?
        }
    };

    if let Some(v) = num("k")? {
        cfg.k = v;
    }
    if let Some(&(line, kind)) = entries.get("surface") {
        cfg.surface = match kind {
            "constant" => SurfaceSpec::Constant {
                height: num("surface.height")?.ok_or_else(|| err(line, "constant surface needs `surface.height`".into()))?,
            },
            "sine" => SurfaceSpec::Sine {
                mean: num("surface.mean")?.ok_or_else(|| err(line, "sine surface needs `surface.mean`".into()))?,
                amplitude: num("surface.amplitude")?.ok_or_else(|| err(line, "sine surface needs `surface.amplitude`".into()))?,
                frequency: num("surface.frequency")?.ok_or_else(|| err(line, "sine surface needs `surface.frequency`".into()))?,
            },
            other => return Err(err(line, format!("unknown surface `{other}`; use constant or sine"))),
        };
    } else {
        for key in ["surface.height", "surface.mean", "surface.amplitude", "surface.frequency"] {
            if let Some(&(line, _)) = entries.get(key) {
                return Err(err(line, format!("`{key}` given without `surface`")));
            }
        }
    }
    if let Some(&(line, v)) = entries.get("source") {
        let parts: Vec<Option<f64>> = v.split(',').map(parse_number).collect();
        match parts.as_slice() {
            [Some(a), Some(b)] => cfg.source = [*a, *b],
            _ => return Err(err(line, format!("`source` expects `y1, y2`, got `{v}`"))),
        }
    }
    for (key, slot) in [("lambda", &mut cfg.lambda), ("H", &mut cfg.top), ("H0", &mut cfg.big_h0), ("h0", &mut cfg.h0), ("h", &mut cfg.h)] {
        if let Some(v) = num(key)? {
            *slot = v;
        }
    }
    if let Some(v) = int("N")? {
        cfg.n = v;
    }
    if let Some(&(line, v)) = entries.get("J_dtn") {
        cfg.j_dtn = if v == "auto" {
            None
        } else {
            Some(v.parse().map_err(|_| err(line, format!("`J_dtn` expects an integer or auto, got `{v}`")))?)
        };
    }
    if let Some(v) = int("N_bc")? {
        cfg.n_bc = v;
    }
    if let Some(v) = num("tol")? {
        cfg.solver.tol = v;
    }
    if let Some(v) = int("restart")? {
        cfg.solver.restart = v;
    }
    if let Some(v) = int("maxit")? {
        cfg.solver.maxit = v;
    }
    if let Some(&(line, v)) = entries.get("preconditioner") {
        cfg.solver.preconditioner = v.parse::<PreconditionerKind>().map_err(|e| err(line, e.to_string()))?;
    }
    if let Some(v) = int("memory_budget_mb")? {
        cfg.memory_budget_mb = v;
    }
    if let Some(&(line, v)) = entries.get("coupling") {
        cfg.coupling = match v {
            "auto" => CouplingMode::Auto,
            "explicit" => CouplingMode::Explicit,
            "matrix_free" => CouplingMode::MatrixFree,
            other => return Err(err(line, format!("unknown coupling mode `{other}`"))),
        };
    }
    if let Some(&(_, v)) = entries.get("output") {
        cfg.output = Some(PathBuf::from(v));
    }
    cfg.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Checks the parameter invariants that do not need the mesh.
    pub fn validate(&self) -> Result<()> {
        let positive = [("k", self.k), ("lambda", self.lambda), ("H", self.top), ("H0", self.big_h0), ("h0", self.h0), ("h", self.h)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("`{name}` must be positive, got {v}")));
            }
        }
        if !(self.h0 < self.big_h0 && self.big_h0 < self.top) {
            return Err(Error::Parameter(format!("need h0 < H0 < H, got {} {} {}", self.h0, self.big_h0, self.top)));
        }
        if self.n < 2 || self.n % 2 != 0 {
            return Err(Error::Parameter(format!("`N` must be even and >= 2, got {}", self.n)));
        }
        if self.n_bc < self.n / 2 {
            return Err(Error::Parameter(format!("`N_bc` = {} is below N/2", self.n_bc)));
        }
        let profile = self.surface.profile()?;
        if profile.sup_height() >= self.big_h0 {
            return Err(Error::Parameter(format!("surface top {} is not below H0", profile.sup_height())));
        }
        if !(self.source[1] > 0.0 && self.source[1] < self.h0.min(profile.inf_height())) {
            return Err(Error::Parameter(format!("source height {} must lie in (0, min(h0, inf surface))", self.source[1])));
        }
        self.solver.validate()
    }

    /// Emits every field as `key = value` lines accepted by [`parse_config`].
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "k = {:?}", self.k);
        match self.surface {
            SurfaceSpec::Constant { height } => {
                let _ = writeln!(s, "surface = constant\nsurface.height = {height:?}");
            }
            SurfaceSpec::Sine { mean, amplitude, frequency } => {
                let _ = writeln!(
                    s,
                    "surface = sine\nsurface.mean = {mean:?}\nsurface.amplitude = {amplitude:?}\nsurface.frequency = {frequency:?}"
                );
            }
        }
        let _ = writeln!(s, "source = {:?}, {:?}", self.source[0], self.source[1]);
        let _ = writeln!(s, "lambda = {:?}\nH = {:?}\nH0 = {:?}\nh0 = {:?}", self.lambda, self.top, self.big_h0, self.h0);
        let _ = writeln!(s, "h = {:?}\nN = {}", self.h, self.n);
        match self.j_dtn {
            Some(j) => {
                let _ = writeln!(s, "J_dtn = {j}");
            }
            None => {
                let _ = writeln!(s, "J_dtn = auto");
            }
        }
        let _ = writeln!(s, "N_bc = {}", self.n_bc);
        let _ = writeln!(
            s,
            "tol = {:?}\nrestart = {}\nmaxit = {}\npreconditioner = {}",
            self.solver.tol,
            self.solver.restart,
            self.solver.maxit,
            self.solver.preconditioner.name()
        );
        let mode = match self.coupling {
            CouplingMode::Auto => "auto",
            CouplingMode::Explicit => "explicit",
            CouplingMode::MatrixFree => "matrix_free",
        };
        let _ = writeln!(s, "coupling = {mode}\nmemory_budget_mb = {}", self.memory_budget_mb);
        if let Some(p) = &self.output {
            let _ = writeln!(s, "output = {}", p.display());
        }
        s
    }
}
