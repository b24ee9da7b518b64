//! Line-oriented scenario files: `[section]` headers, `key = value` lines,
//! `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use cavelast_core::energy::CavityDetection;
use cavelast_core::geometry::{BoundaryTag, DomainShape, Puncture};
use cavelast_core::material::{BulkDensity, BulkKind, SurfaceDensity, VolumetricTable};
use cavelast_core::variation::MinimizeOptions;
use cavelast_core::{Mat2, Vec2};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Minimize,
    Evaluate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    /// `d(x) = λ x`.
    Radial { lambda: f64 },
    /// `d(x) = diag(λ, 1) x`.
    Affine { lambda: f64 },
    /// CSV `vertex,x,y` with one row per Dirichlet vertex.
    Table { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Boundary datum extended to the whole domain (identity for tables).
    Boundary,
    Identity,
    /// Boundary datum with a cavity of radius `radius` opened at every puncture.
    CavitySeed { radius: f64 },
    /// Deformed positions from a `deformed.csv` of an earlier run.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub shape: DomainShape,
    pub h: f64,
    pub structured: bool,
    pub outer_tag: BoundaryTag,
    pub punctures: Vec<Puncture>,
    /// Mesh read from a file instead of generated.
    pub mesh_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Emit {
    pub svg: bool,
    pub csv: bool,
    pub raster: bool,
    pub inverse: bool,
}

impl Emit {
    pub fn all() -> Self {
        Self { svg: true, csv: true, raster: true, inverse: true }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let mut e = Self::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "svg" => e.svg = true,
                "csv" => e.csv = true,
                "raster" => e.raster = true,
                "inverse" => e.inverse = true,
                "none" => {}
                other => return Err(format!("unknown artifact '{other}' (expected svg, csv, raster, inverse)")),
            }
        }
        Ok(e)
    }

    pub fn to_list(&self) -> String {
        let names: Vec<&str> = [(self.svg, "svg"), (self.csv, "csv"), (self.raster, "raster"), (self.inverse, "inverse")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| *n)
            .collect();
        if names.is_empty() {
            "none".into()
        } else {
            names.join(",")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub emit: Emit,
    /// Cell size of the degree and inverse rasters.
    pub raster_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: Mode,
    pub seed: u64,
    /// Name of a radial golden file to compare the summary against.
    pub golden: Option<String>,
    pub domain: DomainConfig,
    pub material: BulkDensity,
    pub surface: SurfaceDensity,
    pub boundary: BoundaryKind,
    pub initial: InitialGuess,
    pub solver: MinimizeOptions,
    pub detection: CavityDetection,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            mode: Mode::Minimize,
            seed: 0,
            golden: None,
            domain: DomainConfig {
                shape: DomainShape::Disk { radius: 1.0 },
                h: 0.1,
                structured: true,
                outer_tag: BoundaryTag::Dirichlet,
                punctures: vec![],
                mesh_file: None,
            },
            material: BulkDensity::default(),
            surface: SurfaceDensity::Isotropic,
            boundary: BoundaryKind::Radial { lambda: 1.0 },
            initial: InitialGuess::Boundary,
            solver: MinimizeOptions::default(),
            detection: CavityDetection::default(),
            output: OutputConfig { dir: PathBuf::from("out"), emit: Emit::all(), raster_delta: 0.01 },
        }
    }
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Raw `(section, key) → value` map that remembers line numbers.
struct Raw {
    entries: BTreeMap<(String, String), Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::parse(line, None, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::parse(line, None, format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| CliError::parse(line, None, format!("expected 'key = value', got '{content}'")))?;
            let key = k.trim().to_string();
            let sec = section
                .clone()
                .ok_or_else(|| CliError::parse(line, Some(&key), "key outside of any [section]"))?;
            if let Some(prev) = entries.get(&(sec.clone(), key.clone())) {
                return Err(CliError::parse(
                    line,
                    Some(&format!("{sec}.{key}")),
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
            entries.insert((sec, key), Entry { value: v.trim().to_string(), line, used: false });
        }
        Ok(Self { entries })
    }

    fn take(&mut self, sec: &str, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(&(sec.to_string(), key.to_string())).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn get<T: std::str::FromStr>(&mut self, sec: &str, key: &str, default: T) -> Result<T, CliError> {
        match self.take(sec, key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse::<T>()
                .map_err(|_| CliError::parse(line, Some(&format!("{sec}.{key}")), format!("cannot parse '{v}'"))),
        }
    }

    fn required<T: std::str::FromStr>(&mut self, sec: &str, key: &str) -> Result<T, CliError> {
        let line = self.section_line(sec);
        match self.take(sec, key) {
            None => Err(CliError::parse(line, Some(&format!("{sec}.{key}")), "missing required key")),
            Some((v, line)) => v
                .parse::<T>()
                .map_err(|_| CliError::parse(line, Some(&format!("{sec}.{key}")), format!("cannot parse '{v}'"))),
        }
    }

    fn section_line(&self, sec: &str) -> usize {
        self.entries
            .iter()
            .filter(|((s, _), _)| s == sec)
            .map(|(_, e)| e.line)
            .min()
            .unwrap_or(0)
    }

    fn floats(&mut self, sec: &str, key: &str) -> Result<Option<(Vec<f64>, usize)>, CliError> {
        let Some((v, line)) = self.take(sec, key) else {
            return Ok(None);
        };
        let vals = v
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::parse(line, Some(&format!("{sec}.{key}")), format!("cannot parse numbers in '{v}'")))?;
        Ok(Some((vals, line)))
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some(((s, k), e)) = self.entries.iter().find(|(_, e)| !e.used) {
            return Err(CliError::parse(e.line, Some(&format!("{s}.{k}")), "unknown key"));
        }
        Ok(())
    }
}

const SECTIONS: [&str; 10] = [
    "run", "domain", "material", "surface", "boundary", "initial", "solver", "detection", "output", "radial",
];

fn bad(line: usize, key: &str, msg: impl Into<String>) -> CliError {
    CliError::parse(line, Some(key), msg)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = Raw::parse(text)?;
        let d = Self::default();

        let name = raw.get("run", "name", d.name.clone())?;
        let mode = match raw.take("run", "mode") {
            None => d.mode,
            Some((v, line)) => match v.as_str() {
                "minimize" => Mode::Minimize,
                "evaluate" => Mode::Evaluate,
                _ => return Err(bad(line, "run.mode", format!("expected minimize or evaluate, got '{v}'"))),
            },
        };
        let seed = raw.get("run", "seed", d.seed)?;
        let golden = raw.take("run", "golden").map(|(v, _)| v);

        let (shape_name, shape_line) = raw.take("domain", "shape").unwrap_or(("disk".into(), 0));
        let shape = match shape_name.as_str() {
            "disk" => DomainShape::Disk { radius: raw.get("domain", "radius", 1.0)? },
            "square" => DomainShape::Square { side: raw.get("domain", "side", 1.0)? },
            "annulus" => DomainShape::Annulus {
                inner: raw.required("domain", "inner")?,
                outer: raw.required("domain", "outer")?,
            },
            other => return Err(bad(shape_line, "domain.shape", format!("expected disk, square or annulus, got '{other}'"))),
        };
        let h = raw.get("domain", "h", d.domain.h)?;
        let structured = raw.get("domain", "structured", d.domain.structured)?;
        let outer_tag = match raw.take("domain", "outer_tag") {
            None => d.domain.outer_tag,
            Some((v, line)) => match v.as_str() {
                "dirichlet" => BoundaryTag::Dirichlet,
                "free" => BoundaryTag::Free,
                _ => return Err(bad(line, "domain.outer_tag", format!("expected dirichlet or free, got '{v}'"))),
            },
        };
        let punctures = match raw.take("domain", "punctures") {
            None => vec![],
            Some((v, line)) => parse_punctures(&v).map_err(|m| bad(line, "domain.punctures", m))?,
        };
        let mesh_file = raw.take("domain", "mesh_file").map(|(v, _)| PathBuf::from(v));

        let (kind_name, kind_line) = raw.take("material", "kind").unwrap_or(("compressible".into(), 0));
        let mu = raw.get("material", "mu", 1.0)?;
        let a = raw.get("material", "a", 1.0)?;
        let b = raw.get("material", "b", 1.0)?;
        let p = raw.get("material", "p", 2.0)?;
        let kind = match kind_name.as_str() {
            "compressible" => BulkKind::DefaultCompressible,
            "table" => {
                let (hs, line) = raw
                    .floats("material", "table_h")?
                    .ok_or_else(|| bad(kind_line, "material.table_h", "missing required key"))?;
                let (gs, _) = raw
                    .floats("material", "table_gamma")?
                    .ok_or_else(|| bad(kind_line, "material.table_gamma", "missing required key"))?;
                BulkKind::UserTable(VolumetricTable::new(hs, gs).map_err(|e| bad(line, "material.table_h", e.to_string()))?)
            }
            other => return Err(bad(kind_line, "material.kind", format!("expected compressible or table, got '{other}'"))),
        };
        let material = BulkDensity::new(kind, mu, a, b, p).map_err(|e| bad(kind_line, "material", e.to_string()))?;

        let (sk, sk_line) = raw.take("surface", "kind").unwrap_or(("isotropic".into(), 0));
        let surface = match sk.as_str() {
            "isotropic" => SurfaceDensity::Isotropic,
            "elliptic" => {
                let a11: f64 = raw.required("surface", "a11")?;
                let a12: f64 = raw.get("surface", "a12", 0.0)?;
                let a22: f64 = raw.required("surface", "a22")?;
                SurfaceDensity::elliptic(Mat2::new(a11, a12, a12, a22))
                    .map_err(|e| bad(sk_line, "surface.kind", e.to_string()))?
            }
            "smoothed_l1" => {
                let eps: f64 = raw.required("surface", "eps")?;
                SurfaceDensity::smoothed_l1(eps).map_err(|e| bad(sk_line, "surface.eps", e.to_string()))?
            }
            other => {
                return Err(bad(sk_line, "surface.kind", format!("expected isotropic, elliptic or smoothed_l1, got '{other}'")))
            }
        };

        let (bk, bk_line) = raw.take("boundary", "kind").unwrap_or(("radial".into(), 0));
        let boundary = match bk.as_str() {
            "radial" => BoundaryKind::Radial { lambda: raw.get("boundary", "lambda", 1.0)? },
            "affine" => BoundaryKind::Affine { lambda: raw.get("boundary", "lambda", 1.0)? },
            "table" => BoundaryKind::Table { path: PathBuf::from(raw.required::<String>("boundary", "table")?) },
            other => return Err(bad(bk_line, "boundary.kind", format!("expected radial, affine or table, got '{other}'"))),
        };

        let (ik, ik_line) = raw.take("initial", "kind").unwrap_or(("boundary".into(), 0));
        let initial = match ik.as_str() {
            "boundary" => InitialGuess::Boundary,
            "identity" => InitialGuess::Identity,
            "cavity_seed" => InitialGuess::CavitySeed { radius: raw.required("initial", "seed_radius")? },
            "file" => InitialGuess::File { path: PathBuf::from(raw.required::<String>("initial", "file")?) },
            other => {
                return Err(bad(ik_line, "initial.kind", format!("expected boundary, identity, cavity_seed or file, got '{other}'")))
            }
        };

        let s = &d.solver;
        let inv_delta = match raw.take("solver", "inv_delta") {
            None => s.inv_delta,
            Some((v, _)) if v == "auto" => None,
            Some((v, line)) => Some(v.parse().map_err(|_| bad(line, "solver.inv_delta", format!("cannot parse '{v}'")))?),
        };
        let solver = MinimizeOptions {
            max_iters: raw.get("solver", "max_iters", s.max_iters)?,
            tol_energy: raw.get("solver", "tol_energy", s.tol_energy)?,
            tol_residual: raw.get("solver", "tol_residual", s.tol_residual)?,
            det_floor: raw.get("solver", "det_floor", s.det_floor)?,
            inv_every: raw.get("solver", "inv_every", s.inv_every)?,
            inv_delta,
            inv_budget: raw.get("solver", "inv_budget", s.inv_budget)?,
            inv_radii: raw.get("solver", "inv_radii", s.inv_radii)?,
            memory: raw.get("solver", "memory", s.memory)?,
            armijo: raw.get("solver", "armijo", s.armijo)?,
            max_backtracks: raw.get("solver", "max_backtracks", s.max_backtracks)?,
        };

        let c = &d.detection;
        let detection = CavityDetection {
            slow_path: raw.get("detection", "slow_path", c.slow_path)?,
            delta: raw.get("detection", "delta", c.delta)?,
            radii: raw.get("detection", "radii", c.radii)?,
            check_inv: raw.get("detection", "check_inv", c.check_inv)?,
            inv_radii: raw.get("detection", "inv_radii", c.inv_radii)?,
            inv_budget: raw.get("detection", "inv_budget", c.inv_budget)?,
        };

        let emit = match raw.take("output", "emit") {
            None => d.output.emit,
            Some((v, line)) => Emit::parse(&v).map_err(|m| bad(line, "output.emit", m))?,
        };
        let output = OutputConfig {
            dir: PathBuf::from(raw.get::<String>("output", "dir", d.output.dir.to_string_lossy().into_owned())?),
            emit,
            raster_delta: raw.get("output", "raster_delta", d.output.raster_delta)?,
        };
        raw.finish()?;

        let cfg = Self {
            name,
            mode,
            seed,
            golden,
            domain: DomainConfig { shape, h, structured, outer_tag, punctures, mesh_file },
            material,
            surface,
            boundary,
            initial,
            solver,
            detection,
            output,
        };
        Ok(cfg)
    }

    /// Checks that do not need the mesh: positive tolerances and sizes,
    /// puncture radii below a quarter of the inradius.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.solver;
        let positive = [
            ("domain.h", self.domain.h),
            ("solver.tol_energy", s.tol_energy),
            ("solver.tol_residual", s.tol_residual),
            ("solver.det_floor", s.det_floor),
            ("solver.armijo", s.armijo),
            ("detection.delta", self.detection.delta),
            ("output.raster_delta", self.output.raster_delta),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Invalid(format!("{k} must be positive, got {v}")));
            }
        }
        if let Some(d) = s.inv_delta {
            if !(d > 0.0) {
                return Err(CliError::Invalid(format!("solver.inv_delta must be positive, got {d}")));
            }
        }
        if s.max_iters == 0 || s.memory == 0 || s.max_backtracks == 0 {
            return Err(CliError::Invalid("solver.max_iters, memory and max_backtracks must be at least 1".into()));
        }
        if !(s.armijo < 1.0) {
            return Err(CliError::Invalid(format!("solver.armijo must be below 1, got {}", s.armijo)));
        }
        let inr = self.domain.shape.inradius();
        for (k, p) in self.domain.punctures.iter().enumerate() {
            if !(p.radius > 0.0 && p.radius < inr / 4.0) {
                return Err(CliError::Invalid(format!(
                    "puncture {k} radius {} must lie in (0, inradius/4) = (0, {})",
                    p.radius,
                    inr / 4.0
                )));
            }
        }
        match self.boundary {
            BoundaryKind::Radial { lambda } | BoundaryKind::Affine { lambda } if !(lambda > 0.0) => {
                return Err(CliError::Invalid(format!("boundary.lambda must be positive, got {lambda}")));
            }
            _ => {}
        }
        if let InitialGuess::CavitySeed { radius } = self.initial {
            if !(radius > 0.0) {
                return Err(CliError::Invalid(format!("initial.seed_radius must be positive, got {radius}")));
            }
        }
        Ok(())
    }

    /// Canonical text form; [`ScenarioConfig::parse`] reads it back unchanged.
    pub fn serialize(&self) -> String {
        let mut o = String::new();
        let kv = |o: &mut String, k: &str, v: String| {
            let _ = writeln!(o, "{k} = {v}");
        };
        o.push_str("[run]\n");
        kv(&mut o, "name", self.name.clone());
        kv(&mut o, "mode", match self.mode {
            Mode::Minimize => "minimize".into(),
            Mode::Evaluate => "evaluate".into(),
        });
        kv(&mut o, "seed", self.seed.to_string());
        if let Some(g) = &self.golden {
            kv(&mut o, "golden", g.clone());
        }

        o.push_str("\n[domain]\n");
        match self.domain.shape {
            DomainShape::Disk { radius } => {
                kv(&mut o, "shape", "disk".into());
                kv(&mut o, "radius", f(radius));
            }
            DomainShape::Square { side } => {
                kv(&mut o, "shape", "square".into());
                kv(&mut o, "side", f(side));
            }
            DomainShape::Annulus { inner, outer } => {
                kv(&mut o, "shape", "annulus".into());
                kv(&mut o, "inner", f(inner));
                kv(&mut o, "outer", f(outer));
            }
        }
        kv(&mut o, "h", f(self.domain.h));
        kv(&mut o, "structured", self.domain.structured.to_string());
        kv(&mut o, "outer_tag", match self.domain.outer_tag {
            BoundaryTag::Free => "free".into(),
            _ => "dirichlet".into(),
        });
        if !self.domain.punctures.is_empty() {
            let ps: Vec<String> = self
                .domain
                .punctures
                .iter()
                .map(|p| format!("{} {} {}", f(p.center.x), f(p.center.y), f(p.radius)))
                .collect();
            kv(&mut o, "punctures", ps.join("; "));
        }
        if let Some(m) = &self.domain.mesh_file {
            kv(&mut o, "mesh_file", m.to_string_lossy().into_owned());
        }

        o.push_str("\n[material]\n");
        let m = &self.material;
        match &m.kind {
            BulkKind::DefaultCompressible => kv(&mut o, "kind", "compressible".into()),
            BulkKind::UserTable(t) => {
                kv(&mut o, "kind", "table".into());
                kv(&mut o, "table_h", join(t.abscissae()));
                kv(&mut o, "table_gamma", join(t.values()));
            }
        }
        kv(&mut o, "mu", f(m.mu));
        kv(&mut o, "a", f(m.a));
        kv(&mut o, "b", f(m.b));
        kv(&mut o, "p", f(m.p));

        o.push_str("\n[surface]\n");
        match &self.surface {
            SurfaceDensity::Isotropic => kv(&mut o, "kind", "isotropic".into()),
            SurfaceDensity::Elliptic { a } => {
                kv(&mut o, "kind", "elliptic".into());
                kv(&mut o, "a11", f(a[(0, 0)]));
                kv(&mut o, "a12", f(a[(0, 1)]));
                kv(&mut o, "a22", f(a[(1, 1)]));
            }
            SurfaceDensity::SmoothedL1 { eps } => {
                kv(&mut o, "kind", "smoothed_l1".into());
                kv(&mut o, "eps", f(*eps));
            }
        }

        o.push_str("\n[boundary]\n");
        match &self.boundary {
            BoundaryKind::Radial { lambda } => {
                kv(&mut o, "kind", "radial".into());
                kv(&mut o, "lambda", f(*lambda));
            }
            BoundaryKind::Affine { lambda } => {
                kv(&mut o, "kind", "affine".into());
                kv(&mut o, "lambda", f(*lambda));
            }
            BoundaryKind::Table { path } => {
                kv(&mut o, "kind", "table".into());
                kv(&mut o, "table", path.to_string_lossy().into_owned());
            }
        }

        o.push_str("\n[initial]\n");
        match &self.initial {
            InitialGuess::Boundary => kv(&mut o, "kind", "boundary".into()),
            InitialGuess::Identity => kv(&mut o, "kind", "identity".into()),
            InitialGuess::CavitySeed { radius } => {
                kv(&mut o, "kind", "cavity_seed".into());
                kv(&mut o, "seed_radius", f(*radius));
            }
            InitialGuess::File { path } => {
                kv(&mut o, "kind", "file".into());
                kv(&mut o, "file", path.to_string_lossy().into_owned());
            }
        }

        o.push_str("\n[solver]\n");
        let s = &self.solver;
        kv(&mut o, "max_iters", s.max_iters.to_string());
        kv(&mut o, "tol_energy", f(s.tol_energy));
        kv(&mut o, "tol_residual", f(s.tol_residual));
        kv(&mut o, "det_floor", f(s.det_floor));
        kv(&mut o, "inv_every", s.inv_every.to_string());
        kv(&mut o, "inv_delta", s.inv_delta.map_or("auto".into(), f));
        kv(&mut o, "inv_budget", s.inv_budget.to_string());
        kv(&mut o, "inv_radii", s.inv_radii.to_string());
        kv(&mut o, "memory", s.memory.to_string());
        kv(&mut o, "armijo", f(s.armijo));
        kv(&mut o, "max_backtracks", s.max_backtracks.to_string());

        o.push_str("\n[detection]\n");
        let c = &self.detection;
        kv(&mut o, "slow_path", c.slow_path.to_string());
        kv(&mut o, "delta", f(c.delta));
        kv(&mut o, "radii", c.radii.to_string());
        kv(&mut o, "check_inv", c.check_inv.to_string());
        kv(&mut o, "inv_radii", c.inv_radii.to_string());
        kv(&mut o, "inv_budget", c.inv_budget.to_string());

        o.push_str("\n[output]\n");
        kv(&mut o, "dir", self.output.dir.to_string_lossy().into_owned());
        kv(&mut o, "emit", self.output.emit.to_list());
        kv(&mut o, "raster_delta", f(self.output.raster_delta));
        o
    }
}

fn f(v: f64) -> String {
    format!("{v:?}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(" ")
}

fn parse_punctures(s: &str) -> Result<Vec<Puncture>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: Vec<f64> = t
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<f64>().map_err(|_| format!("cannot parse '{x}' in puncture '{t}'")))
                .collect::<Result<_, _>>()?;
            match v[..] {
                [x, y, r] => Ok(Puncture { center: Vec2::new(x, y), radius: r }),
                _ => Err(format!("puncture '{t}' must be 'x y radius'")),
            }
        })
        .collect()
}
