//! Executes a scenario and writes its artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cavelast_core::degree::{topological_image, Subdomain};
use cavelast_core::energy::{total_energy, EnergyBreakdown};
use cavelast_core::geometry::{read_mesh, write_mesh, BoundaryData, DeformationField, Mesh, MeshSpec};
use cavelast_core::inverse::{extract_jump_set, write_jump_set_csv, InverseMap};
use cavelast_core::variation::{certification_residual, minimize, IterRecord, Status};
use cavelast_core::Vec2;

use crate::config::{BoundaryKind, Emit, InitialGuess, Mode, ScenarioConfig};
use crate::error::CliError;
use crate::golden::{golden_dir, RadialGolden};
use crate::svg;

/// Relative band for the golden energy check.
pub const GOLDEN_ENERGY_BAND: f64 = 0.02;
/// Band for the golden cavity-radius check, relative to `max(c, ρ)`.
pub const GOLDEN_RADIUS_BAND: f64 = 0.03;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output.dir`.
    pub out: Option<PathBuf>,
    /// Overrides `output.emit`.
    pub emit: Option<Emit>,
    /// Overrides `run.mode`.
    pub mode: Option<Mode>,
    /// Directory that relative input paths are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Debug)]
pub struct RunOutcome {
    /// 0 converged or evaluated, 3 stopped by the iteration limit or a stall.
    pub code: i32,
    pub dir: PathBuf,
    pub status: Option<Status>,
    pub energy: EnergyBreakdown,
    pub field: DeformationField,
    pub log: Vec<IterRecord>,
    pub summary: Summary,
}

/// Ordered `key = value` lines of `summary.txt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    fn push(&mut self, k: impl Into<String>, v: impl Into<String>) {
        self.entries.push((k.into(), v.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Read { path: path.into(), source: e })?;
        Ok(Self::parse(&text))
    }

    pub fn as_map(&self) -> BTreeMap<&str, &str> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Read { path: path.into(), source: e })
}

pub fn load_mesh(cfg: &ScenarioConfig, base: &Path) -> Result<Arc<Mesh>, CliError> {
    let mesh = match &cfg.domain.mesh_file {
        Some(p) => read_mesh(BufReader::new(open(&resolve(base, p))?))?,
        None => MeshSpec {
            shape: cfg.domain.shape,
            h: cfg.domain.h,
            punctures: cfg.domain.punctures.clone(),
            outer_tag: cfg.domain.outer_tag,
            structured: cfg.domain.structured,
        }
        .build()?,
    };
    Ok(Arc::new(mesh))
}

pub fn boundary_data(cfg: &ScenarioConfig, base: &Path) -> Result<BoundaryData, CliError> {
    Ok(match &cfg.boundary {
        BoundaryKind::Radial { lambda } => BoundaryData::RadialStretch { lambda: *lambda },
        BoundaryKind::Affine { lambda } => BoundaryData::AffineStretch { lambda: *lambda },
        BoundaryKind::Table { path } => {
            let mut rows = Vec::new();
            let mut rdr = csv::Reader::from_reader(open(&resolve(base, path))?);
            for rec in rdr.deserialize::<(usize, f64, f64)>() {
                let (v, x, y) = rec?;
                rows.push((v, Vec2::new(x, y)));
            }
            BoundaryData::UserTable(rows)
        }
    })
}

/// Opens a cavity of reference radius `c` at every puncture: inside
/// `B(a, L)` the point at distance `s` from `a` moves to distance
/// `sqrt(s² + c²(1 − s²/L²))`.
fn cavity_seed(mesh: &Mesh, cfg: &ScenarioConfig, c: f64) -> Vec<Vec2> {
    let ps = mesh.punctures();
    let reach: Vec<f64> = ps
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut l = cfg.domain.shape.depth(&p.center);
            for (j, q) in ps.iter().enumerate() {
                if j != k {
                    l = l.min(0.5 * (p.center - q.center).norm());
                }
            }
            l
        })
        .collect();
    mesh.vertices()
        .iter()
        .map(|x| {
            for (p, &l) in ps.iter().zip(&reach) {
                let d = x - p.center;
                let s = d.norm();
                if s > 0.0 && s < l {
                    let ck = c.min(0.5 * l);
                    let t = (s * s + ck * ck * (1.0 - (s / l).powi(2))).sqrt();
                    return p.center + d * (t / s);
                }
            }
            *x
        })
        .collect()
}

fn read_positions(path: &Path, n: usize) -> Result<Vec<Vec2>, CliError> {
    let mut out = vec![None; n];
    let mut rdr = csv::Reader::from_reader(open(path)?);
    for rec in rdr.deserialize::<(usize, f64, f64, f64, f64)>() {
        let (v, _, _, yx, yy) = rec?;
        if v >= n {
            return Err(CliError::Invalid(format!("{}: vertex {v} out of range (mesh has {n})", path.display())));
        }
        out[v] = Some(Vec2::new(yx, yy));
    }
    out.into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| CliError::Invalid(format!("{}: no row for vertex {v}", path.display()))))
        .collect()
}

/// Mesh and initial deformation with the boundary datum imposed.
pub fn initial_field(cfg: &ScenarioConfig, base: &Path) -> Result<DeformationField, CliError> {
    let mesh = load_mesh(cfg, base)?;
    let data = boundary_data(cfg, base)?;
    let extend = |x: &Vec2| data.eval(x).unwrap_or(*x);
    let mut y = match &cfg.initial {
        InitialGuess::Identity => DeformationField::identity(mesh.clone()),
        InitialGuess::Boundary => DeformationField::from_map(mesh.clone(), extend),
        InitialGuess::CavitySeed { radius } => {
            let pos = cavity_seed(&mesh, cfg, *radius).iter().map(extend).collect();
            DeformationField::from_positions(mesh.clone(), pos)?
        }
        InitialGuess::File { path } => {
            let pos = read_positions(&resolve(base, path), mesh.num_vertices())?;
            DeformationField::from_positions(mesh.clone(), pos)?
        }
    };
    y.impose(&data)?;
    let (md, t) = y.min_det();
    if !(md > 0.0) {
        return Err(CliError::Infeasible(format!(
            "initial deformation has det Dy = {md:.6e} on triangle {t}"
        )));
    }
    Ok(y)
}

/// Runs `cfg` and writes the artifacts. Input problems are returned as
/// errors (exit code 2); a run stopped by its iteration limit or a stall
/// still writes everything and reports code 3.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    if let Some(m) = opts.mode {
        cfg.mode = m;
    }
    if let Some(e) = opts.emit {
        cfg.output.emit = e;
    }
    if let Some(o) = &opts.out {
        cfg.output.dir = o.clone();
    }
    let base = &opts.base_dir;
    let y0 = initial_field(&cfg, base)?;
    let density = &cfg.material;
    let phi = &cfg.surface;
    log::info!(
        "{}: {} vertices, {} triangles, {} punctures",
        cfg.name,
        y0.mesh().num_vertices(),
        y0.mesh().num_triangles(),
        y0.mesh().punctures().len()
    );

    let (field, status, log, inv_rejections) = match cfg.mode {
        Mode::Minimize => {
            if !(y0.min_det().0 > cfg.solver.det_floor) {
                return Err(CliError::Infeasible(format!(
                    "initial min det {:.6e} is below det_floor {:.6e}",
                    y0.min_det().0,
                    cfg.solver.det_floor
                )));
            }
            let res = minimize(&y0, density, phi, &cfg.solver)?;
            log::info!("{}: {} after {} iterations", cfg.name, res.status.as_str(), res.log.len().saturating_sub(1));
            (res.field, Some(res.status), res.log, res.inv_rejections)
        }
        Mode::Evaluate => (y0, None, Vec::new(), 0),
    };

    let energy = total_energy(&field, density, phi, &cfg.detection)?;
    let residual = certification_residual(&field, density, phi)?;
    let (min_det, _) = field.min_det();

    let mut s = Summary::default();
    s.push("scenario", cfg.name.clone());
    s.push("mode", match cfg.mode {
        Mode::Minimize => "minimize",
        Mode::Evaluate => "evaluate",
    });
    s.push("status", status.map_or("evaluated", |st| st.as_str()));
    s.push("iterations", log.len().saturating_sub(1).to_string());
    s.push("vertices", field.mesh().num_vertices().to_string());
    s.push("triangles", field.mesh().num_triangles().to_string());
    s.push("surface_kind", phi.kind_name());
    for (k, v) in energy.to_key_values() {
        s.push(k, v);
    }
    s.push("surface_net", fmt(energy.surface - energy.rho_artifact));
    for c in &energy.per_cavity {
        s.push(format!("cavity.{}.radius", c.puncture), fmt((c.area.max(0.0) / std::f64::consts::PI).sqrt()));
    }
    s.push("min_det", fmt(min_det));
    s.push("residual", fmt(residual));
    if cfg.mode == Mode::Minimize {
        s.push("inv_rejections", inv_rejections.to_string());
        let log_min = log.iter().map(|r| r.min_det).fold(f64::INFINITY, f64::min);
        s.push("log_min_det", fmt(log_min));
    }
    if let Some(g) = &cfg.golden {
        let gold = RadialGolden::read(&golden_dir().join(format!("{g}.txt")))?;
        let r = s.get_f64("cavity.0.radius").unwrap_or(0.0);
        let eg = (energy.total - gold.total).abs() / gold.total.abs();
        let rg = (r - gold.cavity_radius).abs() / gold.cavity_radius.max(gold.rho);
        s.push("golden", g.clone());
        s.push("golden.total", fmt(gold.total));
        s.push("golden.cavity_radius", fmt(gold.cavity_radius));
        s.push("golden.energy_gap", fmt(eg));
        s.push("golden.radius_gap", fmt(rg));
        s.push("golden.pass", (eg <= GOLDEN_ENERGY_BAND && rg <= GOLDEN_RADIUS_BAND).to_string());
    }

    let dir = cfg.output.dir.clone();
    write_artifacts(&dir, &cfg, &field, &energy, &log, &s)?;

    let code = match status {
        None | Some(Status::Converged) => 0,
        Some(Status::MaxIters) | Some(Status::Stalled) => 3,
    };
    Ok(RunOutcome { code, dir, status, energy, field, log, summary: s })
}

fn create(path: PathBuf) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_artifacts(
    dir: &Path,
    cfg: &ScenarioConfig,
    y: &DeformationField,
    energy: &EnergyBreakdown,
    log: &[IterRecord],
    summary: &Summary,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.txt"), summary.to_text())?;
    fs::write(dir.join("config.cfg"), cfg.serialize())?;
    let mesh = y.mesh();
    {
        let mut f = create(dir.join("mesh.cavmesh"))?;
        write_mesh(&mut f, mesh)?;
        f.flush()?;
    }
    write_deformed_csv(&dir.join("deformed.csv"), y)?;
    let emit = cfg.output.emit;
    if emit.csv {
        let mut w = csv::Writer::from_path(dir.join("iterations.csv"))?;
        w.write_record(["iter", "energy", "bulk", "surface", "min_det", "step", "residual"])?;
        for r in log {
            w.write_record([
                r.iter.to_string(),
                fmt(r.energy),
                fmt(r.bulk),
                fmt(r.surface),
                fmt(r.min_det),
                fmt(r.step),
                fmt(r.residual),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("cavities.csv"))?;
        w.write_record(["puncture", "site_x", "site_y", "aniso_perimeter", "perimeter", "area", "radius", "simple"])?;
        for c in &energy.per_cavity {
            w.write_record([
                c.puncture.to_string(),
                format!("{:?}", c.site.x),
                format!("{:?}", c.site.y),
                fmt(c.aniso_perimeter),
                fmt(c.perimeter),
                fmt(c.area),
                fmt((c.area.max(0.0) / std::f64::consts::PI).sqrt()),
                c.simple.to_string(),
            ])?;
        }
        w.flush()?;
    }
    if emit.svg {
        fs::write(dir.join("reference.svg"), svg::render(mesh, mesh.vertices()))?;
        fs::write(dir.join("deformed.svg"), svg::render(mesh, y.positions()))?;
    }
    if emit.raster {
        let r = topological_image(y, &Subdomain::Domain, cfg.output.raster_delta)?;
        let mut f = create(dir.join("degree.pgm"))?;
        r.write_pgm(&mut f)?;
        f.flush()?;
    }
    if emit.inverse {
        let inv = InverseMap::new(y).rasterize(cfg.output.raster_delta)?;
        let mut f = create(dir.join("inverse.csv"))?;
        inv.write_csv(&mut f)?;
        f.flush()?;
        let mut f = create(dir.join("jump_set.csv"))?;
        write_jump_set_csv(&extract_jump_set(&inv), &mut f)?;
        f.flush()?;
    }
    Ok(())
}

/// Rows `vertex,x,y,y_x,y_y` with lossless floats.
pub fn write_deformed_csv(path: &Path, y: &DeformationField) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["vertex", "x", "y", "y_x", "y_y"])?;
    for (v, (x, p)) in y.mesh().vertices().iter().zip(y.positions()).enumerate() {
        w.write_record([
            v.to_string(),
            format!("{:?}", x.x),
            format!("{:?}", x.y),
            format!("{:?}", p.x),
            format!("{:?}", p.y),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mesh, deformation and configuration stored in a run directory.
pub struct StoredRun {
    pub config: ScenarioConfig,
    pub field: DeformationField,
    pub summary: Summary,
}

pub fn load_run(dir: &Path) -> Result<StoredRun, CliError> {
    let summary_path = dir.join("summary.txt");
    if !summary_path.is_file() {
        return Err(CliError::Invalid(format!("{} has no summary.txt", dir.display())));
    }
    let summary = Summary::read(&summary_path)?;
    let cfg_path = dir.join("config.cfg");
    let text = fs::read_to_string(&cfg_path).map_err(|e| CliError::Read { path: cfg_path, source: e })?;
    let config = ScenarioConfig::parse(&text)?;
    let mesh = Arc::new(read_mesh(BufReader::new(open(&dir.join("mesh.cavmesh"))?))?);
    let pos = read_positions(&dir.join("deformed.csv"), mesh.num_vertices())?;
    let field = DeformationField::from_positions(mesh, pos)?;
    Ok(StoredRun { config, field, summary })
}
