//! Reference values from the one-dimensional radial solver.

use std::fs;
use std::path::{Path, PathBuf};

use cavelast_core::material::{BulkDensity, SurfaceDensity};
use cavelast_core::radial::{anisotropic_circle_perimeter, solve_radial, sweep, write_sweep_csv, SweepRow};
use cavelast_core::Mat2;

use crate::error::CliError;
use crate::run::Summary;

pub const GOLDEN_ENV: &str = "CAVELAST_GOLDEN_DIR";

/// Knot count of the golden radial solves.
pub const GOLDEN_M: usize = 512;
/// Knot count of the golden sweeps.
pub const SWEEP_M: usize = 256;
/// Relative band for sweep regressions.
pub const SWEEP_BAND: f64 = 0.03;

pub const RHO: f64 = 0.05;
pub const R_OUT: f64 = 2.0;

pub fn golden_dir() -> PathBuf {
    std::env::var_os(GOLDEN_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/golden/v1")))
}

pub fn elliptic_phi() -> SurfaceDensity {
    SurfaceDensity::elliptic(Mat2::new(4.0, 0.0, 0.0, 1.0)).expect("positive definite")
}

pub fn sweep_lambdas() -> Vec<f64> {
    (10..=20).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGolden {
    pub lambda: f64,
    pub rho: f64,
    pub r_out: f64,
    pub m: usize,
    pub surface_kind: String,
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
    pub cavity_radius: f64,
}

impl RadialGolden {
    pub fn compute(lambda: f64, phi: &SurfaceDensity, rho: f64, r_out: f64, m: usize) -> Result<Self, CliError> {
        let w = BulkDensity::default();
        let sol = solve_radial(lambda, &w, phi, rho, r_out, m)?;
        let c = sol.profile.cavity_radius();
        let surface = anisotropic_circle_perimeter(c, phi);
        Ok(Self {
            lambda,
            rho,
            r_out,
            m,
            surface_kind: phi.kind_name().to_string(),
            bulk: sol.energy - surface,
            surface,
            total: sol.energy,
            cavity_radius: c,
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "lambda = {:?}\nrho = {:?}\nr_out = {:?}\nm = {}\nsurface_kind = {}\nbulk = {:.12e}\nsurface = {:.12e}\ntotal = {:.12e}\ncavity_radius = {:.12e}\n",
            self.lambda, self.rho, self.r_out, self.m, self.surface_kind, self.bulk, self.surface, self.total, self.cavity_radius
        )
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let s = Summary::read(path)?;
        let num = |k: &str| {
            s.get_f64(k)
                .ok_or_else(|| CliError::Invalid(format!("{}: missing or malformed '{k}'", path.display())))
        };
        Ok(Self {
            lambda: num("lambda")?,
            rho: num("rho")?,
            r_out: num("r_out")?,
            m: num("m")? as usize,
            surface_kind: s.get("surface_kind").unwrap_or("").to_string(),
            bulk: num("bulk")?,
            surface: num("surface")?,
            total: num("total")?,
            cavity_radius: num("cavity_radius")?,
        })
    }
}

/// Golden files: `(file name, contents)`.
pub fn golden_files() -> Result<Vec<(String, String)>, CliError> {
    let w = BulkDensity::default();
    let mut out = Vec::new();
    for (tag, phi) in [("iso", SurfaceDensity::Isotropic), ("elliptic", elliptic_phi())] {
        let g = RadialGolden::compute(1.5, &phi, RHO, R_OUT, GOLDEN_M)?;
        out.push((format!("radial_{tag}_lambda1.5.txt"), g.to_text()));
        let rows = sweep(&sweep_lambdas(), &w, &phi, RHO, R_OUT, SWEEP_M)?;
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf)?;
        out.push((format!("sweep_{tag}.csv"), String::from_utf8(buf).expect("ascii")));
    }
    Ok(out)
}

pub fn write_golden(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (name, text) in golden_files()? {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let mut rdr = csv::Reader::from_reader(
        fs::File::open(path).map_err(|e| CliError::Read { path: path.into(), source: e })?,
    );
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<(f64, f64, f64, f64, f64)>() {
        let (lambda, cavity_radius, bulk, surface, total) = rec?;
        rows.push(SweepRow { lambda, cavity_radius, bulk, surface, total });
    }
    Ok(rows)
}

/// Row-wise mismatches beyond `band` (relative; absolute for values below 1e-6).
pub fn sweep_mismatches(got: &[SweepRow], want: &[SweepRow], band: f64) -> Vec<String> {
    let mut bad = Vec::new();
    if got.len() != want.len() {
        bad.push(format!("row count {} vs {}", got.len(), want.len()));
        return bad;
    }
    let off = |a: f64, b: f64| {
        let s = b.abs();
        if s < 1e-6 {
            (a - b).abs() > band
        } else {
            (a - b).abs() > band * s
        }
    };
    for (g, w) in got.iter().zip(want) {
        for (name, a, b) in [
            ("lambda", g.lambda, w.lambda),
            ("cavity_radius", g.cavity_radius, w.cavity_radius),
            ("total", g.total, w.total),
        ] {
            if off(a, b) {
                bad.push(format!("lambda {}: {name} {a:.6e} vs golden {b:.6e}", w.lambda));
            }
        }
    }
    bad
}
