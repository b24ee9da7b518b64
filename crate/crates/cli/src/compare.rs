//! Side-by-side comparison of two run directories.

use std::fmt::Write as _;
use std::path::Path;

use cavelast_core::energy::{total_energy, CavityDetection, EnergyBreakdown};

use crate::error::CliError;
use crate::run::{load_run, StoredRun};

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub name: String,
    pub a: f64,
    pub b: f64,
}

impl CompareRow {
    pub fn delta(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub name_a: String,
    pub name_b: String,
    pub rows: Vec<CompareRow>,
    /// `ℰ_B(y_A)`: the field of A under the material and `φ` of B.
    pub b_of_a: f64,
    /// `ℰ_B(y_B)`.
    pub b_of_b: f64,
    /// `ℰ_A(y_B)`.
    pub a_of_b: f64,
    /// `ℰ_A(y_A)`.
    pub a_of_a: f64,
    /// Surface part of `ℰ_B(y_A)`: the cavities of A measured with the `φ` of B.
    pub surface_b_of_a: f64,
    /// Surface part of `ℰ_B(y_B)`.
    pub surface_b_of_b: f64,
    /// Set when `ℰ_B(y_A) < ℰ_B(y_B)`: B did not reach a minimizer.
    pub alarm: bool,
    /// Set when `ℰ_A(y_B) < ℰ_A(y_A)`.
    pub alarm_reverse: bool,
}

impl CompareReport {
    pub fn row(&self, name: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<22} {:>20} {:>20} {:>20}", "quantity", self.name_a, self.name_b, "B - A");
        for r in &self.rows {
            let _ = writeln!(s, "{:<22} {:>20.10e} {:>20.10e} {:>20.10e}", r.name, r.a, r.b, r.delta());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "E_B(y_A) = {:.10e}   E_B(y_B) = {:.10e}", self.b_of_a, self.b_of_b);
        let _ = writeln!(s, "E_A(y_B) = {:.10e}   E_A(y_A) = {:.10e}", self.a_of_b, self.a_of_a);
        if self.alarm {
            let _ = writeln!(s, "ALARM: {} has lower energy under the model of {}; {} is not a minimizer", self.name_a, self.name_b, self.name_b);
        }
        if self.alarm_reverse {
            let _ = writeln!(s, "ALARM: {} has lower energy under the model of {}; {} is not a minimizer", self.name_b, self.name_a, self.name_a);
        }
        if !self.alarm && !self.alarm_reverse {
            let _ = writeln!(s, "alarm = none");
        }
        s
    }
}

const KEYS: [&str; 8] = [
    "total",
    "bulk",
    "surface",
    "surface_net",
    "cavity.0.radius",
    "cavity.0.aniso_perimeter",
    "min_det",
    "residual",
];

fn energy(run: &StoredRun, model: &StoredRun) -> Result<EnergyBreakdown, CliError> {
    let det = CavityDetection::default();
    Ok(total_energy(&run.field, &model.config.material, &model.config.surface, &det)?)
}

/// Loads two run directories and evaluates each field under the other's model.
pub fn compare_runs(a: &Path, b: &Path) -> Result<CompareReport, CliError> {
    let ra = load_run(a)?;
    let rb = load_run(b)?;
    let mut rows = Vec::new();
    for k in KEYS {
        if let (Some(x), Some(y)) = (ra.summary.get_f64(k), rb.summary.get_f64(k)) {
            rows.push(CompareRow { name: k.to_string(), a: x, b: y });
        }
    }
    if let (Some(x), Some(y)) = (ra.summary.get_f64("iterations"), rb.summary.get_f64("iterations")) {
        rows.push(CompareRow { name: "iterations".into(), a: x, b: y });
    }
    let eb_a = energy(&ra, &rb)?;
    let eb_b = energy(&rb, &rb)?;
    let (b_of_a, b_of_b) = (eb_a.total, eb_b.total);
    let a_of_b = energy(&rb, &ra)?.total;
    let a_of_a = energy(&ra, &ra)?.total;
    rows.push(CompareRow { name: "energy_under_A".into(), a: a_of_a, b: a_of_b });
    rows.push(CompareRow { name: "energy_under_B".into(), a: b_of_a, b: b_of_b });
    rows.push(CompareRow { name: "surface_under_B".into(), a: eb_a.surface, b: eb_b.surface });
    let slack = |e: f64| 1e-12 * e.abs();
    Ok(CompareReport {
        name_a: ra.config.name.clone(),
        name_b: rb.config.name.clone(),
        rows,
        b_of_a,
        b_of_b,
        a_of_b,
        a_of_a,
        surface_b_of_a: eb_a.surface,
        surface_b_of_b: eb_b.surface,
        alarm: b_of_a < b_of_b - slack(b_of_b),
        alarm_reverse: a_of_b < a_of_a - slack(a_of_a),
    })
}
