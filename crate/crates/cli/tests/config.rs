#![allow(clippy::field_reassign_with_default)]

use std::path::PathBuf;

use cavelast_cli::config::{BoundaryKind, Emit, InitialGuess, Mode, ScenarioConfig};
use cavelast_cli::{CliError, BUNDLED};
use cavelast_core::geometry::{BoundaryTag, DomainShape, Puncture};
use cavelast_core::material::{BulkDensity, BulkKind, SurfaceDensity, VolumetricTable};
use cavelast_core::{Mat2, Vec2};
use proptest::prelude::*;

fn pos() -> impl Strategy<Value = f64> {
    (-6i32..6, 1.0f64..10.0).prop_map(|(e, m)| m * 10f64.powi(e))
}

fn shape() -> impl Strategy<Value = DomainShape> {
    prop_oneof![
        pos().prop_map(|radius| DomainShape::Disk { radius }),
        pos().prop_map(|side| DomainShape::Square { side }),
        (pos(), pos()).prop_map(|(inner, w)| DomainShape::Annulus { inner, outer: inner + w }),
    ]
}

fn surface() -> impl Strategy<Value = SurfaceDensity> {
    prop_oneof![
        Just(SurfaceDensity::Isotropic),
        (0.5f64..5.0, -0.4f64..0.4, 0.5f64..5.0)
            .prop_map(|(a, b, c)| SurfaceDensity::elliptic(Mat2::new(a, b, b, c)).unwrap()),
        pos().prop_map(|e| SurfaceDensity::smoothed_l1(e).unwrap()),
    ]
}

fn material() -> impl Strategy<Value = BulkDensity> {
    let table = prop::collection::vec(pos(), 3..6).prop_map(|mut hs| {
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        let gs: Vec<f64> = hs.iter().map(|h| h * h - h.ln()).collect();
        VolumetricTable::new(hs, gs).ok()
    });
    (prop::option::of(table), pos(), pos(), pos(), 1.5f64..4.0).prop_map(|(t, mu, a, b, p)| {
        let kind = match t.flatten() {
            Some(t) => BulkKind::UserTable(t),
            None => BulkKind::DefaultCompressible,
        };
        BulkDensity::new(kind, mu, a, b, p).unwrap()
    })
}

fn config() -> impl Strategy<Value = ScenarioConfig> {
    let run = ("[a-z][a-z0-9_.]{0,12}", any::<bool>(), any::<u64>(), prop::option::of("[a-z][a-z0-9_.]{0,12}"));
    let domain = (
        shape(),
        pos(),
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, pos()), 0..4),
        prop::option::of("[a-z/]{1,10}\\.cavmesh"),
    );
    let boundary = prop_oneof![
        pos().prop_map(|lambda| BoundaryKind::Radial { lambda }),
        pos().prop_map(|lambda| BoundaryKind::Affine { lambda }),
        "[a-z]{1,8}\\.csv".prop_map(|p| BoundaryKind::Table { path: PathBuf::from(p) }),
    ];
    let initial = prop_oneof![
        Just(InitialGuess::Boundary),
        Just(InitialGuess::Identity),
        pos().prop_map(|radius| InitialGuess::CavitySeed { radius }),
        "[a-z]{1,8}\\.csv".prop_map(|p| InitialGuess::File { path: PathBuf::from(p) }),
    ];
    let solver = (1usize..100_000, pos(), pos(), pos(), 0usize..50, prop::option::of(pos()), 1usize..9, pos());
    let detection = (any::<bool>(), pos(), 1usize..9, any::<bool>(), 1usize..20, 1usize..100_000);
    let emit = (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>())
        .prop_map(|(svg, csv, raster, inverse)| Emit { svg, csv, raster, inverse });
    (run, domain, material(), surface(), boundary, initial, solver, detection, emit, pos()).prop_map(
        |(run, dom, material, surface, boundary, initial, sol, det, emit, raster_delta)| {
            let mut c = ScenarioConfig::default();
            c.name = run.0;
            c.mode = if run.1 { Mode::Minimize } else { Mode::Evaluate };
            c.seed = run.2;
            c.golden = run.3;
            c.domain.shape = dom.0;
            c.domain.h = dom.1;
            c.domain.structured = dom.2;
            c.domain.outer_tag = if dom.3 { BoundaryTag::Dirichlet } else { BoundaryTag::Free };
            c.domain.punctures = dom.4.into_iter().map(|(x, y, r)| Puncture { center: Vec2::new(x, y), radius: r }).collect();
            c.domain.mesh_file = dom.5.map(PathBuf::from);
            c.material = material;
            c.surface = surface;
            c.boundary = boundary;
            c.initial = initial;
            c.solver.max_iters = sol.0;
            c.solver.tol_energy = sol.1;
            c.solver.tol_residual = sol.2;
            c.solver.det_floor = sol.3;
            c.solver.inv_every = sol.4;
            c.solver.inv_delta = sol.5;
            c.solver.memory = sol.6;
            c.solver.armijo = sol.7;
            c.detection.slow_path = det.0;
            c.detection.delta = det.1;
            c.detection.radii = det.2;
            c.detection.check_inv = det.3;
            c.detection.inv_radii = det.4;
            c.detection.inv_budget = det.5;
            c.output.emit = emit;
            c.output.raster_delta = raster_delta;
            c
        },
    )
}

proptest! {
    #[test]
    fn serialize_then_parse_is_lossless(cfg in config()) {
        let text = cfg.serialize();
        let back = ScenarioConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.serialize(), text);
    }
}

#[test]
fn bundled_scenarios_parse_validate_and_round_trip() {
    for (name, text) in BUNDLED {
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.name, *name);
        cfg.validate().unwrap();
        assert_eq!(ScenarioConfig::parse(&cfg.serialize()).unwrap(), cfg);
    }
}

fn parse_err(text: &str) -> (usize, Option<String>, String) {
    match ScenarioConfig::parse(text) {
        Err(CliError::Parse { line, key, msg }) => (line, key, msg),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_value_names_key_and_line() {
    let (line, key, _) = parse_err("[run]\nname = x\n\n[solver]\nmax_iters = many\n");
    assert_eq!(line, 5);
    assert_eq!(key.as_deref(), Some("solver.max_iters"));
    let err = ScenarioConfig::parse("[domain]\nh = 0.1\nh = 0.2\n").unwrap_err();
    let text = err.to_string();
    assert!(text.contains("line 3") && text.contains("domain.h"), "{text}");
}

#[test]
fn unknown_keys_and_sections_are_rejected() {
    let (line, key, msg) = parse_err("[surface]\nkind = isotropic\nradius = 3\n");
    assert_eq!((line, key.as_deref()), (3, Some("surface.radius")));
    assert!(msg.contains("unknown key"));
    let (line, _, msg) = parse_err("# header\n[nonsense]\n");
    assert_eq!(line, 2);
    assert!(msg.contains("nonsense"));
    let (line, _, _) = parse_err("orphan = 1\n");
    assert_eq!(line, 1);
    let (line, key, _) = parse_err("[surface]\nkind = hexagonal\n");
    assert_eq!((line, key.as_deref()), (2, Some("surface.kind")));
    let (line, key, _) = parse_err("[domain]\npunctures = 0 0\n");
    assert_eq!((line, key.as_deref()), (2, Some("domain.punctures")));
}

#[test]
fn validation_rejects_large_punctures_and_bad_tolerances() {
    let mut c = ScenarioConfig::default();
    c.domain.punctures = vec![Puncture { center: Vec2::zeros(), radius: 0.3 }];
    let e = c.validate().unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("inradius"));
    let mut c = ScenarioConfig::default();
    c.solver.tol_residual = 0.0;
    assert!(c.validate().unwrap_err().to_string().contains("solver.tol_residual"));
    let mut c = ScenarioConfig::default();
    c.detection.delta = -1.0;
    assert_eq!(c.validate().unwrap_err().exit_code(), 2);
}

#[test]
fn emit_lists_parse() {
    assert_eq!(Emit::parse("svg, csv").unwrap(), Emit { svg: true, csv: true, raster: false, inverse: false });
    assert_eq!(Emit::parse("none").unwrap(), Emit::default());
    assert!(Emit::parse("pdf").is_err());
}
