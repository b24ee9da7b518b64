//! Plain-text mesh format:
//!
//! ```text
//! cavmesh 1
//! <vertex count>
//! x y                      (one line per vertex)
//! <triangle count>
//! i j k                    (one line per triangle, counter-clockwise)
//! i j TAG                  (boundary edges: dirichlet | free | puncture_<k>)
//! puncture cx cy rho       (one line per puncture, in index order)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use super::mesh::{BoundaryTag, Mesh, Puncture};
use crate::{Error, Result, Vec2};

pub fn write_mesh<W: Write>(mut out: W, mesh: &Mesh) -> Result<()> {
    writeln!(out, "cavmesh 1")?;
    writeln!(out, "{}", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(out, "{} {}", v.x, v.y)?;
    }
    writeln!(out, "{}", mesh.num_triangles())?;
    for [i, j, k] in mesh.triangles() {
        writeln!(out, "{i} {j} {k}")?;
    }
    for ([i, j], tag) in mesh.boundary_edges() {
        writeln!(out, "{i} {j} {}", tag.as_str())?;
    }
    for p in mesh.punctures() {
        writeln!(out, "puncture {} {} {}", p.center.x, p.center.y, p.radius)?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<Mesh> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(s))) => Ok((n, s.trim().to_string())),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Parse {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            }),
        }
    };
    let (n, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["cavmesh", "1"] {
        return Err(Error::Parse {
            line: n,
            msg: format!("expected header 'cavmesh 1', found '{header}'"),
        });
    }
    let count = |(n, s): (usize, String)| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse {
            line: n,
            msg: format!("expected a count, found '{s}'"),
        })
    };
    let nv = count(next("vertex count")?)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, s) = next("vertex")?;
        let f = parse_floats(n, &s, 2)?;
        vertices.push(Vec2::new(f[0], f[1]));
    }
    let nt = count(next("triangle count")?)?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, s) = next("triangle")?;
        let idx = parse_indices(n, &s, 3)?;
        triangles.push([idx[0], idx[1], idx[2]]);
    }
    let mut boundary = Vec::new();
    let mut punctures = Vec::new();
    while let Ok((n, s)) = next("") {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.first() == Some(&"puncture") {
            let f = parse_floats(n, &toks[1..].join(" "), 3)?;
            punctures.push(Puncture {
                center: Vec2::new(f[0], f[1]),
                radius: f[2],
            });
            continue;
        }
        if toks.len() != 3 {
            return Err(Error::Parse {
                line: n,
                msg: format!("expected 'i j TAG', found '{s}'"),
            });
        }
        let idx = parse_indices(n, &toks[..2].join(" "), 2)?;
        let tag = BoundaryTag::parse(toks[2]).ok_or_else(|| Error::Parse {
            line: n,
            msg: format!("unknown boundary tag '{}'", toks[2]),
        })?;
        boundary.push(([idx[0], idx[1]], tag));
    }
    Mesh::new(vertices, triangles, boundary, punctures)
}

fn parse_floats(line: usize, s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("expected {n} numbers, found '{s}'"),
        })?;
    if v.len() != n {
        return Err(Error::Parse {
            line,
            msg: format!("expected {n} numbers, found '{s}'"),
        });
    }
    Ok(v)
}

fn parse_indices(line: usize, s: &str, n: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("expected {n} vertex indices, found '{s}'"),
        })?;
    if v.len() != n {
        return Err(Error::Parse {
            line,
            msg: format!("expected {n} vertex indices, found '{s}'"),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainShape, MeshSpec};

    #[test]
    fn punctured_mesh_round_trips_bit_exactly() {
        let mesh = MeshSpec {
            shape: DomainShape::Square { side: 1.0 },
            h: 0.1,
            punctures: vec![Puncture { center: Vec2::new(0.1, -0.05), radius: 0.03 }],
            outer_tag: BoundaryTag::Free,
            structured: false,
        }
        .build()
        .unwrap();
        let mut buf = Vec::new();
        write_mesh(&mut buf, &mesh).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.boundary_edges(), mesh.boundary_edges());
        assert_eq!(back.punctures(), mesh.punctures());
    }

    #[test]
    fn bad_header_names_the_line() {
        let err = read_mesh("\n# c\nmesh 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn unknown_tag_is_rejected() {
        let txt = "cavmesh 1\n3\n0 0\n1 0\n0 1\n1\n0 1 2\n0 1 wall\n";
        assert!(matches!(read_mesh(txt.as_bytes()), Err(Error::Parse { line: 8, .. })));
    }
}
