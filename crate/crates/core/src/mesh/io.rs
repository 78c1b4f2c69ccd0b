//! OFF and OBJ reading and writing.
//!
//! Both readers accept any consistent coordinate count per vertex. OFF
//! faces with two indices and OBJ `l` records are read as segments (m = 1);
//! polygonal faces must all have the same vertex count. `nOFF` headers carry
//! the dimension on the following line.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DVector;

use super::SimplicialMesh;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad index '{tok}'")))
}

/// Parses OFF text.
pub fn parse_off(text: &str) -> Result<SimplicialMesh> {
    // (line number, tokens) for meaningful lines
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
    });
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut dim = 3;
    let mut rest: Vec<&str> = Vec::new();
    match header[0] {
        "OFF" => rest.extend(&header[1..]),
        "nOFF" => {
            let mut toks = header[1..].to_vec();
            if toks.is_empty() {
                let (_, t) = lines.next().ok_or_else(|| parse_err(hline, "missing dimension"))?;
                toks = t;
            }
            dim = parse_usize(toks[0], hline)?;
            rest.extend(&toks[1..]);
        }
        other => return Err(parse_err(hline, format!("expected OFF header, found '{other}'"))),
    }
    let (cline, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(hline, "missing counts"))?
    } else {
        (hline, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "expected vertex and face counts"));
    }
    let nv = parse_usize(counts[0], cline)?;
    let nf = parse_usize(counts[1], cline)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, toks) = lines.next().ok_or_else(|| parse_err(cline, "truncated vertex list"))?;
        if toks.len() < dim {
            return Err(parse_err(ln, format!("expected {dim} coordinates")));
        }
        let c: Vec<f64> = toks[..dim].iter().map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
        vertices.push(DVector::from_vec(c));
    }
    let mut simplices = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, toks) = lines.next().ok_or_else(|| parse_err(cline, "truncated face list"))?;
        let k = parse_usize(toks[0], ln)?;
        if toks.len() < k + 1 {
            return Err(parse_err(ln, format!("face declares {k} indices")));
        }
        let f: Vec<usize> = toks[1..=k].iter().map(|t| parse_usize(t, ln)).collect::<Result<_>>()?;
        simplices.push(f);
    }
    SimplicialMesh::new(vertices, simplices)
}

/// Parses OBJ text (`v`, `f`, `l` records; other records are ignored).
pub fn parse_obj(text: &str) -> Result<SimplicialMesh> {
    let mut vertices = Vec::new();
    let mut simplices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        let mut toks = l.split_whitespace();
        let resolve = |tok: &str, nv: usize| -> Result<usize> {
            let head = tok.split('/').next().unwrap_or("");
            let idx: i64 = head.parse().map_err(|_| parse_err(ln, format!("bad index '{tok}'")))?;
            match idx {
                0 => Err(parse_err(ln, "OBJ indices are 1-based")),
                i if i > 0 => Ok(i as usize - 1),
                i => (nv as i64 + i)
                    .try_into()
                    .map_err(|_| parse_err(ln, format!("relative index {i} out of range"))),
            }
        };
        match toks.next() {
            Some("v") => {
                let c: Vec<f64> = toks.map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
                vertices.push(DVector::from_vec(c));
            }
            Some("f") => {
                let f: Vec<usize> = toks.map(|t| resolve(t, vertices.len())).collect::<Result<_>>()?;
                simplices.push(f);
            }
            Some("l") => {
                let chain: Vec<usize> = toks.map(|t| resolve(t, vertices.len())).collect::<Result<_>>()?;
                if chain.len() < 2 {
                    return Err(parse_err(ln, "line record needs two vertices"));
                }
                for w in chain.windows(2) {
                    simplices.push(vec![w[0], w[1]]);
                }
            }
            _ => {}
        }
    }
    SimplicialMesh::new(vertices, simplices)
}

/// Reads a mesh, dispatching on the `.off` / `.obj` extension.
pub fn read_mesh(path: &Path) -> Result<SimplicialMesh> {
    let text = fs::read_to_string(path)?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("off") => parse_off(&text),
        Some("obj") => parse_obj(&text),
        _ => Err(Error::InvalidArgument(format!(
            "unknown mesh format for {}",
            path.display()
        ))),
    }
}

/// OFF text with 17 significant digits. Simplices are written in their
/// oriented vertex order.
pub fn format_off(mesh: &SimplicialMesh) -> String {
    let mut out = String::new();
    let s = mesh.ambient_dim();
    if s == 3 {
        out.push_str("OFF\n");
    } else {
        out.push_str(&format!("nOFF\n{s}\n"));
    }
    out.push_str(&format!("{} {} 0\n", mesh.num_vertices(), mesh.num_simplices()));
    for v in mesh.vertices() {
        let row: Vec<String> = v.iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for (f, &o) in mesh.simplices().iter().zip(mesh.orientation()) {
        let mut f = f.clone();
        if !o {
            f.swap(0, 1);
        }
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("{} {}\n", f.len(), idx.join(" ")));
    }
    out
}

/// OBJ text; segments are written as `l` records.
pub fn format_obj(mesh: &SimplicialMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let row: Vec<String> = v.iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&format!("v {}\n", row.join(" ")));
    }
    let tag = if mesh.intrinsic_dim() == 1 { "l" } else { "f" };
    for (f, &o) in mesh.simplices().iter().zip(mesh.orientation()) {
        let mut f = f.clone();
        if !o {
            f.swap(0, 1);
        }
        let idx: Vec<String> = f.iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&format!("{tag} {}\n", idx.join(" ")));
    }
    out
}

/// Writes a mesh, dispatching on the extension (OFF unless `.obj`).
pub fn write_mesh(mesh: &SimplicialMesh, path: &Path) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("obj") => format_obj(mesh),
        _ => format_off(mesh),
    };
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn off_roundtrip_is_exact() {
        let m = shapes::icosphere(1, 1.3);
        let back = parse_off(&format_off(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn obj_roundtrip_polyline_in_r4() {
        let m = shapes::embed(&shapes::unit_circle_r2(16), 4).unwrap();
        let back = parse_obj(&format_obj(&m)).unwrap();
        assert_eq!(back.intrinsic_dim(), 1);
        assert_eq!(back.ambient_dim(), 4);
        assert_eq!(back.vertices(), m.vertices());
    }

    #[test]
    fn off_with_comments_and_inline_counts() {
        let text = "OFF # header\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let m = parse_off(text).unwrap();
        assert_eq!(m.num_simplices(), 1);
        assert!((m.total_volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn off_truncated_reports_line() {
        let err = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn obj_slash_indices_and_negative() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2//2 -1\n";
        let m = parse_obj(text).unwrap();
        assert_eq!(m.simplices()[0], vec![0, 1, 2]);
    }
}
