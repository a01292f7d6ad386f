//! Gmsh MSH 2.2 ASCII subset: triangles (type 2) and tetrahedra (type 4)
//! carrying a physical tag.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use super::{Mesh, Point, Tet, Tri};
use crate::config::{RegionMap, Tag};
use crate::error::{Error, Result};

const TRIANGLE: u32 = 2;
const TETRAHEDRON: u32 = 4;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            self.last = i + 1;
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next().ok_or_else(|| Error::Msh {
            line: last,
            reason: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Msh {
        line,
        reason: reason.into(),
    }
}

fn parse<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

/// Reads an MSH 2.2 ASCII mesh. Every physical tag must be known to `regions`:
/// tet tags as conductor/dielectric regions, triangle tags as outer or terminal surfaces.
pub fn load_msh<R: Read>(mut reader: R, regions: &RegionMap) -> Result<Mesh> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| err(0, format!("read failed: {e}")))?;
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    let mut format_seen = false;
    let mut nodes: Option<(Vec<Point>, HashMap<u64, usize>)> = None;
    let mut elements: Option<(Vec<Tet>, Vec<Tri>)> = None;

    while let Some((ln, l)) = lines.next() {
        match l {
            "$MeshFormat" => {
                let (ln, hdr) = lines.expect("format header")?;
                let mut it = hdr.split_whitespace();
                let version = it.next().unwrap_or("");
                let file_type: u32 = parse(ln, it.next(), "file type")?;
                if !(version == "2.2" || version == "2.2.0") {
                    return Err(err(ln, format!("unsupported MSH version {version}, need 2.2")));
                }
                if file_type != 0 {
                    return Err(err(ln, "binary MSH is not supported"));
                }
                expect_end(&mut lines, "$EndMeshFormat")?;
                format_seen = true;
            }
            "$Nodes" => {
                if !format_seen {
                    return Err(err(ln, "$Nodes before $MeshFormat"));
                }
                let (ln, n) = lines.expect("node count")?;
                let n: usize = parse(ln, Some(n), "node count")?;
                let mut coords = Vec::with_capacity(n);
                let mut ids = HashMap::with_capacity(n);
                for _ in 0..n {
                    let (ln, l) = lines.expect("node")?;
                    let mut it = l.split_whitespace();
                    let id: u64 = parse(ln, it.next(), "node id")?;
                    let x: f64 = parse(ln, it.next(), "x")?;
                    let y: f64 = parse(ln, it.next(), "y")?;
                    let z: f64 = parse(ln, it.next(), "z")?;
                    if ids.insert(id, coords.len()).is_some() {
                        return Err(err(ln, format!("duplicate node id {id}")));
                    }
                    coords.push([x, y, z]);
                }
                expect_end(&mut lines, "$EndNodes")?;
                nodes = Some((coords, ids));
            }
            "$Elements" => {
                let Some((_, ids)) = nodes.as_ref() else {
                    return Err(err(ln, "$Elements before $Nodes"));
                };
                let (ln, n) = lines.expect("element count")?;
                let n: usize = parse(ln, Some(n), "element count")?;
                let mut tets = Vec::new();
                let mut tris = Vec::new();
                for _ in 0..n {
                    let (ln, l) = lines.expect("element")?;
                    let mut it = l.split_whitespace();
                    let _id: u64 = parse(ln, it.next(), "element id")?;
                    let ty: u32 = parse(ln, it.next(), "element type")?;
                    let ntags: usize = parse(ln, it.next(), "tag count")?;
                    if ntags == 0 {
                        return Err(err(ln, "element without physical tag"));
                    }
                    let phys: Tag = parse(ln, it.next(), "physical tag")?;
                    for _ in 1..ntags {
                        let _: i64 = parse(ln, it.next(), "tag")?;
                    }
                    let nn = match ty {
                        TRIANGLE => 3,
                        TETRAHEDRON => 4,
                        other => return Err(err(ln, format!("unsupported element type {other} (only 2 and 4)"))),
                    };
                    let mut v = [0usize; 4];
                    for slot in v.iter_mut().take(nn) {
                        let id: u64 = parse(ln, it.next(), "element node")?;
                        *slot = *ids.get(&id).ok_or_else(|| err(ln, format!("unknown node id {id}")))?;
                    }
                    if ty == TETRAHEDRON {
                        if regions.volume_role(phys).is_none() {
                            return Err(err(ln, format!("volume tag {phys} is not in the region map")));
                        }
                        tets.push(Tet { vertices: v, tag: phys });
                    } else {
                        if regions.surface_role(phys).is_none() {
                            return Err(err(ln, format!("surface tag {phys} is not in the region map")));
                        }
                        tris.push(Tri {
                            vertices: [v[0], v[1], v[2]],
                            tag: phys,
                        });
                    }
                }
                expect_end(&mut lines, "$EndElements")?;
                elements = Some((tets, tris));
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                // Unused section such as $PhysicalNames: skip to its end marker.
                let end = format!("$End{}", &s[1..]);
                loop {
                    let (_, l) = lines.expect(&end)?;
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(err(ln, format!("unexpected line `{other}`"))),
        }
    }

    if !format_seen {
        return Err(err(lines.last, "missing $MeshFormat section"));
    }
    let (coords, _) = nodes.ok_or_else(|| err(lines.last, "missing $Nodes section"))?;
    let (tets, tris) = elements.ok_or_else(|| err(lines.last, "missing $Elements section"))?;
    Mesh::new(coords, tets, tris)
}

fn expect_end(lines: &mut Lines<'_>, marker: &str) -> Result<()> {
    let (ln, l) = lines.expect(marker)?;
    if l != marker {
        return Err(err(ln, format!("expected {marker}, found `{l}`")));
    }
    Ok(())
}

/// Writes the mesh as MSH 2.2 ASCII. Node ids are 1-based vertex indices;
/// triangles come first, then tetrahedra; the elementary tag repeats the physical tag.
pub fn write_msh(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.vertices.len());
    for (i, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} {:?}", i + 1, p[0], p[1], p[2]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.boundary_tris.len() + mesh.tets.len());
    let mut id = 1;
    for t in &mesh.boundary_tris {
        let [a, b, c] = t.vertices;
        let _ = writeln!(
            s,
            "{id} {TRIANGLE} 2 {tag} {tag} {} {} {}",
            a + 1,
            b + 1,
            c + 1,
            tag = t.tag
        );
        id += 1;
    }
    for t in &mesh.tets {
        let [a, b, c, d] = t.vertices;
        let _ = writeln!(
            s,
            "{id} {TETRAHEDRON} 2 {tag} {tag} {} {} {} {}",
            a + 1,
            b + 1,
            c + 1,
            d + 1,
            tag = t.tag
        );
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rod_mesh, rod_region_map};
    use std::collections::BTreeSet;

    fn single_tet_map() -> RegionMap {
        RegionMap {
            conductor_tags: BTreeSet::from([1]),
            outer_tags: BTreeSet::from([10]),
            terminal_tags: vec![BTreeSet::from([11]), BTreeSet::from([12])],
            ..Default::default()
        }
    }

    const ONE_TET: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
3 1 \"rod\"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
$EndNodes
$Elements
5
1 2 2 11 1 2 3 4
2 2 2 12 2 1 3 4
3 2 2 10 3 1 2 4
4 2 2 10 4 1 2 3
5 4 2 1 7 1 2 3 4
$EndElements
";

    #[test]
    fn smallest_mesh() {
        let m = load_msh(ONE_TET.as_bytes(), &single_tet_map()).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.tets().len(), 1);
        assert_eq!(m.boundary_tris().len(), 4);
    }

    #[test]
    fn missing_elements_section() {
        let text = ONE_TET.split("$Elements").next().unwrap();
        let e = load_msh(text.as_bytes(), &single_tet_map()).unwrap_err().to_string();
        assert!(e.contains("$Elements"), "{e}");
    }

    #[test]
    fn rejects_bad_version_type_and_tag() {
        let v4 = ONE_TET.replace("2.2 0 8", "4.1 0 8");
        assert!(load_msh(v4.as_bytes(), &single_tet_map())
            .unwrap_err()
            .to_string()
            .contains("version"));
        let line = ONE_TET.replace("5 4 2 1 7 1 2 3 4", "5 1 2 1 7 1 2");
        assert!(load_msh(line.as_bytes(), &single_tet_map())
            .unwrap_err()
            .to_string()
            .contains("element type 1"));
        let tag = ONE_TET.replace("5 4 2 1 7", "5 4 2 3 7");
        assert!(load_msh(tag.as_bytes(), &single_tet_map())
            .unwrap_err()
            .to_string()
            .contains("volume tag 3"));
    }

    #[test]
    fn rod_round_trip_is_byte_exact() {
        let rod = generate_rod_mesh(1.0, 0.01, 2, 6, 3).unwrap();
        let text = write_msh(&rod);
        let back = load_msh(text.as_bytes(), &rod_region_map()).unwrap();
        assert_eq!(back.n_vertices(), rod.n_vertices());
        assert_eq!(back.tets(), rod.tets());
        assert_eq!(back.boundary_tris(), rod.boundary_tris());
        assert_eq!(write_msh(&back), text);
    }
}
