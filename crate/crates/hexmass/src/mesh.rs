//! Mesh data model, ABAQUS .inp subset ingestion, deterministic generators
//! and whole-mesh validity screening.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hex8::Hex8;

/// Nodes plus C3D8 connectivity. Node ids are dense 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub label: String,
    nodes: Vec<[f64; 3]>,
    elements: Vec<[usize; 8]>,
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    label: String,
    nodes: Vec<[f64; 3]>,
    elements: Vec<[usize; 8]>,
}

impl Mesh {
    pub fn new(label: impl Into<String>, nodes: Vec<[f64; 3]>, elements: Vec<[usize; 8]>) -> Result<Self> {
        for (e, conn) in elements.iter().enumerate() {
            for &idx in conn {
                if idx >= nodes.len() {
                    return Err(Error::InvalidMesh(format!(
                        "element {e} references node index {idx}, but the mesh has {} nodes",
                        nodes.len()
                    )));
                }
            }
            for a in 0..8 {
                for b in a + 1..8 {
                    if conn[a] == conn[b] {
                        return Err(Error::InvalidMesh(format!(
                            "element {e} repeats node index {}",
                            conn[a]
                        )));
                    }
                }
            }
        }
        Ok(Self {
            label: label.into(),
            nodes,
            elements,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 8]] {
        &self.elements
    }

    pub fn element_hex(&self, index: usize) -> Result<Hex8> {
        let conn = self.elements.get(index).ok_or(Error::ElementOutOfRange {
            index,
            count: self.elements.len(),
        })?;
        Ok(Hex8::new(std::array::from_fn(|i| self.nodes[conn[i]])))
    }

    pub fn to_json(&self) -> String {
        let out = MeshJson {
            label: self.label.clone(),
            nodes: self.nodes.clone(),
            elements: self.elements.clone(),
        };
        serde_json::to_string(&out).expect("mesh serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeshJson = serde_json::from_str(text).map_err(|e| Error::MeshJson(e.to_string()))?;
        Self::new(raw.label, raw.nodes, raw.elements)
    }
}

/// Outcome of an .inp import: the mesh plus the count of element blocks that
/// were skipped for carrying an unsupported TYPE.
#[derive(Debug)]
pub struct InpImport {
    pub mesh: Mesh,
    pub skipped_blocks: usize,
}

/// Parses the supported ABAQUS .inp subset: *NODE blocks ("id, x, y, z") and
/// *ELEMENT blocks whose TYPE contains C3D8 ("id, n1..n8", continuation lines
/// allowed). Keywords are case-insensitive, "**" lines are comments, other
/// keyword blocks are skipped. Node ids are remapped to dense 0-based indices
/// in order of appearance; for non-contiguous sources the original id list is
/// appended to the label so the remap stays traceable through JSON round
/// trips.
pub fn parse_inp(text: &str, source: &str) -> Result<InpImport> {
    #[derive(PartialEq)]
    enum Block {
        None,
        Node,
        Hex,
        Skipped,
    }
    let mut block = Block::None;
    let mut node_ids: Vec<u64> = Vec::new();
    let mut id_to_index: HashMap<u64, usize> = HashMap::new();
    let mut nodes: Vec<[f64; 3]> = Vec::new();
    // (source line, raw numbers) per element, resolved after the whole file.
    let mut raw_elements: Vec<(usize, [u64; 8])> = Vec::new();
    let mut pending: Vec<u64> = Vec::new();
    let mut pending_line = 0usize;
    let mut skipped_blocks = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with("**") {
            continue;
        }
        if let Some(keyword_line) = line.strip_prefix('*') {
            if block == Block::Hex && !pending.is_empty() {
                return Err(Error::MeshParse {
                    line: pending_line,
                    message: format!("incomplete element record ({} of 9 values)", pending.len()),
                });
            }
            let upper = keyword_line.to_ascii_uppercase();
            let keyword = upper.split([',', ' ']).next().unwrap_or("").trim().to_string();
            block = match keyword.as_str() {
                "NODE" => Block::Node,
                "ELEMENT" => {
                    let type_param = upper
                        .split(',')
                        .filter_map(|p| p.trim().strip_prefix("TYPE=").map(str::to_string))
                        .next()
                        .unwrap_or_default();
                    if type_param.contains("C3D8") {
                        Block::Hex
                    } else {
                        skipped_blocks += 1;
                        Block::Skipped
                    }
                }
                _ => Block::None,
            };
            continue;
        }
        match block {
            Block::Node => {
                let fields: Vec<&str> = line.split(',').map(str::trim).filter(|f| !f.is_empty()).collect();
                if fields.len() != 4 {
                    return Err(Error::MeshParse {
                        line: line_no,
                        message: format!("node record needs 'id, x, y, z' (got {} fields)", fields.len()),
                    });
                }
                let id: u64 = fields[0].parse().map_err(|_| Error::MeshParse {
                    line: line_no,
                    message: format!("invalid node id '{}'", fields[0]),
                })?;
                if id_to_index.contains_key(&id) {
                    return Err(Error::MeshParse {
                        line: line_no,
                        message: format!("duplicate node id {id}"),
                    });
                }
                let mut coords = [0.0; 3];
                for (m, field) in fields[1..].iter().enumerate() {
                    // Fortran-style D exponents normalize to E.
                    let normalized = field.replace(['D', 'd'], "E");
                    coords[m] = normalized.parse().map_err(|_| Error::MeshParse {
                        line: line_no,
                        message: format!("invalid coordinate '{field}'"),
                    })?;
                }
                id_to_index.insert(id, nodes.len());
                node_ids.push(id);
                nodes.push(coords);
            }
            Block::Hex => {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                for field in line.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                    let value: u64 = field.parse().map_err(|_| Error::MeshParse {
                        line: line_no,
                        message: format!("invalid element value '{field}'"),
                    })?;
                    pending.push(value);
                }
                // Records are "id, n1..n8"; continuation lines just extend
                // the pending run until nine values complete a record.
                while pending.len() >= 9 {
                    let record: Vec<u64> = pending.drain(..9).collect();
                    raw_elements.push((pending_line, std::array::from_fn(|i| record[i + 1])));
                }
            }
            Block::Skipped | Block::None => {}
        }
    }
    if !pending.is_empty() {
        return Err(Error::MeshParse {
            line: pending_line,
            message: format!("incomplete element record ({} of 9 values)", pending.len()),
        });
    }

    let mut elements = Vec::with_capacity(raw_elements.len());
    for (line, conn) in raw_elements {
        let mut mapped = [0usize; 8];
        for (slot, id) in conn.iter().enumerate() {
            mapped[slot] = *id_to_index.get(id).ok_or(Error::MeshParse {
                line,
                message: format!("element references unknown node id {id}"),
            })?;
        }
        elements.push(mapped);
    }

    let contiguous = node_ids.iter().enumerate().all(|(k, &id)| id == k as u64 + 1);
    let label = if contiguous {
        source.to_string()
    } else {
        let ids: Vec<String> = node_ids.iter().map(u64::to_string).collect();
        format!("{source};ids=[{}]", ids.join(","))
    };
    Ok(InpImport {
        mesh: Mesh::new(label, nodes, elements)?,
        skipped_blocks,
    })
}

/// Structured-grid parameters shared by the grid and perturbed generators:
/// a parallelepiped spanned by three edge vectors, divided nx × ny × nz.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub edge_u: [f64; 3],
    pub edge_v: [f64; 3],
    pub edge_w: [f64; 3],
    pub divisions: [usize; 3],
}

#[derive(Debug, Clone)]
pub enum MeshSpec {
    /// Parallelepiped cells; every element has a constant metric.
    Grid(GridSpec),
    /// Grid with every interior node displaced by a seeded uniform random
    /// vector scaled by `amplitude` × the smallest cell edge.
    Perturbed {
        grid: GridSpec,
        amplitude: f64,
        seed: u64,
    },
    /// Annular sector of curved hexes with straight chordal edges.
    Annulus {
        inner_radius: f64,
        outer_radius: f64,
        height: f64,
        span_degrees: f64,
        divisions: [usize; 3],
    },
}

pub fn generate(spec: &MeshSpec) -> Result<Mesh> {
    match spec {
        MeshSpec::Grid(grid) => generate_grid(grid, None),
        MeshSpec::Perturbed { grid, amplitude, seed } => {
            if !(0.0..1.0).contains(amplitude) {
                return Err(Error::MeshSpec(format!(
                    "perturbation amplitude must lie in [0,1), got {amplitude}"
                )));
            }
            generate_grid(grid, Some((*amplitude, *seed)))
        }
        MeshSpec::Annulus {
            inner_radius,
            outer_radius,
            height,
            span_degrees,
            divisions,
        } => generate_annulus(*inner_radius, *outer_radius, *height, *span_degrees, *divisions),
    }
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn generate_grid(spec: &GridSpec, perturb: Option<(f64, u64)>) -> Result<Mesh> {
    let [nx, ny, nz] = spec.divisions;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::MeshSpec(format!(
            "grid divisions must be positive, got {nx}x{ny}x{nz}"
        )));
    }
    let node_index = |i: usize, j: usize, k: usize| (i * (ny + 1) + j) * (nz + 1) + k;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                let (fu, fv, fw) = (i as f64 / nx as f64, j as f64 / ny as f64, k as f64 / nz as f64);
                nodes.push(std::array::from_fn(|m| {
                    spec.origin[m] + fu * spec.edge_u[m] + fv * spec.edge_v[m] + fw * spec.edge_w[m]
                }));
            }
        }
    }
    let label;
    if let Some((amplitude, seed)) = perturb {
        let min_edge = (norm(&spec.edge_u) / nx as f64)
            .min(norm(&spec.edge_v) / ny as f64)
            .min(norm(&spec.edge_w) / nz as f64);
        let scale = amplitude * min_edge;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Draw in node-index order so identical seeds give identical meshes.
        for i in 0..=nx {
            for j in 0..=ny {
                for k in 0..=nz {
                    let offset: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                    let interior =
                        i > 0 && i < nx && j > 0 && j < ny && k > 0 && k < nz;
                    if interior {
                        let node = &mut nodes[node_index(i, j, k)];
                        for m in 0..3 {
                            node[m] += scale * offset[m];
                        }
                    }
                }
            }
        }
        label = format!("perturbed({nx}x{ny}x{nz},amplitude={amplitude},seed={seed},rng=chacha8)");
    } else {
        label = format!("grid({nx}x{ny}x{nz})");
    }
    let mut elements = Vec::with_capacity(nx * ny * nz);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                elements.push([
                    node_index(i, j, k),
                    node_index(i + 1, j, k),
                    node_index(i + 1, j + 1, k),
                    node_index(i, j + 1, k),
                    node_index(i, j, k + 1),
                    node_index(i + 1, j, k + 1),
                    node_index(i + 1, j + 1, k + 1),
                    node_index(i, j + 1, k + 1),
                ]);
            }
        }
    }
    Mesh::new(label, nodes, elements)
}

fn generate_annulus(
    inner: f64,
    outer: f64,
    height: f64,
    span_degrees: f64,
    divisions: [usize; 3],
) -> Result<Mesh> {
    let [nr, nt, nz] = divisions;
    if nr == 0 || nt == 0 || nz == 0 {
        return Err(Error::MeshSpec(format!(
            "annulus divisions must be positive, got {nr}x{nt}x{nz}"
        )));
    }
    if inner <= 0.0 || outer <= inner {
        return Err(Error::MeshSpec(format!(
            "annulus needs 0 < inner < outer (got inner={inner}, outer={outer})"
        )));
    }
    if height <= 0.0 {
        return Err(Error::MeshSpec(format!("annulus height must be positive, got {height}")));
    }
    if !(0.0..=360.0).contains(&span_degrees) || span_degrees == 0.0 {
        return Err(Error::MeshSpec(format!(
            "angular span must lie in (0, 360] degrees, got {span_degrees}"
        )));
    }
    let span = span_degrees.to_radians();
    let node_index = |i: usize, j: usize, k: usize| (i * (nt + 1) + j) * (nz + 1) + k;
    let mut nodes = Vec::with_capacity((nr + 1) * (nt + 1) * (nz + 1));
    for i in 0..=nr {
        let r = inner + (outer - inner) * i as f64 / nr as f64;
        for j in 0..=nt {
            let phi = span * j as f64 / nt as f64;
            for k in 0..=nz {
                let z = height * k as f64 / nz as f64;
                nodes.push([r * phi.cos(), r * phi.sin(), z]);
            }
        }
    }
    let mut elements = Vec::with_capacity(nr * nt * nz);
    for i in 0..nr {
        for j in 0..nt {
            for k in 0..nz {
                elements.push([
                    node_index(i, j, k),
                    node_index(i + 1, j, k),
                    node_index(i + 1, j + 1, k),
                    node_index(i, j + 1, k),
                    node_index(i, j, k + 1),
                    node_index(i + 1, j, k + 1),
                    node_index(i + 1, j + 1, k + 1),
                    node_index(i, j + 1, k + 1),
                ]);
            }
        }
    }
    let label = format!("annulus(r={inner}..{outer},h={height},span={span_degrees}deg,{nr}x{nt}x{nz})");
    Mesh::new(label, nodes, elements)
}

/// Per-element validity summary: minimum sampled metric per element, plus the
/// indices of elements with negative samples (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct MeshValidity {
    pub per_element_min: Vec<f64>,
    pub negative_elements: Vec<usize>,
}

pub fn mesh_validity(mesh: &Mesh, grid_n: usize) -> MeshValidity {
    let mut per_element_min = Vec::with_capacity(mesh.n_elements());
    let mut negative_elements = Vec::new();
    for e in 0..mesh.n_elements() {
        let hex = mesh.element_hex(e).expect("index in range");
        let scan = hex.validity_scan(grid_n);
        per_element_min.push(scan.min_metric);
        if scan.negative_count > 0 {
            negative_elements.push(e);
        }
    }
    MeshValidity {
        per_element_min,
        negative_elements,
    }
}
