//! Finite simplicial complexes: the combinatorial models of the base
//! space, with the fixtures used throughout the test suites.
//!
//! Complexes are small by design (at most 24 vertices), so simplices are
//! stored as vertex bitmasks and spanning queries are a set lookup.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LofuError, Result};

pub const MAX_VERTICES: usize = 24;

/// Document format: vertex count plus maximal simplices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub vertices: usize,
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Debug)]
pub struct SimplicialComplex {
    name: String,
    vertices: usize,
    spanning: HashSet<u32>,
    maximal: Vec<Vec<u8>>,
}

impl SimplicialComplex {
    /// Validates a document and closes the simplex list under faces.
    /// Every vertex is a simplex, so isolated vertices are allowed.
    pub fn from_doc(name: impl Into<String>, doc: &ComplexDoc) -> Result<Arc<Self>> {
        if doc.vertices == 0 {
            return Err(LofuError::invalid("empty complex: no vertices"));
        }
        if doc.vertices > MAX_VERTICES {
            return Err(LofuError::invalid(format!(
                "complex has {} vertices; the engine supports at most {MAX_VERTICES}",
                doc.vertices
            )));
        }
        let mut spanning: HashSet<u32> = HashSet::new();
        for v in 0..doc.vertices {
            spanning.insert(1 << v);
        }
        let mut maximal = Vec::new();
        for s in &doc.simplices {
            if s.is_empty() {
                return Err(LofuError::invalid("empty simplex in document"));
            }
            let mut mask = 0u32;
            for &v in s {
                if v >= doc.vertices {
                    return Err(LofuError::invalid(format!(
                        "vertex {v} out of range (complex has {} vertices)",
                        doc.vertices
                    )));
                }
                mask |= 1 << v;
            }
            // face closure: all nonempty submasks
            let mut sub = mask;
            loop {
                spanning.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
            spanning.remove(&0);
            maximal.push(s.iter().map(|&v| v as u8).collect());
        }
        Ok(Arc::new(SimplicialComplex {
            name: name.into(),
            vertices: doc.vertices,
            spanning,
            maximal,
        }))
    }

    pub fn parse_json(name: impl Into<String>, text: &str) -> Result<Arc<Self>> {
        let doc: ComplexDoc = serde_json::from_str(text)
            .map_err(|e| LofuError::invalid(format!("complex document: {e}")))?;
        SimplicialComplex::from_doc(name, &doc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn simplex_count(&self) -> usize {
        self.spanning.len()
    }

    pub fn maximal_simplices(&self) -> &[Vec<u8>] {
        &self.maximal
    }

    /// Does the vertex set given by `mask` span a simplex?
    pub fn spans_mask(&self, mask: u32) -> bool {
        self.spanning.contains(&mask)
    }

    pub fn spans(&self, vertices: impl IntoIterator<Item = u8>) -> bool {
        let mut mask = 0u32;
        for v in vertices {
            mask |= 1 << v;
        }
        self.spans_mask(mask)
    }

    /// The closeness relation: two vertices within one cover element.
    pub fn close(&self, a: u8, b: u8) -> bool {
        self.spans_mask((1 << a) | (1 << b))
    }

    /// List of all simplices as sorted vertex lists, for oracles.
    pub fn all_simplices(&self) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = self
            .spanning
            .iter()
            .map(|&mask| {
                (0..self.vertices as u8)
                    .filter(|&v| mask & (1 << v) != 0)
                    .collect()
            })
            .collect();
        out.sort();
        out
    }
}

/// Built-in fixtures addressable by name from the CLI and tests.
pub fn fixture(name: &str) -> Result<Arc<SimplicialComplex>> {
    let doc = match name {
        "point" => ComplexDoc {
            vertices: 1,
            simplices: vec![vec![0]],
        },
        "interval" => ComplexDoc {
            vertices: 2,
            simplices: vec![vec![0, 1]],
        },
        "circle" => ComplexDoc {
            vertices: 3,
            simplices: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        },
        "triangle" => ComplexDoc {
            vertices: 3,
            simplices: vec![vec![0, 1, 2]],
        },
        "sphere2" => ComplexDoc {
            vertices: 4,
            simplices: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        },
        "torus9" => ComplexDoc {
            vertices: 9,
            simplices: torus9_triangles(),
        },
        _ => {
            return Err(LofuError::invalid(format!(
                "unknown fixture `{name}` (expected point, interval, circle, triangle, sphere2, torus9, or a file path)"
            )))
        }
    };
    SimplicialComplex::from_doc(name, &doc)
}

/// 3x3 grid triangulation of the torus: each square (i,j) is split
/// along the diagonal into {v, right, diag} and {v, down, diag}.
fn torus9_triangles() -> Vec<Vec<usize>> {
    let v = |i: usize, j: usize| 3 * (i % 3) + (j % 3);
    let mut tris = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let a = v(i, j);
            let b = v(i, j + 1);
            let c = v(i + 1, j);
            let d = v(i + 1, j + 1);
            tris.push(vec![a, b, d]);
            tris.push(vec![a, c, d]);
        }
    }
    tris
}
